//! Condensate design sweeps: dispersion, width and energy across the
//! two-level window, coupling strength and the bound-state count grid.

use rayon::prelude::*;
use unruh_core::bec::{
    bogoliubov_mode, bound_state_count, coupling_tensor, transition_energy, two_level_window, variational_width,
    BogoliubovBath, BogoliubovMode, TweezerSpec,
};

use crate::config::ScenarioConfig;
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthPoint {
    pub w: f64,
    pub a0: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPoint {
    pub k: f64,
    pub g00: f64,
    pub g11: f64,
    pub g10: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStatePoint {
    pub v0: f64,
    pub w: f64,
    pub closed_form: u64,
    pub numeric: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BecReport {
    pub dispersion: Vec<BogoliubovMode>,
    pub width: Vec<WidthPoint>,
    pub coupling: Vec<CouplingPoint>,
    pub bound_states: Vec<BoundStatePoint>,
}

impl BecReport {
    pub fn disagreements(&self) -> usize {
        self.bound_states.iter().filter(|p| p.closed_form != p.numeric).count()
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn design_report(cfg: &ScenarioConfig) -> Result<BecReport, SimError> {
    let bath: BogoliubovBath = cfg.bath.ok_or_else(|| SimError::config("bath", "required"))?.into();
    let first: TweezerSpec = (*cfg.tweezers.first().ok_or_else(|| SimError::config("tweezers", "empty"))?).into();
    let s = &cfg.bec_sweeps;

    let ks = log_grid(s.k_min, s.k_max, s.k_points);
    let dispersion = ks.iter().map(|&k| bogoliubov_mode(&bath, k)).collect::<Result<Vec<_>, _>>()?;

    // open interval: endpoints excluded
    let (lo, hi) = two_level_window(first.v0, first.mass)?;
    let width = (1..=s.w_points)
        .map(|i| {
            let w = lo + (hi - lo) * i as f64 / (s.w_points + 1) as f64;
            let t = TweezerSpec { w, ..first };
            let a0 = variational_width(&t)?;
            Ok(WidthPoint {
                w,
                a0,
                omega: transition_energy(&t, a0),
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let a0 = variational_width(&first)?;
    let coupling = dispersion
        .iter()
        .map(|m| {
            let c = coupling_tensor(&bath, m, a0, first.g);
            CouplingPoint {
                k: m.k,
                g00: c.g00.norm(),
                g11: c.g11.norm(),
                g10: c.g10.norm(),
            }
        })
        .collect();

    let v0s = lin_grid(s.grid_v0[0], s.grid_v0[1], s.grid_points);
    let ws = lin_grid(s.grid_w[0], s.grid_w[1], s.grid_points);
    let cells: Vec<(f64, f64)> = v0s.iter().flat_map(|&v| ws.iter().map(move |&w| (v, w))).collect();
    let bound_states = cells
        .par_iter()
        .map(|&(v0, w)| {
            let c = bound_state_count(&TweezerSpec::new(v0, w, first.mass))?;
            Ok(BoundStatePoint {
                v0,
                w,
                closed_form: c.closed_form,
                numeric: c.numeric,
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    Ok(BecReport {
        dispersion,
        width,
        coupling,
        bound_states,
    })
}
