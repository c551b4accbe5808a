//! Expands a scenario into concrete trajectory runs.

use unruh_core::bec::{map_to_detector_model, DetectorMapping, TweezerSpec};
use unruh_core::dynamics::EvolveOptions;
use unruh_core::kinematics::{AtomSpec, FrameConfig, Wedge};
use unruh_core::liouvillian::build_hamiltonian;
use unruh_core::rates::{rates_from_sites, resolve_sites, CrossPairing, Site};
use unruh_core::{DensityMatrix, Generator};

use crate::config::{OmegaRule, Scenario, ScenarioConfig};
use crate::SimError;

/// One trajectory to integrate.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub label: String,
    pub frame: FrameConfig,
    pub sites: Vec<Site>,
    pub pairing: CrossPairing,
    pub initial: Vec<bool>,
    pub opts: EvolveOptions,
    /// Dense spectral analysis is done for ensembles up to this size.
    pub max_dense_atoms: usize,
}

impl RunSpec {
    pub fn n_atoms(&self) -> usize {
        self.sites.len()
    }

    /// Generator in the Schrödinger picture when every atom shares a
    /// wedge, otherwise in the interaction picture.
    pub fn generator(&self) -> Result<Generator, SimError> {
        let rates = rates_from_sites(&self.frame, &self.sites, self.pairing)?;
        let h = build_hamiltonian(&self.sites).ok();
        Ok(Generator::new(h, rates)?)
    }

    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::product(&self.initial)
    }
}

/// Runs of a scenario plus, for condensate designs, the detector mapping.
#[derive(Debug, Clone)]
pub struct Plan {
    pub runs: Vec<RunSpec>,
    pub mapping: Option<DetectorMapping>,
}

fn omegas(rule: OmegaRule, omega: f64, explicit: Option<&[f64]>, alphas: &[f64], a: f64) -> Vec<f64> {
    match rule {
        OmegaRule::Equal => vec![omega; alphas.len()],
        OmegaRule::Resonant => alphas.iter().map(|al| omega * al / a).collect(),
        OmegaRule::Explicit => explicit.map(<[f64]>::to_vec).unwrap_or_default(),
    }
}

struct Builder<'a> {
    cfg: &'a ScenarioConfig,
    name: String,
}

impl Builder<'_> {
    fn options(&self, n: usize) -> EvolveOptions {
        let [p, q] = self.cfg.concurrence_pair;
        EvolveOptions::new(self.cfg.t_max, self.cfg.dt)
            .record_every(self.cfg.record_every)
            .retain_states(self.cfg.retain_states)
            .concurrence_pair((n >= 2).then_some((p - 1, q - 1)))
    }

    fn frame(&self, a: f64) -> Result<FrameConfig, SimError> {
        Ok(FrameConfig::new(a, self.cfg.eps_res, self.cfg.gamma0)?)
    }

    fn spec_for_atoms(&self, label: String, a: f64, atoms: &[AtomSpec], initial: Vec<bool>) -> Result<RunSpec, SimError> {
        let frame = self.frame(a)?;
        Ok(self.spec_for_sites(label, frame, resolve_sites(&frame, atoms)?, initial))
    }

    fn spec_for_sites(&self, label: String, frame: FrameConfig, sites: Vec<Site>, initial: Vec<bool>) -> RunSpec {
        RunSpec {
            opts: self.options(sites.len()),
            label,
            frame,
            sites,
            pairing: self.cfg.pairing.into(),
            initial,
            max_dense_atoms: self.cfg.max_dense_atoms,
        }
    }

    fn atoms(&self, alphas: &[f64], rule: OmegaRule, a: f64, wedges: Option<Vec<Wedge>>) -> Vec<AtomSpec> {
        let cfg = self.cfg;
        let w = omegas(rule, cfg.omega, cfg.omegas.as_deref(), alphas, a);
        alphas
            .iter()
            .enumerate()
            .map(|(j, &al)| {
                let mut atom = AtomSpec::new(w[j], al);
                if let Some(g) = &cfg.couplings {
                    atom = atom.with_coupling(g[j]);
                }
                if let Some(ws) = &wedges {
                    atom = atom.in_wedge(ws[j]);
                }
                atom
            })
            .collect()
    }

    fn initial(&self, n: usize) -> Vec<bool> {
        self.cfg.initial_state.pattern(n).unwrap_or_else(|| vec![true; n])
    }
}

/// Labels use fixed formatting so file names are stable.
fn alpha_label(prefix: &str, x: f64) -> String {
    let s = format!("{x}").replace('.', "p");
    format!("{prefix}_{s}")
}

/// Expands a validated config.
pub fn plan(cfg: &ScenarioConfig) -> Result<Plan, SimError> {
    let b = Builder { cfg, name: cfg.name() };
    let mut runs = Vec::new();
    let mut mapping = None;
    match cfg.scenario {
        Scenario::EqualAccelerationSweep => {
            let n = cfg.n_atoms.unwrap_or(0);
            for &alpha in cfg.sweep_alphas.as_deref().unwrap_or_default() {
                let a = cfg.a_ref.unwrap_or(alpha);
                let atoms = b.atoms(&vec![alpha; n], cfg.omega_rule, a, None);
                runs.push(b.spec_for_atoms(alpha_label(&b.name, alpha), a, &atoms, b.initial(n))?);
            }
        }
        Scenario::MismatchCases => {
            let n = cfg.n_atoms.unwrap_or(0);
            for case in &cfg.cases {
                let alphas: Vec<f64> = (0..n).map(|j| case.alpha_base + case.delta_alpha * j as f64).collect();
                let a = alphas[0];
                let atoms = b.atoms(&alphas, case.omega_rule, a, None);
                runs.push(b.spec_for_atoms(format!("{}_{}", b.name, case.label), a, &atoms, b.initial(n))?);
            }
        }
        Scenario::Custom | Scenario::CounterWedge => {
            let alphas = cfg.alphas.clone().unwrap_or_default();
            let a = cfg.a_ref.unwrap_or(alphas[0]);
            let wedges: Option<Vec<Wedge>> = cfg.wedges.as_ref().map(|w| w.iter().map(|&x| x.into()).collect());
            let atoms = b.atoms(&alphas, cfg.omega_rule, a, wedges);
            let initial = b.initial(alphas.len());
            if cfg.scenario == Scenario::CounterWedge && cfg.compare_without_wedge_ii {
                let keep: Vec<usize> = (0..atoms.len()).filter(|&j| atoms[j].wedge == Wedge::I).collect();
                let sub: Vec<AtomSpec> = keep.iter().map(|&j| atoms[j]).collect();
                let sub_init: Vec<bool> = keep.iter().map(|&j| initial[j]).collect();
                let mut only = b.spec_for_atoms(format!("{}_wedge_i_only", b.name), a, &sub, sub_init)?;
                if sub.len() < 2 {
                    only.opts = only.opts.concurrence_pair(None);
                } else {
                    only.opts = only.opts.concurrence_pair(Some((0, 1)));
                }
                runs.push(b.spec_for_atoms(b.name.clone(), a, &atoms, initial)?);
                runs.push(only);
            } else {
                runs.push(b.spec_for_atoms(b.name.clone(), a, &atoms, initial)?);
            }
        }
        Scenario::BecDesign => {
            let bath = cfg.bath.ok_or_else(|| SimError::config("bath", "required for bec_design"))?;
            let tweezers: Vec<TweezerSpec> = cfg.tweezers.iter().map(|&t| t.into()).collect();
            let m = map_to_detector_model(&bath.into(), &tweezers, cfg.gamma0)?;
            if cfg.simulate_mapped {
                let mut frame = m.frame;
                frame.eps_res = cfg.eps_res;
                let n = m.sites.len();
                runs.push(b.spec_for_sites(format!("{}_mapped", b.name), frame, m.sites.clone(), b.initial(n)));
            }
            mapping = Some(m);
        }
    }
    Ok(Plan { runs, mapping })
}
