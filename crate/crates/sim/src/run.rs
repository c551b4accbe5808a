//! Executes planned runs and condenses each trajectory into a summary.

use rayon::prelude::*;
use unruh_core::bec::DetectorMapping;
use unruh_core::dynamics::{correlation_oracle, evolve, interior_peak, record_spacing, TimeSeries};
use unruh_core::kinematics::Wedge;
use unruh_core::liouvillian::{build_superoperator, steady_state_analysis};
use unruh_core::ops::{expect_string, SiteOp};
use unruh_core::Generator;

use crate::bec_design::{design_report, BecReport};
use crate::config::{Scenario, ScenarioConfig};
use crate::plan::{plan, RunSpec};
use crate::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    pub n_atoms: usize,
    pub t_final: f64,
    pub final_populations: Vec<f64>,
    pub final_p_tot: f64,
    pub final_c_coh: f64,
    pub final_c_conc: f64,
    pub initial_r_tot: f64,
    /// (time, value) of the largest interior maximum of R_tot above R_tot(0).
    pub emission_peak: Option<(f64, f64)>,
    pub max_r_tot: f64,
    pub max_c_coh: (f64, f64),
    pub max_c_conc: (f64, f64),
    pub max_trace_drift: f64,
    /// Zero-eigenvalue multiplicity of the dense generator, for small ensembles.
    pub zero_multiplicity: Option<usize>,
    /// Correlation-equation residual, when states are retained.
    pub oracle_residual: Option<f64>,
    /// Largest |⟨σ_i^± σ_κ^−⟩| between wedges, when states are retained.
    pub inter_wedge_coherence: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: RunSpec,
    pub series: TimeSeries,
    pub summary: RunSummary,
}

/// Named scalar comparing two runs of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub scenario: Scenario,
    pub runs: Vec<RunResult>,
    pub comparisons: Vec<Comparison>,
    pub mapping: Option<DetectorMapping>,
    pub bec: Option<BecReport>,
}

fn argmax(times: &[f64], values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .zip(times)
        .fold((0.0, f64::NEG_INFINITY), |best, (&v, &t)| if v > best.1 { (t, v) } else { best })
}

fn inter_wedge_max(gen: &Generator, series: &TimeSeries) -> Option<f64> {
    let rates = gen.rates();
    if !rates.is_counter() || series.states.is_empty() {
        return None;
    }
    let mut worst = 0.0f64;
    for rho in &series.states {
        for &i in &rates.wedge_i {
            for &k in &rates.wedge_ii {
                for first in [SiteOp::Lower(i), SiteOp::Raise(i)] {
                    worst = worst.max(expect_string(rho, &[first, SiteOp::Lower(k)]).norm());
                }
            }
        }
    }
    Some(worst)
}

pub fn run_one(spec: &RunSpec) -> Result<RunResult, SimError> {
    let gen = spec.generator()?;
    let series = evolve(&spec.initial_state(), &gen, &spec.opts)?;
    let zero_multiplicity = if spec.n_atoms() <= spec.max_dense_atoms {
        let l = build_superoperator(gen.hamiltonian(), gen.rates(), spec.max_dense_atoms)?;
        Some(steady_state_analysis(&l)?.zero_multiplicity)
    } else {
        None
    };
    let oracle_residual = if spec.opts.retain_states && series.states.len() >= 3 {
        Some(correlation_oracle(&series, &gen, record_spacing(&spec.opts)?)?)
    } else {
        None
    };
    let summary = summarise(spec, &series, zero_multiplicity, oracle_residual, inter_wedge_max(&gen, &series));
    Ok(RunResult {
        spec: spec.clone(),
        series,
        summary,
    })
}

fn summarise(
    spec: &RunSpec,
    series: &TimeSeries,
    zero_multiplicity: Option<usize>,
    oracle_residual: Option<f64>,
    inter_wedge_coherence: Option<f64>,
) -> RunSummary {
    let last = series.final_record().expect("a series always holds the initial record");
    let r = series.column(|r| r.r_tot);
    RunSummary {
        label: spec.label.clone(),
        n_atoms: spec.n_atoms(),
        t_final: *series.times.last().unwrap_or(&0.0),
        final_populations: last.populations.clone(),
        final_p_tot: last.p_tot,
        final_c_coh: last.c_coh,
        final_c_conc: last.c_conc,
        initial_r_tot: r[0],
        emission_peak: interior_peak(&r).map(|(i, v)| (series.times[i], v)),
        max_r_tot: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_c_coh: argmax(&series.times, &series.column(|r| r.c_coh)),
        max_c_conc: argmax(&series.times, &series.column(|r| r.c_conc)),
        max_trace_drift: series.max_trace_drift,
        zero_multiplicity,
        oracle_residual,
        inter_wedge_coherence,
    }
}

/// Largest population difference of the wedge-I atoms between a
/// counter-wedge run and the run without wedge II.
fn wedge_i_deviation(full: &RunResult, only: &RunResult) -> f64 {
    let keep: Vec<usize> = (0..full.spec.n_atoms())
        .filter(|&j| full.spec.sites[j].wedge == Wedge::I)
        .collect();
    full.series
        .records
        .iter()
        .zip(&only.series.records)
        .flat_map(|(a, b)| {
            keep.iter()
                .enumerate()
                .map(move |(sub, &j)| (a.populations[j] - b.populations[sub]).abs())
        })
        .fold(0.0, f64::max)
}

/// Runs every trajectory of `cfg`. Trajectories run in parallel on the
/// current rayon pool; results keep the planned order.
pub fn execute(cfg: &ScenarioConfig) -> Result<Outcome, SimError> {
    let diags = crate::config::validate(cfg);
    if !diags.is_empty() {
        return Err(SimError::Config(diags));
    }
    let plan = plan(cfg)?;
    let runs = plan.runs.par_iter().map(run_one).collect::<Result<Vec<_>, _>>()?;

    let mut comparisons = Vec::new();
    if cfg.scenario == Scenario::CounterWedge && runs.len() == 2 {
        comparisons.push(Comparison {
            label: "wedge_i_population_deviation".into(),
            value: wedge_i_deviation(&runs[0], &runs[1]),
        });
    }
    let bec = match cfg.scenario {
        Scenario::BecDesign => Some(design_report(cfg)?),
        _ => None,
    };
    Ok(Outcome {
        name: cfg.name(),
        scenario: cfg.scenario,
        runs,
        comparisons,
        mapping: plan.mapping,
        bec,
    })
}
