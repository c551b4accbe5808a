//! Scenario configuration files.
//!
//! Configs are TOML with a `schema_version` key. Atom indices are 1-based
//! in files and 0-based everywhere else.

use std::fmt;

use serde::Deserialize;
use unruh_core::bec::{two_level_window, BogoliubovBath, TweezerSpec};
use unruh_core::dynamics::{DEFAULT_DT, DEFAULT_RECORD_EVERY, DEFAULT_T_MAX};
use unruh_core::kinematics::{Wedge, DEFAULT_EPS_RES, DEFAULT_GAMMA0};
use unruh_core::liouvillian::DEFAULT_MAX_DENSE_ATOMS;
use unruh_core::rates::CrossPairing;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest ensemble the runner accepts; states are dense 2^N × 2^N.
pub const MAX_ATOMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    EqualAccelerationSweep,
    MismatchCases,
    CounterWedge,
    BecDesign,
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::EqualAccelerationSweep => "equal_acceleration_sweep",
            Scenario::MismatchCases => "mismatch_cases",
            Scenario::CounterWedge => "counter_wedge",
            Scenario::BecDesign => "bec_design",
            Scenario::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaRule {
    /// Every atom has proper frequency `omega`.
    #[default]
    Equal,
    /// ω_j = omega·α_j/a, so every red-shifted frequency equals `omega`.
    Resonant,
    /// Frequencies listed in `omegas`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    #[default]
    Anomalous,
    Literal,
}

impl From<Pairing> for CrossPairing {
    fn from(p: Pairing) -> Self {
        match p {
            Pairing::Anomalous => CrossPairing::Anomalous,
            Pairing::Literal => CrossPairing::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum WedgeName {
    I,
    II,
}

impl From<WedgeName> for Wedge {
    fn from(w: WedgeName) -> Self {
        match w {
            WedgeName::I => Wedge::I,
            WedgeName::II => Wedge::II,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// `"all_excited"` or `"all_ground"`.
    Named(String),
    /// One entry per atom, 1 for excited and 0 for ground.
    Product(Vec<u8>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named("all_excited".into())
    }
}

impl InitialState {
    /// Excitation pattern, or `None` if the entry is malformed.
    pub fn pattern(&self, n_atoms: usize) -> Option<Vec<bool>> {
        match self {
            InitialState::Named(s) if s == "all_excited" => Some(vec![true; n_atoms]),
            InitialState::Named(s) if s == "all_ground" => Some(vec![false; n_atoms]),
            InitialState::Named(_) => None,
            InitialState::Product(v) => {
                if v.len() != n_atoms || v.iter().any(|&b| b > 1) {
                    None
                } else {
                    Some(v.iter().map(|&b| b == 1).collect())
                }
            }
        }
    }
}

/// One run of a `mismatch_cases` scenario: α_j = alpha_base + delta_alpha·(j − 1).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MismatchCase {
    pub label: String,
    #[serde(default = "default_alpha_base")]
    pub alpha_base: f64,
    pub delta_alpha: f64,
    #[serde(default)]
    pub omega_rule: OmegaRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub m: f64,
    pub mu: f64,
    pub n0: f64,
    pub length: f64,
    pub u0: f64,
    pub temperature: f64,
}

impl From<BathConfig> for BogoliubovBath {
    fn from(b: BathConfig) -> Self {
        BogoliubovBath {
            m: b.m,
            mu: b.mu,
            n0: b.n0,
            length: b.length,
            u0: b.u0,
            temperature: b.temperature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TweezerConfig {
    pub v0: f64,
    pub w: f64,
    pub mass: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default = "one")]
    pub g: f64,
}

impl From<TweezerConfig> for TweezerSpec {
    fn from(t: TweezerConfig) -> Self {
        TweezerSpec::new(t.v0, t.w, t.mass).at(t.x).with_coupling(t.g)
    }
}

/// Grids for the condensate design sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BecSweeps {
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
    pub w_points: usize,
    pub grid_v0: [f64; 2],
    pub grid_w: [f64; 2],
    pub grid_points: usize,
}

impl Default for BecSweeps {
    fn default() -> Self {
        BecSweeps {
            k_min: 1e-2,
            k_max: 10.0,
            k_points: 400,
            w_points: 200,
            grid_v0: [0.5, 10.0],
            grid_w: [0.2, 3.0],
            grid_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub name: Option<String>,
    pub n_atoms: Option<usize>,
    /// Reference acceleration; defaults to the first atom's α.
    pub a_ref: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    /// One run per value, every atom at that acceleration.
    pub sweep_alphas: Option<Vec<f64>>,
    pub wedges: Option<Vec<WedgeName>>,
    #[serde(default)]
    pub omega_rule: OmegaRule,
    #[serde(default = "one")]
    pub omega: f64,
    pub omegas: Option<Vec<f64>>,
    pub couplings: Option<Vec<f64>>,
    #[serde(default)]
    pub cases: Vec<MismatchCase>,
    #[serde(default)]
    pub pairing: Pairing,
    #[serde(default = "default_gamma0")]
    pub gamma0: f64,
    #[serde(default = "default_eps_res")]
    pub eps_res: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_pair")]
    pub concurrence_pair: [usize; 2],
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub retain_states: bool,
    #[serde(default = "default_max_dense")]
    pub max_dense_atoms: usize,
    /// Counter-wedge runs: also evolve the wedge-I atoms alone.
    #[serde(default = "yes")]
    pub compare_without_wedge_ii: bool,
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub tweezers: Vec<TweezerConfig>,
    #[serde(default)]
    pub bec_sweeps: BecSweeps,
    /// Condensate designs: also evolve the mapped detector model.
    #[serde(default = "yes")]
    pub simulate_mapped: bool,
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_alpha_base() -> f64 {
    0.2
}
fn default_gamma0() -> f64 {
    DEFAULT_GAMMA0
}
fn default_eps_res() -> f64 {
    DEFAULT_EPS_RES
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_record_every() -> usize {
    DEFAULT_RECORD_EVERY
}
fn default_pair() -> [usize; 2] {
    [1, 2]
}
fn default_output() -> String {
    "out".into()
}
fn default_max_dense() -> usize {
    DEFAULT_MAX_DENSE_ATOMS
}

/// A problem with one field of a config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub fn parse(text: &str) -> Result<ScenarioConfig, Vec<Diagnostic>> {
    toml::from_str(text).map_err(|e| {
        let field = e
            .span()
            .map(|s| format!("<input:{}..{}>", s.start, s.end))
            .unwrap_or_else(|| "<input>".into());
        vec![Diagnostic::new(field, e.message().trim().to_string())]
    })
}

/// Parses and validates in one step.
pub fn load(text: &str) -> Result<ScenarioConfig, Vec<Diagnostic>> {
    let cfg = parse(text)?;
    let diags = validate(&cfg);
    if diags.is_empty() {
        Ok(cfg)
    } else {
        Err(diags)
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ScenarioConfig {
    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.scenario.to_string())
    }

    /// Atom count of the explicit-list scenarios.
    pub fn list_atoms(&self) -> usize {
        self.n_atoms
            .or_else(|| self.alphas.as_ref().map(Vec::len))
            .unwrap_or(0)
    }
}

/// Every violation in `cfg`; empty means the config can run.
pub fn validate(cfg: &ScenarioConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    let mut push = |field: &str, msg: String| d.push(Diagnostic::new(field, msg));

    if cfg.schema_version != SCHEMA_VERSION {
        push(
            "schema_version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
        );
    }
    if !(cfg.gamma0 >= 0.0 && cfg.gamma0.is_finite()) {
        push("gamma0", "must be non-negative".into());
    }
    if !positive(cfg.eps_res) {
        push("eps_res", "must be positive".into());
    }
    if !(cfg.t_max >= 0.0 && cfg.t_max.is_finite()) {
        push("t_max", "must be non-negative".into());
    }
    if !positive(cfg.dt) {
        push("dt", "must be positive".into());
    } else if cfg.dt >= cfg.t_max {
        push("dt", format!("must be smaller than t_max = {}", cfg.t_max));
    }
    if cfg.record_every == 0 {
        push("record_every", "must be at least 1".into());
    }
    if cfg.output_path.trim().is_empty() {
        push("output_path", "must not be empty".into());
    }
    if !positive(cfg.omega) {
        push("omega", "must be positive".into());
    }
    if let Some(a) = cfg.a_ref {
        if !positive(a) {
            push("a_ref", "must be positive".into());
        }
    }

    let n = match cfg.scenario {
        Scenario::EqualAccelerationSweep => {
            match &cfg.sweep_alphas {
                None => push("sweep_alphas", "required for equal_acceleration_sweep".into()),
                Some(v) if v.is_empty() => push("sweep_alphas", "must not be empty".into()),
                Some(v) if !v.iter().all(|&x| positive(x)) => {
                    push("sweep_alphas", "accelerations must be positive".into())
                }
                _ => {}
            }
            if cfg.n_atoms.is_none() {
                push("n_atoms", "required for equal_acceleration_sweep".into());
            }
            cfg.n_atoms.unwrap_or(0)
        }
        Scenario::MismatchCases => {
            if cfg.cases.is_empty() {
                push("cases", "mismatch_cases needs at least one case".into());
            }
            for (i, c) in cfg.cases.iter().enumerate() {
                if !positive(c.alpha_base) || !c.delta_alpha.is_finite() || c.delta_alpha < 0.0 {
                    push(
                        &format!("cases[{i}]"),
                        "alpha_base must be positive and delta_alpha non-negative".into(),
                    );
                }
                if c.omega_rule == OmegaRule::Explicit {
                    push(&format!("cases[{i}].omega_rule"), "explicit frequencies are not supported per case".into());
                }
            }
            if cfg.n_atoms.is_none() {
                push("n_atoms", "required for mismatch_cases".into());
            }
            cfg.n_atoms.unwrap_or(0)
        }
        Scenario::CounterWedge | Scenario::Custom => {
            let n = cfg.list_atoms();
            match &cfg.alphas {
                None => push("alphas", format!("required for {}", cfg.scenario)),
                Some(v) => {
                    if v.len() != n {
                        push("alphas", format!("has {} entries but n_atoms = {n}", v.len()));
                    }
                    if !v.iter().all(|&x| positive(x)) {
                        push("alphas", "accelerations must be positive".into());
                    }
                }
            }
            match &cfg.wedges {
                Some(w) if w.len() != n => push("wedges", format!("has {} entries but n_atoms = {n}", w.len())),
                Some(w) if cfg.scenario == Scenario::CounterWedge => {
                    if !w.contains(&WedgeName::I) {
                        push("wedges", "counter_wedge needs at least one wedge-I atom".into());
                    }
                    if !w.contains(&WedgeName::II) {
                        push("wedges", "counter_wedge needs at least one wedge-II atom".into());
                    }
                }
                None if cfg.scenario == Scenario::CounterWedge => {
                    push("wedges", "counter_wedge needs a wedge-II atom set".into())
                }
                _ => {}
            }
            n
        }
        Scenario::BecDesign => {
            validate_bec(cfg, &mut push);
            cfg.tweezers.len()
        }
    };

    if cfg.scenario != Scenario::BecDesign || cfg.simulate_mapped {
        if n == 0 {
            push("n_atoms", "at least one atom is required".into());
        } else if n > MAX_ATOMS {
            push("n_atoms", format!("{n} atoms exceeds the limit of {MAX_ATOMS}"));
        }
        if cfg.omega_rule == OmegaRule::Explicit {
            match &cfg.omegas {
                None => push("omegas", "required when omega_rule = \"explicit\"".into()),
                Some(v) if v.len() != n => push("omegas", format!("has {} entries but n_atoms = {n}", v.len())),
                Some(v) if !v.iter().all(|&x| positive(x)) => push("omegas", "frequencies must be positive".into()),
                _ => {}
            }
        }
        if let Some(g) = &cfg.couplings {
            if g.len() != n {
                push("couplings", format!("has {} entries but n_atoms = {n}", g.len()));
            }
            if !g.iter().all(|&x| x >= 0.0 && x.is_finite()) {
                push("couplings", "couplings must be non-negative".into());
            }
        }
        if n > 0 && cfg.initial_state.pattern(n).is_none() {
            push(
                "initial_state",
                format!("must be \"all_excited\", \"all_ground\" or {n} entries of 0/1"),
            );
        }
        let [p, q] = cfg.concurrence_pair;
        if n >= 2 && (p == q || p == 0 || q == 0 || p > n || q > n) {
            push(
                "concurrence_pair",
                format!("needs two distinct indices in 1..={n}, got [{p}, {q}]"),
            );
        }
    }
    d
}

fn validate_bec(cfg: &ScenarioConfig, push: &mut impl FnMut(&str, String)) {
    match cfg.bath {
        None => push("bath", "required for bec_design".into()),
        Some(b) => {
            if let Err(e) = BogoliubovBath::from(b).validate() {
                push("bath", e.to_string());
            }
        }
    }
    if cfg.tweezers.is_empty() {
        push("tweezers", "bec_design needs at least one tweezer".into());
    }
    for (i, t) in cfg.tweezers.iter().enumerate() {
        let field = format!("tweezers[{i}]");
        if let Err(e) = TweezerSpec::from(*t).validate() {
            push(&field, e.to_string());
            continue;
        }
        if let Ok((lo, hi)) = two_level_window(t.v0, t.mass) {
            if !(lo < t.w && t.w < hi) {
                push(
                    &format!("{field}.w"),
                    format!("waist {} outside the two-level window ({lo:.6}, {hi:.6})", t.w),
                );
            }
        }
    }
    let s = &cfg.bec_sweeps;
    if !(positive(s.k_min) && s.k_max > s.k_min && s.k_points >= 2) {
        push("bec_sweeps", "need 0 < k_min < k_max and k_points >= 2".into());
    }
    if s.w_points < 2 || s.grid_points < 2 {
        push("bec_sweeps", "w_points and grid_points must be at least 2".into());
    }
    if !(positive(s.grid_v0[0]) && s.grid_v0[1] > s.grid_v0[0] && positive(s.grid_w[0]) && s.grid_w[1] > s.grid_w[0]) {
        push("bec_sweeps", "grid_v0 and grid_w must be increasing positive ranges".into());
    }
}
