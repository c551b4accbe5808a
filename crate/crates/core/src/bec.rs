//! Condensate analogue: Bogoliubov phonons as the bath, impurities held in
//! optical tweezers as the two-level atoms.
//!
//! Units: ħ = k_B = 1 throughout. Positions enter the detector model
//! through the phase each atom imprints on its resonant phonon; see
//! [`map_to_detector_model`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::kinematics::{FrameConfig, Wedge, DEFAULT_EPS_RES};
use crate::rates::Site;

/// Largest finite-difference grid used by [`bound_state_count`].
pub const MAX_GRID_POINTS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovBath {
    /// Boson mass.
    pub m: f64,
    /// Chemical potential.
    pub mu: f64,
    /// Condensate line density.
    pub n0: f64,
    /// System length.
    pub length: f64,
    /// Boson-boson interaction strength.
    pub u0: f64,
    pub temperature: f64,
}

impl BogoliubovBath {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m", self.m),
            ("mu", self.mu),
            ("n0", self.n0),
            ("length", self.length),
            ("u0", self.u0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("bath parameter {name} must be positive")));
            }
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(domain("bath temperature must be non-negative"));
        }
        Ok(())
    }

    /// μ − u0·n0; zero for a self-consistent mean field.
    pub fn mu_mismatch(&self) -> f64 {
        self.mu - self.u0 * self.n0
    }

    /// Long-wavelength phonon speed √(μ/m).
    pub fn sound_speed(&self) -> f64 {
        libm::sqrt(self.mu / self.m)
    }

    pub fn free_energy(&self, k: f64) -> f64 {
        k * k / (2.0 * self.m)
    }

    /// Wave number of the phonon with energy `e`.
    pub fn resonant_wave_number(&self, e: f64) -> Result<f64> {
        if !(e > 0.0) {
            return Err(domain("resonant energy must be positive"));
        }
        let eps = libm::sqrt(self.mu * self.mu + e * e) - self.mu;
        Ok(libm::sqrt(2.0 * self.m * eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode {
    pub k: f64,
    pub energy: f64,
    pub u: f64,
    pub v: f64,
    /// Structure factor u − v.
    pub s: f64,
}

pub fn bogoliubov_mode(bath: &BogoliubovBath, k: f64) -> Result<BogoliubovMode> {
    bath.validate()?;
    if k == 0.0 {
        return Err(Error::Divergence);
    }
    let eps = bath.free_energy(k);
    let energy = libm::sqrt(eps * (eps + 2.0 * bath.mu));
    let ratio = (eps + bath.mu) / (2.0 * energy);
    let u = libm::sqrt(ratio + 0.5);
    let v = libm::sqrt(ratio - 0.5);
    Ok(BogoliubovMode {
        k,
        energy,
        u,
        v,
        // u − v without cancellation, using u² − v² = 1
        s: 1.0 / (u + v),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TweezerSpec {
    /// Potential depth.
    pub v0: f64,
    /// Beam waist.
    pub w: f64,
    /// Impurity mass.
    pub mass: f64,
    /// Laboratory position.
    pub x: f64,
    /// Impurity-boson coupling.
    pub g: f64,
}

impl TweezerSpec {
    pub fn new(v0: f64, w: f64, mass: f64) -> Self {
        TweezerSpec {
            v0,
            w,
            mass,
            x: 0.0,
            g: 1.0,
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v0 >= 0.0) || !self.v0.is_finite() {
            return Err(domain("tweezer depth must be non-negative"));
        }
        if !(self.w > 0.0) || !(self.mass > 0.0) {
            return Err(domain("tweezer waist and impurity mass must be positive"));
        }
        if !(self.g >= 0.0) || !self.x.is_finite() {
            return Err(domain("tweezer coupling must be non-negative and position finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundStateCount {
    /// ⌊2√(V0 M/(π w)) − 1/2⌋, floored at zero.
    pub closed_form: u64,
    /// Negative eigenvalues of the discretised Hamiltonian.
    pub numeric: u64,
}

impl BoundStateCount {
    pub fn agree(&self) -> bool {
        self.closed_form == self.numeric
    }
}

/// Closed-form count, evaluated as written.
pub fn bound_state_closed_form(t: &TweezerSpec) -> u64 {
    let x = 2.0 * libm::sqrt(t.v0 * t.mass / (PI * t.w)) - 0.5;
    libm::floor(x).max(0.0) as u64
}

/// Both bound-state counts for a Gaussian well −V0 exp(−x²/w²).
///
/// The numeric count discretises −(1/2M)∂² + V on a Dirichlet box with
/// second-order differences and counts negative pivots of the LDLᵀ
/// factorisation (Sturm sequence). Confinement only raises levels, so the
/// count approaches the true one from below as the box grows; the box is
/// sized from the weak-binding decay length 1/κ, κ = M V0 w √π.
pub fn bound_state_count(t: &TweezerSpec) -> Result<BoundStateCount> {
    t.validate()?;
    Ok(BoundStateCount {
        closed_form: bound_state_closed_form(t),
        numeric: numeric_bound_states(t)?,
    })
}

fn numeric_bound_states(t: &TweezerSpec) -> Result<u64> {
    if t.v0 == 0.0 {
        return Ok(0);
    }
    let kappa = t.mass * t.v0 * t.w * libm::sqrt(PI);
    let half_width = (10.0 * t.w).max(20.0 / kappa);
    let h = (t.w / 20.0).min(0.1 / libm::sqrt(2.0 * t.mass * t.v0));
    let n = libm::ceil(2.0 * half_width / h) as usize;
    if n > MAX_GRID_POINTS {
        return Err(Error::Numerical(format!(
            "bound-state grid needs {n} points (limit {MAX_GRID_POINTS})"
        )));
    }
    let h = 2.0 * half_width / n as f64;
    let kin = 1.0 / (t.mass * h * h);
    let off2 = (0.5 * kin) * (0.5 * kin);
    let mut count = 0;
    let mut d_prev = f64::INFINITY;
    for i in 1..n {
        let x = -half_width + i as f64 * h;
        let a = kin - t.v0 * libm::exp(-(x * x) / (t.w * t.w));
        let mut d = if d_prev.is_infinite() { a } else { a - off2 / d_prev };
        if d == 0.0 {
            d = -f64::EPSILON * kin;
        }
        if d < 0.0 {
            count += 1;
        }
        d_prev = d;
    }
    Ok(count)
}

/// Waist interval (4/5, 4/3)·√(M V0/π) giving a two-level impurity.
pub fn two_level_window(v0: f64, mass: f64) -> Result<(f64, f64)> {
    if !(v0 > 0.0) || !(mass > 0.0) {
        return Err(domain("depth and mass must be positive"));
    }
    let r = libm::sqrt(mass * v0 / PI);
    Ok((0.8 * r, 4.0 / 3.0 * r))
}

/// Residual of the variational width condition,
/// w²/(2a0²)·(2/a0² + 1/w²)³ − V0² M² w⁴.
pub fn width_residual(t: &TweezerSpec, a0: f64) -> f64 {
    let w2 = t.w * t.w;
    let a2 = a0 * a0;
    let inner = 2.0 / a2 + 1.0 / w2;
    w2 / (2.0 * a2) * inner * inner * inner - (t.v0 * t.mass) * (t.v0 * t.mass) * w2 * w2
}

/// Variational bound-state width a0, by bisection on (1e−3·w, 1e3·w).
pub fn variational_width(t: &TweezerSpec) -> Result<f64> {
    t.validate()?;
    let (mut lo, mut hi) = (1e-3 * t.w, 1e3 * t.w);
    let (f_lo, f_hi) = (width_residual(t, lo), width_residual(t, hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::NoRoot(format!(
            "width condition has no sign change on ({lo:e}, {hi:e}) for V0 = {}, w = {}, M = {}",
            t.v0, t.w, t.mass
        )));
    }
    // the residual decreases monotonically in a0
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if width_residual(t, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ω = ε₁ − ε₀ for the variational states of width `a0`.
pub fn transition_energy(t: &TweezerSpec, a0: f64) -> f64 {
    let a2 = a0 * a0;
    let kinetic = 2.0 / (t.mass * a2);
    let num = libm::sqrt(2.0 * a2 * a2 + a2 * a2 * a2 / (t.w * t.w));
    let den = (a2 + 2.0 * t.w * t.w) * (a2 + 2.0 * t.w * t.w);
    kinetic - SQRT_2 * t.v0 * num / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelResult {
    pub a0: f64,
    pub omega: f64,
    pub bound_states: BoundStateCount,
    pub window: (f64, f64),
}

impl TwoLevelResult {
    pub fn in_window(&self, w: f64) -> bool {
        self.window.0 < w && w < self.window.1
    }
}

pub fn two_level_design(t: &TweezerSpec) -> Result<TwoLevelResult> {
    let a0 = variational_width(t)?;
    Ok(TwoLevelResult {
        a0,
        omega: transition_energy(t, a0),
        bound_states: bound_state_count(t)?,
        window: two_level_window(t.v0, t.mass)?,
    })
}

/// Impurity-phonon coupling components (G⁰⁰, G¹¹, G¹⁰); G⁰¹ = conj(G¹⁰).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTensor {
    pub g00: C64,
    pub g11: C64,
    pub g10: C64,
}

impl CouplingTensor {
    pub fn g01(&self) -> C64 {
        self.g10.conj()
    }
}

pub fn coupling_tensor(bath: &BogoliubovBath, mode: &BogoliubovMode, a0: f64, g: f64) -> CouplingTensor {
    let k = mode.k;
    let g00 = g * libm::sqrt(bath.n0 * mode.s / bath.length) * libm::exp(-k * k * a0 * a0 / 2.0);
    CouplingTensor {
        g00: C64::new(g00, 0.0),
        g11: C64::new((1.0 - a0 * a0 * k * k / 2.0) * g00, 0.0),
        g10: C64::new(0.0, a0 * k * g00),
    }
}

/// Per-tweezer quantities produced by the mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedAtom {
    pub design: TwoLevelResult,
    /// Resonant phonon wave number, E_k = Ω.
    pub k_res: f64,
    /// C = G¹⁰ at the resonant wave number.
    pub coupling: C64,
    /// Level shift g·n0, common to both levels.
    pub stark_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorMapping {
    pub frame: FrameConfig,
    /// Detector-model sites; ξ carries the phonon phase k·x.
    pub sites: Vec<Site>,
    pub atoms: Vec<MappedAtom>,
    pub warnings: Vec<String>,
}

/// Translates a tweezer array in a condensate into detector-model inputs.
///
/// * Ω_i is the variational transition energy; the Stark shift g·n0 moves
///   both levels together and leaves it unchanged.
/// * Every atom sits at the reference acceleration (unit red-shift); the
///   bath temperature fixes β = 1/T, i.e. a = 2πT. A zero-temperature bath
///   gives zero occupation.
/// * Relative coupling s_i = |C_i| / max_j |C_j|, so `gamma0` sets the scale.
/// * ξ_i = x_i·k_i/Ω_i, so that the rate phase Ω(ξ_j − ξ_l) equals the
///   phonon phase k(x_j − x_l). In the linear regime with unit sound speed
///   this is ξ = x.
pub fn map_to_detector_model(
    bath: &BogoliubovBath,
    tweezers: &[TweezerSpec],
    gamma0: f64,
) -> Result<DetectorMapping> {
    bath.validate()?;
    if tweezers.is_empty() {
        return Err(Error::Config("at least one tweezer is required".into()));
    }
    let mut warnings = Vec::new();
    let mut atoms = Vec::with_capacity(tweezers.len());
    for (i, t) in tweezers.iter().enumerate() {
        t.validate()?;
        let (lo, hi) = two_level_window(t.v0, t.mass)?;
        if !(lo < t.w && t.w < hi) {
            return Err(Error::Config(format!(
                "tweezer {i}: waist {} outside the two-level window ({lo}, {hi})",
                t.w
            )));
        }
        let design = two_level_design(t)?;
        if !(design.omega > 0.0) {
            return Err(Error::Config(format!(
                "tweezer {i}: transition energy {} is not positive",
                design.omega
            )));
        }
        let k_res = bath.resonant_wave_number(design.omega)?;
        if bath.free_energy(k_res) >= bath.mu {
            warnings.push(format!(
                "tweezer {i}: resonant phonon (k = {k_res:.6}) lies outside the linear part of the dispersion"
            ));
        }
        if !design.bound_states.agree() {
            warnings.push(format!(
                "tweezer {i}: bound-state counts differ (closed form {}, numeric {})",
                design.bound_states.closed_form, design.bound_states.numeric
            ));
        }
        let mode = bogoliubov_mode(bath, k_res)?;
        atoms.push(MappedAtom {
            design,
            k_res,
            coupling: coupling_tensor(bath, &mode, design.a0, t.g).g10,
            stark_shift: t.g * bath.n0,
        });
    }
    if (bath.mu_mismatch() / bath.mu).abs() > 1e-9 {
        warnings.push(format!(
            "chemical potential differs from u0·n0 by {:.6e}",
            bath.mu_mismatch()
        ));
    }

    let c_max = atoms.iter().map(|a| a.coupling.norm()).fold(0.0, f64::max);
    if !(c_max > 0.0) {
        return Err(Error::Config("all tweezer couplings vanish".into()));
    }
    let frame = if bath.temperature > 0.0 {
        FrameConfig::new(2.0 * PI * bath.temperature, DEFAULT_EPS_RES, gamma0)?
    } else {
        FrameConfig::new(1.0, DEFAULT_EPS_RES, gamma0)?.with_beta(f64::INFINITY)?
    };
    let sites = tweezers
        .iter()
        .zip(&atoms)
        .map(|(t, a)| Site {
            wedge: Wedge::I,
            xi: t.x * a.k_res / a.design.omega,
            redshift: 1.0,
            omega_eff: a.design.omega,
            g: a.coupling.norm() / c_max,
        })
        .collect();
    Ok(DetectorMapping {
        frame,
        sites,
        atoms,
        warnings,
    })
}
