//! Rindler-frame geometry for uniformly accelerated detectors.
//!
//! Units: ħ = k_B = c = 1, frequencies in units of the reference atom's
//! proper frequency ω_s, times in units of ω_s⁻¹. The frame parameter `a`
//! is the proper acceleration of the reference atom, which therefore sits at
//! conformal position ξ = 0 with unit red-shift.

use core::f64::consts::PI;

use crate::error::{domain, Error, Result};

pub const DEFAULT_EPS_RES: f64 = 1e-6;
pub const DEFAULT_GAMMA0: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    /// Reference acceleration, equal to the proper acceleration of atom 1.
    pub a: f64,
    /// Resonance tolerance replacing the secular delta function.
    pub eps_res: f64,
    /// Overall rate scale.
    pub gamma0: f64,
    /// Replaces the Unruh value 2π/a when set. `f64::INFINITY` gives a
    /// zero-occupation field.
    pub beta_override: Option<f64>,
}

impl FrameConfig {
    pub fn new(a: f64, eps_res: f64, gamma0: f64) -> Result<Self> {
        let frame = FrameConfig {
            a,
            eps_res,
            gamma0,
            beta_override: None,
        };
        frame.validate()?;
        Ok(frame)
    }

    /// Frame with default resonance tolerance and rate scale.
    pub fn with_acceleration(a: f64) -> Result<Self> {
        Self::new(a, DEFAULT_EPS_RES, DEFAULT_GAMMA0)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(domain("inverse temperature must be positive"));
        }
        self.beta_override = Some(beta);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(domain("reference acceleration a must be positive and finite"));
        }
        if !(self.eps_res > 0.0) {
            return Err(domain("resonance tolerance must be positive"));
        }
        if !(self.gamma0 >= 0.0) || !self.gamma0.is_finite() {
            return Err(domain("gamma0 must be non-negative and finite"));
        }
        if let Some(b) = self.beta_override {
            if !(b > 0.0) {
                return Err(domain("inverse temperature must be positive"));
            }
        }
        Ok(())
    }

    /// Inverse temperature of the field seen in this frame.
    pub fn beta(&self) -> f64 {
        self.beta_override.unwrap_or(2.0 * PI / self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wedge {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    /// Proper transition frequency.
    pub omega: f64,
    /// Proper acceleration.
    pub alpha: f64,
    pub wedge: Wedge,
    /// Constant coupling weight.
    pub g: f64,
}

impl AtomSpec {
    pub fn new(omega: f64, alpha: f64) -> Self {
        AtomSpec {
            omega,
            alpha,
            wedge: Wedge::I,
            g: 1.0,
        }
    }

    pub fn in_wedge(mut self, wedge: Wedge) -> Self {
        self.wedge = wedge;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(domain("atom frequency must be positive"));
        }
        if !(self.alpha > 0.0) {
            return Err(domain("proper acceleration must be positive"));
        }
        if !(self.g >= 0.0) {
            return Err(domain("coupling weight must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub xi: f64,
    /// dτ_i/dτ, equal to a/α_i.
    pub redshift: f64,
    /// Red-shifted frequency Ω_i seen from the reference frame.
    pub omega_eff: f64,
}

/// Conformal position fixed by the proper acceleration, α = a·exp(−a ξ).
pub fn xi_from_alpha(frame: &FrameConfig, alpha: f64) -> Result<f64> {
    if !(frame.a > 0.0) {
        return Err(domain("reference acceleration a must be positive"));
    }
    if !(alpha > 0.0) {
        return Err(domain("proper acceleration must be positive"));
    }
    Ok(-libm::log(alpha / frame.a) / frame.a)
}

pub fn alpha_from_xi(frame: &FrameConfig, xi: f64) -> f64 {
    frame.a * libm::exp(-frame.a * xi)
}

pub fn kinematic_state(frame: &FrameConfig, atom: &AtomSpec) -> Result<KinematicState> {
    frame.validate()?;
    atom.validate()?;
    let xi = xi_from_alpha(frame, atom.alpha)?;
    let redshift = frame.a / atom.alpha;
    Ok(KinematicState {
        xi,
        redshift,
        omega_eff: redshift * atom.omega,
    })
}

/// β = 2π/a.
pub fn unruh_beta(frame: &FrameConfig) -> Result<f64> {
    if !(frame.a > 0.0) {
        return Err(domain("reference acceleration a must be positive"));
    }
    Ok(2.0 * PI / frame.a)
}

/// Bose-Einstein occupation 1/(exp(β|k|) − 1).
pub fn thermal_occupation(beta: f64, k: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain("inverse temperature must be positive"));
    }
    if k == 0.0 {
        return Err(Error::Divergence);
    }
    Ok(1.0 / libm::expm1(beta * k.abs()))
}

/// r_k with tanh(r_k) = exp(−π|k|/a).
pub fn squeeze_parameter(frame: &FrameConfig, k: f64) -> Result<f64> {
    if !(frame.a > 0.0) {
        return Err(domain("reference acceleration a must be positive"));
    }
    if k == 0.0 {
        return Err(Error::Divergence);
    }
    Ok(libm::atanh(libm::exp(-PI * k.abs() / frame.a)))
}
