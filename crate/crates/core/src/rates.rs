//! Markovian, secular dissipative rates for co- and counter-accelerating
//! ensembles.
//!
//! For atoms `j`, `n` in the same wedge
//!
//! ```text
//! γ⁻⁺_jn = γ₀ s_j s_n (n(Ω_j) + 1) 1[|Ω_j − Ω_n| < ε] exp(i Ω_j (ξ_j − ξ_n))
//! γ⁺⁻_jn = γ₀ s_j s_n  n(Ω_j)      1[|Ω_j − Ω_n| < ε] exp(i Ω_j (ξ_j − ξ_n))
//! ```
//!
//! with s_i = (dτ_i/dτ)·g_i and n the Bose-Einstein occupation at the frame's
//! inverse temperature. Pairs across wedges get the anomalous weight
//! √(n(1 + n)).

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{domain, Result};
use crate::kinematics::{kinematic_state, thermal_occupation, AtomSpec, FrameConfig, Wedge};
use crate::ops::ZERO;

/// Resolved position, red-shift and effective frequency of one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub wedge: Wedge,
    pub xi: f64,
    pub redshift: f64,
    pub omega_eff: f64,
    pub g: f64,
}

impl Site {
    pub fn from_atom(frame: &FrameConfig, atom: &AtomSpec) -> Result<Site> {
        let k = kinematic_state(frame, atom)?;
        Ok(Site {
            wedge: atom.wedge,
            xi: k.xi,
            redshift: k.redshift,
            omega_eff: k.omega_eff,
            g: atom.g,
        })
    }

    /// s_i, so that G_nj = s_n s_j.
    pub fn weight(&self) -> f64 {
        self.redshift * self.g
    }
}

pub fn resolve_sites(frame: &FrameConfig, atoms: &[AtomSpec]) -> Result<Vec<Site>> {
    atoms.iter().map(|a| Site::from_atom(frame, a)).collect()
}

/// s_i = (dτ_i/dτ)·g_i.
pub fn coupling_weight(frame: &FrameConfig, atom: &AtomSpec) -> Result<f64> {
    Ok(Site::from_atom(frame, atom)?.weight())
}

/// Operator pairing used for the inter-wedge terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossPairing {
    /// σ⁺σ⁺ / σ⁻σ⁻ pairings across wedges (two-mode squeezed bath).
    #[default]
    Anomalous,
    /// σ⁺σ⁻ pairings as printed in the long-time counter-accelerating
    /// equation. Generally not completely positive.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    /// Emission channel, N×N, prefactor n + 1.
    pub gamma_minus_plus: DMatrix<C64>,
    /// Absorption channel, N×N, prefactor n.
    pub gamma_plus_minus: DMatrix<C64>,
    /// N_I × N_II; coefficient γ⁺⁺_iκ of −[σ_κ⁺ρ, σ_i⁺].
    pub cross_pp: DMatrix<C64>,
    /// N_I × N_II; coefficient γ⁻⁻_iκ of −[σ_κ⁻ρ, σ_i⁻].
    pub cross_mm: DMatrix<C64>,
    /// Atom indices in wedge I, in ascending order.
    pub wedge_i: Vec<usize>,
    /// Atom indices in wedge II, in ascending order.
    pub wedge_ii: Vec<usize>,
    pub pairing: CrossPairing,
    pub gamma0: f64,
}

fn phase(theta: f64) -> C64 {
    let (s, c) = libm::sincos(theta);
    C64::new(c, s)
}

impl RateSet {
    pub fn n_atoms(&self) -> usize {
        self.gamma_minus_plus.nrows()
    }

    pub fn is_counter(&self) -> bool {
        !self.wedge_i.is_empty() && !self.wedge_ii.is_empty()
    }

    /// Same rates with all inter-atom couplings removed.
    pub fn diagonal_only(&self) -> RateSet {
        let n = self.n_atoms();
        let mut out = self.clone();
        for j in 0..n {
            for m in 0..n {
                if j != m {
                    out.gamma_minus_plus[(j, m)] = ZERO;
                    out.gamma_plus_minus[(j, m)] = ZERO;
                }
            }
        }
        out.cross_pp.fill(ZERO);
        out.cross_mm.fill(ZERO);
        out
    }

    /// Coefficient matrix of the generator in the jump basis
    /// `[σ_0⁻ … σ_{N−1}⁻, σ_0⁺ … σ_{N−1}⁺]`, normalised so that the
    /// dissipator is Σ_ab 2 K_ab (F_a ρ F_b† − ½{F_b† F_a, ρ}).
    pub fn kossakowski(&self) -> DMatrix<C64> {
        let n = self.n_atoms();
        let mut k = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                // γ⁻⁺_ij [σ_j⁻ρ, σ_i⁺]  ->  K[j⁻, i⁻]
                k[(j, i)] = self.gamma_minus_plus[(i, j)];
                k[(n + j, n + i)] = self.gamma_plus_minus[(i, j)];
            }
        }
        for (p, &i) in self.wedge_i.iter().enumerate() {
            for (q, &kap) in self.wedge_ii.iter().enumerate() {
                let pp = self.cross_pp[(p, q)];
                let mm = self.cross_mm[(p, q)];
                let (a1, b1, a2, b2) = match self.pairing {
                    // −γ⁻⁻_κi [σ_i⁻ρ, σ_κ⁻] and −γ⁻⁻_iκ [σ_κ⁻ρ, σ_i⁻]
                    CrossPairing::Anomalous => (i, n + kap, kap, n + i),
                    // −γ⁺⁻_κi [σ_i⁺ρ, σ_κ⁻] and −γ⁻⁺_κi [σ_i⁻ρ, σ_κ⁺]
                    CrossPairing::Literal => (n + i, n + kap, i, kap),
                };
                let (v1, v2) = match self.pairing {
                    CrossPairing::Anomalous => (-pp.conj(), -mm),
                    CrossPairing::Literal => (-pp.conj(), -mm.conj()),
                };
                k[(a1, b1)] = v1;
                k[(b1, a1)] = v1.conj();
                k[(a2, b2)] = v2;
                k[(b2, a2)] = v2.conj();
            }
        }
        k
    }
}

/// Rates for an arbitrary ensemble of resolved sites. Atoms are grouped by
/// wedge; inter-wedge entries go to the cross matrices.
pub fn rates_from_sites(frame: &FrameConfig, sites: &[Site], pairing: CrossPairing) -> Result<RateSet> {
    frame.validate()?;
    let n = sites.len();
    if n == 0 {
        return Err(domain("ensemble must contain at least one atom"));
    }
    for s in sites {
        if !(s.omega_eff > 0.0) {
            return Err(domain("red-shifted frequencies must be positive"));
        }
    }
    let beta = frame.beta();
    let occ: Vec<f64> = sites
        .iter()
        .map(|s| thermal_occupation(beta, s.omega_eff))
        .collect::<Result<_>>()?;

    let mut gmp = DMatrix::zeros(n, n);
    let mut gpm = DMatrix::zeros(n, n);
    // Upper triangle from the row atom's resonant wave vector; the lower
    // triangle is its conjugate so the matrices stay exactly Hermitian.
    for j in 0..n {
        for m in j..n {
            let (sj, sm) = (&sites[j], &sites[m]);
            if sj.wedge != sm.wedge || (sj.omega_eff - sm.omega_eff).abs() >= frame.eps_res {
                continue;
            }
            let k0 = sj.omega_eff;
            let base = frame.gamma0 * sj.weight() * sm.weight();
            let ph = if j == m { C64::new(1.0, 0.0) } else { phase(k0 * (sj.xi - sm.xi)) };
            gmp[(j, m)] = ph * (base * (occ[j] + 1.0));
            gpm[(j, m)] = ph * (base * occ[j]);
            gmp[(m, j)] = gmp[(j, m)].conj();
            gpm[(m, j)] = gpm[(j, m)].conj();
        }
    }

    let wedge_i: Vec<usize> = (0..n).filter(|&i| sites[i].wedge == Wedge::I).collect();
    let wedge_ii: Vec<usize> = (0..n).filter(|&i| sites[i].wedge == Wedge::II).collect();
    let mut cross_pp = DMatrix::zeros(wedge_i.len(), wedge_ii.len());
    for (p, &i) in wedge_i.iter().enumerate() {
        for (q, &kap) in wedge_ii.iter().enumerate() {
            let (si, sk) = (&sites[i], &sites[kap]);
            if (si.omega_eff - sk.omega_eff).abs() >= frame.eps_res {
                continue;
            }
            let k0 = si.omega_eff;
            let mag = frame.gamma0 * si.weight() * sk.weight() * libm::sqrt(occ[i] * (1.0 + occ[i]));
            cross_pp[(p, q)] = phase(k0 * (si.xi - sk.xi)) * mag;
        }
    }
    let cross_mm = cross_pp.clone();

    Ok(RateSet {
        gamma_minus_plus: gmp,
        gamma_plus_minus: gpm,
        cross_pp,
        cross_mm,
        wedge_i,
        wedge_ii,
        pairing,
        gamma0: frame.gamma0,
    })
}

/// Rates for atoms that may sit in either wedge.
pub fn ensemble_rates(frame: &FrameConfig, atoms: &[AtomSpec]) -> Result<RateSet> {
    rates_from_sites(frame, &resolve_sites(frame, atoms)?, CrossPairing::default())
}

/// Co-accelerating ensemble; all atoms must share one wedge.
pub fn same_wedge_rates(frame: &FrameConfig, atoms: &[AtomSpec]) -> Result<RateSet> {
    if let Some(first) = atoms.first() {
        if atoms.iter().any(|a| a.wedge != first.wedge) {
            return Err(domain("same-wedge rates require all atoms in one wedge"));
        }
    }
    ensemble_rates(frame, atoms)
}

/// Counter-accelerating ensemble. Wedge-I atoms take indices `0..N_I`,
/// wedge-II atoms follow.
pub fn cross_wedge_rates(
    frame: &FrameConfig,
    atoms_i: &[AtomSpec],
    atoms_ii: &[AtomSpec],
) -> Result<RateSet> {
    if atoms_i.is_empty() || atoms_ii.is_empty() {
        return Err(domain("both wedges need at least one atom"));
    }
    let atoms: Vec<AtomSpec> = atoms_i
        .iter()
        .map(|a| a.in_wedge(Wedge::I))
        .chain(atoms_ii.iter().map(|a| a.in_wedge(Wedge::II)))
        .collect();
    ensemble_rates(frame, &atoms)
}

/// Smallest eigenvalue of the Kossakowski matrix; non-negative iff the
/// generator is completely positive.
pub fn kossakowski_min_eig(rates: &RateSet) -> f64 {
    let k = rates.kossakowski();
    k.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
