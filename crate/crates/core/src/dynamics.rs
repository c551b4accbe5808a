//! Time integration and observables.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::liouvillian::{complex_eigenvalues, DensityMatrix, Generator, Workspace};
use crate::ops::{expect_string, Ladder, SiteOp, ZERO};
use crate::rates::{CrossPairing, RateSet};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 20.0;
pub const DEFAULT_RECORD_EVERY: usize = 10;
pub const DEFAULT_CHECK_EVERY: usize = 100;
/// Hard limits enforced during integration.
pub const TRACE_FAIL: f64 = 1e-6;
pub const EIGEN_FAIL: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub dt: f64,
    pub record_every: usize,
    pub check_every: usize,
    pub retain_states: bool,
    /// Atom pair for the concurrence column; `None` records zero.
    pub concurrence_pair: Option<(usize, usize)>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            t_max: DEFAULT_T_MAX,
            dt: DEFAULT_DT,
            record_every: DEFAULT_RECORD_EVERY,
            check_every: DEFAULT_CHECK_EVERY,
            retain_states: false,
            concurrence_pair: Some((0, 1)),
        }
    }
}

impl EvolveOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        EvolveOptions {
            t_max,
            dt,
            ..Default::default()
        }
    }

    pub fn record_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn retain_states(mut self, on: bool) -> Self {
        self.retain_states = on;
        self
    }

    pub fn concurrence_pair(mut self, pair: Option<(usize, usize)>) -> Self {
        self.concurrence_pair = pair;
        self
    }

    /// Number of steps and the uniform step that lands exactly on `t_max`.
    pub fn grid(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(domain("time step must be positive"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(domain("t_max must be non-negative"));
        }
        if self.record_every == 0 || self.check_every == 0 {
            return Err(domain("record and check intervals must be positive"));
        }
        let n = libm::round(self.t_max / self.dt) as usize;
        if n == 0 {
            return Ok((0, self.dt));
        }
        Ok((n, self.t_max / n as f64))
    }
}

/// Observables at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub populations: Vec<f64>,
    pub p_tot: f64,
    pub r_tot: f64,
    pub c_coh: f64,
    pub c_conc: f64,
    /// Trace drift removed by the most recent renormalisation.
    pub trace_err: f64,
    pub min_eig: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    pub n_atoms: usize,
    pub times: Vec<f64>,
    pub records: Vec<Record>,
    /// Retained states, parallel to `times` when requested.
    pub states: Vec<DMatrix<C64>>,
    /// Largest trace drift seen at any step.
    pub max_trace_drift: f64,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_record(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn final_state(&self) -> Option<&DMatrix<C64>> {
        self.states.last()
    }

    pub fn column(&self, f: impl Fn(&Record) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

fn observe(
    rho: &DMatrix<C64>,
    drho: &DMatrix<C64>,
    trace_err: f64,
    pair: Option<(usize, usize)>,
    min_eig: f64,
) -> Result<Record> {
    let n = rho.nrows().trailing_zeros() as usize;
    let populations: Vec<f64> = (0..n).map(|j| number_expectation(rho, j)).collect();
    let p_tot = populations.iter().sum();
    let r_tot = -(0..n).map(|j| number_expectation(drho, j)).sum::<f64>();
    let c_conc = match pair {
        Some((p, q)) if n >= 2 => concurrence_unchecked(&partial_trace_unchecked(rho, p, q))?,
        _ => 0.0,
    };
    Ok(Record {
        populations,
        p_tot,
        r_tot,
        c_coh: coherence_measure(rho),
        c_conc,
        trace_err,
        min_eig,
    })
}

/// `y = x + a·k` on the listed offsets.
fn stage(y: &mut DMatrix<C64>, x: &DMatrix<C64>, a: C64, k: &DMatrix<C64>, idx: &[usize]) {
    let (y, x, k) = (y.as_mut_slice(), x.as_slice(), k.as_slice());
    for &i in idx {
        y[i] = x[i] + a * k[i];
    }
}

fn hermitian_min_eig(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn number_expectation(m: &DMatrix<C64>, j: usize) -> f64 {
    let bit = 1 << j;
    (0..m.nrows()).filter(|b| b & bit != 0).map(|b| m[(b, b)].re).sum()
}

/// Fixed-step RK4 of the master equation starting from `rho0`.
pub fn evolve(rho0: &DensityMatrix, gen: &Generator, opts: &EvolveOptions) -> Result<TimeSeries> {
    if rho0.n_atoms() != gen.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    rho0.check()?;
    if let Some((p, q)) = opts.concurrence_pair {
        if gen.n_atoms() >= 2 {
            check_pair(gen.n_atoms(), p, q)?;
        }
    }
    let (n_steps, dt) = opts.grid()?;
    let dim = gen.dim();
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let mut rho = rho0.matrix().clone();
    let mut k1 = DMatrix::zeros(dim, dim);
    let mut k2 = DMatrix::zeros(dim, dim);
    let mut k3 = DMatrix::zeros(dim, dim);
    let mut k4 = DMatrix::zeros(dim, dim);
    let mut tmp = DMatrix::zeros(dim, dim);
    let mut ws = gen.workspace();

    let mut series = TimeSeries {
        n_atoms: gen.n_atoms(),
        ..Default::default()
    };
    let mut trace_err = 0.0;

    // Block-diagonal states stay block-diagonal; only that block is evolved.
    let sectors = gen.sectors().filter(|_| gen.supports_sector(&rho));
    let rhs = |x: &DMatrix<C64>, out: &mut DMatrix<C64>, ws: &mut Workspace| match sectors {
        Some(_) => gen.apply_sector_into(x, out, ws),
        None => gen.apply_into(x, out, ws),
    };
    let min_eig = |x: &DMatrix<C64>| match sectors {
        Some(s) => s.min_eigenvalue(x),
        None => hermitian_min_eig(x),
    };

    // flat column-major offsets that can be nonzero, and the strictly upper
    // ones paired with their transposes
    let in_block = |r: usize, c: usize| sectors.is_none_or(|s| s.charge(r) == s.charge(c));
    let active: Vec<usize> = (0..dim * dim).filter(|&i| in_block(i % dim, i / dim)).collect();
    let pairs: Vec<(usize, usize)> = active
        .iter()
        .filter(|&&i| i % dim < i / dim)
        .map(|&i| (i, (i % dim) * dim + i / dim))
        .collect();

    for step in 0..=n_steps {
        let t = step as f64 * dt;
        rhs(&rho, &mut k1, &mut ws);
        if step % opts.record_every == 0 || step == n_steps {
            series.times.push(t);
            series
                .records
                .push(observe(&rho, &k1, trace_err, opts.concurrence_pair, min_eig(&rho))?);
            if opts.retain_states {
                series.states.push(rho.clone());
            }
        }
        if step == n_steps {
            break;
        }

        stage(&mut tmp, &rho, half, &k1, &active);
        rhs(&tmp, &mut k2, &mut ws);
        stage(&mut tmp, &rho, half, &k2, &active);
        rhs(&tmp, &mut k3, &mut ws);
        stage(&mut tmp, &rho, full, &k3, &active);
        rhs(&tmp, &mut k4, &mut ws);
        {
            let (r, k1, k2, k3, k4) =
                (rho.as_mut_slice(), k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
            for &i in &active {
                r[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
            }
        }

        // re-Hermitise and renormalise
        let r = rho.as_mut_slice();
        for &(i, t) in &pairs {
            let v = (r[i] + r[t].conj()) * 0.5;
            r[i] = v;
            r[t] = v.conj();
        }
        let mut tr = 0.0;
        for i in (0..dim).map(|d| d * (dim + 1)) {
            r[i].im = 0.0;
            tr += r[i].re;
        }
        trace_err = (tr - 1.0).abs();
        series.max_trace_drift = series.max_trace_drift.max(trace_err);
        let inv = 1.0 / tr;
        for &i in &active {
            r[i] *= inv;
        }

        let done = step + 1;
        if done % opts.check_every == 0 {
            let time = done as f64 * dt;
            if !(trace_err <= TRACE_FAIL) {
                return Err(Error::Integration {
                    step: done,
                    time,
                    reason: format!("trace drift {trace_err:e} exceeds {TRACE_FAIL:e}"),
                });
            }
            let lam = min_eig(&rho);
            if !(lam >= EIGEN_FAIL) {
                return Err(Error::Integration {
                    step: done,
                    time,
                    reason: format!("state eigenvalue {lam:e} below {EIGEN_FAIL:e}"),
                });
            }
        }
    }
    Ok(series)
}

/// ⟨σ_j⁺σ_j⁻⟩.
pub fn population(rho: &DensityMatrix, j: usize) -> Result<f64> {
    if j >= rho.n_atoms() {
        return Err(domain(format!("atom index {j} out of range for {} atoms", rho.n_atoms())));
    }
    let p = number_expectation(rho.matrix(), j);
    if p < -1e-9 {
        return Err(domain(format!("negative population {p:e} at atom {j}")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// R = −Σ_j d⟨σ_j⁺σ_j⁻⟩/dt, from the generator itself.
pub fn total_emission_rate(rho: &DensityMatrix, gen: &Generator) -> Result<f64> {
    let d = gen.apply(rho.matrix())?;
    Ok(-(0..rho.n_atoms()).map(|j| number_expectation(&d, j)).sum::<f64>())
}

/// ⟨σ_j⁺σ_l⁻⟩ = ρ[b with l set and j clear, b with j set and l clear].
pub fn cross_correlation(rho: &DMatrix<C64>, j: usize, l: usize) -> C64 {
    expect_string(rho, &[SiteOp::Raise(j), SiteOp::Lower(l)])
}

/// Σ_{j≠l} |⟨σ_j⁺σ_l⁻⟩|.
pub fn coherence_measure(rho: &DMatrix<C64>) -> f64 {
    let n = rho.nrows().trailing_zeros() as usize;
    let mut sum = 0.0;
    for j in 0..n {
        for l in 0..n {
            if j != l {
                sum += cross_correlation(rho, j, l).norm();
            }
        }
    }
    sum
}

fn check_pair(n: usize, p: usize, q: usize) -> Result<()> {
    if p == q {
        return Err(domain("partial trace needs two distinct atoms"));
    }
    if p >= n || q >= n {
        return Err(domain(format!("atom pair ({p}, {q}) out of range for {n} atoms")));
    }
    Ok(())
}

/// Reduced state of atoms `p` and `q`, indexed by bit_p + 2·bit_q.
pub fn partial_trace(rho: &DensityMatrix, p: usize, q: usize) -> Result<DensityMatrix> {
    check_pair(rho.n_atoms(), p, q)?;
    let m = partial_trace_unchecked(rho.matrix(), p, q);
    DensityMatrix::from_matrix_unchecked(DMatrix::from_column_slice(4, 4, m.as_slice()))
}

fn partial_trace_unchecked(rho: &DMatrix<C64>, p: usize, q: usize) -> Matrix4<C64> {
    let dim = rho.nrows();
    let (mp, mq) = (1usize << p, 1usize << q);
    let local = |b: usize| usize::from(b & mp != 0) + 2 * usize::from(b & mq != 0);
    let mut out = Matrix4::zeros();
    for r in 0..dim {
        let rest = r & !(mp | mq);
        for (lc, c) in [rest, rest | mp, rest | mq, rest | mp | mq].into_iter().enumerate() {
            out[(local(r), lc)] += rho[(r, c)];
        }
    }
    out
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho2: &DensityMatrix) -> Result<f64> {
    if rho2.n_atoms() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho2.dim(),
        });
    }
    let lam = rho2.min_eigenvalue();
    if lam < -crate::liouvillian::POSITIVITY_TOL {
        return Err(domain(format!("two-qubit state has negative eigenvalue {lam:e}")));
    }
    let m = rho2.matrix();
    concurrence_unchecked(&Matrix4::from_fn(|r, c| m[(r, c)]))
}

/// σ_y ⊗ σ_y in the bit_p + 2·bit_q basis is the anti-diagonal (−1, 1, 1, −1).
fn spin_flip(rho: &Matrix4<C64>) -> Matrix4<C64> {
    let sign = [-1.0, 1.0, 1.0, -1.0];
    Matrix4::from_fn(|r, c| rho[(3 - r, 3 - c)].conj() * (sign[r] * sign[c]))
}

fn concurrence_unchecked(rho: &Matrix4<C64>) -> Result<f64> {
    let prod = rho * spin_flip(rho);
    let dm = DMatrix::from_column_slice(4, 4, prod.as_slice());
    let mut lam: Vec<f64> = complex_eigenvalues(&dm)?
        .iter()
        .map(|z| libm::sqrt(z.re.max(0.0)))
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// d⟨σ_l⁺σ_n⁻⟩/dt from the Heisenberg equations for the correlations, with
/// σ^z = [σ⁻, σ⁺].
pub fn correlation_derivative(rho: &DMatrix<C64>, gen: &Generator, l: usize, n: usize) -> C64 {
    use SiteOp::{Lower, Raise, ZDown};
    let rates = gen.rates();
    let (gpm, gmp) = extended_rates(rates);
    let ev = |ops: &[SiteOp]| expect_string(rho, ops);
    let mut d = ZERO;
    for j in 0..rates.n_atoms() {
        d += gpm[(l, j)] * ev(&[ZDown(l), Lower(n), Raise(j)]);
        d -= gmp[(n, j)] * ev(&[Raise(l), ZDown(n), Lower(j)]);
        d += gpm[(n, j)].conj() * ev(&[Lower(j), Raise(l), ZDown(n)]);
        d -= gmp[(l, j)].conj() * ev(&[Raise(j), ZDown(l), Lower(n)]);
    }
    if rates.pairing == CrossPairing::Anomalous {
        d += anomalous_cross_derivative(rho, rates, l, n);
    }
    if let Some(h) = gen.hamiltonian() {
        let e = h.energies();
        let omega = |j: usize| e[1 << j];
        d += C64::new(0.0, omega(l) - omega(n)) * ev(&[Raise(l), Lower(n)]);
    }
    d
}

/// Same-wedge rate matrices, extended by the cross-wedge blocks when those
/// enter with the same σ⁺σ⁻ structure.
fn extended_rates(rates: &RateSet) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut gpm = rates.gamma_plus_minus.clone();
    let mut gmp = rates.gamma_minus_plus.clone();
    if rates.pairing == CrossPairing::Literal {
        for (p, &i) in rates.wedge_i.iter().enumerate() {
            for (q, &k) in rates.wedge_ii.iter().enumerate() {
                let pp = rates.cross_pp[(p, q)];
                let mm = rates.cross_mm[(p, q)];
                gpm[(i, k)] = -pp;
                gpm[(k, i)] = -pp.conj();
                gmp[(i, k)] = -mm;
                gmp[(k, i)] = -mm.conj();
            }
        }
    }
    (gpm, gmp)
}

/// Adjoint action of the σ⁺σ⁺ / σ⁻σ⁻ cross-wedge terms on σ_l⁺σ_n⁻.
///
/// A term c[Aρ, B] + h.c. contributes c⟨BXA − XBA⟩ + c*⟨A†XB† − A†B†X⟩.
fn anomalous_cross_derivative(rho: &DMatrix<C64>, rates: &RateSet, l: usize, n: usize) -> C64 {
    use Ladder::{Lower, Raise};
    let x = [SiteOp::Raise(l), SiteOp::Lower(n)];
    let op = |(lad, s): (Ladder, usize)| SiteOp::ladder(lad, s);
    let adj = |(lad, s): (Ladder, usize)| SiteOp::ladder(lad.adjoint(), s);
    let mut d = ZERO;
    for (p, &i) in rates.wedge_i.iter().enumerate() {
        for (q, &k) in rates.wedge_ii.iter().enumerate() {
            let pp = rates.cross_pp[(p, q)];
            let mm = rates.cross_mm[(p, q)];
            let terms = [
                (-mm.conj(), (Raise, i), (Raise, k)),
                (-pp.conj(), (Lower, i), (Lower, k)),
                (-pp, (Raise, k), (Raise, i)),
                (-mm, (Lower, k), (Lower, i)),
            ];
            for (c, a, b) in terms {
                if c == ZERO {
                    continue;
                }
                let bxa = expect_string(rho, &[op(b), x[0], x[1], op(a)]);
                let xba = expect_string(rho, &[x[0], x[1], op(b), op(a)]);
                let axb = expect_string(rho, &[adj(a), x[0], x[1], adj(b)]);
                let abx = expect_string(rho, &[adj(a), adj(b), x[0], x[1]]);
                d += c * (bxa - xba) + c.conj() * (axb - abx);
            }
        }
    }
    d
}

/// Largest deviation between centred finite differences of ⟨σ_l⁺σ_n⁻⟩ and
/// the Heisenberg right-hand side, over all atom pairs and interior
/// retained states. `spacing` is the time between retained states.
pub fn correlation_oracle(series: &TimeSeries, gen: &Generator, spacing: f64) -> Result<f64> {
    if series.states.len() < 3 {
        return Err(domain("correlation oracle needs at least three retained states"));
    }
    if !(spacing > 0.0) {
        return Err(domain("state spacing must be positive"));
    }
    let n = gen.n_atoms();
    let mut worst = 0.0f64;
    for w in series.states.windows(3) {
        for l in 0..n {
            for m in 0..n {
                let fd = (cross_correlation(&w[2], l, m) - cross_correlation(&w[0], l, m))
                    / C64::new(2.0 * spacing, 0.0);
                let rhs = correlation_derivative(&w[1], gen, l, m);
                worst = worst.max((fd - rhs).norm());
            }
        }
    }
    Ok(worst)
}

/// Rotates an interaction-picture state back to the Schrödinger picture,
/// ρ_S = e^{−iHt} ρ_I e^{iHt}, for diagonal H with energies `e`.
pub fn to_schrodinger(rho: &DMatrix<C64>, e: &[f64], t: f64) -> DMatrix<C64> {
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        let phase = -(e[r] - e[c]) * t;
        rho[(r, c)] * C64::new(libm::cos(phase), libm::sin(phase))
    })
}

/// Uniform dt' and state spacing for a run.
pub fn record_spacing(opts: &EvolveOptions) -> Result<f64> {
    let (_, dt) = opts.grid()?;
    Ok(dt * opts.record_every as f64)
}

/// Index and value of the largest interior maximum of a sampled curve
/// exceeding its initial value, if any.
pub fn interior_peak(values: &[f64]) -> Option<(usize, f64)> {
    if values.len() < 3 {
        return None;
    }
    let (idx, &peak) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if idx == 0 || idx == values.len() - 1 || !(peak > values[0]) {
        return None;
    }
    Some((idx, peak))
}
