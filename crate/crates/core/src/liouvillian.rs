//! System Hamiltonian and Lindblad generator.
//!
//! The generator is available in three forms:
//!
//! * [`lindblad_rhs`] evaluates the master equation term by term in its
//!   commutator form, `Σ c [A ρ, B] + h.c.`;
//! * [`Generator`] compiles the same equation into a sparse effective
//!   Hamiltonian and a set of collective jump operators for time stepping;
//! * [`build_superoperator`] assembles the dense 4^N × 4^N matrix acting on
//!   column-stacked density matrices, used for spectral analysis.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::kinematics::Wedge;
use crate::ops::{ladder_matrix, left_mul, right_mul, Ladder, LadderSum, ONE, ZERO};
use crate::rates::{CrossPairing, RateSet, Site};
use crate::sector::{Sectors, SparseRows};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DENSE_ATOMS: usize = 4;
pub const HARD_MAX_DENSE_ATOMS: usize = 6;

/// Density matrix on N qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_atoms: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.check()?;
        Ok(rho)
    }

    /// Only checks that the dimension is a power of two.
    pub fn from_matrix_unchecked(m: DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_power_of_two() {
            return Err(domain("density matrix must be square with dimension 2^N"));
        }
        Ok(DensityMatrix {
            n_atoms: dim.trailing_zeros() as usize,
            m,
        })
    }

    pub fn basis_state(n_atoms: usize, index: usize) -> Self {
        let dim = 1usize << n_atoms;
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        DensityMatrix { n_atoms, m }
    }

    pub fn all_excited(n_atoms: usize) -> Self {
        Self::basis_state(n_atoms, (1usize << n_atoms) - 1)
    }

    pub fn all_ground(n_atoms: usize) -> Self {
        Self::basis_state(n_atoms, 0)
    }

    /// Product of σ_z eigenstates; `excited[j]` selects qubit j.
    pub fn product(excited: &[bool]) -> Self {
        let index = excited
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .fold(0usize, |acc, (j, _)| acc | (1 << j));
        Self::basis_state(excited.len(), index)
    }

    /// |ψ⟩⟨ψ| for a normalised state vector.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(domain("state vector must be nonzero"));
        }
        let v = psi / C64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    /// e^{−βH}/Z for a diagonal Hamiltonian.
    pub fn thermal(h: &SystemHamiltonian, beta: f64) -> Self {
        let e = &h.energies;
        let emin = e.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = e
            .iter()
            .map(|&x| {
                let d = x - emin;
                if beta.is_infinite() {
                    if d == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    libm::exp(-beta * d)
                }
            })
            .collect();
        let z: f64 = w.iter().sum();
        let dim = e.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, wi) in w.iter().enumerate() {
            m[(i, i)] = C64::new(wi / z, 0.0);
        }
        DensityMatrix {
            n_atoms: dim.trailing_zeros() as usize,
            m,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(domain(format!("state is not Hermitian (deviation {herm:e})")));
        }
        let tr = (self.trace() - ONE).norm();
        if tr > TRACE_TOL {
            return Err(domain(format!("state trace deviates from one by {tr:e}")));
        }
        let lam = self.min_eigenvalue();
        if lam < -POSITIVITY_TOL {
            return Err(domain(format!("state has negative eigenvalue {lam:e}")));
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// H_S = Σ_i Ω_i σ_i⁺σ_i⁻, stored by its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemHamiltonian {
    energies: Vec<f64>,
}

impl SystemHamiltonian {
    pub fn from_frequencies(omegas: &[f64]) -> Self {
        let dim = 1usize << omegas.len();
        let energies = (0..dim)
            .map(|b| {
                omegas
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| b & (1 << j) != 0)
                    .map(|(_, w)| w)
                    .sum()
            })
            .collect();
        SystemHamiltonian { energies }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| C64::new(e, 0.0)),
        ))
    }
}

/// Hamiltonian of a co-accelerating ensemble from its red-shifted frequencies.
pub fn build_hamiltonian(sites: &[Site]) -> Result<SystemHamiltonian> {
    if let Some(first) = sites.first() {
        if sites.iter().any(|s| s.wedge != first.wedge) {
            return Err(domain(
                "the Schrödinger-picture Hamiltonian is defined for a single wedge only",
            ));
        }
    }
    let omegas: Vec<f64> = sites.iter().map(|s| s.omega_eff).collect();
    Ok(SystemHamiltonian::from_frequencies(&omegas))
}

/// One term `coef · [A ρ, B]` of the master equation; its Hermitian
/// conjugate is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorTerm {
    pub coef: C64,
    pub a: (Ladder, usize),
    pub b: (Ladder, usize),
}

/// Enumerates every dissipative term of the master equation for `rates`.
pub fn commutator_terms(rates: &RateSet) -> Vec<CommutatorTerm> {
    use Ladder::{Lower, Raise};
    let n = rates.n_atoms();
    let mut terms = Vec::new();
    let mut push = |coef: C64, a, b| {
        if coef != ZERO {
            terms.push(CommutatorTerm { coef, a, b });
        }
    };
    for i in 0..n {
        for j in 0..n {
            push(rates.gamma_plus_minus[(i, j)], (Raise, j), (Lower, i));
            push(rates.gamma_minus_plus[(i, j)], (Lower, j), (Raise, i));
        }
    }
    for (p, &i) in rates.wedge_i.iter().enumerate() {
        for (q, &k) in rates.wedge_ii.iter().enumerate() {
            let pp = rates.cross_pp[(p, q)];
            let mm = rates.cross_mm[(p, q)];
            match rates.pairing {
                CrossPairing::Anomalous => {
                    push(-mm.conj(), (Raise, i), (Raise, k));
                    push(-pp.conj(), (Lower, i), (Lower, k));
                    push(-pp, (Raise, k), (Raise, i));
                    push(-mm, (Lower, k), (Lower, i));
                }
                CrossPairing::Literal => {
                    push(-pp.conj(), (Raise, i), (Lower, k));
                    push(-mm.conj(), (Lower, i), (Raise, k));
                    push(-pp, (Raise, k), (Lower, i));
                    push(-mm, (Lower, k), (Raise, i));
                }
            }
        }
    }
    terms
}

fn check_dims(rho: &DMatrix<C64>, n_atoms: usize) -> Result<()> {
    let dim = 1usize << n_atoms;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    Ok(())
}

/// dρ/dt in commutator form. Pass `None` for the Hamiltonian to work in the
/// interaction picture (used for counter-accelerating ensembles).
///
/// The Hermitian-conjugate terms are applied with ρ in place of ρ†, so the
/// map is linear on arbitrary matrices and agrees with the master equation
/// on Hermitian ones.
pub fn lindblad_rhs(
    rho: &DMatrix<C64>,
    h: Option<&SystemHamiltonian>,
    rates: &RateSet,
) -> Result<DMatrix<C64>> {
    let n = rates.n_atoms();
    check_dims(rho, n)?;
    let dim = rho.nrows();
    let mut d = DMatrix::<C64>::zeros(dim, dim);
    let mut d_hc = DMatrix::<C64>::zeros(dim, dim);
    for t in commutator_terms(rates) {
        let (a, sa) = t.a;
        let (b, sb) = t.b;
        // c (A ρ B − B A ρ)
        let a_rho = left_mul(a, sa, rho);
        d += (right_mul(&a_rho, b, sb) - left_mul(b, sb, &a_rho)) * t.coef;
        // c* (B† ρ A† − ρ A† B†)
        let bd_rho = left_mul(b.adjoint(), sb, rho);
        let rho_ad = right_mul(rho, a.adjoint(), sa);
        d_hc += (right_mul(&bd_rho, a.adjoint(), sa) - right_mul(&rho_ad, b.adjoint(), sb)) * t.coef.conj();
    }
    let mut out = d + d_hc;
    if let Some(h) = h {
        if h.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h.dim(),
            });
        }
        let e = h.energies();
        for c in 0..dim {
            for r in 0..dim {
                // −i (E_r − E_c) ρ_rc
                out[(r, c)] += C64::new(0.0, -(e[r] - e[c])) * rho[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Jump operator of index `a` in the Kossakowski basis.
fn jump_basis(a: usize, n_atoms: usize) -> (Ladder, usize) {
    if a < n_atoms {
        (Ladder::Lower, a)
    } else {
        (Ladder::Raise, a - n_atoms)
    }
}

/// Master equation compiled for repeated evaluation on Hermitian states.
///
/// Diagonalising the Kossakowski matrix, K = Σ_k λ_k u_k u_k†, gives
/// collective jumps J_k = Σ_a u_ka F_a and
///
/// ```text
/// dρ/dt = D + D† + Σ_k 2λ_k J_k (J_k ρ)†,   D = −iHρ − Σ_k λ_k J_k†(J_k ρ)
/// ```
#[derive(Debug, Clone)]
pub struct Generator {
    n_atoms: usize,
    hamiltonian: Option<SystemHamiltonian>,
    rates: RateSet,
    jumps: Vec<Jump>,
    sectors: Option<Sectors>,
}

#[derive(Debug, Clone)]
struct Jump {
    lambda: f64,
    op: LadderSum,
    op_adj: LadderSum,
    /// Charge change under the jump, when one is defined.
    shift: i32,
    rows: SparseRows,
    rows_adj: SparseRows,
}

/// Site charges under which every Kossakowski basis operator shifts the
/// charge by ±1 and K does not couple the two groups.
fn conserved_charges(k: &DMatrix<C64>, rates: &RateSet) -> Option<(Vec<i32>, Vec<i32>)> {
    let n = rates.n_atoms();
    let uniform = alloc::vec![1; n];
    let mut split = uniform.clone();
    for &j in &rates.wedge_ii {
        split[j] = -1;
    }
    [uniform, split].into_iter().find_map(|c| {
        let shift: Vec<i32> = (0..2 * n)
            .map(|a| if a < n { -c[a] } else { c[a - n] })
            .collect();
        let coupled = (0..2 * n).any(|a| (0..2 * n).any(|b| shift[a] != shift[b] && k[(a, b)] != ZERO));
        (!coupled).then_some((c, shift))
    })
}

fn jumps_from_block(
    k: &DMatrix<C64>,
    idx: &[usize],
    shift: i32,
    n: usize,
    scale: f64,
    out: &mut Vec<Jump>,
) {
    if idx.is_empty() {
        return;
    }
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| k[(idx[r], idx[c])]);
    let eig = sub.symmetric_eigen();
    for (e, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam == 0.0 || lam.abs() <= 1e-14 * scale {
            continue;
        }
        let mut u = alloc::vec![ZERO; 2 * n];
        for (p, &a) in idx.iter().enumerate() {
            u[a] = eig.eigenvectors[(p, e)];
        }
        let op = LadderSum::from_coefficients(&u);
        let op_adj = op.adjoint();
        out.push(Jump {
            lambda: lam,
            rows: SparseRows::from_ladder(&op, n),
            rows_adj: SparseRows::from_ladder(&op_adj, n),
            op,
            op_adj,
            shift,
        });
    }
}

impl Generator {
    pub fn new(hamiltonian: Option<SystemHamiltonian>, rates: RateSet) -> Result<Self> {
        let n = rates.n_atoms();
        let dim = 1usize << n;
        if let Some(h) = &hamiltonian {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
        }
        let k = rates.kossakowski();
        let scale = k.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let mut jumps = Vec::new();
        let sectors = match conserved_charges(&k, &rates) {
            Some((charges, shift)) => {
                for s in [-1, 1] {
                    let idx: Vec<usize> = (0..2 * n).filter(|&a| shift[a] == s).collect();
                    jumps_from_block(&k, &idx, s, n, scale, &mut jumps);
                }
                Some(Sectors::from_site_charges(&charges))
            }
            None => {
                let all: Vec<usize> = (0..2 * n).collect();
                jumps_from_block(&k, &all, 0, n, scale, &mut jumps);
                None
            }
        };
        Ok(Generator {
            n_atoms: n,
            hamiltonian,
            rates,
            jumps,
            sectors,
        })
    }

    /// Charge sectors preserved by this generator, if any.
    pub fn sectors(&self) -> Option<&Sectors> {
        self.sectors.as_ref()
    }

    /// True if `rho` lies in the charge-diagonal block, so that
    /// [`Generator::apply_sector_into`] may be used.
    pub fn supports_sector(&self, rho: &DMatrix<C64>) -> bool {
        self.sectors.as_ref().is_some_and(|s| s.contains(rho))
    }

    /// As [`Generator::apply_into`], touching only charge-diagonal entries.
    /// `rho` must lie in that block and `out` must vanish outside it.
    pub fn apply_sector_into(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, ws: &mut Workspace) {
        let sec = self
            .sectors
            .as_ref()
            .expect("apply_sector_into needs a generator with conserved charge");
        let dim = self.dim();
        let rs = rho.as_slice();
        let energies = self.hamiltonian.as_ref().map(|h| h.energies());
        {
            let ds = ws.d.as_mut_slice();
            let os = out.as_mut_slice();
            for c in 0..dim {
                for &r in sec.rows(sec.charge(c)) {
                    let i = r + c * dim;
                    ds[i] = match energies {
                        Some(e) => C64::new(0.0, -e[r]) * rs[i],
                        None => ZERO,
                    };
                    os[i] = ZERO;
                }
            }
        }
        for j in &self.jumps {
            let as_ = ws.a.as_mut_slice();
            for c in 0..dim {
                let col = &rs[c * dim..(c + 1) * dim];
                for &r in sec.rows(sec.charge(c) + j.shift) {
                    as_[r + c * dim] = j.rows.row_dot(r, col);
                }
            }
            let as_ = ws.a.as_slice();
            let ds = ws.d.as_mut_slice();
            let os = out.as_mut_slice();
            let m_lam = C64::new(-j.lambda, 0.0);
            let two_lam = C64::new(2.0 * j.lambda, 0.0);
            for c in 0..dim {
                let acol = &as_[c * dim..(c + 1) * dim];
                for &r in sec.rows(sec.charge(c)) {
                    let i = r + c * dim;
                    ds[i] += m_lam * j.rows_adj.row_dot(r, acol);
                    os[i] += two_lam * j.rows.row_dot_adjoint(r, as_, c, dim);
                }
            }
        }
        let ds = ws.d.as_slice();
        let os = out.as_mut_slice();
        for c in 0..dim {
            for &r in sec.rows(sec.charge(c)) {
                if r > c {
                    continue;
                }
                let (i, t) = (r + c * dim, c + r * dim);
                let v = os[i] + ds[i] + ds[t].conj();
                let w = os[t] + ds[t] + ds[i].conj();
                let h = (v + w.conj()) * 0.5;
                os[i] = h;
                os[t] = h.conj();
            }
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        1 << self.n_atoms
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn hamiltonian(&self) -> Option<&SystemHamiltonian> {
        self.hamiltonian.as_ref()
    }

    pub fn n_jumps(&self) -> usize {
        self.jumps.len()
    }

    /// Reusable scratch buffers for [`Generator::apply_into`].
    pub fn workspace(&self) -> Workspace {
        let dim = self.dim();
        Workspace {
            d: DMatrix::zeros(dim, dim),
            a: DMatrix::zeros(dim, dim),
            b: DMatrix::zeros(dim, dim),
        }
    }

    /// `out = dρ/dt`; `rho` must be Hermitian.
    pub fn apply_into(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, ws: &mut Workspace) {
        let dim = self.dim();
        match &self.hamiltonian {
            Some(h) => {
                let e = h.energies();
                for c in 0..dim {
                    for r in 0..dim {
                        ws.d[(r, c)] = C64::new(0.0, -e[r]) * rho[(r, c)];
                    }
                }
            }
            None => ws.d.fill(ZERO),
        }
        out.fill(ZERO);
        for j in &self.jumps {
            ws.a.fill(ZERO);
            j.op.left_acc(ONE, rho, &mut ws.a);
            j.op_adj.left_acc(C64::new(-j.lambda, 0.0), &ws.a, &mut ws.d);
            ws.a.adjoint_to(&mut ws.b);
            j.op.left_acc(C64::new(2.0 * j.lambda, 0.0), &ws.b, out);
        }
        for c in 0..dim {
            for r in 0..=c {
                let v = out[(r, c)] + ws.d[(r, c)] + ws.d[(c, r)].conj();
                let w = out[(c, r)] + ws.d[(c, r)] + ws.d[(r, c)].conj();
                let h = (v + w.conj()) * 0.5;
                out[(r, c)] = h;
                out[(c, r)] = h.conj();
            }
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        check_dims(rho, self.n_atoms)?;
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut ws = self.workspace();
        self.apply_into(rho, &mut out, &mut ws);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    d: DMatrix<C64>,
    a: DMatrix<C64>,
    b: DMatrix<C64>,
}

/// Dense generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct LiouvillianMatrix {
    pub n_atoms: usize,
    pub gamma0: f64,
    pub matrix: DMatrix<C64>,
}

/// Column-stacking vec(X).
pub fn vectorize(x: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvectorize(v: &DVector<C64>, dim: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Assembles L with L·vec(ρ) = vec(dρ/dt) from vec(AXB) = (Bᵀ ⊗ A) vec(X).
pub fn build_superoperator(
    h: Option<&SystemHamiltonian>,
    rates: &RateSet,
    max_atoms: usize,
) -> Result<LiouvillianMatrix> {
    let n = rates.n_atoms();
    let cap = max_atoms.min(HARD_MAX_DENSE_ATOMS);
    if n > cap {
        return Err(Error::Capacity { n_atoms: n, cap });
    }
    let dim = 1usize << n;
    let id = DMatrix::<C64>::identity(dim, dim);
    let mut l = DMatrix::<C64>::zeros(dim * dim, dim * dim);
    if let Some(h) = h {
        if h.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h.dim(),
            });
        }
        let hm = h.to_matrix();
        let minus_i = C64::new(0.0, -1.0);
        l += (id.kronecker(&hm) - hm.transpose().kronecker(&id)) * minus_i;
    }
    let k = rates.kossakowski();
    let ops: Vec<DMatrix<C64>> = (0..2 * n)
        .map(|a| {
            let (op, s) = jump_basis(a, n);
            ladder_matrix(op, s, n)
        })
        .collect();
    for a in 0..2 * n {
        for b in 0..2 * n {
            let kab = k[(a, b)];
            if kab == ZERO {
                continue;
            }
            let fa = &ops[a];
            let fb_dag = ops[b].adjoint();
            let prod = &fb_dag * fa;
            let term = fb_dag.transpose().kronecker(fa)
                - id.kronecker(&prod) * C64::new(0.5, 0.0)
                - prod.transpose().kronecker(&id) * C64::new(0.5, 0.0);
            l += term * (kab * 2.0);
        }
    }
    Ok(LiouvillianMatrix {
        n_atoms: n,
        gamma0: rates.gamma0,
        matrix: l,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyStateAnalysis {
    /// Eigenvalues sorted by decreasing real part.
    pub spectrum: Vec<C64>,
    pub zero_multiplicity: usize,
    /// Orthonormal (Frobenius) basis of the null space, as matrices.
    pub null_basis: Vec<DMatrix<C64>>,
}

/// Eigenvalues of a general complex square matrix from its Schur form.
///
/// The input is scaled to unit max-norm first; the zero matrix, on which
/// the QR iteration stalls, is handled directly.
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let scale = max_abs(m);
    if scale == 0.0 {
        return Ok(alloc::vec![ZERO; m.nrows()]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m / C64::new(scale, 0.0), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".to_string()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().map(|z| z * scale).collect())
}

pub fn steady_state_analysis(l: &LiouvillianMatrix) -> Result<SteadyStateAnalysis> {
    let tol = 1e-9 * l.gamma0.max(f64::MIN_POSITIVE);
    let mut spectrum = complex_eigenvalues(&l.matrix)?;
    spectrum.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    let zero_multiplicity = spectrum.iter().filter(|z| z.norm() < tol).count();

    let dim = 1usize << l.n_atoms;
    let svd = nalgebra::linalg::SVD::try_new(l.matrix.clone(), false, true, 1e-15, 100_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".to_string()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD returned no right singular vectors".to_string()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let null_basis = order
        .iter()
        .take(zero_multiplicity)
        .map(|&i| {
            let v: DVector<C64> = v_t.row(i).adjoint();
            unvectorize(&v, dim)
        })
        .collect();

    Ok(SteadyStateAnalysis {
        spectrum,
        zero_multiplicity,
        null_basis,
    })
}

/// ‖dρ/dt‖_F at the thermal state e^{−βH}/Z.
pub fn thermal_residual(h: &SystemHamiltonian, rates: &RateSet, beta: f64) -> Result<f64> {
    let rho = DensityMatrix::thermal(h, beta);
    Ok(lindblad_rhs(rho.matrix(), Some(h), rates)?.norm())
}

/// Wedge of each atom index, for reporting.
pub fn wedge_of(rates: &RateSet, atom: usize) -> Wedge {
    if rates.wedge_ii.contains(&atom) {
        Wedge::II
    } else {
        Wedge::I
    }
}
