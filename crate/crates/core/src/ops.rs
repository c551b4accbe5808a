//! Single-site operators acting on the 2^N computational basis.
//!
//! Qubit `j` is bit `j` of the basis index (qubit 0 least significant);
//! bit value 1 is the excited state.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// σ⁺ = |e⟩⟨g|
    Raise,
    /// σ⁻ = |g⟩⟨e|
    Lower,
}

impl Ladder {
    pub fn adjoint(self) -> Ladder {
        match self {
            Ladder::Raise => Ladder::Lower,
            Ladder::Lower => Ladder::Raise,
        }
    }
}

/// Single-site operator used in expectation strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOp {
    Raise(usize),
    Lower(usize),
    /// |g⟩⟨g| − |e⟩⟨e|, i.e. [σ⁻, σ⁺].
    ZDown(usize),
    /// |e⟩⟨e|
    Number(usize),
}

impl SiteOp {
    pub fn ladder(op: Ladder, site: usize) -> SiteOp {
        match op {
            Ladder::Raise => SiteOp::Raise(site),
            Ladder::Lower => SiteOp::Lower(site),
        }
    }

    /// Image of basis state `b`, as (coefficient, new index), or `None` if annihilated.
    #[inline]
    pub fn apply(self, b: usize) -> Option<(f64, usize)> {
        match self {
            SiteOp::Raise(j) => {
                let m = 1 << j;
                if b & m == 0 {
                    Some((1.0, b | m))
                } else {
                    None
                }
            }
            SiteOp::Lower(j) => {
                let m = 1 << j;
                if b & m != 0 {
                    Some((1.0, b ^ m))
                } else {
                    None
                }
            }
            SiteOp::ZDown(j) => Some((if b & (1 << j) != 0 { -1.0 } else { 1.0 }, b)),
            SiteOp::Number(j) => {
                if b & (1 << j) != 0 {
                    Some((1.0, b))
                } else {
                    None
                }
            }
        }
    }
}

/// Tr(O₁ O₂ ⋯ O_k ρ) for a product of single-site operators.
pub fn expect_string(rho: &DMatrix<C64>, ops: &[SiteOp]) -> C64 {
    let dim = rho.nrows();
    let mut acc = ZERO;
    for c in 0..dim {
        // O|c⟩ applied right to left
        let mut coef = 1.0;
        let mut b = c;
        let mut alive = true;
        for op in ops.iter().rev() {
            match op.apply(b) {
                Some((f, nb)) => {
                    coef *= f;
                    b = nb;
                }
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            // O[b, c] = coef, contributes coef·ρ[c, b]
            acc += rho[(c, b)] * coef;
        }
    }
    acc
}

/// `σ_site^op · X`
pub fn left_mul(op: Ladder, site: usize, x: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = x.nrows();
    let m = 1 << site;
    let mut out = DMatrix::zeros(dim, x.ncols());
    for r in 0..dim {
        let src = match op {
            Ladder::Lower if r & m == 0 => r | m,
            Ladder::Raise if r & m != 0 => r ^ m,
            _ => continue,
        };
        for c in 0..x.ncols() {
            out[(r, c)] = x[(src, c)];
        }
    }
    out
}

/// `X · σ_site^op`
pub fn right_mul(x: &DMatrix<C64>, op: Ladder, site: usize) -> DMatrix<C64> {
    let dim = x.ncols();
    let m = 1 << site;
    let mut out = DMatrix::zeros(x.nrows(), dim);
    for c in 0..dim {
        let src = match op {
            Ladder::Lower if c & m != 0 => c ^ m,
            Ladder::Raise if c & m == 0 => c | m,
            _ => continue,
        };
        out.column_mut(c).copy_from(&x.column(src));
    }
    out
}

/// Dense matrix of σ_site^op on `n_atoms` qubits.
pub fn ladder_matrix(op: Ladder, site: usize, n_atoms: usize) -> DMatrix<C64> {
    let dim = 1usize << n_atoms;
    left_mul(op, site, &DMatrix::identity(dim, dim))
}

/// Σ_j (l_j σ_j⁻ + r_j σ_j⁺), applied without forming a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSum {
    /// (site, lowering coefficient, raising coefficient)
    terms: Vec<(usize, C64, C64)>,
}

impl LadderSum {
    /// Coefficients in the basis [σ_0⁻ … σ_{N−1}⁻, σ_0⁺ … σ_{N−1}⁺].
    pub fn from_coefficients(u: &[C64]) -> LadderSum {
        let n = u.len() / 2;
        let terms = (0..n)
            .filter(|&j| u[j] != ZERO || u[n + j] != ZERO)
            .map(|j| (j, u[j], u[n + j]))
            .collect();
        LadderSum { terms }
    }

    pub fn adjoint(&self) -> LadderSum {
        LadderSum {
            terms: self.terms.iter().map(|&(j, l, r)| (j, r.conj(), l.conj())).collect(),
        }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// `out += w · S · X` for square column-major `X`.
    ///
    /// With dim a power of two, bit `j` of a row index is bit `j` of the
    /// flat column-major offset, so the whole buffer splits into blocks of
    /// 2^{j+1} whose halves are exchanged by σ_j^±.
    pub fn left_acc(&self, w: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for &(j, l, r) in &self.terms {
            let m = 1usize << j;
            let (wl, wr) = (w * l, w * r);
            for (oc, xc) in os.chunks_exact_mut(2 * m).zip(xs.chunks_exact(2 * m)) {
                let (lo, hi) = oc.split_at_mut(m);
                let (xlo, xhi) = xc.split_at(m);
                if l != ZERO {
                    for (o, x) in lo.iter_mut().zip(xhi) {
                        *o += wl * x;
                    }
                }
                if r != ZERO {
                    for (o, x) in hi.iter_mut().zip(xlo) {
                        *o += wr * x;
                    }
                }
            }
        }
    }

    pub fn to_matrix(&self, n_atoms: usize) -> DMatrix<C64> {
        let dim = 1usize << n_atoms;
        let mut out = DMatrix::zeros(dim, dim);
        self.left_acc(ONE, &DMatrix::identity(dim, dim), &mut out);
        out
    }
}
