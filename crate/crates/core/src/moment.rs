//! Moment matrices, the shift operator and the level-`n` diagonalization.

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};
use crate::lattice::{
    from_pseudo_probabilities, to_pseudo_probabilities, ConstraintPolynomial, LatticeVector, VectorKind,
};
use crate::matrix::RatMatrix;
use crate::rational::Rational;
use crate::subset::{enumerate_subsets, SubsetIndex};

/// Largest ground set for which zeta blocks and the dense level-`n` check
/// are materialized.
pub const MAX_EXPLICIT_GROUND: usize = 12;

/// `M_t(w)`: rows and columns indexed by `P_t(N)` in graded order, entry
/// `(I, J) = w_{I∪J}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    pub n: usize,
    pub t: usize,
    pub index: Vec<SubsetIndex>,
    pub data: RatMatrix,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Wraps an arbitrary symmetric matrix indexed by `P_t(N)`.
    pub fn from_matrix(n: usize, t: usize, data: RatMatrix) -> Result<Self> {
        let index = enumerate_subsets(n, t)?;
        if data.rows() != index.len() || !data.is_square() {
            return Err(invalid(format!(
                "matrix is {}x{}, expected {}x{} for n={n}, t={t}",
                data.rows(),
                data.cols(),
                index.len(),
                index.len()
            )));
        }
        if !data.is_symmetric() {
            return Err(invalid("matrix is not symmetric"));
        }
        Ok(Self { n, t, index, data })
    }
}

/// The `P_t(N)` rows of the zeta matrix, split into the square block `A(t)`
/// and the remainder `B(t)` over `P(N) ∖ P_t(N)`.
#[derive(Clone, Debug)]
pub struct ZetaBlock {
    pub n: usize,
    pub t: usize,
    pub rows: Vec<SubsetIndex>,
    pub tail: Vec<SubsetIndex>,
    pub a: RatMatrix,
    pub b: RatMatrix,
}

impl ZetaBlock {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n > MAX_EXPLICIT_GROUND {
            return Err(invalid(format!("explicit zeta blocks are limited to n <= {MAX_EXPLICIT_GROUND}")));
        }
        let rows = enumerate_subsets(n, t)?;
        let all = enumerate_subsets(n, n)?;
        let tail: Vec<SubsetIndex> = all.into_iter().filter(|s| s.len() > t).collect();
        let indicator = |cols: &[SubsetIndex]| {
            let mut m = RatMatrix::zeros(rows.len(), cols.len());
            for (i, r) in rows.iter().enumerate() {
                for (j, c) in cols.iter().enumerate() {
                    if r.is_subset_of(*c) {
                        m[(i, j)] = Rational::one();
                    }
                }
            }
            m
        };
        let a = indicator(&rows);
        let b = indicator(&tail);
        Ok(Self { n, t, rows, tail, a, b })
    }

    /// `A(t)^{-1}` from the closed-form Möbius entries `(-1)^{|J∖I|}` for `I ⊆ J`.
    pub fn a_inverse(&self) -> RatMatrix {
        let k = self.rows.len();
        let mut m = RatMatrix::zeros(k, k);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.rows.iter().enumerate() {
                if r.is_subset_of(*c) {
                    let sign = if (c.len() - r.len()) % 2 == 0 { 1 } else { -1 };
                    m[(i, j)] = crate::rational::int(sign);
                }
            }
        }
        m
    }
}

/// `(g*y)_I = Σ_J g_J y_{I∪J}` over the full lattice.
pub fn shift(g: &ConstraintPolynomial, y: &LatticeVector) -> Result<LatticeVector> {
    let n = y.ground_size();
    if g.ground_size() != n {
        return Err(invalid(format!("constraint over n={} but moments over n={n}", g.ground_size())));
    }
    let dense = y.to_dense();
    let terms: Vec<(u32, &Rational)> = g.terms().collect();
    let out: Vec<Rational> = (0..dense.len() as u32)
        .map(|i| {
            terms.iter().fold(Rational::zero(), |acc, (j, c)| {
                let v = &dense[(i | j) as usize];
                if v.is_zero() {
                    acc
                } else {
                    acc + *c * v
                }
            })
        })
        .collect();
    LatticeVector::from_dense(n, VectorKind::Moments, out)
}

pub fn moment_matrix(w: &LatticeVector, t: usize) -> Result<MomentMatrix> {
    let n = w.ground_size();
    let index = enumerate_subsets(n, t)?;
    let k = index.len();
    let mut data = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = w.get(index[i].union(index[j]));
            if i != j {
                data[(j, i)] = v.clone();
            }
            data[(i, j)] = v;
        }
    }
    Ok(MomentMatrix { n, t, index, data })
}

/// Returns `w^N` together with the verdict of the exact check
/// `Z · Diag(w^N) · Zᵀ = M_n(w)`.
pub fn full_diagonalize(w: &LatticeVector) -> Result<(LatticeVector, bool)> {
    let diag = to_pseudo_probabilities(w);
    let verified = check_diagonalization(w, &diag)?;
    Ok((diag, verified))
}

/// Exact entrywise test of `Z · Diag(d) · Zᵀ = M_n(w)`.
///
/// Entry `(I, J)` of the product is `Σ_{K ⊇ I∪J} d_K`, which depends on the
/// union only and ranges over every subset as `(I, J)` varies. One superset
/// zeta pass over `d` therefore settles all `4^n` entries; the Möbius
/// transform that produced `w^N` is never used.
pub fn check_diagonalization(w: &LatticeVector, diag: &LatticeVector) -> Result<bool> {
    let n = w.ground_size();
    if n > MAX_EXPLICIT_GROUND {
        return Err(invalid(format!("full diagonalization check limited to n <= {MAX_EXPLICIT_GROUND}")));
    }
    if diag.ground_size() != n {
        return Err(invalid("diagonal and moments have different ground sizes"));
    }
    Ok(from_pseudo_probabilities(diag).to_dense() == w.to_dense())
}

/// `z^N_I = g(I) · y^N_I` for `z = g*y`. `y` may hold moments or `y^N`.
pub fn constraint_diagonal(g: &ConstraintPolynomial, y: &LatticeVector) -> Result<LatticeVector> {
    let n = y.ground_size();
    if g.ground_size() != n {
        return Err(invalid(format!("constraint over n={} but moments over n={n}", g.ground_size())));
    }
    let converted;
    let yn = match y.kind() {
        VectorKind::Moments => {
            converted = to_pseudo_probabilities(y);
            &converted
        }
        VectorKind::PseudoProbabilities => y,
    };
    let entries = yn.nonzero_entries().into_iter().map(|(s, p)| {
        let gv = g.value_at(s);
        (s, gv * p)
    });
    LatticeVector::from_entries(n, VectorKind::PseudoProbabilities, entries)
}

/// Outcome of reading a level-`n` solution as a distribution over 0/1 points.
#[derive(Clone, Debug, PartialEq)]
pub enum Decomposition {
    /// Support `(I, y^N_I)` with `y^N_I > 0`, in graded order.
    Distribution(Vec<(SubsetIndex, Rational)>),
    /// First violation in graded order. `constraint` is `None` when `y^N_I < 0`,
    /// otherwise the index of a constraint with `g(I)·y^N_I < 0`.
    Violation { subset: SubsetIndex, value: Rational, constraint: Option<usize> },
}

pub fn extract_distribution(y: &LatticeVector, constraints: &[ConstraintPolynomial]) -> Result<Decomposition> {
    let n = y.ground_size();
    if y.get(SubsetIndex::empty(n)) != Rational::one() {
        return Err(invalid("moment vector must have y_∅ = 1"));
    }
    if let Some(g) = constraints.iter().find(|g| g.ground_size() != n) {
        return Err(invalid(format!("constraint over n={} but moments over n={n}", g.ground_size())));
    }
    let yn = to_pseudo_probabilities(y);
    let mut support = Vec::new();
    for s in enumerate_subsets(n, n)? {
        let p = yn.get(s);
        if p.is_negative() {
            return Ok(Decomposition::Violation { subset: s, value: p, constraint: None });
        }
        if p.is_zero() {
            continue;
        }
        for (k, g) in constraints.iter().enumerate() {
            let gv = g.value_at(s);
            if gv.is_negative() {
                return Ok(Decomposition::Violation { subset: s, value: gv * &p, constraint: Some(k) });
            }
        }
        support.push((s, p));
    }
    Ok(Decomposition::Distribution(support))
}
