//! Almost-diagonal form of a level-`t` moment matrix.
//!
//! `M_t(w)` is congruent (through the Möbius block `A(t)^{-1}`) to
//! `Diag(w^N, t) + Σ_{|J|>t} w^N_J · G(J) G(J)ᵀ`, where
//! `G(J)_I = (-1)^{t-|I|} · C(|J|-|I|-1, t-|I|)` for `I ⊆ J` and zero
//! otherwise. Terms with a positive coefficient are PSD (`Pd`), those with a
//! negative coefficient NSD (`Nd`).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{invalid, Result};
use crate::lattice::{to_pseudo_probabilities, LatticeVector, VectorKind};
use crate::matrix::RatMatrix;
use crate::rational::{binomial, Rational};
use crate::subset::{enumerate_subsets, SubsetIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TermClass {
    Pd,
    Nd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOneTerm {
    pub j: SubsetIndex,
    pub coefficient: Rational,
    /// `G(J)` over `P_t(N)` in graded order.
    pub g_vec: Vec<Rational>,
}

impl RankOneTerm {
    pub fn class(&self) -> TermClass {
        if self.coefficient.is_negative() {
            TermClass::Nd
        } else {
            TermClass::Pd
        }
    }

    /// `coefficient · G(J) G(J)ᵀ` as a dense matrix.
    pub fn matrix(&self) -> RatMatrix {
        let k = self.g_vec.len();
        let mut m = RatMatrix::zeros(k, k);
        m.add_rank_one(&self.coefficient, &self.g_vec);
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostDiagonalForm {
    pub n: usize,
    pub t: usize,
    pub index: Vec<SubsetIndex>,
    /// `w^N_I` for `I ∈ P_t(N)`, aligned with `index`.
    pub diag: Vec<Rational>,
    /// One term per `J` with `|J| > t` and `w^N_J ≠ 0`, graded order of `J`.
    pub terms: Vec<RankOneTerm>,
}

impl AlmostDiagonalForm {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn diag_vector(&self) -> LatticeVector {
        let entries = self.index.iter().copied().zip(self.diag.iter().cloned());
        LatticeVector::from_entries(self.n, VectorKind::PseudoProbabilities, entries).expect("valid index")
    }

    pub fn position(&self, s: SubsetIndex) -> Option<usize> {
        self.index.iter().position(|&x| x == s)
    }

    pub fn terms_of(&self, class: TermClass) -> impl Iterator<Item = &RankOneTerm> {
        self.terms.iter().filter(move |t| t.class() == class)
    }
}

/// Signed binomial weight of `G(J)` at a row of cardinality `i`.
fn g_weight(j_len: usize, i: usize, t: usize) -> BigInt {
    let c = binomial(j_len as i64 - i as i64 - 1, t as i64 - i as i64);
    if (t - i).is_multiple_of(2) {
        c
    } else {
        -c
    }
}

/// `G(J)` over `P_t(N)`; requires `|J| ≥ t + 1`.
pub fn g_vector(j: SubsetIndex, t: usize) -> Result<Vec<Rational>> {
    if j.len() <= t {
        return Err(invalid(format!("G(J) needs |J| > t, got |J| = {} and t = {t}", j.len())));
    }
    let index = enumerate_subsets(j.ground_size(), t)?;
    Ok(g_vector_over(j, t, &index))
}

fn g_vector_over(j: SubsetIndex, t: usize, index: &[SubsetIndex]) -> Vec<Rational> {
    index
        .iter()
        .map(
            |i| {
                if i.is_subset_of(j) {
                    Rational::from_integer(g_weight(j.len(), i.len(), t))
                } else {
                    Rational::zero()
                }
            },
        )
        .collect()
}

pub fn decompose(w: &LatticeVector, t: usize) -> Result<AlmostDiagonalForm> {
    match w.kind() {
        VectorKind::Moments => decompose_pseudo(&to_pseudo_probabilities(w), t),
        VectorKind::PseudoProbabilities => decompose_pseudo(w, t),
    }
}

/// Same as [`decompose`] for a vector already holding `w^N`.
pub fn decompose_pseudo(wn: &LatticeVector, t: usize) -> Result<AlmostDiagonalForm> {
    let n = wn.ground_size();
    let index = enumerate_subsets(n, t)?;
    let diag = index.iter().map(|&s| wn.get(s)).collect();
    let terms = wn
        .nonzero_entries()
        .into_iter()
        .filter(|(j, _)| j.len() > t)
        .map(|(j, coefficient)| RankOneTerm { j, coefficient, g_vec: g_vector_over(j, t, &index) })
        .collect();
    Ok(AlmostDiagonalForm { n, t, index, diag, terms })
}

/// `Diag(w^N, t) + Σ coefficient · G(J) G(J)ᵀ`.
pub fn assemble(adf: &AlmostDiagonalForm) -> RatMatrix {
    let mut m = RatMatrix::diagonal(&adf.diag);
    for term in &adf.terms {
        m.add_rank_one(&term.coefficient, &term.g_vec);
    }
    m
}

/// `vᵀ · assemble(adf) · v` evaluated from the closed-form sum without
/// building the matrix.
pub fn quadratic_form(adf: &AlmostDiagonalForm, v: &[Rational]) -> Result<Rational> {
    if v.len() != adf.dim() {
        return Err(invalid(format!("vector has {} entries, expected {}", v.len(), adf.dim())));
    }
    let t = adf.t;
    let mut acc = adf.diag.iter().zip(v).fold(Rational::zero(), |acc, (d, x)| acc + d * x * x);

    let mut by_size: Vec<Vec<(SubsetIndex, &Rational)>> = vec![Vec::new(); t + 1];
    for (s, x) in adf.index.iter().zip(v) {
        by_size[s.len()].push((*s, x));
    }
    let mut weight_cache: HashMap<(usize, usize), Rational> = HashMap::new();
    for term in &adf.terms {
        let jl = term.j.len();
        let mut inner = Rational::zero();
        for (i, layer) in by_size.iter().enumerate() {
            let layer_sum =
                layer.iter().filter(|(s, _)| s.is_subset_of(term.j)).fold(Rational::zero(), |acc, (_, x)| acc + *x);
            if layer_sum.is_zero() {
                continue;
            }
            let w = weight_cache.entry((jl, i)).or_insert_with(|| Rational::from_integer(g_weight(jl, i, t)));
            inner += &*w * layer_sum;
        }
        acc += &term.coefficient * &inner * &inner;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn s(e: &[usize], n: usize) -> SubsetIndex {
        SubsetIndex::from_elements(e, n).unwrap()
    }

    #[test]
    fn g_vector_examples() {
        assert_eq!(g_vector(s(&[1, 2], 2), 1).unwrap(), vec![int(-1), int(1), int(1)]);

        let g = g_vector(s(&[1, 3], 6), 1).unwrap();
        let mut expected = vec![int(0); 7];
        expected[0] = int(-1);
        expected[1] = int(1);
        expected[3] = int(1);
        assert_eq!(g, expected);

        let g = g_vector(s(&[1, 2, 3, 4], 4), 2).unwrap();
        assert_eq!(g[0], int(3));
        assert!(g_vector(s(&[1], 2), 1).is_err());
    }

    #[test]
    fn g_vector_support_size() {
        for n in 1..=6usize {
            for t in 0..n {
                for j in enumerate_subsets(n, n).unwrap().into_iter().filter(|j| j.len() > t) {
                    let nnz = g_vector(j, t).unwrap().iter().filter(|x| !x.is_zero()).count();
                    let expected: BigInt = (0..=t).map(|i| binomial(j.len() as i64, i as i64)).sum();
                    assert_eq!(BigInt::from(nnz), expected, "J={j} t={t}");
                }
            }
        }
    }

    #[test]
    fn two_variable_level_one() {
        // z = (z0, z1, z2, z12) = (2, 3, 5, 7)
        let z = LatticeVector::from_dense(2, VectorKind::Moments, vec![int(2), int(3), int(5), int(7)]).unwrap();
        let adf = decompose(&z, 1).unwrap();
        assert_eq!(adf.diag, vec![int(2 - 3 - 5 + 7), int(3 - 7), int(5 - 7)]);
        assert_eq!(adf.terms.len(), 1);
        assert_eq!(adf.terms[0].j, s(&[1, 2], 2));
        assert_eq!(adf.terms[0].coefficient, int(7));
        assert_eq!(adf.terms[0].class(), TermClass::Pd);
    }

    #[test]
    fn full_level_has_no_terms() {
        let z = LatticeVector::from_dense(2, VectorKind::Moments, vec![int(2), int(3), int(5), int(7)]).unwrap();
        let adf = decompose(&z, 2).unwrap();
        assert!(adf.terms.is_empty());
        assert_eq!(assemble(&adf), RatMatrix::diagonal(&adf.diag));
    }

    #[test]
    fn assemble_strategy_example() {
        // (z^N_∅, z^N_1, z^N_2, z^N_12) = (1, -1/3, 1, 2)
        let adf = AlmostDiagonalForm {
            n: 2,
            t: 1,
            index: enumerate_subsets(2, 1).unwrap(),
            diag: vec![int(1), crate::rational::frac(-1, 3), int(1)],
            terms: vec![RankOneTerm {
                j: s(&[1, 2], 2),
                coefficient: int(2),
                g_vec: g_vector(s(&[1, 2], 2), 1).unwrap(),
            }],
        };
        let m = assemble(&adf);
        let f = crate::rational::frac;
        assert_eq!(
            m.to_rows(),
            vec![vec![int(3), int(-2), int(-2)], vec![int(-2), f(5, 3), int(2)], vec![int(-2), int(2), int(3)],]
        );
        let e0 = vec![int(1), int(0), int(0)];
        assert_eq!(quadratic_form(&adf, &e0).unwrap(), int(3));
        assert!(quadratic_form(&adf, &[int(1)]).is_err());
    }
}
