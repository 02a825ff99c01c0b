//! Randomized invariants over small ground sets.

use lasserre_core::almost_diag::{assemble, decompose};
use lasserre_core::io;
use lasserre_core::lattice::{from_pseudo_probabilities, to_pseudo_probabilities, LatticeVector, VectorKind};
use lasserre_core::matrix::RatMatrix;
use lasserre_core::moment::moment_matrix;
use lasserre_core::psd::{certify_recipe, is_psd_exact, PivotState};
use lasserre_core::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=9).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn moments(n: usize) -> impl Strategy<Value = LatticeVector> {
    prop::collection::vec(rational(), 1 << n)
        .prop_map(move |v| LatticeVector::from_dense(n, VectorKind::Moments, v).unwrap())
}

fn sized_moments() -> impl Strategy<Value = (LatticeVector, usize)> {
    (2usize..=4).prop_flat_map(|n| (moments(n), 0..n))
}

fn square(k: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(prop::collection::vec(rational(), cols), k)
        .prop_map(|rows| RatMatrix::from_rows(rows).unwrap())
}

/// `B·Bᵀ` for a random `k × r` matrix `B`.
fn gram() -> impl Strategy<Value = RatMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(k, r)| square(k, r)).prop_map(|b| b.mul(&b.transpose()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_matrices_are_psd(m in gram()) {
        let cert = is_psd_exact(&m).unwrap();
        prop_assert!(cert.is_psd());
        prop_assert!(cert.factorization.iter().all(|(_, p)| p.is_positive()));
    }

    #[test]
    fn shifted_gram_matrices_have_witnesses(m in gram(), row in 0usize..6) {
        // Lowering one diagonal entry below -trace makes the matrix indefinite.
        let row = row % m.rows();
        let mut a = m.clone();
        a[(row, row)] = -m.trace() - Rational::one();
        let cert = is_psd_exact(&a).unwrap();
        prop_assert!(!cert.is_psd());
        let w = cert.witness.unwrap();
        prop_assert!(a.quadratic_form(&w).unwrap().is_negative());
    }

    #[test]
    fn mobius_and_zeta_are_inverse(w in (1usize..=6).prop_flat_map(moments)) {
        prop_assert_eq!(from_pseudo_probabilities(&to_pseudo_probabilities(&w)).to_dense(), w.to_dense());
    }

    #[test]
    fn pivots_act_by_congruence((w, t) in sized_moments(), picks in prop::collection::vec(0usize..64, 1..4)) {
        let adf = decompose(&w, t).unwrap();
        let base = assemble(&adf);
        let mut state = PivotState::new(&adf);
        let dim = adf.dim();
        let mut t_acc = RatMatrix::identity(dim);
        for pick in picks {
            let options: Vec<_> = state
                .remaining
                .iter()
                .flat_map(|term| {
                    term.g_vec.iter().enumerate().filter(|(_, g)| !g.is_zero()).map(move |(i, _)| (term.j, i))
                })
                .collect();
            if options.is_empty() {
                break;
            }
            let (h, s) = options[pick % options.len()];
            state.pivot_reduce(h, adf.index[s]).unwrap();
            let step = state.trace.last().unwrap();
            let mut t_step = RatMatrix::identity(dim);
            for (i, m) in &step.multipliers {
                let row = adf.position(*i).unwrap();
                t_step[(row, s)] = m.clone();
            }
            t_acc = t_step.mul(&t_acc).unwrap();
        }
        prop_assert_eq!(state.total(), base.congruence(&t_acc).unwrap());
    }

    #[test]
    fn recipe_verdict_matches_oracle((w, t) in sized_moments()) {
        let adf = decompose(&w, t).unwrap();
        let recipe = certify_recipe(&adf, None).unwrap();
        let oracle = is_psd_exact(&moment_matrix(&w, t).unwrap().data).unwrap();
        prop_assert_eq!(recipe.verdict, oracle.verdict);
    }

    #[test]
    fn rationals_roundtrip(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn json_roundtrips((w, t) in sized_moments()) {
        let back = io::lattice_from_json(&io::parse(&io::pretty(&io::lattice_to_json(&w))).unwrap()).unwrap();
        prop_assert_eq!(back.to_dense(), w.to_dense());
        let adf = decompose(&w, t).unwrap();
        let back = io::adf_from_json(&io::parse(&io::pretty(&io::adf_to_json(&adf))).unwrap()).unwrap();
        prop_assert_eq!(back, adf);
    }
}
