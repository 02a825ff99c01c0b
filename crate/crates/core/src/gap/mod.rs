//! Builders and verifiers for three integrality-gap families: min-knapsack at
//! level `n − 1`, multiple knapsack with a lifted objective, and min-sum of
//! tardy jobs.

pub mod knapsack;
pub mod mkp;
pub mod schedule;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::{ConstraintPolynomial, LatticeVector, VectorKind};
use crate::matrix::RatMatrix;
use crate::psd::PsdCertificate;
use crate::rational::{serde_str, Rational};
use crate::subset::enumerate_subsets;

pub use knapsack::{
    knapsack_solution, lift_solution, trace_bound_check, verify_knapsack_level, verify_lift, KnapsackGapInstance,
    LiftCheck, TraceBound,
};
pub use mkp::{build_mkp, mkp_uniform_solution, replay_reference, verify_mkp, MkpInstance, ReplayReport};
pub use schedule::{
    build_schedule, find_min_feasible_p, schedule_solution, verify_schedule, PSearch, ScheduleInstance,
};

/// Cap on the variable count for brute-force 0/1 enumeration.
pub const MAX_BRUTE_FORCE_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum Instance {
    Knapsack {
        n: usize,
        #[serde(with = "serde_str")]
        p: Rational,
    },
    Mkp {
        knapsacks: usize,
        items_per: usize,
        #[serde(with = "serde_str")]
        eps: Rational,
        #[serde(with = "serde_str")]
        cap: Rational,
    },
    Schedule {
        n: usize,
        #[serde(with = "serde_str")]
        k: Rational,
        #[serde(with = "serde_str")]
        p: Rational,
    },
}

/// PSD evidence for one moment matrix of a relaxation.
#[derive(Clone, Debug)]
pub struct ConstraintCheck {
    pub label: String,
    pub level: usize,
    /// Gershgorin recipe run on the almost-diagonal form, when attempted.
    pub recipe: Option<PsdCertificate>,
    /// Exact oracle run on the moment matrix itself.
    pub oracle: PsdCertificate,
}

impl ConstraintCheck {
    pub fn is_psd(&self) -> bool {
        self.oracle.is_psd()
    }
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub instance: Instance,
    pub level: usize,
    pub feasible: bool,
    /// Relaxation value: `Σ y_i` for knapsack, the objective cap otherwise.
    pub objective: Rational,
    pub integral_optimum: Rational,
    pub gap: Rational,
    pub checks: Vec<ConstraintCheck>,
}

/// `y_V = Σ_{S⊇V} y^N_S` from a sparse list of pseudo-probabilities.
fn moment_from_pseudo(entries: &[(u32, Rational)], v: u32) -> Rational {
    entries.iter().filter(|(s, _)| s & v == v).fold(Rational::zero(), |acc, (_, p)| acc + p)
}

/// `M_t(g*y)` built from the shift definition `z_U = Σ_J g_J y_{U∪J}`, with
/// each moment read off the sparse `y^N`. Only entries with `|U| ≤ 2t` are
/// touched, so large ground sets stay cheap when `y^N` is sparse.
pub fn constraint_moment_matrix(g: Option<&ConstraintPolynomial>, yn: &LatticeVector, t: usize) -> Result<RatMatrix> {
    if yn.kind() != VectorKind::PseudoProbabilities {
        return Err(invalid("expected pseudo-probabilities"));
    }
    let n = yn.ground_size();
    if let Some(g) = g {
        if g.ground_size() != n {
            return Err(invalid(format!("constraint over n={} but solution over n={n}", g.ground_size())));
        }
    }
    let entries: Vec<(u32, Rational)> = yn.nonzero_entries().into_iter().map(|(s, p)| (s.bits(), p)).collect();
    let index = enumerate_subsets(n, t)?;
    let mut cache: std::collections::HashMap<u32, Rational> = std::collections::HashMap::new();
    let mut z = |u: u32| -> Rational {
        cache
            .entry(u)
            .or_insert_with(|| match g {
                None => moment_from_pseudo(&entries, u),
                Some(g) => {
                    g.terms().fold(Rational::zero(), |acc, (j, c)| acc + c * moment_from_pseudo(&entries, u | j))
                }
            })
            .clone()
    };
    let k = index.len();
    let mut m = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = z(index[i].bits() | index[j].bits());
            if i != j {
                m[(j, i)] = v.clone();
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Minimum of `objective` over 0/1 points meeting every `g ≥ 0`, by
/// enumeration over at most [`MAX_BRUTE_FORCE_VARS`] variables.
pub fn brute_force_minimum(
    n: usize,
    objective: &ConstraintPolynomial,
    constraints: &[ConstraintPolynomial],
) -> Result<Option<Rational>> {
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(invalid(format!("brute force limited to {MAX_BRUTE_FORCE_VARS} variables")));
    }
    if objective.ground_size() != n || constraints.iter().any(|g| g.ground_size() != n) {
        return Err(invalid("polynomials must share the ground size"));
    }
    let mut best: Option<Rational> = None;
    for s in enumerate_subsets(n, n)? {
        if constraints.iter().any(|g| g.value_at(s).is_negative()) {
            continue;
        }
        let v = objective.value_at(s);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::from_pseudo_probabilities;
    use crate::moment::{moment_matrix, shift};
    use crate::rational::{frac, int};
    use crate::subset::SubsetIndex;

    #[test]
    fn sparse_constraint_matrix_matches_shift() {
        let n = 4;
        let entries = [(0b0000, frac(1, 4)), (0b0011, frac(1, 8)), (0b0101, frac(1, 2)), (0b1110, frac(1, 8))]
            .into_iter()
            .map(|(b, p)| (SubsetIndex::new(b, n).unwrap(), p));
        let yn = LatticeVector::from_entries(n, VectorKind::PseudoProbabilities, entries).unwrap();
        let y = from_pseudo_probabilities(&yn);
        let g = ConstraintPolynomial::linear(n, &[int(1), int(2), int(-1), int(3)], frac(-3, 2)).unwrap();
        for t in 0..=2 {
            let direct = moment_matrix(&shift(&g, &y).unwrap(), t).unwrap().data;
            assert_eq!(constraint_moment_matrix(Some(&g), &yn, t).unwrap(), direct);
            let plain = moment_matrix(&y, t).unwrap().data;
            assert_eq!(constraint_moment_matrix(None, &yn, t).unwrap(), plain);
        }
    }

    #[test]
    fn brute_force_small_cover() {
        let n = 3;
        let obj = ConstraintPolynomial::linear(n, &[int(1), int(1), int(1)], int(0)).unwrap();
        let g = ConstraintPolynomial::linear(n, &[int(1), int(1), int(1)], frac(-3, 2)).unwrap();
        assert_eq!(brute_force_minimum(n, &obj, &[g]).unwrap(), Some(int(2)));
        let impossible = ConstraintPolynomial::constant(n, int(-1)).unwrap();
        assert_eq!(brute_force_minimum(n, &obj, &[impossible]).unwrap(), None);
    }
}
