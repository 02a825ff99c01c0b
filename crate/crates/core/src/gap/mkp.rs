//! Multiple knapsack with the objective lifted into a cardinality cap:
//! `Σ x_i ≤ T` plus `Σ_{i∈K_k} x_i ≥ ε` for each knapsack `K_k`.

use num_traits::{One, Zero};

use super::{brute_force_minimum, constraint_moment_matrix, ConstraintCheck, GapReport, Instance};
use crate::almost_diag::decompose_pseudo;
use crate::error::{invalid, Result};
use crate::lattice::{ConstraintPolynomial, LatticeVector, VectorKind};
use crate::matrix::RatMatrix;
use crate::moment::constraint_diagonal;
use crate::psd::{certify_recipe, gershgorin, is_psd_exact, GershgorinReport, PivotState, PsdCertificate};
use crate::rational::{binomial, int, Rational};
use crate::subset::{enumerate_subsets, SubsetIndex};

#[derive(Clone, Debug, PartialEq)]
pub struct MkpInstance {
    pub knapsacks: usize,
    pub items_per: usize,
    pub eps: Rational,
    pub cap: Rational,
}

impl MkpInstance {
    pub fn ground_size(&self) -> usize {
        self.knapsacks * self.items_per
    }

    /// 1-based items of knapsack `k` (0-based).
    pub fn items(&self, k: usize) -> Vec<usize> {
        (k * self.items_per + 1..=(k + 1) * self.items_per).collect()
    }

    /// `T − Σ x_i`.
    pub fn cardinality(&self) -> ConstraintPolynomial {
        let n = self.ground_size();
        ConstraintPolynomial::linear(n, &vec![int(-1); n], self.cap.clone()).expect("ground size checked")
    }

    /// `Σ_{i∈K_k} x_i − ε`.
    pub fn covering(&self, k: usize) -> ConstraintPolynomial {
        let n = self.ground_size();
        let mut coeffs = vec![Rational::zero(); n];
        for i in self.items(k) {
            coeffs[i - 1] = int(1);
        }
        ConstraintPolynomial::linear(n, &coeffs, -self.eps.clone()).expect("ground size checked")
    }

    pub fn instance(&self) -> Instance {
        Instance::Mkp {
            knapsacks: self.knapsacks,
            items_per: self.items_per,
            eps: self.eps.clone(),
            cap: self.cap.clone(),
        }
    }

    /// Minimum number of items meeting every demand (the cap is dropped).
    pub fn integral_optimum(&self) -> Result<Option<Rational>> {
        let n = self.ground_size();
        let obj = ConstraintPolynomial::linear(n, &vec![int(1); n], int(0))?;
        let cover: Vec<_> = (0..self.knapsacks).map(|k| self.covering(k)).collect();
        brute_force_minimum(n, &obj, &cover)
    }

    /// Pivot schedule for knapsack `k` at level 1 on the 3 × 2 instance; the
    /// other knapsacks reuse the first one's schedule with items relabelled.
    pub fn reference_schedule(&self, k: usize) -> Option<Vec<(SubsetIndex, SubsetIndex)>> {
        if self.knapsacks != 3 || self.items_per != 2 || k >= 3 {
            return None;
        }
        let (a, b) = (2 * k + 1, 2 * k + 2);
        let relabel = |i: usize| match i {
            1 => a,
            2 => b,
            x if x == a => 1,
            x if x == b => 2,
            x => x,
        };
        let set = |e: &[usize]| {
            let mapped: Vec<usize> = e.iter().map(|&i| relabel(i)).collect();
            SubsetIndex::from_elements(&mapped, 6).expect("items within ground")
        };
        Some(REFERENCE_SCHEDULE.iter().map(|(h, s)| (set(h), set(s))).collect())
    }
}

pub fn build_mkp(knapsacks: usize, items_per: usize, eps: Rational, cap: Rational) -> Result<MkpInstance> {
    if knapsacks == 0 || items_per == 0 {
        return Err(invalid("need at least one knapsack and one item per knapsack"));
    }
    if eps <= Rational::zero() || cap <= Rational::zero() {
        return Err(invalid("demand and cap must be positive"));
    }
    crate::subset::check_ground(knapsacks * items_per)?;
    Ok(MkpInstance { knapsacks, items_per, eps, cap })
}

/// Uniform `y^N_I = 1/|P_{t+1}(N)|` on `|I| ≤ t + 1`, zero above.
pub fn mkp_uniform_solution(inst: &MkpInstance, t: usize) -> Result<LatticeVector> {
    uniform_solution(inst.ground_size(), t)
}

pub(crate) fn uniform_solution(n: usize, t: usize) -> Result<LatticeVector> {
    if t + 1 > n {
        return Err(invalid(format!("level {t} needs t + 1 <= {n}")));
    }
    let count = (0..=t + 1).fold(num_bigint::BigInt::zero(), |acc, i| acc + binomial(n as i64, i as i64));
    let alpha = Rational::from_integer(count).recip();
    let entries = enumerate_subsets(n, t + 1)?.into_iter().map(|s| (s, alpha.clone()));
    LatticeVector::from_entries(n, VectorKind::PseudoProbabilities, entries)
}

/// Certifies the uniform solution at level `t`. With `use_reference`, the
/// covering constraints replay [`MkpInstance::reference_schedule`] when one
/// exists; otherwise the greedy pivot strategy runs.
pub fn verify_mkp(inst: &MkpInstance, t: usize, use_reference: bool) -> Result<GapReport> {
    let yn = mkp_uniform_solution(inst, t)?;
    let mut checks = Vec::new();

    let vars = decompose_pseudo(&yn, t + 1)?;
    checks.push(ConstraintCheck {
        label: "variables".into(),
        level: t + 1,
        recipe: Some(certify_recipe(&vars, Some(&[]))?),
        oracle: is_psd_exact(&constraint_moment_matrix(None, &yn, t + 1)?)?,
    });

    let mut constraints = vec![("cardinality".to_string(), inst.cardinality(), None)];
    for k in 0..inst.knapsacks {
        let sched = if use_reference && t == 1 { inst.reference_schedule(k) } else { None };
        constraints.push((format!("cover-{}", k + 1), inst.covering(k), sched));
    }
    for (label, g, sched) in constraints {
        let adf = decompose_pseudo(&constraint_diagonal(&g, &yn)?, t)?;
        let recipe = certify_recipe(&adf, sched.as_deref())?;
        let oracle = is_psd_exact(&constraint_moment_matrix(Some(&g), &yn, t)?)?;
        checks.push(ConstraintCheck { label, level: t, recipe: Some(recipe), oracle });
    }

    let integral_optimum = inst.integral_optimum()?.ok_or_else(|| invalid("instance has no integral solution"))?;
    let feasible = checks.iter().all(ConstraintCheck::is_psd);
    Ok(GapReport {
        instance: inst.instance(),
        level: t,
        feasible,
        gap: &integral_optimum / &inst.cap,
        objective: inst.cap.clone(),
        integral_optimum,
        checks,
    })
}

/// Pivots `(H, S)` for the first knapsack, as element lists.
pub const REFERENCE_SCHEDULE: [(&[usize], &[usize]); 5] =
    [(&[1, 2], &[]), (&[1, 3], &[3]), (&[2, 4], &[4]), (&[1, 5], &[5]), (&[2, 6], &[6])];

/// Reference working matrices (scaled by `1/α`) for the first covering
/// constraint: one after each pivot of [`REFERENCE_SCHEDULE`], then the final
/// matrix with the NSD terms added. Entry `(a, b)` stands for `a + b·ε`.
#[rustfmt::skip]
pub const REFERENCE_TRACE: [[[(i64, i64); 7]; 7]; 6] = [
    [
        [(2, 0), (0, -1), (0, -1), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (1, -2), (0, -1), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, -1), (1, -2), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, -1), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, -1), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1)],
    ],
    [
        [(2, -1), (0, -1), (0, -2), (0, -1), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (1, -2), (0, -1), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, -2), (0, -1), (1, -3), (0, -1), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (1, -2), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, -1), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1)],
    ],
    [
        [(2, -2), (0, -2), (0, -2), (0, -1), (0, -1), (0, 0), (0, 0)],
        [(0, -2), (1, -3), (0, -1), (0, 0), (0, -1), (0, 0), (0, 0)],
        [(0, -2), (0, -1), (1, -3), (0, -1), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (1, -2), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, -1), (0, 0), (0, 0), (1, -2), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1)],
    ],
    [
        [(2, -3), (0, -2), (0, -3), (0, -1), (0, -1), (0, -1), (0, 0)],
        [(0, -2), (1, -3), (0, -1), (0, 0), (0, -1), (0, 0), (0, 0)],
        [(0, -3), (0, -1), (1, -4), (0, -1), (0, 0), (0, -1), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (1, -2), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, -1), (0, 0), (0, 0), (1, -2), (0, 0), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (0, 0), (0, 0), (1, -2), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, -1)],
    ],
    [
        [(2, -4), (0, -3), (0, -3), (0, -1), (0, -1), (0, -1), (0, -1)],
        [(0, -3), (1, -4), (0, -1), (0, 0), (0, -1), (0, 0), (0, -1)],
        [(0, -3), (0, -1), (1, -4), (0, -1), (0, 0), (0, -1), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (1, -2), (0, 0), (0, 0), (0, 0)],
        [(0, -1), (0, -1), (0, 0), (0, 0), (1, -2), (0, 0), (0, 0)],
        [(0, -1), (0, 0), (0, -1), (0, 0), (0, 0), (1, -2), (0, 0)],
        [(0, -1), (0, -1), (0, 0), (0, 0), (0, 0), (0, 0), (1, -2)],
    ],
    [
        [(2, -10), (0, -3), (0, -3), (0, -4), (0, -4), (0, -4), (0, -4)],
        [(0, -3), (1, -6), (0, 1), (0, 1), (0, -2), (0, 1), (0, -2)],
        [(0, -3), (0, 1), (1, -6), (0, -2), (0, 1), (0, -2), (0, 1)],
        [(0, -4), (0, 1), (0, -2), (1, -5), (0, -1), (0, -1), (0, -1)],
        [(0, -4), (0, -2), (0, 1), (0, -1), (1, -5), (0, -1), (0, -1)],
        [(0, -4), (0, 1), (0, -2), (0, -1), (0, -1), (1, -5), (0, -1)],
        [(0, -4), (0, -2), (0, 1), (0, -1), (0, -1), (0, -1), (1, -5)],
    ],
];

/// Reference sum of the NSD terms after the schedule, in units of `−ε`.
#[rustfmt::skip]
pub const REFERENCE_ND: [[i64; 7]; 7] = [
    [6, 0, 0, 3, 3, 3, 3],
    [0, 2, -2, -1, 1, -1, 1],
    [0, -2, 2, 1, -1, 1, -1],
    [3, -1, 1, 3, 1, 1, 1],
    [3, 1, -1, 1, 3, 1, 1],
    [3, -1, 1, 1, 1, 3, 1],
    [3, 1, -1, 1, 1, 1, 3],
];

pub fn reference_matrix(stage: usize, eps: &Rational) -> RatMatrix {
    let rows = REFERENCE_TRACE[stage].iter().map(|r| r.iter().map(|&(a, b)| int(a) + int(b) * eps).collect()).collect();
    RatMatrix::from_rows(rows).expect("square reference")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    /// `0..5` after each pivot, `5` for the final matrix.
    pub stage: usize,
    pub row: SubsetIndex,
    pub col: SubsetIndex,
    pub expected: Rational,
    pub actual: Rational,
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub eps: Rational,
    pub alpha: Rational,
    pub index: Vec<SubsetIndex>,
    /// Working matrices after each pivot, scaled by `1/α`.
    pub steps: Vec<RatMatrix>,
    /// Sum of the NSD terms left after the schedule, scaled by `1/α`.
    pub nd_sum: RatMatrix,
    pub final_matrix: RatMatrix,
    pub disks: GershgorinReport,
    pub mismatches: Vec<Mismatch>,
    pub nd_matches: bool,
    /// Reference-schedule certificates for all covering constraints plus
    /// the cardinality constraint, and the full level-1 report.
    pub report: GapReport,
}

impl ReplayReport {
    pub fn trace_matches(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Rows of the final matrix whose disk touches zero.
    pub fn boundary_rows(&self) -> Vec<SubsetIndex> {
        self.disks.disks.iter().filter(|d| d.center == d.radius).map(|d| self.index[d.row]).collect()
    }

    pub fn stage_count() -> usize {
        REFERENCE_TRACE.len()
    }

    pub fn stage_mismatches(&self, stage: usize) -> impl Iterator<Item = &Mismatch> {
        self.mismatches.iter().filter(move |m| m.stage == stage)
    }
}

/// Replays the reference pivot schedule on the first covering constraint of
/// the 3 × 2 instance with cap 2 and compares each stage with the reference
/// matrices.
pub fn replay_reference(eps: &Rational) -> Result<ReplayReport> {
    let inst = build_mkp(3, 2, eps.clone(), int(2))?;
    let yn = mkp_uniform_solution(&inst, 1)?;
    let alpha = yn.get(SubsetIndex::empty(6));
    let adf = decompose_pseudo(&constraint_diagonal(&inst.covering(0), &yn)?, 1)?;
    let inv = alpha.recip();

    let mut state = PivotState::new(&adf);
    let mut steps = Vec::new();
    for (h, s) in inst.reference_schedule(0).expect("3 x 2 instance") {
        state.pivot_reduce(h, s)?;
        steps.push(state.working.scale(&inv));
    }
    let nd_sum = state.effective().add(&state.working.scale(&-Rational::one()))?.scale(&inv);
    let final_matrix = state.effective().scale(&inv);
    let disks = gershgorin(&final_matrix)?;

    let index = adf.index.clone();
    let mut mismatches = Vec::new();
    for (stage, actual) in steps.iter().chain(std::iter::once(&final_matrix)).enumerate() {
        let expected = reference_matrix(stage, eps);
        for i in 0..7 {
            for j in 0..7 {
                if expected[(i, j)] != actual[(i, j)] {
                    mismatches.push(Mismatch {
                        stage,
                        row: index[i],
                        col: index[j],
                        expected: expected[(i, j)].clone(),
                        actual: actual[(i, j)].clone(),
                    });
                }
            }
        }
    }
    let nd_expected =
        RatMatrix::from_rows(REFERENCE_ND.iter().map(|r| r.iter().map(|&v| -int(v) * eps).collect()).collect())?;
    let nd_matches = nd_expected == nd_sum;
    let report = verify_mkp(&inst, 1, true)?;
    Ok(ReplayReport {
        eps: eps.clone(),
        alpha,
        index,
        steps,
        nd_sum,
        final_matrix,
        disks,
        mismatches,
        nd_matches,
        report,
    })
}

/// Certificate for one constraint of a report, by label.
pub fn find_check<'a>(report: &'a GapReport, label: &str) -> Option<&'a PsdCertificate> {
    report.checks.iter().find(|c| c.label == label).and_then(|c| c.recipe.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn reference_case() -> MkpInstance {
        build_mkp(3, 2, frac(1, 16), int(2)).unwrap()
    }

    #[test]
    fn uniform_weight() {
        let yn = mkp_uniform_solution(&reference_case(), 1).unwrap();
        assert_eq!(yn.get(SubsetIndex::empty(6)), frac(1, 22));
        assert_eq!(yn.total(), int(1));
        assert_eq!(yn.support_len(), 22);
    }

    #[test]
    fn cardinality_form_has_no_rank_one_terms() {
        let inst = reference_case();
        let yn = mkp_uniform_solution(&inst, 1).unwrap();
        let adf = decompose_pseudo(&constraint_diagonal(&inst.cardinality(), &yn).unwrap(), 1).unwrap();
        assert!(adf.terms.is_empty());
        assert!(adf.diag.iter().all(|d| *d >= Rational::zero()));
    }

    #[test]
    fn relabelled_schedules() {
        let inst = reference_case();
        let s1 = inst.reference_schedule(1).unwrap();
        assert_eq!(s1[0].0, SubsetIndex::from_elements(&[3, 4], 6).unwrap());
        assert_eq!(
            s1[1],
            (SubsetIndex::from_elements(&[1, 3], 6).unwrap(), SubsetIndex::from_elements(&[1], 6).unwrap())
        );
        assert!(build_mkp(2, 2, frac(1, 16), int(2)).unwrap().reference_schedule(0).is_none());
    }

    #[test]
    fn integral_optimum_three() {
        assert_eq!(reference_case().integral_optimum().unwrap(), Some(int(3)));
    }

    #[test]
    fn replay_matches_off_the_corner() {
        let rep = replay_reference(&frac(1, 16)).unwrap();
        assert!(rep.nd_matches);
        // Every stage disagrees with the reference only at (∅, ∅); the
        // reduced term there contributes (2 − ε), not 2.
        let empty = SubsetIndex::empty(6);
        assert!(rep.mismatches.iter().all(|m| m.row == empty && m.col == empty));
        assert_eq!(rep.final_matrix[(0, 0)], int(2) - int(12) * frac(1, 16));
        assert!(rep.report.feasible);
    }
}
