//! Min-knapsack gap instance `min Σ_{i≤n} x_i` s.t. `Σ_{i≤n+1} x_i ≥ 1 + 1/P`,
//! handled through its reduced form `Σ_{i≤n} x_i − 1/P ≥ 0` plus a lift.

use num_traits::{One, Signed, Zero};

use super::{brute_force_minimum, constraint_moment_matrix, ConstraintCheck, GapReport, Instance};
use crate::almost_diag::{assemble, decompose_pseudo, g_vector, RankOneTerm};
use crate::error::{invalid, Error, Result};
use crate::lattice::{
    from_pseudo_probabilities, to_pseudo_probabilities, ConstraintPolynomial, LatticeVector, VectorKind,
};
use crate::moment::{constraint_diagonal, moment_matrix, shift};
use crate::psd::{certify_recipe, is_psd_exact, PivotState};
use crate::rational::{int, pow2, Rational};
use crate::subset::{enumerate_subsets, SubsetIndex};

#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackGapInstance {
    pub n: usize,
    pub p: Rational,
}

impl KnapsackGapInstance {
    pub fn new(n: usize, p: Rational) -> Result<Self> {
        if n == 0 {
            return Err(invalid("knapsack instance needs at least one item"));
        }
        if p <= Rational::one() {
            return Err(invalid("gap parameter P must exceed 1"));
        }
        Ok(Self { n, p })
    }

    /// `P = k · 2^{2n+1}`.
    pub fn with_gap_factor(n: usize, k: &Rational) -> Result<Self> {
        if *k < Rational::one() {
            return Err(invalid("gap factor k must be at least 1"));
        }
        Self::new(n, k * pow2(2 * n as u32 + 1))
    }

    /// `g(x) = Σ_{i≤n} x_i − 1/P` on the reduced instance.
    pub fn constraint(&self) -> ConstraintPolynomial {
        let ones = vec![int(1); self.n];
        ConstraintPolynomial::linear(self.n, &ones, -self.p.recip()).expect("ground size checked")
    }

    /// `h(x) = Σ_{i≤n+1} x_i − 1 − 1/P` on the full instance.
    pub fn lifted_constraint(&self) -> Result<ConstraintPolynomial> {
        let ones = vec![int(1); self.n + 1];
        ConstraintPolynomial::linear(self.n + 1, &ones, -(Rational::one() + self.p.recip()))
    }

    pub fn instance(&self) -> Instance {
        Instance::Knapsack { n: self.n, p: self.p.clone() }
    }
}

/// `y^N_I = 2^n / (P·|I| − 1)` for `I ≠ ∅`, with `y^N_∅` closing the sum to 1.
pub fn knapsack_solution(n: usize, p: &Rational) -> Result<LatticeVector> {
    let inst = KnapsackGapInstance::new(n, p.clone())?;
    let two_n = pow2(n as u32);
    let mut yn = LatticeVector::zeros(n, VectorKind::PseudoProbabilities)?;
    let mut rest = Rational::one();
    for s in enumerate_subsets(n, n)?.into_iter().skip(1) {
        let v = &two_n / (&inst.p * int(s.len() as i64) - int(1));
        rest -= &v;
        yn.set(s, v);
    }
    if rest.is_negative() {
        return Err(Error::InfeasibleParameters(format!("P = {p} too small: y^N_∅ = {rest} < 0")));
    }
    yn.set(SubsetIndex::empty(n), rest);
    Ok(yn)
}

/// Expected number of picked items, `Σ_i y_i = Σ_I |I| · y^N_I`.
pub fn objective_value(yn: &LatticeVector) -> Rational {
    yn.nonzero_entries().into_iter().fold(Rational::zero(), |acc, (s, p)| acc + p * int(s.len() as i64))
}

fn variables_check(yn: &LatticeVector, level: usize) -> Result<ConstraintCheck> {
    let adf = decompose_pseudo(yn, level)?;
    Ok(ConstraintCheck {
        label: "variables".into(),
        level,
        recipe: Some(certify_recipe(&adf, Some(&[]))?),
        oracle: is_psd_exact(&constraint_moment_matrix(None, yn, level)?)?,
    })
}

/// Certifies the constructed solution at level `n − 1` of the reduced instance:
/// `M_n(y)` through the diagonal `y^N`, and `M_{n−1}(g*y)` through the single
/// pivot `(N, ∅)` plus the exact oracle on the moment matrix.
pub fn verify_knapsack_level(n: usize, p: &Rational) -> Result<GapReport> {
    if n < 2 {
        return Err(invalid("knapsack verification needs n >= 2"));
    }
    let inst = KnapsackGapInstance::new(n, p.clone())?;
    let yn = knapsack_solution(n, p)?;
    let g = inst.constraint();
    let level = n - 1;

    let vars = variables_check(&yn, n)?;
    let zn = constraint_diagonal(&g, &yn)?;
    let adf = decompose_pseudo(&zn, level)?;
    let schedule = [(SubsetIndex::full(n), SubsetIndex::empty(n))];
    let recipe = certify_recipe(&adf, Some(&schedule))?;
    let oracle = is_psd_exact(&constraint_moment_matrix(Some(&g), &yn, level)?)?;
    let cons = ConstraintCheck { label: "cover".into(), level, recipe: Some(recipe), oracle };

    let objective = objective_value(&yn);
    let feasible = vars.is_psd() && cons.is_psd();
    let integral_optimum = int(1);
    Ok(GapReport {
        instance: inst.instance(),
        level,
        feasible,
        gap: &integral_optimum / &objective,
        objective,
        integral_optimum,
        checks: vec![vars, cons],
    })
}

/// Integral optimum of the full instance, by enumeration.
pub fn integral_optimum(inst: &KnapsackGapInstance) -> Result<Option<Rational>> {
    let mut coeffs = vec![int(1); inst.n];
    coeffs.push(int(0));
    let obj = ConstraintPolynomial::linear(inst.n + 1, &coeffs, int(0))?;
    brute_force_minimum(inst.n + 1, &obj, &[inst.lifted_constraint()?])
}

/// `y_I = y'_{I∖{n+1}}` over the ground set `[n+1]`. Takes moments or `y'^N`
/// and returns moments.
pub fn lift_solution(y_prime: &LatticeVector) -> Result<LatticeVector> {
    let y = match y_prime.kind() {
        VectorKind::Moments => y_prime.clone(),
        VectorKind::PseudoProbabilities => from_pseudo_probabilities(y_prime),
    };
    let n = y.ground_size();
    let mask = (1u32 << n) - 1;
    let dense = y.to_dense();
    let lifted = (0..1u32 << (n + 1)).map(|b| dense[(b & mask) as usize].clone()).collect();
    LatticeVector::from_dense(n + 1, VectorKind::Moments, lifted)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftCheck {
    /// `M_{t+1}(y') ⪰ 0` and `M_t(g*y') ⪰ 0` on the reduced instance.
    pub reduced_feasible: bool,
    /// `M_{t+1}(y) ⪰ 0` and `M_t(h*y) ⪰ 0` for the lifted solution.
    pub lifted_feasible: bool,
}

/// Oracle cross-check of the lift at level `t`.
pub fn verify_lift(inst: &KnapsackGapInstance, y_prime: &LatticeVector, t: usize) -> Result<LiftCheck> {
    let y_prime = match y_prime.kind() {
        VectorKind::Moments => y_prime.clone(),
        VectorKind::PseudoProbabilities => from_pseudo_probabilities(y_prime),
    };
    if y_prime.ground_size() != inst.n {
        return Err(invalid("solution and instance have different ground sizes"));
    }
    let psd = |m: &crate::matrix::RatMatrix| is_psd_exact(m).map(|c| c.is_psd());
    let reduced_feasible = psd(&moment_matrix(&y_prime, t + 1)?.data)?
        && psd(&moment_matrix(&shift(&inst.constraint(), &y_prime)?, t)?.data)?;
    let y = lift_solution(&y_prime)?;
    let lifted_feasible =
        psd(&moment_matrix(&y, t + 1)?.data)? && psd(&moment_matrix(&shift(&inst.lifted_constraint()?, &y)?, t)?.data)?;
    Ok(LiftCheck { reduced_feasible, lifted_feasible })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceBound {
    /// Trace of the matrix obtained from the `(N, ∅)` pivot.
    pub trace: Rational,
    /// `z_∅ − (2^n − 2)·y^N_∅ / P`.
    pub formula: Rational,
    pub z_empty: Rational,
    pub y_empty: Rational,
    pub oracle_psd: bool,
    /// `y^N_∅ ≤ P·z_∅ / (2^n − 2)`, required only when `oracle_psd` holds.
    pub bound_holds: bool,
}

/// Trace argument behind the small-`P` bound, evaluated on any pseudo-expectation
/// `y` (moments or `y^N`) of the reduced instance.
pub fn trace_bound_check(n: usize, p: &Rational, y: &LatticeVector) -> Result<TraceBound> {
    if n < 2 {
        return Err(invalid("trace bound needs n >= 2"));
    }
    if y.ground_size() != n {
        return Err(invalid("solution has the wrong ground size"));
    }
    let inst = KnapsackGapInstance::new(n, p.clone())?;
    let g = inst.constraint();
    let (moments, yn) = match y.kind() {
        VectorKind::Moments => (y.clone(), to_pseudo_probabilities(y)),
        VectorKind::PseudoProbabilities => (from_pseudo_probabilities(y), y.clone()),
    };
    let full = SubsetIndex::full(n);
    let empty = SubsetIndex::empty(n);

    let zn = constraint_diagonal(&g, &yn)?;
    let mut adf = decompose_pseudo(&zn, n - 1)?;
    if adf.terms.iter().all(|t| t.j != full) {
        adf.terms.push(RankOneTerm { j: full, coefficient: Rational::zero(), g_vec: g_vector(full, n - 1)? });
    }
    let mut state = PivotState::new(&adf);
    state.pivot_reduce(full, empty)?;
    let m = state.total();
    debug_assert_eq!(is_psd_exact(&m)?.verdict, is_psd_exact(&assemble(&adf))?.verdict);

    let trace = m.trace();
    let z_empty = shift(&g, &moments)?.get(empty);
    let y_empty = yn.get(empty);
    let width = pow2(n as u32) - int(2);
    let formula = &z_empty - &width * &y_empty / p;
    let oracle_psd = is_psd_exact(&m)?.is_psd();
    let bound_holds = !oracle_psd || y_empty <= p * &z_empty / &width;
    Ok(TraceBound { trace, formula, z_empty, y_empty, oracle_psd, bound_holds })
}
