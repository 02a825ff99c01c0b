//! Min-sum of tardy jobs with `n` blocks of `n` unit-cost jobs. Jobs of block
//! `i` take time `P^i`; the covering constraint at the `ℓ`-th deadline is
//! `Σ_{i≤ℓ} Σ_j P^i x_{ij} ≥ D_ℓ` with `D_ℓ = Σ_{j≤ℓ} P^{j−1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::mkp::uniform_solution;
use super::{brute_force_minimum, constraint_moment_matrix, ConstraintCheck, GapReport, Instance};
use crate::almost_diag::decompose_pseudo;
use crate::error::{invalid, Error, Result};
use crate::lattice::{ConstraintPolynomial, LatticeVector};
use crate::moment::constraint_diagonal;
use crate::psd::{certify_recipe, is_psd_exact};
use crate::rational::{int, Rational};

/// Largest job count handled at desk scale.
pub const MAX_JOBS: usize = 25;

/// Upper end of the doubling search for `P`.
pub const MAX_SEARCH_P: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleInstance {
    pub n: usize,
    pub k: Rational,
    pub p: Rational,
    /// Relaxation level; the objective cap is `t + 1 = n / k`.
    pub t: usize,
}

impl ScheduleInstance {
    pub fn jobs(&self) -> usize {
        self.n * self.n
    }

    pub fn cap(&self) -> usize {
        self.t + 1
    }

    /// 1-based element of job `j` in block `i` (both 1-based).
    pub fn element(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n + j
    }

    /// `D_1, …, D_n`.
    pub fn demands(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.n);
        let mut acc = Rational::zero();
        let mut pw = Rational::one();
        for _ in 0..self.n {
            acc += &pw;
            pw *= &self.p;
            out.push(acc.clone());
        }
        out
    }

    /// `d_i = n·Σ_{j≤i} P^j − Σ_{j≤i} P^{j−1}`.
    pub fn deadlines(&self) -> Vec<Rational> {
        let demands = self.demands();
        let n = int(self.n as i64);
        (0..self.n).map(|i| &n * &self.p * &demands[i] - &demands[i]).collect()
    }

    /// `(t + 1) − Σ x`.
    pub fn cardinality(&self) -> ConstraintPolynomial {
        let n = self.jobs();
        ConstraintPolynomial::linear(n, &vec![int(-1); n], int(self.cap() as i64)).expect("ground size checked")
    }

    /// Covering constraint `ℓ` (1-based) divided by `P^ℓ`.
    pub fn covering(&self, l: usize) -> ConstraintPolynomial {
        let demand = &self.demands()[l - 1];
        let mut coeffs = vec![Rational::zero(); self.jobs()];
        let mut pw = Rational::one();
        for i in 1..=l {
            pw *= &self.p;
            for j in 1..=self.n {
                coeffs[self.element(i, j) - 1] = pw.clone();
            }
        }
        let scale = pw.recip();
        ConstraintPolynomial::linear(self.jobs(), &coeffs, -demand.clone()).expect("ground size checked").scaled(&scale)
    }

    /// Covering constraint `ℓ` without the `1/P^ℓ` scaling.
    pub fn covering_unscaled(&self, l: usize) -> ConstraintPolynomial {
        let pw = (0..l).fold(Rational::one(), |acc, _| acc * &self.p);
        self.covering(l).scaled(&pw)
    }

    pub fn instance(&self) -> Instance {
        Instance::Schedule { n: self.n, k: self.k.clone(), p: self.p.clone() }
    }

    /// Fewest tardy jobs meeting every deadline, by enumeration (`n² ≤ 20`).
    pub fn integral_optimum(&self) -> Result<Option<Rational>> {
        let n = self.jobs();
        let obj = ConstraintPolynomial::linear(n, &vec![int(1); n], int(0))?;
        let cover: Vec<_> = (1..=self.n).map(|l| self.covering(l)).collect();
        brute_force_minimum(n, &obj, &cover)
    }
}

pub fn build_schedule(n: usize, k: &Rational, p: &Rational) -> Result<ScheduleInstance> {
    if n == 0 || n * n > MAX_JOBS {
        return Err(invalid(format!("schedule instance needs 1 <= n*n <= {MAX_JOBS}")));
    }
    if *k < Rational::one() {
        return Err(invalid("gap factor k must be at least 1"));
    }
    if *p <= Rational::one() {
        return Err(invalid("P must exceed 1"));
    }
    let ratio = int(n as i64) / k;
    if !ratio.is_integer() {
        return Err(invalid(format!("n / k = {ratio} is not an integer")));
    }
    let t = ratio.to_integer().to_string().parse::<usize>().map_err(|e| invalid(e.to_string()))? - 1;
    Ok(ScheduleInstance { n, k: k.clone(), p: p.clone(), t })
}

/// Uniform `y^N_I = 1/|P_{t+1}(N)|` on `|I| ≤ t + 1`.
pub fn schedule_solution(inst: &ScheduleInstance) -> Result<LatticeVector> {
    uniform_solution(inst.jobs(), inst.t)
}

fn covering_psd(inst: &ScheduleInstance, yn: &LatticeVector, l: usize) -> Result<crate::psd::PsdCertificate> {
    is_psd_exact(&constraint_moment_matrix(Some(&inst.covering(l)), yn, inst.t)?)
}

/// Checks the uniform solution at level `t`: `M_{t+1}(y)` through its
/// diagonal form, the cardinality constraint through its almost-diagonal
/// form, and every covering constraint with the exact oracle.
pub fn verify_schedule(inst: &ScheduleInstance) -> Result<GapReport> {
    let yn = schedule_solution(inst)?;
    let t = inst.t;
    let mut checks = Vec::new();

    let vars = decompose_pseudo(&yn, t + 1)?;
    checks.push(ConstraintCheck {
        label: "variables".into(),
        level: t + 1,
        recipe: Some(certify_recipe(&vars, Some(&[]))?),
        oracle: is_psd_exact(&constraint_moment_matrix(None, &yn, t + 1)?)?,
    });
    let card = inst.cardinality();
    let adf = decompose_pseudo(&constraint_diagonal(&card, &yn)?, t)?;
    checks.push(ConstraintCheck {
        label: "cardinality".into(),
        level: t,
        recipe: Some(certify_recipe(&adf, Some(&[]))?),
        oracle: is_psd_exact(&constraint_moment_matrix(Some(&card), &yn, t)?)?,
    });
    for l in 1..=inst.n {
        checks.push(ConstraintCheck {
            label: format!("cover-{l}"),
            level: t,
            recipe: None,
            oracle: covering_psd(inst, &yn, l)?,
        });
    }
    let integral_optimum = int(inst.n as i64);
    let cap = int(inst.cap() as i64);
    let feasible = checks.iter().all(ConstraintCheck::is_psd);
    Ok(GapReport {
        instance: inst.instance(),
        level: t,
        feasible,
        gap: &integral_optimum / &cap,
        objective: cap,
        integral_optimum,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PSearch {
    pub p_star: BigInt,
    /// Every `(P, all covering constraints PSD)` evaluated, in order.
    pub evaluations: Vec<(BigInt, bool)>,
}

/// Smallest integer `P ≥ 2` at which all covering matrices are oracle-PSD.
/// Doubles from 2 until a passing `P`, then bisects between the last failure
/// and the first success. The bisection assumes the verdict is monotone in
/// `P` on that bracket.
pub fn find_min_feasible_p(n: usize, k: &Rational) -> Result<PSearch> {
    let base = build_schedule(n, k, &int(2))?;
    let yn = schedule_solution(&base)?;
    let mut evaluations = Vec::new();
    let mut passes = |p: &BigInt| -> Result<bool> {
        let inst = ScheduleInstance { p: Rational::from_integer(p.clone()), ..base.clone() };
        let mut ok = true;
        for l in 1..=inst.n {
            if !covering_psd(&inst, &yn, l)?.is_psd() {
                ok = false;
                break;
            }
        }
        evaluations.push((p.clone(), ok));
        Ok(ok)
    };

    let mut hi = BigInt::from(2);
    let mut lo = BigInt::one();
    while !passes(&hi)? {
        lo = hi.clone();
        hi *= 2;
        if hi > BigInt::from(MAX_SEARCH_P) {
            return Err(Error::InfeasibleParameters(format!("no feasible P up to {MAX_SEARCH_P}")));
        }
    }
    // Invariant: lo fails (or is 1), hi passes.
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        if passes(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PSearch { p_star: hi, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn demands_and_alpha() {
        let inst = build_schedule(4, &int(2), &int(3)).unwrap();
        assert_eq!(inst.demands(), vec![int(1), int(4), int(13), int(40)]);
        assert_eq!(inst.t, 1);
        let yn = schedule_solution(&inst).unwrap();
        assert_eq!(yn.support_len(), 137);
        assert_eq!(yn.nonzero_entries()[0].1, frac(1, 137));
    }

    #[test]
    fn deadlines_small() {
        let inst = build_schedule(2, &int(1), &int(3)).unwrap();
        // d_1 = 2·3 − 1, d_2 = 2·(3 + 9) − (1 + 3).
        assert_eq!(inst.deadlines(), vec![int(5), int(20)]);
    }

    #[test]
    fn bad_parameters() {
        assert!(build_schedule(4, &int(3), &int(3)).is_err());
        assert!(build_schedule(6, &int(2), &int(3)).is_err());
        assert!(build_schedule(4, &int(2), &int(1)).is_err());
    }

    #[test]
    fn integral_optimum_is_n() {
        for n in 2..=4 {
            let inst = build_schedule(n, &int(1), &int(3)).unwrap();
            assert_eq!(inst.integral_optimum().unwrap(), Some(int(n as i64)));
        }
    }

    #[test]
    fn scaling_keeps_verdict() {
        let inst = build_schedule(2, &int(1), &int(5)).unwrap();
        let yn = schedule_solution(&inst).unwrap();
        for l in 1..=2 {
            let a = is_psd_exact(&constraint_moment_matrix(Some(&inst.covering(l)), &yn, inst.t).unwrap()).unwrap();
            let b = is_psd_exact(&constraint_moment_matrix(Some(&inst.covering_unscaled(l)), &yn, inst.t).unwrap())
                .unwrap();
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn small_search_terminates() {
        let res = find_min_feasible_p(2, &int(2)).unwrap();
        let inst = build_schedule(2, &int(2), &Rational::from_integer(res.p_star.clone())).unwrap();
        assert!(verify_schedule(&inst).unwrap().feasible);
    }
}
