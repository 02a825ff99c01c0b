//! PSD certification: Gershgorin disks, the rank-one pivot recipe on an
//! almost-diagonal form, and an exact rational elimination oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::almost_diag::{assemble, AlmostDiagonalForm, RankOneTerm, TermClass};
use crate::error::{invalid, Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::Rational;
use crate::subset::SubsetIndex;

/// Dimension cap for [`principal_minors_psd`].
pub const MAX_MINOR_DIM: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Disk {
    pub row: usize,
    pub center: Rational,
    pub radius: Rational,
}

impl Disk {
    pub fn lower_bound(&self) -> Rational {
        &self.center - &self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GershgorinReport {
    pub disks: Vec<Disk>,
    /// Every disk lies in the closed right half-plane. Sufficient for PSD,
    /// never necessary.
    pub all_nonnegative: bool,
}

impl GershgorinReport {
    pub fn min_lower_bound(&self) -> Option<Rational> {
        self.disks.iter().map(Disk::lower_bound).min()
    }
}

pub fn gershgorin(a: &RatMatrix) -> Result<GershgorinReport> {
    if !a.is_symmetric() {
        return Err(invalid("Gershgorin report needs a symmetric matrix"));
    }
    let disks: Vec<Disk> = (0..a.rows())
        .map(|i| {
            let radius = a
                .row(i)
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Rational::zero(), |acc, (_, x)| acc + x.abs());
            Disk { row: i, center: a[(i, i)].clone(), radius }
        })
        .collect();
    let all_nonnegative = disks.iter().all(|d| d.center >= d.radius);
    Ok(GershgorinReport { disks, all_nonnegative })
}

/// One basic congruent transformation `T_S(H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotStep {
    pub h: SubsetIndex,
    pub s: SubsetIndex,
    /// Entry `g(H)_S` the term was reduced onto.
    pub pivot: Rational,
    /// `(I, m_I)`: row `I` received `m_I ×` row `S`.
    pub multipliers: Vec<(SubsetIndex, Rational)>,
    /// Working matrix right after the step (reduced term folded in).
    pub working: RatMatrix,
}

/// Working matrix plus the rank-one terms not yet reduced. At every step
/// `working + Σ c·g gᵀ` over the pending terms is congruent to the matrix
/// the state was created from.
#[derive(Clone, Debug)]
pub struct PivotState {
    pub index: Vec<SubsetIndex>,
    pub working: RatMatrix,
    pub remaining: Vec<RankOneTerm>,
    pub trace: Vec<PivotStep>,
}

impl PivotState {
    pub fn new(adf: &AlmostDiagonalForm) -> Self {
        Self {
            index: adf.index.clone(),
            working: RatMatrix::diagonal(&adf.diag),
            remaining: adf.terms.clone(),
            trace: Vec::new(),
        }
    }

    fn position(&self, s: SubsetIndex) -> Result<usize> {
        self.index
            .iter()
            .position(|&x| x == s)
            .ok_or_else(|| invalid(format!("{s} is not a row of the working matrix")))
    }

    /// Working matrix with every pending NSD term added in.
    pub fn effective(&self) -> RatMatrix {
        let mut m = self.working.clone();
        for term in self.remaining.iter().filter(|t| t.class() == TermClass::Nd) {
            m.add_rank_one(&term.coefficient, &term.g_vec);
        }
        m
    }

    /// Working matrix plus every pending term.
    pub fn total(&self) -> RatMatrix {
        let mut m = self.working.clone();
        for term in &self.remaining {
            m.add_rank_one(&term.coefficient, &term.g_vec);
        }
        m
    }

    pub fn pending(&self, h: SubsetIndex) -> Option<&RankOneTerm> {
        self.remaining.iter().find(|t| t.j == h)
    }

    pub fn pivot_reduce(&mut self, h: SubsetIndex, s: SubsetIndex) -> Result<()> {
        let k = self
            .remaining
            .iter()
            .position(|t| t.j == h)
            .ok_or_else(|| invalid(format!("term {h} is not pending (unknown or already reduced)")))?;
        let sp = self.position(s)?;
        let gs = self.remaining[k].g_vec[sp].clone();
        if gs.is_zero() {
            return Err(Error::InvalidPivot(format!("entry {s} of G({h}) is zero")));
        }
        let mult: Vec<(usize, Rational)> = self.remaining[k]
            .g_vec
            .iter()
            .enumerate()
            .filter(|(i, g)| *i != sp && !g.is_zero())
            .map(|(i, g)| (i, -(g / &gs)))
            .collect();

        // T = I + Σ m_I e_I e_Sᵀ applied as row ops then column ops.
        let w = &mut self.working;
        let dim = w.rows();
        let row_s: Vec<Rational> = w.row(sp).to_vec();
        for (i, m) in &mult {
            for j in 0..dim {
                if !row_s[j].is_zero() {
                    w[(*i, j)] += m * &row_s[j];
                }
            }
        }
        let col_s: Vec<Rational> = (0..dim).map(|i| w[(i, sp)].clone()).collect();
        for (j, m) in &mult {
            for i in 0..dim {
                if !col_s[i].is_zero() {
                    w[(i, *j)] += m * &col_s[i];
                }
            }
        }

        for term in &mut self.remaining {
            let g_s = term.g_vec[sp].clone();
            if g_s.is_zero() {
                continue;
            }
            for (i, m) in &mult {
                term.g_vec[*i] += m * &g_s;
            }
        }

        let term = self.remaining.remove(k);
        debug_assert!(term.g_vec.iter().enumerate().all(|(i, g)| i == sp || g.is_zero()));
        self.working[(sp, sp)] += &term.coefficient * &gs * &gs;

        self.trace.push(PivotStep {
            h,
            s,
            pivot: gs,
            multipliers: mult.into_iter().map(|(i, m)| (self.index[i], m)).collect(),
            working: self.working.clone(),
        });
        Ok(())
    }

    /// Pivots `(H, S)` allowed by the static rule: `S ⊆ H`, `|S| ≤ t`, and `S`
    /// not contained in any term already reduced.
    pub fn suggest_pivots(&self) -> Vec<(SubsetIndex, SubsetIndex)> {
        let reduced: Vec<SubsetIndex> = self.trace.iter().map(|st| st.h).collect();
        let mut out = Vec::new();
        for term in self.remaining.iter().filter(|t| t.class() == TermClass::Pd) {
            for &s in &self.index {
                if s.is_subset_of(term.j) && !reduced.iter().any(|l| s.is_subset_of(*l)) {
                    out.push((term.j, s));
                }
            }
        }
        out
    }
}

/// Functional form of [`PivotState::pivot_reduce`].
pub fn pivot_reduce(mut state: PivotState, h: SubsetIndex, s: SubsetIndex) -> Result<PivotState> {
    state.pivot_reduce(h, s)?;
    Ok(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Psd,
    NotPsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GershgorinRecipe,
    ExactFactorization,
}

/// Where the pivot schedule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleSource {
    Given,
    DefaultGreedy,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdCertificate {
    pub verdict: Verdict,
    pub method: Method,
    pub schedule_source: ScheduleSource,
    /// True when the Gershgorin recipe settled the verdict on its own.
    pub recipe_conclusive: bool,
    pub schedule: Vec<(SubsetIndex, SubsetIndex)>,
    pub trace: Vec<PivotStep>,
    pub row_labels: Option<Vec<SubsetIndex>>,
    /// Disks of the final recipe matrix (empty for a bare oracle run).
    pub final_disks: Vec<Disk>,
    /// Pivot order and pivot values of the exact elimination.
    pub factorization: Vec<(usize, Rational)>,
    /// `v` with `vᵀ A v < 0` when the verdict is `NotPsd`.
    pub witness: Option<Vec<Rational>>,
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == Verdict::Psd
    }
}

/// Exact PSD test by symmetric elimination with diagonal pivoting.
///
/// Pivots on the largest positive diagonal entry of the current Schur
/// complement. A negative diagonal entry, or an all-zero diagonal with a
/// nonzero off-diagonal entry, yields a witness that is carried back through
/// the eliminations so that `vᵀ A v < 0` holds on the input matrix.
///
/// The elimination runs fraction-free (Bareiss) on `L·A`, `L` the lcm of the
/// denominators. After a step with pivot `π` every stored entry is `π` times
/// the corresponding Schur complement entry, and the division by the previous
/// pivot is exact. Since every pivot is positive, signs and the ordering of
/// diagonal entries match the rational Schur complement.
pub fn is_psd_exact(a: &RatMatrix) -> Result<PsdCertificate> {
    if !a.is_symmetric() {
        return Err(invalid("exact PSD test needs a symmetric matrix"));
    }
    let n = a.rows();
    let scale = (0..n).flat_map(|i| a.row(i).iter()).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut s: Vec<Vec<BigInt>> =
        (0..n).map(|i| a.row(i).iter().map(|x| x.numer() * (&scale / x.denom())).collect()).collect();
    let mut prev = BigInt::one();
    let mut active: Vec<usize> = (0..n).collect();
    // (pivot index, rest indices, pivot row over rest, pivot entry)
    let mut steps: Vec<(usize, Vec<usize>, Vec<BigInt>, BigInt)> = Vec::new();
    let mut factorization = Vec::new();

    let local_witness: Option<Vec<Rational>> = loop {
        let k = active.len();
        if k == 0 {
            break None;
        }
        if let Some(i) = (0..k).find(|&i| s[i][i].is_negative()) {
            let mut u = vec![Rational::zero(); k];
            u[i] = Rational::one();
            break Some(u);
        }
        let best = (0..k).filter(|&i| s[i][i].is_positive()).fold(None::<usize>, |best, i| match best {
            Some(b) if s[b][b] >= s[i][i] => Some(b),
            _ => Some(i),
        });
        let Some(p) = best else {
            // Zero diagonal: PSD iff the remaining block vanishes.
            let nz = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).find(|&(i, j)| !s[i][j].is_zero());
            match nz {
                None => break None,
                Some((i, j)) => {
                    let mut u = vec![Rational::zero(); k];
                    u[i] = Rational::one();
                    u[j] = Rational::from_integer(BigInt::from(if s[i][j].is_positive() { -1 } else { 1 }));
                    break Some(u);
                }
            }
        };
        let piv = s[p][p].clone();
        let rest: Vec<usize> = (0..k).filter(|&i| i != p).collect();
        let prow: Vec<BigInt> = rest.iter().map(|&j| s[p][j].clone()).collect();
        let mut next = vec![vec![BigInt::zero(); k - 1]; k - 1];
        for (a_i, &i) in rest.iter().enumerate() {
            for (b_j, &j) in rest.iter().enumerate().skip(a_i) {
                let mut v = &piv * &s[i][j];
                if !prow[a_i].is_zero() && !prow[b_j].is_zero() {
                    v -= &prow[a_i] * &prow[b_j];
                }
                if !prev.is_one() {
                    v /= &prev;
                }
                if a_i != b_j {
                    next[b_j][a_i] = v.clone();
                }
                next[a_i][b_j] = v;
            }
        }
        factorization.push((active[p], Rational::new(piv.clone(), &prev * &scale)));
        let rest_orig: Vec<usize> = rest.iter().map(|&i| active[i]).collect();
        steps.push((active[p], rest_orig.clone(), prow, piv.clone()));
        active = rest_orig;
        prev = piv;
        s = next;
    };

    // Schur row over pivot equals stored row over stored pivot.
    let witness = local_witness.map(|u| {
        let mut v = vec![Rational::zero(); n];
        for (x, &i) in u.into_iter().zip(&active) {
            v[i] = x;
        }
        for (p, rest, prow, piv) in steps.iter().rev() {
            let dot = rest
                .iter()
                .zip(prow)
                .filter(|(_, c)| !c.is_zero())
                .fold(Rational::zero(), |acc, (&r, c)| acc + &v[r] * c);
            v[*p] = -(dot / piv);
        }
        v
    });

    Ok(PsdCertificate {
        verdict: if witness.is_some() { Verdict::NotPsd } else { Verdict::Psd },
        method: Method::ExactFactorization,
        schedule_source: ScheduleSource::None,
        recipe_conclusive: false,
        schedule: Vec::new(),
        trace: Vec::new(),
        row_labels: None,
        final_disks: Vec::new(),
        factorization,
        witness,
    })
}

/// PSD test through the signs of all principal minors; `dim ≤ 12`.
pub fn principal_minors_psd(a: &RatMatrix) -> Result<bool> {
    if !a.is_symmetric() {
        return Err(invalid("principal minor test needs a symmetric matrix"));
    }
    let n = a.rows();
    if n > MAX_MINOR_DIM {
        return Err(invalid(format!("principal minor test limited to dimension {MAX_MINOR_DIM}")));
    }
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if a.principal(&idx).determinant()?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs the Gershgorin pivot recipe on an almost-diagonal form.
///
/// With a schedule, the pivots are replayed in order. Without one, a greedy
/// strategy repeatedly picks the row with the most negative disk lower bound
/// and reduces the PSD term with the largest coefficient that touches it
/// (ties broken in graded order on `S`, then `H`). Pending NSD terms are
/// always counted in the matrix whose disks are checked. If the disks do not
/// settle the question the exact oracle decides on `assemble(adf)`.
pub fn certify_recipe(
    adf: &AlmostDiagonalForm,
    schedule: Option<&[(SubsetIndex, SubsetIndex)]>,
) -> Result<PsdCertificate> {
    let mut state = PivotState::new(adf);
    let source = match schedule {
        Some(steps) => {
            for &(h, s) in steps {
                state.pivot_reduce(h, s)?;
            }
            ScheduleSource::Given
        }
        None => {
            greedy(&mut state)?;
            ScheduleSource::DefaultGreedy
        }
    };
    let report = gershgorin(&state.effective())?;
    let schedule: Vec<_> = state.trace.iter().map(|st| (st.h, st.s)).collect();
    if report.all_nonnegative {
        return Ok(PsdCertificate {
            verdict: Verdict::Psd,
            method: Method::GershgorinRecipe,
            schedule_source: if schedule.is_empty() && source == ScheduleSource::DefaultGreedy {
                ScheduleSource::None
            } else {
                source
            },
            recipe_conclusive: true,
            schedule,
            trace: state.trace,
            row_labels: Some(adf.index.clone()),
            final_disks: report.disks,
            factorization: Vec::new(),
            witness: None,
        });
    }
    let oracle = is_psd_exact(&assemble(adf))?;
    Ok(PsdCertificate {
        verdict: oracle.verdict,
        method: Method::ExactFactorization,
        schedule_source: source,
        recipe_conclusive: false,
        schedule,
        trace: state.trace,
        row_labels: Some(adf.index.clone()),
        final_disks: report.disks,
        factorization: oracle.factorization,
        witness: oracle.witness,
    })
}

fn greedy(state: &mut PivotState) -> Result<()> {
    let mut best: Option<Rational> = None;
    let mut stalled = 0;
    loop {
        let report = gershgorin(&state.effective())?;
        if report.all_nonnegative {
            return Ok(());
        }
        let current = report.min_lower_bound().unwrap_or_else(Rational::zero);
        match &best {
            Some(b) if current <= *b => stalled += 1,
            _ => {
                stalled = 0;
                best = Some(current);
            }
        }
        if stalled >= 2 {
            return Ok(());
        }

        let mut rows: Vec<&Disk> = report.disks.iter().filter(|d| d.lower_bound().is_negative()).collect();
        rows.sort_by(|a, b| a.lower_bound().cmp(&b.lower_bound()).then(a.row.cmp(&b.row)));
        let choice = rows.iter().find_map(|d| {
            state
                .remaining
                .iter()
                .filter(|t| t.class() == TermClass::Pd && !t.g_vec[d.row].is_zero())
                .fold(None::<&RankOneTerm>, |acc, t| match acc {
                    Some(a) if a.coefficient > t.coefficient || (a.coefficient == t.coefficient && a.j < t.j) => {
                        Some(a)
                    }
                    _ => Some(t),
                })
                .map(|t| (t.j, state.index[d.row]))
        });
        let Some((h, s)) = choice else {
            return Ok(());
        };
        state.pivot_reduce(h, s)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::almost_diag::g_vector;
    use crate::rational::{frac, int};
    use crate::subset::enumerate_subsets;

    fn m(rows: &[&[Rational]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn strategy_adf() -> AlmostDiagonalForm {
        let j = SubsetIndex::from_elements(&[1, 2], 2).unwrap();
        AlmostDiagonalForm {
            n: 2,
            t: 1,
            index: enumerate_subsets(2, 1).unwrap(),
            diag: vec![int(1), frac(-1, 3), int(1)],
            terms: vec![RankOneTerm { j, coefficient: int(2), g_vec: g_vector(j, 1).unwrap() }],
        }
    }

    fn check_witness(a: &RatMatrix, cert: &PsdCertificate) {
        let v = cert.witness.as_ref().expect("witness");
        assert!(a.quadratic_form(v).unwrap().is_negative());
    }

    #[test]
    fn gershgorin_examples() {
        let adf = strategy_adf();
        let rep = gershgorin(&assemble(&adf)).unwrap();
        let got: Vec<(Rational, Rational)> = rep.disks.iter().map(|d| (d.center.clone(), d.radius.clone())).collect();
        assert_eq!(got, vec![(int(3), int(4)), (frac(5, 3), int(4)), (int(3), int(4))]);
        assert!(!rep.all_nonnegative);

        let rep = gershgorin(&RatMatrix::identity(3)).unwrap();
        assert!(rep.all_nonnegative);
        assert!(rep.disks.iter().all(|d| d.radius.is_zero() && d.center == int(1)));

        let t = m(&[
            &[frac(4, 3), frac(-1, 3), frac(1, 3)],
            &[frac(-1, 3), frac(5, 3), frac(1, 3)],
            &[frac(1, 3), frac(1, 3), frac(4, 3)],
        ]);
        let rep = gershgorin(&t).unwrap();
        assert!(rep.disks.iter().all(|d| d.radius == frac(2, 3)));
        assert!(rep.all_nonnegative);

        assert!(gershgorin(&m(&[&[int(1), int(2)], &[int(3), int(1)]])).is_err());
    }

    #[test]
    fn single_pivot_on_strategy_example() {
        // With z^N = (a, b, c, d): rows become e∅+e1, e1, e2-e1, so the
        // congruent matrix is [[a+b, b, -b], [b, b+d, -b], [-b, -b, c+b]].
        let adf = strategy_adf();
        let mut st = PivotState::new(&adf);
        let h = SubsetIndex::from_elements(&[1, 2], 2).unwrap();
        let s1 = SubsetIndex::from_elements(&[1], 2).unwrap();
        st.pivot_reduce(h, s1).unwrap();
        let b = frac(-1, 3);
        let expected = m(&[
            &[int(1) + &b, b.clone(), -b.clone()],
            &[b.clone(), int(2) + &b, -b.clone()],
            &[-b.clone(), -b.clone(), int(1) + &b],
        ]);
        assert_eq!(st.working, expected);
        assert!(st.remaining.is_empty());

        // The step is a congruence: T · assemble · Tᵀ equals the new matrix.
        let mut t = RatMatrix::identity(3);
        t[(0, 1)] = int(1);
        t[(2, 1)] = int(-1);
        assert_eq!(assemble(&adf).congruence(&t).unwrap(), expected);

        let err = st.pivot_reduce(h, s1).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn zero_pivot_is_rejected() {
        let adf = strategy_adf();
        let mut st = PivotState::new(&adf);
        let h = SubsetIndex::from_elements(&[1, 2], 2).unwrap();
        // Make G(H)_{2} zero by reducing onto {1} first in a copy of the term.
        st.remaining[0].g_vec[2] = int(0);
        let err = st.pivot_reduce(h, SubsetIndex::from_elements(&[2], 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidPivot(_)));
    }

    #[test]
    fn already_reduced_term_only_moves_its_diagonal() {
        let index = enumerate_subsets(2, 1).unwrap();
        let j = SubsetIndex::from_elements(&[1, 2], 2).unwrap();
        let adf = AlmostDiagonalForm {
            n: 2,
            t: 1,
            index: index.clone(),
            diag: vec![int(1), int(2), int(3)],
            terms: vec![RankOneTerm { j, coefficient: int(5), g_vec: vec![int(0), int(3), int(0)] }],
        };
        let mut st = PivotState::new(&adf);
        st.pivot_reduce(j, index[1]).unwrap();
        assert_eq!(st.working, RatMatrix::diagonal(&[int(1), int(2 + 45), int(3)]));
    }

    #[test]
    fn recipe_certifies_strategy_example() {
        let adf = strategy_adf();
        let cert = certify_recipe(&adf, None).unwrap();
        assert_eq!(cert.verdict, Verdict::Psd);
        assert_eq!(cert.method, Method::GershgorinRecipe);
        assert_eq!(cert.schedule.len(), 1);
        assert!(is_psd_exact(&assemble(&adf)).unwrap().is_psd());
    }

    #[test]
    fn recipe_with_only_nonnegative_parts_needs_no_pivots() {
        let mut adf = strategy_adf();
        adf.diag = vec![int(1), int(1), int(1)];
        let cert = certify_recipe(&adf, None);
        // The rank-one term pushes off-diagonal mass; the greedy run still
        // ends PSD one way or another.
        assert!(cert.unwrap().is_psd());

        adf.terms.clear();
        let cert = certify_recipe(&adf, Some(&[])).unwrap();
        assert!(cert.recipe_conclusive);
        assert!(cert.schedule.is_empty());
    }

    #[test]
    fn oracle_examples() {
        assert!(is_psd_exact(&RatMatrix::identity(4)).unwrap().is_psd());

        let a = m(&[&[int(1), int(2)], &[int(2), int(1)]]);
        let cert = is_psd_exact(&a).unwrap();
        assert_eq!(cert.verdict, Verdict::NotPsd);
        check_witness(&a, &cert);

        let a = m(&[&[int(0), int(1)], &[int(1), int(0)]]);
        let cert = is_psd_exact(&a).unwrap();
        assert_eq!(cert.witness, Some(vec![int(1), int(-1)]));
        assert_eq!(a.quadratic_form(&[int(1), int(-1)]).unwrap(), int(-2));

        assert!(is_psd_exact(&RatMatrix::zeros(3, 3)).unwrap().is_psd());
        assert!(is_psd_exact(&RatMatrix::zeros(0, 0)).unwrap().is_psd());
        assert!(is_psd_exact(&m(&[&[int(1), int(2)], &[int(0), int(1)]])).is_err());
    }

    #[test]
    fn oracle_witness_survives_eliminations() {
        // PSD leading block, indefinite trailing coupling.
        let a = m(&[&[int(4), int(2), int(0)], &[int(2), int(1), int(3)], &[int(0), int(3), int(1)]]);
        let cert = is_psd_exact(&a).unwrap();
        assert_eq!(cert.verdict, Verdict::NotPsd);
        check_witness(&a, &cert);
    }

    #[test]
    fn minors_examples() {
        assert!(principal_minors_psd(&RatMatrix::diagonal(&[int(1), int(0), int(2)])).unwrap());
        assert!(!principal_minors_psd(&RatMatrix::diagonal(&[int(1), int(-1)])).unwrap());
        assert!(principal_minors_psd(&RatMatrix::identity(13)).is_err());
    }

    #[test]
    fn suggestions_follow_static_rule() {
        let adf = strategy_adf();
        let st = PivotState::new(&adf);
        assert_eq!(st.suggest_pivots().len(), 3);
    }
}
