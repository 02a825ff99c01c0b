//! JSON interchange. Rationals are written as `"p/q"` strings and read from
//! strings or integers; subsets are written as `"{1,3}"`. Objects are built
//! as `serde_json::Value`, whose maps keep keys sorted.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::almost_diag::{AlmostDiagonalForm, RankOneTerm};
use crate::error::{Error, Result};
use crate::gap::mkp::ReplayReport;
use crate::gap::{ConstraintCheck, GapReport, Instance};
use crate::lattice::{ConstraintPolynomial, LatticeVector, VectorKind};
use crate::matrix::RatMatrix;
use crate::moment::MomentMatrix;
use crate::psd::{Disk, PivotStep, PsdCertificate};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::subset::{enumerate_subsets, SubsetIndex};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))
}

/// Pretty JSON with a trailing newline.
pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

fn matrix(m: &RatMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| rats(m.row(i))).collect())
}

fn subset(s: SubsetIndex) -> Value {
    Value::String(s.to_string())
}

fn read_rational(v: &Value, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(perr(format!("{what}: expected a rational string or integer"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field '{key}'")))
}

fn read_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| perr(format!("field '{key}' must be a nonnegative integer")))
}

fn read_subset(v: &Value, n: usize) -> Result<SubsetIndex> {
    let s = v.as_str().ok_or_else(|| perr("subset must be a string like \"{1,3}\""))?;
    SubsetIndex::parse(s, n).map_err(|e| perr(e.to_string()))
}

fn read_matrix(v: &Value) -> Result<RatMatrix> {
    let rows = v.as_array().ok_or_else(|| perr("'rows' must be an array"))?;
    let data = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| perr("matrix row must be an array"))?
                .iter()
                .map(|x| read_rational(x, "matrix entry"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = RatMatrix::from_rows(data).map_err(|e| perr(e.to_string()))?;
    if !m.is_square() {
        return Err(perr("matrix must be square"));
    }
    Ok(m)
}

pub fn lattice_to_json(w: &LatticeVector) -> Value {
    let entries: Map<String, Value> = w.nonzero_entries().into_iter().map(|(s, r)| (s.to_string(), rat(&r))).collect();
    json!({ "n": w.ground_size(), "kind": kind_name(w.kind()), "entries": entries })
}

fn kind_name(k: VectorKind) -> &'static str {
    match k {
        VectorKind::Moments => "moments",
        VectorKind::PseudoProbabilities => "pseudo_probabilities",
    }
}

/// `{n, kind, entries: {"{1}": "1/2", …}}`; missing entries are zero and
/// `kind` defaults to moments.
pub fn lattice_from_json(v: &Value) -> Result<LatticeVector> {
    let n = read_usize(v, "n")?;
    let kind = match v.get("kind").and_then(Value::as_str) {
        None | Some("moments") => VectorKind::Moments,
        Some("pseudo_probabilities") => VectorKind::PseudoProbabilities,
        Some(other) => return Err(perr(format!("unknown kind '{other}'"))),
    };
    let entries = field(v, "entries")?.as_object().ok_or_else(|| perr("'entries' must be an object"))?;
    let parsed = entries
        .iter()
        .map(|(k, x)| {
            let s = SubsetIndex::parse(k, n).map_err(|e| perr(e.to_string()))?;
            Ok((s, read_rational(x, k)?))
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeVector::from_entries(n, kind, parsed).map_err(|e| perr(e.to_string()))
}

/// `{n, coefficients: {"{}": "-1/4", "{1}": "1", …}}`.
pub fn polynomial_from_json(v: &Value) -> Result<ConstraintPolynomial> {
    let n = read_usize(v, "n")?;
    let mut g = ConstraintPolynomial::new(n).map_err(|e| perr(e.to_string()))?;
    let coeffs = field(v, "coefficients")?.as_object().ok_or_else(|| perr("'coefficients' must be an object"))?;
    for (k, x) in coeffs {
        g.set(SubsetIndex::parse(k, n).map_err(|e| perr(e.to_string()))?, read_rational(x, k)?);
    }
    Ok(g)
}

pub fn polynomial_to_json(g: &ConstraintPolynomial) -> Value {
    let n = g.ground_size();
    let coeffs: Map<String, Value> =
        g.terms().map(|(b, c)| (SubsetIndex::new(b, n).expect("term in ground").to_string(), rat(c))).collect();
    json!({ "n": n, "coefficients": coeffs })
}

pub fn moment_matrix_to_json(m: &MomentMatrix) -> Value {
    json!({
        "n": m.n,
        "t": m.t,
        "order": m.index.iter().map(|&s| subset(s)).collect::<Vec<_>>(),
        "rows": matrix(&m.data),
    })
}

/// A symmetric matrix from `{rows}`; `order` (subset labels) is optional and,
/// when present, must match the row count.
pub fn matrix_from_json(v: &Value) -> Result<(RatMatrix, Option<Vec<SubsetIndex>>)> {
    let m = read_matrix(field(v, "rows")?)?;
    if !m.is_symmetric() {
        return Err(perr("matrix must be symmetric"));
    }
    let labels = match v.get("order") {
        None => None,
        Some(order) => {
            let n = read_usize(v, "n")?;
            let arr = order.as_array().ok_or_else(|| perr("'order' must be an array"))?;
            if arr.len() != m.rows() {
                return Err(perr("'order' length differs from the matrix size"));
            }
            Some(arr.iter().map(|x| read_subset(x, n)).collect::<Result<Vec<_>>>()?)
        }
    };
    Ok((m, labels))
}

/// `{n, t, diag: {"{1}": "1/2", …}, terms: [{J, coeff, support: [["{}", "-1"], …]}]}`.
pub fn adf_to_json(adf: &AlmostDiagonalForm) -> Value {
    let diag: Map<String, Value> = adf.index.iter().zip(&adf.diag).map(|(s, d)| (s.to_string(), rat(d))).collect();
    let terms: Vec<Value> = adf
        .terms
        .iter()
        .map(|t| {
            let support: Vec<Value> = adf
                .index
                .iter()
                .zip(&t.g_vec)
                .filter(|(_, g)| !g.is_zero())
                .map(|(s, g)| json!([subset(*s), rat(g)]))
                .collect();
            json!({ "J": subset(t.j), "coeff": rat(&t.coefficient), "support": support })
        })
        .collect();
    json!({ "n": adf.n, "t": adf.t, "diag": diag, "terms": terms })
}

pub fn adf_from_json(v: &Value) -> Result<AlmostDiagonalForm> {
    let n = read_usize(v, "n")?;
    let t = read_usize(v, "t")?;
    let index = enumerate_subsets(n, t)?;
    let pos: BTreeMap<SubsetIndex, usize> = index.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let locate = |x: &Value| -> Result<usize> {
        let s = read_subset(x, n)?;
        pos.get(&s).copied().ok_or_else(|| perr(format!("{s} is not in P_t")))
    };
    let mut diag = vec![Rational::zero(); index.len()];
    for (k, x) in field(v, "diag")?.as_object().ok_or_else(|| perr("'diag' must be an object"))? {
        diag[locate(&Value::String(k.clone()))?] = read_rational(x, k)?;
    }
    let mut terms = Vec::new();
    for tv in field(v, "terms")?.as_array().ok_or_else(|| perr("'terms' must be an array"))? {
        let j = read_subset(field(tv, "J")?, n)?;
        if j.len() <= t {
            return Err(Error::InvalidArgument(format!("term {j} has |J| <= t = {t}")));
        }
        let coefficient = read_rational(field(tv, "coeff")?, "coeff")?;
        let mut g_vec = vec![Rational::zero(); index.len()];
        for pair in field(tv, "support")?.as_array().ok_or_else(|| perr("'support' must be an array"))? {
            match pair.as_array().map(Vec::as_slice) {
                Some([s, x]) => g_vec[locate(s)?] = read_rational(x, "support")?,
                _ => return Err(perr("support entries must be [subset, rational] pairs")),
            }
        }
        terms.push(RankOneTerm { j, coefficient, g_vec });
    }
    Ok(AlmostDiagonalForm { n, t, index, diag, terms })
}

/// `[{"H": "{1,2}", "S": "{}"}, …]`.
pub fn schedule_from_json(v: &Value, n: usize) -> Result<Vec<(SubsetIndex, SubsetIndex)>> {
    v.as_array()
        .ok_or_else(|| perr("schedule must be an array"))?
        .iter()
        .map(|step| Ok((read_subset(field(step, "H")?, n)?, read_subset(field(step, "S")?, n)?)))
        .collect()
}

pub fn schedule_to_json(s: &[(SubsetIndex, SubsetIndex)]) -> Value {
    Value::Array(s.iter().map(|&(h, s)| json!({ "H": subset(h), "S": subset(s) })).collect())
}

fn row_label(labels: Option<&[SubsetIndex]>, i: usize) -> Value {
    match labels {
        Some(l) => subset(l[i]),
        None => json!(i),
    }
}

fn disk(labels: Option<&[SubsetIndex]>, d: &Disk) -> Value {
    json!({ "row": row_label(labels, d.row), "center": rat(&d.center), "radius": rat(&d.radius) })
}

fn step(st: &PivotStep) -> Value {
    let mult: Map<String, Value> = st.multipliers.iter().map(|(s, m)| (s.to_string(), rat(m))).collect();
    json!({
        "H": subset(st.h),
        "S": subset(st.s),
        "pivot": rat(&st.pivot),
        "multipliers": mult,
        "working": matrix(&st.working),
    })
}

/// Certificate payload; the pivot trace is included only on request.
pub fn certificate_to_json(c: &PsdCertificate, with_trace: bool) -> Value {
    let labels = c.row_labels.as_deref();
    let mut obj = json!({
        "verdict": serde_json::to_value(c.verdict).expect("enum"),
        "method": serde_json::to_value(c.method).expect("enum"),
        "schedule_source": serde_json::to_value(c.schedule_source).expect("enum"),
        "recipe_conclusive": c.recipe_conclusive,
        "schedule": schedule_to_json(&c.schedule),
        "final_disks": c.final_disks.iter().map(|d| disk(labels, d)).collect::<Vec<_>>(),
        "factorization": c.factorization.iter()
            .map(|(r, p)| json!({ "row": row_label(labels, *r), "pivot": rat(p) }))
            .collect::<Vec<_>>(),
        "witness": c.witness.as_ref().map(|w| rats(w)),
    });
    if with_trace {
        obj["trace"] = Value::Array(c.trace.iter().map(step).collect());
    }
    obj
}

pub fn instance_to_json(i: &Instance) -> Value {
    serde_json::to_value(i).expect("instance serializes")
}

pub fn instance_from_json(v: &Value) -> Result<Instance> {
    serde_json::from_value(v.clone()).map_err(|e| perr(format!("invalid instance: {e}")))
}

fn check(c: &ConstraintCheck, with_trace: bool) -> Value {
    json!({
        "label": c.label,
        "level": c.level,
        "psd": c.is_psd(),
        "recipe": c.recipe.as_ref().map(|r| certificate_to_json(r, with_trace)),
        "oracle": certificate_to_json(&c.oracle, false),
    })
}

pub fn report_to_json(r: &GapReport, with_trace: bool) -> Value {
    json!({
        "instance": instance_to_json(&r.instance),
        "level": r.level,
        "feasible": r.feasible,
        "gap": rat(&r.gap),
        "objective": rat(&r.objective),
        "integral_optimum": rat(&r.integral_optimum),
        "certificates": r.checks.iter().map(|c| check(c, with_trace)).collect::<Vec<_>>(),
    })
}

pub fn replay_to_json(r: &ReplayReport) -> Value {
    let labels = Some(r.index.as_slice());
    json!({
        "eps": rat(&r.eps),
        "alpha": rat(&r.alpha),
        "steps": r.steps.iter().map(matrix).collect::<Vec<_>>(),
        "nd_sum": matrix(&r.nd_sum),
        "final": matrix(&r.final_matrix),
        "final_disks": r.disks.disks.iter().map(|d| disk(labels, d)).collect::<Vec<_>>(),
        "gershgorin_pass": r.disks.all_nonnegative,
        "boundary_rows": r.boundary_rows().into_iter().map(subset).collect::<Vec<_>>(),
        "trace_matches": r.trace_matches(),
        "nd_matches": r.nd_matches,
        "mismatches": r.mismatches.iter().map(|m| json!({
            "stage": m.stage,
            "row": subset(m.row),
            "col": subset(m.col),
            "expected": rat(&m.expected),
            "actual": rat(&m.actual),
        })).collect::<Vec<_>>(),
        "report": report_to_json(&r.report, false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::almost_diag::decompose;
    use crate::psd::{certify_recipe, is_psd_exact};
    use crate::rational::{frac, int};

    fn sample() -> LatticeVector {
        let s = |e: &[usize]| SubsetIndex::from_elements(e, 2).unwrap();
        LatticeVector::from_entries(
            2,
            VectorKind::Moments,
            [(s(&[]), int(1)), (s(&[1]), frac(1, 2)), (s(&[2]), frac(1, 2)), (s(&[1, 2]), frac(1, 4))],
        )
        .unwrap()
    }

    #[test]
    fn lattice_roundtrip() {
        let w = sample();
        let v = lattice_to_json(&w);
        assert_eq!(v["entries"]["{1}"], "1/2");
        assert_eq!(lattice_from_json(&v).unwrap(), w);
    }

    #[test]
    fn integers_accepted_and_bad_rationals_rejected() {
        let v = parse(r#"{"n": 1, "entries": {"{}": 1, "{1}": "1/3"}}"#).unwrap();
        assert_eq!(lattice_from_json(&v).unwrap().get(SubsetIndex::empty(1)), int(1));
        let v = parse(r#"{"n": 1, "entries": {"{}": "1/0"}}"#).unwrap();
        assert!(matches!(lattice_from_json(&v), Err(Error::Parse(_))));
        assert!(matches!(parse("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn adf_roundtrip() {
        let adf = decompose(&sample(), 1).unwrap();
        let v = adf_to_json(&adf);
        let back = adf_from_json(&v).unwrap();
        assert_eq!(back.diag, adf.diag);
        assert_eq!(back.terms, adf.terms);
        assert_eq!(v["terms"][0]["J"], "{1,2}");
    }

    #[test]
    fn keys_are_sorted() {
        let adf = decompose(&sample(), 1).unwrap();
        let text = pretty(&certificate_to_json(&certify_recipe(&adf, None).unwrap(), true));
        let keys: Vec<&str> =
            text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn matrix_input() {
        let v = parse(r#"{"rows": [["1", "2"], ["2", "1"]]}"#).unwrap();
        let (m, labels) = matrix_from_json(&v).unwrap();
        assert!(labels.is_none());
        assert!(!is_psd_exact(&m).unwrap().is_psd());
        let v = parse(r#"{"rows": [["1", "2"], ["3", "1"]]}"#).unwrap();
        assert!(matrix_from_json(&v).is_err());
    }

    #[test]
    fn instance_shape() {
        let i = Instance::Knapsack { n: 3, p: int(256) };
        let v = instance_to_json(&i);
        assert_eq!(v["family"], "knapsack");
        assert_eq!(v["params"]["p"], "256/1");
        assert_eq!(instance_from_json(&v).unwrap(), i);
    }

    #[test]
    fn schedule_roundtrip() {
        let s = vec![(SubsetIndex::from_elements(&[1, 2], 2).unwrap(), SubsetIndex::empty(2))];
        assert_eq!(schedule_from_json(&schedule_to_json(&s), 2).unwrap(), s);
    }
}
