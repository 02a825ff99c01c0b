use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use lasserre_core::almost_diag::{self, AlmostDiagonalForm};
use lasserre_core::gap::mkp::find_check;
use lasserre_core::gap::{
    build_mkp, build_schedule, find_min_feasible_p, knapsack_solution, mkp_uniform_solution, replay_reference,
    schedule_solution, verify_knapsack_level, verify_mkp, verify_schedule, GapReport, Instance, KnapsackGapInstance,
};
use lasserre_core::io;
use lasserre_core::lattice::LatticeVector;
use lasserre_core::psd::{
    certify_recipe, gershgorin, is_psd_exact, Disk, Method, PivotState, PsdCertificate, ScheduleSource, Verdict,
};
use lasserre_core::rational::{format_rational, Rational};
use lasserre_core::subset::SubsetIndex;
use serde_json::{json, Value};

use crate::{
    CertifyArgs, DecomposeArgs, Failure, GapCommand, GapOutput, Outcome, ReplayArgs, EXIT_NOT_PSD, EXIT_ORACLE_ONLY,
    EXIT_PSD,
};

type CmdResult = Result<Outcome, Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::parse)?;
    io::parse(&text).map_err(|e| Failure::parse(anyhow!("{}: {e}", path.display())))
}

/// Writes `v` to `out`, or to stdout when no path is given.
fn emit(v: &Value, out: Option<&PathBuf>, outcome: &mut Outcome) -> Result<(), Failure> {
    let text = io::pretty(v);
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::invalid)?;
            outcome.outputs.push(path.clone());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn write_csv(path: &PathBuf, header: &[&str], rows: Vec<Vec<String>>, outcome: &mut Outcome) -> Result<(), Failure> {
    let write = || -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    };
    write().with_context(|| format!("cannot write {}", path.display())).map_err(Failure::invalid)?;
    outcome.outputs.push(path.clone());
    Ok(())
}

fn disk_rows(disks: &[Disk], labels: Option<&[SubsetIndex]>) -> Vec<Vec<String>> {
    disks
        .iter()
        .map(|d| {
            let row = labels.map_or_else(|| d.row.to_string(), |l| l[d.row].to_string());
            let lb = d.lower_bound();
            vec![
                row,
                format_rational(&d.center),
                format_rational(&d.radius),
                format_rational(&lb),
                (lb >= Rational::from_integer(0.into())).to_string(),
            ]
        })
        .collect()
}

const DISK_HEADER: [&str; 5] = ["row", "center", "radius", "lower_bound", "nonnegative"];

/// Relaxation solution of a built instance. For the multiple-knapsack family
/// the uniform solution of level `level − 1` is used, so that `level` is the
/// level of its variable matrix.
fn instance_solution(inst: &Instance, level: usize) -> Result<LatticeVector, Failure> {
    Ok(match inst {
        Instance::Knapsack { n, p } => knapsack_solution(*n, p)?,
        Instance::Mkp { knapsacks, items_per, eps, cap } => {
            let m = build_mkp(*knapsacks, *items_per, eps.clone(), cap.clone())?;
            let t = level.checked_sub(1).ok_or_else(|| Failure::invalid(anyhow!("mkp instances need --level >= 1")))?;
            mkp_uniform_solution(&m, t)?
        }
        Instance::Schedule { n, k, p } => schedule_solution(&build_schedule(*n, k, p)?)?,
    })
}

pub fn decompose(a: &DecomposeArgs) -> CmdResult {
    let w = match (&a.source.input, &a.source.instance) {
        (Some(path), _) => io::lattice_from_json(&read_json(path)?)?,
        (None, Some(path)) => instance_solution(&io::instance_from_json(&read_json(path)?)?, a.level)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    let adf = almost_diag::decompose(&w, a.level)?;
    let mut outcome = Outcome::default();
    emit(&io::adf_to_json(&adf), a.out.as_ref(), &mut outcome)?;
    outcome.verdicts.insert("terms".into(), json!(adf.terms.len()));
    outcome.verdicts.insert("dim".into(), json!(adf.dim()));
    Ok(outcome)
}

fn certificate_code(c: &PsdCertificate) -> u8 {
    if !c.is_psd() {
        EXIT_NOT_PSD
    } else if c.recipe_conclusive {
        EXIT_PSD
    } else {
        EXIT_ORACLE_ONLY
    }
}

/// Disks of the schedule-pivoted form with pending NSD terms counted; no
/// greedy pivots and no oracle.
fn gershgorin_only_adf(
    adf: &AlmostDiagonalForm,
    schedule: &[(SubsetIndex, SubsetIndex)],
) -> Result<PsdCertificate, Failure> {
    let mut state = PivotState::new(adf);
    for &(h, s) in schedule {
        state.pivot_reduce(h, s)?;
    }
    let report = gershgorin(&state.effective())?;
    let cert = PsdCertificate {
        verdict: if report.all_nonnegative { Verdict::Psd } else { Verdict::NotPsd },
        method: Method::GershgorinRecipe,
        schedule_source: if schedule.is_empty() { ScheduleSource::None } else { ScheduleSource::Given },
        recipe_conclusive: report.all_nonnegative,
        schedule: schedule.to_vec(),
        trace: state.trace,
        row_labels: Some(adf.index.clone()),
        final_disks: report.disks,
        factorization: Vec::new(),
        witness: None,
    };
    Ok(cert)
}

/// In Gershgorin-only mode a failing disk proves nothing, so the payload
/// carries `gershgorin_pass` instead of a verdict.
fn gershgorin_payload(c: &PsdCertificate, trace: bool) -> Value {
    let mut v = io::certificate_to_json(c, trace);
    let obj = v.as_object_mut().expect("certificate is an object");
    obj.remove("verdict");
    obj.remove("factorization");
    obj.remove("witness");
    obj.insert("mode".into(), json!("gershgorin-only"));
    obj.insert("gershgorin_pass".into(), json!(c.recipe_conclusive));
    v
}

pub fn certify(a: &CertifyArgs) -> CmdResult {
    let mut outcome = Outcome::default();
    let (payload, disks, labels, code) = if let Some(path) = &a.source.adf {
        let adf = io::adf_from_json(&read_json(path)?)?;
        let schedule = match &a.schedule {
            Some(p) => Some(io::schedule_from_json(&read_json(p)?, adf.n)?),
            None => None,
        };
        if a.gershgorin_only {
            let cert = gershgorin_only_adf(&adf, schedule.as_deref().unwrap_or(&[]))?;
            let pass = cert.recipe_conclusive;
            outcome.verdicts.insert("gershgorin_pass".into(), json!(pass));
            (
                gershgorin_payload(&cert, a.trace),
                cert.final_disks,
                Some(adf.index.clone()),
                if pass { EXIT_PSD } else { EXIT_NOT_PSD },
            )
        } else {
            let cert = certify_recipe(&adf, schedule.as_deref())?;
            outcome.verdicts.insert("verdict".into(), serde_json::to_value(cert.verdict).expect("enum"));
            outcome.verdicts.insert("recipe_conclusive".into(), json!(cert.recipe_conclusive));
            let code = certificate_code(&cert);
            (io::certificate_to_json(&cert, a.trace), cert.final_disks, Some(adf.index.clone()), code)
        }
    } else {
        let path = a.source.matrix.as_ref().expect("clap requires one source");
        if a.schedule.is_some() {
            return Err(Failure::invalid(anyhow!("--schedule needs an almost-diagonal form (--adf)")));
        }
        let (m, labels) = io::matrix_from_json(&read_json(path)?)?;
        let report = gershgorin(&m)?;
        if a.gershgorin_only {
            let pass = report.all_nonnegative;
            let cert = PsdCertificate {
                verdict: Verdict::Psd,
                method: Method::GershgorinRecipe,
                schedule_source: ScheduleSource::None,
                recipe_conclusive: pass,
                schedule: Vec::new(),
                trace: Vec::new(),
                row_labels: labels.clone(),
                final_disks: report.disks.clone(),
                factorization: Vec::new(),
                witness: None,
            };
            outcome.verdicts.insert("gershgorin_pass".into(), json!(pass));
            (gershgorin_payload(&cert, a.trace), report.disks, labels, if pass { EXIT_PSD } else { EXIT_NOT_PSD })
        } else {
            let mut cert = is_psd_exact(&m)?;
            cert.row_labels = labels.clone();
            cert.final_disks = report.disks.clone();
            outcome.verdicts.insert("verdict".into(), serde_json::to_value(cert.verdict).expect("enum"));
            let code = if cert.is_psd() { EXIT_PSD } else { EXIT_NOT_PSD };
            (io::certificate_to_json(&cert, a.trace), report.disks, labels, code)
        }
    };
    emit(&payload, a.out.as_ref(), &mut outcome)?;
    if let Some(csv) = &a.csv {
        write_csv(csv, &DISK_HEADER, disk_rows(&disks, labels.as_deref()), &mut outcome)?;
    }
    outcome.code = code;
    Ok(outcome)
}

fn gap_summary(r: &GapReport) -> Vec<Vec<String>> {
    r.checks
        .iter()
        .map(|c| {
            let method = |cert: &PsdCertificate| {
                serde_json::to_value(cert.method).expect("enum").as_str().unwrap_or("").to_string()
            };
            vec![
                c.label.clone(),
                c.level.to_string(),
                c.is_psd().to_string(),
                c.recipe.as_ref().map_or(String::new(), |r| r.recipe_conclusive.to_string()),
                c.recipe.as_ref().map_or(String::new(), method),
            ]
        })
        .collect()
}

fn finish_gap(
    report: &GapReport,
    required: &Rational,
    mut payload: Value,
    output: &GapOutput,
    mut outcome: Outcome,
) -> CmdResult {
    payload["required_gap"] = json!(format_rational(required));
    emit(&payload, output.out.as_ref(), &mut outcome)?;
    if let Some(csv) = &output.csv {
        write_csv(
            csv,
            &["label", "level", "psd", "recipe_conclusive", "recipe_method"],
            gap_summary(report),
            &mut outcome,
        )?;
    }
    let ok = report.feasible && &report.gap >= required;
    outcome.verdicts.insert("feasible".into(), json!(report.feasible));
    outcome.verdicts.insert("gap".into(), json!(format_rational(&report.gap)));
    outcome.code = if ok { EXIT_PSD } else { EXIT_NOT_PSD };
    Ok(outcome)
}

pub fn gap(cmd: &GapCommand) -> CmdResult {
    let outcome = Outcome::default();
    match cmd {
        GapCommand::Knapsack { n, k, output } => {
            let inst = KnapsackGapInstance::with_gap_factor(*n, k)?;
            let report = verify_knapsack_level(*n, &inst.p)?;
            let payload = io::report_to_json(&report, output.trace);
            finish_gap(&report, k, payload, output, outcome)
        }
        GapCommand::Mkp { eps, cap, knapsacks, items_per, level, no_reference, min_gap, output } => {
            let inst = build_mkp(*knapsacks, *items_per, eps.clone(), cap.clone())?;
            let report = verify_mkp(&inst, *level, !no_reference)?;
            let payload = io::report_to_json(&report, output.trace);
            finish_gap(&report, min_gap, payload, output, outcome)
        }
        GapCommand::Schedule { n, k, p, find_min_p, output } => {
            let mut outcome = outcome;
            let (p, search) = match (p, find_min_p) {
                (Some(p), false) => (p.clone(), None),
                (None, true) => {
                    let s = find_min_feasible_p(*n, k)?;
                    outcome.verdicts.insert("p_star".into(), json!(s.p_star.to_string()));
                    (Rational::from_integer(s.p_star.clone()), Some(s))
                }
                _ => return Err(Failure::invalid(anyhow!("give either --p or --find-min-p"))),
            };
            let inst = build_schedule(*n, k, &p)?;
            let report = verify_schedule(&inst)?;
            let mut payload = io::report_to_json(&report, output.trace);
            if let Some(s) = search {
                payload["search"] = json!({
                    "p_star": s.p_star.to_string(),
                    "evaluations": s.evaluations.iter()
                        .map(|(p, ok)| json!({ "p": p.to_string(), "feasible": ok }))
                        .collect::<Vec<_>>(),
                });
            }
            finish_gap(&report, k, payload, output, outcome)
        }
    }
}

/// Exit 0 when the trace matches the reference and the final disks certify
/// every row, 4 when only the exact oracle shows feasibility, 1 otherwise.
pub fn replay(a: &ReplayArgs) -> CmdResult {
    let r = replay_reference(&a.eps)?;
    let mut outcome = Outcome::default();
    emit(&io::replay_to_json(&r), a.out.as_ref(), &mut outcome)?;
    if let Some(csv) = &a.csv {
        write_csv(csv, &DISK_HEADER, disk_rows(&r.disks.disks, Some(&r.index)), &mut outcome)?;
    }
    let recipe_ok = r.trace_matches() && r.disks.all_nonnegative;
    outcome.verdicts.insert("trace_matches".into(), json!(r.trace_matches()));
    outcome.verdicts.insert("gershgorin_pass".into(), json!(r.disks.all_nonnegative));
    outcome.verdicts.insert("feasible".into(), json!(r.report.feasible));
    if let Some(c) = find_check(&r.report, "cover-1") {
        outcome.verdicts.insert("cover_1_recipe_conclusive".into(), json!(c.recipe_conclusive));
    }
    outcome.code = match (r.report.feasible, recipe_ok) {
        (false, _) => EXIT_NOT_PSD,
        (true, true) => EXIT_PSD,
        (true, false) => EXIT_ORACLE_ONLY,
    };
    Ok(outcome)
}
