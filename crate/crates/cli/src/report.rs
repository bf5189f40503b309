//! Report formats: JSON (machine), markdown (human) and CSV (curve traces).
//!
//! Field order is fixed by the struct definitions and maps are ordered, so
//! identical inputs give byte-identical output. Non-finite numbers become
//! `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ngp_cert_core::certifier::SweepReport;
use ngp_cert_core::potential::HypothesisStatus;
use ngp_cert_core::{CurveTrace, Evidence, HypothesisReport, PotentialSpec, SonicData, SpeedVerdict};
use serde::Serialize;

use crate::CliError;

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictJson {
    pub c: Option<f64>,
    pub status: &'static str,
    pub route: &'static str,
    pub sigma: Option<Vec<Option<f64>>>,
    pub ell: Option<f64>,
    pub grid_margin: Option<f64>,
    pub assumptions: Vec<String>,
}

impl From<&SpeedVerdict> for VerdictJson {
    fn from(v: &SpeedVerdict) -> Self {
        Self {
            c: finite(v.c),
            status: v.status.as_str(),
            route: v.route.as_str(),
            sigma: v.sigma().map(|s| s.iter().copied().map(finite).collect()),
            ell: v.ell.and_then(finite),
            grid_margin: v.grid_margin().and_then(finite),
            assumptions: v.assumptions.iter().map(|a| a.describe()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelJson {
    pub kind: &'static str,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    pub sonic_speed: Option<f64>,
    pub hypotheses: BTreeMap<&'static str, &'static str>,
}

pub fn status_name(s: HypothesisStatus) -> &'static str {
    match s {
        HypothesisStatus::Pass => "pass",
        HypothesisStatus::Fail => "fail",
        HypothesisStatus::NotApplicable => "not-applicable",
    }
}

impl ModelJson {
    pub fn new(spec: &PotentialSpec, sonic: SonicData, hypotheses: &HypothesisReport) -> Self {
        Self {
            kind: spec.kind.name(),
            dim: spec.dim,
            params: spec.params.clone(),
            sonic_speed: sonic.c_s.and_then(finite),
            hypotheses: hypotheses.entries().into_iter().map(|(k, h)| (k, status_name(h.status))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepJson {
    pub model: ModelJson,
    pub verdicts: Vec<VerdictJson>,
    pub certified_intervals: Vec<[Option<f64>; 2]>,
}

impl SweepJson {
    pub fn new(spec: &PotentialSpec, report: &SweepReport) -> Self {
        Self {
            model: ModelJson::new(spec, report.sonic, &report.hypotheses),
            verdicts: report.verdicts.iter().map(VerdictJson::from).collect(),
            certified_intervals: report.certified_intervals.iter().map(|(lo, hi)| [finite(*lo), finite(*hi)]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceJson {
    pub j: usize,
    pub c: Option<f64>,
    pub ell_estimate: Option<f64>,
    pub ell_error: Option<f64>,
    pub branch_agreement: Option<f64>,
    pub samples: Vec<SampleRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

impl From<&CurveTrace> for TraceJson {
    fn from(tr: &CurveTrace) -> Self {
        Self {
            j: tr.j,
            c: finite(tr.c),
            ell_estimate: finite(tr.ell_estimate),
            ell_error: finite(tr.ell_error),
            branch_agreement: finite(tr.branch_agreement),
            samples: tr
                .samples
                .iter()
                .map(|s| SampleRow {
                    t: s.t,
                    gamma_plus: s.gamma_plus,
                    gamma_minus: s.gamma_minus,
                    residual_plus: s.residual_plus,
                    residual_minus: s.residual_minus,
                })
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// One row per sample: `t, gamma_plus, gamma_minus, residual_plus, residual_minus`.
pub fn trace_csv(trace: &CurveTrace) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in TraceJson::from(trace).samples {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        Some(v) => format!("{v}"),
        None => "-".into(),
    }
}

fn sci(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.3e}"),
        Some(v) => format!("{v}"),
        None => "-".into(),
    }
}

fn model_section(out: &mut String, spec: &PotentialSpec, sonic: SonicData, hypotheses: &HypothesisReport) {
    let params: Vec<String> = spec.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(out, "## Model\n");
    let _ = writeln!(out, "- kind: `{}`, dimension {}", spec.kind.name(), spec.dim);
    if !params.is_empty() {
        let _ = writeln!(out, "- parameters: {}", params.join(", "));
    }
    let _ = writeln!(out, "- sonic speed: {}", sonic.c_s.map_or("undefined".into(), |c| format!("{c:.6}")));
    let _ = writeln!(out, "\n| hypothesis | status | note |\n|---|---|---|");
    for (name, h) in hypotheses.entries() {
        let _ = writeln!(out, "| {name} | {} | {} |", status_name(h.status), h.note);
    }
    out.push('\n');
}

fn evidence_note(v: &SpeedVerdict) -> String {
    match &v.evidence {
        Some(Evidence::Sigma(cert)) => {
            let s: Vec<String> = cert.sigma.iter().map(|x| format!("{x:.4}")).collect();
            format!("sigma = ({})", s.join(", "))
        }
        Some(Evidence::EllEquality(r)) => {
            let s: Vec<String> = r.ells.iter().map(|x| format!("{x:.6}")).collect();
            format!("slice limits ({})", s.join(", "))
        }
        Some(Evidence::ClosedForm(check)) => format!("{} (margin {})", check.check, sci(Some(check.margin))),
        None => String::new(),
    }
}

fn verdict_table(out: &mut String, verdicts: &[SpeedVerdict]) {
    let _ = writeln!(out, "| c | status | route | ell | grid margin | evidence |\n|---|---|---|---|---|---|");
    for v in verdicts {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            num(Some(v.c)),
            v.status.as_str(),
            v.route.as_str(),
            num(v.ell),
            sci(v.grid_margin()),
            evidence_note(v)
        );
    }
    out.push('\n');
}

fn notes_section(out: &mut String, verdicts: &[SpeedVerdict]) {
    let mut assumptions: Vec<String> =
        verdicts.iter().filter(|v| v.is_certified()).flat_map(|v| v.assumptions.iter().map(|a| a.describe())).collect();
    assumptions.sort();
    assumptions.dedup();
    if !assumptions.is_empty() {
        let _ = writeln!(out, "## Assumptions behind certified verdicts\n");
        for a in assumptions {
            let _ = writeln!(out, "- {a}");
        }
        out.push('\n');
    }
    let noted: Vec<&SpeedVerdict> = verdicts.iter().filter(|v| !v.diagnostics.is_empty()).collect();
    if !noted.is_empty() {
        let _ = writeln!(out, "## Diagnostics\n");
        for v in noted {
            for d in &v.diagnostics {
                let _ = writeln!(out, "- c = {}: {d}", num(Some(v.c)));
            }
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "Certified verdicts are numerical: the sufficient conditions were checked on finite grids, \
         not proven for almost every frequency."
    );
}

pub fn sweep_markdown(spec: &PotentialSpec, report: &SweepReport) -> String {
    let mut out = String::from("# Sweep report\n\n");
    model_section(&mut out, spec, report.sonic, &report.hypotheses);
    let _ = writeln!(out, "## Verdicts\n");
    verdict_table(&mut out, &report.verdicts);
    let _ = writeln!(out, "## Certified intervals\n");
    if report.certified_intervals.is_empty() {
        let _ = writeln!(out, "none\n");
    } else {
        for (lo, hi) in &report.certified_intervals {
            let _ = writeln!(out, "- [{}, {}]", num(Some(*lo)), num(Some(*hi)));
        }
        out.push('\n');
    }
    notes_section(&mut out, &report.verdicts);
    out
}

pub fn analyze_markdown(spec: &PotentialSpec, sonic: SonicData, hyp: &HypothesisReport, v: &SpeedVerdict) -> String {
    let mut out = String::from("# Speed report\n\n");
    model_section(&mut out, spec, sonic, hyp);
    let _ = writeln!(out, "## Verdict\n");
    verdict_table(&mut out, std::slice::from_ref(v));
    notes_section(&mut out, std::slice::from_ref(v));
    out
}

pub fn trace_markdown(trace: &CurveTrace) -> String {
    let mut out = format!("# Curve trace, axis {} at c = {}\n\n", trace.j, num(Some(trace.c)));
    let _ = writeln!(
        out,
        "- extrapolated ell: {} (last-step change {})\n- branch agreement: {}\n",
        num(Some(trace.ell_estimate)),
        sci(Some(trace.ell_error)),
        sci(Some(trace.branch_agreement))
    );
    let _ = writeln!(out, "| t | gamma+ | gamma- | residual+ | residual- |\n|---|---|---|---|---|");
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "| {:.3e} | {:.9e} | {:.9e} | {:.2e} | {:.2e} |",
            s.t, s.gamma_plus, s.gamma_minus, s.residual_plus, s.residual_minus
        );
    }
    out
}
