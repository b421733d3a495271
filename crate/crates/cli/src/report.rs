//! Run reports and their human, structured (JSON) and CSV renderings.

use std::fmt::Write as _;

use galilean_core::audit::{TolerancePolicy, Verdict};
use serde::{Deserialize, Serialize};

use crate::config::{Expectation, Format, ScenarioConfig};

/// Schema version of the structured report.
pub const REPORT_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `residual ≤ tolerance`.
    AtMost,
    /// Passes when `residual ≥ tolerance`.
    AtLeast,
}

/// One elementary comparison: a relation, an identity, a membership test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub name: String,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub comparison: Comparison,
    pub verdict: Verdict,
}

impl Element {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual: Some(residual),
            tolerance: Some(tolerance),
            comparison: Comparison::AtMost,
            verdict: Verdict::from_residual(residual, tolerance),
        }
    }

    pub fn at_least(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual: Some(residual),
            tolerance: Some(tolerance),
            comparison: Comparison::AtLeast,
            verdict: if residual >= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    pub fn not_applicable(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: None,
            tolerance: None,
            comparison: Comparison::AtMost,
            verdict: Verdict::NotApplicable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    ExpectedFail,
    Fail,
    NotApplicable,
}

impl CheckVerdict {
    pub fn name(self) -> &'static str {
        match self {
            CheckVerdict::Pass => "pass",
            CheckVerdict::ExpectedFail => "expected-fail",
            CheckVerdict::Fail => "fail",
            CheckVerdict::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverallVerdict {
    Pass,
    ExpectedFail,
    Fail,
}

impl OverallVerdict {
    pub fn name(self) -> &'static str {
        match self {
            OverallVerdict::Pass => "pass",
            OverallVerdict::ExpectedFail => "expected-fail",
            OverallVerdict::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            OverallVerdict::Pass | OverallVerdict::ExpectedFail => 0,
            OverallVerdict::Fail => 1,
        }
    }

    /// Pass when every check passes or does not apply; expected-fail when
    /// the only deviations are the declared ones.
    pub fn combine(checks: &[CheckReport]) -> Self {
        if checks.iter().any(|c| c.verdict == CheckVerdict::Fail) {
            OverallVerdict::Fail
        } else if checks.iter().any(|c| c.verdict == CheckVerdict::ExpectedFail) {
            OverallVerdict::ExpectedFail
        } else {
            OverallVerdict::Pass
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub kind: String,
    pub expect: Expectation,
    pub verdict: CheckVerdict,
    /// Labels or element names that failed.
    pub observed_failures: Vec<String>,
    pub elements: Vec<Element>,
    /// Check-specific data: spectra, orders, convergence inputs.
    pub details: serde_json::Value,
}

impl CheckReport {
    pub fn failing_elements(&self) -> Vec<String> {
        self.elements
            .iter()
            .filter(|e| e.verdict == Verdict::Fail)
            .map(|e| e.name.clone())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub galilean_core: String,
    pub galilean_cli: String,
    pub report_format: u32,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            galilean_core: galilean_core::VERSION.to_string(),
            galilean_cli: env!("CARGO_PKG_VERSION").to_string(),
            report_format: REPORT_FORMAT,
        }
    }
}

/// Every threshold a verdict in the report depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancesUsed {
    /// Audit policy after the global scale is applied.
    pub audit: TolerancePolicy,
    pub tol_scale: f64,
    pub scalar_label: f64,
    pub nullspace_threshold: f64,
    pub rounding_floor_per_dim: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub versions: Versions,
    pub tolerances: TolerancesUsed,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub checks: Vec<CheckReport>,
    pub verdict: OverallVerdict,
}

impl RunReport {
    pub fn element_count(&self) -> usize {
        self.checks.iter().map(|c| c.elements.len()).sum()
    }
}

pub fn to_structured(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

pub fn from_structured(text: &str) -> serde_json::Result<RunReport> {
    serde_json::from_str(text)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:e}"))
}

const CSV_HEADER: [&str; 8] = [
    "scenario",
    "check",
    "kind",
    "element",
    "residual",
    "tolerance",
    "comparison",
    "verdict",
];

fn csv_rows<'a>(
    w: &mut csv::Writer<Vec<u8>>,
    scenario: &str,
    checks: impl Iterator<Item = &'a CheckReport>,
) -> csv::Result<()> {
    for c in checks {
        for e in &c.elements {
            w.write_record([
                scenario,
                &c.id,
                &c.kind,
                &e.name,
                &opt(e.residual),
                &opt(e.tolerance),
                match e.comparison {
                    Comparison::AtMost => "at_most",
                    Comparison::AtLeast => "at_least",
                },
                e.verdict.name(),
            ])?;
        }
    }
    Ok(())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// One row per element of every check.
pub fn to_csv(report: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    csv_rows(&mut w, &report.scenario, report.checks.iter()).expect("in-memory write");
    finish_csv(w)
}

/// Rows of a single check.
pub fn check_csv(report: &RunReport, check: &CheckReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    csv_rows(&mut w, &report.scenario, std::iter::once(check)).expect("in-memory write");
    finish_csv(w)
}

pub fn to_human(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario  {}", report.scenario);
    if let Some(d) = &report.config.description {
        let _ = writeln!(out, "          {d}");
    }
    let _ = writeln!(
        out,
        "seed      {}    tol-scale {}    wall-clock {:.2} s",
        report.seed, report.tolerances.tol_scale, report.wall_clock_seconds
    );
    let width = report
        .checks
        .iter()
        .flat_map(|c| c.elements.iter().map(|e| e.name.chars().count()))
        .max()
        .unwrap_or(8)
        .max(8);
    for c in &report.checks {
        let _ = writeln!(out, "\n[{}] {}  →  {}", c.kind, c.id, c.verdict.name());
        if !c.observed_failures.is_empty() {
            let _ = writeln!(out, "  failing: {}", c.observed_failures.join(", "));
        }
        for e in &c.elements {
            let op = match e.comparison {
                Comparison::AtMost => "≤",
                Comparison::AtLeast => "≥",
            };
            let res = e.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
            let tol = e.tolerance.map_or_else(|| "-".to_string(), |t| format!("{t:.1e}"));
            let _ = writeln!(
                out,
                "  {:<width$}  {:>10} {op} {:<8}  {}",
                e.name,
                res,
                tol,
                e.verdict.name()
            );
        }
    }
    let _ = writeln!(out, "\noverall   {}", report.verdict.name());
    out
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Human => to_human(report),
        Format::Structured => to_structured(report),
        Format::Csv => to_csv(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(verdict: CheckVerdict) -> CheckReport {
        CheckReport {
            id: "c".to_string(),
            kind: "k".to_string(),
            expect: Expectation::Pass,
            verdict,
            observed_failures: Vec::new(),
            elements: vec![Element::at_most("e", 1e-9, 1e-8), Element::at_least("d", 0.7, 0.5)],
            details: serde_json::Value::Null,
        }
    }

    #[test]
    fn overall_verdict_rules() {
        use CheckVerdict::*;
        assert_eq!(OverallVerdict::combine(&[check(Pass), check(NotApplicable)]), OverallVerdict::Pass);
        assert_eq!(
            OverallVerdict::combine(&[check(Pass), check(ExpectedFail)]),
            OverallVerdict::ExpectedFail
        );
        assert_eq!(OverallVerdict::combine(&[check(ExpectedFail), check(Fail)]), OverallVerdict::Fail);
        assert_eq!(OverallVerdict::Fail.exit_code(), 1);
        assert_eq!(OverallVerdict::ExpectedFail.exit_code(), 0);
    }

    #[test]
    fn element_comparisons() {
        assert_eq!(Element::at_most("a", 2.0, 1.0).verdict, Verdict::Fail);
        assert_eq!(Element::at_least("a", 2.0, 1.0).verdict, Verdict::Pass);
        assert_eq!(Element::at_least("a", 0.2, 1.0).verdict, Verdict::Fail);
    }
}
