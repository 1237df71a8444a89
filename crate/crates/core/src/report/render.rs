use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{CorpusReport, ScenarioReport, VerdictCounts, VerdictPercents};
use crate::changes::ChangeKind;
use crate::overlap::Grid;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unsupported report format `{0}` (expected report, grid or text)")]
    UnsupportedFormat(String),
    #[error("malformed report document: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportFormat {
    /// Structured JSON document.
    Report,
    /// Comma-separated percentage grid.
    Grid,
    /// Plain-text summary.
    Text,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Report => "json",
            ReportFormat::Grid => "csv",
            ReportFormat::Text => "txt",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "report" | "json" => Ok(ReportFormat::Report),
            "grid" | "csv" => Ok(ReportFormat::Grid),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(ReportError::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

fn grid_csv(grid: &Grid<f64>) -> String {
    let mut out = String::from("AN\\CM");
    for k in ChangeKind::CHANGED {
        let _ = write!(out, ",{k}");
    }
    out.push('\n');
    for (k, row) in ChangeKind::ALL.iter().zip(grid) {
        out.push_str(k.label());
        for x in row {
            let _ = write!(out, ",{}", percent(*x));
        }
        out.push('\n');
    }
    out
}

fn grid_table(out: &mut String, grid: &Grid<f64>) {
    let head = [
        "", "Move", "Rename", "Inline", "Extract", "ArgRen", "ArgReord", "ArgAdd", "ArgRem",
        "ArgType", "Body", "Unmatch",
    ];
    let _ = write!(out, "{:<22}", "AN \\ CM");
    for h in &head[1..] {
        let _ = write!(out, "{h:>9}");
    }
    out.push('\n');
    for (k, row) in ChangeKind::ALL.iter().zip(grid) {
        let _ = write!(out, "{:<22}", k.label());
        for x in row {
            let _ = write!(out, "{:>9}", percent(*x));
        }
        out.push('\n');
    }
}

fn verdict_line(out: &mut String, title: &str, c: Option<&VerdictCounts>, p: &VerdictPercents) {
    match c {
        Some(c) => {
            let _ = writeln!(
                out,
                "{title:<18} green {} ({})  yellow {} ({})  red {} ({})",
                c.green,
                percent(p.green),
                c.yellow,
                percent(p.yellow),
                c.red,
                percent(p.red)
            );
        }
        None => {
            let _ = writeln!(
                out,
                "{title:<18} green {}  yellow {}  red {}",
                percent(p.green),
                percent(p.yellow),
                percent(p.red)
            );
        }
    }
}

fn text(sr: &ScenarioReport) -> String {
    let mut out = String::new();
    let c = &sr.changed_subsystems;
    let _ = writeln!(out, "Scenario {}", sr.scenario_id);
    let _ = writeln!(
        out,
        "Subsystems analyzed: {}  excluded: {}",
        c.analyzed,
        sr.excluded_subsystems.len()
    );
    for e in &sr.excluded_subsystems {
        let present: Vec<String> = e.present_in.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(
            out,
            "  excluded {} (present in {})",
            e.relative_path,
            present.join(", ")
        );
    }
    let _ = writeln!(
        out,
        "Changed subsystems: AN {}  CM {}  mutual {} ({} of CM-changed)",
        c.an_changed,
        c.cm_changed,
        c.mutually_changed,
        percent(c.mutual_fraction_of_cm)
    );
    for (side, list) in [("AN", &sr.top_changed.an), ("CM", &sr.top_changed.cm)] {
        let _ = writeln!(out, "Most changed in {side}:");
        if list.is_empty() {
            out.push_str("  (none)\n");
        }
        for (i, r) in list.iter().enumerate() {
            let _ = writeln!(out, "  {}. {} ({})", i + 1, r.relative_path, r.changes);
        }
    }
    let _ = writeln!(out, "CM-changed methods: {}", sr.total_cm_changed);
    out.push_str("Overlap (share of CM-changed methods):\n");
    grid_table(&mut out, &sr.overlap_percent);
    verdict_line(
        &mut out,
        "Feasibility:",
        Some(&sr.verdict_counts),
        &sr.verdict_percents,
    );
    if let (Some(c), Some(p)) = (&sr.refined_verdict_counts, &sr.refined_verdict_percents) {
        verdict_line(&mut out, "Refined:", Some(c), p);
    }
    out
}

pub fn render_scenario(sr: &ScenarioReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Report => json(sr),
        ReportFormat::Grid => grid_csv(&sr.overlap_percent),
        ReportFormat::Text => text(sr),
    }
}

/// Render by format name.
pub fn render_report(sr: &ScenarioReport, format: &str) -> Result<String, ReportError> {
    Ok(render_scenario(sr, format.parse()?))
}

pub fn render_corpus(cr: &CorpusReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Report => json(cr),
        ReportFormat::Grid => grid_csv(&cr.mean_overlap_percent),
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "Corpus of {} scenarios ({} with CM changes): {}",
                cr.scenario_ids.len(),
                cr.averaged_scenarios,
                cr.scenario_ids.join(", ")
            );
            let _ = writeln!(
                out,
                "Mean mutual share of CM-changed subsystems: {}",
                percent(cr.mean_mutual_fraction_of_cm)
            );
            out.push_str("Mean overlap:\n");
            grid_table(&mut out, &cr.mean_overlap_percent);
            verdict_line(&mut out, "Feasibility:", None, &cr.mean_verdict_percents);
            if let Some(p) = &cr.mean_refined_verdict_percents {
                verdict_line(&mut out, "Refined:", None, p);
            }
            out
        }
    }
}

impl ScenarioReport {
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::subsystem;
    use super::super::{summarize_scenario, ScenarioReport};
    use super::*;

    #[test]
    fn percent_formatting() {
        assert_eq!(percent(0.161), "16.10%");
        assert_eq!(percent(0.0), "0.00%");
        assert_eq!(percent(1.0), "100.00%");
    }

    #[test]
    fn empty_scenario_renders() {
        let sr = summarize_scenario("empty", vec![], vec![]);
        let doc = render_scenario(&sr, ReportFormat::Report);
        assert!(doc.contains("\"schema\": \"forkdelta-report/1\""));
        assert_eq!(ScenarioReport::from_json(&doc).unwrap(), sr);
        assert_eq!(render_scenario(&sr, ReportFormat::Grid).lines().count(), 13);
        assert!(render_scenario(&sr, ReportFormat::Text).contains("CM-changed methods: 0"));
    }

    #[test]
    fn json_round_trip_keeps_full_precision() {
        let ao = "class A { void f() { a(); } void g() { b(); } void h() { c(); } }";
        let r = subsystem(
            "x",
            ao,
            ao,
            "class A { void f() { a(); z(); } void g() { b(); z(); } }",
            true,
        );
        let sr = summarize_scenario("s", vec![r], vec![]);
        assert_eq!(sr.overlap_percent[0][9], 2.0 / 3.0);
        assert_eq!(sr.overlap_percent[0][10], 1.0 / 3.0);
        let back = ScenarioReport::from_json(&render_scenario(&sr, ReportFormat::Report)).unwrap();
        assert_eq!(back, sr);
    }

    #[test]
    fn grid_header_uses_kind_labels() {
        let sr = summarize_scenario("empty", vec![], vec![]);
        let csv = render_scenario(&sr, ReportFormat::Grid);
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        assert_eq!(header[1], "Method Move");
        assert_eq!(header[11], "Unmatched");
        assert!(csv.lines().nth(11).unwrap().starts_with("Body-only,"));
    }

    #[test]
    fn unknown_format() {
        let sr = summarize_scenario("empty", vec![], vec![]);
        assert!(
            matches!(render_report(&sr, "xml"), Err(ReportError::UnsupportedFormat(f)) if f == "xml")
        );
        assert!(render_report(&sr, "text").is_ok());
    }
}
