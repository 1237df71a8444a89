//! Per-subsystem, per-scenario and cross-scenario summaries.

mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::changes::{ChangeKind, ChangeSet};
use crate::corpus::SubsystemTriple;
use crate::feasibility::{refined_verdict, verdict, FeasibilityVerdict};
use crate::overlap::{to_percentages, Grid, OverlapMatrix, COLS, ROWS};
use crate::srcmodel::{FileIssue, VersionLabel};

pub use render::{render_corpus, render_report, render_scenario, ReportError, ReportFormat};

pub const SCHEMA: &str = "forkdelta-report/1";

pub const METHODOLOGY_NOTE: &str = "A subsystem counts as changed in a direction when at least one base method \
is not Identical there or when the descendant adds methods; additions-only subsystems are therefore counted. \
Scenario percentages are micro-averages over all variant-changed methods; corpus percentages are \
macro-averages over scenarios that have any variant change.";

const TOP_N: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodCounts {
    pub ao: u64,
    pub an: u64,
    pub cm: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub green: u64,
    pub yellow: u64,
    pub red: u64,
}

impl VerdictCounts {
    pub fn add(&mut self, v: FeasibilityVerdict) {
        match v {
            FeasibilityVerdict::Auto => self.green += 1,
            FeasibilityVerdict::Conditional => self.yellow += 1,
            FeasibilityVerdict::Manual => self.red += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.green + self.yellow + self.red
    }

    pub fn merge(&mut self, o: &VerdictCounts) {
        self.green += o.green;
        self.yellow += o.yellow;
        self.red += o.red;
    }

    pub fn fractions(&self) -> VerdictPercents {
        let t = self.total();
        if t == 0 {
            return VerdictPercents::default();
        }
        let f = |x: u64| x as f64 / t as f64;
        VerdictPercents {
            green: f(self.green),
            yellow: f(self.yellow),
            red: f(self.red),
        }
    }
}

/// Fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictPercents {
    pub green: f64,
    pub yellow: f64,
    pub red: f64,
}

/// A file skipped while building one version's inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub version: VersionLabel,
    pub path: String,
    pub reason: String,
}

impl SkippedFile {
    pub fn from_issue(version: VersionLabel, issue: &FileIssue) -> Self {
        Self {
            version,
            path: issue.path.clone(),
            reason: issue.reason.clone(),
        }
    }
}

/// Count of changes per kind, keyed by kind label, all twelve kinds present.
pub type KindCounts = BTreeMap<ChangeKind, u64>;

fn kind_counts(cs: &ChangeSet) -> KindCounts {
    ChangeKind::ALL.into_iter().zip(cs.kind_counts()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSummary {
    pub kind_counts: KindCounts,
    pub changed_methods: u64,
    pub added_methods: u64,
    pub changed: bool,
}

impl SideSummary {
    fn of(cs: &ChangeSet) -> Self {
        Self {
            kind_counts: kind_counts(cs),
            changed_methods: cs.changed_count(),
            added_methods: cs.added_in_d.len() as u64,
            changed: cs.is_changed(),
        }
    }

    /// Changed base methods plus added methods.
    pub fn activity(&self) -> u64 {
        self.changed_methods + self.added_methods
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemReport {
    pub relative_path: String,
    pub method_counts: MethodCounts,
    pub an: SideSummary,
    pub cm: SideSummary,
    pub overlap: OverlapMatrix,
    pub verdict_counts: VerdictCounts,
    pub refined_verdict_counts: Option<VerdictCounts>,
    pub skipped_files: Vec<SkippedFile>,
}

/// Inputs for one analyzed subsystem.
pub struct SubsystemInputs<'a> {
    pub relative_path: &'a str,
    pub method_counts: MethodCounts,
    pub an: &'a ChangeSet,
    pub cm: &'a ChangeSet,
    pub overlap: &'a OverlapMatrix,
    pub skipped_files: Vec<SkippedFile>,
}

/// Static verdict totals of an overlap grid.
pub fn static_verdicts(counts: &Grid<u64>) -> VerdictCounts {
    let mut v = VerdictCounts::default();
    for (r, an) in ChangeKind::ALL.into_iter().enumerate() {
        for (c, cm) in ChangeKind::CHANGED.into_iter().enumerate() {
            let n = counts[r][c];
            match verdict(an, cm).expect("variant column is never Identical") {
                FeasibilityVerdict::Auto => v.green += n,
                FeasibilityVerdict::Conditional => v.yellow += n,
                FeasibilityVerdict::Manual => v.red += n,
            }
        }
    }
    v
}

pub fn summarize_subsystem(inputs: SubsystemInputs<'_>, refine: bool) -> SubsystemReport {
    let SubsystemInputs {
        relative_path,
        method_counts,
        an,
        cm,
        overlap,
        skipped_files,
    } = inputs;
    let refined = refine.then(|| {
        let mut v = VerdictCounts::default();
        for key in overlap.cell_members.iter().flatten().flatten() {
            let r = refined_verdict(&an.changes[key], &cm.changes[key])
                .expect("mapped variant changes are never Identical");
            v.add(r);
        }
        v
    });
    SubsystemReport {
        relative_path: relative_path.to_string(),
        method_counts,
        an: SideSummary::of(an),
        cm: SideSummary::of(cm),
        overlap: overlap.clone(),
        verdict_counts: static_verdicts(&overlap.counts),
        refined_verdict_counts: refined,
        skipped_files,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangedSubsystems {
    pub analyzed: u64,
    pub an_changed: u64,
    pub cm_changed: u64,
    pub mutually_changed: u64,
    /// Mutually changed over variant-changed; zero when the variant changed nothing.
    pub mutual_fraction_of_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedSubsystem {
    pub relative_path: String,
    pub changes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopChanged {
    pub an: Vec<RankedSubsystem>,
    pub cm: Vec<RankedSubsystem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema: String,
    pub scenario_id: String,
    pub subsystems: Vec<SubsystemReport>,
    pub excluded_subsystems: Vec<SubsystemTriple>,
    pub changed_subsystems: ChangedSubsystems,
    pub top_changed: TopChanged,
    pub overlap_counts: Grid<u64>,
    pub total_cm_changed: u64,
    pub overlap_percent: Grid<f64>,
    pub verdict_counts: VerdictCounts,
    pub verdict_percents: VerdictPercents,
    pub refined_verdict_counts: Option<VerdictCounts>,
    pub refined_verdict_percents: Option<VerdictPercents>,
    pub methodology: String,
}

fn top(
    reports: &[SubsystemReport],
    side: impl Fn(&SubsystemReport) -> &SideSummary,
) -> Vec<RankedSubsystem> {
    let mut ranked: Vec<RankedSubsystem> = reports
        .iter()
        .map(|r| RankedSubsystem {
            relative_path: r.relative_path.clone(),
            changes: side(r).activity(),
        })
        .filter(|r| r.changes > 0)
        .collect();
    ranked.sort_by(|a, b| {
        b.changes
            .cmp(&a.changes)
            .then_with(|| a.relative_path.cmp(&b.relative_path))
    });
    ranked.truncate(TOP_N);
    ranked
}

/// Roll subsystem reports up into a scenario; input order does not matter.
pub fn summarize_scenario(
    scenario_id: &str,
    mut reports: Vec<SubsystemReport>,
    excluded: Vec<SubsystemTriple>,
) -> ScenarioReport {
    reports.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    let mut counts = [[0u64; COLS]; ROWS];
    let mut total = 0;
    let mut verdicts = VerdictCounts::default();
    let refine = reports.iter().any(|r| r.refined_verdict_counts.is_some());
    let mut refined = refine.then(VerdictCounts::default);
    let mut changed = ChangedSubsystems {
        analyzed: reports.len() as u64,
        ..Default::default()
    };
    for r in &reports {
        for (row, src) in counts.iter_mut().zip(&r.overlap.counts) {
            for (c, s) in row.iter_mut().zip(src) {
                *c += s;
            }
        }
        total += r.overlap.total_cm_changed;
        verdicts.merge(&r.verdict_counts);
        if let (Some(acc), Some(v)) = (refined.as_mut(), r.refined_verdict_counts.as_ref()) {
            acc.merge(v);
        }
        changed.an_changed += r.an.changed as u64;
        changed.cm_changed += r.cm.changed as u64;
        changed.mutually_changed += (r.an.changed && r.cm.changed) as u64;
    }
    if changed.cm_changed > 0 {
        changed.mutual_fraction_of_cm = changed.mutually_changed as f64 / changed.cm_changed as f64;
    }
    let mut excluded = excluded;
    excluded.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    ScenarioReport {
        schema: SCHEMA.to_string(),
        scenario_id: scenario_id.to_string(),
        top_changed: TopChanged {
            an: top(&reports, |r| &r.an),
            cm: top(&reports, |r| &r.cm),
        },
        subsystems: reports,
        excluded_subsystems: excluded,
        changed_subsystems: changed,
        overlap_counts: counts,
        total_cm_changed: total,
        overlap_percent: to_percentages(&counts, total),
        verdict_percents: verdicts.fractions(),
        verdict_counts: verdicts,
        refined_verdict_percents: refined.map(|v| v.fractions()),
        refined_verdict_counts: refined,
        methodology: METHODOLOGY_NOTE.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema: String,
    pub scenario_ids: Vec<String>,
    /// Scenarios with at least one variant change; only these enter the averages.
    pub averaged_scenarios: u64,
    pub mean_overlap_percent: Grid<f64>,
    pub mean_verdict_percents: VerdictPercents,
    pub mean_refined_verdict_percents: Option<VerdictPercents>,
    pub mean_mutual_fraction_of_cm: f64,
    pub methodology: String,
}

/// Average scenario-level fractions across scenarios.
pub fn summarize_corpus(scenarios: &[ScenarioReport]) -> CorpusReport {
    let used: Vec<&ScenarioReport> = scenarios
        .iter()
        .filter(|s| s.total_cm_changed > 0)
        .collect();
    let n = used.len() as f64;
    let mut grid = [[0.0; COLS]; ROWS];
    let mut verdicts = VerdictPercents::default();
    let refine = used.iter().any(|s| s.refined_verdict_percents.is_some());
    let mut refined = refine.then(VerdictPercents::default);
    let mut mutual = 0.0;
    for s in &used {
        for (row, src) in grid.iter_mut().zip(&s.overlap_percent) {
            for (c, x) in row.iter_mut().zip(src) {
                *c += x / n;
            }
        }
        verdicts.green += s.verdict_percents.green / n;
        verdicts.yellow += s.verdict_percents.yellow / n;
        verdicts.red += s.verdict_percents.red / n;
        if let (Some(acc), Some(v)) = (refined.as_mut(), s.refined_verdict_percents.as_ref()) {
            acc.green += v.green / n;
            acc.yellow += v.yellow / n;
            acc.red += v.red / n;
        }
        mutual += s.changed_subsystems.mutual_fraction_of_cm / n;
    }
    let mut ids: Vec<String> = scenarios.iter().map(|s| s.scenario_id.clone()).collect();
    ids.sort();
    CorpusReport {
        schema: SCHEMA.to_string(),
        scenario_ids: ids,
        averaged_scenarios: used.len() as u64,
        mean_overlap_percent: grid,
        mean_verdict_percents: verdicts,
        mean_refined_verdict_percents: refined,
        mean_mutual_fraction_of_cm: mutual,
        methodology: METHODOLOGY_NOTE.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changes::{build_change_set, DetectorConfig, Direction};
    use crate::overlap::map_change_sets;
    use crate::srcmodel::MethodInventory;

    pub(crate) fn subsystem(
        path: &str,
        ao: &str,
        an: &str,
        cm: &str,
        refine: bool,
    ) -> SubsystemReport {
        let inv = |l, s: &str| MethodInventory::from_sources(l, [("A.java", s)]);
        let (ao, an, cm) = (
            inv(VersionLabel::Ao, ao),
            inv(VersionLabel::An, an),
            inv(VersionLabel::Cm, cm),
        );
        let cfg = DetectorConfig::default();
        let a = build_change_set(&ao, &an, Direction::AoToAn, &cfg);
        let c = build_change_set(&ao, &cm, Direction::AoToCm, &cfg);
        let m = map_change_sets(&a, &c).unwrap();
        let counts = MethodCounts {
            ao: ao.len() as u64,
            an: an.len() as u64,
            cm: cm.len() as u64,
        };
        summarize_subsystem(
            SubsystemInputs {
                relative_path: path,
                method_counts: counts,
                an: &a,
                cm: &c,
                overlap: &m,
                skipped_files: vec![],
            },
            refine,
        )
    }

    const AO: &str = "class A { void f() { a(); } void g() { b(); } }";

    #[test]
    fn untouched_subsystem() {
        let r = subsystem("x", AO, AO, AO, true);
        assert!(!r.an.changed && !r.cm.changed);
        assert_eq!(r.verdict_counts.total(), 0);
        assert_eq!(r.refined_verdict_counts, Some(VerdictCounts::default()));
    }

    #[test]
    fn variant_body_change_is_green() {
        let r = subsystem(
            "x",
            AO,
            AO,
            "class A { void f() { a(); z(); } void g() { b(); } }",
            false,
        );
        assert_eq!(
            r.verdict_counts,
            VerdictCounts {
                green: 1,
                yellow: 0,
                red: 0
            }
        );
        assert!(r.cm.changed && !r.an.changed);
        assert_eq!(r.refined_verdict_counts, None);
    }

    #[test]
    fn yellow_cells_refine() {
        let same = "class A { void f() { a(); z(); } void g() { b(); } }";
        let r = subsystem("x", AO, same, same, true);
        assert_eq!(
            r.verdict_counts,
            VerdictCounts {
                green: 0,
                yellow: 1,
                red: 0
            }
        );
        assert_eq!(
            r.refined_verdict_counts,
            Some(VerdictCounts {
                green: 1,
                yellow: 0,
                red: 0
            })
        );
        let r = subsystem(
            "x",
            AO,
            same,
            "class A { void f() { a(); y(); } void g() { b(); } }",
            true,
        );
        assert_eq!(
            r.refined_verdict_counts,
            Some(VerdictCounts {
                green: 0,
                yellow: 0,
                red: 1
            })
        );
    }

    #[test]
    fn single_subsystem_scenario_equals_subsystem() {
        let r = subsystem("x", AO, AO, "class A { void f() { a(); z(); } }", false);
        let s = summarize_scenario("s", vec![r.clone()], vec![]);
        assert_eq!(s.overlap_counts, r.overlap.counts);
        assert_eq!(s.verdict_counts, r.verdict_counts);
        assert_eq!(s.changed_subsystems.cm_changed, 1);
        assert_eq!(s.changed_subsystems.mutually_changed, 0);
        assert!(
            (s.verdict_percents.green + s.verdict_percents.yellow + s.verdict_percents.red - 1.0)
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn aggregation_sums_and_ranks() {
        let r1 = subsystem(
            "b",
            AO,
            AO,
            "class A { void f() { a(); z(); } void g() { b(); } }",
            false,
        );
        let r2 = subsystem(
            "a",
            AO,
            "class A { void g() { b(); } }",
            "class A { void f() { a(); } }",
            false,
        );
        let r3 = subsystem("c", AO, AO, AO, false);
        let s = summarize_scenario("s", vec![r1.clone(), r2.clone(), r3.clone()], vec![]);
        let t = summarize_scenario("s", vec![r3, r2.clone(), r1.clone()], vec![]);
        assert_eq!(s, t);
        let mut sum = r1.overlap.clone();
        sum.merge(&r2.overlap);
        assert_eq!(s.overlap_counts, sum.counts);
        assert_eq!(s.total_cm_changed, 2);
        assert_eq!(s.changed_subsystems.mutually_changed, 1);
        assert_eq!(s.changed_subsystems.mutual_fraction_of_cm, 0.5);
        let names: Vec<_> = s
            .top_changed
            .cm
            .iter()
            .map(|r| r.relative_path.as_str())
            .collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(s.top_changed.an.len(), 1);
    }

    #[test]
    fn corpus_macro_average() {
        let r1 = subsystem(
            "x",
            AO,
            AO,
            "class A { void f() { a(); z(); } void g() { b(); } }",
            false,
        );
        let r2 = subsystem("x", AO, AO, "class A { }", false);
        let s1 = summarize_scenario("one", vec![r1], vec![]);
        let s2 = summarize_scenario("two", vec![r2], vec![]);
        let empty = summarize_scenario("zero", vec![], vec![]);
        let c = summarize_corpus(&[s1, s2, empty]);
        assert_eq!(c.averaged_scenarios, 2);
        assert_eq!(c.scenario_ids, ["one", "two", "zero"]);
        assert_eq!(
            c.mean_verdict_percents,
            VerdictPercents {
                green: 0.5,
                yellow: 0.0,
                red: 0.5
            }
        );
    }
}
