//! End-to-end scenario analysis shared by the command line and the C bindings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::changes::{build_change_set, ChangeSet, Direction};
use crate::corpus::{assemble_scenario, ConfigError, ScenarioConfig, SubsystemTriple};
use crate::overlap::{map_change_sets, OverlapError};
use crate::report::{
    render_corpus, render_scenario, summarize_corpus, summarize_scenario, summarize_subsystem,
    MethodCounts, ReportFormat, ScenarioReport, SkippedFile, SubsystemInputs, SubsystemReport,
};
use crate::srcmodel::{
    build_inventory, InventoryError, InventoryOptions, MethodInventory, VersionLabel,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub refine_yellow: bool,
    /// Worker threads; at least 1.
    pub jobs: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            refine_yellow: false,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubsystemOutcome {
    pub report: SubsystemReport,
    pub an: ChangeSet,
    pub cm: ChangeSet,
}

/// A subsystem that could not be analyzed at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedSubsystem {
    pub relative_path: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    /// Change sets per analyzed subsystem, in report order.
    pub change_sets: Vec<(String, ChangeSet, ChangeSet)>,
    pub failed: Vec<FailedSubsystem>,
}

impl ScenarioOutcome {
    /// Some file was skipped or some subsystem failed.
    pub fn is_partial(&self) -> bool {
        !self.failed.is_empty()
            || self
                .report
                .subsystems
                .iter()
                .any(|s| !s.skipped_files.is_empty())
    }
}

fn inventory(
    cfg: &ScenarioConfig,
    t: &SubsystemTriple,
    label: VersionLabel,
) -> Result<MethodInventory, InventoryError> {
    let opts = InventoryOptions {
        extension: cfg.source_extension.clone(),
        nested_marker: Some(cfg.marker_file.clone()),
    };
    build_inventory(&t.dir(cfg.root(label)), label, &opts)
}

/// Run the three inventories, both change sets and the overlap for one subsystem.
pub fn analyze_subsystem(
    cfg: &ScenarioConfig,
    triple: &SubsystemTriple,
    refine_yellow: bool,
) -> Result<SubsystemOutcome, AnalysisError> {
    let ao = inventory(cfg, triple, VersionLabel::Ao)?;
    let an_inv = inventory(cfg, triple, VersionLabel::An)?;
    let cm_inv = inventory(cfg, triple, VersionLabel::Cm)?;
    let det = cfg.detector();
    let an = build_change_set(&ao, &an_inv, Direction::AoToAn, &det);
    let cm = build_change_set(&ao, &cm_inv, Direction::AoToCm, &det);
    let overlap = map_change_sets(&an, &cm)?;
    let mut skipped = Vec::new();
    for inv in [&ao, &an_inv, &cm_inv] {
        skipped.extend(
            inv.issues
                .iter()
                .map(|i| SkippedFile::from_issue(inv.version_label, i)),
        );
    }
    let inputs = SubsystemInputs {
        relative_path: &triple.relative_path,
        method_counts: MethodCounts {
            ao: ao.len() as u64,
            an: an_inv.len() as u64,
            cm: cm_inv.len() as u64,
        },
        an: &an,
        cm: &cm,
        overlap: &overlap,
        skipped_files: skipped,
    };
    let report = summarize_subsystem(inputs, refine_yellow);
    Ok(SubsystemOutcome { report, an, cm })
}

/// Analyze every complete subsystem of a scenario on `opts.jobs` threads.
pub fn analyze_scenario(
    cfg: &ScenarioConfig,
    opts: &AnalysisOptions,
) -> Result<ScenarioOutcome, AnalysisError> {
    let scenario = assemble_scenario(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| AnalysisError::Pool(e.to_string()))?;
    let triples: Vec<&SubsystemTriple> = scenario.analyzed().collect();
    let results: Vec<_> = pool.install(|| {
        triples
            .par_iter()
            .map(|t| {
                (
                    t.relative_path.clone(),
                    analyze_subsystem(cfg, t, opts.refine_yellow),
                )
            })
            .collect()
    });
    let mut reports = Vec::new();
    let mut change_sets = Vec::new();
    let mut failed = Vec::new();
    for (path, r) in results {
        match r {
            Ok(o) => {
                reports.push(o.report);
                change_sets.push((path, o.an, o.cm));
            }
            Err(e) => {
                log::error!("{}: subsystem {path} failed: {e}", cfg.scenario_id);
                failed.push(FailedSubsystem {
                    relative_path: path,
                    reason: e.to_string(),
                });
            }
        }
    }
    let excluded = scenario.excluded().cloned().collect();
    let report = summarize_scenario(&cfg.scenario_id, reports, excluded);
    Ok(ScenarioOutcome {
        report,
        change_sets,
        failed,
    })
}

/// File stem for a subsystem path: `/` becomes `__`, the root is `_root`.
pub fn subsystem_stem(relative_path: &str) -> String {
    if relative_path == "." {
        "_root".to_string()
    } else {
        relative_path.replace('/', "__")
    }
}

fn write(path: &Path, text: &str) -> Result<(), AnalysisError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| AnalysisError::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| AnalysisError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("analysis results always serialize");
    s.push('\n');
    s
}

/// Tab-separated: version or `-`, subsystem, file or `-`, reason.
pub fn skip_log(outcome: &ScenarioOutcome) -> String {
    let mut out = String::new();
    for s in &outcome.report.subsystems {
        for f in &s.skipped_files {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                f.version, s.relative_path, f.path, f.reason
            );
        }
    }
    for f in &outcome.failed {
        let _ = writeln!(out, "-\t{}\t-\t{}", f.relative_path, f.reason);
    }
    out
}

/// Write `<out>/<scenario_id>/` with the scenario report in every requested
/// format, one document per subsystem, both change sets and `skipped.log`.
pub fn write_scenario(
    outcome: &ScenarioOutcome,
    out: &Path,
    formats: &[ReportFormat],
) -> Result<PathBuf, AnalysisError> {
    let dir = out.join(&outcome.report.scenario_id);
    for &f in formats {
        write(
            &dir.join(format!("scenario.{}", f.extension())),
            &render_scenario(&outcome.report, f),
        )?;
    }
    for s in &outcome.report.subsystems {
        write(
            &dir.join("subsystems")
                .join(format!("{}.json", subsystem_stem(&s.relative_path))),
            &json(s),
        )?;
    }
    for (path, an, cm) in &outcome.change_sets {
        let stem = subsystem_stem(path);
        write(
            &dir.join("changesets").join(format!("{stem}.an.json")),
            &json(an),
        )?;
        write(
            &dir.join("changesets").join(format!("{stem}.cm.json")),
            &json(cm),
        )?;
    }
    write(&dir.join("skipped.log"), &skip_log(outcome))?;
    Ok(dir)
}

/// Write `<out>/corpus.<ext>` averaging the given scenarios.
pub fn write_corpus(
    reports: &[ScenarioReport],
    out: &Path,
    formats: &[ReportFormat],
) -> Result<(), AnalysisError> {
    let corpus = summarize_corpus(reports);
    for &f in formats {
        write(
            &out.join(format!("corpus.{}", f.extension())),
            &render_corpus(&corpus, f),
        )?;
    }
    Ok(())
}
