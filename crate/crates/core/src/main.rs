use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use forkdelta::analysis::{analyze_scenario, write_corpus, write_scenario, AnalysisOptions};
use forkdelta::changes::{build_change_set, ChangeKind, ChangeSet, DetectorConfig, Direction};
use forkdelta::corpus::ScenarioConfig;
use forkdelta::feasibility::{render_grid, tally, MATRIX};
use forkdelta::mutagen::{apply_plan, score_detection, MutationPlan};
use forkdelta::report::ReportFormat;
use forkdelta::srcmodel::{build_inventory, InventoryOptions, VersionLabel};

const LOG_ENV: &str = "FORKDELTA_LOG";
const EXPECTED_FILE: &str = "expected.changeset.json";

#[derive(Parser)]
#[command(
    name = "forkdelta",
    version,
    about = "Three-way method-level change analysis"
)]
struct Cli {
    /// error, warn, info or debug; FORKDELTA_LOG takes precedence.
    #[arg(long, global = true, default_value = "warn")]
    log: LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one or more comparison scenarios.
    Analyze(AnalyzeArgs),
    /// Print the feasibility matrix.
    Matrix {
        /// grid (comma-separated letters) or report (JSON).
        #[arg(long, default_value = "grid")]
        format: String,
    },
    /// Apply a mutation plan to its seed tree.
    Mutate {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run the detector on seed vs. mutated tree and print per-kind scores.
        #[arg(long)]
        score: bool,
    },
    /// Score a detected change set against an expected one.
    Score(ScoreArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Scenario file; repeat for a multi-scenario corpus.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// report, grid or text; repeatable.
    #[arg(long, value_delimiter = ',', default_value = "report")]
    format: Vec<String>,
    /// Body similarity needed to pair methods (overrides the config).
    #[arg(long)]
    sim_threshold: Option<f64>,
    /// Containment needed to call a method inlined or extracted.
    #[arg(long)]
    inline_threshold: Option<f64>,
    /// File that marks a subsystem directory.
    #[arg(long)]
    marker: Option<String>,
    /// Source file extension.
    #[arg(long)]
    ext: Option<String>,
    /// Resolve conditional verdicts per method pair.
    #[arg(long)]
    refine_yellow: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    expected: PathBuf,
    /// Detected change set document.
    #[arg(long, conflicts_with_all = ["base", "derived"])]
    actual: Option<PathBuf>,
    /// Detect from this base tree...
    #[arg(long, requires = "derived")]
    base: Option<PathBuf>,
    /// ...against this descendant tree.
    #[arg(long, requires = "base")]
    derived: Option<PathBuf>,
    #[arg(long, default_value = ".java")]
    ext: String,
}

type Failure = Box<dyn std::error::Error>;

fn init_logging(level: LevelFilter) {
    let mut b = env_logger::Builder::new();
    b.filter_level(level).format_timestamp(None);
    if let Ok(spec) = std::env::var(LOG_ENV) {
        b.parse_filters(&spec);
    }
    let _ = b.try_init();
}

fn formats(names: &[String]) -> Result<Vec<ReportFormat>, Failure> {
    let mut out: Vec<ReportFormat> = names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn analyze(a: &AnalyzeArgs) -> Result<ExitCode, Failure> {
    let fmts = formats(&a.format)?;
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    let opts = AnalysisOptions {
        refine_yellow: a.refine_yellow,
        jobs,
    };
    let mut configs = Vec::new();
    for path in &a.config {
        let mut cfg = ScenarioConfig::load(path)?;
        if let Some(s) = a.sim_threshold {
            cfg.sim_threshold = s;
        }
        if let Some(i) = a.inline_threshold {
            cfg.inline_threshold = i;
        }
        if let Some(m) = &a.marker {
            cfg.marker_file = m.clone();
        }
        if let Some(e) = &a.ext {
            cfg.source_extension = if e.starts_with('.') {
                e.clone()
            } else {
                format!(".{e}")
            };
        }
        cfg.validate()?;
        configs.push(cfg);
    }
    let mut partial = false;
    let mut reports = Vec::new();
    for cfg in &configs {
        let outcome = analyze_scenario(cfg, &opts)?;
        let dir = write_scenario(&outcome, &a.out, &fmts)?;
        let r = &outcome.report;
        println!(
            "{}: {} subsystems analyzed, {} excluded, {} variant-changed methods -> {}",
            r.scenario_id,
            r.subsystems.len(),
            r.excluded_subsystems.len(),
            r.total_cm_changed,
            dir.display()
        );
        if outcome.is_partial() {
            eprintln!(
                "warning: {}: some files or subsystems were skipped, see {}",
                r.scenario_id,
                dir.join("skipped.log").display()
            );
            partial = true;
        }
        reports.push(outcome.report);
    }
    if reports.len() > 1 {
        write_corpus(&reports, &a.out, &fmts)?;
    }
    Ok(if partial {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn matrix(format: &str) -> Result<ExitCode, Failure> {
    match format.parse::<ReportFormat>()? {
        ReportFormat::Grid => print!("{}", render_grid()),
        ReportFormat::Report => {
            let [green, yellow, red] = tally();
            let doc = serde_json::json!({
                "an_kinds": ChangeKind::ALL.map(|k| k.label()),
                "cm_kinds": ChangeKind::CHANGED.map(|k| k.label()),
                "cells": MATRIX,
                "tally": { "green": green, "yellow": yellow, "red": red },
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        ReportFormat::Text => return Err("matrix supports --format grid or report".into()),
    }
    Ok(ExitCode::SUCCESS)
}

fn detect(base: &Path, derived: &Path, ext: &str) -> Result<ChangeSet, Failure> {
    let opts = InventoryOptions {
        extension: ext.to_string(),
        nested_marker: None,
    };
    let ao = build_inventory(base, VersionLabel::Ao, &opts)?;
    let d = build_inventory(derived, VersionLabel::Cm, &opts)?;
    Ok(build_change_set(
        &ao,
        &d,
        Direction::AoToCm,
        &DetectorConfig::default(),
    ))
}

fn print_score(expected: &ChangeSet, actual: &ChangeSet) -> Result<(), Failure> {
    print!("{}", score_detection(expected, actual)?.render());
    Ok(())
}

fn mutate(plan: &Path, out: &Path, score: bool) -> Result<ExitCode, Failure> {
    let plan = MutationPlan::load(plan)?;
    let expected = apply_plan(&plan, out)?;
    let path = out.join(EXPECTED_FILE);
    fs::write(&path, serde_json::to_string_pretty(&expected)? + "\n")?;
    println!(
        "{} mutations applied -> {}, expected change set in {}",
        plan.mutations.len(),
        out.display(),
        path.display()
    );
    if score {
        let actual = detect(&plan.seed_root, out, &plan.source_extension)?;
        print_score(&expected, &actual)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn read_change_set(path: &Path) -> Result<ChangeSet, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| format!("invalid change set {}: {e}", path.display()).into())
}

fn score(a: &ScoreArgs) -> Result<ExitCode, Failure> {
    let expected = read_change_set(&a.expected)?;
    let actual = match (&a.actual, &a.base, &a.derived) {
        (Some(p), _, _) => read_change_set(p)?,
        (None, Some(b), Some(d)) => detect(b, d, &a.ext)?,
        _ => return Err("give either --actual or both --base and --derived".into()),
    };
    print_score(&expected, &actual)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.log);
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Matrix { format } => matrix(format),
        Command::Mutate { plan, out, score } => mutate(plan, out, *score),
        Command::Score(a) => score(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
