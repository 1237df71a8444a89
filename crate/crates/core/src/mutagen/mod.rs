//! Labeled synthetic mutations for measuring detector accuracy.
//!
//! A plan names seed methods and one edit each. Edits are spliced into the
//! source text at the byte offsets recorded during extraction, the result is
//! re-parsed, and the change set a perfect detector would report is derived
//! from the plan.

mod apply;
pub mod score;
pub mod synth;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changes::ChangeSet;
use crate::srcmodel::{source_files, InventoryOptions, MethodKey};

pub use apply::mutate_sources;
pub use score::{score_detection, KindScore, ScoreError, ScoreTable};

#[derive(Debug, Error)]
pub enum MutagenError {
    #[error("cannot read plan {}: {source}", path.display())]
    ReadPlan {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid plan {}: {message}", path.display())]
    Plan { path: PathBuf, message: String },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("seed file {path} does not parse: {reason}")]
    Seed { path: String, reason: String },
    #[error("target method {0} is not in the seed")]
    TargetMissing(Box<MethodKey>),
    #[error("conflicting mutations on {key}: {reason}")]
    ConflictingMutations { key: Box<MethodKey>, reason: String },
    #[error("cannot apply {op} to {key}: {reason}")]
    InvalidMutation {
        key: Box<MethodKey>,
        op: &'static str,
        reason: String,
    },
}

/// One edit. Parameter indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MutationOp {
    /// Move into type `to_type` (dotted path) of package `to_package`; a new
    /// file is created when that type has no methods in the seed.
    Move {
        to_package: String,
        to_type: String,
    },
    /// Rename the declaration; call sites are left alone.
    Rename {
        new_name: String,
    },
    /// Replace every call statement by the body with arguments substituted, then delete the method.
    Inline,
    /// Move the first half of the top-level statements into a new private method.
    Extract {
        new_name: String,
    },
    /// Rename one parameter and its uses in the body.
    ArgRename {
        index: usize,
        new_name: String,
    },
    /// `permutation[new_index] == old_index`.
    ArgReorder {
        permutation: Vec<usize>,
    },
    ArgAdd {
        index: usize,
        type_name: String,
        name: String,
    },
    ArgRemove {
        index: usize,
    },
    ArgTypeChange {
        index: usize,
        new_type: String,
    },
    /// Insert a statement at the start of the body.
    BodyOnly {
        statement: String,
    },
    Delete,
}

impl MutationOp {
    pub fn name(&self) -> &'static str {
        match self {
            MutationOp::Move { .. } => "move",
            MutationOp::Rename { .. } => "rename",
            MutationOp::Inline => "inline",
            MutationOp::Extract { .. } => "extract",
            MutationOp::ArgRename { .. } => "arg-rename",
            MutationOp::ArgReorder { .. } => "arg-reorder",
            MutationOp::ArgAdd { .. } => "arg-add",
            MutationOp::ArgRemove { .. } => "arg-remove",
            MutationOp::ArgTypeChange { .. } => "arg-type-change",
            MutationOp::BodyOnly { .. } => "body-only",
            MutationOp::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    pub target: MethodKey,
    #[serde(flatten)]
    pub op: MutationOp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationPlan {
    /// Relative to the plan file when loaded from disk.
    pub seed_root: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_extension")]
    pub source_extension: String,
    #[serde(default, rename = "mutation")]
    pub mutations: Vec<Mutation>,
}

fn default_extension() -> String {
    ".java".to_string()
}

impl MutationPlan {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, MutagenError> {
        let mut plan: MutationPlan = toml::from_str(text).map_err(|e| MutagenError::Plan {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if plan.seed_root.is_relative() {
            let base = origin.parent().unwrap_or(Path::new("."));
            plan.seed_root = base.join(&plan.seed_root);
        }
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, MutagenError> {
        let text = fs::read_to_string(path).map_err(|source| MutagenError::ReadPlan {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plans always serialize")
    }
}

/// Mutated sources plus the change set a perfect detector reports.
#[derive(Debug, Clone)]
pub struct Mutated {
    pub files: BTreeMap<String, String>,
    pub expected: ChangeSet,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> MutagenError + '_ {
    move |source| MutagenError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Source files of a tree keyed by `/`-separated relative path.
pub fn read_sources(
    root: &Path,
    extension: &str,
) -> Result<BTreeMap<String, String>, MutagenError> {
    let opts = InventoryOptions {
        extension: extension.to_string(),
        nested_marker: None,
    };
    let files = source_files(root, &opts).map_err(|e| MutagenError::Io {
        path: root.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let mut out = BTreeMap::new();
    for (rel, abs) in files {
        out.insert(rel, fs::read_to_string(&abs).map_err(io(&abs))?);
    }
    Ok(out)
}

/// Copy the seed tree to `out_dir` with the plan applied; returns the expected change set.
pub fn apply_plan(plan: &MutationPlan, out_dir: &Path) -> Result<ChangeSet, MutagenError> {
    let sources = read_sources(&plan.seed_root, &plan.source_extension)?;
    let mutated = mutate_sources(&sources, &plan.mutations)?;
    // non-source files are copied verbatim
    for entry in walkdir::WalkDir::new(&plan.seed_root).sort_by_file_name() {
        let entry = entry.map_err(|e| MutagenError::Io {
            path: plan.seed_root.clone(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("filesystem loop")),
        })?;
        let rel = entry
            .path()
            .strip_prefix(&plan.seed_root)
            .unwrap_or(entry.path());
        let dest = out_dir.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&dest).map_err(io(&dest))?;
        } else if !entry
            .file_name()
            .to_string_lossy()
            .ends_with(&plan.source_extension)
        {
            fs::copy(entry.path(), &dest).map_err(io(&dest))?;
        }
    }
    for (rel, text) in &mutated.files {
        let dest = out_dir.join(rel);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent).map_err(io(parent))?;
        }
        fs::write(&dest, text).map_err(io(&dest))?;
    }
    Ok(mutated.expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changes::{ChangeKind, Direction};

    #[test]
    fn plan_parses_every_kind() {
        let text = r#"
            seed_root = "seed"
            seed = 42

            [[mutation]]
            kind = "rename"
            target = "p::A::f(int):void"
            new_name = "g"

            [[mutation]]
            kind = "move"
            target = "p::A::h():void"
            to_package = "q"
            to_type = "B"

            [[mutation]]
            kind = "arg-reorder"
            target = "p::A::k(int,long):void"
            permutation = [1, 0]

            [[mutation]]
            kind = "delete"
            target = "p::A::z():void"
        "#;
        let plan = MutationPlan::parse(text, Path::new("/plans/p.toml")).unwrap();
        assert_eq!(plan.seed_root, Path::new("/plans/seed"));
        assert_eq!(plan.seed, 42);
        assert_eq!(plan.mutations.len(), 4);
        assert_eq!(
            plan.mutations[0].op,
            MutationOp::Rename {
                new_name: "g".into()
            }
        );
        assert_eq!(
            plan.mutations[2].op,
            MutationOp::ArgReorder {
                permutation: vec![1, 0]
            }
        );
        assert_eq!(plan.mutations[3].op, MutationOp::Delete);
        let again = MutationPlan::parse(&plan.to_toml(), Path::new("/x.toml")).unwrap();
        assert_eq!(again.mutations, plan.mutations);
    }

    #[test]
    fn plan_errors_carry_line_numbers() {
        let text =
            "seed_root = \"s\"\n\n[[mutation]]\nkind = \"twist\"\ntarget = \"p::A::f():void\"\n";
        let err = MutationPlan::parse(text, Path::new("bad.toml"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn apply_copies_tree() {
        let dir = tempfile::tempdir().unwrap();
        let seed = dir.path().join("seed");
        fs::create_dir_all(seed.join("src")).unwrap();
        fs::write(seed.join("AndroidManifest.xml"), "<m/>").unwrap();
        fs::write(
            seed.join("src/A.java"),
            "class A { void f() { x(); } void g() { y(); } }",
        )
        .unwrap();
        let plan = MutationPlan {
            seed_root: seed,
            seed: 0,
            source_extension: ".java".into(),
            mutations: vec![Mutation {
                target: "::A::g():void".parse().unwrap(),
                op: MutationOp::Delete,
            }],
        };
        let out = dir.path().join("out");
        let expected = apply_plan(&plan, &out).unwrap();
        assert_eq!(expected.direction, Direction::AoToCm);
        assert_eq!(expected.kind_counts()[ChangeKind::Unmatched.row()], 1);
        assert!(out.join("AndroidManifest.xml").is_file());
        assert!(!fs::read_to_string(out.join("src/A.java"))
            .unwrap()
            .contains("y()"));
    }
}
