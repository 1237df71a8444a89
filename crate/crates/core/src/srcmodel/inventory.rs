use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::extract::extract_methods;
use super::lexer::lex;
use super::{MethodKey, MethodRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VersionLabel {
    #[serde(rename = "AO")]
    Ao,
    #[serde(rename = "AN")]
    An,
    #[serde(rename = "CM")]
    Cm,
}

impl fmt::Display for VersionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VersionLabel::Ao => "AO",
            VersionLabel::An => "AN",
            VersionLabel::Cm => "CM",
        })
    }
}

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("cannot read source root {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A file that could not be read, lexed or structurally parsed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FileIssue {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct InventoryOptions {
    /// Source file extension including the dot.
    pub extension: String,
    /// Directories below the root containing this file are separate
    /// subsystems and are not scanned.
    pub nested_marker: Option<String>,
}

impl Default for InventoryOptions {
    fn default() -> Self {
        Self {
            extension: ".java".to_string(),
            nested_marker: None,
        }
    }
}

/// All uniquely identified methods of one version of a subsystem.
#[derive(Debug, Clone)]
pub struct MethodInventory {
    pub version_label: VersionLabel,
    pub records: BTreeMap<MethodKey, MethodRecord>,
    /// Keys declared more than once; none of them appear in `records`.
    pub duplicates: Vec<MethodKey>,
    pub issues: Vec<FileIssue>,
}

impl MethodInventory {
    pub fn empty(version_label: VersionLabel) -> Self {
        Self {
            version_label,
            records: BTreeMap::new(),
            duplicates: Vec::new(),
            issues: Vec::new(),
        }
    }

    /// Assemble an inventory, moving every key declared twice into `duplicates`.
    pub fn from_records(
        version_label: VersionLabel,
        records: impl IntoIterator<Item = MethodRecord>,
    ) -> Self {
        let mut map = BTreeMap::new();
        let mut dups = BTreeSet::new();
        for r in records {
            let key = r.key();
            if dups.contains(&key) {
                continue;
            }
            if map.insert(key.clone(), r).is_some() {
                map.remove(&key);
                dups.insert(key);
            }
        }
        Self {
            version_label,
            records: map,
            duplicates: dups.into_iter().collect(),
            issues: Vec::new(),
        }
    }

    /// Parse in-memory sources given as `(relative path, text)` pairs.
    pub fn from_sources<'a>(
        version_label: VersionLabel,
        sources: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        let mut records = Vec::new();
        let mut issues = Vec::new();
        for (path, text) in sources {
            match parse_source(path, text) {
                Ok(rs) => records.extend(rs),
                Err(issue) => issues.push(issue),
            }
        }
        let mut inv = Self::from_records(version_label, records);
        inv.issues = issues;
        inv
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &MethodKey) -> Option<&MethodRecord> {
        self.records.get(key)
    }

    pub fn contains(&self, key: &MethodKey) -> bool {
        self.records.contains_key(key)
    }
}

/// Lex and extract one file.
pub fn parse_source(path: &str, text: &str) -> Result<Vec<MethodRecord>, FileIssue> {
    let tokens = lex(text).map_err(|e| FileIssue {
        path: path.to_string(),
        reason: format!("lex error at {e}"),
    })?;
    extract_methods(&tokens, path).map_err(|e| FileIssue {
        path: path.to_string(),
        reason: format!("structure error at {e}"),
    })
}

/// Source files under `root` in lexicographic order of their relative paths.
pub fn source_files(
    root: &Path,
    opts: &InventoryOptions,
) -> Result<Vec<(String, PathBuf)>, InventoryError> {
    let meta = fs::metadata(root).map_err(|source| InventoryError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    if !meta.is_dir() {
        return Err(InventoryError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        });
    }
    let mut files = Vec::new();
    let mut walker = walkdir::WalkDir::new(root).sort_by_file_name().into_iter();
    while let Some(entry) = walker.next() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping unreadable entry under {}: {e}", root.display());
                continue;
            }
        };
        if entry.file_type().is_dir() {
            if entry.depth() > 0 {
                if let Some(marker) = &opts.nested_marker {
                    if entry.path().join(marker).is_file() {
                        walker.skip_current_dir();
                    }
                }
            }
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        if !name.ends_with(&opts.extension) {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((rel, entry.path().to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// Build the inventory of every source file below `root`.
///
/// Per-file failures are collected in `issues`; only an unreadable root is an error.
pub fn build_inventory(
    root: &Path,
    label: VersionLabel,
    opts: &InventoryOptions,
) -> Result<MethodInventory, InventoryError> {
    let files = source_files(root, opts)?;
    let parsed: Vec<Result<Vec<MethodRecord>, FileIssue>> = files
        .par_iter()
        .map(|(rel, abs)| {
            let text = fs::read(abs).map_err(|e| FileIssue {
                path: rel.clone(),
                reason: format!("read error: {e}"),
            })?;
            let text = String::from_utf8(text).map_err(|_| FileIssue {
                path: rel.clone(),
                reason: "file is not valid UTF-8".to_string(),
            })?;
            parse_source(rel, &text)
        })
        .collect();

    let mut records = Vec::new();
    let mut issues = Vec::new();
    for result in parsed {
        match result {
            Ok(rs) => records.extend(rs),
            Err(issue) => {
                log::warn!("{label}: skipping {}: {}", issue.path, issue.reason);
                issues.push(issue);
            }
        }
    }
    let mut inv = MethodInventory::from_records(label, records);
    inv.issues = issues;
    Ok(inv)
}
