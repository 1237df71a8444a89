//! Classification of every base method's evolution into one change kind.

mod pipeline;
pub mod similarity;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::srcmodel::{Location, MethodKey, MethodSignature, Token};

pub use pipeline::{
    build_change_set, detect_argument_changes, detect_body_only, detect_identical,
    detect_refactorings, Pools,
};

/// The twelve change categories, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChangeKind {
    #[serde(rename = "Identical")]
    Identical,
    #[serde(rename = "Method Move")]
    MethodMove,
    #[serde(rename = "Method Rename")]
    MethodRename,
    #[serde(rename = "Method Inline")]
    MethodInline,
    #[serde(rename = "Method Extract")]
    MethodExtract,
    #[serde(rename = "Argument Rename")]
    ArgRename,
    #[serde(rename = "Argument Reorder")]
    ArgReorder,
    #[serde(rename = "Argument Add")]
    ArgAdd,
    #[serde(rename = "Argument Remove")]
    ArgRemove,
    #[serde(rename = "Argument Type Change")]
    ArgTypeChange,
    #[serde(rename = "Body-only")]
    BodyOnly,
    #[serde(rename = "Unmatched")]
    Unmatched,
}

impl ChangeKind {
    pub const ALL: [ChangeKind; 12] = [
        ChangeKind::Identical,
        ChangeKind::MethodMove,
        ChangeKind::MethodRename,
        ChangeKind::MethodInline,
        ChangeKind::MethodExtract,
        ChangeKind::ArgRename,
        ChangeKind::ArgReorder,
        ChangeKind::ArgAdd,
        ChangeKind::ArgRemove,
        ChangeKind::ArgTypeChange,
        ChangeKind::BodyOnly,
        ChangeKind::Unmatched,
    ];

    /// Kinds a CM-side change can have in the overlap grid (everything but `Identical`).
    pub const CHANGED: [ChangeKind; 11] = [
        ChangeKind::MethodMove,
        ChangeKind::MethodRename,
        ChangeKind::MethodInline,
        ChangeKind::MethodExtract,
        ChangeKind::ArgRename,
        ChangeKind::ArgReorder,
        ChangeKind::ArgAdd,
        ChangeKind::ArgRemove,
        ChangeKind::ArgTypeChange,
        ChangeKind::BodyOnly,
        ChangeKind::Unmatched,
    ];

    /// Row index in [`ChangeKind::ALL`].
    pub fn row(self) -> usize {
        self as usize
    }

    /// Column index in [`ChangeKind::CHANGED`], `None` for `Identical`.
    pub fn column(self) -> Option<usize> {
        (self as usize).checked_sub(1)
    }

    /// Stable label, identical to the serialized name.
    pub fn label(self) -> &'static str {
        match self {
            ChangeKind::Identical => "Identical",
            ChangeKind::MethodMove => "Method Move",
            ChangeKind::MethodRename => "Method Rename",
            ChangeKind::MethodInline => "Method Inline",
            ChangeKind::MethodExtract => "Method Extract",
            ChangeKind::ArgRename => "Argument Rename",
            ChangeKind::ArgReorder => "Argument Reorder",
            ChangeKind::ArgAdd => "Argument Add",
            ChangeKind::ArgRemove => "Argument Remove",
            ChangeKind::ArgTypeChange => "Argument Type Change",
            ChangeKind::BodyOnly => "Body-only",
            ChangeKind::Unmatched => "Unmatched",
        }
    }
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ChangeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChangeKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown change kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "AO_TO_AN")]
    AoToAn,
    #[serde(rename = "AO_TO_CM")]
    AoToCm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArgRenameEdit {
    pub index: usize,
    pub old_name: String,
    pub new_name: String,
}

/// Kind-specific payload of a change.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChangeDetail {
    None,
    Move {
        to: Location,
    },
    Rename {
        new_name: String,
    },
    /// Signature (in the descendant) of the method the body was inlined into.
    Inline {
        into: MethodKey,
    },
    /// Signature of the newly extracted method.
    Extract {
        extracted: MethodKey,
    },
    ArgRename {
        renames: Vec<ArgRenameEdit>,
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
        type_name: String,
        name: String,
    },
    ArgTypeChange {
        index: usize,
        old_type: String,
        new_type: String,
    },
    /// Digest of the resulting body token stream.
    BodyOnly {
        result_digest: String,
    },
}

impl ChangeDetail {
    /// The kinds this payload shape belongs to.
    pub fn fits(&self, kind: ChangeKind) -> bool {
        matches!(
            (self, kind),
            (
                ChangeDetail::None,
                ChangeKind::Identical | ChangeKind::Unmatched
            ) | (ChangeDetail::Move { .. }, ChangeKind::MethodMove)
                | (ChangeDetail::Rename { .. }, ChangeKind::MethodRename)
                | (ChangeDetail::Inline { .. }, ChangeKind::MethodInline)
                | (ChangeDetail::Extract { .. }, ChangeKind::MethodExtract)
                | (ChangeDetail::ArgRename { .. }, ChangeKind::ArgRename)
                | (ChangeDetail::ArgReorder { .. }, ChangeKind::ArgReorder)
                | (ChangeDetail::ArgAdd { .. }, ChangeKind::ArgAdd)
                | (ChangeDetail::ArgRemove { .. }, ChangeKind::ArgRemove)
                | (
                    ChangeDetail::ArgTypeChange { .. },
                    ChangeKind::ArgTypeChange
                )
                | (ChangeDetail::BodyOnly { .. }, ChangeKind::BodyOnly)
        )
    }
}

/// How one base method evolved in one descendant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodChange {
    pub ao_signature: MethodSignature,
    pub kind: ChangeKind,
    pub counterpart: Option<MethodSignature>,
    pub body_also_changed: bool,
    pub detail: ChangeDetail,
}

impl MethodChange {
    pub fn identical(sig: &MethodSignature) -> Self {
        Self {
            ao_signature: sig.clone(),
            kind: ChangeKind::Identical,
            counterpart: Some(sig.clone()),
            body_also_changed: false,
            detail: ChangeDetail::None,
        }
    }

    pub fn unmatched(sig: &MethodSignature) -> Self {
        Self {
            ao_signature: sig.clone(),
            kind: ChangeKind::Unmatched,
            counterpart: None,
            body_also_changed: false,
            detail: ChangeDetail::None,
        }
    }

    /// Checks the structural invariants of a change record.
    pub fn is_well_formed(&self) -> bool {
        let counterpart_ok = match self.kind {
            ChangeKind::Unmatched | ChangeKind::MethodInline => self.counterpart.is_none(),
            ChangeKind::Identical => {
                self.counterpart.as_ref() == Some(&self.ao_signature) && !self.body_also_changed
            }
            _ => self.counterpart.is_some(),
        };
        counterpart_ok && self.detail.fits(self.kind)
    }
}

/// Partition of the base methods of one subsystem for one direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub direction: Direction,
    pub changes: BTreeMap<MethodKey, MethodChange>,
    pub added_in_d: BTreeSet<MethodKey>,
}

impl ChangeSet {
    pub fn kind_of(&self, key: &MethodKey) -> Option<ChangeKind> {
        self.changes.get(key).map(|c| c.kind)
    }

    /// Number of changes per kind, indexed like [`ChangeKind::ALL`].
    pub fn kind_counts(&self) -> [u64; 12] {
        let mut counts = [0u64; 12];
        for c in self.changes.values() {
            counts[c.kind.row()] += 1;
        }
        counts
    }

    /// Base methods whose kind is not `Identical`.
    pub fn changed_count(&self) -> u64 {
        self.changes
            .values()
            .filter(|c| c.kind != ChangeKind::Identical)
            .count() as u64
    }

    /// Any base method changed, or any method added.
    pub fn is_changed(&self) -> bool {
        self.changed_count() > 0 || !self.added_in_d.is_empty()
    }

    /// Counterparts are pairwise distinct.
    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.changes
            .values()
            .filter_map(|c| c.counterpart.as_ref())
            .all(|s| seen.insert(s.key()))
    }
}

/// Digest of a token stream's texts.
pub fn body_digest(tokens: &[Token]) -> String {
    let mut hasher = Sha256::new();
    for t in tokens {
        hasher.update(t.text.as_bytes());
        hasher.update([0x1f]);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Detector thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Minimum body similarity for move, rename, argument rename and reorder.
    pub sim_threshold: f64,
    /// Minimum containment for inline and extract witnesses.
    pub inline_threshold: f64,
    /// Run the refactoring stage at all.
    pub refactorings: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            sim_threshold: 0.6,
            inline_threshold: 0.5,
            refactorings: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_kinds_with_stable_labels() {
        assert_eq!(ChangeKind::ALL.len(), 12);
        for (i, k) in ChangeKind::ALL.iter().enumerate() {
            assert_eq!(k.row(), i);
            assert_eq!(k.label().parse::<ChangeKind>().unwrap(), *k);
            assert_eq!(
                serde_json::to_string(k).unwrap(),
                format!("\"{}\"", k.label())
            );
        }
        for (j, k) in ChangeKind::CHANGED.iter().enumerate() {
            assert_eq!(k.column(), Some(j));
        }
        assert_eq!(ChangeKind::Identical.column(), None);
    }

    #[test]
    fn detail_shapes() {
        assert!(ChangeDetail::None.fits(ChangeKind::Unmatched));
        assert!(!ChangeDetail::None.fits(ChangeKind::BodyOnly));
        assert!(ChangeDetail::Rename {
            new_name: "n".into()
        }
        .fits(ChangeKind::MethodRename));
        assert!(!ChangeDetail::Rename {
            new_name: "n".into()
        }
        .fits(ChangeKind::MethodMove));
    }
}
