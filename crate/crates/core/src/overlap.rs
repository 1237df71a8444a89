//! Co-occurrence of upstream and variant change kinds, keyed on base methods.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changes::{ChangeKind, ChangeSet};
use crate::srcmodel::MethodKey;

pub const ROWS: usize = 12;
pub const COLS: usize = 11;

pub type Grid<T> = [[T; COLS]; ROWS];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OverlapError {
    #[error("change sets cover different base methods ({only_an} only upstream, {only_cm} only in the variant)")]
    KeyMismatch { only_an: usize, only_cm: usize },
}

/// Rows are upstream kinds (all 12), columns are variant kinds other than `Identical`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub counts: Grid<u64>,
    pub cell_members: Grid<Vec<MethodKey>>,
    pub total_cm_changed: u64,
}

impl Default for OverlapMatrix {
    fn default() -> Self {
        Self {
            counts: [[0; COLS]; ROWS],
            cell_members: Default::default(),
            total_cm_changed: 0,
        }
    }
}

impl OverlapMatrix {
    pub fn count(&self, an: ChangeKind, cm: ChangeKind) -> u64 {
        cm.column().map_or(0, |c| self.counts[an.row()][c])
    }

    pub fn cell_sum(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Cellwise sum; member lists stay sorted.
    pub fn merge(&mut self, other: &OverlapMatrix) {
        for r in 0..ROWS {
            for c in 0..COLS {
                self.counts[r][c] += other.counts[r][c];
                let cell = &mut self.cell_members[r][c];
                cell.extend(other.cell_members[r][c].iter().cloned());
                cell.sort();
            }
        }
        self.total_cm_changed += other.total_cm_changed;
    }

    /// Cells as fractions of the variant's changed methods; all zero for an unchanged variant.
    pub fn to_percentages(&self) -> Grid<f64> {
        to_percentages(&self.counts, self.total_cm_changed)
    }
}

pub fn to_percentages(counts: &Grid<u64>, total: u64) -> Grid<f64> {
    let mut out = [[0.0; COLS]; ROWS];
    if total == 0 {
        return out;
    }
    for (o, c) in out.iter_mut().flatten().zip(counts.iter().flatten()) {
        *o = *c as f64 / total as f64;
    }
    out
}

/// Tabulate every base method the variant changed by its pair of kinds.
pub fn map_change_sets(an: &ChangeSet, cm: &ChangeSet) -> Result<OverlapMatrix, OverlapError> {
    if !an.changes.keys().eq(cm.changes.keys()) {
        let a: BTreeSet<_> = an.changes.keys().collect();
        let c: BTreeSet<_> = cm.changes.keys().collect();
        return Err(OverlapError::KeyMismatch {
            only_an: a.difference(&c).count(),
            only_cm: c.difference(&a).count(),
        });
    }
    let mut m = OverlapMatrix::default();
    for (key, cm_change) in &cm.changes {
        let Some(col) = cm_change.kind.column() else {
            continue;
        };
        let row = an.changes[key].kind.row();
        m.counts[row][col] += 1;
        m.cell_members[row][col].push(key.clone());
        m.total_cm_changed += 1;
    }
    // BTreeMap iteration already yields members in key order
    Ok(m)
}
