//! Per-kind precision and recall of a detected change set against ground truth.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changes::{ChangeKind, ChangeSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("expected and actual change sets cover different base methods")]
    KeyMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KindScore {
    pub kind: ChangeKind,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl KindScore {
    /// 1.0 when nothing was reported as this kind.
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    /// 1.0 when no instance of this kind was expected.
    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    /// One row per kind in table order.
    pub rows: Vec<KindScore>,
}

impl Default for ScoreTable {
    fn default() -> Self {
        Self {
            rows: ChangeKind::ALL
                .iter()
                .map(|&kind| KindScore {
                    kind,
                    tp: 0,
                    fp: 0,
                    fn_: 0,
                })
                .collect(),
        }
    }
}

impl ScoreTable {
    pub fn get(&self, kind: ChangeKind) -> &KindScore {
        &self.rows[kind.row()]
    }

    pub fn merge(&mut self, other: &ScoreTable) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.tp += b.tp;
            a.fp += b.fp;
            a.fn_ += b.fn_;
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.rows.iter().all(|r| r.fp == 0 && r.fn_ == 0)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<22}{:>6}{:>6}{:>6}{:>11}{:>8}\n",
            "kind", "tp", "fp", "fn", "precision", "recall"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<22}{:>6}{:>6}{:>6}{:>11.3}{:>8.3}",
                r.kind.label(),
                r.tp,
                r.fp,
                r.fn_,
                r.precision(),
                r.recall()
            );
        }
        out
    }
}

/// Tally agreement per base method; a mislabel is a false negative for the
/// expected kind and a false positive for the reported one.
pub fn score_detection(expected: &ChangeSet, actual: &ChangeSet) -> Result<ScoreTable, ScoreError> {
    if !expected.changes.keys().eq(actual.changes.keys()) {
        return Err(ScoreError::KeyMismatch);
    }
    let mut t = ScoreTable::default();
    for (e, a) in expected.changes.values().zip(actual.changes.values()) {
        if e.kind == a.kind {
            t.rows[e.kind.row()].tp += 1;
        } else {
            t.rows[e.kind.row()].fn_ += 1;
            t.rows[a.kind.row()].fp += 1;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changes::{build_change_set, DetectorConfig, Direction, MethodChange};
    use crate::srcmodel::{MethodInventory, VersionLabel};

    fn set() -> ChangeSet {
        let src = "class A { void f() { a(); } void g() { b(); } }";
        let ao = MethodInventory::from_sources(VersionLabel::Ao, [("A.java", src)]);
        let d = MethodInventory::from_sources(
            VersionLabel::Cm,
            [(
                "A.java",
                "class A { void h() { a(); } void g() { b(); c(); } }",
            )],
        );
        build_change_set(&ao, &d, Direction::AoToCm, &DetectorConfig::default())
    }

    #[test]
    fn perfect_agreement() {
        let s = set();
        let t = score_detection(&s, &s).unwrap();
        assert!(t.is_perfect());
        assert!(t
            .rows
            .iter()
            .all(|r| r.precision() == 1.0 && r.recall() == 1.0));
        assert!(t.get(ChangeKind::ArgAdd).is_vacuous());
    }

    #[test]
    fn mislabel_moves_both_rates() {
        let expected = set();
        let mut actual = expected.clone();
        let k = expected
            .changes
            .keys()
            .find(|k| k.name == "f")
            .unwrap()
            .clone();
        assert_eq!(expected.changes[&k].kind, ChangeKind::MethodRename);
        let c = actual.changes.get_mut(&k).unwrap();
        *c = MethodChange {
            kind: ChangeKind::BodyOnly,
            ..c.clone()
        };
        let t = score_detection(&expected, &actual).unwrap();
        assert_eq!(t.get(ChangeKind::MethodRename).recall(), 0.0);
        assert_eq!(t.get(ChangeKind::BodyOnly).precision(), 0.5);
        assert!(t.render().lines().count() == 13);
    }

    #[test]
    fn key_mismatch() {
        let a = set();
        let mut b = a.clone();
        b.changes.pop_first();
        assert_eq!(score_detection(&a, &b), Err(ScoreError::KeyMismatch));
    }
}
