//! Whether a variant's change can be re-applied on top of the upstream one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changes::{ChangeDetail, ChangeKind, MethodChange};
use crate::overlap::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeasibilityVerdict {
    #[serde(rename = "green")]
    Auto,
    #[serde(rename = "yellow")]
    Conditional,
    #[serde(rename = "red")]
    Manual,
}

impl FeasibilityVerdict {
    pub const ALL: [FeasibilityVerdict; 3] = [Self::Auto, Self::Conditional, Self::Manual];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn color(self) -> &'static str {
        match self {
            Self::Auto => "green",
            Self::Conditional => "yellow",
            Self::Manual => "red",
        }
    }

    fn letter(self) -> char {
        match self {
            Self::Auto => 'G',
            Self::Conditional => 'Y',
            Self::Manual => 'R',
        }
    }
}

impl fmt::Display for FeasibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.color())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("no verdict for a variant kind of `Identical`")]
    IdenticalColumn,
    #[error("`{an}` × `{cm}` is not a conditional cell")]
    NotConditional { an: ChangeKind, cm: ChangeKind },
}

use FeasibilityVerdict::{Auto as G, Conditional as Y, Manual as R};

/// Rows: upstream kind in table order. Columns: variant kind without `Identical`.
pub const MATRIX: Grid<FeasibilityVerdict> = [
    [G, G, G, G, G, G, G, G, G, G, R],
    [Y, G, R, R, G, G, G, G, G, G, R],
    [G, Y, R, G, G, G, G, G, G, G, R],
    [R, R, Y, R, R, R, R, R, R, G, R],
    [R, G, R, Y, G, G, R, R, R, R, R],
    [G, G, R, G, Y, G, Y, Y, G, G, R],
    [G, G, R, G, G, Y, R, R, G, G, R],
    [G, G, R, R, Y, R, Y, R, R, R, R],
    [G, G, R, R, Y, R, R, Y, R, R, R],
    [G, G, R, R, G, G, R, R, Y, R, R],
    [G, G, G, R, G, G, R, R, R, Y, R],
    [R, R, R, R, R, R, R, R, R, R, R],
];

/// Table lookup.
pub fn verdict(an: ChangeKind, cm: ChangeKind) -> Result<FeasibilityVerdict, FeasibilityError> {
    let col = cm.column().ok_or(FeasibilityError::IdenticalColumn)?;
    Ok(MATRIX[an.row()][col])
}

/// Number of green, yellow and red cells.
pub fn tally() -> [u64; 3] {
    let mut t = [0; 3];
    for v in MATRIX.iter().flatten() {
        t[v.index()] += 1;
    }
    t
}

/// Decide a conditional cell for one concrete pair of changes.
pub fn refine_yellow(
    an: &MethodChange,
    cm: &MethodChange,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if verdict(an.kind, cm.kind)? != Y {
        return Err(FeasibilityError::NotConditional {
            an: an.kind,
            cm: cm.kind,
        });
    }
    use ChangeDetail as D;
    let ok = match (&an.detail, &cm.detail) {
        (D::ArgRename { renames }, D::ArgAdd { name, .. })
        | (D::ArgAdd { name, .. }, D::ArgRename { renames }) => {
            renames.iter().all(|r| &r.new_name != name)
        }
        (D::ArgRename { renames }, D::ArgRemove { index, .. })
        | (D::ArgRemove { index, .. }, D::ArgRename { renames }) => {
            renames.iter().all(|r| r.index != *index)
        }
        (
            D::ArgAdd {
                index: i,
                type_name: t,
                ..
            },
            D::ArgAdd {
                index: j,
                type_name: u,
                ..
            },
        ) => i == j && t == u,
        (D::ArgRemove { index: i, .. }, D::ArgRemove { index: j, .. }) => i == j,
        (D::BodyOnly { result_digest: a }, D::BodyOnly { result_digest: b }) => a == b,
        (a, b) if an.kind == cm.kind => a == b,
        _ => false,
    };
    Ok(if ok { G } else { R })
}

/// Verdict for a pair, refined when the cell is conditional.
pub fn refined_verdict(
    an: &MethodChange,
    cm: &MethodChange,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    match verdict(an.kind, cm.kind)? {
        Y => refine_yellow(an, cm),
        v => Ok(v),
    }
}

/// Machine-readable transcription: header of variant kinds, one row per
/// upstream kind with `G`/`Y`/`R` cells, then the color tally.
pub fn render_grid() -> String {
    let mut out = String::from("AN\\CM");
    for k in ChangeKind::CHANGED {
        out.push(',');
        out.push_str(k.label());
    }
    out.push('\n');
    for (kind, row) in ChangeKind::ALL.iter().zip(MATRIX.iter()) {
        out.push_str(kind.label());
        for v in row {
            out.push(',');
            out.push(v.letter());
        }
        out.push('\n');
    }
    let [g, y, r] = tally();
    out.push_str(&format!("green={g} yellow={y} red={r}\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changes::ArgRenameEdit;
    use crate::srcmodel::{Location, MethodSignature};

    fn change(kind: ChangeKind, detail: ChangeDetail) -> MethodChange {
        let sig = MethodSignature {
            package: "p".into(),
            type_path: vec!["A".into()],
            name: "m".into(),
            param_types: vec!["int".into()],
            param_names: vec!["a".into()],
            return_type: "void".into(),
        };
        MethodChange {
            ao_signature: sig.clone(),
            kind,
            counterpart: Some(sig),
            body_also_changed: false,
            detail,
        }
    }

    fn rename(to: &str) -> MethodChange {
        change(
            ChangeKind::MethodRename,
            ChangeDetail::Rename {
                new_name: to.into(),
            },
        )
    }

    fn arg_rename(index: usize, old: &str, new: &str) -> MethodChange {
        let renames = vec![ArgRenameEdit {
            index,
            old_name: old.into(),
            new_name: new.into(),
        }];
        change(ChangeKind::ArgRename, ChangeDetail::ArgRename { renames })
    }

    fn arg_add(index: usize, ty: &str, name: &str) -> MethodChange {
        change(
            ChangeKind::ArgAdd,
            ChangeDetail::ArgAdd {
                index,
                type_name: ty.into(),
                name: name.into(),
            },
        )
    }

    fn arg_remove(index: usize) -> MethodChange {
        change(
            ChangeKind::ArgRemove,
            ChangeDetail::ArgRemove {
                index,
                type_name: "int".into(),
                name: "a".into(),
            },
        )
    }

    #[test]
    fn table_examples() {
        assert_eq!(verdict(ChangeKind::Identical, ChangeKind::BodyOnly), Ok(G));
        assert_eq!(
            verdict(ChangeKind::MethodInline, ChangeKind::BodyOnly),
            Ok(G)
        );
        assert_eq!(
            verdict(ChangeKind::Unmatched, ChangeKind::MethodMove),
            Ok(R)
        );
        assert_eq!(
            verdict(ChangeKind::BodyOnly, ChangeKind::Identical),
            Err(FeasibilityError::IdenticalColumn)
        );
    }

    #[test]
    fn structural_rules() {
        for cm in ChangeKind::CHANGED {
            let expect_identical = if cm == ChangeKind::Unmatched { R } else { G };
            assert_eq!(verdict(ChangeKind::Identical, cm), Ok(expect_identical));
            assert_eq!(verdict(ChangeKind::Unmatched, cm), Ok(R));
            assert_eq!(verdict(cm, ChangeKind::Unmatched), Ok(R));
            if cm != ChangeKind::Unmatched {
                assert_eq!(verdict(cm, cm), Ok(Y), "{cm}");
            }
        }
    }

    #[test]
    fn serialized_colors() {
        for v in FeasibilityVerdict::ALL {
            assert_eq!(
                serde_json::to_string(&v).unwrap(),
                format!("\"{}\"", v.color())
            );
        }
    }

    #[test]
    fn rename_refinement() {
        assert_eq!(refine_yellow(&rename("n"), &rename("n")), Ok(G));
        assert_eq!(refine_yellow(&rename("n"), &rename("p")), Ok(R));
    }

    #[test]
    fn move_refinement() {
        let to = |t: &str| {
            change(
                ChangeKind::MethodMove,
                ChangeDetail::Move {
                    to: Location {
                        package: "p".into(),
                        type_path: vec![t.into()],
                    },
                },
            )
        };
        assert_eq!(refine_yellow(&to("B"), &to("B")), Ok(G));
        assert_eq!(refine_yellow(&to("B"), &to("C")), Ok(R));
    }

    #[test]
    fn argument_refinements() {
        assert_eq!(
            refine_yellow(&arg_rename(0, "a", "b"), &arg_add(1, "int", "c")),
            Ok(G)
        );
        assert_eq!(
            refine_yellow(&arg_rename(0, "a", "c"), &arg_add(1, "int", "c")),
            Ok(R)
        );
        assert_eq!(
            refine_yellow(&arg_add(1, "int", "c"), &arg_rename(0, "a", "c")),
            Ok(R)
        );
        assert_eq!(
            refine_yellow(&arg_add(1, "int", "c"), &arg_rename(0, "a", "b")),
            Ok(G)
        );
        assert_eq!(
            refine_yellow(&arg_rename(0, "a", "b"), &arg_remove(1)),
            Ok(G)
        );
        assert_eq!(
            refine_yellow(&arg_rename(1, "a", "b"), &arg_remove(1)),
            Ok(R)
        );
        assert_eq!(
            refine_yellow(&arg_remove(0), &arg_rename(0, "a", "b")),
            Ok(R)
        );
        assert_eq!(
            refine_yellow(&arg_add(1, "int", "c"), &arg_add(1, "int", "d")),
            Ok(G)
        );
        assert_eq!(
            refine_yellow(&arg_add(1, "int", "c"), &arg_add(1, "long", "c")),
            Ok(R)
        );
        assert_eq!(
            refine_yellow(&arg_add(0, "int", "c"), &arg_add(1, "int", "c")),
            Ok(R)
        );
        assert_eq!(refine_yellow(&arg_remove(2), &arg_remove(2)), Ok(G));
        assert_eq!(refine_yellow(&arg_remove(2), &arg_remove(0)), Ok(R));
        assert_eq!(
            refine_yellow(&arg_rename(0, "a", "b"), &arg_rename(0, "a", "b")),
            Ok(G)
        );
        assert_eq!(
            refine_yellow(&arg_rename(0, "a", "b"), &arg_rename(0, "a", "c")),
            Ok(R)
        );
    }

    #[test]
    fn body_refinement() {
        let body = |d: &str| {
            change(
                ChangeKind::BodyOnly,
                ChangeDetail::BodyOnly {
                    result_digest: d.into(),
                },
            )
        };
        assert_eq!(refine_yellow(&body("x"), &body("x")), Ok(G));
        assert_eq!(refine_yellow(&body("x"), &body("y")), Ok(R));
    }

    #[test]
    fn refinement_requires_conditional_cell() {
        assert_eq!(
            refine_yellow(&rename("n"), &arg_add(0, "int", "a")),
            Err(FeasibilityError::NotConditional {
                an: ChangeKind::MethodRename,
                cm: ChangeKind::ArgAdd
            })
        );
        assert_eq!(
            refined_verdict(&rename("n"), &arg_add(0, "int", "a")),
            Ok(G)
        );
    }

    #[test]
    fn grid_shape() {
        let g = render_grid();
        let lines: Vec<&str> = g.lines().collect();
        assert_eq!(lines.len(), 14);
        assert!(lines[1..13].iter().all(|l| l.split(',').count() == 12));
        let [green, yellow, red] = tally();
        assert_eq!(green + yellow + red, 132);
    }
}
