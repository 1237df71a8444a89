//! Per-version method inventories.
//!
//! A file is lexed, then scanned for package, type and method structure
//! with balanced-brace tracking. Only signatures and body token streams are
//! kept; no names are resolved.

mod extract;
mod inventory;
pub mod lexer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use extract::{extract_methods, StructureError};
pub use inventory::{
    build_inventory, parse_source, source_files, FileIssue, InventoryError, InventoryOptions,
    MethodInventory, VersionLabel,
};
pub use lexer::{lex, LexError, Token, TokenKind};

/// Return type sentinel used for constructors.
pub const CONSTRUCTOR_RETURN: &str = "<init>";

/// Full signature of a method as declared, including parameter names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodSignature {
    pub package: String,
    pub type_path: Vec<String>,
    pub name: String,
    pub param_types: Vec<String>,
    pub param_names: Vec<String>,
    pub return_type: String,
}

impl MethodSignature {
    /// Identity of the method; parameter names do not take part.
    pub fn key(&self) -> MethodKey {
        MethodKey {
            package: self.package.clone(),
            type_path: self.type_path.clone(),
            name: self.name.clone(),
            param_types: self.param_types.clone(),
            return_type: self.return_type.clone(),
        }
    }

    pub fn is_constructor(&self) -> bool {
        self.return_type == CONSTRUCTOR_RETURN
    }

    pub fn location(&self) -> Location {
        Location {
            package: self.package.clone(),
            type_path: self.type_path.clone(),
        }
    }
}

impl fmt::Display for MethodSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}::{}::{}(",
            self.package,
            self.type_path.join("."),
            self.name
        )?;
        for (i, (ty, name)) in self.param_types.iter().zip(&self.param_names).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{ty} {name}")?;
        }
        write!(f, "):{}", self.return_type)
    }
}

/// Identity key of a method: `(package, type path, name, parameter types, return type)`.
///
/// Renders as `package::Outer.Inner::name(T1,T2):Ret`, which is also its
/// serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodKey {
    pub package: String,
    pub type_path: Vec<String>,
    pub name: String,
    pub param_types: Vec<String>,
    pub return_type: String,
}

impl MethodKey {
    pub fn location(&self) -> Location {
        Location {
            package: self.package.clone(),
            type_path: self.type_path.clone(),
        }
    }
}

impl fmt::Display for MethodKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}::{}::{}({}):{}",
            self.package,
            self.type_path.join("."),
            self.name,
            self.param_types.join(","),
            self.return_type
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed method key `{0}`")]
pub struct KeyParseError(pub String);

impl FromStr for MethodKey {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || KeyParseError(s.to_string());
        let (package, rest) = s.split_once("::").ok_or_else(err)?;
        let (types, rest) = rest.split_once("::").ok_or_else(err)?;
        let open = rest.find('(').ok_or_else(err)?;
        let name = &rest[..open];
        let close = rest.rfind("):").ok_or_else(err)?;
        if close < open || name.is_empty() || types.is_empty() {
            return Err(err());
        }
        let params = &rest[open + 1..close];
        let return_type = &rest[close + 2..];
        Ok(MethodKey {
            package: package.to_string(),
            type_path: types.split('.').map(str::to_string).collect(),
            name: name.to_string(),
            param_types: split_top_level(params),
            return_type: return_type.to_string(),
        })
    }
}

/// Split a comma-separated type list, ignoring commas nested in `<>`.
fn split_top_level(list: &str) -> Vec<String> {
    if list.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in list.char_indices() {
        match c {
            '<' | '(' | '[' => depth += 1,
            '>' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(list[start..i].to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(list[start..].to_string());
    out
}

impl Serialize for MethodKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MethodKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Declaring location of a method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub package: String,
    pub type_path: Vec<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.package, self.type_path.join("."))
    }
}

/// Byte offsets of the pieces of a method declaration in its source file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeclSpans {
    /// First token of the declaration (annotations and modifiers included).
    pub decl_start: usize,
    /// One past the closing `}` or `;`.
    pub decl_end: usize,
    pub name: usize,
    pub params_open: usize,
    pub params_close: usize,
    /// Byte range of each parameter declaration.
    pub params: Vec<(usize, usize)>,
    /// Offset of each parameter's name token.
    pub param_names: Vec<usize>,
    pub body_open: Option<usize>,
    pub body_close: Option<usize>,
}

/// One method of one version.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodRecord {
    pub signature: MethodSignature,
    pub body_tokens: Vec<Token>,
    pub body_present: bool,
    /// Path relative to the subsystem root, `/`-separated.
    pub file_path: String,
    pub start_line: u32,
    pub end_line: u32,
    pub spans: DeclSpans,
}

impl MethodRecord {
    pub fn key(&self) -> MethodKey {
        self.signature.key()
    }

    pub fn body_texts(&self) -> Vec<&str> {
        self.body_tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn body_equals(&self, other: &MethodRecord) -> bool {
        self.body_present == other.body_present
            && self.body_tokens.len() == other.body_tokens.len()
            && self
                .body_tokens
                .iter()
                .zip(&other.body_tokens)
                .all(|(a, b)| a.text == b.text)
    }

    /// True if the body contains a call-shaped use of `name` (`name (`).
    pub fn calls(&self, name: &str) -> bool {
        self.body_tokens
            .windows(2)
            .any(|w| w[0].kind == TokenKind::Identifier && w[0].text == name && w[1].is_punct('('))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_display_round_trips() {
        let key = MethodKey {
            package: "a.b".into(),
            type_path: vec!["Outer".into(), "Inner".into()],
            name: "f".into(),
            param_types: vec!["Map<String,List<Integer>>".into(), "int[]".into()],
            return_type: "void".into(),
        };
        let s = key.to_string();
        assert_eq!(
            s,
            "a.b::Outer.Inner::f(Map<String,List<Integer>>,int[]):void"
        );
        assert_eq!(s.parse::<MethodKey>().unwrap(), key);
    }

    #[test]
    fn key_without_package_or_params() {
        let key: MethodKey = "::C::C():<init>".parse().unwrap();
        assert_eq!(key.package, "");
        assert!(key.param_types.is_empty());
        assert_eq!(key.return_type, CONSTRUCTOR_RETURN);
    }

    #[test]
    fn malformed_keys_rejected() {
        for bad in ["", "a::b", "a::::f():v", "a::C::(int):v", "a::C::f"] {
            assert!(bad.parse::<MethodKey>().is_err(), "{bad}");
        }
    }
}
