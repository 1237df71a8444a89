//! Lexer for the Java-like source subset.
//!
//! Produces a comment- and whitespace-free token stream. Punctuation is
//! emitted one character per token so that generic brackets (`>>`) never
//! need to be split again by the structural parser.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Punctuation,
}

/// A single lexeme. `offset` is the byte offset of the lexeme in the source
/// text; it is used for source splicing and does not take part in equality
/// of body streams (those compare `text`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub offset: usize,
}

impl Token {
    pub fn is_ident(&self, text: &str) -> bool {
        self.kind == TokenKind::Identifier && self.text == text
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == text
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punctuation
            && self.text.len() == c.len_utf8()
            && self.text.starts_with(c)
    }

    /// Byte offset one past the end of the lexeme.
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct LexError {
    pub line: u32,
    pub reason: String,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
];

const LITERAL_WORDS: &[&str] = &["true", "false", "null"];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.bump();
        }
    }
}

/// Lex `source` into tokens.
pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        if cur.starts_with("//") {
            cur.eat_while(|c| c != '\n');
            continue;
        }
        if cur.starts_with("/*") {
            let line = cur.line;
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(LexError {
                        line,
                        reason: "unterminated block comment".into(),
                    });
                }
            }
            continue;
        }

        let start = cur.pos;
        let line = cur.line;
        let kind = if cur.starts_with("\"\"\"") {
            lex_text_block(&mut cur)?;
            TokenKind::Literal
        } else if c == '"' || c == '\'' {
            lex_quoted(&mut cur, c)?;
            TokenKind::Literal
        } else if c.is_ascii_digit()
            || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
        {
            lex_number(&mut cur);
            TokenKind::Literal
        } else if is_ident_start(c) {
            cur.eat_while(is_ident_part);
            let word = &source[start..cur.pos];
            if is_keyword(word) {
                TokenKind::Keyword
            } else if LITERAL_WORDS.contains(&word) {
                TokenKind::Literal
            } else {
                TokenKind::Identifier
            }
        } else {
            cur.bump();
            TokenKind::Punctuation
        };
        tokens.push(Token {
            kind,
            text: source[start..cur.pos].to_string(),
            line,
            offset: start,
        });
    }
    Ok(tokens)
}

fn lex_quoted(cur: &mut Cursor<'_>, quote: char) -> Result<(), LexError> {
    let line = cur.line;
    cur.bump();
    loop {
        match cur.bump() {
            Some('\\') => {
                if cur.bump().is_none() {
                    break;
                }
            }
            Some(c) if c == quote => return Ok(()),
            Some('\n') | None => break,
            Some(_) => {}
        }
    }
    let what = if quote == '"' { "string" } else { "character" };
    Err(LexError {
        line,
        reason: format!("unterminated {what} literal"),
    })
}

fn lex_text_block(cur: &mut Cursor<'_>) -> Result<(), LexError> {
    let line = cur.line;
    for _ in 0..3 {
        cur.bump();
    }
    loop {
        if cur.starts_with("\\") {
            cur.bump();
            cur.bump();
            continue;
        }
        if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                cur.bump();
            }
            return Ok(());
        }
        if cur.bump().is_none() {
            return Err(LexError {
                line,
                reason: "unterminated text block".into(),
            });
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>) {
    let hex = cur.starts_with("0x") || cur.starts_with("0X");
    if hex {
        cur.bump();
        cur.bump();
        cur.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
    } else {
        cur.eat_while(|c| c.is_ascii_digit() || c == '_');
        if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
            cur.bump();
            cur.eat_while(|c| c.is_ascii_digit() || c == '_');
        }
        if matches!(cur.peek(), Some('e' | 'E')) {
            let signed = matches!(cur.peek_at(1), Some('+' | '-'));
            let digit_at = if signed { 2 } else { 1 };
            if cur.peek_at(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                for _ in 0..=digit_at {
                    cur.bump();
                }
                cur.eat_while(|c| c.is_ascii_digit());
            }
        }
    }
    // type suffixes (L, f, d) and anything glued on
    cur.eat_while(is_ident_part);
}

/// Render tokens separated by single spaces.
pub fn render(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}
