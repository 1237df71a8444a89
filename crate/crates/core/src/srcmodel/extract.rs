//! Structural scan of a token stream: package, nested type declarations and
//! method declarations. Annotations and generics are carried verbatim.

use thiserror::Error;

use super::lexer::{Token, TokenKind};
use super::{DeclSpans, MethodRecord, MethodSignature, CONSTRUCTOR_RETURN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct StructureError {
    pub line: u32,
    pub reason: String,
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "default",
    "strictfp",
    "transient",
    "volatile",
];

/// Extract every method declared directly in a type body of `tokens`.
pub fn extract_methods(
    tokens: &[Token],
    file_path: &str,
) -> Result<Vec<MethodRecord>, StructureError> {
    let mut parser = Parser {
        toks: tokens,
        package: String::new(),
        file: file_path,
        out: Vec::new(),
    };
    parser.top_level()?;
    Ok(parser.out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TypeKind {
    Enum,
    Other,
}

struct Parser<'a> {
    toks: &'a [Token],
    package: String,
    file: &'a str,
    out: Vec<MethodRecord>,
}

struct Header {
    name_idx: usize,
    return_type: String,
    param_types: Vec<String>,
    param_names: Vec<String>,
    open_idx: usize,
    close_idx: usize,
    param_ranges: Vec<(usize, usize)>,
    param_name_idx: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn err(&self, idx: usize, reason: &str) -> StructureError {
        let line = self
            .toks
            .get(idx)
            .or(self.toks.last())
            .map_or(1, |t| t.line);
        StructureError {
            line,
            reason: reason.to_string(),
        }
    }

    fn top_level(&mut self) -> Result<(), StructureError> {
        let mut pos = 0;
        while pos < self.toks.len() {
            let t = &self.toks[pos];
            if t.is_keyword("package") {
                let end = self
                    .find_punct(pos, ';')
                    .ok_or_else(|| self.err(pos, "unterminated package declaration"))?;
                self.package = self.toks[pos + 1..end]
                    .iter()
                    .map(|t| t.text.as_str())
                    .collect();
                pos = end + 1;
            } else if t.is_keyword("import") {
                pos = self
                    .find_punct(pos, ';')
                    .ok_or_else(|| self.err(pos, "unterminated import"))?
                    + 1;
            } else if let Some(kind) = self.type_start(pos) {
                pos = self.type_decl(pos, kind, &[])?;
            } else if t.is_punct('(') {
                pos = self.matching(pos, '(', ')')? + 1;
            } else if t.is_punct('{') {
                pos = self.matching(pos, '{', '}')? + 1;
            } else if t.is_punct('}') {
                return Err(self.err(pos, "unbalanced closing brace"));
            } else {
                pos += 1;
            }
        }
        Ok(())
    }

    fn find_punct(&self, from: usize, c: char) -> Option<usize> {
        (from..self.toks.len()).find(|&i| self.toks[i].is_punct(c))
    }

    /// Index of the token closing the group opened at `open`.
    fn matching(&self, open: usize, o: char, c: char) -> Result<usize, StructureError> {
        let mut depth = 0usize;
        for i in open..self.toks.len() {
            let t = &self.toks[i];
            if t.is_punct(o) {
                depth += 1;
            } else if t.is_punct(c) {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
        }
        Err(self.err(open, &format!("unbalanced `{o}`")))
    }

    /// Is the token at `pos` a type-declaration keyword followed by a name?
    fn type_start(&self, pos: usize) -> Option<TypeKind> {
        let t = &self.toks[pos];
        let next_is_name = self
            .toks
            .get(pos + 1)
            .is_some_and(|n| n.kind == TokenKind::Identifier);
        if !next_is_name || (pos > 0 && self.toks[pos - 1].is_punct('.')) {
            return None;
        }
        if t.is_keyword("enum") {
            Some(TypeKind::Enum)
        } else if t.is_keyword("class") || t.is_keyword("interface") || t.is_ident("record") {
            Some(TypeKind::Other)
        } else {
            None
        }
    }

    /// Parse a type declaration whose keyword is at `kw`; returns the index after its body.
    fn type_decl(
        &mut self,
        kw: usize,
        kind: TypeKind,
        outer: &[String],
    ) -> Result<usize, StructureError> {
        let name = self.toks[kw + 1].text.clone();
        let mut pos = kw + 2;
        loop {
            let Some(t) = self.toks.get(pos) else {
                return Err(self.err(kw, "type declaration without body"));
            };
            if t.is_punct('(') {
                pos = self.matching(pos, '(', ')')? + 1;
            } else if t.is_punct('{') {
                break;
            } else if t.is_punct(';') || t.is_punct('}') {
                return Err(self.err(pos, "type declaration without body"));
            } else {
                pos += 1;
            }
        }
        let mut path = outer.to_vec();
        path.push(name);
        self.type_body(pos, kind, &path)
    }

    fn type_body(
        &mut self,
        open: usize,
        kind: TypeKind,
        path: &[String],
    ) -> Result<usize, StructureError> {
        let mut pos = open + 1;
        if kind == TypeKind::Enum {
            // enum constants, possibly with arguments or bodies
            loop {
                let Some(t) = self.toks.get(pos) else {
                    return Err(self.err(open, "unclosed enum body"));
                };
                if t.is_punct('(') {
                    pos = self.matching(pos, '(', ')')? + 1;
                } else if t.is_punct('{') {
                    pos = self.matching(pos, '{', '}')? + 1;
                } else if t.is_punct(';') {
                    pos += 1;
                    break;
                } else if t.is_punct('}') {
                    return Ok(pos + 1);
                } else {
                    pos += 1;
                }
            }
        }

        loop {
            let start = pos;
            let mut parens = 0usize;
            loop {
                let Some(t) = self.toks.get(pos) else {
                    return Err(self.err(open, "unclosed type body"));
                };
                if t.kind == TokenKind::Punctuation {
                    if t.is_punct('(') {
                        parens += 1;
                    } else if t.is_punct(')') {
                        parens = parens.saturating_sub(1);
                    } else if parens == 0 {
                        if t.is_punct('}') {
                            return Ok(pos + 1);
                        } else if t.is_punct(';') {
                            self.member_without_body(start, pos, path);
                            pos += 1;
                            break;
                        } else if t.is_punct('=') {
                            pos = self.skip_initializer(pos)?;
                            break;
                        } else if t.is_punct('{') {
                            pos = self.member_with_brace(start, pos, path)?;
                            break;
                        }
                    }
                }
                pos += 1;
            }
        }
    }

    /// Skip a field initializer starting at `=`; returns the index after its `;`.
    fn skip_initializer(&self, eq: usize) -> Result<usize, StructureError> {
        let mut pos = eq + 1;
        while let Some(t) = self.toks.get(pos) {
            if t.is_punct('(') {
                pos = self.matching(pos, '(', ')')?;
            } else if t.is_punct('{') {
                pos = self.matching(pos, '{', '}')?;
            } else if t.is_punct('[') {
                pos = self.matching(pos, '[', ']')?;
            } else if t.is_punct(';') {
                return Ok(pos + 1);
            } else if t.is_punct('}') {
                // missing `;` before the end of the type body
                return Ok(pos);
            }
            pos += 1;
        }
        Err(self.err(eq, "unterminated field initializer"))
    }

    fn member_with_brace(
        &mut self,
        start: usize,
        brace: usize,
        path: &[String],
    ) -> Result<usize, StructureError> {
        let mut parens = 0usize;
        for i in start..brace {
            let t = &self.toks[i];
            if t.is_punct('(') {
                parens += 1;
            } else if t.is_punct(')') {
                parens = parens.saturating_sub(1);
            } else if parens == 0 {
                if let Some(kind) = self.type_start(i) {
                    let mut inner = path.to_vec();
                    inner.push(self.toks[i + 1].text.clone());
                    return self.type_body(brace, kind, &inner);
                }
            }
        }
        let close = self.matching(brace, '{', '}')?;
        if let Some(header) = self.method_header(start, brace) {
            self.emit(path, start, header, Some((brace, close)));
        }
        Ok(close + 1)
    }

    fn member_without_body(&mut self, start: usize, semi: usize, path: &[String]) {
        if start == semi {
            return;
        }
        if let Some(header) = self.method_header(start, semi) {
            self.emit(path, start, header, None);
        }
    }

    /// Indices in `start..end` that are not part of an annotation.
    fn strip_annotations(&self, start: usize, end: usize) -> Vec<usize> {
        let mut kept = Vec::new();
        let mut i = start;
        while i < end {
            let t = &self.toks[i];
            let next_is_name = i + 1 < end && self.toks[i + 1].kind == TokenKind::Identifier;
            if t.is_punct('@') && next_is_name {
                i += 2;
                while i + 1 < end
                    && self.toks[i].is_punct('.')
                    && self.toks[i + 1].kind == TokenKind::Identifier
                {
                    i += 2;
                }
                if i < end && self.toks[i].is_punct('(') {
                    i = match self.matching(i, '(', ')') {
                        Ok(close) => close + 1,
                        Err(_) => end,
                    };
                }
            } else {
                kept.push(i);
                i += 1;
            }
        }
        kept
    }

    /// Interpret `start..end` as a method header, if it is one.
    fn method_header(&self, start: usize, end: usize) -> Option<Header> {
        let kept = self.strip_annotations(start, end);
        let p = kept.iter().position(|&i| self.toks[i].is_punct('('))?;
        if p == 0 {
            return None;
        }
        let name_idx = kept[p - 1];
        if self.toks[name_idx].kind != TokenKind::Identifier {
            return None;
        }
        let open_idx = kept[p];
        let close_idx = self.matching(open_idx, '(', ')').ok()?;
        if close_idx >= end {
            return None;
        }

        let mut prefix: &[usize] = &kept[..p - 1];
        while let Some((&first, rest)) = prefix.split_first() {
            let t = &self.toks[first];
            if t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()) {
                prefix = rest;
            } else {
                break;
            }
        }
        if let Some(&first) = prefix.first() {
            if self.toks[first].is_punct('<') {
                let mut depth = 0i32;
                let mut consumed = 0;
                for (n, &i) in prefix.iter().enumerate() {
                    if self.toks[i].is_punct('<') {
                        depth += 1;
                    } else if self.toks[i].is_punct('>') {
                        depth -= 1;
                    }
                    if depth == 0 {
                        consumed = n + 1;
                        break;
                    }
                }
                if consumed == 0 {
                    return None;
                }
                prefix = &prefix[consumed..];
            }
        }
        if prefix.iter().any(|&i| {
            let t = &self.toks[i];
            t.kind == TokenKind::Literal
                || (t.kind == TokenKind::Keyword && !is_type_keyword(&t.text))
                || t.is_punct('(')
                || t.is_punct('=')
        }) {
            return None;
        }
        let return_type = if prefix.is_empty() {
            CONSTRUCTOR_RETURN.to_string()
        } else {
            prefix.iter().map(|&i| self.toks[i].text.as_str()).collect()
        };

        let mut header = Header {
            name_idx,
            return_type,
            param_types: Vec::new(),
            param_names: Vec::new(),
            open_idx,
            close_idx,
            param_ranges: Vec::new(),
            param_name_idx: Vec::new(),
        };
        for (from, to) in self.split_params(open_idx + 1, close_idx) {
            let kept: Vec<usize> = self
                .strip_annotations(from, to)
                .into_iter()
                .filter(|&i| !self.toks[i].is_keyword("final"))
                .collect();
            let mut dims = 0;
            let mut last = kept.len();
            while last >= 2
                && self.toks[kept[last - 1]].is_punct(']')
                && self.toks[kept[last - 2]].is_punct('[')
            {
                dims += 1;
                last -= 2;
            }
            if last < 2 {
                return None;
            }
            let name_tok = &self.toks[kept[last - 1]];
            if name_tok.is_keyword("this") {
                // receiver parameter
                continue;
            }
            if name_tok.kind != TokenKind::Identifier {
                return None;
            }
            let mut ty: String = kept[..last - 1]
                .iter()
                .map(|&i| self.toks[i].text.as_str())
                .collect();
            ty.push_str(&"[]".repeat(dims));
            header.param_types.push(ty);
            header.param_names.push(name_tok.text.clone());
            header.param_ranges.push((from, to));
            header.param_name_idx.push(kept[last - 1]);
        }
        Some(header)
    }

    /// Comma-separated parameter token ranges within `from..to`.
    fn split_params(&self, from: usize, to: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if from >= to {
            return out;
        }
        let mut depth = 0i32;
        let mut start = from;
        for i in from..to {
            let t = &self.toks[i];
            if t.kind != TokenKind::Punctuation {
                continue;
            }
            match t.text.as_str() {
                "<" | "(" | "[" => depth += 1,
                ">" | ")" | "]" => depth -= 1,
                "," if depth == 0 => {
                    out.push((start, i));
                    start = i + 1;
                }
                _ => {}
            }
        }
        out.push((start, to));
        out
    }

    fn emit(&mut self, path: &[String], start: usize, h: Header, body: Option<(usize, usize)>) {
        let toks = self.toks;
        let end_idx = body.map_or_else(
            || self.find_punct(h.close_idx, ';').unwrap_or(h.close_idx),
            |(_, c)| c,
        );
        let spans = DeclSpans {
            decl_start: toks[start].offset,
            decl_end: toks[end_idx].end(),
            name: toks[h.name_idx].offset,
            params_open: toks[h.open_idx].offset,
            params_close: toks[h.close_idx].offset,
            params: h
                .param_ranges
                .iter()
                .map(|&(a, b)| (toks[a].offset, toks[b - 1].end()))
                .collect(),
            param_names: h.param_name_idx.iter().map(|&i| toks[i].offset).collect(),
            body_open: body.map(|(o, _)| toks[o].offset),
            body_close: body.map(|(_, c)| toks[c].offset),
        };
        let body_tokens = body
            .map(|(o, c)| toks[o + 1..c].to_vec())
            .unwrap_or_default();
        self.out.push(MethodRecord {
            signature: MethodSignature {
                package: self.package.clone(),
                type_path: path.to_vec(),
                name: toks[h.name_idx].text.clone(),
                param_types: h.param_types,
                param_names: h.param_names,
                return_type: h.return_type,
            },
            body_tokens,
            body_present: body.is_some(),
            file_path: self.file.to_string(),
            start_line: toks[start].line,
            end_line: toks[end_idx].line,
            spans,
        });
    }
}

/// Primitive type keywords that may appear in a return type.
fn is_type_keyword(word: &str) -> bool {
    matches!(
        word,
        "boolean"
            | "byte"
            | "char"
            | "short"
            | "int"
            | "long"
            | "float"
            | "double"
            | "void"
            | "extends"
            | "super"
    )
}
