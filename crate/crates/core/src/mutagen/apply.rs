use std::collections::{BTreeMap, BTreeSet};

use super::{MutagenError, Mutated, Mutation, MutationOp};
use crate::changes::{
    body_digest, ArgRenameEdit, ChangeDetail, ChangeKind, ChangeSet, Direction, MethodChange,
};
use crate::srcmodel::{
    lex, parse_source, Location, MethodInventory, MethodKey, MethodRecord, Token, TokenKind,
    VersionLabel,
};

struct Edit {
    start: usize,
    end: usize,
    text: String,
    owner: MethodKey,
}

/// Expected classification of one target.
struct Planned {
    kind: ChangeKind,
    d_key: Option<MethodKey>,
    detail: ChangeDetail,
    /// `None` means "compare the bodies".
    body_changed: Option<bool>,
    extracted: Option<MethodKey>,
}

impl Planned {
    fn new(kind: ChangeKind, d_key: Option<MethodKey>, detail: ChangeDetail) -> Self {
        Self {
            kind,
            d_key,
            detail,
            body_changed: None,
            extracted: None,
        }
    }
}

struct Context<'a> {
    seed: &'a MethodInventory,
    files: &'a BTreeMap<String, String>,
    edits: BTreeMap<String, Vec<Edit>>,
    /// New files created by moves: path to (location, method texts).
    new_files: BTreeMap<String, (Location, Vec<String>)>,
    planned: BTreeMap<MethodKey, Planned>,
    /// Inline call sites: caller to inlined method.
    callers: BTreeMap<MethodKey, MethodKey>,
    produced: BTreeSet<MethodKey>,
}

fn is_identifier(s: &str) -> bool {
    matches!(lex(s).as_deref(), Ok([t]) if t.kind == TokenKind::Identifier)
}

/// Type text as it appears in method keys.
fn normalize_type(s: &str) -> Option<String> {
    let toks = lex(s).ok()?;
    (!toks.is_empty() && toks[0].kind != TokenKind::Punctuation)
        .then(|| toks.iter().map(|t| t.text.as_str()).collect())
}

fn prev_is_dot(body: &[Token], i: usize) -> bool {
    i > 0 && body[i - 1].is_punct('.')
}

/// Token index ranges (inclusive) of the top-level statements of a body.
pub(crate) fn top_level_statements(body: &[Token]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in body.iter().enumerate() {
        if t.kind == TokenKind::Punctuation {
            match t.text.as_str() {
                "(" | "{" | "[" => depth += 1,
                ")" | "}" | "]" => depth -= 1,
                _ => {}
            }
        }
        if depth != 0 {
            continue;
        }
        let continues = |next: Option<&Token>| match next {
            Some(n) if n.is_punct(';') => true,
            Some(n) if n.kind == TokenKind::Keyword => {
                matches!(n.text.as_str(), "else" | "catch" | "finally")
                    || (n.text == "while" && body[start].text == "do")
            }
            _ => false,
        };
        if t.is_punct(';') || (t.is_punct('}') && !continues(body.get(i + 1))) {
            out.push((start, i));
            start = i + 1;
        }
    }
    out
}

impl<'a> Context<'a> {
    fn invalid(&self, key: &MethodKey, op: &MutationOp, reason: impl Into<String>) -> MutagenError {
        MutagenError::InvalidMutation {
            key: Box::new(key.clone()),
            op: op.name(),
            reason: reason.into(),
        }
    }

    fn edit(
        &mut self,
        file: &str,
        start: usize,
        end: usize,
        text: impl Into<String>,
        owner: &MethodKey,
    ) {
        self.edits.entry(file.to_string()).or_default().push(Edit {
            start,
            end,
            text: text.into(),
            owner: owner.clone(),
        });
    }

    fn src(&self, r: &MethodRecord) -> &'a str {
        &self.files[&r.file_path]
    }

    /// Reserve a key the mutation creates; it must not exist yet.
    fn claim(&mut self, m: &Mutation, d_key: &MethodKey) -> Result<(), MutagenError> {
        if d_key == &m.target {
            return Ok(());
        }
        if self.seed.contains(d_key) || !self.produced.insert(d_key.clone()) {
            return Err(self.invalid(
                &m.target,
                &m.op,
                format!("result {d_key} collides with another method"),
            ));
        }
        Ok(())
    }

    fn name_taken(&self, loc: &Location, name: &str) -> bool {
        self.seed
            .records
            .keys()
            .any(|k| k.name == name && &k.location() == loc)
            || self
                .produced
                .iter()
                .any(|k| k.name == name && &k.location() == loc)
    }

    fn plan(&mut self, m: &Mutation) -> Result<(), MutagenError> {
        let seed = self.seed;
        let r = &seed.records[&m.target];
        let key = &m.target;
        let sig = &r.signature;
        let sp = &r.spans;
        let n = sig.param_types.len();
        let needs_body = matches!(
            m.op,
            MutationOp::Inline | MutationOp::Extract { .. } | MutationOp::BodyOnly { .. }
        );
        if needs_body && !r.body_present {
            return Err(self.invalid(key, &m.op, "method has no body"));
        }
        let planned = match &m.op {
            MutationOp::Delete => {
                self.edit(&r.file_path, sp.decl_start, sp.decl_end, "", key);
                Planned::new(ChangeKind::Unmatched, None, ChangeDetail::None)
            }
            MutationOp::BodyOnly { statement } => {
                if lex(statement).map_or(true, |t| t.is_empty()) {
                    return Err(self.invalid(key, &m.op, "statement is empty or does not lex"));
                }
                let at = sp.body_open.expect("checked above") + 1;
                self.edit(&r.file_path, at, at, format!(" {statement}"), key);
                let mut p =
                    Planned::new(ChangeKind::BodyOnly, Some(key.clone()), ChangeDetail::None);
                p.body_changed = Some(true);
                p
            }
            MutationOp::Rename { new_name } => {
                if sig.is_constructor() || !is_identifier(new_name) || new_name == &sig.name {
                    return Err(self.invalid(key, &m.op, format!("cannot rename to `{new_name}`")));
                }
                if self.name_taken(&sig.location(), new_name) {
                    return Err(self.invalid(
                        key,
                        &m.op,
                        format!("`{new_name}` already exists in the type"),
                    ));
                }
                let d_key = MethodKey {
                    name: new_name.clone(),
                    ..key.clone()
                };
                self.claim(m, &d_key)?;
                self.edit(
                    &r.file_path,
                    sp.name,
                    sp.name + sig.name.len(),
                    new_name.clone(),
                    key,
                );
                Planned::new(
                    ChangeKind::MethodRename,
                    Some(d_key),
                    ChangeDetail::Rename {
                        new_name: new_name.clone(),
                    },
                )
            }
            MutationOp::Move {
                to_package,
                to_type,
            } => self.plan_move(m, r, to_package, to_type)?,
            MutationOp::ArgRename { index, new_name } => {
                let index = *index;
                if index >= n || !is_identifier(new_name) || sig.param_names.contains(new_name) {
                    return Err(self.invalid(key, &m.op, "bad index or name"));
                }
                let old = &sig.param_names[index];
                if r.body_tokens.iter().any(|t| &t.text == new_name) {
                    return Err(self.invalid(
                        key,
                        &m.op,
                        format!("`{new_name}` already occurs in the body"),
                    ));
                }
                self.edit(
                    &r.file_path,
                    sp.param_names[index],
                    sp.param_names[index] + old.len(),
                    new_name.clone(),
                    key,
                );
                for (i, t) in r.body_tokens.iter().enumerate() {
                    if t.kind == TokenKind::Identifier
                        && &t.text == old
                        && !prev_is_dot(&r.body_tokens, i)
                    {
                        self.edit(&r.file_path, t.offset, t.end(), new_name.clone(), key);
                    }
                }
                let renames = vec![ArgRenameEdit {
                    index,
                    old_name: old.clone(),
                    new_name: new_name.clone(),
                }];
                let mut p = Planned::new(
                    ChangeKind::ArgRename,
                    Some(key.clone()),
                    ChangeDetail::ArgRename { renames },
                );
                p.body_changed = Some(false);
                p
            }
            MutationOp::ArgReorder { permutation } => {
                let mut seen = permutation.clone();
                seen.sort_unstable();
                let identity = permutation.iter().enumerate().all(|(i, &p)| i == p);
                if n < 2 || seen != (0..n).collect::<Vec<_>>() || identity {
                    return Err(self.invalid(
                        key,
                        &m.op,
                        "not a non-identity permutation of the parameters",
                    ));
                }
                let src = self.src(r);
                let text: Vec<&str> = permutation
                    .iter()
                    .map(|&o| &src[sp.params[o].0..sp.params[o].1])
                    .collect();
                let d_key = MethodKey {
                    param_types: permutation
                        .iter()
                        .map(|&o| sig.param_types[o].clone())
                        .collect(),
                    ..key.clone()
                };
                self.claim(m, &d_key)?;
                self.edit(
                    &r.file_path,
                    sp.params[0].0,
                    sp.params[n - 1].1,
                    text.join(", "),
                    key,
                );
                let detail = ChangeDetail::ArgReorder {
                    permutation: permutation.clone(),
                };
                Planned::new(ChangeKind::ArgReorder, Some(d_key), detail)
            }
            MutationOp::ArgAdd {
                index,
                type_name,
                name,
            } => {
                let index = *index;
                let norm = normalize_type(type_name);
                if index > n
                    || !is_identifier(name)
                    || sig.param_names.contains(name)
                    || norm.is_none()
                {
                    return Err(self.invalid(key, &m.op, "bad index, type or name"));
                }
                let norm = norm.expect("checked");
                let mut types = sig.param_types.clone();
                types.insert(index, norm.clone());
                let d_key = MethodKey {
                    param_types: types,
                    ..key.clone()
                };
                self.claim(m, &d_key)?;
                let decl = format!("{type_name} {name}");
                if n == 0 {
                    self.edit(
                        &r.file_path,
                        sp.params_open + 1,
                        sp.params_open + 1,
                        decl,
                        key,
                    );
                } else if index < n {
                    let at = sp.params[index].0;
                    self.edit(&r.file_path, at, at, format!("{decl}, "), key);
                } else {
                    let at = sp.params[n - 1].1;
                    self.edit(&r.file_path, at, at, format!(", {decl}"), key);
                }
                let detail = ChangeDetail::ArgAdd {
                    index,
                    type_name: norm,
                    name: name.clone(),
                };
                Planned::new(ChangeKind::ArgAdd, Some(d_key), detail)
            }
            MutationOp::ArgRemove { index } => {
                let index = *index;
                if index >= n {
                    return Err(self.invalid(key, &m.op, "index out of range"));
                }
                let mut types = sig.param_types.clone();
                types.remove(index);
                let d_key = MethodKey {
                    param_types: types,
                    ..key.clone()
                };
                self.claim(m, &d_key)?;
                let (start, end) = if n == 1 {
                    sp.params[0]
                } else if index + 1 < n {
                    (sp.params[index].0, sp.params[index + 1].0)
                } else {
                    (sp.params[index - 1].1, sp.params[index].1)
                };
                self.edit(&r.file_path, start, end, "", key);
                let detail = ChangeDetail::ArgRemove {
                    index,
                    type_name: sig.param_types[index].clone(),
                    name: sig.param_names[index].clone(),
                };
                Planned::new(ChangeKind::ArgRemove, Some(d_key), detail)
            }
            MutationOp::ArgTypeChange { index, new_type } => {
                let index = *index;
                let norm = normalize_type(new_type);
                if index >= n || norm.is_none() || norm.as_ref() == Some(&sig.param_types[index]) {
                    return Err(self.invalid(key, &m.op, "bad index or unchanged type"));
                }
                let norm = norm.expect("checked");
                let mut types = sig.param_types.clone();
                types[index] = norm.clone();
                let d_key = MethodKey {
                    param_types: types,
                    ..key.clone()
                };
                self.claim(m, &d_key)?;
                self.edit(
                    &r.file_path,
                    sp.params[index].0,
                    sp.param_names[index],
                    format!("{new_type} "),
                    key,
                );
                let detail = ChangeDetail::ArgTypeChange {
                    index,
                    old_type: sig.param_types[index].clone(),
                    new_type: norm,
                };
                Planned::new(ChangeKind::ArgTypeChange, Some(d_key), detail)
            }
            MutationOp::Inline => self.plan_inline(m, r)?,
            MutationOp::Extract { new_name } => self.plan_extract(m, r, new_name)?,
        };
        self.planned.insert(key.clone(), planned);
        Ok(())
    }

    fn plan_move(
        &mut self,
        m: &Mutation,
        r: &MethodRecord,
        to_package: &str,
        to_type: &str,
    ) -> Result<Planned, MutagenError> {
        let key = &m.target;
        let type_path: Vec<String> = to_type.split('.').map(str::to_string).collect();
        let package_ok = to_package.is_empty() || to_package.split('.').all(is_identifier);
        if !package_ok || !type_path.iter().all(|s| is_identifier(s)) {
            return Err(self.invalid(key, &m.op, "bad destination"));
        }
        let loc = Location {
            package: to_package.to_string(),
            type_path,
        };
        if loc == r.signature.location() {
            return Err(self.invalid(key, &m.op, "destination is the current type"));
        }
        if self.name_taken(&loc, &r.signature.name) {
            return Err(self.invalid(
                key,
                &m.op,
                format!("`{}` already exists in {loc}", r.signature.name),
            ));
        }
        let d_key = MethodKey {
            package: loc.package.clone(),
            type_path: loc.type_path.clone(),
            ..key.clone()
        };
        self.claim(m, &d_key)?;
        let text = self.src(r)[r.spans.decl_start..r.spans.decl_end].to_string();
        self.edit(&r.file_path, r.spans.decl_start, r.spans.decl_end, "", key);
        let host = self
            .seed
            .records
            .values()
            .filter(|h| h.signature.location() == loc)
            .max_by_key(|h| (h.file_path.clone(), h.spans.decl_end));
        if let Some(host) = host {
            let (file, at) = (host.file_path.clone(), host.spans.decl_end);
            self.edit(&file, at, at, format!("\n\n    {text}"), key);
        } else {
            if loc.type_path.len() != 1 {
                return Err(self.invalid(key, &m.op, "a new destination type must be top-level"));
            }
            let dir = r
                .file_path
                .rsplit_once('/')
                .map_or(String::new(), |(d, _)| format!("{d}/"));
            let file = format!("{dir}{}.java", loc.type_path[0]);
            if self.files.contains_key(&file) && !self.new_files.contains_key(&file) {
                return Err(self.invalid(
                    key,
                    &m.op,
                    format!("{file} exists but declares no methods of {loc}"),
                ));
            }
            let entry = self
                .new_files
                .entry(file)
                .or_insert_with(|| (loc.clone(), Vec::new()));
            if entry.0 != loc {
                return Err(self.invalid(key, &m.op, "two new types map to one file"));
            }
            entry.1.push(text);
        }
        Ok(Planned::new(
            ChangeKind::MethodMove,
            Some(d_key),
            ChangeDetail::Move { to: loc },
        ))
    }

    fn plan_inline(&mut self, m: &Mutation, r: &'a MethodRecord) -> Result<Planned, MutagenError> {
        let key = &m.target;
        let sig = &r.signature;
        let has_return = r
            .body_tokens
            .iter()
            .any(|t| t.kind == TokenKind::Keyword && t.text == "return");
        if sig.return_type != "void" || has_return || r.body_tokens.is_empty() || r.calls(&sig.name)
        {
            return Err(self.invalid(
                key,
                &m.op,
                "only non-recursive void methods without return statements inline",
            ));
        }
        let overloaded = self
            .seed
            .records
            .keys()
            .filter(|k| k.name == sig.name && k.location() == sig.location())
            .count()
            > 1;
        if overloaded {
            return Err(self.invalid(
                key,
                &m.op,
                "overloaded names cannot be inlined unambiguously",
            ));
        }
        let callers: Vec<&'a MethodRecord> = self
            .seed
            .records
            .values()
            .filter(|c| c.key() != *key && c.calls(&sig.name))
            .collect();
        if callers.is_empty() {
            return Err(self.invalid(key, &m.op, "no call sites"));
        }
        let mut substituted_any = false;
        for c in &callers {
            let toks = &c.body_tokens;
            for i in 0..toks.len() {
                if !(toks[i].kind == TokenKind::Identifier
                    && toks[i].text == sig.name
                    && toks.get(i + 1).is_some_and(|t| t.is_punct('(')))
                {
                    continue;
                }
                let start = if prev_is_dot(toks, i) {
                    if i >= 2 && toks[i - 2].text == "this" {
                        i - 2
                    } else {
                        return Err(self.invalid(
                            key,
                            &m.op,
                            format!("qualified call in {}", c.key()),
                        ));
                    }
                } else {
                    i
                };
                let at_statement =
                    start == 0 || [';', '{', '}'].iter().any(|&p| toks[start - 1].is_punct(p));
                let close = matching_paren(toks, i + 1);
                let ok = at_statement
                    && close.is_some_and(|cl| toks.get(cl + 1).is_some_and(|t| t.is_punct(';')));
                if !ok {
                    return Err(self.invalid(
                        key,
                        &m.op,
                        format!("call in {} is not a statement", c.key()),
                    ));
                }
                let close = close.expect("checked");
                let args = split_args(&toks[i + 2..close]);
                if args.len() != sig.param_names.len() {
                    return Err(self.invalid(key, &m.op, format!("arity mismatch in {}", c.key())));
                }
                let mut out: Vec<String> = Vec::new();
                for (j, t) in r.body_tokens.iter().enumerate() {
                    let param = sig.param_names.iter().position(|p| p == &t.text);
                    match param {
                        Some(p)
                            if t.kind == TokenKind::Identifier
                                && !prev_is_dot(&r.body_tokens, j) =>
                        {
                            let arg: Vec<&str> = args[p].iter().map(|a| a.text.as_str()).collect();
                            substituted_any |= arg != [t.text.as_str()];
                            if arg.len() == 1 {
                                out.push(arg[0].to_string());
                            } else {
                                out.push(format!("({})", arg.join(" ")));
                            }
                        }
                        _ => out.push(t.text.clone()),
                    }
                }
                self.edit(
                    &c.file_path,
                    toks[start].offset,
                    toks[close + 1].end(),
                    out.join(" "),
                    key,
                );
            }
            self.callers.insert(c.key(), key.clone());
        }
        self.edit(&r.file_path, r.spans.decl_start, r.spans.decl_end, "", key);
        let into = callers.iter().map(|c| c.key()).min().expect("non-empty");
        let mut p = Planned::new(
            ChangeKind::MethodInline,
            None,
            ChangeDetail::Inline { into },
        );
        p.body_changed = Some(substituted_any);
        Ok(p)
    }

    fn plan_extract(
        &mut self,
        m: &Mutation,
        r: &MethodRecord,
        new_name: &str,
    ) -> Result<Planned, MutagenError> {
        let key = &m.target;
        let loc = r.signature.location();
        if !is_identifier(new_name) || self.name_taken(&loc, new_name) || r.calls(new_name) {
            return Err(self.invalid(
                key,
                &m.op,
                format!("`{new_name}` is not a fresh method name"),
            ));
        }
        let stmts = top_level_statements(&r.body_tokens);
        if stmts.len() < 2 {
            return Err(self.invalid(key, &m.op, "needs at least two statements"));
        }
        let k = stmts.len() / 2;
        let body = &r.body_tokens;
        let (start, end) = (body[stmts[0].0].offset, body[stmts[k - 1].1].end());
        let moved = &self.src(r)[start..end];
        let extracted = MethodKey {
            package: loc.package.clone(),
            type_path: loc.type_path.clone(),
            name: new_name.to_string(),
            param_types: Vec::new(),
            return_type: "void".to_string(),
        };
        self.claim(m, &extracted)?;
        let decl = format!("\n\n    private void {new_name}() {{\n        {moved}\n    }}");
        self.edit(&r.file_path, start, end, format!("{new_name}();"), key);
        self.edit(&r.file_path, r.spans.decl_end, r.spans.decl_end, decl, key);
        let mut p = Planned::new(
            ChangeKind::MethodExtract,
            Some(key.clone()),
            ChangeDetail::Extract {
                extracted: extracted.clone(),
            },
        );
        p.body_changed = Some(false);
        p.extracted = Some(extracted);
        Ok(p)
    }

    /// Apply every edit; overlapping edits are a conflict.
    fn splice(&mut self) -> Result<BTreeMap<String, String>, MutagenError> {
        let mut out = self.files.clone();
        for (path, (loc, methods)) in &self.new_files {
            let mut text = String::new();
            if !loc.package.is_empty() {
                text.push_str(&format!("package {};\n\n", loc.package));
            }
            text.push_str(&format!("class {} {{\n", loc.type_path[0]));
            for m in methods {
                text.push_str(&format!("\n    {m}\n"));
            }
            text.push_str("}\n");
            out.insert(path.clone(), text);
        }
        for (path, edits) in &mut self.edits {
            edits.sort_by_key(|e| (e.start, e.end));
            for w in edits.windows(2) {
                if w[0].end > w[1].start {
                    return Err(MutagenError::ConflictingMutations {
                        key: Box::new(w[1].owner.clone()),
                        reason: format!("edit overlaps one made for {}", w[0].owner),
                    });
                }
            }
            let text = out.get_mut(path).expect("edits only touch existing files");
            for e in edits.iter().rev() {
                text.replace_range(e.start..e.end, &e.text);
            }
        }
        Ok(out)
    }
}

fn matching_paren(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is_punct('(') {
            depth += 1;
        } else if t.is_punct(')') {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

fn split_args(toks: &[Token]) -> Vec<&[Token]> {
    if toks.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" | "<" if t.kind == TokenKind::Punctuation => depth += 1,
            ")" | "]" | "}" | ">" if t.kind == TokenKind::Punctuation => depth -= 1,
            "," if depth == 0 => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&toks[start..]);
    out
}

/// Apply `mutations` to in-memory sources keyed by relative path.
pub fn mutate_sources(
    files: &BTreeMap<String, String>,
    mutations: &[Mutation],
) -> Result<Mutated, MutagenError> {
    let mut records = Vec::new();
    for (path, text) in files {
        records.extend(parse_source(path, text).map_err(|i| MutagenError::Seed {
            path: i.path,
            reason: i.reason,
        })?);
    }
    let seed = MethodInventory::from_records(VersionLabel::Ao, records);
    let mut targets = BTreeSet::new();
    for m in mutations {
        if !seed.contains(&m.target) {
            return Err(MutagenError::TargetMissing(Box::new(m.target.clone())));
        }
        if !targets.insert(m.target.clone()) {
            return Err(MutagenError::ConflictingMutations {
                key: Box::new(m.target.clone()),
                reason: "targeted twice".into(),
            });
        }
    }
    let mut cx = Context {
        seed: &seed,
        files,
        edits: BTreeMap::new(),
        new_files: BTreeMap::new(),
        planned: BTreeMap::new(),
        callers: BTreeMap::new(),
        produced: BTreeSet::new(),
    };
    for m in mutations {
        cx.plan(m)?;
    }
    for (caller, callee) in &cx.callers {
        if targets.contains(caller) {
            return Err(MutagenError::ConflictingMutations {
                key: Box::new(callee.clone()),
                reason: format!("call site in {caller}, which is mutated too"),
            });
        }
    }
    let out = cx.splice()?;

    let mut d_records = Vec::new();
    for (path, text) in &out {
        d_records.extend(parse_source(path, text).map_err(|i| MutagenError::Seed {
            path: i.path,
            reason: i.reason,
        })?);
    }
    let d = MethodInventory::from_records(VersionLabel::Cm, d_records);
    if let Some(dup) = d.duplicates.first() {
        return Err(MutagenError::ConflictingMutations {
            key: Box::new(dup.clone()),
            reason: "declared twice after mutation".into(),
        });
    }
    let lost = |k: &MethodKey| MutagenError::ConflictingMutations {
        key: Box::new(k.clone()),
        reason: "result not found after re-parsing".into(),
    };

    let mut changes = BTreeMap::new();
    let mut claimed = BTreeSet::new();
    for (key, rec) in &seed.records {
        let change = if let Some(p) = cx.planned.get(key) {
            if let Some(x) = &p.extracted {
                d.get(x).ok_or_else(|| lost(x))?;
                claimed.insert(x.clone());
            }
            match &p.d_key {
                Some(dk) => {
                    let drec = d.get(dk).ok_or_else(|| lost(dk))?;
                    claimed.insert(dk.clone());
                    let detail = match p.kind {
                        ChangeKind::BodyOnly => ChangeDetail::BodyOnly {
                            result_digest: body_digest(&drec.body_tokens),
                        },
                        _ => p.detail.clone(),
                    };
                    MethodChange {
                        ao_signature: rec.signature.clone(),
                        kind: p.kind,
                        counterpart: Some(drec.signature.clone()),
                        body_also_changed: p.body_changed.unwrap_or_else(|| !rec.body_equals(drec)),
                        detail,
                    }
                }
                None => MethodChange {
                    ao_signature: rec.signature.clone(),
                    kind: p.kind,
                    counterpart: None,
                    body_also_changed: p.body_changed.unwrap_or(false),
                    detail: p.detail.clone(),
                },
            }
        } else {
            let drec = d.get(key).ok_or_else(|| lost(key))?;
            claimed.insert(key.clone());
            if cx.callers.contains_key(key) {
                MethodChange {
                    ao_signature: rec.signature.clone(),
                    kind: ChangeKind::BodyOnly,
                    counterpart: Some(drec.signature.clone()),
                    body_also_changed: true,
                    detail: ChangeDetail::BodyOnly {
                        result_digest: body_digest(&drec.body_tokens),
                    },
                }
            } else if drec.signature == rec.signature && drec.body_equals(rec) {
                MethodChange::identical(&rec.signature)
            } else {
                return Err(MutagenError::ConflictingMutations {
                    key: Box::new(key.clone()),
                    reason: "changed without being targeted".into(),
                });
            }
        };
        changes.insert(key.clone(), change);
    }
    let added_in_d = d
        .records
        .keys()
        .filter(|k| !claimed.contains(*k))
        .cloned()
        .collect();
    Ok(Mutated {
        files: out,
        expected: ChangeSet {
            direction: Direction::AoToCm,
            changes,
            added_in_d,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changes::{build_change_set, DetectorConfig};

    const SEED: &str = r#"package app;

class Shop {
    private int total;

    void checkout(int amount, String label) {
        total += amount;
        audit(label, amount);
        log.info("checkout " + label);
        notifyAll(amount);
        history.add(label);
    }

    void audit(String who, int value) {
        ledger.write(who);
        ledger.write(value);
        ledger.flush("audit-entry");
    }

    int price(int base, long factor) {
        int scaled = base * 3;
        scaled = scaled + (int) factor;
        return scaled - discount(base);
    }

    void reset() {
        total = 0;
        history.clear();
        log.info("reset called");
    }
}
"#;

    fn seed() -> BTreeMap<String, String> {
        BTreeMap::from([("app/Shop.java".to_string(), SEED.to_string())])
    }

    fn key(s: &str) -> MethodKey {
        s.parse().unwrap()
    }

    fn run(muts: Vec<Mutation>) -> Mutated {
        mutate_sources(&seed(), &muts).unwrap()
    }

    fn m(target: &str, op: MutationOp) -> Mutation {
        Mutation {
            target: key(target),
            op,
        }
    }

    /// The pipeline must reproduce the expected set for every single mutation.
    fn agrees(mutated: &Mutated) {
        let ao = MethodInventory::from_sources(
            VersionLabel::Ao,
            seed().iter().map(|(p, t)| (p.as_str(), t.as_str())),
        );
        let d = MethodInventory::from_sources(
            VersionLabel::Cm,
            mutated.files.iter().map(|(p, t)| (p.as_str(), t.as_str())),
        );
        assert!(d.issues.is_empty(), "{:?}", d.issues);
        let actual = build_change_set(&ao, &d, Direction::AoToCm, &DetectorConfig::default());
        for (k, e) in &mutated.expected.changes {
            assert_eq!(
                actual.changes[k].kind,
                e.kind,
                "{k}\n{}",
                mutated.files.values().cloned().collect::<String>()
            );
        }
        assert_eq!(actual.added_in_d, mutated.expected.added_in_d);
    }

    #[test]
    fn empty_plan_is_identity() {
        let out = run(vec![]);
        assert_eq!(out.files, seed());
        assert!(out
            .expected
            .changes
            .values()
            .all(|c| c.kind == ChangeKind::Identical));
    }

    #[test]
    fn rename() {
        let out = run(vec![m(
            "app::Shop::reset():void",
            MutationOp::Rename {
                new_name: "clearAll".into(),
            },
        )]);
        assert!(out.files["app/Shop.java"].contains("void clearAll()"));
        let c = &out.expected.changes[&key("app::Shop::reset():void")];
        assert_eq!(c.kind, ChangeKind::MethodRename);
        assert_eq!(c.counterpart.as_ref().unwrap().name, "clearAll");
        agrees(&out);
    }

    #[test]
    fn move_to_new_type() {
        let out = run(vec![m(
            "app::Shop::reset():void",
            MutationOp::Move {
                to_package: "app".into(),
                to_type: "Store".into(),
            },
        )]);
        assert!(out.files["app/Store.java"].starts_with("package app;\n\nclass Store {"));
        assert!(!out.files["app/Shop.java"].contains("reset"));
        agrees(&out);
    }

    #[test]
    fn argument_edits() {
        for op in [
            MutationOp::ArgRename {
                index: 0,
                new_name: "quantity".into(),
            },
            MutationOp::ArgReorder {
                permutation: vec![1, 0],
            },
            MutationOp::ArgAdd {
                index: 1,
                type_name: "boolean".into(),
                name: "gift".into(),
            },
            MutationOp::ArgRemove { index: 1 },
            MutationOp::ArgTypeChange {
                index: 0,
                new_type: "long".into(),
            },
        ] {
            let out = run(vec![m("app::Shop::checkout(int,String):void", op.clone())]);
            agrees(&out);
        }
        let out = run(vec![m(
            "app::Shop::checkout(int,String):void",
            MutationOp::ArgRename {
                index: 0,
                new_name: "qty".into(),
            },
        )]);
        assert!(out.files["app/Shop.java"].contains("void checkout(int qty, String label)"));
        assert!(out.files["app/Shop.java"].contains("total += qty;"));
        let out = run(vec![m(
            "app::Shop::price(int,long):int",
            MutationOp::ArgRemove { index: 0 },
        )]);
        assert!(out.files["app/Shop.java"].contains("int price(long factor)"));
    }

    #[test]
    fn inline_and_extract() {
        let out = run(vec![m(
            "app::Shop::audit(String,int):void",
            MutationOp::Inline,
        )]);
        let text = &out.files["app/Shop.java"];
        assert!(text.contains("ledger . write ( label ) ;"), "{text}");
        assert!(!text.contains("void audit"));
        assert_eq!(
            out.expected.changes[&key("app::Shop::checkout(int,String):void")].kind,
            ChangeKind::BodyOnly
        );
        agrees(&out);

        let out = run(vec![m(
            "app::Shop::checkout(int,String):void",
            MutationOp::Extract {
                new_name: "prepare".into(),
            },
        )]);
        let text = &out.files["app/Shop.java"];
        assert!(text.contains("private void prepare() {\n        total += amount;\n        audit(label, amount);\n    }"), "{text}");
        agrees(&out);
    }

    #[test]
    fn body_only_and_delete() {
        let out = run(vec![
            m(
                "app::Shop::reset():void",
                MutationOp::BodyOnly {
                    statement: "counter++;".into(),
                },
            ),
            m("app::Shop::price(int,long):int", MutationOp::Delete),
        ]);
        assert_eq!(out.expected.kind_counts()[ChangeKind::BodyOnly.row()], 1);
        assert_eq!(out.expected.kind_counts()[ChangeKind::Unmatched.row()], 1);
        agrees(&out);
    }

    #[test]
    fn errors() {
        let e = mutate_sources(&seed(), &[m("app::Shop::nope():void", MutationOp::Delete)])
            .unwrap_err();
        assert!(matches!(e, MutagenError::TargetMissing(_)));
        let e = mutate_sources(
            &seed(),
            &[
                m("app::Shop::reset():void", MutationOp::Delete),
                m("app::Shop::reset():void", MutationOp::Inline),
            ],
        )
        .unwrap_err();
        assert!(matches!(e, MutagenError::ConflictingMutations { .. }));
        let e = mutate_sources(
            &seed(),
            &[
                m("app::Shop::audit(String,int):void", MutationOp::Inline),
                m(
                    "app::Shop::checkout(int,String):void",
                    MutationOp::Rename {
                        new_name: "pay".into(),
                    },
                ),
            ],
        )
        .unwrap_err();
        assert!(matches!(e, MutagenError::ConflictingMutations { .. }));
        let e = mutate_sources(
            &seed(),
            &[m("app::Shop::price(int,long):int", MutationOp::Inline)],
        )
        .unwrap_err();
        assert!(matches!(e, MutagenError::InvalidMutation { .. }));
    }

    #[test]
    fn statements_split_at_top_level() {
        let toks = lex("if (a) { b(); } else { c(); } x = new int[] {1, 2}; do { y(); } while (z); try { q(); } catch (E e) { }").unwrap();
        let st = top_level_statements(&toks);
        assert_eq!(st.len(), 4);
    }
}
