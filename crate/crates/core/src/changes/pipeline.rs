//! Detection pipeline: identical → refactorings → argument changes → body-only.
//!
//! Each stage proposes candidate pairs, which are accepted greedily in order
//! of decreasing score, then base key, then descendant key. Accepted pairs
//! leave the pools, so no descendant method is claimed twice.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::similarity::{added, containment, similarity};
use super::{
    body_digest, ArgRenameEdit, ChangeDetail, ChangeKind, ChangeSet, DetectorConfig, Direction,
    MethodChange,
};
use crate::srcmodel::{Location, MethodInventory, MethodKey, MethodRecord, TokenKind};

/// Methods not yet paired on either side.
#[derive(Debug, Clone)]
pub struct Pools<'a> {
    pub ao: &'a MethodInventory,
    pub d: &'a MethodInventory,
    pub ao_free: BTreeSet<MethodKey>,
    pub d_free: BTreeSet<MethodKey>,
    /// Base key to descendant key for every accepted pair.
    pub matched: BTreeMap<MethodKey, MethodKey>,
    /// Base keys that had the same `(location, name)` somewhere in the descendant.
    d_names: BTreeSet<(Location, String)>,
}

impl<'a> Pools<'a> {
    pub fn new(ao: &'a MethodInventory, d: &'a MethodInventory) -> Self {
        Self {
            ao,
            d,
            ao_free: ao.records.keys().cloned().collect(),
            d_free: d.records.keys().cloned().collect(),
            matched: BTreeMap::new(),
            d_names: d
                .records
                .keys()
                .map(|k| (k.location(), k.name.clone()))
                .collect(),
        }
    }

    fn ao_rec(&self, k: &MethodKey) -> &'a MethodRecord {
        &self.ao.records[k]
    }

    fn d_rec(&self, k: &MethodKey) -> &'a MethodRecord {
        &self.d.records[k]
    }

    /// Free base methods whose key no longer exists in the descendant.
    fn ao_vanished(&self) -> Vec<&'a MethodRecord> {
        let (ao, d) = (self.ao, self.d);
        self.ao_free
            .iter()
            .filter(|k| !d.contains(k))
            .map(|k| &ao.records[k])
            .collect()
    }

    /// Free descendant methods without a base method of the same key.
    fn d_fresh(&self) -> Vec<&'a MethodRecord> {
        let (ao, d) = (self.ao, self.d);
        self.d_free
            .iter()
            .filter(|k| !ao.contains(k))
            .map(|k| &d.records[k])
            .collect()
    }

    /// The descendant method currently standing for base method `k`.
    fn counterpart_of(&self, k: &MethodKey) -> Option<&'a MethodRecord> {
        match self.matched.get(k) {
            Some(dk) => Some(self.d_rec(dk)),
            None if self.d_free.contains(k) => Some(self.d_rec(k)),
            None => None,
        }
    }
}

struct Candidate {
    score: f64,
    ao: MethodKey,
    order: MethodKey,
    consumes: Vec<MethodKey>,
    change: MethodChange,
}

fn accept(pools: &mut Pools<'_>, mut cands: Vec<Candidate>) -> Vec<MethodChange> {
    cands.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.ao.cmp(&b.ao))
            .then_with(|| a.order.cmp(&b.order))
    });
    let mut out = Vec::new();
    for c in cands {
        if !pools.ao_free.contains(&c.ao) || !c.consumes.iter().all(|k| pools.d_free.contains(k)) {
            continue;
        }
        pools.ao_free.remove(&c.ao);
        for k in &c.consumes {
            pools.d_free.remove(k);
        }
        if let Some(first) = c.consumes.first() {
            pools.matched.insert(c.ao.clone(), first.clone());
        }
        out.push(c.change);
    }
    out
}

fn texts(r: &MethodRecord) -> Vec<&str> {
    r.body_texts()
}

fn pair_change(
    a: &MethodRecord,
    b: &MethodRecord,
    kind: ChangeKind,
    detail: ChangeDetail,
) -> MethodChange {
    MethodChange {
        ao_signature: a.signature.clone(),
        kind,
        counterpart: Some(b.signature.clone()),
        body_also_changed: !a.body_equals(b),
        detail,
    }
}

/// Pair methods whose full signature and body token stream are unchanged.
pub fn detect_identical(pools: &mut Pools<'_>) -> Vec<MethodChange> {
    let mut out = Vec::new();
    let keys: Vec<MethodKey> = pools
        .ao_free
        .iter()
        .filter(|k| pools.d_free.contains(*k))
        .cloned()
        .collect();
    for k in keys {
        let (a, b) = (pools.ao_rec(&k), pools.d_rec(&k));
        if a.signature == b.signature && a.body_equals(b) {
            pools.ao_free.remove(&k);
            pools.d_free.remove(&k);
            pools.matched.insert(k.clone(), k);
            out.push(MethodChange::identical(&a.signature));
        }
    }
    out
}

/// Run the refactoring detectors in precedence order
/// move, rename, argument rename, argument reorder, inline, extract.
pub fn detect_refactorings(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut out = detect_moves(pools, cfg);
    out.extend(detect_renames(pools, cfg));
    out.extend(detect_arg_renames(pools, cfg));
    out.extend(detect_arg_reorders(pools, cfg));
    out.extend(detect_inlines(pools, cfg));
    out.extend(detect_extracts(pools, cfg));
    out
}

fn detect_moves(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut by_shape: HashMap<(&str, &[String], &str), Vec<&MethodRecord>> = HashMap::new();
    for b in pools.d_fresh() {
        let s = &b.signature;
        by_shape
            .entry((
                s.name.as_str(),
                s.param_types.as_slice(),
                s.return_type.as_str(),
            ))
            .or_default()
            .push(b);
    }
    let mut cands = Vec::new();
    for a in pools.ao_vanished() {
        let s = &a.signature;
        let Some(bs) = by_shape.get(&(
            s.name.as_str(),
            s.param_types.as_slice(),
            s.return_type.as_str(),
        )) else {
            continue;
        };
        for b in bs {
            if b.signature.location() == s.location() {
                continue;
            }
            let score = similarity(&texts(a), &texts(b));
            if score >= cfg.sim_threshold {
                let detail = ChangeDetail::Move {
                    to: b.signature.location(),
                };
                cands.push(Candidate {
                    score,
                    ao: a.key(),
                    order: b.key(),
                    consumes: vec![b.key()],
                    change: pair_change(a, b, ChangeKind::MethodMove, detail),
                });
            }
        }
    }
    accept(pools, cands)
}

fn detect_renames(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut by_shape: HashMap<(Location, &[String], &str), Vec<&MethodRecord>> = HashMap::new();
    for b in pools.d_fresh() {
        let s = &b.signature;
        by_shape
            .entry((
                s.location(),
                s.param_types.as_slice(),
                s.return_type.as_str(),
            ))
            .or_default()
            .push(b);
    }
    let mut cands = Vec::new();
    for a in pools.ao_vanished() {
        let s = &a.signature;
        let Some(bs) = by_shape.get(&(
            s.location(),
            s.param_types.as_slice(),
            s.return_type.as_str(),
        )) else {
            continue;
        };
        for b in bs {
            if b.signature.name == s.name {
                continue;
            }
            let score = similarity(&texts(a), &texts(b));
            if score >= cfg.sim_threshold {
                let detail = ChangeDetail::Rename {
                    new_name: b.signature.name.clone(),
                };
                cands.push(Candidate {
                    score,
                    ao: a.key(),
                    order: b.key(),
                    consumes: vec![b.key()],
                    change: pair_change(a, b, ChangeKind::MethodRename, detail),
                });
            }
        }
    }
    accept(pools, cands)
}

/// `(type, name)` pairs of a signature's parameters.
fn params(r: &MethodRecord) -> Vec<(&str, &str)> {
    r.signature
        .param_types
        .iter()
        .map(String::as_str)
        .zip(r.signature.param_names.iter().map(String::as_str))
        .collect()
}

/// Body of `a` with identifier tokens renamed through `map`.
fn renamed_body<'x>(a: &'x MethodRecord, map: &'x HashMap<&str, &str>) -> Vec<&'x str> {
    a.body_tokens
        .iter()
        .map(|t| match (t.kind, map.get(t.text.as_str())) {
            (TokenKind::Identifier, Some(new)) => *new,
            _ => t.text.as_str(),
        })
        .collect()
}

fn detect_arg_renames(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut cands = Vec::new();
    for k in pools.ao_free.iter().filter(|k| pools.d_free.contains(*k)) {
        let (a, b) = (pools.ao_rec(k), pools.d_rec(k));
        if a.signature.param_names == b.signature.param_names {
            continue;
        }
        let (mut pa, mut pb) = (params(a), params(b));
        pa.sort_unstable();
        pb.sort_unstable();
        if pa == pb {
            // a pure reorder of equally typed parameters
            continue;
        }
        let renames: Vec<ArgRenameEdit> = a
            .signature
            .param_names
            .iter()
            .zip(&b.signature.param_names)
            .enumerate()
            .filter(|(_, (o, n))| o != n)
            .map(|(index, (o, n))| ArgRenameEdit {
                index,
                old_name: o.clone(),
                new_name: n.clone(),
            })
            .collect();
        let map: HashMap<&str, &str> = a
            .signature
            .param_names
            .iter()
            .zip(&b.signature.param_names)
            .filter(|(o, n)| o != n)
            .map(|(o, n)| (o.as_str(), n.as_str()))
            .collect();
        let body = renamed_body(a, &map);
        let theirs = texts(b);
        let score = similarity(&body, &theirs);
        if score >= cfg.sim_threshold {
            let mut change = pair_change(
                a,
                b,
                ChangeKind::ArgRename,
                ChangeDetail::ArgRename { renames },
            );
            change.body_also_changed = !(a.body_present == b.body_present && body == theirs);
            cands.push(Candidate {
                score,
                ao: k.clone(),
                order: k.clone(),
                consumes: vec![k.clone()],
                change,
            });
        }
    }
    accept(pools, cands)
}

/// `permutation[new] == old` when `new` is a non-identity rearrangement of `old`.
fn param_permutation(old: &[(&str, &str)], new: &[(&str, &str)]) -> Option<Vec<usize>> {
    if old.len() != new.len() || old.len() < 2 {
        return None;
    }
    let mut used = vec![false; old.len()];
    let mut perm = Vec::with_capacity(new.len());
    for p in new {
        let i = old
            .iter()
            .enumerate()
            .position(|(i, q)| !used[i] && q == p)?;
        used[i] = true;
        perm.push(i);
    }
    perm.iter()
        .enumerate()
        .any(|(n, &o)| n != o)
        .then_some(perm)
}

fn detect_arg_reorders(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut by_shape: HashMap<(Location, &str, &str), Vec<&MethodRecord>> = HashMap::new();
    for b in pools.d_fresh() {
        let s = &b.signature;
        by_shape
            .entry((s.location(), s.name.as_str(), s.return_type.as_str()))
            .or_default()
            .push(b);
    }
    let mut cands = Vec::new();
    for a in pools.ao_vanished() {
        let s = &a.signature;
        let Some(bs) = by_shape.get(&(s.location(), s.name.as_str(), s.return_type.as_str()))
        else {
            continue;
        };
        for b in bs {
            cands.extend(reorder_candidate(a, b, cfg));
        }
    }
    // equally typed parameters swap without changing the key
    for k in pools.ao_free.iter().filter(|k| pools.d_free.contains(*k)) {
        cands.extend(reorder_candidate(pools.ao_rec(k), pools.d_rec(k), cfg));
    }
    accept(pools, cands)
}

fn reorder_candidate(
    a: &MethodRecord,
    b: &MethodRecord,
    cfg: &DetectorConfig,
) -> Option<Candidate> {
    let permutation = param_permutation(&params(a), &params(b))?;
    let score = similarity(&texts(a), &texts(b));
    (score >= cfg.sim_threshold).then(|| Candidate {
        score,
        ao: a.key(),
        order: b.key(),
        consumes: vec![b.key()],
        change: pair_change(
            a,
            b,
            ChangeKind::ArgReorder,
            ChangeDetail::ArgReorder { permutation },
        ),
    })
}

fn detect_inlines(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut cands = Vec::new();
    let inlinable: Vec<&MethodRecord> = pools
        .ao_free
        .iter()
        .map(|k| pools.ao_rec(k))
        .filter(|m| {
            !m.body_tokens.is_empty()
                && !pools
                    .d_names
                    .contains(&(m.signature.location(), m.signature.name.clone()))
        })
        .collect();
    for m1 in inlinable {
        let body = texts(m1);
        for caller in pools.ao.records.values() {
            if caller.key() == m1.key() || !caller.calls(&m1.signature.name) {
                continue;
            }
            let Some(target) = pools.counterpart_of(&caller.key()) else {
                continue;
            };
            let (old, new) = (texts(caller), texts(target));
            let gained: Vec<&str> = added(&old, &new).into_iter().copied().collect();
            let score = containment(&body, &gained);
            if score >= cfg.inline_threshold {
                cands.push(Candidate {
                    score,
                    ao: m1.key(),
                    order: target.key(),
                    consumes: Vec::new(),
                    change: MethodChange {
                        ao_signature: m1.signature.clone(),
                        kind: ChangeKind::MethodInline,
                        counterpart: None,
                        body_also_changed: score < 1.0,
                        detail: ChangeDetail::Inline { into: target.key() },
                    },
                });
            }
        }
    }
    accept(pools, cands)
}

fn detect_extracts(pools: &mut Pools<'_>, cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut cands = Vec::new();
    let fresh = pools.d_fresh();
    for k in pools.ao_free.iter().filter(|k| pools.d_free.contains(*k)) {
        let (m1, host) = (pools.ao_rec(k), pools.d_rec(k));
        let old = texts(m1);
        for m2 in &fresh {
            if m2.body_tokens.is_empty()
                || !host.calls(&m2.signature.name)
                || m1.calls(&m2.signature.name)
            {
                continue;
            }
            let score = containment(&texts(m2), &old);
            if score >= cfg.inline_threshold {
                let mut change = pair_change(
                    m1,
                    host,
                    ChangeKind::MethodExtract,
                    ChangeDetail::Extract {
                        extracted: m2.key(),
                    },
                );
                change.body_also_changed = score < 1.0;
                cands.push(Candidate {
                    score,
                    ao: k.clone(),
                    order: m2.key(),
                    consumes: vec![k.clone(), m2.key()],
                    change,
                });
            }
        }
    }
    accept(pools, cands)
}

/// Index and payload of a single-parameter difference, if that is all that changed.
fn single_param_edit(a: &MethodRecord, b: &MethodRecord) -> Option<(ChangeKind, ChangeDetail)> {
    let (ta, tb) = (&a.signature.param_types, &b.signature.param_types);
    let (na, nb) = (&a.signature.param_names, &b.signature.param_names);
    // inserting at `i` into `short` yields `long`; prefer positions where names line up too
    let insertion =
        |short: &[String], long: &[String], sn: &[String], ln: &[String]| -> Option<usize> {
            let fits = |i: usize| short[..i] == long[..i] && short[i..] == long[i + 1..];
            let names_fit = |i: usize| sn[..i] == ln[..i] && sn[i..] == ln[i + 1..];
            let positions: Vec<usize> = (0..long.len()).filter(|&i| fits(i)).collect();
            positions
                .iter()
                .copied()
                .find(|&i| names_fit(i))
                .or(positions.first().copied())
        };
    if tb.len() == ta.len() + 1 {
        let i = insertion(ta, tb, na, nb)?;
        return Some((
            ChangeKind::ArgAdd,
            ChangeDetail::ArgAdd {
                index: i,
                type_name: tb[i].clone(),
                name: nb[i].clone(),
            },
        ));
    }
    if ta.len() == tb.len() + 1 {
        let i = insertion(tb, ta, nb, na)?;
        return Some((
            ChangeKind::ArgRemove,
            ChangeDetail::ArgRemove {
                index: i,
                type_name: ta[i].clone(),
                name: na[i].clone(),
            },
        ));
    }
    if ta.len() == tb.len() {
        let diffs: Vec<usize> = (0..ta.len()).filter(|&i| ta[i] != tb[i]).collect();
        if let [i] = diffs[..] {
            return Some((
                ChangeKind::ArgTypeChange,
                ChangeDetail::ArgTypeChange {
                    index: i,
                    old_type: ta[i].clone(),
                    new_type: tb[i].clone(),
                },
            ));
        }
    }
    None
}

/// Pair methods whose parameter types differ by one insertion, deletion or substitution.
pub fn detect_argument_changes(pools: &mut Pools<'_>, _cfg: &DetectorConfig) -> Vec<MethodChange> {
    let mut by_shape: HashMap<(Location, &str, &str), Vec<&MethodRecord>> = HashMap::new();
    for b in pools.d_fresh() {
        let s = &b.signature;
        by_shape
            .entry((s.location(), s.name.as_str(), s.return_type.as_str()))
            .or_default()
            .push(b);
    }
    let mut cands = Vec::new();
    for a in pools.ao_vanished() {
        let s = &a.signature;
        let Some(bs) = by_shape.get(&(s.location(), s.name.as_str(), s.return_type.as_str()))
        else {
            continue;
        };
        for b in bs {
            if let Some((kind, detail)) = single_param_edit(a, b) {
                cands.push(Candidate {
                    score: similarity(&texts(a), &texts(b)),
                    ao: a.key(),
                    order: b.key(),
                    consumes: vec![b.key()],
                    change: pair_change(a, b, kind, detail),
                });
            }
        }
    }
    accept(pools, cands)
}

/// Pair methods with identical full signatures whose bodies differ.
pub fn detect_body_only(pools: &mut Pools<'_>) -> Vec<MethodChange> {
    let mut out = Vec::new();
    let keys: Vec<MethodKey> = pools
        .ao_free
        .iter()
        .filter(|k| pools.d_free.contains(*k))
        .cloned()
        .collect();
    for k in keys {
        let (a, b) = (pools.ao_rec(&k), pools.d_rec(&k));
        if a.signature != b.signature {
            continue;
        }
        pools.ao_free.remove(&k);
        pools.d_free.remove(&k);
        pools.matched.insert(k.clone(), k);
        let mut change = pair_change(
            a,
            b,
            ChangeKind::BodyOnly,
            ChangeDetail::BodyOnly {
                result_digest: body_digest(&b.body_tokens),
            },
        );
        change.body_also_changed = true;
        out.push(change);
    }
    out
}

/// Classify every base method of `ao` against descendant `d`.
pub fn build_change_set(
    ao: &MethodInventory,
    d: &MethodInventory,
    direction: Direction,
    cfg: &DetectorConfig,
) -> ChangeSet {
    let mut pools = Pools::new(ao, d);
    let mut changes = detect_identical(&mut pools);
    if cfg.refactorings {
        changes.extend(detect_refactorings(&mut pools, cfg));
    }
    changes.extend(detect_argument_changes(&mut pools, cfg));
    changes.extend(detect_body_only(&mut pools));
    let mut map: BTreeMap<MethodKey, MethodChange> = changes
        .into_iter()
        .map(|c| (c.ao_signature.key(), c))
        .collect();
    for k in &pools.ao_free {
        map.insert(k.clone(), MethodChange::unmatched(&ao.records[k].signature));
    }
    ChangeSet {
        direction,
        changes: map,
        added_in_d: pools.d_free,
    }
}
