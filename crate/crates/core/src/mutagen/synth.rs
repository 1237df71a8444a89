//! Seeded synthetic source trees and random mutation plans.
//!
//! Every generated method has a globally unique name and a body of distinct
//! tokens, so single mutations are unambiguous for the detectors.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::apply::top_level_statements;
use super::{Mutation, MutationOp};
use crate::srcmodel::{
    parse_source, Location, MethodInventory, MethodRecord, TokenKind, VersionLabel,
};

const VERBS: [&str; 12] = [
    "load", "store", "parse", "apply", "check", "render", "merge", "send", "build", "scan", "sync",
    "trim",
];
const NOUNS: [&str; 10] = [
    "Cache", "Entry", "Frame", "Token", "Batch", "Route", "Layer", "Index", "Queue", "Slot",
];
const CLASSES: [&str; 8] = [
    "Account", "Widget", "Session", "Report", "Channel", "Buffer", "Ledger", "Sensor",
];
const PARAM_TYPES: [&str; 6] = ["int", "long", "String", "boolean", "double", "List<String>"];
const PARAM_NAMES: [&str; 8] = [
    "count", "label", "flag", "limit", "value", "items", "offset", "key",
];

#[derive(Debug, Clone)]
pub struct SeedOptions {
    pub packages: usize,
    pub classes_per_package: usize,
    pub methods_per_class: usize,
    /// Written at the tree root when set, making the tree one subsystem.
    pub marker: Option<String>,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            packages: 2,
            classes_per_package: 2,
            methods_per_class: 6,
            marker: None,
        }
    }
}

struct Method {
    name: String,
    ret: &'static str,
    params: Vec<(&'static str, &'static str)>,
    tag: usize,
}

fn literal(ty: &str, rng: &mut ChaCha8Rng, tag: usize) -> String {
    match ty {
        "int" => rng.random_range(1..500).to_string(),
        "long" => format!("{}L", rng.random_range(1..9000)),
        "String" => format!("\"arg{tag}x{}\"", rng.random_range(0..99)),
        "boolean" => rng.random_bool(0.5).to_string(),
        "double" => format!("{}.5", rng.random_range(0..50)),
        _ => "java.util.Collections.emptyList()".to_string(),
    }
}

fn statement(m: &Method, j: usize, rng: &mut ChaCha8Rng) -> String {
    let t = m.tag;
    let arg = m
        .params
        .choose(rng)
        .map_or_else(|| format!("seed{t}"), |p| p.1.to_string());
    match rng.random_range(0..5) {
        0 => format!(
            "int v{t}n{j} = {} * hash{t}({arg});",
            rng.random_range(2..97)
        ),
        1 => format!("sink{t}.record(\"{}-{j}\", {arg});", m.name),
        2 => format!(
            "if (gate{t}.open{j}({arg})) {{ tally{t}.bump({}); }}",
            rng.random_range(1..9)
        ),
        3 => format!(
            "for (int i{t}n{j} = 0; i{t}n{j} < {}; i{t}n{j}++) {{ acc{t}.add(i{t}n{j}); }}",
            rng.random_range(2..20)
        ),
        _ => format!("trace{t}.mark{j}(\"{}\", {arg});", m.name),
    }
}

/// Generate a seed tree keyed by relative path.
pub fn generate_seed(seed: u64, opts: &SeedOptions) -> BTreeMap<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut files = BTreeMap::new();
    let mut tag = 0;
    let mut class_names: Vec<&str> = CLASSES.to_vec();
    class_names.shuffle(&mut rng);
    for p in 0..opts.packages {
        let package = format!("org.sample.p{p}");
        for c in 0..opts.classes_per_package {
            let class = format!(
                "{}{}",
                class_names[(p * opts.classes_per_package + c) % CLASSES.len()],
                p * 10 + c
            );
            let mut methods = Vec::new();
            for _ in 0..opts.methods_per_class {
                tag += 1;
                let name = format!(
                    "{}{}{tag}",
                    VERBS.choose(&mut rng).unwrap(),
                    NOUNS.choose(&mut rng).unwrap()
                );
                let ret = if rng.random_bool(0.6) {
                    "void"
                } else {
                    ["int", "String", "boolean"]
                        .choose(&mut rng)
                        .copied()
                        .unwrap()
                };
                let mut names: Vec<&str> = PARAM_NAMES.to_vec();
                names.shuffle(&mut rng);
                let n = rng.random_range(0..=3);
                let params = (0..n)
                    .map(|i| (*PARAM_TYPES.choose(&mut rng).unwrap(), names[i]))
                    .collect();
                methods.push(Method {
                    name,
                    ret,
                    params,
                    tag,
                });
            }
            let mut text = format!(
                "package {package};\n\nimport java.util.List;\n\npublic class {class} {{\n"
            );
            for (i, m) in methods.iter().enumerate() {
                let mut body: Vec<String> = (0..rng.random_range(3..=6))
                    .map(|j| statement(m, j, &mut rng))
                    .collect();
                // call a later void method of the same class now and then
                if let Some(callee) = methods[i + 1..].iter().find(|c| c.ret == "void") {
                    if rng.random_bool(0.5) {
                        let args: Vec<String> = callee
                            .params
                            .iter()
                            .map(|(ty, _)| literal(ty, &mut rng, m.tag))
                            .collect();
                        let at = rng.random_range(0..=body.len());
                        body.insert(at, format!("{}({});", callee.name, args.join(", ")));
                    }
                }
                match m.ret {
                    "void" => {}
                    "int" => {
                        body.push(format!("return v{}n0 + {};", m.tag, rng.random_range(1..9)))
                    }
                    "String" => body.push(format!("return \"{}-out\";", m.name)),
                    _ => body.push(format!("return seed{} > 0;", m.tag)),
                }
                if m.ret == "int" && !body[0].starts_with(&format!("int v{}n0", m.tag)) {
                    body.insert(0, format!("int v{}n0 = {};", m.tag, rng.random_range(1..9)));
                }
                let params: Vec<String> =
                    m.params.iter().map(|(t, n)| format!("{t} {n}")).collect();
                let vis = ["public ", "", "protected ", "private "]
                    .choose(&mut rng)
                    .unwrap();
                text.push_str(&format!(
                    "\n    {vis}{} {}({}) {{\n",
                    m.ret,
                    m.name,
                    params.join(", ")
                ));
                for s in &body {
                    text.push_str(&format!("        {s}\n"));
                }
                text.push_str("    }\n");
            }
            text.push_str("}\n");
            files.insert(format!("src/org/sample/p{p}/{class}.java"), text);
        }
    }
    if let Some(marker) = &opts.marker {
        files.insert(marker.clone(), "<manifest/>\n".to_string());
    }
    files
}

fn inventory(files: &BTreeMap<String, String>) -> MethodInventory {
    let records = files
        .iter()
        .filter(|(p, _)| p.ends_with(".java"))
        .flat_map(|(p, t)| parse_source(p, t).unwrap_or_default());
    MethodInventory::from_records(VersionLabel::Ao, records)
}

fn callers<'a>(inv: &'a MethodInventory, m: &MethodRecord) -> Vec<&'a MethodRecord> {
    inv.records
        .values()
        .filter(|c| c.key() != m.key() && c.calls(&m.signature.name))
        .collect()
}

fn inlinable(inv: &MethodInventory, m: &MethodRecord) -> bool {
    m.signature.return_type == "void"
        && !m.body_tokens.is_empty()
        && !m
            .body_tokens
            .iter()
            .any(|t| t.kind == TokenKind::Keyword && t.text == "return")
        && !callers(inv, m).is_empty()
}

/// The mutation kinds a random plan draws from.
pub const PLAN_KINDS: [&str; 11] = [
    "move",
    "rename",
    "inline",
    "extract",
    "arg-rename",
    "arg-reorder",
    "arg-add",
    "arg-remove",
    "arg-type-change",
    "body-only",
    "delete",
];

/// A plan with at most one mutation per kind, each on a different method,
/// skipping kinds no remaining method supports.
pub fn random_plan(files: &BTreeMap<String, String>, seed: u64, kinds: &[&str]) -> Vec<Mutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d);
    let inv = inventory(files);
    let all: Vec<&MethodRecord> = inv.records.values().collect();
    let locations: BTreeSet<Location> = all.iter().map(|m| m.signature.location()).collect();
    let mut used: BTreeSet<_> = BTreeSet::new();
    let mut order: Vec<&str> = kinds.to_vec();
    order.shuffle(&mut rng);
    // inline first so its callers are reserved before other kinds pick targets
    order.sort_by_key(|k| *k != "inline");
    let mut plan = Vec::new();
    for (i, kind) in order.iter().enumerate() {
        let eligible: Vec<&&MethodRecord> = all
            .iter()
            .filter(|m| !used.contains(&m.key()))
            .filter(|m| {
                let n = m.signature.param_types.len();
                match *kind {
                    "inline" => {
                        inlinable(&inv, m)
                            && callers(&inv, m).iter().all(|c| !used.contains(&c.key()))
                    }
                    "extract" => top_level_statements(&m.body_tokens).len() >= 2,
                    "arg-reorder" => {
                        n >= 2
                            && m.signature
                                .param_types
                                .iter()
                                .collect::<BTreeSet<_>>()
                                .len()
                                == n
                    }
                    "arg-rename" | "arg-remove" | "arg-type-change" => n >= 1,
                    _ => true,
                }
            })
            .collect();
        let Some(m) = eligible.choose(&mut rng) else {
            continue;
        };
        let sig = &m.signature;
        let n = sig.param_types.len();
        let tag = format!("{}{i}", seed % 1000);
        let op = match *kind {
            "move" => {
                let others: Vec<&Location> =
                    locations.iter().filter(|l| **l != sig.location()).collect();
                match others.choose(&mut rng) {
                    Some(l) if rng.random_bool(0.7) => MutationOp::Move {
                        to_package: l.package.clone(),
                        to_type: l.type_path.join("."),
                    },
                    _ => MutationOp::Move {
                        to_package: sig.package.clone(),
                        to_type: format!("Relocated{tag}"),
                    },
                }
            }
            "rename" => MutationOp::Rename {
                new_name: format!("{}Renamed{tag}", sig.name),
            },
            "inline" => {
                for c in callers(&inv, m) {
                    used.insert(c.key());
                }
                MutationOp::Inline
            }
            "extract" => MutationOp::Extract {
                new_name: format!("extracted{tag}"),
            },
            "arg-rename" => MutationOp::ArgRename {
                index: rng.random_range(0..n),
                new_name: format!("renamed{tag}"),
            },
            "arg-reorder" => {
                let mut p: Vec<usize> = (0..n).collect();
                while p.iter().enumerate().all(|(i, &x)| i == x) {
                    p.shuffle(&mut rng);
                }
                MutationOp::ArgReorder { permutation: p }
            }
            "arg-add" => MutationOp::ArgAdd {
                index: rng.random_range(0..=n),
                type_name: PARAM_TYPES.choose(&mut rng).unwrap().to_string(),
                name: format!("extra{tag}"),
            },
            "arg-remove" => MutationOp::ArgRemove {
                index: rng.random_range(0..n),
            },
            "arg-type-change" => {
                let index = rng.random_range(0..n);
                let choices: Vec<&str> = PARAM_TYPES
                    .iter()
                    .copied()
                    .filter(|t| t.replace(' ', "") != sig.param_types[index])
                    .collect();
                MutationOp::ArgTypeChange {
                    index,
                    new_type: choices.choose(&mut rng).unwrap().to_string(),
                }
            }
            "body-only" => MutationOp::BodyOnly {
                statement: format!("audit{tag}.touch(\"{}\");", sig.name),
            },
            "delete" => MutationOp::Delete,
            other => panic!("unknown mutation kind {other}"),
        };
        used.insert(m.key());
        plan.push(Mutation {
            target: m.key(),
            op,
        });
    }
    plan
}
