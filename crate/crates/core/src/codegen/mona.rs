//! WS1S backend in the input syntax of the Mona tool.
//!
//! Every stream becomes one set of time points per message value
//! (`bump_true` holds the ticks at which `bump` carries `true`); epsilon is
//! membership in none of a port's sets. Every configuration of the
//! elaborated automaton becomes one set of time points, so variables are
//! encoded by splitting states.

use std::collections::{BTreeMap, BTreeSet};

use super::calculators::{calc_error, component_of, Calculator, Dialect};
use super::template::{Context, Node};
use super::CodegenError;
use crate::model::*;
use crate::semantics::{elaborate, Code, CompletionMode, ConfigId, Transducer, EPSILON};

pub struct Mona;

/// Suffix of a value in a set name: `true`, `STOP`, `3`, `m3` for `-3`.
pub fn value_suffix(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) if *i < 0 => format!("m{}", i.unsigned_abs()),
        Value::Int(i) => i.to_string(),
        Value::Enum(e) => e.clone(),
    }
}

pub fn set_name(port: &str, v: &Value) -> String {
    format!("{port}_{}", value_suffix(v))
}

impl Dialect for Mona {
    fn literal(&self, _: &Model, _: Ty, v: &Value) -> String {
        value_suffix(v)
    }

    fn port_read(&self, port: &str) -> String {
        port.to_string()
    }

    fn var_read(&self, var: &str) -> String {
        var.to_string()
    }

    fn not(&self, e: &str) -> String {
        format!("~({e})")
    }

    fn binary(&self, op: BinOp, l: &str, r: &str) -> String {
        format!("({l} {} {r})", op.symbol())
    }

    fn port_ref(&self, instance: Option<&str>, port: &str) -> String {
        match instance {
            Some(i) => format!("{i}_{port}"),
            None => port.to_string(),
        }
    }
}

pub const MONA_KEYWORDS: &[&str] = &[
    "all0", "all1", "all2", "allpos", "assert", "const", "defaultwhere1", "defaultwhere2", "else", "empty", "ex0",
    "ex1", "ex2", "execute", "export", "false", "guide", "if", "import", "in", "include", "inter", "lastpos", "let0",
    "let1", "let2", "macro", "max", "min", "notin", "pconst", "pred", "prefix", "restrict", "root", "sometype",
    "setminus", "sub", "then", "tree", "true", "type", "union", "universe", "var0", "var1", "var2", "variant",
    "where", "ws1s", "ws2s", "allTime", "t", "T", "timeline",
];

pub(crate) fn calculators() -> BTreeMap<&'static str, Calculator> {
    BTreeMap::from([
        ("monaSignature", mona_signature as Calculator),
        ("monaPredicate", mona_predicate),
        ("monaHasSpec", mona_has_spec),
    ])
}

fn check_identifiers<'a>(owner: &str, names: impl IntoIterator<Item = &'a str>) -> Result<(), CodegenError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if MONA_KEYWORDS.contains(&n) {
            return Err(CodegenError::NameCollision(format!("`{n}` in `{owner}` is reserved in WS1S output")));
        }
        if !seen.insert(n) {
            return Err(CodegenError::NameCollision(format!("two WS1S sets of `{owner}` are both named `{n}`")));
        }
    }
    Ok(())
}

fn value_sets(model: &Model, c: &ComponentType) -> Vec<String> {
    c.ports
        .iter()
        .flat_map(|p| model.message_domain(p.ty).into_iter().map(move |v| set_name(&p.name, &v)))
        .collect()
}

/// Parameter list and argument list of the predicate of the `impl` (or
/// the addressed) component.
fn mona_signature(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let target = node.get("impl").unwrap_or(node);
    let c = component_of(model, target, "monaSignature")?;
    let mut sets = value_sets(model, c);
    sets.push("allTime".into());
    ctx.set("parameters", Node::str(sets.iter().map(|s| format!("var2 {s}")).collect::<Vec<_>>().join(", ")));
    ctx.set("arguments", Node::str(sets.join(", ")));
    Ok(true)
}

fn mona_has_spec(_: &Model, node: &Node, _: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    Ok(node.get("spec").is_some())
}

/// Set name of every configuration: the state name, suffixed by the
/// variable valuation when the automaton has variables.
pub fn config_sets(t: &Transducer) -> Vec<String> {
    t.configs
        .iter()
        .map(|c| {
            let mut name = t.state_names[c.state].clone();
            for (var, v) in t.variable_names.iter().zip(&c.valuation) {
                name.push_str(&format!("_{var}_{}", value_suffix(v)));
            }
            name
        })
        .collect()
}

fn mona_predicate(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "monaPredicate")?;
    let id = ComponentId(node.index("component").unwrap_or_default());
    let mode: CompletionMode = node
        .get("mode")
        .and_then(Node::as_str)
        .unwrap_or("epsilon")
        .parse()
        .map_err(|e: String| calc_error("monaPredicate", e))?;
    let t = elaborate(model, id).map_err(|e| calc_error("monaPredicate", e.to_string()))?;
    let states = config_sets(&t);
    let params = value_sets(model, c);
    check_identifiers(&c.name, states.iter().chain(&params).map(String::as_str).chain([c.name.as_str()]))?;

    let iface = &t.interface;
    let outputs_at = |codes: &[Code], time: &str| -> Vec<String> {
        let mut parts = Vec::new();
        for (sig, &code) in iface.outputs.iter().zip(codes) {
            if code == EPSILON {
                parts.extend(sig.domain.iter().map(|v| format!("{time} notin {}", set_name(&sig.name, v))));
            } else {
                parts.push(format!("{time} in {}", set_name(&sig.name, &sig.domain[code as usize - 1])));
            }
        }
        parts
    };
    let pattern = |p: &[Option<Code>]| -> Vec<String> {
        iface
            .inputs
            .iter()
            .zip(p)
            .filter_map(|(sig, c)| c.map(|c| format!("t in {}", set_name(&sig.name, &sig.domain[c as usize - 1]))))
            .collect()
    };

    let mut state_constraints = vec![format!(
        "(all1 t: t in allTime => ({}))",
        states.iter().map(|s| format!("t in {s}")).collect::<Vec<_>>().join(" | ")
    )];
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            state_constraints.push(format!("(all1 t: ~(t in {a} & t in {b}))"));
        }
    }
    let mut port_constraints = Vec::new();
    for p in iface.inputs.iter().chain(&iface.outputs) {
        for (i, a) in p.domain.iter().enumerate() {
            for b in &p.domain[i + 1..] {
                port_constraints.push(format!("(all1 t: ~(t in {} & t in {}))", set_name(&p.name, a), set_name(&p.name, b)));
            }
        }
    }
    let mut initial = vec![format!("0 in {}", states[t.initial.0])];
    initial.extend(outputs_at(&t.initial_outputs, "0"));

    let mut disjuncts: Vec<String> = Vec::new();
    for s in &t.steps {
        let mut parts = vec![format!("t in {}", states[s.from.0])];
        parts.extend(pattern(&s.pattern));
        parts.push(format!("t+1 in {}", states[s.to.0]));
        parts.extend(outputs_at(&s.outputs, "t+1"));
        disjuncts.push(format!("({})", parts.join(" & ")));
    }
    for (ci, name) in states.iter().enumerate() {
        if !needs_completion(&t, ConfigId(ci)) {
            continue;
        }
        let patterns: BTreeSet<Vec<String>> = t.steps_from(ConfigId(ci)).iter().map(|s| pattern(&s.pattern)).collect();
        let mut parts = vec![format!("t in {name}")];
        parts.extend(patterns.iter().map(|p| format!("~({})", p.join(" & "))));
        match mode {
            CompletionMode::EpsilonSelfLoop => {
                parts.push(format!("t+1 in {}", states[ci]));
                parts.extend(outputs_at(&t.epsilon_outputs(), "t+1"));
            }
            // any successor state, any outputs
            CompletionMode::Chaos => {}
            CompletionMode::Reject => continue,
        }
        disjuncts.push(format!("({})", parts.join(" & ")));
    }
    if disjuncts.is_empty() {
        disjuncts.push("false".into());
    }
    let last = disjuncts.len() - 1;
    ctx.set("stateSets", Node::str(states.join(", ")));
    ctx.set("stateConstraints", Node::List(state_constraints.into_iter().map(Node::Str).collect()));
    ctx.set("portConstraints", Node::List(port_constraints.into_iter().map(Node::Str).collect()));
    ctx.set("initialConjunct", Node::str(format!("({})", initial.join(" & "))));
    ctx.set(
        "disjuncts",
        Node::List(
            disjuncts
                .into_iter()
                .enumerate()
                .map(|(i, d)| Node::map([("text", Node::Str(d)), ("sep", Node::str(if i < last { " |" } else { "" }))]))
                .collect(),
        ),
    );
    ctx.set("completion", Node::str(mode_name(mode)));
    Ok(true)
}

/// True unless some step of `config` has an all-epsilon pattern, i.e. is
/// enabled whatever the input.
fn needs_completion(t: &Transducer, config: ConfigId) -> bool {
    !t.steps_from(config).iter().any(|s| s.pattern.iter().all(Option::is_none))
}

pub fn mode_name(mode: CompletionMode) -> &'static str {
    match mode {
        CompletionMode::EpsilonSelfLoop => "epsilon",
        CompletionMode::Chaos => "chaos",
        CompletionMode::Reject => "reject",
    }
}
