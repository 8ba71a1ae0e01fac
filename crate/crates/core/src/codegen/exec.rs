//! Executable backend: one Python class per component on top of the
//! runtime library, plus enumerations and a command-line harness.
//!
//! Contract with the runtime module `runtime`:
//! - `runtime.Component` creates a port object `self._<port>` for every name
//!   in `IN_PORTS + OUT_PORTS`, calls `init()` once and `compute()` once per
//!   tick; ports offer `getCurrentValue`, `setCurrentValue`, `setNextValue`.
//! - `runtime.Composed` calls `build()`, which registers children with
//!   `self.add(...)` and wires ports with `self.connect(source, [targets])`.
//! - `runtime.create(type, default_class, instance)` is the factory hook for
//!   hand-written replacements of library components.
//! - `runtime.clamp(value, lo, hi)` saturates integers.
//! - `runtime.main(components, argv)` runs
//!   `--root C --inputs in.json --ticks N [--out out.json]`.
//!
//! Attribute names owned by the runtime start with `rt_`.

use std::collections::{BTreeMap, BTreeSet};

use super::calculators::{component_of, literal_type, Calculator, Dialect};
use super::template::{Context, Node};
use super::CodegenError;
use crate::model::*;

pub struct Python;

impl Dialect for Python {
    fn literal(&self, model: &Model, ty: Ty, v: &Value) -> String {
        match v {
            Value::Bool(true) => "True".into(),
            Value::Bool(false) => "False".into(),
            Value::Int(i) => i.to_string(),
            Value::Enum(name) => {
                let ty = if matches!(ty, Ty::Enum(_)) { ty } else { literal_type(model, v) };
                match ty {
                    Ty::Enum(id) => format!("{}.{name}", model.type_def(id).name),
                    _ => format!("{name:?}"),
                }
            }
        }
    }

    fn port_read(&self, port: &str) -> String {
        format!("self._{port}.getCurrentValue()")
    }

    fn var_read(&self, var: &str) -> String {
        format!("self._{var}")
    }

    fn not(&self, e: &str) -> String {
        format!("(not {e})")
    }

    fn binary(&self, op: BinOp, l: &str, r: &str) -> String {
        format!("({l} {} {r})", op.symbol())
    }

    fn port_ref(&self, instance: Option<&str>, port: &str) -> String {
        match instance {
            Some(i) => format!("self.sub_{i}._{port}"),
            None => format!("self._{port}"),
        }
    }

    fn clamp(&self, e: String, ty: Ty) -> String {
        match ty {
            Ty::Int { lo, hi } => format!("runtime.clamp({e}, {lo}, {hi})"),
            _ => e,
        }
    }
}

pub(crate) const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield", "runtime", "datatypes", "main",
];

pub(crate) fn calculators() -> BTreeMap<&'static str, Calculator> {
    BTreeMap::from([
        ("pyBranch", py_branch as Calculator),
        ("pyAssignments", py_assignments),
        ("pyCompute", py_compute),
        ("pyImports", py_imports),
        ("pyTypes", py_types),
    ])
}

/// `if` for a component's first transition, `elif` afterwards.
fn py_branch(_: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let first = node.index("transition") == Some(0);
    ctx.set("branch", Node::str(if first { "if" } else { "elif" }));
    Ok(first)
}

/// One simultaneous assignment statement for all variables of a transition.
fn py_assignments(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "pyAssignments")?;
    let a = c.automaton().expect("atomic");
    let t = &a.transitions[node.index("transition").unwrap_or_default()];
    let targets: Vec<String> = t.assignments.iter().map(|(v, _)| d.var_read(&a.variables[*v].name)).collect();
    let values: Vec<String> = t
        .assignments
        .iter()
        .map(|(v, e)| {
            let ty = a.variables[*v].ty;
            let text = d.expr(model, c, e, Some(ty));
            if matches!((ty, e), (Ty::Int { .. }, Expr::Lit(_)) | (Ty::Boolean | Ty::Enum(_), _)) {
                text
            } else {
                d.clamp(text, ty)
            }
        })
        .collect();
    ctx.set("assignTargets", Node::str(targets.join(", ")));
    ctx.set("assignValues", Node::str(values.join(", ")));
    Ok(!targets.is_empty())
}

fn py_compute(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "pyCompute")?;
    let count = c.automaton().map_or(0, |a| a.transitions.len());
    ctx.set("transitionCount", Node::str(count.to_string()));
    Ok(count > 0)
}

/// Modules a composed class imports; true if `build` would be empty.
fn py_imports(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "pyImports")?;
    let names: BTreeSet<&str> = c.subcomponents().iter().map(|s| model.component(s.component).name.as_str()).collect();
    ctx.set("imports", Node::List(names.into_iter().map(|n| Node::map([("name", Node::str(n))])).collect()));
    Ok(c.subcomponents().is_empty() && c.connectors().is_empty())
}

fn py_types(model: &Model, _: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let enums: Vec<Node> = model
        .types
        .iter()
        .map(|t| {
            let mut lines: Vec<Node> = t.values.iter().map(|v| Node::str(format!("{v} = {v:?}"))).collect();
            if lines.is_empty() {
                lines.push(Node::str("pass"));
            }
            Node::map([("name", Node::str(&t.name)), ("lines", Node::List(lines))])
        })
        .collect();
    let any = !enums.is_empty();
    ctx.set("enums", Node::List(enums));
    Ok(any)
}

/// Every identifier that becomes a Python name must be usable as one.
pub(crate) fn check_names(model: &Model) -> Result<(), CodegenError> {
    let mut names: Vec<(&str, &str)> = Vec::new();
    for t in &model.types {
        names.push(("type", &t.name));
        names.extend(t.values.iter().map(|v| ("enum value", v.as_str())));
    }
    for c in &model.components {
        names.push(("component", &c.name));
        names.extend(c.ports.iter().map(|p| ("port", p.name.as_str())));
        names.extend(c.subcomponents().iter().map(|s| ("instance", s.name.as_str())));
        if let Some(a) = c.automaton() {
            names.extend(a.states.iter().map(|s| ("state", s.name.as_str())));
            names.extend(a.variables.iter().map(|v| ("variable", v.name.as_str())));
        }
    }
    if let Some((kind, name)) = names.into_iter().find(|(_, n)| PYTHON_KEYWORDS.contains(n) || n.starts_with("rt_")) {
        return Err(CodegenError::NameCollision(format!("{kind} `{name}` is reserved in generated Python")));
    }
    Ok(())
}
