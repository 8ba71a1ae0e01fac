//! Structural export: DOT digraphs for architectures and automata, and a
//! JSON description of the whole model.

use std::collections::BTreeMap;

use serde_json::{json, Value as Json};

use super::calculators::{component_of, Calculator, Dialect};
use super::template::{Context, Node};
use super::CodegenError;
use crate::model::*;
use crate::resolve::expr_syntax;
use crate::syntax::print_expr;

pub struct Dot;

impl Dialect for Dot {
    fn literal(&self, _: &Model, _: Ty, v: &Value) -> String {
        v.to_string()
    }

    fn port_read(&self, port: &str) -> String {
        port.to_string()
    }

    fn var_read(&self, var: &str) -> String {
        var.to_string()
    }

    fn not(&self, e: &str) -> String {
        format!("not {e}")
    }

    fn binary(&self, op: BinOp, l: &str, r: &str) -> String {
        format!("{l} {} {r}", op.symbol())
    }

    fn port_ref(&self, instance: Option<&str>, port: &str) -> String {
        match instance {
            Some(i) => quote(i),
            None => quote(&format!("this.{port}")),
        }
    }

    /// Source syntax with minimal parentheses.
    fn expr(&self, _: &Model, c: &ComponentType, e: &Expr, _: Option<Ty>) -> String {
        print_expr(&expr_syntax(c, c.automaton().expect("atomic"), e))
    }
}

/// A DOT identifier in double quotes.
pub fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub(crate) fn calculators() -> BTreeMap<&'static str, Calculator> {
    BTreeMap::from([
        ("dotStates", dot_states as Calculator),
        ("dotLabel", dot_label),
        ("modelJson", model_json),
    ])
}

fn dot_states(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "dotStates")?;
    let states: Vec<Node> = c
        .automaton()
        .map(|a| {
            a.states
                .iter()
                .map(|s| {
                    let attrs = if s.initial { " [style=bold]" } else { "" };
                    Node::map([("id", Node::str(quote(&s.name))), ("attrs", Node::str(attrs))])
                })
                .collect()
        })
        .unwrap_or_default();
    let any = !states.is_empty();
    ctx.set("stateNodes", Node::List(states));
    Ok(any)
}

/// The label of a transition edge, `trigger [guard] / outputs`.
pub fn transition_label(model: &Model, c: &ComponentType, t: &Transition) -> String {
    let a = c.automaton().expect("atomic");
    let mut parts = Vec::new();
    if !t.trigger.is_empty() {
        parts.push(t.trigger.iter().map(|(p, v, _)| format!("{}:{v}", c.ports[*p].name)).collect::<Vec<_>>().join(", "));
    }
    if let Some(g) = &t.guard {
        parts.push(format!("[{}]", Dot.expr(model, c, g, None)));
    }
    let actions: Vec<String> = t
        .outputs
        .iter()
        .map(|(p, e)| format!("{}:{}", c.ports[*p].name, Dot.expr(model, c, e, None)))
        .chain(t.assignments.iter().map(|(v, e)| format!("{} = {}", a.variables[*v].name, Dot.expr(model, c, e, None))))
        .collect();
    if !actions.is_empty() {
        parts.push(format!("/ {}", actions.join(", ")));
    }
    parts.join(" ")
}

fn dot_label(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "dotLabel")?;
    let a = c.automaton().expect("atomic");
    let t = &a.transitions[node.index("transition").unwrap_or_default()];
    ctx.set("sourceId", Node::str(quote(&a.states[t.source].name)));
    ctx.set("targetId", Node::str(quote(&a.states[t.target].name)));
    ctx.set("label", Node::str(quote(&transition_label(model, c, t))));
    Ok(true)
}

/// The structural JSON of the whole model, pretty-printed.
pub fn model_json_value(model: &Model) -> Json {
    let components: Vec<Json> = model
        .components
        .iter()
        .map(|c| {
            let ports: Vec<Json> = c
                .ports
                .iter()
                .map(|p| json!({"name": p.name, "direction": p.direction.keyword(), "type": model.type_name(p.ty)}))
                .collect();
            let mut o = json!({
                "name": c.name,
                "kind": if c.is_atomic() { "atomic" } else { "composed" },
                "ports": ports,
            });
            let end = |r: &PortRef| {
                let port = model.port_decl(c, r).map(|p| p.name.clone()).unwrap_or_default();
                match r.owner {
                    PortOwner::This => port,
                    PortOwner::Instance(i) => format!("{}.{port}", c.subcomponents()[i].name),
                }
            };
            match &c.body {
                Body::Composed { subcomponents, connectors } => {
                    o["subcomponents"] = subcomponents
                        .iter()
                        .map(|s| json!({"name": s.name, "type": model.component(s.component).name}))
                        .collect();
                    o["connectors"] = connectors
                        .iter()
                        .map(|k| json!({"source": end(&k.source), "targets": k.targets.iter().map(end).collect::<Vec<_>>()}))
                        .collect();
                }
                Body::Atomic(a) => {
                    o["variables"] = a
                        .variables
                        .iter()
                        .map(|v| json!({"name": v.name, "type": model.type_name(v.ty), "initial": v.initial}))
                        .collect();
                    o["states"] = a
                        .states
                        .iter()
                        .map(|s| {
                            json!({
                                "name": s.name,
                                "initial": s.initial,
                                "outputs": s.initial_outputs.iter()
                                    .map(|(p, v, _)| json!({"port": c.ports[*p].name, "value": v}))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    o["transitions"] = a
                        .transitions
                        .iter()
                        .map(|t| {
                            json!({
                                "source": a.states[t.source].name,
                                "target": a.states[t.target].name,
                                "trigger": t.trigger.iter()
                                    .map(|(p, v, _)| json!({"port": c.ports[*p].name, "value": v}))
                                    .collect::<Vec<_>>(),
                                "guard": t.guard.as_ref().map(|g| Dot.expr(model, c, g, None)),
                                "outputs": t.outputs.iter()
                                    .map(|(p, e)| json!({"port": c.ports[*p].name, "value": Dot.expr(model, c, e, None)}))
                                    .collect::<Vec<_>>(),
                                "assignments": t.assignments.iter()
                                    .map(|(v, e)| json!({"variable": a.variables[*v].name, "value": Dot.expr(model, c, e, None)}))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                }
            }
            o
        })
        .collect();
    let types: Vec<Json> = model.types.iter().map(|t| json!({"name": t.name, "values": t.values})).collect();
    json!({"types": types, "components": components})
}

fn model_json(model: &Model, _: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let text = serde_json::to_string_pretty(&model_json_value(model)).expect("model serializes");
    ctx.set("json", Node::Str(text));
    Ok(!model.components.is_empty() || !model.types.is_empty())
}
