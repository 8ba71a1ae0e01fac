//! Template calculators: named computations over the model that templates
//! call by name. Seven calculators are shared by every backend; each
//! backend adds a few of its own.

use std::collections::BTreeMap;

use super::template::{Context, Node};
use super::{Backend, CodegenError};
use crate::model::*;

/// Target-language rendering of literals, expressions and port references.
pub trait Dialect {
    fn literal(&self, model: &Model, ty: Ty, v: &Value) -> String;
    fn port_read(&self, port: &str) -> String;
    fn var_read(&self, var: &str) -> String;
    fn not(&self, e: &str) -> String;
    fn binary(&self, op: BinOp, l: &str, r: &str) -> String;
    fn port_ref(&self, instance: Option<&str>, port: &str) -> String;

    /// Wraps an integer-valued expression written to a bounded port or variable.
    fn clamp(&self, e: String, _ty: Ty) -> String {
        e
    }

    fn expr(&self, model: &Model, c: &ComponentType, e: &Expr, expected: Option<Ty>) -> String {
        let a = c.automaton().expect("expressions live in automata");
        match e {
            Expr::Lit(v) => self.literal(model, expected.unwrap_or_else(|| literal_type(model, v)), v),
            Expr::Port(p, _) => self.port_read(&c.ports[*p].name),
            Expr::Var(v) => self.var_read(&a.variables[*v].name),
            Expr::Not(inner) => self.not(&self.expr(model, c, inner, Some(Ty::Boolean))),
            Expr::Binary(op, l, r) => {
                let operand = match op {
                    BinOp::And | BinOp::Or => Some(Ty::Boolean),
                    BinOp::Eq | BinOp::Ne => static_type(c, l).or_else(|| static_type(c, r)),
                    _ => None,
                };
                self.binary(*op, &self.expr(model, c, l, operand), &self.expr(model, c, r, operand))
            }
        }
    }
}

/// The type of an expression when it does not depend on context.
fn static_type(c: &ComponentType, e: &Expr) -> Option<Ty> {
    let a = c.automaton()?;
    match e {
        Expr::Port(p, _) => Some(c.ports[*p].ty),
        Expr::Var(v) => Some(a.variables[*v].ty),
        Expr::Lit(Value::Bool(_)) | Expr::Not(_) => Some(Ty::Boolean),
        Expr::Binary(op, l, r) => match op {
            BinOp::Add | BinOp::Sub => static_type(c, l).or_else(|| static_type(c, r)),
            _ => Some(Ty::Boolean),
        },
        Expr::Lit(_) => None,
    }
}

/// Best-effort type of a literal that appears without context.
pub fn literal_type(model: &Model, v: &Value) -> Ty {
    match v {
        Value::Bool(_) => Ty::Boolean,
        Value::Int(i) => Ty::Int { lo: *i, hi: *i },
        Value::Enum(name) => model
            .types
            .iter()
            .position(|t| t.values.contains(name))
            .map(|i| Ty::Enum(TypeId(i)))
            .unwrap_or(Ty::Boolean),
    }
}

pub type Calculator = fn(&Model, &Node, &mut Context, &dyn Dialect) -> Result<bool, CodegenError>;

#[derive(Clone, Debug)]
pub struct CalculatorRegistry {
    pub shared: BTreeMap<&'static str, Calculator>,
    pub per_backend: BTreeMap<Backend, BTreeMap<&'static str, Calculator>>,
}

/// Calculators visible to one backend.
pub struct RegistryView<'a> {
    shared: &'a BTreeMap<&'static str, Calculator>,
    own: Option<&'a BTreeMap<&'static str, Calculator>>,
}

impl RegistryView<'_> {
    pub fn get(&self, name: &str) -> Option<Calculator> {
        self.own.and_then(|o| o.get(name)).or_else(|| self.shared.get(name)).copied()
    }
}

pub const SHARED: [&str; 7] = [
    "componentInfo",
    "initialState",
    "guardCalculator",
    "triggerCalculator",
    "actionCalculator",
    "portCalculator",
    "connectorCalculator",
];

impl Default for CalculatorRegistry {
    fn default() -> Self {
        let shared: BTreeMap<&'static str, Calculator> = BTreeMap::from([
            ("componentInfo", component_info as Calculator),
            ("initialState", initial_state),
            ("guardCalculator", guard_calculator),
            ("triggerCalculator", trigger_calculator),
            ("actionCalculator", action_calculator),
            ("portCalculator", port_calculator),
            ("connectorCalculator", connector_calculator),
        ]);
        let per_backend = BTreeMap::from([
            (Backend::Exec, super::exec::calculators()),
            (Backend::Mona, super::mona::calculators()),
            (Backend::Graph, super::graph::calculators()),
        ]);
        CalculatorRegistry { shared, per_backend }
    }
}

impl CalculatorRegistry {
    /// The union visible to `backend`; names must not collide.
    pub fn view(&self, backend: Backend) -> Result<RegistryView<'_>, CodegenError> {
        let own = self.per_backend.get(&backend);
        if let Some(dup) = own.and_then(|o| o.keys().find(|k| self.shared.contains_key(*k))) {
            return Err(CodegenError::DuplicateCalculator(dup.to_string()));
        }
        Ok(RegistryView { shared: &self.shared, own })
    }

    pub fn remove_shared(&mut self, name: &str) -> Option<Calculator> {
        self.shared.remove(name)
    }
}

pub(crate) fn calc_error(name: &str, message: impl Into<String>) -> CodegenError {
    CodegenError::Calculator { name: name.to_string(), message: message.into() }
}

/// The component addressed by a node's `component` attribute.
pub(crate) fn component_of<'m>(model: &'m Model, node: &Node, calc: &str) -> Result<&'m ComponentType, CodegenError> {
    node.index("component")
        .and_then(|i| model.components.get(i))
        .ok_or_else(|| calc_error(calc, "node has no `component` attribute"))
}

fn transition_of<'m>(
    model: &'m Model,
    node: &Node,
    calc: &str,
) -> Result<(&'m ComponentType, &'m Transition), CodegenError> {
    let c = component_of(model, node, calc)?;
    let t = node
        .index("transition")
        .and_then(|i| c.automaton()?.transitions.get(i))
        .ok_or_else(|| calc_error(calc, "node has no `transition` attribute"))?;
    Ok((c, t))
}

/// The node of one component: its name, states and transitions.
pub fn component_node(model: &Model, id: ComponentId) -> Node {
    let c = model.component(id);
    let (states, transitions) = match c.automaton() {
        Some(a) => (
            a.states
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Node::map([
                        ("name", Node::str(&s.name)),
                        ("index", Node::str(i.to_string())),
                        ("initial", Node::Bool(s.initial)),
                    ])
                })
                .collect(),
            a.transitions.iter().enumerate().map(|(i, t)| transition_node(model, id, i, t)).collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    Node::map([
        ("component", Node::str(id.0.to_string())),
        ("name", Node::str(&c.name)),
        ("states", Node::List(states)),
        ("transitions", Node::List(transitions)),
    ])
}

fn transition_node(model: &Model, id: ComponentId, index: usize, t: &Transition) -> Node {
    let a = model.component(id).automaton().expect("atomic");
    Node::map([
        ("component", Node::str(id.0.to_string())),
        ("transition", Node::str(index.to_string())),
        ("source", Node::str(&a.states[t.source].name)),
        ("target", Node::str(&a.states[t.target].name)),
    ])
}

fn component_info(model: &Model, node: &Node, ctx: &mut Context, _: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "componentInfo")?;
    ctx.set("componentName", Node::str(&c.name));
    ctx.set("stateEnumName", Node::str(format!("{}State", c.name)));
    Ok(c.is_atomic())
}

fn initial_state(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "initialState")?;
    let Some(a) = c.automaton() else { return Ok(false) };
    let Some(s) = a.initial_state() else { return Ok(false) };
    let s = &a.states[s];
    ctx.set("initialState", Node::str(&s.name));
    ctx.set(
        "initialOutputs",
        Node::List(
            s.initial_outputs
                .iter()
                .map(|(p, v, _)| {
                    let port = &c.ports[*p];
                    Node::map([("port", Node::str(&port.name)), ("value", Node::str(d.literal(model, port.ty, v)))])
                })
                .collect(),
        ),
    );
    ctx.set(
        "variables",
        Node::List(
            a.variables
                .iter()
                .map(|v| Node::map([("name", Node::str(&v.name)), ("value", Node::str(d.literal(model, v.ty, &v.initial)))]))
                .collect(),
        ),
    );
    Ok(true)
}

fn guard_calculator(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let (c, t) = transition_of(model, node, "guardCalculator")?;
    match &t.guard {
        Some(g) => {
            ctx.set("guardExpression", Node::str(d.expr(model, c, g, Some(Ty::Boolean))));
            Ok(true)
        }
        None => {
            ctx.set("guardExpression", Node::str(""));
            Ok(false)
        }
    }
}

fn trigger_calculator(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let (c, t) = transition_of(model, node, "triggerCalculator")?;
    let items: Vec<Node> = t
        .trigger
        .iter()
        .map(|(p, v, _)| {
            let port = &c.ports[*p];
            Node::map([
                ("port", Node::str(&port.name)),
                ("read", Node::str(d.port_read(&port.name))),
                ("value", Node::str(d.literal(model, port.ty, v))),
            ])
        })
        .collect();
    let any = !items.is_empty();
    ctx.set("trigger", Node::List(items));
    Ok(any)
}

fn action_calculator(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let (c, t) = transition_of(model, node, "actionCalculator")?;
    let a = c.automaton().expect("atomic");
    let write = |ty: Ty, e: &Expr| {
        let text = d.expr(model, c, e, Some(ty));
        match (ty, e) {
            (Ty::Int { .. }, Expr::Lit(_)) | (Ty::Boolean | Ty::Enum(_), _) => text,
            (Ty::Int { .. }, _) => d.clamp(text, ty),
        }
    };
    let outputs: Vec<Node> = t
        .outputs
        .iter()
        .map(|(p, e)| {
            let port = &c.ports[*p];
            Node::map([("port", Node::str(&port.name)), ("value", Node::str(write(port.ty, e)))])
        })
        .collect();
    let assignments: Vec<Node> = t
        .assignments
        .iter()
        .map(|(v, e)| {
            let var = &a.variables[*v];
            Node::map([
                ("var", Node::str(&var.name)),
                ("target", Node::str(d.var_read(&var.name))),
                ("value", Node::str(write(var.ty, e))),
            ])
        })
        .collect();
    let any = !outputs.is_empty() || !assignments.is_empty();
    ctx.set("hasAssignments", Node::Bool(!assignments.is_empty()));
    ctx.set("outputs", Node::List(outputs));
    ctx.set("assignments", Node::List(assignments));
    Ok(any)
}

fn port_calculator(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "portCalculator")?;
    let port = |p: &PortDecl| {
        Node::map([
            ("name", Node::str(&p.name)),
            ("direction", Node::str(p.direction.keyword())),
            ("type", Node::str(model.type_name(p.ty))),
            (
                "values",
                Node::List(
                    model
                        .message_domain(p.ty)
                        .iter()
                        .map(|v| Node::map([("value", Node::str(d.literal(model, p.ty, v)))]))
                        .collect(),
                ),
            ),
        ])
    };
    ctx.set("inPorts", Node::List(c.in_ports().map(|(_, p)| port(p)).collect()));
    ctx.set("outPorts", Node::List(c.out_ports().map(|(_, p)| port(p)).collect()));
    ctx.set("ports", Node::List(c.ports.iter().map(port).collect()));
    Ok(!c.ports.is_empty())
}

fn connector_calculator(model: &Model, node: &Node, ctx: &mut Context, d: &dyn Dialect) -> Result<bool, CodegenError> {
    let c = component_of(model, node, "connectorCalculator")?;
    let subs = c.subcomponents();
    ctx.set(
        "subcomponents",
        Node::List(
            subs.iter()
                .map(|s| Node::map([("name", Node::str(&s.name)), ("type", Node::str(&model.component(s.component).name))]))
                .collect(),
        ),
    );
    let end = |r: &PortRef| {
        let instance = match r.owner {
            PortOwner::This => None,
            PortOwner::Instance(i) => Some(subs[i].name.as_str()),
        };
        let port = model.port_decl(c, r).map(|p| p.name.as_str()).unwrap_or_default();
        Node::map([
            ("instance", Node::str(instance.unwrap_or(""))),
            ("port", Node::str(port)),
            ("ref", Node::str(d.port_ref(instance, port))),
        ])
    };
    let mut edges = Vec::new();
    let mut connectors = Vec::new();
    for k in c.connectors() {
        let source = end(&k.source);
        let targets: Vec<Node> = k.targets.iter().map(end).collect();
        for t in &targets {
            edges.push(Node::map([("source", source.clone()), ("target", t.clone())]));
        }
        connectors.push(Node::map([("source", source), ("targets", Node::List(targets))]));
    }
    ctx.set("connectors", Node::List(connectors));
    ctx.set("edges", Node::List(edges));
    Ok(!subs.is_empty())
}
