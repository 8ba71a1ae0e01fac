//! Resolved models: every cross-reference is an index, never a string.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::diag::Span;
pub use crate::syntax::ast::{BinOp, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TypeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ComponentId(pub usize);

/// A named enumeration declared with `enum`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub values: Vec<String>,
    pub span: Span,
}

/// The type of a port or variable. All kinds are finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Boolean,
    Int { lo: i64, hi: i64 },
    Enum(TypeId),
}

/// A message value. Serializes as a bare JSON boolean, number or string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Enum(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Enum(s) => f.write_str(s),
        }
    }
}

/// A message on a port at one tick; `None` is epsilon (no message).
pub type Message = Option<Value>;

pub fn display_message(m: &Message) -> String {
    match m {
        Some(v) => v.to_string(),
        None => "ε".to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub direction: Direction,
    pub ty: Ty,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<PortDecl>,
    pub body: Body,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Atomic(Automaton),
    Composed { subcomponents: Vec<SubcomponentInstance>, connectors: Vec<Connector> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcomponentInstance {
    pub name: String,
    pub component: ComponentId,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortOwner {
    This,
    /// Index into the enclosing component's subcomponent list.
    Instance(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PortRef {
    pub owner: PortOwner,
    /// Index into the owning component type's port list.
    pub port: usize,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connector {
    pub source: PortRef,
    pub targets: Vec<PortRef>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub ty: Ty,
    pub initial: Value,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDecl {
    pub name: String,
    pub initial: bool,
    /// `(out-port index, literal)` in source order.
    pub initial_outputs: Vec<(usize, Value, Span)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    /// `(in-port index, literal)`; the port must carry exactly this message.
    pub trigger: Vec<(usize, Value, Span)>,
    pub guard: Option<Expr>,
    pub outputs: Vec<(usize, Expr)>,
    pub assignments: Vec<(usize, Expr)>,
    pub span: Span,
}

/// Guard and action expressions over literals, in-ports and variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Value),
    Port(usize, Span),
    Var(usize),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// In-ports read anywhere in the expression, with the span of each read.
    pub fn port_reads(&self, out: &mut Vec<(usize, Span)>) {
        match self {
            Expr::Port(p, span) => out.push((*p, *span)),
            Expr::Not(e) => e.port_reads(out),
            Expr::Binary(_, l, r) => {
                l.port_reads(out);
                r.port_reads(out);
            }
            Expr::Lit(_) | Expr::Var(_) => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub variables: Vec<VariableDecl>,
    pub states: Vec<StateDecl>,
    pub transitions: Vec<Transition>,
    pub span: Span,
}

impl Automaton {
    /// The first state marked initial. Well-formed automata have exactly one.
    pub fn initial_state(&self) -> Option<usize> {
        self.states.iter().position(|s| s.initial)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Type,
    EnumValue,
    Component,
    Port,
    Instance,
    State,
    Variable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub span: Span,
}

/// Qualified names (`Comp`, `Comp.port`, `Enum.VALUE`, ...) to declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: BTreeMap<String, Symbol>,
}

impl SymbolTable {
    /// Records the first declaration of a name; later duplicates are ignored
    /// here and reported by the checker.
    pub(crate) fn declare(&mut self, name: String, kind: SymbolKind, span: Span) {
        self.entries.entry(name).or_insert(Symbol { kind, span });
    }

    pub fn lookup(&self, qualified: &str) -> Option<&Symbol> {
        self.entries.get(qualified)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Symbol)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A parsed and name-resolved set of type and component declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub types: Vec<TypeDef>,
    pub components: Vec<ComponentType>,
    pub symbols: SymbolTable,
}

impl Model {
    pub fn component(&self, id: ComponentId) -> &ComponentType {
        &self.components[id.0]
    }

    pub fn component_id(&self, name: &str) -> Option<ComponentId> {
        self.components.iter().position(|c| c.name == name).map(ComponentId)
    }

    pub fn component_by_name(&self, name: &str) -> Option<&ComponentType> {
        self.component_id(name).map(|id| self.component(id))
    }

    pub fn type_def(&self, id: TypeId) -> &TypeDef {
        &self.types[id.0]
    }

    pub fn type_name(&self, ty: Ty) -> String {
        match ty {
            Ty::Boolean => "Boolean".to_string(),
            Ty::Int { lo, hi } => format!("Int({lo}..{hi})"),
            Ty::Enum(id) => self.type_def(id).name.clone(),
        }
    }

    /// Every value of `ty`: declaration order for enumerations, `[false, true]`
    /// for booleans and ascending for bounded integers.
    pub fn message_domain(&self, ty: Ty) -> Vec<Value> {
        match ty {
            Ty::Boolean => vec![Value::Bool(false), Value::Bool(true)],
            Ty::Int { lo, hi } => (lo..=hi).map(Value::Int).collect(),
            Ty::Enum(id) => self.type_def(id).values.iter().cloned().map(Value::Enum).collect(),
        }
    }

    pub fn domain_size(&self, ty: Ty) -> u64 {
        match ty {
            Ty::Boolean => 2,
            Ty::Int { lo, hi } => (hi as i128 - lo as i128 + 1).max(0) as u64,
            Ty::Enum(id) => self.type_def(id).values.len() as u64,
        }
    }

    pub fn in_domain(&self, ty: Ty, v: &Value) -> bool {
        match (ty, v) {
            (Ty::Boolean, Value::Bool(_)) => true,
            (Ty::Int { lo, hi }, Value::Int(i)) => lo <= *i && *i <= hi,
            (Ty::Enum(id), Value::Enum(s)) => self.type_def(id).values.iter().any(|x| x == s),
            _ => false,
        }
    }

    /// The component type owning a port reference inside `parent`.
    pub fn port_owner_type<'a>(&'a self, parent: &'a ComponentType, owner: PortOwner) -> Option<&'a ComponentType> {
        match (owner, &parent.body) {
            (PortOwner::This, _) => Some(parent),
            (PortOwner::Instance(i), Body::Composed { subcomponents, .. }) => {
                subcomponents.get(i).map(|s| self.component(s.component))
            }
            _ => None,
        }
    }

    pub fn port_decl<'a>(&'a self, parent: &'a ComponentType, r: &PortRef) -> Option<&'a PortDecl> {
        self.port_owner_type(parent, r.owner)?.ports.get(r.port)
    }
}

impl ComponentType {
    pub fn automaton(&self) -> Option<&Automaton> {
        match &self.body {
            Body::Atomic(a) => Some(a),
            Body::Composed { .. } => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.body, Body::Atomic(_))
    }

    pub fn port_index(&self, name: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.name == name)
    }

    pub fn in_ports(&self) -> impl Iterator<Item = (usize, &PortDecl)> {
        self.ports.iter().enumerate().filter(|(_, p)| p.direction == Direction::In)
    }

    pub fn out_ports(&self) -> impl Iterator<Item = (usize, &PortDecl)> {
        self.ports.iter().enumerate().filter(|(_, p)| p.direction == Direction::Out)
    }

    pub fn subcomponents(&self) -> &[SubcomponentInstance] {
        match &self.body {
            Body::Composed { subcomponents, .. } => subcomponents,
            Body::Atomic(_) => &[],
        }
    }

    pub fn connectors(&self) -> &[Connector] {
        match &self.body {
            Body::Composed { connectors, .. } => connectors,
            Body::Atomic(_) => &[],
        }
    }
}
