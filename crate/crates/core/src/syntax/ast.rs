//! Unresolved syntax tree, exactly as written in a `.maa` file.

use crate::diag::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident { name: name.into(), span }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyntaxTree {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Enum(EnumDecl),
    Component(ComponentDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumDecl {
    pub name: Ident,
    pub values: Vec<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: Ident,
    pub elements: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Ports(Vec<PortItem>),
    Instance { component: Ident, name: Ident },
    Connect { source: PortRefSyntax, targets: Vec<PortRefSyntax>, span: Span },
    Automaton(AutomatonSyntax),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortItem {
    pub direction: Direction,
    pub ty: TypeRefSyntax,
    pub name: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeRefSyntax {
    Boolean(Span),
    Int { lo: i64, hi: i64, span: Span },
    Named(Ident),
}

impl TypeRefSyntax {
    pub fn span(&self) -> Span {
        match self {
            TypeRefSyntax::Boolean(span) | TypeRefSyntax::Int { span, .. } => *span,
            TypeRefSyntax::Named(id) => id.span,
        }
    }
}

/// `port` (this component) or `instance.port`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortRefSyntax {
    pub instance: Option<Ident>,
    pub port: Ident,
}

impl PortRefSyntax {
    pub fn span(&self) -> Span {
        self.instance.as_ref().map_or(self.port.span, |i| i.span)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomatonSyntax {
    pub vars: Vec<VarSyntax>,
    pub states: Vec<StateSyntax>,
    pub transitions: Vec<TransitionSyntax>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSyntax {
    pub ty: TypeRefSyntax,
    pub name: Ident,
    pub init: Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSyntax {
    pub name: Ident,
    pub initial: bool,
    pub initial_outputs: Vec<(Ident, Literal)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSyntax {
    pub source: Ident,
    pub target: Ident,
    pub trigger: Vec<(Ident, Literal)>,
    pub guard: Option<ExprSyntax>,
    pub actions: Vec<Action>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// `port: expr`
    Output(Ident, ExprSyntax),
    /// `var = expr`
    Assign(Ident, ExprSyntax),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiteralKind {
    Bool(bool),
    Int(i64),
    /// Enumeration value, written as a bare identifier.
    Symbol(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub kind: LiteralKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    /// Binding strength; larger binds tighter. `not` sits at 3.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprSyntax {
    Lit(Literal),
    /// A port, a variable or an enumeration value; decided during resolution.
    Name(Ident),
    Not(Box<ExprSyntax>, Span),
    Binary(BinOp, Box<ExprSyntax>, Box<ExprSyntax>),
}

impl ExprSyntax {
    pub fn span(&self) -> Span {
        match self {
            ExprSyntax::Lit(l) => l.span,
            ExprSyntax::Name(id) => id.span,
            ExprSyntax::Not(_, span) => *span,
            ExprSyntax::Binary(_, lhs, _) => lhs.span(),
        }
    }
}
