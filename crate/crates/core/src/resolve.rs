//! Name resolution: syntax trees in, a fully bound [`Model`] out.
//!
//! Resolution binds every identifier and type-checks expressions. Namespace
//! collisions inside a component (ports, states, variables, instances) are
//! left to the `W4` context condition; duplicate type, component or
//! enumeration value names are resolution errors because lookups by those
//! names would be ambiguous.

use std::collections::HashMap;

use crate::diag::{Diagnostic, Span};
use crate::model::*;
use crate::syntax::ast::{self, *};

pub const UNKNOWN_TYPE: &str = "R001";
pub const UNKNOWN_COMPONENT: &str = "R002";
pub const UNKNOWN_PORT: &str = "R003";
pub const UNKNOWN_STATE: &str = "R004";
pub const DUPLICATE_NAME: &str = "R005";
pub const UNKNOWN_NAME: &str = "R006";
pub const TYPE_MISMATCH: &str = "R007";
pub const INVALID_DECLARATION: &str = "R008";

/// Binds all names across `trees`. Returns the model, or every resolution
/// error found; never both.
pub fn resolve(trees: &[SyntaxTree]) -> Result<Model, Vec<Diagnostic>> {
    let mut r = Resolver::default();
    r.declare_types(trees);
    r.declare_components(trees);
    r.bind_bodies(trees);
    if r.diags.is_empty() {
        Ok(r.model)
    } else {
        crate::diag::sort_diagnostics(&mut r.diags);
        Err(r.diags)
    }
}

#[derive(Default)]
struct Resolver {
    model: Model,
    diags: Vec<Diagnostic>,
    type_ids: HashMap<String, TypeId>,
    component_ids: HashMap<String, ComponentId>,
    /// Syntax of each declared component, in `model.components` order.
    decls: Vec<(usize, usize)>,
}

/// Inferred type of an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
enum ExprTy {
    Bool,
    Int,
    Enum(TypeId),
    /// Enumeration value whose type follows from context.
    EnumLiteral(String),
}

struct Scope<'a> {
    component: &'a ComponentType,
    variables: &'a [VariableDecl],
}

impl Resolver {
    fn error(&mut self, code: &'static str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn declare_types(&mut self, trees: &[SyntaxTree]) {
        for tree in trees {
            for item in &tree.items {
                let Item::Enum(e) = item else { continue };
                if self.type_ids.contains_key(&e.name.name) {
                    self.error(DUPLICATE_NAME, e.name.span, format!("type `{}` is declared twice", e.name.name));
                    continue;
                }
                let mut values: Vec<String> = Vec::new();
                for v in &e.values {
                    if values.contains(&v.name) {
                        self.error(
                            DUPLICATE_NAME,
                            v.span,
                            format!("value `{}` appears twice in enumeration `{}`", v.name, e.name.name),
                        );
                        continue;
                    }
                    self.model.symbols.declare(format!("{}.{}", e.name.name, v.name), SymbolKind::EnumValue, v.span);
                    values.push(v.name.clone());
                }
                let id = TypeId(self.model.types.len());
                self.type_ids.insert(e.name.name.clone(), id);
                self.model.symbols.declare(e.name.name.clone(), SymbolKind::Type, e.name.span);
                self.model.types.push(TypeDef { name: e.name.name.clone(), values, span: e.name.span });
            }
        }
    }

    fn resolve_type(&mut self, t: &TypeRefSyntax) -> Option<Ty> {
        match t {
            TypeRefSyntax::Boolean(_) => Some(Ty::Boolean),
            TypeRefSyntax::Int { lo, hi, span } => {
                if lo > hi {
                    self.error(INVALID_DECLARATION, *span, format!("empty integer range {lo}..{hi}"));
                    None
                } else {
                    Some(Ty::Int { lo: *lo, hi: *hi })
                }
            }
            TypeRefSyntax::Named(id) => match self.type_ids.get(&id.name) {
                Some(&t) => Some(Ty::Enum(t)),
                None => {
                    self.error(UNKNOWN_TYPE, id.span, format!("unknown type `{}`", id.name));
                    None
                }
            },
        }
    }

    /// Registers each component with its ports, so bodies can refer to the
    /// ports of any component regardless of declaration order.
    fn declare_components(&mut self, trees: &[SyntaxTree]) {
        for (ti, tree) in trees.iter().enumerate() {
            for (ii, item) in tree.items.iter().enumerate() {
                let Item::Component(c) = item else { continue };
                if self.component_ids.contains_key(&c.name.name) {
                    self.error(
                        DUPLICATE_NAME,
                        c.name.span,
                        format!("component `{}` is declared twice", c.name.name),
                    );
                    continue;
                }
                let mut ports = Vec::new();
                for element in &c.elements {
                    let Element::Ports(items) = element else { continue };
                    for p in items {
                        // unresolvable types still get a placeholder so indices stay stable
                        let ty = self.resolve_type(&p.ty).unwrap_or(Ty::Boolean);
                        self.model.symbols.declare(
                            format!("{}.{}", c.name.name, p.name.name),
                            SymbolKind::Port,
                            p.name.span,
                        );
                        ports.push(PortDecl { name: p.name.name.clone(), direction: p.direction, ty, span: p.name.span });
                    }
                }
                let id = ComponentId(self.model.components.len());
                self.component_ids.insert(c.name.name.clone(), id);
                self.model.symbols.declare(c.name.name.clone(), SymbolKind::Component, c.name.span);
                self.model.components.push(ComponentType {
                    name: c.name.name.clone(),
                    ports,
                    body: Body::Composed { subcomponents: Vec::new(), connectors: Vec::new() },
                    span: c.name.span,
                });
                self.decls.push((ti, ii));
            }
        }
    }

    fn bind_bodies(&mut self, trees: &[SyntaxTree]) {
        for ci in 0..self.decls.len() {
            let (ti, ii) = self.decls[ci];
            let Item::Component(decl) = &trees[ti].items[ii] else { unreachable!() };
            let body = self.bind_body(ci, decl);
            self.model.components[ci].body = body;
        }
    }

    fn bind_body(&mut self, ci: usize, decl: &ComponentDecl) -> Body {
        let cname = decl.name.name.clone();
        let automata: Vec<&AutomatonSyntax> = decl
            .elements
            .iter()
            .filter_map(|e| match e {
                Element::Automaton(a) => Some(a),
                _ => None,
            })
            .collect();
        let has_structure = decl.elements.iter().any(|e| matches!(e, Element::Instance { .. } | Element::Connect { .. }));
        if automata.len() > 1 {
            self.error(INVALID_DECLARATION, automata[1].span, format!("component `{cname}` has more than one automaton"));
        }
        if let Some(a) = automata.first() {
            if has_structure {
                self.error(
                    INVALID_DECLARATION,
                    a.span,
                    format!("component `{cname}` mixes an automaton with subcomponents or connectors"),
                );
            }
            return Body::Atomic(self.bind_automaton(ci, a));
        }

        let mut subcomponents = Vec::new();
        let mut instance_ids: HashMap<&str, usize> = HashMap::new();
        for element in &decl.elements {
            let Element::Instance { component, name } = element else { continue };
            self.model.symbols.declare(format!("{cname}.{}", name.name), SymbolKind::Instance, name.span);
            let Some(&target) = self.component_ids.get(&component.name) else {
                self.error(UNKNOWN_COMPONENT, component.span, format!("unknown component `{}`", component.name));
                continue;
            };
            instance_ids.entry(name.name.as_str()).or_insert(subcomponents.len());
            subcomponents.push(SubcomponentInstance { name: name.name.clone(), component: target, span: name.span });
        }

        let mut connectors = Vec::new();
        for element in &decl.elements {
            let Element::Connect { source, targets, span } = element else { continue };
            let source = self.bind_port_ref(ci, &subcomponents, &instance_ids, source);
            let targets: Vec<Option<PortRef>> =
                targets.iter().map(|t| self.bind_port_ref(ci, &subcomponents, &instance_ids, t)).collect();
            if let (Some(source), Some(targets)) = (source, targets.into_iter().collect::<Option<Vec<_>>>()) {
                connectors.push(Connector { source, targets, span: *span });
            }
        }
        Body::Composed { subcomponents, connectors }
    }

    fn bind_port_ref(
        &mut self,
        ci: usize,
        subcomponents: &[SubcomponentInstance],
        instance_ids: &HashMap<&str, usize>,
        r: &PortRefSyntax,
    ) -> Option<PortRef> {
        let (owner, owner_type) = match &r.instance {
            None => (PortOwner::This, ComponentId(ci)),
            Some(inst) => match instance_ids.get(inst.name.as_str()) {
                Some(&i) => (PortOwner::Instance(i), subcomponents[i].component),
                None => {
                    self.error(UNKNOWN_PORT, inst.span, format!("unknown subcomponent instance `{}`", inst.name));
                    return None;
                }
            },
        };
        let owner_component = self.model.component(owner_type);
        match owner_component.port_index(&r.port.name) {
            Some(port) => Some(PortRef { owner, port, span: r.span() }),
            None => {
                let msg = format!("component `{}` has no port `{}`", owner_component.name, r.port.name);
                self.error(UNKNOWN_PORT, r.port.span, msg);
                None
            }
        }
    }

    fn literal_value(&mut self, l: &ast::Literal) -> Value {
        match &l.kind {
            LiteralKind::Bool(b) => Value::Bool(*b),
            LiteralKind::Int(i) => Value::Int(*i),
            LiteralKind::Symbol(s) => Value::Enum(s.clone()),
        }
    }

    fn bind_automaton(&mut self, ci: usize, a: &AutomatonSyntax) -> Automaton {
        let cname = self.model.components[ci].name.clone();
        let mut variables = Vec::new();
        for v in &a.vars {
            self.model.symbols.declare(format!("{cname}.{}", v.name.name), SymbolKind::Variable, v.name.span);
            let ty = self.resolve_type(&v.ty).unwrap_or(Ty::Boolean);
            let initial = self.literal_value(&v.init);
            variables.push(VariableDecl { name: v.name.name.clone(), ty, initial, span: v.name.span });
        }

        let mut states = Vec::new();
        for s in &a.states {
            self.model.symbols.declare(format!("{cname}.{}", s.name.name), SymbolKind::State, s.name.span);
            let initial_outputs = s
                .initial_outputs
                .iter()
                .filter_map(|(port, lit)| {
                    let p = self.bind_directed_port(ci, port, Direction::Out, "initial output")?;
                    Some((p, self.literal_value(lit), port.span))
                })
                .collect();
            states.push(StateDecl { name: s.name.name.clone(), initial: s.initial, initial_outputs, span: s.name.span });
        }

        let component = self.model.components[ci].clone();
        let scope = Scope { component: &component, variables: &variables };
        let mut transitions = Vec::new();
        for t in &a.transitions {
            if let Some(t) = self.bind_transition(&scope, &states, t) {
                transitions.push(t);
            }
        }
        Automaton { variables, states, transitions, span: a.span }
    }

    fn bind_directed_port(&mut self, ci: usize, port: &Ident, dir: Direction, role: &str) -> Option<usize> {
        let c = &self.model.components[ci];
        match c.port_index(&port.name) {
            Some(i) if c.ports[i].direction == dir => Some(i),
            Some(_) => {
                let msg = format!("{role} port `{}` must be an {} port", port.name, dir.keyword());
                self.error(INVALID_DECLARATION, port.span, msg);
                None
            }
            None => {
                let msg = format!("component `{}` has no port `{}`", c.name, port.name);
                self.error(UNKNOWN_PORT, port.span, msg);
                None
            }
        }
    }

    fn bind_transition(&mut self, scope: &Scope, states: &[StateDecl], t: &TransitionSyntax) -> Option<Transition> {
        let ci = self.component_ids[&scope.component.name].0;
        let state = |r: &mut Self, id: &Ident| {
            let found = states.iter().position(|s| s.name == id.name);
            if found.is_none() {
                r.error(UNKNOWN_STATE, id.span, format!("unknown state `{}`", id.name));
            }
            found
        };
        let source = state(self, &t.source);
        let target = state(self, &t.target);
        let mut ok = source.is_some() && target.is_some();

        let mut trigger = Vec::new();
        for (port, lit) in &t.trigger {
            match self.bind_directed_port(ci, port, Direction::In, "trigger") {
                Some(p) => trigger.push((p, self.literal_value(lit), port.span)),
                None => ok = false,
            }
        }

        let guard = match &t.guard {
            Some(g) => match self.expr(scope, g) {
                Some((e, ExprTy::Bool)) => Some(e),
                Some((_, ty)) => {
                    self.error(TYPE_MISMATCH, g.span(), format!("guard must be Boolean, found {}", self.describe(&ty)));
                    ok = false;
                    None
                }
                None => {
                    ok = false;
                    None
                }
            },
            None => None,
        };

        let mut outputs = Vec::new();
        let mut assignments = Vec::new();
        for action in &t.actions {
            match action {
                Action::Output(port, e) => {
                    let Some(p) = self.bind_directed_port(ci, port, Direction::Out, "output") else {
                        ok = false;
                        continue;
                    };
                    let ty = scope.component.ports[p].ty;
                    match self.typed_expr(scope, e, ty) {
                        Some(e) => outputs.push((p, e)),
                        None => ok = false,
                    }
                }
                Action::Assign(var, e) => {
                    let Some(v) = scope.variables.iter().position(|x| x.name == var.name) else {
                        self.error(UNKNOWN_NAME, var.span, format!("unknown variable `{}`", var.name));
                        ok = false;
                        continue;
                    };
                    match self.typed_expr(scope, e, scope.variables[v].ty) {
                        Some(e) => assignments.push((v, e)),
                        None => ok = false,
                    }
                }
            }
        }
        if !ok {
            return None;
        }
        Some(Transition {
            source: source?,
            target: target?,
            trigger,
            guard,
            outputs,
            assignments,
            span: t.span,
        })
    }

    fn describe(&self, ty: &ExprTy) -> String {
        match ty {
            ExprTy::Bool => "Boolean".into(),
            ExprTy::Int => "integer".into(),
            ExprTy::Enum(id) => format!("`{}`", self.model.type_def(*id).name),
            ExprTy::EnumLiteral(s) => format!("enumeration value `{s}`"),
        }
    }

    fn fits(&self, found: &ExprTy, want: Ty) -> bool {
        match (found, want) {
            (ExprTy::Bool, Ty::Boolean) | (ExprTy::Int, Ty::Int { .. }) => true,
            (ExprTy::Enum(a), Ty::Enum(b)) => *a == b,
            (ExprTy::EnumLiteral(s), Ty::Enum(b)) => self.model.type_def(b).values.contains(s),
            _ => false,
        }
    }

    fn typed_expr(&mut self, scope: &Scope, e: &ExprSyntax, want: Ty) -> Option<Expr> {
        let (expr, ty) = self.expr(scope, e)?;
        if self.fits(&ty, want) {
            Some(expr)
        } else {
            let msg = format!("expected {}, found {}", self.model.type_name(want), self.describe(&ty));
            self.error(TYPE_MISMATCH, e.span(), msg);
            None
        }
    }

    fn enum_value_known(&self, s: &str) -> bool {
        self.model.types.iter().any(|t| t.values.iter().any(|v| v == s))
    }

    fn expr(&mut self, scope: &Scope, e: &ExprSyntax) -> Option<(Expr, ExprTy)> {
        match e {
            ExprSyntax::Lit(l) => match &l.kind {
                LiteralKind::Bool(b) => Some((Expr::Lit(Value::Bool(*b)), ExprTy::Bool)),
                LiteralKind::Int(i) => Some((Expr::Lit(Value::Int(*i)), ExprTy::Int)),
                LiteralKind::Symbol(s) => self.enum_literal(s, l.span),
            },
            ExprSyntax::Name(id) => {
                if let Some(p) = scope.component.port_index(&id.name) {
                    let port = &scope.component.ports[p];
                    if port.direction == Direction::Out {
                        let msg = format!("output port `{}` cannot be read", id.name);
                        self.error(INVALID_DECLARATION, id.span, msg);
                        return None;
                    }
                    return Some((Expr::Port(p, id.span), self.ty_of(port.ty)));
                }
                if let Some(v) = scope.variables.iter().position(|v| v.name == id.name) {
                    return Some((Expr::Var(v), self.ty_of(scope.variables[v].ty)));
                }
                self.enum_literal(&id.name, id.span)
            }
            ExprSyntax::Not(inner, span) => {
                let (e, ty) = self.expr(scope, inner)?;
                if ty != ExprTy::Bool {
                    self.error(TYPE_MISMATCH, *span, format!("`not` needs a Boolean, found {}", self.describe(&ty)));
                    return None;
                }
                Some((Expr::Not(Box::new(e)), ExprTy::Bool))
            }
            ExprSyntax::Binary(op, l, r) => {
                let lhs = self.expr(scope, l);
                let rhs = self.expr(scope, r);
                let ((le, lt), (re, rt)) = (lhs?, rhs?);
                let result = match op {
                    BinOp::And | BinOp::Or => (lt == ExprTy::Bool && rt == ExprTy::Bool).then_some(ExprTy::Bool),
                    BinOp::Add | BinOp::Sub => (lt == ExprTy::Int && rt == ExprTy::Int).then_some(ExprTy::Int),
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        (lt == ExprTy::Int && rt == ExprTy::Int).then_some(ExprTy::Bool)
                    }
                    BinOp::Eq | BinOp::Ne => self.comparable(&lt, &rt).then_some(ExprTy::Bool),
                };
                match result {
                    Some(ty) => Some((Expr::Binary(*op, Box::new(le), Box::new(re)), ty)),
                    None => {
                        let msg = format!(
                            "operator `{}` cannot combine {} and {}",
                            op.symbol(),
                            self.describe(&lt),
                            self.describe(&rt)
                        );
                        self.error(TYPE_MISMATCH, l.span(), msg);
                        None
                    }
                }
            }
        }
    }

    fn comparable(&self, a: &ExprTy, b: &ExprTy) -> bool {
        match (a, b) {
            (ExprTy::EnumLiteral(s), ExprTy::Enum(t)) | (ExprTy::Enum(t), ExprTy::EnumLiteral(s)) => {
                self.model.type_def(*t).values.contains(s)
            }
            _ => a == b,
        }
    }

    fn enum_literal(&mut self, s: &str, span: Span) -> Option<(Expr, ExprTy)> {
        if self.enum_value_known(s) {
            Some((Expr::Lit(Value::Enum(s.to_string())), ExprTy::EnumLiteral(s.to_string())))
        } else {
            self.error(UNKNOWN_NAME, span, format!("unknown name `{s}`"));
            None
        }
    }

    fn ty_of(&self, ty: Ty) -> ExprTy {
        match ty {
            Ty::Boolean => ExprTy::Bool,
            Ty::Int { .. } => ExprTy::Int,
            Ty::Enum(id) => ExprTy::Enum(id),
        }
    }
}

/// Turns a resolved model back into syntax. `resolve(&[to_syntax(m)])`
/// reproduces `m`.
pub fn to_syntax(model: &Model) -> SyntaxTree {
    let id = |name: &str, span: Span| Ident::new(name, span);
    let mut items = Vec::new();
    for t in &model.types {
        items.push(Item::Enum(EnumDecl {
            name: id(&t.name, t.span),
            values: t.values.iter().map(|v| id(v, t.span)).collect(),
        }));
    }
    for c in &model.components {
        let type_ref = |ty: Ty, span: Span| match ty {
            Ty::Boolean => TypeRefSyntax::Boolean(span),
            Ty::Int { lo, hi } => TypeRefSyntax::Int { lo, hi, span },
            Ty::Enum(t) => TypeRefSyntax::Named(id(&model.type_def(t).name, span)),
        };
        let mut elements = Vec::new();
        if !c.ports.is_empty() {
            elements.push(Element::Ports(
                c.ports
                    .iter()
                    .map(|p| PortItem { direction: p.direction, ty: type_ref(p.ty, p.span), name: id(&p.name, p.span) })
                    .collect(),
            ));
        }
        match &c.body {
            Body::Composed { subcomponents, connectors } => {
                for s in subcomponents {
                    elements.push(Element::Instance {
                        component: id(&model.component(s.component).name, s.span),
                        name: id(&s.name, s.span),
                    });
                }
                let port_ref = |r: &PortRef| {
                    let owner = model.port_owner_type(c, r.owner).expect("bound port owner");
                    PortRefSyntax {
                        instance: match r.owner {
                            PortOwner::This => None,
                            PortOwner::Instance(i) => Some(id(&subcomponents[i].name, r.span)),
                        },
                        port: id(&owner.ports[r.port].name, r.span),
                    }
                };
                for k in connectors {
                    elements.push(Element::Connect {
                        source: port_ref(&k.source),
                        targets: k.targets.iter().map(port_ref).collect(),
                        span: k.span,
                    });
                }
            }
            Body::Atomic(a) => {
                let lit = |v: &Value, span: Span| ast::Literal {
                    kind: match v {
                        Value::Bool(b) => LiteralKind::Bool(*b),
                        Value::Int(i) => LiteralKind::Int(*i),
                        Value::Enum(s) => LiteralKind::Symbol(s.clone()),
                    },
                    span,
                };
                let expr = |e: &Expr| expr_syntax(c, a, e);
                elements.push(Element::Automaton(AutomatonSyntax {
                    vars: a
                        .variables
                        .iter()
                        .map(|v| VarSyntax {
                            ty: type_ref(v.ty, v.span),
                            name: id(&v.name, v.span),
                            init: lit(&v.initial, v.span),
                        })
                        .collect(),
                    states: a
                        .states
                        .iter()
                        .map(|s| StateSyntax {
                            name: id(&s.name, s.span),
                            initial: s.initial,
                            initial_outputs: s
                                .initial_outputs
                                .iter()
                                .map(|(p, v, span)| (id(&c.ports[*p].name, *span), lit(v, *span)))
                                .collect(),
                        })
                        .collect(),
                    transitions: a
                        .transitions
                        .iter()
                        .map(|t| TransitionSyntax {
                            source: id(&a.states[t.source].name, t.span),
                            target: id(&a.states[t.target].name, t.span),
                            trigger: t
                                .trigger
                                .iter()
                                .map(|(p, v, span)| (id(&c.ports[*p].name, *span), lit(v, *span)))
                                .collect(),
                            guard: t.guard.as_ref().map(expr),
                            actions: t
                                .outputs
                                .iter()
                                .map(|(p, e)| Action::Output(id(&c.ports[*p].name, t.span), expr(e)))
                                .chain(
                                    t.assignments
                                        .iter()
                                        .map(|(v, e)| Action::Assign(id(&a.variables[*v].name, t.span), expr(e))),
                                )
                                .collect(),
                            span: t.span,
                        })
                        .collect(),
                    span: a.span,
                }));
            }
        }
        items.push(Item::Component(ComponentDecl { name: id(&c.name, c.span), elements }));
    }
    SyntaxTree { items }
}

/// Renders a resolved expression back to syntax.
pub fn expr_syntax(c: &ComponentType, a: &Automaton, e: &Expr) -> ExprSyntax {
    let span = Span::default();
    match e {
        Expr::Lit(v) => ExprSyntax::Lit(ast::Literal {
            kind: match v {
                Value::Bool(b) => LiteralKind::Bool(*b),
                Value::Int(i) => LiteralKind::Int(*i),
                Value::Enum(s) => LiteralKind::Symbol(s.clone()),
            },
            span,
        }),
        Expr::Port(p, span) => ExprSyntax::Name(Ident::new(&c.ports[*p].name, *span)),
        Expr::Var(v) => ExprSyntax::Name(Ident::new(&a.variables[*v].name, span)),
        Expr::Not(inner) => ExprSyntax::Not(Box::new(expr_syntax(c, a, inner)), span),
        Expr::Binary(op, l, r) => {
            ExprSyntax::Binary(*op, Box::new(expr_syntax(c, a, l)), Box::new(expr_syntax(c, a, r)))
        }
    }
}
