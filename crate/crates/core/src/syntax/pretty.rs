//! Canonical source rendering of a syntax tree.

use std::fmt::Write;

use super::ast::*;

/// Renders `tree` in canonical layout. Parsing the result yields a tree equal
/// to `tree`.
pub fn pretty_print(tree: &SyntaxTree) -> String {
    let mut out = String::new();
    for (i, item) in tree.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Enum(e) => {
                let values: Vec<&str> = e.values.iter().map(|v| v.name.as_str()).collect();
                let _ = writeln!(out, "enum {} {{ {} }}", e.name.name, values.join(", "));
            }
            Item::Component(c) => component(&mut out, c),
        }
    }
    out
}

fn component(out: &mut String, c: &ComponentDecl) {
    let _ = writeln!(out, "component {} {{", c.name.name);
    for element in &c.elements {
        match element {
            Element::Ports(items) => {
                let items: Vec<String> = items
                    .iter()
                    .map(|p| format!("{} {} {}", p.direction.keyword(), type_ref(&p.ty), p.name.name))
                    .collect();
                let _ = writeln!(out, "  port {};", items.join(", "));
            }
            Element::Instance { component, name } => {
                let _ = writeln!(out, "  instance {} {};", component.name, name.name);
            }
            Element::Connect { source, targets, .. } => {
                let targets: Vec<String> = targets.iter().map(port_ref).collect();
                let _ = writeln!(out, "  connect {} -> {};", port_ref(source), targets.join(", "));
            }
            Element::Automaton(a) => automaton(out, a),
        }
    }
    out.push_str("}\n");
}

fn automaton(out: &mut String, a: &AutomatonSyntax) {
    out.push_str("  automaton {\n");
    for v in &a.vars {
        let _ = writeln!(out, "    var {} {} = {};", type_ref(&v.ty), v.name.name, literal(&v.init));
    }
    if !a.states.is_empty() {
        let states: Vec<String> = a.states.iter().map(state).collect();
        let _ = writeln!(out, "    state {};", states.join(", "));
    }
    for t in &a.transitions {
        let _ = writeln!(out, "    {}", transition(t));
    }
    out.push_str("  }\n");
}

fn state(s: &StateSyntax) -> String {
    let mut text = s.name.name.clone();
    if s.initial {
        text.push_str(" [initial");
        if !s.initial_outputs.is_empty() {
            let _ = write!(text, " {{{}}}", pairs(&s.initial_outputs));
        }
        text.push(']');
    }
    text
}

fn pairs(pairs: &[(Ident, Literal)]) -> String {
    pairs.iter().map(|(p, l)| format!("{}:{}", p.name, literal(l))).collect::<Vec<_>>().join(", ")
}

/// `source -> target {trigger} [guard] / {actions};`
pub fn transition(t: &TransitionSyntax) -> String {
    let mut text = format!("{} -> {}", t.source.name, t.target.name);
    if !t.trigger.is_empty() {
        let _ = write!(text, " {{{}}}", pairs(&t.trigger));
    }
    if let Some(g) = &t.guard {
        let _ = write!(text, " [{}]", expr(g));
    }
    if !t.actions.is_empty() {
        let actions: Vec<String> = t
            .actions
            .iter()
            .map(|a| match a {
                Action::Output(p, e) => format!("{}:{}", p.name, expr(e)),
                Action::Assign(v, e) => format!("{} = {}", v.name, expr(e)),
            })
            .collect();
        let _ = write!(text, " / {{{}}}", actions.join(", "));
    }
    text.push(';');
    text
}

fn type_ref(t: &TypeRefSyntax) -> String {
    match t {
        TypeRefSyntax::Boolean(_) => "Boolean".to_string(),
        TypeRefSyntax::Int { lo, hi, .. } => format!("Int({lo}..{hi})"),
        TypeRefSyntax::Named(id) => id.name.clone(),
    }
}

fn port_ref(r: &PortRefSyntax) -> String {
    match &r.instance {
        Some(i) => format!("{}.{}", i.name, r.port.name),
        None => r.port.name.clone(),
    }
}

pub fn literal(l: &Literal) -> String {
    match &l.kind {
        LiteralKind::Bool(b) => b.to_string(),
        LiteralKind::Int(i) => i.to_string(),
        LiteralKind::Symbol(s) => s.clone(),
    }
}

/// Renders an expression with the minimal parentheses needed to reparse it.
pub fn expr(e: &ExprSyntax) -> String {
    let mut out = String::new();
    expr_into(&mut out, e, 0);
    out
}

const NOT_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 6;

fn precedence(e: &ExprSyntax) -> u8 {
    match e {
        ExprSyntax::Lit(_) | ExprSyntax::Name(_) => ATOM_PRECEDENCE,
        ExprSyntax::Not(..) => NOT_PRECEDENCE,
        ExprSyntax::Binary(op, ..) => op.precedence(),
    }
}

fn expr_into(out: &mut String, e: &ExprSyntax, min: u8) {
    let wrap = precedence(e) < min;
    if wrap {
        out.push('(');
    }
    match e {
        ExprSyntax::Lit(l) => out.push_str(&literal(l)),
        ExprSyntax::Name(id) => out.push_str(&id.name),
        ExprSyntax::Not(inner, _) => {
            out.push_str("not ");
            expr_into(out, inner, NOT_PRECEDENCE);
        }
        ExprSyntax::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            // comparisons do not chain, so their left operand binds tighter too
            let left_min = if op.is_comparison() { p + 1 } else { p };
            expr_into(out, lhs, left_min);
            let _ = write!(out, " {} ", op.symbol());
            expr_into(out, rhs, p + 1);
        }
    }
    if wrap {
        out.push(')');
    }
}
