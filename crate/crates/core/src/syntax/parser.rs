//! Hand-written recursive descent parser for `.maa` files.
//!
//! Errors never abort parsing: the parser reports a diagnostic, skips to the
//! next `;` or `}` and carries on, so a broken file still yields a partial
//! tree.

use super::ast::*;
use super::lexer::{is_keyword, lex, Tok, Token};
use crate::diag::{Diagnostic, FileId, Span};

/// Parses one source text. Never fails; problems come back as diagnostics.
pub fn parse(text: &str, file: FileId) -> (SyntaxTree, Vec<Diagnostic>) {
    let (tokens, diags) = lex(text, file);
    let mut p = Parser { tokens, pos: 0, diags };
    let tree = p.model();
    (tree, p.diags)
}

/// Error already reported; the caller should resynchronize.
struct Stop;

type PResult<T> = Result<T, Stop>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_expected(&mut self, what: &str) -> Stop {
        let found = self.peek().describe();
        self.diags.push(Diagnostic::error(
            "P002",
            self.span(),
            format!("expected {what}, found {found}"),
        ));
        Stop
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.at(&tok) {
            Ok(self.bump().span)
        } else {
            Err(self.error_expected(&format!("`{}`", tok.text())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.error_expected(&format!("`{kw}`")))
        }
    }

    /// A missing statement terminator is reported without giving up on the
    /// statement that precedes it.
    fn expect_semi(&mut self) {
        if !self.eat(&Tok::Semi) {
            self.error_expected("`;`");
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                let span = self.bump().span;
                Ok(Ident::new(name, span))
            }
            _ => Err(self.error_expected(what)),
        }
    }

    /// Skips to just after the next `;`, or to (not past) an unbalanced `}`.
    fn sync_statement(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    fn model(&mut self) -> SyntaxTree {
        let mut items = Vec::new();
        while !self.at(&Tok::Eof) {
            if self.at_keyword("enum") {
                match self.enum_decl() {
                    Ok(e) => items.push(Item::Enum(e)),
                    Err(Stop) => self.sync_top_level(),
                }
            } else if self.at_keyword("component") {
                match self.component() {
                    Ok(c) => items.push(Item::Component(c)),
                    Err(Stop) => self.sync_top_level(),
                }
            } else {
                self.error_expected("`enum` or `component`");
                self.bump();
                self.sync_top_level();
            }
        }
        SyntaxTree { items }
    }

    fn sync_top_level(&mut self) {
        while !self.at(&Tok::Eof) && !self.at_keyword("enum") && !self.at_keyword("component") {
            self.bump();
        }
    }

    fn enum_decl(&mut self) -> PResult<EnumDecl> {
        self.expect_keyword("enum")?;
        let name = self.ident("enumeration name")?;
        self.expect(Tok::LBrace)?;
        let mut values = vec![self.ident("enumeration value")?];
        while self.eat(&Tok::Comma) {
            values.push(self.ident("enumeration value")?);
        }
        self.expect(Tok::RBrace)?;
        Ok(EnumDecl { name, values })
    }

    fn component(&mut self) -> PResult<ComponentDecl> {
        self.expect_keyword("component")?;
        let name = self.ident("component name")?;
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    self.error_expected("`}`");
                    break;
                }
                _ => {}
            }
            match self.element() {
                Ok(e) => elements.push(e),
                Err(Stop) => self.sync_statement(),
            }
        }
        Ok(ComponentDecl { name, elements })
    }

    fn element(&mut self) -> PResult<Element> {
        if self.eat_keyword("port") {
            let mut items = vec![self.port_item()?];
            while self.eat(&Tok::Comma) {
                items.push(self.port_item()?);
            }
            self.expect_semi();
            Ok(Element::Ports(items))
        } else if self.eat_keyword("instance") {
            let component = self.ident("component type")?;
            let name = self.ident("instance name")?;
            self.expect_semi();
            Ok(Element::Instance { component, name })
        } else if self.at_keyword("connect") {
            let span = self.bump().span;
            let source = self.port_ref()?;
            self.expect(Tok::Arrow)?;
            let mut targets = vec![self.port_ref()?];
            while self.eat(&Tok::Comma) {
                targets.push(self.port_ref()?);
            }
            self.expect_semi();
            Ok(Element::Connect { source, targets, span })
        } else if self.at_keyword("automaton") {
            self.automaton().map(Element::Automaton)
        } else {
            Err(self.error_expected("`port`, `instance`, `connect` or `automaton`"))
        }
    }

    fn port_item(&mut self) -> PResult<PortItem> {
        let direction = if self.eat_keyword("in") {
            Direction::In
        } else if self.eat_keyword("out") {
            Direction::Out
        } else {
            return Err(self.error_expected("`in` or `out`"));
        };
        let ty = self.type_ref()?;
        let name = self.ident("port name")?;
        Ok(PortItem { direction, ty, name })
    }

    fn type_ref(&mut self) -> PResult<TypeRefSyntax> {
        if self.at_keyword("Boolean") {
            Ok(TypeRefSyntax::Boolean(self.bump().span))
        } else if self.at_keyword("Int") {
            let span = self.bump().span;
            self.expect(Tok::LParen)?;
            let lo = self.signed_int()?;
            self.expect(Tok::DotDot)?;
            let hi = self.signed_int()?;
            self.expect(Tok::RParen)?;
            Ok(TypeRefSyntax::Int { lo, hi, span })
        } else {
            Ok(TypeRefSyntax::Named(self.ident("type")?))
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let negative = self.eat(&Tok::Minus);
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error_expected("integer")),
        }
    }

    fn port_ref(&mut self) -> PResult<PortRefSyntax> {
        let first = self.ident("port reference")?;
        if self.eat(&Tok::Dot) {
            let port = self.ident("port name")?;
            Ok(PortRefSyntax { instance: Some(first), port })
        } else {
            Ok(PortRefSyntax { instance: None, port: first })
        }
    }

    fn automaton(&mut self) -> PResult<AutomatonSyntax> {
        let span = self.expect_keyword("automaton")?;
        self.expect(Tok::LBrace)?;
        let mut vars = Vec::new();
        while self.at_keyword("var") {
            match self.var_decl() {
                Ok(v) => vars.push(v),
                Err(Stop) => self.sync_statement(),
            }
        }
        let mut states = Vec::new();
        match self.state_section() {
            Ok(s) => states = s,
            Err(Stop) => self.sync_statement(),
        }
        let mut transitions = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    self.error_expected("`}`");
                    break;
                }
                _ => {}
            }
            match self.transition() {
                Ok(t) => transitions.push(t),
                Err(Stop) => self.sync_statement(),
            }
        }
        Ok(AutomatonSyntax { vars, states, transitions, span })
    }

    fn var_decl(&mut self) -> PResult<VarSyntax> {
        self.expect_keyword("var")?;
        let ty = self.type_ref()?;
        let name = self.ident("variable name")?;
        self.expect(Tok::Assign)?;
        let init = self.literal()?;
        self.expect_semi();
        Ok(VarSyntax { ty, name, init })
    }

    fn state_section(&mut self) -> PResult<Vec<StateSyntax>> {
        self.expect_keyword("state")?;
        let mut states = vec![self.state_item()?];
        while self.eat(&Tok::Comma) {
            states.push(self.state_item()?);
        }
        self.expect_semi();
        Ok(states)
    }

    fn state_item(&mut self) -> PResult<StateSyntax> {
        let name = self.ident("state name")?;
        let mut initial = false;
        let mut initial_outputs = Vec::new();
        if self.eat(&Tok::LBracket) {
            self.expect_keyword("initial")?;
            initial = true;
            if self.eat(&Tok::LBrace) {
                initial_outputs = self.literal_pairs()?;
                self.expect(Tok::RBrace)?;
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(StateSyntax { name, initial, initial_outputs })
    }

    fn literal_pairs(&mut self) -> PResult<Vec<(Ident, Literal)>> {
        let mut pairs = Vec::new();
        loop {
            let port = self.ident("port name")?;
            self.expect(Tok::Colon)?;
            pairs.push((port, self.literal()?));
            if !self.eat(&Tok::Comma) {
                return Ok(pairs);
            }
        }
    }

    fn transition(&mut self) -> PResult<TransitionSyntax> {
        let source = self.ident("source state")?;
        let span = source.span;
        self.expect(Tok::Arrow)?;
        let target = self.ident("target state")?;
        let mut trigger = Vec::new();
        if self.eat(&Tok::LBrace) {
            trigger = self.literal_pairs()?;
            self.expect(Tok::RBrace)?;
        }
        let mut guard = None;
        if self.eat(&Tok::LBracket) {
            guard = Some(self.expr()?);
            self.expect(Tok::RBracket)?;
        }
        let mut actions = Vec::new();
        if self.eat(&Tok::Slash) {
            self.expect(Tok::LBrace)?;
            loop {
                let name = self.ident("port or variable name")?;
                if self.eat(&Tok::Colon) {
                    actions.push(Action::Output(name, self.expr()?));
                } else if self.eat(&Tok::Assign) {
                    actions.push(Action::Assign(name, self.expr()?));
                } else {
                    return Err(self.error_expected("`:` or `=`"));
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
        }
        self.expect_semi();
        Ok(TransitionSyntax { source, target, trigger, guard, actions, span })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) if s == "true" => LiteralKind::Bool(true),
            Tok::Ident(s) if s == "false" => LiteralKind::Bool(false),
            Tok::Ident(s) if !is_keyword(&s) => LiteralKind::Symbol(s),
            Tok::Int(v) => LiteralKind::Int(v),
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(v) = *self.peek() else { unreachable!() };
                LiteralKind::Int(-v)
            }
            _ => return Err(self.error_expected("literal")),
        };
        self.bump();
        Ok(Literal { kind, span })
    }

    fn expr(&mut self) -> PResult<ExprSyntax> {
        let mut lhs = self.and_expr()?;
        while self.eat_keyword("or") {
            let rhs = self.and_expr()?;
            lhs = ExprSyntax::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<ExprSyntax> {
        let mut lhs = self.not_expr()?;
        while self.eat_keyword("and") {
            let rhs = self.not_expr()?;
            lhs = ExprSyntax::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<ExprSyntax> {
        if self.at_keyword("not") {
            let span = self.bump().span;
            let inner = self.not_expr()?;
            Ok(ExprSyntax::Not(Box::new(inner), span))
        } else {
            self.comparison()
        }
    }

    fn comparison(&mut self) -> PResult<ExprSyntax> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(ExprSyntax::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> PResult<ExprSyntax> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.primary()?;
            lhs = ExprSyntax::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn primary(&mut self) -> PResult<ExprSyntax> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                let span = self.bump().span;
                Ok(ExprSyntax::Name(Ident::new(s, span)))
            }
            _ => self.literal().map(ExprSyntax::Lit),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> SyntaxTree {
        let (tree, diags) = parse(src, FileId(0));
        assert!(diags.is_empty(), "{diags:?}");
        tree
    }

    #[test]
    fn empty_input() {
        let (tree, diags) = parse("", FileId(0));
        assert!(tree.items.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn missing_semicolon_before_brace() {
        let (tree, diags) = parse("component X { port in bool b }", FileId(0));
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].code, "P002");
        assert_eq!((diags[0].span.line, diags[0].span.column), (1, 30));
        let Item::Component(c) = &tree.items[0] else { panic!() };
        let Element::Ports(ports) = &c.elements[0] else { panic!() };
        assert_eq!(ports[0].name.name, "b");
    }

    #[test]
    fn expression_precedence() {
        let tree = parse_ok(
            "component C { automaton { state s [initial]; s -> s [not a == 1 or b and c + 1 - 2 < 3]; } }",
        );
        let Item::Component(c) = &tree.items[0] else { panic!() };
        let Element::Automaton(a) = &c.elements[0] else { panic!() };
        let guard = a.transitions[0].guard.as_ref().unwrap();
        let ExprSyntax::Binary(BinOp::Or, lhs, rhs) = guard else { panic!("{guard:?}") };
        assert!(matches!(**lhs, ExprSyntax::Not(..)));
        let ExprSyntax::Binary(BinOp::And, _, cmp) = &**rhs else { panic!() };
        let ExprSyntax::Binary(BinOp::Lt, sum, _) = &**cmp else { panic!() };
        assert!(matches!(**sum, ExprSyntax::Binary(BinOp::Sub, _, _)));
    }

    #[test]
    fn recovers_after_bad_statement() {
        let (tree, diags) = parse(
            "component C { port in Boolean a; connect -> x; port out Boolean b; }",
            FileId(0),
        );
        assert_eq!(diags.len(), 1);
        let Item::Component(c) = &tree.items[0] else { panic!() };
        assert_eq!(c.elements.len(), 2);
    }

    #[test]
    fn negative_literals() {
        let tree = parse_ok("component C { automaton { var Int(-3..3) x = -2; state s [initial]; s -> s / {x = x - -1}; } }");
        let Item::Component(c) = &tree.items[0] else { panic!() };
        let Element::Automaton(a) = &c.elements[0] else { panic!() };
        assert_eq!(a.vars[0].init.kind, LiteralKind::Int(-2));
        assert!(matches!(a.vars[0].ty, TypeRefSyntax::Int { lo: -3, hi: 3, .. }));
    }

    #[test]
    fn keywords_are_not_identifiers() {
        let (_, diags) = parse("component state { }", FileId(0));
        assert_eq!(diags[0].code, "P002");
    }

    #[test]
    fn eof_inside_component() {
        let (tree, diags) = parse("component C { port in Boolean a;", FileId(0));
        assert_eq!(tree.items.len(), 1);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("end of input"));
    }
}
