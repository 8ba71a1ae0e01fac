//! A parser, scope validator and bounded evaluator for the fragment of
//! Mona's WS1S input language that the generator emits.
//!
//! Quantifiers extend as far right as possible; `~` binds tighter than `&`,
//! which binds tighter than `|`, which binds tighter than `=>`.

use std::collections::{BTreeMap, BTreeSet};

const KEYWORDS: &[&str] = &[
    "all0", "all1", "all2", "ex0", "ex1", "ex2", "var0", "var1", "var2", "pred", "macro", "in", "notin", "true",
    "false", "ws1s", "ws2s", "let0", "let1", "let2", "where", "union", "inter", "setminus", "empty", "min", "max",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    Num(u32),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push(Tok::Num(s.parse().map_err(|_| format!("bad number {s}"))?));
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let sym = ["<=>", "=>", ";", ",", ":", "(", ")", "=", "&", "|", "~", "+"]
                .into_iter()
                .find(|s| rest.starts_with(s))
                .ok_or_else(|| format!("unexpected character `{c}`"))?;
            toks.push(Tok::Sym(sym));
            i += sym.len();
        }
    }
    Ok(toks)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Num(u32),
    Plus(Box<Term>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Ex1,
    All1,
    Ex2,
    All2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    In(Term, String),
    NotIn(Term, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quant, Vec<String>, Box<Formula>),
    Call(String, Vec<String>),
}

#[derive(Clone, Debug)]
pub struct Pred {
    pub name: String,
    pub params: Vec<String>,
    pub body: Formula,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub preds: Vec<Pred>,
    pub assertions: Vec<Formula>,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(t)
    }

    fn sym(&mut self, s: &str) -> Result<(), String> {
        match self.next()? {
            Tok::Sym(x) if x == s => Ok(()),
            other => Err(format!("expected `{s}`, found {other:?} at token {}", self.pos - 1)),
        }
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn at_id(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(x)) if x == s)
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Id(x) if !KEYWORDS.contains(&x.as_str()) => Ok(x),
            other => Err(format!("expected an identifier, found {other:?} at token {}", self.pos - 1)),
        }
    }

    fn program(&mut self) -> Result<Program, String> {
        match self.next()? {
            Tok::Id(x) if x == "ws1s" => self.sym(";")?,
            other => return Err(format!("expected the `ws1s;` header, found {other:?}")),
        }
        let mut preds = Vec::new();
        let mut assertions = Vec::new();
        while self.peek().is_some() {
            if self.at_id("pred") {
                self.pos += 1;
                let name = self.ident()?;
                self.sym("(")?;
                let mut params = Vec::new();
                loop {
                    match self.next()? {
                        Tok::Id(k) if k == "var2" => {}
                        other => return Err(format!("expected `var2`, found {other:?}")),
                    }
                    params.push(self.ident()?);
                    if self.at_sym(",") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.sym(")")?;
                self.sym("=")?;
                let body = self.formula()?;
                self.sym(";")?;
                preds.push(Pred { name, params, body });
            } else {
                assertions.push(self.formula()?);
                self.sym(";")?;
            }
        }
        Ok(Program { preds, assertions })
    }

    fn formula(&mut self) -> Result<Formula, String> {
        let lhs = self.disjunction()?;
        if self.at_sym("=>") {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, String> {
        let mut f = self.conjunction()?;
        while self.at_sym("|") {
            self.pos += 1;
            f = Formula::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, String> {
        let mut f = self.unary()?;
        while self.at_sym("&") {
            self.pos += 1;
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, String> {
        if self.at_sym("~") {
            self.pos += 1;
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.at_sym("(") {
            self.pos += 1;
            let f = self.formula()?;
            self.sym(")")?;
            return Ok(f);
        }
        let quant = match self.peek() {
            Some(Tok::Id(k)) if k == "ex1" => Some(Quant::Ex1),
            Some(Tok::Id(k)) if k == "all1" => Some(Quant::All1),
            Some(Tok::Id(k)) if k == "ex2" => Some(Quant::Ex2),
            Some(Tok::Id(k)) if k == "all2" => Some(Quant::All2),
            _ => None,
        };
        if let Some(q) = quant {
            self.pos += 1;
            let mut vars = vec![self.ident()?];
            while self.at_sym(",") {
                self.pos += 1;
                vars.push(self.ident()?);
            }
            self.sym(":")?;
            // the body extends as far right as possible
            return Ok(Formula::Quant(q, vars, Box::new(self.formula()?)));
        }
        if self.at_id("true") || self.at_id("false") {
            let b = self.at_id("true");
            self.pos += 1;
            return Ok(Formula::Const(b));
        }
        // a predicate call or a membership
        if let (Some(Tok::Id(name)), Some(Tok::Sym("("))) = (self.toks.get(self.pos).cloned(), self.toks.get(self.pos + 1)) {
            if !KEYWORDS.contains(&name.as_str()) {
                self.pos += 2;
                let mut args = vec![self.ident()?];
                while self.at_sym(",") {
                    self.pos += 1;
                    args.push(self.ident()?);
                }
                self.sym(")")?;
                return Ok(Formula::Call(name, args));
            }
        }
        let term = self.term()?;
        match self.next()? {
            Tok::Id(k) if k == "in" => Ok(Formula::In(term, self.ident()?)),
            Tok::Id(k) if k == "notin" => Ok(Formula::NotIn(term, self.ident()?)),
            other => Err(format!("expected `in` or `notin`, found {other:?} at token {}", self.pos - 1)),
        }
    }

    fn term(&mut self) -> Result<Term, String> {
        let mut t = match self.next()? {
            Tok::Num(n) => Term::Num(n),
            Tok::Id(x) if !KEYWORDS.contains(&x.as_str()) => Term::Var(x),
            other => return Err(format!("expected a term, found {other:?} at token {}", self.pos - 1)),
        };
        while self.at_sym("+") {
            self.pos += 1;
            match self.next()? {
                Tok::Num(n) => t = Term::Plus(Box::new(t), n),
                other => return Err(format!("expected a number after `+`, found {other:?}")),
            }
        }
        Ok(t)
    }
}

pub fn parse(text: &str) -> Result<Program, String> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    p.program()
}

#[derive(Default, Clone)]
struct Scope {
    first: BTreeSet<String>,
    second: BTreeSet<String>,
}

fn check_term(t: &Term, scope: &Scope) -> Result<(), String> {
    match t {
        Term::Var(x) if scope.first.contains(x) => Ok(()),
        Term::Var(x) => Err(format!("first-order variable `{x}` is not declared")),
        Term::Num(_) => Ok(()),
        Term::Plus(t, _) => check_term(t, scope),
    }
}

fn check_formula(f: &Formula, scope: &Scope, preds: &BTreeMap<String, usize>) -> Result<(), String> {
    let set = |s: &String| {
        if scope.second.contains(s) {
            Ok(())
        } else {
            Err(format!("second-order variable `{s}` is not declared"))
        }
    };
    match f {
        Formula::Const(_) => Ok(()),
        Formula::In(t, s) | Formula::NotIn(t, s) => {
            check_term(t, scope)?;
            set(s)
        }
        Formula::Not(g) => check_formula(g, scope, preds),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_formula(a, scope, preds)?;
            check_formula(b, scope, preds)
        }
        Formula::Quant(q, vars, body) => {
            let distinct: BTreeSet<&String> = vars.iter().collect();
            if distinct.len() != vars.len() {
                return Err(format!("duplicate variable in quantifier over {vars:?}"));
            }
            let mut inner = scope.clone();
            for v in vars {
                match q {
                    Quant::Ex1 | Quant::All1 => inner.first.insert(v.clone()),
                    Quant::Ex2 | Quant::All2 => inner.second.insert(v.clone()),
                };
            }
            check_formula(body, &inner, preds)
        }
        Formula::Call(name, args) => {
            let arity = preds.get(name).ok_or_else(|| format!("predicate `{name}` is not defined before use"))?;
            if *arity != args.len() {
                return Err(format!("`{name}` takes {arity} arguments, got {}", args.len()));
            }
            args.iter().try_for_each(set)
        }
    }
}

/// Parses `text` and checks that every variable is declared with the right
/// order and every predicate is defined before use with the right arity.
pub fn validate(text: &str) -> Result<Program, String> {
    let program = parse(text)?;
    let mut preds = BTreeMap::new();
    for p in &program.preds {
        let distinct: BTreeSet<&String> = p.params.iter().collect();
        if distinct.len() != p.params.len() {
            return Err(format!("duplicate parameter of `{}`", p.name));
        }
        let scope = Scope { first: BTreeSet::new(), second: p.params.iter().cloned().collect() };
        check_formula(&p.body, &scope, &preds).map_err(|e| format!("in `{}`: {e}", p.name))?;
        if preds.insert(p.name.clone(), p.params.len()).is_some() {
            return Err(format!("predicate `{}` defined twice", p.name));
        }
    }
    for a in &program.assertions {
        check_formula(a, &Scope::default(), &preds)?;
    }
    Ok(program)
}

/// Sets are bit masks over the time points `0..width`; first-order
/// variables range over `0..=width`.
pub struct Evaluator<'p> {
    program: &'p Program,
    width: u32,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program, width: u32) -> Self {
        assert!(width < 16);
        Evaluator { program, width }
    }

    /// Evaluates predicate `name` on the given sets.
    pub fn call(&self, name: &str, args: &[u32]) -> bool {
        let p = self.program.preds.iter().find(|p| p.name == name).expect("predicate");
        let sets: BTreeMap<String, u32> = p.params.iter().cloned().zip(args.iter().copied()).collect();
        self.eval(&p.body, &BTreeMap::new(), &sets)
    }

    fn term(&self, t: &Term, first: &BTreeMap<String, u32>) -> u32 {
        match t {
            Term::Var(x) => first[x],
            Term::Num(n) => *n,
            Term::Plus(t, n) => self.term(t, first) + n,
        }
    }

    fn eval(&self, f: &Formula, first: &BTreeMap<String, u32>, sets: &BTreeMap<String, u32>) -> bool {
        let member = |t: &Term, s: &String| {
            let k = self.term(t, first);
            k < 32 && sets[s] & (1 << k) != 0
        };
        match f {
            Formula::Const(b) => *b,
            Formula::In(t, s) => member(t, s),
            Formula::NotIn(t, s) => !member(t, s),
            Formula::Not(g) => !self.eval(g, first, sets),
            Formula::And(a, b) => self.eval(a, first, sets) && self.eval(b, first, sets),
            Formula::Or(a, b) => self.eval(a, first, sets) || self.eval(b, first, sets),
            Formula::Implies(a, b) => !self.eval(a, first, sets) || self.eval(b, first, sets),
            Formula::Quant(q, vars, body) => self.quant(*q, vars, body, first, sets),
            Formula::Call(name, args) => {
                let values: Vec<u32> = args.iter().map(|a| sets[a]).collect();
                self.call(name, &values)
            }
        }
    }

    fn quant(
        &self,
        q: Quant,
        vars: &[String],
        body: &Formula,
        first: &BTreeMap<String, u32>,
        sets: &BTreeMap<String, u32>,
    ) -> bool {
        let Some((v, rest)) = vars.split_first() else { return self.eval(body, first, sets) };
        let existential = matches!(q, Quant::Ex1 | Quant::Ex2);
        let mut any = false;
        let mut all = true;
        match q {
            Quant::Ex1 | Quant::All1 => {
                for k in 0..=self.width {
                    let mut f = first.clone();
                    f.insert(v.clone(), k);
                    let r = self.quant(q, rest, body, &f, sets);
                    any |= r;
                    all &= r;
                    if existential && any || !existential && !all {
                        break;
                    }
                }
            }
            Quant::Ex2 | Quant::All2 => {
                for mask in 0..(1u32 << self.width) {
                    let mut s = sets.clone();
                    s.insert(v.clone(), mask);
                    let r = self.quant(q, rest, body, first, &s);
                    any |= r;
                    all &= r;
                    if existential && any || !existential && !all {
                        break;
                    }
                }
            }
        }
        if existential {
            any
        } else {
            all
        }
    }
}
