//! Context conditions and language profiles.
//!
//! | code | profile    | rule |
//! |------|------------|------|
//! | W1   | core       | connector source and targets have the same type |
//! | W2   | core       | connector directions: source `this.in`/`inst.out`, targets `this.out`/`inst.in` |
//! | W3   | core       | every port is written by at most one connector (no fan-in) |
//! | W4   | core       | names are unique per namespace inside a component |
//! | W5   | core       | an automaton has exactly one initial state |
//! | W6   | core       | literals belong to the domain of their port or variable |
//! | W7   | core       | expressions only read in-ports that the transition's trigger fixes |
//! | W8   | core       | no component (transitively) instantiates itself |
//! | W9   | core       | every out-port of a composed component is connected |
//! | W10  | core       | warning: a subcomponent in-port is never written |
//! | E1   | executable | at most one transition is enabled in every reachable situation |
//! | A1   | analysis   | configuration and letter alphabet sizes stay within limits |
//! | A2   | analysis   | analyzed components are atomic |

use std::collections::{HashMap, HashSet};

use crate::diag::{sort_diagnostics, Diagnostic, Span};
use crate::model::*;
use crate::semantics::{elaborate, ConfigId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Core,
    Executable,
    Analysis,
}

impl std::str::FromStr for ProfileKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "core" => Ok(ProfileKind::Core),
            "executable" => Ok(ProfileKind::Executable),
            "analysis" => Ok(ProfileKind::Analysis),
            other => Err(format!("unknown profile `{other}` (expected core, executable or analysis)")),
        }
    }
}

/// State-space bounds of the analysis profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Bound on `|states| * |variable valuations|`.
    pub max_configs: u64,
    /// Bound on the number of letters (input valuation, output valuation).
    pub max_letters: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_configs: 10_000, max_letters: 100_000 }
    }
}

pub const CORE_RULES: &[&str] = &["W1", "W2", "W3", "W4", "W5", "W6", "W7", "W8", "W9", "W10"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub kind: ProfileKind,
    pub limits: Limits,
    /// Components the profile-specific rules apply to; `None` means all.
    pub targets: Option<Vec<ComponentId>>,
}

impl Profile {
    pub fn new(kind: ProfileKind) -> Self {
        Profile { kind, limits: Limits::default(), targets: None }
    }

    pub fn core() -> Self {
        Self::new(ProfileKind::Core)
    }

    pub fn executable() -> Self {
        Self::new(ProfileKind::Executable)
    }

    pub fn analysis() -> Self {
        Self::new(ProfileKind::Analysis)
    }

    pub fn with_targets(mut self, targets: impl IntoIterator<Item = ComponentId>) -> Self {
        self.targets = Some(targets.into_iter().collect());
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// Rule codes evaluated by this profile; always a superset of the core rules.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut rules = CORE_RULES.to_vec();
        match self.kind {
            ProfileKind::Core => {}
            ProfileKind::Executable => rules.push("E1"),
            ProfileKind::Analysis => rules.extend(["A1", "A2"]),
        }
        rules
    }

    fn targets(&self, model: &Model) -> Vec<ComponentId> {
        match &self.targets {
            Some(t) => t.clone(),
            None => (0..model.components.len()).map(ComponentId).collect(),
        }
    }
}

/// Evaluates every rule of `profile`. The result is empty iff the model
/// satisfies the profile (warnings included); it is sorted by position.
pub fn check(model: &Model, profile: &Profile) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut core_clean = HashSet::new();
    for (ci, c) in model.components.iter().enumerate() {
        let before = diags.len();
        match &c.body {
            Body::Composed { subcomponents, connectors } => {
                check_connectors(model, c, connectors, &mut diags);
                check_connected(model, c, subcomponents, connectors, &mut diags);
            }
            Body::Atomic(a) => check_automaton(model, c, a, &mut diags),
        }
        check_names(c, &mut diags);
        check_recursion(model, ComponentId(ci), &mut diags);
        if !diags[before..].iter().any(Diagnostic::is_error) {
            core_clean.insert(ci);
        }
    }
    match profile.kind {
        ProfileKind::Core => {}
        ProfileKind::Executable => {
            for id in profile.targets(model) {
                // determinism is only meaningful once the automaton is well-formed
                if model.component(id).is_atomic() && core_clean.contains(&id.0) {
                    check_determinism(model, id, &mut diags);
                }
            }
        }
        ProfileKind::Analysis => {
            for id in profile.targets(model) {
                check_analysis(model, id, &profile.limits, &mut diags);
            }
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

fn check_connectors(model: &Model, c: &ComponentType, connectors: &[Connector], diags: &mut Vec<Diagnostic>) {
    let name = |r: &PortRef| -> String {
        let port = model.port_decl(c, r).map(|p| p.name.as_str()).unwrap_or("?");
        match r.owner {
            PortOwner::This => port.to_string(),
            PortOwner::Instance(i) => format!("{}.{}", c.subcomponents()[i].name, port),
        }
    };
    let mut written: HashMap<(PortOwner, usize), Span> = HashMap::new();
    for k in connectors {
        let Some(source) = model.port_decl(c, &k.source) else { continue };
        let source_ok = matches!(
            (k.source.owner, source.direction),
            (PortOwner::This, Direction::In) | (PortOwner::Instance(_), Direction::Out)
        );
        if !source_ok {
            diags.push(Diagnostic::error(
                "W2",
                k.source.span,
                format!(
                    "connector source `{}` must be an in-port of `{}` or an out-port of a subcomponent",
                    name(&k.source),
                    c.name
                ),
            ));
        }
        for t in &k.targets {
            let Some(target) = model.port_decl(c, t) else { continue };
            if source.ty != target.ty {
                diags.push(Diagnostic::error(
                    "W1",
                    t.span,
                    format!(
                        "connector from `{}` ({}) to `{}` ({}) joins different types",
                        name(&k.source),
                        model.type_name(source.ty),
                        name(t),
                        model.type_name(target.ty)
                    ),
                ));
            }
            let target_ok = matches!(
                (t.owner, target.direction),
                (PortOwner::This, Direction::Out) | (PortOwner::Instance(_), Direction::In)
            );
            if !target_ok {
                diags.push(Diagnostic::error(
                    "W2",
                    t.span,
                    format!(
                        "connector target `{}` must be an out-port of `{}` or an in-port of a subcomponent",
                        name(t),
                        c.name
                    ),
                ));
            }
            if let Some(first) = written.insert((t.owner, t.port), t.span) {
                diags.push(Diagnostic::error(
                    "W3",
                    t.span,
                    format!(
                        "port `{}` is already written by the connector at {}:{}",
                        name(t),
                        first.line,
                        first.column
                    ),
                ));
            }
        }
    }
}

fn check_connected(
    model: &Model,
    c: &ComponentType,
    subcomponents: &[SubcomponentInstance],
    connectors: &[Connector],
    diags: &mut Vec<Diagnostic>,
) {
    let written: HashSet<(PortOwner, usize)> =
        connectors.iter().flat_map(|k| k.targets.iter().map(|t| (t.owner, t.port))).collect();
    for (p, port) in c.out_ports() {
        if !written.contains(&(PortOwner::This, p)) {
            diags.push(Diagnostic::error(
                "W9",
                port.span,
                format!("out-port `{}` of composed component `{}` is not connected", port.name, c.name),
            ));
        }
    }
    for (i, s) in subcomponents.iter().enumerate() {
        for (p, port) in model.component(s.component).in_ports() {
            if !written.contains(&(PortOwner::Instance(i), p)) {
                diags.push(Diagnostic::warning(
                    "W10",
                    s.span,
                    format!("in-port `{}.{}` is never written and stays silent", s.name, port.name),
                ));
            }
        }
    }
}

fn duplicates<'a>(
    items: impl IntoIterator<Item = (&'a str, Span)>,
    what: &str,
    owner: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let mut seen: HashMap<&str, Span> = HashMap::new();
    for (name, span) in items {
        if let Some(first) = seen.insert(name, span) {
            seen.insert(name, first);
            diags.push(Diagnostic::error(
                "W4",
                span,
                format!("{what} `{name}` in `{owner}` is already declared at {}:{}", first.line, first.column),
            ));
        }
    }
}

fn check_names(c: &ComponentType, diags: &mut Vec<Diagnostic>) {
    duplicates(c.ports.iter().map(|p| (p.name.as_str(), p.span)), "port", &c.name, diags);
    duplicates(c.subcomponents().iter().map(|s| (s.name.as_str(), s.span)), "instance", &c.name, diags);
    let Some(a) = c.automaton() else { return };
    // states and variables share the port namespace inside an automaton
    let mut seen: HashMap<&str, (&str, Span)> = c.ports.iter().map(|p| (p.name.as_str(), ("port", p.span))).collect();
    for (kind, name, span) in a
        .states
        .iter()
        .map(|s| ("state", s.name.as_str(), s.span))
        .chain(a.variables.iter().map(|v| ("variable", v.name.as_str(), v.span)))
    {
        if let Some((other, first)) = seen.get(name) {
            diags.push(Diagnostic::error(
                "W4",
                span,
                format!("{kind} `{name}` in `{}` clashes with the {other} declared at {}:{}", c.name, first.line, first.column),
            ));
        } else {
            seen.insert(name, (kind, span));
        }
    }
    for s in &a.states {
        duplicates(
            s.initial_outputs.iter().map(|(p, _, span)| (c.ports[*p].name.as_str(), *span)),
            "initial output port",
            &c.name,
            diags,
        );
    }
    for t in &a.transitions {
        duplicates(
            t.trigger.iter().map(|(p, _, span)| (c.ports[*p].name.as_str(), *span)),
            "trigger port",
            &c.name,
            diags,
        );
        duplicates(t.outputs.iter().map(|(p, _)| (c.ports[*p].name.as_str(), t.span)), "output port", &c.name, diags);
        duplicates(
            t.assignments.iter().map(|(v, _)| (a.variables[*v].name.as_str(), t.span)),
            "assigned variable",
            &c.name,
            diags,
        );
    }
}

fn check_automaton(model: &Model, c: &ComponentType, a: &Automaton, diags: &mut Vec<Diagnostic>) {
    let initial: Vec<&StateDecl> = a.states.iter().filter(|s| s.initial).collect();
    match initial.len() {
        1 => {}
        0 => diags.push(Diagnostic::error("W5", a.span, format!("automaton of `{}` has no initial state", c.name))),
        _ => {
            for s in &initial[1..] {
                diags.push(Diagnostic::error(
                    "W5",
                    s.span,
                    format!("automaton of `{}` has a second initial state `{}`", c.name, s.name),
                ));
            }
        }
    }

    let mut domain = |ty: Ty, v: &Value, span: Span, what: String| {
        if !model.in_domain(ty, v) {
            diags.push(Diagnostic::error(
                "W6",
                span,
                format!("`{v}` is not a value of {} ({what})", model.type_name(ty)),
            ));
        }
    };
    for v in &a.variables {
        domain(v.ty, &v.initial, v.span, format!("initial value of variable `{}`", v.name));
    }
    for s in &a.states {
        for (p, v, span) in &s.initial_outputs {
            domain(c.ports[*p].ty, v, *span, format!("initial output on `{}`", c.ports[*p].name));
        }
    }
    for t in &a.transitions {
        for (p, v, span) in &t.trigger {
            domain(c.ports[*p].ty, v, *span, format!("trigger on `{}`", c.ports[*p].name));
        }
        for (p, e) in &t.outputs {
            if let Expr::Lit(v) = e {
                domain(c.ports[*p].ty, v, t.span, format!("output on `{}`", c.ports[*p].name));
            }
        }
    }

    for t in &a.transitions {
        let mut reads = Vec::new();
        t.guard.iter().chain(t.outputs.iter().map(|(_, e)| e)).chain(t.assignments.iter().map(|(_, e)| e)).for_each(
            |e| e.port_reads(&mut reads),
        );
        for (p, span) in reads {
            if !t.trigger.iter().any(|(tp, _, _)| *tp == p) {
                diags.push(Diagnostic::error(
                    "W7",
                    span,
                    format!(
                        "`{}` is read but not fixed by the trigger of this transition, so it may carry no message",
                        c.ports[p].name
                    ),
                ));
            }
        }
    }
}

fn check_recursion(model: &Model, root: ComponentId, diags: &mut Vec<Diagnostic>) {
    // report a cycle once, at the instance inside the cycle's first component
    fn reaches(model: &Model, from: ComponentId, goal: ComponentId, seen: &mut HashSet<ComponentId>) -> bool {
        if !seen.insert(from) {
            return false;
        }
        model.component(from).subcomponents().iter().any(|s| s.component == goal || reaches(model, s.component, goal, seen))
    }
    let c = model.component(root);
    for s in c.subcomponents() {
        if s.component == root || reaches(model, s.component, root, &mut HashSet::new()) {
            diags.push(Diagnostic::error(
                "W8",
                s.span,
                format!("instance `{}` makes `{}` contain itself", s.name, c.name),
            ));
        }
    }
}

fn check_determinism(model: &Model, id: ComponentId, diags: &mut Vec<Diagnostic>) {
    let c = model.component(id);
    let Ok(t) = elaborate(model, id) else { return };
    let mut reported: HashSet<(usize, usize)> = HashSet::new();
    for ci in 0..t.configs.len() {
        let steps = t.steps_from(ConfigId(ci));
        for (i, a) in steps.iter().enumerate() {
            for b in &steps[i + 1..] {
                let overlap = a.pattern.iter().zip(&b.pattern).all(|(x, y)| match (x, y) {
                    (Some(x), Some(y)) => x == y,
                    _ => true,
                });
                if overlap && reported.insert((a.transition, b.transition)) {
                    let (sa, sb) = (t.transition_spans[a.transition], t.transition_spans[b.transition]);
                    diags.push(Diagnostic::error(
                        "E1",
                        sa,
                        format!(
                            "nondeterminism in state `{}` of `{}`: transitions at {}:{} and {}:{} can both fire in configuration {}",
                            t.state_names[t.configs[ci].state],
                            c.name,
                            sa.line,
                            sa.column,
                            sb.line,
                            sb.column,
                            t.config_name(ConfigId(ci)),
                        ),
                    ));
                }
            }
        }
    }
}

fn check_analysis(model: &Model, id: ComponentId, limits: &Limits, diags: &mut Vec<Diagnostic>) {
    let c = model.component(id);
    let Some(a) = c.automaton() else {
        diags.push(Diagnostic::error(
            "A2",
            c.span,
            format!("`{}` is composed; the analysis backend handles one automaton at a time", c.name),
        ));
        return;
    };
    let valuations = a.variables.iter().fold(1u64, |acc, v| acc.saturating_mul(model.domain_size(v.ty)));
    let configs = (a.states.len() as u64).saturating_mul(valuations);
    if configs > limits.max_configs {
        diags.push(Diagnostic::error(
            "A1",
            a.span,
            format!("`{}` has up to {configs} configurations, above the limit of {}", c.name, limits.max_configs),
        ));
    }
    let letters = c.ports.iter().fold(1u64, |acc, p| acc.saturating_mul(model.domain_size(p.ty) + 1));
    if letters > limits.max_letters {
        diags.push(Diagnostic::error(
            "A1",
            a.span,
            format!("`{}` has {letters} letters, above the limit of {}", c.name, limits.max_letters),
        ));
    }
}
