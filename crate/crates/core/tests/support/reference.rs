//! A naive reference interpreter written straight from the informal
//! semantics: automata are run transition by transition over the resolved
//! model, and every port read walks the connector graph anew.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use arcauto::model::*;
use arcauto::semantics::StreamBundle;

/// A state and a variable valuation.
pub type Cfg = (usize, Vec<Value>);

/// Completion of untriggered inputs, mirrored here so the oracle does not
/// depend on the crate's enum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Epsilon,
    Chaos,
    Reject,
}

fn saturate(v: Value, ty: Ty) -> Value {
    match (v, ty) {
        (Value::Int(i), Ty::Int { lo, hi }) => Value::Int(i.max(lo).min(hi)),
        (v, _) => v,
    }
}

fn eval(e: &Expr, inputs: &[Message], vars: &[Value]) -> Value {
    match e {
        Expr::Lit(v) => v.clone(),
        Expr::Port(p, _) => inputs[*p].clone().expect("reads only triggered ports"),
        Expr::Var(v) => vars[*v].clone(),
        Expr::Not(x) => match eval(x, inputs, vars) {
            Value::Bool(b) => Value::Bool(!b),
            other => panic!("not applied to {other:?}"),
        },
        Expr::Binary(op, l, r) => {
            let (l, r) = (eval(l, inputs, vars), eval(r, inputs, vars));
            let int = |v: &Value| match v {
                Value::Int(i) => *i,
                other => panic!("{other:?} is not an integer"),
            };
            let boolean = |v: &Value| match v {
                Value::Bool(b) => *b,
                other => panic!("{other:?} is not a boolean"),
            };
            match op {
                BinOp::Or => Value::Bool(boolean(&l) || boolean(&r)),
                BinOp::And => Value::Bool(boolean(&l) && boolean(&r)),
                BinOp::Eq => Value::Bool(l == r),
                BinOp::Ne => Value::Bool(l != r),
                BinOp::Lt => Value::Bool(int(&l) < int(&r)),
                BinOp::Le => Value::Bool(int(&l) <= int(&r)),
                BinOp::Gt => Value::Bool(int(&l) > int(&r)),
                BinOp::Ge => Value::Bool(int(&l) >= int(&r)),
                BinOp::Add => Value::Int(int(&l) + int(&r)),
                BinOp::Sub => Value::Int(int(&l) - int(&r)),
            }
        }
    }
}

/// Initial configuration and initial messages of every port (indexed by
/// port declaration index; in-ports stay epsilon).
pub fn initial(c: &ComponentType) -> (Cfg, Vec<Message>) {
    let a = c.automaton().expect("atomic");
    let s = a.states.iter().position(|s| s.initial).expect("initial state");
    let vars = a.variables.iter().map(|v| saturate(v.initial.clone(), v.ty)).collect();
    let mut out = vec![None; c.ports.len()];
    for (p, v, _) in &a.states[s].initial_outputs {
        out[*p] = Some(v.clone());
    }
    ((s, vars), out)
}

/// Every explicit transition enabled in `cfg` for `inputs` (indexed by port
/// declaration index), with the resulting outputs and configuration.
pub fn fire(c: &ComponentType, cfg: &Cfg, inputs: &[Message]) -> Vec<(usize, Vec<Message>, Cfg)> {
    let a = c.automaton().expect("atomic");
    let (state, vars) = cfg;
    let mut result = Vec::new();
    for (ti, t) in a.transitions.iter().enumerate() {
        if t.source != *state {
            continue;
        }
        if !t.trigger.iter().all(|(p, v, _)| inputs[*p].as_ref() == Some(v)) {
            continue;
        }
        if let Some(g) = &t.guard {
            if eval(g, inputs, vars) != Value::Bool(true) {
                continue;
            }
        }
        let mut out = vec![None; c.ports.len()];
        for (p, e) in &t.outputs {
            out[*p] = Some(saturate(eval(e, inputs, vars), c.ports[*p].ty));
        }
        let mut next = vars.clone();
        for (v, e) in &t.assignments {
            next[*v] = saturate(eval(e, inputs, vars), a.variables[*v].ty);
        }
        result.push((ti, out, (t.target, next)));
    }
    result
}

/// Configurations reachable through explicit transitions, in discovery order.
pub fn reachable(model: &Model, c: &ComponentType) -> Vec<Cfg> {
    let (init, _) = initial(c);
    let mut seen = vec![init.clone()];
    let mut work = vec![init];
    while let Some(cfg) = work.pop() {
        for inputs in all_inputs(model, c) {
            for (_, _, next) in fire(c, &cfg, &inputs) {
                if !seen.contains(&next) {
                    seen.push(next.clone());
                    work.push(next);
                }
            }
        }
    }
    seen
}

/// Every valuation of the in-ports (epsilon included), indexed by port
/// declaration index; out-port positions are epsilon.
pub fn all_inputs(model: &Model, c: &ComponentType) -> Vec<Vec<Message>> {
    let mut result = vec![vec![None; c.ports.len()]];
    for (p, decl) in c.in_ports() {
        let choices: Vec<Message> = std::iter::once(None).chain(model.message_domain(decl.ty).into_iter().map(Some)).collect();
        result = result
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |m| {
                    let mut w = v.clone();
                    w[p] = m.clone();
                    w
                })
            })
            .collect();
    }
    result
}

/// Every valuation of the out-ports, indexed like [`all_inputs`].
pub fn all_outputs(model: &Model, c: &ComponentType) -> Vec<Vec<Message>> {
    let mut result = vec![vec![None; c.ports.len()]];
    for (p, decl) in c.out_ports() {
        let choices: Vec<Message> = std::iter::once(None).chain(model.message_domain(decl.ty).into_iter().map(Some)).collect();
        result = result
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |m| {
                    let mut w = v.clone();
                    w[p] = m.clone();
                    w
                })
            })
            .collect();
    }
    result
}

/// Successors under a completion mode: `(outputs, configuration)`.
pub fn successors(model: &Model, c: &ComponentType, mode: Mode, reach: &[Cfg], cfg: &Cfg, inputs: &[Message]) -> Vec<(Vec<Message>, Cfg)> {
    let fired = fire(c, cfg, inputs);
    if !fired.is_empty() {
        return fired.into_iter().map(|(_, o, n)| (o, n)).collect();
    }
    match mode {
        Mode::Epsilon => vec![(vec![None; c.ports.len()], cfg.clone())],
        Mode::Chaos => reach
            .iter()
            .flat_map(|n| all_outputs(model, c).into_iter().map(move |o| (o, n.clone())))
            .collect(),
        Mode::Reject => Vec::new(),
    }
}

/// Instance path from the root: indices into successive subcomponent lists.
type Path = Vec<usize>;

struct Net<'m> {
    model: &'m Model,
    root: ComponentId,
    inputs: BTreeMap<String, Vec<Message>>,
    /// Current message of every out-port of every atomic instance.
    current: HashMap<(Path, usize), Message>,
    cfgs: BTreeMap<Path, Cfg>,
}

impl<'m> Net<'m> {
    fn type_at(&self, path: &[usize]) -> &'m ComponentType {
        let mut c = self.model.component(self.root);
        for &i in path {
            c = self.model.component(c.subcomponents()[i].component);
        }
        c
    }

    /// The message an in-port of the instance at `path` sees at `tick`.
    fn read_in(&self, path: &[usize], port: usize, tick: usize) -> Message {
        let Some((&last, parent)) = path.split_last() else {
            let name = &self.type_at(path).ports[port].name;
            return self.inputs[name][tick].clone();
        };
        let p = self.type_at(parent);
        for k in p.connectors() {
            if k.targets.iter().any(|t| t.owner == PortOwner::Instance(last) && t.port == port) {
                return self.source(parent, &k.source, tick);
            }
        }
        None
    }

    /// The message an out-port of the instance at `path` carries at `tick`.
    fn read_out(&self, path: &[usize], port: usize, tick: usize) -> Message {
        let c = self.type_at(path);
        if c.is_atomic() {
            return self.current[&(path.to_vec(), port)].clone();
        }
        for k in c.connectors() {
            if k.targets.iter().any(|t| t.owner == PortOwner::This && t.port == port) {
                return self.source(path, &k.source, tick);
            }
        }
        None
    }

    fn source(&self, inside: &[usize], r: &PortRef, tick: usize) -> Message {
        match r.owner {
            PortOwner::This => self.read_in(inside, r.port, tick),
            PortOwner::Instance(i) => {
                let mut child = inside.to_vec();
                child.push(i);
                self.read_out(&child, r.port, tick)
            }
        }
    }

    fn atomic_paths(&self, path: Path, out: &mut Vec<Path>) {
        let c = self.type_at(&path);
        if c.is_atomic() {
            out.push(path);
        } else {
            for i in 0..c.subcomponents().len() {
                let mut child = path.clone();
                child.push(i);
                self.atomic_paths(child, out);
            }
        }
    }
}

/// Runs `root` for `ticks` ticks with strict determinism and epsilon
/// completion; returns the streams of the root's out-ports.
pub fn run(model: &Model, root: ComponentId, inputs: &StreamBundle, ticks: usize) -> StreamBundle {
    let mut net = Net { model, root, inputs: inputs.ports.clone(), current: HashMap::new(), cfgs: BTreeMap::new() };
    let mut atomics = Vec::new();
    net.atomic_paths(Vec::new(), &mut atomics);
    for path in &atomics {
        let c = net.type_at(path);
        let (cfg, out) = initial(c);
        for (p, _) in c.out_ports() {
            net.current.insert((path.clone(), p), out[p].clone());
        }
        net.cfgs.insert(path.clone(), cfg);
    }
    let root_type = model.component(root);
    let mut result = StreamBundle::new(ticks);
    for (_, p) in root_type.out_ports() {
        result.ports.insert(p.name.clone(), Vec::new());
    }
    for tick in 0..ticks {
        for (p, decl) in root_type.out_ports() {
            let m = net.read_out(&[], p, tick);
            result.ports.get_mut(&decl.name).unwrap().push(m);
        }
        let mut updates = Vec::new();
        for path in &atomics {
            let c = net.type_at(path);
            let mut ins = vec![None; c.ports.len()];
            for (p, _) in c.in_ports() {
                ins[p] = net.read_in(path, p, tick);
            }
            let fired = fire(c, &net.cfgs[path], &ins);
            assert!(fired.len() <= 1, "nondeterminism at tick {tick} in instance {path:?}");
            let (out, cfg) = match fired.into_iter().next() {
                Some((_, out, cfg)) => (out, cfg),
                None => (vec![None; c.ports.len()], net.cfgs[path].clone()),
            };
            updates.push((path.clone(), out, cfg));
        }
        for (path, out, cfg) in updates {
            let c = net.type_at(&path);
            for (p, _) in c.out_ports() {
                net.current.insert((path.clone(), p), out[p].clone());
            }
            net.cfgs.insert(path, cfg);
        }
    }
    result
}

/// The brute-force step relation of an atomic component: for every
/// reachable configuration, every full input valuation and every transition
/// that fires, `(cfg, inputs, outputs, next)` with port-order vectors.
pub fn step_relation(model: &Model, c: &ComponentType) -> BTreeSet<(Cfg, Vec<Message>, Vec<Message>, Cfg)> {
    let reach = reachable(model, c);
    let ins: Vec<usize> = c.in_ports().map(|(p, _)| p).collect();
    let outs: Vec<usize> = c.out_ports().map(|(p, _)| p).collect();
    let mut rel = BTreeSet::new();
    for cfg in &reach {
        for inputs in all_inputs(model, c) {
            for (_, out, next) in fire(c, cfg, &inputs) {
                let i: Vec<Message> = ins.iter().map(|&p| inputs[p].clone()).collect();
                let o: Vec<Message> = outs.iter().map(|&p| out[p].clone()).collect();
                rel.insert((cfg.clone(), i, o, next));
            }
        }
    }
    rel
}

/// Pairs of transitions that fire together for some reachable
/// configuration and concrete input.
pub fn overlapping_pairs(model: &Model, c: &ComponentType) -> BTreeSet<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for cfg in reachable(model, c) {
        for inputs in all_inputs(model, c) {
            let fired: Vec<usize> = fire(c, &cfg, &inputs).into_iter().map(|(t, _, _)| t).collect();
            for (i, a) in fired.iter().enumerate() {
                for b in &fired[i + 1..] {
                    pairs.insert((*a, *b));
                }
            }
        }
    }
    pairs
}
