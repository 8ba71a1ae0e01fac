//! Finite I/O transducers elaborated from automata.
//!
//! Messages are encoded per port as small codes: `0` is epsilon and `k > 0`
//! is the `k-1`-th value of the port's message domain. A step is stored
//! symbolically as an input *pattern* (a code or "any" per in-port), which
//! keeps the relation small when transitions only read a few ports.

use std::collections::{HashMap, VecDeque};

use super::eval::{clamp, eval, EvalError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::diag::Span;
use crate::model::{ComponentId, Direction, Message, Model, Ty, Value};

/// Per-port message code; `EPSILON` is "no message".
pub type Code = u16;
pub const EPSILON: Code = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortSig {
    pub name: String,
    pub ty: Ty,
    pub domain: Vec<Value>,
}

impl PortSig {
    /// Number of distinct messages including epsilon.
    pub fn radix(&self) -> u64 {
        self.domain.len() as u64 + 1
    }

    pub fn encode(&self, m: &Message) -> Option<Code> {
        match m {
            None => Some(EPSILON),
            Some(v) => self.domain.iter().position(|d| d == v).map(|i| i as Code + 1),
        }
    }

    pub fn decode(&self, c: Code) -> Message {
        if c == EPSILON {
            None
        } else {
            Some(self.domain[c as usize - 1].clone())
        }
    }
}

/// The ports of a component, in-ports and out-ports each in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interface {
    pub inputs: Vec<PortSig>,
    pub outputs: Vec<PortSig>,
}

impl Interface {
    pub fn of(model: &Model, component: ComponentId) -> Interface {
        let c = model.component(component);
        let sig = |dir: Direction| {
            c.ports
                .iter()
                .filter(|p| p.direction == dir)
                .map(|p| PortSig { name: p.name.clone(), ty: p.ty, domain: model.message_domain(p.ty) })
                .collect()
        };
        Interface { inputs: sig(Direction::In), outputs: sig(Direction::Out) }
    }

    /// Same names, order and message domains on both sides.
    pub fn matches(&self, other: &Interface) -> bool {
        let same = |a: &[PortSig], b: &[PortSig]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.name == y.name && x.domain == y.domain)
        };
        same(&self.inputs, &other.inputs) && same(&self.outputs, &other.outputs)
    }

    pub fn input_space(&self) -> u64 {
        space(&self.inputs)
    }

    pub fn output_space(&self) -> u64 {
        space(&self.outputs)
    }

    pub fn input_valuation(&self, index: u64) -> Vec<Code> {
        unrank(&self.inputs, index)
    }

    pub fn output_valuation(&self, index: u64) -> Vec<Code> {
        unrank(&self.outputs, index)
    }

    pub fn output_index(&self, codes: &[Code]) -> u64 {
        rank(&self.outputs, codes)
    }

    pub fn input_index(&self, codes: &[Code]) -> u64 {
        rank(&self.inputs, codes)
    }

    /// Every input valuation, in mixed-radix order (first port varies slowest).
    pub fn all_inputs(&self) -> impl Iterator<Item = Vec<Code>> + '_ {
        (0..self.input_space()).map(|i| self.input_valuation(i))
    }

    pub fn all_outputs(&self) -> impl Iterator<Item = Vec<Code>> + '_ {
        (0..self.output_space()).map(|i| self.output_valuation(i))
    }

    pub fn decode_inputs(&self, codes: &[Code]) -> Vec<Message> {
        self.inputs.iter().zip(codes).map(|(p, &c)| p.decode(c)).collect()
    }

    pub fn decode_outputs(&self, codes: &[Code]) -> Vec<Message> {
        self.outputs.iter().zip(codes).map(|(p, &c)| p.decode(c)).collect()
    }
}

fn space(ports: &[PortSig]) -> u64 {
    ports.iter().fold(1u64, |acc, p| acc.saturating_mul(p.radix()))
}

fn rank(ports: &[PortSig], codes: &[Code]) -> u64 {
    ports.iter().zip(codes).fold(0u64, |acc, (p, &c)| acc * p.radix() + c as u64)
}

fn unrank(ports: &[PortSig], mut index: u64) -> Vec<Code> {
    let mut codes = vec![EPSILON; ports.len()];
    for (slot, p) in codes.iter_mut().zip(ports).rev() {
        *slot = (index % p.radix()) as Code;
        index /= p.radix();
    }
    codes
}

/// An automaton state together with a full variable valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub valuation: Vec<Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigId(pub usize);

/// One symbolic step: from `from`, every input valuation matching `pattern`
/// may emit `outputs` and move to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub from: ConfigId,
    /// `None` leaves the in-port unconstrained.
    pub pattern: Vec<Option<Code>>,
    pub outputs: Vec<Code>,
    pub to: ConfigId,
    /// Index of the originating transition in the automaton.
    pub transition: usize,
}

impl Step {
    pub fn matches(&self, input: &[Code]) -> bool {
        self.pattern.iter().zip(input).all(|(p, &c)| p.is_none_or(|p| p == c))
    }
}

/// How inputs without an enabled step are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompletionMode {
    /// Stay in the configuration and emit no messages (generated code falls
    /// through its `if` chain).
    EpsilonSelfLoop,
    /// Anything may happen: every output valuation, every successor.
    Chaos,
    /// No behavior; the transducer is partial there.
    Reject,
}

impl std::str::FromStr for CompletionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "epsilon" | "epsilon-self-loop" | "epsilonSelfLoop" => Ok(CompletionMode::EpsilonSelfLoop),
            "chaos" => Ok(CompletionMode::Chaos),
            "reject" => Ok(CompletionMode::Reject),
            other => Err(format!("unknown completion mode `{other}` (expected epsilon, chaos or reject)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("component `{0}` is not atomic")]
    NotAtomic(String),
    #[error("automaton of `{0}` has no initial state")]
    NoInitialState(String),
    #[error("literal `{value}` is outside the domain of port `{port}` in `{component}`")]
    OutOfDomain { component: String, port: String, value: String },
    #[error("evaluation failed in transition {transition} of `{component}`: {source}")]
    Evaluation { component: String, transition: usize, source: EvalError },
}

/// Successor set for one configuration and input valuation.
#[derive(Debug)]
pub enum Successors<'a> {
    Steps(Vec<&'a Step>),
    /// Completed by self-loop with all-epsilon outputs.
    SelfLoop,
    /// Completed by chaos: every configuration with every output valuation.
    Chaos,
    /// No behavior.
    Blocked,
}

/// Explicit finite presentation of an automaton's behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    pub component: String,
    pub interface: Interface,
    pub state_names: Vec<String>,
    pub variable_names: Vec<String>,
    pub configs: Vec<Config>,
    pub initial: ConfigId,
    pub initial_outputs: Vec<Code>,
    /// Sorted by source configuration, then transition order.
    pub steps: Vec<Step>,
    pub transition_spans: Vec<Span>,
    pub completion: Option<CompletionMode>,
    by_config: Vec<(usize, usize)>,
}

impl Transducer {
    pub fn steps_from(&self, c: ConfigId) -> &[Step] {
        let (lo, hi) = self.by_config[c.0];
        &self.steps[lo..hi]
    }

    /// Explicit steps enabled for `input`, in transition order.
    pub fn enabled(&self, c: ConfigId, input: &[Code]) -> Vec<&Step> {
        self.steps_from(c).iter().filter(|s| s.matches(input)).collect()
    }

    pub fn successors(&self, c: ConfigId, input: &[Code]) -> Successors<'_> {
        let steps = self.enabled(c, input);
        if !steps.is_empty() {
            return Successors::Steps(steps);
        }
        match self.completion {
            Some(CompletionMode::EpsilonSelfLoop) => Successors::SelfLoop,
            Some(CompletionMode::Chaos) => Successors::Chaos,
            Some(CompletionMode::Reject) | None => Successors::Blocked,
        }
    }

    /// Concrete `(output valuation, successor)` pairs for one input.
    pub fn concrete_successors(&self, c: ConfigId, input: &[Code]) -> Vec<(Vec<Code>, ConfigId)> {
        match self.successors(c, input) {
            Successors::Steps(steps) => steps.into_iter().map(|s| (s.outputs.clone(), s.to)).collect(),
            Successors::SelfLoop => vec![(self.epsilon_outputs(), c)],
            Successors::Chaos => (0..self.configs.len())
                .flat_map(|k| self.interface.all_outputs().map(move |o| (o, ConfigId(k))))
                .collect(),
            Successors::Blocked => Vec::new(),
        }
    }

    /// The fully expanded step relation `(from, inputs, outputs, to)`.
    pub fn concrete_relation(&self) -> Vec<(ConfigId, Vec<Code>, Vec<Code>, ConfigId)> {
        let mut out = Vec::new();
        for c in 0..self.configs.len() {
            for input in self.interface.all_inputs() {
                for (o, to) in self.concrete_successors(ConfigId(c), &input) {
                    out.push((ConfigId(c), input.clone(), o, to));
                }
            }
        }
        out
    }

    pub fn epsilon_outputs(&self) -> Vec<Code> {
        vec![EPSILON; self.interface.outputs.len()]
    }

    /// True if at least one step is enabled for every configuration and input.
    pub fn is_total(&self) -> bool {
        (0..self.configs.len())
            .all(|c| self.interface.all_inputs().all(|i| !self.enabled(ConfigId(c), &i).is_empty()))
    }

    pub fn config_name(&self, c: ConfigId) -> String {
        let config = &self.configs[c.0];
        let mut name = self.state_names[config.state].clone();
        if !config.valuation.is_empty() {
            let vals: Vec<String> = self
                .variable_names
                .iter()
                .zip(&config.valuation)
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            name.push_str(&format!("[{}]", vals.join(", ")));
        }
        name
    }
}

/// Builds the transducer of an atomic component: configurations are the
/// (state, valuation) pairs reachable from the initial configuration, and
/// steps are exactly the transitions whose trigger and guard hold.
///
/// No completion is applied; see [`complete`].
pub fn elaborate(model: &Model, component: ComponentId) -> Result<Transducer, SemanticsError> {
    let c = model.component(component);
    let a = c.automaton().ok_or_else(|| SemanticsError::NotAtomic(c.name.clone()))?;
    let interface = Interface::of(model, component);
    let in_index: HashMap<usize, usize> = c.in_ports().enumerate().map(|(k, (p, _))| (p, k)).collect();
    let out_index: HashMap<usize, usize> = c.out_ports().enumerate().map(|(k, (p, _))| (p, k)).collect();
    let out_of_domain = |port: &str, value: &Value| SemanticsError::OutOfDomain {
        component: c.name.clone(),
        port: port.to_string(),
        value: value.to_string(),
    };

    let initial_state = a.initial_state().ok_or_else(|| SemanticsError::NoInitialState(c.name.clone()))?;
    let mut initial_outputs = vec![EPSILON; interface.outputs.len()];
    for (p, v, _) in &a.states[initial_state].initial_outputs {
        let k = out_index[p];
        initial_outputs[k] =
            interface.outputs[k].encode(&Some(v.clone())).ok_or_else(|| out_of_domain(&c.ports[*p].name, v))?;
    }
    let initial = Config {
        state: initial_state,
        valuation: a.variables.iter().map(|v| clamp(v.initial.clone(), v.ty)).collect(),
    };

    let mut configs = vec![initial.clone()];
    let mut ids: HashMap<Config, ConfigId> = HashMap::from([(initial, ConfigId(0))]);
    let mut queue = VecDeque::from([ConfigId(0)]);
    let mut steps = Vec::new();
    let mut by_config = Vec::new();

    while let Some(id) = queue.pop_front() {
        let start = steps.len();
        let config = configs[id.0].clone();
        for (ti, t) in a.transitions.iter().enumerate().filter(|(_, t)| t.source == config.state) {
            let mut pattern = vec![None; interface.inputs.len()];
            let mut messages: HashMap<usize, Value> = HashMap::new();
            for (p, v, _) in &t.trigger {
                let k = in_index[p];
                let code = interface.inputs[k]
                    .encode(&Some(v.clone()))
                    .ok_or_else(|| out_of_domain(&c.ports[*p].name, v))?;
                pattern[k] = Some(code);
                messages.insert(*p, v.clone());
            }
            let read = |p: usize| messages.get(&p).cloned();
            let fail = |source| SemanticsError::Evaluation { component: c.name.clone(), transition: ti, source };
            if let Some(g) = &t.guard {
                if eval(g, &read, &config.valuation).map_err(fail)? != Value::Bool(true) {
                    continue;
                }
            }
            let mut outputs = vec![EPSILON; interface.outputs.len()];
            for (p, e) in &t.outputs {
                let v = clamp(eval(e, &read, &config.valuation).map_err(fail)?, c.ports[*p].ty);
                let k = out_index[p];
                outputs[k] = interface.outputs[k].encode(&Some(v.clone())).ok_or_else(|| out_of_domain(&c.ports[*p].name, &v))?;
            }
            let mut valuation = config.valuation.clone();
            for (v, e) in &t.assignments {
                valuation[*v] = clamp(eval(e, &read, &config.valuation).map_err(fail)?, a.variables[*v].ty);
            }
            let next = Config { state: t.target, valuation };
            let to = match ids.get(&next) {
                Some(&to) => to,
                None => {
                    let to = ConfigId(configs.len());
                    ids.insert(next.clone(), to);
                    configs.push(next);
                    queue.push_back(to);
                    to
                }
            };
            steps.push(Step { from: id, pattern, outputs, to, transition: ti });
        }
        by_config.push((id, start, steps.len()));
    }
    // BFS pops configurations in id order, so ranges are already sorted.
    let by_config = by_config.into_iter().map(|(_, lo, hi)| (lo, hi)).collect();

    Ok(Transducer {
        component: c.name.clone(),
        interface,
        state_names: a.states.iter().map(|s| s.name.clone()).collect(),
        variable_names: a.variables.iter().map(|v| v.name.clone()).collect(),
        configs,
        initial: ConfigId(0),
        initial_outputs,
        steps,
        transition_spans: a.transitions.iter().map(|t| t.span).collect(),
        completion: None,
        by_config,
    })
}

/// Gives inputs without an enabled step a meaning. Inputs that already have
/// a step are unaffected, so completing a total transducer changes nothing.
pub fn complete(t: &Transducer, mode: CompletionMode) -> Transducer {
    Transducer { completion: Some(mode), ..t.clone() }
}

/// How a step picks among several enabled alternatives.
#[derive(Clone, Debug)]
pub enum Policy {
    /// More than one enabled alternative is an error.
    Strict,
    /// Uniform choice driven by a replayable generator.
    Seeded(Box<ChaCha8Rng>),
}

impl Policy {
    pub fn seeded(seed: u64) -> Policy {
        Policy::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("{} transitions are enabled in `{config}`", spans.len())]
    Nondeterminism {
        config: String,
        /// Source positions of the competing transitions.
        spans: Vec<Span>,
        transitions: Vec<usize>,
    },
    #[error("no behavior defined in `{config}` for the current input")]
    Blocked { config: String },
}

/// One synchronous computation step of a completed transducer.
pub fn step(
    t: &Transducer,
    c: ConfigId,
    input: &[Code],
    policy: &mut Policy,
) -> Result<(ConfigId, Vec<Code>), StepError> {
    match t.successors(c, input) {
        Successors::Steps(steps) if steps.len() == 1 => Ok((steps[0].to, steps[0].outputs.clone())),
        Successors::Steps(steps) => match policy {
            Policy::Strict => Err(StepError::Nondeterminism {
                config: t.config_name(c),
                spans: steps.iter().map(|s| t.transition_spans[s.transition]).collect(),
                transitions: steps.iter().map(|s| s.transition).collect(),
            }),
            Policy::Seeded(rng) => {
                let s = steps[rng.gen_range(0..steps.len())];
                Ok((s.to, s.outputs.clone()))
            }
        },
        Successors::SelfLoop => Ok((c, t.epsilon_outputs())),
        Successors::Chaos => {
            let per_config = t.interface.output_space();
            match policy {
                Policy::Strict if per_config * t.configs.len() as u64 > 1 => Err(StepError::Nondeterminism {
                    config: t.config_name(c),
                    spans: Vec::new(),
                    transitions: Vec::new(),
                }),
                Policy::Strict => Ok((ConfigId(0), t.interface.output_valuation(0))),
                Policy::Seeded(rng) => {
                    let pick = rng.gen_range(0..per_config * t.configs.len() as u64);
                    Ok((ConfigId((pick / per_config) as usize), t.interface.output_valuation(pick % per_config)))
                }
            }
        }
        Successors::Blocked => Err(StepError::Blocked { config: t.config_name(c) }),
    }
}
