//! Refinement as trace inclusion.
//!
//! A trace is a finite sequence of letters `(input_k, output_k)`, where
//! `output_0` is the initial output and `output_{k+1}` is produced by the step
//! on `input_k`. An implementation refines a specification iff every trace of
//! the (completed) implementation is a trace of the (completed) specification.
//!
//! The check explores the product of implementation configurations with the
//! subset construction of the specification breadth-first, so a reported
//! counterexample is as short as possible.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::model::{ComponentId, Message, Model};
use crate::semantics::{
    complete, elaborate, BundleError, Code, CompletionMode, ConfigId, Interface, SemanticsError, StreamBundle,
    Successors, Transducer, EPSILON,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RefinementError {
    #[error("interfaces differ: {0}")]
    InterfaceMismatch(String),
    #[error("product exploration exceeded {limit} nodes")]
    StateSpaceLimitExceeded { limit: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefinementOptions {
    pub impl_mode: CompletionMode,
    pub spec_mode: CompletionMode,
    pub max_product_nodes: usize,
}

impl Default for RefinementOptions {
    fn default() -> Self {
        RefinementOptions {
            impl_mode: CompletionMode::EpsilonSelfLoop,
            spec_mode: CompletionMode::Chaos,
            max_product_nodes: 1_000_000,
        }
    }
}

/// Inputs and outputs at one tick.
pub type Letter = (Vec<Message>, Vec<Message>);

/// A finite trace over named ports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub input_ports: Vec<String>,
    pub output_ports: Vec<String>,
    /// `(inputs, outputs)` per tick, in port order.
    pub letters: Vec<Letter>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The input and output halves as stream bundles.
    pub fn to_bundles(&self) -> (StreamBundle, StreamBundle) {
        let half = |names: &[String], pick: fn(&Letter) -> &Vec<Message>| StreamBundle {
            ticks: self.letters.len(),
            ports: names
                .iter()
                .enumerate()
                .map(|(k, n)| (n.clone(), self.letters.iter().map(|l| pick(l)[k].clone()).collect()))
                .collect(),
        };
        (half(&self.input_ports, |l| &l.0), half(&self.output_ports, |l| &l.1))
    }

    /// Rebuilds a trace over `iface` from an input and an output bundle.
    pub fn from_bundles(iface: &Interface, inputs: &StreamBundle, outputs: &StreamBundle) -> Result<Trace, RefinementError> {
        inputs.validate(&iface.inputs)?;
        outputs.validate(&iface.outputs)?;
        if inputs.ticks != outputs.ticks {
            return Err(RefinementError::Bundle(BundleError::Length {
                port: "<outputs>".into(),
                found: outputs.ticks,
                ticks: inputs.ticks,
            }));
        }
        let column = |b: &StreamBundle, names: &[String], k: usize| -> Vec<Message> {
            names.iter().map(|n| b.ports[n][k].clone()).collect()
        };
        let input_ports: Vec<String> = iface.inputs.iter().map(|p| p.name.clone()).collect();
        let output_ports: Vec<String> = iface.outputs.iter().map(|p| p.name.clone()).collect();
        let letters =
            (0..inputs.ticks).map(|k| (column(inputs, &input_ports, k), column(outputs, &output_ports, k))).collect();
        Ok(Trace { input_ports, output_ports, letters })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// A trace of the implementation that the specification cannot produce;
    /// only its last output deviates.
    pub trace: Trace,
    /// Outputs the specification allows at the last tick, in port order.
    pub allowed: Vec<Vec<Message>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds { explored: usize },
    Violated(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// Checks whether `implementation` refines `spec`, elaborating and completing
/// both components as configured in `options`.
pub fn refines(
    model: &Model,
    implementation: ComponentId,
    spec: ComponentId,
    options: &RefinementOptions,
) -> Result<Verdict, RefinementError> {
    let i = complete(&elaborate(model, implementation)?, options.impl_mode);
    let s = complete(&elaborate(model, spec)?, options.spec_mode);
    refines_transducers(&i, &s, options.max_product_nodes)
}

fn interface_diff(a: &Interface, b: &Interface) -> Option<String> {
    if a.matches(b) {
        return None;
    }
    let show = |i: &Interface| {
        let ports = |ps: &[crate::semantics::PortSig]| ps.iter().map(|p| p.name.clone()).collect::<Vec<_>>().join(", ");
        format!("in ({}) out ({})", ports(&i.inputs), ports(&i.outputs))
    };
    Some(format!("{} vs {} (names, order and types must agree)", show(a), show(b)))
}

/// Subset of specification `(configuration, pending output)` pairs. With
/// `chaos` set it holds every configuration with every output valuation and
/// `pairs` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SpecSet {
    chaos: bool,
    pairs: BTreeSet<(ConfigId, Vec<Code>)>,
}

impl SpecSet {
    fn initial(t: &Transducer) -> SpecSet {
        SpecSet { chaos: false, pairs: BTreeSet::from([(t.initial, t.initial_outputs.clone())]) }
    }

    /// Configurations whose pending output is `output`.
    fn live(&self, t: &Transducer, output: &[Code]) -> Vec<ConfigId> {
        if self.chaos {
            return (0..t.configs.len()).map(ConfigId).collect();
        }
        self.pairs.iter().filter(|(_, out)| out.as_slice() == output).map(|(c, _)| *c).collect()
    }

    /// Successor pairs of all `live` configurations for one input.
    fn advance(t: &Transducer, live: &[ConfigId], input: &[Code]) -> SpecSet {
        let mut pairs = BTreeSet::new();
        for &c in live {
            match t.successors(c, input) {
                Successors::Steps(steps) => pairs.extend(steps.into_iter().map(|st| (st.to, st.outputs.clone()))),
                Successors::SelfLoop => {
                    pairs.insert((c, t.epsilon_outputs()));
                }
                Successors::Chaos => return SpecSet { chaos: true, pairs: BTreeSet::new() },
                Successors::Blocked => {}
            }
        }
        SpecSet { chaos: false, pairs }
    }
}

struct Node {
    config: ConfigId,
    pending: Vec<Code>,
    spec: usize,
    parent: Option<(usize, Vec<Code>)>,
}

/// Specification subsets seen so far, numbered in order of discovery.
#[derive(Default)]
struct Interner {
    sets: Vec<SpecSet>,
    ids: HashMap<SpecSet, usize>,
}

impl Interner {
    fn id(&mut self, set: SpecSet) -> usize {
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        self.sets.push(set.clone());
        self.ids.insert(set, self.sets.len() - 1);
        self.sets.len() - 1
    }
}

/// Trace inclusion between two completed transducers.
pub fn refines_transducers(imp: &Transducer, spec: &Transducer, max_nodes: usize) -> Result<Verdict, RefinementError> {
    if let Some(diff) = interface_diff(&imp.interface, &spec.interface) {
        return Err(RefinementError::InterfaceMismatch(diff));
    }
    let iface = &imp.interface;
    let mut specs = Interner::default();
    let start = specs.id(SpecSet::initial(spec));
    let mut nodes: Vec<Node> =
        vec![Node { config: imp.initial, pending: imp.initial_outputs.clone(), spec: start, parent: None }];
    let mut seen: HashSet<(ConfigId, Vec<Code>, usize)> = HashSet::new();
    seen.insert((nodes[0].config, nodes[0].pending.clone(), start));
    // chaotic implementation steps lead to the same nodes from any source
    let mut chaos_expanded: HashSet<usize> = HashSet::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(n) = queue.pop_front() {
        let live = specs.sets[nodes[n].spec].live(spec, &nodes[n].pending);
        if live.is_empty() {
            return Ok(Verdict::Violated(counterexample(&nodes, n, iface, &specs.sets[nodes[n].spec].pairs)));
        }
        for input in iface.all_inputs() {
            let next = specs.id(SpecSet::advance(spec, &live, &input));
            if matches!(imp.successors(nodes[n].config, &input), Successors::Chaos) && !chaos_expanded.insert(next) {
                continue;
            }
            for (out, to) in imp.concrete_successors(nodes[n].config, &input) {
                let key = (to, out, next);
                if seen.contains(&key) {
                    continue;
                }
                if nodes.len() >= max_nodes {
                    return Err(RefinementError::StateSpaceLimitExceeded { limit: max_nodes });
                }
                seen.insert(key.clone());
                nodes.push(Node { config: key.0, pending: key.1, spec: key.2, parent: Some((n, input.clone())) });
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(Verdict::Holds { explored: nodes.len() })
}

fn counterexample(nodes: &[Node], mut n: usize, iface: &Interface, set: &BTreeSet<(ConfigId, Vec<Code>)>) -> Counterexample {
    let mut letters = vec![(vec![EPSILON; iface.inputs.len()], nodes[n].pending.clone())];
    while let Some((parent, input)) = &nodes[n].parent {
        letters.push((input.clone(), nodes[*parent].pending.clone()));
        n = *parent;
    }
    letters.reverse();
    let allowed: BTreeSet<&Vec<Code>> = set.iter().map(|(_, o)| o).collect();
    Counterexample {
        trace: Trace {
            input_ports: iface.inputs.iter().map(|p| p.name.clone()).collect(),
            output_ports: iface.outputs.iter().map(|p| p.name.clone()).collect(),
            letters: letters.into_iter().map(|(i, o)| (iface.decode_inputs(&i), iface.decode_outputs(&o))).collect(),
        },
        allowed: allowed.into_iter().map(|o| iface.decode_outputs(o)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Replay {
    Accepted,
    /// The first letter the transducer cannot produce.
    Rejected { index: usize },
}

/// Decides whether `trace` is a trace of the completed transducer `t`.
pub fn replay(trace: &Trace, t: &Transducer) -> Result<Replay, RefinementError> {
    let iface = &t.interface;
    let names = |ps: &[crate::semantics::PortSig]| ps.iter().map(|p| p.name.clone()).collect::<Vec<_>>();
    if names(&iface.inputs) != trace.input_ports || names(&iface.outputs) != trace.output_ports {
        return Err(RefinementError::InterfaceMismatch(format!(
            "trace ports in ({}) out ({}) do not match `{}`",
            trace.input_ports.join(", "),
            trace.output_ports.join(", "),
            t.component
        )));
    }
    let encode = |sigs: &[crate::semantics::PortSig], ms: &[Message], tick: usize| -> Result<Vec<Code>, RefinementError> {
        sigs.iter()
            .zip(ms)
            .map(|(p, m)| {
                p.encode(m).ok_or_else(|| {
                    RefinementError::Bundle(BundleError::BadValue {
                        port: p.name.clone(),
                        tick,
                        value: m.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                    })
                })
            })
            .collect()
    };
    let mut set = SpecSet::initial(t);
    for (k, (i, o)) in trace.letters.iter().enumerate() {
        let input = encode(&iface.inputs, i, k)?;
        let output = encode(&iface.outputs, o, k)?;
        let live = set.live(t, &output);
        if live.is_empty() {
            return Ok(Replay::Rejected { index: k });
        }
        set = SpecSet::advance(t, &live, &input);
    }
    Ok(Replay::Accepted)
}
