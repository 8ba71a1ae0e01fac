//! Synchronous execution of component hierarchies.
//!
//! Every port of every instance holds a current message. Each tick, all
//! atomic instances read their current inputs and step, writing *next*
//! outputs; then a global swap makes those next values current and feeds the
//! external input of the following tick. Every atomic component therefore
//! delays by exactly one tick, which also makes feedback loops well-defined.
//! Composed components add no delay: their ports are forwarded.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::bundle::{BundleError, StreamBundle};
use super::transducer::{complete, elaborate, step, Code, CompletionMode, ConfigId, Interface, Policy, SemanticsError, StepError, Transducer, EPSILON};
use crate::model::{ComponentId, Message, Model, PortOwner};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("requested {ticks} ticks but the input bundle only has {available}")]
    TickOverrun { ticks: usize, available: usize },
    #[error("instance `{instance}` at tick {tick}: {source}")]
    Step { instance: String, tick: usize, source: StepError },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("component `{0}` instantiates itself")]
    Recursive(String),
}

/// Output of [`simulate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    /// Streams of the root component's out-ports.
    pub outputs: StreamBundle,
    /// Streams of every port of every subcomponent instance, keyed by the
    /// dotted instance path. Empty unless requested.
    pub internals: BTreeMap<String, StreamBundle>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    /// Root in-port, by position among the root's in-ports.
    External(usize),
    /// Out-port slot of an atomic instance.
    Atomic(usize),
    Undriven,
}

struct AtomicInstance {
    path: String,
    transducer: usize,
    config: ConfigId,
    in_slots: Vec<usize>,
    out_slots: Vec<usize>,
}

struct Network {
    /// `(instance path, port name, slot)` for every port of every instance.
    ports: Vec<(String, String, usize)>,
    /// For every slot, the slot or external input it ultimately reads.
    driver: Vec<Option<usize>>,
    external: HashMap<usize, usize>,
    atomics: Vec<AtomicInstance>,
    transducers: Vec<Transducer>,
    root_out: Vec<usize>,
}

impl Network {
    fn build(model: &Model, root: ComponentId) -> Result<Network, SimError> {
        let mut net = Network {
            ports: Vec::new(),
            driver: Vec::new(),
            external: HashMap::new(),
            atomics: Vec::new(),
            transducers: Vec::new(),
            root_out: Vec::new(),
        };
        let mut cache: HashMap<ComponentId, usize> = HashMap::new();
        let slots = net.instantiate(model, root, String::new(), &mut cache, &mut Vec::new())?;
        let c = model.component(root);
        for (i, (p, _)) in c.in_ports().enumerate() {
            net.external.insert(slots[p], i);
        }
        net.root_out = c.out_ports().map(|(p, _)| slots[p]).collect();
        Ok(net)
    }

    fn instantiate(
        &mut self,
        model: &Model,
        id: ComponentId,
        path: String,
        cache: &mut HashMap<ComponentId, usize>,
        stack: &mut Vec<ComponentId>,
    ) -> Result<Vec<usize>, SimError> {
        let c = model.component(id);
        if stack.contains(&id) {
            return Err(SimError::Recursive(c.name.clone()));
        }
        let slots: Vec<usize> = c
            .ports
            .iter()
            .map(|p| {
                let slot = self.driver.len();
                self.driver.push(None);
                self.ports.push((path.clone(), p.name.clone(), slot));
                slot
            })
            .collect();
        if c.is_atomic() {
            let t = match cache.get(&id) {
                Some(&t) => t,
                None => {
                    let t = complete(&elaborate(model, id)?, CompletionMode::EpsilonSelfLoop);
                    self.transducers.push(t);
                    cache.insert(id, self.transducers.len() - 1);
                    self.transducers.len() - 1
                }
            };
            self.atomics.push(AtomicInstance {
                path,
                transducer: t,
                config: self.transducers[t].initial,
                in_slots: c.in_ports().map(|(p, _)| slots[p]).collect(),
                out_slots: c.out_ports().map(|(p, _)| slots[p]).collect(),
            });
            return Ok(slots);
        }
        stack.push(id);
        let mut sub_slots = Vec::new();
        for s in c.subcomponents() {
            let sub_path = if path.is_empty() { s.name.clone() } else { format!("{path}.{}", s.name) };
            sub_slots.push(self.instantiate(model, s.component, sub_path, cache, stack)?);
        }
        stack.pop();
        let slot_of = |owner: PortOwner, port: usize| match owner {
            PortOwner::This => slots[port],
            PortOwner::Instance(i) => sub_slots[i][port],
        };
        for k in c.connectors() {
            let source = slot_of(k.source.owner, k.source.port);
            for t in &k.targets {
                self.driver[slot_of(t.owner, t.port)] = Some(source);
            }
        }
        Ok(slots)
    }

    fn source(&self, mut slot: usize, atomic_outs: &HashSet<usize>) -> Source {
        // connector chains through composed boundaries are acyclic: each hop
        // moves from a target to its unique source
        for _ in 0..=self.driver.len() {
            if let Some(&i) = self.external.get(&slot) {
                return Source::External(i);
            }
            if atomic_outs.contains(&slot) {
                return Source::Atomic(slot);
            }
            match self.driver[slot] {
                Some(next) => slot = next,
                None => return Source::Undriven,
            }
        }
        Source::Undriven
    }
}

/// Runs `root` for `ticks` ticks on `inputs`.
///
/// The message of each root out-port at tick `t` is recorded before the
/// computation of tick `t`; at tick 0 this is the initial output of the
/// producing automaton.
pub fn simulate(
    model: &Model,
    root: ComponentId,
    inputs: &StreamBundle,
    ticks: usize,
    policy: &mut Policy,
    record_internals: bool,
) -> Result<Simulation, SimError> {
    let iface = Interface::of(model, root);
    inputs.validate(&iface.inputs)?;
    if ticks > inputs.ticks {
        return Err(SimError::TickOverrun { ticks, available: inputs.ticks });
    }
    let mut net = Network::build(model, root)?;
    let atomic_outs: HashSet<usize> = net.atomics.iter().flat_map(|a| a.out_slots.iter().copied()).collect();
    let sources: Vec<Source> = (0..net.driver.len()).map(|s| net.source(s, &atomic_outs)).collect();

    // current messages of atomic out-ports
    let mut current: HashMap<usize, Message> = HashMap::new();
    for a in &net.atomics {
        let t = &net.transducers[a.transducer];
        for (k, &slot) in a.out_slots.iter().enumerate() {
            current.insert(slot, t.interface.outputs[k].decode(t.initial_outputs[k]));
        }
    }
    let in_streams: Vec<&[Message]> =
        iface.inputs.iter().map(|p| inputs.port(&p.name).expect("validated")).collect();

    let value = |slot: usize, tick: usize, current: &HashMap<usize, Message>| -> Message {
        match sources[slot] {
            Source::External(i) => in_streams[i][tick].clone(),
            Source::Atomic(s) => current[&s].clone(),
            Source::Undriven => None,
        }
    };

    let mut outputs = StreamBundle::silent(ticks, iface.outputs.iter().map(|p| p.name.as_str()));
    let mut internals: BTreeMap<String, StreamBundle> = BTreeMap::new();
    if record_internals {
        for (path, port, _) in net.ports.iter().filter(|(p, _, _)| !p.is_empty()) {
            internals.entry(path.clone()).or_insert_with(|| StreamBundle::new(ticks)).ports.insert(port.clone(), vec![None; ticks]);
        }
    }

    for tick in 0..ticks {
        for (p, &slot) in iface.outputs.iter().zip(&net.root_out) {
            outputs.ports.get_mut(&p.name).expect("port")[tick] = value(slot, tick, &current);
        }
        if record_internals {
            for (path, port, slot) in net.ports.iter().filter(|(p, _, _)| !p.is_empty()) {
                internals.get_mut(path).expect("path").ports.get_mut(port).expect("port")[tick] =
                    value(*slot, tick, &current);
            }
        }
        // compute phase: every atomic instance reads current, produces next
        let mut next: Vec<(usize, Message)> = Vec::new();
        for a in net.atomics.iter_mut() {
            let t = &net.transducers[a.transducer];
            let input: Vec<Code> = a
                .in_slots
                .iter()
                .zip(&t.interface.inputs)
                .map(|(&slot, sig)| sig.encode(&value(slot, tick, &current)).unwrap_or(EPSILON))
                .collect();
            let (config, out) = step(t, a.config, &input, policy).map_err(|source| SimError::Step {
                instance: if a.path.is_empty() { t.component.clone() } else { a.path.clone() },
                tick,
                source,
            })?;
            debug_assert!(config.0 < t.configs.len());
            a.config = config;
            for ((&slot, sig), &code) in a.out_slots.iter().zip(&t.interface.outputs).zip(&out) {
                next.push((slot, sig.decode(code)));
            }
        }
        // swap phase
        for (slot, m) in next {
            current.insert(slot, m);
        }
    }
    Ok(Simulation { outputs, internals })
}
