//! Bounded trace inclusion by exhaustive enumeration.
//!
//! A trace of length `n` is `out_0, in_0, out_1, ..., in_{n-2}, out_{n-1}`:
//! the initial outputs, then alternating inputs and the outputs they cause.
//! The input of the last letter has no observable effect and is left out.

use arcauto::model::{ComponentId, Message, Model};

use super::reference::{all_inputs, initial, reachable, successors, Cfg, Mode};

/// One completed atomic component.
pub struct Machine<'m> {
    model: &'m Model,
    id: ComponentId,
    mode: Mode,
    reach: Vec<Cfg>,
}

impl<'m> Machine<'m> {
    pub fn new(model: &'m Model, id: ComponentId, mode: Mode) -> Self {
        let reach = reachable(model, model.component(id));
        Machine { model, id, mode, reach }
    }

    /// Pending `(configuration, outputs)` pairs at the start.
    fn start(&self) -> Vec<(Cfg, Vec<Message>)> {
        let c = self.model.component(self.id);
        let (cfg, out) = initial(c);
        vec![(cfg, self.outs(&out))]
    }

    fn outs(&self, all: &[Message]) -> Vec<Message> {
        self.model.component(self.id).out_ports().map(|(p, _)| all[p].clone()).collect()
    }

    fn step(&self, live: &[Cfg], inputs: &[Message]) -> Vec<(Cfg, Vec<Message>)> {
        let c = self.model.component(self.id);
        let mut next = Vec::new();
        for cfg in live {
            for (out, to) in successors(self.model, c, self.mode, &self.reach, cfg, inputs) {
                let pair = (to, self.outs(&out));
                if !next.contains(&pair) {
                    next.push(pair);
                }
            }
        }
        next
    }
}

/// Outcome of the bounded check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bounded {
    /// No implementation trace up to the depth escapes the specification.
    Included,
    /// Length of the shortest escaping trace.
    Escapes(usize),
}

/// Compares the trace sets of `imp` and `spec` up to `depth` letters,
/// level by level so the first escape found is a shortest one.
pub fn check(imp: &Machine, spec: &Machine, depth: usize) -> Bounded {
    let c = imp.model.component(imp.id);
    let inputs = all_inputs(imp.model, c);
    // frontier of (implementation pairs, specification pairs) per trace prefix
    let mut frontier = vec![(imp.start(), spec.start())];
    for len in 1..=depth {
        let mut next_frontier = Vec::new();
        for (ip, sp) in &frontier {
            let mut seen = Vec::new();
            for out in ip.iter().map(|(_, o)| o) {
                if seen.contains(&out) {
                    continue;
                }
                seen.push(out);
                let i_live: Vec<Cfg> = ip.iter().filter(|(_, o)| o == out).map(|(c, _)| c.clone()).collect();
                let s_live: Vec<Cfg> = sp.iter().filter(|(_, o)| o == out).map(|(c, _)| c.clone()).collect();
                if s_live.is_empty() {
                    return Bounded::Escapes(len);
                }
                if len < depth {
                    for input in &inputs {
                        let i_next = imp.step(&i_live, input);
                        if !i_next.is_empty() {
                            next_frontier.push((i_next, spec.step(&s_live, input)));
                        }
                    }
                }
            }
        }
        frontier = next_frontier;
    }
    Bounded::Included
}

/// Whether a concrete trace (outputs per letter, inputs between them) is a
/// trace of `m`. `inputs` has one element less than `outputs`.
pub fn accepts(m: &Machine, outputs: &[Vec<Message>], inputs: &[Vec<Message>]) -> bool {
    let c = m.model.component(m.id);
    let mut pairs = m.start();
    for (k, out) in outputs.iter().enumerate() {
        let live: Vec<Cfg> = pairs.iter().filter(|(_, o)| o == out).map(|(c, _)| c.clone()).collect();
        if live.is_empty() {
            return false;
        }
        if let Some(i) = inputs.get(k) {
            let mut full = vec![None; c.ports.len()];
            for ((p, _), v) in c.in_ports().zip(i) {
                full[p] = v.clone();
            }
            pairs = m.step(&live, &full);
        }
    }
    true
}
