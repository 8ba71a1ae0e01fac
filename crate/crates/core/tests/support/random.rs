//! Random small automata over boolean ports, emitted as `.maa` source so
//! they travel the whole front end.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Port shape shared by the components of one random model.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub inputs: usize,
    pub outputs: usize,
}

impl Shape {
    /// At most two boolean ports in total.
    pub fn pick(rng: &mut StdRng) -> Shape {
        *[
            Shape { inputs: 1, outputs: 1 },
            Shape { inputs: 1, outputs: 1 },
            Shape { inputs: 1, outputs: 1 },
            Shape { inputs: 0, outputs: 2 },
            Shape { inputs: 1, outputs: 0 },
        ]
        .choose(rng)
        .unwrap()
    }

    fn ports(&self) -> String {
        let ins = (0..self.inputs).map(|k| format!("in Boolean i{k}"));
        let outs = (0..self.outputs).map(|k| format!("out Boolean o{k}"));
        let all: Vec<String> = ins.chain(outs).collect();
        if all.is_empty() {
            String::new()
        } else {
            format!("port {};", all.join(", "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    /// `Some(b)` triggers on `i<k>:b`.
    pub trigger: Vec<Option<bool>>,
    pub guard: Option<String>,
    /// Output expressions per out-port.
    pub outputs: Vec<Option<String>>,
}

#[derive(Clone, Debug)]
pub struct Automaton {
    pub states: usize,
    pub initial_outputs: Vec<Option<bool>>,
    pub transitions: Vec<Transition>,
}

fn maybe_bool(rng: &mut StdRng, p_none: f64) -> Option<bool> {
    if rng.gen_bool(p_none) {
        None
    } else {
        Some(rng.gen())
    }
}

fn transition(rng: &mut StdRng, shape: Shape, states: usize) -> Transition {
    let trigger: Vec<Option<bool>> = (0..shape.inputs).map(|_| maybe_bool(rng, 0.3)).collect();
    let triggered: Vec<usize> = (0..shape.inputs).filter(|&k| trigger[k].is_some()).collect();
    let guard = match triggered.choose(rng) {
        Some(k) if rng.gen_bool(0.2) => Some(if rng.gen() { format!("i{k} == true") } else { format!("not i{k}") }),
        _ => None,
    };
    let outputs = (0..shape.outputs)
        .map(|_| match rng.gen_range(0..4) {
            0 => None,
            1 => Some("true".to_string()),
            2 => Some("false".to_string()),
            _ => match triggered.choose(rng) {
                Some(k) => Some(format!("i{k}")),
                None => Some("true".to_string()),
            },
        })
        .collect();
    Transition { source: rng.gen_range(0..states), target: rng.gen_range(0..states), trigger, guard, outputs }
}

impl Automaton {
    /// Up to four states and six transitions.
    pub fn random(rng: &mut StdRng, shape: Shape) -> Automaton {
        let states = rng.gen_range(1..=4);
        let n = rng.gen_range(0..=6);
        Automaton {
            states,
            initial_outputs: (0..shape.outputs).map(|_| maybe_bool(rng, 0.5)).collect(),
            transitions: (0..n).map(|_| transition(rng, shape, states)).collect(),
        }
    }

    /// A variant with some transitions dropped and some added.
    pub fn mutate(&self, rng: &mut StdRng, shape: Shape) -> Automaton {
        let mut m = self.clone();
        m.transitions.retain(|_| rng.gen_bool(0.75));
        for _ in 0..rng.gen_range(0..=2) {
            m.transitions.push(transition(rng, shape, m.states));
        }
        m
    }

    pub fn source(&self, name: &str, shape: Shape) -> String {
        let init: Vec<String> = self
            .initial_outputs
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|v| format!("o{k}:{v}")))
            .collect();
        let init = if init.is_empty() { "initial".to_string() } else { format!("initial {{{}}}", init.join(", ")) };
        let states: Vec<String> =
            (0..self.states).map(|s| if s == 0 { format!("s0 [{init}]") } else { format!("s{s}") }).collect();
        let mut text = format!("component {name} {{\n  {}\n  automaton {{\n    state {};\n", shape.ports(), states.join(", "));
        for t in &self.transitions {
            let trig: Vec<String> =
                t.trigger.iter().enumerate().filter_map(|(k, v)| v.map(|v| format!("i{k}:{v}"))).collect();
            let outs: Vec<String> =
                t.outputs.iter().enumerate().filter_map(|(k, e)| e.as_ref().map(|e| format!("o{k}: {e}"))).collect();
            text.push_str(&format!("    s{} -> s{}", t.source, t.target));
            if !trig.is_empty() {
                text.push_str(&format!(" {{{}}}", trig.join(", ")));
            }
            if let Some(g) = &t.guard {
                text.push_str(&format!(" [{g}]"));
            }
            if !outs.is_empty() {
                text.push_str(&format!(" / {{{}}}", outs.join(", ")));
            }
            text.push_str(";\n");
        }
        text.push_str("  }\n}\n");
        text
    }
}
