//! Seeded random generation of automata for property-based testing.
//!
//! Generated systems are always input-enabled and convergent: every state
//! gets at least one target per input, and internal transitions only go from
//! lower-numbered to higher-numbered states so the `tau` subgraph is acyclic
//! by construction. Quiescent systems are obtained by deltafying a
//! `delta`-free system, optionally after sprinkling `delta` self-loops on
//! some quiescent states to exercise partially-annotated inputs.
//!
//! Everything is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Automaton, Kind};
use crate::quiescence::{deltafy, quiescent_states, DeltafyMode};

/// Shape parameters for the generator.
#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    /// Inclusive bounds on the number of states.
    pub min_states: usize,
    pub max_states: usize,
    /// Input alphabet (names).
    pub inputs: Vec<String>,
    /// Output alphabet (names).
    pub outputs: Vec<String>,
    /// Probability that a (state, input) pair gets a second target.
    pub extra_input_target: f64,
    /// Probability that a state gets an output transition; drawn twice.
    pub output_density: f64,
    /// Maximum number of `tau` edges to attempt.
    pub max_tau_edges: usize,
    /// Probability of a second initial state.
    pub extra_initial: f64,
}

impl GeneratorConfig {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Self
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        GeneratorConfig {
            min_states: 2,
            max_states: 12,
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
            extra_input_target: 0.15,
            output_density: 0.45,
            max_tau_edges: 2,
            extra_initial: 0.15,
        }
    }

    pub fn states(mut self, min: usize, max: usize) -> Self {
        self.min_states = min;
        self.max_states = max;
        self
    }

    pub fn tau_edges(mut self, max: usize) -> Self {
        self.max_tau_edges = max;
        self
    }
}

/// A `delta`-free, input-enabled, convergent system of kind `iots`.
pub fn random_iots(cfg: &GeneratorConfig, seed: u64) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_iots_with(cfg, &mut rng)
}

fn random_iots_with(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Automaton {
    let n = rng.random_range(cfg.min_states..=cfg.max_states);
    let state = |i: usize| format!("s{i}");
    let mut b = Automaton::builder(format!("rnd{}", rng.random_range(0..u32::MAX)), Kind::Iots)
        .inputs(cfg.inputs.iter().cloned())
        .outputs(cfg.outputs.iter().cloned());

    b = b.initial([state(0)]);
    if n > 1 && rng.random_bool(cfg.extra_initial) {
        let extra = rng.random_range(1..n);
        b = b.initial([state(extra)]);
    }
    for i in 0..n {
        b = b.state(state(i));
    }

    for i in 0..n {
        for input in &cfg.inputs {
            b = b.trans(state(i), input.clone(), state(rng.random_range(0..n)));
            if rng.random_bool(cfg.extra_input_target) {
                b = b.trans(state(i), input.clone(), state(rng.random_range(0..n)));
            }
        }
        if !cfg.outputs.is_empty() {
            for _ in 0..2 {
                if rng.random_bool(cfg.output_density) {
                    let o = &cfg.outputs[rng.random_range(0..cfg.outputs.len())];
                    b = b.trans(state(i), o.clone(), state(rng.random_range(0..n)));
                }
            }
        }
    }

    // tau edges go strictly upward, which keeps the system convergent.
    if n > 1 {
        for _ in 0..cfg.max_tau_edges {
            if rng.random_bool(0.5) {
                let i = rng.random_range(0..n - 1);
                let j = rng.random_range(i + 1..n);
                b = b.trans(state(i), "tau", state(j));
            }
        }
    }

    b.build().expect("generator produced an invalid automaton")
}

/// A valid quiescent system: the deltafication of a random `delta`-free one.
pub fn random_qts(cfg: &GeneratorConfig, seed: u64) -> Automaton {
    let iots = random_iots(cfg, seed);
    deltafy(&iots, DeltafyMode::Fast).expect("deltafication of a delta-free system cannot fail")
}

/// A random system that already carries `delta` self-loops on some (not
/// necessarily all) of its quiescent states. Such systems always satisfy
/// R2, R3 and R4, but can fail condition C1, which makes them useful for
/// exercising the deltafication precondition.
pub fn random_partially_annotated(cfg: &GeneratorConfig, seed: u64) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iots = random_iots_with(cfg, &mut rng);
    let quiescent: Vec<String> = quiescent_states(&iots).into_iter().collect();
    let mut b = Automaton::builder(iots.name(), Kind::Iots)
        .inputs(iots.inputs().iter().cloned())
        .outputs(iots.outputs().iter().cloned())
        .initial(iots.initial().iter().cloned());
    for s in iots.states() {
        b = b.state(s.clone());
    }
    for t in iots.transitions() {
        b = b.trans(t.src.clone(), t.label.token(), t.dst.clone());
    }
    for q in quiescent {
        if rng.random_bool(0.5) {
            b = b.trans(q.clone(), "delta", q);
        }
    }
    b.build().expect("annotation preserved validity")
}
