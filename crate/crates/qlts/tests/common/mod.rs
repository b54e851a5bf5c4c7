//! Shared test support: independent oracles and corpus construction.
//!
//! The oracles here recompute trace semantics straight from the definitions
//! by recursion over raw transitions, deliberately sharing no code with the
//! library's state-set machinery, so they can serve as a second route in the
//! acceptance checks.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use qlts::automaton::Automaton;
use qlts::label::{Action, Label};
use qlts::random::GeneratorConfig;
use qlts::traces::Trace;

pub fn fixture(name: &str) -> Automaton {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    qlts::format::parse(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"))
}

pub fn fixture_unvalidated(name: &str) -> Automaton {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    qlts::format::parse_unvalidated(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"))
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Brute-force bounded trace enumeration, straight from the definition:
///
/// traces(s, k) = {ε} ∪ { a·σ | s -a-> t, a visible, σ ∈ traces(t, k-1) }
///             ∪ { σ | s -tau-> t, σ ∈ traces(t, k) }
///
/// Memoised on (state, k); terminates because all generated systems are
/// convergent.
pub fn oracle_traces(a: &Automaton, depth: usize) -> BTreeSet<Trace> {
    fn traces_from(
        a: &Automaton,
        s: &str,
        k: usize,
        memo: &mut HashMap<(String, usize), BTreeSet<Trace>>,
    ) -> BTreeSet<Trace> {
        if let Some(hit) = memo.get(&(s.to_owned(), k)) {
            return hit.clone();
        }
        let mut set: BTreeSet<Trace> = [Trace::empty()].into();
        for t in a.outgoing(s) {
            match t.label.action() {
                None => {
                    set.extend(traces_from(a, &t.dst, k, memo));
                }
                Some(action) if k > 0 => {
                    for suffix in traces_from(a, &t.dst, k - 1, memo) {
                        let mut trace = Trace(vec![action.clone()]);
                        trace.0.extend(suffix.0);
                        set.insert(trace);
                    }
                }
                Some(_) => {}
            }
        }
        memo.insert((s.to_owned(), k), set.clone());
        set
    }

    let mut memo = HashMap::new();
    let mut all = BTreeSet::new();
    for s0 in a.initial() {
        all.extend(traces_from(a, s0, depth, &mut memo));
    }
    all
}

/// Brute-force weak reachability: τ* (a τ*)* by recursion over paths.
pub fn oracle_reach(a: &Automaton, from: &BTreeSet<String>, sigma: &Trace) -> BTreeSet<String> {
    fn go(
        a: &Automaton,
        s: &str,
        sigma: &[Action],
        i: usize,
        memo: &mut HashMap<(String, usize), BTreeSet<String>>,
    ) -> BTreeSet<String> {
        if let Some(hit) = memo.get(&(s.to_owned(), i)) {
            return hit.clone();
        }
        let mut set = BTreeSet::new();
        if i == sigma.len() {
            set.insert(s.to_owned());
        }
        for t in a.outgoing(s) {
            match t.label.action() {
                None => set.extend(go(a, &t.dst, sigma, i, memo)),
                Some(action) => {
                    if i < sigma.len() && action == sigma[i] {
                        set.extend(go(a, &t.dst, sigma, i + 1, memo));
                    }
                }
            }
        }
        memo.insert((s.to_owned(), i), set.clone());
        set
    }

    let mut memo = HashMap::new();
    let mut all = BTreeSet::new();
    for s in from {
        all.extend(go(a, s, sigma.actions(), 0, &mut memo));
    }
    all
}

/// Outputs (and delta) weakly enabled after `sigma` from `from`, via the
/// path-enumeration oracle.
pub fn oracle_out(a: &Automaton, from: &BTreeSet<String>, sigma: &Trace) -> BTreeSet<Action> {
    let reached = oracle_reach(a, from, sigma);
    let closure = oracle_reach(a, &reached, &Trace::empty());
    let mut out = BTreeSet::new();
    for s in &closure {
        for t in a.outgoing(s) {
            match &t.label {
                Label::Output(n) => {
                    out.insert(Action::Name(n.clone()));
                }
                Label::Quiescence => {
                    out.insert(Action::Delta);
                }
                _ => {}
            }
        }
    }
    out
}

/// True when `sigma` is a trace of `a`.
pub fn oracle_has_trace(a: &Automaton, sigma: &Trace) -> bool {
    !oracle_reach(a, a.initial(), sigma).is_empty()
}

/// Independent projection construction: rebuilds the automaton with every
/// transition labelled in `hidden` re-labelled to tau and the output
/// alphabet shrunk. Test-local counterpart of the library's hiding.
pub fn relabel_projection(a: &Automaton, hidden: &BTreeSet<String>) -> Automaton {
    let mut b = Automaton::builder(a.name(), a.kind())
        .inputs(a.inputs().iter().cloned())
        .outputs(a.outputs().iter().filter(|o| !hidden.contains(*o)).cloned())
        .initial(a.initial().iter().cloned());
    for s in a.states() {
        b = b.state(s.clone());
    }
    for t in a.transitions() {
        let token = match &t.label {
            Label::Output(n) if hidden.contains(n) => "tau",
            l => l.token(),
        };
        b = b.trans(t.src.clone(), token, t.dst.clone());
    }
    b.build().expect("projection construction is well-formed")
}

// ---------------------------------------------------------------------------
// Corpus helpers
// ---------------------------------------------------------------------------

/// Corpus shape used by most acceptance checks: up to 12 states, up to
/// three inputs and three outputs.
pub fn cfg_full() -> GeneratorConfig {
    GeneratorConfig::new(["a", "b", "c"], ["x", "y", "z"]).states(2, 12)
}

/// Smaller components for pairwise checks, to keep products tame.
pub fn cfg_pair_left() -> GeneratorConfig {
    GeneratorConfig::new(["a", "b"], ["x", "y"]).states(2, 6)
}

/// Right-hand component: disjoint outputs, and it listens to `x`, one of
/// the left component's outputs, so compositions exercise the
/// input/output synchronisation rule.
pub fn cfg_pair_right() -> GeneratorConfig {
    GeneratorConfig::new(["a", "x"], ["z", "w"]).states(2, 6)
}

/// Greedily grows a hiding set that keeps the result convergent.
pub fn pick_hidable(a: &Automaton) -> BTreeSet<String> {
    let mut hidden: BTreeSet<String> = BTreeSet::new();
    for o in a.outputs() {
        let mut candidate = hidden.clone();
        candidate.insert(o.clone());
        if qlts::ops::hide(a, candidate.iter().cloned()).is_ok() {
            hidden = candidate;
        }
    }
    hidden
}

/// Removes some output transitions whose source keeps at least one output
/// or internal step. On the self-loop-annotated systems produced by the
/// generators this preserves validity and shrinks the trace set, so the
/// result conforms to the original.
pub fn prune_outputs(a: &Automaton, seed: u64) -> Automaton {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut removed: BTreeSet<qlts::Transition> = BTreeSet::new();
    for t in a.transitions() {
        if !matches!(t.label, Label::Output(_)) || !rng.random_bool(0.4) {
            continue;
        }
        let busy = a
            .outgoing(&t.src)
            .filter(|u| matches!(u.label, Label::Output(_) | Label::Internal))
            .filter(|u| !removed.contains(*u))
            .count();
        if busy >= 2 {
            removed.insert(t.clone());
        }
    }
    rebuild_without(a, &removed)
}

/// Adds one output transition at a reachable non-quiescent state, which
/// keeps the system a valid quiescent one but usually makes it
/// non-conforming to the original.
pub fn add_output(a: &Automaton, seed: u64) -> Automaton {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let quiescent = qlts::quiescent_states(a);
    let candidates: Vec<&String> = a
        .states()
        .iter()
        .filter(|s| !quiescent.contains(*s))
        .collect();
    if candidates.is_empty() || a.outputs().is_empty() {
        return a.clone();
    }
    let src = candidates[rng.random_range(0..candidates.len())].clone();
    let outputs: Vec<&String> = a.outputs().iter().collect();
    let out = outputs[rng.random_range(0..outputs.len())].clone();
    let states: Vec<&String> = a.states().iter().collect();
    let dst = states[rng.random_range(0..states.len())].clone();

    let mut b = builder_like(a);
    for t in a.transitions() {
        b = b.trans(t.src.clone(), t.label.token(), t.dst.clone());
    }
    b = b.trans(src, out, dst);
    b.build().expect("mutation preserved well-formedness")
}

fn builder_like(a: &Automaton) -> qlts::automaton::Builder {
    let mut b = Automaton::builder(a.name(), a.kind())
        .inputs(a.inputs().iter().cloned())
        .outputs(a.outputs().iter().cloned())
        .initial(a.initial().iter().cloned());
    for s in a.states() {
        b = b.state(s.clone());
    }
    b
}

fn rebuild_without(a: &Automaton, removed: &BTreeSet<qlts::Transition>) -> Automaton {
    let mut b = builder_like(a);
    for t in a.transitions() {
        if !removed.contains(t) {
            b = b.trans(t.src.clone(), t.label.token(), t.dst.clone());
        }
    }
    b.build().expect("pruning preserved well-formedness")
}
