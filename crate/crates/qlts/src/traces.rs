//! Trace semantics: projection, weak reachability, enabled outputs, bounded
//! enumeration and exact trace-inclusion decisions.
//!
//! A trace is a finite sequence of visible actions; `tau` never appears and
//! `delta` is an ordinary first-class element (no compression of repeated
//! quiescence observations). Exact decisions work on the determinised views
//! of both automata via a product search; bounded enumeration exists for
//! display and as a comparison point for test oracles.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::Automaton;
use crate::label::Action;
use crate::nav::{InclusionChecker, MacroId, Nav};

/// A finite sequence of visible actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Trace(pub Vec<Action>);

impl Trace {
    pub fn empty() -> Trace {
        Trace(Vec::new())
    }

    pub fn new(actions: impl IntoIterator<Item = Action>) -> Trace {
        Trace(actions.into_iter().collect())
    }

    /// Builds a trace from tokens, reading `delta` as the quiescence action.
    pub fn from_tokens<I: IntoIterator<Item = S>, S: AsRef<str>>(tokens: I) -> Trace {
        Trace(
            tokens
                .into_iter()
                .map(|t| {
                    if t.as_ref() == crate::label::DELTA {
                        Action::Delta
                    } else {
                        Action::Name(t.as_ref().to_owned())
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn push(&mut self, a: Action) {
        self.0.push(a);
    }

    /// `self` extended by one action, leaving `self` untouched.
    pub fn extended(&self, a: Action) -> Trace {
        let mut t = self.clone();
        t.push(a);
        t
    }

    pub fn concat(&self, other: &Trace) -> Trace {
        Trace(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// The prefix relation on traces.
    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_proper_prefix_of(&self, other: &Trace) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// All traces of length at most `depth`; prefix-closed and containing ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    pub depth: usize,
    pub traces: BTreeSet<Trace>,
}

impl TraceSet {
    pub fn contains(&self, t: &Trace) -> bool {
        self.traces.contains(t)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("label `{0}` is not in the automaton's alphabet")]
    UnknownLabel(String),
}

/// Erases from `sigma` every action outside `keep`, preserving order.
/// Distributes over concatenation.
pub fn project(sigma: &Trace, keep: &BTreeSet<Action>) -> Trace {
    Trace(
        sigma
            .0
            .iter()
            .filter(|a| keep.contains(a))
            .cloned()
            .collect(),
    )
}

fn check_alphabet(a: &Automaton, sigma: &Trace) -> Result<(), TraceError> {
    for act in &sigma.0 {
        if let Action::Name(n) = act {
            if !a.inputs().contains(n) && !a.outputs().contains(n) {
                return Err(TraceError::UnknownLabel(n.clone()));
            }
        }
    }
    Ok(())
}

/// The states reachable from `from` via `sigma`, absorbing `tau` steps
/// before, between and after the visible actions. May be empty.
pub fn weak_reach(
    a: &Automaton,
    from: &BTreeSet<String>,
    sigma: &Trace,
) -> Result<BTreeSet<String>, TraceError> {
    check_alphabet(a, sigma)?;
    let nav = Nav::new(a);
    let start = nav.macro_of_names(from.iter());
    Ok(match nav.run(start, sigma.actions()) {
        Some(id) => nav.member_names(id),
        None => BTreeSet::new(),
    })
}

/// The outputs (and `delta`) weakly enabled in some state reachable from
/// `state` via `sigma`.
pub fn out(a: &Automaton, state: &str, sigma: &Trace) -> Result<BTreeSet<Action>, TraceError> {
    check_alphabet(a, sigma)?;
    let nav = Nav::new(a);
    let start = nav.macro_of_names([state]);
    Ok(match nav.run(start, sigma.actions()) {
        Some(id) => nav.enabled_output_like(a, id),
        None => BTreeSet::new(),
    })
}

/// Exactly the traces of `a` of length at most `depth`, from any initial
/// state, with `tau` erased. The result is prefix-closed.
pub fn traces_bounded(a: &Automaton, depth: usize) -> TraceSet {
    let nav = Nav::new(a);
    let mut traces = BTreeSet::new();
    let mut queue: VecDeque<(MacroId, Trace)> = VecDeque::new();
    queue.push_back((nav.start(a), Trace::empty()));
    while let Some((set, trace)) = queue.pop_front() {
        traces.insert(trace.clone());
        if trace.len() == depth {
            continue;
        }
        for action in nav.enabled(set).iter() {
            if let Some(next) = nav.step(set, action) {
                queue.push_back((next, trace.extended(action.clone())));
            }
        }
    }
    TraceSet { depth, traces }
}

/// The outcome of a trace-inclusion decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub included: bool,
    /// A shortest trace of the left automaton missing from the right one,
    /// with lexicographic tie-break; present exactly when `included` is false.
    pub counterexample: Option<Trace>,
}

/// Decides `traces(a) ⊆ traces(b)` exactly.
///
/// Breadth-first search over pairs of determinised macro-states, expanding
/// actions in lexicographic order so the counterexample is the shortest,
/// lexicographically least trace in `traces(a) \ traces(b)`.
pub fn trace_included(a: &Automaton, b: &Automaton) -> Inclusion {
    let nav_a = Nav::new(a);
    let nav_b = Nav::new(b);
    let mut checker = InclusionChecker::new(&nav_a, &nav_b);
    let counterexample = checker.check(nav_a.start(a), nav_b.start(b));
    Inclusion {
        included: counterexample.is_none(),
        counterexample,
    }
}

/// Mutual trace inclusion.
pub fn trace_equivalent(a: &Automaton, b: &Automaton) -> bool {
    trace_included(a, b).included && trace_included(b, a).included
}
