//! Input-output conformance checking between quiescent transition systems.
//!
//! An implementation conforms to a specification when, after every trace the
//! specification allows, the implementation's possible observations (outputs
//! and quiescence) are a subset of the specification's. Because both systems
//! are input-enabled this coincides with trace inclusion; the checker
//! asserts that correspondence in debug builds.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::Automaton;
use crate::label::Action;
use crate::nav::{MacroId, Nav};
use crate::ops::determinise;
use crate::traces::{trace_included, Trace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConformanceError {
    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),
    #[error("{0} is not input-enabled; apply demonic completion first")]
    NotInputEnabled(String),
}

/// The outcome of a conformance check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// A specification trace σ and an observation the implementation can
    /// produce after σ but the specification cannot; the observation is an
    /// output or `delta`, never an input. Present exactly on failure, and
    /// minimal in (length, lexicographic) order.
    pub counterexample: Option<(Trace, Action)>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "PASS"),
            Some((trace, action)) => write!(f, "FAIL after {trace} observing {action}"),
        }
    }
}

/// The observations (outputs and `delta`) enabled immediately after `sigma`,
/// or the empty set when `sigma` is not a trace of `a`.
///
/// Walks the determinised automaton; the weak-enabling route in
/// [`crate::traces::out`] computes the same set directly on the original
/// automaton, deliberately through different code.
pub fn out_set(a: &Automaton, sigma: &Trace) -> BTreeSet<Action> {
    let det = determinise(a);
    let nav = Nav::new(&det);
    match nav.run(nav.start(&det), sigma.actions()) {
        Some(reached) => nav.enabled_output_like(&det, reached),
        None => BTreeSet::new(),
    }
}

/// Decides conformance of `impl_` against `spec`.
///
/// Pairs of determinised macro-states reachable by common traces are
/// explored breadth-first; the first pair where the implementation enables
/// an observation the specification does not yields the verdict, so the
/// counterexample is shortest with lexicographic tie-break.
pub fn ioco_check(impl_: &Automaton, spec: &Automaton) -> Result<Verdict, ConformanceError> {
    if impl_.inputs() != spec.inputs() || impl_.outputs() != spec.outputs() {
        return Err(ConformanceError::AlphabetMismatch(format!(
            "implementation {{{}}}/{{{}}} vs specification {{{}}}/{{{}}}",
            join(impl_.inputs()),
            join(impl_.outputs()),
            join(spec.inputs()),
            join(spec.outputs()),
        )));
    }
    for (a, who) in [(impl_, "implementation"), (spec, "specification")] {
        if !a.is_input_enabled() {
            return Err(ConformanceError::NotInputEnabled(who.into()));
        }
    }

    let nav_i = Nav::new(impl_);
    let nav_s = Nav::new(spec);
    let start = (nav_i.start(impl_), nav_s.start(spec));
    let mut visited: HashSet<(MacroId, MacroId)> = HashSet::new();
    let mut queue: VecDeque<(MacroId, MacroId, Trace)> = VecDeque::new();
    visited.insert(start);
    queue.push_back((start.0, start.1, Trace::empty()));

    let mut counterexample = None;
    'search: while let Some((si, ss, trace)) = queue.pop_front() {
        for action in nav_i.enabled_output_like(impl_, si) {
            if nav_s.step(ss, &action).is_none() {
                counterexample = Some((trace.clone(), action));
                break 'search;
            }
        }
        // Extend σ along actions both sides allow: traces outside the
        // specification are irrelevant, traces outside the implementation
        // have empty out-sets.
        for action in nav_i.enabled(si).iter() {
            let (Some(next_i), Some(next_s)) = (nav_i.step(si, action), nav_s.step(ss, action))
            else {
                continue;
            };
            if visited.insert((next_i, next_s)) {
                queue.push_back((next_i, next_s, trace.extended(action.clone())));
            }
        }
    }

    let verdict = Verdict {
        pass: counterexample.is_none(),
        counterexample,
    };
    // Input-enabled systems make conformance coincide with trace inclusion.
    debug_assert_eq!(verdict.pass, trace_included(impl_, spec).included);
    Ok(verdict)
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(",")
}
