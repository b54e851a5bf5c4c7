//! A toolkit for modelling, transforming and testing input-output transition
//! systems with explicit quiescence.
//!
//! The central data type is the [`Automaton`]: a finite transition system
//! whose labels are partitioned into inputs and outputs, with the reserved
//! internal action `tau` and the quiescence observation `delta`. On top of
//! it the crate provides
//!
//! - trace semantics and exact trace-inclusion decisions ([`traces`]),
//! - determinisation, parallel composition and action hiding ([`ops`]),
//! - quiescent-state detection, the quiescence rules and deltafication
//!   ([`quiescence`]),
//! - input-output conformance checking ([`conformance`]),
//! - test-case generation and execution ([`testing`]),
//! - a canonical text format and a CLI over it ([`format`], [`cli`]),
//! - seeded random generation of well-formed systems ([`random`]).
//!
//! All operations are pure functions over immutable automata and are safe to
//! call concurrently.

pub mod automaton;
pub mod cli;
pub mod conformance;
pub mod format;
pub mod iso;
pub mod label;
mod nav;
pub mod ops;
pub mod quiescence;
pub mod random;
pub mod testing;
pub mod traces;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use automaton::{demonic_completion, validate, Automaton, Kind, Transition, ValidationReport};
pub use conformance::{ioco_check, out_set, Verdict};
pub use iso::{identity_hint, isomorphic, isomorphic_with_hint};
pub use label::{Action, Label};
pub use ops::{determinise, hide, parallel};
pub use quiescence::{check_condition_c1, check_rules, deltafy, quiescent_states, DeltafyMode, Rule, RuleReport};
pub use testing::{execute_test, generate_tests, ExecMode, ExecutionResult, TestCase};
pub use traces::{project, out, trace_equivalent, trace_included, traces_bounded, weak_reach, Trace, TraceSet};
