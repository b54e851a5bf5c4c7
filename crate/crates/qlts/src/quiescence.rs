//! Quiescent-state detection, the quiescence rules, condition C1 and
//! deltafication.
//!
//! A state is quiescent when it enables no output and no internal step;
//! outgoing `delta` transitions and inputs do not disqualify it. The four
//! rules restrict how `delta` transitions may be used:
//!
//! - R1: every quiescent state has an outgoing `delta` transition;
//! - R2: every `delta` transition ends in a quiescent state;
//! - R3: a `delta` step enables no new behaviour (trace inclusion);
//! - R4: consecutive `delta` steps preserve behaviour (trace equality).
//!
//! R3 and R4 are decided exactly by language inclusion over determinised
//! views rooted at the states involved. The syntactic variants R3'/R4' are
//! sufficient conditions that avoid the language decisions; both are
//! reported so callers can pick the cheap check when it applies. Condition
//! C1 is the precondition under which deltafication of an automaton that
//! already carries some `delta` transitions stays well-behaved.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{Automaton, Kind, Transition};
use crate::label::Label;
use crate::nav::{InclusionChecker, MacroId, Nav};
use crate::traces::Trace;

/// The checkable rules and conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    #[serde(rename = "R3'")]
    R3Prime,
    #[serde(rename = "R4'")]
    R4Prime,
    C1,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R3Prime,
        Rule::R4Prime,
        Rule::C1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::R3Prime => "R3'",
            Rule::R4Prime => "R4'",
            Rule::C1 => "C1",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Rule::R1 => "quiescence is observable",
            Rule::R2 => "no outputs after quiescence",
            Rule::R3 => "quiescence enables no new behaviour",
            Rule::R4 => "continued quiescence preserves behaviour",
            Rule::R3Prime => "syntactic sufficient condition for R3",
            Rule::R4Prime => "syntactic sufficient condition for R4",
            Rule::C1 => "deltafication precondition",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evidence for a rule violation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// A quiescent state without a `delta` transition (R1).
    State { state: String },
    /// A `delta` transition whose target breaks the rule (R2).
    DeltaEdge { from: String, to: String },
    /// A `delta` transition plus a trace possible after it but not before
    /// it (R3, C1).
    DeltaEdgeTrace {
        from: String,
        to: String,
        trace: Trace,
    },
    /// Two chained `delta` transitions whose endpoints disagree on a trace (R4).
    DeltaChain {
        first: String,
        second: String,
        third: String,
        trace: Trace,
    },
    /// An input step after `delta` that the source state does not mirror (R3').
    MissingInputStep {
        from: String,
        via: String,
        input: String,
        target: String,
    },
    /// A `delta` successor without the required `delta` self-loop, or with a
    /// stray `delta` edge (R4').
    NotDeltaStable { state: String, detail: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::State { state } => write!(f, "state {state}"),
            Witness::DeltaEdge { from, to } => write!(f, "{from} -delta-> {to}"),
            Witness::DeltaEdgeTrace { from, to, trace } => {
                write!(f, "{from} -delta-> {to}, trace {trace}")
            }
            Witness::DeltaChain {
                first,
                second,
                third,
                trace,
            } => write!(
                f,
                "{first} -delta-> {second} -delta-> {third}, trace {trace}"
            ),
            Witness::MissingInputStep {
                from,
                via,
                input,
                target,
            } => write!(
                f,
                "{from} -delta-> {via} -{input}?-> {target} without {from} -{input}?-> {target}"
            ),
            Witness::NotDeltaStable { state, detail } => write!(f, "state {state}: {detail}"),
        }
    }
}

/// Verdict and witnesses for one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleOutcome {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

impl RuleOutcome {
    fn from_witnesses(mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        RuleOutcome {
            holds: witnesses.is_empty(),
            witnesses,
        }
    }
}

/// Per-rule verdicts for one automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleReport {
    pub results: BTreeMap<Rule, RuleOutcome>,
}

impl RuleReport {
    pub fn holds(&self, rule: Rule) -> bool {
        self.results[&rule].holds
    }

    /// True when the definitional rules R1-R4 all hold.
    pub fn is_valid_qts(&self) -> bool {
        [Rule::R1, Rule::R2, Rule::R3, Rule::R4]
            .iter()
            .all(|r| self.holds(*r))
    }
}

/// The states with no outgoing output or `tau` transition.
pub fn quiescent_states(a: &Automaton) -> BTreeSet<String> {
    a.states()
        .iter()
        .filter(|s| {
            !a.outgoing(s)
                .any(|t| matches!(t.label, Label::Output(_) | Label::Internal))
        })
        .cloned()
        .collect()
}

fn delta_edges(a: &Automaton) -> Vec<(&str, &str)> {
    a.transitions()
        .iter()
        .filter(|t| t.label == Label::Quiescence)
        .map(|t| (t.src.as_str(), t.dst.as_str()))
        .collect()
}

fn has_delta_out(a: &Automaton, s: &str) -> bool {
    a.outgoing(s).any(|t| t.label == Label::Quiescence)
}

/// Checks all rules and condition C1, reporting witnesses for every failure.
///
/// The automaton must be structurally sound (input-enabled and convergent);
/// it does not have to be a valid quiescent system — that is exactly what
/// this reports on.
pub fn check_rules(a: &Automaton) -> RuleReport {
    let quiescent = quiescent_states(a);
    let edges = delta_edges(a);
    let nav = Nav::new(a);
    let mut checker = InclusionChecker::new(&nav, &nav);

    // R1: quiescent states can show their quiescence.
    let r1 = RuleOutcome::from_witnesses(
        quiescent
            .iter()
            .filter(|s| !has_delta_out(a, s))
            .map(|s| Witness::State { state: s.clone() })
            .collect(),
    );

    // R2: delta only leads to quiescent states.
    let r2 = RuleOutcome::from_witnesses(
        edges
            .iter()
            .filter(|(_, to)| !quiescent.contains(*to))
            .map(|(from, to)| Witness::DeltaEdge {
                from: (*from).to_string(),
                to: (*to).to_string(),
            })
            .collect(),
    );

    // R3: traces(to) ⊆ traces(from) for every delta edge, decided exactly.
    let mut r3_witnesses = Vec::new();
    for (from, to) in &edges {
        let start_to = nav.macro_of_names([*to]);
        let start_from = nav.macro_of_names([*from]);
        if let Some(trace) = checker.check(start_to, start_from) {
            r3_witnesses.push(Witness::DeltaEdgeTrace {
                from: (*from).to_string(),
                to: (*to).to_string(),
                trace,
            });
        }
    }
    let r3 = RuleOutcome::from_witnesses(r3_witnesses);

    // R4: traces(mid) = traces(last) along every delta chain.
    let mut r4_witnesses = Vec::new();
    let delta_targets: BTreeMap<&str, Vec<&str>> =
        edges.iter().fold(BTreeMap::new(), |mut m, (from, to)| {
            m.entry(*from).or_default().push(*to);
            m
        });
    for (first, mids) in &delta_targets {
        for mid in mids {
            for last in delta_targets.get(mid).into_iter().flatten() {
                let at_mid = nav.macro_of_names([*mid]);
                let at_last = nav.macro_of_names([*last]);
                let fwd = checker.check(at_mid, at_last);
                let bwd = checker.check(at_last, at_mid);
                if let Some(trace) = fwd.into_iter().chain(bwd).min() {
                    r4_witnesses.push(Witness::DeltaChain {
                        first: (*first).to_string(),
                        second: (*mid).to_string(),
                        third: (*last).to_string(),
                        trace,
                    });
                }
            }
        }
    }
    let r4 = RuleOutcome::from_witnesses(r4_witnesses);

    // R3': every input step after delta is mirrored verbatim at the source.
    let mut r3p_witnesses = Vec::new();
    for (from, to) in &edges {
        for t in a.outgoing(to) {
            if let Label::Input(n) = &t.label {
                let mirrored = Transition::new(*from, Label::Input(n.clone()), t.dst.clone());
                if !a.transitions().contains(&mirrored) {
                    r3p_witnesses.push(Witness::MissingInputStep {
                        from: (*from).to_string(),
                        via: (*to).to_string(),
                        input: n.clone(),
                        target: t.dst.clone(),
                    });
                }
            }
        }
    }
    let r3p = RuleOutcome::from_witnesses(r3p_witnesses);

    // R4': delta successors are delta-stable self-loop states.
    let mut r4p_witnesses = Vec::new();
    for (_, to) in &edges {
        let self_loop = Transition::new(*to, Label::Quiescence, *to);
        if !a.transitions().contains(&self_loop) {
            r4p_witnesses.push(Witness::NotDeltaStable {
                state: (*to).to_string(),
                detail: "missing delta self-loop".into(),
            });
        }
        for t in a.outgoing(to) {
            if t.label == Label::Quiescence && t.dst != *to {
                r4p_witnesses.push(Witness::NotDeltaStable {
                    state: (*to).to_string(),
                    detail: format!("delta edge to {} instead of itself", t.dst),
                });
            }
        }
    }
    let r4p = RuleOutcome::from_witnesses(r4p_witnesses);

    let c1 = check_condition_c1(a);

    let results: BTreeMap<Rule, RuleOutcome> = [
        (Rule::R1, r1),
        (Rule::R2, r2),
        (Rule::R3, r3),
        (Rule::R4, r4),
        (Rule::R3Prime, r3p),
        (Rule::R4Prime, r4p),
        (Rule::C1, c1),
    ]
    .into();
    RuleReport { results }
}

/// Decides condition C1 exactly.
///
/// For every `delta` edge `s -> s'` and every trace σ enabled from `s'`: if
/// some state reached from `s'` via σ is quiescent without `delta`, then all
/// states reached from `s` via σ must be quiescent without `delta`. The
/// quantification over the (infinite) trace set is decided by a product
/// search over pairs of determinised macro-states, which is finite.
pub fn check_condition_c1(a: &Automaton) -> RuleOutcome {
    let quiescent = quiescent_states(a);
    let nav = Nav::new(a);
    let bad_states: BTreeSet<u32> = a
        .states()
        .iter()
        .filter(|s| quiescent.contains(*s) && !has_delta_out(a, s))
        .map(|s| nav.state_id(s).unwrap())
        .collect();

    // Per macro-state: does it contain / consist solely of states that are
    // quiescent without delta?
    let mut predicate: BTreeMap<MacroId, (bool, bool)> = BTreeMap::new();
    let mut classify = |id: MacroId| -> (bool, bool) {
        if let Some(hit) = predicate.get(&id) {
            return *hit;
        }
        let members = nav.members(id);
        let exists = members.iter().any(|s| bad_states.contains(s));
        let all = members.iter().all(|s| bad_states.contains(s));
        predicate.insert(id, (exists, all));
        (exists, all)
    };

    // Pairs already proven harmless carry over between delta edges.
    let mut safe: HashSet<(MacroId, MacroId)> = HashSet::new();
    let mut witnesses = Vec::new();
    for (from, to) in delta_edges(a) {
        let start = (nav.macro_of_names([to]), nav.macro_of_names([from]));
        if safe.contains(&start) {
            continue;
        }
        let mut visited: HashSet<(MacroId, MacroId)> = HashSet::new();
        let mut queue: VecDeque<(MacroId, MacroId, Trace)> = VecDeque::new();
        visited.insert(start);
        queue.push_back((start.0, start.1, Trace::empty()));
        let mut violated = false;
        'edge: while let Some((after, before, trace)) = queue.pop_front() {
            let (exists_bad, _) = classify(after);
            let (_, all_bad) = classify(before);
            if exists_bad && !all_bad {
                witnesses.push(Witness::DeltaEdgeTrace {
                    from: from.to_string(),
                    to: to.to_string(),
                    trace,
                });
                violated = true;
                break 'edge;
            }
            for action in nav.enabled(after).iter() {
                // σ must stay within traces(s'); once the universal side is
                // empty the condition is vacuous from there on.
                let Some(next_after) = nav.step(after, action) else {
                    continue;
                };
                let Some(next_before) = nav.step(before, action) else {
                    continue;
                };
                let key = (next_after, next_before);
                if safe.contains(&key) {
                    continue;
                }
                if visited.insert(key) {
                    queue.push_back((next_after, next_before, trace.extended(action.clone())));
                }
            }
        }
        if !violated {
            safe.extend(visited);
        }
    }
    RuleOutcome::from_witnesses(witnesses)
}

/// Whether [`deltafy`] re-checks its preconditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltafyMode {
    /// Verify C1, R2, R3 and R4 first and refuse on violation.
    Strict,
    /// Trust the caller; intended for pipelines that validated already.
    Fast,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeltafyError {
    #[error("precondition {rule} violated: {witness}")]
    PreconditionViolated { rule: Rule, witness: Witness },
}

/// Adds a `delta` self-loop to every quiescent state that lacks one and
/// marks the result as a quiescent transition system.
///
/// States, initial states and alphabets are untouched, which is what makes
/// the operation idempotent and the commutation checks in this crate run on
/// identity state maps.
pub fn deltafy(a: &Automaton, mode: DeltafyMode) -> Result<Automaton, DeltafyError> {
    if mode == DeltafyMode::Strict {
        let report = check_rules(a);
        for rule in [Rule::R2, Rule::R3, Rule::R4, Rule::C1] {
            let outcome = &report.results[&rule];
            if !outcome.holds {
                return Err(DeltafyError::PreconditionViolated {
                    rule,
                    witness: outcome.witnesses[0].clone(),
                });
            }
        }
    }

    let mut transitions = a.transitions().clone();
    for s in quiescent_states(a) {
        if !has_delta_out(a, &s) {
            transitions.insert(Transition::new(s.clone(), Label::Quiescence, s));
        }
    }
    Ok(Automaton::from_parts(
        a.name().to_owned(),
        Kind::Qts,
        a.states().clone(),
        a.initial().clone(),
        a.inputs().clone(),
        a.outputs().clone(),
        transitions,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quiescent_state_classification() {
        let a = Automaton::builder("q", Kind::Iots)
            .inputs(["a"])
            .outputs(["b"])
            .initial(["s0"])
            .trans("s0", "a", "s0") // inputs only: quiescent
            .trans("s1", "tau", "s2") // tau disqualifies
            .trans("s1", "a", "s1")
            .trans("s2", "a", "s2")
            .trans("s2", "delta", "s2") // delta does not disqualify
            .build()
            .unwrap();
        let q = quiescent_states(&a);
        assert!(q.contains("s0"));
        assert!(!q.contains("s1"));
        assert!(q.contains("s2"));
    }

    fn atm() -> Automaton {
        Automaton::builder("atm", Kind::Iots)
            .inputs(["amount", "card"])
            .outputs(["money"])
            .initial(["s0"])
            .trans("s0", "amount", "s0")
            .trans("s0", "card", "s1")
            .trans("s1", "amount", "s3")
            .trans("s1", "card", "s1")
            .trans("s3", "amount", "s3")
            .trans("s3", "card", "s3")
            .trans("s3", "money", "s0")
            .build()
            .unwrap()
    }

    #[test]
    fn deltafy_adds_loops_to_quiescent_states_only() {
        let a = atm();
        let d = deltafy(&a, DeltafyMode::Strict).unwrap();
        assert_eq!(d.kind(), Kind::Qts);
        let loop_at = |s: &str| {
            d.transitions()
                .contains(&Transition::new(s, Label::Quiescence, s))
        };
        assert!(loop_at("s0"));
        assert!(loop_at("s1"));
        assert!(!loop_at("s3")); // about to emit money: not quiescent
    }

    #[test]
    fn deltafy_is_idempotent_structurally() {
        let a = atm();
        let once = deltafy(&a, DeltafyMode::Strict).unwrap();
        let twice = deltafy(&once, DeltafyMode::Strict).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn deltafication_of_delta_free_iots_is_a_valid_qts() {
        let d = deltafy(&atm(), DeltafyMode::Strict).unwrap();
        let report = check_rules(&d);
        assert!(report.is_valid_qts());
        assert!(report.holds(Rule::C1));
    }

    #[test]
    fn c1_vacuous_without_delta() {
        let outcome = check_condition_c1(&atm());
        assert!(outcome.holds);
    }

    #[test]
    fn primed_rules_hold_after_deltafication() {
        let d = deltafy(&atm(), DeltafyMode::Strict).unwrap();
        let report = check_rules(&d);
        assert!(report.holds(Rule::R3Prime));
        assert!(report.holds(Rule::R4Prime));
    }
}
