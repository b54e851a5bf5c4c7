//! The three automaton transformations: determinisation, parallel
//! composition and action hiding.
//!
//! All three materialise only the reachable part of their result and
//! synthesise canonical state names: `{s1,s2}` for macro-states (members
//! sorted) and `(s,t)` for product pairs. Construction is eager; the
//! automata this crate targets are desk-scale.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automaton::{Automaton, Kind, Transition};
use crate::label::{Action, Label, DELTA};
use crate::nav::{MacroId, Nav};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    /// Parallel composition requires disjoint output alphabets.
    #[error("output alphabets overlap on {{{}}}", .0.join(", "))]
    OutputOverlap(Vec<String>),
    /// Both operands must be of the same kind.
    #[error("cannot compose a {0} with a {1}")]
    KindMismatch(Kind, Kind),
    /// Hiding is restricted to declared outputs.
    #[error("`{0}` is not an output label")]
    NotAnOutput(String),
    /// The quiescence observation cannot be hidden.
    #[error("delta cannot be hidden")]
    DeltaNotHideable,
    /// Hiding would create a cycle of internal transitions.
    #[error("hiding introduces divergence: tau cycle [{}]", .0.join(","))]
    DivergenceIntroduced(Vec<String>),
    /// A synthesised state name collided with another one.
    #[error("synthesised state name `{0}` is ambiguous")]
    StateNameClash(String),
}

fn macro_name(members: &std::collections::BTreeSet<String>) -> String {
    let mut s = String::from("{");
    for (i, member) in members.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(member);
    }
    s.push('}');
    s
}

fn pair_name(s: &str, t: &str) -> String {
    format!("({s},{t})")
}

/// Subset construction.
///
/// Macro-states are the reachable non-empty subsets of the input's states;
/// the initial macro-state is the `tau`-closure of the initial set, so the
/// result is `tau`-free, deterministic and trace equivalent to the input.
/// `delta` is treated like any other visible label.
pub fn determinise(a: &Automaton) -> Automaton {
    let nav = Nav::new(a);
    let start = nav.start(a);

    let mut names: BTreeMap<MacroId, String> = BTreeMap::new();
    let mut transitions: BTreeSet<Transition> = BTreeSet::new();
    let mut queue: VecDeque<MacroId> = VecDeque::new();
    names.insert(start, macro_name(&nav.member_names(start)));
    queue.push_back(start);

    while let Some(set) = queue.pop_front() {
        let src = names[&set].clone();
        for action in nav.enabled(set).iter() {
            let Some(next) = nav.step(set, action) else {
                continue;
            };
            if !names.contains_key(&next) {
                names.insert(next, macro_name(&nav.member_names(next)));
                queue.push_back(next);
            }
            let label = match action {
                Action::Delta => Label::Quiescence,
                Action::Name(n) if a.inputs().contains(n) => Label::Input(n.clone()),
                Action::Name(n) => Label::Output(n.clone()),
            };
            transitions.insert(Transition::new(src.clone(), label, names[&next].clone()));
        }
    }

    let states: BTreeSet<String> = names.values().cloned().collect();
    debug_assert_eq!(states.len(), names.len(), "macro-state names must be unique");
    let initial: BTreeSet<String> = [names[&start].clone()].into();
    Automaton::from_parts(
        a.name().to_owned(),
        a.kind(),
        states,
        initial,
        a.inputs().clone(),
        a.outputs().clone(),
        transitions,
    )
}

/// Parallel composition with synchronisation on shared inputs,
/// complementary input/output pairs and `delta`.
///
/// `delta` transitions never interleave: quiescence of the composition is
/// only observable when both components are quiescent simultaneously. `tau`
/// and non-shared actions interleave. Only reachable product states are
/// materialised.
pub fn parallel(a: &Automaton, b: &Automaton) -> Result<Automaton, OpError> {
    let overlap: Vec<String> = a.outputs().intersection(b.outputs()).cloned().collect();
    if !overlap.is_empty() {
        return Err(OpError::OutputOverlap(overlap));
    }
    if a.kind() != b.kind() {
        return Err(OpError::KindMismatch(a.kind(), b.kind()));
    }

    let all_outputs: BTreeSet<String> = a.outputs().union(b.outputs()).cloned().collect();
    let inputs: BTreeSet<String> = a
        .inputs()
        .union(b.inputs())
        .filter(|n| !all_outputs.contains(*n))
        .cloned()
        .collect();

    let label_in_b = |n: &str| b.inputs().contains(n) || b.outputs().contains(n);
    let label_in_a = |n: &str| a.inputs().contains(n) || a.outputs().contains(n);

    let mut states: BTreeSet<String> = BTreeSet::new();
    let mut transitions: BTreeSet<Transition> = BTreeSet::new();
    let mut queue: VecDeque<(String, String)> = VecDeque::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut initial: BTreeSet<String> = BTreeSet::new();

    for s in a.initial() {
        for t in b.initial() {
            let pair = (s.clone(), t.clone());
            initial.insert(pair_name(s, t));
            if seen.insert(pair.clone()) {
                queue.push_back(pair);
            }
        }
    }

    while let Some((s, t)) = queue.pop_front() {
        let src = pair_name(&s, &t);
        states.insert(src.clone());
        let push = |label: Label,
                        s2: String,
                        t2: String,
                        transitions: &mut BTreeSet<Transition>,
                        queue: &mut VecDeque<(String, String)>,
                        seen: &mut BTreeSet<(String, String)>| {
            let dst = pair_name(&s2, &t2);
            transitions.insert(Transition::new(src.clone(), label, dst));
            if seen.insert((s2.clone(), t2.clone())) {
                queue.push_back((s2, t2));
            }
        };

        for ta in a.outgoing(&s) {
            match &ta.label {
                Label::Internal => {
                    push(Label::Internal, ta.dst.clone(), t.clone(), &mut transitions, &mut queue, &mut seen);
                }
                Label::Quiescence => {
                    for tb in b.outgoing(&t) {
                        if tb.label == Label::Quiescence {
                            push(Label::Quiescence, ta.dst.clone(), tb.dst.clone(), &mut transitions, &mut queue, &mut seen);
                        }
                    }
                }
                Label::Input(n) | Label::Output(n) => {
                    if label_in_b(n) {
                        // Shared name: synchronise with every matching move of b.
                        for tb in b.outgoing(&t) {
                            if tb.label.token() == n && tb.label.is_visible() {
                                let both_inputs = matches!(ta.label, Label::Input(_))
                                    && matches!(tb.label, Label::Input(_));
                                let label = if both_inputs {
                                    Label::Input(n.clone())
                                } else {
                                    Label::Output(n.clone())
                                };
                                push(label, ta.dst.clone(), tb.dst.clone(), &mut transitions, &mut queue, &mut seen);
                            }
                        }
                    } else {
                        push(ta.label.clone(), ta.dst.clone(), t.clone(), &mut transitions, &mut queue, &mut seen);
                    }
                }
            }
        }
        for tb in b.outgoing(&t) {
            match &tb.label {
                Label::Internal => {
                    push(Label::Internal, s.clone(), tb.dst.clone(), &mut transitions, &mut queue, &mut seen);
                }
                Label::Quiescence => {} // synchronising case handled above
                Label::Input(n) | Label::Output(n) => {
                    if !label_in_a(n) {
                        push(tb.label.clone(), s.clone(), tb.dst.clone(), &mut transitions, &mut queue, &mut seen);
                    }
                }
            }
        }
    }

    debug_assert_eq!(states.len(), seen.len(), "pair names must be unique");
    Ok(Automaton::from_parts(
        format!("({}||{})", a.name(), b.name()),
        a.kind(),
        states,
        initial,
        inputs,
        all_outputs,
        transitions,
    ))
}

/// Renames the outputs in `hidden` to `tau` and shrinks the output alphabet.
///
/// `delta` is not an output proper and cannot be hidden. Hiding must not
/// create divergence; a resulting `tau` cycle is an error carrying the
/// witness cycle.
pub fn hide<I, S>(a: &Automaton, hidden: I) -> Result<Automaton, OpError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let hidden: BTreeSet<String> = hidden.into_iter().map(Into::into).collect();
    for h in &hidden {
        if h == DELTA {
            return Err(OpError::DeltaNotHideable);
        }
        if !a.outputs().contains(h) {
            return Err(OpError::NotAnOutput(h.clone()));
        }
    }

    let transitions: BTreeSet<Transition> = a
        .transitions()
        .iter()
        .map(|t| match &t.label {
            Label::Output(n) if hidden.contains(n) => {
                Transition::new(t.src.clone(), Label::Internal, t.dst.clone())
            }
            _ => t.clone(),
        })
        .collect();

    let outputs: BTreeSet<String> = a.outputs().difference(&hidden).cloned().collect();
    let result = Automaton::from_parts(
        a.name().to_owned(),
        a.kind(),
        a.states().clone(),
        a.initial().clone(),
        a.inputs().clone(),
        outputs,
        transitions,
    );
    if let Some(cycle) = result.tau_cycle() {
        return Err(OpError::DivergenceIntroduced(cycle));
    }
    Ok(result)
}
