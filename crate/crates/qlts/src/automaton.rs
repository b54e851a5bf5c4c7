//! The automaton data model.
//!
//! One representation covers plain labelled transition systems (`lts`),
//! input-output transition systems (`iots`) and quiescent transition systems
//! (`qts`); the [`Kind`] flag records which invariants the automaton is
//! expected to satisfy. Automata are immutable after construction: every
//! operation in this crate is a pure function producing a fresh automaton,
//! so values can be shared freely across threads.
//!
//! Structural and kind-specific well-formedness is checked by [`validate`],
//! which reports every violation instead of failing on the first one.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::label::{is_reserved, Action, Label};
use crate::quiescence::{self, Rule, Witness};

/// Which family of invariants an automaton is expected to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lts,
    Iots,
    Qts,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Lts => "lts",
            Kind::Iots => "iots",
            Kind::Qts => "qts",
        }
    }

    pub fn from_str(s: &str) -> Option<Kind> {
        match s {
            "lts" => Some(Kind::Lts),
            "iots" => Some(Kind::Iots),
            "qts" => Some(Kind::Qts),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single transition `src --label--> dst`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: String,
    pub label: Label,
    pub dst: String,
}

impl Transition {
    pub fn new(src: impl Into<String>, label: Label, dst: impl Into<String>) -> Self {
        Transition {
            src: src.into(),
            label,
            dst: dst.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.src, self.label, self.dst)
    }
}

/// A finite transition system with partitioned input/output alphabets and
/// the reserved labels `tau` and `delta`.
///
/// The transition relation is a set: duplicate transitions collapse. All
/// collections are ordered so that iteration, serialisation and derived
/// constructions are deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    kind: Kind,
    states: BTreeSet<String>,
    initial: BTreeSet<String>,
    inputs: BTreeSet<String>,
    outputs: BTreeSet<String>,
    transitions: BTreeSet<Transition>,
}

impl Automaton {
    pub fn builder(name: impl Into<String>, kind: Kind) -> Builder {
        Builder::new(name, kind)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn initial(&self) -> &BTreeSet<String> {
        &self.initial
    }

    pub fn inputs(&self) -> &BTreeSet<String> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<String> {
        &self.outputs
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    /// All transitions leaving `state`.
    pub fn outgoing<'a>(&'a self, state: &'a str) -> impl Iterator<Item = &'a Transition> {
        self.transitions.iter().filter(move |t| t.src == state)
    }

    /// True if any transition carries the `delta` label.
    pub fn has_delta(&self) -> bool {
        self.transitions
            .iter()
            .any(|t| t.label == Label::Quiescence)
    }

    /// Resolves a text-format token against this automaton's alphabet.
    pub fn label_for_token(&self, token: &str) -> Option<Label> {
        match token {
            crate::label::TAU => Some(Label::Internal),
            crate::label::DELTA => Some(Label::Quiescence),
            t if self.inputs.contains(t) => Some(Label::Input(t.to_owned())),
            t if self.outputs.contains(t) => Some(Label::Output(t.to_owned())),
            _ => None,
        }
    }

    /// The visible actions this automaton can ever take part in:
    /// declared inputs and outputs, plus `delta` when present.
    pub fn visible_actions(&self) -> BTreeSet<Action> {
        let mut acts: BTreeSet<Action> = self
            .inputs
            .iter()
            .chain(self.outputs.iter())
            .map(|n| Action::Name(n.clone()))
            .collect();
        if self.has_delta() {
            acts.insert(Action::Delta);
        }
        acts
    }

    /// The same automaton rooted at a different set of initial states.
    pub fn rooted(&self, initial: impl IntoIterator<Item = impl Into<String>>) -> Automaton {
        let initial: BTreeSet<String> = initial.into_iter().map(Into::into).collect();
        debug_assert!(initial.iter().all(|s| self.states.contains(s)));
        Automaton {
            initial,
            ..self.clone()
        }
    }

    /// A copy with a different name; contents are unchanged.
    pub fn renamed(&self, name: impl Into<String>) -> Automaton {
        Automaton {
            name: name.into(),
            ..self.clone()
        }
    }

    pub(crate) fn from_parts(
        name: String,
        kind: Kind,
        states: BTreeSet<String>,
        initial: BTreeSet<String>,
        inputs: BTreeSet<String>,
        outputs: BTreeSet<String>,
        transitions: BTreeSet<Transition>,
    ) -> Automaton {
        Automaton {
            name,
            kind,
            states,
            initial,
            inputs,
            outputs,
            transitions,
        }
    }

    /// True if every state enables every declared input.
    pub fn is_input_enabled(&self) -> bool {
        self.missing_inputs().is_empty()
    }

    /// All (state, input) pairs without an outgoing transition.
    pub fn missing_inputs(&self) -> Vec<(String, String)> {
        let mut missing = Vec::new();
        for s in &self.states {
            for i in &self.inputs {
                let lab = Label::Input(i.clone());
                if !self.outgoing(s).any(|t| t.label == lab) {
                    missing.push((s.clone(), i.clone()));
                }
            }
        }
        missing
    }

    /// Searches the `tau`-edge subgraph for a cycle; returns its states when found.
    pub fn tau_cycle(&self) -> Option<Vec<String>> {
        cycle_in_subgraph(self, |t| t.label == Label::Internal)
    }

    /// True for transition systems with no successor choice: no `tau` steps
    /// and at most one target per (state, visible label).
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() > 1 {
            return false;
        }
        let mut seen: BTreeSet<(&str, &Label)> = BTreeSet::new();
        for t in &self.transitions {
            if t.label == Label::Internal {
                return false;
            }
            if !seen.insert((t.src.as_str(), &t.label)) {
                return false;
            }
        }
        true
    }
}

/// Finds a cycle in the subgraph of transitions satisfying `edge`, DFS with
/// colouring. Returns the cycle's states in traversal order.
fn cycle_in_subgraph(a: &Automaton, edge: impl Fn(&Transition) -> bool) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    use std::collections::BTreeMap;
    let mut colour: BTreeMap<&str, Colour> =
        a.states.iter().map(|s| (s.as_str(), Colour::White)).collect();
    let adj: BTreeMap<&str, Vec<&str>> = a.states.iter().fold(BTreeMap::new(), |mut m, s| {
        let targets = a
            .outgoing(s)
            .filter(|t| edge(t))
            .map(|t| t.dst.as_str())
            .collect();
        m.insert(s.as_str(), targets);
        m
    });

    fn dfs<'a>(
        v: &'a str,
        adj: &BTreeMap<&'a str, Vec<&'a str>>,
        colour: &mut BTreeMap<&'a str, Colour>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        colour.insert(v, Colour::Grey);
        stack.push(v);
        for &w in adj.get(v).into_iter().flatten() {
            match colour.get(w).copied().unwrap_or(Colour::White) {
                Colour::Grey => {
                    let start = stack.iter().position(|&x| x == w).unwrap();
                    return Some(stack[start..].iter().map(|s| s.to_string()).collect());
                }
                Colour::White => {
                    if let Some(c) = dfs(w, adj, colour, stack) {
                        return Some(c);
                    }
                }
                Colour::Black => {}
            }
        }
        stack.pop();
        colour.insert(v, Colour::Black);
        None
    }

    let states: Vec<&str> = a.states.iter().map(String::as_str).collect();
    for s in states {
        if colour[s] == Colour::White {
            let mut stack = Vec::new();
            if let Some(c) = dfs(s, &adj, &mut colour, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

/// Incremental construction of an [`Automaton`].
///
/// States are collected implicitly from transitions and initial declarations;
/// isolated states can be added with [`Builder::state`]. Label tokens in
/// [`Builder::trans`] are resolved against the declared alphabet, with `tau`
/// and `delta` as the reserved spellings.
pub struct Builder {
    name: String,
    kind: Kind,
    inputs: BTreeSet<String>,
    outputs: BTreeSet<String>,
    states: BTreeSet<String>,
    initial: BTreeSet<String>,
    raw_transitions: Vec<(String, String, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("transition label `{0}` is not a declared input or output")]
    UnknownLabel(String),
    #[error("label `{0}` is declared as both input and output")]
    Overlap(String),
    #[error("`{0}` is reserved and cannot be declared as a label")]
    Reserved(String),
}

impl Builder {
    fn new(name: impl Into<String>, kind: Kind) -> Self {
        Builder {
            name: name.into(),
            kind,
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
            states: BTreeSet::new(),
            initial: BTreeSet::new(),
            raw_transitions: Vec::new(),
        }
    }

    pub fn inputs<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.inputs.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn outputs<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.outputs.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn state(mut self, id: impl Into<String>) -> Self {
        self.states.insert(id.into());
        self
    }

    pub fn initial<I: IntoIterator<Item = S>, S: Into<String>>(mut self, ids: I) -> Self {
        for id in ids {
            let id = id.into();
            self.states.insert(id.clone());
            self.initial.insert(id);
        }
        self
    }

    /// Adds `src --token--> dst`, where `token` is a declared label name,
    /// `tau`, or `delta`.
    pub fn trans(
        mut self,
        src: impl Into<String>,
        token: impl Into<String>,
        dst: impl Into<String>,
    ) -> Self {
        let (src, dst) = (src.into(), dst.into());
        self.states.insert(src.clone());
        self.states.insert(dst.clone());
        self.raw_transitions.push((src, token.into(), dst));
        self
    }

    pub fn build(self) -> Result<Automaton, BuildError> {
        for n in self.inputs.iter().chain(self.outputs.iter()) {
            if is_reserved(n) {
                return Err(BuildError::Reserved(n.clone()));
            }
        }
        if let Some(n) = self.inputs.intersection(&self.outputs).next() {
            return Err(BuildError::Overlap(n.clone()));
        }
        let mut transitions = BTreeSet::new();
        for (src, token, dst) in self.raw_transitions {
            let label = match token.as_str() {
                crate::label::TAU => Label::Internal,
                crate::label::DELTA => Label::Quiescence,
                t if self.inputs.contains(t) => Label::Input(token.clone()),
                t if self.outputs.contains(t) => Label::Output(token.clone()),
                _ => return Err(BuildError::UnknownLabel(token)),
            };
            transitions.insert(Transition { src, label, dst });
        }
        Ok(Automaton {
            name: self.name,
            kind: self.kind,
            states: self.states,
            initial: self.initial,
            inputs: self.inputs,
            outputs: self.outputs,
            transitions,
        })
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// A single well-formedness violation with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum Violation {
    /// A state misses an outgoing transition for a declared input.
    InputNotEnabled { state: String, input: String },
    /// A cycle of `tau` transitions.
    Divergent { cycle: Vec<String> },
    /// A name declared as both input and output.
    AlphabetOverlap { name: String },
    /// A reserved token (`tau`/`delta`) declared or used where forbidden.
    ReservedLabel { name: String, context: String },
    /// A transition endpoint or initial state outside the state set.
    DanglingState { state: String, context: String },
    /// The initial-state set is empty.
    EmptyInitial,
    /// A quiescence rule failed (only reported when validating as `qts`).
    RuleViolated { rule: Rule, witnesses: Vec<Witness> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InputNotEnabled { state, input } => {
                write!(f, "InputNotEnabled: state {state} has no {input}? transition")
            }
            Violation::Divergent { cycle } => {
                write!(f, "Divergent: tau cycle [{}]", cycle.join(","))
            }
            Violation::AlphabetOverlap { name } => {
                write!(f, "AlphabetOverlap: {name} is both input and output")
            }
            Violation::ReservedLabel { name, context } => {
                write!(f, "ReservedLabel: {name} {context}")
            }
            Violation::DanglingState { state, context } => {
                write!(f, "DanglingState: {state} in {context}")
            }
            Violation::EmptyInitial => write!(f, "EmptyInitial: no initial states"),
            Violation::RuleViolated { rule, witnesses } => {
                write!(f, "RuleViolated: {rule}")?;
                for w in witnesses {
                    write!(f, "; {w}")?;
                }
                Ok(())
            }
        }
    }
}

/// The outcome of [`validate`]: `ok` iff no violations were found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Checks every invariant the requested kind demands and reports all
/// violations. Nothing is thrown: an invalid automaton yields a report, not
/// an error.
///
/// - all kinds: referential integrity, non-empty initial set, disjoint
///   alphabets, reserved names;
/// - `lts`: no `delta` transitions;
/// - `iots`/`qts`: input-enabledness and convergence;
/// - `qts`: additionally rules R1-R4 (via [`quiescence::check_rules`]),
///   skipped when the structure is already broken.
pub fn validate(a: &Automaton, kind: Kind) -> ValidationReport {
    let mut violations = Vec::new();

    if a.initial.is_empty() {
        violations.push(Violation::EmptyInitial);
    }
    for s in &a.initial {
        if !a.states.contains(s) {
            violations.push(Violation::DanglingState {
                state: s.clone(),
                context: "initial declaration".into(),
            });
        }
    }
    for t in &a.transitions {
        for (endpoint, role) in [(&t.src, "transition source"), (&t.dst, "transition target")] {
            if !a.states.contains(endpoint) {
                violations.push(Violation::DanglingState {
                    state: endpoint.clone(),
                    context: format!("{role} of {t}"),
                });
            }
        }
    }
    for n in a.inputs.intersection(&a.outputs) {
        violations.push(Violation::AlphabetOverlap { name: n.clone() });
    }
    for n in a.inputs.iter().chain(a.outputs.iter()) {
        if is_reserved(n) {
            violations.push(Violation::ReservedLabel {
                name: n.clone(),
                context: "declared in the alphabet".into(),
            });
        }
    }

    if kind == Kind::Lts {
        for t in &a.transitions {
            if t.label == Label::Quiescence {
                violations.push(Violation::ReservedLabel {
                    name: crate::label::DELTA.into(),
                    context: format!("not allowed in an lts ({t})"),
                });
            }
        }
    }

    if matches!(kind, Kind::Iots | Kind::Qts) {
        for (state, input) in a.missing_inputs() {
            violations.push(Violation::InputNotEnabled { state, input });
        }
        if let Some(cycle) = a.tau_cycle() {
            violations.push(Violation::Divergent { cycle });
        }
    }

    if kind == Kind::Qts && violations.is_empty() {
        let report = quiescence::check_rules(a);
        for rule in [Rule::R1, Rule::R2, Rule::R3, Rule::R4] {
            let outcome = &report.results[&rule];
            if !outcome.holds {
                violations.push(Violation::RuleViolated {
                    rule,
                    witnesses: outcome.witnesses.clone(),
                });
            }
        }
    }

    ValidationReport { violations }
}

// ---------------------------------------------------------------------------
// Demonic completion
// ---------------------------------------------------------------------------

/// Canonical name of the all-accepting sink introduced by completion.
pub const SINK_STATE: &str = "_sink";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompletionError {
    /// Completion is only defined for deterministic systems.
    #[error("automaton is nondeterministic ({0}); demonic completion is undefined")]
    NondeterministicInput(String),
    /// A user state already uses the canonical sink name.
    #[error("state name `{0}` collides with the completion sink")]
    SinkNameTaken(String),
}

/// Makes a deterministic automaton input-enabled by routing every missing
/// input to a fresh sink state that accepts everything.
///
/// Already input-enabled automata are returned unchanged, which makes the
/// construction idempotent. The sink carries a self-loop for every declared
/// input and output.
pub fn demonic_completion(a: &Automaton) -> Result<Automaton, CompletionError> {
    let missing = a.missing_inputs();
    if missing.is_empty() {
        return Ok(a.clone());
    }
    if !a.is_deterministic() {
        let why = if a.initial.len() > 1 {
            "multiple initial states".to_string()
        } else if a.transitions.iter().any(|t| t.label == Label::Internal) {
            "contains tau transitions".to_string()
        } else {
            "a state has two targets for one label".to_string()
        };
        return Err(CompletionError::NondeterministicInput(why));
    }
    if a.states.contains(SINK_STATE) {
        return Err(CompletionError::SinkNameTaken(SINK_STATE.into()));
    }

    let mut states = a.states.clone();
    states.insert(SINK_STATE.into());
    let mut transitions = a.transitions.clone();
    for i in &a.inputs {
        transitions.insert(Transition::new(SINK_STATE, Label::Input(i.clone()), SINK_STATE));
    }
    for o in &a.outputs {
        transitions.insert(Transition::new(SINK_STATE, Label::Output(o.clone()), SINK_STATE));
    }
    for (state, input) in missing {
        transitions.insert(Transition::new(state, Label::Input(input), SINK_STATE));
    }

    Ok(Automaton {
        name: a.name.clone(),
        kind: Kind::Iots,
        states,
        initial: a.initial.clone(),
        inputs: a.inputs.clone(),
        outputs: a.outputs.clone(),
        transitions,
    })
}
