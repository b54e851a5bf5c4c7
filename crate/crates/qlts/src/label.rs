//! Transition labels and visible actions.
//!
//! A transition carries a [`Label`]: a named input, a named output, the
//! internal action `tau`, or the quiescence observation `delta`. The tokens
//! `tau` and `delta` are reserved and can never be declared as input or
//! output names.
//!
//! Traces record [`Action`]s instead of labels: the input/output
//! classification belongs to an automaton's alphabet, not to the observed
//! name, so two automata that disagree on the direction of a shared name
//! still produce comparable traces.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// Reserved token for the internal action.
pub const TAU: &str = "tau";
/// Reserved token for the quiescence observation.
pub const DELTA: &str = "delta";

/// Returns true if `name` may not be declared as an input or output label.
pub fn is_reserved(name: &str) -> bool {
    name == TAU || name == DELTA
}

/// A transition label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// An environment-initiated action (`a?`).
    Input(String),
    /// A system-initiated action (`a!`).
    Output(String),
    /// The internal action `tau`; never observable in traces.
    Internal,
    /// The quiescence observation `delta`; output-like and observable.
    Quiescence,
}

impl Label {
    /// The text-format token for this label.
    pub fn token(&self) -> &str {
        match self {
            Label::Input(n) | Label::Output(n) => n,
            Label::Internal => TAU,
            Label::Quiescence => DELTA,
        }
    }

    /// True for inputs, outputs and `delta`; false for `tau`.
    pub fn is_visible(&self) -> bool {
        !matches!(self, Label::Internal)
    }

    /// True for outputs and `delta` (the observations a tester may receive).
    pub fn is_output_like(&self) -> bool {
        matches!(self, Label::Output(_) | Label::Quiescence)
    }

    /// The trace action this label contributes, or `None` for `tau`.
    pub fn action(&self) -> Option<Action> {
        match self {
            Label::Input(n) | Label::Output(n) => Some(Action::Name(n.clone())),
            Label::Quiescence => Some(Action::Delta),
            Label::Internal => None,
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Label::Input(_) => 0,
            Label::Output(_) => 1,
            Label::Quiescence => 2,
            Label::Internal => 3,
        }
    }
}

// Sort by token first so that serialised transition lines come out in plain
// lexicographic order; the kind rank only breaks ties across automata.
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.token()
            .cmp(other.token())
            .then(self.kind_rank().cmp(&other.kind_rank()))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A visible trace element: a named action or the quiescence observation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum Action {
    Name(String),
    Delta,
}

impl Action {
    pub fn name(n: impl Into<String>) -> Self {
        let n = n.into();
        debug_assert!(!is_reserved(&n), "reserved token used as action name");
        Action::Name(n)
    }

    pub fn token(&self) -> &str {
        match self {
            Action::Name(n) => n,
            Action::Delta => DELTA,
        }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Action::Delta)
    }
}

impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        self.token().cmp(other.token())
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl From<Action> for String {
    fn from(a: Action) -> String {
        a.token().to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_order_is_token_order() {
        let mut labels = vec![
            Label::Quiescence,
            Label::Output("b".into()),
            Label::Input("a".into()),
            Label::Internal,
        ];
        labels.sort();
        let tokens: Vec<&str> = labels.iter().map(Label::token).collect();
        assert_eq!(tokens, vec!["a", "b", "delta", "tau"]);
    }

    #[test]
    fn tau_contributes_no_action() {
        assert_eq!(Label::Internal.action(), None);
        assert_eq!(Label::Quiescence.action(), Some(Action::Delta));
    }

    #[test]
    fn reserved_tokens() {
        assert!(is_reserved("tau"));
        assert!(is_reserved("delta"));
        assert!(!is_reserved("a"));
    }
}
