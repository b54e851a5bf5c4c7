//! Shared fixtures for unit tests.

use crate::automaton::{Automaton, Kind};

/// Specification used by the conformance and testing unit tests: initially
/// quiescent or outputting a!/b!, and after input c? it must produce a!.
pub(crate) fn spec() -> Automaton {
    Automaton::builder("spec", Kind::Qts)
        .inputs(["c"])
        .outputs(["a", "b", "d"])
        .initial(["p0"])
        .trans("p0", "a", "p1")
        .trans("p0", "b", "p1")
        .trans("p0", "c", "p2")
        .trans("p0", "delta", "q0")
        .trans("p1", "c", "p1")
        .trans("p1", "delta", "p1")
        .trans("p2", "a", "p1")
        .trans("p2", "c", "p2")
        .trans("q0", "c", "p2")
        .trans("q0", "delta", "q0")
        .build()
        .unwrap()
}

/// The same specification except that c? leads to a quiescent state:
/// unexpectedly quiescent after the trace c.
pub(crate) fn impl_quiescent_after_c() -> Automaton {
    Automaton::builder("impl4", Kind::Qts)
        .inputs(["c"])
        .outputs(["a", "b", "d"])
        .initial(["p0"])
        .trans("p0", "a", "p1")
        .trans("p0", "b", "p1")
        .trans("p0", "c", "p2")
        .trans("p0", "delta", "q0")
        .trans("p1", "c", "p1")
        .trans("p1", "delta", "p1")
        .trans("p2", "c", "p2")
        .trans("p2", "delta", "p2")
        .trans("q0", "c", "p2")
        .trans("q0", "delta", "q0")
        .build()
        .unwrap()
}

/// The specification plus an unexpected d! from the initial state.
pub(crate) fn impl_extra_output() -> Automaton {
    Automaton::builder("impl3", Kind::Qts)
        .inputs(["c"])
        .outputs(["a", "b", "d"])
        .initial(["p0"])
        .trans("p0", "a", "p1")
        .trans("p0", "b", "p1")
        .trans("p0", "c", "p2")
        .trans("p0", "d", "p1")
        .trans("p0", "delta", "q0")
        .trans("p1", "c", "p1")
        .trans("p1", "delta", "p1")
        .trans("p2", "a", "p1")
        .trans("p2", "c", "p2")
        .trans("q0", "c", "p2")
        .trans("q0", "delta", "q0")
        .build()
        .unwrap()
}
