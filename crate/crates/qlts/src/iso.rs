//! Structural equality of automata up to state renaming.
//!
//! Two automata are isomorphic when a bijection on states maps initial
//! states onto initial states and preserves every transition (including
//! `tau` and `delta`) in both directions. The commutativity checks in this
//! crate always know the candidate bijection (state sets are preserved by
//! the operations involved), so [`isomorphic_with_hint`] is the fast path;
//! the backtracking search in [`isomorphic`] is meant for ad-hoc comparisons
//! of desk-scale automata.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automaton::Automaton;
use crate::label::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),
}

fn check_alphabets(a: &Automaton, b: &Automaton) -> Result<(), IsoError> {
    if a.inputs() != b.inputs() {
        return Err(IsoError::AlphabetMismatch("input sets differ".into()));
    }
    if a.outputs() != b.outputs() {
        return Err(IsoError::AlphabetMismatch("output sets differ".into()));
    }
    Ok(())
}

type EdgeMap<'a> = BTreeMap<(&'a str, &'a str), BTreeSet<&'a Label>>;

fn edge_map(a: &Automaton) -> EdgeMap<'_> {
    let mut m: EdgeMap = BTreeMap::new();
    for t in a.transitions() {
        m.entry((t.src.as_str(), t.dst.as_str()))
            .or_default()
            .insert(&t.label);
    }
    m
}

/// Checks whether the given state map is an isomorphism from `a` to `b`.
fn is_isomorphism(a: &Automaton, b: &Automaton, h: &BTreeMap<String, String>) -> bool {
    if h.len() != a.states().len() || a.states().len() != b.states().len() {
        return false;
    }
    let mut image: BTreeSet<&str> = BTreeSet::new();
    for (s, t) in h {
        if !a.states().contains(s) || !b.states().contains(t) {
            return false;
        }
        if !image.insert(t) {
            return false; // not injective
        }
    }
    let mapped_initial: BTreeSet<&str> = a.initial().iter().map(|s| h[s].as_str()).collect();
    let b_initial: BTreeSet<&str> = b.initial().iter().map(String::as_str).collect();
    if mapped_initial != b_initial {
        return false;
    }
    let edges_b = edge_map(b);
    let mut mapped: EdgeMap = BTreeMap::new();
    for t in a.transitions() {
        mapped
            .entry((h[&t.src].as_str(), h[&t.dst].as_str()))
            .or_default()
            .insert(&t.label);
    }
    mapped == edges_b
}

/// The identity map on `a`'s states, the natural hint whenever an operation
/// preserves state names.
pub fn identity_hint(a: &Automaton) -> BTreeMap<String, String> {
    a.states().iter().map(|s| (s.clone(), s.clone())).collect()
}

/// Checks only the hinted bijection.
pub fn isomorphic_with_hint(
    a: &Automaton,
    b: &Automaton,
    hint: &BTreeMap<String, String>,
) -> Result<bool, IsoError> {
    check_alphabets(a, b)?;
    Ok(is_isomorphism(a, b, hint))
}

/// Searches for an isomorphism by backtracking with degree-signature
/// pruning.
pub fn isomorphic(a: &Automaton, b: &Automaton) -> Result<bool, IsoError> {
    check_alphabets(a, b)?;
    if a.states().len() != b.states().len()
        || a.initial().len() != b.initial().len()
        || a.transitions().len() != b.transitions().len()
    {
        return Ok(false);
    }

    // Signature: initial flag plus per-label out- and in-degrees. States can
    // only map to states with an identical signature.
    type Sig = (bool, Vec<(String, usize)>, Vec<(String, usize)>);
    fn signature(a: &Automaton, s: &str) -> Sig {
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        let mut inc: BTreeMap<String, usize> = BTreeMap::new();
        for t in a.transitions() {
            if t.src == s {
                *out.entry(t.label.token().to_owned()).or_default() += 1;
            }
            if t.dst == s {
                *inc.entry(t.label.token().to_owned()).or_default() += 1;
            }
        }
        (
            a.initial().contains(s),
            out.into_iter().collect(),
            inc.into_iter().collect(),
        )
    }

    let sigs_a: BTreeMap<&str, Sig> = a
        .states()
        .iter()
        .map(|s| (s.as_str(), signature(a, s)))
        .collect();
    let sigs_b: BTreeMap<&str, Sig> = b
        .states()
        .iter()
        .map(|s| (s.as_str(), signature(b, s)))
        .collect();

    let mut candidates: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (s, sig) in &sigs_a {
        let cands: Vec<&str> = sigs_b
            .iter()
            .filter(|(_, sig_b)| *sig_b == sig)
            .map(|(t, _)| *t)
            .collect();
        if cands.is_empty() {
            return Ok(false);
        }
        candidates.insert(s, cands);
    }

    // Most-constrained-first ordering keeps the search shallow.
    let mut order: Vec<&str> = a.states().iter().map(String::as_str).collect();
    order.sort_by_key(|s| candidates[s].len());

    let edges_a = edge_map(a);
    let edges_b = edge_map(b);

    fn consistent(
        s: &str,
        t: &str,
        assigned: &BTreeMap<&str, &str>,
        edges_a: &EdgeMap,
        edges_b: &EdgeMap,
    ) -> bool {
        for (s2, t2) in assigned {
            for ((from_a, to_a), (from_b, to_b)) in
                [((s, *s2), (t, *t2)), ((*s2, s), (*t2, t))]
            {
                if edges_a.get(&(from_a, to_a)) != edges_b.get(&(from_b, to_b)) {
                    return false;
                }
            }
        }
        // Self-loops.
        edges_a.get(&(s, s)) == edges_b.get(&(t, t))
    }

    fn search<'x>(
        idx: usize,
        order: &[&'x str],
        candidates: &BTreeMap<&'x str, Vec<&'x str>>,
        assigned: &mut BTreeMap<&'x str, &'x str>,
        used: &mut BTreeSet<&'x str>,
        edges_a: &EdgeMap,
        edges_b: &EdgeMap,
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        let s = order[idx];
        for &t in &candidates[s] {
            if used.contains(t) || !consistent(s, t, assigned, edges_a, edges_b) {
                continue;
            }
            assigned.insert(s, t);
            used.insert(t);
            if search(idx + 1, order, candidates, assigned, used, edges_a, edges_b) {
                return true;
            }
            assigned.remove(s);
            used.remove(t);
        }
        false
    }

    let mut assigned = BTreeMap::new();
    let mut used = BTreeSet::new();
    let found = search(
        0,
        &order,
        &candidates,
        &mut assigned,
        &mut used,
        &edges_a,
        &edges_b,
    );
    if found {
        let h: BTreeMap<String, String> = assigned
            .iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
        debug_assert!(is_isomorphism(a, b, &h));
    }
    Ok(found)
}
