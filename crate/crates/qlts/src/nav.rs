//! Weak-transition navigation over sets of states.
//!
//! A [`Nav`] answers "where can this set of states go on this visible action,
//! absorbing `tau` steps". States are interned to integer ids and reachable
//! state sets (macro-states) are interned as well, so the decision
//! procedures built on top work on small integer keys. It is the single
//! engine behind determinisation, bounded trace enumeration and the exact
//! inclusion/conformance decisions.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::automaton::Automaton;
use crate::label::{Action, Label};

/// An interned set of state ids.
pub(crate) type IdSet = BTreeSet<u32>;
/// Handle of an interned macro-state.
pub(crate) type MacroId = u32;

pub(crate) struct Nav<'a> {
    names: Vec<&'a str>,
    index: HashMap<&'a str, u32>,
    tau: Vec<Vec<u32>>,
    visible: Vec<BTreeMap<Action, Vec<u32>>>,
    macros: RefCell<Vec<Rc<IdSet>>>,
    macro_index: RefCell<HashMap<Rc<IdSet>, MacroId>>,
    step_memo: RefCell<HashMap<(MacroId, Action), Option<MacroId>>>,
    enabled_memo: RefCell<HashMap<MacroId, Rc<BTreeSet<Action>>>>,
}

impl<'a> Nav<'a> {
    pub fn new(a: &'a Automaton) -> Self {
        let names: Vec<&str> = a.states().iter().map(String::as_str).collect();
        let index: HashMap<&str, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (*n, i as u32))
            .collect();
        let mut tau = vec![Vec::new(); names.len()];
        let mut visible: Vec<BTreeMap<Action, Vec<u32>>> = vec![BTreeMap::new(); names.len()];
        for t in a.transitions() {
            let src = index[t.src.as_str()];
            let dst = index[t.dst.as_str()];
            match &t.label {
                Label::Internal => tau[src as usize].push(dst),
                l => visible[src as usize]
                    .entry(l.action().expect("visible label"))
                    .or_default()
                    .push(dst),
            }
        }
        Nav {
            names,
            index,
            tau,
            visible,
            macros: RefCell::new(Vec::new()),
            macro_index: RefCell::new(HashMap::new()),
            step_memo: RefCell::new(HashMap::new()),
            enabled_memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn state_id(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    fn intern(&self, set: IdSet) -> MacroId {
        let set = Rc::new(set);
        if let Some(id) = self.macro_index.borrow().get(&set) {
            return *id;
        }
        let mut macros = self.macros.borrow_mut();
        let id = macros.len() as MacroId;
        macros.push(Rc::clone(&set));
        self.macro_index.borrow_mut().insert(set, id);
        id
    }

    pub fn members(&self, id: MacroId) -> Rc<IdSet> {
        Rc::clone(&self.macros.borrow()[id as usize])
    }

    /// Member state names, lexicographically sorted.
    pub fn member_names(&self, id: MacroId) -> BTreeSet<String> {
        self.members(id)
            .iter()
            .map(|i| self.names[*i as usize].to_owned())
            .collect()
    }

    fn closure(&self, seed: impl IntoIterator<Item = u32>) -> IdSet {
        let mut result: IdSet = seed.into_iter().collect();
        let mut frontier: Vec<u32> = result.iter().copied().collect();
        while let Some(s) = frontier.pop() {
            for &t in &self.tau[s as usize] {
                if result.insert(t) {
                    frontier.push(t);
                }
            }
        }
        result
    }

    /// Interns the `tau`-closure of the given states (by name).
    pub fn macro_of_names<I, S>(&self, names: I) -> MacroId
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let seed: Vec<u32> = names
            .into_iter()
            .map(|n| {
                self.state_id(n.as_ref())
                    .expect("state belongs to the automaton")
            })
            .collect();
        self.intern(self.closure(seed))
    }

    /// The closed initial macro-state of the underlying automaton.
    pub fn start(&self, a: &Automaton) -> MacroId {
        self.macro_of_names(a.initial().iter())
    }

    /// One weak step; `None` when the action is not enabled.
    pub fn step(&self, from: MacroId, action: &Action) -> Option<MacroId> {
        if let Some(hit) = self.step_memo.borrow().get(&(from, action.clone())) {
            return *hit;
        }
        let mut after: IdSet = IdSet::new();
        for s in self.members(from).iter() {
            if let Some(targets) = self.visible[*s as usize].get(action) {
                after.extend(targets.iter().copied());
            }
        }
        let result = if after.is_empty() {
            None
        } else {
            Some(self.intern(self.closure(after)))
        };
        self.step_memo
            .borrow_mut()
            .insert((from, action.clone()), result);
        result
    }

    /// The visible actions enabled somewhere in the macro-state.
    pub fn enabled(&self, from: MacroId) -> Rc<BTreeSet<Action>> {
        if let Some(hit) = self.enabled_memo.borrow().get(&from) {
            return Rc::clone(hit);
        }
        let mut actions = BTreeSet::new();
        for s in self.members(from).iter() {
            actions.extend(self.visible[*s as usize].keys().cloned());
        }
        let actions = Rc::new(actions);
        self.enabled_memo
            .borrow_mut()
            .insert(from, Rc::clone(&actions));
        actions
    }

    /// The enabled actions that are outputs or `delta` for `a`'s alphabet.
    pub fn enabled_output_like(&self, a: &Automaton, from: MacroId) -> BTreeSet<Action> {
        self.enabled(from)
            .iter()
            .filter(|act| match act {
                Action::Delta => true,
                Action::Name(n) => a.outputs().contains(n),
            })
            .cloned()
            .collect()
    }

    /// Runs a whole trace; `None` as soon as an action is refused.
    pub fn run<'t>(
        &self,
        from: MacroId,
        trace: impl IntoIterator<Item = &'t Action>,
    ) -> Option<MacroId> {
        let mut cur = from;
        for action in trace {
            cur = self.step(cur, action)?;
        }
        Some(cur)
    }
}

/// Decides trace inclusion between two navigated views by breadth-first
/// search over macro-state pairs, expanding actions in lexicographic order
/// so counterexamples are shortest and lexicographically least.
///
/// Pairs proven violation-free are remembered across calls, so checking
/// inclusion from many start pairs over the same pair of views (the rule
/// checks do exactly that) costs one exploration of the shared pair space.
pub(crate) struct InclusionChecker<'l, 'r, 'a, 'b> {
    left: &'l Nav<'a>,
    right: &'r Nav<'b>,
    same_nav: bool,
    safe: std::collections::HashSet<(MacroId, MacroId)>,
}

impl<'l, 'r, 'a, 'b> InclusionChecker<'l, 'r, 'a, 'b> {
    pub fn new(left: &'l Nav<'a>, right: &'r Nav<'b>) -> Self {
        let same_nav = std::ptr::eq(
            left as *const Nav as *const (),
            right as *const Nav as *const (),
        );
        InclusionChecker {
            left,
            right,
            same_nav,
            safe: std::collections::HashSet::new(),
        }
    }

    fn trivially_safe(&self, l: MacroId, r: MacroId) -> bool {
        // Identical views can never diverge from each other.
        (self.same_nav && l == r) || self.safe.contains(&(l, r))
    }

    /// `None` when every trace of the left view is a trace of the right
    /// view; otherwise the minimal missing trace.
    pub fn check(&mut self, start_l: MacroId, start_r: MacroId) -> Option<crate::traces::Trace> {
        use crate::traces::Trace;
        use std::collections::{HashSet, VecDeque};

        if self.trivially_safe(start_l, start_r) {
            return None;
        }
        let mut visited: HashSet<(MacroId, MacroId)> = HashSet::new();
        let mut queue: VecDeque<(MacroId, MacroId, Trace)> = VecDeque::new();
        visited.insert((start_l, start_r));
        queue.push_back((start_l, start_r, Trace::empty()));
        while let Some((l, r, trace)) = queue.pop_front() {
            for action in self.left.enabled(l).iter() {
                let Some(next_l) = self.left.step(l, action) else {
                    continue;
                };
                let Some(next_r) = self.right.step(r, action) else {
                    return Some(trace.extended(action.clone()));
                };
                if self.trivially_safe(next_l, next_r) {
                    continue;
                }
                if visited.insert((next_l, next_r)) {
                    queue.push_back((next_l, next_r, trace.extended(action.clone())));
                }
            }
        }
        // The whole reachable pair space is violation-free; remember it.
        self.safe.extend(visited);
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Kind;

    #[test]
    fn closure_and_step_absorb_tau() {
        let a = Automaton::builder("t", Kind::Lts)
            .outputs(["b"])
            .initial(["s0"])
            .trans("s0", "tau", "s1")
            .trans("s1", "b", "s2")
            .build()
            .unwrap();
        let nav = Nav::new(&a);
        let start = nav.start(&a);
        assert_eq!(
            nav.member_names(start),
            ["s0", "s1"].iter().map(|s| s.to_string()).collect()
        );
        let after = nav.step(start, &Action::name("b")).unwrap();
        assert_eq!(
            nav.member_names(after),
            ["s2"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(nav.step(after, &Action::name("b")), None);
    }

    #[test]
    fn inclusion_checker_reuses_safe_pairs() {
        let a = Automaton::builder("t", Kind::Iots)
            .inputs(["a"])
            .initial(["s0"])
            .trans("s0", "a", "s1")
            .trans("s1", "a", "s1")
            .build()
            .unwrap();
        let nav = Nav::new(&a);
        let mut checker = InclusionChecker::new(&nav, &nav);
        let s0 = nav.macro_of_names(["s0"]);
        let s1 = nav.macro_of_names(["s1"]);
        assert_eq!(checker.check(s1, s0), None);
        assert!(!checker.safe.is_empty());
        assert_eq!(checker.check(s1, s0), None);
    }
}
