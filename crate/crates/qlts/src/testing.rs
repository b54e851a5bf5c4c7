//! Test-case derivation from a specification and execution against a
//! simulated system under test.
//!
//! A test case is a finite tree: at every point the tester either stimulates
//! the system with an input, observes what the system produces (an output or
//! quiescence), or stops with a pass. Observation nodes are total over all
//! outputs plus `delta`; observations the specification does not allow at
//! that point map to an immediate fail. Generated tests are sound by
//! construction: a conforming implementation can never reach a fail edge.
//!
//! Execution simulates the system under test as a state-set walk over its
//! model. Exhaustive mode explores every nondeterministic resolution;
//! randomised mode samples one resolution per call. Observing quiescence in
//! simulation means the current state set enables `delta`. When the tester
//! stimulates while the system could produce output, the stimulus wins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::Automaton;
use crate::label::Action;
use crate::nav::{MacroId, Nav};
use crate::traces::Trace;

/// A branch of an observation node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The observation is not allowed here.
    Fail,
    /// The observation is allowed; continue with the subtree.
    Continue(Box<TestNode>),
}

/// A node of the test tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestNode {
    /// Stop testing; the verdict is pass.
    Stop,
    /// Feed one input to the system, then continue.
    Stimulate { input: String, then: Box<TestNode> },
    /// Wait for an observation; total over all outputs and `delta`.
    Observe { branches: BTreeMap<Action, Branch> },
}

impl TestNode {
    pub fn depth(&self) -> usize {
        match self {
            TestNode::Stop => 0,
            TestNode::Stimulate { then, .. } => 1 + then.depth(),
            TestNode::Observe { branches } => {
                1 + branches
                    .values()
                    .map(|b| match b {
                        Branch::Fail => 0,
                        Branch::Continue(n) => n.depth(),
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }
}

/// A complete test case with the alphabet it was derived for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub name: String,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
    pub root: TestNode,
}

impl TestCase {
    /// The observations every observe node must cover: outputs plus `delta`.
    pub fn observations(&self) -> BTreeSet<Action> {
        let mut obs: BTreeSet<Action> = self
            .outputs
            .iter()
            .map(|o| Action::Name(o.clone()))
            .collect();
        obs.insert(Action::Delta);
        obs
    }

    /// Checks observe-node totality and input membership.
    pub fn well_formed(&self) -> bool {
        fn walk(node: &TestNode, inputs: &BTreeSet<String>, obs: &BTreeSet<Action>) -> bool {
            match node {
                TestNode::Stop => true,
                TestNode::Stimulate { input, then } => {
                    inputs.contains(input) && walk(then, inputs, obs)
                }
                TestNode::Observe { branches } => {
                    branches.keys().cloned().collect::<BTreeSet<_>>() == *obs
                        && branches.values().all(|b| match b {
                            Branch::Fail => true,
                            Branch::Continue(n) => walk(n, inputs, obs),
                        })
                }
            }
        }
        walk(&self.root, &self.inputs, &self.observations())
    }
}

/// Relative weights for the stop / stimulate / observe choice during
/// generation.
#[derive(Clone, Copy, Debug)]
pub struct ChoiceBias {
    pub stop: u32,
    pub stimulate: u32,
    pub observe: u32,
}

impl Default for ChoiceBias {
    fn default() -> Self {
        // Stop is possible everywhere but kept rare so tests have substance.
        ChoiceBias {
            stop: 1,
            stimulate: 3,
            observe: 3,
        }
    }
}

/// Derives `count` test cases of depth at most `depth` from `spec`,
/// deterministically in `seed`.
pub fn generate_tests(spec: &Automaton, depth: usize, count: usize, seed: u64) -> Vec<TestCase> {
    generate_tests_biased(spec, depth, count, seed, ChoiceBias::default())
}

/// As [`generate_tests`], with an explicit choice bias.
pub fn generate_tests_biased(
    spec: &Automaton,
    depth: usize,
    count: usize,
    seed: u64,
    bias: ChoiceBias,
) -> Vec<TestCase> {
    let nav = Nav::new(spec);
    let inputs: Vec<String> = spec.inputs().iter().cloned().collect();
    let mut observations: BTreeSet<Action> = spec
        .outputs()
        .iter()
        .map(|o| Action::Name(o.clone()))
        .collect();
    observations.insert(Action::Delta);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let root = gen_node(&nav, nav.start(spec), depth, &inputs, &observations, bias, &mut rng);
            TestCase {
                name: format!("{}_t{i:03}", spec.name()),
                inputs: spec.inputs().clone(),
                outputs: spec.outputs().clone(),
                root,
            }
        })
        .collect()
}

fn gen_node(
    nav: &Nav,
    here: MacroId,
    budget: usize,
    inputs: &[String],
    observations: &BTreeSet<Action>,
    bias: ChoiceBias,
    rng: &mut ChaCha8Rng,
) -> TestNode {
    if budget == 0 {
        return TestNode::Stop;
    }
    let stim_weight = if inputs.is_empty() { 0 } else { bias.stimulate };
    let total = bias.stop + stim_weight + bias.observe;
    let roll = rng.random_range(0..total);
    if roll < bias.stop {
        TestNode::Stop
    } else if roll < bias.stop + stim_weight {
        let input = inputs[rng.random_range(0..inputs.len())].clone();
        let next = nav
            .step(here, &Action::Name(input.clone()))
            .expect("specifications are input-enabled");
        TestNode::Stimulate {
            input,
            then: Box::new(gen_node(nav, next, budget - 1, inputs, observations, bias, rng)),
        }
    } else {
        let mut branches = BTreeMap::new();
        for obs in observations {
            let branch = match nav.step(here, obs) {
                None => Branch::Fail,
                Some(next) => Branch::Continue(Box::new(gen_node(
                    nav,
                    next,
                    budget - 1,
                    inputs,
                    observations,
                    bias,
                    rng,
                ))),
            };
            branches.insert(obs.clone(), branch);
        }
        TestNode::Observe { branches }
    }
}

/// How [`execute_test`] resolves the system's nondeterminism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    /// Explore every resolution; fail iff any resolution fails.
    Exhaustive,
    /// Sample a single resolution using the seed.
    Randomised,
}

impl fmt::Display for ExecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecMode::Exhaustive => "exhaustive",
            ExecMode::Randomised => "randomised",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestVerdict {
    Pass,
    Fail,
}

impl fmt::Display for TestVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestVerdict::Pass => "pass",
            TestVerdict::Fail => "fail",
        })
    }
}

/// One resolved walk through the test tree. On failure the last action of
/// `trace` is the forbidden observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestRun {
    pub trace: Trace,
    pub verdict: TestVerdict,
}

/// The aggregate outcome of executing one test case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionResult {
    pub verdict: TestVerdict,
    pub runs: Vec<TestRun>,
    pub mode: ExecMode,
    pub seed: Option<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("test alphabet does not match the system under test: {0}")]
    AlphabetMismatch(String),
}

/// Executes `test` against the model `sut`.
pub fn execute_test(
    test: &TestCase,
    sut: &Automaton,
    mode: ExecMode,
    seed: u64,
) -> Result<ExecutionResult, ExecError> {
    if &test.inputs != sut.inputs() || &test.outputs != sut.outputs() {
        return Err(ExecError::AlphabetMismatch(format!(
            "test over {{{}}}/{{{}}}, sut over {{{}}}/{{{}}}",
            test.inputs.iter().cloned().collect::<Vec<_>>().join(","),
            test.outputs.iter().cloned().collect::<Vec<_>>().join(","),
            sut.inputs().iter().cloned().collect::<Vec<_>>().join(","),
            sut.outputs().iter().cloned().collect::<Vec<_>>().join(","),
        )));
    }

    let nav = Nav::new(sut);
    let start = nav.start(sut);
    let mut runs = Vec::new();
    match mode {
        ExecMode::Exhaustive => {
            explore(&nav, &test.root, start, Trace::empty(), &mut runs);
        }
        ExecMode::Randomised => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            runs.push(sample(&nav, sut, &test.root, start, &mut rng));
        }
    }
    let verdict = if runs.iter().any(|r| r.verdict == TestVerdict::Fail) {
        TestVerdict::Fail
    } else {
        TestVerdict::Pass
    };
    Ok(ExecutionResult {
        verdict,
        runs,
        mode,
        seed: match mode {
            ExecMode::Exhaustive => None,
            ExecMode::Randomised => Some(seed),
        },
    })
}

fn explore(nav: &Nav, node: &TestNode, here: MacroId, trace: Trace, runs: &mut Vec<TestRun>) {
    match node {
        TestNode::Stop => runs.push(TestRun {
            trace,
            verdict: TestVerdict::Pass,
        }),
        TestNode::Stimulate { input, then } => {
            let action = Action::Name(input.clone());
            let next = nav
                .step(here, &action)
                .expect("input-enabled sut refused an input");
            explore(nav, then, next, trace.extended(action), runs);
        }
        TestNode::Observe { branches } => {
            for (obs, branch) in branches {
                let Some(next) = nav.step(here, obs) else {
                    continue; // the sut cannot produce this observation
                };
                match branch {
                    Branch::Fail => runs.push(TestRun {
                        trace: trace.extended(obs.clone()),
                        verdict: TestVerdict::Fail,
                    }),
                    Branch::Continue(n) => explore(nav, n, next, trace.extended(obs.clone()), runs),
                }
            }
        }
    }
}

fn sample(nav: &Nav, sut: &Automaton, root: &TestNode, start: MacroId, rng: &mut ChaCha8Rng) -> TestRun {
    let mut node = root;
    let mut here = start;
    let mut trace = Trace::empty();
    loop {
        match node {
            TestNode::Stop => {
                return TestRun {
                    trace,
                    verdict: TestVerdict::Pass,
                }
            }
            TestNode::Stimulate { input, then } => {
                let action = Action::Name(input.clone());
                here = nav
                    .step(here, &action)
                    .expect("input-enabled sut refused an input");
                trace.push(action);
                node = then;
            }
            TestNode::Observe { branches } => {
                let enabled: Vec<Action> =
                    nav.enabled_output_like(sut, here).into_iter().collect();
                debug_assert!(!enabled.is_empty(), "quiescent state without delta in sut");
                let obs = enabled[rng.random_range(0..enabled.len())].clone();
                trace.push(obs.clone());
                match &branches[&obs] {
                    Branch::Fail => {
                        return TestRun {
                            trace,
                            verdict: TestVerdict::Fail,
                        }
                    }
                    Branch::Continue(n) => {
                        here = nav.step(here, &obs).expect("observation was enabled");
                        node = n;
                    }
                }
            }
        }
    }
}
