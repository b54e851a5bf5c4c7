//! The `.qa` text format for automata and the `.qtest` format for test
//! cases.
//!
//! Both formats are line-oriented with `#` comments and whitespace-separated
//! tokens. Serialisation is canonical: declarations are sorted
//! lexicographically and transition lines by (source, label, target), so
//! structurally identical automata always serialise to identical bytes and
//! `serialise ∘ parse` is a fixpoint.
//!
//! Automaton grammar:
//!
//! ```text
//! automaton <name> <kind>        # kind ∈ lts | iots | qts
//! inputs <name>*
//! outputs <name>*
//! states <id>+
//! initial <id>+
//! trans <src> <label> <dst>      # label: declared name, `tau` or `delta`
//! ```
//!
//! Test cases are indentation-based trees (two spaces per level) with node
//! kinds `STIM`/`OBS`/`PASS`/`FAIL`; observation branches are lines
//! `<label> <node>` under an `OBS` node, total over all outputs and `delta`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{validate, Automaton, Kind, Transition, ValidationReport};
use crate::label::{Action, Label, DELTA, TAU};
use crate::testing::{Branch, TestCase, TestNode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("validation failed:\n{0}")]
    ValidationFailed(ValidationReport),
}

fn err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Strips a `#` comment and splits a line into tokens.
fn tokens(line: &str) -> Vec<&str> {
    let code = line.split('#').next().unwrap_or("");
    code.split_whitespace().collect()
}

/// Parses a `.qa` document without validating the declared kind. Grammar
/// and referential errors are still rejected.
pub fn parse_unvalidated(text: &str) -> Result<Automaton, FormatError> {
    let mut name: Option<(String, Kind)> = None;
    let mut inputs: Option<BTreeSet<String>> = None;
    let mut outputs: Option<BTreeSet<String>> = None;
    let mut states: Option<BTreeSet<String>> = None;
    let mut initial: Option<BTreeSet<String>> = None;
    let mut raw_trans: Vec<(usize, String, String, String)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "automaton" => {
                if name.is_some() {
                    return Err(err(lineno, "duplicate `automaton` line"));
                }
                if toks.len() != 3 {
                    return Err(err(lineno, "expected `automaton <name> <kind>`"));
                }
                let kind = Kind::from_str(toks[2])
                    .ok_or_else(|| err(lineno, format!("unknown kind `{}`", toks[2])))?;
                name = Some((toks[1].to_owned(), kind));
            }
            "inputs" => {
                if inputs.is_some() {
                    return Err(err(lineno, "duplicate `inputs` line"));
                }
                inputs = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "outputs" => {
                if outputs.is_some() {
                    return Err(err(lineno, "duplicate `outputs` line"));
                }
                outputs = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "states" => {
                if states.is_some() {
                    return Err(err(lineno, "duplicate `states` line"));
                }
                if toks.len() < 2 {
                    return Err(err(lineno, "`states` needs at least one state"));
                }
                states = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "initial" => {
                if initial.is_some() {
                    return Err(err(lineno, "duplicate `initial` line"));
                }
                if toks.len() < 2 {
                    return Err(err(lineno, "`initial` needs at least one state"));
                }
                initial = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "trans" => {
                if toks.len() != 4 {
                    return Err(err(lineno, "expected `trans <src> <label> <dst>`"));
                }
                raw_trans.push((
                    lineno,
                    toks[1].to_owned(),
                    toks[2].to_owned(),
                    toks[3].to_owned(),
                ));
            }
            other => {
                return Err(err(lineno, format!("unknown directive `{other}`")));
            }
        }
    }

    let (name, kind) = name.ok_or_else(|| err(1, "missing `automaton <name> <kind>` line"))?;
    let inputs = inputs.unwrap_or_default();
    let outputs = outputs.unwrap_or_default();
    let states = states.ok_or_else(|| err(1, "missing `states` line"))?;
    let initial = initial.ok_or_else(|| err(1, "missing `initial` line"))?;

    for s in &initial {
        if !states.contains(s) {
            return Err(err(1, format!("initial state `{s}` is not declared")));
        }
    }

    let mut transitions: BTreeSet<Transition> = BTreeSet::new();
    for (lineno, src, token, dst) in raw_trans {
        for endpoint in [&src, &dst] {
            if !states.contains(endpoint) {
                return Err(err(lineno, format!("state `{endpoint}` is not declared")));
            }
        }
        let label = match token.as_str() {
            TAU => Label::Internal,
            DELTA => Label::Quiescence,
            t if inputs.contains(t) => Label::Input(token.clone()),
            t if outputs.contains(t) => Label::Output(token.clone()),
            t => return Err(err(lineno, format!("label `{t}` is not declared"))),
        };
        // Duplicate lines collapse: the transition relation is a set.
        transitions.insert(Transition::new(src, label, dst));
    }

    Ok(Automaton::from_parts(
        name, kind, states, initial, inputs, outputs, transitions,
    ))
}

/// Parses a `.qa` document and validates it for its declared kind.
pub fn parse(text: &str) -> Result<Automaton, FormatError> {
    let a = parse_unvalidated(text)?;
    let report = validate(&a, a.kind());
    if !report.ok() {
        return Err(FormatError::ValidationFailed(report));
    }
    Ok(a)
}

/// Canonical serialisation of an automaton.
pub fn serialise(a: &Automaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "automaton {} {}", a.name(), a.kind());
    let _ = writeln!(s, "inputs{}", joined(a.inputs()));
    let _ = writeln!(s, "outputs{}", joined(a.outputs()));
    let _ = writeln!(s, "states{}", joined(a.states()));
    let _ = writeln!(s, "initial{}", joined(a.initial()));
    for t in a.transitions() {
        let _ = writeln!(s, "trans {} {} {}", t.src, t.label.token(), t.dst);
    }
    s
}

fn joined(set: &BTreeSet<String>) -> String {
    set.iter().fold(String::new(), |mut acc, x| {
        acc.push(' ');
        acc.push_str(x);
        acc
    })
}

/// Best-effort Graphviz rendering; not canonical and not parsed back.
pub fn to_dot(a: &Automaton) -> String {
    let mut s = String::from("digraph {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, init) in a.initial().iter().enumerate() {
        let _ = writeln!(s, "  __start{i} [shape=point];");
        let _ = writeln!(s, "  __start{i} -> \"{init}\";");
    }
    for t in a.transitions() {
        let suffix = match &t.label {
            Label::Input(_) => "?",
            Label::Output(_) => "!",
            _ => "",
        };
        let _ = writeln!(
            s,
            "  \"{}\" -> \"{}\" [label=\"{}{}\"];",
            t.src,
            t.dst,
            t.label.token(),
            suffix
        );
    }
    s.push_str("}\n");
    s
}

// ---------------------------------------------------------------------------
// Test-case format
// ---------------------------------------------------------------------------

/// Canonical serialisation of a test case.
pub fn serialise_test(t: &TestCase) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "testcase {}", t.name);
    let _ = writeln!(s, "inputs{}", joined(&t.inputs));
    let _ = writeln!(s, "outputs{}", joined(&t.outputs));
    write_node(&mut s, &t.root, 0);
    s
}

fn indent(s: &mut String, level: usize) {
    for _ in 0..level {
        s.push_str("  ");
    }
}

fn write_node(s: &mut String, node: &TestNode, level: usize) {
    indent(s, level);
    match node {
        TestNode::Stop => s.push_str("PASS\n"),
        TestNode::Stimulate { input, then } => {
            let _ = writeln!(s, "STIM {input}");
            write_node(s, then, level + 1);
        }
        TestNode::Observe { branches } => {
            s.push_str("OBS\n");
            for (action, branch) in branches {
                write_branch(s, action, branch, level + 1);
            }
        }
    }
}

fn write_branch(s: &mut String, action: &Action, branch: &Branch, level: usize) {
    indent(s, level);
    match branch {
        Branch::Fail => {
            let _ = writeln!(s, "{} FAIL", action.token());
        }
        Branch::Continue(next) => match next.as_ref() {
            TestNode::Stop => {
                let _ = writeln!(s, "{} PASS", action.token());
            }
            TestNode::Stimulate { input, then } => {
                let _ = writeln!(s, "{} STIM {input}", action.token());
                write_node(s, then, level + 1);
            }
            TestNode::Observe { branches } => {
                let _ = writeln!(s, "{} OBS", action.token());
                for (a2, b2) in branches {
                    write_branch(s, a2, b2, level + 1);
                }
            }
        },
    }
}

/// Parses a `.qtest` document and checks that every observation node is
/// total over the declared outputs plus `delta`.
pub fn parse_test(text: &str) -> Result<TestCase, FormatError> {
    struct Line {
        no: usize,
        level: usize,
        toks: Vec<String>,
    }

    let mut name: Option<String> = None;
    let mut inputs: Option<BTreeSet<String>> = None;
    let mut outputs: Option<BTreeSet<String>> = None;
    let mut body: Vec<Line> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks: Vec<String> = tokens(raw).into_iter().map(|s| s.to_owned()).collect();
        if toks.is_empty() {
            continue;
        }
        if name.is_none() {
            if toks.len() != 2 || toks[0] != "testcase" {
                return Err(err(lineno, "expected `testcase <name>`"));
            }
            name = Some(toks[1].clone());
            continue;
        }
        if inputs.is_none() && toks[0] == "inputs" {
            inputs = Some(toks[1..].iter().cloned().collect());
            continue;
        }
        if outputs.is_none() && toks[0] == "outputs" {
            outputs = Some(toks[1..].iter().cloned().collect());
            continue;
        }
        let spaces = raw.len() - raw.trim_start_matches(' ').len();
        if spaces % 2 != 0 {
            return Err(err(lineno, "indentation must be two spaces per level"));
        }
        body.push(Line {
            no: lineno,
            level: spaces / 2,
            toks,
        });
    }

    let name = name.ok_or_else(|| err(1, "missing `testcase` line"))?;
    let inputs = inputs.unwrap_or_default();
    let outputs = outputs.ok_or_else(|| err(1, "missing `outputs` line"))?;
    let mut observations: BTreeSet<Action> =
        outputs.iter().map(|o| Action::Name(o.clone())).collect();
    observations.insert(Action::Delta);

    // Recursive descent over the indentation structure.
    fn parse_node(
        lines: &[Line],
        pos: &mut usize,
        level: usize,
        inputs: &BTreeSet<String>,
        observations: &BTreeSet<Action>,
    ) -> Result<TestNode, FormatError> {
        let line = lines
            .get(*pos)
            .ok_or_else(|| err(0, "unexpected end of test tree"))?;
        if line.level != level {
            return Err(err(line.no, format!("expected indentation level {level}")));
        }
        *pos += 1;
        node_from_tokens(&line.toks, line.no, lines, pos, level, inputs, observations)
    }

    #[allow(clippy::too_many_arguments)]
    fn node_from_tokens(
        toks: &[String],
        lineno: usize,
        lines: &[Line],
        pos: &mut usize,
        level: usize,
        inputs: &BTreeSet<String>,
        observations: &BTreeSet<Action>,
    ) -> Result<TestNode, FormatError> {
        match toks[0].as_str() {
            "PASS" => Ok(TestNode::Stop),
            "FAIL" => Err(err(lineno, "FAIL is only allowed on observation branches")),
            "STIM" => {
                let input = toks
                    .get(1)
                    .ok_or_else(|| err(lineno, "STIM needs an input"))?;
                if !inputs.contains(input) {
                    return Err(err(lineno, format!("`{input}` is not a declared input")));
                }
                let child = parse_node(lines, pos, level + 1, inputs, observations)?;
                Ok(TestNode::Stimulate {
                    input: input.clone(),
                    then: Box::new(child),
                })
            }
            "OBS" => {
                let mut branches: BTreeMap<Action, Branch> = BTreeMap::new();
                while let Some(line) = lines.get(*pos) {
                    if line.level != level + 1 {
                        break;
                    }
                    let bl = line.no;
                    let toks = line.toks.clone();
                    *pos += 1;
                    let token = &toks[0];
                    let action = if token == DELTA {
                        Action::Delta
                    } else {
                        Action::Name(token.clone())
                    };
                    if !observations.contains(&action) {
                        return Err(err(bl, format!("`{token}` is not an observation")));
                    }
                    let rest = &toks[1..];
                    if rest.is_empty() {
                        return Err(err(bl, "observation branch needs a node"));
                    }
                    let branch = if rest[0] == "FAIL" {
                        Branch::Fail
                    } else {
                        let node = node_from_tokens(
                            rest,
                            bl,
                            lines,
                            pos,
                            level + 1,
                            inputs,
                            observations,
                        )?;
                        Branch::Continue(Box::new(node))
                    };
                    if branches.insert(action, branch).is_some() {
                        return Err(err(bl, format!("duplicate observation `{token}`")));
                    }
                }
                let covered: BTreeSet<Action> = branches.keys().cloned().collect();
                if covered != *observations {
                    let missing: Vec<String> = observations
                        .difference(&covered)
                        .map(|a| a.token().to_owned())
                        .collect();
                    return Err(err(
                        lineno,
                        format!("OBS is not total; missing {}", missing.join(", ")),
                    ));
                }
                Ok(TestNode::Observe { branches })
            }
            other => Err(err(lineno, format!("unknown test node `{other}`"))),
        }
    }

    let mut pos = 0;
    let root = parse_node(&body, &mut pos, 0, &inputs, &observations)?;
    if pos != body.len() {
        return Err(err(body[pos].no, "trailing content after the test tree"));
    }
    let tc = TestCase {
        name,
        inputs,
        outputs,
        root,
    };
    Ok(tc)
}
