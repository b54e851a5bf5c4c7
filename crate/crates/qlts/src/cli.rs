//! Command-line front end.
//!
//! Subcommands read `.qa` automata (and `.qtest` test cases), apply one
//! operation and write canonical output files or reports. Pipelines are
//! file-based so the canonical serialisation stays the single interchange
//! point.
//!
//! Exit codes: 0 on success or a passing check, 1 when a conformance or test
//! check fails (or automata are not isomorphic), 2 on usage, parse or
//! validation errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::automaton::{demonic_completion, validate, Automaton, Kind};
use crate::conformance::ioco_check;
use crate::format;
use crate::iso;
use crate::ops;
use crate::quiescence::{check_rules, deltafy, DeltafyMode, Rule, RuleReport};
use crate::testing::{execute_test, generate_tests, ExecMode, TestVerdict};
use crate::traces::traces_bounded;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(
    name = "qlts",
    about = "Model, transform and test transition systems with explicit quiescence",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Lts,
    Iots,
    Qts,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Lts => Kind::Lts,
            KindArg::Iots => Kind::Iots,
            KindArg::Qts => Kind::Qts,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Check well-formedness for a kind (defaults to the declared kind)
    Validate {
        file: PathBuf,
        #[arg(long)]
        kind: Option<KindArg>,
    },
    /// Report the quiescence rules R1-R4, R3', R4' and condition C1
    Rules {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Add delta self-loops to quiescent states
    Deltafy {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Skip the precondition checks (C1, R2, R3, R4)
        #[arg(long)]
        fast: bool,
    },
    /// Determinise by subset construction
    Det {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parallel composition of two automata
    Par {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hide output labels (rename them to tau)
    Hide {
        input: PathBuf,
        /// Comma-separated output labels to hide
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List all traces up to a depth, one per line
    Traces {
        input: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Check input-output conformance of an implementation against a specification
    Ioco { implementation: PathBuf, specification: PathBuf },
    /// Generate test cases from a specification
    Testgen {
        specification: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the generated .qtest files
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Execute a test case against a system-under-test model
    Exec {
        test: PathBuf,
        sut: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check whether two automata are isomorphic
    Iso { left: PathBuf, right: PathBuf },
    /// Demonic completion: route missing inputs to an accepting sink
    Complete {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Runs the CLI on the given arguments (without the program name) and
/// returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = std::iter::once("qlts".to_owned())
        .chain(args.into_iter().map(Into::into))
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version on stdout with status 0.
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn read_automaton(path: &Path) -> Result<Automaton> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    format::parse(&text).with_context(|| format!("in {}", path.display()))
}

/// Like [`read_automaton`] but only enforcing structural soundness, so that
/// rule-violating automata can still be inspected.
fn read_structural(path: &Path) -> Result<Automaton> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let a = format::parse_unvalidated(&text)
        .with_context(|| format!("in {}", path.display()))?;
    let structural_kind = match a.kind() {
        Kind::Lts => Kind::Lts,
        _ => Kind::Iots,
    };
    let report = validate(&a, structural_kind);
    if !report.ok() {
        return Err(anyhow!("{} is not structurally sound:\n{report}", path.display()));
    }
    Ok(a)
}

fn write_automaton(a: &Automaton, path: &Path) -> Result<()> {
    fs::write(path, format::serialise(a))
        .with_context(|| format!("cannot write {}", path.display()))
}

struct Paint {
    on: bool,
}

impl Paint {
    fn from_env() -> Paint {
        let on = match std::env::var("QLTS_COLOR").as_deref() {
            Ok("always") => true,
            Ok("never") => false,
            _ => std::io::stdout().is_terminal(),
        };
        Paint { on }
    }

    fn good(&self, s: &str) -> String {
        if self.on {
            format!("\x1b[32m{s}\x1b[0m")
        } else {
            s.to_owned()
        }
    }

    fn bad(&self, s: &str) -> String {
        if self.on {
            format!("\x1b[31m{s}\x1b[0m")
        } else {
            s.to_owned()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Validate { file, kind } => {
            let text = fs::read_to_string(&file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let a = format::parse_unvalidated(&text)
                .with_context(|| format!("in {}", file.display()))?;
            let kind = kind.map(Kind::from).unwrap_or_else(|| a.kind());
            let report = validate(&a, kind);
            if report.ok() {
                println!("ok: {} is a valid {kind}", a.name());
                Ok(EXIT_OK)
            } else {
                // Validation problems are input errors for pipeline purposes.
                eprintln!("{report}");
                Ok(EXIT_ERROR)
            }
        }
        Command::Rules { file, json } => {
            let a = read_structural(&file)?;
            let report = check_rules(&a);
            if json {
                println!("{}", rules_json(&a, &report)?);
            } else {
                print_rules(&a, &report);
            }
            Ok(if report.is_valid_qts() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Deltafy { input, output, fast } => {
            let a = read_structural(&input)?;
            let mode = if fast { DeltafyMode::Fast } else { DeltafyMode::Strict };
            let d = deltafy(&a, mode)?;
            write_automaton(&d, &output)?;
            Ok(EXIT_OK)
        }
        Command::Det { input, output } => {
            let a = read_automaton(&input)?;
            write_automaton(&ops::determinise(&a), &output)?;
            Ok(EXIT_OK)
        }
        Command::Par { left, right, output } => {
            let a = read_automaton(&left)?;
            let b = read_automaton(&right)?;
            let p = ops::parallel(&a, &b)?;
            write_automaton(&p, &output)?;
            Ok(EXIT_OK)
        }
        Command::Hide { input, labels, output } => {
            let a = read_automaton(&input)?;
            let h = ops::hide(&a, labels)?;
            write_automaton(&h, &output)?;
            Ok(EXIT_OK)
        }
        Command::Traces { input, depth } => {
            let a = read_automaton(&input)?;
            for trace in &traces_bounded(&a, depth).traces {
                println!("{trace}");
            }
            Ok(EXIT_OK)
        }
        Command::Ioco { implementation, specification } => {
            let imp = read_automaton(&implementation)?;
            let spec = read_automaton(&specification)?;
            let verdict = ioco_check(&imp, &spec)?;
            let paint = Paint::from_env();
            if verdict.pass {
                println!("{}", paint.good("PASS"));
                Ok(EXIT_OK)
            } else {
                println!("{}", paint.bad(&verdict.to_string()));
                Ok(EXIT_FAIL)
            }
        }
        Command::Testgen { specification, depth, count, seed, output } => {
            let spec = read_automaton(&specification)?;
            fs::create_dir_all(&output)
                .with_context(|| format!("cannot create {}", output.display()))?;
            let tests = generate_tests(&spec, depth, count, seed);
            for (i, t) in tests.iter().enumerate() {
                let path = output.join(format!("test_{i:03}.qtest"));
                fs::write(&path, format::serialise_test(t))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            println!("wrote {} test cases to {}", tests.len(), output.display());
            Ok(EXIT_OK)
        }
        Command::Exec { test, sut, mode, seed } => {
            let text = fs::read_to_string(&test)
                .with_context(|| format!("cannot read {}", test.display()))?;
            let tc = format::parse_test(&text)
                .with_context(|| format!("in {}", test.display()))?;
            let sut = read_automaton(&sut)?;
            let mode = match mode {
                ModeArg::Exhaustive => ExecMode::Exhaustive,
                ModeArg::Random => ExecMode::Randomised,
            };
            let result = execute_test(&tc, &sut, mode, seed)?;
            let paint = Paint::from_env();
            for run in &result.runs {
                println!("run {} -> {}", run.trace, run.verdict);
            }
            match result.verdict {
                TestVerdict::Pass => {
                    println!("{}", paint.good("PASS"));
                    Ok(EXIT_OK)
                }
                TestVerdict::Fail => {
                    println!("{}", paint.bad("FAIL"));
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Iso { left, right } => {
            let a = read_automaton(&left)?;
            let b = read_automaton(&right)?;
            if iso::isomorphic(&a, &b)? {
                println!("isomorphic");
                Ok(EXIT_OK)
            } else {
                println!("not isomorphic");
                Ok(EXIT_FAIL)
            }
        }
        Command::Complete { input, output } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let a = format::parse_unvalidated(&text)
                .with_context(|| format!("in {}", input.display()))?;
            let completed = demonic_completion(&a)?;
            let report = validate(&completed, completed.kind());
            if !report.ok() {
                return Err(anyhow!("completion result is not valid:\n{report}"));
            }
            write_automaton(&completed, &output)?;
            Ok(EXIT_OK)
        }
    }
}

fn print_rules(a: &Automaton, report: &RuleReport) {
    let paint = Paint::from_env();
    println!("rules for {}:", a.name());
    for rule in Rule::ALL {
        let outcome = &report.results[&rule];
        let verdict = if outcome.holds {
            paint.good("pass")
        } else {
            paint.bad("FAIL")
        };
        println!("  {:<4} {:<42} {}", rule.to_string(), rule.description(), verdict);
        for w in &outcome.witnesses {
            println!("       witness: {w}");
        }
    }
}

fn rules_json(a: &Automaton, report: &RuleReport) -> Result<String> {
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        automaton: &'a str,
        rules: &'a BTreeMap<Rule, crate::quiescence::RuleOutcome>,
    }
    Ok(serde_json::to_string_pretty(&Doc {
        automaton: a.name(),
        rules: &report.results,
    })?)
}
