//! End-to-end checks of the command-line interface: exit codes, report
//! wording and the determinism of file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn qlts(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlts"))
        .args(args)
        .current_dir(dir)
        .env("QLTS_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn conformance_failure_prints_counterexample_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &[
            "ioco",
            fixture("conf_impl_extra.qa").to_str().unwrap(),
            fixture("conf_spec.qa").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("FAIL after ε observing d"));
}

#[test]
fn conformance_pass_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    for file in ["conf_impl_subset.qa", "conf_impl_quiet.qa"] {
        let out = qlts(
            &[
                "ioco",
                fixture(file).to_str().unwrap(),
                fixture("conf_spec.qa").to_str().unwrap(),
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("PASS"));
    }
}

#[test]
fn unexpected_quiescence_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &[
            "ioco",
            fixture("conf_impl_late_quiet.qa").to_str().unwrap(),
            fixture("conf_spec.qa").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL after c observing delta"));
}

#[test]
fn deltafy_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("once.qa");
    let second = dir.path().join("twice.qa");
    let out = qlts(
        &[
            "deltafy",
            fixture("atm.qa").to_str().unwrap(),
            "-o",
            first.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let out = qlts(
        &[
            "deltafy",
            first.to_str().unwrap(),
            "-o",
            second.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let once = std::fs::read(&first).unwrap();
    let twice = std::fs::read(&second).unwrap();
    assert_eq!(once, twice);
    assert!(String::from_utf8(once).unwrap().contains("automaton atm qts"));
}

#[test]
fn validate_divergent_exits_2_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &[
            "validate",
            fixture("divergent.qa").to_str().unwrap(),
            "--kind",
            "iots",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Divergent"));
    assert!(stderr(&out).contains("s0"));
}

#[test]
fn validate_ok_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &["validate", fixture("conf_spec.qa").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid qts"));
}

#[test]
fn rules_reports_exact_failure_and_json_is_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &["rules", fixture("rule_r2_violation.qa").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("R2"));
    assert!(text.contains("FAIL"));

    let out = qlts(
        &[
            "rules",
            fixture("rule_r2_violation.qa").to_str().unwrap(),
            "--json",
        ],
        dir.path(),
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["automaton"], "r2_violation");
    assert_eq!(json["rules"]["R1"]["holds"], true);
    assert_eq!(json["rules"]["R2"]["holds"], false);
    assert_eq!(json["rules"]["R3"]["holds"], true);
    assert_eq!(json["rules"]["R4"]["holds"], true);
}

#[test]
fn deltafy_rejects_precondition_violations_unless_fast() {
    let dir = tempfile::tempdir().unwrap();
    let rejected = dir.path().join("rejected.qa");
    let out = qlts(
        &[
            "deltafy",
            fixture("c1_violation.qa").to_str().unwrap(),
            "-o",
            rejected.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("C1"));
    assert!(!rejected.exists());

    let forced = dir.path().join("forced.qa");
    let out = qlts(
        &[
            "deltafy",
            fixture("c1_violation.qa").to_str().unwrap(),
            "-o",
            forced.to_str().unwrap(),
            "--fast",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    // The forced result is inspectable and breaks exactly R3.
    let out = qlts(&["rules", forced.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("quiescence enables no new behaviour"));
    assert!(text.contains("a delta b c"));
}

#[test]
fn det_par_hide_write_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    let det = dir.path().join("det.qa");
    let out = qlts(
        &[
            "det",
            fixture("det_deltafy_witness.qa").to_str().unwrap(),
            "-o",
            det.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&det).unwrap();
    assert!(text.contains("{s1,s2}"));

    let atm_q = dir.path().join("atm_q.qa");
    qlts(
        &[
            "deltafy",
            fixture("atm.qa").to_str().unwrap(),
            "-o",
            atm_q.to_str().unwrap(),
        ],
        dir.path(),
    );
    let par = dir.path().join("par.qa");
    let out = qlts(
        &[
            "par",
            fixture("conf_spec.qa").to_str().unwrap(),
            atm_q.to_str().unwrap(),
            "-o",
            par.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&par).unwrap();
    assert!(text.contains("automaton (conf_spec||atm) qts"));

    let hidden = dir.path().join("hidden.qa");
    let out = qlts(
        &[
            "hide",
            fixture("conf_spec.qa").to_str().unwrap(),
            "--labels",
            "b,d",
            "-o",
            hidden.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&hidden).unwrap();
    assert!(text.contains("outputs a\n"));
    assert!(text.contains("trans p0 tau p1"));
}

#[test]
fn hide_divergence_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.qa");
    std::fs::write(
        &cyclic,
        "automaton cyclic iots\ninputs\noutputs a b\nstates s0 s1\ninitial s0\ntrans s0 a s1\ntrans s1 b s0\n",
    )
    .unwrap();
    let out = qlts(
        &[
            "hide",
            cyclic.to_str().unwrap(),
            "--labels",
            "a,b",
            "-o",
            dir.path().join("x.qa").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("divergence"));
}

#[test]
fn traces_lists_bounded_traces_with_delta_spelled_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &[
            "traces",
            fixture("conf_spec.qa").to_str().unwrap(),
            "--depth",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["ε", "a", "b", "c", "delta"]);
}

#[test]
fn iso_distinguishes_and_recognises() {
    let dir = tempfile::tempdir().unwrap();
    let out = qlts(
        &[
            "iso",
            fixture("conf_spec.qa").to_str().unwrap(),
            fixture("conf_spec.qa").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("isomorphic"));

    let out = qlts(
        &[
            "iso",
            fixture("conf_spec.qa").to_str().unwrap(),
            fixture("conf_impl_subset.qa").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not isomorphic"));
}

#[test]
fn complete_routes_missing_inputs_to_sink() {
    let dir = tempfile::tempdir().unwrap();
    let partial = dir.path().join("partial.qa");
    std::fs::write(
        &partial,
        "automaton partial lts\ninputs a\noutputs b\nstates s0 s1\ninitial s0\ntrans s0 b s1\ntrans s1 a s1\n",
    )
    .unwrap();
    let completed = dir.path().join("completed.qa");
    let out = qlts(
        &[
            "complete",
            partial.to_str().unwrap(),
            "-o",
            completed.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&completed).unwrap();
    assert!(text.contains("automaton partial iots"));
    assert!(text.contains("trans s0 a _sink"));
    assert!(text.contains("trans _sink a _sink"));
    assert!(text.contains("trans _sink b _sink"));
}

#[test]
fn testgen_and_exec_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("tests");
    let out = qlts(
        &[
            "testgen",
            fixture("conf_spec.qa").to_str().unwrap(),
            "--depth",
            "4",
            "--count",
            "5",
            "--seed",
            "7",
            "-o",
            outdir.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let mut files: Vec<_> = std::fs::read_dir(&outdir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 5);

    // Every generated test passes against the specification it came from.
    for f in &files {
        let out = qlts(
            &[
                "exec",
                f.to_str().unwrap(),
                fixture("conf_spec.qa").to_str().unwrap(),
                "--mode",
                "exhaustive",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "test {f:?}: {}", stdout(&out));
    }

    // Same seed, same bytes.
    let outdir2 = dir.path().join("tests2");
    qlts(
        &[
            "testgen",
            fixture("conf_spec.qa").to_str().unwrap(),
            "--depth",
            "4",
            "--count",
            "5",
            "--seed",
            "7",
            "-o",
            outdir2.to_str().unwrap(),
        ],
        dir.path(),
    );
    for f in &files {
        let twin = outdir2.join(f.file_name().unwrap());
        assert_eq!(
            std::fs::read(f).unwrap(),
            std::fs::read(&twin).unwrap(),
            "generation is not deterministic"
        );
    }
}

#[test]
fn exec_random_mode_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("t");
    qlts(
        &[
            "testgen",
            fixture("conf_spec.qa").to_str().unwrap(),
            "--depth",
            "5",
            "--count",
            "1",
            "--seed",
            "3",
            "-o",
            outdir.to_str().unwrap(),
        ],
        dir.path(),
    );
    let test = outdir.join("test_000.qtest");
    let run = |seed: &str| {
        let out = qlts(
            &[
                "exec",
                test.to_str().unwrap(),
                fixture("conf_spec.qa").to_str().unwrap(),
                "--mode",
                "random",
                "--seed",
                seed,
            ],
            dir.path(),
        );
        (out.status.code(), stdout(&out))
    };
    assert_eq!(run("11"), run("11"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qa");
    std::fs::write(&bad, "automaton x iots\nstates s\ninitial s\ntrans s zz s\n").unwrap();
    let out = qlts(&["validate", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"));

    let out = qlts(&["nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
