use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn detach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detach")).args(args).output().expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn prove_writes_the_two_step_proof() {
    let out = detach(&["prove", arg(&fixture("luk3.p"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), std::fs::read_to_string(fixture("a1.proof")).unwrap());
}

#[test]
fn check_and_metrics() {
    let out = detach(&["check", arg(&fixture("a1.proof")), "--against", arg(&fixture("luk3.p"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "valid\n");
    let out = detach(&["metrics", arg(&fixture("a1.proof"))]);
    assert_eq!(stdout(&out), "length=2 richness=3 complexity=10 size=13\n");
}

#[test]
fn invalid_proof_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.proof");
    let text = std::fs::read_to_string(fixture("a1.proof")).unwrap().replace("[cd 4,2]", "[cd 2,4]");
    std::fs::write(&bad, text).unwrap();
    let out = detach(&["check", arg(&bad), "--against", arg(&fixture("luk3.p"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("invalid step 5:"));
}

#[test]
fn unreached_goal_exits_1_without_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.proof");
    let out = detach(&["prove", arg(&fixture("luk3.p")), "--max-weight", "3", "-o", arg(&target)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!target.exists());
}

#[test]
fn usage_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.proof");
    let luk3 = fixture("luk3.p");
    for args in [
        vec!["prove", arg(&luk3), "--seedless", "-o", arg(&target)],
        vec!["prove", arg(&luk3), "--max-weight", "heavy", "-o", arg(&target)],
        vec!["prove", arg(&luk3), "--forbid", "n(,x)", "-o", arg(&target)],
        vec!["prove", "missing.p", "-o", arg(&target)],
        vec!["prove", arg(&luk3), "--no-such-flag"],
        vec!["metrics", arg(&luk3)],
    ] {
        let out = detach(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!target.exists());
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |k: u32| {
        let proof = dir.path().join(format!("p{k}"));
        let trace = dir.path().join(format!("t{k}"));
        let out = detach(&["prove", arg(&fixture("luk3.p")), "--machine", "-o", arg(&proof), "--trace", arg(&trace)]);
        assert_eq!(out.status.code(), Some(0));
        (std::fs::read(proof).unwrap(), std::fs::read(trace).unwrap(), out.stderr)
    };
    assert_eq!(run(1), run(2));
}

#[test]
fn forbidding_double_negation_keeps_the_proof() {
    let out = detach(&["prove", arg(&fixture("luk3.p")), "--forbid", "n(n(x))", "--ratio", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("[goal id] matched."));
}

#[test]
fn cram_and_shorten() {
    let out = detach(&["cram", arg(&fixture("conj.p")), "--proof", arg(&fixture("conj_id.proof"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains("[cd ")).count(), 4);
    let out = detach(&[
        "shorten",
        arg(&fixture("luk3.p")),
        "--proof",
        arg(&fixture("a1.proof")),
        "--mode",
        "block",
        "--budget",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), std::fs::read_to_string(fixture("a1.proof")).unwrap());
    let report = String::from_utf8(out.stderr).unwrap();
    assert!(report.starts_with("run 1 block=4 "));
}

#[test]
fn sweep_report() {
    let out = detach(&["sweep", arg(&fixture("luk3.p")), "--grid", arg(&fixture("sweep.plan"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "run 2 max_weight=30 proof_found len=2 rich=3 cplx=10 size=13\n\
         run 1 max_weight=3 sos_exhausted len=- rich=- cplx=- size=-\n"
    );
}

#[test]
fn adjunction_plan() {
    let out = detach(&["prove", arg(&fixture("luk3.p")), "--plan", arg(&fixture("adjoin.plan"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains(" purged proof_found "));
}

#[test]
fn dependence_lists_every_member() {
    let out = detach(&["dependence", arg(&fixture("luk3.p")), "--budget", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("id dependent length=2"));
    for ax in ["ax1", "ax2", "ax3"] {
        assert!(text.contains(&format!("{ax} no proof within budget")), "{text}");
    }
}
