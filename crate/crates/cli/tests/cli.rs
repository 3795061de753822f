use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ellfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellfree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_to(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ellfree(&args)
}

#[test]
fn eval_bracket_at_zero() {
    let o = ellfree(&["eval", "bracket", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn eval_phi_matches_reference() {
    let o = ellfree(&["eval", "phiN", "0.5", "--digits", "25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.075_002_623_019_940_8).abs() < 1e-16, "{v}");
    let o = ellfree(&["eval", "phiN", "0.5", "--N", "2"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.068_340_454_763_093_34).abs() < 1e-16, "{v}");
}

#[test]
fn eval_errors() {
    let o = ellfree(&["eval", "zeta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zeta"));
    let o = ellfree(&["eval", "bracket", "one"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ellfree(&["eval", "bracket", "0.3", "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`q`"), "{}", stderr(&o));
}

#[test]
fn reproducible_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = run_to(p, &["--suite", "rmat.dybe", "--N", "2", "--seed", "7"]);
        assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("1 suite(s), 0 failed"));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.lines().next().unwrap().contains("\"schema_version\":1"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn config_file_and_field_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.conf");
    fs::write(&good, "N = 2\nsuite = \"rmat.init, rmat.weights\"\nseed = 3\n").unwrap();
    let o = ellfree(&["run", "--config", good.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("2 suite(s), 0 failed"));

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "N = 2\nsamples = \"lots\"\n").unwrap();
    let o = ellfree(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`samples`"), "{}", stderr(&o));

    let o = ellfree(&["run", "--suite", "no.such.suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_suite_sets_exit_status() {
    let o = ellfree(&["run", "--suite", "cur.psi", "--N", "2", "--samples", "8"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("1 suite(s), 1 failed"));
}

#[test]
fn baseline_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.jsonl");
    let same = dir.path().join("same.jsonl");
    let fewer = dir.path().join("fewer.jsonl");
    let flags = ["--N", "2", "--suite", "rmat.init,rmat.weights"];
    assert!(run_to(&base, &flags).status.success());
    assert!(run_to(&same, &flags).status.success());
    assert!(run_to(&fewer, &["--N", "2", "--suite", "rmat.init"]).status.success());

    let o = ellfree(&["baseline", "diff", base.to_str().unwrap(), same.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).trim().is_empty());

    let o = ellfree(&["baseline", "diff", base.to_str().unwrap(), fewer.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("missing  rmat.weights"), "{}", stdout(&o));

    let o = run_to(&same, &["--N", "2", "--suite", "rmat.init", "--baseline", base.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 difference(s)"), "{}", stdout(&o));
}

#[test]
fn precision_drift_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("p128.jsonl");
    let low = dir.path().join("p64.jsonl");
    assert!(run_to(&base, &["--N", "2", "--suite", "rmat.init"]).status.success());
    run_to(&low, &["--N", "2", "--suite", "rmat.init", "--prec", "64"]);
    let o = ellfree(&["baseline", "diff", base.to_str().unwrap(), low.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("drift    rmat.init") && s.contains("verdict  rmat.init: PASS -> FAIL"), "{s}");

    // Noise far below the threshold is not drift.
    let mid = dir.path().join("p96.jsonl");
    assert!(run_to(&mid, &["--N", "2", "--suite", "rmat.init", "--prec", "96"]).status.success());
    let o = ellfree(&["baseline", "diff", base.to_str().unwrap(), mid.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn list_names_suites() {
    let o = ellfree(&["list", "--N", "3"]);
    let s = stdout(&o);
    for name in ["rmat.dybe", "rmat.weights", "rmat.init", "wn.lambda", "wn.tt", "wn.smatrix", "wn.tn_nontrivial", "wn.cn"] {
        assert!(s.lines().any(|l| l == name), "{name}");
    }
}
