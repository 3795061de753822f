use ellfree::config::{ConfigError, RunConfig};
use ellfree::report::{diff, DiffEntry, ReportBundle, ReportError, SCHEMA_VERSION};
use ellfree::suites::{run, RunError};

fn quick(n: usize) -> RunConfig {
    let mut cfg = RunConfig::from_toml_str(&format!(
        "N = {n}\nsamples = 8\ndraws = 4\nquad_points = 256\nsuite = [\"qs.bracket\", \"rmat.*\", \"modes.solve\", \"wn.cn\"]\n"
    ))
    .unwrap();
    cfg.max_mode = 6;
    cfg
}

#[test]
fn reruns_are_byte_identical() {
    let a = run(&quick(2)).unwrap().to_jsonl(false);
    let b = run(&quick(2)).unwrap().to_jsonl(false);
    assert_eq!(a, b);
    assert!(!a.contains("wall_ms"));
    assert!(run(&quick(2)).unwrap().to_jsonl(true).contains("wall_ms"));
}

#[test]
fn bundle_layout() {
    let bundle = run(&quick(3)).unwrap();
    let names: Vec<_> = bundle.reports.iter().map(|r| r.suite.as_str()).collect();
    assert_eq!(names, ["modes.solve", "qs.bracket", "rmat.dybe", "rmat.init", "rmat.weights", "wn.cn"]);
    assert!(bundle.all_pass());
    let text = bundle.to_jsonl(false);
    let first = text.lines().next().unwrap();
    assert!(first.contains("\"kind\":\"header\"") && first.contains(&format!("\"schema_version\":{SCHEMA_VERSION}")));
    assert_eq!(bundle.header.config["N"], "3");
    let back = ReportBundle::from_jsonl(&bundle.to_jsonl(true)).unwrap();
    assert_eq!(back, bundle);
    assert_eq!(ReportBundle::from_jsonl(&text).unwrap().to_jsonl(false), text);
}

#[test]
fn other_schema_versions_are_rejected() {
    let text = run(&quick(2)).unwrap().to_jsonl(false).replacen("\"schema_version\":1", "\"schema_version\":2", 1);
    assert!(matches!(ReportBundle::from_jsonl(&text), Err(ReportError::Version(2))));
    assert!(matches!(ReportBundle::from_jsonl(""), Err(ReportError::Parse { .. })));
}

#[test]
fn baseline_diff_cases() {
    let base = run(&quick(2)).unwrap();
    assert!(diff(&base, &base).is_empty());

    let mut drifted = base.clone();
    let r = drifted.reports.iter_mut().find(|r| r.suite == "rmat.dybe").unwrap();
    r.max_residual = r.threshold * 0.5;
    let d = diff(&base, &drifted);
    assert!(matches!(&d[..], [DiffEntry::Drift { suite, .. }] if suite == "rmat.dybe"), "{d:?}");

    let mut failed = base.clone();
    failed.reports[0].pass = false;
    assert!(diff(&base, &failed).iter().any(|e| matches!(e, DiffEntry::PassChanged { fresh: false, .. })));

    let mut fewer = base.clone();
    let gone = fewer.reports.pop().unwrap().suite;
    let d = diff(&base, &fewer);
    assert_eq!(d, vec![DiffEntry::MissingInFresh(gone.clone())]);
    assert_eq!(diff(&fewer, &base), vec![DiffEntry::NewInFresh(gone)]);
}

#[test]
fn small_changes_below_the_floor_are_not_drift() {
    let base = run(&quick(2)).unwrap();
    let mut noisy = base.clone();
    for r in &mut noisy.reports {
        r.max_residual = (r.max_residual * 3.0).min(r.threshold * 1e-7);
    }
    let drift: Vec<_> = diff(&base, &noisy).into_iter().filter(|e| matches!(e, DiffEntry::Drift { .. })).collect();
    assert!(drift.is_empty(), "{drift:?}");
}

#[test]
fn configuration_errors() {
    let mut cfg = quick(2);
    cfg.suites = vec!["nothing.here".into()];
    assert!(matches!(run(&cfg), Err(RunError::NoSuite(_))));
    let e = RunConfig::from_toml_str("order = -3").unwrap_err();
    assert!(e.to_string().contains("`order`"), "{e}");
    assert!(matches!(RunConfig::from_toml_str("N = "), Err(ConfigError::Syntax(_))));
    let mut cfg = RunConfig::default();
    cfg.set("dybe_convention", "upside").unwrap_err();
    cfg.set("max_mode", "0").unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains("`max_mode`"));
}
