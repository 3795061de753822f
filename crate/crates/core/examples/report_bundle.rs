//! Run a selection of suites from a configuration, write the JSON-lines
//! bundle, rerun and diff against it.
//!
//!     cargo run --release --example report_bundle

use ellfree::config::RunConfig;
use ellfree::report::{diff, ReportBundle};
use ellfree::suites;

fn main() {
    let cfg = RunConfig::from_toml_str(
        r#"
        N = 2
        seed = 7
        samples = 40
        suite = "rmat.*, wn.cn, qs.*"
        "#,
    )
    .unwrap();
    let bundle = suites::run(&cfg).unwrap();
    for r in &bundle.reports {
        println!("{}", r.summary_line());
    }
    let path = std::env::temp_dir().join("ellfree-example.jsonl");
    bundle.write(&path, false).unwrap();
    println!("wrote {}", path.display());

    let again = suites::run(&cfg).unwrap();
    let archived = ReportBundle::read(&path).unwrap();
    println!("rerun identical: {}", archived.to_jsonl(false) == again.to_jsonl(false));

    let mut finer = cfg.clone();
    finer.prec = 96;
    let drift = diff(&archived, &suites::run(&finer).unwrap());
    println!("at 96 bits: {} difference(s)", drift.len());
    for d in drift {
        println!("  {d}");
    }
}
