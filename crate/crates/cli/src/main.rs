use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ellfree::config::RunConfig;
use ellfree::qspecial::QSpecial;
use ellfree::report::{diff, ReportBundle};
use ellfree::scalar::parse_scalar;
use ellfree::suites;

#[derive(Parser)]
#[command(name = "ellfree", version, about = "Run and compare elliptic free-field relation suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the selected suites and write a report bundle.
    Run(RunArgs),
    /// Evaluate one special function, e.g. `eval phiN 0.5` or `eval bracket 0.3+0.1i`.
    Eval {
        name: String,
        /// Arguments; pass negative complex values after `--`.
        #[arg(allow_negative_numbers = true)]
        args: Vec<String>,
        #[command(flatten)]
        params: ParamArgs,
        /// Significant digits to print.
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Regression comparison of report bundles.
    Baseline {
        #[command(subcommand)]
        cmd: BaselineCmd,
    },
    /// List the suites available at rank N.
    List {
        #[arg(long = "N", default_value_t = 3)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum BaselineCmd {
    /// Differences between an archived and a fresh bundle; exits 1 if any.
    Diff { baseline: PathBuf, fresh: PathBuf },
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    prec: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suite name glob, repeatable or comma separated.
    #[arg(long)]
    suite: Vec<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// standard+, standard-, mirrored+ or mirrored-.
    #[arg(long)]
    dybe_convention: Option<String>,
    /// Report bundle path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Archived bundle to diff the fresh run against.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Record per-suite wall time in the bundle (makes it non-reproducible).
    #[arg(long)]
    wall_time: bool,
}

fn apply_params(cfg: &mut RunConfig, p: &ParamArgs) -> Result<(), String> {
    let mut set = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v).map_err(|e| e.to_string()));
    set("N", p.n.map(|x| x.to_string()))?;
    set("q", p.q.clone())?;
    set("r", p.r.clone())?;
    set("prec", p.prec.map(|x| x.to_string()))
}

fn build_config(a: &RunArgs) -> Result<RunConfig, String> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => RunConfig::default(),
    };
    apply_params(&mut cfg, &a.params)?;
    let mut set = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v).map_err(|e| e.to_string()));
    set("order", a.order.map(|x| x.to_string()))?;
    set("samples", a.samples.map(|x| x.to_string()))?;
    set("draws", a.draws.map(|x| x.to_string()))?;
    set("seed", a.seed.map(|x| x.to_string()))?;
    set("dybe_convention", a.dybe_convention.clone())?;
    if !a.suite.is_empty() {
        cfg.set("suite", &a.suite.join(",")).map_err(|e| e.to_string())?;
    }
    if let Some(out) = &a.out {
        cfg.out = Some(out.clone());
    }
    cfg.wall_time |= a.wall_time;
    Ok(cfg)
}

fn run(a: RunArgs) -> Result<ExitCode, String> {
    let cfg = build_config(&a)?;
    let bundle = suites::run(&cfg).map_err(|e| e.to_string())?;
    for r in &bundle.reports {
        println!("{}", r.summary_line());
    }
    if let Some(out) = &cfg.out {
        bundle.write(out, cfg.wall_time).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    if let Some(base) = &a.baseline {
        let old = ReportBundle::read(base).map_err(|e| format!("{}: {e}", base.display()))?;
        let d = diff(&old, &bundle);
        println!("baseline {}: {} difference(s)", base.display(), d.len());
        for e in d {
            println!("  {e}");
        }
    }
    let failed = bundle.reports.iter().filter(|r| !r.pass).count();
    println!("{} suite(s), {failed} failed", bundle.reports.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn eval(name: &str, args: &[String], p: &ParamArgs, digits: usize) -> Result<ExitCode, String> {
    let mut cfg = RunConfig::default();
    apply_params(&mut cfg, p)?;
    let pp = cfg.validate().map_err(|e| e.to_string())?;
    let xs = args
        .iter()
        .map(|s| parse_scalar(pp.prec, s).ok_or_else(|| format!("not a number: `{s}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let v = QSpecial::new(&pp).eval_named(name, &xs).map_err(|e| e.to_string())?;
    println!("{:.*}", digits, v.value);
    Ok(ExitCode::SUCCESS)
}

fn baseline_diff(base: &PathBuf, fresh: &PathBuf) -> Result<ExitCode, String> {
    let read = |p: &PathBuf| ReportBundle::read(p).map_err(|e| format!("{}: {e}", p.display()));
    let d = diff(&read(base)?, &read(fresh)?);
    for e in &d {
        println!("{e}");
    }
    Ok(if d.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => run(a),
        Cmd::Eval { name, args, params, digits } => eval(&name, &args, &params, digits),
        Cmd::Baseline { cmd: BaselineCmd::Diff { baseline, fresh } } => baseline_diff(&baseline, &fresh),
        Cmd::List { n } => {
            suites::names(n).iter().for_each(|s| println!("{s}"));
            Ok(ExitCode::SUCCESS)
        }
    };
    res.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
