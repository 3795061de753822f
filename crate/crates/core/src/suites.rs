//! Named relation suites, glob selection and the batch runner.

use std::time::Instant;

use rayon::prelude::*;
use regex::Regex;

use crate::config::{ConfigError, RunConfig};
use crate::opecalc::Bench;
use crate::report::{RelationReport, ReportBundle};
use crate::{currents, fusionwn, modealg, qspecial, rmatrix};

/// Everything a suite may need, built once per run.
pub struct Context {
    pub cfg: RunConfig,
    pub bench: Bench,
}

type Runner = Box<dyn Fn(&Context) -> RelationReport + Send + Sync>;

pub struct Suite {
    pub name: String,
    pub run: Runner,
}

fn suite(name: impl Into<String>, run: impl Fn(&Context) -> RelationReport + Send + Sync + 'static) -> Suite {
    Suite { name: name.into(), run: Box::new(run) }
}

/// Every suite available at rank `n`, sorted by name.
pub fn registry(n: usize) -> Vec<Suite> {
    let mut out = vec![
        suite("qs.bracket", |cx| {
            let pts = qspecial::random_points(cx.cfg.samples, cx.cfg.seed, cx.bench.pp.prec);
            qspecial::check_brackets(&cx.bench.qs, &pts)
        }),
        suite("qs.theta", |cx| {
            let pts = qspecial::random_points(cx.cfg.samples, cx.cfg.seed, cx.bench.pp.prec);
            qspecial::check_theta(&cx.bench.qs, &pts)
        }),
        suite("qs.contour", |cx| qspecial::check_contour(&cx.bench.qs, cx.cfg.quad_points)),
        suite("qs.phi", |cx| {
            let pts = qspecial::random_points(cx.cfg.samples, cx.cfg.seed, cx.bench.pp.prec);
            qspecial::check_phi_unitarity(&cx.bench.qs, &pts)
        }),
        suite("modes.consistency", |cx| {
            cx.bench.ma.consistency_check(&modealg::mode_range(cx.cfg.max_mode), 1e-25)
        }),
        suite("modes.solve", |cx| cx.bench.ma.solve_check(&modealg::mode_range(cx.cfg.max_mode), 1e-25)),
        suite("modes.antisym", |cx| cx.bench.ma.antisymmetry_check(&modealg::mode_range(cx.cfg.max_mode), 1e-25)),
        suite("cur.psi", |cx| currents::verify_psi_exchange(&cx.bench)),
        suite("cur.psi1", |cx| currents::verify_psi1_exchange(&cx.bench)),
        suite("rmat.dybe", |cx| {
            rmatrix::check_dybe(&cx.bench.qs, cx.cfg.draws, cx.cfg.seed, cx.cfg.dybe_convention)
        }),
        suite("rmat.weights", |cx| {
            let (u, s) = rmatrix::generic_point(&cx.bench.pp);
            rmatrix::check_weight_conservation(&cx.bench.qs, &u, &s)
        }),
        suite("rmat.init", |cx| {
            let (_, s) = rmatrix::generic_point(&cx.bench.pp);
            rmatrix::check_initial(&cx.bench.qs, &s)
        }),
        suite("wn.lambda", |cx| fusionwn::verify_lambda_exchange(&cx.bench)),
        suite("wn.tt", |cx| fusionwn::verify_tt_suite(&cx.bench)),
        suite("wn.smatrix", |cx| fusionwn::verify_smatrix_unitarity(&cx.bench)),
        suite("wn.tn_nontrivial", |cx| fusionwn::verify_tn_nontrivial(&cx.bench)),
        suite("wn.cn", |cx| fusionwn::fusion_leading_check(&cx.bench)),
    ];
    for i in 1..n {
        for j in 1..n {
            out.push(suite(format!("cur.ee.{i}{j}"), move |cx| currents::verify_ee(&cx.bench, i, j)));
            out.push(suite(format!("cur.ff.{i}{j}"), move |cx| currents::verify_ff(&cx.bench, i, j)));
            out.push(suite(format!("cur.ef.{i}{j}"), move |cx| currents::verify_ef_delta(&cx.bench, i, j)));
        }
        out.push(suite(format!("cur.h.{i}"), move |cx| currents::verify_h_decomposition(&cx.bench, i)));
    }
    for j1 in 1..=n {
        for j2 in 1..=n {
            out.push(suite(format!("cur.kk.{j1}{j2}"), move |cx| currents::verify_kk(&cx.bench, j1, j2)));
        }
        for j2 in 1..n {
            out.push(suite(format!("cur.ke.{j1}{j2}"), move |cx| currents::verify_ke(&cx.bench, j1, j2)));
            out.push(suite(format!("cur.kf.{j1}{j2}"), move |cx| currents::verify_kf(&cx.bench, j1, j2)));
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Names of every suite at rank `n`.
pub fn names(n: usize) -> Vec<String> {
    registry(n).into_iter().map(|s| s.name).collect()
}

/// A name filter built from shell-style globs (`*`, `?`). A pattern without
/// wildcards also selects everything below it, so `cur` matches `cur.ee.11`.
#[derive(Clone, Debug)]
pub struct Filter(Vec<Regex>);

impl Filter {
    pub fn new(patterns: &[String]) -> Result<Self, ConfigError> {
        let res = patterns
            .iter()
            .map(|p| {
                let mut re = String::from("^");
                for ch in p.chars() {
                    match ch {
                        '*' => re.push_str(".*"),
                        '?' => re.push('.'),
                        c => re.push_str(&regex::escape(&c.to_string())),
                    }
                }
                if !p.contains(['*', '?']) {
                    re.push_str(r"(\..*)?");
                }
                re.push('$');
                Regex::new(&re).map_err(|e| ConfigError::Field { field: "suite".into(), msg: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Filter(res))
    }

    pub fn matches(&self, name: &str) -> bool {
        self.0.is_empty() || self.0.iter().any(|r| r.is_match(name))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("suite filter {0:?} selects no suite")]
    NoSuite(Vec<String>),
}

/// Validate the configuration, run the selected suites in parallel and
/// collect them into a bundle ordered by suite name.
pub fn run(cfg: &RunConfig) -> Result<ReportBundle, RunError> {
    let pp = cfg.validate()?;
    let filter = Filter::new(&cfg.suites)?;
    let selected: Vec<Suite> = registry(pp.n).into_iter().filter(|s| filter.matches(&s.name)).collect();
    if selected.is_empty() {
        return Err(RunError::NoSuite(cfg.suites.clone()));
    }
    let cx = Context { cfg: cfg.clone(), bench: Bench::new(&pp, cfg.samples, cfg.seed, cfg.order) };
    let reports: Vec<RelationReport> = selected
        .par_iter()
        .map(|s| {
            let t = Instant::now();
            let mut rep = (s.run)(&cx);
            rep.suite = s.name.clone();
            rep.wall_ms = Some(t.elapsed().as_millis() as u64);
            rep
        })
        .collect();
    Ok(ReportBundle::new(cfg.echo(), reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_and_prefix_selection() {
        let f = Filter::new(&["rmat.*".into(), "wn.tt".into(), "cur".into()]).unwrap();
        assert!(f.matches("rmat.dybe"));
        assert!(f.matches("wn.tt"));
        assert!(!f.matches("wn.tn_nontrivial"));
        assert!(f.matches("cur.ee.11"));
        assert!(!f.matches("current"));
        assert!(Filter::new(&[]).unwrap().matches("anything"));
    }

    #[test]
    fn registry_names_are_unique_and_sorted() {
        for n in 2..=4 {
            let names = names(n);
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(names, sorted);
        }
        let n3 = names(3);
        for want in ["rmat.dybe", "rmat.weights", "rmat.init", "wn.lambda", "wn.tt", "wn.smatrix", "wn.tn_nontrivial", "wn.cn"] {
            assert!(n3.iter().any(|s| s == want), "{want}");
        }
    }
}
