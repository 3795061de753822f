//! Machine-readable relation reports, JSON-lines bundles and baseline diffs.
//!
//! A bundle file is one header line `{"kind":"header","schema_version":..}`
//! followed by one `{"kind":"report",..}` line per suite, sorted by suite
//! name. Wall time is only written when explicitly requested so that two runs
//! with the same configuration produce identical files.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::ParamRecord;

pub const SCHEMA_VERSION: u32 = 1;

/// Residuals that are not finite are stored as this value (JSON has no inf/NaN).
pub const NON_FINITE: f64 = f64::MAX;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported schema version {0}")]
    Version(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub suite: String,
    pub relation: String,
    pub params: ParamRecord,
    pub order: usize,
    pub threshold: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub truncation_bound: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

fn clean(x: f64) -> f64 {
    if x.is_finite() {
        x.abs()
    } else {
        NON_FINITE
    }
}

impl RelationReport {
    pub fn new(suite: &str, relation: &str, params: ParamRecord, order: usize, threshold: f64) -> Self {
        RelationReport {
            suite: suite.to_string(),
            relation: relation.to_string(),
            params,
            order,
            threshold,
            residuals: Vec::new(),
            max_residual: 0.0,
            truncation_bound: 0.0,
            pass: false,
            notes: Vec::new(),
            wall_ms: None,
        }
    }

    pub fn push(&mut self, residual: f64) {
        let r = clean(residual);
        self.residuals.push(r);
        self.max_residual = self.max_residual.max(r);
    }

    /// Record a truncation bound; the largest one wins.
    pub fn bound(&mut self, b: f64) {
        self.truncation_bound = self.truncation_bound.max(clean(b));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Fold another report's samples, bound and notes into this one.
    pub fn absorb(&mut self, other: &RelationReport) {
        for &r in &other.residuals {
            self.push(r);
        }
        self.bound(other.truncation_bound);
        self.notes.extend(other.notes.iter().cloned());
    }

    /// Fix the verdict: pass iff there is at least one sample, the largest
    /// residual is below the threshold and the truncation bound below a tenth of it.
    pub fn finish(mut self) -> Self {
        self.pass = !self.residuals.is_empty()
            && self.max_residual < self.threshold
            && self.truncation_bound < self.threshold / 10.0;
        self
    }

    /// Force a failure with an explanation (used for errors inside a suite).
    pub fn fail(mut self, why: impl Into<String>) -> Self {
        self.notes.push(why.into());
        self.push(f64::INFINITY);
        self.pass = false;
        self
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {:<22} max_residual={:.3e} bound={:.3e} threshold={:.0e} samples={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.max_residual,
            self.truncation_bound,
            self.threshold,
            self.residuals.len()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleHeader {
    pub kind: String,
    pub schema_version: u32,
    pub tool: String,
    pub config: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub header: BundleHeader,
    pub reports: Vec<RelationReport>,
}

#[derive(Serialize, Deserialize)]
struct ReportLine {
    kind: String,
    #[serde(flatten)]
    report: RelationReport,
}

impl ReportBundle {
    pub fn new(config: BTreeMap<String, String>, mut reports: Vec<RelationReport>) -> Self {
        reports.sort_by(|a, b| a.suite.cmp(&b.suite));
        ReportBundle {
            header: BundleHeader {
                kind: "header".into(),
                schema_version: SCHEMA_VERSION,
                tool: "ellfree".into(),
                config,
            },
            reports,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn to_jsonl(&self, with_wall_time: bool) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.reports {
            let mut report = r.clone();
            if !with_wall_time {
                report.wall_ms = None;
            }
            let line = ReportLine { kind: "report".into(), report };
            out.push_str(&serde_json::to_string(&line).expect("report serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, ReportError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(ReportError::Parse { line: 1, msg: "empty file".into() })?;
        let header: BundleHeader =
            serde_json::from_str(first).map_err(|e| ReportError::Parse { line: 1, msg: e.to_string() })?;
        if header.kind != "header" {
            return Err(ReportError::Parse { line: 1, msg: "first line is not a header".into() });
        }
        if header.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Version(header.schema_version));
        }
        let mut reports = Vec::new();
        for (i, l) in lines {
            let rl: ReportLine =
                serde_json::from_str(l).map_err(|e| ReportError::Parse { line: i + 1, msg: e.to_string() })?;
            reports.push(rl.report);
        }
        Ok(ReportBundle { header, reports })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, ReportError> {
        Self::from_jsonl(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &std::path::Path, with_wall_time: bool) -> Result<(), ReportError> {
        std::fs::write(path, self.to_jsonl(with_wall_time))?;
        Ok(())
    }
}

/// Factor beyond which a residual change counts as drift.
pub const DRIFT_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub enum DiffEntry {
    MissingInFresh(String),
    NewInFresh(String),
    PassChanged { suite: String, baseline: bool, fresh: bool },
    Drift { suite: String, baseline: f64, fresh: f64 },
}

impl fmt::Display for DiffEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffEntry::MissingInFresh(s) => write!(f, "missing  {s}: present in baseline only"),
            DiffEntry::NewInFresh(s) => write!(f, "new      {s}: present in fresh report only"),
            DiffEntry::PassChanged { suite, baseline, fresh } => {
                write!(f, "verdict  {suite}: {} -> {}", verdict(*baseline), verdict(*fresh))
            }
            DiffEntry::Drift { suite, baseline, fresh } => {
                write!(f, "drift    {suite}: max_residual {baseline:.3e} -> {fresh:.3e}")
            }
        }
    }
}

fn verdict(p: bool) -> &'static str {
    if p {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Structural and numerical differences between an archived and a fresh bundle.
///
/// Residuals below `threshold * 1e-6` are treated as equal to that floor, so
/// rounding noise far below the acceptance level is not reported as drift.
pub fn diff(baseline: &ReportBundle, fresh: &ReportBundle) -> Vec<DiffEntry> {
    let b: BTreeMap<_, _> = baseline.reports.iter().map(|r| (r.suite.clone(), r)).collect();
    let f: BTreeMap<_, _> = fresh.reports.iter().map(|r| (r.suite.clone(), r)).collect();
    let mut out = Vec::new();
    for (name, rb) in &b {
        let Some(rf) = f.get(name) else {
            out.push(DiffEntry::MissingInFresh(name.clone()));
            continue;
        };
        if rb.pass != rf.pass {
            out.push(DiffEntry::PassChanged { suite: name.clone(), baseline: rb.pass, fresh: rf.pass });
        }
        let floor = (rb.threshold.min(rf.threshold) * 1e-6).max(f64::MIN_POSITIVE);
        let x = rb.max_residual.max(floor);
        let y = rf.max_residual.max(floor);
        if x / y > DRIFT_FACTOR || y / x > DRIFT_FACTOR {
            out.push(DiffEntry::Drift { suite: name.clone(), baseline: rb.max_residual, fresh: rf.max_residual });
        }
    }
    for name in f.keys() {
        if !b.contains_key(name) {
            out.push(DiffEntry::NewInFresh(name.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec() -> ParamRecord {
        ParamRecord { n: 2, q: "0.4".into(), r: "6.3".into(), c: 1, prec: 128 }
    }

    #[test]
    fn pass_rule_includes_truncation_bound() {
        let mut r = RelationReport::new("x", "x", rec(), 24, 1e-20);
        r.push(1e-30);
        r.bound(1e-20);
        assert!(!r.clone().finish().pass);
        let mut s = RelationReport::new("x", "x", rec(), 24, 1e-20);
        s.push(1e-30);
        s.bound(1e-40);
        assert!(s.finish().pass);
        assert!(!RelationReport::new("x", "x", rec(), 24, 1e-20).finish().pass);
    }

    #[test]
    fn jsonl_roundtrip_and_infinite_residuals() {
        let mut r = RelationReport::new("b", "rel", rec(), 24, 1e-20);
        r.push(f64::INFINITY);
        let bundle = ReportBundle::new(BTreeMap::new(), vec![r.finish()]);
        let text = bundle.to_jsonl(false);
        let back = ReportBundle::from_jsonl(&text).unwrap();
        assert_eq!(back, bundle);
        assert_eq!(back.reports[0].max_residual, NON_FINITE);
    }

    #[test]
    fn diff_detects_missing_and_drift() {
        let mk = |name: &str, res: f64| {
            let mut r = RelationReport::new(name, name, rec(), 24, 1e-20);
            r.push(res);
            r.finish()
        };
        let a = ReportBundle::new(BTreeMap::new(), vec![mk("a", 1e-30), mk("b", 1e-30)]);
        let b = ReportBundle::new(BTreeMap::new(), vec![mk("a", 1e-22)]);
        let d = diff(&a, &b);
        assert!(d.contains(&DiffEntry::MissingInFresh("b".into())));
        assert!(d.iter().any(|e| matches!(e, DiffEntry::Drift { suite, .. } if suite == "a")));
        assert!(diff(&a, &a).is_empty());
    }
}
