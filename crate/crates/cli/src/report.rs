//! Run reports, their JSON and markdown renderings, and structural diffs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use twoproduct_core::algebra::Witness;

use crate::config::SuiteConfig;
use crate::suites::{self, Expected};

/// Bumped whenever a field is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub anchor: String,
    pub expected: Expected,
    pub verdict: Verdict,
    pub samples: usize,
    pub failure_count: usize,
    pub failures: Vec<Witness>,
    pub witnesses: Vec<Witness>,
    pub max_residual: f64,
    pub notes: BTreeMap<String, String>,
}

/// Wall times are deliberately absent: the report bytes depend only on the
/// build, the config and the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: String,
    pub config: SuiteConfig,
    pub suites: Vec<SuiteReport>,
    pub verdict: Verdict,
}

/// Runs the selected suites in parallel. Reports come back sorted by suite
/// name, with wall times alongside.
pub fn run(cfg: &SuiteConfig) -> (RunReport, Vec<(String, Duration)>) {
    let selected = cfg.selected();
    let mut results: Vec<(SuiteReport, Duration)> = selected
        .par_iter()
        .map(|name| {
            let suite = suites::find(name).expect("validated suite name");
            let start = Instant::now();
            let o = suite.run(cfg);
            let elapsed = start.elapsed();
            let report = SuiteReport {
                name: suite.name.to_string(),
                anchor: suite.anchor.to_string(),
                expected: suite.expected,
                verdict: Verdict::from_bool(o.passed(suite.expected)),
                samples: o.samples,
                failure_count: o.failure_count,
                failures: o.failures,
                witnesses: o.witnesses,
                max_residual: o.max_residual,
                notes: o.notes,
            };
            (report, elapsed)
        })
        .collect();
    results.sort_by(|a, b| a.0.name.cmp(&b.0.name));
    let verdict = Verdict::from_bool(results.iter().all(|(r, _)| r.verdict == Verdict::Pass));
    let timings = results.iter().map(|(r, t)| (r.name.clone(), *t)).collect();
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        suites: results.into_iter().map(|(r, _)| r).collect(),
        verdict,
    };
    (report, timings)
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# twoproduct verification report\n");
        let _ = writeln!(
            s,
            "version {} · schema {} · seed {} · verdict **{}**\n",
            self.version, self.schema_version, self.config.seed, self.verdict
        );
        let _ = writeln!(s, "| suite | expected | verdict | samples | failures | max residual |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for r in &self.suites {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {:.3e} |",
                r.name, r.expected, r.verdict, r.samples, r.failure_count, r.max_residual
            );
        }
        for r in &self.suites {
            if r.failures.is_empty() && r.witnesses.is_empty() && r.notes.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n## {}\n\n{}\n", r.name, r.anchor);
            for (k, v) in &r.notes {
                let _ = writeln!(s, "- {k}: {v}");
            }
            for (label, list) in [("witness", &r.witnesses), ("failure", &r.failures)] {
                for w in list {
                    let _ = writeln!(s, "- {label} (residual {:.3e}): {}", w.residual, w.inputs.join("; "));
                }
            }
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteChange {
    pub name: String,
    /// Changed field names, or `added` / `removed`.
    pub fields: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Changeset {
    /// Top-level fields outside the suite results that differ.
    pub metadata: Vec<String>,
    pub suites: Vec<SuiteChange>,
}

impl Changeset {
    pub fn is_empty(&self) -> bool {
        self.metadata.is_empty() && self.suites.is_empty()
    }

    pub fn metadata_only(&self) -> bool {
        !self.metadata.is_empty() && self.suites.is_empty()
    }
}

impl std::fmt::Display for Changeset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return writeln!(f, "no differences");
        }
        if self.metadata_only() {
            writeln!(f, "metadata-only changes")?;
        }
        for m in &self.metadata {
            writeln!(f, "metadata: {m}")?;
        }
        for s in &self.suites {
            writeln!(f, "suite {}: {}", s.name, s.fields.join(", "))?;
        }
        Ok(())
    }
}

/// Parses a report, refusing anything written under another schema.
pub fn parse_report(text: &str) -> Result<RunReport, DiffError> {
    let v: Value = serde_json::from_str(text).map_err(|e| DiffError::SchemaMismatch(e.to_string()))?;
    match v.get("schema_version").and_then(Value::as_u64) {
        Some(n) if n == SCHEMA_VERSION as u64 => {}
        Some(n) => {
            return Err(DiffError::SchemaMismatch(format!(
                "version {n}, expected {SCHEMA_VERSION}"
            )))
        }
        None => return Err(DiffError::SchemaMismatch("missing schema_version".into())),
    }
    serde_json::from_value(v).map_err(|e| DiffError::SchemaMismatch(e.to_string()))
}

pub fn read_report(path: &std::path::Path) -> Result<RunReport, DiffError> {
    let text = std::fs::read_to_string(path).map_err(|e| DiffError::Io(path.display().to_string(), e))?;
    parse_report(&text)
}

fn object(v: Value) -> serde_json::Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => serde_json::Map::new(),
    }
}

/// Field-by-field comparison. Suite entries are matched by name; everything
/// else at the top level counts as metadata except the overall verdict,
/// which follows from the suites.
pub fn diff_reports(old: &RunReport, new: &RunReport) -> Changeset {
    let mut out = Changeset::default();
    let (a, b) = (
        object(serde_json::to_value(old).expect("serializes")),
        object(serde_json::to_value(new).expect("serializes")),
    );
    for key in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
        if key == "suites" || key == "verdict" {
            continue;
        }
        if a.get(key) != b.get(key) {
            out.metadata.push(key.clone());
        }
    }
    let by_name = |r: &RunReport| -> BTreeMap<String, serde_json::Map<String, Value>> {
        r.suites
            .iter()
            .map(|s| (s.name.clone(), object(serde_json::to_value(s).expect("serializes"))))
            .collect()
    };
    let (sa, sb) = (by_name(old), by_name(new));
    let names: std::collections::BTreeSet<&String> = sa.keys().chain(sb.keys()).collect();
    for name in names {
        let fields = match (sa.get(name), sb.get(name)) {
            (Some(x), Some(y)) => x.keys().filter(|k| x.get(*k) != y.get(*k)).cloned().collect(),
            (None, Some(_)) => vec!["added".to_string()],
            (Some(_), None) => vec!["removed".to_string()],
            (None, None) => unreachable!(),
        };
        if !fields.is_empty() {
            out.suites.push(SuiteChange {
                name: name.clone(),
                fields,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            suites: vec!["minimizer-nonuniqueness".into(), "quantion-dalembertian".into()],
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn reports_round_trip_and_sort() {
        let (r, t) = run(&small());
        assert_eq!(t.len(), 2);
        assert_eq!(r.suites[0].name, "minimizer-nonuniqueness");
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(parse_report(&r.to_json()).unwrap(), r);
        assert!(r.to_markdown().contains("| quantion-dalembertian | pass | pass |"));
    }

    #[test]
    fn diff_classifies_changes() {
        let (r, _) = run(&small());
        assert!(diff_reports(&r, &r).is_empty());
        let mut bumped = r.clone();
        bumped.version = "9.9.9".into();
        let d = diff_reports(&r, &bumped);
        assert!(d.metadata_only() && d.metadata == vec!["version".to_string()]);
        let mut broken = r.clone();
        broken.suites[1].verdict = Verdict::Fail;
        broken.suites.remove(0);
        let d = diff_reports(&r, &broken);
        assert_eq!(d.suites.len(), 2);
        assert_eq!(d.suites[0].fields, vec!["removed".to_string()]);
        assert_eq!(d.suites[1].fields, vec!["verdict".to_string()]);
    }

    #[test]
    fn schema_is_checked() {
        assert!(matches!(
            parse_report("{\"schema_version\": 99}"),
            Err(DiffError::SchemaMismatch(_))
        ));
        assert!(matches!(parse_report("[]"), Err(DiffError::SchemaMismatch(_))));
    }
}
