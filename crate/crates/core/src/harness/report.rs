use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::extremes::NormingConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Not evaluated, e.g. too few replications.
    Skipped,
}

/// Inclusive acceptance interval for a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bound {
    pub fn at_most(upper: f64) -> Self {
        Bound {
            lower: None,
            upper: Some(upper),
        }
    }

    pub fn within(lower: f64, upper: f64) -> Self {
        Bound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn admits(&self, value: f64) -> bool {
        !value.is_nan()
            && self.lower.is_none_or(|lo| value >= lo)
            && self.upper.is_none_or(|hi| value <= hi)
    }

    fn render(&self) -> String {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => format!("[{lo:.4}, {hi:.4}]"),
            (None, Some(hi)) => format!("<= {hi:.4}"),
            (Some(lo), None) => format!(">= {lo:.4}"),
            (None, None) => "any".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub name: String,
    /// `None` when the statistic is undefined.
    pub statistic: Option<f64>,
    pub bound: Bound,
    pub status: Status,
    pub mandatory: bool,
    pub sample_sizes: Vec<usize>,
    pub detail: String,
}

impl TestRecord {
    /// Evaluates `statistic` against `bound`; an undefined statistic fails.
    pub fn evaluate(
        name: impl Into<String>,
        statistic: Option<f64>,
        bound: Bound,
        mandatory: bool,
        sample_sizes: Vec<usize>,
        detail: impl Into<String>,
    ) -> Self {
        let status = match statistic {
            Some(s) if bound.admits(s) => Status::Pass,
            _ => Status::Fail,
        };
        TestRecord {
            name: name.into(),
            statistic,
            bound,
            status,
            mandatory,
            sample_sizes,
            detail: detail.into(),
        }
    }

    pub fn skipped(name: impl Into<String>, mandatory: bool, sample_sizes: Vec<usize>, reason: impl Into<String>) -> Self {
        TestRecord {
            name: name.into(),
            statistic: None,
            bound: Bound {
                lower: None,
                upper: None,
            },
            status: Status::Skipped,
            mandatory,
            sample_sizes,
            detail: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Pass iff every mandatory record passed.
pub fn verdict_of(records: &[TestRecord]) -> Verdict {
    if records.iter().filter(|r| r.mandatory).all(TestRecord::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub verdict: Verdict,
    pub particles: usize,
    pub replications: usize,
    pub norming: NormingConstants,
    pub tests: Vec<TestRecord>,
    /// `mean(Z)² / mean(Z²) · R` of the Girsanov weights, when computed.
    pub effective_sample_size: Option<f64>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(
        name: String,
        particles: usize,
        replications: usize,
        norming: NormingConstants,
        tests: Vec<TestRecord>,
        effective_sample_size: Option<f64>,
        notes: Vec<String>,
        provenance: Provenance,
    ) -> Self {
        Report {
            name,
            verdict: verdict_of(&tests),
            particles,
            replications,
            norming,
            tests,
            effective_sample_size,
            notes,
            provenance,
        }
    }

    pub fn find(&self, name: &str) -> Option<&TestRecord> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let _ = writeln!(
            out,
            "experiment {}  N={}  R={}  verdict {}",
            self.name, self.particles, self.replications, verdict
        );
        let _ = writeln!(
            out,
            "norming ({}): a={:.6e} b={:.6e}",
            self.norming.source.label(),
            self.norming.a,
            self.norming.b
        );
        let width = self.tests.iter().map(|t| t.name.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>22}  {:<7}  {:<9}  n",
            "test", "statistic", "bound", "status", "mandatory"
        );
        for t in &self.tests {
            let stat = t.statistic.map_or("undefined".to_string(), |s| format!("{s:.6}"));
            let status = match t.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let sizes: Vec<String> = t.sample_sizes.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(
                out,
                "{:<width$}  {:>12}  {:>22}  {:<7}  {:<9}  {}",
                t.name,
                stat,
                t.bound.render(),
                status,
                if t.mandatory { "yes" } else { "no" },
                sizes.join("/")
            );
        }
        if let Some(ess) = self.effective_sample_size {
            let _ = writeln!(out, "effective sample size of Girsanov weights: {ess:.1}");
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(
            out,
            "config {}  seed {}  version {}",
            self.provenance.config_hash, self.provenance.seed, self.provenance.code_version
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(mandatory: bool, value: f64) -> TestRecord {
        TestRecord::evaluate("t", Some(value), Bound::at_most(1.0), mandatory, vec![10], "")
    }

    #[test]
    fn bounds_are_inclusive_and_reject_nan() {
        assert!(Bound::at_most(0.0).admits(0.0));
        assert!(Bound::within(0.85, 1.15).admits(1.15));
        assert!(!Bound::within(0.85, 1.15).admits(0.84));
        assert!(!Bound::at_most(1.0).admits(f64::NAN));
    }

    #[test]
    fn verdict_follows_mandatory_records_only() {
        assert_eq!(verdict_of(&[record(true, 0.5), record(false, 2.0)]), Verdict::Pass);
        assert_eq!(verdict_of(&[record(true, 0.5), record(true, 2.0)]), Verdict::Fail);
        let skipped = TestRecord::skipped("s", true, vec![1], "too few");
        assert_eq!(verdict_of(&[skipped.clone()]), Verdict::Fail);
        assert_eq!(verdict_of(&[TestRecord { mandatory: false, ..skipped }]), Verdict::Pass);
        assert_eq!(verdict_of(&[]), Verdict::Pass);
        let undefined = TestRecord::evaluate("u", None, Bound::at_most(1.0), true, vec![], "");
        assert_eq!(undefined.status, Status::Fail);
    }
}
