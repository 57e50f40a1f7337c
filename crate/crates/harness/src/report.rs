//! Line-oriented report records and the JSON summary.

use std::fmt;

use serde::Serialize;

/// Which side of the tolerance a passing value lies on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "cmp", content = "limit", rename_all = "lowercase")]
pub enum Tolerance {
    /// value ≤ limit
    AtMost(f64),
    /// value ≥ limit
    AtLeast(f64),
    /// Recorded only; always passes.
    Info,
}

impl Tolerance {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Tolerance::AtMost(t) => value <= t,
            Tolerance::AtLeast(t) => value >= t,
            Tolerance::Info => true,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::AtMost(t) => write!(f, "<={t}"),
            Tolerance::AtLeast(t) => write!(f, ">={t}"),
            Tolerance::Info => write!(f, "info"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRecord {
    pub experiment: String,
    pub instance: String,
    pub metric: String,
    pub value: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl ReportRecord {
    /// The pass flag is derived, so it always agrees with the tolerance.
    pub fn new(experiment: &str, instance: impl Into<String>, metric: &str, value: f64, tolerance: Tolerance) -> Self {
        ReportRecord {
            experiment: experiment.to_string(),
            instance: instance.into(),
            metric: metric.to_string(),
            value,
            tolerance,
            pass: tolerance.admits(value),
        }
    }

    pub fn line(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ReportRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "experiment={} instance={} metric={} value={} tolerance={} pass={}",
            self.experiment, self.instance, self.metric, self.value, self.tolerance, self.pass
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub records: usize,
    pub failed: usize,
    pub pass: bool,
    pub failures: Vec<ReportRecord>,
}

impl Summary {
    pub fn new(experiment: &str, seed: u64, records: &[ReportRecord]) -> Self {
        let failures: Vec<ReportRecord> = records.iter().filter(|r| !r.pass).cloned().collect();
        Summary {
            experiment: experiment.to_string(),
            seed,
            records: records.len(),
            failed: failures.len(),
            pass: failures.is_empty() && !records.is_empty(),
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// All records as report lines, one per line.
pub fn render(records: &[ReportRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.line());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let r = ReportRecord::new("identity-suite", "ab12", "residual", 1e-13, Tolerance::AtMost(3e-12));
        assert_eq!(
            r.line(),
            "experiment=identity-suite instance=ab12 metric=residual value=0.0000000000001 tolerance=<=0.000000000003 pass=true"
        );
        let r = ReportRecord::new("x", "i", "rate", 0.5, Tolerance::AtLeast(0.99));
        assert!(!r.pass);
    }

    #[test]
    fn summary_needs_records() {
        assert!(!Summary::new("x", 1, &[]).pass);
        let r = ReportRecord::new("x", "i", "m", 1.0, Tolerance::Info);
        let s = Summary::new("x", 1, &[r]);
        assert!(s.pass);
        assert!(s.to_json().contains("\"failed\": 0"));
    }
}
