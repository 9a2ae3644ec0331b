//! Report rendering.
//!
//! JSON is the full serialized [`ExperimentReport`]. TSV starts with `#`
//! header lines carrying the format tag, version, config and trial summary
//! (each as compact JSON), followed by the fold table and, after one blank
//! line, the paired-comparison table. Missing values are written as `-`.

use serde::Serialize;
use std::fmt::Write as _;

use super::{EvalError, ExperimentReport};

pub const REPORT_FORMAT: &str = "simsmooth-report";
/// Bumped whenever a column or field changes meaning.
pub const REPORT_VERSION: u32 = 1;

pub const FOLD_COLUMNS: [&str; 9] = [
    "base_model",
    "method",
    "fold",
    "beta",
    "tuning_error",
    "n",
    "incorrect",
    "ties",
    "error_rate",
];

pub const COMPARISON_COLUMNS: [&str; 7] = [
    "base_model",
    "method",
    "against",
    "mean_diff",
    "t",
    "zero_variance",
    "diffs",
];

fn compact<S: Serialize>(value: &S) -> Result<String, EvalError> {
    serde_json::to_string(value).map_err(|e| EvalError::Config(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String, EvalError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| EvalError::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let report: ExperimentReport =
            serde_json::from_str(text).map_err(|e| EvalError::Config(format!("bad report: {e}")))?;
        if report.format != REPORT_FORMAT || report.version != REPORT_VERSION {
            return Err(EvalError::Config(format!(
                "unsupported report {} v{}",
                report.format, report.version
            )));
        }
        Ok(report)
    }

    pub fn to_tsv(&self) -> Result<String, EvalError> {
        let mut out = String::new();
        // writing into a String cannot fail
        let _ = writeln!(out, "# format\t{REPORT_FORMAT}");
        let _ = writeln!(out, "# version\t{REPORT_VERSION}");
        let _ = writeln!(out, "# config\t{}", compact(&self.config)?);
        let _ = writeln!(out, "# summary\t{}", compact(&self.summary)?);
        let _ = writeln!(out, "{}", FOLD_COLUMNS.join("\t"));
        for r in &self.folds {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.base_model,
                r.method,
                r.fold,
                opt(r.beta),
                opt(r.tuning_error),
                r.n,
                r.incorrect,
                r.ties,
                r.error_rate
            );
        }
        if !self.comparisons.is_empty() {
            out.push('\n');
            let _ = writeln!(out, "{}", COMPARISON_COLUMNS.join("\t"));
            for c in &self.comparisons {
                let d = &c.difference;
                let diffs: Vec<String> = d.diffs.iter().map(f64::to_string).collect();
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    c.base_model,
                    c.method,
                    c.against,
                    d.mean,
                    opt(d.t),
                    d.zero_variance,
                    diffs.join(",")
                );
            }
        }
        Ok(out)
    }
}
