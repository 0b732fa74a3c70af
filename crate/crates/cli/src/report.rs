//! Run reports: a versioned JSON document, a plain-text table, and the
//! capacity table as CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use coopstore::eavesdropper::{LeakageReport, SweepRow};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA: &str = "coopstore.report/v1";

/// One pass/fail line.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Context only; cannot fail.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub info: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub phase: String,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub schema: &'static str,
    pub command: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub capacity_table: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub leakage: Vec<LeakageReport>,
    /// Command-specific sections: lemma results, attack transcripts, repair logs.
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub sections: serde_json::Map<String, Value>,
    pub timings: Vec<Timing>,
    pub passed: bool,
}

impl ReportDoc {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        ReportDoc {
            schema: SCHEMA,
            command: command.to_string(),
            config: config.clone(),
            checks: Vec::new(),
            capacity_table: Vec::new(),
            leakage: Vec::new(),
            sections: serde_json::Map::new(),
            timings: Vec::new(),
            passed: true,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, detail: detail.into(), info: false });
    }

    /// Records an informational line that cannot fail the run.
    pub fn note(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed: true, detail: detail.into(), info: true });
    }

    pub fn section(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Format(e.to_string()))?;
        self.sections.insert(key.to_string(), v);
        Ok(())
    }

    pub fn time(&mut self, phase: &str, started: std::time::Instant) {
        self.timings.push(Timing { phase: phase.to_string(), millis: started.elapsed().as_secs_f64() * 1e3 });
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let c = &self.config;
        let p = &c.params;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} [{}] n={} k={} d={} t={} alpha={} B={} over {} seed={}",
            self.command,
            c.variant.name(),
            p.n,
            p.k,
            p.d,
            p.t,
            p.alpha,
            p.file_size,
            c.field,
            c.seed
        );
        if !self.capacity_table.is_empty() {
            let _ = writeln!(out, "{:>3} {:>3} {:>10} {:>8} {:>9} {:>10}", "l1", "l2", "placements", "measured", "predicted", "mismatches");
            for r in &self.capacity_table {
                let measured = if r.measured_min == r.measured_max {
                    r.measured_min.to_string()
                } else {
                    format!("{}..{}", r.measured_min, r.measured_max)
                };
                let _ = writeln!(
                    out,
                    "{:>3} {:>3} {:>10} {:>8} {:>9} {:>10}",
                    r.l1,
                    r.l2,
                    r.placements,
                    measured,
                    r.predicted.to_string(),
                    r.mismatches
                );
            }
        }
        for l in &self.leakage {
            let _ = writeln!(
                out,
                "leak E={:?} F={:?}: {} symbols ({:.2} bits), capacity {} (predicted {})",
                l.eve.observed(),
                l.eve.downloads(),
                l.leaked_symbols,
                l.leaked_symbols as f64 * (c.params.q as f64).log2(),
                l.measured_capacity,
                l.predicted_capacity
            );
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for ch in &self.checks {
            let tag = match (ch.info, ch.passed) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = writeln!(out, "{tag}  {:width$}  {}", ch.name, ch.detail);
        }
        let _ = writeln!(out, "{}", if self.passed { "result: PASS" } else { "result: FAIL" });
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        let fail = |e: csv::Error| CliError::Format(format!("{}: {e}", path.display()));
        w.write_record(["l1", "l2", "placements", "measured_min", "measured_max", "predicted", "mismatches"]).map_err(fail)?;
        for r in &self.capacity_table {
            w.write_record([
                r.l1.to_string(),
                r.l2.to_string(),
                r.placements.to_string(),
                r.measured_min.to_string(),
                r.measured_max.to_string(),
                r.predicted.to_string(),
                r.mismatches.to_string(),
            ])
            .map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}
