//! Result manifest: config echo, estimates with references, verdicts.

use std::path::{Path, PathBuf};

use bakerdim_core::dimension::{DimensionEstimate, FitMethod};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Fit diagnostics copied from a [`DimensionEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub scale_min: f64,
    pub scale_max: f64,
    pub scales_used: usize,
    pub dropped_scales: usize,
    pub r_squared: f64,
    pub method: FitMethod,
    /// CSV holding the per-scale statistics the fit was made from.
    pub per_scale_csv: Option<String>,
}

impl FitSummary {
    pub fn from_estimate(est: &DimensionEstimate, csv: Option<String>) -> Self {
        Self {
            scale_min: est.scale_window.0,
            scale_max: est.scale_window.1,
            scales_used: est.counts.len() - est.dropped_scales.len(),
            dropped_scales: est.dropped_scales.len(),
            r_squared: est.r_squared,
            method: est.method,
            per_scale_csv: csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub quantity: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub reference: Option<f64>,
    pub reference_label: Option<String>,
    pub tolerance: Option<f64>,
    /// `|value - reference| <= tolerance` when both exist.
    pub within_tolerance: Option<bool>,
    pub fit: Option<FitSummary>,
}

impl Estimate {
    pub fn new(quantity: impl Into<String>, value: f64) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            stderr: None,
            reference: None,
            reference_label: None,
            tolerance: None,
            within_tolerance: None,
            fit: None,
        }
    }

    pub fn dimension(quantity: impl Into<String>, est: &DimensionEstimate, csv: Option<String>) -> Self {
        Self {
            stderr: Some(est.slope_stderr),
            fit: Some(FitSummary::from_estimate(est, csv)),
            ..Self::new(quantity, est.value)
        }
    }

    pub fn with_reference(mut self, label: impl Into<String>, reference: f64, tolerance: Option<f64>) -> Self {
        self.reference = Some(reference);
        self.reference_label = Some(label.into());
        self.tolerance = tolerance;
        self.within_tolerance = tolerance.map(|t| (self.value - reference).abs() <= t);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config: ExperimentConfig,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    /// The only field that varies between identical runs.
    pub wall_clock_seconds: f64,
}

/// Collects a scenario's results while it runs.
#[derive(Debug)]
pub struct Recorder {
    pub out_dir: PathBuf,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl Recorder {
    pub fn new(out_dir: &Path) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            estimates: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn estimate(&mut self, e: Estimate) {
        self.estimates.push(e);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn warn(&mut self, s: impl Into<String>) {
        let s = s.into();
        eprintln!("warning: {s}");
        self.warnings.push(s);
    }

    /// Writes `bytes` into the output directory and lists the file.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> CliResult<String> {
        write_atomic(&self.out_dir, name, bytes)?;
        self.outputs.push(name.to_string());
        Ok(name.to_string())
    }

    pub fn emit_csv(&mut self, name: &str, csv: &crate::output::Csv) -> CliResult<String> {
        self.emit(name, csv.render().as_bytes())
    }

    pub fn finish(self, scenario: &str, config: ExperimentConfig, wall_clock_seconds: f64) -> Manifest {
        let verdict = if self.checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: scenario.to_string(),
            config,
            estimates: self.estimates,
            checks: self.checks,
            verdict,
            notes: self.notes,
            warnings: self.warnings,
            outputs: self.outputs,
            wall_clock_seconds,
        }
    }
}

impl Manifest {
    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::Run(e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        write_atomic(dir, MANIFEST_FILE, self.to_json()?.as_bytes())
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
