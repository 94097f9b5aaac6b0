//! Experiment configuration: a flat TOML table with a schema version.
//! Unknown keys are rejected. Missing keys take per-scenario defaults, and
//! [`ExperimentConfig::resolve`] writes them back so the manifest echoes
//! every value that was used.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use bakerdim_core::coupling::{cos_sin_coupling, make_cohomologous_coupling, make_probe, SIN_SQ_TANH};
use bakerdim_core::dimension::ScaleWindow;
use bakerdim_core::rng::{derive_seed, stream};
use bakerdim_core::{make_trig_coupling, CouplingFunction, Params, TrigEnsemble, TrigTerm};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    CrossSection,
    Sweep,
    Prevalence,
    Counterexample,
    Lyapunov,
    Dimension,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CrossSection,
        Scenario::Sweep,
        Scenario::Prevalence,
        Scenario::Counterexample,
        Scenario::Lyapunov,
        Scenario::Dimension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::CrossSection => "cross-section",
            Scenario::Sweep => "sweep",
            Scenario::Prevalence => "prevalence",
            Scenario::Counterexample => "counterexample",
            Scenario::Lyapunov => "lyapunov",
            Scenario::Dimension => "dimension",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Zero,
    CosSin,
    Probe,
    /// Explicit `trig_terms`.
    Trig,
    /// One draw from the random trig ensemble, keyed by the seed.
    TrigEnsemble,
    /// `g̃∘B_α − β·g̃` with `g̃ = sin²(2πx)·tanh(y)`.
    CohomologousSin2Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Box,
    Information,
    Correlation,
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingKind>,
    /// Rows `[coeff, freq_x, freq_y, phase_x, phase_y]` for `coupling = "trig"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trig_terms: Option<Vec<[f64; 5]>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Pair and pointwise window `[2^-scale_max_log2, 2^-scale_min_log2]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_min_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_max_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales_per_octave: Option<usize>,
    /// Box and information window, same convention. Cell masses run out long
    /// before pair counts do, so this sits coarser.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_scale_min_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_scale_max_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimators: Option<Vec<Estimator>>,
    /// Averaged pointwise window, same convention.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_scale_min_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_scale_max_log2: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_centres: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_max_checks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_min_points: Option<usize>,
    /// Scales with fewer close pairs are dropped from correlation fits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_min_count: Option<u64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_max_freq: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_zero_member: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_d2: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_section_draws: Option<usize>,
    /// Cell side `2^-cell_log2` for the cross-section spread statistics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell_log2: Option<i32>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renorm_every: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub telescoping_points: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_dimension: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_telescoping: Option<f64>,
    /// Required gap below `D_L` for the counterexample estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation_margin: Option<f64>,
}

fn fill<T: Clone>(slot: &mut Option<T>, default: T) {
    if slot.is_none() {
        *slot = Some(default);
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Err(bad("config is empty"));
        }
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks the schema and scenario, applies scenario defaults and the
    /// seed override, and validates ranges.
    pub fn resolve(mut self, scenario: Scenario, seed_override: Option<u64>) -> CliResult<Self> {
        match self.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(bad(format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"))),
            None => return Err(bad("missing schema_version")),
        }
        if let Some(sc) = self.scenario {
            if sc != scenario {
                return Err(bad(format!("config is for scenario {sc}, not {scenario}")));
            }
        }
        self.scenario = Some(scenario);
        if let Some(seed) = seed_override {
            self.seed = Some(seed);
        }
        fill(&mut self.seed, 0);
        fill(&mut self.tolerance_dimension, 0.08);
        fill(&mut self.tolerance_exponent, 1e-6);
        fill(&mut self.tolerance_telescoping, 1e-10);
        match scenario {
            Scenario::CrossSection => {
                fill(&mut self.alpha, 0.4);
                fill(&mut self.beta, 0.43);
                fill(&mut self.coupling, CouplingKind::CosSin);
                fill(&mut self.window_x, 0.3);
                fill(&mut self.window_z, 0.3);
                fill(&mut self.window_width, 0.02);
                fill(&mut self.cross_section_draws, 4_000_000);
                fill(&mut self.cell_log2, 6);
            }
            Scenario::Sweep => {
                fill(&mut self.alpha, 0.05);
                fill(&mut self.beta_min, 0.01);
                fill(&mut self.beta_max, 0.49);
                fill(&mut self.beta_step, 0.01);
                fill(&mut self.sweep_d2, false);
                if self.sweep_d2 == Some(true) {
                    self.fill_pairs(200_000);
                }
            }
            Scenario::Prevalence => {
                fill(&mut self.alpha, 0.1);
                fill(&mut self.beta, 0.4);
                fill(&mut self.ensemble_size, 10);
                fill(&mut self.ensemble_sigma, 0.5);
                fill(&mut self.ensemble_max_freq, 4);
                fill(&mut self.required_fraction, 0.9);
                fill(&mut self.lambda_grid, vec![0.5]);
                fill(&mut self.include_zero_member, true);
                self.fill_pairs(1_000_000);
            }
            Scenario::Counterexample => {
                fill(&mut self.alpha, 0.1);
                fill(&mut self.beta, 0.4);
                fill(&mut self.coupling, CouplingKind::CohomologousSin2Tanh);
                fill(&mut self.telescoping_points, 1000);
                fill(&mut self.separation_margin, 0.06);
                self.fill_pairs(1_000_000);
            }
            Scenario::Lyapunov => {
                fill(&mut self.alpha, 0.3);
                fill(&mut self.beta, 0.2);
                fill(&mut self.coupling, CouplingKind::TrigEnsemble);
                fill(&mut self.n_iters, 10_000);
                fill(&mut self.renorm_every, 8);
            }
            Scenario::Dimension => {
                fill(&mut self.alpha, 0.25);
                fill(&mut self.beta, 0.25);
                fill(&mut self.coupling, CouplingKind::Zero);
                fill(&mut self.estimators, vec![Estimator::Information, Estimator::Correlation]);
                fill(&mut self.grid_scale_min_log2, 1);
                fill(&mut self.grid_scale_max_log2, 5);
                fill(&mut self.pointwise_scale_min_log2, 2);
                fill(&mut self.pointwise_scale_max_log2, 6);
                fill(&mut self.pointwise_centres, 500);
                self.fill_pairs(1_000_000);
            }
        }
        if matches!(scenario, Scenario::Prevalence | Scenario::Sweep) {
            fill(&mut self.coupling, CouplingKind::Zero);
        }
        self.validate()?;
        Ok(self)
    }

    fn fill_pairs(&mut self, samples: usize) {
        fill(&mut self.samples, samples);
        fill(&mut self.scale_min_log2, 5);
        fill(&mut self.scale_max_log2, 11);
        fill(&mut self.scales_per_octave, 2);
        fill(&mut self.pair_max_checks, 300_000_000);
        fill(&mut self.pair_min_points, 30_000);
        fill(&mut self.pair_min_count, 1000);
    }

    fn validate(&self) -> CliResult<()> {
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            Params::new(a, b).map_err(|e| bad(e.to_string()))?;
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 0.5) {
                return Err(bad(format!("alpha must lie in (0, 1/2), got {a}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.scale_min_log2, self.scale_max_log2) {
            if lo >= hi {
                return Err(bad("scale_min_log2 must be below scale_max_log2"));
            }
        }
        for (lo, hi, name) in [
            (self.grid_scale_min_log2, self.grid_scale_max_log2, "grid_scale"),
            (self.pointwise_scale_min_log2, self.pointwise_scale_max_log2, "pointwise_scale"),
        ] {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo >= hi {
                    return Err(bad(format!("{name}_min_log2 must be below {name}_max_log2")));
                }
            }
        }
        if let (Some(lo), Some(hi), Some(step)) = (self.beta_min, self.beta_max, self.beta_step) {
            if !(lo > 0.0 && hi < 0.5 && lo <= hi && step > 0.0) {
                return Err(bad("beta grid must satisfy 0 < beta_min <= beta_max < 1/2 and beta_step > 0"));
            }
        }
        if self.scenario == Some(Scenario::Prevalence) {
            if self.alpha >= self.beta {
                return Err(bad("prevalence needs alpha < beta"));
            }
            if self.ensemble_size < Some(10) {
                return Err(bad("prevalence needs ensemble_size >= 10"));
            }
        }
        if self.scenario == Some(Scenario::Counterexample) && self.alpha >= self.beta {
            return Err(bad("counterexample needs alpha < beta"));
        }
        if self.coupling == Some(CouplingKind::Trig) && self.trig_terms.is_none() {
            return Err(bad("coupling = \"trig\" needs trig_terms"));
        }
        if self.samples == Some(0) || self.n_iters == Some(0) {
            return Err(bad("sample and iteration counts must be positive"));
        }
        if let Some(w) = self.window_width {
            if !(w > 0.0 && w <= 1.0) {
                return Err(bad("window_width must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn params(&self) -> CliResult<Params> {
        let a = self.alpha.ok_or_else(|| bad("alpha missing"))?;
        let b = self.beta.ok_or_else(|| bad("beta missing"))?;
        Params::new(a, b).map_err(|e| bad(e.to_string()))
    }

    pub fn ensemble(&self) -> TrigEnsemble {
        let d = TrigEnsemble::default();
        TrigEnsemble {
            max_freq: self.ensemble_max_freq.unwrap_or(d.max_freq),
            sigma: self.ensemble_sigma.unwrap_or(d.sigma),
        }
    }

    /// The configured coupling `g`.
    pub fn coupling_function(&self) -> CliResult<CouplingFunction> {
        let p = self.params()?;
        Ok(match self.coupling.unwrap_or(CouplingKind::Zero) {
            CouplingKind::Zero => CouplingFunction::Zero,
            CouplingKind::CosSin => cos_sin_coupling(),
            CouplingKind::Probe => make_probe(),
            CouplingKind::Trig => {
                let terms = self
                    .trig_terms
                    .as_ref()
                    .ok_or_else(|| bad("trig_terms missing"))?
                    .iter()
                    .map(|t| TrigTerm::new(t[0], t[1], t[2], t[3], t[4]))
                    .collect();
                make_trig_coupling(terms).map_err(|e| bad(e.to_string()))?
            }
            CouplingKind::TrigEnsemble => self.ensemble().draw(&mut stream(derive_seed(self.seed(), "coupling"), 0)),
            CouplingKind::CohomologousSin2Tanh => {
                make_cohomologous_coupling(&p, CouplingFunction::Analytic(SIN_SQ_TANH))
            }
        })
    }

    pub fn pair_window(&self) -> CliResult<ScaleWindow> {
        let lo = self.scale_min_log2.ok_or_else(|| bad("scale_min_log2 missing"))?;
        let hi = self.scale_max_log2.ok_or_else(|| bad("scale_max_log2 missing"))?;
        ScaleWindow::dyadic(lo, hi).map_err(|e| bad(e.to_string()))
    }

    pub fn grid_window(&self) -> CliResult<ScaleWindow> {
        let lo = self.grid_scale_min_log2.ok_or_else(|| bad("grid_scale_min_log2 missing"))?;
        let hi = self.grid_scale_max_log2.ok_or_else(|| bad("grid_scale_max_log2 missing"))?;
        ScaleWindow::dyadic(lo, hi).map_err(|e| bad(e.to_string()))
    }

    pub fn pointwise_window(&self) -> CliResult<ScaleWindow> {
        let lo = self.pointwise_scale_min_log2.ok_or_else(|| bad("pointwise_scale_min_log2 missing"))?;
        let hi = self.pointwise_scale_max_log2.ok_or_else(|| bad("pointwise_scale_max_log2 missing"))?;
        ScaleWindow::dyadic(lo, hi).map_err(|e| bad(e.to_string()))
    }

    pub fn pair_options(&self) -> bakerdim_core::dimension::PairOptions {
        let d = bakerdim_core::dimension::PairOptions::default();
        bakerdim_core::dimension::PairOptions {
            max_checks: self.pair_max_checks.unwrap_or(d.max_checks),
            min_points: self.pair_min_points.unwrap_or(d.min_points),
            per_octave: self.scales_per_octave.unwrap_or(d.per_octave),
            min_pairs: self.pair_min_count.unwrap_or(d.min_pairs),
        }
    }

    pub fn tolerance_dimension(&self) -> f64 {
        self.tolerance_dimension.unwrap_or(0.08)
    }
}
