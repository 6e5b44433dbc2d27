use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extremes::{NormingSource, Rect, RegionSet};
use crate::limits::{TailParams, DEFAULT_TRUNCATION};
use crate::model::{
    make_gaussian_model, make_rankbased_model, normal_initial, GaussianMeanFieldParams, ModelSpec, RankBasedParams,
};
use crate::sde::MeanFieldMode;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CHAOS_EXTREMES_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    Gaussian {
        kappa: f64,
        sigma: f64,
        m0: f64,
        sigma0: f64,
    },
    /// `profile` holds polynomial coefficients in increasing degree.
    RankBased {
        profile: Vec<f64>,
        initial_mean: f64,
        initial_sd: f64,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Gaussian {
            kappa: 1.0,
            sigma: std::f64::consts::SQRT_2,
            m0: 0.0,
            sigma0: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelSpec> {
        match self {
            ModelConfig::Gaussian {
                kappa,
                sigma,
                m0,
                sigma0,
            } => make_gaussian_model(GaussianMeanFieldParams {
                kappa: *kappa,
                sigma: *sigma,
                m0: *m0,
                sigma0: *sigma0,
            }),
            ModelConfig::RankBased {
                profile,
                initial_mean,
                initial_sd,
            } => {
                if profile.is_empty() {
                    return Err(Error::Config("rank-based profile needs at least one coefficient".into()));
                }
                if !(*initial_sd > 0.0) {
                    return Err(Error::Config(format!("initial_sd must be positive, got {initial_sd}")));
                }
                make_rankbased_model(RankBasedParams::polynomial(
                    profile.clone(),
                    normal_initial(*initial_mean, *initial_sd),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub particles: usize,
    pub t_end: f64,
    pub steps: usize,
    pub seed: u64,
    pub replications: u64,
    pub mean_field: MeanFieldMode,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            particles: 1000,
            t_end: 1.0,
            steps: 100,
            seed: 20_240_901,
            replications: 2000,
            mean_field: MeanFieldMode::Fast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawSource {
    /// Closed form when the model has one, otherwise a law cloud.
    #[default]
    Auto,
    ClosedForm,
    Cloud,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawConfig {
    pub source: LawSource,
    pub cloud_paths: usize,
    pub picard_iterations: usize,
    pub tolerance: f64,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            source: LawSource::Auto,
            cloud_paths: 100_000,
            picard_iterations: 3,
            tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormingConfig {
    /// Unset: exact Gaussian quantiles when the model has a closed-form law,
    /// empirical quantiles otherwise.
    pub source: Option<NormingSource>,
    /// Calibration sample size is `factor · N · max(1, ln N)`.
    pub calibration_factor: f64,
}

impl Default for NormingConfig {
    fn default() -> Self {
        NormingConfig {
            source: None,
            calibration_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestsConfig {
    /// Extreme value index of the limit law.
    pub gamma: f64,
    /// Each entry is a union of rectangles `[index_lo, index_hi, value_lo, value_hi]`.
    pub regions: Vec<Vec<[f64; 4]>>,
    /// Decreasing thresholds `x_1 ≥ … ≥ x_k`; the top-k depth is their count.
    pub topk_thresholds: Vec<f64>,
    pub truncation: usize,
    /// Two-sample KS passes when `D ≤ c · √((n + m)/(n m))`.
    pub ks_coefficient: f64,
    pub z_limit: f64,
    pub dispersion_band: [f64; 2],
    pub gev_ks_limit: f64,
    pub topk_limit_slack: f64,
    pub girsanov: bool,
}

impl Default for TestsConfig {
    fn default() -> Self {
        TestsConfig {
            gamma: 0.0,
            regions: vec![vec![[0.0, 1.0, 0.0, f64::INFINITY]]],
            topk_thresholds: vec![1.0, 0.5, 0.0],
            truncation: DEFAULT_TRUNCATION,
            ks_coefficient: 1.63,
            z_limit: 3.0,
            dispersion_band: [0.85, 1.15],
            gev_ks_limit: 0.08,
            topk_limit_slack: 0.02,
            girsanov: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub save_endpoints: bool,
    /// Pattern CSVs keep points with normalized value at least this cut.
    pub pattern_cut: f64,
    /// Write replication 0's full paths for both systems in binary form.
    pub save_paths: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("chaos-output"),
            save_endpoints: true,
            pattern_cut: -3.0,
            save_paths: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelConfig,
    pub simulation: SimulationConfig,
    pub law: LawConfig,
    pub norming: NormingConfig,
    pub tests: TestsConfig,
    pub output: OutputConfig,
    /// Worker threads; falls back to the environment, then to the core count.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "gaussian".into(),
            model: ModelConfig::default(),
            simulation: SimulationConfig::default(),
            law: LawConfig::default(),
            norming: NormingConfig::default(),
            tests: TestsConfig::default(),
            output: OutputConfig::default(),
            workers: None,
        }
    }
}

impl ExperimentConfig {
    /// Rank-based model with profile `u - 1/2`, `N = 500`, `R = 1000`.
    pub fn rank_based_default() -> Self {
        ExperimentConfig {
            name: "rank-based".into(),
            model: ModelConfig::RankBased {
                profile: vec![-0.5, 1.0],
                initial_mean: 0.0,
                initial_sd: 1.0,
            },
            simulation: SimulationConfig {
                particles: 500,
                replications: 1000,
                ..SimulationConfig::default()
            },
            ..ExperimentConfig::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let sim = &self.simulation;
        if sim.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if sim.particles < 1 || sim.steps < 1 || !(sim.t_end > 0.0 && sim.t_end.is_finite()) {
            return Err(Error::Config("need particles >= 1, steps >= 1 and t_end > 0".into()));
        }
        let tests = &self.tests;
        if tests.topk_thresholds.is_empty() {
            return Err(Error::Config("topk_thresholds must hold at least one threshold (k >= 1)".into()));
        }
        if tests.topk_thresholds.len() > sim.particles {
            return Err(Error::RankOutOfRange {
                k: tests.topk_thresholds.len(),
                n: sim.particles,
            });
        }
        if tests.topk_thresholds.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidThresholds);
        }
        if tests.truncation < tests.topk_thresholds.len() {
            return Err(Error::Config("truncation must be at least the top-k depth".into()));
        }
        if !(tests.dispersion_band[0] <= tests.dispersion_band[1]) {
            return Err(Error::Config("dispersion_band must be [low, high]".into()));
        }
        let tail = self.tail()?;
        for region in self.region_sets()? {
            let nu = crate::limits::poisson_intensity(&region, &tail);
            if !nu.is_finite() {
                return Err(Error::Config("every region needs finite limit intensity".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.norming.calibration_factor >= 10.0) {
            return Err(Error::Config("calibration_factor must be at least 10".into()));
        }
        Ok(())
    }

    pub fn tail(&self) -> Result<TailParams> {
        TailParams::new(self.tests.gamma)
    }

    pub fn region_sets(&self) -> Result<Vec<RegionSet>> {
        self.tests
            .regions
            .iter()
            .map(|rects| {
                let rects = rects
                    .iter()
                    .map(|r| Rect::new(r[0], r[1], r[2], r[3]))
                    .collect::<Result<Vec<_>>>()?;
                RegionSet::new(rects)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Config(format!("invalid region: {e}")))
    }

    /// Explicit setting, then the environment, then the available cores.
    pub fn resolve_workers(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok())
            .filter(|w| *w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Copy without the execution-only settings (worker count, output location).
    pub fn canonical(&self) -> ExperimentConfig {
        let mut canonical = self.clone();
        canonical.workers = None;
        canonical.output.directory = PathBuf::new();
        canonical
    }

    /// SHA-256 of the settings that can change results. Worker count and
    /// output location are excluded.
    pub fn config_hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.canonical().to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
