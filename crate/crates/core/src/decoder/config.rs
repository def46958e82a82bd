use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::Quantization;

/// Message domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Probability-domain sum-product.
    Dmpa,
    /// Log domain with `log Σ exp ≈ max`.
    MaxLog,
}

/// Initial metric for a residual `r = y_k − Σ x`.
///
/// | variant | DMPA            | Max-Log      |
/// |---------|-----------------|--------------|
/// | exact   | `exp(−|r|²/N0)` | `−|r|²/N0`   |
/// | a1      | `exp(−|r|/N0)`  | `−|r|/N0`    |
/// | a2      | `exp(−|r|²)`    | `−|r|²`      |
/// | a3      | `exp(−|r|)`     | `−|r|`       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approximation {
    Exact,
    A1,
    A2,
    A3,
}

impl Approximation {
    pub const ALL: [Approximation; 4] = [
        Approximation::Exact,
        Approximation::A1,
        Approximation::A2,
        Approximation::A3,
    ];

    pub fn uses_noise_density(&self) -> bool {
        matches!(self, Approximation::Exact | Approximation::A1)
    }

    pub fn squared(&self) -> bool {
        matches!(self, Approximation::Exact | Approximation::A2)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Approximation::Exact => "exact",
            Approximation::A1 => "a1",
            Approximation::A2 => "a2",
            Approximation::A3 => "a3",
        }
    }
}

/// Which message tables the stability test watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitor {
    #[default]
    Both,
    ResourceToLayer,
    LayerToResource,
}

impl Monitor {
    pub fn resource_to_layer(&self) -> bool {
        matches!(self, Monitor::Both | Monitor::ResourceToLayer)
    }

    pub fn layer_to_resource(&self) -> bool {
        matches!(self, Monitor::Both | Monitor::LayerToResource)
    }
}

/// How a message vector's change between iterations is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMeasure {
    /// `‖V − V_prev‖₂ ≤ ε·‖V_prev‖₂` over the whole vector.
    #[default]
    VectorNorm,
    /// `|V − V_prev| ≤ ε·|V_prev|` for every entry of the vector.
    Entrywise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyTermination {
    pub epsilon: f64,
}

/// One row of an SNR-indexed adaption table: from `from_snr_db` upwards use
/// `alpha`/`beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptStep {
    pub from_snr_db: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdaption {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Optional SNR-dependent overrides, ascending in `from_snr_db`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<AdaptStep>,
}

impl Default for SelfAdaption {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            schedule: Vec::new(),
        }
    }
}

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_ALPHA: f64 = 1.1;
pub const DEFAULT_BETA: f64 = 0.9;
/// Below this magnitude a previous value is too small to divide by and the
/// stability test falls back to `|V − V_prev| ≤ ε·δ`.
pub const DEFAULT_RELATIVE_FLOOR: f64 = 1e-12;

/// Log-domain range control at layer nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogNormalization {
    /// On with quantization, off in floating point.
    #[default]
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub approximation: Approximation,
    pub max_iterations: usize,
    #[serde(default)]
    pub early_termination: Option<EarlyTermination>,
    #[serde(default)]
    pub self_adaption: Option<SelfAdaption>,
    #[serde(default)]
    pub quantization: Option<Quantization>,
    #[serde(default)]
    pub log_normalization: LogNormalization,
    #[serde(default)]
    pub monitor: Monitor,
    #[serde(default)]
    pub stability_measure: StabilityMeasure,
    #[serde(default = "default_floor")]
    pub relative_floor: f64,
}

fn default_floor() -> f64 {
    DEFAULT_RELATIVE_FLOOR
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::MaxLog,
            approximation: Approximation::Exact,
            max_iterations: 5,
            early_termination: None,
            self_adaption: None,
            quantization: None,
            log_normalization: LogNormalization::Auto,
            monitor: Monitor::Both,
            stability_measure: StabilityMeasure::VectorNorm,
            relative_floor: DEFAULT_RELATIVE_FLOOR,
        }
    }
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm, approximation: Approximation, max_iterations: usize) -> Self {
        Self {
            algorithm,
            approximation,
            max_iterations,
            ..Self::default()
        }
    }

    /// Max-Log with the square- and division-free metric.
    pub fn max_log_a3(max_iterations: usize) -> Self {
        Self::new(Algorithm::MaxLog, Approximation::A3, max_iterations)
    }

    pub fn with_early_termination(mut self, epsilon: f64) -> Self {
        self.early_termination = Some(EarlyTermination { epsilon });
        self
    }

    pub fn with_self_adaption(mut self, epsilon: f64, alpha: f64, beta: f64) -> Self {
        self.self_adaption = Some(SelfAdaption {
            epsilon,
            alpha,
            beta,
            schedule: Vec::new(),
        });
        self
    }

    pub fn with_quantization(mut self, q: Quantization) -> Self {
        self.quantization = Some(q);
        self
    }

    pub fn log_normalization_active(&self) -> bool {
        match self.log_normalization {
            LogNormalization::On => true,
            LogNormalization::Off => false,
            LogNormalization::Auto => self.quantization.is_some(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if let Some(et) = &self.early_termination {
            if !(et.epsilon > 0.0) {
                return Err(Error::Config(format!(
                    "epsilon must be > 0, got {}",
                    et.epsilon
                )));
            }
        }
        if let Some(sa) = &self.self_adaption {
            if !(sa.epsilon > 0.0) {
                return Err(Error::Config(format!(
                    "epsilon must be > 0, got {}",
                    sa.epsilon
                )));
            }
            check_factors(sa.alpha, sa.beta)?;
            for step in &sa.schedule {
                check_factors(step.alpha, step.beta)?;
            }
            if sa
                .schedule
                .windows(2)
                .any(|w| w[0].from_snr_db >= w[1].from_snr_db)
            {
                return Err(Error::Config(
                    "adaption schedule must be ascending in SNR".into(),
                ));
            }
        }
        if let Some(q) = &self.quantization {
            if !q.input.is_valid() || !q.intermediate.is_valid() {
                return Err(Error::Config(format!("invalid fixed-point formats {q:?}")));
            }
        }
        if !(self.relative_floor > 0.0) {
            return Err(Error::Config("relative_floor must be > 0".into()));
        }
        Ok(())
    }

    /// Resolves SNR-indexed adaption factors for one operating point.
    pub fn for_snr(&self, snr_db: f64) -> Self {
        let mut cfg = self.clone();
        if let Some(sa) = cfg.self_adaption.as_mut() {
            if let Some(step) = sa.schedule.iter().rev().find(|s| s.from_snr_db <= snr_db) {
                sa.alpha = step.alpha;
                sa.beta = step.beta;
            }
        }
        cfg
    }

    /// Short label used in reports, e.g. `maxlog-a3-i5-et0.01`.
    pub fn label(&self) -> String {
        let mut s = format!(
            "{}-{}-i{}",
            match self.algorithm {
                Algorithm::Dmpa => "dmpa",
                Algorithm::MaxLog => "maxlog",
            },
            self.approximation.name(),
            self.max_iterations
        );
        if let Some(sa) = &self.self_adaption {
            s.push_str(&format!("-adapt{}/{}/{}", sa.epsilon, sa.alpha, sa.beta));
        } else if let Some(et) = &self.early_termination {
            s.push_str(&format!("-et{}", et.epsilon));
        }
        if self.quantization.is_some() {
            s.push_str("-q");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_factors(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 1.0) {
        return Err(Error::Config(format!("alpha must be > 1, got {alpha}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Config(format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    Ok(())
}
