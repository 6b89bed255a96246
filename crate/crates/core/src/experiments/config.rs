use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BERRY_ESSEEN_CONSTANT;
use crate::channel::{Channel, Distribution};
use crate::codebook::{DEFAULT_ENUMERATION_CAP, DEFAULT_MAX_CODEWORDS};
use crate::converse::DEFAULT_GRID_LEVELS;
use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TvSweep,
    Concentration,
    SecondOrder,
    ConverseAudit,
    BoundsTable,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::TvSweep => "tv-sweep",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::SecondOrder => "second-order",
            ExperimentKind::ConverseAudit => "converse-audit",
            ExperimentKind::BoundsTable => "bounds-table",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelSpec {
    Bsc { crossover: f64 },
    Dmc { rows: Vec<Vec<f64>> },
    Identity { size: usize },
    Awgn { noise_variance: f64 },
    Rayleigh { fading_power: f64, noise_variance: f64 },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Channel> {
        let ch = match self {
            ChannelSpec::Bsc { crossover } => Channel::bsc(*crossover),
            ChannelSpec::Dmc { rows } => Channel::dmc(rows.clone()),
            ChannelSpec::Identity { size } => Channel::identity(*size),
            ChannelSpec::Awgn { noise_variance } => Channel::awgn(*noise_variance),
            ChannelSpec::Rayleigh {
                fading_power,
                noise_variance,
            } => Channel::rayleigh(*fading_power, *noise_variance),
        };
        ch.map_err(|e| Error::config("channel", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSpec {
    /// Uniform over the channel's finite input alphabet.
    Uniform,
    Pmf {
        probs: Vec<f64>,
    },
    Gaussian {
        power: f64,
        #[serde(default)]
        mean: f64,
    },
}

impl InputSpec {
    pub fn build(&self, ch: &Channel) -> Result<Distribution> {
        let d = match self {
            InputSpec::Uniform => match ch.input_alphabet().size() {
                Some(k) => Distribution::uniform(k),
                None => return Err(Error::config("input", "uniform input needs a finite channel input")),
            },
            InputSpec::Pmf { probs } => Distribution::pmf(probs.clone()),
            InputSpec::Gaussian { power, mean } => Distribution::gaussian(*mean, *power),
        };
        let d = d.map_err(|e| Error::config("input", e.to_string()))?;
        if !d.alphabet().compatible(ch.input_alphabet()) {
            return Err(Error::config(
                "input",
                format!(
                    "{} does not live on the channel input {}",
                    d.describe(),
                    ch.input_alphabet()
                ),
            ));
        }
        Ok(d)
    }
}

/// One experiment. Written as a TOML file with `version = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub kind: Option<ExperimentKind>,
    pub channel: ChannelSpec,
    pub input: InputSpec,
    #[serde(default)]
    pub n: Vec<usize>,
    /// Rates in nats.
    #[serde(default)]
    pub rates: Vec<f64>,
    /// Rates as multiples of the mutual information.
    #[serde(default)]
    pub rate_factors: Vec<f64>,
    #[serde(default = "default_codebooks")]
    pub num_codebooks: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub enumeration_cap: usize,
    /// Largest codebook drawn; second-order rows beyond it are skipped.
    #[serde(default = "default_max_codewords")]
    pub max_codewords: usize,
    /// Typicality slack for the P₁/P₂ split in sweeps; no split when absent.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Record wall-clock time per codebook (makes output non-reproducible).
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_delta")]
    pub lemma1_delta: f64,
    #[serde(default = "default_lemma1_epsilon")]
    pub lemma1_epsilon: f64,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default = "default_be")]
    pub berry_esseen_constant: f64,
    /// Output quantizer levels for continuous-output converse audits.
    #[serde(default)]
    pub quantizer_levels: Vec<usize>,
    #[serde(default = "default_grid_levels")]
    pub input_grid_levels: usize,
    /// Half-width of the input grid; defaults to four input standard deviations.
    #[serde(default)]
    pub input_grid_halfwidth: Option<f64>,
    /// Rényi orders used in the bounds table.
    #[serde(default)]
    pub alphas: Vec<f64>,
}

fn default_codebooks() -> usize {
    100
}
fn default_mc_samples() -> usize {
    100_000
}
fn default_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}
fn default_max_codewords() -> usize {
    DEFAULT_MAX_CODEWORDS
}
fn default_delta() -> f64 {
    1.0
}
fn default_lemma1_epsilon() -> f64 {
    0.05
}
fn default_be() -> f64 {
    BERRY_ESSEEN_CONSTANT
}
fn default_grid_levels() -> usize {
    DEFAULT_GRID_LEVELS
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config {
            field: e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_default(),
            message: e.message().to_string(),
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", cfg.version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config { field, message } => {
                let field = match line_of(&text, &field) {
                    Some(line) => format!("{} (line {line})", path.display()),
                    None if field.is_empty() => path.display().to_string(),
                    None => format!("{}: {field}", path.display()),
                };
                Error::Config { field, message }
            }
            other => other,
        })
    }

    pub fn id(&self, kind: ExperimentKind) -> String {
        self.id.clone().unwrap_or_else(|| kind.as_str().to_string())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::config("seed", "a master seed is required (config `seed` or --seed)"))
    }

    /// Checks that the config is usable for `kind`.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(Error::config(
                    "kind",
                    format!("config is for `{}`, not `{}`", k.as_str(), kind.as_str()),
                ));
            }
        }
        self.seed()?;
        if self.n.is_empty() {
            return Err(Error::config("n", "block length list is empty"));
        }
        if self.n.contains(&0) {
            return Err(Error::config("n", "block lengths must be positive"));
        }
        if self
            .rates
            .iter()
            .chain(&self.rate_factors)
            .any(|r| !(*r >= 0.0 && r.is_finite()))
        {
            return Err(Error::config("rates", "rates must be nonnegative and finite"));
        }
        let needs_rates = !matches!(kind, ExperimentKind::SecondOrder);
        if needs_rates && self.rates.is_empty() && self.rate_factors.is_empty() {
            return Err(Error::config("rates", "give `rates` or `rate_factors`"));
        }
        let needs_trials = matches!(
            kind,
            ExperimentKind::TvSweep | ExperimentKind::Concentration | ExperimentKind::ConverseAudit
        );
        if needs_trials && self.num_codebooks == 0 {
            return Err(Error::config("num_codebooks", "must be positive"));
        }
        if self.mc_samples == 0 {
            return Err(Error::config("mc_samples", "must be positive"));
        }
        if self.max_codewords == 0 {
            return Err(Error::config("max_codewords", "must be positive"));
        }
        if self.enumeration_cap == 0 {
            return Err(Error::config("enumeration_cap", "must be positive"));
        }
        if let Some(e) = self.epsilon {
            if !e.is_finite() {
                return Err(Error::config("epsilon", "must be finite"));
            }
        }
        if !(self.lemma1_delta >= 0.0 && self.lemma1_delta <= 1.0) {
            return Err(Error::config("lemma1_delta", "must lie in [0, 1]"));
        }
        if !(self.berry_esseen_constant > 0.0) {
            return Err(Error::config("berry_esseen_constant", "must be positive"));
        }
        if kind == ExperimentKind::SecondOrder {
            for (field, v) in [("xi", self.xi), ("c", self.c), ("d", self.d)] {
                if v.is_none() {
                    return Err(Error::config(field, "required for second-order runs"));
                }
            }
        }
        if self.quantizer_levels.iter().any(|&k| k < 2 || !k.is_power_of_two()) {
            return Err(Error::config("quantizer_levels", "levels must be powers of two ≥ 2"));
        }
        if self.input_grid_levels == 0 {
            return Err(Error::config("input_grid_levels", "must be positive"));
        }
        if self.alphas.iter().any(|a| !(*a > 1.0)) {
            return Err(Error::config("alphas", "Rényi orders must exceed 1"));
        }
        let ch = self.channel.build()?;
        self.input.build(&ch)?;
        if kind == ExperimentKind::ConverseAudit && !ch.output_alphabet().is_finite() {
            if self.quantizer_levels.is_empty() {
                return Err(Error::config(
                    "quantizer_levels",
                    "continuous outputs need quantizer levels",
                ));
            }
            if !matches!(self.channel, ChannelSpec::Awgn { .. }) {
                return Err(Error::config(
                    "channel",
                    "converse audits on continuous outputs support AWGN only",
                ));
            }
        }
        Ok(())
    }
}

/// Line number of a `bytes a..b` span produced by [`ExperimentConfig::from_toml_str`].
fn line_of(text: &str, field: &str) -> Option<usize> {
    let start: usize = field.strip_prefix("bytes ")?.split("..").next()?.parse().ok()?;
    Some(text[..start.min(text.len())].matches('\n').count() + 1)
}
