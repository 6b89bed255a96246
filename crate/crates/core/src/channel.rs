//! Channels, alphabets and distributions.
//!
//! Finite alphabets are evaluated exactly from probability tables. Real-line
//! alphabets are restricted to built-in families (AWGN, Rayleigh fading with
//! the fading gain observed at the receiver, and AWGN followed by an output
//! quantizer) whose conditional densities and output marginals are available
//! in closed form. All log-probabilities are natural logarithms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{normal_interval_prob, normal_log_density};

/// Tolerance on the total mass of probability vectors and kernel rows.
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on the numerically integrated mass of built-in densities.
pub const DENSITY_MASS_TOLERANCE: f64 = 1e-6;

/// A single channel input or output letter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Symbol {
    /// Letter of a finite alphabet, identified by its index.
    Index(usize),
    Real(f64),
    /// Output of a fading channel: the fading gain together with the received value.
    Faded {
        gain: f64,
        value: f64,
    },
}

impl Symbol {
    pub fn index(&self) -> Option<usize> {
        match self {
            Symbol::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn real(&self) -> Option<f64> {
        match self {
            Symbol::Real(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Index(i) => write!(f, "{i}"),
            Symbol::Real(v) => write!(f, "{v}"),
            Symbol::Faded { gain, value } => write!(f, "{gain}:{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Alphabet {
    Finite {
        size: usize,
        labels: Option<Vec<String>>,
    },
    RealLine,
    /// Pairs `(gain, value)` with `gain >= 0`, the output space of a fading
    /// channel whose gain is known at the receiver.
    FadedRealLine,
}

impl Alphabet {
    pub fn finite(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Domain("finite alphabet must have at least one letter".into()));
        }
        Ok(Alphabet::Finite { size, labels: None })
    }

    pub fn labelled(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("finite alphabet must have at least one letter".into()));
        }
        Ok(Alphabet::Finite {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    /// Number of letters, or `None` for a continuous alphabet.
    pub fn size(&self) -> Option<usize> {
        match self {
            Alphabet::Finite { size, .. } => Some(*size),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Alphabet::Finite { .. })
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        match (self, symbol) {
            (Alphabet::Finite { size, .. }, Symbol::Index(i)) => i < size,
            (Alphabet::RealLine, Symbol::Real(v)) => v.is_finite(),
            (Alphabet::FadedRealLine, Symbol::Faded { gain, value }) => {
                *gain >= 0.0 && gain.is_finite() && value.is_finite()
            }
            _ => false,
        }
    }

    pub(crate) fn check(&self, symbol: &Symbol) -> Result<()> {
        if self.contains(symbol) {
            Ok(())
        } else {
            Err(Error::Domain(format!("symbol {symbol} is not in the alphabet {self}")))
        }
    }

    /// Same kind and, for finite alphabets, same size. Labels are ignored.
    pub fn compatible(&self, other: &Alphabet) -> bool {
        match (self, other) {
            (Alphabet::Finite { size: a, .. }, Alphabet::Finite { size: b, .. }) => a == b,
            (Alphabet::RealLine, Alphabet::RealLine) => true,
            (Alphabet::FadedRealLine, Alphabet::FadedRealLine) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Finite { size, .. } => write!(f, "finite:{size}"),
            Alphabet::RealLine => write!(f, "real"),
            Alphabet::FadedRealLine => write!(f, "faded-real"),
        }
    }
}

/// Probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Pmf {
            probs,
            log_probs,
            cumulative,
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("uniform pmf over zero letters".into()));
        }
        Pmf::new(vec![1.0 / size as f64; size])
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::Domain(format!(
                "point mass at {at} outside alphabet of size {size}"
            )));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Pmf::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let idx = self.cumulative.partition_point(|c| *c <= u);
        // Guard against landing on a zero-probability tail letter through rounding.
        let mut idx = idx.min(self.probs.len() - 1);
        while self.probs[idx] == 0.0 && idx > 0 {
            idx -= 1;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Pmf(Pmf),
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Uniform on `[lo, hi]`. Usable as a codebook input distribution; it has
    /// no closed-form output marginal through the continuous channels.
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Output law of a Rayleigh fading channel with Gaussian input: the gain
    /// `h` has `E h² = fading_power` and, given `h`, the value is
    /// `N(h·mean, h²·variance + noise_variance)`.
    FadedGaussian {
        fading_power: f64,
        mean: f64,
        variance: f64,
        noise_variance: f64,
    },
}

impl Distribution {
    pub fn pmf(probs: Vec<f64>) -> Result<Self> {
        Pmf::new(probs).map(Distribution::Pmf)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Pmf::uniform(size).map(Distribution::Pmf)
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "gaussian needs finite mean and positive variance, got N({mean}, {variance})"
            )));
        }
        let mass = trapezoid(
            |x| normal_log_density(x, mean, variance).exp(),
            mean - 12.0 * variance.sqrt(),
            mean + 12.0 * variance.sqrt(),
            4000,
        );
        check_mass("gaussian", mass)?;
        Ok(Distribution::Gaussian { mean, variance })
    }

    pub fn uniform_interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidDistribution(format!(
                "uniform interval [{lo}, {hi}] is empty"
            )));
        }
        Ok(Distribution::Uniform { lo, hi })
    }

    pub(crate) fn faded_gaussian(fading_power: f64, mean: f64, variance: f64, noise_variance: f64) -> Result<Self> {
        let scale = fading_power.sqrt();
        let mass = trapezoid(
            |h| rayleigh_log_density(h, fading_power).exp(),
            0.0,
            12.0 * scale,
            40_000,
        );
        check_mass("faded gaussian", mass)?;
        Ok(Distribution::FadedGaussian {
            fading_power,
            mean,
            variance,
            noise_variance,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Distribution::Pmf(p) => Alphabet::Finite {
                size: p.len(),
                labels: None,
            },
            Distribution::Gaussian { .. } | Distribution::Uniform { .. } => Alphabet::RealLine,
            Distribution::FadedGaussian { .. } => Alphabet::FadedRealLine,
        }
    }

    pub fn as_pmf(&self) -> Option<&Pmf> {
        match self {
            Distribution::Pmf(p) => Some(p),
            _ => None,
        }
    }

    /// Log pmf or log density at `symbol`.
    pub fn log_prob(&self, symbol: &Symbol) -> Result<f64> {
        self.alphabet().check(symbol)?;
        Ok(match (self, symbol) {
            (Distribution::Pmf(p), Symbol::Index(i)) => p.log_probs[*i],
            (Distribution::Gaussian { mean, variance }, Symbol::Real(x)) => normal_log_density(*x, *mean, *variance),
            (Distribution::Uniform { lo, hi }, Symbol::Real(x)) => {
                if *x >= *lo && *x <= *hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            (
                Distribution::FadedGaussian {
                    fading_power,
                    mean,
                    variance,
                    noise_variance,
                },
                Symbol::Faded { gain, value },
            ) => {
                rayleigh_log_density(*gain, *fading_power)
                    + normal_log_density(*value, gain * mean, gain * gain * variance + noise_variance)
            }
            _ => unreachable!("alphabet check admits only matching symbols"),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Symbol {
        match self {
            Distribution::Pmf(p) => Symbol::Index(p.sample(rng)),
            Distribution::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                Symbol::Real(mean + variance.sqrt() * z)
            }
            Distribution::Uniform { lo, hi } => Symbol::Real(rng.random_range(*lo..=*hi)),
            Distribution::FadedGaussian {
                fading_power,
                mean,
                variance,
                noise_variance,
            } => {
                let gain = sample_rayleigh(rng, *fading_power);
                let z: f64 = rng.sample(StandardNormal);
                let sd = (gain * gain * variance + noise_variance).sqrt();
                Symbol::Faded {
                    gain,
                    value: gain * mean + sd * z,
                }
            }
        }
    }

    pub fn sample_block<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Symbol> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    pub fn describe(&self) -> String {
        match self {
            Distribution::Pmf(p) => format!("pmf{:?}", p.probs()),
            Distribution::Gaussian { mean, variance } => format!("gaussian(mean={mean},var={variance})"),
            Distribution::Uniform { lo, hi } => format!("uniform[{lo},{hi}]"),
            Distribution::FadedGaussian { .. } => "faded-gaussian".into(),
        }
    }
}

fn check_mass(what: &str, mass: f64) -> Result<()> {
    if (mass - 1.0).abs() > DENSITY_MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what} density integrates to {mass}"
        )));
    }
    Ok(())
}

fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let h = (hi - lo) / steps as f64;
    let inner: f64 = (1..steps).map(|k| f(lo + k as f64 * h)).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

/// Log density of a Rayleigh gain with `E h² = power`.
pub(crate) fn rayleigh_log_density(h: f64, power: f64) -> f64 {
    if h <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (2.0 * h / power).ln() - h * h / power
}

fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R, power: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    (power * e).sqrt()
}

/// Family tag of a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Dmc,
    Bsc {
        crossover: f64,
    },
    Awgn {
        noise_variance: f64,
    },
    Rayleigh {
        fading_power: f64,
        noise_variance: f64,
    },
    /// AWGN observed through a finite partition of the real line.
    QuantizedAwgn {
        noise_variance: f64,
        levels: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Kernel {
    Table(Vec<Pmf>),
    Awgn { noise_variance: f64 },
    Rayleigh { fading_power: f64, noise_variance: f64 },
    QuantizedAwgn { noise_variance: f64, edges: Vec<f64> },
}

/// A memoryless channel: input and output alphabets plus a stochastic kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    family: Family,
    input: Alphabet,
    output: Alphabet,
    kernel: Kernel,
}

impl Channel {
    /// Discrete memoryless channel from its transition rows, one per input letter.
    pub fn dmc(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::table(Family::Dmc, rows)
    }

    pub fn bsc(crossover: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover) {
            return Err(Error::InvalidChannel(format!(
                "BSC crossover {crossover} not in [0, 1]"
            )));
        }
        Self::table(
            Family::Bsc { crossover },
            vec![vec![1.0 - crossover, crossover], vec![crossover, 1.0 - crossover]],
        )
    }

    /// Noiseless channel on `size` letters.
    pub fn identity(size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::table(Family::Dmc, rows)
    }

    fn table(family: Family, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("no kernel rows".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidChannel("kernel rows have different lengths".into()));
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| Pmf::new(r).map_err(|e| Error::InvalidChannel(format!("row {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Channel {
            family,
            input: Alphabet::finite(rows.len())?,
            output: Alphabet::finite(width)?,
            kernel: Kernel::Table(rows),
        })
    }

    pub fn awgn(noise_variance: f64) -> Result<Self> {
        check_variance("noise variance", noise_variance)?;
        Ok(Channel {
            family: Family::Awgn { noise_variance },
            input: Alphabet::RealLine,
            output: Alphabet::RealLine,
            kernel: Kernel::Awgn { noise_variance },
        })
    }

    /// Rayleigh fading `y = h·x + z` with `E h² = fading_power`; the receiver
    /// observes the pair `(h, y)`.
    pub fn rayleigh(fading_power: f64, noise_variance: f64) -> Result<Self> {
        check_variance("fading power", fading_power)?;
        check_variance("noise variance", noise_variance)?;
        Ok(Channel {
            family: Family::Rayleigh {
                fading_power,
                noise_variance,
            },
            input: Alphabet::RealLine,
            output: Alphabet::FadedRealLine,
            kernel: Kernel::Rayleigh {
                fading_power,
                noise_variance,
            },
        })
    }

    /// AWGN followed by the partition of the real line at the sorted interior
    /// `edges` (`edges.len() + 1` bins).
    pub fn quantized_awgn(noise_variance: f64, edges: Vec<f64>) -> Result<Self> {
        check_variance("noise variance", noise_variance)?;
        if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidChannel(
                "quantizer edges must be finite and strictly increasing".into(),
            ));
        }
        let levels = edges.len() + 1;
        Ok(Channel {
            family: Family::QuantizedAwgn { noise_variance, levels },
            input: Alphabet::RealLine,
            output: Alphabet::finite(levels)?,
            kernel: Kernel::QuantizedAwgn { noise_variance, edges },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    /// Short human-readable name used in result files.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Dmc => format!(
                "dmc({}x{})",
                self.input.size().unwrap_or(0),
                self.output.size().unwrap_or(0)
            ),
            Family::Bsc { crossover } => format!("bsc(p={crossover})"),
            Family::Awgn { noise_variance } => format!("awgn(nv={noise_variance})"),
            Family::Rayleigh {
                fading_power,
                noise_variance,
            } => format!("rayleigh(fp={fading_power},nv={noise_variance})"),
            Family::QuantizedAwgn { noise_variance, levels } => format!("awgn(nv={noise_variance})/q{levels}"),
        }
    }

    /// Transition table for finite-input, finite-output channels.
    pub fn rows(&self) -> Option<&[Pmf]> {
        match &self.kernel {
            Kernel::Table(rows) => Some(rows),
            _ => None,
        }
    }

    /// `ln K(x, {y})` for finite outputs, the log conditional density otherwise.
    pub fn kernel_log_prob(&self, x: &Symbol, y: &Symbol) -> Result<f64> {
        self.input.check(x)?;
        self.output.check(y)?;
        Ok(match (&self.kernel, x, y) {
            (Kernel::Table(rows), Symbol::Index(i), Symbol::Index(j)) => rows[*i].log_probs[*j],
            (Kernel::Awgn { noise_variance }, Symbol::Real(x), Symbol::Real(y)) => {
                normal_log_density(*y, *x, *noise_variance)
            }
            (
                Kernel::Rayleigh {
                    fading_power,
                    noise_variance,
                },
                Symbol::Real(x),
                Symbol::Faded { gain, value },
            ) => rayleigh_log_density(*gain, *fading_power) + normal_log_density(*value, gain * x, *noise_variance),
            (Kernel::QuantizedAwgn { noise_variance, edges }, Symbol::Real(x), Symbol::Index(b)) => {
                let (lo, hi) = bin_bounds(edges, *b);
                normal_interval_prob(lo, hi, *x, *noise_variance).ln()
            }
            _ => unreachable!("alphabet checks admit only matching symbols"),
        })
    }

    /// The row `K(x, ·)` for channels with a finite output alphabet.
    pub fn kernel_row(&self, x: &Symbol) -> Result<Vec<f64>> {
        self.input.check(x)?;
        match (&self.kernel, x) {
            (Kernel::Table(rows), Symbol::Index(i)) => Ok(rows[*i].probs.clone()),
            (Kernel::QuantizedAwgn { noise_variance, edges }, Symbol::Real(x)) => Ok((0..=edges.len())
                .map(|b| {
                    let (lo, hi) = bin_bounds(edges, b);
                    normal_interval_prob(lo, hi, *x, *noise_variance)
                })
                .collect()),
            _ => Err(Error::Domain(format!("{} has no finite output alphabet", self.label()))),
        }
    }

    pub fn sample_output<R: Rng + ?Sized>(&self, x: &Symbol, rng: &mut R) -> Result<Symbol> {
        self.input.check(x)?;
        Ok(match (&self.kernel, x) {
            (Kernel::Table(rows), Symbol::Index(i)) => Symbol::Index(rows[*i].sample(rng)),
            (Kernel::Awgn { noise_variance }, Symbol::Real(x)) => {
                let z: f64 = rng.sample(StandardNormal);
                Symbol::Real(x + noise_variance.sqrt() * z)
            }
            (
                Kernel::Rayleigh {
                    fading_power,
                    noise_variance,
                },
                Symbol::Real(x),
            ) => {
                let gain = sample_rayleigh(rng, *fading_power);
                let z: f64 = rng.sample(StandardNormal);
                Symbol::Faded {
                    gain,
                    value: gain * x + noise_variance.sqrt() * z,
                }
            }
            (Kernel::QuantizedAwgn { noise_variance, edges }, Symbol::Real(x)) => {
                let z: f64 = rng.sample(StandardNormal);
                let y = x + noise_variance.sqrt() * z;
                Symbol::Index(edges.partition_point(|e| *e < y))
            }
            _ => unreachable!("alphabet check admits only matching symbols"),
        })
    }

    /// Passes `x_block` through the `n`-fold extension of the channel. The
    /// output depends only on `x_block` and `seed`.
    pub fn sample_block(&self, x_block: &[Symbol], seed: u64) -> Result<Vec<Symbol>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_block_with(x_block, &mut rng)
    }

    pub fn sample_block_with<R: Rng + ?Sized>(&self, x_block: &[Symbol], rng: &mut R) -> Result<Vec<Symbol>> {
        x_block.iter().map(|x| self.sample_output(x, rng)).collect()
    }

    /// Output law induced by the input distribution `qx`.
    pub fn output_distribution(&self, qx: &Distribution) -> Result<Distribution> {
        if !qx.alphabet().compatible(&self.input) {
            return Err(Error::Domain(format!(
                "input distribution on {} does not match channel input {}",
                qx.alphabet(),
                self.input
            )));
        }
        match (&self.kernel, qx) {
            (Kernel::Table(rows), Distribution::Pmf(p)) => {
                let width = rows[0].len();
                let mut out = vec![0.0; width];
                for (row, &px) in rows.iter().zip(p.probs()) {
                    if px == 0.0 {
                        continue;
                    }
                    for (o, k) in out.iter_mut().zip(row.probs()) {
                        *o += px * k;
                    }
                }
                // Renormalise away accumulated rounding so the result passes validation.
                let total: f64 = out.iter().sum();
                out.iter_mut().for_each(|o| *o /= total);
                Distribution::pmf(out)
            }
            (Kernel::Awgn { noise_variance }, Distribution::Gaussian { mean, variance }) => {
                Distribution::gaussian(*mean, variance + noise_variance)
            }
            (
                Kernel::Rayleigh {
                    fading_power,
                    noise_variance,
                },
                Distribution::Gaussian { mean, variance },
            ) => Distribution::faded_gaussian(*fading_power, *mean, *variance, *noise_variance),
            (Kernel::QuantizedAwgn { noise_variance, edges }, Distribution::Gaussian { mean, variance }) => {
                let total = variance + noise_variance;
                let mut probs: Vec<f64> = (0..=edges.len())
                    .map(|b| {
                        let (lo, hi) = bin_bounds(edges, b);
                        normal_interval_prob(lo, hi, *mean, total)
                    })
                    .collect();
                let s: f64 = probs.iter().sum();
                probs.iter_mut().for_each(|p| *p /= s);
                Distribution::pmf(probs)
            }
            _ => Err(Error::UnsupportedComposition(format!(
                "{} with input {} has no closed-form output marginal",
                self.label(),
                qx.describe()
            ))),
        }
    }

    /// `Σ_j ln dist(y_j)` for a distribution on the output alphabet.
    pub fn product_log_prob(&self, dist: &Distribution, y_block: &[Symbol]) -> Result<f64> {
        if !dist.alphabet().compatible(&self.output) {
            return Err(Error::Domain(format!(
                "distribution on {} is not on the channel output {}",
                dist.alphabet(),
                self.output
            )));
        }
        y_block.iter().map(|y| dist.log_prob(y)).sum()
    }
}

fn check_variance(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidChannel(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

/// Lower and upper boundary of bin `b` (bins are `(lo, hi]`).
pub(crate) fn bin_bounds(edges: &[f64], b: usize) -> (f64, f64) {
    let lo = if b == 0 { f64::NEG_INFINITY } else { edges[b - 1] };
    let hi = if b == edges.len() { f64::INFINITY } else { edges[b] };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bsc_kernel_values() {
        let ch = Channel::bsc(0.25).unwrap();
        let v = ch.kernel_log_prob(&Symbol::Index(0), &Symbol::Index(0)).unwrap();
        assert_relative_eq!(v, 0.75f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(v, -0.2877, epsilon = 1e-4);
    }

    #[test]
    fn identity_kernel_is_deterministic() {
        let ch = Channel::identity(2).unwrap();
        assert_eq!(ch.kernel_log_prob(&Symbol::Index(0), &Symbol::Index(0)).unwrap(), 0.0);
        assert_eq!(
            ch.kernel_log_prob(&Symbol::Index(0), &Symbol::Index(1)).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn awgn_log_density_at_mean() {
        let ch = Channel::awgn(1.0).unwrap();
        let v = ch.kernel_log_prob(&Symbol::Real(0.0), &Symbol::Real(0.0)).unwrap();
        assert_relative_eq!(v, -0.5 * (2.0 * std::f64::consts::PI).ln(), epsilon = 1e-15);
        assert_relative_eq!(v, -0.9189, epsilon = 1e-4);
    }

    #[test]
    fn out_of_alphabet_symbols_are_domain_errors() {
        let ch = Channel::bsc(0.1).unwrap();
        assert!(matches!(
            ch.kernel_log_prob(&Symbol::Index(2), &Symbol::Index(0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ch.kernel_log_prob(&Symbol::Real(0.0), &Symbol::Index(0)),
            Err(Error::Domain(_))
        ));
        let awgn = Channel::awgn(1.0).unwrap();
        assert!(awgn.kernel_log_prob(&Symbol::Index(0), &Symbol::Real(0.0)).is_err());
    }

    #[test]
    fn invalid_constructions_are_rejected() {
        assert!(Channel::dmc(vec![vec![0.5, 0.6]]).is_err());
        assert!(Channel::dmc(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Channel::bsc(1.5).is_err());
        assert!(Channel::awgn(0.0).is_err());
        assert!(Distribution::pmf(vec![0.2, 0.2]).is_err());
        assert!(Distribution::pmf(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::gaussian(0.0, -1.0).is_err());
        assert!(Alphabet::finite(0).is_err());
    }

    #[test]
    fn output_distribution_examples() {
        let bsc = Channel::bsc(0.25).unwrap();
        let out = bsc.output_distribution(&Distribution::uniform(2).unwrap()).unwrap();
        assert_eq!(out.as_pmf().unwrap().probs(), &[0.5, 0.5]);

        let dmc = Channel::dmc(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let out = dmc
            .output_distribution(&Distribution::pmf(vec![0.5, 0.5]).unwrap())
            .unwrap();
        let p = out.as_pmf().unwrap().probs();
        assert_relative_eq!(p[0], 0.75, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.25, epsilon = 1e-15);

        let awgn = Channel::awgn(1.0).unwrap();
        let out = awgn
            .output_distribution(&Distribution::gaussian(0.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(
            out,
            Distribution::Gaussian {
                mean: 0.0,
                variance: 2.0
            }
        );
    }

    #[test]
    fn point_mass_input_reproduces_kernel_row() {
        let dmc = Channel::dmc(vec![vec![0.2, 0.3, 0.5], vec![0.7, 0.1, 0.2]]).unwrap();
        for x in 0..2 {
            let qx = Distribution::Pmf(Pmf::point_mass(2, x).unwrap());
            let out = dmc.output_distribution(&qx).unwrap();
            assert_eq!(out.as_pmf().unwrap().probs(), dmc.rows().unwrap()[x].probs());
        }
    }

    #[test]
    fn unsupported_composition() {
        let awgn = Channel::awgn(1.0).unwrap();
        let qx = Distribution::uniform_interval(-1.0, 1.0).unwrap();
        assert!(matches!(
            awgn.output_distribution(&qx),
            Err(Error::UnsupportedComposition(_))
        ));
        assert!(matches!(
            awgn.output_distribution(&Distribution::uniform(2).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sample_block_examples() {
        let id = Channel::identity(2).unwrap();
        let x = [Symbol::Index(0), Symbol::Index(1), Symbol::Index(0)];
        assert_eq!(id.sample_block(&x, 3).unwrap(), x.to_vec());

        let bsc0 = Channel::bsc(0.0).unwrap();
        let x: Vec<Symbol> = (0..50).map(|i| Symbol::Index(i % 2)).collect();
        assert_eq!(bsc0.sample_block(&x, 11).unwrap(), x);

        let bsc = Channel::bsc(0.25).unwrap();
        let zeros = vec![Symbol::Index(0); 100_000];
        let y = bsc.sample_block(&zeros, 2024).unwrap();
        let ones = y.iter().filter(|s| **s == Symbol::Index(1)).count() as f64 / 1e5;
        assert!((0.24..=0.26).contains(&ones), "fraction {ones}");
    }

    #[test]
    fn sample_block_is_reproducible() {
        for ch in [
            Channel::bsc(0.3).unwrap(),
            Channel::awgn(0.5).unwrap(),
            Channel::rayleigh(1.0, 0.5).unwrap(),
        ] {
            let x: Vec<Symbol> = if ch.input_alphabet().is_finite() {
                (0..64).map(|i| Symbol::Index(i % 2)).collect()
            } else {
                (0..64).map(|i| Symbol::Real(i as f64 * 0.1)).collect()
            };
            let a = ch.sample_block(&x, 99).unwrap();
            let b = ch.sample_block(&x, 99).unwrap();
            assert_eq!(a, b);
            for y in &a {
                assert!(ch.output_alphabet().contains(y));
            }
        }
    }

    #[test]
    fn product_log_prob_examples() {
        let bsc = Channel::bsc(0.25).unwrap();
        let u = Distribution::uniform(2).unwrap();
        let y = [Symbol::Index(0), Symbol::Index(1), Symbol::Index(1)];
        assert_relative_eq!(
            bsc.product_log_prob(&u, &y).unwrap(),
            3.0 * 0.5f64.ln(),
            epsilon = 1e-14
        );
        assert_relative_eq!(bsc.product_log_prob(&u, &y).unwrap(), -2.0794, epsilon = 1e-4);

        let p = Distribution::pmf(vec![0.75, 0.25]).unwrap();
        let v = bsc.product_log_prob(&p, &[Symbol::Index(0), Symbol::Index(1)]).unwrap();
        assert_relative_eq!(v, -1.6740, epsilon = 1e-4);

        let awgn = Channel::awgn(1.0).unwrap();
        let g = Distribution::gaussian(0.0, 2.0).unwrap();
        let v = awgn
            .product_log_prob(&g, &[Symbol::Real(0.0), Symbol::Real(0.0)])
            .unwrap();
        assert_relative_eq!(v, -(4.0 * std::f64::consts::PI).ln(), epsilon = 1e-14);
        assert_relative_eq!(v, -2.5310, epsilon = 1e-4);
    }

    #[test]
    fn quantized_awgn_symmetric_split() {
        let q = Channel::quantized_awgn(1.0, vec![0.0]).unwrap();
        let row = q.kernel_row(&Symbol::Real(0.0)).unwrap();
        assert_relative_eq!(row[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(row[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rayleigh_output_density_integrates() {
        let ch = Channel::rayleigh(1.0, 1.0).unwrap();
        let qy = ch
            .output_distribution(&Distribution::gaussian(0.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(qy.alphabet(), Alphabet::FadedRealLine);
        // Integrate over the gain with a midpoint rule; the value integral is Gaussian.
        let steps = 4000;
        let h_max = 8.0;
        let dh = h_max / steps as f64;
        let mass: f64 = (0..steps)
            .map(|k| {
                let h = (k as f64 + 0.5) * dh;
                rayleigh_log_density(h, 1.0).exp() * dh
            })
            .sum();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-6);
    }
}
