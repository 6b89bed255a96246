//! Information density and its moments.
//!
//! For finite channels every quantity is an exact finite sum over the joint
//! law of `(X, Y)`. For the built-in continuous families closed forms are
//! used where they exist (AWGN with Gaussian input), Gauss-Hermite quadrature
//! for one-dimensional expectations, and Monte Carlo otherwise. Monte Carlo
//! results carry their standard error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Distribution, Family, Symbol};
use crate::error::{Error, Result};
use crate::numeric::{derive_seed, log_sum_exp, GaussHermite};

pub const DEFAULT_QUADRATURE_ORDER: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
const MC_CHUNK: usize = 1 << 14;

/// A computed value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Present for Monte Carlo estimates only.
    pub std_error: Option<f64>,
    pub samples: Option<usize>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_error: None,
            samples: None,
        }
    }

    pub fn monte_carlo(value: f64, std_error: f64, samples: usize) -> Self {
        Estimate {
            value,
            std_error: Some(std_error),
            samples: Some(samples),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.std_error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub quadrature_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0x5eed,
        }
    }
}

/// `ln dK(x,·)/dQ_Y (y)`, with `-inf` where the kernel vanishes and `+inf`
/// where the kernel has mass outside the support of `qy`.
pub fn information_density(ch: &Channel, qy: &Distribution, x: &Symbol, y: &Symbol) -> Result<f64> {
    let lk = ch.kernel_log_prob(x, y)?;
    let lq = qy.log_prob(y)?;
    Ok(density_from_logs(lk, lq))
}

pub(crate) fn density_from_logs(log_kernel: f64, log_target: f64) -> f64 {
    if log_kernel == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if log_target == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        log_kernel - log_target
    }
}

/// Sum of per-letter densities over a block. An infinite term absorbs the sum;
/// `-inf` wins if both signs occur since the kernel then assigns zero mass.
pub fn block_information_density(
    ch: &Channel,
    qy: &Distribution,
    x_block: &[Symbol],
    y_block: &[Symbol],
) -> Result<f64> {
    if x_block.len() != y_block.len() {
        return Err(Error::Domain(format!(
            "block lengths differ: {} vs {}",
            x_block.len(),
            y_block.len()
        )));
    }
    if x_block.is_empty() {
        return Err(Error::Domain("blocks must have length at least 1".into()));
    }
    let mut sum = 0.0;
    let mut saw_pos_inf = false;
    for (x, y) in x_block.iter().zip(y_block) {
        let v = information_density(ch, qy, x, y)?;
        if v == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if v == f64::INFINITY {
            saw_pos_inf = true;
        } else {
            sum += v;
        }
    }
    Ok(if saw_pos_inf { f64::INFINITY } else { sum })
}

/// Exact law of the per-letter information density `i(X;Y)` under `Q_{X,Y}`
/// for a finite channel: atoms `(value, probability)` with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityLaw {
    atoms: Vec<(f64, f64)>,
}

impl DensityLaw {
    pub fn new(ch: &Channel, qx: &Distribution) -> Result<Self> {
        let rows = ch
            .rows()
            .ok_or_else(|| Error::Domain(format!("{} is not a finite channel", ch.label())))?;
        let px = qx
            .as_pmf()
            .ok_or_else(|| Error::Domain("finite channel needs a pmf input".into()))?;
        let qy = ch.output_distribution(qx)?;
        let qy = qy.as_pmf().expect("finite channel output is a pmf");
        let mut atoms = Vec::new();
        for (row, &p) in rows.iter().zip(px.probs()) {
            if p == 0.0 {
                continue;
            }
            for (y, &k) in row.probs().iter().enumerate() {
                if k == 0.0 {
                    continue;
                }
                let v = density_from_logs(row.log_probs()[y], qy.log_probs()[y]);
                atoms.push((v, p * k));
            }
        }
        Ok(DensityLaw { atoms })
    }

    /// Law given directly by its atoms; probabilities must sum to one.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-10 || atoms.iter().any(|a| a.1 < 0.0) {
            return Err(Error::InvalidDistribution(format!("atom masses sum to {total}")));
        }
        Ok(DensityLaw { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    pub fn central_moment_abs(&self, power: i32) -> f64 {
        let mean = self.mean();
        self.atoms.iter().map(|(v, p)| p * (v - mean).abs().powi(power)).sum()
    }

    /// `ln E exp(t·i)`.
    pub fn log_mgf(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let terms: Vec<f64> = self.atoms.iter().map(|(v, p)| p.ln() + t * v).collect();
        log_sum_exp(&terms)
    }

    /// `E[exp(-i)·1{i > -inf}]`, at most one by a change of measure.
    pub fn change_of_measure_mass(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|(v, _)| *v > f64::NEG_INFINITY)
            .map(|(v, p)| p * (-v).exp())
            .sum()
    }

    /// Atoms with equal values (to a relative `1e-12`) merged and sorted.
    pub fn merged(&self) -> Vec<(f64, f64)> {
        merge_atoms(self.atoms.clone())
    }
}

pub(crate) fn merge_atoms(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, p) in atoms {
        match out.last_mut() {
            Some(last) if (last.0 - v).abs() <= 1e-12 * v.abs().max(1.0) => last.1 += p,
            _ => out.push((v, p)),
        }
    }
    out
}

/// Which closed form / quadrature applies to a continuous channel.
enum Continuous {
    Awgn { mean_power: f64, noise: f64 },
    Rayleigh { fading: f64, power: f64, noise: f64 },
    QuantizedAwgn { mean: f64, variance: f64 },
}

fn continuous_case(ch: &Channel, qx: &Distribution) -> Result<Continuous> {
    // Fails with UnsupportedComposition when the output law is unavailable.
    ch.output_distribution(qx)?;
    let (mean, variance) = match qx {
        Distribution::Gaussian { mean, variance } => (*mean, *variance),
        _ => unreachable!("only Gaussian inputs compose with continuous channels"),
    };
    Ok(match ch.family() {
        Family::Awgn { noise_variance } => Continuous::Awgn {
            mean_power: variance,
            noise: *noise_variance,
        },
        Family::Rayleigh {
            fading_power,
            noise_variance,
        } => Continuous::Rayleigh {
            fading: *fading_power,
            power: variance,
            noise: *noise_variance,
        },
        Family::QuantizedAwgn { .. } => Continuous::QuantizedAwgn { mean, variance },
        _ => unreachable!("finite channels are handled by DensityLaw"),
    })
}

/// Gain values `h` with `E h² = fading` and their weights, from a product
/// Gauss-Hermite rule on `h² = fading·(Z1² + Z2²)/2`.
fn rayleigh_gain_rule(fading: f64, order: usize) -> Vec<(f64, f64)> {
    let gh = GaussHermite::new(order);
    let mut out = Vec::with_capacity(order * order);
    for (z1, w1) in gh.nodes.iter().zip(&gh.weights) {
        for (z2, w2) in gh.nodes.iter().zip(&gh.weights) {
            out.push(((fading * (z1 * z1 + z2 * z2) / 2.0).sqrt(), w1 * w2));
        }
    }
    out
}

/// Mutual information and dispersion of AWGN with SNR `snr` and Gaussian input.
fn awgn_i_v(snr: f64) -> (f64, f64) {
    (0.5 * (1.0 + snr).ln(), snr / (1.0 + snr))
}

/// `E|½(U² − W²)|³` with `U = (√snr·g1 + g2)/√(1+snr)`, `W = g2`: the third
/// absolute central moment of the AWGN information density.
fn awgn_rho(snr: f64, gh: &GaussHermite) -> f64 {
    let a = (snr / (1.0 + snr)).sqrt();
    let b = (1.0 / (1.0 + snr)).sqrt();
    gh.expect2(|g1, g2| {
        let u = a * g1 + b * g2;
        (0.5 * (u * u - g2 * g2)).abs().powi(3)
    })
}

/// `ln E exp(t·i)` for AWGN with Gaussian input: `t·I − ½ ln(1 − t²V)` when
/// `t²V < 1`, `+inf` otherwise.
fn awgn_log_mgf(snr: f64, t: f64) -> f64 {
    let (i, v) = awgn_i_v(snr);
    let det = 1.0 - t * t * v;
    if det <= 0.0 {
        f64::INFINITY
    } else {
        t * i - 0.5 * det.ln()
    }
}

/// Finite-output quadrature over a Gaussian input: `E_X Σ_y K(X,y) f(i(X,y))`.
fn quantized_expect(
    ch: &Channel,
    qx_mean: f64,
    qx_var: f64,
    qy: &[f64],
    order: usize,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let gh = GaussHermite::new(order);
    let mut acc = 0.0;
    for (z, w) in gh.nodes.iter().zip(&gh.weights) {
        let x = Symbol::Real(qx_mean + qx_var.sqrt() * z);
        let row = ch.kernel_row(&x)?;
        for (k, q) in row.iter().zip(qy) {
            if *k > 0.0 {
                acc += w * k * f(density_from_logs(k.ln(), q.ln()));
            }
        }
    }
    Ok(acc)
}

pub fn mutual_information(ch: &Channel, qx: &Distribution) -> Result<Estimate> {
    mutual_information_with(ch, qx, &EvalConfig::default())
}

pub fn mutual_information_with(ch: &Channel, qx: &Distribution, cfg: &EvalConfig) -> Result<Estimate> {
    let value = if ch.rows().is_some() {
        DensityLaw::new(ch, qx)?.mean()
    } else {
        match continuous_case(ch, qx)? {
            Continuous::Awgn { mean_power, noise } => awgn_i_v(mean_power / noise).0,
            Continuous::Rayleigh { fading, power, noise } => rayleigh_gain_rule(fading, cfg.quadrature_order)
                .iter()
                .map(|(h, w)| w * awgn_i_v(h * h * power / noise).0)
                .sum(),
            Continuous::QuantizedAwgn { mean, variance } => {
                let qy = ch.output_distribution(qx)?;
                let qy = qy.as_pmf().expect("quantized output is finite").probs().to_vec();
                quantized_expect(ch, mean, variance, &qy, cfg.quadrature_order, |i| i)?
            }
        }
    };
    if !value.is_finite() {
        return Err(Error::InfiniteMutualInformation(format!(
            "{} with input {}",
            ch.label(),
            qx.describe()
        )));
    }
    Ok(Estimate::exact(value))
}

/// Central second moment `V` and absolute third moment `ρ` of `i(X;Y) − I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub v: Estimate,
    pub rho: Estimate,
}

pub fn dispersion_moments(ch: &Channel, qx: &Distribution) -> Result<Dispersion> {
    dispersion_moments_with(ch, qx, &EvalConfig::default())
}

pub fn dispersion_moments_with(ch: &Channel, qx: &Distribution, cfg: &EvalConfig) -> Result<Dispersion> {
    if ch.rows().is_some() {
        let law = DensityLaw::new(ch, qx)?;
        return Ok(Dispersion {
            v: Estimate::exact(law.central_moment_abs(2)),
            rho: Estimate::exact(law.central_moment_abs(3)),
        });
    }
    let mi = mutual_information_with(ch, qx, cfg)?.value;
    match continuous_case(ch, qx)? {
        Continuous::Awgn { mean_power, noise } => {
            let snr = mean_power / noise;
            let gh = GaussHermite::new(cfg.quadrature_order);
            Ok(Dispersion {
                v: Estimate::exact(awgn_i_v(snr).1),
                rho: Estimate::exact(awgn_rho(snr, &gh)),
            })
        }
        Continuous::Rayleigh { fading, power, noise } => {
            let v: f64 = rayleigh_gain_rule(fading, cfg.quadrature_order)
                .iter()
                .map(|(h, w)| {
                    let (ih, vh) = awgn_i_v(h * h * power / noise);
                    w * (vh + (ih - mi).powi(2))
                })
                .sum();
            let samples = monte_carlo_density_samples(ch, qx, cfg)?;
            let rho = mc_mean(
                samples.iter().map(|s| (s - mi).abs().powi(3)),
                samples.len(),
                "third absolute moment",
            )?;
            Ok(Dispersion {
                v: Estimate::exact(v),
                rho,
            })
        }
        Continuous::QuantizedAwgn { mean, variance } => {
            let qy = ch.output_distribution(qx)?;
            let qy = qy.as_pmf().expect("quantized output is finite").probs().to_vec();
            let v = quantized_expect(ch, mean, variance, &qy, cfg.quadrature_order, |i| (i - mi).powi(2))?;
            let rho = quantized_expect(ch, mean, variance, &qy, cfg.quadrature_order, |i| {
                (i - mi).abs().powi(3)
            })?;
            Ok(Dispersion {
                v: Estimate::exact(v),
                rho: Estimate::exact(rho),
            })
        }
    }
}

/// `ln E_{Q_{X,Y}} exp(t·i(X;Y))`, possibly `+inf`.
pub fn log_info_density_mgf(ch: &Channel, qx: &Distribution, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    if t == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    if ch.rows().is_some() {
        return Ok(Estimate::exact(DensityLaw::new(ch, qx)?.log_mgf(t)));
    }
    Ok(Estimate::exact(match continuous_case(ch, qx)? {
        Continuous::Awgn { mean_power, noise } => awgn_log_mgf(mean_power / noise, t),
        Continuous::Rayleigh { fading, power, noise } => {
            // V_h → 1 as the gain grows, so |t| ≥ 1 diverges on the gain tail.
            if t.abs() >= 1.0 {
                f64::INFINITY
            } else {
                let terms: Vec<f64> = rayleigh_gain_rule(fading, cfg.quadrature_order)
                    .iter()
                    .map(|(h, w)| w.ln() + awgn_log_mgf(h * h * power / noise, t))
                    .collect();
                log_sum_exp(&terms)
            }
        }
        Continuous::QuantizedAwgn { mean, variance } => {
            let qy = ch.output_distribution(qx)?;
            let qy = qy.as_pmf().expect("quantized output is finite").probs().to_vec();
            quantized_expect(ch, mean, variance, &qy, cfg.quadrature_order, |i| (t * i).exp())?.ln()
        }
    }))
}

/// `E_{Q_{X,Y}} exp(t·i(X;Y))` as an extended real.
pub fn info_density_mgf(ch: &Channel, qx: &Distribution, t: f64) -> Result<f64> {
    Ok(log_info_density_mgf(ch, qx, t, &EvalConfig::default())?.value.exp())
}

/// Rényi divergence `D_α(Q_{X,Y} ‖ Q_X Q_Y)` for `α > 1`, evaluated as
/// `ln E exp((α−1)·i) / (α−1)`.
pub fn renyi_divergence(ch: &Channel, qx: &Distribution, alpha: f64) -> Result<f64> {
    renyi_divergence_with(ch, qx, alpha, &EvalConfig::default())
}

pub fn renyi_divergence_with(ch: &Channel, qx: &Distribution, alpha: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Rényi order must exceed 1, got {alpha}")));
    }
    let t = alpha - 1.0;
    Ok(log_info_density_mgf(ch, qx, t, cfg)?.value / t)
}

/// Draws `cfg.mc_samples` values of `i(X;Y)` with `(X, Y) ~ Q_{X,Y}`. Chunks
/// are seeded independently and concatenated in order, so the result does not
/// depend on the thread count.
pub fn monte_carlo_density_samples(ch: &Channel, qx: &Distribution, cfg: &EvalConfig) -> Result<Vec<f64>> {
    let qy = ch.output_distribution(qx)?;
    let chunks = cfg.mc_samples.div_ceil(MC_CHUNK);
    let parts: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(cfg.mc_samples - c * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[c as u64]));
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let x = qx.sample(&mut rng);
                let y = ch.sample_output(&x, &mut rng)?;
                out.push(information_density(ch, &qy, &x, &y)?);
            }
            Ok(out)
        })
        .collect();
    let mut samples = Vec::with_capacity(cfg.mc_samples);
    for p in parts {
        samples.extend(p?);
    }
    if let Some(bad) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::Estimation(format!(
            "sample {bad} of {} has information density {}",
            samples.len(),
            samples[bad]
        )));
    }
    Ok(samples)
}

/// Draws `blocks` sums `Σ_j i(X_j;Y_j)` over i.i.d. blocks of length `n`.
/// Same chunked seeding as [`monte_carlo_density_samples`].
pub fn monte_carlo_block_sums(ch: &Channel, qx: &Distribution, n: usize, blocks: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("block length must be positive".into()));
    }
    let qy = ch.output_distribution(qx)?;
    let chunks = blocks.div_ceil(MC_CHUNK);
    let parts: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(blocks - c * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64, c as u64]));
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let mut s = 0.0;
                for _ in 0..n {
                    let x = qx.sample(&mut rng);
                    let y = ch.sample_output(&x, &mut rng)?;
                    s += information_density(ch, &qy, &x, &y)?;
                }
                if !s.is_finite() {
                    return Err(Error::Estimation(format!("block sum {s} in chunk {c}")));
                }
                out.push(s);
            }
            Ok(out)
        })
        .collect();
    let mut sums = Vec::with_capacity(blocks);
    for p in parts {
        sums.extend(p?);
    }
    Ok(sums)
}

fn mc_mean(values: impl Iterator<Item = f64>, count: usize, what: &str) -> Result<Estimate> {
    let mut m = crate::numeric::Moments::default();
    values.for_each(|v| m.push(v));
    let (mean, se) = (m.mean(), m.std_error());
    if !(mean.is_finite() && se.is_finite()) {
        return Err(Error::Estimation(format!(
            "{what}: mean {mean}, std error {se} over {count} samples"
        )));
    }
    Ok(Estimate::monte_carlo(mean, se, count))
}

/// Monte Carlo estimates of `I`, `V` and `ρ` from sampled information densities.
/// Works for every channel with an output marginal; used to cross-check the
/// exact and quadrature routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloMoments {
    pub mutual_information: Estimate,
    pub v: Estimate,
    pub rho: Estimate,
}

pub fn monte_carlo_moments(ch: &Channel, qx: &Distribution, cfg: &EvalConfig) -> Result<MonteCarloMoments> {
    let s = monte_carlo_density_samples(ch, qx, cfg)?;
    let n = s.len();
    let mi = mc_mean(s.iter().copied(), n, "mutual information")?;
    let v = mc_mean(s.iter().map(|x| (x - mi.value).powi(2)), n, "second moment")?;
    let rho = mc_mean(s.iter().map(|x| (x - mi.value).abs().powi(3)), n, "third moment")?;
    Ok(MonteCarloMoments {
        mutual_information: mi,
        v,
        rho,
    })
}

/// Summary statistics of the information density for one channel/input pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoStats {
    pub mutual_information_nats: f64,
    pub central_second_moment_v: f64,
    pub abs_third_moment_rho: f64,
    pub rho_std_error: Option<f64>,
    /// `(t, E exp(t·i))`.
    pub mgf_grid: Vec<(f64, f64)>,
    /// `(α, D_α)`.
    pub renyi_grid: Vec<(f64, f64)>,
}

impl InfoStats {
    pub fn compute(
        ch: &Channel,
        qx: &Distribution,
        mgf_points: &[f64],
        renyi_orders: &[f64],
        cfg: &EvalConfig,
    ) -> Result<Self> {
        let mi = mutual_information_with(ch, qx, cfg)?.value;
        let d = dispersion_moments_with(ch, qx, cfg)?;
        let mgf_grid = mgf_points
            .iter()
            .map(|t| Ok((*t, log_info_density_mgf(ch, qx, *t, cfg)?.value.exp())))
            .collect::<Result<Vec<_>>>()?;
        let renyi_grid = renyi_orders
            .iter()
            .map(|a| Ok((*a, renyi_divergence_with(ch, qx, *a, cfg)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(InfoStats {
            mutual_information_nats: mi,
            central_second_moment_v: d.v.value,
            abs_third_moment_rho: d.rho.value,
            rho_std_error: d.rho.std_error,
            mgf_grid,
            renyi_grid,
        })
    }

    /// Checks nonnegativity, finiteness, monotonicity of the Rényi grid and
    /// closeness of its smallest order to `I`.
    pub fn check_invariants(&self, renyi_to_mi_tolerance: f64) -> Result<()> {
        let bad = |m: String| Err(Error::Estimation(m));
        if !(self.central_second_moment_v >= 0.0 && self.central_second_moment_v.is_finite()) {
            return bad(format!("V = {}", self.central_second_moment_v));
        }
        if !(self.abs_third_moment_rho >= 0.0 && self.abs_third_moment_rho.is_finite()) {
            return bad(format!("rho = {}", self.abs_third_moment_rho));
        }
        let mut sorted = self.renyi_grid.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in sorted.windows(2) {
            if w[1].1 < w[0].1 - 1e-9 {
                return bad(format!("D_α decreases between α={} and α={}", w[0].0, w[1].0));
            }
        }
        if let Some((alpha, d)) = sorted.first() {
            if (d - self.mutual_information_nats).abs() > renyi_to_mi_tolerance {
                return bad(format!(
                    "D_{alpha} = {d} is not within {renyi_to_mi_tolerance} of I = {}",
                    self.mutual_information_nats
                ));
            }
        }
        Ok(())
    }
}

/// `α ∈ {1.01, 1.02, …, 2.00}`.
pub fn default_renyi_orders() -> Vec<f64> {
    (1..=100).map(|k| 1.0 + k as f64 / 100.0).collect()
}
