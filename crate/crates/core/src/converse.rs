//! Finite-scale converse: output quantization, the position-averaged input
//! distribution of a codebook, and the check `I(Q_X^ℓ, K) ≤ R − δ·ln(δ/(2|𝒴|))`.

use serde::{Deserialize, Serialize};

use crate::bounds::q_inverse;
use crate::channel::{Alphabet, Channel, Distribution, Family, Symbol};
use crate::codebook::{self, Codebook, TvMethod};
use crate::error::{Error, Result};

/// Absolute tolerance added to the right-hand side of the converse check.
pub const CONVERSE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_GRID_LEVELS: usize = 64;

/// A finite partition of the output space. For finite outputs only the
/// trivial partition (one atom per letter) is supported; on the real line the
/// bins are `(−∞, e₁], (e₁, e₂], …, (e_{k−1}, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    pub level: usize,
    pub edges: Vec<f64>,
    /// `Some(|𝒴|)` for the trivial partition of a finite output alphabet.
    pub finite_size: Option<usize>,
}

impl Quantizer {
    pub fn trivial(size: usize) -> Self {
        Quantizer {
            level: size,
            edges: Vec::new(),
            finite_size: Some(size),
        }
    }

    /// `k` bins of equal probability under a Gaussian target; `k` must be a
    /// power of two so that successive levels are nested.
    pub fn equiprobable(target: &Distribution, k: usize) -> Result<Self> {
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::Domain(format!(
                "quantizer level must be a power of two ≥ 2, got {k}"
            )));
        }
        let (mean, variance) = match target {
            Distribution::Gaussian { mean, variance } => (*mean, *variance),
            other => {
                return Err(Error::UnsupportedComposition(format!(
                    "equiprobable bins need a Gaussian target, got {}",
                    other.describe()
                )))
            }
        };
        let sd = variance.sqrt();
        let edges = (1..k)
            .map(|j| {
                // Φ⁻¹(j/k) = Q⁻¹(1 − j/k); the middle edge is exactly the mean.
                let z = if 2 * j == k {
                    0.0
                } else {
                    q_inverse(1.0 - j as f64 / k as f64)?
                };
                Ok(mean + sd * z)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Quantizer {
            level: k,
            edges,
            finite_size: None,
        })
    }

    pub fn atoms(&self) -> usize {
        self.finite_size.unwrap_or(self.edges.len() + 1)
    }

    /// `true` when every edge of `coarser` is also an edge of `self`.
    pub fn refines(&self, coarser: &Quantizer) -> bool {
        coarser
            .edges
            .iter()
            .all(|e| self.edges.iter().any(|f| (e - f).abs() <= 1e-12 * e.abs().max(1.0)))
    }
}

/// `K^(k)(x, bin) = K(x, bin)`.
pub fn quantize_channel(ch: &Channel, quant: &Quantizer) -> Result<Channel> {
    match (ch.family(), quant.finite_size) {
        (_, Some(size)) => {
            if ch.output_alphabet().size() != Some(size) {
                return Err(Error::Domain(format!(
                    "trivial quantizer on {size} letters does not match {}",
                    ch.output_alphabet()
                )));
            }
            Ok(ch.clone())
        }
        (Family::Awgn { noise_variance }, None) => Channel::quantized_awgn(*noise_variance, quant.edges.clone()),
        _ => Err(Error::UnsupportedComposition(format!(
            "no closed-form bin probabilities for {}",
            ch.label()
        ))),
    }
}

/// The target law restricted to the quantizer's bins.
pub fn quantize_target(qy: &Distribution, quant: &Quantizer) -> Result<Distribution> {
    match (qy, quant.finite_size) {
        (Distribution::Pmf(p), Some(size)) if p.len() == size => Ok(qy.clone()),
        (Distribution::Gaussian { mean, variance }, None) => {
            let probs: Vec<f64> = (0..quant.atoms())
                .map(|b| {
                    let lo = if b == 0 { f64::NEG_INFINITY } else { quant.edges[b - 1] };
                    let hi = if b == quant.edges.len() {
                        f64::INFINITY
                    } else {
                        quant.edges[b]
                    };
                    crate::numeric::normal_interval_prob(lo, hi, *mean, *variance)
                })
                .collect();
            let s: f64 = probs.iter().sum();
            Distribution::pmf(probs.into_iter().map(|p| p / s).collect())
        }
        _ => Err(Error::UnsupportedComposition(format!(
            "cannot quantize {} with this quantizer",
            qy.describe()
        ))),
    }
}

/// Uniform grid of `levels` cells on `[lo, hi]`; each real input letter is
/// mapped to the midpoint of its cell, letters outside to the end cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputGrid {
    pub lo: f64,
    pub hi: f64,
    pub levels: usize,
}

impl InputGrid {
    pub fn new(lo: f64, hi: f64, levels: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && levels >= 1) {
            return Err(Error::Domain(format!(
                "input grid [{lo}, {hi}] with {levels} levels is empty"
            )));
        }
        Ok(InputGrid { lo, hi, levels })
    }

    pub fn cell(&self, x: f64) -> usize {
        let w = (self.hi - self.lo) / self.levels as f64;
        (((x - self.lo) / w).floor().max(0.0) as usize).min(self.levels - 1)
    }

    pub fn point(&self, cell: usize) -> f64 {
        let w = (self.hi - self.lo) / self.levels as f64;
        self.lo + (cell as f64 + 0.5) * w
    }
}

/// `Q_X^(ℓ) = (1/n)·Σ_j P_{X_j|C}` on a finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedInput {
    pub support: Vec<Symbol>,
    pub weights: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub grid: Option<InputGrid>,
}

impl AveragedInput {
    pub fn distribution(&self) -> Result<Distribution> {
        Distribution::pmf(self.weights.clone())
    }
}

pub fn averaged_input(cb: &Codebook) -> Result<AveragedInput> {
    let size = match cb.alphabet() {
        Alphabet::Finite { size, .. } => *size,
        _ => return Err(Error::RequiresInputQuantizer),
    };
    let mut counts = vec![0usize; size];
    for c in cb.codewords() {
        for s in c {
            counts[s.index().expect("finite codebook")] += 1;
        }
    }
    let total = (cb.m() * cb.n()) as f64;
    Ok(AveragedInput {
        support: (0..size).map(Symbol::Index).collect(),
        weights: counts.into_iter().map(|c| c as f64 / total).collect(),
        n: cb.n(),
        m: cb.m(),
        grid: None,
    })
}

/// Averaged input of a real-valued codebook after snapping letters to `grid`.
pub fn averaged_input_on_grid(cb: &Codebook, grid: &InputGrid) -> Result<AveragedInput> {
    if cb.alphabet().is_finite() {
        return averaged_input(cb);
    }
    let mut counts = vec![0usize; grid.levels];
    for c in cb.codewords() {
        for s in c {
            let x = s
                .real()
                .ok_or_else(|| Error::Domain(format!("letter {s} is not real")))?;
            counts[grid.cell(x)] += 1;
        }
    }
    let total = (cb.m() * cb.n()) as f64;
    Ok(AveragedInput {
        support: (0..grid.levels).map(|c| Symbol::Real(grid.point(c))).collect(),
        weights: counts.into_iter().map(|c| c as f64 / total).collect(),
        n: cb.n(),
        m: cb.m(),
        grid: Some(grid.clone()),
    })
}

fn rows_for(ch: &Channel, support: &[Symbol]) -> Result<Vec<Vec<f64>>> {
    if !ch.output_alphabet().is_finite() {
        return Err(Error::Domain(format!(
            "{} has a continuous output; quantize first",
            ch.label()
        )));
    }
    support.iter().map(|x| ch.kernel_row(x)).collect()
}

/// Output law `Σ_x Q_X^(ℓ)(x) K(x, ·)`.
pub fn output_marginal(ch: &Channel, avg: &AveragedInput) -> Result<Vec<f64>> {
    let rows = rows_for(ch, &avg.support)?;
    Ok(mix(&rows, &avg.weights))
}

fn mix(rows: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rows.first().map_or(0, |r| r.len())];
    for (row, w) in rows.iter().zip(weights) {
        for (o, k) in out.iter_mut().zip(row) {
            *o += w * k;
        }
    }
    out
}

/// `I(X;Y)` for the joint `Q_X^(ℓ) × K`, as `Σ_x w_x D(K(x,·) ‖ Q_Y^(ℓ))`.
pub fn averaged_mutual_information(ch: &Channel, avg: &AveragedInput) -> Result<f64> {
    let rows = rows_for(ch, &avg.support)?;
    let out = mix(&rows, &avg.weights);
    let mut total = 0.0;
    for (row, w) in rows.iter().zip(&avg.weights) {
        if *w == 0.0 {
            continue;
        }
        for (k, q) in row.iter().zip(&out) {
            if *k > 0.0 {
                total += w * k * (k / q).ln();
            }
        }
    }
    Ok(total.max(0.0))
}

/// `−δ·ln(δ/(2|𝒴|))`, zero at `δ = 0`.
pub fn converse_slack(delta: f64, output_size: usize) -> f64 {
    if delta == 0.0 {
        0.0
    } else {
        -delta * (delta / (2.0 * output_size as f64)).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub n: usize,
    pub rate: f64,
    pub delta: f64,
    pub output_size: usize,
    pub i_ell: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks `I(Q_X^(ℓ), K) ≤ R + slack(δ)` for the averaged input `avg` of a
/// codebook of rate `rate` whose measured distance is `delta`.
pub fn converse_check_with_input(ch: &Channel, avg: &AveragedInput, rate: f64, delta: f64) -> Result<ConverseReport> {
    if !(0.0..=0.25).contains(&delta) {
        if delta > 0.25 {
            return Err(Error::HypothesisViolation(format!(
                "measured distance {delta} exceeds 1/4"
            )));
        }
        return Err(Error::Domain(format!("measured distance {delta} is negative")));
    }
    let output_size = ch
        .output_alphabet()
        .size()
        .ok_or_else(|| Error::Domain(format!("{} has a continuous output; quantize first", ch.label())))?;
    let i_ell = averaged_mutual_information(ch, avg)?;
    let slack = converse_slack(delta, output_size);
    Ok(ConverseReport {
        n: avg.n,
        rate,
        delta,
        output_size,
        i_ell,
        slack,
        holds: i_ell <= rate + slack + CONVERSE_TOLERANCE,
    })
}

/// [`converse_check_with_input`] for a finite-input codebook.
pub fn converse_check(ch: &Channel, cb: &Codebook, delta: f64) -> Result<ConverseReport> {
    converse_check_with_input(ch, &averaged_input(cb)?, cb.rate(), delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerLetterCheck {
    /// Distance between the position-averaged output law and `Q_Y`.
    pub lhs: f64,
    /// Block distance, or its Monte Carlo estimate plus three standard errors.
    pub rhs: f64,
    pub method: TvMethod,
    pub holds: bool,
}

/// `‖Q_Y^(ℓ) − Q_Y‖ ≤ ‖P_{Yⁿ|C} − Q_{Yⁿ}‖`. Falls back to a Monte Carlo
/// estimate with `mc_samples` draws when enumeration exceeds `cap`.
pub fn per_letter_tv_bound_check(
    cb: &Codebook,
    ch: &Channel,
    qy: &Distribution,
    cap: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<PerLetterCheck> {
    let target = qy
        .as_pmf()
        .ok_or_else(|| Error::Domain("per-letter check needs a finite target".into()))?;
    let support: Vec<Symbol> = cb.codewords().flatten().cloned().collect();
    let rows = rows_for(ch, &support)?;
    let w = vec![1.0 / support.len() as f64; support.len()];
    let letter = mix(&rows, &w);
    let lhs: f64 = letter.iter().zip(target.probs()).map(|(p, q)| (p - q).max(0.0)).sum();
    let (rhs, method) = match codebook::tv_exact_capped(ch, cb, qy, cap) {
        Ok(r) => (r.tv, TvMethod::ExactEnumeration),
        Err(Error::EnumerationTooLarge { .. }) => {
            let r = codebook::tv_monte_carlo(ch, cb, qy, mc_samples, seed)?;
            (r.tv + 3.0 * r.std_error.unwrap_or(0.0), TvMethod::MonteCarlo)
        }
        Err(e) => return Err(e),
    };
    Ok(PerLetterCheck {
        lhs,
        rhs,
        method,
        holds: lhs <= rhs + 1e-12,
    })
}
