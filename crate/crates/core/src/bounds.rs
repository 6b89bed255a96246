//! Closed-form bounds on codebook concentration and the parameter schedules
//! that make them applicable.
//!
//! Doubly exponential quantities are also exposed in log domain (`*_ln`).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::info;
use crate::numeric::{log_sum_exp, normal_sf};

/// Constant multiplying the second exponential in the second-order bound,
/// `7/6 + sqrt(3π/2)·e^{3/4}`.
pub fn theorem3_constant() -> f64 {
    7.0 / 6.0 + (1.5 * std::f64::consts::PI).sqrt() * 0.75f64.exp()
}

/// Berry-Esseen constant implied by the second-order schedule.
pub const BERRY_ESSEEN_CONSTANT: f64 = 1.0;
/// Sharper published constant for i.i.d. sums, available as an option.
pub const BERRY_ESSEEN_SHARP: f64 = 0.4748;

/// Gaussian upper tail `Q(a) = 1 − Φ(a)`.
pub fn q_function(a: f64) -> f64 {
    normal_sf(a)
}

/// Inverse of [`q_function`] on `(0, 1)`, by bisection.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("Q⁻¹ needs p in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ln` of the atypical-mass tail bound `exp(−δ²μ·exp(nR)/3)`.
pub fn lemma1_bound_ln(mu: f64, delta: f64, n: usize, rate: f64) -> f64 {
    if mu == 0.0 || delta == 0.0 {
        return 0.0;
    }
    -delta * delta * mu * (n as f64 * rate).exp() / 3.0
}

/// Bound on `P(P₂(𝒴ⁿ) > μ(1 + δ))` over random codebooks.
pub fn lemma1_bound(mu: f64, delta: f64, n: usize, rate: f64) -> f64 {
    lemma1_bound_ln(mu, delta, n, rate).exp()
}

/// `ln r` with `r = exp(n(R − I − ε))`.
pub fn lemma2_log_r(n: usize, rate: f64, mutual_information: f64, epsilon: f64) -> f64 {
    n as f64 * (rate - mutual_information - epsilon)
}

/// `ln` of the typical-part tail bound
/// `(1 + sqrt(3π/2)·exp(3λ²/(4r))·λ/√r + exp(−λ))·exp(−δλ)`, with `r` given by its log.
pub fn lemma2_bound_ln_r(delta: f64, lambda: f64, log_r: f64) -> Result<f64> {
    if !(delta > 0.0 && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "lemma 2 needs δ, λ > 0, got δ = {delta}, λ = {lambda}"
        )));
    }
    let slack = log_r - (6.0 * lambda).ln();
    if slack < -1e-12 * log_r.abs().max(1.0) {
        return Err(Error::HypothesisViolation(format!(
            "r/(6λ) = exp({slack:.6}) < 1 (ln r = {log_r}, λ = {lambda})"
        )));
    }
    let log_middle =
        0.5 * (1.5 * std::f64::consts::PI).ln() + 0.75 * lambda * lambda * (-log_r).exp() + lambda.ln() - 0.5 * log_r;
    Ok(log_sum_exp(&[0.0, log_middle, -lambda]) - delta * lambda)
}

pub fn lemma2_bound_ln(
    delta: f64,
    lambda: f64,
    n: usize,
    rate: f64,
    mutual_information: f64,
    epsilon: f64,
) -> Result<f64> {
    lemma2_bound_ln_r(delta, lambda, lemma2_log_r(n, rate, mutual_information, epsilon))
}

/// Bound on `P(E_Q[(dP₁/dQ − 1)⁺] > δ + …)`; see [`lemma2_bound_ln`].
pub fn lemma2_bound(
    delta: f64,
    lambda: f64,
    n: usize,
    rate: f64,
    mutual_information: f64,
    epsilon: f64,
) -> Result<f64> {
    lemma2_bound_ln(delta, lambda, n, rate, mutual_information, epsilon).map(f64::exp)
}

/// Markov/Chernoff bound `exp(−n(α−1)(I + ε − D_α))` on the atypical probability.
pub fn chernoff_atypical_bound(
    alpha: f64,
    mutual_information: f64,
    epsilon: f64,
    d_alpha: f64,
    n: usize,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("Chernoff bound needs α > 1, got {alpha}")));
    }
    Ok((-(n as f64) * (alpha - 1.0) * (mutual_information + epsilon - d_alpha)).exp())
}

/// `exp(−γ₁n)`.
pub fn theorem2_threshold(gamma1: f64, n: usize) -> f64 {
    (-gamma1 * n as f64).exp()
}

/// `ln rhs = −exp(γ₂n)`.
pub fn theorem2_rhs_ln(gamma2: f64, n: usize) -> f64 {
    -(gamma2 * n as f64).exp()
}

/// `exp(−exp(γ₂n))`.
pub fn theorem2_rhs(gamma2: f64, n: usize) -> f64 {
    theorem2_rhs_ln(gamma2, n).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    /// Candidate Rényi orders, all `> 1`.
    pub alphas: Vec<f64>,
    /// Number of equally spaced `ε` values in `(0, R − I)`.
    pub epsilon_points: usize,
    /// Every strict inequality `a < b` is met as `a = (1 − interior)·b`.
    pub interior: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            alphas: info::default_renyi_orders(),
            epsilon_points: 50,
            interior: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderParams {
    pub mutual_information: f64,
    pub rate: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub d_alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Smallest `n` with `n(R − I − ε − β₂) ≥ ln 6`, i.e. `r/(6λ) ≥ 1` for `λ = exp(nβ₂)`.
    pub n_min: usize,
}

impl FirstOrderParams {
    /// `λ = exp(nβ₂)`.
    pub fn lambda(&self, n: usize) -> f64 {
        (self.beta2 * n as f64).exp()
    }

    /// `δ = exp(−nβ₁)`.
    pub fn delta(&self, n: usize) -> f64 {
        (-self.beta1 * n as f64).exp()
    }

    pub fn threshold(&self, n: usize) -> f64 {
        theorem2_threshold(self.gamma1, n)
    }

    pub fn rhs_ln(&self, n: usize) -> f64 {
        theorem2_rhs_ln(self.gamma2, n)
    }

    pub fn meets_n_min(&self, n: usize) -> bool {
        n >= self.n_min
    }
}

/// Grid search over `(α, ε)` for the first-order exponents. `d_alpha_curve`
/// holds `(α, D_α)` pairs; non-finite `D_α` entries are skipped.
pub fn select_first_order_params(
    mutual_information: f64,
    d_alpha_curve: &[(f64, f64)],
    rate: f64,
    grid: &SearchGrid,
) -> Result<FirstOrderParams> {
    let i = mutual_information;
    if !(rate > i) {
        return Err(Error::NoValidParams(format!("rate {rate} does not exceed I = {i}")));
    }
    if grid.epsilon_points == 0 || !(grid.interior > 0.0 && grid.interior < 1.0) {
        return Err(Error::Domain(
            "search grid needs ε points and an interior factor in (0, 1)".into(),
        ));
    }
    let keep = 1.0 - grid.interior;
    let mut best: Option<FirstOrderParams> = None;
    for &(alpha, d_alpha) in d_alpha_curve {
        if !(alpha > 1.0) || !d_alpha.is_finite() {
            continue;
        }
        for k in 1..=grid.epsilon_points {
            let epsilon = (rate - i) * k as f64 / (grid.epsilon_points + 1) as f64;
            let gap = rate - i - epsilon;
            let chernoff = (alpha - 1.0) * (i + epsilon - d_alpha);
            if !(gap > 0.0 && chernoff > 0.0) {
                continue;
            }
            let beta2 = keep * gap / 2.0;
            let beta1 = chernoff.min(keep * beta2);
            let gamma1 = keep * beta1;
            let gamma2 = keep * (rate - beta1).min(beta2 - beta1);
            if !(gamma1 > 0.0 && gamma2 > 0.0) {
                continue;
            }
            let n_min = (6f64.ln() / (gap - beta2)).ceil().max(1.0) as usize;
            let cand = FirstOrderParams {
                mutual_information: i,
                rate,
                epsilon,
                alpha,
                d_alpha,
                beta1,
                beta2,
                gamma1,
                gamma2,
                n_min,
            };
            let better = match &best {
                None => true,
                Some(b) => match compare(cand.gamma1, b.gamma1) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => match compare(cand.gamma2, b.gamma2) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => cand.alpha < b.alpha,
                    },
                },
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.ok_or_else(|| {
        Error::NoValidParams(format!(
            "no (α, ε) on the grid gives positive exponents at R = {rate}, I = {i}"
        ))
    })
}

/// Orders exponents, treating values within a relative `1e-12` as tied.
fn compare(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
        Ordering::Equal
    } else if a > b {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Computes the `D_α` curve from the channel and runs [`select_first_order_params`].
pub fn select_first_order_params_for(
    ch: &Channel,
    qx: &Distribution,
    rate: f64,
    grid: &SearchGrid,
) -> Result<FirstOrderParams> {
    let i = info::mutual_information(ch, qx)?.value;
    let curve = grid
        .alphas
        .iter()
        .map(|&a| Ok((a, info::renyi_divergence(ch, qx, a)?)))
        .collect::<Result<Vec<_>>>()?;
    select_first_order_params(i, &curve, rate, grid)
}

/// Re-checks the defining inequalities of `p` from its raw fields.
pub fn verify_first_order_params(p: &FirstOrderParams) -> Result<()> {
    let gap = p.rate - p.mutual_information - p.epsilon;
    let checks = [
        (p.epsilon > 0.0 && gap > 0.0, "0 < ε < R − I"),
        (p.alpha > 1.0, "α > 1"),
        (
            p.beta1 <= (p.alpha - 1.0) * (p.mutual_information + p.epsilon - p.d_alpha),
            "β₁ ≤ (α−1)(I+ε−D_α)",
        ),
        (p.beta1 > 0.0 && p.beta1 < gap / 2.0, "0 < β₁ < (R−I−ε)/2"),
        (p.beta1 < p.beta2 && p.beta2 < gap / 2.0, "β₁ < β₂ < (R−I−ε)/2"),
        (p.gamma1 > 0.0 && p.gamma1 < p.beta1, "0 < γ₁ < β₁"),
        (
            p.gamma2 > 0.0 && p.gamma2 < (p.rate - p.beta1).min(p.beta2 - p.beta1),
            "0 < γ₂ < min(R−β₁, β₂−β₁)",
        ),
        (p.n_min as f64 * (gap - p.beta2) >= 6f64.ln(), "n_min(R−I−ε−β₂) ≥ ln 6"),
    ];
    for (ok, what) in checks {
        if !ok {
            return Err(Error::NoValidParams(format!("parameter check failed: {what} ({p:?})")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderParams {
    pub mutual_information: f64,
    pub v: f64,
    pub rho: f64,
    pub xi: f64,
    pub c: f64,
    pub d: f64,
    pub n: usize,
    pub berry_esseen_constant: f64,
    /// `I + sqrt(V/n)·Q⁻¹(ξ) + c·ln n/n`.
    pub rate: f64,
    /// `Q(Q⁻¹(ξ) + d·ln n/sqrt(nV)) + C·ρ/(V^{3/2}√n)`.
    pub mu: f64,
    /// `sqrt(V/n)·Q⁻¹(ξ) + d·ln n/n`, the typicality slack at this `n`.
    pub epsilon: f64,
}

pub fn second_order_schedule(
    mutual_information: f64,
    v: f64,
    rho: f64,
    xi: f64,
    c: f64,
    d: f64,
    n: usize,
) -> Result<SecondOrderParams> {
    second_order_schedule_with(mutual_information, v, rho, xi, c, d, n, BERRY_ESSEEN_CONSTANT)
}

#[allow(clippy::too_many_arguments)]
pub fn second_order_schedule_with(
    mutual_information: f64,
    v: f64,
    rho: f64,
    xi: f64,
    c: f64,
    d: f64,
    n: usize,
    berry_esseen_constant: f64,
) -> Result<SecondOrderParams> {
    if !(v > 0.0) {
        return Err(Error::DegenerateDispersion(v));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("ξ must lie in (0, 1), got {xi}")));
    }
    if !(c > 1.0 && d > 0.0 && d < c - 1.0) {
        return Err(Error::Domain(format!(
            "need c > 1 and 0 < d < c − 1, got c = {c}, d = {d}"
        )));
    }
    check_second_order_n(c, d, n)?;
    let nf = n as f64;
    let ln_n = nf.ln();
    let qi = q_inverse(xi)?;
    let back_off = (v / nf).sqrt() * qi;
    Ok(SecondOrderParams {
        mutual_information,
        v,
        rho,
        xi,
        c,
        d,
        n,
        berry_esseen_constant,
        rate: mutual_information + back_off + c * ln_n / nf,
        mu: q_function(qi + d * ln_n / (nf * v).sqrt()) + berry_esseen_gap_with(v, rho, n, berry_esseen_constant)?,
        epsilon: back_off + d * ln_n / nf,
    })
}

/// `n^{(c−d)/2} ≥ 6`.
pub fn check_second_order_n(c: f64, d: f64, n: usize) -> Result<()> {
    let lhs = (n as f64).powf((c - d) / 2.0);
    if n == 0 || lhs < 6.0 {
        return Err(Error::HypothesisViolation(format!(
            "n^((c−d)/2) = {lhs:.4} < 6 at n = {n}, c = {c}, d = {d}"
        )));
    }
    Ok(())
}

/// `ln` of each of the two terms of the second-order bound.
pub fn theorem3_rhs_terms_ln(mu: f64, n: usize, rate: f64, c: f64, d: f64) -> (f64, f64) {
    let nf = n as f64;
    let first = if mu == 0.0 {
        0.0
    } else {
        -nf * mu * (nf * rate).exp() / 3.0
    };
    let second = theorem3_constant().ln() - nf.powf((c - d - 1.0) / 2.0);
    (first, second)
}

/// `exp(−nμ·exp(nR)/3) + (7/6 + sqrt(3π/2)·e^{3/4})·exp(−n^{(c−d−1)/2})`.
pub fn theorem3_rhs(mu: f64, n: usize, rate: f64, c: f64, d: f64) -> f64 {
    let (a, b) = theorem3_rhs_terms_ln(mu, n, rate, c, d);
    a.exp() + b.exp()
}

pub fn theorem3_rhs_for(p: &SecondOrderParams) -> f64 {
    theorem3_rhs(p.mu, p.n, p.rate, p.c, p.d)
}

/// `ρ/(V^{3/2}√n)`, the normal-approximation slack built into `μ`.
pub fn berry_esseen_gap(v: f64, rho: f64, n: usize) -> Result<f64> {
    berry_esseen_gap_with(v, rho, n, BERRY_ESSEEN_CONSTANT)
}

pub fn berry_esseen_gap_with(v: f64, rho: f64, n: usize, constant: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::DegenerateDispersion(v));
    }
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    Ok(constant * rho / (v.powf(1.5) * (n as f64).sqrt()))
}

/// One evaluated bound with all inputs echoed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    pub ln_value: f64,
}

impl BoundReport {
    fn new(bound: &str, inputs: &[(&str, f64)], ln_value: f64) -> Self {
        BoundReport {
            bound: bound.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value: ln_value.exp(),
            ln_value,
        }
    }

    pub fn lemma1(mu: f64, delta: f64, n: usize, rate: f64) -> Self {
        Self::new(
            "lemma1",
            &[("mu", mu), ("delta", delta), ("n", n as f64), ("R", rate)],
            lemma1_bound_ln(mu, delta, n, rate),
        )
    }

    pub fn lemma2(delta: f64, lambda: f64, n: usize, rate: f64, i: f64, epsilon: f64) -> Result<Self> {
        Ok(Self::new(
            "lemma2",
            &[
                ("delta", delta),
                ("lambda", lambda),
                ("n", n as f64),
                ("R", rate),
                ("I", i),
                ("epsilon", epsilon),
            ],
            lemma2_bound_ln(delta, lambda, n, rate, i, epsilon)?,
        ))
    }

    pub fn chernoff(alpha: f64, i: f64, epsilon: f64, d_alpha: f64, n: usize) -> Result<Self> {
        let v = chernoff_atypical_bound(alpha, i, epsilon, d_alpha, n)?;
        Ok(Self::new(
            "chernoff-atypical",
            &[
                ("alpha", alpha),
                ("I", i),
                ("epsilon", epsilon),
                ("D_alpha", d_alpha),
                ("n", n as f64),
            ],
            v.ln(),
        ))
    }

    pub fn theorem2(p: &FirstOrderParams, n: usize) -> Self {
        Self::new(
            "theorem2-rhs",
            &[
                ("I", p.mutual_information),
                ("R", p.rate),
                ("epsilon", p.epsilon),
                ("alpha", p.alpha),
                ("D_alpha", p.d_alpha),
                ("beta1", p.beta1),
                ("beta2", p.beta2),
                ("gamma1", p.gamma1),
                ("gamma2", p.gamma2),
                ("n_min", p.n_min as f64),
                ("n", n as f64),
                ("threshold", p.threshold(n)),
            ],
            p.rhs_ln(n),
        )
    }

    pub fn theorem3(p: &SecondOrderParams) -> Self {
        let v = theorem3_rhs_for(p);
        Self::new(
            "theorem3-rhs",
            &[
                ("I", p.mutual_information),
                ("V", p.v),
                ("rho", p.rho),
                ("xi", p.xi),
                ("c", p.c),
                ("d", p.d),
                ("n", p.n as f64),
                ("berry_esseen_constant", p.berry_esseen_constant),
                ("R", p.rate),
                ("mu", p.mu),
            ],
            v.ln(),
        )
    }
}
