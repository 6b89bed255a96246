//! Random codebooks and the variational distance between the output law they
//! induce and the target product law.
//!
//! The codebook-induced output law is `P(yⁿ) = M⁻¹ Σ_m Kⁿ(C(m), yⁿ)` and the
//! distance reported everywhere is the one-sided supremum
//! `E_Q[(dP/dQ − 1)⁺]`, i.e. half the L1 distance.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Alphabet, Channel, Distribution, Symbol};
use crate::error::{Error, Result};
use crate::info::{self, DensityLaw, Estimate};
use crate::numeric::{derive_seed, log_sum_exp, Moments};

pub const DEFAULT_MAX_CODEWORDS: usize = 1 << 24;
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;
/// Upper bound on the support size tracked by the exact tail recursions.
pub const DP_SUPPORT_CAP: usize = 1 << 20;
/// Relative tolerance used when comparing a block information density with
/// the typicality threshold, so that sums computed in different orders agree
/// on ties.
pub const TIE_TOLERANCE: f64 = 1e-9;
const MC_CHUNK: usize = 1 << 12;

/// `true` when the block density lies strictly above the threshold, i.e. the
/// pair is outside the typical set. Ties count as typical.
pub fn exceeds_threshold(density: f64, threshold: f64) -> bool {
    if threshold == f64::INFINITY {
        return false;
    }
    if threshold == f64::NEG_INFINITY {
        return density > f64::NEG_INFINITY || density.is_nan();
    }
    density > threshold + TIE_TOLERANCE * threshold.abs().max(1.0)
}

/// `exp` of the tolerance-adjusted threshold: `dP/dQ` above this value is
/// exactly [`exceeds_threshold`].
fn threshold_ratio(threshold: f64) -> f64 {
    if threshold == f64::NEG_INFINITY {
        return 0.0;
    }
    (threshold + TIE_TOLERANCE * threshold.abs().max(1.0)).exp()
}

/// Number of codewords for block length `n` and rate `R`: `max(1, ⌊exp(nR)⌋)`.
pub fn codebook_size(n: usize, rate: f64, max_codewords: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("rate must be a nonnegative real, got {rate}")));
    }
    let log_size = n as f64 * rate;
    if log_size > (max_codewords as f64 + 1.0).ln() {
        return Err(Error::CodebookTooLarge {
            log_size,
            cap: max_codewords,
        });
    }
    // exp(n·ln 2) may land a few ulps below an integer; nudge before flooring.
    let m = (log_size.exp() * (1.0 + 1e-12)).floor() as usize;
    let m = m.max(1);
    if m > max_codewords {
        return Err(Error::CodebookTooLarge {
            log_size,
            cap: max_codewords,
        });
    }
    Ok(m)
}

/// `M` codewords of length `n`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    rate: f64,
    alphabet: Alphabet,
    codewords: Vec<Symbol>,
    seed: Option<u64>,
}

impl Codebook {
    /// Hand-built codebook. Its rate is `ln(M)/n`.
    pub fn from_codewords(alphabet: Alphabet, codewords: Vec<Vec<Symbol>>) -> Result<Self> {
        let n = codewords.first().map(|c| c.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::Domain("codebook needs at least one nonempty codeword".into()));
        }
        if codewords.iter().any(|c| c.len() != n) {
            return Err(Error::Domain("codewords have different lengths".into()));
        }
        let flat: Vec<Symbol> = codewords.into_iter().flatten().collect();
        for s in &flat {
            alphabet.check(s)?;
        }
        let m = flat.len() / n;
        Ok(Codebook {
            n,
            rate: (m as f64).ln() / n as f64,
            alphabet,
            codewords: flat,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn m(&self) -> usize {
        self.codewords.len() / self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn codeword(&self, m: usize) -> &[Symbol] {
        &self.codewords[m * self.n..(m + 1) * self.n]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[Symbol]> {
        self.codewords.chunks(self.n)
    }

    /// Writes the header line `n,rate_nats,m,alphabet,seed`, its values, then
    /// one comma-separated codeword per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,rate_nats,m,alphabet,seed")?;
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", self.n, self.rate, self.m(), self.alphabet, seed)?;
        for c in self.codewords() {
            let line: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |m: String| Error::Serialization(format!("codebook csv: {m}"));
        let mut lines = r.lines();
        let mut next = || -> Result<Option<String>> {
            lines
                .next()
                .transpose()
                .map_err(|e| Error::Serialization(e.to_string()))
        };
        let header = next()?.ok_or_else(|| bad("missing header".into()))?;
        if header.trim() != "n,rate_nats,m,alphabet,seed" {
            return Err(bad(format!("unexpected header `{header}`")));
        }
        let meta = next()?.ok_or_else(|| bad("missing metadata line".into()))?;
        let fields: Vec<&str> = meta.trim().split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("metadata line `{meta}` needs 5 fields")));
        }
        let n: usize = fields[0].parse().map_err(|_| bad(format!("bad n `{}`", fields[0])))?;
        let rate: f64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad rate `{}`", fields[1])))?;
        let m: usize = fields[2].parse().map_err(|_| bad(format!("bad m `{}`", fields[2])))?;
        let alphabet = match fields[3] {
            "real" => Alphabet::RealLine,
            s => match s.strip_prefix("finite:").and_then(|k| k.parse().ok()) {
                Some(k) => Alphabet::finite(k)?,
                None => return Err(bad(format!("unknown alphabet `{s}`"))),
            },
        };
        let seed = match fields[4] {
            "" => None,
            s => Some(s.parse().map_err(|_| bad(format!("bad seed `{s}`")))?),
        };
        let mut codewords = Vec::with_capacity(n * m);
        while let Some(line) = next()? {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<&str> = line.trim().split(',').collect();
            if row.len() != n {
                return Err(bad(format!("codeword `{line}` does not have {n} symbols")));
            }
            for s in row {
                let sym = if alphabet.is_finite() {
                    Symbol::Index(s.parse().map_err(|_| bad(format!("bad symbol `{s}`")))?)
                } else {
                    Symbol::Real(s.parse().map_err(|_| bad(format!("bad symbol `{s}`")))?)
                };
                alphabet.check(&sym)?;
                codewords.push(sym);
            }
        }
        if codewords.len() != n * m {
            return Err(bad(format!(
                "expected {m} codewords, found {}",
                codewords.len() / n.max(1)
            )));
        }
        Ok(Codebook {
            n,
            rate,
            alphabet,
            codewords,
            seed,
        })
    }
}

/// Draws all `M·n` codeword letters i.i.d. from `qx`.
pub fn draw_codebook(qx: &Distribution, n: usize, rate: f64, seed: u64) -> Result<Codebook> {
    draw_codebook_capped(qx, n, rate, seed, DEFAULT_MAX_CODEWORDS)
}

pub fn draw_codebook_capped(
    qx: &Distribution,
    n: usize,
    rate: f64,
    seed: u64,
    max_codewords: usize,
) -> Result<Codebook> {
    let m = codebook_size(n, rate, max_codewords)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codewords = qx.sample_block(m * n, &mut rng);
    Ok(Codebook {
        n,
        rate,
        alphabet: qx.alphabet(),
        codewords,
        seed: Some(seed),
    })
}

fn check_compatible(ch: &Channel, cb: &Codebook) -> Result<()> {
    if !cb.alphabet.compatible(ch.input_alphabet()) {
        return Err(Error::Domain(format!(
            "codebook over {} does not match channel input {}",
            cb.alphabet,
            ch.input_alphabet()
        )));
    }
    Ok(())
}

/// `ln P_{Yⁿ|C}(yⁿ)`: log of the codeword-averaged kernel, via log-sum-exp.
pub fn induced_output_log_prob(ch: &Channel, cb: &Codebook, y_block: &[Symbol]) -> Result<f64> {
    check_compatible(ch, cb)?;
    if y_block.len() != cb.n {
        return Err(Error::Domain(format!(
            "output block has length {}, codebook has n = {}",
            y_block.len(),
            cb.n
        )));
    }
    let terms = cb
        .codewords()
        .map(|c| {
            c.iter()
                .zip(y_block)
                .map(|(x, y)| ch.kernel_log_prob(x, y))
                .sum::<Result<f64>>()
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(log_sum_exp(&terms) - (cb.m() as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TvMethod {
    ExactEnumeration,
    MonteCarlo,
}

impl TvMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TvMethod::ExactEnumeration => "exact-enumeration",
            TvMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TVReport {
    /// One-sided variational distance in `[0, 1]`.
    pub tv: f64,
    pub method: TvMethod,
    pub std_error: Option<f64>,
    pub samples: Option<usize>,
    pub n: usize,
    pub rate: f64,
    pub codebook_seed: Option<u64>,
}

impl TVReport {
    /// The same distance in the L1 convention (twice the one-sided value).
    pub fn l1(&self) -> f64 {
        2.0 * self.tv
    }
}

/// Per-codeword kernel rows over a finite output alphabet, shared by the
/// exact enumeration and the table-driven Monte Carlo path.
struct RowTable {
    width: usize,
    probs: Vec<f64>,
    logs: Vec<f64>,
    /// Row index for codeword letter `(m, j)` at `m·n + j`.
    ids: Vec<usize>,
}

impl RowTable {
    fn new(ch: &Channel, cb: &Codebook) -> Result<Self> {
        let width = ch
            .output_alphabet()
            .size()
            .ok_or_else(|| Error::Domain(format!("{} has a continuous output alphabet", ch.label())))?;
        let (probs, ids) = match ch.rows() {
            Some(rows) => (
                rows.iter().flat_map(|r| r.probs().iter().copied()).collect(),
                cb.codewords
                    .iter()
                    .map(|s| s.index().expect("finite input letters"))
                    .collect(),
            ),
            None => {
                let mut probs = Vec::with_capacity(cb.codewords.len() * width);
                for s in &cb.codewords {
                    probs.extend(ch.kernel_row(s)?);
                }
                (probs, (0..cb.codewords.len()).collect())
            }
        };
        let logs = probs.iter().map(|p: &f64| p.ln()).collect();
        Ok(RowTable {
            width,
            probs,
            logs,
            ids,
        })
    }

    #[inline]
    fn prob(&self, row: usize, y: usize) -> f64 {
        self.probs[row * self.width + y]
    }

    #[inline]
    fn log(&self, row: usize, y: usize) -> f64 {
        self.logs[row * self.width + y]
    }
}

/// Everything computed by one pass over all output blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    /// `Σ (P − Q)⁺`.
    pub tv: f64,
    /// `½ Σ |P − Q|`, computed independently of `tv`.
    pub half_l1: f64,
    pub induced_mass: f64,
    pub split: Option<ExactSplit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSplit {
    pub threshold: f64,
    pub p1_mass: f64,
    pub p2_mass: f64,
    /// `Σ (P₁ − Q)⁺`.
    pub typical_tv_part: f64,
    /// `max |P₁(yⁿ) + P₂(yⁿ) − P(yⁿ)|` over all blocks.
    pub max_reconstruction_error: f64,
}

struct Enumerator<'a> {
    table: &'a RowTable,
    target: &'a [f64],
    n: usize,
    m: usize,
    threshold: Option<f64>,
    levels: Vec<Vec<f64>>,
    tv: f64,
    half_l1: f64,
    mass: f64,
    p1: f64,
    p2: f64,
    typical_tv: f64,
    max_err: f64,
    singular: bool,
}

impl Enumerator<'_> {
    fn visit(&mut self, depth: usize, q: f64) {
        if depth == self.n {
            self.leaf(q);
            return;
        }
        for y in 0..self.table.width {
            let qy = self.target[y];
            {
                let (head, tail) = self.levels.split_at_mut(depth + 1);
                let cur = &head[depth];
                let next = &mut tail[0];
                for m in 0..self.m {
                    let row = self.table.ids[m * self.n + depth];
                    next[m] = cur[m] * self.table.prob(row, y);
                }
            }
            self.visit(depth + 1, q * qy);
        }
    }

    fn leaf(&mut self, q: f64) {
        let probs = &self.levels[self.n];
        let inv_m = 1.0 / self.m as f64;
        let p = probs.iter().sum::<f64>() * inv_m;
        if q == 0.0 && p > 0.0 {
            self.singular = true;
        }
        self.tv += (p - q).max(0.0);
        self.half_l1 += 0.5 * (p - q).abs();
        self.mass += p;
        if let Some(threshold) = self.threshold {
            let (mut typ, mut atyp) = (0.0, 0.0);
            // Compare products against q·exp(threshold) to avoid a log per
            // codeword; fall back to the log form when that product is not a
            // normal float.
            let cutoff = q * threshold_ratio(threshold);
            if cutoff.is_normal() {
                for &pm in probs {
                    if pm > cutoff {
                        atyp += pm;
                    } else {
                        typ += pm;
                    }
                }
            } else {
                let log_q = q.ln();
                for &pm in probs {
                    if exceeds_threshold(pm.ln() - log_q, threshold) {
                        atyp += pm;
                    } else {
                        typ += pm;
                    }
                }
            }
            let (p1, p2) = (typ * inv_m, atyp * inv_m);
            self.p1 += p1;
            self.p2 += p2;
            self.typical_tv += (p1 - q).max(0.0);
            self.max_err = self.max_err.max((p1 + p2 - p).abs());
        }
    }
}

/// Exact enumeration of all `|𝒴|ⁿ` output blocks. When `threshold` (the value
/// `n(I + ε)`) is given, the induced law is also split into its typical and
/// atypical parts.
pub fn exact_summary(
    ch: &Channel,
    cb: &Codebook,
    qy: &Distribution,
    threshold: Option<f64>,
    cap: usize,
) -> Result<ExactSummary> {
    check_compatible(ch, cb)?;
    let target = qy
        .as_pmf()
        .ok_or_else(|| Error::Domain("exact enumeration needs a finite target".into()))?;
    let width = ch
        .output_alphabet()
        .size()
        .ok_or_else(|| Error::Domain(format!("{} has a continuous output", ch.label())))?;
    if target.len() != width {
        return Err(Error::Domain("target and channel output sizes differ".into()));
    }
    let size = (width as f64).powi(cb.n as i32);
    if size > cap as f64 {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let table = RowTable::new(ch, cb)?;
    let m = cb.m();
    let mut levels = vec![vec![0.0; m]; cb.n + 1];
    levels[0].iter_mut().for_each(|v| *v = 1.0);
    let mut e = Enumerator {
        table: &table,
        target: target.probs(),
        n: cb.n,
        m,
        threshold,
        levels,
        tv: 0.0,
        half_l1: 0.0,
        mass: 0.0,
        p1: 0.0,
        p2: 0.0,
        typical_tv: 0.0,
        max_err: 0.0,
        singular: false,
    };
    e.visit(0, 1.0);
    if e.singular {
        return Err(Error::AbsoluteContinuity(format!(
            "codebook (seed {:?}) reaches an output block with zero target probability",
            cb.seed
        )));
    }
    Ok(ExactSummary {
        tv: e.tv.clamp(0.0, 1.0),
        half_l1: e.half_l1,
        induced_mass: e.mass,
        split: threshold.map(|threshold| ExactSplit {
            threshold,
            p1_mass: e.p1,
            p2_mass: e.p2,
            typical_tv_part: e.typical_tv,
            max_reconstruction_error: e.max_err,
        }),
    })
}

pub fn tv_exact(ch: &Channel, cb: &Codebook, qy: &Distribution) -> Result<TVReport> {
    tv_exact_capped(ch, cb, qy, DEFAULT_ENUMERATION_CAP)
}

pub fn tv_exact_capped(ch: &Channel, cb: &Codebook, qy: &Distribution, cap: usize) -> Result<TVReport> {
    let s = exact_summary(ch, cb, qy, None, cap)?;
    Ok(TVReport {
        tv: s.tv,
        method: TvMethod::ExactEnumeration,
        std_error: None,
        samples: None,
        n: cb.n,
        rate: cb.rate,
        codebook_seed: cb.seed,
    })
}

/// Log-likelihoods `ln Kⁿ(C(m), yⁿ)` for every codeword.
enum Likelihood {
    Table(RowTable),
    Generic,
}

impl Likelihood {
    fn new(ch: &Channel, cb: &Codebook) -> Result<Self> {
        Ok(if ch.output_alphabet().is_finite() {
            Likelihood::Table(RowTable::new(ch, cb)?)
        } else {
            Likelihood::Generic
        })
    }

    fn fill(&self, ch: &Channel, cb: &Codebook, y: &[Symbol], out: &mut [f64]) -> Result<()> {
        match self {
            Likelihood::Table(t) => {
                let ys: Vec<usize> = y.iter().map(|s| s.index().expect("finite output")).collect();
                for (m, o) in out.iter_mut().enumerate() {
                    *o = ys
                        .iter()
                        .enumerate()
                        .map(|(j, &yj)| t.log(t.ids[m * cb.n + j], yj))
                        .sum();
                }
            }
            Likelihood::Generic => {
                for (m, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (x, yj) in cb.codeword(m).iter().zip(y) {
                        acc += ch.kernel_log_prob(x, yj)?;
                    }
                    *o = acc;
                }
            }
        }
        Ok(())
    }
}

/// Per-sample quantities of the Monte Carlo estimators.
#[derive(Default, Clone, Copy)]
struct SampleAcc {
    tv: Moments,
    typical: Moments,
    p2: Moments,
}

/// Runs the importance-free estimator `yⁿ ~ Q_{Yⁿ}` over independent chunks
/// and merges them in chunk order.
fn monte_carlo_pass(
    ch: &Channel,
    cb: &Codebook,
    qy: &Distribution,
    threshold: Option<f64>,
    num_samples: usize,
    seed: u64,
) -> Result<SampleAcc> {
    check_compatible(ch, cb)?;
    if num_samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    if !qy.alphabet().compatible(ch.output_alphabet()) {
        return Err(Error::Domain("target is not on the channel output alphabet".into()));
    }
    let lik = Likelihood::new(ch, cb)?;
    let m = cb.m();
    let log_m = (m as f64).ln();
    let chunks = num_samples.div_ceil(MC_CHUNK);
    let parts: Vec<Result<SampleAcc>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(num_samples - c * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[c as u64]));
            let mut ll = vec![0.0; m];
            let mut acc = SampleAcc::default();
            let mut typ_terms = Vec::with_capacity(m);
            let mut atyp_terms = Vec::with_capacity(m);
            for _ in 0..len {
                let y = qy.sample_block(cb.n, &mut rng);
                let log_q: f64 = y.iter().map(|s| qy.log_prob(s)).sum::<Result<f64>>()?;
                lik.fill(ch, cb, &y, &mut ll)?;
                let log_ratio = log_sum_exp(&ll) - log_m - log_q;
                acc.tv.push(positive_excess(log_ratio)?);
                if let Some(threshold) = threshold {
                    typ_terms.clear();
                    atyp_terms.clear();
                    for &l in &ll {
                        if exceeds_threshold(l - log_q, threshold) {
                            atyp_terms.push(l);
                        } else {
                            typ_terms.push(l);
                        }
                    }
                    let r1 = log_sum_exp(&typ_terms) - log_m - log_q;
                    let r2 = log_sum_exp(&atyp_terms) - log_m - log_q;
                    acc.typical.push(positive_excess(r1)?);
                    let p2 = r2.exp();
                    if !p2.is_finite() {
                        return Err(Error::Estimation(format!("atypical ratio overflow (log {r2})")));
                    }
                    acc.p2.push(p2);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = SampleAcc::default();
    for p in parts {
        let p = p?;
        total.tv.merge(&p.tv);
        total.typical.merge(&p.typical);
        total.p2.merge(&p.p2);
    }
    Ok(total)
}

/// `(exp(r) − 1)⁺` evaluated from the log ratio `r`.
fn positive_excess(log_ratio: f64) -> Result<f64> {
    if log_ratio.is_nan() {
        return Err(Error::Estimation("NaN likelihood ratio".into()));
    }
    if log_ratio <= 0.0 {
        return Ok(0.0);
    }
    let v = log_ratio.exp_m1();
    if !v.is_finite() {
        return Err(Error::Estimation(format!(
            "likelihood ratio overflow (log {log_ratio})"
        )));
    }
    Ok(v)
}

/// Unbiased estimate of `E_Q[(dP/dQ − 1)⁺]` from `num_samples` draws of `Q_{Yⁿ}`.
pub fn tv_monte_carlo(
    ch: &Channel,
    cb: &Codebook,
    qy: &Distribution,
    num_samples: usize,
    seed: u64,
) -> Result<TVReport> {
    let acc = monte_carlo_pass(ch, cb, qy, None, num_samples, seed)?;
    Ok(TVReport {
        tv: acc.tv.mean().clamp(0.0, 1.0),
        method: TvMethod::MonteCarlo,
        std_error: Some(acc.tv.std_error()),
        samples: Some(num_samples),
        n: cb.n,
        rate: cb.rate,
        codebook_seed: cb.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitMethod {
    Exact { cap: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// The typical/atypical decomposition of the induced output law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSplit {
    pub epsilon: f64,
    /// `n(I + ε)`.
    pub threshold: f64,
    /// `P₂(𝒴ⁿ)`.
    pub p2_mass: f64,
    /// `E_Q[(dP₁/dQ − 1)⁺]`.
    pub typical_tv_part: f64,
    /// The full distance from the same pass.
    pub tv: f64,
    pub method: TvMethod,
    pub p2_std_error: Option<f64>,
    pub typical_std_error: Option<f64>,
    pub tv_std_error: Option<f64>,
    /// `P₁(𝒴ⁿ)`, exact mode only.
    pub p1_mass: Option<f64>,
    /// Exact mode only.
    pub max_reconstruction_error: Option<f64>,
}

/// Splits the induced law at the typical set `{i(xⁿ;yⁿ)/n ≤ I + ε}`, with `I`
/// computed from `(ch, qx)`.
pub fn typical_split(
    ch: &Channel,
    cb: &Codebook,
    qx: &Distribution,
    qy: &Distribution,
    epsilon: f64,
    method: SplitMethod,
) -> Result<TypicalSplit> {
    let mi = info::mutual_information(ch, qx)?.value;
    typical_split_with_mi(ch, cb, qy, mi, epsilon, method)
}

pub fn typical_split_with_mi(
    ch: &Channel,
    cb: &Codebook,
    qy: &Distribution,
    mutual_information: f64,
    epsilon: f64,
    method: SplitMethod,
) -> Result<TypicalSplit> {
    let threshold = cb.n as f64 * (mutual_information + epsilon);
    match method {
        SplitMethod::Exact { cap } => {
            let s = exact_summary(ch, cb, qy, Some(threshold), cap)?;
            let split = s.split.expect("threshold was given");
            Ok(TypicalSplit {
                epsilon,
                threshold,
                p2_mass: split.p2_mass,
                typical_tv_part: split.typical_tv_part,
                tv: s.tv,
                method: TvMethod::ExactEnumeration,
                p2_std_error: None,
                typical_std_error: None,
                tv_std_error: None,
                p1_mass: Some(split.p1_mass),
                max_reconstruction_error: Some(split.max_reconstruction_error),
            })
        }
        SplitMethod::MonteCarlo { samples, seed } => {
            let acc = monte_carlo_pass(ch, cb, qy, Some(threshold), samples, seed)?;
            Ok(TypicalSplit {
                epsilon,
                threshold,
                p2_mass: acc.p2.mean(),
                typical_tv_part: acc.typical.mean(),
                tv: acc.tv.mean().clamp(0.0, 1.0),
                method: TvMethod::MonteCarlo,
                p2_std_error: Some(acc.p2.std_error()),
                typical_std_error: Some(acc.typical.std_error()),
                tv_std_error: Some(acc.tv.std_error()),
                p1_mass: None,
                max_reconstruction_error: None,
            })
        }
    }
}

/// Law of a sum of independent discrete variables, atoms merged on ties.
fn convolve(acc: &[(f64, f64)], step: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(acc.len() * step.len());
    for (a, pa) in acc {
        for (b, pb) in step {
            let v = if *a == f64::NEG_INFINITY || *b == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                a + b
            };
            out.push((v, pa * pb));
        }
    }
    let merged = info::merge_atoms(out);
    if merged.len() > DP_SUPPORT_CAP {
        return Err(Error::EnumerationTooLarge {
            size: merged.len() as f64,
            cap: DP_SUPPORT_CAP,
        });
    }
    Ok(merged)
}

fn tail_mass(law: &[(f64, f64)], threshold: f64) -> f64 {
    law.iter()
        .filter(|(v, _)| exceeds_threshold(*v, threshold))
        .map(|(_, p)| p)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AtypicalMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `Q_{Xⁿ,Yⁿ}(i(Xⁿ;Yⁿ) > n(I + ε))`, the expected atypical mass of a random codebook.
pub fn atypical_mass_expectation(
    ch: &Channel,
    qx: &Distribution,
    n: usize,
    epsilon: f64,
    method: AtypicalMethod,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let mi = info::mutual_information(ch, qx)?.value;
    let threshold = n as f64 * (mi + epsilon);
    match method {
        AtypicalMethod::Exact => {
            let letter = DensityLaw::new(ch, qx)?.merged();
            let mut law = vec![(0.0, 1.0)];
            for _ in 0..n {
                law = convolve(&law, &letter)?;
            }
            Ok(Estimate::exact(tail_mass(&law, threshold)))
        }
        AtypicalMethod::MonteCarlo { samples, seed } => {
            let cfg = info::EvalConfig {
                mc_samples: samples * n,
                seed,
                ..info::EvalConfig::default()
            };
            let dens = info::monte_carlo_density_samples(ch, qx, &cfg)?;
            let mut m = Moments::default();
            for block in dens.chunks(n) {
                m.push(if exceeds_threshold(block.iter().sum(), threshold) {
                    1.0
                } else {
                    0.0
                });
            }
            Ok(Estimate::monte_carlo(m.mean(), m.std_error(), samples))
        }
    }
}

/// `P₂(𝒴ⁿ)` computed codeword by codeword: for each codeword the exact law of
/// `i(C(m); Yⁿ)` under `Yⁿ ~ Kⁿ(C(m), ·)` is built by convolution and its
/// tail above `threshold` is averaged over the codebook. Finite channels only.
pub fn atypical_mass_by_codeword(ch: &Channel, cb: &Codebook, qy: &Distribution, threshold: f64) -> Result<f64> {
    check_compatible(ch, cb)?;
    let rows = ch
        .rows()
        .ok_or_else(|| Error::Domain(format!("{} is not a finite channel", ch.label())))?;
    let target = qy
        .as_pmf()
        .ok_or_else(|| Error::Domain("finite target required".into()))?;
    let letter_laws: Vec<Vec<(f64, f64)>> = rows
        .iter()
        .map(|row| {
            info::merge_atoms(
                row.probs()
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0.0)
                    .map(|(y, k)| (info::density_from_logs(k.ln(), target.log_probs()[y]), *k))
                    .collect(),
            )
        })
        .collect();
    let mut total = 0.0;
    for c in cb.codewords() {
        let mut law = vec![(0.0, 1.0)];
        for x in c {
            law = convolve(&law, &letter_laws[x.index().expect("finite input")])?;
        }
        total += tail_mass(&law, threshold);
    }
    Ok(total / cb.m() as f64)
}
