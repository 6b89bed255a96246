//! Small numerical helpers: log-sum-exp, Gaussian tails, Gauss-Hermite rules
//! and seed derivation.

use statrs::function::erf::erfc;

/// `ln Σ exp(v)`, returning `-inf` for an empty or all `-inf` slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Gaussian upper tail `P(Z > a)` for a standard normal `Z`.
pub fn normal_sf(a: f64) -> f64 {
    0.5 * erfc(a / std::f64::consts::SQRT_2)
}

/// Standard normal distribution function.
pub fn normal_cdf(a: f64) -> f64 {
    normal_sf(-a)
}

/// `P(lo < Z <= hi)` for `Z ~ N(mean, variance)`, evaluated on whichever
/// tail keeps the subtraction well conditioned.
pub fn normal_interval_prob(lo: f64, hi: f64, mean: f64, variance: f64) -> f64 {
    let sd = variance.sqrt();
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let p = if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    p.max(0.0)
}

pub fn normal_log_density(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (2.0 * std::f64::consts::PI * variance).ln() - d * d / (2.0 * variance)
}

/// Gauss-Hermite rule for expectations under a standard normal:
/// `E f(Z) ≈ Σ w_i f(z_i)`, weights summing to one.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an `order`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence (physicists' weight `exp(-x²)`), then rescales to the
    /// standard normal.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let n = order;
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let norm = std::f64::consts::PI.sqrt();
        let nodes = x.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
        let weights = w.iter().map(|v| v / norm).collect();
        GaussHermite { nodes, weights }
    }

    /// `E f(Z)` for `Z ~ N(0, 1)`.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }

    /// `E f(Z1, Z2)` for independent standard normals.
    pub fn expect2(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (z1, w1) in self.nodes.iter().zip(&self.weights) {
            for (z2, w2) in self.nodes.iter().zip(&self.weights) {
                acc += w1 * w2 * f(*z1, *z2);
            }
        }
        acc
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of stream identifiers. The result depends
/// only on the inputs, never on scheduling.
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    stream
        .iter()
        .fold(splitmix64(master), |acc, s| splitmix64(acc ^ splitmix64(*s)))
}

/// Stable 64-bit FNV-1a hash of a string, used to fold experiment ids into seeds.
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Accumulates sums for a mean / standard-error estimate.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    pub fn std_error(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[0.0, 0.0]), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn gauss_hermite_reproduces_normal_moments() {
        for order in [1, 2, 5, 20, 64] {
            let gh = GaussHermite::new(order);
            assert_relative_eq!(gh.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            if order >= 3 {
                assert_relative_eq!(gh.expect(|z| z * z), 1.0, epsilon = 1e-10);
                assert_relative_eq!(gh.expect(|z| z.powi(4)), 3.0, epsilon = 1e-9);
            }
        }
        let gh = GaussHermite::new(64);
        // E cos(Z) = exp(-1/2)
        assert_relative_eq!(gh.expect(f64::cos), (-0.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn interval_probabilities() {
        assert_relative_eq!(
            normal_interval_prob(f64::NEG_INFINITY, 0.0, 0.0, 1.0),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(normal_interval_prob(0.0, f64::INFINITY, 0.0, 1.0), 0.5, epsilon = 1e-15);
        let far = normal_interval_prob(10.0, 11.0, 0.0, 1.0);
        assert!(far > 0.0 && far < 1e-22);
    }

    #[test]
    fn derived_seeds_differ_per_stream() {
        let a = derive_seed(1, &[0, 1]);
        let b = derive_seed(1, &[1, 0]);
        let c = derive_seed(2, &[0, 1]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[0, 1]));
    }
}
