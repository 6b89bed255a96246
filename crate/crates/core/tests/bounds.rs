mod common;

use proptest::prelude::*;
use resolvability::bounds::{self, SearchGrid};
use resolvability::codebook::{atypical_mass_expectation, AtypicalMethod};
use resolvability::info;
use resolvability::{Channel, Distribution};

/// `D_α` summed directly from the matrix: `ln Σ p(x) K(y|x)^α q(y)^{1−α} / (α−1)`.
fn renyi_oracle(rows: &[Vec<f64>], px: &[f64], alpha: f64) -> f64 {
    let ny = rows[0].len();
    let qy: Vec<f64> = (0..ny)
        .map(|y| rows.iter().zip(px).map(|(r, p)| p * r[y]).sum())
        .collect();
    let s: f64 = rows
        .iter()
        .zip(px)
        .flat_map(|(r, p)| {
            r.iter()
                .zip(&qy)
                .map(move |(k, q)| p * k.powf(alpha) * q.powf(1.0 - alpha))
        })
        .sum();
    s.ln() / (alpha - 1.0)
}

proptest! {
    #[test]
    fn lemma1_decreases_in_delta_and_codebook_size(
        mu in 1e-4f64..1.0, d1 in 0.01f64..1.0, d2 in 0.01f64..1.0, n in 1usize..40, rate in 0.01f64..1.0,
    ) {
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(bounds::lemma1_bound_ln(mu, hi, n, rate) <= bounds::lemma1_bound_ln(mu, lo, n, rate));
        prop_assert!(bounds::lemma1_bound_ln(mu, lo, n + 1, rate) <= bounds::lemma1_bound_ln(mu, lo, n, rate));
        prop_assert!(bounds::lemma1_bound_ln(mu, lo, n, rate * 1.1) <= bounds::lemma1_bound_ln(mu, lo, n, rate));
    }

    #[test]
    fn lemma2_decreases_in_delta(d1 in 1e-3f64..2.0, d2 in 1e-3f64..2.0, lambda in 0.1f64..50.0, extra in 0.0f64..20.0) {
        let log_r = (6.0 * lambda).ln() + extra;
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = bounds::lemma2_bound_ln_r(hi, lambda, log_r).unwrap();
        let b = bounds::lemma2_bound_ln_r(lo, lambda, log_r).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn chernoff_decreases_in_n_when_the_exponent_is_positive(
        alpha in 1.01f64..3.0, i in 0.01f64..1.0, eps in 0.0f64..0.5, d_alpha in 0.0f64..1.5, n in 1usize..200,
    ) {
        let a = bounds::chernoff_atypical_bound(alpha, i, eps, d_alpha, n).unwrap();
        let b = bounds::chernoff_atypical_bound(alpha, i, eps, d_alpha, n + 1).unwrap();
        if i + eps > d_alpha {
            prop_assert!(b <= a);
        } else {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn q_inverse_round_trips(a in -8.0f64..8.0) {
        let p = bounds::q_function(a);
        let back = bounds::q_function(bounds::q_inverse(p).unwrap());
        prop_assert!((back - p).abs() <= 1e-12 * p.max(1e-300) + 1e-300);
        if a >= -5.0 {
            prop_assert!((bounds::q_inverse(p).unwrap() - a).abs() <= 1e-9);
        }
    }

    #[test]
    fn selected_parameters_pass_an_independent_check(
        (rows, px) in (2usize..=3, 2usize..=3).prop_flat_map(|(nx, ny)| (common::stochastic_rows(nx, ny, 0.05), common::pmf(nx, 0.1))),
        excess in 0.05f64..1.0,
    ) {
        let ch = Channel::dmc(rows.clone()).unwrap();
        let qx = Distribution::pmf(px.clone()).unwrap();
        let i = info::mutual_information(&ch, &qx).unwrap().value;
        let rate = i + excess;
        let p = bounds::select_first_order_params_for(&ch, &qx, rate, &SearchGrid::default()).unwrap();
        let d_alpha = renyi_oracle(&rows, &px, p.alpha);
        let gap = rate - i - p.epsilon;
        prop_assert!((p.d_alpha - d_alpha).abs() <= 1e-10);
        prop_assert!(p.epsilon > 0.0 && gap > 0.0);
        prop_assert!(p.alpha > 1.0);
        prop_assert!(p.beta1 <= (p.alpha - 1.0) * (i + p.epsilon - d_alpha) * (1.0 + 1e-12));
        prop_assert!(0.0 < p.beta1 && p.beta1 < p.beta2 && p.beta2 < gap / 2.0);
        prop_assert!(0.0 < p.gamma1 && p.gamma1 < p.beta1);
        prop_assert!(0.0 < p.gamma2 && p.gamma2 < (rate - p.beta1).min(p.beta2 - p.beta1));
        // At n_min the Lemma 2 hypothesis r ≥ 6λ must hold, and fail one step earlier.
        let n = p.n_min;
        prop_assert!(bounds::lemma2_bound_ln(p.delta(n), p.lambda(n), n, rate, i, p.epsilon).is_ok());
        if n > 1 {
            prop_assert!(bounds::lemma2_bound_ln(p.delta(n - 1), p.lambda(n - 1), n - 1, rate, i, p.epsilon).is_err());
        }
    }
}

/// `P(Σ i > n(I + ε))` for BSC(p) with uniform input from the binomial law of
/// the number of flips.
fn bsc_atypical_oracle(p: f64, n: usize, eps: f64) -> f64 {
    let (good, bad) = ((2.0 * (1.0 - p)).ln(), (2.0 * p).ln());
    let i = (1.0 - p) * good + p * bad;
    let thr = n as f64 * (i + eps);
    let mut total = 0.0;
    for k in 0..=n {
        let s = (n - k) as f64 * good + k as f64 * bad;
        if s > thr + 1e-9 * thr.abs().max(1.0) {
            let ln_c: f64 = (1..=n).map(|j| (j as f64).ln()).sum::<f64>()
                - (1..=k).map(|j| (j as f64).ln()).sum::<f64>()
                - (1..=n - k).map(|j| (j as f64).ln()).sum::<f64>();
            total += (ln_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp();
        }
    }
    total
}

#[test]
fn chernoff_dominates_exact_atypical_mass() {
    for p in [0.1, 0.25, 0.4] {
        let (ch, qx) = common::bsc(p);
        let i = info::mutual_information(&ch, &qx).unwrap().value;
        for n in [5, 10, 20, 40] {
            for eps in [0.01, 0.05, 0.1, 0.15, 0.3] {
                let exact = atypical_mass_expectation(&ch, &qx, n, eps, AtypicalMethod::Exact)
                    .unwrap()
                    .value;
                assert!(
                    (exact - bsc_atypical_oracle(p, n, eps)).abs() <= 1e-12,
                    "p={p} n={n} eps={eps}"
                );
                for alpha in [1.1, 1.5, 2.0, 3.0] {
                    let d = info::renyi_divergence(&ch, &qx, alpha).unwrap();
                    let bound = bounds::chernoff_atypical_bound(alpha, i, eps, d, n).unwrap();
                    assert!(bound >= exact * (1.0 - 1e-12), "p={p} n={n} eps={eps} α={alpha}");
                }
            }
        }
    }
}

#[test]
fn second_order_mu_formula() {
    let (ch, qx) = common::bsc(0.25);
    let i = info::mutual_information(&ch, &qx).unwrap().value;
    let disp = info::dispersion_moments(&ch, &qx).unwrap();
    let p = bounds::second_order_schedule(i, disp.v.value, disp.rho.value, 0.1, 2.0, 0.5, 256).unwrap();
    assert!((p.mu - 0.14011149127003208).abs() <= 1e-9);
    assert!(bounds::check_second_order_n(2.0, 0.5, 8).is_err());
    assert!(bounds::check_second_order_n(2.0, 0.5, 16).is_ok());
}
