mod common;

use proptest::prelude::*;
use resolvability::info::{self, DensityLaw, EvalConfig};
use resolvability::{Channel, Distribution};

fn entropy(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter().filter(|&v| v > 0.0).map(|v| -v * v.ln()).sum()
}

/// `H(Y) − H(Y|X)` straight from the matrix.
fn mi_oracle(rows: &[Vec<f64>], px: &[f64]) -> f64 {
    let ny = rows[0].len();
    let qy: Vec<f64> = (0..ny)
        .map(|y| rows.iter().zip(px).map(|(r, p)| p * r[y]).sum())
        .collect();
    entropy(qy)
        - rows
            .iter()
            .zip(px)
            .map(|(r, p)| p * entropy(r.iter().copied()))
            .sum::<f64>()
}

/// Rows with some entries forced to zero, keeping one positive entry per row.
fn sparse_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=4, 2usize..=4).prop_flat_map(|(nx, ny)| {
        (
            common::stochastic_rows(nx, ny, 0.01),
            prop::collection::vec(prop::collection::vec(any::<bool>(), ny), nx),
        )
            .prop_map(|(rows, mask)| {
                rows.into_iter()
                    .zip(mask)
                    .map(|(r, m)| {
                        let mut r: Vec<f64> = r.iter().zip(&m).map(|(v, &z)| if z { 0.0 } else { *v }).collect();
                        if r.iter().all(|&v| v == 0.0) {
                            r[0] = 1.0;
                        }
                        let s: f64 = r.iter().sum();
                        r.into_iter().map(|v| v / s).collect()
                    })
                    .collect()
            })
    })
}

proptest! {
    #[test]
    fn mean_density_is_mutual_information(rows in sparse_rows(), seed in any::<u64>()) {
        let px = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..rows.len()).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let ch = Channel::dmc(rows.clone()).unwrap();
        let qx = Distribution::pmf(px.clone()).unwrap();
        let law = DensityLaw::new(&ch, &qx).unwrap();
        let mi = info::mutual_information(&ch, &qx).unwrap();
        prop_assert!(mi.is_exact());
        prop_assert!((law.mean() - mi_oracle(&rows, &px)).abs() <= 1e-12);
        prop_assert!((mi.value - mi_oracle(&rows, &px)).abs() <= 1e-12);
    }

    #[test]
    fn change_of_measure_mass_is_at_most_one(rows in sparse_rows()) {
        let ch = Channel::dmc(rows.clone()).unwrap();
        let qx = Distribution::uniform(rows.len()).unwrap();
        let mass = DensityLaw::new(&ch, &qx).unwrap().change_of_measure_mass();
        prop_assert!(mass <= 1.0 + 1e-12, "mass {mass}");
        if rows.iter().flatten().all(|&k| k > 0.0) {
            prop_assert!((mass - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn renyi_is_scaled_log_mgf((ch, qx) in common::dmc_with_input(), alpha in 1.01f64..4.0) {
        let d = info::renyi_divergence(&ch, &qx, alpha).unwrap();
        let mgf = info::info_density_mgf(&ch, &qx, alpha - 1.0).unwrap();
        prop_assert!((d - mgf.ln() / (alpha - 1.0)).abs() <= 1e-12 * d.abs().max(1.0));
    }

    #[test]
    fn renyi_is_nondecreasing_in_order((ch, qx) in common::dmc_with_input()) {
        let mi = info::mutual_information(&ch, &qx).unwrap().value;
        let mut prev = mi;
        for k in 1..=40 {
            let alpha = 1.0 + 0.05 * k as f64;
            let d = info::renyi_divergence(&ch, &qx, alpha).unwrap();
            prop_assert!(d >= prev - 1e-12, "D_{alpha} = {d} < {prev}");
            prev = d;
        }
    }
}

#[test]
fn exact_dispersion_matches_monte_carlo() {
    let cases = [
        (Channel::bsc(0.25).unwrap(), Distribution::uniform(2).unwrap()),
        (
            Channel::dmc(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap(),
            Distribution::pmf(vec![0.35, 0.65]).unwrap(),
        ),
    ];
    let cfg = EvalConfig {
        mc_samples: 400_000,
        seed: 17,
        ..EvalConfig::default()
    };
    for (ch, qx) in &cases {
        let exact = info::dispersion_moments(ch, qx).unwrap();
        let mc = info::monte_carlo_moments(ch, qx, &cfg).unwrap();
        let mi = info::mutual_information(ch, qx).unwrap().value;
        assert!((mc.mutual_information.value - mi).abs() <= 4.0 * mc.mutual_information.std_error.unwrap());
        assert!(
            (mc.v.value - exact.v.value).abs() <= 4.0 * mc.v.std_error.unwrap(),
            "{} V",
            ch.label()
        );
        assert!(
            (mc.rho.value - exact.rho.value).abs() <= 4.0 * mc.rho.std_error.unwrap(),
            "{} rho",
            ch.label()
        );
    }
}

#[test]
fn block_sums_centre_on_n_times_mi() {
    let (ch, qx) = common::bsc(0.25);
    let n = 50;
    let sums = info::monte_carlo_block_sums(&ch, &qx, n, 20_000, 3).unwrap();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let v = info::dispersion_moments(&ch, &qx).unwrap().v.value;
    let mi = info::mutual_information(&ch, &qx).unwrap().value;
    let se = (n as f64 * v / sums.len() as f64).sqrt();
    assert!((mean - n as f64 * mi).abs() <= 4.0 * se);
    assert_eq!(sums, info::monte_carlo_block_sums(&ch, &qx, n, 20_000, 3).unwrap());
}
