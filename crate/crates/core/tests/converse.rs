mod common;

use proptest::prelude::*;
use resolvability::codebook::{tv_exact_capped, DEFAULT_ENUMERATION_CAP};
use resolvability::converse::{
    self, averaged_input, converse_check, output_marginal, per_letter_tv_bound_check, quantize_channel,
    quantize_target, Quantizer,
};
use resolvability::{draw_codebook, tv_exact, Alphabet, Channel, Codebook, Distribution, Symbol};

proptest! {
    #[test]
    fn averaged_marginal_is_mean_of_position_marginals(
        (rows, words) in (2usize..=3, 2usize..=4).prop_flat_map(|(nx, ny)| (
            common::stochastic_rows(nx, ny, 0.0),
            (1usize..=5, 1usize..=6).prop_flat_map(move |(n, m)| prop::collection::vec(prop::collection::vec(0..nx, n), m)),
        ))
    ) {
        let ch = Channel::dmc(rows.clone()).unwrap();
        let cws = words.iter().map(|w| w.iter().map(|&x| Symbol::Index(x)).collect()).collect();
        let cb = Codebook::from_codewords(Alphabet::finite(rows.len()).unwrap(), cws).unwrap();
        let got = output_marginal(&ch, &averaged_input(&cb).unwrap()).unwrap();
        let (n, m) = (words[0].len(), words.len());
        for (y, g) in got.iter().enumerate() {
            let mut want = 0.0;
            for j in 0..n {
                want += words.iter().map(|w| rows[w[j]][y]).sum::<f64>() / m as f64;
            }
            want /= n as f64;
            prop_assert!((g - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn converse_holds_for_random_codebooks(p in 0.05f64..0.45, rate in 0.05f64..0.7, n in 2usize..=8, seed in any::<u64>()) {
        let (ch, qx) = common::bsc(p);
        let qy = ch.output_distribution(&qx).unwrap();
        let cb = draw_codebook(&qx, n, rate, seed).unwrap();
        let delta = tv_exact(&ch, &cb, &qy).unwrap().tv;
        match converse_check(&ch, &cb, delta) {
            Ok(r) => prop_assert!(r.holds, "{r:?}"),
            Err(resolvability::Error::HypothesisViolation(_)) => prop_assert!(delta > 0.25),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn finer_quantizers_never_increase_tv() {
    let ch = Channel::awgn(1.0).unwrap();
    let qx = Distribution::gaussian(0.0, 1.0).unwrap();
    let qy = ch.output_distribution(&qx).unwrap();
    for seed in 0..6 {
        let cb = draw_codebook(&qx, 3, 0.6, seed).unwrap();
        let mut prev = 0.0;
        for k in [2, 4, 8, 16] {
            let q = Quantizer::equiprobable(&qy, k).unwrap();
            let tv = tv_exact_capped(
                &quantize_channel(&ch, &q).unwrap(),
                &cb,
                &quantize_target(&qy, &q).unwrap(),
                DEFAULT_ENUMERATION_CAP,
            )
            .unwrap()
            .tv;
            assert!(tv + 1e-12 >= prev, "seed {seed} k {k}: {tv} < {prev}");
            prev = tv;
        }
    }
}

#[test]
fn trivial_quantizer_leaves_finite_tv_alone() {
    let (ch, qx) = common::bsc(0.2);
    let qy = ch.output_distribution(&qx).unwrap();
    let q = Quantizer::trivial(2);
    for seed in 0..5 {
        let cb = draw_codebook(&qx, 6, 0.3, seed).unwrap();
        let a = tv_exact(&ch, &cb, &qy).unwrap().tv;
        let b = tv_exact(
            &quantize_channel(&ch, &q).unwrap(),
            &cb,
            &quantize_target(&qy, &q).unwrap(),
        )
        .unwrap()
        .tv;
        assert_eq!(a, b);
    }
}

#[test]
fn per_letter_distance_is_below_block_distance() {
    let ch = Channel::dmc(vec![vec![0.7, 0.2, 0.1], vec![0.15, 0.35, 0.5]]).unwrap();
    let qx = Distribution::pmf(vec![0.45, 0.55]).unwrap();
    let qy = ch.output_distribution(&qx).unwrap();
    for seed in 0..50u64 {
        let n = 1 + (seed % 8) as usize;
        let cb = draw_codebook(&qx, n, 0.35, seed).unwrap();
        let r = per_letter_tv_bound_check(&cb, &ch, &qy, DEFAULT_ENUMERATION_CAP, 10_000, seed).unwrap();
        assert!(r.holds, "seed {seed}: {r:?}");
    }
}

#[test]
fn zero_rate_codebook_is_covered_by_the_slack() {
    let (ch, _) = common::bsc(0.25);
    let qy = Distribution::uniform(2).unwrap();
    let cb = Codebook::from_codewords(Alphabet::finite(2).unwrap(), vec![vec![Symbol::Index(0); 3]]).unwrap();
    let delta = tv_exact(&ch, &cb, &qy).unwrap().tv;
    // A single all-zero codeword sits far from uniform, so δ exceeds 1/4.
    assert!(delta > 0.25);
    assert!(converse_check(&ch, &cb, delta).is_err());
    let r = converse::converse_check_with_input(&ch, &averaged_input(&cb).unwrap(), 0.0, 0.25).unwrap();
    assert!(r.i_ell <= r.slack + 1e-9);
}
