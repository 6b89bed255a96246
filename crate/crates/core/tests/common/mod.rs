#![allow(dead_code)]

use proptest::prelude::*;
use resolvability::{Channel, Distribution};

/// Row-stochastic matrix with every entry at least `floor`.
pub fn stochastic_rows(rows: usize, cols: usize, floor: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(floor..1.0f64, cols), rows).prop_map(|m| {
        m.into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect()
    })
}

pub fn pmf(len: usize, floor: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(floor..1.0f64, len).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// A small DMC together with an input law, both with full support.
pub fn dmc_with_input() -> impl Strategy<Value = (Channel, Distribution)> {
    (2usize..=4, 2usize..=4)
        .prop_flat_map(|(nx, ny)| (stochastic_rows(nx, ny, 0.02), pmf(nx, 0.05)))
        .prop_map(|(rows, px)| (Channel::dmc(rows).unwrap(), Distribution::pmf(px).unwrap()))
}

pub fn bsc(p: f64) -> (Channel, Distribution) {
    (Channel::bsc(p).unwrap(), Distribution::uniform(2).unwrap())
}
