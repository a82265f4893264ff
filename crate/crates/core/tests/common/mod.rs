#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stego_risk::model::{validate_assumptions, GameParams};

/// Rejection-samples parameter sets that satisfy all nine assumptions.
pub fn valid_params(seed: u64, count: usize) -> Vec<GameParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut money = || rng.random_range(1.0..1_000_000.0);
        let params = GameParams {
            b_hide: money(),
            c_hide: money(),
            b_harmony: money(),
            c_leak: money(),
            b_leak: money(),
            c_look: money(),
            beta: rng.random(),
        };
        if validate_assumptions(&params).unwrap().valid() {
            out.push(params);
        }
    }
    out
}
