//! Shared helpers for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zfqft_core::fockspace::{FockSpace, FockState, RapidityGrid};
use zfqft_core::sampling::seeded_rng;
use zfqft_core::smatrix::ScatteringFunction;
use zfqft_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed, 99)
}

pub fn space(s: ScatteringFunction, n_points: usize, n_max: usize) -> FockSpace {
    FockSpace::new(RapidityGrid::new(-2.0, 2.0, n_points, 1.0).unwrap(), s, n_max).unwrap()
}

pub fn all_s() -> Vec<ScatteringFunction> {
    vec![
        ScatteringFunction::one(),
        ScatteringFunction::minus_one(),
        ScatteringFunction::sinh_factor(std::f64::consts::FRAC_PI_4),
        ScatteringFunction::product(vec![0.4, 2.2]),
    ]
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

/// Random S-symmetric state with every sector populated.
pub fn random_state(space: &FockSpace, rng: &mut ChaCha8Rng) -> FockState {
    let mut st = space.zero_state();
    for n in 0..=space.n_max() {
        let raw = random_vector(rng, space.n_points().pow(n as u32));
        *st.sector_mut(n) = space.s_symmetrize(n, &raw).unwrap();
    }
    st
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
