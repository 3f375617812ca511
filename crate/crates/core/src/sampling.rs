//! Seeded random inputs for property checks and experiments.
//!
//! Everything draws from [`ChaCha8Rng`] so a seed fully determines a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::{Group, GroupPoint};
use crate::scalar::{rational, Rational};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the Euclidean ball of the given radius in `R^dim`.
pub fn euclidean_ball(rng: &mut SeededRng, dim: usize, radius: f64) -> Vec<f64> {
    let dir = unit_sphere(rng, dim);
    let scale = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    dir.into_iter().map(|x| x * scale).collect()
}

/// Uniform point of the Euclidean unit sphere in `R^dim`.
pub fn unit_sphere(rng: &mut SeededRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Coordinates uniform in `[-1, 1]^n`, then dilated by a log-uniform factor
/// in `[1/4, 4]`.
pub fn dilated_box_point(rng: &mut SeededRng, group: &Group) -> GroupPoint<f64> {
    let u: Vec<f64> = (0..group.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let s = (rng.random_range(-1.0..=1.0) * 4f64.ln()).exp();
    group
        .dilate(&s, &GroupPoint::new(u))
        .expect("log-uniform factor is positive")
}

/// A small random rational `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
pub fn small_rational(rng: &mut SeededRng, max_num: i64, max_den: i64) -> Rational {
    rational(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

pub fn rational_point(rng: &mut SeededRng, dim: usize, max_num: i64, max_den: i64) -> GroupPoint<Rational> {
    GroupPoint::new((0..dim).map(|_| small_rational(rng, max_num, max_den)).collect())
}

/// A rational in `(lo, hi)` with denominator at most `max_den`, `lo < hi`.
pub fn rational_in(rng: &mut SeededRng, lo: f64, hi: f64, max_den: i64) -> Rational {
    loop {
        let den = rng.random_range(1..=max_den);
        let lo_n = (lo * den as f64).floor() as i64;
        let hi_n = (hi * den as f64).ceil() as i64;
        let num = rng.random_range(lo_n..=hi_n);
        let value = num as f64 / den as f64;
        if value > lo && value < hi {
            return rational(num, den);
        }
    }
}
