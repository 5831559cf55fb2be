#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// (mean, standard error) of f(draw) over `count` draws, with an RNG
/// independent of the library's own streams.
pub fn monte_carlo<F>(count: usize, seed: u64, mut f: F) -> (f64, f64)
where
    F: FnMut(&mut ChaCha20Rng) -> f64,
{
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..count {
        let v = f(&mut rng);
        s1 += v;
        s2 += v * v;
    }
    let k = count as f64;
    let mean = s1 / k;
    let var = (s2 / k - mean * mean) * k / (k - 1.0);
    (mean, (var / k).sqrt())
}

pub fn normal(rng: &mut ChaCha20Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Soft thresholding written out independently of the crate.
pub fn soft(y: f64, t: f64) -> f64 {
    if y > t {
        y - t
    } else if y < -t {
        y + t
    } else {
        0.0
    }
}

pub fn assert_close(a: f64, b: f64, rel: f64) {
    assert!((a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE), "{a} vs {b} (rel tol {rel})");
}

pub fn assert_within_se(value: f64, mean: f64, se: f64, k: f64) {
    assert!((value - mean).abs() <= k * se, "{value} vs MC {mean} +- {se}: {:.2} SE", (value - mean).abs() / se);
}
