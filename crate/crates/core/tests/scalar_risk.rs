mod common;

use common::{assert_close, assert_within_se, monte_carlo, normal, soft};
use cs_minimax::prior::{DiscretePrior, ThreePointPrior};
use cs_minimax::scalar_risk::{
    asymptotic_inverse_mp, asymptotic_scalar_minimax, inverse_mp, minimax_mp, mse0, mse_general, mse_three_point,
    soft_threshold,
};
use cs_minimax::special::{normal_cdf, normal_pdf};
use proptest::prelude::*;

const MC: usize = 10_000_000;

#[test]
fn soft_threshold_branches() {
    assert_eq!(soft_threshold(3.0_f64, 1.0), 2.0);
    assert_eq!(soft_threshold(0.5_f64, 1.0), 0.0);
    assert_eq!(soft_threshold(-3.0_f64, 1.0), -2.0);
    assert_eq!(soft_threshold(1.0_f32, 1.0), 0.0);
}

#[test]
fn mse0_at_origin() {
    assert_eq!(mse0(0.0_f64, 0.0), 1.0);
    for &t in &[0.3_f64, 1.0, 2.5] {
        let expected = 2.0 * (1.0 + t * t) * normal_cdf(-t) - 2.0 * t * normal_pdf(t);
        assert_close(mse0(0.0, t), expected, 1e-14);
    }
}

#[test]
fn mse0_large_signal_limit() {
    let t = 1.5;
    assert_close(mse0(20.0_f64, t), 1.0 + t * t, 1e-12);
    let (mean, se) = monte_carlo(MC, 11, |r| {
        let e = soft(20.0 + normal(r), t) - 20.0;
        e * e
    });
    assert_within_se(mse0(20.0, t), mean, se, 3.0);
}

#[test]
fn three_point_degenerate_cases() {
    let zero = ThreePointPrior::new(0.0_f64, 7.0).unwrap();
    assert_eq!(mse_three_point(&zero, 1.2), mse0(0.0, 1.2));
    let unit = ThreePointPrior::new(1.0_f64, 0.0).unwrap();
    assert_eq!(mse_three_point(&unit, 0.0), 1.0);
}

#[test]
fn three_point_monte_carlo() {
    let (eps, mu, t) = (0.1, 3.0, 1.5);
    let prior = ThreePointPrior::new(eps, mu).unwrap();
    let (mean, se) = monte_carlo(MC, 12, |r| {
        let u: f64 = rand::Rng::random(r);
        let x = if u < eps / 2.0 {
            mu
        } else if u < eps {
            -mu
        } else {
            0.0
        };
        let e = soft(x + normal(r), t) - x;
        e * e
    });
    assert_within_se(mse_three_point(&prior, t), mean, se, 3.0);
}

#[test]
fn general_prior_paths() {
    let t = 0.8;
    assert_close(mse_general(4.0_f64, &DiscretePrior::zero(), t).unwrap(), 4.0 * mse0(0.0, t), 1e-14);
    let prior = ThreePointPrior::new(0.2_f64, 2.5).unwrap();
    assert_close(mse_general(1.0, &prior.to_discrete(), t).unwrap(), mse_three_point(&prior, t), 1e-14);
}

#[test]
fn general_prior_monte_carlo() {
    let mags = [0.0, 1.0, 2.5];
    let prior = DiscretePrior::symmetric_uniform(&mags).unwrap();
    let atoms: Vec<f64> = prior.atoms().iter().map(|a| a.0).collect();
    assert_eq!(atoms.len(), 5);
    let t = 2.0;
    let (mean, se) = monte_carlo(MC, 13, |r| {
        let x = atoms[rand::Rng::random_range(r, 0..5)];
        let e = soft(x + normal(r), t) - x;
        e * e
    });
    assert_within_se(mse_general(1.0, &prior, t).unwrap(), mean, se, 3.0);
}

#[test]
fn minimax_limits() {
    let big = minimax_mp(1.0_f64, 1e3).unwrap();
    assert!((big.value - 1.0).abs() < 0.01, "{}", big.value);
    let small = minimax_mp(1.0_f64, 1e-8).unwrap();
    assert!(small.value < 1e-6);
}

/// max over ε of min over τ of the saturated three-point risk, on a dense
/// log-ε by uniform-τ grid.
fn grid_minimax(xi: f64, eps_points: usize, tau_points: usize) -> f64 {
    let taus: Vec<f64> = (0..tau_points).map(|j| 6.0 * j as f64 / (tau_points - 1) as f64).collect();
    let lo = (1e-6_f64).ln();
    let hi = xi.min(1.0).ln();
    (0..eps_points)
        .map(|i| {
            let eps = (lo + (hi - lo) * i as f64 / (eps_points - 1) as f64).exp();
            let mu = xi / eps;
            taus.iter().map(|&t| (1.0 - eps) * mse0(0.0, t) + eps * mse0(mu, t)).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn minimax_matches_grid_oracle() {
    let r = minimax_mp(1.0_f64, 0.1).unwrap();
    assert!((r.value - grid_minimax(0.1, 2000, 2000)).abs() < 1e-4);
    assert!((r.epsilon * r.mu - 0.1).abs() < 1e-8);
}

#[test]
fn inverse_round_trip_on_log_grid() {
    for k in -6..=0 {
        let xi = 10f64.powi(k);
        let m = minimax_mp(1.0, xi).unwrap().value;
        assert_close(inverse_mp(1.0, m).unwrap(), xi, 1e-6);
    }
}

#[test]
fn inverse_against_grid_oracle() {
    // Bisect the grid oracle itself in ξ.
    let (mut lo, mut hi) = (0.01_f64, 1.0_f64);
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if grid_minimax(mid, 400, 600) < 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert_close(inverse_mp(1.0_f64, 0.25).unwrap(), lo, 1e-3);
}

#[test]
fn inverse_asymptotic_ratio_moves_towards_one() {
    let r = |m: f64| asymptotic_inverse_mp(1.0, m) / inverse_mp(1.0, m).unwrap();
    let (a, b) = (r(1e-2), r(1e-8));
    assert!((b - 1.0).abs() < (a - 1.0).abs(), "{a} {b}");
}

#[test]
fn asymptotic_formulas() {
    // 2 log(1/ξ) = 9 gives τ = 3.
    let xi = (-4.5_f64).exp();
    let a = asymptotic_scalar_minimax(1.0, xi).unwrap();
    assert_close(a.tau, 3.0, 1e-14);
    let a = asymptotic_scalar_minimax(1.0_f64, 1e-3).unwrap();
    assert_close(a.epsilon, (1e-6 / (2.0 * 3.0 * 10f64.ln())).sqrt(), 1e-12);
    for p in [0.5, 1.0] {
        let xi = 1e-6_f64.powf(1.0 / p);
        let ratio = minimax_mp(p, xi).unwrap().value / asymptotic_scalar_minimax(p, xi).unwrap().value;
        assert!((0.75..=1.25).contains(&ratio), "p={p} ratio={ratio}");
    }
}

#[test]
fn generic_over_f32() {
    let r = minimax_mp(1.0_f32, 0.1).unwrap();
    let d = minimax_mp(1.0_f64, 0.1).unwrap();
    assert!((r.value as f64 - d.value).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mse0_bounded_and_increasing(mu in 0.0_f64..10.0, d in 0.0_f64..1.0, t in 0.0_f64..5.0) {
        let a = mse0(mu, t);
        let b = mse0(mu + d, t);
        prop_assert!(a >= 0.0 && a <= 1.0 + t * t + 1e-12);
        prop_assert!(b >= a - 1e-12);
        prop_assert!((mse0(-mu, t) - a).abs() < 1e-14);
    }

    #[test]
    fn soft_threshold_shrinks(y in -50.0_f64..50.0, t in 0.0_f64..10.0) {
        let s = soft_threshold(y, t);
        prop_assert!(s.abs() <= y.abs());
        prop_assert!((y - s).abs() <= t + 1e-12);
        prop_assert_eq!(soft_threshold(-y, t), -s);
    }
}
