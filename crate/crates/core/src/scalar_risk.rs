//! Scalar soft-thresholding risk and its minimax value over ℓp balls.
//!
//! Everything here is measured at unit noise level unless a noise variance
//! is passed explicitly. The minimax problem
//!
//! ```text
//! M_p(ξ) = inf_τ sup_{ν : E|X|^p ≤ ξ^p} E[η(X + Z; τ) − X]²
//! ```
//!
//! is solved over the saturated family of symmetric 3-point priors
//! ν_{ε,μ} with ε·μ^p = ξ^p: an outer maximization over ε (log-spaced scan
//! followed by golden section on log ε) and an inner minimization over τ.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::optimize::{bisect, golden_section, scan_then_golden};
use crate::prior::{DiscretePrior, ThreePointPrior};
use crate::real::Real;
use crate::special::{normal_cdf, normal_pdf};

/// Points in the outer log-ε scan.
pub const EPS_SCAN_POINTS: usize = 200;
/// Lower end of the ε scan, relative to ξ^p.
pub const EPS_SCAN_FLOOR: f64 = 1e-6;
/// Bracket width at which both golden-section searches stop.
pub const OPT_WIDTH_TOL: f64 = 1e-10;
const TAU_SCAN_POINTS: usize = 40;
const MAX_GOLDEN_ITER: usize = 500;

/// η(y; τ): shrink toward zero by τ, exactly zero on (−τ, τ).
#[inline]
pub fn soft_threshold<T: Real>(y: T, tau: T) -> T {
    if y >= tau {
        y - tau
    } else if y <= -tau {
        y + tau
    } else {
        T::zero()
    }
}

/// mse₀(μ; τ) = E[η(μ + Z; τ) − μ]² with Z ~ N(0, 1), in closed form.
///
/// Even in μ. For |μ| > τ the expression is rearranged around its limit
/// 1 + τ² so that large signals do not cancel μ² against μ².
pub fn mse0<T: Real>(mu: T, tau: T) -> T {
    let mu = mu.abs();
    let one = T::one();
    let t2 = tau * tau;
    let edge = (mu - tau) * normal_pdf(mu + tau) - (mu + tau) * normal_pdf(mu - tau);
    if mu <= tau {
        mu * mu + (one + t2 - mu * mu) * (normal_cdf(-mu - tau) + normal_cdf(mu - tau)) + edge
    } else {
        (one + t2) + (mu * mu - one - t2) * (normal_cdf(tau - mu) - normal_cdf(-mu - tau)) + edge
    }
}

/// Risk of soft thresholding at unit noise against ν_{ε,μ}.
pub fn mse_three_point<T: Real>(prior: &ThreePointPrior<T>, tau: T) -> T {
    let eps = prior.epsilon();
    let null = if eps < T::one() { (T::one() - eps) * mse0(T::zero(), tau) } else { T::zero() };
    let signal = if eps > T::zero() { eps * mse0(prior.mu(), tau) } else { T::zero() };
    null + signal
}

/// mse(σ²; ν, τ) = E[η(X + σZ; τσ) − X]² for a discrete prior.
///
/// Uses scale covariance: σ² · Σ wᵢ mse₀(|xᵢ|/σ, τ).
pub fn mse_general<T: Real>(noise_var: T, prior: &DiscretePrior<T>, tau: T) -> Result<T> {
    if !(noise_var > T::zero()) || !noise_var.is_finite() {
        return invalid(format!("noise variance {noise_var} must be positive"));
    }
    let sigma = noise_var.sqrt();
    let s: T = prior.atoms().iter().map(|&(x, w)| w * mse0(x / sigma, tau)).sum();
    Ok(noise_var * s)
}

/// Saddle quantities of the scalar ℓp game at radius ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarMinimax<T> {
    pub p: T,
    pub xi: T,
    /// M_p(ξ).
    pub value: T,
    /// Minimax threshold τ_p(ξ).
    pub tau: T,
    /// Least-favorable atom μ_p(ξ).
    pub mu: T,
    /// Least-favorable mass ε_p(ξ).
    pub epsilon: T,
}

impl<T: Real> ScalarMinimax<T> {
    pub fn prior(&self) -> ThreePointPrior<T> {
        ThreePointPrior::new(self.epsilon, self.mu).expect("solver returns a valid prior")
    }
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p > T::zero() && p <= T::one()) {
        return invalid(format!("exponent p = {p} outside (0, 1]"));
    }
    Ok(())
}

/// Upper end of the threshold bracket: √(2 log(1/ξ^p)) + 10.
pub fn tau_bracket_hi<T: Real>(xi_p: T) -> T {
    let ten = T::lit(10.0);
    if xi_p < T::one() {
        (T::lit(2.0) * xi_p.recip().ln()).sqrt() + ten
    } else {
        ten
    }
}

/// inf_τ mse(1; ν, τ) for the given 3-point prior over `[0, tau_hi]`.
pub fn best_threshold<T: Real>(prior: &ThreePointPrior<T>, tau_hi: T) -> Result<(T, T)> {
    let m = scan_then_golden(
        |t| mse_three_point(prior, t),
        T::zero(),
        tau_hi,
        TAU_SCAN_POINTS,
        T::tol(OPT_WIDTH_TOL),
        MAX_GOLDEN_ITER,
    )?;
    Ok((m.x, m.value))
}

/// Computes M_p(ξ) with its minimax threshold and least-favorable prior.
pub fn minimax_mp<T: Real>(p: T, xi: T) -> Result<ScalarMinimax<T>> {
    check_p(p)?;
    if !(xi > T::zero()) || !xi.is_finite() {
        return invalid(format!("radius xi = {xi} must be positive"));
    }
    let xi_p = xi.powf(p);
    let tau_hi = tau_bracket_hi(xi_p);
    let inv_p = p.recip();

    // Inner value as a function of s = −log ε ≥ 0, so ties in the golden
    // search (which break toward smaller s) prefer larger ε, i.e. smaller μ.
    let mut failure = None;
    let mut inner = |s: T| -> T {
        let eps = (-s).exp().min(T::one());
        let prior = match ThreePointPrior::new(eps, xi * eps.powf(-inv_p)) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                return T::infinity();
            }
        };
        match best_threshold(&prior, tau_hi) {
            Ok((_, v)) => -v,
            Err(e) => {
                failure.get_or_insert(e);
                T::infinity()
            }
        }
    };

    let eps_lo = (xi_p * T::lit(EPS_SCAN_FLOOR)).min(T::one());
    let s_hi = -eps_lo.ln();
    let n = EPS_SCAN_POINTS;
    let (mut best_i, mut best_v) = (0usize, T::infinity());
    // Scan from ε = 1 downward; strict improvement keeps the largest ε on ties.
    for i in 0..n {
        let s = s_hi * T::from_count(i) / T::from_count(n - 1);
        let v = inner(s);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let cell = |i: usize| s_hi * T::from_count(i) / T::from_count(n - 1);
    let a = cell(best_i.saturating_sub(1));
    let b = cell((best_i + 1).min(n - 1));
    let refined = golden_section(&mut inner, a, b, T::tol(OPT_WIDTH_TOL), MAX_GOLDEN_ITER)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let eps = (-refined.x).exp().min(T::one());
    let prior = ThreePointPrior::new(eps, xi * eps.powf(-inv_p))?;
    let (tau, value) = best_threshold(&prior, tau_hi)?;
    Ok(ScalarMinimax { p, xi, value, tau, mu: prior.mu(), epsilon: eps })
}

/// Leading-order radius with M_p(ξ) = m as m → 0:
/// (2 log(1/m))^{1/2 − 1/p} m^{1/p}.
pub fn asymptotic_inverse_mp<T: Real>(p: T, m: T) -> T {
    let two = T::lit(2.0);
    (two * m.recip().ln()).powf(T::lit(0.5) - p.recip()) * m.powf(p.recip())
}

/// Solves M_p(ξ) = m for ξ by bisection in log ξ.
pub fn inverse_mp<T: Real>(p: T, m: T) -> Result<T> {
    check_p(p)?;
    if !(m > T::zero() && m < T::one()) {
        return invalid(format!("target MSE {m} outside (0, 1)"));
    }
    let value = |xi: T| minimax_mp(p, xi).map(|r| r.value);
    invert_increasing(value, m, asymptotic_inverse_mp(p, m))
}

/// Inverts a continuous increasing map of the radius, starting the bracket
/// search at `seed`.
pub(crate) fn invert_increasing<T, F>(mut value: F, m: T, seed: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let seed = if seed.is_finite() && seed > T::zero() { seed } else { T::one() };
    let step = T::lit(4.0);
    let mut lo = seed / T::lit(2.0);
    let mut hi = seed * T::lit(2.0);
    let mut tries = 0;
    while value(lo)? > m {
        lo = lo / step;
        tries += 1;
        if tries > 200 {
            return Err(crate::Error::BracketFailure(format!("inverse radius for m = {m} (low side)")));
        }
    }
    tries = 0;
    while value(hi)? < m {
        hi = hi * step;
        tries += 1;
        if tries > 200 {
            return Err(crate::Error::BracketFailure(format!("inverse radius for m = {m} (high side)")));
        }
    }
    let log_xi = bisect(|s: T| Ok(value(s.exp())? - m), lo.ln(), hi.ln(), T::tol(1e-14), T::zero(), 400)?;
    Ok(log_xi.exp())
}

/// Small-ξ leading-order saddle quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticMinimax<T> {
    pub tau: T,
    pub mu: T,
    pub epsilon: T,
    pub value: T,
}

/// τ = μ = √(2 log(1/ξ^p)), ε = (ξ² / 2log(1/ξ^p))^{p/2},
/// M = (2 log(1/ξ^p))^{1−p/2} ξ^p.
pub fn asymptotic_scalar_minimax<T: Real>(p: T, xi: T) -> Result<AsymptoticMinimax<T>> {
    check_p(p)?;
    if !(xi > T::zero()) {
        return invalid(format!("radius xi = {xi} must be positive"));
    }
    let xi_p = xi.powf(p);
    if xi_p >= T::one() {
        return invalid(format!("asymptotic formulas need xi^p < 1, got {xi_p}"));
    }
    let two = T::lit(2.0);
    let big_l = two * xi_p.recip().ln();
    let root = big_l.sqrt();
    Ok(AsymptoticMinimax {
        tau: root,
        mu: root,
        epsilon: (xi * xi / big_l).powf(p / two),
        value: big_l.powf(T::one() - p / two) * xi_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_branches() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        let z = soft_threshold(-0.999_f64, 1.0);
        assert!(z == 0.0 && z.to_bits() == 0, "dead zone must be +0.0 exactly");
    }

    #[test]
    fn mse0_reference_points() {
        assert_eq!(mse0(0.0_f64, 0.0), 1.0);
        for &t in &[0.3_f64, 1.0, 2.5] {
            let want = 2.0 * (1.0 + t * t) * normal_cdf(-t) - 2.0 * t * normal_pdf(t);
            assert!((mse0(0.0, t) - want).abs() < 1e-15);
        }
        assert!((mse0(20.0_f64, 1.5) - 3.25).abs() < 1e-12);
    }

    #[test]
    fn mse0_branches_agree_at_switch() {
        for &t in &[0.2_f64, 1.0, 3.0] {
            let below = mse0(t * (1.0 - 1e-12), t);
            let above = mse0(t * (1.0 + 1e-12), t);
            assert!((below - above).abs() < 1e-10);
        }
    }

    #[test]
    fn mse0_even_and_monotone() {
        // At τ = 0 the estimator is the identity and the risk is flat.
        assert_eq!(mse0(5.0_f64, 0.0), 1.0);
        for i in 1..60 {
            let tau = 0.1 * i as f64;
            let mut prev = -1.0;
            for j in 0..120 {
                let mu = 0.1 * j as f64;
                let v = mse0(mu, tau);
                assert_eq!(v, mse0(-mu, tau));
                // Beyond τ + 6 the increments fall below double resolution.
                if mu < tau + 6.0 {
                    assert!(v > prev, "not increasing at mu={mu}, tau={tau}");
                } else {
                    assert!(v >= prev - 4e-16 * v);
                }
                prev = v;
            }
        }
    }

    #[test]
    fn three_point_degenerate_cases() {
        let t = 1.2;
        let p0 = ThreePointPrior::new(0.0_f64, 7.0).unwrap();
        assert_eq!(mse_three_point(&p0, t), mse0(0.0, t));
        let p1 = ThreePointPrior::new(1.0_f64, 0.0).unwrap();
        assert_eq!(mse_three_point(&p1, 0.0), 1.0);
    }

    #[test]
    fn general_matches_three_point_and_scales() {
        let tp = ThreePointPrior::new(0.1_f64, 3.0).unwrap();
        let d = tp.to_discrete();
        let a = mse_general(1.0, &d, 1.5).unwrap();
        assert!((a - mse_three_point(&tp, 1.5)).abs() < 1e-15);
        let z = DiscretePrior::<f64>::zero();
        assert!((mse_general(4.0, &z, 0.7).unwrap() - 4.0 * mse0(0.0, 0.7)).abs() < 1e-15);
        assert!(mse_general(0.0, &z, 0.7).is_err());
        assert!(mse_general(-1.0, &z, 0.7).is_err());
    }

    #[test]
    fn minimax_saturates_and_limits() {
        let r = minimax_mp(1.0_f64, 0.1).unwrap();
        assert!(r.value > 0.0 && r.value < 1.0);
        assert!((r.epsilon * r.mu - 0.1).abs() < 1e-8 * 0.1);
        let big = minimax_mp(1.0_f64, 1e3).unwrap();
        assert!((big.value - 1.0).abs() < 0.01);
        let tiny = minimax_mp(1.0_f64, 1e-9).unwrap();
        assert!(tiny.value < 1e-7);
    }

    #[test]
    fn minimax_rejects_bad_input() {
        assert!(minimax_mp(0.0_f64, 0.1).is_err());
        assert!(minimax_mp(1.5_f64, 0.1).is_err());
        assert!(minimax_mp(1.0_f64, -0.1).is_err());
        assert!(inverse_mp(1.0_f64, 1.0).is_err());
        assert!(inverse_mp(1.0_f64, 0.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        for &xi in &[1e-3_f64, 0.05, 0.3, 1.0] {
            let m = minimax_mp(1.0, xi).unwrap().value;
            let back = inverse_mp(1.0, m).unwrap();
            assert!(((back - xi) / xi).abs() < 1e-6, "xi={xi} back={back}");
            assert!((minimax_mp(1.0, back).unwrap().value - m).abs() <= 1e-8);
        }
    }

    #[test]
    fn asymptotic_formula_arithmetic() {
        // 2 log(1/ξ) = 9 at p = 1.
        let xi = (-4.5_f64).exp();
        let a = asymptotic_scalar_minimax(1.0, xi).unwrap();
        assert!((a.tau - 3.0).abs() < 1e-14);
        let a = asymptotic_scalar_minimax(1.0_f64, 1e-3).unwrap();
        let want = (1e-6 / (2.0 * 3.0 * 10f64.ln())).sqrt();
        assert!((a.epsilon - want).abs() < 1e-15);
        assert!(asymptotic_scalar_minimax(1.0_f64, 1.0).is_err());
        assert!(asymptotic_scalar_minimax(0.5_f64, 4.0).is_err());
    }
}
