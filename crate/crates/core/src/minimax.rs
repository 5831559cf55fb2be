//! Minimax asymptotic MSE of the LASSO over ℓp and weak-ℓp balls, with the
//! least-favorable priors and maximin penalties.
//!
//! Everything here is assembled from the scalar solvers (`minimax_mp`,
//! `minimax_mpw` and their inverses) and the state-evolution calibration.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimize::bisect;
use crate::prior::{Prior, ThreePointPrior, WeakLpPrior};
use crate::real::Real;
use crate::scalar_risk::{inverse_mp, minimax_mp};
use crate::state_evolution::{calibrate_lambda, calibrate_tau, check_delta, hfp, SEConfig};
use crate::weak_lp::{inverse_mpw, minimax_mpw};

/// Relative tolerance on m* when solving the noisy minimax equation.
pub const NOISY_M_TOL: f64 = 1e-10;
/// Radii used to extract the small-noise coefficients.
pub const EXPANSION_RADII: [f64; 2] = [1e3, 1e4];
const SADDLE_LAMBDA_POINTS: usize = 50;
const WEAK_BATTERY: [f64; 5] = [0.01, 0.03, 0.1, 0.3, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ball {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport<T> {
    pub ball: Ball,
    pub p: T,
    pub delta: T,
    pub xi: T,
    /// 0 for the noiseless game.
    pub sigma: T,
    pub value: T,
    pub tau_star: T,
    pub lambda_star: T,
    /// Least-favorable three-point parameters (strong ball only).
    pub eps_star: Option<T>,
    pub mu_star: Option<T>,
    /// Effective unit-noise radius at which the scalar game is played:
    /// (1 + m*/δ)^{−1/2} ξ/σ when σ > 0, and M^{−1}(δ) when σ = 0.
    pub xi_star: T,
}

impl<T: Real> MinimaxReport<T> {
    pub fn least_favorable_prior(&self) -> Prior<T> {
        match (self.ball, self.eps_star, self.mu_star) {
            (Ball::Strong, Some(eps), Some(mu)) => {
                ThreePointPrior::new(eps, mu).expect("validated on construction").into()
            }
            _ => WeakLpPrior::new(self.p, self.xi).expect("validated on construction").into(),
        }
    }

    pub fn se_config(&self) -> SEConfig<T> {
        SEConfig { delta: self.delta, sigma: self.sigma, prior: self.least_favorable_prior(), tau: self.tau_star }
    }
}

fn check_common<T: Real>(p: T, delta: T, xi: T) -> Result<()> {
    if !(p > T::zero() && p <= T::one()) {
        return invalid(format!("exponent p = {p} outside (0, 1]"));
    }
    check_delta(delta)?;
    if !(xi > T::zero()) || !xi.is_finite() {
        return invalid(format!("radius xi = {xi} must be positive"));
    }
    Ok(())
}

/// Scalar minimax game at radius ξ for either ball: (value, τ, ε, μ).
fn scalar_game<T: Real>(ball: Ball, p: T, xi: T) -> Result<(T, T, Option<T>, Option<T>)> {
    match ball {
        Ball::Strong => {
            let r = minimax_mp(p, xi)?;
            Ok((r.value, r.tau, Some(r.epsilon), Some(r.mu)))
        }
        Ball::Weak => {
            let r = minimax_mpw(p, xi)?;
            Ok((r.value, r.tau, None, None))
        }
    }
}

fn scalar_inverse<T: Real>(ball: Ball, p: T, m: T) -> Result<T> {
    match ball {
        Ball::Strong => inverse_mp(p, m),
        Ball::Weak => inverse_mpw(p, m),
    }
}

fn noiseless<T: Real>(ball: Ball, p: T, delta: T, xi: T) -> Result<MinimaxReport<T>> {
    check_common(p, delta, xi)?;
    let xi0 = scalar_inverse(ball, p, delta)?;
    let (_, tau, eps, mu0) = scalar_game(ball, p, xi0)?;
    let mu = mu0.map(|m| xi / xi0 * m);
    let eps = match (eps, mu) {
        (Some(_), Some(m)) => Some((xi / m).powf(p)),
        _ => None,
    };
    let mut report = MinimaxReport {
        ball,
        p,
        delta,
        xi,
        sigma: T::zero(),
        value: delta * xi * xi / (xi0 * xi0),
        tau_star: tau,
        lambda_star: T::zero(),
        eps_star: eps,
        mu_star: mu,
        xi_star: xi0,
    };
    report.lambda_star = lambda_at_hfp(&report)?;
    Ok(report)
}

fn lambda_at_hfp<T: Real>(report: &MinimaxReport<T>) -> Result<T> {
    calibrate_lambda(&report.se_config())
}

/// Noiseless minimax AMSE over the ℓp ball: δξ²/M_p^{−1}(δ)².
pub fn minimax_noiseless<T: Real>(p: T, delta: T, xi: T) -> Result<MinimaxReport<T>> {
    noiseless(Ball::Strong, p, delta, xi)
}

/// Noiseless minimax AMSE over the weak-ℓp ball: δξ²/(M_p^w)^{−1}(δ)².
pub fn minimax_noiseless_weak<T: Real>(p: T, delta: T, xi: T) -> Result<MinimaxReport<T>> {
    noiseless(Ball::Weak, p, delta, xi)
}

/// The unique positive root m* of m/(1 + m/δ) = M(ξ/√(1 + m/δ)) at unit
/// noise, solved by bisection in log m to relative accuracy `rel_tol`.
pub fn noisy_fixed_point<T: Real>(ball: Ball, p: T, delta: T, xi: T, rel_tol: T) -> Result<T> {
    check_common(p, delta, xi)?;
    let g = |log_m: T| -> Result<T> {
        let m = log_m.exp();
        let inflate = T::one() + m / delta;
        Ok(m / inflate - scalar_game(ball, p, xi / inflate.sqrt())?.0)
    };
    // g < 0 at m = 0 and g → δ > 0 as m → ∞.
    let two = T::lit(2.0).ln();
    let mut lo = T::zero();
    let mut hi = T::zero();
    let mut steps = 0;
    if g(hi)? < T::zero() {
        while g(hi)? < T::zero() {
            lo = hi;
            hi = hi + two;
            steps += 1;
            if steps > 2000 {
                return Err(Error::BracketFailure("noisy minimax equation: no sign change above".into()));
            }
        }
    } else {
        while g(lo)? >= T::zero() {
            hi = lo;
            lo = lo - two;
            steps += 1;
            if steps > 2000 {
                return Err(Error::BracketFailure("noisy minimax equation: no sign change below".into()));
            }
        }
    }
    Ok(bisect(g, lo, hi, rel_tol, T::zero(), 400)?.exp())
}

fn noisy<T: Real>(ball: Ball, p: T, delta: T, xi: T, sigma: T) -> Result<MinimaxReport<T>> {
    check_common(p, delta, xi)?;
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return invalid(format!("noise level sigma = {sigma} must be positive"));
    }
    let xi_unit = xi / sigma;
    let m = noisy_fixed_point(ball, p, delta, xi_unit, T::tol(NOISY_M_TOL))?;
    let inflate = (T::one() + m / delta).sqrt();
    let xi_star = xi_unit / inflate;
    let (_, tau, eps0, mu0) = scalar_game(ball, p, xi_star)?;
    let mu = mu0.map(|m| sigma * inflate * m);
    let eps = match (eps0, mu) {
        (Some(_), Some(m)) => Some((xi / m).powf(p)),
        _ => None,
    };
    let mut report = MinimaxReport {
        ball,
        p,
        delta,
        xi,
        sigma,
        value: sigma * sigma * m,
        tau_star: tau,
        lambda_star: T::zero(),
        eps_star: eps,
        mu_star: mu,
        xi_star,
    };
    report.lambda_star = lambda_at_hfp(&report)?;
    Ok(report)
}

/// Noisy minimax AMSE over the ℓp ball: σ²·m*(δ, ξ/σ).
pub fn minimax_noisy<T: Real>(p: T, delta: T, xi: T, sigma: T) -> Result<MinimaxReport<T>> {
    noisy(Ball::Strong, p, delta, xi, sigma)
}

/// Noisy minimax AMSE over the weak-ℓp ball.
pub fn minimax_noisy_weak<T: Real>(p: T, delta: T, xi: T, sigma: T) -> Result<MinimaxReport<T>> {
    noisy(Ball::Weak, p, delta, xi, sigma)
}

/// Dispatches on σ: the noiseless game for σ = 0, the noisy one otherwise.
pub fn minimax<T: Real>(ball: Ball, p: T, delta: T, xi: T, sigma: T) -> Result<MinimaxReport<T>> {
    if sigma == T::zero() {
        noiseless(ball, p, delta, xi)
    } else {
        noisy(ball, p, delta, xi, sigma)
    }
}

/// Large-ξ behavior of the unit-noise minimax MSE, m*(δ, ξ) = c0 ξ² + c1 + O(ξ^{−2}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallNoiseExpansion<T> {
    pub p: T,
    pub delta: T,
    /// Extracted from m* at the two radii in `EXPANSION_RADII`.
    pub c0: T,
    pub c1: T,
    /// δ/M_p^{−1}(δ)², the value implied by the noiseless minimax formula.
    pub c0_noiseless: T,
    /// δ/M_p^{−1}(δ), the same ratio without the square.
    pub c0_unsquared: T,
    /// 2√(c0δ)/M_p'(√(δ/c0)) − δ with c0 = δ/M_p^{−1}(δ)², in closed form.
    pub c1_closed_form: T,
    /// 2δ²/(ξ₀ M_p'(ξ₀)) − δ with ξ₀ = M_p^{−1}(δ), from matching the
    /// O(ξ^{−2}) terms of the noisy equation.
    pub c1_matched: T,
}

/// Extracts c0 and c1 from the numerically solved m*(δ, ξ) and evaluates
/// the closed forms next to them.
pub fn small_noise_expansion<T: Real>(p: T, delta: T) -> Result<SmallNoiseExpansion<T>> {
    check_common(p, delta, T::one())?;
    let tol = T::tol(1e-15);
    let x1 = T::lit(EXPANSION_RADII[0]);
    let x2 = T::lit(EXPANSION_RADII[1]);
    let m1 = noisy_fixed_point(Ball::Strong, p, delta, x1, tol)?;
    let m2 = noisy_fixed_point(Ball::Strong, p, delta, x2, tol)?;
    let c0 = (m2 - m1) / (x2 * x2 - x1 * x1);
    let c1 = m1 - c0 * x1 * x1;

    let xi0 = inverse_mp(p, delta)?;
    let c0_noiseless = delta / (xi0 * xi0);
    let slope = mp_derivative(p, xi0)?;
    Ok(SmallNoiseExpansion {
        p,
        delta,
        c0,
        c1,
        c0_noiseless,
        c0_unsquared: delta / xi0,
        c1_closed_form: T::lit(2.0) * (c0_noiseless * delta).sqrt() / slope - delta,
        c1_matched: T::lit(2.0) * delta * delta / (xi0 * slope) - delta,
    })
}

/// M_p'(ξ) by a central difference in log ξ.
fn mp_derivative<T: Real>(p: T, xi: T) -> Result<T> {
    let h = T::lit(1e-4);
    let up = minimax_mp(p, xi * h.exp())?.value;
    let down = minimax_mp(p, xi * (-h).exp())?.value;
    Ok((up - down) / (T::lit(2.0) * h * xi))
}

/// The minimax problem restated for ‖x₀‖_p^p ≤ ξ^p (unnormalized error
/// ‖x̂ − x₀‖², penalty in the same units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraditionalScaling<T> {
    pub big_n: usize,
    pub n: usize,
    /// N^{1−2/p} · (normalized minimax AMSE).
    pub value: T,
    /// N^{−1/p} · λ*.
    pub lambda: T,
    /// C^2 ξ² (2 log(N/n)/n)^{2/p−1}.
    pub asymptotic_value: T,
    /// C ξ (2 log(N/n)/n)^{1/p}.
    pub asymptotic_lambda: T,
    /// C = 1 for the ℓp ball and (1 − p/2)^{−1/p} for the weak ball.
    pub constant: T,
}

/// Converts a normalized report to the traditional scaling at dimensions
/// (N, n). The report's δ must equal n/N.
pub fn traditional_scaling<T: Real>(
    report: &MinimaxReport<T>,
    big_n: usize,
    n: usize,
) -> Result<TraditionalScaling<T>> {
    if n == 0 || n >= big_n {
        return invalid(format!("need 0 < n < N, got n = {n}, N = {big_n}"));
    }
    let nn = T::from_count(big_n);
    let nm = T::from_count(n);
    let ratio = nm / nn;
    if ((ratio - report.delta) / report.delta).abs() > T::tol(1e-9) {
        return invalid(format!("n/N = {ratio} does not match delta = {}", report.delta));
    }
    let p = report.p;
    let two = T::lit(2.0);
    let constant = match report.ball {
        Ball::Strong => T::one(),
        Ball::Weak => (T::one() - p / two).powf(-p.recip()),
    };
    let rate = two * (nn / nm).ln() / nm;
    Ok(TraditionalScaling {
        big_n,
        n,
        value: scale_to_traditional(report.value, big_n, p),
        lambda: report.lambda_star * nn.powf(-p.recip()),
        asymptotic_value: constant * constant * report.xi * report.xi * rate.powf(two / p - T::one()),
        asymptotic_lambda: constant * report.xi * rate.powf(p.recip()),
        constant,
    })
}

/// Normalized AMSE → unnormalized traditional error: N · N^{−2/p} · value.
pub fn scale_to_traditional<T: Real>(value: T, big_n: usize, p: T) -> T {
    value * T::from_count(big_n).powf(T::one() - T::lit(2.0) / p)
}

/// Inverse of `scale_to_traditional`.
pub fn scale_from_traditional<T: Real>(value: T, big_n: usize, p: T) -> T {
    value / T::from_count(big_n).powf(T::one() - T::lit(2.0) / p)
}

/// Numerical check of the saddlepoint relations around a minimax report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleCheck<T> {
    pub report: MinimaxReport<T>,
    /// (λ, AMSE(λ, ν*)) over a grid around λ*.
    pub lambda_sweep: Vec<(T, T)>,
    /// (ε, AMSE(λ*, ν_ε)) for saturated three-point priors ν_ε.
    pub prior_sweep: Vec<(T, T)>,
    /// max over both sweeps of the relative amount by which a relation
    /// fails: AMSE(λ*, ν*) − AMSE(λ, ν*) and AMSE(λ*, ν) − AMSE(λ*, ν*).
    pub max_violation: T,
    /// Grid λ with the smallest AMSE against ν*.
    pub argmin_lambda: T,
}

/// AMSE of the LASSO at penalty λ for a fixed problem, via calibration and
/// the highest fixed point.
pub fn amse_at_lambda<T: Real>(lambda: T, delta: T, sigma: T, prior: &Prior<T>) -> Result<T> {
    let tau = calibrate_tau(lambda, delta, sigma, prior)?;
    Ok(hfp(&SEConfig::new(delta, sigma, prior.clone(), tau)?)?.m_star)
}

/// Evaluates both saddlepoint inequalities on grids: a 50-point geometric
/// λ grid spanning λ*/2 to 2λ*, and saturated three-point priors with
/// ε ∈ {ε*/4, ε*/2, ε*, 2ε*, 4ε*} (capped at 1). For the weak ball the
/// priors are three-point laws with weak p-th moment ε μ^p = ξ^p at the
/// masses in `WEAK_BATTERY`.
pub fn saddle_check<T: Real>(p: T, delta: T, xi: T, sigma: T, ball: Ball) -> Result<SaddleCheck<T>> {
    let report = minimax(ball, p, delta, xi, sigma)?;
    let nu_star = report.least_favorable_prior();
    let center = amse_at_lambda(report.lambda_star, delta, sigma, &nu_star)?;
    let scale = report.value.max(T::min_positive_value());

    let mut violation = T::zero();
    let mut lambda_sweep = Vec::with_capacity(SADDLE_LAMBDA_POINTS);
    let mut argmin = (report.lambda_star, center);
    let span = T::lit(2.0).ln();
    for i in 0..SADDLE_LAMBDA_POINTS {
        let s = T::from_count(i) / T::from_count(SADDLE_LAMBDA_POINTS - 1);
        let lambda = report.lambda_star * (span * (T::lit(2.0) * s - T::one())).exp();
        let v = amse_at_lambda(lambda, delta, sigma, &nu_star)?;
        violation = violation.max((center - v) / scale);
        if v < argmin.1 {
            argmin = (lambda, v);
        }
        lambda_sweep.push((lambda, v));
    }

    let battery: Vec<T> = match report.ball {
        Ball::Strong => {
            let e = report.eps_star.expect("strong report");
            [0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|&f| (e * T::lit(f)).min(T::one())).collect()
        }
        Ball::Weak => WEAK_BATTERY.iter().map(|&e| T::lit(e)).collect(),
    };
    let mut prior_sweep = Vec::new();
    for eps in battery {
        let nu: Prior<T> = ThreePointPrior::saturated(p, xi, eps)?.into();
        let v = if sigma == T::zero() && report.lambda_star == T::zero() {
            T::zero()
        } else {
            amse_at_lambda(report.lambda_star, delta, sigma, &nu)?
        };
        violation = violation.max((v - center) / scale);
        prior_sweep.push((eps, v));
    }
    Ok(SaddleCheck { report, lambda_sweep, prior_sweep, max_violation: violation, argmin_lambda: argmin.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_quadratic_in_radius_and_saturated() {
        let a = minimax_noiseless(1.0_f64, 0.25, 1.0).unwrap();
        let b = minimax_noiseless(1.0_f64, 0.25, 3.0).unwrap();
        assert!((b.value - 9.0 * a.value).abs() < 1e-12 * b.value);
        assert_eq!(a.tau_star, b.tau_star);
        let sat = b.eps_star.unwrap() * b.mu_star.unwrap();
        assert!((sat - 3.0).abs() < 1e-8 * 3.0);
    }

    #[test]
    fn noiseless_hfp_reproduces_value() {
        let r = minimax_noiseless(1.0_f64, 0.25, 1.0).unwrap();
        let fp = hfp(&r.se_config()).unwrap();
        assert!((fp.m_star - r.value).abs() < 1e-6 * r.value, "{} vs {}", fp.m_star, r.value);
        assert!(r.lambda_star > 0.0);
    }

    #[test]
    fn noisy_hfp_reproduces_value() {
        let r = minimax_noisy(1.0_f64, 0.25, 0.3, 1.0).unwrap();
        let fp = hfp(&r.se_config()).unwrap();
        assert!((fp.m_star - r.value).abs() < 1e-6 * r.value, "{} vs {}", fp.m_star, r.value);
    }

    #[test]
    fn noise_scale_identity() {
        let a = minimax_noisy(0.5_f64, 0.3, 0.4, 2.0).unwrap();
        let b = minimax_noisy(0.5_f64, 0.3, 0.2, 1.0).unwrap();
        assert!((a.value - 4.0 * b.value).abs() < 1e-8 * a.value);
        assert!((a.lambda_star - 2.0 * b.lambda_star).abs() < 1e-6 * a.lambda_star);
    }

    #[test]
    fn traditional_round_trip() {
        let v = 0.37_f64;
        let t = scale_to_traditional(v, 12345, 0.7);
        assert!((scale_from_traditional(t, 12345, 0.7) - v).abs() < 1e-15);
        let r = minimax_noiseless(1.0_f64, 0.25, 1.0).unwrap();
        assert!(traditional_scaling(&r, 1000, 300).is_err());
        assert!(traditional_scaling(&r, 1000, 250).is_ok());
    }
}
