//! State evolution for AMP/LASSO: the map Ψ, its highest fixed point, and
//! the calibration between thresholds τ and LASSO penalties λ.
//!
//! Thresholds scale with the effective noise level, so at effective noise
//! variance v the denoiser is η(·; τ√v).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimize::bisect;
use crate::prior::Prior;
use crate::real::Real;
use crate::scalar_risk::{mse0, mse_general};
use crate::special::normal_cdf;
use crate::weak_lp::{mse_weak_prior, weak_exceedance};

/// Fixed-point iteration stops once |m_{k+1} − m_k| ≤ `FP_TOL`·(1 + m_k).
pub const FP_TOL: f64 = 1e-12;
/// Plain iteration budget before falling back to bisection on Ψ(m) − m.
pub const FP_ITERATIONS: usize = 2000;
const MAX_ITERATIONS: usize = 100_000;
/// Relative width at which the calibration inversion stops bisecting τ.
const CALIBRATION_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SEConfig<T> {
    pub delta: T,
    pub sigma: T,
    pub prior: Prior<T>,
    pub tau: T,
}

impl<T: Real> SEConfig<T> {
    pub fn new(delta: T, sigma: T, prior: impl Into<Prior<T>>, tau: T) -> Result<Self> {
        check_delta(delta)?;
        check_sigma(sigma)?;
        if !(tau > T::zero()) || !tau.is_finite() {
            return invalid(format!("threshold {tau} must be positive"));
        }
        Ok(Self { delta, sigma, prior: prior.into(), tau })
    }

    /// σ² + m/δ.
    pub fn npi(&self, m: T) -> T {
        self.sigma * self.sigma + m / self.delta
    }

    pub fn with_tau(&self, tau: T) -> Self {
        Self { tau, ..self.clone() }
    }
}

pub(crate) fn check_delta<T: Real>(delta: T) -> Result<()> {
    if !(delta > T::zero() && delta < T::one()) {
        return invalid(format!("undersampling ratio delta = {delta} outside (0, 1)"));
    }
    Ok(())
}

pub(crate) fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return invalid(format!("noise level sigma = {sigma} must be >= 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult<T> {
    pub m_star: T,
    pub npi_star: T,
    pub converged: bool,
    pub iterations: usize,
}

/// mse(v; ν, τ) = E[η(X + √v Z; τ√v) − X]² for any supported prior.
pub fn mse_at<T: Real>(noise_var: T, prior: &Prior<T>, tau: T) -> Result<T> {
    if !(noise_var > T::zero()) || !noise_var.is_finite() {
        return invalid(format!("noise variance {noise_var} must be positive"));
    }
    match prior {
        Prior::Discrete(d) => mse_general(noise_var, d, tau),
        Prior::WeakLp(w) => {
            let unit = w.scaled(noise_var.sqrt().recip());
            Ok(noise_var * mse_weak_prior(&unit, tau)?)
        }
    }
}

/// P{|X + √v Z| ≥ τ√v}.
pub fn exceedance<T: Real>(noise_var: T, prior: &Prior<T>, tau: T) -> Result<T> {
    if !(noise_var > T::zero()) || !noise_var.is_finite() {
        return invalid(format!("noise variance {noise_var} must be positive"));
    }
    let sd = noise_var.sqrt();
    match prior {
        Prior::Discrete(d) => Ok(d
            .atoms()
            .iter()
            .map(|&(x, w)| {
                let r = x / sd;
                w * (normal_cdf(-tau - r) + normal_cdf(r - tau))
            })
            .sum()),
        Prior::WeakLp(w) => weak_exceedance(w, sd, tau),
    }
}

/// Ψ(m) = mse(σ² + m/δ; ν, τ), with Ψ(0) = 0 when σ = 0.
pub fn psi<T: Real>(m: T, cfg: &SEConfig<T>) -> Result<T> {
    if !(m >= T::zero()) || !m.is_finite() {
        return invalid(format!("state-evolution argument m = {m} must be >= 0"));
    }
    let v = cfg.npi(m);
    if v == T::zero() {
        return Ok(T::zero());
    }
    mse_at(v, &cfg.prior, cfg.tau)
}

/// τ₀(δ): the root of mse₀(0, τ) = δ. Ψ has a finite highest fixed point
/// exactly when τ > τ₀(δ).
pub fn tau_zero<T: Real>(delta: T) -> Result<T> {
    check_delta(delta)?;
    bisect(|t| Ok(mse0(T::zero(), t) - delta), T::zero(), T::lit(40.0), T::tol(1e-12), T::zero(), 200)
}

/// Highest fixed point of an increasing concave map on [0, ∞), starting
/// from a point `start` with `psi(start) < start`.
///
/// Iterates m ← Ψ(m) downward; if that has not settled after
/// `FP_ITERATIONS` steps, bisects Ψ(m) − m on [0, m_k] instead (the
/// difference is concave and nonnegative at 0, so it crosses zero once from
/// above).
pub fn highest_fixed_point<T, F>(mut psi: F, start: T) -> Result<(T, usize)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut m = start;
    let tol = T::tol(FP_TOL);
    for k in 1..=FP_ITERATIONS {
        let next = psi(m)?;
        if (next - m).abs() <= tol * (T::one() + m) {
            return Ok((next, k));
        }
        m = next;
    }
    // Bracket the crossing from below by halving.
    let mut lo = m;
    let mut iterations = FP_ITERATIONS;
    loop {
        lo = lo / T::lit(2.0);
        iterations += 1;
        if lo < T::min_positive_value() / tol {
            return Ok((T::zero(), iterations));
        }
        if psi(lo)? - lo > T::zero() {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NonConvergence { what: "highest fixed point", iterations, residual: m.as_f64() });
        }
    }
    let mut hi = m;
    while hi - lo > tol * (T::one() + hi) {
        iterations += 1;
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                what: "highest fixed point",
                iterations,
                residual: (hi - lo).as_f64(),
            });
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if psi(mid)? - mid >= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + (hi - lo) / T::lit(2.0), iterations))
}

/// HFP(Ψ) = sup{m ≥ 0 : Ψ(m) ≥ m}.
///
/// Without noise Ψ(0) = 0 and Ψ is concave, so the HFP is 0 exactly when
/// the slope of Ψ at 0 is at most 1; that case is decided from the slope
/// rather than by iterating towards 0.
pub fn hfp<T: Real>(cfg: &SEConfig<T>) -> Result<FixedPointResult<T>> {
    if cfg.sigma == T::zero() && noiseless_slope_at_zero(cfg)? <= T::one() {
        return Ok(FixedPointResult { m_star: T::zero(), npi_star: T::zero(), converged: true, iterations: 0 });
    }
    hfp_with(cfg, |m| psi(m, cfg))
}

/// lim_{m→0} Ψ(m)/m at σ = 0: every nonzero atom is then infinitely far
/// above the noise and contributes 1 + τ² per unit noise variance.
fn noiseless_slope_at_zero<T: Real>(cfg: &SEConfig<T>) -> Result<T> {
    let tau = cfg.tau;
    let per_unit = match &cfg.prior {
        Prior::Discrete(d) => {
            let null: T = d.atoms().iter().filter(|a| a.0 == T::zero()).map(|a| a.1).sum();
            null * mse0(T::zero(), tau) + (T::one() - null) * (T::one() + tau * tau)
        }
        Prior::WeakLp(_) => T::one() + tau * tau,
    };
    Ok(per_unit / cfg.delta)
}

/// `hfp` for a replacement map standing in for Ψ at the same
/// configuration. The start point and the τ > τ₀ requirement are those of
/// `hfp`.
pub fn hfp_with<T, F>(cfg: &SEConfig<T>, mut map: F) -> Result<FixedPointResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let t0 = tau_zero(cfg.delta)?;
    if cfg.tau <= t0 {
        return Err(Error::NoFiniteFixedPoint { tau: cfg.tau.as_f64(), tau_zero: t0.as_f64() });
    }
    let s2 = cfg.sigma * cfg.sigma;
    let mut start = cfg.delta * (s2 + cfg.prior.scale_hint() + T::one()) * T::lit(1e3);
    let mut doublings = 0;
    while map(start)? >= start {
        start = start * T::lit(2.0);
        doublings += 1;
        if doublings > 200 || !start.is_finite() {
            return Err(Error::NoFiniteFixedPoint { tau: cfg.tau.as_f64(), tau_zero: t0.as_f64() });
        }
    }
    let (m_star, iterations) = highest_fixed_point(map, start)?;
    Ok(FixedPointResult { m_star, npi_star: cfg.npi(m_star), converged: true, iterations })
}

/// 1 − P{|X + √v Z| ≥ τ√v}/δ, the factor multiplying τ√v in λ(τ).
fn calibration_factor<T: Real>(npi: T, delta: T, prior: &Prior<T>, tau: T) -> Result<T> {
    Ok(T::one() - exceedance(npi, prior, tau)? / delta)
}

/// λ(τ) = τ√npi*·[1 − P{|X + √npi* Z| ≥ τ√npi*}/δ] along the HFP branch.
pub fn calibrate_lambda<T: Real>(cfg: &SEConfig<T>) -> Result<T> {
    let fp = hfp(cfg)?;
    calibrate_lambda_at(cfg, fp.npi_star)
}

fn calibrate_lambda_at<T: Real>(cfg: &SEConfig<T>, npi: T) -> Result<T> {
    if npi == T::zero() {
        // σ = 0 and exact recovery: λ vanishes with the noise level.
        return Ok(T::zero());
    }
    Ok(cfg.tau * npi.sqrt() * calibration_factor(npi, cfg.delta, &cfg.prior, cfg.tau)?)
}

/// τ₁: the threshold at which λ(τ) reaches 0. λ is a bijection from
/// (τ₁, ∞) onto (0, ∞).
pub fn tau_one<T: Real>(delta: T, sigma: T, prior: &Prior<T>) -> Result<T> {
    check_delta(delta)?;
    check_sigma(sigma)?;
    // Below the root of 2Φ(−τ) = δ the factor is negative whatever the
    // signal, since P{|x + sZ| ≥ τs} ≥ P{|Z| ≥ τ}.
    let lo =
        bisect(|t| Ok(T::lit(2.0) * normal_cdf(-t) - delta), T::zero(), T::lit(40.0), T::tol(1e-14), T::zero(), 200)?;
    let factor = |t: T| -> Result<T> {
        let cfg = SEConfig::new(delta, sigma, prior.clone(), t)?;
        let fp = hfp(&cfg)?;
        // λ = 0 while the HFP is 0, so that range lies below τ₁.
        if fp.npi_star == T::zero() {
            return Ok(-T::one());
        }
        calibration_factor(fp.npi_star, delta, prior, t)
    };
    // The factor at `lo` is ≤ 0 exactly; a nonnegative value there is
    // rounding (the zero signal has its root precisely at `lo`).
    if factor(lo)? >= T::zero() {
        return Ok(lo);
    }
    let mut hi = lo * T::lit(1.5) + T::one();
    let mut growth = 0;
    while factor(hi)? <= T::zero() {
        hi = hi * T::lit(2.0);
        growth += 1;
        if growth > 60 {
            return Err(Error::BracketFailure("calibration factor never turns positive".into()));
        }
    }
    bisect(factor, lo, hi, T::tol(1e-13), T::zero(), 300)
}

/// Inverts the calibration: the threshold τ > τ₁ with λ(τ) = `lambda`,
/// bisected to full working precision in τ.
pub fn calibrate_tau<T: Real>(lambda: T, delta: T, sigma: T, prior: &Prior<T>) -> Result<T> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return invalid(format!("penalty lambda = {lambda} must be positive"));
    }
    let t1 = tau_one(delta, sigma, prior)?;
    let lambda_of = |t: T| -> Result<T> { calibrate_lambda(&SEConfig::new(delta, sigma, prior.clone(), t)?) };
    // Without noise λ can leave 0 at τ₁ with unbounded slope (m* decays like
    // 1/log(1/(τ − τ₁))), so small penalties have no representable τ above
    // τ₁. τ₁ itself is then the answer to working precision.
    let mut lo = t1;
    if lambda_of(lo)? >= lambda {
        return Ok(lo);
    }
    let mut gap = T::one();
    let mut hi = t1 + gap;
    let mut growth = 0;
    while lambda_of(hi)? < lambda {
        gap = gap * T::lit(2.0);
        hi = t1 + gap;
        growth += 1;
        if growth > 60 {
            return Err(Error::BracketFailure(format!("penalty {lambda} not reached by the calibration map")));
        }
    }
    // Invariant λ(lo) < λ ≤ λ(hi); `hi` is returned so that λ(τ) ≥ λ even
    // where the bracket cannot be split further.
    let x_tol = T::tol(CALIBRATION_TOL);
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid == lo || mid == hi || hi - lo <= x_tol * hi {
            break;
        }
        if lambda_of(mid)? < lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Asymptotic LASSO mean squared error per coordinate at penalty λ: the HFP
/// of Ψ at the calibrated threshold.
///
/// A zero signal observed without noise has m* = 0 at every threshold (and
/// λ(τ) ≡ 0, so there is nothing to calibrate); its AMSE is 0 for all λ.
pub fn predicted_amse<T: Real>(lambda: T, delta: T, sigma: T, prior: &Prior<T>) -> Result<T> {
    let zero_signal = matches!(prior, Prior::Discrete(d) if d.atoms().iter().all(|a| a.0 == T::zero()));
    if sigma == T::zero() && zero_signal {
        check_delta(delta)?;
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return invalid(format!("penalty lambda = {lambda} must be positive"));
        }
        return Ok(T::zero());
    }
    let tau = calibrate_tau(lambda, delta, sigma, prior)?;
    Ok(hfp(&SEConfig::new(delta, sigma, prior.clone(), tau)?)?.m_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::{DiscretePrior, ThreePointPrior};

    fn zero_prior() -> Prior<f64> {
        DiscretePrior::zero().into()
    }

    #[test]
    fn psi_scale_covariance_at_zero_prior() {
        let cfg = SEConfig::new(0.3, 0.0, zero_prior(), 1.7).unwrap();
        for &m in &[0.0, 0.1, 2.0, 50.0] {
            let want = m / 0.3 * mse0(0.0, 1.7);
            assert!((psi(m, &cfg).unwrap() - want).abs() <= 1e-14 * (1.0 + want));
        }
        assert!(psi(-1.0, &cfg).is_err());
    }

    #[test]
    fn hfp_linear_case() {
        let (delta, sigma, tau) = (0.4, 0.7, 1.6);
        let r = mse0(0.0, tau);
        assert!(r < delta);
        let cfg = SEConfig::new(delta, sigma, zero_prior(), tau).unwrap();
        let fp = hfp(&cfg).unwrap();
        let want = sigma * sigma * r / (1.0 - r / delta);
        assert!((fp.m_star - want).abs() < 1e-10 * (1.0 + want));
        assert!((fp.npi_star - cfg.npi(fp.m_star)).abs() < 1e-15);
    }

    #[test]
    fn hfp_rejects_subcritical_threshold() {
        let t0 = tau_zero(0.25).unwrap();
        let cfg = SEConfig::new(0.25, 1.0, zero_prior(), t0 * 0.9).unwrap();
        assert!(matches!(hfp(&cfg), Err(Error::NoFiniteFixedPoint { .. })));
    }

    #[test]
    fn fallback_matches_iteration() {
        // Slope 0.999 through the origin plus an offset: fixed point 1000.
        let (m, _) = highest_fixed_point(|m: f64| Ok(1.0 + 0.999 * m), 1e6).unwrap();
        assert!((m - 1000.0).abs() < 1e-7, "{m}");
    }

    #[test]
    fn calibration_zero_prior_closed_form() {
        let (delta, sigma, tau) = (0.3, 0.5, 2.0);
        let cfg = SEConfig::new(delta, sigma, zero_prior(), tau).unwrap();
        let fp = hfp(&cfg).unwrap();
        let want = tau * fp.npi_star.sqrt() * (1.0 - 2.0 * normal_cdf(-tau) / delta);
        assert!((calibrate_lambda(&cfg).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn calibration_round_trip() {
        let prior: Prior<f64> = ThreePointPrior::new(0.1, 3.0).unwrap().into();
        let cfg = SEConfig::new(0.25, 1.0, prior.clone(), 2.2).unwrap();
        let lambda = calibrate_lambda(&cfg).unwrap();
        let tau = calibrate_tau(lambda, 0.25, 1.0, &prior).unwrap();
        assert!((tau - 2.2).abs() < 1e-8, "{tau}");
    }
}
