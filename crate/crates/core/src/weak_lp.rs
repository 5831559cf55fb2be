//! Minimax soft-thresholding risk over weak-ℓp balls.
//!
//! The least-favorable law is known in closed form (the most dispersed
//! distribution with P{|X| ≥ t} = (ξ/t)^p), so the game reduces to a single
//! minimization over the threshold. Expectations under that law are
//! integrated in w = log x, where the density becomes p (ξ/x)^p dw:
//!
//! ```text
//! E g(|X|) = ∫_{log ξ}^∞ g(e^w) p (ξ e^{−w})^p dw.
//! ```
//!
//! The w range is cut into panels no wider than `PANEL_WIDTH` so that the
//! knee of g near the threshold is always sampled, however small ξ is.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::optimize::scan_then_golden;
use crate::prior::WeakLpPrior;
use crate::quadrature::integrate;
use crate::real::Real;
use crate::rng;
use crate::scalar_risk::{invert_increasing, mse0, tau_bracket_hi, OPT_WIDTH_TOL};
use crate::special::normal_cdf;

/// Quadrature stops at x = τ + `TAIL_CUT`; beyond it mse₀ equals 1 + τ²
/// to far below double resolution.
pub const TAIL_CUT: f64 = 10.0;
const QUAD_ABS_TOL: f64 = 1e-13;
const PANEL_WIDTH: f64 = 0.5;
const QUAD_MAX_SEGMENTS: usize = 200;
const TAU_SCAN_POINTS: usize = 40;

/// H_{p,ξ}(t) = inf over the weak ball of P{|X| ≤ t}.
pub fn envelope<T: Real>(p: T, xi: T, t: T) -> T {
    if t < xi {
        T::zero()
    } else {
        T::one() - (xi / t).powf(p)
    }
}

/// E g(|X|) under the least-favorable weak law, for a bounded `g` with
/// limit `g_inf` at infinity. `x_cut` is where `g` has reached its limit.
pub(crate) fn weak_expectation<T, G>(prior: &WeakLpPrior<T>, x_cut: T, g_inf: T, mut g: G) -> Result<T>
where
    T: Real,
    G: FnMut(T) -> T,
{
    let (p, xi) = (prior.p(), prior.xi());
    if x_cut <= xi {
        return Ok(g_inf);
    }
    let (lo, hi) = (xi.ln(), x_cut.ln());
    let panels = ((hi - lo) / T::lit(PANEL_WIDTH)).ceil().to_usize().unwrap_or(1).max(1);
    let width = (hi - lo) / T::from_count(panels);
    let tol = T::tol(QUAD_ABS_TOL) / T::from_count(panels);
    let mut body = T::zero();
    for k in 0..panels {
        let a = lo + width * T::from_count(k);
        let b = if k + 1 == panels { hi } else { a + width };
        body = body
            + integrate(
                |w| {
                    let x = w.exp();
                    g(x) * p * (xi / x).powf(p)
                },
                a,
                b,
                tol,
                QUAD_MAX_SEGMENTS,
            )?;
    }
    Ok(body + g_inf * (xi / x_cut).powf(p))
}

/// Soft-thresholding risk at unit noise against the least-favorable weak-ℓp
/// law of radius ξ.
pub fn mse_weak<T: Real>(p: T, xi: T, tau: T) -> Result<T> {
    let prior = WeakLpPrior::new(p, xi)?;
    if !(tau >= T::zero()) {
        return invalid(format!("threshold {tau} must be >= 0"));
    }
    mse_weak_prior(&prior, tau)
}

pub(crate) fn mse_weak_prior<T: Real>(prior: &WeakLpPrior<T>, tau: T) -> Result<T> {
    let limit = T::one() + tau * tau;
    weak_expectation(prior, tau + T::lit(TAIL_CUT), limit, |x| mse0(x, tau))
}

/// P{|X + sZ| ≥ τs} for the weak law, used by the calibration relation.
pub(crate) fn weak_exceedance<T: Real>(prior: &WeakLpPrior<T>, noise_sd: T, tau: T) -> Result<T> {
    let cut = noise_sd * (tau + T::lit(TAIL_CUT));
    weak_expectation(prior, cut, T::one(), |x| {
        let r = x / noise_sd;
        normal_cdf(-tau - r) + normal_cdf(r - tau)
    })
}

/// M_p^w(ξ) and the threshold attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakMinimax<T> {
    pub p: T,
    pub xi: T,
    pub value: T,
    pub tau: T,
}

impl<T: Real> WeakMinimax<T> {
    pub fn prior(&self) -> WeakLpPrior<T> {
        WeakLpPrior::new(self.p, self.xi).expect("validated on construction")
    }
}

/// M_p^w(ξ) = inf_τ mse(1; τ, ν_{p,ξ}).
pub fn minimax_mpw<T: Real>(p: T, xi: T) -> Result<WeakMinimax<T>> {
    let prior = WeakLpPrior::new(p, xi)?;
    let tau_hi = tau_bracket_hi(xi.powf(p));
    let mut failure = None;
    let best = scan_then_golden(
        |t| match mse_weak_prior(&prior, t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::infinity()
            }
        },
        T::zero(),
        tau_hi,
        TAU_SCAN_POINTS,
        T::tol(OPT_WIDTH_TOL),
        500,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(WeakMinimax { p, xi, value: best.value, tau: best.x })
}

/// Leading-order radius with M_p^w(ξ) = m as m → 0, obtained by inverting
/// (2/(2−p)) (2 log(1/ξ^p))^{1−p/2} ξ^p.
pub fn asymptotic_inverse_mpw<T: Real>(p: T, m: T) -> T {
    let two = T::lit(2.0);
    let reduced = (two - p) / two * m;
    (two * reduced.recip().ln()).powf(T::lit(0.5) - p.recip()) * reduced.powf(p.recip())
}

/// Solves M_p^w(ξ) = m for ξ.
pub fn inverse_mpw<T: Real>(p: T, m: T) -> Result<T> {
    if !(p > T::zero() && p <= T::one()) {
        return invalid(format!("exponent p = {p} outside (0, 1]"));
    }
    if !(m > T::zero() && m < T::one()) {
        return invalid(format!("target MSE {m} outside (0, 1)"));
    }
    invert_increasing(|xi| minimax_mpw(p, xi).map(|r| r.value), m, asymptotic_inverse_mpw(p, m))
}

/// Small-ξ leading order of M_p^w: (2/(2−p)) (2 log(1/ξ^p))^{1−p/2} ξ^p.
pub fn asymptotic_mpw<T: Real>(p: T, xi: T) -> Result<T> {
    let xi_p = xi.powf(p);
    if !(xi_p > T::zero() && xi_p < T::one()) {
        return invalid(format!("asymptotic formula needs 0 < xi^p < 1, got {xi_p}"));
    }
    let two = T::lit(2.0);
    Ok(two / (two - p) * (two * xi_p.recip().ln()).powf(T::one() - p / two) * xi_p)
}

/// iid draws from the least-favorable weak-ℓp law by inverse CDF: a uniform
/// sign times ξ·U^{−1/p}, U uniform on (0, 1].
pub fn sample_weak_prior<T: Real>(p: T, xi: T, count: usize, seed: u64) -> Result<Vec<T>> {
    let prior = WeakLpPrior::new(p, xi)?;
    if count == 0 {
        return invalid("sample count must be >= 1");
    }
    let mut rng = rng::stream(seed);
    Ok(draw_weak(&prior, count, &mut rng))
}

pub(crate) fn draw_weak<T: Real, R: Rng>(prior: &WeakLpPrior<T>, count: usize, rng: &mut R) -> Vec<T> {
    (0..count)
        .map(|_| {
            let u = T::lit(1.0 - rng.random::<f64>());
            let m = prior.magnitude_at(u);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect()
}
