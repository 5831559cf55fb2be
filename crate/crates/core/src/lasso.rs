//! Direct LASSO minimizers, independent of AMP:
//!
//! ```text
//! x̂_λ = argmin_x ½‖y − A x‖² + λ‖x‖₁
//! ```
//!
//! Proximal gradient (ISTA, optionally FISTA-accelerated) and cyclic
//! coordinate descent, plus the KKT residual used as their stopping rule.

use serde::{Deserialize, Serialize};

use crate::amp::ProblemInstance;
use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::real::Real;
use crate::scalar_risk::soft_threshold;

/// Relative accuracy of the power iteration for ‖A‖².
pub const POWER_TOL: f64 = 1e-6;
/// The step uses L(1 + `STEP_MARGIN`) so that the power-iteration estimate,
/// which approaches ‖A‖² from below, cannot make the step too long.
const STEP_MARGIN: f64 = 1e-5;
/// FISTA evaluates the KKT residual at its iterate every this many steps.
const FISTA_CHECK_EVERY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoOptions<T> {
    /// Stop once the KKT residual is at most `tol`.
    pub tol: T,
    pub max_iter: usize,
    pub accelerated: bool,
    /// Keep the objective at every iteration.
    pub record_objective: bool,
}

impl<T: Real> Default for LassoOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-10), max_iter: 200_000, accelerated: true, record_objective: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoSolution<T> {
    pub x_hat: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: T,
    pub objective_trace: Vec<T>,
}

/// ½‖y − A x‖² + λ‖x‖₁.
pub fn objective<T: Real>(a: &Matrix<T>, y: &[T], x: &[T], lambda: T) -> T {
    let r = residual(a, y, x);
    T::lit(0.5) * dot(&r, &r) + lambda * x.iter().map(|v| v.abs()).sum::<T>()
}

fn residual<T: Real>(a: &Matrix<T>, y: &[T], x: &[T]) -> Vec<T> {
    let ax = a.mul_vec(x);
    y.iter().zip(&ax).map(|(&yi, &v)| yi - v).collect()
}

/// KKT violation given the correlations c = Aᵀ(y − A x).
fn kkt_from_correlation<T: Real>(x: &[T], c: &[T], lambda: T) -> T {
    x.iter().zip(c).fold(T::zero(), |worst, (&xi, &ci)| {
        let v = if xi != T::zero() { (ci - lambda * xi.signum()).abs() } else { (ci.abs() - lambda).max(T::zero()) };
        worst.max(v)
    })
}

/// max over coordinates of the KKT violation for the LASSO at `x_hat`:
/// |Aᵢᵀ(y − A x̂) − λ sign(x̂ᵢ)| on the support and
/// max(0, |Aᵢᵀ(y − A x̂)| − λ) off it.
pub fn optimality_residual<T: Real>(a: &Matrix<T>, y: &[T], x_hat: &[T], lambda: T) -> T {
    let c = a.tr_mul_vec(&residual(a, y, x_hat));
    kkt_from_correlation(x_hat, &c, lambda)
}

fn check_inputs<T: Real>(a: &Matrix<T>, y: &[T], lambda: T) -> Result<()> {
    if y.len() != a.rows() {
        return Err(Error::LengthMismatch(a.rows(), y.len()));
    }
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return invalid(format!("penalty lambda = {lambda} must be positive"));
    }
    Ok(())
}

/// Proximal gradient with step 1/L, L = ‖A‖² by power iteration.
pub fn prox_gradient<T: Real>(a: &Matrix<T>, y: &[T], lambda: T, opts: &LassoOptions<T>) -> Result<LassoSolution<T>> {
    check_inputs(a, y, lambda)?;
    let big_n = a.cols();
    let lip = a.top_gram_eigenvalue(T::lit(POWER_TOL), 10_000) * (T::one() + T::lit(STEP_MARGIN));
    let aty = a.tr_mul_vec(y);
    let mut x = vec![T::zero(); big_n];
    if lip == T::zero() || kkt_from_correlation(&x, &aty, lambda) <= opts.tol {
        let kkt = kkt_from_correlation(&x, &aty, lambda);
        return Ok(finish(a, y, x, lambda, 0, true, kkt, Vec::new()));
    }
    let step = lip.recip();
    let mut point = x.clone();
    let mut momentum = T::one();
    let mut trace = Vec::new();
    for k in 1..=opts.max_iter {
        // Gradient of the smooth part at `point` is −Aᵀ(y − A point).
        let c = a.tr_mul_vec(&residual(a, y, &point));
        if !opts.accelerated {
            // Here point = x, so c gives the KKT residual of the current x.
            let kkt = kkt_from_correlation(&x, &c, lambda);
            if kkt <= opts.tol {
                return Ok(finish(a, y, x, lambda, k - 1, true, kkt, trace));
            }
        }
        let next: Vec<T> =
            point.iter().zip(&c).map(|(&pi, &ci)| soft_threshold(pi + step * ci, step * lambda)).collect();
        if opts.accelerated {
            let m_next = (T::one() + (T::one() + T::lit(4.0) * momentum * momentum).sqrt()) / T::lit(2.0);
            let w = (momentum - T::one()) / m_next;
            point = next.iter().zip(&x).map(|(&nx, &ox)| nx + w * (nx - ox)).collect();
            momentum = m_next;
            x = next;
            if k % FISTA_CHECK_EVERY == 0 {
                let kkt = optimality_residual(a, y, &x, lambda);
                if kkt <= opts.tol {
                    return Ok(finish(a, y, x, lambda, k, true, kkt, trace));
                }
            }
        } else {
            x = next;
            point = x.clone();
        }
        if opts.record_objective {
            trace.push(objective(a, y, &x, lambda));
        }
    }
    let kkt = optimality_residual(a, y, &x, lambda);
    Ok(finish(a, y, x, lambda, opts.max_iter, kkt <= opts.tol, kkt, trace))
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real>(
    a: &Matrix<T>,
    y: &[T],
    x: Vec<T>,
    lambda: T,
    iterations: usize,
    converged: bool,
    kkt_residual: T,
    objective_trace: Vec<T>,
) -> LassoSolution<T> {
    LassoSolution {
        objective: objective(a, y, &x, lambda),
        x_hat: x,
        iterations,
        converged,
        kkt_residual,
        objective_trace,
    }
}

/// Solves the LASSO for a problem instance by proximal gradient; reports
/// non-convergence as an error carrying the final KKT residual.
pub fn solve_lasso<T: Real>(inst: &ProblemInstance<T>, lambda: T, opts: &LassoOptions<T>) -> Result<LassoSolution<T>> {
    let sol = prox_gradient(&inst.a, &inst.y, lambda, opts)?;
    if !sol.converged {
        return Err(Error::NonConvergence {
            what: "proximal gradient",
            iterations: sol.iterations,
            residual: sol.kkt_residual.as_f64(),
        });
    }
    Ok(sol)
}

/// Cyclic coordinate descent, stopped when a full sweep leaves the KKT
/// residual at most `opts.tol`.
pub fn coordinate_descent<T: Real>(
    a: &Matrix<T>,
    y: &[T],
    lambda: T,
    opts: &LassoOptions<T>,
) -> Result<LassoSolution<T>> {
    check_inputs(a, y, lambda)?;
    let cols = a.transpose();
    let big_n = a.cols();
    let sq: Vec<T> = (0..big_n).map(|j| dot(cols.row(j), cols.row(j))).collect();
    let mut x = vec![T::zero(); big_n];
    let mut r = y.to_vec();
    let mut trace = Vec::new();
    for sweep in 1..=opts.max_iter {
        for j in 0..big_n {
            if sq[j] == T::zero() {
                continue;
            }
            let col = cols.row(j);
            let rho = dot(col, &r) + sq[j] * x[j];
            let new = soft_threshold(rho, lambda) / sq[j];
            let change = new - x[j];
            if change != T::zero() {
                axpy(-change, col, &mut r);
                x[j] = new;
            }
        }
        if opts.record_objective {
            trace.push(objective(a, y, &x, lambda));
        }
        // Recompute the residual from scratch to keep drift out of the test.
        let kkt = optimality_residual(a, y, &x, lambda);
        if kkt <= opts.tol {
            return Ok(finish(a, y, x, lambda, sweep, true, kkt, trace));
        }
    }
    let kkt = optimality_residual(a, y, &x, lambda);
    Err(Error::NonConvergence { what: "coordinate descent", iterations: opts.max_iter, residual: kkt.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amp::generate_instance;
    use crate::prior::{Prior, ThreePointPrior};

    fn instance() -> ProblemInstance<f64> {
        let prior: Prior<f64> = ThreePointPrior::new(0.1, 3.0).unwrap().into();
        generate_instance(80, 40, &prior, 0.3, 5).unwrap()
    }

    #[test]
    fn large_penalty_gives_zero() {
        let inst = instance();
        let lmax = inst.a.tr_mul_vec(&inst.y).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let sol = solve_lasso(&inst, lmax * 1.01, &LassoOptions::default()).unwrap();
        assert!(sol.x_hat.iter().all(|&v| v == 0.0));
        assert_eq!(optimality_residual(&inst.a, &inst.y, &sol.x_hat, lmax * 1.01), 0.0);
    }

    #[test]
    fn ista_objective_monotone() {
        let inst = instance();
        let opts = LassoOptions { accelerated: false, record_objective: true, max_iter: 500, tol: 0.0 };
        let sol = prox_gradient(&inst.a, &inst.y, 0.2, &opts).unwrap();
        for w in sol.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-14), "{} > {}", w[1], w[0]);
        }
    }

    #[test]
    fn prox_and_cd_agree() {
        let inst = instance();
        let opts = LassoOptions::default();
        let p = solve_lasso(&inst, 0.2, &opts).unwrap();
        let c = coordinate_descent(&inst.a, &inst.y, 0.2, &opts).unwrap();
        assert!(((p.objective - c.objective) / c.objective).abs() < 1e-12);
        assert!(p.kkt_residual <= 1e-10);
    }
}
