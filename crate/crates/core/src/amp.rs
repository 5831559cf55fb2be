//! Synthetic Gaussian compressed-sensing instances and first-order
//! approximate message passing (AMP) for the LASSO.
//!
//! Iteration, from x⁰ = 0 and z⁻¹ = 0:
//!
//! ```text
//! zᵗ   = y − A xᵗ + (‖xᵗ‖₀ / n) zᵗ⁻¹
//! xᵗ⁺¹ = η(xᵗ + Aᵀ zᵗ; τ σ̂ₜ),   σ̂ₜ² = ‖zᵗ‖² / n
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{distance, norm2, support_size, Matrix};
use crate::prior::{DiscretePrior, Prior};
use crate::real::Real;
use crate::rng;
use crate::scalar_risk::soft_threshold;
use crate::state_evolution::calibrate_tau;
use crate::weak_lp::draw_weak;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 2000;
/// σ̂ growing past this multiple of its first value counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// y = A x₀ + z with A iid N(0, 1/n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance<T> {
    pub x0: Vec<T>,
    pub z: Vec<T>,
    pub a: Matrix<T>,
    pub y: Vec<T>,
    pub seed: u64,
    pub prior: Prior<T>,
    pub sigma: T,
}

impl<T: Real> ProblemInstance<T> {
    /// Assembles an instance from explicit parts; `y` is computed.
    pub fn from_parts(a: Matrix<T>, x0: Vec<T>, z: Vec<T>, prior: Prior<T>, sigma: T, seed: u64) -> Result<Self> {
        if x0.len() != a.cols() {
            return Err(Error::LengthMismatch(a.cols(), x0.len()));
        }
        if z.len() != a.rows() {
            return Err(Error::LengthMismatch(a.rows(), z.len()));
        }
        let mut y = a.mul_vec(&x0);
        for (yi, &zi) in y.iter_mut().zip(&z) {
            *yi = *yi + zi;
        }
        Ok(Self { x0, z, a, y, seed, prior, sigma })
    }

    /// Number of unknowns N.
    pub fn big_n(&self) -> usize {
        self.a.cols()
    }

    /// Number of measurements n.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn delta_actual(&self) -> T {
        T::from_count(self.n()) / T::from_count(self.big_n())
    }

    /// The same design with signal and noise multiplied by `a`.
    pub fn dilated(&self, factor: T) -> Self {
        let s = |v: &[T]| v.iter().map(|&x| x * factor).collect::<Vec<_>>();
        Self {
            x0: s(&self.x0),
            z: s(&self.z),
            a: self.a.clone(),
            y: s(&self.y),
            seed: self.seed,
            prior: self.prior.scaled(factor),
            sigma: self.sigma * factor.abs(),
        }
    }
}

fn standard_normal<T: Real, R: Rng>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn draw_discrete<T: Real, R: Rng>(prior: &DiscretePrior<T>, count: usize, rng: &mut R) -> Vec<T> {
    let atoms = prior.atoms();
    (0..count)
        .map(|_| {
            let u = T::lit(rng.random::<f64>());
            let mut acc = T::zero();
            for &(x, w) in atoms {
                acc = acc + w;
                if u < acc {
                    return x;
                }
            }
            atoms[atoms.len() - 1].0
        })
        .collect()
}

/// `count` iid draws from `prior`.
pub fn draw_prior<T: Real, R: Rng>(prior: &Prior<T>, count: usize, rng: &mut R) -> Vec<T> {
    match prior {
        Prior::Discrete(d) => draw_discrete(d, count, rng),
        Prior::WeakLp(w) => draw_weak(w, count, rng),
    }
}

/// Draws x₀ iid from `prior`, then A, then z ~ N(0, σ²), all from one
/// stream keyed by `seed`.
pub fn generate_instance<T: Real>(
    big_n: usize,
    n: usize,
    prior: &Prior<T>,
    sigma: T,
    seed: u64,
) -> Result<ProblemInstance<T>> {
    if !(n >= 1 && n < big_n) {
        return invalid(format!("need 1 <= n < N, got n = {n}, N = {big_n}"));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return invalid(format!("noise level sigma = {sigma} must be >= 0"));
    }
    let mut rng = rng::stream(seed);
    let x0 = draw_prior(prior, big_n, &mut rng);
    let scale = T::from_count(n).sqrt().recip();
    let data: Vec<T> = (0..n * big_n).map(|_| standard_normal::<T, _>(&mut rng) * scale).collect();
    let a = Matrix::from_row_major(n, big_n, data)?;
    let z: Vec<T> = if sigma == T::zero() {
        vec![T::zero(); n]
    } else {
        (0..n).map(|_| standard_normal::<T, _>(&mut rng) * sigma).collect()
    };
    ProblemInstance::from_parts(a, x0, z, prior.clone(), sigma, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmpState<T> {
    pub x_hat: Vec<T>,
    /// zᵗ, the Onsager-corrected residual that produced `x_hat`.
    pub residual: Vec<T>,
    pub sigma_hat: T,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmpRun<T> {
    pub state: AmpState<T>,
    pub status: AmpStatus,
    /// θ used in the last update.
    pub theta: T,
    /// σ̂ₜ for every iteration.
    pub sigma_trace: Vec<T>,
}

impl<T: Real> AmpRun<T> {
    pub fn converged(&self) -> bool {
        self.status == AmpStatus::Converged
    }

    /// θ (1 − ‖x̂‖₀/n): the LASSO penalty whose minimizer an AMP fixed point is.
    pub fn effective_lambda(&self, n: usize) -> T {
        self.theta * (T::one() - T::from_count(support_size(&self.state.x_hat)) / T::from_count(n))
    }
}

/// Runs AMP with threshold policy θₜ = τ σ̂ₜ until
/// ‖xᵗ⁺¹ − xᵗ‖₂ ≤ tol (1 + ‖xᵗ‖₂) or `max_iter` updates.
pub fn amp_run<T: Real>(inst: &ProblemInstance<T>, tau: T, max_iter: usize, tol: T) -> Result<AmpRun<T>> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return invalid(format!("threshold multiplier {tau} must be positive"));
    }
    if max_iter == 0 {
        return invalid("max_iter must be >= 1");
    }
    let n = inst.n();
    let nf = T::from_count(n);
    let mut x = vec![T::zero(); inst.big_n()];
    let mut z_prev = vec![T::zero(); n];
    let mut sigma_trace = Vec::new();
    let mut sigma_first = None;
    let mut theta = T::zero();
    let mut status = AmpStatus::MaxIterations;
    let mut t = 0;
    while t < max_iter {
        let onsager = T::from_count(support_size(&x)) / nf;
        let ax = inst.a.mul_vec(&x);
        let z: Vec<T> = inst.y.iter().zip(&ax).zip(&z_prev).map(|((&yi, &axi), &zp)| yi - axi + onsager * zp).collect();
        let sigma_hat = norm2(&z) / nf.sqrt();
        sigma_trace.push(sigma_hat);
        let first = *sigma_first.get_or_insert(sigma_hat);
        if !sigma_hat.is_finite() || (first > T::zero() && sigma_hat > T::lit(DIVERGENCE_FACTOR) * first) {
            status = AmpStatus::Diverged;
            z_prev = z;
            break;
        }
        theta = tau * sigma_hat;
        let corr = inst.a.tr_mul_vec(&z);
        let next: Vec<T> = x.iter().zip(&corr).map(|(&xi, &ci)| soft_threshold(xi + ci, theta)).collect();
        t += 1;
        let step = distance(&next, &x);
        let converged = step <= tol * (T::one() + norm2(&x));
        x = next;
        z_prev = z;
        if converged {
            status = AmpStatus::Converged;
            break;
        }
    }
    let sigma_hat = sigma_trace.last().copied().unwrap_or_else(T::zero);
    Ok(AmpRun { state: AmpState { x_hat: x, residual: z_prev, sigma_hat, t }, status, theta, sigma_trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmpLasso<T> {
    pub run: AmpRun<T>,
    pub lambda: T,
    /// Threshold multiplier from the calibration relation.
    pub tau: T,
    /// θ* (1 − ‖x̂‖₀/n) at the final iterate.
    pub lambda_effective: T,
    /// |λ − λ_effective|.
    pub relation_residual: T,
}

/// AMP for the LASSO at penalty λ: calibrates τ against the instance's
/// prior and noise level (δ = n/N), then runs AMP with default settings.
pub fn amp_lasso<T: Real>(inst: &ProblemInstance<T>, lambda: T) -> Result<AmpLasso<T>> {
    let tau = calibrate_tau(lambda, inst.delta_actual(), inst.sigma, &inst.prior)?;
    amp_lasso_with_tau(inst, lambda, tau, DEFAULT_MAX_ITER, T::lit(DEFAULT_TOL))
}

/// As `amp_lasso`, with a precomputed calibrated τ.
pub fn amp_lasso_with_tau<T: Real>(
    inst: &ProblemInstance<T>,
    lambda: T,
    tau: T,
    max_iter: usize,
    tol: T,
) -> Result<AmpLasso<T>> {
    // λ = 0 is what calibration reports at a zero fixed point.
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return invalid(format!("penalty lambda = {lambda} must be nonnegative"));
    }
    let run = amp_run(inst, tau, max_iter, tol)?;
    let lambda_effective = run.effective_lambda(inst.n());
    Ok(AmpLasso { relation_residual: (lambda - lambda_effective).abs(), run, lambda, tau, lambda_effective })
}

/// ‖x̂ − x₀‖² / N.
pub fn empirical_mse<T: Real>(x_hat: &[T], x0: &[T]) -> Result<T> {
    if x_hat.len() != x0.len() {
        return Err(Error::LengthMismatch(x0.len(), x_hat.len()));
    }
    if x0.is_empty() {
        return invalid("empty vectors");
    }
    let sq: T = x_hat.iter().zip(x0).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok(sq / T::from_count(x0.len()))
}

/// One Monte Carlo replicate of an AMP experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome<T> {
    pub seed: u64,
    pub iterations: usize,
    pub status: AmpStatus,
    pub empirical_mse: T,
    pub lambda_effective: T,
    pub relation_residual: T,
}

/// Experiment definition shared by all replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmpExperiment<T> {
    pub big_n: usize,
    pub n: usize,
    pub prior: Prior<T>,
    pub sigma: T,
    pub lambda: T,
    /// Calibrated τ; computed from λ when absent.
    pub tau: Option<T>,
    pub max_iter: usize,
    pub tol: T,
}

impl<T: Real> AmpExperiment<T> {
    pub fn new(big_n: usize, n: usize, prior: Prior<T>, sigma: T, lambda: T) -> Self {
        Self { big_n, n, prior, sigma, lambda, tau: None, max_iter: DEFAULT_MAX_ITER, tol: T::lit(DEFAULT_TOL) }
    }

    pub fn resolved_tau(&self) -> Result<T> {
        match self.tau {
            Some(t) => Ok(t),
            None => {
                let delta = T::from_count(self.n) / T::from_count(self.big_n);
                calibrate_tau(self.lambda, delta, self.sigma, &self.prior)
            }
        }
    }

    pub fn run_trial(&self, tau: T, seed: u64) -> Result<TrialOutcome<T>> {
        let inst = generate_instance(self.big_n, self.n, &self.prior, self.sigma, seed)?;
        let out = amp_lasso_with_tau(&inst, self.lambda, tau, self.max_iter, self.tol)?;
        Ok(TrialOutcome {
            seed,
            iterations: out.run.state.t,
            status: out.run.status,
            empirical_mse: empirical_mse(&out.run.state.x_hat, &inst.x0)?,
            lambda_effective: out.lambda_effective,
            relation_residual: out.relation_residual,
        })
    }

    /// Runs `trials` independent replicates in parallel, the k-th with seed
    /// `trial_seed(seed, k)`. Results are in trial order.
    pub fn run_trials(&self, trials: usize, seed: u64) -> Result<Vec<TrialOutcome<T>>> {
        let tau = self.resolved_tau()?;
        (0..trials as u64).into_par_iter().map(|k| self.run_trial(tau, rng::trial_seed(seed, k))).collect()
    }
}

/// Mean and standard error of a sample.
pub fn mean_and_se<T: Real>(values: &[T]) -> (T, T) {
    let k = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / k;
    if values.len() < 2 {
        return (mean, T::nan());
    }
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (k - T::one());
    (mean, (var / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::ThreePointPrior;

    #[test]
    fn zero_problem_stays_zero() {
        let prior: Prior<f64> = DiscretePrior::zero().into();
        let inst = generate_instance(40, 20, &prior, 0.0, 1).unwrap();
        assert!(inst.z.iter().all(|&v| v == 0.0));
        let run = amp_run(&inst, 1.5, 100, 1e-8).unwrap();
        assert!(run.converged());
        assert_eq!(run.state.t, 1);
        assert!(run.state.x_hat.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let prior: Prior<f64> = ThreePointPrior::new(0.1, 2.0).unwrap().into();
        let a = generate_instance(50, 20, &prior, 0.5, 42).unwrap();
        let b = generate_instance(50, 20, &prior, 0.5, 42).unwrap();
        let c = generate_instance(50, 20, &prior, 0.5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.y, c.y);
        assert!(generate_instance(20, 20, &prior, 0.5, 1).is_err());
    }

    #[test]
    fn mse_and_summary() {
        assert_eq!(empirical_mse(&[1.0_f64, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(empirical_mse(&[0.0_f64, 0.0], &[1.0, 3.0]).unwrap(), 5.0);
        assert!(empirical_mse(&[0.0_f64], &[1.0, 3.0]).is_err());
        let (m, se) = mean_and_se(&[1.0_f64, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0_f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
