//! The acceptance suite A1–A10: each criterion recomputes its quantities,
//! compares them with an independent reference or a pinned bound, and
//! reports every comparison with its measured value.
//!
//! Shared by the `acceptance` test target and `cs-minimax validate`.

use std::fmt;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amp::{amp_lasso_with_tau, generate_instance, mean_and_se, AmpExperiment};
use crate::error::{invalid, Result};
use crate::lasso::{coordinate_descent, solve_lasso, LassoOptions};
use crate::linalg::{distance, norm2};
use crate::minimax::{
    minimax_noiseless, minimax_noiseless_weak, minimax_noisy, saddle_check, small_noise_expansion, traditional_scaling,
    Ball,
};
use crate::prior::{DiscretePrior, Prior, ThreePointPrior, WeakLpPrior};
use crate::rng::{stream, trial_seed};
use crate::scalar_risk::{asymptotic_scalar_minimax, inverse_mp, minimax_mp, mse0, mse_general, soft_threshold};
use crate::state_evolution::{calibrate_lambda, calibrate_tau, hfp_with, psi, tau_one, SEConfig};
use crate::weak_lp::{asymptotic_mpw, minimax_mpw, mse_weak};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Comparisons that cannot hold for a correct implementation, as
/// (criterion, check name). They are still evaluated and reported as
/// failures; callers decide whether to tolerate them.
pub const KNOWN_UNATTAINABLE: [(&str, &str); 3] = [
    ("A4", "c1(delta=0.01) vs 2/p, relative"),
    ("A6", "max |lambda - theta(1 - k/n)| / lambda"),
    ("A10", "strong value / closed form"),
];

/// One measured comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition on `value`.
    pub requirement: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, requirement: format!("<= {bound:e}"), passed: value <= bound }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, requirement: format!(">= {bound}"), passed: value >= bound }
    }

    fn positive(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, requirement: "> 0".into(), passed: value > 0.0 }
    }

    fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, requirement: format!("in [{lo}, {hi}]"), passed: value >= lo && value <= hi }
    }

    pub fn known_unattainable(&self, id: &str) -> bool {
        KNOWN_UNATTAINABLE.iter().any(|&(c, n)| c == id && n == self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
    /// Values reported for context; not compared against anything.
    pub notes: Vec<(String, f64)>,
    pub seconds: f64,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    /// True when every failing check is listed in `KNOWN_UNATTAINABLE`.
    pub fn passed_except_known(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed || c.known_unattainable(&self.id))
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {} ({:.1}s)", self.id, self.title, self.seconds)?;
        if let Some(e) = &self.error {
            write!(f, "; error: {e}")?;
        }
        for c in &self.checks {
            let mark = match (c.passed, c.known_unattainable(&self.id)) {
                (true, _) => "ok",
                (false, true) => "FAIL, known unattainable",
                (false, false) => "FAIL",
            };
            write!(f, "; {} = {:.6e} ({}) [{mark}]", c.name, c.value, c.requirement)?;
        }
        for (k, v) in &self.notes {
            write!(f, "; {k} = {v:.6e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Multiplies the closed-form soft-thresholding risk wherever a criterion
    /// compares it against an independent computation. 1 for a faithful run;
    /// other values exercise the suite's ability to detect a wrong risk.
    pub mse0_bias: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, mse0_bias: 1.0 }
    }
}

type Outcome = Result<(Vec<Check>, Vec<(String, f64)>)>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    run: fn(&ValidationOptions) -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: "A1", title: "closed-form risk vs Monte Carlo", run: a1 },
    Criterion { id: "A2", title: "scalar minimax vs grid brute force", run: a2 },
    Criterion { id: "A3", title: "scalar minimax small-radius asymptotics", run: a3 },
    Criterion { id: "A4", title: "noiseless/noisy consistency and small-noise expansion", run: a4 },
    Criterion { id: "A5", title: "state evolution vs AMP", run: a5 },
    Criterion { id: "A6", title: "AMP vs direct LASSO", run: a6 },
    Criterion { id: "A7", title: "weak-lp risk", run: a7 },
    Criterion { id: "A8", title: "saddlepoint suite", run: a8 },
    Criterion { id: "A9", title: "calibration bijection", run: a9 },
    Criterion { id: "A10", title: "traditional scaling", run: a10 },
];

/// (id, title) of every criterion, in order.
pub fn criteria() -> Vec<(&'static str, &'static str)> {
    CRITERIA.iter().map(|c| (c.id, c.title)).collect()
}

/// Runs one criterion by id (case-insensitive).
pub fn run_criterion(id: &str, opts: &ValidationOptions) -> Result<CriterionReport> {
    let c = CRITERIA
        .iter()
        .find(|c| c.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown criterion {id}")))?;
    let start = Instant::now();
    let (checks, notes, error) = match (c.run)(opts) {
        Ok((checks, notes)) => (checks, notes, None),
        Err(e) => (Vec::new(), Vec::new(), Some(e.to_string())),
    };
    Ok(CriterionReport {
        id: c.id.into(),
        title: c.title.into(),
        checks,
        notes,
        seconds: start.elapsed().as_secs_f64(),
        error,
    })
}

/// Runs the named criteria in order, or all of them when `subset` is empty.
pub fn run_validation(subset: &[String], opts: &ValidationOptions) -> Result<Vec<CriterionReport>> {
    let ids: Vec<String> =
        if subset.is_empty() { CRITERIA.iter().map(|c| c.id.to_string()).collect() } else { subset.to_vec() };
    for id in &ids {
        if !CRITERIA.iter().any(|c| c.id.eq_ignore_ascii_case(id)) {
            return invalid(format!("unknown criterion {id}"));
        }
    }
    ids.iter().map(|id| run_criterion(id, opts)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn timed_check(name: &str, start: Instant, limit: f64) -> Check {
    Check::at_most(name, start.elapsed().as_secs_f64(), limit)
}

const A1_PAIRS: usize = 20;
const A1_SAMPLES: usize = 10_000_000;
const A1_CHUNKS: usize = 10;

/// (mean, standard error) of (η(μ + Z; τ) − μ)² over `A1_SAMPLES` draws.
fn monte_carlo_risk(mu: f64, tau: f64, seed: u64) -> (f64, f64) {
    let per = A1_SAMPLES / A1_CHUNKS;
    let (s1, s2) = (0..A1_CHUNKS as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(trial_seed(seed, c));
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..per {
                let z: f64 = rng.sample(StandardNormal);
                let e = soft_threshold(mu + z, tau) - mu;
                let e2 = e * e;
                s1 += e2;
                s2 += e2 * e2;
            }
            (s1, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let k = (per * A1_CHUNKS) as f64;
    let mean = s1 / k;
    let var = (s2 / k - mean * mean) * k / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn a1(o: &ValidationOptions) -> Outcome {
    let start = Instant::now();
    let mut rng = stream(o.seed);
    let pairs: Vec<(f64, f64)> =
        (0..A1_PAIRS).map(|_| (6.0 * rng.random::<f64>(), 4.0 * rng.random::<f64>())).collect();
    let z: Vec<f64> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(mu, tau))| {
            let (mean, se) = monte_carlo_risk(mu, tau, trial_seed(o.seed, 1000 * (k as u64 + 1)));
            (o.mse0_bias * mse0(mu, tau) - mean).abs() / se
        })
        .collect();
    let within = z.iter().filter(|&&v| v <= 3.0).count();
    Ok((
        vec![
            Check::at_least("pairs within 3 SE", within as f64, A1_PAIRS as f64),
            timed_check("runtime seconds", start, 60.0),
        ],
        vec![("largest |closed - MC| / SE".into(), z.iter().copied().fold(0.0, f64::max))],
    ))
}

const A2_GRID: usize = 2000;
const A2_EPS_FLOOR: f64 = 1e-6;
const A2_TAU_MAX: f64 = 8.0;

/// max over a log-ε grid of min over a uniform τ grid of the saturated
/// three-point risk, written directly in terms of mse₀ (p = 1).
fn grid_minimax(xi_p: f64) -> f64 {
    let taus: Vec<f64> = (0..A2_GRID).map(|j| A2_TAU_MAX * j as f64 / (A2_GRID - 1) as f64).collect();
    let at_zero: Vec<f64> = taus.iter().map(|&t| mse0(0.0, t)).collect();
    let span = (xi_p / A2_EPS_FLOOR).ln();
    (0..A2_GRID)
        .into_par_iter()
        .map(|i| {
            let eps = A2_EPS_FLOOR * (span * i as f64 / (A2_GRID - 1) as f64).exp();
            let mu = xi_p / eps;
            taus.iter().zip(&at_zero).map(|(&t, &z)| (1.0 - eps) * z + eps * mse0(mu, t)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn a2(_: &ValidationOptions) -> Outcome {
    let start = Instant::now();
    let mut worst_gap: f64 = 0.0;
    let mut worst_sat: f64 = 0.0;
    let mut notes = Vec::new();
    for xi_p in [0.05, 0.1, 0.3] {
        let r = minimax_mp(1.0, xi_p)?;
        let grid = grid_minimax(xi_p);
        worst_gap = worst_gap.max((r.value - grid).abs());
        worst_sat = worst_sat.max((r.epsilon * r.mu - xi_p).abs());
        notes.push((format!("M_1({xi_p})"), r.value));
    }
    Ok((
        vec![
            Check::at_most("max |solver - grid|", worst_gap, 1e-4),
            Check::at_most("max |eps mu^p - xi^p|", worst_sat, 1e-8),
            timed_check("runtime seconds", start, 300.0),
        ],
        notes,
    ))
}

fn a3(_: &ValidationOptions) -> Outcome {
    let mut checks = Vec::new();
    for p in [0.5, 1.0] {
        let xi = 1e-6_f64.powf(1.0 / p);
        let a = asymptotic_scalar_minimax(p, xi)?;
        let m = minimax_mp(p, xi)?.value;
        checks.push(Check::within(&format!("ratio p={p}"), m / a.value, 0.75, 1.25));
    }
    Ok((checks, Vec::new()))
}

fn a4(_: &ValidationOptions) -> Outcome {
    let (p, delta, xi) = (1.0, 0.25, 1.0);
    let xi0 = inverse_mp(p, delta)?;
    let noiseless = delta * xi * xi / (xi0 * xi0);
    let noisy = minimax_noisy(p, delta, xi, 1e-3 * xi)?.value;
    let e = small_noise_expansion(p, delta)?;
    let small = small_noise_expansion(p, 0.01)?;
    Ok((
        vec![
            Check::at_most("noisy(sigma=1e-3 xi) vs noiseless, relative", rel(noisy, noiseless), 1e-3),
            Check::at_most("extracted c0 vs delta/M^-1(delta)^2, relative", rel(e.c0, e.c0_noiseless), 1e-3),
            Check::at_most("c1(delta=0.01) vs 2/p, relative", rel(small.c1, 2.0 / p), 0.15),
        ],
        vec![
            ("c0".into(), e.c0),
            ("c1(delta=0.01)".into(), small.c1),
            ("c1 from matched expansion (delta=0.01)".into(), small.c1_matched),
            ("c1 closed form (delta=0.01)".into(), small.c1_closed_form),
        ],
    ))
}

const A5_TRIALS: usize = 20;

fn a5(o: &ValidationOptions) -> Outcome {
    let start = Instant::now();
    let (delta, xi, sigma) = (0.25, 0.3, 1.0);
    let r = minimax_noisy(1.0, delta, xi, sigma)?;
    let prior = r.least_favorable_prior();
    let tau = calibrate_tau(r.lambda_star, delta, sigma, &prior)?;
    let cfg = SEConfig::new(delta, sigma, prior.clone(), tau)?;
    let predicted = hfp_with(&cfg, |m| psi(m, &cfg).map(|v| v * o.mse0_bias))?.m_star;
    let mut exp = AmpExperiment::new(4000, 1000, prior, sigma, r.lambda_star);
    exp.tau = Some(tau);
    let trials = exp.run_trials(A5_TRIALS, trial_seed(o.seed, 5_000))?;
    let mses: Vec<f64> = trials.iter().map(|t| t.empirical_mse).collect();
    let (mean, se) = mean_and_se(&mses);
    Ok((
        vec![
            Check::at_most("|mean MSE / m* - 1|", rel(mean, predicted), 0.05),
            timed_check("runtime seconds", start, 600.0),
        ],
        vec![
            ("m*".into(), predicted),
            ("mean empirical MSE".into(), mean),
            ("standard error".into(), se),
            (
                "converged trials".into(),
                trials.iter().filter(|t| t.status == crate::amp::AmpStatus::Converged).count() as f64,
            ),
        ],
    ))
}

const A6_INSTANCES: u64 = 5;

fn a6(o: &ValidationOptions) -> Outcome {
    let (delta, xi, sigma) = (0.25, 0.3, 1.0);
    let r = minimax_noisy(1.0, delta, xi, sigma)?;
    let prior = r.least_favorable_prior();
    let lambda = r.lambda_star;
    let tau = calibrate_tau(lambda, delta, sigma, &prior)?;
    let opts = LassoOptions::default();

    let mut converged = 0usize;
    let mut diff_eff: f64 = 0.0;
    let mut diff_lambda: f64 = 0.0;
    let mut relation: f64 = 0.0;
    let mut objective_gap: f64 = 0.0;
    for k in 0..A6_INSTANCES {
        let inst = generate_instance(500, 125, &prior, sigma, trial_seed(o.seed, 6_000 + k))?;
        let amp = amp_lasso_with_tau(&inst, lambda, tau, crate::amp::DEFAULT_MAX_ITER, crate::amp::DEFAULT_TOL)?;
        if k == 0 {
            let prox = solve_lasso(&inst, lambda, &opts)?;
            let cd = coordinate_descent(&inst.a, &inst.y, lambda, &opts)?;
            objective_gap = rel(prox.objective, cd.objective);
        }
        if !amp.run.converged() {
            continue;
        }
        converged += 1;
        let x = &amp.run.state.x_hat;
        // A converged AMP iterate solves the LASSO at its own effective
        // penalty θ(1 − k/n).
        let at_eff = solve_lasso(&inst, amp.lambda_effective, &opts)?;
        diff_eff = diff_eff.max(distance(x, &at_eff.x_hat) / norm2(&at_eff.x_hat));
        let at_lambda = solve_lasso(&inst, lambda, &opts)?;
        diff_lambda = diff_lambda.max(distance(x, &at_lambda.x_hat) / norm2(&at_lambda.x_hat));
        relation = relation.max(amp.relation_residual / lambda);
    }
    let relation = if converged == 0 { f64::INFINITY } else { relation };
    let diff_eff = if converged == 0 { f64::INFINITY } else { diff_eff };
    Ok((
        vec![
            Check::at_least("converged AMP runs", converged as f64, 1.0),
            Check::at_most("max ||x_amp - x_lasso|| / ||x_lasso||", diff_eff, 1e-3),
            Check::at_most("max |lambda - theta(1 - k/n)| / lambda", relation, 1e-2),
            Check::at_most("prox vs coordinate descent objective, relative", objective_gap, 1e-9),
        ],
        vec![
            ("instances".into(), A6_INSTANCES as f64),
            ("max relative difference to the LASSO at lambda itself".into(), diff_lambda),
        ],
    ))
}

const A7_PRIORS: usize = 10;

/// A random symmetric discrete law rescaled onto the weak-ℓp sphere of
/// radius ξ.
fn random_weak_member<R: Rng>(p: f64, xi: f64, rng: &mut R) -> Result<DiscretePrior<f64>> {
    let atoms = rng.random_range(1..=4usize);
    let mass: f64 = rng.random_range(0.05..1.0);
    let weights: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut law = vec![(0.0, 1.0 - mass)];
    for w in &weights {
        let x = rng.random_range(0.1..5.0);
        let half = mass * w / total / 2.0;
        law.push((x, half));
        law.push((-x, half));
    }
    let nu = DiscretePrior::new(law, true)?;
    let scale = (xi.powf(p) / nu.weak_pth_moment(p)).powf(1.0 / p);
    Ok(nu.scaled(scale))
}

fn a7(o: &ValidationOptions) -> Outcome {
    let mut zero_gap: f64 = 0.0;
    for p in [0.25_f64, 0.5, 1.0] {
        for xi in [1e-3, 0.1, 1.0, 30.0] {
            zero_gap = zero_gap.max((mse_weak(p, xi, 0.0)? - 1.0).abs());
        }
    }

    let mut rowwise: f64 = f64::INFINITY;
    for p in [0.25, 0.5, 0.75, 1.0] {
        for xi_p in [1e-4_f64, 1e-3, 0.01, 0.05, 0.1, 0.3, 0.6] {
            let xi = xi_p.powf(1.0 / p);
            rowwise = rowwise.min(minimax_mpw(p, xi)?.value - minimax_mp(p, xi)?.value);
        }
    }

    let mut checks = vec![
        Check::at_most("max |mse_weak(tau=0) - 1|", zero_gap, 1e-9),
        Check::at_least("min M^w - M over the grid", rowwise, 0.0),
    ];
    for p in [0.5, 1.0] {
        let xi = 1e-6_f64.powf(1.0 / p);
        let ratio = minimax_mpw(p, xi)?.value / asymptotic_mpw(p, xi)?;
        checks.push(Check::within(&format!("asymptotic ratio p={p}"), ratio, 0.75, 1.25));
    }

    let mut rng = stream(trial_seed(o.seed, 7_000));
    let mut excess: f64 = f64::NEG_INFINITY;
    for k in 0..A7_PRIORS {
        let p = if k % 2 == 0 { 0.5 } else { 1.0 };
        let xi = 0.1_f64.powf(1.0 / p);
        let game = minimax_mpw(p, xi)?;
        let nu = random_weak_member(p, xi, &mut rng)?;
        excess = excess.max(mse_general(1.0, &nu, game.tau)? - game.value);
    }
    checks.push(Check::at_most("max risk(test prior) - M^w at tau^w", excess, 1e-12));
    Ok((checks, Vec::new()))
}

/// log₂(λ/λ*) for the AMP sweep. The predicted AMSE changes by well under
/// 1% within a quarter octave of λ*, below the Monte Carlo resolution at
/// N = 2000, so the grid is spaced by half octaves.
const A8_SWEEP: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
const A8_TRIALS: usize = 20;

fn a8(o: &ValidationOptions) -> Outcome {
    let (p, delta) = (1.0, 0.25);
    let mut checks = Vec::new();
    for sigma in [0.0, 1.0] {
        let s = saddle_check(p, delta, 1.0, sigma, Ball::Strong)?;
        checks.push(Check::at_most(&format!("saddle violation sigma={sigma}"), s.max_violation, 1e-6));
    }

    // AMP λ-sweep at the A5 configuration, common seeds across the grid.
    let (xi, sigma) = (0.3, 1.0);
    let r = minimax_noisy(p, delta, xi, sigma)?;
    let prior = r.least_favorable_prior();
    let mut curve = Vec::new();
    for s in A8_SWEEP {
        let exp = AmpExperiment::new(2000, 500, prior.clone(), sigma, r.lambda_star * 2f64.powf(s));
        let trials = exp.run_trials(A8_TRIALS, trial_seed(o.seed, 8_000))?;
        let mses: Vec<f64> = trials.iter().map(|t| t.empirical_mse).collect();
        curve.push(mean_and_se(&mses).0);
    }
    let argmin = curve.iter().enumerate().fold(0, |b, (i, &v)| if v < curve[b] { i } else { b });
    let centre = A8_SWEEP.iter().position(|&s| s == 0.0).expect("grid contains 0");
    checks.push(Check::at_most("|argmin grid index - index of lambda*|", (argmin as f64 - centre as f64).abs(), 1.0));
    let ends = curve[0].min(curve[curve.len() - 1]);
    checks.push(Check::positive("min(endpoint MSE) - min MSE", ends - curve[argmin]));
    let notes = A8_SWEEP.iter().zip(&curve).map(|(s, v)| (format!("mean MSE at lambda* 2^{s}"), *v)).collect();
    Ok((checks, notes))
}

const A9_GRID: usize = 100;
const A9_SPAN: f64 = 4.0;

fn a9(_: &ValidationOptions) -> Outcome {
    let battery: Vec<(f64, f64, Prior<f64>)> = vec![
        (0.25, 1.0, ThreePointPrior::new(0.1, 3.0)?.into()),
        (0.1, 0.5, ThreePointPrior::new(0.02, 5.0)?.into()),
        (0.5, 1.0, DiscretePrior::zero().into()),
        (0.25, 1.0, WeakLpPrior::new(1.0, 0.3)?.into()),
        (0.25, 0.0, ThreePointPrior::new(0.05, 2.0)?.into()),
    ];
    let mut nonincreasing = 0usize;
    let mut round_trip: f64 = 0.0;
    for (delta, sigma, prior) in battery {
        let t1 = tau_one(delta, sigma, &prior)?;
        let mut previous = f64::NEG_INFINITY;
        for k in 1..=A9_GRID {
            let tau = t1 + A9_SPAN * k as f64 / A9_GRID as f64;
            let lambda = calibrate_lambda(&SEConfig::new(delta, sigma, prior.clone(), tau)?)?;
            if !(lambda > previous) {
                nonincreasing += 1;
            }
            previous = lambda;
            if k % 25 == 12 {
                let back = calibrate_tau(lambda, delta, sigma, &prior)?;
                round_trip = round_trip.max((back - tau).abs());
            }
        }
    }
    Ok((
        vec![
            Check::at_most("grid steps where lambda(tau) fails to increase", nonincreasing as f64, 0.0),
            Check::at_most("max |calibrate_tau(calibrate_lambda(tau)) - tau|", round_trip, 1e-8),
        ],
        Vec::new(),
    ))
}

fn a10(_: &ValidationOptions) -> Outcome {
    let (p, big_n, n) = (1.0, 1_000_000, 1_000);
    let delta = n as f64 / big_n as f64;
    let strong = traditional_scaling(&minimax_noiseless(p, delta, 1.0)?, big_n, n)?;
    let weak = traditional_scaling(&minimax_noiseless_weak(p, delta, 1.0)?, big_n, n)?;
    let factor = (1.0 - p / 2.0).powf(-2.0 / p);
    Ok((
        vec![
            Check::within("strong value / closed form", strong.value / strong.asymptotic_value, 0.9, 1.1),
            Check::at_most(
                "weak/strong asymptotic column vs (1-p/2)^(-2/p), relative",
                rel(weak.asymptotic_value / strong.asymptotic_value, factor),
                1e-12,
            ),
        ],
        vec![
            ("weak value / closed form".into(), weak.value / weak.asymptotic_value),
            ("strong traditional value".into(), strong.value),
        ],
    ))
}
