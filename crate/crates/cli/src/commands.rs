use rayon::prelude::*;

use cs_minimax::amp::{generate_instance, mean_and_se, AmpExperiment, AmpStatus};
use cs_minimax::lasso::{coordinate_descent, solve_lasso, LassoOptions};
use cs_minimax::linalg::support_size;
use cs_minimax::minimax::{minimax, Ball};
use cs_minimax::prior::{DiscretePrior, Prior, ThreePointPrior, WeakLpPrior};
use cs_minimax::rng::trial_seed;
use cs_minimax::scalar_risk::minimax_mp;
use cs_minimax::state_evolution::{calibrate_lambda, calibrate_tau, hfp, psi, tau_zero, SEConfig};
use cs_minimax::validation::{run_validation, ValidationOptions};
use cs_minimax::weak_lp::minimax_mpw;
use cs_minimax::{amp::empirical_mse, Error};

use crate::args::*;
use crate::output::{Cell, Output};
use crate::CliError;

fn error_cell<T>(r: &Result<T, Error>) -> Cell {
    match r {
        Ok(_) => Cell::Empty,
        Err(e) => Cell::Text(e.to_string()),
    }
}

/// Appends rows whose failures are marked in their error column; with a
/// single requested point the failure is returned instead.
fn push_rows(out: &mut Output, rows: Vec<(Vec<Cell>, Option<Error>)>, single: bool) -> Result<(), CliError> {
    for (row, err) in rows {
        if let (true, Some(e)) = (single, err) {
            return Err(e.into());
        }
        out.push(row);
    }
    Ok(())
}

fn ball_name(b: Ball) -> &'static str {
    match b {
        Ball::Strong => "strong",
        Ball::Weak => "weak",
    }
}

pub fn scalar_risk(a: &ScalarRiskArgs, weak_only: bool) -> Result<Output, CliError> {
    let grid = match a.xi {
        Some(xi) => Grid::single(xi.powf(a.p[0])),
        None => a.grid.clone(),
    };
    let with_strong = !weak_only;
    let with_weak = weak_only || a.weak;
    let mut columns = vec!["p", "xi_p"];
    if with_strong {
        columns.extend(["M_p", "tau_p", "mu_p", "eps_p"]);
    }
    if with_weak {
        columns.extend(["M_p_weak", "tau_p_weak"]);
    }
    columns.push("error");
    let mut out = Output::new(if weak_only { "weak-risk" } else { "scalar-risk" }, columns);
    out.param("p", join(&a.p));
    out.param("grid", grid.describe());

    let points: Vec<(f64, f64)> = a.p.iter().flat_map(|&p| grid.points().into_iter().map(move |t| (p, t))).collect();
    let single = points.len() == 1;
    let rows: Vec<(Vec<Cell>, Option<Error>)> = points
        .par_iter()
        .map(|&(p, xi_p)| {
            let xi = xi_p.powf(1.0 / p);
            let mut row = vec![Cell::from(p), Cell::from(xi_p)];
            let mut err = None;
            if with_strong {
                match minimax_mp(p, xi) {
                    Ok(s) => row.extend([s.value, s.tau, s.mu, s.epsilon].map(Cell::from)),
                    Err(e) => {
                        row.extend((0..4).map(|_| Cell::Empty));
                        err = Some(e);
                    }
                }
            }
            if with_weak {
                match minimax_mpw(p, xi) {
                    Ok(w) => row.extend([w.value, w.tau].map(Cell::from)),
                    Err(e) => {
                        row.extend([Cell::Empty, Cell::Empty]);
                        err = err.or(Some(e));
                    }
                }
            }
            row.push(err.as_ref().map_or(Cell::Empty, |e| Cell::Text(e.to_string())));
            (row, err)
        })
        .collect();
    push_rows(&mut out, rows, single)?;
    Ok(out)
}

pub fn minimax_cmd(a: &MinimaxArgs) -> Result<Output, CliError> {
    let sigma = match a.mode {
        Mode::Noiseless => 0.0,
        Mode::Noisy => a.sigma,
    };
    let points: Vec<(f64, f64)> = match (a.over, &a.grid) {
        (_, None) => vec![(a.delta, a.xi)],
        (Over::Delta, Some(g)) => g.points().into_iter().map(|d| (d, a.xi)).collect(),
        (Over::Xi, Some(g)) => g.points().into_iter().map(|x| (a.delta, x)).collect(),
    };
    let mut out = Output::new(
        "minimax",
        vec![
            "mode",
            "ball",
            "p",
            "delta",
            "xi",
            "sigma",
            "value",
            "tau_star",
            "lambda_star",
            "eps_star",
            "xi_star",
            "mu_star",
            "error",
        ],
    );
    out.param("mode", a.mode.name());
    out.param("ball", ball_name(a.ball.into()));
    out.real_param("p", a.p);
    out.real_param("sigma", sigma);
    match &a.grid {
        Some(g) => {
            out.param("grid_over", a.over.name());
            out.param("grid", g.describe());
            let fixed = match a.over {
                Over::Delta => ("xi", a.xi),
                Over::Xi => ("delta", a.delta),
            };
            out.real_param(fixed.0, fixed.1);
        }
        None => {
            out.real_param("delta", a.delta);
            out.real_param("xi", a.xi);
        }
    }
    let ball: Ball = a.ball.into();
    let rows: Vec<(Vec<Cell>, Option<Error>)> = points
        .par_iter()
        .map(|&(delta, xi)| {
            let r = minimax(ball, a.p, delta, xi, sigma);
            let mut row = vec![
                Cell::from(a.mode.name()),
                Cell::from(ball_name(ball)),
                Cell::from(a.p),
                Cell::from(delta),
                Cell::from(xi),
                Cell::from(sigma),
            ];
            match &r {
                Ok(m) => row.extend([
                    Cell::from(m.value),
                    Cell::from(m.tau_star),
                    Cell::from(m.lambda_star),
                    Cell::from(m.eps_star),
                    Cell::from(m.xi_star),
                    Cell::from(m.mu_star),
                ]),
                Err(_) => row.extend((0..6).map(|_| Cell::Empty)),
            }
            row.push(error_cell(&r));
            (row, r.err())
        })
        .collect();
    push_rows(&mut out, rows, a.grid.is_none())?;
    Ok(out)
}

/// Resolves a prior specification; the least-favorable prior also yields
/// its minimax penalty.
pub fn resolve_prior(
    spec: &PriorSpec,
    p: f64,
    delta: f64,
    xi: f64,
    sigma: f64,
) -> Result<(Prior<f64>, Option<f64>), Error> {
    Ok(match *spec {
        PriorSpec::ThreePoint { eps, mu } => (ThreePointPrior::new(eps, mu)?.into(), None),
        PriorSpec::Weak { p, xi } => (WeakLpPrior::new(p, xi)?.into(), None),
        PriorSpec::Zero => (DiscretePrior::zero().into(), None),
        PriorSpec::LeastFavorable => {
            let r = minimax(Ball::Strong, p, delta, xi, sigma)?;
            (r.least_favorable_prior(), Some(r.lambda_star))
        }
    })
}

fn record_prior(out: &mut Output, prior: &PriorArgs) {
    out.param("prior", prior.prior);
    if prior.prior == PriorSpec::LeastFavorable {
        out.real_param("p", prior.p);
        out.real_param("xi", prior.xi);
    }
}

/// τ from whichever of λ / τ was given, falling back to the least-favorable λ*.
fn resolve_tau(
    pen: &Penalty,
    lambda_star: Option<f64>,
    delta: f64,
    sigma: f64,
    prior: &Prior<f64>,
) -> Result<(f64, Option<f64>), CliError> {
    match (pen.tau, pen.lambda.or(lambda_star)) {
        (Some(t), _) => Ok((t, None)),
        (None, Some(l)) => Ok((calibrate_tau(l, delta, sigma, prior)?, Some(l))),
        (None, None) => Err(CliError::Usage("one of --lambda or --tau is required for this prior".into())),
    }
}

pub fn se(a: &SeArgs) -> Result<Output, CliError> {
    let (prior, lambda_star) = resolve_prior(&a.prior.prior, a.prior.p, a.delta, a.prior.xi, a.sigma)?;
    let (tau, _) = resolve_tau(&a.penalty, lambda_star, a.delta, a.sigma, &prior)?;
    let cfg = SEConfig::new(a.delta, a.sigma, prior, tau)?;
    let mut out = Output::new("se", vec!["m", "psi"]);
    out.real_param("delta", a.delta);
    out.real_param("sigma", a.sigma);
    record_prior(&mut out, &a.prior);
    out.real_param("tau", tau);
    let m_star = match hfp(&cfg) {
        Ok(fp) => {
            out.result("status", "converged");
            out.result("m_star", fp.m_star);
            out.result("npi_star", fp.npi_star);
            out.result("lambda", calibrate_lambda(&cfg)?);
            fp.m_star
        }
        Err(Error::NoFiniteFixedPoint { .. }) => {
            out.result("status", "diverged");
            f64::NAN
        }
        Err(e) => return Err(e.into()),
    };
    out.result("tau_zero", tau_zero(a.delta)?);
    let grid = match &a.grid {
        Some(g) => g.clone(),
        None => Grid::linear(0.0, 2.0 * if m_star > 0.0 { m_star } else { 1.0 }, 101),
    };
    out.param("grid", grid.describe());
    let rows: Vec<Result<Vec<Cell>, Error>> =
        grid.points().par_iter().map(|&m| Ok(vec![Cell::from(m), Cell::from(psi(m, &cfg)?)])).collect();
    for r in rows {
        out.push(r?);
    }
    Ok(out)
}

pub fn calibrate(a: &CalibrateArgs) -> Result<Output, CliError> {
    let (prior, _) = resolve_prior(&a.prior.prior, a.prior.p, a.delta, a.prior.xi, a.sigma)?;
    let (given, value) = match (a.penalty.lambda, a.penalty.tau) {
        (Some(l), None) => ("lambda", l),
        (None, Some(t)) => ("tau", t),
        _ => return Err(CliError::Usage("give exactly one of --lambda or --tau".into())),
    };
    let grid = a.grid.clone().unwrap_or_else(|| Grid::single(value));
    let mut out = Output::new("calibrate", vec!["tau", "lambda", "m_star", "error"]);
    out.real_param("delta", a.delta);
    out.real_param("sigma", a.sigma);
    record_prior(&mut out, &a.prior);
    out.param("given", given);
    out.param("grid", grid.describe());
    let rows: Vec<(Vec<Cell>, Option<Error>)> = grid
        .points()
        .par_iter()
        .map(|&v| {
            let r = (|| -> Result<(f64, f64, f64), Error> {
                let tau = if given == "tau" { v } else { calibrate_tau(v, a.delta, a.sigma, &prior)? };
                let cfg = SEConfig::new(a.delta, a.sigma, prior.clone(), tau)?;
                let m = hfp(&cfg)?.m_star;
                let lambda = if given == "lambda" { v } else { calibrate_lambda(&cfg)? };
                Ok((tau, lambda, m))
            })();
            match r {
                Ok((t, l, m)) => (vec![Cell::from(t), Cell::from(l), Cell::from(m), Cell::Empty], None),
                Err(e) => {
                    let (t, l) =
                        if given == "tau" { (Cell::from(v), Cell::Empty) } else { (Cell::Empty, Cell::from(v)) };
                    (vec![t, l, Cell::Empty, Cell::Text(e.to_string())], Some(e))
                }
            }
        })
        .collect();
    push_rows(&mut out, rows, a.grid.is_none())?;
    Ok(out)
}

fn check_dims(big_n: usize, n: usize) -> Result<f64, CliError> {
    if n == 0 || n >= big_n {
        return Err(CliError::Usage(format!("need 1 <= n < N, got n = {n}, N = {big_n}")));
    }
    Ok(n as f64 / big_n as f64)
}

pub fn amp(a: &AmpArgs) -> Result<Output, CliError> {
    let delta = check_dims(a.big_n, a.n)?;
    let (prior, lambda_star) = resolve_prior(&a.prior.prior, a.prior.p, delta, a.prior.xi, a.sigma)?;
    let (tau, lambda) = resolve_tau(&a.penalty, lambda_star, delta, a.sigma, &prior)?;
    let cfg = SEConfig::new(delta, a.sigma, prior.clone(), tau)?;
    let predicted = hfp(&cfg)?.m_star;
    let lambda = match lambda {
        Some(l) => l,
        None => calibrate_lambda(&cfg)?,
    };
    let mut exp = AmpExperiment::new(a.big_n, a.n, prior, a.sigma, lambda);
    exp.tau = Some(tau);
    exp.max_iter = a.max_iter;
    exp.tol = a.tol;
    let trials = exp.run_trials(a.trials, a.seed)?;

    let mut out = Output::new(
        "amp",
        vec![
            "trial",
            "seed",
            "iterations",
            "status",
            "empirical_mse",
            "standard_error",
            "predicted_mse",
            "relative_gap",
            "lambda_theta_residual",
        ],
    );
    out.param("N", a.big_n);
    out.param("n", a.n);
    out.real_param("sigma", a.sigma);
    record_prior(&mut out, &a.prior);
    out.real_param("lambda", lambda);
    out.real_param("tau", tau);
    out.param("trials", a.trials);
    out.param("seed", a.seed);
    out.param("max_iter", a.max_iter);
    out.real_param("tol", a.tol);
    let gap = |m: f64| if predicted > 0.0 { (m - predicted).abs() / predicted } else { (m - predicted).abs() };
    for (k, t) in trials.iter().enumerate() {
        out.push(vec![
            Cell::from(k),
            Cell::from(t.seed),
            Cell::from(t.iterations),
            Cell::from(status_name(t.status)),
            Cell::from(t.empirical_mse),
            Cell::Empty,
            Cell::from(predicted),
            Cell::from(gap(t.empirical_mse)),
            Cell::from(t.relation_residual),
        ]);
    }
    let mses: Vec<f64> = trials.iter().map(|t| t.empirical_mse).collect();
    let residuals: Vec<f64> = trials.iter().map(|t| t.relation_residual).collect();
    let (mean, se) = mean_and_se(&mses);
    let (mean_res, _) = mean_and_se(&residuals);
    out.push(vec![
        Cell::from("mean"),
        Cell::Empty,
        Cell::Empty,
        Cell::from(format!(
            "{}/{} converged",
            trials.iter().filter(|t| t.status == AmpStatus::Converged).count(),
            trials.len()
        )),
        Cell::from(mean),
        Cell::from(se),
        Cell::from(predicted),
        Cell::from(gap(mean)),
        Cell::from(mean_res),
    ]);
    out.result("mean_mse", mean);
    out.result("standard_error", se);
    out.result("predicted_mse", predicted);
    out.result("relative_gap", gap(mean));
    Ok(out)
}

fn status_name(s: AmpStatus) -> &'static str {
    match s {
        AmpStatus::Converged => "converged",
        AmpStatus::MaxIterations => "max_iterations",
        AmpStatus::Diverged => "diverged",
    }
}

pub fn lasso(a: &LassoArgs) -> Result<Output, CliError> {
    let delta = check_dims(a.big_n, a.n)?;
    let (prior, lambda_star) = resolve_prior(&a.prior.prior, a.prior.p, delta, a.prior.xi, a.sigma)?;
    let lambda =
        a.lambda.or(lambda_star).ok_or_else(|| CliError::Usage("--lambda is required for this prior".into()))?;
    let predicted = cs_minimax::state_evolution::predicted_amse(lambda, delta, a.sigma, &prior)?;
    let opts = LassoOptions { tol: a.tol, max_iter: a.max_iter, ..Default::default() };
    let solvers: &[Solver] = match a.solver {
        Solver::Both => &[Solver::Prox, Solver::Cd],
        ref s => std::slice::from_ref(s),
    };
    let mut out = Output::new(
        "lasso",
        vec![
            "trial",
            "seed",
            "solver",
            "objective",
            "iterations",
            "converged",
            "kkt_residual",
            "support_size",
            "empirical_mse",
            "predicted_mse",
        ],
    );
    out.param("N", a.big_n);
    out.param("n", a.n);
    out.real_param("sigma", a.sigma);
    record_prior(&mut out, &a.prior);
    out.real_param("lambda", lambda);
    out.param("trials", a.trials);
    out.param("seed", a.seed);
    out.real_param("tol", a.tol);
    let rows: Vec<Result<Vec<Vec<Cell>>, Error>> = (0..a.trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = trial_seed(a.seed, k);
            let inst = generate_instance(a.big_n, a.n, &prior, a.sigma, seed)?;
            solvers
                .iter()
                .map(|s| {
                    let sol = match s {
                        Solver::Cd => coordinate_descent(&inst.a, &inst.y, lambda, &opts)?,
                        _ => solve_lasso(&inst, lambda, &opts)?,
                    };
                    Ok(vec![
                        Cell::from(k),
                        Cell::from(seed),
                        Cell::from(s.name()),
                        Cell::from(sol.objective),
                        Cell::from(sol.iterations),
                        Cell::from(sol.converged),
                        Cell::from(sol.kkt_residual),
                        Cell::from(support_size(&sol.x_hat)),
                        Cell::from(empirical_mse(&sol.x_hat, &inst.x0)?),
                        Cell::from(predicted),
                    ])
                })
                .collect()
        })
        .collect();
    for r in rows {
        for row in r? {
            out.push(row);
        }
    }
    Ok(out)
}

/// Returns the report and whether every criterion passed (optionally
/// tolerating the checks listed as known unattainable).
pub fn validate(a: &ValidateArgs) -> Result<(Output, bool), CliError> {
    let opts = ValidationOptions { seed: a.seed, mse0_bias: a.mse0_bias };
    let reports = run_validation(&a.only, &opts)?;
    let mut out = Output::new(
        "validate",
        vec!["criterion", "title", "check", "value", "requirement", "passed", "known_unattainable", "seconds", "error"],
    );
    out.param("seed", a.seed);
    out.param("only", a.only.join(";"));
    out.real_param("mse0_bias", a.mse0_bias);
    out.param("allow_known_unattainable", a.allow_known_unattainable);
    let mut ok = true;
    for r in &reports {
        eprintln!("{r}");
        ok &= if a.allow_known_unattainable { r.passed_except_known() } else { r.passed() };
        if let Some(e) = &r.error {
            out.push(vec![
                Cell::from(r.id.as_str()),
                Cell::from(r.title.as_str()),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::from(false),
                Cell::from(false),
                Cell::from(r.seconds),
                Cell::from(e.as_str()),
            ]);
        }
        for c in &r.checks {
            out.push(vec![
                Cell::from(r.id.as_str()),
                Cell::from(r.title.as_str()),
                Cell::from(c.name.as_str()),
                Cell::from(c.value),
                Cell::from(c.requirement.as_str()),
                Cell::from(c.passed),
                Cell::from(c.known_unattainable(&r.id)),
                Cell::from(r.seconds),
                Cell::Empty,
            ]);
        }
    }
    out.result("passed", ok);
    Ok((out, ok))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| crate::output::format_real(*x)).collect::<Vec<_>>().join(";")
}
