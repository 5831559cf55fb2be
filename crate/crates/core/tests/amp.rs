mod common;

use cs_minimax::amp::{
    amp_run, empirical_mse, generate_instance, mean_and_se, AmpExperiment, AmpStatus, ProblemInstance,
};
use cs_minimax::linalg::Matrix;
use cs_minimax::prior::{DiscretePrior, Prior, ThreePointPrior};

fn three_point(eps: f64, mu: f64) -> Prior<f64> {
    ThreePointPrior::new(eps, mu).unwrap().into()
}

#[test]
fn noiseless_instances_have_no_noise() {
    let inst = generate_instance(300, 100, &three_point(0.1, 2.0), 0.0, 3).unwrap();
    assert!(inst.z.iter().all(|&v| v == 0.0));
    let ax = inst.a.mul_vec(&inst.x0);
    assert_eq!(ax, inst.y);
}

#[test]
fn signal_moment_matches_prior() {
    let (eps, mu, p) = (0.05, 3.0, 0.5_f64);
    let big_n = 100_000;
    let inst = generate_instance(big_n, 10, &three_point(eps, mu), 1.0, 11).unwrap();
    let moment: f64 = inst.x0.iter().map(|v| v.abs().powf(p)).sum::<f64>() / big_n as f64;
    let expect = eps * mu.powf(p);
    // Var |X|^p = ε μ^{2p} − (ε μ^p)².
    let se = ((eps * mu.powf(2.0 * p) - expect * expect) / big_n as f64).sqrt();
    common::assert_within_se(moment, expect, se, 4.0);
}

#[test]
fn column_norms_near_one() {
    let big = generate_instance(2000, 1000, &three_point(0.1, 1.0), 0.0, 6).unwrap().a.transpose();
    for j in 0..big.rows() {
        let norm: f64 = big.row(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((0.9..=1.1).contains(&norm));
    }
}

#[test]
fn zero_data_converges_immediately() {
    let a = Matrix::from_row_major(2, 3, vec![1.0, 0.0, 0.5, 0.0, 1.0, -0.5]).unwrap();
    let inst =
        ProblemInstance::from_parts(a, vec![0.0; 3], vec![0.0; 2], DiscretePrior::zero().into(), 0.0, 0).unwrap();
    let run = amp_run(&inst, 1.0, 100, 1e-8).unwrap();
    assert_eq!(run.status, AmpStatus::Converged);
    assert_eq!(run.state.t, 1);
    assert!(run.state.x_hat.iter().all(|&v| v == 0.0));
}

#[test]
fn seeded_runs_are_reproducible() {
    let exp = AmpExperiment::new(400, 100, three_point(0.1, 3.0), 0.5, 0.8);
    let a = exp.run_trials(3, 42).unwrap();
    let b = exp.run_trials(3, 42).unwrap();
    assert_eq!(a, b);
    let c = exp.run_trials(3, 43).unwrap();
    assert_ne!(a[0].empirical_mse, c[0].empirical_mse);
}

#[test]
fn pseudo_data_noise_is_gaussian() {
    let inst = generate_instance(4000, 1000, &three_point(0.1, 3.0), 1.0, 17).unwrap();
    let run = amp_run(&inst, 1.5, 500, 1e-10).unwrap();
    assert!(run.converged());
    let corr = inst.a.tr_mul_vec(&run.state.residual);
    let w: Vec<f64> = run.state.x_hat.iter().zip(&corr).zip(&inst.x0).map(|((x, c), x0)| x + c - x0).collect();
    let k = w.len() as f64;
    let mean = w.iter().sum::<f64>() / k;
    let m2 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    let m4 = w.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / k;
    let kurtosis = m4 / (m2 * m2);
    assert!((kurtosis - 3.0).abs() <= 0.2, "kurtosis {kurtosis}");
    assert!((m2.sqrt() / run.state.sigma_hat - 1.0).abs() < 0.05);
}

#[test]
fn huge_threshold_gives_zero() {
    let inst = generate_instance(300, 100, &three_point(0.1, 3.0), 0.5, 2).unwrap();
    let run = amp_run(&inst, 1e6, 100, 1e-8).unwrap();
    assert!(run.converged());
    assert!(run.state.x_hat.iter().all(|&v| v == 0.0));
    assert_eq!(run.effective_lambda(100), run.theta);
}

#[test]
fn rejects_bad_arguments() {
    let prior = three_point(0.1, 1.0);
    assert!(generate_instance(100, 100, &prior, 0.0, 0).is_err());
    assert!(generate_instance(100, 10, &prior, -1.0, 0).is_err());
    let inst = generate_instance(100, 10, &prior, 0.0, 0).unwrap();
    assert!(amp_run(&inst, 0.0, 10, 1e-8).is_err());
    assert!(amp_run(&inst, 1.0, 0, 1e-8).is_err());
}

#[test]
fn empirical_mse_cases() {
    assert_eq!(empirical_mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    assert_eq!(empirical_mse(&[0.0, 0.0], &[1.0, -3.0]).unwrap(), 5.0);
    assert!(empirical_mse(&[0.0], &[1.0, 2.0]).is_err());
    assert!(empirical_mse::<f64>(&[], &[]).is_err());
    let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]);
    assert_eq!(m, 2.0);
    common::assert_close(se, (1.0_f64 / 3.0).sqrt(), 1e-15);
}
