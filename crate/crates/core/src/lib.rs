//! Minimax mean squared error of ℓ1-penalized least squares (the LASSO) in
//! compressed sensing, over ℓp and weak-ℓp balls.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it at `f64`, which is what every quoted tolerance
//! assumes.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amp;
pub mod error;
pub mod lasso;
pub mod linalg;
pub mod minimax;
pub mod optimize;
pub mod prior;
pub mod quadrature;
pub mod real;
pub mod rng;
pub mod scalar_risk;
pub mod special;
pub mod state_evolution;
pub mod validation;
pub mod weak_lp;

pub use error::{Error, Result};
pub use real::Real;

pub type ThreePointPrior = prior::ThreePointPrior<f64>;
pub type DiscretePrior = prior::DiscretePrior<f64>;
pub type WeakLpPrior = prior::WeakLpPrior<f64>;
pub type Prior = prior::Prior<f64>;
pub type ScalarMinimax = scalar_risk::ScalarMinimax<f64>;
pub type WeakMinimax = weak_lp::WeakMinimax<f64>;
pub type SEConfig = state_evolution::SEConfig<f64>;
pub type FixedPointResult = state_evolution::FixedPointResult<f64>;
pub type MinimaxReport = minimax::MinimaxReport<f64>;
pub type SmallNoiseExpansion = minimax::SmallNoiseExpansion<f64>;
pub type TraditionalScaling = minimax::TraditionalScaling<f64>;
pub type SaddleCheck = minimax::SaddleCheck<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type ProblemInstance = amp::ProblemInstance<f64>;
pub type AmpRun = amp::AmpRun<f64>;
pub type AmpLasso = amp::AmpLasso<f64>;
pub type AmpExperiment = amp::AmpExperiment<f64>;
pub type TrialOutcome = amp::TrialOutcome<f64>;
pub type LassoOptions = lasso::LassoOptions<f64>;
pub type LassoSolution = lasso::LassoSolution<f64>;
