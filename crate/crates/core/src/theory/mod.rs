//! Closed-form predictions and bounds.

mod bounds;
mod predict;
mod tails;
mod threshold;

pub use bounds::{first_moment_bound_report, BoundId, BoundReport};
pub use predict::{
    alpha_small_center, alpha_small_window, alpha_upper_sparse, chi_medium_prediction, chi_small_prediction,
    classify_sparse_regime, ln_b, log_b, FormulaId, PredictionWindow, RegimeCase, RegimeConfig, RegimeLabel,
    DEFAULT_SLACK,
};
pub use tails::{exact_mixed_tail, exact_mixed_tail_in, lambda_star, mixedbin_bound, TailBound, MIXED_TAIL_MAX};
pub use threshold::{
    careful_identity, iota, kappa_of_tau, Perturbation, ThresholdParams, IDENTITY_TOL, KAPPA_DEFAULT_TOL,
    KAPPA_MAX_ITER,
};
