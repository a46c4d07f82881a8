//! Estimators and experiment tooling for linear models whose row
//! correspondence is unknown: observations `Y = P A X + W` where `P` is a
//! hidden permutation (or, more generally, a clustering map that may repeat
//! rows) and `W` is Gaussian noise.
//!
//! The crate provides
//! - exact maximum likelihood denoising by exhaustive search at desk scale,
//! - singular value thresholding at the canonical noise-calibrated level,
//! - the square-root LASSO nuclear-norm denoiser, solved exactly in the
//!   spectral domain without knowledge of the noise scale,
//! - the leverage-score sorting algorithm that recovers the correspondence
//!   exactly in the noiseless case,
//! - rate curves, an adversarial construction for thresholding estimators,
//!   and a seeded Monte-Carlo harness with CSV output.

pub mod analysis;
pub mod arrangement;
pub mod decomp;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod instance;
pub mod matrix;
pub mod textio;

#[cfg(test)]
pub(crate) mod testutil;

pub use analysis::{
    flatness_witness_check, normalized_prediction_error, rate_mle, rate_svt,
    svt_adversarial_instance, FlatnessVerdict, RateParams, WitnessMode,
};
pub use arrangement::{Arrangement, ClusteringAssignment, Permutation};
pub use decomp::{projection_residual, pseudo_inverse, svd, SvdFactors, DEFAULT_RANK_TOL};
pub use error::{Error, Result};
pub use estimators::{
    default_srlasso_lambda, leverage_scores, levsort, mle_denoise, mle_denoise_capped,
    sqrt_lasso_denoise, srlasso_objective, svt_denoise, svt_lambda, svt_threshold, DenoiseResult,
    DiagValue, Diagnostics, EstimatorKind, LeverageScores, DEFAULT_CLUSTERING_CAP,
    DEFAULT_PERMUTATION_CAP,
};
pub use harness::{
    csv_string, emit_csv, fit_loglog_slope, mean_errors_by_n, run_experiment, CellDims,
    ExperimentConfig, ResultTable, TrialOutcome, TrialRecord, CSV_HEADER,
};
pub use instance::{generate_instance, mix_seed, splitmix64, Design, Instance, ModelKind};
pub use matrix::Matrix;
pub use textio::{format_matrix, parse_matrix, read_matrix, write_matrix};
