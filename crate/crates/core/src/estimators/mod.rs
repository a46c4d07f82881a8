//! The four denoising procedures: exhaustive maximum likelihood, singular
//! value thresholding, square-root LASSO nuclear-norm denoising, and the
//! leverage-score sorting algorithm for the noiseless model.

mod leverage;
mod levsort;
mod mle;
mod srlasso;
mod svt;

pub use leverage::{leverage_scores, LeverageScores};
pub use levsort::levsort;
pub use mle::{mle_denoise, mle_denoise_capped, DEFAULT_CLUSTERING_CAP, DEFAULT_PERMUTATION_CAP};
pub use srlasso::{default_srlasso_lambda, sqrt_lasso_denoise, srlasso_objective};
pub use svt::{svt_denoise, svt_lambda, svt_threshold};

use std::collections::BTreeMap;

use crate::arrangement::Arrangement;
use crate::error::Error;
use crate::matrix::Matrix;

/// Estimator identifiers used by the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Mle,
    Svt,
    SrLasso,
    LevSort,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Mle,
        EstimatorKind::Svt,
        EstimatorKind::SrLasso,
        EstimatorKind::LevSort,
    ];
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Svt => "svt",
            EstimatorKind::SrLasso => "srlasso",
            EstimatorKind::LevSort => "levsort",
        })
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "mle" => Ok(EstimatorKind::Mle),
            "svt" => Ok(EstimatorKind::Svt),
            "srlasso" => Ok(EstimatorKind::SrLasso),
            "levsort" => Ok(EstimatorKind::LevSort),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimator '{other}'"
            ))),
        }
    }
}

/// Typed diagnostic values attached to a [`DenoiseResult`].
#[derive(Debug, Clone, PartialEq)]
pub enum DiagValue {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl std::fmt::Display for DiagValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiagValue::Float(v) => write!(f, "{v}"),
            DiagValue::Int(v) => write!(f, "{v}"),
            DiagValue::Bool(v) => write!(f, "{v}"),
            DiagValue::Text(v) => f.write_str(v),
        }
    }
}

/// Ordered key-value record of solver details (iteration counts, thresholds,
/// wall time, precondition flags).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics(BTreeMap<String, DiagValue>);

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_float(&mut self, key: &str, v: f64) {
        self.0.insert(key.to_string(), DiagValue::Float(v));
    }

    pub fn set_int(&mut self, key: &str, v: u64) {
        self.0.insert(key.to_string(), DiagValue::Int(v));
    }

    pub fn set_bool(&mut self, key: &str, v: bool) {
        self.0.insert(key.to_string(), DiagValue::Bool(v));
    }

    pub fn set_text(&mut self, key: &str, v: impl Into<String>) {
        self.0.insert(key.to_string(), DiagValue::Text(v.into()));
    }

    pub fn get(&self, key: &str) -> Option<&DiagValue> {
        self.0.get(key)
    }

    pub fn get_float(&self, key: &str) -> Option<f64> {
        match self.0.get(key) {
            Some(DiagValue::Float(v)) => Some(*v),
            Some(DiagValue::Int(v)) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        match self.0.get(key) {
            Some(DiagValue::Bool(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DiagValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Output of a denoising procedure: the fitted matrix, the recovered
/// parameters when the estimator produces them, the attained objective and
/// solver diagnostics.
#[derive(Debug, Clone)]
pub struct DenoiseResult {
    pub y_hat: Matrix,
    pub arrangement_hat: Option<Arrangement>,
    pub x_hat: Option<Matrix>,
    pub objective: f64,
    pub diagnostics: Diagnostics,
}
