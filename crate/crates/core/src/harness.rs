//! Seeded experiment runner: sweeps (n, m, d) x sigma cells, runs the
//! requested estimators on fresh instances, and records normalized
//! prediction errors in a CSV-friendly table.
//!
//! Determinism: the per-trial seed is `mix_seed(master, cell_index,
//! trial_index)`, so serial and parallel execution produce identical tables.
//! Wall-clock timings are recorded only when `record_timing` is set and are
//! excluded from the determinism guarantee.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::normalized_prediction_error;
use crate::decomp::{svd, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::estimators::{
    levsort, mle_denoise_capped, sqrt_lasso_denoise, svt_denoise, EstimatorKind,
    DEFAULT_CLUSTERING_CAP, DEFAULT_PERMUTATION_CAP,
};
use crate::instance::{generate_instance, mix_seed, Design, Instance, ModelKind};

/// One (n, m, d) point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellDims {
    pub n: usize,
    pub m: usize,
    pub d: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid: Vec<CellDims>,
    pub sigmas: Vec<f64>,
    pub trials: usize,
    pub estimators: Vec<EstimatorKind>,
    pub model: ModelKind,
    pub master_seed: u64,
    /// Overrides the per-model exhaustive-search cap when set.
    pub mle_cap: Option<usize>,
    /// Run trials across threads; the result is identical either way.
    pub parallel: bool,
    /// Record wall-clock timings (excluded from determinism guarantees).
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(grid: Vec<CellDims>, sigmas: Vec<f64>, trials: usize) -> Self {
        Self {
            grid,
            sigmas,
            trials,
            estimators: vec![EstimatorKind::Svt],
            model: ModelKind::Permutation,
            master_seed: 0,
            mle_cap: None,
            parallel: true,
            record_timing: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.sigmas.is_empty() {
            return Err(Error::InvalidArgument("empty experiment grid".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidArgument("no estimators requested".into()));
        }
        for s in &self.sigmas {
            if *s < 0.0 || !s.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid sigma {s}")));
            }
        }
        Ok(())
    }
}

/// Either a measured error or the reason the estimator was skipped.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Measured(f64),
    Skipped(String),
}

impl TrialOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            TrialOutcome::Measured(v) => Some(*v),
            TrialOutcome::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub estimator: EstimatorKind,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub rank_a: usize,
    pub sigma: f64,
    pub model: ModelKind,
    pub trial: usize,
    pub seed: u64,
    pub normalized_error: TrialOutcome,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub records: Vec<TrialRecord>,
}

pub const CSV_HEADER: &str =
    "estimator,n,m,d,rank_a,sigma,model,trial,seed,normalized_error,elapsed_ms";

/// Runs the full sweep. Row order is cell grid order, then estimator (in the
/// configured order), then trial.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;

    let cells: Vec<(CellDims, f64)> = cfg
        .grid
        .iter()
        .flat_map(|dims| cfg.sigmas.iter().map(move |&s| (*dims, s)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();

    let run_job = |&(cell_idx, trial): &(usize, usize)| -> Result<Vec<TrialRecord>> {
        let (dims, sigma) = cells[cell_idx];
        let seed = mix_seed(cfg.master_seed, cell_idx as u64, trial as u64);
        let instance = generate_instance(
            dims.n,
            dims.m,
            dims.d,
            sigma,
            cfg.model,
            Design::Gaussian,
            seed,
        )?;
        let rank_a = svd(&instance.a, DEFAULT_RANK_TOL)?.rank();
        cfg.estimators
            .iter()
            .map(|&estimator| {
                let started = Instant::now();
                let outcome = run_estimator(estimator, &instance, cfg);
                let elapsed_ms = if cfg.record_timing {
                    started.elapsed().as_secs_f64() * 1e3
                } else {
                    0.0
                };
                Ok(TrialRecord {
                    estimator,
                    n: dims.n,
                    m: dims.m,
                    d: dims.d,
                    rank_a,
                    sigma,
                    model: cfg.model,
                    trial,
                    seed,
                    normalized_error: outcome?,
                    elapsed_ms,
                })
            })
            .collect()
    };

    let per_job: Vec<Result<Vec<TrialRecord>>> = if cfg.parallel {
        jobs.par_iter().map(run_job).collect()
    } else {
        jobs.iter().map(run_job).collect()
    };

    // Reassemble in the contract order: cell, then estimator, then trial.
    let mut by_job = Vec::with_capacity(jobs.len());
    for res in per_job {
        by_job.push(res?);
    }
    let mut records = Vec::with_capacity(jobs.len() * cfg.estimators.len());
    for cell_idx in 0..cells.len() {
        for est_idx in 0..cfg.estimators.len() {
            for trial in 0..cfg.trials {
                let job_idx = cell_idx * cfg.trials + trial;
                records.push(by_job[job_idx][est_idx].clone());
            }
        }
    }

    Ok(ResultTable { records })
}

fn run_estimator(
    estimator: EstimatorKind,
    instance: &Instance,
    cfg: &ExperimentConfig,
) -> Result<TrialOutcome> {
    let result = match estimator {
        EstimatorKind::Mle => {
            let cap = cfg.mle_cap.unwrap_or(match cfg.model {
                ModelKind::Permutation => DEFAULT_PERMUTATION_CAP,
                ModelKind::Clustering => DEFAULT_CLUSTERING_CAP,
            });
            mle_denoise_capped(&instance.a, &instance.y, cfg.model, cap)
        }
        EstimatorKind::Svt => svt_denoise(&instance.y, instance.sigma),
        EstimatorKind::SrLasso => sqrt_lasso_denoise(&instance.y, None),
        EstimatorKind::LevSort => levsort(&instance.a, &instance.y, None),
    };
    match result {
        Ok(res) => Ok(TrialOutcome::Measured(normalized_prediction_error(
            &res.y_hat,
            &instance.y_star,
        )?)),
        // Inapplicable estimators become skip markers instead of aborting the
        // sweep.
        Err(Error::InstanceTooLarge { .. }) => Ok(TrialOutcome::Skipped("InstanceTooLarge".into())),
        Err(Error::InvalidArgument(_)) => Ok(TrialOutcome::Skipped("InvalidArgument".into())),
        Err(e) => Err(e),
    }
}

/// Ordinary least-squares slope of log y against log x.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least two points".into(),
        ));
    }
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "slope fit needs positive finite points, got ({x}, {y})"
            )));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Ok(sxy / sxx)
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes the table; reals carry 17 significant digits so that parsing
/// them back is exact.
pub fn csv_string(table: &ResultTable) -> String {
    let mut out = String::with_capacity(64 * (table.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &table.records {
        let error_field = match &r.normalized_error {
            TrialOutcome::Measured(v) => fmt_real(*v),
            TrialOutcome::Skipped(reason) => format!("skipped:{reason}"),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.estimator,
            r.n,
            r.m,
            r.d,
            r.rank_a,
            fmt_real(r.sigma),
            r.model,
            r.trial,
            r.seed,
            error_field,
            fmt_real(r.elapsed_ms),
        ));
    }
    out
}

pub fn emit_csv(table: &ResultTable, dest: &mut impl Write) -> Result<()> {
    dest.write_all(csv_string(table).as_bytes())?;
    Ok(())
}

/// Per-n mean of measured errors for one estimator, in grid order. Used for
/// slope reporting.
pub fn mean_errors_by_n(table: &ResultTable, estimator: EstimatorKind) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = Vec::new();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for r in &table.records {
        if r.estimator != estimator {
            continue;
        }
        if let Some(v) = r.normalized_error.value() {
            match order.iter().position(|&n| n == r.n) {
                Some(pos) => {
                    sums[pos].0 += v;
                    sums[pos].1 += 1;
                }
                None => {
                    order.push(r.n);
                    sums.push((v, 1));
                }
            }
        }
    }
    order
        .into_iter()
        .zip(sums)
        .map(|(n, (sum, count))| (n as f64, sum / count as f64))
        .collect()
}
