mod pointcloud;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use permlm::{
    emit_csv, fit_loglog_slope, levsort, mean_errors_by_n, mle_denoise, mle_denoise_capped,
    read_matrix, run_experiment, sqrt_lasso_denoise, svt_denoise, write_matrix, CellDims,
    DenoiseResult, Error, EstimatorKind, ExperimentConfig, Matrix, ModelKind,
};
use pointcloud::PointCloud;

#[derive(Parser)]
#[command(
    name = "permlm",
    version,
    about = "Denoising and correspondence estimation for linear models with permuted rows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise an observation matrix with one of the four estimators.
    Denoise(DenoiseArgs),
    /// Estimate the correspondence and linear transform between two point
    /// clouds by leverage-score sorting.
    Match(MatchArgs),
    /// Run a seeded Monte-Carlo sweep and write a results CSV.
    Simulate(SweepArgs),
    /// Like simulate, and additionally print fitted log-log error slopes
    /// per estimator.
    Bench(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Mle,
    Svt,
    Srlasso,
    Levsort,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Mle => EstimatorKind::Mle,
            EstimatorArg::Svt => EstimatorKind::Svt,
            EstimatorArg::Srlasso => EstimatorKind::SrLasso,
            EstimatorArg::Levsort => EstimatorKind::LevSort,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Permutation,
    Clustering,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Permutation => ModelKind::Permutation,
            ModelArg::Clustering => ModelKind::Clustering,
        }
    }
}

#[derive(clap::Args)]
struct DenoiseArgs {
    /// Design matrix file (required for mle and levsort).
    #[arg(long)]
    a: Option<PathBuf>,
    /// Observation matrix file.
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    /// Noise standard deviation (required for svt).
    #[arg(long)]
    sigma: Option<f64>,
    /// Regularization level for srlasso (defaults to the pivotal level).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "permutation")]
    model: ModelArg,
    /// Cap override for the exhaustive search.
    #[arg(long)]
    mle_cap: Option<usize>,
    /// Output file for the denoised matrix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct MatchArgs {
    /// Source point file (plays the design role).
    #[arg(long)]
    source: PathBuf,
    /// Target point file (plays the observation role).
    #[arg(long)]
    target: PathBuf,
    /// Output CSV of `target_row,source_row` pairs.
    #[arg(long)]
    out: PathBuf,
    /// Leverage-score tie tolerance (defaults to 1e-9 x max score).
    #[arg(long)]
    tie_tol: Option<f64>,
    /// Output file for the estimated transform (defaults to `<out>.xhat`).
    #[arg(long)]
    transform_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Row counts, comma separated; lists are zipped after broadcasting
    /// singletons.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    /// Noise levels; each cell of the (n, m, d) grid is run at every level.
    #[arg(long, value_delimiter = ',', required = true)]
    sigma: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    estimators: Vec<EstimatorArg>,
    #[arg(long, value_enum, default_value = "permutation")]
    model: ModelArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    mle_cap: Option<usize>,
    /// Record wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    TooLarge(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InstanceTooLarge { .. } => CliError::TooLarge(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Denoise(args) => run_denoise(args),
        Command::Match(args) => run_match(args),
        Command::Simulate(args) => run_sweep(args, false),
        Command::Bench(args) => run_sweep(args, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::TooLarge(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn require_design(a: &Option<PathBuf>, estimator: &str) -> Result<Matrix, CliError> {
    match a {
        Some(path) => Ok(read_matrix(path)?),
        None => Err(CliError::Usage(format!(
            "--a is required for --estimator {estimator}"
        ))),
    }
}

fn run_denoise(args: DenoiseArgs) -> Result<(), CliError> {
    let y = read_matrix(&args.y)?;
    let model: ModelKind = args.model.into();

    let result: DenoiseResult = match args.estimator {
        EstimatorArg::Mle => {
            let a = require_design(&args.a, "mle")?;
            match args.mle_cap {
                Some(cap) => mle_denoise_capped(&a, &y, model, cap)?,
                None => mle_denoise(&a, &y, model)?,
            }
        }
        EstimatorArg::Svt => {
            let sigma = args
                .sigma
                .ok_or_else(|| CliError::Usage("--sigma is required for --estimator svt".into()))?;
            svt_denoise(&y, sigma)?
        }
        EstimatorArg::Srlasso => sqrt_lasso_denoise(&y, args.lambda)?,
        EstimatorArg::Levsort => {
            let a = require_design(&args.a, "levsort")?;
            levsort(&a, &y, None)?
        }
    };

    write_matrix(&args.out, &result.y_hat)?;
    let nm = (y.rows() * y.cols()) as f64;
    println!("normalized_objective={}", result.objective / nm);
    for (key, value) in result.diagnostics.iter() {
        println!("{key}={value}");
    }
    if result.diagnostics.get_bool("preconditions_met") == Some(false) {
        eprintln!("warning: leverage-sort preconditions not met; result is a heuristic");
    }
    Ok(())
}

fn run_match(args: MatchArgs) -> Result<(), CliError> {
    let source = PointCloud::from_matrix(read_matrix(&args.source)?).map_err(CliError::Usage)?;
    let target = PointCloud::from_matrix(read_matrix(&args.target)?).map_err(CliError::Usage)?;
    if source.len() != target.len() {
        return Err(CliError::Usage(format!(
            "point files must have equal row counts (source {}, target {})",
            source.len(),
            target.len()
        )));
    }

    let result = levsort(&source.points, &target.points, args.tie_tol)?;
    let arrangement = result
        .arrangement_hat
        .as_ref()
        .expect("levsort always returns a permutation");

    let mut csv = String::from("target_row,source_row\n");
    for (target_row, &source_row) in arrangement.map().iter().enumerate() {
        csv.push_str(&format!("{target_row},{source_row}\n"));
    }
    std::fs::write(&args.out, csv).map_err(|e| CliError::Usage(e.to_string()))?;

    let transform_path = args
        .transform_out
        .clone()
        .unwrap_or_else(|| default_transform_path(&args.out));
    let x_hat = result.x_hat.as_ref().expect("levsort returns a transform");
    write_matrix(&transform_path, x_hat)?;

    let rel_residual = result.objective.sqrt() / target.points.frobenius_norm().max(1e-300);
    println!("pairs={}", arrangement.len());
    println!("relative_residual={rel_residual}");
    println!("transform={}", transform_path.display());
    if result.diagnostics.get_bool("preconditions_met") == Some(false) {
        eprintln!("warning: leverage-sort preconditions not met; correspondence is a heuristic");
    } else if rel_residual > 1e-8 {
        eprintln!("warning: fit residual is not negligible; inputs may be noisy");
    }
    Ok(())
}

fn default_transform_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".xhat");
    PathBuf::from(os)
}

fn build_grid(args: &SweepArgs) -> Result<Vec<CellDims>, CliError> {
    let len = args.n.len().max(args.m.len()).max(args.d.len());
    let pick = |list: &[usize], name: &str, i: usize| -> Result<usize, CliError> {
        match list.len() {
            1 => Ok(list[0]),
            l if l == len => Ok(list[i]),
            l => Err(CliError::Usage(format!(
                "--{name} has {l} entries; expected 1 or {len}"
            ))),
        }
    };
    (0..len)
        .map(|i| {
            Ok(CellDims {
                n: pick(&args.n, "n", i)?,
                m: pick(&args.m, "m", i)?,
                d: pick(&args.d, "d", i)?,
            })
        })
        .collect()
}

fn run_sweep(args: SweepArgs, report_slopes: bool) -> Result<(), CliError> {
    let grid = build_grid(&args)?;
    let estimators: Vec<EstimatorKind> = args.estimators.iter().map(|&e| e.into()).collect();
    let mut cfg = ExperimentConfig::new(grid, args.sigma.clone(), args.trials);
    cfg.estimators = estimators.clone();
    cfg.model = args.model.into();
    cfg.master_seed = args.seed;
    cfg.mle_cap = args.mle_cap;
    cfg.record_timing = args.timing;

    let table = run_experiment(&cfg)?;
    let mut file = File::create(&args.out).map_err(Error::from)?;
    emit_csv(&table, &mut file)?;
    println!(
        "wrote {} ({} records)",
        args.out.display(),
        table.records.len()
    );

    if report_slopes {
        for est in estimators {
            let means = mean_errors_by_n(&table, est);
            match fit_loglog_slope(&means) {
                Ok(slope) => println!("slope estimator={est} value={slope:.4}"),
                Err(e) => println!("slope estimator={est} unavailable ({e})"),
            }
        }
    }
    Ok(())
}
