//! Command-line front end for symplectic landscape analysis.
//!
//! Subcommands: `analyze` (full critical report), `optimize` (multistart
//! gradient descent), `verify-sum` (built-in SUM-gate verification
//! suite), `random` (sample generator).
//!
//! Exit codes are a stable contract: 0 success, 1 I/O failure,
//! 2 invalid input, 3 non-convergence, 4 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symland::flowopt::{self, FlowConfig};
use symland::io::{self, IoError, MatrixFormat};
use symland::landscape::Objective;
use symland::report;
use symland::sumgate;
use symland::sympcore::{self, SympError, SymplecticMatrix};
use symland::tol;
use symland::hessian;

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "symland",
    version,
    about = "Critical topology of least-squares landscapes on Sp(2N,R)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a symplectic target: spectrum, every critical submanifold
    /// with value/dimension/inertia/kind, counting formulas, and the
    /// constrained section when the target is orthogonal symplectic.
    Analyze {
        /// Matrix file (JSON or CSV).
        #[arg(long)]
        input: PathBuf,
        /// Report destination (JSON); stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Symplecticity certification tolerance.
        #[arg(long, default_value_t = tol::SYMPLECTIC)]
        tol: f64,
        /// Singular-value degeneracy band.
        #[arg(long = "cluster-tol", default_value_t = tol::CLUSTER)]
        cluster_tol: f64,
        /// Dump each submanifold's quadratic form as a matrix file into
        /// this directory.
        #[arg(long = "dump-q")]
        dump_q: Option<PathBuf>,
    },
    /// Multistart gradient descent toward a target; writes a summary and
    /// per-start trajectory logs next to it.
    Optimize {
        /// Matrix file (JSON or CSV).
        #[arg(long)]
        input: PathBuf,
        /// Summary destination (JSON); stdout when omitted (trajectory
        /// logs are only written when --output is given).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Symplecticity certification tolerance.
        #[arg(long, default_value_t = tol::SYMPLECTIC)]
        tol: f64,
        /// Singular-value degeneracy band.
        #[arg(long = "cluster-tol", default_value_t = tol::CLUSTER)]
        cluster_tol: f64,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial step size.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long = "max-iters", default_value_t = 50_000)]
        max_iters: usize,
        /// Gradient-norm stopping tolerance.
        #[arg(long = "grad-tol", default_value_t = 1e-8)]
        grad_tol: f64,
        /// Spread of the random starts exp(JY).
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
    },
    /// Run the built-in SUM-gate verification suite.
    VerifySum {
        /// Entrywise tolerance for the three-decimal fixtures.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Test hook: perturb the internal singular value (negative
        /// control; forces a failure).
        #[arg(long = "perturb-omega", hide = true, default_value_t = 0.0)]
        perturb_omega: f64,
    },
    /// Generate a random symplectic matrix exp(JY).
    Random {
        /// Mode count N (the matrix is 2N x 2N).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale of the Gaussian generator entries.
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        /// Destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_format, default_value = "json")]
        format: MatrixFormat,
    },
}

fn parse_format(s: &str) -> Result<MatrixFormat, String> {
    match s.to_ascii_lowercase().as_str() {
        "json" => Ok(MatrixFormat::Json),
        "csv" => Ok(MatrixFormat::Csv),
        other => Err(format!("unknown format {other:?}, expected json or csv")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io(_) => Failure::new(EXIT_IO, e.to_string()),
            IoError::Parse(_) | IoError::Shape(_) => Failure::new(EXIT_INVALID, e.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_INVALID, e.to_string())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_IO, e.to_string())
}

fn load_target(path: &Path, tol: f64, cluster_tol: f64) -> Result<Objective, Failure> {
    let m = io::read_matrix(path)?;
    let s = SymplecticMatrix::with_tolerance(m, tol).map_err(|e| match &e {
        SympError::NotSymplectic { residual, tol } => Failure::new(
            EXIT_INVALID,
            format!("input is not symplectic: residual {residual:.6e} (tolerance {tol:.3e})"),
        ),
        _ => invalid(e),
    })?;
    Objective::with_cluster_tol(s, cluster_tol).map_err(invalid)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => io::atomic_write(path, text.as_bytes()).map_err(Failure::from),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(
    input: &Path,
    output: Option<&Path>,
    tol: f64,
    cluster_tol: f64,
    dump_q: Option<&Path>,
) -> Result<u8, Failure> {
    let obj = load_target(input, tol, cluster_tol)?;
    let report = report::analyze(&obj, &input.display().to_string()).map_err(internal)?;
    emit(output, &report::report_to_json(&report))?;
    if let Some(dir) = dump_q {
        std::fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        for (k, record) in report.submanifolds.iter().enumerate() {
            let form = hessian::assemble_hqf(&record.index_set, obj.spectrum())
                .map_err(internal)?;
            let path = dir.join(format!("q_{k:03}.json"));
            io::write_matrix(&path, form.q(), MatrixFormat::Json)?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    input: &Path,
    output: Option<&Path>,
    tol: f64,
    cluster_tol: f64,
    cfg: FlowConfig,
) -> Result<u8, Failure> {
    let obj = load_target(input, tol, cluster_tol)?;
    let summary = flowopt::multistart(&obj, &cfg).map_err(invalid)?;

    let histogram: Vec<serde_json::Value> = summary
        .histogram
        .iter()
        .map(|(value, count)| serde_json::json!({"value": value, "count": count}))
        .collect();
    let body = serde_json::json!({
        "starts": summary.starts,
        "converged": summary.successes,
        "histogram": histogram,
        "unmatched": summary.unmatched,
        "max_iterations": summary.max_iterations_used,
    });
    let text = serde_json::to_string_pretty(&body).expect("summary serializes");
    emit(output, &text)?;

    if let Some(out) = output {
        let traj_dir = out.with_extension("traj");
        std::fs::create_dir_all(&traj_dir).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        for run in &summary.runs {
            let mut log = String::new();
            for it in &run.trajectory.iterates {
                log.push_str(&format!(
                    "{} {:.16e} {:.16e}\n",
                    it.iter, it.value, it.grad_norm
                ));
            }
            let path = traj_dir.join(format!("start_{:03}.log", run.start));
            io::atomic_write(&path, log.as_bytes())?;
        }
    }

    if summary.successes == summary.starts {
        Ok(0)
    } else {
        eprintln!(
            "{} of {} starts failed to reach J <= {:.0e}",
            summary.starts - summary.successes,
            summary.starts,
            flowopt::SUCCESS_VALUE
        );
        Ok(EXIT_NONCONVERGED)
    }
}

fn cmd_verify_sum(entry_tol: f64, perturb_omega: f64) -> u8 {
    let report = sumgate::verify(&sumgate::VerifyConfig {
        entry_tol,
        omega_perturbation: perturb_omega,
    });
    for group in &report.groups {
        let status = if group.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({} checks)", group.name, group.checks.len());
        for check in &group.checks {
            if !check.passed {
                println!("  FAIL {}: {}", check.label, check.detail);
            }
        }
    }
    if report.passed() {
        println!("verify-sum: all {} check groups passed", report.groups.len());
        0
    } else {
        println!("verify-sum: FAILED ({} checks)", report.failures().len());
        EXIT_VERIFY
    }
}

fn cmd_random(
    n: usize,
    seed: u64,
    spread: f64,
    output: Option<&Path>,
    format: MatrixFormat,
) -> Result<u8, Failure> {
    if n == 0 {
        return Err(Failure::new(EXIT_INVALID, "n must be at least 1"));
    }
    let s = sympcore::random_symplectic(n, seed, spread);
    let text = match format {
        MatrixFormat::Json => io::matrix_to_json_string(s.matrix()),
        MatrixFormat::Csv => io::matrix_to_csv_string(s.matrix()),
    };
    emit(output, text.trim_end())?;
    Ok(0)
}

fn init_thread_pool() {
    if let Ok(spec) = std::env::var("SYMLAND_THREADS") {
        if let Ok(threads) = spec.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze {
            input,
            output,
            tol,
            cluster_tol,
            dump_q,
        } => cmd_analyze(&input, output.as_deref(), tol, cluster_tol, dump_q.as_deref()),
        Command::Optimize {
            input,
            output,
            tol,
            cluster_tol,
            starts,
            seed,
            step,
            max_iters,
            grad_tol,
            spread,
        } => cmd_optimize(
            &input,
            output.as_deref(),
            tol,
            cluster_tol,
            FlowConfig {
                step,
                max_iters,
                grad_tol,
                seed,
                starts,
                spread,
                ..FlowConfig::default()
            },
        ),
        Command::VerifySum { tol, perturb_omega } => Ok(cmd_verify_sum(tol, perturb_omega)),
        Command::Random {
            n,
            seed,
            spread,
            output,
            format,
        } => cmd_random(n, seed, spread, output.as_deref(), format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
