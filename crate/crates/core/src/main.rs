//! Command-line front end: solve, validate, and inspect problem files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use conegrad::cone::{min_norm_in_hull, ConeOrder};
use conegrad::linalg;
use conegrad::problem::{AssembledProblem, ProblemFile};
use conegrad::registry::registry_names;
use conegrad::set::FeasibleSet;
use conegrad::trace::write_trace_csv;
use conegrad::validate::{fd_jacobian, quasiconvexity_grid_check, sampled_stationarity, Grid};
use conegrad::solver::SolveError;
use conegrad::{solve, SolveResult, SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(
    name = "conegrad",
    version,
    about = "Projected gradient solver for cone-ordered vector optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver on a problem file and print the outcome.
    Solve(SolveArgs),
    /// Check a problem file: Jacobians, cone, scalarization grids, and the
    /// solve endpoint.
    Validate(ValidateArgs),
    /// List the built-in problems.
    List,
    /// Run ordering-cone diagnostics for a problem file.
    CheckCone { file: PathBuf },
    /// Solve every problem file in a directory and print a summary table.
    Batch(BatchArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Write the per-iteration trace to this CSV file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Override the certification slack from the problem file.
    #[arg(long)]
    sigma: Option<f64>,
    /// Override the gradient scaling from the problem file.
    #[arg(long)]
    beta: Option<f64>,
    /// Override the starting point, comma separated.
    #[arg(long, value_name = "V1,V2,...")]
    x0: Option<String>,
    /// Print a one-object JSON summary instead of plain text.
    #[arg(long)]
    json_summary: bool,
}

#[derive(Args)]
struct ValidateArgs {
    file: PathBuf,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random points per sampled check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    /// Worker thread count (defaults to CONEGRAD_THREADS or the CPU count).
    #[arg(long, value_name = "P")]
    parallel: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let run = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::List => cmd_list(),
        Command::CheckCone { file } => cmd_check_cone(&file),
        Command::Batch(args) => cmd_batch(args),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Result<AssembledProblem, String> {
    let file = ProblemFile::read(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    file.assemble().map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{}' as a number", s.trim()))
        })
        .collect()
}

fn status_exit_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Stationary => 0,
        SolveStatus::MaxIterations => 2,
        SolveStatus::LineSearchFailure | SolveStatus::OracleBudgetExceeded => 3,
    }
}

fn run_solve(problem: &AssembledProblem, x0: &[f64], config: &SolverConfig) -> Result<SolveResult, String> {
    solve(&problem.cone, &problem.function, &problem.set, x0, config).map_err(|e| match e {
        SolveError::InfeasibleStart { .. } => format!("infeasible start: {e}"),
        other => other.to_string(),
    })
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let problem = load(&args.file)?;
    let mut config = problem.config.clone();
    if let Some(sigma) = args.sigma {
        config.sigma = sigma;
    }
    if let Some(beta) = args.beta {
        config.beta_hat = beta;
    }
    config.validate().map_err(|e| e.to_string())?;
    let x0 = match &args.x0 {
        Some(text) => parse_vector(text)?,
        None => problem.x0.clone(),
    };
    let result = run_solve(&problem, &x0, &config)?;
    if let Some(path) = &args.trace {
        write_trace_csv(path, problem.function.n(), problem.function.m(), &result.iterations)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if args.json_summary {
        let summary = serde_json::json!({
            "name": problem.name,
            "status": result.status.to_string(),
            "x_final": result.x_final,
            "f_final": result.f_final,
            "stationarity_residual": result.stationarity_residual,
            "iterations": result.iterations.len(),
        });
        println!("{summary}");
    } else {
        println!("status: {}", result.status);
        println!("x_final: {}", join_numbers(&result.x_final));
        println!("f_final: {}", join_numbers(&result.f_final));
        println!("stationarity_residual: {:.6e}", result.stationarity_residual);
        println!("iterations: {}", result.iterations.len());
    }
    Ok(status_exit_code(result.status))
}

fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.12}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Upper bound on the distance between the endpoint and any sampled feasible
/// point; scales the endpoint stationarity tolerance below.
fn set_diameter_bound(set: &FeasibleSet) -> f64 {
    match set {
        FeasibleSet::WholeSpace { .. } => 100.0,
        FeasibleSet::Box { lower, upper } => {
            let mut sq = 0.0;
            for (lo, hi) in lower.iter().zip(upper) {
                if lo.is_finite() && hi.is_finite() {
                    sq += (hi - lo) * (hi - lo);
                } else {
                    return 100.0;
                }
            }
            sq.sqrt()
        }
        FeasibleSet::Ball { radius, .. } => 2.0 * radius,
        FeasibleSet::Simplex { scale, .. } => scale * 2.0f64.sqrt(),
    }
}

/// Grid bounds for the scalarization checks: the box where feasible points
/// live, padded to a finite range when the set is unbounded.
fn grid_bounds(set: &FeasibleSet, x0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let fallback = 10.0;
    match set {
        FeasibleSet::WholeSpace { dim } => (
            (0..*dim).map(|i| x0[i].min(0.0) - fallback).collect(),
            (0..*dim).map(|i| x0[i].max(0.0) + fallback).collect(),
        ),
        FeasibleSet::Box { lower, upper } => (
            lower
                .iter()
                .enumerate()
                .map(|(i, lo)| if lo.is_finite() { *lo } else { x0[i] - fallback })
                .collect(),
            upper
                .iter()
                .enumerate()
                .map(|(i, hi)| if hi.is_finite() { *hi } else { x0[i] + fallback })
                .collect(),
        ),
        FeasibleSet::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
        FeasibleSet::Simplex { dim, scale } => (vec![0.0; *dim], vec![*scale; *dim]),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, String> {
    let file = ProblemFile::read(&args.file)
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let problem = file
        .assemble()
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let mut all_pass = true;
    let mut report = |pass: bool, line: String| {
        println!("{} {line}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            all_pass = false;
        }
    };

    // Cone diagnostics.
    let margin = min_norm_in_hull(problem.cone.generators(), 2000, 1e-14).0;
    report(
        true,
        format!(
            "cone: {} generators in dimension {}, pointedness margin {margin:.3e}",
            problem.cone.generator_count(),
            problem.cone.dim()
        ),
    );

    // Symbolic Jacobian against central finite differences, at x0 and at
    // sampled feasible points.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let mut points = vec![problem.x0.clone()];
    for _ in 0..args.samples.min(50) {
        points.push(conegrad::validate::sample_feasible(&problem.set, &mut rng));
    }
    let mut worst = 0.0f64;
    let mut jac_ok = true;
    for point in &points {
        let sym = match problem.function.jacobian(point) {
            Ok(j) => j,
            Err(e) => return Err(format!("jacobian evaluation failed: {e}")),
        };
        let fd = fd_jacobian(&problem.function, point, 1e-6).map_err(|e| e.to_string())?;
        for r in 0..problem.function.m() {
            for c in 0..problem.function.n() {
                let diff = (sym.get(r, c) - fd.get(r, c)).abs();
                let allowed = 1e-8 + 1e-6 * sym.get(r, c).abs();
                worst = worst.max(diff - allowed);
                if diff > allowed {
                    jac_ok = false;
                }
            }
        }
    }
    report(
        jac_ok,
        format!(
            "jacobian: symbolic vs finite differences at {} points, worst excess {:.3e}",
            points.len(),
            worst
        ),
    );

    // Scalarization grids: each dual generator row should give a function
    // with no interior bump along axis lines and diagonals.
    let n = problem.function.n();
    if n <= 2 {
        let (lo, hi) = grid_bounds(&problem.set, &problem.x0);
        let steps = if n == 1 { vec![1001] } else { vec![201, 201] };
        let grid = Grid::new(lo, hi, steps).map_err(|e| e.to_string())?;
        let mut grids_ok = true;
        for (i, generator) in file.cone_dual_generators.iter().enumerate() {
            let qc = quasiconvexity_grid_check(&problem.function, generator, &grid, 1e-9)
                .map_err(|e| e.to_string())?;
            if !qc {
                grids_ok = false;
                println!("     generator {i} scalarization has an interior bump");
            }
        }
        report(
            grids_ok,
            format!(
                "scalarization grids: {} generators scanned",
                file.cone_dual_generators.len()
            ),
        );
    } else {
        println!("SKIP scalarization grids: only 1 or 2 variables supported, problem has {n}");
    }

    // Solve from the file's start and inspect the endpoint.
    let result = run_solve(&problem, &problem.x0, &problem.config)?;
    if result.status == SolveStatus::Stationary {
        let tol = set_diameter_bound(&problem.set) * (2.0 * problem.config.eps_stat).sqrt()
            / problem.config.beta_hat
            + 1e-9;
        let stationary = sampled_stationarity(
            &problem.cone,
            &problem.function,
            &problem.set,
            &result.x_final,
            args.samples,
            args.seed,
            tol,
        )
        .map_err(|e| e.to_string())?;
        report(
            stationary,
            format!(
                "endpoint: status Stationary after {} iterations, sampled stationarity at tolerance {tol:.3e} over {} samples",
                result.iterations.len(),
                args.samples
            ),
        );
    } else {
        report(
            false,
            format!("endpoint: solve stopped with status {}", result.status),
        );
    }

    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_list() -> Result<u8, String> {
    for (name, description) in registry_names() {
        println!("{name:<14} {description}");
    }
    Ok(0)
}

fn cmd_check_cone(path: &Path) -> Result<u8, String> {
    let file = ProblemFile::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let generators = &file.cone_dual_generators;
    if generators.is_empty() {
        return Err("problem file lists no dual generators".into());
    }
    let dim = generators[0].len();
    println!("generators: {} in dimension {dim}", generators.len());
    for (i, g) in generators.iter().enumerate() {
        println!("  [{i}] {} (norm {:.6})", join_numbers(g), linalg::norm(g));
    }
    let cone = ConeOrder::new(dim, generators).map_err(|e| e.to_string())?;
    let margin = min_norm_in_hull(cone.generators(), 2000, 1e-14).0;
    let rank = linalg::rank(cone.generators(), 1e-12);
    println!("pointedness margin: {margin:.6e} (distance from the origin to the generator hull)");
    println!("dual generator rank: {rank} of {dim}");
    println!("cone admits the ordering: yes");
    Ok(0)
}

struct BatchRow {
    file: String,
    outcome: Result<SolveResult, String>,
}

fn cmd_batch(args: BatchArgs) -> Result<u8, String> {
    let threads = match args.parallel {
        Some(p) => p,
        None => match std::env::var("CONEGRAD_THREADS") {
            Ok(raw) => raw
                .parse::<usize>()
                .ok()
                .filter(|p| *p > 0)
                .ok_or_else(|| format!("CONEGRAD_THREADS must be a positive integer, got '{raw}'"))?,
            Err(_) => std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1),
        },
    };
    if threads == 0 {
        return Err("--parallel must be a positive integer".into());
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .map_err(|e| format!("{}: {e}", args.dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("no .json problem files in {}", args.dir.display()));
    }

    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<(usize, BatchRow)>> = Mutex::new(Vec::with_capacity(files.len()));
    std::thread::scope(|scope| {
        for _ in 0..threads.min(files.len()) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= files.len() {
                    break;
                }
                let path = &files[index];
                let outcome = load(path)
                    .and_then(|problem| run_solve(&problem, &problem.x0, &problem.config));
                let row = BatchRow {
                    file: path
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string()),
                    outcome,
                };
                rows.lock().expect("result collection").push((index, row));
            });
        }
    });
    let mut rows = rows.into_inner().expect("result collection");
    rows.sort_by_key(|(index, _)| *index);

    println!("{:<28} {:<22} {:>10} {:>14}", "file", "status", "iterations", "residual");
    let mut any_input_error = false;
    let mut worst_exit = 0u8;
    for (_, row) in &rows {
        match &row.outcome {
            Ok(result) => {
                println!(
                    "{:<28} {:<22} {:>10} {:>14.6e}",
                    row.file,
                    result.status.to_string(),
                    result.iterations.len(),
                    result.stationarity_residual,
                );
                worst_exit = worst_exit.max(status_exit_code(result.status));
            }
            Err(message) => {
                println!("{:<28} {:<22} {:>10} {:>14}", row.file, "input error", "-", "-");
                eprintln!("error: {message}");
                any_input_error = true;
            }
        }
    }
    let solved = rows.iter().filter(|(_, r)| r.outcome.is_ok()).count();
    println!("{solved} of {} problems solved", rows.len());
    Ok(if any_input_error { 1 } else { worst_exit })
}
