//! Batch command-line interface to the lattice regression-tree toolkit:
//! `fit` a tensor file, `simulate` a Monte-Carlo study, or `check` the
//! randomized inequality and refinement-bound suites.
//!
//! Exit codes: 0 success, 1 property violation, 2 data error, 64 usage
//! error. All output is a pure function of the flags and input files.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use ortree_core::io::{read_tensor, write_fit_json, write_partition_json, write_tensor};
use ortree_core::lattice::for_each_cell;
use ortree_core::refine::{
    refine_1d_bound, refine_1d_to_rdp, refine_2d_bound, refine_2d_to_rdp, sparse_to_hierarchical,
};
use ortree_core::simlab::{noise_value, run_scenario, LambdaRule, Scenario, ScenarioKind};
use ortree_core::solver::solve;
use ortree_core::variation::{gns_check, mean_bound_1d};
use ortree_core::{Error as CoreError, Family, LatticeArray, Partition, Rect};

const EXIT_VIOLATION: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "ortree",
    version,
    about = "Exact penalized regression trees (Dyadic CART and ORT) on lattice data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a penalized regression tree to a lattice array in tensor text format.
    Fit(FitArgs),
    /// Run a Monte-Carlo study and emit its MSE table as CSV.
    Simulate(SimulateArgs),
    /// Run a randomized property suite; nonzero exit on any violation.
    Check(CheckArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input array in tensor text format.
    #[arg(long)]
    input: PathBuf,
    /// Polynomial degree fitted on each rectangle.
    #[arg(long)]
    order: usize,
    /// Penalty per rectangle; must be positive.
    #[arg(long)]
    lambda: f64,
    /// Partition family: rdp (Dyadic CART) or hier (ORT).
    #[arg(long)]
    family: String,
    /// Write the fitted array here (tensor text).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the optimal partition here (JSON with per-rectangle coeffs).
    #[arg(long)]
    partition_out: Option<PathBuf>,
    /// Solver thread count (results are identical for any value).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Study design: pinwheel2d, twopiece2d, smooth2d, or pwlinear1d.
    #[arg(long)]
    scenario: String,
    /// Comma-separated size parameters, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    /// Noise standard deviation (default: the scenario's own).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Polynomial degree (default: the scenario's own).
    #[arg(long)]
    order: Option<usize>,
    /// Partition family (default: the scenario's own).
    #[arg(long)]
    family: Option<String>,
    /// Penalty rule: log2n or fixed:<value>.
    #[arg(long, default_value = "log2n")]
    lambda_rule: String,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite to run: gns, meanbound, or refine.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit)
        }
    }
}

/// An error plus the exit code it maps to.
struct CliError {
    message: String,
    exit: u8,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn usage_err(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        exit: EXIT_USAGE,
    }
}

fn data_err(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        exit: EXIT_DATA,
    }
}

/// Core errors arising from input data are data errors; the rest indicate
/// bad arguments.
fn core_err(e: CoreError) -> CliError {
    let exit = match e {
        CoreError::Parse(_) | CoreError::NotAPartition(_) | CoreError::DimensionMismatch(_) => {
            EXIT_DATA
        }
        _ => EXIT_USAGE,
    };
    CliError {
        message: e.to_string(),
        exit,
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    if threads == 0 {
        return Err(usage_err("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage_err(format!("cannot build thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn cmd_fit(args: FitArgs) -> Result<ExitCode, CliError> {
    let family = Family::from_str(&args.family).map_err(core_err)?;
    if family == Family::Arbitrary {
        return Err(usage_err("--family must be rdp or hier"));
    }
    if args.lambda <= 0.0 {
        return Err(usage_err(format!(
            "--lambda must be positive, got {}",
            args.lambda
        )));
    }
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| data_err(format!("cannot read {}: {e}", args.input.display())))?;
    let y = read_tensor(&text).map_err(core_err)?;
    let pool = thread_pool(args.threads)?;
    let fit = pool
        .install(|| solve(&y, args.order, args.lambda, family))
        .map_err(core_err)?;
    println!("objective={} pieces={}", fit.objective, fit.partition.len());
    if let Some(path) = &args.output {
        std::fs::write(path, write_tensor(&fit.fitted))
            .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.partition_out {
        let json = write_fit_json(&fit).map_err(core_err)?;
        std::fs::write(path, json)
            .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let kind = ScenarioKind::from_str(&args.scenario).map_err(|e| usage_err(e.to_string()))?;
    let family = match &args.family {
        None => kind.default_family(),
        Some(f) => {
            let family = Family::from_str(f).map_err(core_err)?;
            if family == Family::Arbitrary {
                return Err(usage_err("--family must be rdp or hier"));
            }
            family
        }
    };
    let scenario = Scenario {
        kind,
        sizes: args.sizes,
        sigma: args.sigma.unwrap_or_else(|| kind.default_sigma()),
        reps: args.reps,
        lambda_rule: LambdaRule::from_str(&args.lambda_rule)
            .map_err(|e| usage_err(e.to_string()))?,
        order: args.order.unwrap_or_else(|| kind.default_order()),
        family,
        seed: args.seed,
    };
    let pool = thread_pool(args.threads)?;
    let table = pool.install(|| run_scenario(&scenario)).map_err(core_err)?;
    let csv = table.to_csv();
    match &args.out {
        None => print!("{csv}"),
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))?;
            match table.slope {
                Some(s) => println!("slope={s}"),
                None => println!("slope=nan"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic uniform integer in `lo..=hi` for trial-local draws.
fn uniform(seed: u64, stream: u64, idx: u64, lo: usize, hi: usize) -> usize {
    let h = mix64(seed ^ mix64(stream) ^ mix64(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    lo + (h % (hi - lo + 1) as u64) as usize
}

fn gaussian_array(dims: &[usize], seed: u64, stream: u64, draw: u64) -> LatticeArray {
    let n: usize = dims.iter().product();
    let vals: Vec<f64> = (0..n)
        .map(|c| noise_value(seed ^ stream, dims.len() as u64, draw, c as u64))
        .collect();
    LatticeArray::new(dims.to_vec(), vals).expect("consistent shape")
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, CliError> {
    if args.trials == 0 {
        return Err(usage_err("--trials must be at least 1"));
    }
    let violations = match args.suite.as_str() {
        "gns" => check_gns(args.trials, args.seed),
        "meanbound" => check_meanbound(args.trials, args.seed),
        "refine" => check_refine(args.trials, args.seed),
        other => return Err(usage_err(format!("unknown suite {other:?}"))),
    };
    if violations == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VIOLATION))
    }
}

fn check_gns(trials: u64, seed: u64) -> u64 {
    let shapes: Vec<Vec<usize>> = vec![vec![4, 4], vec![8, 4], vec![8, 8], vec![4, 4, 4]];
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (i, dims) in shapes.iter().enumerate() {
        for draw in 0..trials {
            let theta = gaussian_array(dims, seed, i as u64, draw);
            let rep = gns_check(&theta).expect("d >= 2");
            worst = worst.max(rep.lhs - rep.rhs);
            if rep.lhs > rep.rhs + 1e-9 {
                violations += 1;
                println!(
                    "violation: lhs {} > rhs {} on shape {dims:?}",
                    rep.lhs, rep.rhs
                );
                print!("{}", write_tensor(&theta));
            }
        }
    }
    println!(
        "gns: {} trials across {} shapes, {violations} violations (max lhs-rhs {worst:.3e})",
        trials * shapes.len() as u64,
        shapes.len()
    );
    violations
}

fn check_meanbound(trials: u64, seed: u64) -> u64 {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (i, n) in [10usize, 100].iter().enumerate() {
        for draw in 0..trials {
            let theta = gaussian_array(&[*n], seed, 100 + i as u64, draw);
            let (lhs, rhs) = mean_bound_1d(theta.values());
            worst = worst.max(lhs - rhs);
            if lhs > rhs + 1e-9 {
                violations += 1;
                println!("violation: lhs {lhs} > rhs {rhs} at n {n}");
                print!("{}", write_tensor(&theta));
            }
        }
    }
    println!(
        "meanbound: {} trials, {violations} violations (max lhs-rhs {worst:.3e})",
        2 * trials
    );
    violations
}

fn check_refine(trials: u64, seed: u64) -> u64 {
    let mut violations = 0;
    // 1D compositions.
    for trial in 0..trials {
        let n = [8usize, 16, 32, 64][uniform(seed, 0, trial, 0, 3)];
        let mut rects = Vec::new();
        let mut lo = 1usize;
        for b in 1..n {
            if uniform(seed, 1 + b as u64, trial, 0, 3) == 0 {
                rects.push(Rect::interval(lo, b).expect("interval"));
                lo = b + 1;
            }
        }
        rects.push(Rect::interval(lo, n).expect("interval"));
        let p = Partition::new(Rect::full(&[n]), rects, Family::Arbitrary).expect("cover");
        let refined = refine_1d_to_rdp(&p).expect("refines");
        let ok = refined.refines(&p) && (refined.len() as f64) <= refine_1d_bound(p.len(), n);
        if !ok {
            violations += 1;
            println!("violation: 1D refinement bound failed");
            println!(
                "{}",
                write_partition_json(&p, None).expect("serializable partition")
            );
        }
    }
    // 2D guillotine partitions.
    for trial in 0..trials {
        let n = [8usize, 16, 32, 64][uniform(seed, 10, trial, 0, 3)];
        let root = Rect::full(&[n, n]);
        let mut rects = vec![root.clone()];
        let target = 2 + uniform(seed, 11, trial, 0, 6);
        let mut step = 0u64;
        while rects.len() < target && step < 64 {
            step += 1;
            let pick = uniform(seed, 12, trial * 128 + step, 0, rects.len() - 1);
            let rect = rects[pick].clone();
            let axis = uniform(seed, 13, trial * 128 + step, 0, 1);
            if rect.side(axis) < 2 {
                continue;
            }
            let cut = uniform(
                seed,
                14,
                trial * 128 + step,
                rect.lo()[axis],
                rect.hi()[axis] - 1,
            );
            let (a, b) = rect.hierarchical_split(axis, cut).expect("legal cut");
            rects.swap_remove(pick);
            rects.push(a);
            rects.push(b);
        }
        let p = Partition::new(root, rects, Family::Arbitrary).expect("cover");
        let refined = refine_2d_to_rdp(&p).expect("refines");
        let ok = refined.refines(&p) && (refined.len() as f64) <= refine_2d_bound(p.len(), n);
        if !ok {
            violations += 1;
            println!("violation: 2D refinement bound failed");
            println!(
                "{}",
                write_partition_json(&p, None).expect("serializable partition")
            );
        }
    }
    // Sparse supports.
    for trial in 0..trials {
        let d = 1 + (trial % 3) as usize;
        let side = [64usize, 12, 6][d - 1];
        let mut theta = LatticeArray::zeros(vec![side; d]).expect("shape");
        for s in 0..uniform(seed, 20, trial, 0, 6) {
            let point: Vec<usize> = (0..d)
                .map(|a| uniform(seed, 21 + a as u64, trial * 8 + s as u64, 1, side))
                .collect();
            theta.set(&point, 1.0 + s as f64);
        }
        let nnz = theta.values().iter().filter(|v| **v != 0.0).count();
        let p = sparse_to_hierarchical(&theta).expect("builds");
        let cap = if nnz == 0 { 1 } else { 3 * d * nnz };
        let mut constant = true;
        for rect in p.rects() {
            let mut first = None;
            for_each_cell(rect, theta.dims(), |_, lin| {
                let v = theta.values()[lin];
                match first {
                    None => first = Some(v),
                    Some(f) => constant &= f == v,
                }
            });
        }
        if p.len() > cap || !constant {
            violations += 1;
            println!("violation: sparse-support construction failed");
            print!("{}", write_tensor(&theta));
        }
    }
    println!("refine: {} trials, {violations} violations", 3 * trials);
    violations
}
