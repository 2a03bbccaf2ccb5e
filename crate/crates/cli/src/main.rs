use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mets::eval::check_feasibility;
use mets::io::{
    bks_table, generate_instance, oracle_solve, parse_instance, parse_solution, write_instance, write_report,
    write_solution, Profile, RunRecord,
};
use mets::solver::{run_with_sink, TraceRecord};
use mets::{evaluate, EvalMode, Error, Instance, PenaltyWeights, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "mets", version, about = "Memetic solver for vehicle routing with capacitated refuelling stations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        no_improve: Option<usize>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Per-iteration CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every instance file of a directory with several seeds.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        /// First seed; run `k` uses `seeds + k`.
        #[arg(long, default_value_t = 0)]
        seeds: u64,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        no_improve: Option<usize>,
        /// Per-run CSV. A per-instance summary goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact optimum of a tiny instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Write a generated instance.
    Gen {
        /// s_central, m_central, beijing or tiny.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a solution file and report feasibility and distance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

/// Exit code 1: the instance or run has no feasible answer.
/// Exit code 2: bad input.
enum Failure {
    Infeasible(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleInstance(_) | Error::NoFeasibleSolution { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    let mut inst = parse_instance(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if inst.name().is_empty() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        inst = inst.renamed(stem);
    }
    Ok(inst)
}

fn config(seed: u64, max_iter: Option<usize>, no_improve: Option<usize>, time_limit: Option<f64>) -> SolverConfig {
    let mut cfg = SolverConfig::with_seed(seed);
    if let Some(v) = max_iter {
        cfg.max_iterations = v;
    }
    if let Some(v) = no_improve {
        cfg.max_no_improvement = v;
    }
    cfg.time_limit = time_limit;
    cfg
}

const TRACE_HEADER: &str =
    "iteration,best_td,feasible_size,infeasible_size,w_overtime,w_mileage,w_capacity,rate_overtime,rate_mileage,rate_capacity";

fn trace_line(t: &TraceRecord) -> String {
    let best = t.best_distance.map(|d| d.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        t.iteration,
        best,
        t.feasible_size,
        t.infeasible_size,
        t.weights.overtime,
        t.weights.mileage,
        t.weights.capacity,
        t.rates[0],
        t.rates[1],
        t.rates[2]
    )
}

fn solve(
    instance: &Path,
    cfg: SolverConfig,
    trace: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let mut trace_text = trace.map(|_| format!("{TRACE_HEADER}\n"));
    let result = run_with_sink(&inst, &cfg, |t| {
        if let Some(text) = trace_text.as_mut() {
            text.push_str(&trace_line(t));
            text.push('\n');
        }
    });
    if let (Some(path), Some(text)) = (trace, &trace_text) {
        write(path, text)?;
    }
    match result {
        Ok(res) => {
            println!("instance: {}", inst.name());
            println!("best_td: {}", res.best_distance);
            println!("routes: {}", res.best.routes.len());
            println!("iterations: {}", res.iterations);
            println!("time_to_best_s: {:.3}", res.time_to_best);
            println!("total_time_s: {:.3}", res.total_time);
            if let Some(path) = out {
                write(path, &write_solution(&res.best))?;
            } else {
                print!("{}", write_solution(&res.best));
            }
            Ok(())
        }
        Err(Error::NoFeasibleSolution { least_violating }) => {
            if let (Some(path), Some(sol)) = (out, least_violating) {
                write(path, &write_solution(&sol))?;
            }
            Err(Failure::Infeasible("no feasible solution was found".into()))
        }
        Err(e) => Err(e.into()),
    }
}

fn bench(
    dir: &Path,
    runs: u64,
    base: u64,
    max_iter: Option<usize>,
    no_improve: Option<usize>,
    time_limit: Option<f64>,
    out: &Path,
) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let instances = files.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>, _>>()?;
    if instances.is_empty() {
        return Err(Failure::Input(format!("no instance files in {}", dir.display())));
    }
    let jobs: Vec<(usize, u64)> = (0..instances.len()).flat_map(|i| (0..runs).map(move |k| (i, base + k))).collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let inst = &instances[i];
            let cfg = config(seed, max_iter, no_improve, time_limit);
            let res = mets::run(inst, &cfg);
            match res {
                Ok(r) => RunRecord {
                    instance: inst.name().to_string(),
                    seed,
                    best_distance: Some(r.best_distance),
                    time_to_best: r.time_to_best,
                    total_time: r.total_time,
                    iterations: r.iterations,
                },
                Err(_) => RunRecord {
                    instance: inst.name().to_string(),
                    seed,
                    best_distance: None,
                    time_to_best: 0.0,
                    total_time: 0.0,
                    iterations: 0,
                },
            }
        })
        .collect();
    let report = write_report(&records, &bks_table());
    write(out, &report.runs)?;
    let summary_path = out.with_extension("summary.csv");
    write(&summary_path, &report.summary)?;
    print!("{}", report.summary);
    Ok(())
}

fn oracle(instance: &Path) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let res = oracle_solve(&inst)?;
    println!("best_td: {}", res.distance);
    print!("{}", write_solution(&res.solution));
    Ok(())
}

fn generate(profile: &str, n: Option<usize>, seed: u64, out: &Path) -> Result<(), Failure> {
    let profile = Profile::from_name(profile, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = generate_instance(profile, &mut rng)?;
    write(out, &write_instance(&inst))
}

fn validate(instance: &Path, solution: &Path) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let text = read(solution)?;
    let sol = parse_solution(&text, &inst).map_err(|e| Failure::Input(format!("{}: {e}", solution.display())))?;
    let report = evaluate(&sol, &inst, &PenaltyWeights::default(), EvalMode::Scheduled);
    let verdict = check_feasibility(&sol, &report, &inst)?;
    println!("td: {}", report.total_distance);
    println!("vehicles: {}", report.vehicles_used);
    println!("duration_ok: {}", verdict.duration);
    println!("energy_ok: {}", verdict.energy);
    println!("fleet_ok: {}", verdict.fleet);
    println!("capacity_ok: {}", verdict.capacity);
    println!("feasible: {}", verdict.feasible());
    if verdict.feasible() {
        Ok(())
    } else {
        Err(Failure::Infeasible("solution is infeasible".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { instance, seed, max_iter, no_improve, time_limit, trace, out } => {
            solve(&instance, config(seed, max_iter, no_improve, time_limit), trace.as_deref(), out.as_deref())
        }
        Command::Bench { dir, runs, seeds, time_limit, max_iter, no_improve, out } => {
            bench(&dir, runs, seeds, max_iter, no_improve, time_limit, &out)
        }
        Command::Oracle { instance } => oracle(&instance),
        Command::Gen { profile, n, seed, out } => generate(&profile, n, seed, &out),
        Command::Validate { instance, solution } => validate(&instance, &solution),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
