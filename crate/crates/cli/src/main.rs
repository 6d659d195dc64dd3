//! `pathip` command-line front end.

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pathip_core::bench::{parse_heuristic, parse_suite, run_suite, write_csv};
use pathip_core::generate::{generate_instance, GeneratorSpec};
use pathip_core::io::{load_instance, load_solution, save_instance, save_solution};
use pathip_core::mmcr::{solve_mmcr, MmcrConfig};
use pathip_core::model::parse_lp;
use pathip_core::mpp::{solve_mpp, underestimate_t, MppConfig};
use pathip_core::oracle::{mmcr_oracle_set, mpp_oracle, rcp_oracle};
use pathip_core::rcp::{choose_horizon, solve_rcp, RcpConfig};
use pathip_core::solver::{
    solve_with_backend, write_solution_file, BackendChoice, SolveConfig, SolveStatus,
};
use pathip_core::validate::{validate_mmcr_solution, validate_mpp_solution, validate_rcp_solution};
use pathip_core::{MppInstance, ProblemInstance};

const EXIT_ERROR: u8 = 1;
const EXIT_FEASIBLE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "pathip",
    version,
    about = "Integer-programming planners for robot path problems"
)]
struct Cli {
    /// Seed for instance generation and region construction.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// `embedded` or `external:<command>`.
    #[arg(long, global = true, default_value = "embedded")]
    backend: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print the solution document.
    Solve(SolveArgs),
    /// Check a solution document against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Brute-force optimum of a small instance.
    Oracle {
        #[arg(long)]
        problem: Option<Problem>,
        #[arg(long)]
        instance: PathBuf,
        /// Horizon cap (MPP) or move cap (QCOP/OTP).
        #[arg(long = "max-T")]
        max_t: Option<usize>,
    },
    /// Generate a random grid instance.
    Gen(GenArgs),
    /// Run a benchmark suite and write CSV.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an LP-format model; writes `status`, `objective` and values.
    /// Accepts the same arguments as an external backend command.
    Lpsolve {
        model: PathBuf,
        solution: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Problem {
    Mpp,
    Mmcr,
    Qcop,
    Otp,
}

impl Problem {
    fn name(self) -> &'static str {
        match self {
            Problem::Mpp => "mpp",
            Problem::Mmcr => "mmcr",
            Problem::Qcop => "qcop",
            Problem::Otp => "otp",
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    problem: Option<Problem>,
    #[arg(long)]
    instance: PathBuf,
    /// Robots that must reach their goals (MPP).
    #[arg(long)]
    k: Option<usize>,
    /// `tube=H` or `sphere=H` (MPP).
    #[arg(long)]
    heuristic: Option<String>,
    /// Do not retry an infeasible pruned horizon without pruning (MPP).
    #[arg(long)]
    no_fallback: bool,
    #[arg(long = "max-T")]
    max_t: Option<usize>,
    /// Overrides the instance budget (QCOP/OTP).
    #[arg(long)]
    budget: Option<f64>,
    /// Number of moves (QCOP/OTP); derived from the budget when absent.
    #[arg(long)]
    horizon: Option<usize>,
    /// Write the solution here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    problem: Problem,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Fraction of removed cells (MPP).
    #[arg(long, default_value_t = 0.1)]
    removal: f64,
    /// Robot count (MPP, MMCR).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    obstacles: usize,
    #[arg(long, default_value_t = 4)]
    max_side: usize,
    #[arg(long, default_value_t = 10.0)]
    budget: f64,
    /// Start vertex count (QCOP/OTP).
    #[arg(long, default_value_t = 1)]
    starts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &FsPath) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(text: &str, out: Option<&FsPath>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &FsPath, problem: Option<Problem>) -> Result<ProblemInstance> {
    let inst = load_instance(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if let Some(p) = problem {
        if p.name() != inst.problem_name() {
            bail!(
                "--problem {} does not match the instance problem `{}`",
                p.name(),
                inst.problem_name()
            );
        }
    }
    Ok(inst)
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Feasible => EXIT_FEASIBLE,
        SolveStatus::Infeasible | SolveStatus::Unbounded => EXIT_INFEASIBLE,
        SolveStatus::TimeoutNoIncumbent => EXIT_TIMEOUT,
    }
}

fn solve_cmd(args: &SolveArgs, solver: SolveConfig, seed: u64) -> Result<u8> {
    let inst = load(&args.instance, args.problem)?;
    let sol = match inst {
        ProblemInstance::Mpp(mut m) => {
            if let Some(k) = args.k {
                m = MppInstance::new(m.graph, m.starts, m.goals, k, m.groups)?;
            }
            let mut config = MppConfig {
                fallback_to_exact: !args.no_fallback,
                max_t: args.max_t,
                ..MppConfig::default()
            };
            config.solver = SolveConfig {
                node_order: config.solver.node_order,
                ..solver
            };
            if let Some(h) = &args.heuristic {
                config.heuristic = parse_heuristic(h)?;
            }
            solve_mpp(&m, &config)?
        }
        ProblemInstance::Mmcr(m) => solve_mmcr(&m, &MmcrConfig { seed, solver })?,
        ProblemInstance::Rcp(mut r) => {
            if let Some(b) = args.budget {
                r.budget = b;
                r.validate()?;
            }
            let config = RcpConfig {
                horizon: args.horizon,
                solver,
                ..RcpConfig::default()
            };
            solve_rcp(&r, &config)?
        }
    };
    eprintln!(
        "status {} objective {} ({} variables, {} constraints, {:.3}s)",
        sol.status.as_str(),
        sol.objective.map_or("-".to_string(), |o| o.to_string()),
        sol.stats.variable_count,
        sol.stats.constraint_count,
        sol.stats.wall_time
    );
    emit(&save_solution(&sol), args.out.as_deref())?;
    Ok(status_code(sol.status))
}

fn verify_cmd(instance: &FsPath, solution: &FsPath) -> Result<u8> {
    let inst = load(instance, None)?;
    let sol =
        load_solution(&read(solution)?).with_context(|| format!("in {}", solution.display()))?;
    let verdict = match &inst {
        ProblemInstance::Mpp(m) => validate_mpp_solution(m, &sol),
        ProblemInstance::Mmcr(m) => validate_mmcr_solution(m, &sol),
        ProblemInstance::Rcp(r) => validate_rcp_solution(r, &sol),
    };
    if verdict.is_ok() {
        println!("valid");
        return Ok(0);
    }
    for v in &verdict.violations {
        println!("invalid: {v}");
    }
    Ok(EXIT_INFEASIBLE)
}

fn oracle_cmd(problem: Option<Problem>, instance: &FsPath, max_t: Option<usize>) -> Result<u8> {
    match load(instance, problem)? {
        ProblemInstance::Mpp(m) => {
            let cap = match max_t {
                Some(t) => t,
                None => underestimate_t(&m)? + 2 * m.graph.vertex_count(),
            };
            match mpp_oracle(&m, cap)? {
                Some(t) => println!("makespan {t}"),
                None => {
                    println!("none");
                    return Ok(EXIT_INFEASIBLE);
                }
            }
        }
        ProblemInstance::Mmcr(m) => {
            let set = mmcr_oracle_set(&m)?;
            println!("removed {} {:?}", set.len(), set);
        }
        ProblemInstance::Rcp(r) => {
            let cap = match max_t {
                Some(t) => t,
                None => choose_horizon(&r)?,
            };
            match rcp_oracle(&r, cap)? {
                Some(best) => println!("reward {} walk {:?}", best.reward, best.walk.vertices),
                None => {
                    println!("none");
                    return Ok(EXIT_INFEASIBLE);
                }
            }
        }
    }
    Ok(0)
}

fn gen_cmd(args: &GenArgs, seed: u64) -> Result<u8> {
    let spec = match args.problem {
        Problem::Mpp => GeneratorSpec::Mpp {
            rows: args.rows,
            cols: args.cols,
            removal: args.removal,
            n: args.n,
            k: args.k,
        },
        Problem::Mmcr => GeneratorSpec::Mmcr {
            rows: args.rows,
            cols: args.cols,
            n: args.n,
            obstacles: args.obstacles,
            max_side: args.max_side,
        },
        Problem::Qcop => GeneratorSpec::Qcop {
            rows: args.rows,
            cols: args.cols,
            budget: args.budget,
            starts: args.starts,
        },
        Problem::Otp => GeneratorSpec::Otp {
            rows: args.rows,
            cols: args.cols,
            budget: args.budget,
            starts: args.starts,
        },
    };
    let inst = generate_instance(&spec, seed)?;
    emit(&save_instance(&inst), args.out.as_deref())?;
    Ok(0)
}

fn bench_cmd(suite: &FsPath, out: Option<&FsPath>, solver: &SolveConfig) -> Result<u8> {
    let suite = parse_suite(&read(suite)?).with_context(|| format!("in {}", suite.display()))?;
    let rows = run_suite(&suite, solver);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(&String::from_utf8(buf)?, out)?;
    Ok(0)
}

fn lpsolve_cmd(model: &FsPath, solution: Option<&FsPath>, solver: &SolveConfig) -> Result<u8> {
    let m = parse_lp(&read(model)?).with_context(|| format!("in {}", model.display()))?;
    let outcome = solve_with_backend(&m, solver)?;
    emit(&write_solution_file(&m, &outcome), solution)?;
    Ok(status_code(outcome.status))
}

fn run(cli: Cli) -> Result<u8> {
    let mut solver = SolveConfig {
        seed: cli.seed,
        backend: BackendChoice::parse(&cli.backend)?,
        ..SolveConfig::default()
    };
    if let Some(t) = cli.time_limit {
        solver.time_limit = t;
    }
    solver.validate()?;
    match &cli.command {
        Command::Solve(args) => solve_cmd(args, solver, cli.seed),
        Command::Verify { instance, solution } => verify_cmd(instance, solution),
        Command::Oracle {
            problem,
            instance,
            max_t,
        } => oracle_cmd(*problem, instance, *max_t),
        Command::Gen(args) => gen_cmd(args, cli.seed),
        Command::Bench { suite, out } => bench_cmd(suite, out.as_deref(), &solver),
        Command::Lpsolve { model, solution } => lpsolve_cmd(model, solution.as_deref(), &solver),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
