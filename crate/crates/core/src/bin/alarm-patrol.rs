use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use alarm_patrol::bench::{run_bench, write_csv, AlgoSpec, BenchConfig};
use alarm_patrol::covering::CovSetDoc;
use alarm_patrol::gen::{gen_from_hampath, gen_multisignal, gen_s2lstar, gen_worstcase, parse_adjacency};
use alarm_patrol::placement::best_placement;
use alarm_patrol::srg::{solve_with_menus, Algo, SolveParams};
use alarm_patrol::{Error, Instance};

#[derive(Parser)]
#[command(name = "alarm-patrol", version, about = "Patrolling games with alarm signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the signal-response game from one vertex and print the strategy as JSON.
    Solve(SolveArgs),
    /// Solve from every vertex and report the best placement.
    Placement(PlacementArgs),
    /// Generate an instance file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a benchmark grid and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Dp,
    Bnb,
    ApproxDp,
    ApproxBnb,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Dp => Algo::Dp,
            AlgoArg::Bnb => Algo::Bnb,
            AlgoArg::ApproxDp => Algo::ApproxDp,
            AlgoArg::ApproxBnb => Algo::ApproxBnb,
        }
    }
}

#[derive(Args)]
struct SolverOpts {
    #[arg(long, value_enum, default_value = "dp")]
    algo: AlgoArg,
    /// Backtracking limit for approx-bnb, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Tight/large threshold for branch and bound.
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
    /// Random orders for approx-dp.
    #[arg(long, default_value_t = 10)]
    rand_orders: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the line/cycle solver when the graph is a path or a cycle.
    #[arg(long, conflicts_with = "force_generic")]
    auto_topology: bool,
    /// Always use the generic solvers.
    #[arg(long)]
    force_generic: bool,
}

impl SolverOpts {
    fn params(&self) -> SolveParams {
        SolveParams {
            algo: self.algo.into(),
            rho: self.rho,
            delta: self.delta,
            rand_orders: self.rand_orders,
            seed: self.seed,
            auto_topology: self.auto_topology && !self.force_generic,
            ..SolveParams::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    vertex: usize,
    #[command(flatten)]
    solver: SolverOpts,
    /// Write the exact covering sets (dp only) as JSON.
    #[arg(long)]
    dump_covsets: Option<PathBuf>,
}

#[derive(Args)]
struct PlacementArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverOpts,
    /// Check whether the best placement stays optimal at this missed-detection rate.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Every vertex a target, deadlines |T| - 1, one signal.
    Worstcase {
        #[arg(long)]
        targets: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-level star from comma-separated branch weights.
    S2lstar {
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Worst-case graph with several signals.
    Multisignal {
        #[arg(long)]
        targets: usize,
        #[arg(long)]
        signals: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Hamiltonian-path construction from an adjacency list file.
    Hampath {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "6,8,10")]
    targets_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    eps_list: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    instances_per_cell: usize,
    /// Comma-separated `name[:param]`, e.g. `dp,approx-dp:10,approx-bnb:1.0`.
    #[arg(long, value_delimiter = ',', default_value = "dp,approx-dp:10")]
    algos: Vec<String>,
    /// Per-solve time limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    /// Run one solve at a time for clean timings.
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failure class: bad input exits with 1, solver failures with 2.
enum Failure {
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::LpNumericalFailure(_) | Error::Timeout | Error::Undefined => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Instance::from_path(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let inst = load(&args.instance)?;
    inst.check_vertex(args.vertex)?;
    let (sol, menus) = solve_with_menus(args.vertex, &args.solver.params(), &inst)?;
    if let Some(path) = &args.dump_covsets {
        let sets: Vec<Vec<CovSetDoc>> = match &menus.covsets {
            Some(per_signal) => per_signal
                .iter()
                .map(|sets| sets.iter().map(|c| CovSetDoc::from_result(c, &inst)).collect())
                .collect(),
            None => {
                return Err(Failure::Input("--dump-covsets requires --algo dp".into()));
            }
        };
        let mut w = output(Some(path))?;
        serde_json::to_writer_pretty(&mut w, &sets).map_err(io_err)?;
        writeln!(w).map_err(io_err)?;
    }
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &sol.to_doc(&inst)).map_err(io_err)?;
    writeln!(out).map_err(io_err)?;
    Ok(())
}

fn placement(args: PlacementArgs) -> Result<(), Failure> {
    let inst = load(&args.instance)?;
    let report = best_placement(&inst, &args.solver.params())?;
    let mut out = io::stdout().lock();
    writeln!(out, "vertex,g_v").map_err(io_err)?;
    for (v, g) in report.values.iter().enumerate() {
        writeln!(out, "{v},{g}").map_err(io_err)?;
    }
    let second = report.second.map_or("none".to_string(), |v| v.to_string());
    let alpha = report.alpha_bound.map_or("undefined".to_string(), |a| a.to_string());
    writeln!(out, "# best={} second={second} alpha_bound={alpha}", report.best).map_err(io_err)?;
    if let Some(a) = args.alpha {
        let verdict = if report.placement_justified(a) { "holds" } else { "does not hold" };
        writeln!(out, "# at alpha={a} the placement condition {verdict}").map_err(io_err)?;
    }
    Ok(())
}

fn generate(cmd: GenCommand) -> Result<(), Failure> {
    let (inst, path) = match cmd {
        GenCommand::Worstcase { targets, eps, seed, output } => (gen_worstcase(targets, eps, seed)?, output),
        GenCommand::S2lstar { gamma, output } => (gen_s2lstar(&gamma)?, output),
        GenCommand::Multisignal { targets, signals, eps, seed, output } => {
            (gen_multisignal(targets, signals, eps, seed)?, output)
        }
        GenCommand::Hampath { input, output } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
            let (n, edges) = parse_adjacency(&text)?;
            (gen_from_hampath(n, &edges)?, output)
        }
    };
    let mut w = output(path.as_deref())?;
    w.write_all(inst.to_toml_string().as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let algos = args
        .algos
        .iter()
        .map(|s| s.parse::<AlgoSpec>())
        .collect::<Result<Vec<_>, _>>()?;
    if args.timeout.is_nan() || args.timeout <= 0.0 {
        return Err(Failure::Input("--timeout must be positive".into()));
    }
    let cfg = BenchConfig {
        targets: args.targets_list,
        eps: args.eps_list,
        instances_per_cell: args.instances_per_cell,
        algos,
        timeout: Duration::from_secs_f64(args.timeout),
        serial: args.serial,
        seed_base: args.seed_base,
    };
    let rows = run_bench(&cfg)?;
    write_csv(&rows, output(args.output.as_deref())?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Placement(a) => placement(a),
        Command::Gen(c) => generate(c),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
