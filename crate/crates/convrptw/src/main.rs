//! Benchmark command line for the consistent vehicle routing solver.
//!
//! Subcommands cover the whole experiment loop: `generate` builds multi-day
//! instances from Solomon benchmark files, `solve` runs the construct /
//! eliminate / reoptimize pipeline, `update` carries a solution into the
//! next planning period, `daily` plans one day against a base assignment,
//! `oracle` computes the exact minimum vehicle count, `export-milp` writes
//! the LP model, and `report` aggregates run reports into comparison
//! tables.
//!
//! Exit codes: 0 success, 2 I/O or parse problems (including bad flags),
//! 3 an instance with an unserveable customer, 4 refused resource limits.
//! Every path that writes a solution file verifies feasibility first.

use clap::{Args, Parser, Subcommand};
use convrptw::{
    aggregate, construct, eliminate_routes, eliminate_routes_traced, evaluate_solution,
    exact_min_vehicles, export_milp, generate_convrptw, read_instance, read_report,
    read_solomon, read_solution, render_text, reoptimize, rolling, to_csv, write_report,
    write_solution, ConstructError, ConstructionParams, EliminateError, EliminationParams,
    EliminationStats, GenerateError, GeneratorConfig, Instance, IoError, ModelError,
    OracleError, OracleLimits, ReportError, RollingError, RunReport, SeedRule, Solution,
    SolutionDoc, SolutionMetrics, TraceEvent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const EXIT_IO: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_LIMITS: u8 = 4;

// ---- error to exit-code mapping ----

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

type CliResult = Result<(), CliError>;

macro_rules! wrap_error {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError {
                    code: $code,
                    message: e.to_string(),
                }
            }
        }
    };
}

wrap_error!(IoError, EXIT_IO);
wrap_error!(ModelError, EXIT_IO);
wrap_error!(GenerateError, EXIT_IO);
wrap_error!(EliminateError, EXIT_IO);
wrap_error!(ReportError, EXIT_IO);

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> CliError {
        let code = match e {
            ConstructError::SingletonInfeasible { .. } => EXIT_INFEASIBLE,
            ConstructError::BadParams(_) => EXIT_IO,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RollingError> for CliError {
    fn from(e: RollingError) -> CliError {
        let code = match e {
            RollingError::InfeasibleCustomer { .. } => EXIT_INFEASIBLE,
            _ => EXIT_IO,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> CliError {
        let code = match e {
            OracleError::NoFeasibleRoute { .. } => EXIT_INFEASIBLE,
            OracleError::TooLarge { .. } | OracleError::NodeBudget { .. } => EXIT_LIMITS,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

// ---- argument grammar ----

#[derive(Parser)]
#[command(name = "convrptw", version, about = "Consistent vehicle routing benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a multi-day instance from a Solomon benchmark file.
    Generate(GenerateArgs),
    /// Solve an instance: construct, eliminate routes, reoptimize.
    Solve(SolveArgs),
    /// Carry a previous solution into a new planning period.
    Update(UpdateArgs),
    /// Plan one day while respecting a base driver assignment.
    Daily(DailyArgs),
    /// Exact minimum vehicle count by exhaustive search.
    Oracle(OracleArgs),
    /// Write the mixed-integer model in LP format.
    ExportMilp(ExportArgs),
    /// Aggregate run reports into a comparison table.
    Report(ReportArgs),
}

/// Knobs shared by every solver-driving subcommand.
#[derive(Args)]
struct SolverOpts {
    /// Wall-clock budget for route elimination, in seconds.
    #[arg(long = "ct-max", default_value_t = 60.0)]
    ct_max: f64,
    /// Master RNG seed; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed-customer rule: 1 farthest from depot, 2 earliest window close.
    #[arg(long, default_value_t = 1)]
    ic: u8,
    /// Weight of the saved direct arc in the insertion score.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Reward per unit of depot distance in the cross-day score.
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    /// Weight of the detour term; the push-forward weight is 1 - alpha1.
    #[arg(long, default_value_t = 0.5)]
    alpha1: f64,
    /// Largest ejection subset size.
    #[arg(long = "k-max", default_value_t = 3)]
    k_max: usize,
    /// Print the elimination trace and run counters to stderr.
    #[arg(long)]
    verbose: bool,
}

impl SolverOpts {
    fn construction(&self) -> Result<ConstructionParams, CliError> {
        let seed_rule = SeedRule::from_code(self.ic)
            .ok_or_else(|| CliError::usage(format!("--ic must be 1 or 2, got {}", self.ic)))?;
        Ok(ConstructionParams {
            seed_rule,
            mu: self.mu,
            lambda: self.lambda,
            alpha1: self.alpha1,
            alpha2: 1.0 - self.alpha1,
        })
    }

    fn elimination(&self) -> Result<EliminationParams, CliError> {
        if !(self.ct_max > 0.0 && self.ct_max.is_finite()) {
            return Err(CliError::usage(format!(
                "--ct-max must be a positive number of seconds, got {}",
                self.ct_max
            )));
        }
        Ok(EliminationParams {
            k_max: self.k_max,
            ct_max: Duration::from_secs_f64(self.ct_max),
            rng_seed: self.seed,
            insertion: self.construction()?,
            ..EliminationParams::default()
        })
    }

    fn echo(&self, portfolio: usize) -> String {
        format!(
            "ic={} mu={} lambda={} alpha1={} k_max={} ct_max={}s portfolio={}",
            self.ic, self.mu, self.lambda, self.alpha1, self.k_max, self.ct_max, portfolio
        )
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Solomon benchmark file to draw customers from.
    #[arg(long)]
    solomon: PathBuf,
    /// Output instance file.
    #[arg(long)]
    out: PathBuf,
    /// Customers taken from the head of the Solomon file.
    #[arg(long, default_value_t = 10)]
    customers: usize,
    /// Planning days.
    #[arg(long, default_value_t = 5)]
    days: usize,
    /// Probability a customer is active on a given day.
    #[arg(long, default_value_t = 0.7)]
    activity: f64,
    /// Vehicle capacity as a fraction of the Solomon capacity.
    #[arg(long = "capacity-factor", default_value_t = 0.5)]
    capacity_factor: f64,
    /// RNG seed for activity and demand draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to solve.
    #[arg(long)]
    instance: PathBuf,
    /// Output solution file.
    #[arg(long)]
    out: PathBuf,
    /// Also write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run label used in report tables; defaults to the output file stem.
    #[arg(long)]
    label: Option<String>,
    /// Independent seeded elimination runs; best vehicle count wins, ties
    /// go to the lowest travel time.
    #[arg(long, default_value_t = 1)]
    portfolio: usize,
    #[command(flatten)]
    opts: SolverOpts,
}

#[derive(Args)]
struct UpdateArgs {
    /// New-period instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Previous-period solution file.
    #[arg(long)]
    prev: PathBuf,
    /// Output solution file.
    #[arg(long)]
    out: PathBuf,
    /// Also write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run label used in report tables; defaults to the output file stem.
    #[arg(long)]
    label: Option<String>,
    #[command(flatten)]
    opts: SolverOpts,
}

#[derive(Args)]
struct DailyArgs {
    /// One-day instance for the target day.
    #[arg(long)]
    instance: PathBuf,
    /// Base solution whose driver assignment the day must respect.
    #[arg(long)]
    base: PathBuf,
    /// Output day-plan file.
    #[arg(long)]
    out: PathBuf,
    /// Also write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run label used in report tables; defaults to the output file stem.
    #[arg(long)]
    label: Option<String>,
    #[command(flatten)]
    opts: SolverOpts,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file to search exhaustively.
    #[arg(long)]
    instance: PathBuf,
    /// Write the optimal witness solution here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Assignment attempts before the search refuses.
    #[arg(long = "max-nodes", default_value_t = OracleLimits::default().max_nodes)]
    max_nodes: u64,
}

#[derive(Args)]
struct ExportArgs {
    /// Instance file to export.
    #[arg(long)]
    instance: PathBuf,
    /// Output LP file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Run report files to aggregate.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Run label the improvement columns compare against.
    #[arg(long)]
    baseline: Option<String>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

// ---- entry point ----

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Update(args) => cmd_update(args),
        Command::Daily(args) => cmd_daily(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::ExportMilp(args) => cmd_export_milp(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

// ---- shared helpers ----

fn run_label(label: &Option<String>, out: &Path) -> String {
    label.clone().unwrap_or_else(|| {
        out.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    })
}

/// Verifies feasibility, writes the solution document and returns the
/// metrics.  An infeasible write is a hard bug, not an error path.
fn write_verified(
    instance: &Instance,
    solution: Solution,
    out: &Path,
) -> Result<SolutionMetrics, CliError> {
    let metrics = evaluate_solution(instance, &solution)?;
    assert!(
        metrics.feasible,
        "internal error: refusing to write an infeasible solution"
    );
    let doc = SolutionDoc {
        instance: instance.name().to_string(),
        solution,
    };
    write_solution(&doc, out)?;
    Ok(metrics)
}

fn print_single_run(report: &RunReport) -> Result<(), CliError> {
    let table = aggregate(vec![report.clone()], None)?;
    print!("{}", render_text(&table));
    Ok(())
}

fn print_stats(stats: &EliminationStats) {
    eprintln!(
        "elimination: {} removed in {} attempts ({} aborted), pops {}, \
         stages {}/{}/{}, {:.3}s{}",
        stats.eliminations,
        stats.attempts,
        stats.aborted_attempts,
        stats.pops,
        stats.stage1,
        stats.stage2,
        stats.stage3,
        stats.elapsed.as_secs_f64(),
        if stats.timed_out { ", timed out" } else { "" }
    );
}

// ---- subcommands ----

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let solomon = read_solomon(&args.solomon)?;
    let config = GeneratorConfig {
        customer_count: args.customers,
        day_count: args.days,
        activity_probability: args.activity,
        capacity_factor: args.capacity_factor,
        rng_seed: args.seed,
    };
    let instance = generate_convrptw(&solomon, &config)?;
    convrptw::write_instance(&instance, &args.out)?;
    println!(
        "wrote {} ({} customers, {} days, capacity {})",
        args.out.display(),
        instance.customer_count(),
        instance.day_count(),
        instance.capacity()
    );
    Ok(())
}

/// Runs `portfolio` seeded eliminations and keeps the deterministic best:
/// lowest vehicle count, ties broken by travel time, then member index.
fn eliminate_portfolio(
    instance: &Instance,
    built: &Solution,
    params: &EliminationParams,
    portfolio: usize,
    verbose: bool,
) -> Result<(Solution, EliminationStats), CliError> {
    if portfolio == 0 {
        return Err(CliError::usage("--portfolio must be at least 1"));
    }
    if portfolio == 1 {
        let mut trace = |event: TraceEvent| {
            if verbose {
                eprintln!("trace: {event:?}");
            }
        };
        return Ok(eliminate_routes_traced(instance, built, params, &mut trace)?);
    }
    // member seeds all derive from the master seed on a reserved stream
    let mut seeder = ChaCha8Rng::seed_from_u64(params.rng_seed);
    seeder.set_stream(3);
    let members: Vec<EliminationParams> = (0..portfolio)
        .map(|_| EliminationParams {
            rng_seed: seeder.gen(),
            ..params.clone()
        })
        .collect();
    let results: Vec<Result<(Solution, EliminationStats), EliminateError>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = members
                .iter()
                .map(|p| scope.spawn(move || eliminate_routes(instance, built, p)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("elimination member panicked"))
                .collect()
        });
    let mut best: Option<(usize, convrptw::Time, usize)> = None;
    let mut winner: Option<(Solution, EliminationStats)> = None;
    for (idx, result) in results.into_iter().enumerate() {
        let (solution, stats) = result?;
        let metrics = evaluate_solution(instance, &solution)?;
        let key = (metrics.nv, metrics.travel_time, idx);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
            winner = Some((solution, stats));
        }
        if verbose {
            eprintln!(
                "portfolio member {idx}: nv {} tt {:.3}h",
                metrics.nv,
                metrics.travel_time.hours()
            );
        }
    }
    Ok(winner.expect("portfolio has at least one member"))
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let started = Instant::now();
    let instance = read_instance(&args.instance)?;
    let params = args.opts.elimination()?;
    let built = construct(&instance, &params.insertion)?;
    let (mut solution, stats) = eliminate_portfolio(
        &instance,
        &built,
        &params,
        args.portfolio,
        args.opts.verbose,
    )?;
    reoptimize(&instance, &mut solution);
    let metrics = write_verified(&instance, solution, &args.out)?;
    if args.opts.verbose {
        print_stats(&stats);
    }
    let report = RunReport::from_metrics(
        run_label(&args.label, &args.out),
        instance.name(),
        &metrics,
        None,
        started.elapsed().as_secs_f64(),
        args.opts.seed,
        args.opts.echo(args.portfolio),
    );
    if let Some(path) = &args.report {
        write_report(&report, path)?;
    }
    print_single_run(&report)
}

fn cmd_update(args: UpdateArgs) -> CliResult {
    let started = Instant::now();
    let instance = read_instance(&args.instance)?;
    let prev = read_solution(&args.prev)?;
    let params = args.opts.elimination()?;
    let had_customers = !prev.solution.assignment().is_empty();
    let outcome = rolling::update(&instance, &prev.solution, &params)?;
    if outcome.cold_start && had_customers {
        eprintln!(
            "warning: previous plan shares no customers with {}; solving cold",
            instance.name()
        );
    }
    println!(
        "retained {} (reassigned {}), fresh {}, dropped {}, opened {}",
        outcome.retained, outcome.reassigned, outcome.fresh, outcome.dropped, outcome.opened
    );
    let metrics = write_verified(&instance, outcome.solution, &args.out)?;
    if args.opts.verbose {
        print_stats(&outcome.elimination);
    }
    let report = RunReport::from_metrics(
        run_label(&args.label, &args.out),
        instance.name(),
        &metrics,
        Some(outcome.ic_pct),
        started.elapsed().as_secs_f64(),
        args.opts.seed,
        args.opts.echo(1),
    );
    if let Some(path) = &args.report {
        write_report(&report, path)?;
    }
    print_single_run(&report)
}

fn cmd_daily(args: DailyArgs) -> CliResult {
    let started = Instant::now();
    let instance = read_instance(&args.instance)?;
    if instance.day_count() != 1 {
        return Err(CliError::usage(format!(
            "daily planning needs a one-day instance; {} has {} days",
            instance.name(),
            instance.day_count()
        )));
    }
    let base = read_solution(&args.base)?;
    let params = args.opts.elimination()?;
    let outcome = rolling::daily(&instance, 0, &base.solution, &params)?;
    if outcome.cold_start && !base.solution.assignment().is_empty() {
        eprintln!(
            "warning: base plan shares no customers with {}; solving cold",
            instance.name()
        );
    }
    println!(
        "visits {}, off base {}, pulled {}, fresh {}, opened {}, inconsistency {:.1}%",
        outcome.visits,
        outcome.off_base,
        outcome.pulled,
        outcome.fresh,
        outcome.opened,
        outcome.inconsistency_pct
    );
    // every customer of a one-day instance is active, so the restriction
    // is the identity and the plan applies to the input instance directly
    debug_assert_eq!(outcome.ids, (0..=instance.customer_count()).collect::<Vec<_>>());
    let metrics = write_verified(&instance, outcome.plan, &args.out)?;
    let report = RunReport::from_metrics(
        run_label(&args.label, &args.out),
        instance.name(),
        &metrics,
        Some(outcome.inconsistency_pct),
        started.elapsed().as_secs_f64(),
        args.opts.seed,
        args.opts.echo(1),
    );
    if let Some(path) = &args.report {
        write_report(&report, path)?;
    }
    print_single_run(&report)
}

fn cmd_oracle(args: OracleArgs) -> CliResult {
    let instance = read_instance(&args.instance)?;
    let limits = OracleLimits {
        max_nodes: args.max_nodes,
        ..OracleLimits::default()
    };
    let result = exact_min_vehicles(&instance, &limits)?;
    println!("minimum vehicles: {}", result.min_vehicles);
    println!(
        "explored {} assignments in {:.3}s",
        result.explored_nodes,
        result.elapsed.as_secs_f64()
    );
    if let Some(out) = &args.out {
        write_verified(&instance, result.witness, out)?;
        println!("witness written to {}", out.display());
    }
    Ok(())
}

fn cmd_export_milp(args: ExportArgs) -> CliResult {
    let instance = read_instance(&args.instance)?;
    export_milp(&instance, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CliResult {
    let reports = args
        .files
        .iter()
        .map(|p| read_report(p))
        .collect::<Result<Vec<_>, _>>()?;
    let table = aggregate(reports, args.baseline.as_deref())?;
    print!("{}", render_text(&table));
    if let Some(path) = &args.csv {
        std::fs::write(path, to_csv(&table)).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        })?;
    }
    Ok(())
}
