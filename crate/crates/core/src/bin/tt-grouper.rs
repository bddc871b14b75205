use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tt_grouper::bench::{
    comparison_table, load_manifest, read_runs_csv, run_method, run_suite, sweep, write_runs_csv,
    write_sweep_csv, write_table_csv, write_timings_csv, Method, SuiteConfig,
};
use tt_grouper::bounds::compute_bounds;
use tt_grouper::exact::SolveLimits;
use tt_grouper::instance::{
    generate_instance, micro_instance, parse_instance, serialize_instance, validate,
    GeneratorParams, MicroParams, Severity,
};
use tt_grouper::milp::{export_lp, export_warnings, model_statistics, LpOptions};
use tt_grouper::par::{with_workers, Execution};
use tt_grouper::render::{render_gantt, ColorBy, RenderKind, RenderSpec};
use tt_grouper::schedule::{evaluate, expand_start_times, parse_solution, serialize_solution};
use tt_grouper::{Error, Instance, Time};

#[derive(Parser)]
#[command(
    name = "tt-grouper",
    version,
    about = "Group periodic signals into messages and schedule them"
)]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, env = "TT_GROUPER_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Check an instance file.
    Validate { instance: PathBuf },
    /// Solve an instance and print the solution.
    Solve(SolveArgs),
    /// Evaluate a solution file.
    Evaluate {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Solve both bound models.
    Bounds {
        instance: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Write the MILP model as LP text.
    ExportLp(ExportArgs),
    /// Draw the stacked-interval schedule of a solution.
    Render(RenderArgs),
    /// Compare methods over instance suites.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    tasks: usize,
    #[arg(long = "periods", default_value_t = 4)]
    period_count: usize,
    #[arg(long, default_value_t = 4000)]
    base_period: Time,
    /// Allowed ratios between consecutive periods.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    multipliers: Vec<Time>,
    #[arg(long, default_value_t = 10)]
    proc_min: Time,
    #[arg(long, default_value_t = 200)]
    proc_max: Time,
    #[arg(long, default_value_t = 90)]
    hs: Time,
    #[arg(long, default_value_t = 600)]
    smax: Time,
    /// Relative weight of each period when assigning tasks.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Small instance within reach of the exhaustive oracle (other size
    /// options are ignored).
    #[arg(long)]
    micro: bool,
    /// Micro instances: maximum group size large enough to never bind.
    #[arg(long, requires = "micro")]
    huge_smax: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct LimitArgs {
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Search node budget.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Stop once a solution with at most this Cmax is found.
    #[arg(long)]
    target: Option<Time>,
    /// Parallel tree search; the value is reproducible, the solution may not be.
    #[arg(long)]
    parallel: bool,
}

impl LimitArgs {
    fn limits(&self) -> SolveLimits {
        SolveLimits {
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            node_limit: self.node_limit,
            target: self.target,
            execution: if self.parallel {
                Execution::Parallel
            } else {
                Execution::Sequential
            },
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "exact")]
    method: Method,
    /// Tie-break seed for local search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Lp,
}

#[derive(Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "lp")]
    format: ExportFormat,
    /// Use |T_u| and T_0 as big-M coefficients.
    #[arg(long)]
    literal_bigm: bool,
    /// Print variable and constraint counts to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Svg,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorArg {
    Period,
    Group,
}

#[derive(Args)]
struct RenderArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "svg")]
    kind: KindArg,
    #[arg(long, default_value_t = 4.0)]
    px_per_unit: f64,
    #[arg(long, default_value_t = 24.0)]
    row_height: f64,
    #[arg(long, value_enum, default_value = "period")]
    color_by: ColorArg,
    #[arg(long)]
    no_headers: bool,
    /// Time units per character (text output).
    #[arg(long, default_value_t = 1)]
    quantum: Time,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run methods over a manifest of `<path> <seed>` lines.
    Suite {
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "greedy,local,exact")]
        methods: Vec<Method>,
        #[command(flatten)]
        limits: LimitArgs,
        /// Directory for runs.csv, timings.csv and table.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Run the instance x method jobs one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Method value and both bounds over an hs x Smax grid.
    Sweep {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        hs: Vec<Time>,
        #[arg(long, value_delimiter = ',', required = true)]
        smax: Vec<Time>,
        #[arg(long, default_value = "exact")]
        method: Method,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Comparison table from a runs CSV, e.g. with imported external results.
    Table {
        runs: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Exit code 1: the input itself is at fault. Exit code 2: the invocation is.
enum Failure {
    Input(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Render(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_valid_instance(path: &Path) -> Result<Instance, Failure> {
    let instance = load_instance(path)?;
    let report = validate(&instance);
    if !report.ok {
        return Err(Failure::Input(format!("{}: {report}", path.display())));
    }
    Ok(instance)
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn csv_to(
    output: Option<&Path>,
    write: impl FnOnce(&mut Vec<u8>) -> tt_grouper::Result<()>,
) -> Outcome {
    let mut buf = Vec::new();
    write(&mut buf)?;
    emit(
        output,
        &String::from_utf8(buf).expect("csv output is UTF-8"),
    )
}

fn generate(args: &GenerateArgs) -> Outcome {
    let instance = if args.micro {
        micro_instance(
            &MicroParams {
                huge_smax: args.huge_smax,
                ..MicroParams::default()
            },
            args.seed,
        )
    } else {
        let params = GeneratorParams {
            tasks: args.tasks,
            period_count: args.period_count,
            base_period: args.base_period,
            multiplier_choices: args.multipliers.clone(),
            proc_min: args.proc_min,
            proc_max: args.proc_max,
            header_size: args.hs,
            max_group_size: args.smax,
            period_weights: args.weights.clone(),
        };
        generate_instance(&params, args.seed).map_err(|e| Failure::Usage(e.to_string()))?
    };
    emit(args.output.as_deref(), &serialize_instance(&instance))
}

fn validate_cmd(path: &Path) -> Outcome {
    let instance = load_instance(path)?;
    let report = validate(&instance);
    for v in &report.violations {
        let level = match v.code.severity() {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        eprintln!("{level}: {}: {}", v.code, v.message);
    }
    if !report.ok {
        return Err(Failure::Input(format!(
            "{}: invalid instance",
            path.display()
        )));
    }
    println!(
        "ok {} tasks {} periods",
        instance.tasks.len(),
        instance.periods.len()
    );
    Ok(())
}

fn solve(args: &SolveArgs) -> Outcome {
    let instance = load_valid_instance(&args.instance)?;
    let outcome = run_method(&instance, args.method, &args.limits.limits(), args.seed)?;
    eprintln!("method {} optimal {}", args.method, outcome.optimal);
    if args.method == Method::Lb {
        eprintln!("note: the lb solution ignores the maximum group size");
    }
    let text = serialize_solution(&instance, &outcome.solution, Some(outcome.cmax));
    emit(args.output.as_deref(), &text)
}

fn evaluate_cmd(instance: &Path, solution: &Path) -> Outcome {
    let instance = load_valid_instance(instance)?;
    let (sol, advisory) = parse_solution(&read(solution)?, &instance)?;
    let eval = evaluate(&instance, &sol)?;
    if advisory.is_some_and(|c| c != eval.cmax) {
        eprintln!(
            "warning: file states cmax {} but evaluates to {}",
            advisory.unwrap_or(0),
            eval.cmax
        );
    }
    let rows: Vec<String> = eval.row_totals.iter().map(Time::to_string).collect();
    println!("cmax {}", eval.cmax);
    println!("feasible {}", eval.feasible);
    println!("margin {}", eval.margin);
    println!("rows {}", rows.join(" "));
    Ok(())
}

fn bounds_cmd(path: &Path, limits: &LimitArgs) -> Outcome {
    let instance = load_valid_instance(path)?;
    let report = compute_bounds(&instance, &limits.limits())?;
    println!("analytic_lower {}", report.analytic_lower);
    println!("lower {} optimal {}", report.lower, report.lower_optimal);
    println!("upper {} optimal {}", report.upper, report.upper_optimal);
    Ok(())
}

fn export(args: &ExportArgs) -> Outcome {
    let ExportFormat::Lp = args.format;
    let instance = load_valid_instance(&args.instance)?;
    let options = LpOptions {
        literal_bigm: args.literal_bigm,
    };
    for w in export_warnings(&instance, &options) {
        eprintln!("warning: {w}");
    }
    if args.stats {
        let s = model_statistics(&instance, &options)?;
        let c = &s.counts;
        eprintln!(
            "variables {} (x {} z {} s {} y {} c {} p {} Cmax {}) constraints {}",
            c.variables(),
            c.x,
            c.z,
            c.s,
            c.y,
            c.c,
            c.p,
            c.cmax,
            c.constraints()
        );
    }
    emit(args.output.as_deref(), &export_lp(&instance, &options)?)
}

fn render(args: &RenderArgs) -> Outcome {
    let instance = load_valid_instance(&args.instance)?;
    let (solution, _) = parse_solution(&read(&args.solution)?, &instance)?;
    let timeline = expand_start_times(&instance, &solution)?;
    let spec = RenderSpec {
        kind: match args.kind {
            KindArg::Svg => RenderKind::Svg,
            KindArg::Text => RenderKind::Text,
        },
        px_per_unit: args.px_per_unit,
        row_height: args.row_height,
        color_by: match args.color_by {
            ColorArg::Period => ColorBy::Period,
            ColorArg::Group => ColorBy::Group,
        },
        show_headers: !args.no_headers,
        quantum: args.quantum,
    };
    emit(
        args.output.as_deref(),
        &render_gantt(&timeline, &instance, &spec)?,
    )
}

fn bench(cmd: &BenchCommand, workers: Option<usize>) -> Outcome {
    match cmd {
        BenchCommand::Suite {
            manifest,
            methods,
            limits,
            out_dir,
            sequential,
        } => {
            let entries = load_manifest(manifest).map_err(|e| match e {
                Error::Io(io) => Failure::Usage(format!("{}: {io}", manifest.display())),
                other => Failure::Input(other.to_string()),
            })?;
            let config = SuiteConfig {
                methods: methods.clone(),
                limits: limits.limits(),
                execution: if *sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                workers,
            };
            let records = run_suite(&entries, &config);
            fs::create_dir_all(out_dir)?;
            let table = comparison_table(&records);
            for id in &table.skipped {
                eprintln!("note: every method failed on {id}");
            }
            csv_to(Some(&out_dir.join("runs.csv")), |w| {
                write_runs_csv(w, &records)
            })?;
            csv_to(Some(&out_dir.join("timings.csv")), |w| {
                write_timings_csv(w, &records)
            })?;
            csv_to(Some(&out_dir.join("table.csv")), |w| {
                write_table_csv(w, &table)
            })?;
            for row in &table.rows {
                eprintln!(
                    "{:<8} successes {:>4}/{:<4} mean_bg {:>7} median_bg {:>7} mean_rank {:>5}",
                    row.method,
                    row.successes,
                    row.instances,
                    row.mean_bg.map_or("-".into(), |v| format!("{v:.2}")),
                    row.median_bg.map_or("-".into(), |v| format!("{v:.2}")),
                    row.mean_rank.map_or("-".into(), |v| format!("{v:.2}")),
                );
            }
            Ok(())
        }
        BenchCommand::Sweep {
            instance,
            hs,
            smax,
            method,
            limits,
            output,
        } => {
            let instance = load_instance(instance)?;
            let cells = sweep(
                &instance,
                hs,
                smax,
                *method,
                &limits.limits(),
                Execution::Parallel,
            );
            csv_to(output.as_deref(), |w| write_sweep_csv(w, &cells))
        }
        BenchCommand::Table { runs, output } => {
            let file = fs::File::open(runs)
                .map_err(|e| Failure::Usage(format!("{}: {e}", runs.display())))?;
            let records = read_runs_csv(file)?;
            let table = comparison_table(&records);
            for id in &table.skipped {
                eprintln!("note: every method failed on {id}");
            }
            csv_to(output.as_deref(), |w| write_table_csv(w, &table))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Generate(args) => generate(args),
        Command::Validate { instance } => validate_cmd(instance),
        Command::Solve(args) => solve(args),
        Command::Evaluate { instance, solution } => evaluate_cmd(instance, solution),
        Command::Bounds { instance, limits } => bounds_cmd(instance, limits),
        Command::ExportLp(args) => export(args),
        Command::Render(args) => render(args),
        Command::Bench(cmd) => bench(cmd, cli.workers),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_workers(cli.workers, || run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
