//! `hawkes`: simulate, fit, test, forecast and benchmark Hawkes processes.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 unstable model, 4 numerical failure.

mod config;
mod forecast;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hawkes_hazards::benchmark::{default_grid, run_bench, BenchOptions, BenchScenario, DEFAULT_REPS};
use hawkes_hazards::inference::{fit_mle, time_rescale_test, FitResult, KernelFamily};
use hawkes_hazards::io::{read_events_file, read_json_file, write_events, write_json_file, write_qq_file};
use hawkes_hazards::sim::{thinning_simulate, BoundPolicy, ThinningConfig};
use hawkes_hazards::{Error, EventSequence, HawkesModel, Method};
use serde::Serialize;

use crate::config::{pick, Config};

#[derive(Parser)]
#[command(name = "hawkes", version, about = "Competing-hazards Hawkes process toolkit")]
struct Cli {
    /// TOML file with default flag values (flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path and write it as `time,parent` CSV plus a `.meta.json` sidecar.
    Simulate(SimulateArgs),
    /// Maximum-likelihood fit of one kernel family to an event CSV.
    Fit(FitArgs),
    /// Time-rescaling goodness-of-fit test of a model against an event CSV.
    Gof(GofArgs),
    /// Simulate future paths conditional on an observed history.
    Forecast(ForecastArgs),
    /// Run the simulator benchmark grid.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Model JSON, e.g. {"eta": 2.0, "kernel": {"family": "omori", "k": 0.1, "c": 0.1, "p": 0.5}}.
    model: PathBuf,
    /// End of the window [0, horizon] [default: 100].
    #[arg(long)]
    horizon: Option<f64>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// RNG stream under the seed [default: 0].
    #[arg(long)]
    stream: Option<u64>,
    /// Simulation method [default: hazards].
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Bound on the kernel hazard, required by thinning when it increases.
    #[arg(long)]
    bound: Option<f64>,
    /// Output CSV; stdout when absent (no sidecar is written then).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Start of the observation window [default: 0].
    #[arg(long)]
    start: Option<f64>,
    /// End of the observation window [default: time of the last event].
    #[arg(long)]
    end: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Event CSV with a `time` column.
    data: PathBuf,
    /// Kernel family [default: omori].
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Bin width of the piecewise-constant family.
    #[arg(long, required_if_eq("family", "piecewise-constant"))]
    delta: Option<f64>,
    /// Number of bins of the piecewise-constant family.
    #[arg(long, required_if_eq("family", "piecewise-constant"))]
    bins: Option<usize>,
    #[command(flatten)]
    window: WindowArgs,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    data: PathBuf,
    /// Model JSON, or the JSON written by `fit`.
    model: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Write `theoretical,empirical` QQ pairs here.
    #[arg(long)]
    qq_out: Option<PathBuf>,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForecastArgs {
    /// Observed history as event CSV.
    data: PathBuf,
    /// Model JSON, or the JSON written by `fit`.
    model: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Length of the forecast window after the history [default: 24].
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of simulated paths [default: 10000].
    #[arg(long)]
    paths: Option<usize>,
    /// Bins of the background-fraction histogram [default: 20].
    #[arg(long)]
    bins: Option<usize>,
    /// Master seed; path i uses stream i [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Replications per cell [default: 200].
    #[arg(long)]
    reps: Option<usize>,
    /// Run replications on all cores (timings then include contention).
    #[arg(long)]
    parallel: bool,
    /// JSON report; the table always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Hazards,
    Thinning,
    Cluster,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Hazards => Method::Hazards,
            MethodArg::Thinning => Method::Thinning,
            MethodArg::Cluster => Method::Cluster,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Exponential,
    Omori,
    CensoredExponential,
    PiecewiseConstant,
    GevMin,
}

/// Reads a bare model, or the `model` member of a fit result.
fn load_model(path: &Path) -> Result<HawkesModel> {
    let mut value: serde_json::Value =
        read_json_file(path).with_context(|| format!("reading model {}", path.display()))?;
    if let Some(inner) = value.get_mut("model") {
        value = inner.take();
    }
    let model = serde_json::from_value(value)
        .map_err(Error::from)
        .with_context(|| format!("invalid model in {}", path.display()))?;
    Ok(model)
}

fn load_events(path: &Path, window: &WindowArgs, config: &Config) -> Result<EventSequence> {
    let table = read_events_file(path).with_context(|| format!("reading events {}", path.display()))?;
    if table.times.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no events", path.display())).into());
    }
    let start = pick(window.start, config.start, 0.0);
    let seq = match window.end.or(config.end) {
        Some(end) => table.into_sequence(start, end)?,
        None => table.into_sequence_from(start)?,
    };
    Ok(seq)
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(path) => write_json_file(path, value).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, value)?;
            writeln!(stdout)?;
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs, config: &Config) -> Result<()> {
    let model = load_model(&args.model)?;
    model.check_stable()?;
    let horizon = pick(args.horizon, config.horizon, 100.0);
    let seed = pick(args.seed, config.seed, 0);
    let stream = pick(args.stream, config.stream, 0);
    let method = pick(args.method.map(Method::from), config.method, Method::Hazards);
    let result = match (method, args.bound) {
        (Method::Thinning, Some(bound)) => thinning_simulate(
            &ThinningConfig::new(model.clone(), horizon, seed)
                .with_stream(stream)
                .with_bound(BoundPolicy::UserSuppliedBound(bound)),
        )?,
        (_, Some(_)) => bail!(Error::InvalidParameter {
            name: "bound",
            reason: "only used by the thinning method".into(),
        }),
        (method, None) => hawkes_hazards::benchmark::simulate_with(method, &model, horizon, seed, stream)?,
    };
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_events(BufWriter::new(file), &result.seq)?;
            let meta = result.metadata(method, &model, seed, stream);
            write_json_file(path.with_extension("meta.json"), &meta)?;
        }
        None => write_events(io::stdout().lock(), &result.seq)?,
    }
    Ok(())
}

fn family(args: &FitArgs, config: &Config) -> Result<KernelFamily> {
    let Some(flag) = args.family else {
        return Ok(config.family.clone().unwrap_or(KernelFamily::Omori));
    };
    Ok(match flag {
        FamilyArg::Exponential => KernelFamily::Exponential,
        FamilyArg::Omori => KernelFamily::Omori,
        FamilyArg::CensoredExponential => KernelFamily::CensoredExponential,
        FamilyArg::GevMin => KernelFamily::GevMin,
        FamilyArg::PiecewiseConstant => match (args.delta, args.bins) {
            (Some(delta), Some(bins)) => KernelFamily::PiecewiseConstant { delta, bins },
            _ => bail!("piecewise-constant needs --delta and --bins"),
        },
    })
}

fn fit(args: FitArgs, config: &Config) -> Result<()> {
    let family = family(&args, config)?;
    let seq = load_events(&args.data, &args.window, config)?;
    let result: FitResult = fit_mle(&seq, &family, None)?;
    emit_json(args.out.as_deref(), &result)
}

fn gof(args: GofArgs, config: &Config) -> Result<()> {
    let model = load_model(&args.model)?;
    let seq = load_events(&args.data, &args.window, config)?;
    let result = time_rescale_test(&model, &seq)?;
    if let Some(path) = &args.qq_out {
        write_qq_file(path, &result.qq_pairs).with_context(|| format!("writing {}", path.display()))?;
    }
    emit_json(args.out.as_deref(), &result)
}

fn forecast(args: ForecastArgs, config: &Config) -> Result<()> {
    let model = load_model(&args.model)?;
    let history = load_events(&args.data, &args.window, config)?;
    let request = forecast::Request {
        horizon: pick(args.horizon, config.horizon, 24.0),
        paths: pick(args.paths, config.paths, 10_000),
        bins: pick(args.bins, config.bins, 20),
        seed: pick(args.seed, config.seed, 0),
    };
    let summary = forecast::run(&model, &history, &request)?;
    emit_json(args.out.as_deref(), &summary)
}

fn bench(args: BenchArgs, config: &Config) -> Result<()> {
    let reps = pick(args.reps, config.reps, DEFAULT_REPS);
    if reps == 0 {
        bail!(Error::InvalidParameter {
            name: "reps",
            reason: "must be at least 1".into(),
        });
    }
    let grid: Vec<BenchScenario> = default_grid().into_iter().map(|s| s.with_reps(reps)).collect();
    let opts = BenchOptions {
        seed: pick(args.seed, config.seed, 0),
        parallel: args.parallel || config.parallel.unwrap_or(false),
    };
    let report = run_bench(&grid, &Method::ALL, &opts)?;
    if let Some(path) = &args.out {
        write_json_file(path, &report).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", report.table());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Unstable { .. }) => 3,
        Some(Error::Numerical(_) | Error::BoundViolated { .. }) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<()> {
        let config = Config::load(cli.config.as_deref())?;
        match cli.command {
            Command::Simulate(a) => simulate(a, &config),
            Command::Fit(a) => fit(a, &config),
            Command::Gof(a) => gof(a, &config),
            Command::Forecast(a) => forecast(a, &config),
            Command::Bench(a) => bench(a, &config),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
