//! Batch front end for entropy-density benchmarking: sweeps, model fits,
//! advantage thresholds, calibration ingestion, and SVG plots.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entrobench::advantage;
use entrobench::calibration::{aggregate, noise_from_fidelities, parse_calibration};

use entrobench_cli::config::{
    self, parse_aggregation, parse_int_list, resolve_noise, ConfigFile, Estimator,
    ExperimentConfig, NoiseSection, ResampleMode,
};
use entrobench_cli::errors::{CliError, CliResult};
use entrobench_cli::{csvio, fitcmd, plotcmd, sweep};

#[derive(Parser)]
#[command(
    name = "entrobench",
    about = "Entropy-density benchmarking of noisy layered quantum circuits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an entropy-accumulation sweep and write a CSV of purity estimates.
    Sweep(SweepArgs),
    /// Fit the global-depolarising purity model to sweep output.
    Fit(FitCliArgs),
    /// Tabulate certified-classical depth thresholds against width.
    Threshold(ThresholdArgs),
    /// Parse a calibration table and report aggregated noise parameters.
    Calibrate(CalibrateArgs),
    /// Render sweep or frontier CSV data as an SVG chart.
    Plot(PlotCliArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (TOML); flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Register widths, e.g. `2,3,4` or `2..6`.
    #[arg(long)]
    widths: Option<String>,
    /// Circuit depths, e.g. `1..20`.
    #[arg(long)]
    depths: Option<String>,
    /// Purity estimator: exact | shadows | swap.
    #[arg(long)]
    estimator: Option<Estimator>,
    /// Root seed for circuit angles and estimator sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Estimator repetitions per (width, depth) cell.
    #[arg(long)]
    repetitions: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Single-qubit depolarising probability.
    #[arg(long)]
    p1: Option<f64>,
    /// Two-qubit depolarising probability.
    #[arg(long)]
    p2: Option<f64>,
    /// Readout flip probability P(0|1).
    #[arg(long)]
    p01: Option<f64>,
    /// Readout flip probability P(1|0).
    #[arg(long)]
    p10: Option<f64>,
    /// Calibration CSV; overrides p1/p2 via the aggregation policy.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Aggregation policy: median | mean | qubits:ID,ID,...
    #[arg(long)]
    aggregation: Option<String>,

    /// Shadows: number of measurement settings M.
    #[arg(long)]
    settings: Option<usize>,
    /// Shadows/swap: shots per setting K (shadows) or total shots (swap).
    #[arg(long)]
    shots: Option<usize>,
    /// Shadows: scan all 3^n settings instead of sampling them.
    #[arg(long)]
    derandomize: bool,
    /// Shadows: resample recorded exhaustive-scan data: none | replicate | cycle.
    #[arg(long)]
    resample: Option<ResampleMode>,
    /// Shadows: recorded repetitions of the exhaustive scan to resample from.
    #[arg(long)]
    resample_runs: Option<usize>,

    /// Swap: total Bell-measurement shots per estimate.
    #[arg(long)]
    swap_shots: Option<usize>,
    /// Swap: apply the noise model to the Bell measurement circuit.
    #[arg(long)]
    measurement_noise: bool,
}

#[derive(Args)]
struct FitCliArgs {
    /// Sweep CSV produced by the sweep subcommand.
    #[arg(long)]
    data: PathBuf,
    /// Calibration value p1 (ratio mode ties alpha1 = theta * p1).
    #[arg(long, default_value_t = 0.008)]
    p1: f64,
    /// Calibration value p2 (ratio mode ties alpha2 = theta * p2).
    #[arg(long, default_value_t = 0.054)]
    p2: f64,
    /// Fit mode: ratio | free | two-qubit-only.
    #[arg(long, default_value = "ratio")]
    mode: fitcmd::FitModeArg,
    /// Also fit the readout term beta.
    #[arg(long)]
    fit_beta: bool,
    /// Weight points by inverse variance where run scatter is available.
    #[arg(long)]
    weighted: bool,
    /// Fit each width separately instead of jointly.
    #[arg(long)]
    per_width: bool,
    /// Write the key = value fit report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write a model-curve CSV (per width and depth) for overlay plots.
    #[arg(long)]
    fitted_curve: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Entropy-density threshold c in (0, 1).
    #[arg(short = 'c', long)]
    entropy_threshold: f64,
    /// Two-qubit error rate p2.
    #[arg(long)]
    p2: Option<f64>,
    /// Calibration CSV supplying p2 instead of --p2.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Aggregation policy for --calibration: median | mean | qubits:ID,...
    #[arg(long)]
    aggregation: Option<String>,
    /// Widths to tabulate, e.g. `2..1000`.
    #[arg(long, default_value = "2..1000")]
    n_range: String,
    /// Print only the two asymptotic constants.
    #[arg(long)]
    asymptotic_only: bool,
    /// Output CSV path for the frontier table.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Calibration CSV to ingest.
    #[arg(long)]
    input: PathBuf,
    /// Aggregation policy: median | mean | qubits:ID,ID,...
    #[arg(long, default_value = "median")]
    aggregation: String,
    /// Write the key = value report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotCliArgs {
    /// Input CSV (sweep or frontier schema, depending on --kind).
    #[arg(long)]
    data: PathBuf,
    /// Chart kind: entropy-curve | purity-curve | frontier.
    #[arg(long)]
    kind: plotcmd::PlotKind,
    /// Output SVG path.
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Fit(args) => fitcmd::run_fit(&fitcmd::FitArgs {
            data: args.data,
            p1: args.p1,
            p2: args.p2,
            mode: args.mode,
            fit_beta: args.fit_beta,
            weighted: args.weighted,
            per_width: args.per_width,
            report: args.report,
            fitted_curve: args.fitted_curve,
        }),
        Command::Threshold(args) => run_threshold_cmd(args),
        Command::Calibrate(args) => run_calibrate_cmd(args),
        Command::Plot(args) => plotcmd::run_plot(&plotcmd::PlotArgs {
            data: args.data,
            kind: args.kind,
            output: args.output,
        }),
    }
}

fn run_sweep_cmd(args: SweepArgs) -> CliResult<()> {
    let cfg = build_sweep_config(args)?;
    let rows = sweep::run_sweep(&cfg)?;
    let csv = csvio::write_sweep(&rows);
    csvio::write_file(&cfg.output, &csv)?;
    println!(
        "wrote {} rows ({} estimator) to {}",
        rows.len(),
        cfg.estimator.label(),
        cfg.output.display()
    );
    Ok(())
}

fn build_sweep_config(args: SweepArgs) -> CliResult<ExperimentConfig> {
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => {
            // Flag-only invocation still needs the required keys.
            let widths = args
                .widths
                .as_deref()
                .ok_or_else(|| CliError::validation("--widths is required without --config"))?;
            let depths = args
                .depths
                .as_deref()
                .ok_or_else(|| CliError::validation("--depths is required without --config"))?;
            let estimator = args
                .estimator
                .ok_or_else(|| CliError::validation("--estimator is required without --config"))?;
            ConfigFile {
                experiment: config::ExperimentSection {
                    widths: config::IntList::Range(widths.to_string()),
                    depths: config::IntList::Range(depths.to_string()),
                    estimator,
                    seed: 1,
                    repetitions: 1,
                    output: PathBuf::from("sweep.csv"),
                },
                noise: NoiseSection::default(),
                shadows: Default::default(),
                swap: Default::default(),
            }
        }
    };

    if let Some(widths) = &args.widths {
        file.experiment.widths = config::IntList::Range(widths.clone());
    }
    if let Some(depths) = &args.depths {
        file.experiment.depths = config::IntList::Range(depths.clone());
    }
    if let Some(estimator) = args.estimator {
        file.experiment.estimator = estimator;
    }
    if let Some(seed) = args.seed {
        file.experiment.seed = seed;
    }
    if let Some(reps) = args.repetitions {
        file.experiment.repetitions = reps;
    }
    if let Some(output) = args.output {
        file.experiment.output = output;
    }
    if let Some(p1) = args.p1 {
        file.noise.p1 = p1;
    }
    if let Some(p2) = args.p2 {
        file.noise.p2 = p2;
    }
    if let Some(p01) = args.p01 {
        file.noise.p01 = p01;
    }
    if let Some(p10) = args.p10 {
        file.noise.p10 = p10;
    }
    if let Some(calibration) = args.calibration {
        file.noise.calibration = Some(calibration);
    }
    if let Some(aggregation) = args.aggregation {
        file.noise.aggregation = Some(aggregation);
    }
    if let Some(settings) = args.settings {
        file.shadows.settings = settings;
    }
    if let Some(shots) = args.shots {
        file.shadows.shots = shots;
    }
    if args.derandomize {
        file.shadows.derandomize = true;
    }
    if let Some(resample) = args.resample {
        file.shadows.resample = resample;
    }
    if let Some(runs) = args.resample_runs {
        file.shadows.resample_runs = runs;
    }
    if let Some(swap_shots) = args.swap_shots {
        file.swap.shots = swap_shots;
    }
    if args.measurement_noise {
        file.swap.measurement_noise = true;
    }
    file.resolve()
}

fn run_threshold_cmd(args: ThresholdArgs) -> CliResult<()> {
    let p2 = match (args.p2, &args.calibration) {
        (Some(p2), None) => p2,
        (None, Some(path)) => {
            let section = NoiseSection {
                calibration: Some(path.clone()),
                aggregation: args.aggregation.clone(),
                ..Default::default()
            };
            resolve_noise(&section)?.p2
        }
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "give either --p2 or --calibration, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::validation("one of --p2 or --calibration is required"))
        }
    };

    let c = args.entropy_threshold;
    let this_work = advantage::depth_threshold_asymptotic(c, p2)?;
    let prior = advantage::prior_threshold(c, p2)?;
    println!("c = {c}");
    println!("p2 = {p2}");
    println!("this_work_asymptote = {this_work}");
    println!("prior_asymptote = {prior}");

    if args.asymptotic_only {
        return Ok(());
    }
    let widths = parse_int_list(&args.n_range)?;
    let rows = advantage::frontier_curve(c, p2, widths)?;
    if rows.is_empty() {
        return Err(CliError::validation(
            "width range produced no frontier rows (widths with vanishing noise coefficient are omitted)",
        ));
    }
    let csv = csvio::write_frontier(&rows);
    match &args.output {
        Some(path) => {
            csvio::write_file(path, &csv)?;
            println!("wrote {} frontier rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_calibrate_cmd(args: CalibrateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", args.input.display())))?;
    let table = parse_calibration(&text)?;
    let policy = parse_aggregation(&args.aggregation)?;
    let (f1, f2) = aggregate(&table, &policy)?;
    let (p1, p2) = noise_from_fidelities(f1, f2);

    let mut report = String::new();
    report.push_str(&format!("pairs = {}\n", table.pairs.len()));
    report.push_str(&format!("qubits = {}\n", table.qubits.len()));
    report.push_str(&format!("aggregation = {}\n", args.aggregation));
    report.push_str(&format!("f1 = {f1}\n"));
    report.push_str(&format!("f2 = {f2}\n"));
    report.push_str(&format!("p1 = {p1}\n"));
    report.push_str(&format!("p2 = {p2}\n"));

    match &args.output {
        Some(path) => csvio::write_file(path, &report)?,
        None => print!("{report}"),
    }
    Ok(())
}
