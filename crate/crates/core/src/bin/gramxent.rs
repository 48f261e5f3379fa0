use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gramxent::experiments::{
    emit_results, run_experiment, write_report, write_results, ConfigOverrides, ExperimentConfig, ExperimentKind,
    ExperimentOutput, Measure, OutputFormat, Pairing,
};
use gramxent::KernelFamily;

const SEED_ENV: &str = "GRAMXENT_SEED";

#[derive(Parser, Debug)]
#[command(author, version, about = "Matrix-based Rényi cross-entropy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Same-distribution pairs over a (d, n, alpha) grid.
    Convergence(Flags),
    /// Blue set translated over the shift grid.
    MeanShift(Flags),
    /// Blue set rescaled over the scale grid.
    VarianceScale(Flags),
    /// Tripartite measure over both sweeps.
    Tripartite(Flags),
    /// Estimator invariants over seeded random Gram matrices.
    Properties(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Kernel family (gaussian, exponential-inner-product); repeatable.
    #[arg(long = "kernel", value_parser = parse::<KernelFamily>)]
    kernels: Vec<KernelFamily>,
    /// Kernel bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    /// Order alpha > 0, alpha != 1; repeatable.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Sample count; repeatable.
    #[arg(long = "n")]
    n: Vec<usize>,
    /// Second sample-set size (tripartite).
    #[arg(long)]
    m: Option<usize>,
    /// Dimension; repeatable.
    #[arg(long = "d")]
    d: Vec<usize>,
    /// Mean shift applied to every coordinate; repeatable.
    #[arg(long = "shift", allow_negative_numbers = true)]
    shifts: Vec<f64>,
    /// Standard-deviation multiplier; repeatable.
    #[arg(long = "scale")]
    scales: Vec<f64>,
    /// Bipartite measure (nonmirrored, mirrored); repeatable.
    #[arg(long = "measure", value_parser = parse::<Measure>)]
    measures: Vec<Measure>,
    /// coupled or independent blue draws for the bipartite sweeps.
    #[arg(long, value_parser = parse::<Pairing>)]
    pairing: Option<Pairing>,
    /// Property-suite instances per size.
    #[arg(long)]
    seeds: Option<usize>,
    /// Falls back to $GRAMXENT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_parser = parse::<OutputFormat>)]
    format: Option<OutputFormat>,
}

fn parse<T: std::str::FromStr<Err = gramxent::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: gramxent::Error| e.to_string())
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Flags {
    fn into_config(self, kind: ExperimentKind) -> gramxent::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::defaults(kind);
        if let Ok(raw) = std::env::var(SEED_ENV) {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| gramxent::Error::Argument(format!("{SEED_ENV}='{raw}' is not an unsigned integer")))?;
        }
        if let Some(path) = &self.config {
            let file = ConfigOverrides::from_json_file(path)?;
            if let Some(k) = file.experiment.filter(|&k| k != kind) {
                return Err(gramxent::Error::Argument(format!(
                    "config file is for '{k}', but the '{kind}' subcommand was given"
                )));
            }
            cfg = file.apply(cfg);
        }
        let flags = ConfigOverrides {
            experiment: None,
            kernels: non_empty(self.kernels),
            sigma: self.sigma,
            alphas: non_empty(self.alphas),
            n_grid: non_empty(self.n),
            m: self.m,
            d_grid: non_empty(self.d),
            shift_grid: non_empty(self.shifts),
            scale_grid: non_empty(self.scales),
            measures: non_empty(self.measures),
            pairing: self.pairing,
            seeds: self.seeds,
            seed: self.seed,
            output_path: self.out,
            format: self.format,
        };
        let cfg = flags.apply(cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(cfg: &ExperimentConfig, output: &ExperimentOutput) -> gramxent::Result<()> {
    let io_err = |path: PathBuf| move |source| gramxent::Error::Io { path, source };
    match (output, &cfg.output_path) {
        (ExperimentOutput::Table(rows), Some(path)) => emit_results(rows, path, cfg.format),
        (ExperimentOutput::Table(rows), None) => {
            write_results(rows, io::stdout().lock(), cfg.format).map_err(io_err("<stdout>".into()))
        }
        (ExperimentOutput::Properties(report), Some(path)) => {
            let file = std::fs::File::create(path).map_err(io_err(path.clone()))?;
            let mut w = io::BufWriter::new(file);
            write_report(report, &mut w, cfg.format)
                .and_then(|_| w.flush())
                .map_err(io_err(path.clone()))
        }
        (ExperimentOutput::Properties(report), None) => {
            write_report(report, io::stdout().lock(), cfg.format).map_err(io_err("<stdout>".into()))
        }
    }
}

fn run(cli: Cli) -> gramxent::Result<bool> {
    let (kind, flags) = match cli.command {
        Command::Convergence(f) => (ExperimentKind::Convergence, f),
        Command::MeanShift(f) => (ExperimentKind::MeanShift, f),
        Command::VarianceScale(f) => (ExperimentKind::VarianceScale, f),
        Command::Tripartite(f) => (ExperimentKind::Tripartite, f),
        Command::Properties(f) => (ExperimentKind::Properties, f),
    };
    let cfg = flags.into_config(kind)?;
    let output = run_experiment(&cfg)?;
    write_output(&cfg, &output)?;
    if let ExperimentOutput::Properties(report) = &output {
        for p in report.failures() {
            eprintln!(
                "property failed: {} (max violation {:e}, tolerance {:e})",
                p.name, p.max_violation, p.tolerance
            );
        }
        return Ok(report.passed);
    }
    Ok(true)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which this tool reserves for property failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
