//! Experiment runners, sample I/O and result emission for the `gramxent` CLI.
//!
//! Every runner is a deterministic function of its [`ExperimentConfig`]: grid
//! cells are evaluated in parallel, then rows are sorted on their key columns
//! before they are written.
//!
//! Result tables have the columns
//! `experiment, kernel, alpha, parameter, measure, value, n, m, d, seed`.
//! CSV floats carry 17 significant digits; JSON output is an array of objects
//! with the same keys, where non-finite values are the strings `"+inf"`,
//! `"-inf"` or `"nan"`.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::estimators::{mirrored_cross_entropy, nonmirrored_cross_entropy, tripartite_cross_entropy, Alpha};
use crate::kernels::{gram_cross, gram_univariate, normalize_trace, GramMatrix, KernelFamily, KernelSpec, SampleSet};
use crate::verification::{mix, run_property_suite, standard_normal_samples, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Convergence,
    MeanShift,
    VarianceScale,
    Tripartite,
    Properties,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::MeanShift => "mean-shift",
            ExperimentKind::VarianceScale => "variance-scale",
            ExperimentKind::Tripartite => "tripartite",
            ExperimentKind::Properties => "properties",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bipartite measure selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Nonmirrored,
    Mirrored,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Nonmirrored => "nonmirrored",
            Measure::Mirrored => "mirrored",
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonmirrored" => Ok(Measure::Nonmirrored),
            "mirrored" => Ok(Measure::Mirrored),
            other => Err(argument(format!("unknown measure '{other}'"))),
        }
    }
}

/// How the blue set of the bipartite sweeps relates to the red set.
///
/// `Coupled` reuses the red draws (blue = scale·red + shift), so the i-th rows
/// of both Gram matrices describe the same underlying sample. `Independent`
/// draws blue afresh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    #[default]
    Coupled,
    Independent,
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(Pairing::Coupled),
            "independent" => Ok(Pairing::Independent),
            other => Err(argument(format!("unknown pairing '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(argument(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub kernels: Vec<KernelFamily>,
    pub sigma: f64,
    pub alphas: Vec<f64>,
    pub n_grid: Vec<usize>,
    /// Size of the second sample set in the tripartite runner; `None` means m = n.
    pub m: Option<usize>,
    pub d_grid: Vec<usize>,
    pub shift_grid: Vec<f64>,
    pub scale_grid: Vec<f64>,
    pub measures: Vec<Measure>,
    pub pairing: Pairing,
    /// Property-suite instances per size.
    pub seeds: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn half_steps(lo: f64, hi: f64) -> Vec<f64> {
    let steps = ((hi - lo) / 0.5).round() as i64;
    (0..=steps).map(|k| lo + 0.5 * k as f64).collect()
}

impl ExperimentConfig {
    /// Default grids for each experiment.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment,
            kernels: vec![KernelFamily::Gaussian],
            sigma: 1.0,
            alphas: vec![0.5, 1.5, 2.0, 4.0],
            n_grid: vec![64],
            m: None,
            d_grid: vec![5],
            shift_grid: half_steps(-2.0, 2.0),
            scale_grid: vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0],
            measures: vec![Measure::Nonmirrored, Measure::Mirrored],
            pairing: Pairing::Coupled,
            seeds: 20,
            seed: 0,
            output_path: None,
            format: OutputFormat::Csv,
        };
        let both = vec![KernelFamily::Gaussian, KernelFamily::ExponentialInnerProduct];
        match experiment {
            ExperimentKind::Convergence => ExperimentConfig {
                n_grid: vec![16, 32, 64, 128, 256, 512],
                d_grid: vec![2, 10, 25, 50, 100],
                ..base
            },
            ExperimentKind::MeanShift | ExperimentKind::VarianceScale => ExperimentConfig { kernels: both, ..base },
            ExperimentKind::Tripartite => ExperimentConfig {
                n_grid: vec![128],
                ..base
            },
            ExperimentKind::Properties => ExperimentConfig {
                alphas: vec![0.3, 0.5, 0.7, 1.5, 2.0, 4.0],
                n_grid: vec![4, 16, 64],
                d_grid: vec![4],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| argument(format!("{name} must not be empty"));
        if self.alphas.is_empty() {
            return Err(empty("alpha grid"));
        }
        if self.n_grid.is_empty() {
            return Err(empty("n grid"));
        }
        if self.d_grid.is_empty() {
            return Err(empty("d grid"));
        }
        if self.kernels.is_empty() {
            return Err(empty("kernel list"));
        }
        if self.measures.is_empty() {
            return Err(empty("measure list"));
        }
        for &a in &self.alphas {
            Alpha::new(a)?;
        }
        KernelSpec::new(KernelFamily::Gaussian, self.sigma)?;
        if self.n_grid.contains(&0) || self.d_grid.contains(&0) || self.m == Some(0) {
            return Err(argument("sample counts and dimensions must be >= 1"));
        }
        match self.experiment {
            ExperimentKind::MeanShift if self.shift_grid.is_empty() => return Err(empty("shift grid")),
            ExperimentKind::VarianceScale if self.scale_grid.is_empty() => return Err(empty("scale grid")),
            ExperimentKind::Tripartite if self.shift_grid.is_empty() && self.scale_grid.is_empty() => {
                return Err(empty("shift and scale grids"))
            }
            ExperimentKind::Properties if self.seeds == 0 => return Err(argument("seeds must be >= 1")),
            _ => {}
        }
        if let Some(s) = self.shift_grid.iter().find(|s| !s.is_finite()) {
            return Err(argument(format!("shift must be finite, got {s}")));
        }
        if let Some(s) = self.scale_grid.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(argument(format!("scale must be positive, got {s}")));
        }
        Ok(())
    }

    fn spec(&self, family: KernelFamily) -> Result<KernelSpec> {
        KernelSpec::new(family, self.sigma)
    }
}

/// Reads a numeric CSV file into a sample set; a single non-numeric first row is taken as a header.
pub fn load_csv(path: &Path) -> Result<SampleSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(idx + 1, e.to_string()))?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if idx == 0 => continue,
            Err(_) => {
                let col = record.iter().position(|c| c.parse::<f64>().is_err()).unwrap_or(0);
                return Err(parse_err(line, format!("non-numeric value '{}' in column {}", &record[col], col + 1)));
            }
        };
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(parse_err(line, format!("non-finite value {v}")));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(parse_err(line, format!("expected {w} columns, found {}", values.len())));
            }
            _ => {}
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no numeric rows".into()));
    }
    SampleSet::from_rows(&rows)
}

/// n seeded draws from N(mean, scale²·I).
pub fn sample_gaussian(seed: u64, n: usize, d: usize, mean: &[f64], scale: f64) -> Result<SampleSet> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(argument(format!("scale must be positive, got {scale}")));
    }
    if n == 0 || d == 0 {
        return Err(argument(format!("need n, d >= 1, got n={n}, d={d}")));
    }
    standard_normal_samples(seed, n, d).affine(scale, mean)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub kernel: String,
    pub alpha: f64,
    /// Swept quantity: n for convergence, the shift or scale for the sweeps.
    pub parameter: f64,
    pub measure: String,
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub seed: u64,
}

pub const COLUMNS: [&str; 10] = [
    "experiment",
    "kernel",
    "alpha",
    "parameter",
    "measure",
    "value",
    "n",
    "m",
    "d",
    "seed",
];

fn row_order(a: &ResultRow, b: &ResultRow) -> Ordering {
    a.experiment
        .cmp(&b.experiment)
        .then_with(|| a.kernel.cmp(&b.kernel))
        .then_with(|| a.measure.cmp(&b.measure))
        .then_with(|| a.d.cmp(&b.d))
        .then_with(|| a.n.cmp(&b.n))
        .then_with(|| a.m.cmp(&b.m))
        .then_with(|| a.parameter.total_cmp(&b.parameter))
        .then_with(|| a.alpha.total_cmp(&b.alpha))
        .then_with(|| a.value.total_cmp(&b.value))
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(row_order);
}

pub(crate) fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn json_float(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or_else(|| serde_json::Value::String(format_float(v)), serde_json::Value::Number)
}

fn row_json(r: &ResultRow) -> serde_json::Value {
    serde_json::json!({
        "experiment": r.experiment,
        "kernel": r.kernel,
        "alpha": json_float(r.alpha),
        "parameter": json_float(r.parameter),
        "measure": r.measure,
        "value": json_float(r.value),
        "n": r.n,
        "m": r.m,
        "d": r.d,
        "seed": r.seed,
    })
}

/// Writes `rows` in the given format.
pub fn write_results<W: Write>(rows: &[ResultRow], out: W, format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.write_record([
                    r.experiment.clone(),
                    r.kernel.clone(),
                    format_float(r.alpha),
                    format_float(r.parameter),
                    r.measure.clone(),
                    format_float(r.value),
                    r.n.to_string(),
                    r.m.to_string(),
                    r.d.to_string(),
                    r.seed.to_string(),
                ])?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            let mut out = out;
            let array: Vec<_> = rows.iter().map(row_json).collect();
            serde_json::to_writer_pretty(&mut out, &array)?;
            writeln!(out)
        }
    }
}

/// Writes `rows` to `path`.
pub fn emit_results(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut buf = std::io::BufWriter::new(file);
    write_results(rows, &mut buf, format).map_err(io_err)?;
    buf.flush().map_err(io_err)
}

/// Parses a CSV produced by [`emit_results`] back into rows.
pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != COLUMNS.len() {
            return Err(bad(format!("expected {} columns, found {}", COLUMNS.len(), rec.len())));
        }
        let float = |k: usize| rec[k].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", COLUMNS[k])));
        let int = |k: usize| rec[k].parse::<u64>().map_err(|e| bad(format!("column {}: {e}", COLUMNS[k])));
        rows.push(ResultRow {
            experiment: rec[0].to_string(),
            kernel: rec[1].to_string(),
            alpha: float(2)?,
            parameter: float(3)?,
            measure: rec[4].to_string(),
            value: float(5)?,
            n: int(6)? as usize,
            m: int(7)? as usize,
            d: int(8)? as usize,
            seed: int(9)?,
        });
    }
    Ok(rows)
}

fn bipartite_value(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha, measure: Measure) -> Result<f64> {
    let r = match measure {
        Measure::Nonmirrored => nonmirrored_cross_entropy(k1, k2, alpha)?,
        Measure::Mirrored => mirrored_cross_entropy(k1, k2, alpha)?,
    };
    Ok(r.value)
}

struct RowKey<'a> {
    cfg: &'a ExperimentConfig,
    experiment: &'a str,
    kernel: KernelFamily,
    parameter: f64,
    n: usize,
    m: usize,
    d: usize,
}

impl RowKey<'_> {
    fn row(&self, alpha: f64, measure: &str, value: f64) -> ResultRow {
        ResultRow {
            experiment: self.experiment.to_string(),
            kernel: self.kernel.name().to_string(),
            alpha,
            parameter: self.parameter,
            measure: measure.to_string(),
            value,
            n: self.n,
            m: self.m,
            d: self.d,
            seed: self.cfg.seed,
        }
    }

    fn bipartite_rows(&self, k1: &GramMatrix, k2: &GramMatrix) -> Result<Vec<ResultRow>> {
        let mut rows = Vec::new();
        for &a in &self.cfg.alphas {
            let alpha = Alpha::new(a)?;
            for &measure in &self.cfg.measures {
                rows.push(self.row(a, measure.name(), bipartite_value(k1, k2, alpha, measure)?));
            }
        }
        Ok(rows)
    }
}

fn unit_gram(spec: &KernelSpec, x: &SampleSet) -> Result<GramMatrix> {
    normalize_trace(&gram_univariate(spec, x)?)
}

fn collect_sorted(cells: Vec<Result<Vec<ResultRow>>>) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for cell in cells {
        rows.extend(cell?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

const RED: u64 = 1;
const BLUE: u64 = 2;

/// Two same-distribution standard-normal sets per (d, n), both measures of their unit-trace Grams.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let cells: Vec<(KernelFamily, usize, usize)> = cfg
        .kernels
        .iter()
        .flat_map(|&k| cfg.d_grid.iter().flat_map(move |&d| cfg.n_grid.iter().map(move |&n| (k, d, n))))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(family, d, n)| {
            let spec = cfg.spec(family)?;
            let x = standard_normal_samples(mix(cfg.seed, &[RED, d as u64, n as u64]), n, d);
            let y = standard_normal_samples(mix(cfg.seed, &[BLUE, d as u64, n as u64]), n, d);
            let key = RowKey {
                cfg,
                experiment: "convergence",
                kernel: family,
                parameter: n as f64,
                n,
                m: n,
                d,
            };
            key.bipartite_rows(&unit_gram(&spec, &x)?, &unit_gram(&spec, &y)?)
        })
        .collect();
    collect_sorted(results)
}

fn sweep_sets(cfg: &ExperimentConfig, n: usize, d: usize) -> (SampleSet, SampleSet) {
    let red = standard_normal_samples(mix(cfg.seed, &[RED, d as u64, n as u64]), n, d);
    let innovations = match cfg.pairing {
        Pairing::Coupled => red.clone(),
        Pairing::Independent => standard_normal_samples(mix(cfg.seed, &[BLUE, d as u64, n as u64]), n, d),
    };
    (red, innovations)
}

fn run_sweep(
    cfg: &ExperimentConfig,
    experiment: &'static str,
    grid: &[f64],
    blue_of: impl Fn(&SampleSet, f64, usize) -> Result<SampleSet> + Sync,
) -> Result<Vec<ResultRow>> {
    let cells: Vec<(KernelFamily, usize, usize, f64)> = cfg
        .kernels
        .iter()
        .flat_map(|&k| {
            cfg.d_grid.iter().flat_map(move |&d| {
                cfg.n_grid
                    .iter()
                    .flat_map(move |&n| grid.iter().map(move |&p| (k, d, n, p)))
            })
        })
        .collect();
    let results = cells
        .par_iter()
        .map(|&(family, d, n, p)| {
            let spec = cfg.spec(family)?;
            let (red, innovations) = sweep_sets(cfg, n, d);
            let blue = blue_of(&innovations, p, d)?;
            let key = RowKey {
                cfg,
                experiment,
                kernel: family,
                parameter: p,
                n,
                m: n,
                d,
            };
            key.bipartite_rows(&unit_gram(&spec, &red)?, &unit_gram(&spec, &blue)?)
        })
        .collect();
    collect_sorted(results)
}

/// Red set fixed at N(0, I); blue set translated by shift·(1, …, 1).
pub fn run_mean_shift(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    run_sweep(cfg, "mean-shift", &cfg.shift_grid, |z, shift, d| z.affine(1.0, &vec![shift; d]))
}

/// Red set fixed at N(0, I); blue set standard deviation multiplied by each scale.
pub fn run_variance_scale(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    run_sweep(cfg, "variance-scale", &cfg.scale_grid, |z, scale, d| z.affine(scale, &vec![0.0; d]))
}

/// Tripartite measure over the shift sweep and the scale sweep, with independent red and blue sets.
pub fn run_tripartite(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let sweeps: Vec<(&'static str, f64)> = cfg
        .shift_grid
        .iter()
        .map(|&s| ("tripartite:shift", s))
        .chain(cfg.scale_grid.iter().map(|&s| ("tripartite:scale", s)))
        .collect();
    let sweeps = &sweeps;
    let cells: Vec<(KernelFamily, usize, usize, &'static str, f64)> = cfg
        .kernels
        .iter()
        .flat_map(|&k| {
            cfg.d_grid.iter().flat_map(move |&d| {
                cfg.n_grid
                    .iter()
                    .flat_map(move |&n| sweeps.iter().map(move |&(s, p)| (k, d, n, s, p)))
            })
        })
        .collect();
    let results = cells
        .par_iter()
        .map(|&(family, d, n, sweep, p)| {
            let spec = cfg.spec(family)?;
            let m = cfg.m.unwrap_or(n);
            let red = standard_normal_samples(mix(cfg.seed, &[RED, d as u64, n as u64]), n, d);
            let z = standard_normal_samples(mix(cfg.seed, &[BLUE, d as u64, m as u64]), m, d);
            let blue = if sweep == "tripartite:shift" {
                z.affine(1.0, &vec![p; d])?
            } else {
                z.affine(p, &vec![0.0; d])?
            };
            let k1 = gram_univariate(&spec, &red)?;
            let k2 = gram_univariate(&spec, &blue)?;
            let k12 = gram_cross(&spec, &red, &blue)?;
            let key = RowKey {
                cfg,
                experiment: "tripartite",
                kernel: family,
                parameter: p,
                n,
                m,
                d,
            };
            cfg.alphas
                .iter()
                .map(|&a| {
                    let r = tripartite_cross_entropy(&k1, &k12, &k2, Alpha::new(a)?)?;
                    Ok(key.row(a, sweep, r.value))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    collect_sorted(results)
}

impl ExperimentConfig {
    /// Property-suite settings: sizes from `n_grid`, dimension from the first `d_grid` entry.
    pub fn suite_config(&self) -> Result<SuiteConfig> {
        Ok(SuiteConfig {
            seed: self.seed,
            sizes: self.n_grid.clone(),
            alphas: self.alphas.clone(),
            seeds: self.seeds,
            dimension: self.d_grid[0],
            kernel: self.spec(self.kernels[0])?,
            mutation: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Table(Vec<ResultRow>),
    Properties(SuiteReport),
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        ExperimentKind::Convergence => run_convergence(cfg).map(ExperimentOutput::Table),
        ExperimentKind::MeanShift => run_mean_shift(cfg).map(ExperimentOutput::Table),
        ExperimentKind::VarianceScale => run_variance_scale(cfg).map(ExperimentOutput::Table),
        ExperimentKind::Tripartite => run_tripartite(cfg).map(ExperimentOutput::Table),
        ExperimentKind::Properties => {
            cfg.validate()?;
            run_property_suite(&cfg.suite_config()?).map(ExperimentOutput::Properties)
        }
    }
}

/// Writes a property report as pretty JSON or as a CSV with one line per property.
pub fn write_report<W: Write>(report: &SuiteReport, out: W, format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["property", "instances", "skipped", "max_violation", "tolerance", "passed"])?;
            for p in &report.properties {
                w.write_record([
                    p.name.clone(),
                    p.instances.to_string(),
                    p.skipped.to_string(),
                    format_float(p.max_violation),
                    format_float(p.tolerance),
                    p.passed.to_string(),
                ])?;
            }
            w.flush()
        }
    }
}

/// Partial configuration, as read from a JSON config file or assembled from CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<ExperimentKind>,
    pub kernels: Option<Vec<KernelFamily>>,
    pub sigma: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub m: Option<usize>,
    pub d_grid: Option<Vec<usize>>,
    pub shift_grid: Option<Vec<f64>>,
    pub scale_grid: Option<Vec<f64>>,
    pub measures: Option<Vec<Measure>>,
    pub pairing: Option<Pairing>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl ConfigOverrides {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Fields set in `self` replace those of `cfg`.
    pub fn apply(self, cfg: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            experiment: self.experiment.unwrap_or(cfg.experiment),
            kernels: self.kernels.unwrap_or(cfg.kernels),
            sigma: self.sigma.unwrap_or(cfg.sigma),
            alphas: self.alphas.unwrap_or(cfg.alphas),
            n_grid: self.n_grid.unwrap_or(cfg.n_grid),
            m: self.m.or(cfg.m),
            d_grid: self.d_grid.unwrap_or(cfg.d_grid),
            shift_grid: self.shift_grid.unwrap_or(cfg.shift_grid),
            scale_grid: self.scale_grid.unwrap_or(cfg.scale_grid),
            measures: self.measures.unwrap_or(cfg.measures),
            pairing: self.pairing.unwrap_or(cfg.pairing),
            seeds: self.seeds.unwrap_or(cfg.seeds),
            seed: self.seed.unwrap_or(cfg.seed),
            output_path: self.output_path.or(cfg.output_path),
            format: self.format.unwrap_or(cfg.format),
        }
    }
}
