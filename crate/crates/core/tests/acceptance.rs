//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gramxent::estimators::{
    mirrored_cross_entropy, mirrored_cross_entropy_two_param, mirrored_limit_umegaki, nonmirrored_cross_entropy,
    trace_distance_bounds, tripartite_cross_entropy, Alpha, OmegaMode,
};
use gramxent::experiments::{
    run_convergence, run_mean_shift, run_tripartite, run_variance_scale, ExperimentConfig, ExperimentKind, Measure,
    ResultRow,
};
use gramxent::kernels::{gram_cross, gram_univariate, GramMatrix, KernelSpec, SampleSet};
use gramxent::psd_linalg::sym_eig;
use gramxent::verification::{random_gram, run_property_suite, seeded_rng, standard_normal_samples, SuiteConfig};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn c1_property_suite() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let report = pool.install(|| run_property_suite(&SuiteConfig::default())).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for p in &report.properties {
        println!(
            "    {:<32} {} instances={:<4} skipped={:<4} max_violation={:.3e} tol={:.0e}",
            p.name,
            if p.passed { "ok  " } else { "FAIL" },
            p.instances,
            p.skipped,
            p.max_violation,
            p.tolerance
        );
    }
    let failed: Vec<&str> = report.failures().map(|p| p.name.as_str()).collect();
    check(
        report.passed && elapsed < Duration::from_secs(60),
        format!(
            "{} properties, failed {:?}, {:.1}s single-threaded (limit 60s)",
            report.properties.len(),
            failed,
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_diagonal_oracle() -> Outcome {
    let alphas: [f64; 6] = [0.3, 0.5, 0.7, 1.5, 2.0, 4.0];
    let mut worst = 0.0f64;
    let mut evaluations = 0;
    for seed in 0..200u64 {
        let mut rng = seeded_rng(0xD1A6_0000 + seed);
        let n = rng.random_range(1..=8usize);
        let mut draw = || {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let (l, m) = (draw(), draw());
        let (k1, k2) = (GramMatrix::from_diagonal(&l).unwrap(), GramMatrix::from_diagonal(&m).unwrap());
        let a = alphas[seed as usize % alphas.len()];
        let beta = a.max(1.0 - a) + 0.25;
        let oracle = l.iter().zip(&m).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum::<f64>().ln() / (a - 1.0);
        let values = [
            (nonmirrored_cross_entropy(&k1, &k2, alpha(a)).unwrap().value, oracle),
            (mirrored_cross_entropy(&k1, &k2, alpha(a)).unwrap().value, oracle),
            (mirrored_cross_entropy_two_param(&k1, &k2, alpha(a), beta).unwrap().value, oracle),
        ];
        for (v, o) in values {
            let rel = if o == 0.0 { v.abs() } else { ((v - o) / o).abs() };
            worst = worst.max(rel);
            evaluations += 1;
        }
    }
    check(worst <= 1e-9, format!("{evaluations} evaluations, max relative error {worst:.3e} (limit 1e-9)"))
}

fn biased_mmd_oracle(x: &SampleSet, y: &SampleSet, sigma: f64) -> f64 {
    let k = |a: &[f64], b: &[f64]| (-sigma * a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()).exp();
    let mut xx = 0.0;
    for a in x.rows() {
        for b in x.rows() {
            xx += k(a, b);
        }
    }
    let mut yy = 0.0;
    for a in y.rows() {
        for b in y.rows() {
            yy += k(a, b);
        }
    }
    let mut xy = 0.0;
    for a in x.rows() {
        for b in y.rows() {
            xy += k(a, b);
        }
    }
    let (n, m) = (x.n() as f64, y.n() as f64);
    xx / (n * n) + yy / (m * m) - 2.0 * xy / (n * m)
}

fn c3_mmd_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = seeded_rng(0x3D3D_0000 + seed);
        let n = rng.random_range(1..=128usize);
        let m = rng.random_range(1..=128usize);
        let d = rng.random_range(1..=10usize);
        let sigma = rng.random_range(0.2..2.0);
        let a = [0.5, 1.5, 2.0, 4.0][seed as usize % 4];
        let shift = rng.random_range(0.0..1.0);
        let x = standard_normal_samples(2 * seed, n, d);
        let y = standard_normal_samples(2 * seed + 1, m, d).affine(1.0, &vec![shift; d]).unwrap();
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let (k1, k2, k12) = (
            gram_univariate(&spec, &x).unwrap(),
            gram_univariate(&spec, &y).unwrap(),
            gram_cross(&spec, &x, &y).unwrap(),
        );
        let r = tripartite_cross_entropy(&k1, &k12, &k2, alpha(a)).unwrap();
        let oracle = biased_mmd_oracle(&x, &y, sigma);
        let recovered = ((a - 1.0) * (r.value - r.entropy_term.unwrap())).exp();
        worst = worst.max(((recovered - oracle) / oracle).abs());
    }
    check(worst <= 1e-10, format!("100 pairs, max relative error {worst:.3e} (limit 1e-10)"))
}

fn c4_umegaki_limit() -> Outcome {
    let spec = KernelSpec::gaussian(1.0).unwrap();
    let mirrored = |k1: &GramMatrix, k2: &GramMatrix, a: f64| mirrored_cross_entropy(k1, k2, alpha(a)).unwrap().value;
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for seed in 0..50u64 {
        let n = 4 + (seed as usize % 13);
        let k1 = random_gram(0x4000 + 2 * seed, n, 4, &spec).unwrap();
        let k2 = random_gram(0x4001 + 2 * seed, n, 4, &spec).unwrap();
        for k in [&k1, &k2] {
            if sym_eig(k.values()).unwrap().rank() != n {
                return Err(format!("seed {seed}: instance is not full rank"));
            }
        }
        let u = mirrored_limit_umegaki(&k1, &k2).unwrap().value;
        let gap = |a: f64| (mirrored(&k1, &k2, a) - u).abs();
        let curvature = gap(0.99).max(gap(1.01)) / 0.01;
        for a in [0.999, 1.001] {
            let bound = 5.0 * (a - 1.0f64).abs() * curvature;
            worst_ratio = worst_ratio.max(gap(a) / bound);
            if gap(a) > bound {
                failures.push(format!("seed {seed} alpha {a}"));
            }
        }
        for sign in [-1.0, 1.0] {
            let gaps: Vec<f64> = (2..=4).map(|k| gap(1.0 + sign * 10f64.powi(-k))).collect();
            if !gaps.windows(2).all(|w| w[1] < w[0]) {
                failures.push(format!("seed {seed} side {sign}: gaps {gaps:?}"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!("50 pairs, worst gap/bound {worst_ratio:.3}, failures {failures:?}"),
    )
}

fn c5_dimension_agnosticity() -> Outcome {
    let start = Instant::now();
    let dims = vec![2, 10, 25, 50, 100];
    let sizes = vec![32, 64, 128, 256, 512];
    let mut spreads = Vec::new();
    let mut slopes = Vec::new();
    for seed in 0..10u64 {
        let cfg = ExperimentConfig {
            alphas: vec![2.0],
            measures: vec![Measure::Nonmirrored],
            n_grid: vec![256],
            d_grid: dims.clone(),
            seed,
            ..ExperimentConfig::defaults(ExperimentKind::Convergence)
        };
        let rows = run_convergence(&cfg).map_err(|e| e.to_string())?;
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = if max.is_finite() { (max - min) / max } else { f64::INFINITY };
        spreads.push((seed, spread, values));
    }
    for &d in &dims {
        let mut mean_by_n = vec![0.0; sizes.len()];
        for seed in 0..10u64 {
            let cfg = ExperimentConfig {
                alphas: vec![2.0],
                measures: vec![Measure::Nonmirrored],
                n_grid: sizes.clone(),
                d_grid: vec![d],
                seed,
                ..ExperimentConfig::defaults(ExperimentKind::Convergence)
            };
            for r in run_convergence(&cfg).map_err(|e| e.to_string())? {
                let i = sizes.iter().position(|&n| n == r.n).unwrap();
                mean_by_n[i] += r.value / 10.0;
            }
        }
        slopes.push((d, log_log_slope(&sizes, &mean_by_n), mean_by_n));
    }
    let elapsed = start.elapsed();
    for (seed, spread, values) in &spreads {
        println!("    seed {seed}: C_2 over d={dims:?} at n=256: {values:.4?} relative spread {spread:.3}");
    }
    for (d, slope, means) in &slopes {
        println!("    d={d}: mean C_2 over n={sizes:?}: {means:.4?} log-log slope {slope:.3}");
    }
    let spread_ok = spreads.iter().all(|(_, s, _)| *s < 0.25);
    let slope_ok = slopes.iter().all(|(_, s, _)| (-0.8..=-0.2).contains(s));
    let worst_spread = spreads.iter().map(|s| s.1).fold(0.0, f64::max);
    check(
        spread_ok && slope_ok && elapsed < Duration::from_secs(300),
        format!(
            "worst relative spread across d {worst_spread:.3} (limit 0.25), slopes {:?} (want [-0.8, -0.2]), {:.1}s",
            slopes.iter().map(|s| (s.0, (s.1 * 1000.0).round() / 1000.0)).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    )
}

fn log_log_slope(xs: &[usize], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.is_finite() && **y > 0.0)
        .map(|(x, y)| ((*x as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn series<'a>(rows: &'a [ResultRow], kernel: &str, measure: &str, a: f64) -> Vec<&'a ResultRow> {
    let mut v: Vec<&ResultRow> = rows
        .iter()
        .filter(|r| r.kernel == kernel && r.measure == measure && r.alpha == a)
        .collect();
    v.sort_by(|x, y| x.parameter.total_cmp(&y.parameter));
    v
}

fn argmin(s: &[&ResultRow]) -> f64 {
    s.iter().min_by(|x, y| x.value.total_cmp(&y.value)).unwrap().parameter
}

fn c6_kernel_choice() -> Outcome {
    let shift_cfg = ExperimentConfig::defaults(ExperimentKind::MeanShift);
    let scale_cfg = ExperimentConfig::defaults(ExperimentKind::VarianceScale);
    let shifts = run_mean_shift(&shift_cfg).map_err(|e| e.to_string())?;
    let scales = run_variance_scale(&scale_cfg).map_err(|e| e.to_string())?;
    let step = 0.25;
    let mut problems = Vec::new();
    let mut flat_worst = 0.0f64;
    for &a in &shift_cfg.alphas {
        let g = series(&shifts, "gaussian", "nonmirrored", a);
        let max = g.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        let min = g.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        flat_worst = flat_worst.max(max - min);
        if max - min >= 1e-10 || max.is_nan() {
            problems.push(format!("gaussian shift sweep not flat at alpha {a}: {:.3e}", max - min));
        }
        let e = series(&shifts, "exponential-inner-product", "nonmirrored", a);
        if argmin(&e) != 0.0 {
            problems.push(format!("exp-kernel argmin at shift {} for alpha {a}", argmin(&e)));
        }
        let v = series(&scales, "gaussian", "nonmirrored", a);
        if (argmin(&v) - 1.0).abs() > step + 1e-12 {
            problems.push(format!("gaussian variance argmin at scale {} for alpha {a}", argmin(&v)));
        }
    }
    check(
        problems.is_empty(),
        format!("gaussian flatness {flat_worst:.3e} (limit 1e-10); problems {problems:?}"),
    )
}

fn c7_tripartite() -> Outcome {
    let cfg = ExperimentConfig::defaults(ExperimentKind::Tripartite);
    let rows = run_tripartite(&cfg).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    for &a in cfg.alphas.iter().filter(|&&a| a > 1.0) {
        let s = series(&rows, "gaussian", "tripartite:shift", a);
        if argmin(&s) != 0.0 {
            problems.push(format!("shift argmin {} at alpha {a}", argmin(&s)));
        }
        let zero = s.iter().position(|r| r.parameter == 0.0).unwrap();
        let right = s[zero..].windows(2).all(|w| w[1].value >= w[0].value - 1e-6);
        let left = s[..=zero].windows(2).all(|w| w[0].value >= w[1].value - 1e-6);
        if !(left && right) {
            problems.push(format!("not monotone in |shift| at alpha {a}"));
        }
        let v = series(&rows, "gaussian", "tripartite:scale", a);
        if (argmin(&v) - 1.0).abs() > 0.25 + 1e-12 {
            problems.push(format!("scale argmin {} at alpha {a}", argmin(&v)));
        }
    }
    let uneven = ExperimentConfig {
        n_grid: vec![64],
        m: Some(96),
        ..cfg.clone()
    };
    let rows = run_tripartite(&uneven).map_err(|e| e.to_string())?;
    if !rows.iter().all(|r| r.value.is_finite() && r.n == 64 && r.m == 96) {
        problems.push("non-square run produced non-finite output".into());
    }
    check(
        problems.is_empty(),
        format!("alphas > 1 of {:?}, n=m={}; non-square 64x96 rows {}; problems {problems:?}", cfg.alphas, cfg.n_grid[0], rows.len()),
    )
}

fn c8_bounds() -> Outcome {
    let spec = KernelSpec::gaussian(1.0).unwrap();
    let mut worst_loose = f64::NEG_INFINITY;
    let mut worst_ceiling = f64::NEG_INFINITY;
    for seed in 0..100u64 {
        let n = [4, 8, 16, 32][seed as usize % 4];
        let k1 = random_gram(0x8000 + 2 * seed, n, 4, &spec).unwrap();
        let k2 = random_gram(0x8001 + 2 * seed, n, 4, &spec).unwrap();
        for k in [&k1, &k2] {
            if sym_eig(k.values()).unwrap().rank() != n {
                return Err(format!("seed {seed}: instance is not full rank"));
            }
        }
        let u = mirrored_limit_umegaki(&k1, &k2).unwrap().value;
        let b = trace_distance_bounds(&k1, &k2, OmegaMode::Entrywise).unwrap();
        worst_loose = worst_loose.max(u - b.loose);
        worst_ceiling = worst_ceiling.max(u - b.ceiling);
    }
    check(
        worst_loose <= 1e-9 && worst_ceiling <= 1e-9,
        format!("max(U - loose) {worst_loose:.3e}, max(U - ceiling) {worst_ceiling:.3e} (slack 1e-9)"),
    )
}

fn c9_determinism() -> Outcome {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_gramxent"));
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 5] = [
        &["convergence", "--n", "32", "--n", "64", "--d", "2", "--d", "10"],
        &["mean-shift"],
        &["variance-scale", "--format", "json"],
        &["tripartite", "--n", "64", "--m", "96"],
        &["properties", "--n", "4", "--n", "8", "--seeds", "3", "--format", "json"],
    ];
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let path = dir.path().join(format!("run{i}-{threads}.out"));
            let status = Command::new(&bin)
                .args(*args)
                .args(["--seed", "17", "--out"])
                .arg(&path)
                .env("RAYON_NUM_THREADS", threads)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{args:?}: outputs differ between runs"));
        }
        compared += 1;
    }
    check(true, format!("{compared} experiments byte-identical across reruns with 1 and 4 threads"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 axiom suite", c1_property_suite),
        ("2 diagonal oracle equivalence", c2_diagonal_oracle),
        ("3 MMD equivalence", c3_mmd_equivalence),
        ("4 Umegaki limit", c4_umegaki_limit),
        ("5 dimension agnosticity", c5_dimension_agnosticity),
        ("6 kernel-choice behavior", c6_kernel_choice),
        ("7 tripartite behavior", c7_tripartite),
        ("8 trace-distance bounds", c8_bounds),
        ("9 determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS - {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL - {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
