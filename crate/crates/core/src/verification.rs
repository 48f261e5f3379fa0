//! Seeded instance generators, pinching maps and the property suite.
//!
//! The suite evaluates each estimator invariant over a grid of sizes, orders
//! and seeds and reports the worst violation per property. Failures are
//! report entries; only an invalid configuration is an error.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{argument, Result};
use crate::estimators::{
    cross_information_potential, mirrored_cross_entropy, mirrored_cross_entropy_raw,
    mirrored_cross_entropy_two_param, mirrored_limit_umegaki, nonmirrored_cross_entropy,
    nonmirrored_cross_entropy_raw, tripartite_cross_entropy, Alpha,
};
use crate::kernels::{gram_cross, gram_univariate, normalize_trace, GramMatrix, KernelSpec, SampleSet};
use crate::psd_linalg::sym_eig;

/// ChaCha8 stream seeded from a u64; the basis of every seeded draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// n×d standard-normal samples.
pub fn standard_normal_samples(seed: u64, n: usize, d: usize) -> SampleSet {
    let mut rng = seeded_rng(seed);
    let data: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect();
    SampleSet::from_flat(n, d, data).expect("standard-normal draws are finite")
}

/// Unit-trace Gram matrix of n seeded standard-normal d-vectors.
pub fn random_gram(seed: u64, n: usize, d: usize, spec: &KernelSpec) -> Result<GramMatrix> {
    if n == 0 || d == 0 {
        return Err(argument(format!("random_gram needs n, d >= 1, got n={n}, d={d}")));
    }
    normalize_trace(&gram_univariate(spec, &standard_normal_samples(seed, n, d))?)
}

/// Orthogonal matrix from the QR factorization of a seeded Gaussian matrix,
/// with column signs fixed so that R has a positive diagonal.
pub fn random_orthogonal(seed: u64, n: usize) -> DMatrix<f64> {
    let mut rng = seeded_rng(seed);
    let z = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Disjoint non-empty index blocks covering 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(argument(format!("partition block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(argument(format!("index {i} out of range for n = {n}")));
                }
                if labels[i] != usize::MAX {
                    return Err(argument(format!("index {i} appears in more than one block")));
                }
                labels[i] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(argument(format!("index {i} is not covered by the partition")));
        }
        Ok(Partition { blocks, labels })
    }

    pub fn whole(n: usize) -> Result<Self> {
        Self::new(n, vec![(0..n).collect()])
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| vec![i]).collect())
    }

    /// k consecutive runs of near-equal length.
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(argument(format!("cannot split {n} indices into {k} blocks")));
        }
        Self::new(n, (0..k).map(|b| (b * n / k..(b + 1) * n / k).collect()).collect())
    }

    /// Index i goes to block i mod k.
    pub fn interleaved(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(argument(format!("cannot split {n} indices into {k} blocks")));
        }
        Self::new(n, (0..k).map(|b| (b..n).step_by(k).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n() == coarser.n()
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| coarser.labels[i] == coarser.labels[b[0]]))
    }
}

/// Zeroes every entry whose row and column fall in different blocks.
pub fn pinch(g: &GramMatrix, p: &Partition) -> Result<GramMatrix> {
    if g.n() != p.n() {
        return Err(argument(format!(
            "partition covers {} indices, matrix has {}",
            p.n(),
            g.n()
        )));
    }
    let mut values = g.values().clone();
    for j in 0..g.n() {
        for i in 0..g.n() {
            if p.labels[i] != p.labels[j] {
                values[(i, j)] = 0.0;
            }
        }
    }
    Ok(GramMatrix::from_parts(values, g.normalization(), g.clamp_count()))
}

/// Deliberate defects used to check that the suite catches violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Scale the first argument but expect the unscaled value.
    UncorrectedScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Instances per size.
    pub seeds: usize,
    /// Sample dimension behind each random Gram matrix.
    pub dimension: usize,
    pub kernel: KernelSpec,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            sizes: vec![4, 16, 64],
            alphas: vec![0.3, 0.5, 0.7, 1.5, 2.0, 4.0],
            seeds: 20,
            dimension: 4,
            kernel: KernelSpec::gaussian(1.0).expect("positive bandwidth"),
            mutation: None,
        }
    }
}

fn signed_float<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub params: Value,
    pub instances: usize,
    pub skipped: usize,
    #[serde(serialize_with = "signed_float")]
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub properties: Vec<PropertyReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &PropertyReport> {
        self.properties.iter().filter(|p| !p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }
}

const SCALE_RHO: (f64, f64) = (3.0, 0.5);
const TRIPARTITE_RHO: f64 = 2.5;
const CONTINUITY_DELTA: f64 = 1e-6;
const CONTINUITY_GAP: f64 = 1e-3;
const CONTINUITY_LIMIT: f64 = 1e-3;
const NULLITY_ALPHAS: [f64; 3] = [0.5, 2.0, 5.0];

fn tolerance_of(name: &str) -> f64 {
    match name.split('/').next().unwrap_or(name) {
        "nullity" | "non-negativity" | "alpha-monotonicity" | "ordering" => 1e-10,
        "cip-non-negativity" => 1e-12,
        "unitary-invariance" | "scaling" | "data-processing" | "joint-convexity" => 1e-9,
        "tensor-additivity" => 1e-8,
        "continuity" => CONTINUITY_LIMIT,
        _ => unreachable!("unknown property {name}"),
    }
}

fn params_of(name: &str, cfg: &SuiteConfig) -> Value {
    let family = name.split('/').next().unwrap_or(name);
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    let extra = match family {
        "nullity" => {
            let mut a = alphas.clone();
            a.extend(NULLITY_ALPHAS);
            a.sort_by(f64::total_cmp);
            a.dedup();
            json!({ "alphas": a })
        }
        "unitary-invariance" if name.ends_with("two-param") => json!({ "alphas": alphas, "beta": "alpha + 0.5" }),
        "unitary-invariance" if name.ends_with("umegaki") => json!({ "alphas": [1.0] }),
        "scaling" if name.ends_with("tripartite") => json!({ "alphas": alphas, "rho": TRIPARTITE_RHO }),
        "scaling" => json!({ "alphas": alphas, "rho1": SCALE_RHO.0, "rho2": SCALE_RHO.1 }),
        "tensor-additivity" => json!({ "alphas": alphas, "blocks": [2, 3] }),
        "alpha-monotonicity" if name.ends_with("tripartite") => json!({ "alphas": alphas, "per_branch": true }),
        "data-processing" => {
            let keep: Vec<f64> = if name.ends_with("nonmirrored") {
                alphas.iter().copied().filter(|&a| a <= 2.0).collect()
            } else {
                alphas.iter().copied().filter(|&a| a >= 0.5).collect()
            };
            json!({ "alphas": keep, "partitions": ["interleaved-2", "contiguous-2"] })
        }
        "continuity" => json!({ "alphas": alphas, "delta": CONTINUITY_DELTA, "min_gap": CONTINUITY_GAP }),
        "joint-convexity" => {
            let keep: Vec<f64> = if name.ends_with("nonmirrored") {
                alphas.iter().copied().filter(|&a| a > 1.0 && a <= 2.0).collect()
            } else {
                alphas.iter().copied().filter(|&a| a > 1.0).collect()
            };
            json!({ "alphas": keep, "t": 0.5 })
        }
        _ => json!({ "alphas": alphas }),
    };
    let mut v = extra;
    v["sizes"] = json!(cfg.sizes);
    v["seeds"] = json!(cfg.seeds);
    v
}

enum Observation {
    Violation(f64),
    Skipped,
}

#[derive(Default)]
struct Tally {
    instances: usize,
    skipped: usize,
    max_violation: f64,
}

type Cell = Vec<(&'static str, Observation)>;

#[derive(Clone, Copy)]
enum Measure {
    Nonmirrored,
    Mirrored,
}

impl Measure {
    fn eval(self, k1: &GramMatrix, k2: &GramMatrix, a: f64) -> f64 {
        let Ok(alpha) = Alpha::new(a) else { return f64::NAN };
        let r = match self {
            Measure::Nonmirrored => nonmirrored_cross_entropy(k1, k2, alpha),
            Measure::Mirrored => mirrored_cross_entropy(k1, k2, alpha),
        };
        r.map_or(f64::NAN, |r| r.value)
    }

    fn eval_raw(self, k1: &GramMatrix, k2: &GramMatrix, a: f64) -> f64 {
        let Ok(alpha) = Alpha::new(a) else { return f64::NAN };
        let r = match self {
            Measure::Nonmirrored => nonmirrored_cross_entropy_raw(k1, k2, alpha),
            Measure::Mirrored => mirrored_cross_entropy_raw(k1, k2, alpha),
        };
        r.map_or(f64::NAN, |r| r.value)
    }
}

/// Violation of `lhs ≤ rhs`, clamped at zero; NaN and ±∞ count as infinite.
fn excess(lhs: f64, rhs: f64) -> f64 {
    let d = lhs - rhs;
    if d.is_nan() || !lhs.is_finite() || !rhs.is_finite() {
        f64::INFINITY
    } else {
        d.max(0.0)
    }
}

fn gap(a: f64, b: f64) -> f64 {
    if a.is_finite() && b.is_finite() {
        (a - b).abs()
    } else {
        f64::INFINITY
    }
}

pub(crate) fn mix(seed: u64, parts: &[u64]) -> u64 {
    // splitmix64 over the parts, so each (size, instance, role) gets its own stream.
    let mut z = seed;
    for &p in parts {
        z = z.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn kron(a: &GramMatrix, b: &GramMatrix) -> Result<GramMatrix> {
    GramMatrix::from_matrix(a.values().kronecker(b.values()))
}

fn conj(q: &DMatrix<f64>, k: &GramMatrix) -> Result<GramMatrix> {
    GramMatrix::from_matrix(q * k.values() * q.transpose())
}

fn run_cell(cfg: &SuiteConfig, n: usize, inst: usize) -> Result<Cell> {
    let seed = |role: u64| mix(cfg.seed, &[n as u64, inst as u64, role]);
    let d = cfg.dimension;
    let spec = &cfg.kernel;
    let k1 = random_gram(seed(1), n, d, spec)?;
    let k2 = random_gram(seed(2), n, d, spec)?;
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    let mut out: Cell = Vec::new();
    let measures = [Measure::Nonmirrored, Measure::Mirrored];
    let name = |family: &str, m: Measure| -> &'static str {
        match (family, m) {
            ("nullity", Measure::Nonmirrored) => "nullity/nonmirrored",
            ("nullity", Measure::Mirrored) => "nullity/mirrored",
            ("non-negativity", Measure::Nonmirrored) => "non-negativity/nonmirrored",
            ("non-negativity", Measure::Mirrored) => "non-negativity/mirrored",
            ("unitary-invariance", Measure::Nonmirrored) => "unitary-invariance/nonmirrored",
            ("unitary-invariance", Measure::Mirrored) => "unitary-invariance/mirrored",
            ("scaling", Measure::Nonmirrored) => "scaling/nonmirrored",
            ("scaling", Measure::Mirrored) => "scaling/mirrored",
            ("tensor-additivity", Measure::Nonmirrored) => "tensor-additivity/nonmirrored",
            ("tensor-additivity", Measure::Mirrored) => "tensor-additivity/mirrored",
            ("alpha-monotonicity", Measure::Nonmirrored) => "alpha-monotonicity/nonmirrored",
            ("alpha-monotonicity", Measure::Mirrored) => "alpha-monotonicity/mirrored",
            ("data-processing", Measure::Nonmirrored) => "data-processing/nonmirrored",
            ("data-processing", Measure::Mirrored) => "data-processing/mirrored",
            ("continuity", Measure::Nonmirrored) => "continuity/nonmirrored",
            ("continuity", Measure::Mirrored) => "continuity/mirrored",
            ("joint-convexity", Measure::Nonmirrored) => "joint-convexity/nonmirrored",
            ("joint-convexity", Measure::Mirrored) => "joint-convexity/mirrored",
            _ => unreachable!(),
        }
    };

    let mut nullity_alphas = alphas.clone();
    nullity_alphas.extend(NULLITY_ALPHAS);
    nullity_alphas.sort_by(f64::total_cmp);
    nullity_alphas.dedup();

    let q = random_orthogonal(seed(3), n);
    let (q1, q2) = (conj(&q, &k1)?, conj(&q, &k2)?);
    let (s1, s2) = (k1.scaled(SCALE_RHO.0)?, k2.scaled(SCALE_RHO.1)?);
    let small = [
        random_gram(seed(4), 2, d, spec)?,
        random_gram(seed(5), 2, d, spec)?,
        random_gram(seed(6), 3, d, spec)?,
        random_gram(seed(7), 3, d, spec)?,
    ];
    let (t1, t2) = (kron(&small[0], &small[2])?, kron(&small[1], &small[3])?);
    let partitions = [Partition::interleaved(n, 2.min(n))?, Partition::contiguous(n, 2.min(n))?];
    let pinched: Vec<(GramMatrix, GramMatrix)> = partitions
        .iter()
        .map(|p| Ok((pinch(&k1, p)?, pinch(&k2, p)?)))
        .collect::<Result<_>>()?;
    let k3 = random_gram(seed(8), n, d, spec)?;
    let k4 = random_gram(seed(9), n, d, spec)?;
    let mid1 = GramMatrix::from_matrix((k1.values() + k3.values()) * 0.5)?;
    let mid2 = GramMatrix::from_matrix((k2.values() + k4.values()) * 0.5)?;

    let gap_min = {
        let g1 = sym_eig(k1.values())?.min_support_eigenvalue().unwrap_or(0.0);
        let g2 = sym_eig(k2.values())?.min_support_eigenvalue().unwrap_or(0.0);
        g1.min(g2)
    };
    let perturbed = {
        let mut rng = seeded_rng(seed(10));
        let e = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let mut e: DMatrix<f64> = (&e + e.transpose()) * 0.5;
        let shift = e.trace() / n as f64;
        for i in 0..n {
            e[(i, i)] -= shift;
        }
        let norm = e.norm();
        if norm > 0.0 {
            e *= CONTINUITY_DELTA / norm;
        }
        GramMatrix::from_matrix(k1.values() + e)?
    };

    for m in measures {
        for &a in &nullity_alphas {
            out.push((name("nullity", m), Observation::Violation(gap(m.eval(&k1, &k1, a), 0.0))));
        }
        let values: Vec<f64> = alphas.iter().map(|&a| m.eval(&k1, &k2, a)).collect();
        for (&a, &v) in alphas.iter().zip(&values) {
            out.push((name("non-negativity", m), Observation::Violation(excess(0.0, v))));
            out.push((
                name("unitary-invariance", m),
                Observation::Violation(gap(m.eval(&q1, &q2, a), v)),
            ));
            let expected = match cfg.mutation {
                Some(Mutation::UncorrectedScaling) => v,
                None => v + (SCALE_RHO.0 / SCALE_RHO.1).ln(),
            };
            out.push((
                name("scaling", m),
                Observation::Violation(gap(m.eval_raw(&s1, &s2, a), expected)),
            ));
            let additive = m.eval(&small[0], &small[1], a) + m.eval(&small[2], &small[3], a);
            out.push((
                name("tensor-additivity", m),
                Observation::Violation(gap(m.eval(&t1, &t2, a), additive)),
            ));
            let dpi_applies = match m {
                Measure::Nonmirrored => a <= 2.0,
                Measure::Mirrored => a >= 0.5,
            };
            if dpi_applies {
                for (p1, p2) in &pinched {
                    out.push((name("data-processing", m), Observation::Violation(excess(m.eval(p1, p2, a), v))));
                }
            }
            if gap_min > CONTINUITY_GAP {
                out.push((
                    name("continuity", m),
                    Observation::Violation(gap(m.eval(&perturbed, &k2, a), v)),
                ));
            } else {
                out.push((name("continuity", m), Observation::Skipped));
            }
            let convex = match m {
                Measure::Nonmirrored => a > 1.0 && a <= 2.0,
                Measure::Mirrored => a > 1.0,
            };
            if convex {
                let avg = 0.5 * (v + m.eval(&k3, &k4, a));
                out.push((name("joint-convexity", m), Observation::Violation(excess(m.eval(&mid1, &mid2, a), avg))));
            }
        }
        for w in values.windows(2) {
            out.push((name("alpha-monotonicity", m), Observation::Violation(excess(w[0], w[1]))));
        }
    }

    for &a in &alphas {
        let c = Measure::Nonmirrored.eval(&k1, &k2, a);
        let cm = Measure::Mirrored.eval(&k1, &k2, a);
        out.push(("ordering", Observation::Violation(excess(cm, c))));
        let alpha = Alpha::new(a)?;
        let two = |x: &GramMatrix, y: &GramMatrix| {
            mirrored_cross_entropy_two_param(x, y, alpha, a + 0.5).map_or(f64::NAN, |r| r.value)
        };
        out.push((
            "unitary-invariance/two-param",
            Observation::Violation(gap(two(&q1, &q2), two(&k1, &k2))),
        ));
    }
    let umegaki = |x: &GramMatrix, y: &GramMatrix| mirrored_limit_umegaki(x, y).map_or(f64::NAN, |r| r.value);
    out.push((
        "unitary-invariance/umegaki",
        Observation::Violation(gap(umegaki(&q1, &q2), umegaki(&k1, &k2))),
    ));

    // Tripartite: raw Grams of two independent same-distribution sample sets.
    let x = standard_normal_samples(seed(11), n, d);
    let y = standard_normal_samples(seed(12), n, d);
    let (gx, gy, gxy) = (gram_univariate(spec, &x)?, gram_univariate(spec, &y)?, gram_cross(spec, &x, &y)?);
    let cip = cross_information_potential(&gx, &gxy, &gy)?;
    out.push(("cip-non-negativity", Observation::Violation(excess(0.0, cip))));
    let (rx, ry, rxy) = (
        gx.scaled(TRIPARTITE_RHO)?,
        gy.scaled(TRIPARTITE_RHO)?,
        gxy.scaled(TRIPARTITE_RHO)?,
    );
    let tri: Vec<f64> = alphas
        .iter()
        .map(|&a| tripartite_cross_entropy(&gx, &gxy, &gy, Alpha::new(a)?).map(|r| r.value))
        .collect::<Result<_>>()?;
    for (&a, &v) in alphas.iter().zip(&tri) {
        let scaled = tripartite_cross_entropy(&rx, &rxy, &ry, Alpha::new(a)?)?.value;
        let expected = match cfg.mutation {
            Some(Mutation::UncorrectedScaling) => v,
            None => v + TRIPARTITE_RHO.ln() / (a - 1.0),
        };
        out.push(("scaling/tripartite", Observation::Violation(gap(scaled, expected))));
    }
    for (w, v) in alphas.windows(2).zip(tri.windows(2)) {
        if (w[0] < 1.0) == (w[1] < 1.0) {
            out.push(("alpha-monotonicity/tripartite", Observation::Violation(excess(v[0], v[1]))));
        }
    }
    Ok(out)
}

/// Runs every estimator invariant over `cfg` and collects the worst violation per property.
pub fn run_property_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.sizes.is_empty() || cfg.alphas.is_empty() || cfg.seeds == 0 {
        return Err(argument("property suite needs non-empty sizes, alphas and seeds"));
    }
    if let Some(&n) = cfg.sizes.iter().find(|&&n| n < 2) {
        return Err(argument(format!("property suite sizes must be >= 2, got {n}")));
    }
    if cfg.dimension == 0 {
        return Err(argument("property suite dimension must be >= 1"));
    }
    for &a in &cfg.alphas {
        Alpha::new(a)?;
    }
    let cells: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.seeds).map(move |s| (n, s)))
        .collect();
    let results: Vec<Result<Cell>> = cells.par_iter().map(|&(n, s)| run_cell(cfg, n, s)).collect();

    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    for cell in results {
        for (name, obs) in cell? {
            let t = tallies.entry(name).or_default();
            match obs {
                Observation::Violation(v) => {
                    t.instances += 1;
                    t.max_violation = t.max_violation.max(v);
                    if v.is_nan() {
                        t.max_violation = f64::INFINITY;
                    }
                }
                Observation::Skipped => t.skipped += 1,
            }
        }
    }
    let properties: Vec<PropertyReport> = tallies
        .into_iter()
        .map(|(name, t)| {
            let tolerance = tolerance_of(name);
            PropertyReport {
                name: name.to_string(),
                params: params_of(name, cfg),
                instances: t.instances,
                skipped: t.skipped,
                max_violation: t.max_violation,
                tolerance,
                passed: t.max_violation <= tolerance,
            }
        })
        .collect();
    let passed = properties.iter().all(|p| p.passed);
    Ok(SuiteReport {
        config: cfg.clone(),
        properties,
        passed,
    })
}
