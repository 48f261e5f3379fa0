//! Kernel families and Gram-matrix construction.
//!
//! Two families are supported:
//!
//! | Family | κ(s, a) | translation invariant | radial | κ(s, s) = 1 |
//! |--------|---------|-----------------------|--------|-------------|
//! | [`KernelFamily::Gaussian`] | exp(−σ‖s − a‖²) | yes | yes | yes |
//! | [`KernelFamily::ExponentialInnerProduct`] | exp(σ⟨s, a⟩) | no | no | no |
//!
//! Univariate Gram matrices are built from the upper triangle and mirrored, so
//! they are bit-exactly symmetric.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::psd_linalg;

/// Largest exponent accepted by the exponential-inner-product kernel.
pub const EXP_INNER_PRODUCT_LIMIT: f64 = 700.0;

/// Relative tolerance used when accepting externally supplied symmetric matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Tolerance for treating a matrix as unit trace.
pub const UNIT_TRACE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Gaussian,
    ExponentialInnerProduct,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::ExponentialInnerProduct => "exponential-inner-product",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "rbf" => Ok(KernelFamily::Gaussian),
            "exponential-inner-product" | "exp-inner" => Ok(KernelFamily::ExponentialInnerProduct),
            other => Err(argument(format!("unknown kernel family '{other}'"))),
        }
    }
}

/// Kernel family plus bandwidth σ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelSpec", into = "RawKernelSpec")]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

#[derive(Serialize, Deserialize)]
struct RawKernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

impl TryFrom<RawKernelSpec> for KernelSpec {
    type Error = Error;

    fn try_from(raw: RawKernelSpec) -> Result<Self> {
        KernelSpec::new(raw.family, raw.bandwidth)
    }
}

impl From<KernelSpec> for RawKernelSpec {
    fn from(spec: KernelSpec) -> Self {
        RawKernelSpec {
            family: spec.family,
            bandwidth: spec.bandwidth,
        }
    }
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(argument(format!("bandwidth must be positive and finite, got {bandwidth}")));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn exponential_inner_product(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::ExponentialInnerProduct, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn translation_invariant(&self) -> bool {
        matches!(self.family, KernelFamily::Gaussian)
    }

    pub fn radial(&self) -> bool {
        matches!(self.family, KernelFamily::Gaussian)
    }

    /// True when κ(s, s) = 1 for every s.
    pub fn normalized(&self) -> bool {
        matches!(self.family, KernelFamily::Gaussian)
    }
}

/// An n×d table of finite samples, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl SampleSet {
    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(argument(format!("sample set must be at least 1x1, got {n}x{d}")));
        }
        if data.len() != n * d {
            return Err(argument(format!(
                "expected {} values for a {n}x{d} sample set, got {}",
                n * d,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(argument(format!(
                "non-finite sample value at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(SampleSet { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(argument(format!("row {i} has {} columns, expected {d}", r.len())));
        }
        Self::from_flat(n, d, rows.iter().flatten().copied().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Applies `x ↦ scale·x + shift` to every row.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.d {
            return Err(argument(format!(
                "shift has dimension {}, samples have {}",
                shift.len(),
                self.d
            )));
        }
        let data = self
            .rows()
            .flat_map(|r| r.iter().zip(shift).map(|(x, c)| scale * x + c))
            .collect();
        Self::from_flat(self.n, self.d, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    UnitTrace,
}

/// Symmetric n×n kernel matrix with its normalization state.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: DMatrix<f64>,
    normalization: Normalization,
    clamp_count: usize,
}

impl GramMatrix {
    /// Wraps an externally supplied symmetric matrix.
    ///
    /// The matrix must be square with finite entries and symmetric to within
    /// [`SYMMETRY_TOLERANCE`] relative to its largest entry; it is then mirrored
    /// so the stored copy is exactly symmetric.
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        let n = values.nrows();
        if n == 0 || values.ncols() != n {
            return Err(argument(format!(
                "Gram matrix must be square and non-empty, got {}x{}",
                n,
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(argument("Gram matrix has non-finite entries"));
        }
        let asym = psd_linalg::asymmetry(&values);
        let scale = values.amax().max(f64::MIN_POSITIVE);
        if asym > SYMMETRY_TOLERANCE * scale {
            return Err(argument(format!(
                "matrix is not symmetric: max |a_ij - a_ji| = {asym:e}"
            )));
        }
        let values = psd_linalg::symmetrize(&values);
        Ok(GramMatrix {
            values,
            normalization: Normalization::Raw,
            clamp_count: 0,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(n, n))
    }

    pub(crate) fn from_parts(values: DMatrix<f64>, normalization: Normalization, clamp_count: usize) -> Self {
        GramMatrix {
            values,
            normalization,
            clamp_count,
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn clamp_count(&self) -> usize {
        self.clamp_count
    }

    pub fn trace(&self) -> f64 {
        self.values.trace()
    }

    pub fn is_unit_trace(&self) -> bool {
        (self.trace() - 1.0).abs() <= UNIT_TRACE_TOLERANCE
    }

    /// Multiplies every entry by `factor`; the result is raw again unless `factor == 1`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(argument(format!("scale factor must be positive, got {factor}")));
        }
        let normalization = if factor == 1.0 {
            self.normalization
        } else {
            Normalization::Raw
        };
        Ok(GramMatrix::from_parts(&self.values * factor, normalization, self.clamp_count))
    }

    /// Projects onto the numerically PSD cone: eigenvalues at or below the clamp
    /// threshold are set to zero and the matrix is rebuilt from its spectrum.
    pub fn condition(&self) -> Result<Self> {
        let eig = psd_linalg::sym_eig(&self.values)?;
        let tau = eig.clamp_threshold();
        let mut clamped = 0;
        let kept: Vec<f64> = eig
            .eigenvalues()
            .iter()
            .map(|&l| {
                if l > tau {
                    l
                } else {
                    clamped += 1;
                    0.0
                }
            })
            .collect();
        let values = psd_linalg::symmetrize(&eig.reconstruct_with(&kept));
        Ok(GramMatrix::from_parts(values, Normalization::Raw, clamped))
    }
}

/// Rectangular n×m matrix of κ(xᵢ, yⱼ).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossGram {
    values: DMatrix<f64>,
}

impl CrossGram {
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(argument("cross Gram matrix must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(argument("cross Gram entries must be finite and non-negative"));
        }
        Ok(CrossGram { values })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(argument(format!("scale factor must be positive, got {factor}")));
        }
        Ok(CrossGram {
            values: &self.values * factor,
        })
    }
}

fn eval_pair(spec: &KernelSpec, s: &[f64], a: &[f64], row: usize, col: usize) -> Result<f64> {
    if s.len() != a.len() {
        return Err(argument(format!(
            "kernel arguments differ in dimension: {} vs {}",
            s.len(),
            a.len()
        )));
    }
    let sigma = spec.bandwidth;
    match spec.family {
        KernelFamily::Gaussian => {
            let sq: f64 = s.iter().zip(a).map(|(x, y)| (x - y) * (x - y)).sum();
            Ok((-sigma * sq).exp())
        }
        KernelFamily::ExponentialInnerProduct => {
            let dot: f64 = s.iter().zip(a).map(|(x, y)| x * y).sum();
            let exponent = sigma * dot;
            if exponent.is_nan() || exponent > EXP_INNER_PRODUCT_LIMIT {
                return Err(Error::Overflow {
                    row,
                    col,
                    exponent,
                    limit: EXP_INNER_PRODUCT_LIMIT,
                });
            }
            Ok(exponent.exp())
        }
    }
}

/// Evaluates κ(s, a) for a single pair.
pub fn eval_kernel(spec: &KernelSpec, s: &[f64], a: &[f64]) -> Result<f64> {
    if s.iter().chain(a).any(|v| !v.is_finite()) {
        return Err(argument("kernel arguments must be finite"));
    }
    eval_pair(spec, s, a, 0, 0)
}

/// Builds the raw n×n Gram matrix of `samples`, one evaluation per unordered pair.
pub fn gram_univariate(spec: &KernelSpec, samples: &SampleSet) -> Result<GramMatrix> {
    let n = samples.n();
    let mut values = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = samples.row(i);
        for j in i..n {
            let k = eval_pair(spec, xi, samples.row(j), i, j)?;
            values[(i, j)] = k;
            values[(j, i)] = k;
        }
    }
    Ok(GramMatrix::from_parts(values, Normalization::Raw, 0))
}

/// Builds the n×m matrix of κ(xᵢ, yⱼ).
pub fn gram_cross(spec: &KernelSpec, x: &SampleSet, y: &SampleSet) -> Result<CrossGram> {
    if x.d() != y.d() {
        return Err(argument(format!(
            "sample sets differ in dimension: {} vs {}",
            x.d(),
            y.d()
        )));
    }
    let mut values = DMatrix::zeros(x.n(), y.n());
    for i in 0..x.n() {
        let xi = x.row(i);
        for j in 0..y.n() {
            values[(i, j)] = eval_pair(spec, xi, y.row(j), i, j)?;
        }
    }
    Ok(CrossGram { values })
}

/// Divides by the trace so the result has trace 1. Already-normalized input is returned unchanged.
pub fn normalize_trace(gram: &GramMatrix) -> Result<GramMatrix> {
    if gram.normalization == Normalization::UnitTrace {
        return Ok(gram.clone());
    }
    let tr = gram.trace();
    if !(tr.is_finite() && tr > 0.0) {
        return Err(Error::Degenerate(format!("cannot normalize a matrix with trace {tr}")));
    }
    Ok(GramMatrix::from_parts(
        &gram.values / tr,
        Normalization::UnitTrace,
        gram.clamp_count,
    ))
}

/// Entrywise (product-kernel) composition, renormalized to unit trace.
pub fn hadamard_joint(g1: &GramMatrix, g2: &GramMatrix) -> Result<GramMatrix> {
    if g1.n() != g2.n() {
        return Err(argument(format!(
            "Hadamard product needs equal sizes, got {} and {}",
            g1.n(),
            g2.n()
        )));
    }
    let product = g1.values.component_mul(&g2.values);
    normalize_trace(&GramMatrix::from_parts(product, Normalization::Raw, 0))
}
