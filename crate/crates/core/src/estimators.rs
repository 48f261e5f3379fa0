//! Matrix-based Rényi α-cross-entropies and the entropies they induce.
//!
//! | Measure | Formula |
//! |---------|---------|
//! | non-mirrored C_α | (α−1)⁻¹ log tr(K1^α K2^{1−α}) |
//! | mirrored C′_α | (α−1)⁻¹ log tr((K2^{(1−α)/2α} K1 K2^{(1−α)/2α})^α) |
//! | two-parameter mirrored | (α−1)⁻¹ log tr((K2^{(1−α)/2β} K1^{α/β} K2^{(1−α)/2β})^β) |
//! | Umegaki limit (α → 1) | tr(K1 (log K1 − log K2)) / tr K1 |
//! | tripartite C″_α | (α−1)⁻¹ log CIP + (α−1)⁻¹ log tr(K̂1^α) |
//!
//! The bipartite estimators expect unit-trace inputs; the `_raw` variants lift
//! that contract and add the −(α−1)⁻¹ log tr K1 normalization term instead, so
//! that C(ρ₁K1‖ρ₂K2) = C(K1‖K2) + log(ρ₁/ρ₂).
//!
//! A bipartite value is +∞ when the range of K1 is not contained in the
//! support of K2.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::kernels::{hadamard_joint, normalize_trace, CrossGram, GramMatrix, UNIT_TRACE_TOLERANCE};
use crate::psd_linalg::{
    power_from_eig, support_from_eig, sym_eig, symmetrize, EigenDecomposition, SupportReport,
    DEFAULT_SUPPORT_TOLERANCE,
};

/// Minimum distance from 1 accepted by [`Alpha::new`].
pub const ALPHA_EXCLUSION: f64 = 1e-6;

/// CIP values below this are reported as degenerate instead of taking log 0.
pub const CIP_FLOOR: f64 = 1e-300;

/// Tolerance under which the two minimal eigenvalues in the trace-distance bound count as equal.
pub const BOUND_EQUALITY_TOLERANCE: f64 = 1e-12;

/// An order α > 0 with |α − 1| ≥ 1e-6.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(argument(format!("alpha must be positive and finite, got {value}")));
        }
        if (value - 1.0).abs() < ALPHA_EXCLUSION {
            return Err(Error::AlphaNearOne(value));
        }
        Ok(Alpha(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// α ≥ 1/2, where the mirrored measure satisfies data processing.
    pub fn in_data_processing_range(self) -> bool {
        self.0 >= 0.5
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    /// The cross-information potential vanished; the value is a ±∞ sentinel.
    ZeroCip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossEntropyResult {
    pub value: f64,
    /// The order used; 1 for the Umegaki limit.
    pub alpha: f64,
    pub support: Option<SupportReport>,
    pub clamp_count: usize,
    pub degenerate: Option<Degeneracy>,
    /// Tripartite only: the cross-information potential.
    pub cip: Option<f64>,
    /// Tripartite only: (α−1)⁻¹ log tr(K̂1^α).
    pub entropy_term: Option<f64>,
}

impl CrossEntropyResult {
    fn bipartite(value: f64, alpha: f64, support: SupportReport, clamp_count: usize) -> Self {
        CrossEntropyResult {
            value,
            alpha,
            support: Some(support),
            clamp_count,
            degenerate: None,
            cip: None,
            entropy_term: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn require_same_size(k1: &GramMatrix, k2: &GramMatrix) -> Result<()> {
    if k1.n() != k2.n() {
        return Err(argument(format!(
            "Gram matrices differ in size: {} and {}",
            k1.n(),
            k2.n()
        )));
    }
    Ok(())
}

fn require_unit_trace(k: &GramMatrix, name: &str) -> Result<()> {
    let tr = k.trace();
    if (tr - 1.0).abs() > UNIT_TRACE_TOLERANCE {
        return Err(Error::Contract(format!(
            "{name} must be unit trace, got trace {tr}"
        )));
    }
    Ok(())
}

fn positive_trace(k: &GramMatrix, name: &str) -> Result<f64> {
    let tr = k.trace();
    if !(tr.is_finite() && tr > 0.0) {
        return Err(Error::Degenerate(format!("{name} has trace {tr}")));
    }
    Ok(tr)
}

fn check_traces(k1: &GramMatrix, k2: &GramMatrix, raw: bool) -> Result<()> {
    if raw {
        positive_trace(k1, "K1")?;
        positive_trace(k2, "K2")?;
    } else {
        require_unit_trace(k1, "K1")?;
        require_unit_trace(k2, "K2")?;
    }
    Ok(())
}

fn checked_log(t: f64, what: &str, clamp_count: usize) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Numerical {
            message: format!("{what} evaluated to {t}"),
            clamp_count,
        });
    }
    Ok(t.ln())
}

fn clamps(eig: &EigenDecomposition) -> usize {
    eig.n() - eig.rank()
}

/// Σᵢⱼ f(λᵢ) g(μⱼ) (vᵢ·wⱼ)² over the supports of both spectra: tr(f(A) g(B)) without forming f(A), g(B).
fn overlap_trace(a: &EigenDecomposition, b: &EigenDecomposition, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
    let (fa, _) = a.map_support(f);
    let (gb, _) = b.map_support(g);
    let overlap = a.eigenvectors().transpose() * b.eigenvectors();
    let mut total = 0.0;
    for (j, &gj) in gb.iter().enumerate() {
        if gj == 0.0 {
            continue;
        }
        let col = overlap.column(j);
        let s: f64 = fa.iter().zip(col.iter()).map(|(fi, o)| fi * o * o).sum();
        total += gj * s;
    }
    total
}

fn nonmirrored_impl(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha, raw: bool) -> Result<CrossEntropyResult> {
    require_same_size(k1, k2)?;
    let a = alpha.value();
    check_traces(k1, k2, raw)?;
    let e1 = sym_eig(k1.values())?;
    let e2 = sym_eig(k2.values())?;
    let support = support_from_eig(&e1, &e2, DEFAULT_SUPPORT_TOLERANCE)?;
    let clamp_count = clamps(&e1) + clamps(&e2);
    if !support.included {
        return Ok(CrossEntropyResult::bipartite(f64::INFINITY, a, support, clamp_count));
    }
    let t = overlap_trace(&e1, &e2, |l| l.powf(a), |m| m.powf(1.0 - a));
    let mut value = checked_log(t, "tr(K1^a K2^(1-a))", clamp_count)? / (a - 1.0);
    if raw {
        value -= k1.trace().ln() / (a - 1.0);
    }
    Ok(CrossEntropyResult::bipartite(value, a, support, clamp_count))
}

/// C_α(K1‖K2) for unit-trace K1, K2.
pub fn nonmirrored_cross_entropy(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<CrossEntropyResult> {
    nonmirrored_impl(k1, k2, alpha, false)
}

/// C_α(K1‖K2) for arbitrary positive-trace K1, K2, including the log tr K1 term.
pub fn nonmirrored_cross_entropy_raw(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<CrossEntropyResult> {
    nonmirrored_impl(k1, k2, alpha, true)
}

fn mirrored_impl(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha, beta: f64, raw: bool) -> Result<CrossEntropyResult> {
    require_same_size(k1, k2)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(argument(format!("beta must be positive and finite, got {beta}")));
    }
    check_traces(k1, k2, raw)?;
    let a = alpha.value();
    let e1 = sym_eig(k1.values())?;
    let e2 = sym_eig(k2.values())?;
    let support = support_from_eig(&e1, &e2, DEFAULT_SUPPORT_TOLERANCE)?;
    let mut clamp_count = clamps(&e1) + clamps(&e2);
    if !support.included {
        return Ok(CrossEntropyResult::bipartite(f64::INFINITY, a, support, clamp_count));
    }

    // Work in K2's eigenbasis: M = D (Wᵀ K1^{α/β} W) D with D = diag(μ^{(1−α)/2β}).
    let inner_power = a / beta;
    let k1_pow: DMatrix<f64> = if inner_power == 1.0 {
        k1.values().clone()
    } else {
        power_from_eig(&e1, inner_power)?.matrix
    };
    let w = e2.eigenvectors();
    let (d, _) = e2.map_support(|m| m.powf((1.0 - a) / (2.0 * beta)));
    let mut m = w.transpose() * k1_pow * w;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= d[i] * d[j];
        }
    }
    let em = sym_eig(&symmetrize(&m))?;
    clamp_count += clamps(&em);
    let (powered, _) = em.map_support(|v| v.powf(beta));
    let t: f64 = powered.iter().sum();
    let mut value = checked_log(t, "tr(M^beta)", clamp_count)? / (a - 1.0);
    if raw {
        value -= k1.trace().ln() / (a - 1.0);
    }
    Ok(CrossEntropyResult::bipartite(value, a, support, clamp_count))
}

/// C′_α(K1‖K2) for unit-trace K1, K2.
pub fn mirrored_cross_entropy(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<CrossEntropyResult> {
    mirrored_impl(k1, k2, alpha, alpha.value(), false)
}

pub fn mirrored_cross_entropy_raw(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<CrossEntropyResult> {
    mirrored_impl(k1, k2, alpha, alpha.value(), true)
}

/// Two-parameter mirrored measure; β = α recovers [`mirrored_cross_entropy`].
///
/// Data processing is only guaranteed for part of the (α, β) plane, e.g.
/// β ≥ max(α, 1 − α) when α ∈ (0, 1); other pairs are evaluated but carry no such guarantee.
pub fn mirrored_cross_entropy_two_param(
    k1: &GramMatrix,
    k2: &GramMatrix,
    alpha: Alpha,
    beta: f64,
) -> Result<CrossEntropyResult> {
    mirrored_impl(k1, k2, alpha, beta, false)
}

pub fn mirrored_cross_entropy_two_param_raw(
    k1: &GramMatrix,
    k2: &GramMatrix,
    alpha: Alpha,
    beta: f64,
) -> Result<CrossEntropyResult> {
    mirrored_impl(k1, k2, alpha, beta, true)
}

/// α → 1 limit of the mirrored measure: tr(K1 (log K1 − log K2)) / tr K1.
///
/// +∞ when the range of K1 leaves the support of K2. The reverse inclusion is
/// not needed for finiteness; it is not part of the result.
pub fn mirrored_limit_umegaki(k1: &GramMatrix, k2: &GramMatrix) -> Result<CrossEntropyResult> {
    require_same_size(k1, k2)?;
    let tr1 = positive_trace(k1, "K1")?;
    let e1 = sym_eig(k1.values())?;
    let e2 = sym_eig(k2.values())?;
    if e1.rank() == 0 || e2.rank() == 0 {
        return Err(Error::Degenerate("Umegaki limit needs rank >= 1 inputs".into()));
    }
    let support = support_from_eig(&e1, &e2, DEFAULT_SUPPORT_TOLERANCE)?;
    let clamp_count = clamps(&e1) + clamps(&e2);
    if !support.included {
        return Ok(CrossEntropyResult::bipartite(f64::INFINITY, 1.0, support, clamp_count));
    }
    let (self_terms, _) = e1.map_support(|l| l * l.ln());
    let self_part: f64 = self_terms.iter().sum();
    let cross_part = overlap_trace(&e1, &e2, |l| l, f64::ln);
    let value = (self_part - cross_part) / tr1;
    Ok(CrossEntropyResult::bipartite(value, 1.0, support, clamp_count))
}

fn grand_mean(m: &DMatrix<f64>) -> f64 {
    m.sum() / (m.nrows() * m.ncols()) as f64
}

/// Biased squared-MMD estimate mean(K1) + mean(K2) − 2·mean(K12).
pub fn cross_information_potential(k1: &GramMatrix, k12: &CrossGram, k2: &GramMatrix) -> Result<f64> {
    let (n, m) = k12.shape();
    if k1.n() != n || k2.n() != m {
        return Err(argument(format!(
            "inconsistent shapes: K1 {0}x{0}, K12 {n}x{m}, K2 {1}x{1}",
            k1.n(),
            k2.n()
        )));
    }
    Ok(grand_mean(k1.values()) + grand_mean(k2.values()) - 2.0 * grand_mean(k12.values()))
}

/// C″_α from raw (unnormalized) K1, K12, K2.
///
/// The support check runs only when K1 and K2 have the same size and is
/// reported, not enforced.
pub fn tripartite_cross_entropy(
    k1: &GramMatrix,
    k12: &CrossGram,
    k2: &GramMatrix,
    alpha: Alpha,
) -> Result<CrossEntropyResult> {
    let cip = cross_information_potential(k1, k12, k2)?;
    let a = alpha.value();
    let k1n = normalize_trace(k1)?;
    let e1 = sym_eig(k1n.values())?;
    let mut clamp_count = clamps(&e1);
    let (powered, _) = e1.map_support(|l| l.powf(a));
    let entropy_term = checked_log(powered.iter().sum(), "tr(K1^a)", clamp_count)? / (a - 1.0);

    let support = if k1.n() == k2.n() {
        let e2 = sym_eig(k2.values())?;
        clamp_count += clamps(&e2);
        Some(support_from_eig(&e2, &sym_eig(k1.values())?, DEFAULT_SUPPORT_TOLERANCE)?)
    } else {
        None
    };

    let (value, degenerate) = if cip < CIP_FLOOR {
        let sentinel = if a > 1.0 { f64::NEG_INFINITY } else { f64::INFINITY };
        (sentinel, Some(Degeneracy::ZeroCip))
    } else {
        (cip.ln() / (a - 1.0) + entropy_term, None)
    };
    Ok(CrossEntropyResult {
        value,
        alpha: a,
        support,
        clamp_count,
        degenerate,
        cip: Some(cip),
        entropy_term: Some(entropy_term),
    })
}

fn entropy_of(k: &GramMatrix, alpha: Alpha) -> Result<f64> {
    let a = alpha.value();
    let e = sym_eig(k.values())?;
    if e.rank() == 0 {
        return Err(Error::Degenerate("entropy of a rank-zero matrix".into()));
    }
    let (powered, _) = e.map_support(|l| l.powf(a));
    Ok(checked_log(powered.iter().sum(), "tr(K^a)", clamps(&e))? / (1.0 - a))
}

/// S_α(K) = (1−α)⁻¹ log tr(K^α) for unit-trace K, so that S_α(I/n) = log n.
pub fn matrix_renyi_entropy(k: &GramMatrix, alpha: Alpha) -> Result<f64> {
    require_unit_trace(k, "K")?;
    entropy_of(k, alpha)
}

/// Entropy of the trace-normalized Hadamard product.
pub fn joint_entropy(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<f64> {
    entropy_of(&hadamard_joint(k1, k2)?, alpha)
}

/// S_α(K1, K2) − S_α(K2).
pub fn conditional_entropy(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<f64> {
    require_unit_trace(k1, "K1")?;
    Ok(joint_entropy(k1, k2, alpha)? - matrix_renyi_entropy(k2, alpha)?)
}

/// S_α(K1) − S_α(K1 | K2).
pub fn mutual_information(k1: &GramMatrix, k2: &GramMatrix, alpha: Alpha) -> Result<f64> {
    Ok(matrix_renyi_entropy(k1, alpha)? - conditional_entropy(k1, k2, alpha)?)
}

/// How the distance ω between K1 and K2 is measured in [`trace_distance_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMode {
    /// Σᵢⱼ |K1ᵢⱼ − K2ᵢⱼ|.
    #[default]
    Entrywise,
    /// Sum of absolute eigenvalues of K1 − K2.
    TraceNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceDistanceBounds {
    pub loose: f64,
    pub tight: f64,
    /// λ₁⁺·ω / min(λ₁, λ₂), the cap on `tight`.
    pub ceiling: f64,
    pub omega: f64,
}

/// Upper bounds on the Umegaki value in terms of ω and the minimal nonzero
/// eigenvalues λ₁ of K1 and λ₂ of K2 (λ₁⁺ is the largest eigenvalue of K1).
///
/// loose = (λ₂ + ω/2) log(1 + ω/2λ₂) − λ₁ log(1 + ω/2λ₁)
/// tight = ω λ₁⁺ (log λ₁ − log λ₂)/(λ₁ − λ₂), replaced by the ceiling when λ₁ ≈ λ₂.
pub fn trace_distance_bounds(k1: &GramMatrix, k2: &GramMatrix, mode: OmegaMode) -> Result<TraceDistanceBounds> {
    require_same_size(k1, k2)?;
    let e1 = sym_eig(k1.values())?;
    let e2 = sym_eig(k2.values())?;
    let (l1, l2) = match (e1.min_support_eigenvalue(), e2.min_support_eigenvalue()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Degenerate("trace-distance bounds need rank >= 1 inputs".into())),
    };
    let l1_max = e1.max_eigenvalue();
    let diff = k1.values() - k2.values();
    let omega: f64 = match mode {
        OmegaMode::Entrywise => diff.iter().map(|v| v.abs()).sum(),
        OmegaMode::TraceNorm => sym_eig(&symmetrize(&diff))?.eigenvalues().iter().map(|v| v.abs()).sum(),
    };
    let loose = (l2 + omega / 2.0) * (omega / (2.0 * l2)).ln_1p() - l1 * (omega / (2.0 * l1)).ln_1p();
    let ceiling = l1_max * omega / l1.min(l2);
    let tight = if (l1 - l2).abs() <= BOUND_EQUALITY_TOLERANCE {
        ceiling
    } else {
        omega * l1_max * (l1.ln() - l2.ln()) / (l1 - l2)
    };
    Ok(TraceDistanceBounds {
        loose,
        tight,
        ceiling,
        omega,
    })
}
