//! Symmetric eigendecomposition and spectral functions of PSD matrices.
//!
//! Eigenvalues at or below τ = n·ε_mach·λ_max are treated as zero. Powers and
//! logarithms act on the remaining support only: off-support eigenvalues map to
//! 0 for every exponent (negative powers are pseudo-inverses), and the number of
//! clamped eigenvalues is returned alongside every result.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{argument, Error, Result};
use crate::kernels::SYMMETRY_TOLERANCE;

/// Default Frobenius tolerance for [`support_included`].
pub const DEFAULT_SUPPORT_TOLERANCE: f64 = 1e-8;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Largest |a_ij − a_ji| over the matrix.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// (M + Mᵀ)/2 with the lower triangle mirrored from the upper, so the result is bit-exactly symmetric.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = m.clone();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    let (r, c) = m.shape();
    if r == 0 || r != c {
        return Err(argument(format!("expected a non-empty square matrix, got {r}x{c}")));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Eigenvalues in descending order; small negative values are kept as computed.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal columns aligned with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// τ = n·ε_mach·max(λ_max, 0).
    pub fn clamp_threshold(&self) -> f64 {
        self.n() as f64 * f64::EPSILON * self.max_eigenvalue().max(0.0)
    }

    /// Number of eigenvalues above the clamp threshold.
    pub fn rank(&self) -> usize {
        let tau = self.clamp_threshold();
        self.eigenvalues.iter().filter(|&&l| l > tau).count()
    }

    /// Smallest eigenvalue above the clamp threshold.
    pub fn min_support_eigenvalue(&self) -> Option<f64> {
        let r = self.rank();
        (r > 0).then(|| self.eigenvalues[r - 1])
    }

    /// V·diag(values)·Vᵀ.
    pub fn reconstruct_with(&self, values: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &v) in scaled.column_iter_mut().zip(values) {
            col *= v;
        }
        symmetrize(&(scaled * self.eigenvectors.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.reconstruct_with(self.eigenvalues.as_slice())
    }

    /// Applies `f` to the support eigenvalues and 0 elsewhere; returns the new
    /// spectrum and the number of clamped eigenvalues.
    pub fn map_support(&self, f: impl Fn(f64) -> f64) -> (Vec<f64>, usize) {
        let tau = self.clamp_threshold();
        let mut clamped = 0;
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| {
                if l > tau {
                    f(l)
                } else {
                    clamped += 1;
                    0.0
                }
            })
            .collect();
        (values, clamped)
    }

    /// Columns of V spanning the numerical support.
    pub fn support_basis(&self) -> DMatrix<f64> {
        self.eigenvectors.columns(0, self.rank()).into_owned()
    }

    /// Columns of V spanning the numerical nullspace.
    pub fn null_basis(&self) -> DMatrix<f64> {
        let r = self.rank();
        self.eigenvectors.columns(r, self.n() - r).into_owned()
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    check_square(m)?;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(argument("matrix has non-finite entries"));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(argument(format!(
            "matrix is not symmetric: max |a_ij - a_ji| = {asym:e}"
        )));
    }
    let eig = SymmetricEigen::try_new(symmetrize(m), f64::EPSILON, EIGEN_MAX_ITERATIONS).ok_or_else(|| {
        Error::Numerical {
            message: "symmetric eigensolver did not converge".into(),
            clamp_count: 0,
        }
    })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = DMatrix::from_fn(order.len(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// A spectral function of a matrix with its clamp diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    pub matrix: DMatrix<f64>,
    pub clamp_count: usize,
}

/// G^p restricted to the numerical support of G.
pub fn matrix_power(m: &DMatrix<f64>, p: f64) -> Result<SpectralMatrix> {
    power_from_eig(&sym_eig(m)?, p)
}

pub fn power_from_eig(eig: &EigenDecomposition, p: f64) -> Result<SpectralMatrix> {
    if !p.is_finite() {
        return Err(argument(format!("exponent must be finite, got {p}")));
    }
    if p < 0.0 && eig.rank() == 0 {
        return Err(Error::Degenerate("negative power of a rank-zero matrix".into()));
    }
    let (values, clamp_count) = eig.map_support(|l| l.powf(p));
    Ok(SpectralMatrix {
        matrix: eig.reconstruct_with(&values),
        clamp_count,
    })
}

/// log G on the support of G, 0 on its nullspace.
pub fn matrix_log(m: &DMatrix<f64>) -> Result<SpectralMatrix> {
    log_from_eig(&sym_eig(m)?)
}

pub fn log_from_eig(eig: &EigenDecomposition) -> Result<SpectralMatrix> {
    if eig.rank() == 0 {
        return Err(Error::Degenerate("logarithm of a rank-zero matrix".into()));
    }
    let (values, clamp_count) = eig.map_support(f64::ln);
    Ok(SpectralMatrix {
        matrix: eig.reconstruct_with(&values),
        clamp_count,
    })
}

/// Outcome of a support-inclusion test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SupportReport {
    /// Numerical rank of the enclosing matrix.
    pub rank_1: usize,
    /// Numerical rank of the enclosed matrix.
    pub rank_2: usize,
    pub included: bool,
    /// ‖P₀·U₂‖_F: P₀ projects onto the enclosing matrix's nullspace, U₂ spans the enclosed range.
    pub residual: f64,
    pub tolerance: f64,
}

/// Tests whether the range of `inner` lies in the support of `outer`.
pub fn support_included(inner: &DMatrix<f64>, outer: &DMatrix<f64>, tol: f64) -> Result<SupportReport> {
    if inner.shape() != outer.shape() {
        return Err(argument(format!(
            "support test needs equal shapes, got {:?} and {:?}",
            inner.shape(),
            outer.shape()
        )));
    }
    support_from_eig(&sym_eig(inner)?, &sym_eig(outer)?, tol)
}

pub fn support_from_eig(inner: &EigenDecomposition, outer: &EigenDecomposition, tol: f64) -> Result<SupportReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(argument(format!("support tolerance must be positive, got {tol}")));
    }
    if inner.n() != outer.n() {
        return Err(argument(format!(
            "support test needs equal sizes, got {} and {}",
            inner.n(),
            outer.n()
        )));
    }
    let null = outer.null_basis();
    let range = inner.support_basis();
    let residual = if null.ncols() == 0 || range.ncols() == 0 {
        0.0
    } else {
        (null.transpose() * range).norm()
    };
    Ok(SupportReport {
        rank_1: outer.rank(),
        rank_2: inner.rank(),
        included: residual <= tol,
        residual,
        tolerance: tol,
    })
}

/// tr(AB) for symmetric A, B as Σᵢⱼ AᵢⱼBᵢⱼ.
pub fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(argument(format!(
            "trace product needs equal shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y).sum())
}
