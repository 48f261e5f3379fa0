//! C ABI over the `gramxent` estimators.
//!
//! Objects cross the boundary as opaque handles created by `gx_*_new` style
//! constructors and released with the matching `gx_*_free`. Every fallible
//! function returns a [`GxStatus`]; on failure a message describing the
//! error is kept per thread and can be read with [`gx_last_error_message`].
//! Panics never unwind into C: they are caught and reported as
//! [`GxStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gramxent::estimators::{
    cross_information_potential, matrix_renyi_entropy, mirrored_cross_entropy, mirrored_cross_entropy_raw,
    mirrored_cross_entropy_two_param, mirrored_limit_umegaki, nonmirrored_cross_entropy,
    nonmirrored_cross_entropy_raw, tripartite_cross_entropy,
};
use gramxent::kernels::{gram_cross, gram_univariate, normalize_trace};
use gramxent::{Alpha, CrossEntropyResult, CrossGram, Error, GramMatrix, KernelFamily, KernelSpec, SampleSet};
use nalgebra::DMatrix;

/// Result code of every fallible call; `Ok` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Overflow = 3,
    Degenerate = 4,
    Contract = 5,
    AlphaNearOne = 6,
    Numerical = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GxKernelFamily {
    Gaussian = 0,
    ExponentialInnerProduct = 1,
}

/// Value of a cross-entropy estimate plus its diagnostics.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GxEstimate {
    /// May be +inf (support failure) or -inf (vanishing CIP with alpha > 1).
    pub value: f64,
    /// Eigenvalues clamped to zero while forming matrix functions.
    pub clamp_count: usize,
    /// Nonzero when a support check ran; the next two fields are then meaningful.
    pub support_checked: i32,
    pub support_included: i32,
    pub support_residual: f64,
    /// Nonzero when the cross-information potential underflowed.
    pub zero_cip: i32,
}

/// Row-major sample matrix, n points of dimension d.
pub struct GxSampleSet(SampleSet);

/// Symmetric positive semidefinite Gram matrix.
pub struct GxGram(GramMatrix);

/// Rectangular cross-Gram matrix between two sample sets.
pub struct GxCrossGram(CrossGram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GxStatus {
    match err {
        Error::Argument(_) | Error::Parse { .. } => GxStatus::InvalidArgument,
        Error::Overflow { .. } => GxStatus::Overflow,
        Error::Degenerate(_) => GxStatus::Degenerate,
        Error::Contract(_) => GxStatus::Contract,
        Error::AlphaNearOne(_) => GxStatus::AlphaNearOne,
        Error::Numerical { .. } => GxStatus::Numerical,
        Error::Io { .. } => GxStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GxStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            GxStatus::NullPointer
        }
        Ok(Err(Failure::Lib(err))) => {
            set_last_error(err.to_string());
            status_of(&err)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            set_last_error(format!("internal panic: {msg}"));
            GxStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn checked_len(a: usize, b: usize) -> Result<usize, Failure> {
    a.checked_mul(b)
        .ok_or_else(|| Failure::Lib(Error::Argument(format!("size {a} x {b} overflows"))))
}

fn kernel(family: GxKernelFamily, bandwidth: f64) -> Result<KernelSpec, Failure> {
    let family = match family {
        GxKernelFamily::Gaussian => KernelFamily::Gaussian,
        GxKernelFamily::ExponentialInnerProduct => KernelFamily::ExponentialInnerProduct,
    };
    Ok(KernelSpec::new(family, bandwidth)?)
}

fn estimate(r: &CrossEntropyResult) -> GxEstimate {
    GxEstimate {
        value: r.value,
        clamp_count: r.clamp_count,
        support_checked: r.support.is_some() as i32,
        support_included: r.support.as_ref().is_some_and(|s| s.included) as i32,
        support_residual: r.support.as_ref().map_or(0.0, |s| s.residual),
        zero_cip: r.degenerate.is_some() as i32,
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the most recent failed call on this thread, or NULL if the
/// last call succeeded. The pointer stays valid until the next `gx_*` call
/// on the same thread.
#[no_mangle]
pub extern "C" fn gx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `n * d` row-major values into a new sample set.
///
/// # Safety
/// `data` must point to `n * d` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_sample_set_new(
    data: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut GxSampleSet,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let values = slice(data, checked_len(n, d)?, "data")?;
        *out = boxed(GxSampleSet(SampleSet::from_flat(n, d, values.to_vec())?));
        Ok(())
    })
}

/// # Safety
/// `set` must be NULL or a handle from `gx_sample_set_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gx_sample_set_free(set: *mut GxSampleSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Gram matrix of `samples` under the given kernel (raw, not normalized).
///
/// # Safety
/// `samples` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_new(
    family: GxKernelFamily,
    bandwidth: f64,
    samples: *const GxSampleSet,
    out: *mut *mut GxGram,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = kernel(family, bandwidth)?;
        let samples = deref(samples, "samples")?;
        *out = boxed(GxGram(gram_univariate(&spec, &samples.0)?));
        Ok(())
    })
}

/// Wraps an n x n row-major symmetric PSD matrix.
///
/// # Safety
/// `data` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_from_values(data: *const f64, n: usize, out: *mut *mut GxGram) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let values = slice(data, checked_len(n, n)?, "data")?;
        *out = boxed(GxGram(GramMatrix::from_matrix(DMatrix::from_row_slice(n, n, values))?));
        Ok(())
    })
}

/// New handle holding `gram / trace(gram)`.
///
/// # Safety
/// `gram` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_normalize_trace(gram: *const GxGram, out: *mut *mut GxGram) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let gram = deref(gram, "gram")?;
        *out = boxed(GxGram(normalize_trace(&gram.0)?));
        Ok(())
    })
}

/// Side length of the matrix, 0 for NULL.
///
/// # Safety
/// `gram` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_size(gram: *const GxGram) -> usize {
    gram.as_ref().map_or(0, |g| g.0.n())
}

/// Copies the matrix row-major into `buf`, which must hold `len >= n * n` doubles.
///
/// # Safety
/// `gram` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_copy_values(gram: *const GxGram, buf: *mut f64, len: usize) -> GxStatus {
    guard(|| {
        let gram = deref(gram, "gram")?;
        let n = gram.0.n();
        if len < n * n {
            return Err(Error::Argument(format!("buffer holds {len} values, need {}", n * n)).into());
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = gram.0.values()[(i, j)];
            }
        }
        Ok(())
    })
}

/// # Safety
/// `gram` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gx_gram_free(gram: *mut GxGram) {
    if !gram.is_null() {
        drop(Box::from_raw(gram));
    }
}

/// Cross-Gram matrix k(x_i, y_j) between two sample sets of equal dimension.
///
/// # Safety
/// `x` and `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_cross_gram_new(
    family: GxKernelFamily,
    bandwidth: f64,
    x: *const GxSampleSet,
    y: *const GxSampleSet,
    out: *mut *mut GxCrossGram,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = kernel(family, bandwidth)?;
        let (x, y) = (deref(x, "x")?, deref(y, "y")?);
        *out = boxed(GxCrossGram(gram_cross(&spec, &x.0, &y.0)?));
        Ok(())
    })
}

/// # Safety
/// `cross` must be NULL or a handle from `gx_cross_gram_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gx_cross_gram_free(cross: *mut GxCrossGram) {
    if !cross.is_null() {
        drop(Box::from_raw(cross));
    }
}

unsafe fn bipartite(
    k1: *const GxGram,
    k2: *const GxGram,
    alpha: f64,
    out: *mut GxEstimate,
    f: fn(&GramMatrix, &GramMatrix, Alpha) -> gramxent::Result<CrossEntropyResult>,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (k1, k2) = (deref(k1, "k1")?, deref(k2, "k2")?);
        *out = estimate(&f(&k1.0, &k2.0, Alpha::new(alpha)?)?);
        Ok(())
    })
}

/// Non-mirrored cross-entropy of unit-trace `k1`, `k2`.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_nonmirrored(
    k1: *const GxGram,
    k2: *const GxGram,
    alpha: f64,
    out: *mut GxEstimate,
) -> GxStatus {
    bipartite(k1, k2, alpha, out, nonmirrored_cross_entropy)
}

/// Non-mirrored cross-entropy for Grams of arbitrary positive trace.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_nonmirrored_raw(
    k1: *const GxGram,
    k2: *const GxGram,
    alpha: f64,
    out: *mut GxEstimate,
) -> GxStatus {
    bipartite(k1, k2, alpha, out, nonmirrored_cross_entropy_raw)
}

/// Mirrored cross-entropy of unit-trace `k1`, `k2`.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_mirrored(k1: *const GxGram, k2: *const GxGram, alpha: f64, out: *mut GxEstimate) -> GxStatus {
    bipartite(k1, k2, alpha, out, mirrored_cross_entropy)
}

/// Mirrored cross-entropy for Grams of arbitrary positive trace.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_mirrored_raw(
    k1: *const GxGram,
    k2: *const GxGram,
    alpha: f64,
    out: *mut GxEstimate,
) -> GxStatus {
    bipartite(k1, k2, alpha, out, mirrored_cross_entropy_raw)
}

/// Two-parameter mirrored cross-entropy; `beta == alpha` matches `gx_mirrored`.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_mirrored_two_param(
    k1: *const GxGram,
    k2: *const GxGram,
    alpha: f64,
    beta: f64,
    out: *mut GxEstimate,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (k1, k2) = (deref(k1, "k1")?, deref(k2, "k2")?);
        *out = estimate(&mirrored_cross_entropy_two_param(&k1.0, &k2.0, Alpha::new(alpha)?, beta)?);
        Ok(())
    })
}

/// Umegaki relative entropy tr(k1 (log k1 - log k2)), the alpha -> 1 limit.
///
/// # Safety
/// `k1`, `k2` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_umegaki(k1: *const GxGram, k2: *const GxGram, out: *mut GxEstimate) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (k1, k2) = (deref(k1, "k1")?, deref(k2, "k2")?);
        *out = estimate(&mirrored_limit_umegaki(&k1.0, &k2.0)?);
        Ok(())
    })
}

/// Tripartite cross-entropy from raw Grams `k1` (n x n), `k12` (n x m), `k2` (m x m).
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_tripartite(
    k1: *const GxGram,
    k12: *const GxCrossGram,
    k2: *const GxGram,
    alpha: f64,
    out: *mut GxEstimate,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (k1, k12, k2) = (deref(k1, "k1")?, deref(k12, "k12")?, deref(k2, "k2")?);
        *out = estimate(&tripartite_cross_entropy(&k1.0, &k12.0, &k2.0, Alpha::new(alpha)?)?);
        Ok(())
    })
}

/// Cross-information potential mean(k1) + mean(k2) - 2 mean(k12).
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_cross_information_potential(
    k1: *const GxGram,
    k12: *const GxCrossGram,
    k2: *const GxGram,
    out: *mut f64,
) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (k1, k12, k2) = (deref(k1, "k1")?, deref(k12, "k12")?, deref(k2, "k2")?);
        *out = cross_information_potential(&k1.0, &k12.0, &k2.0)?;
        Ok(())
    })
}

/// Matrix-based Renyi entropy of a unit-trace Gram.
///
/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_renyi_entropy(k: *const GxGram, alpha: f64, out: *mut f64) -> GxStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let k = deref(k, "k")?;
        *out = matrix_renyi_entropy(&k.0, Alpha::new(alpha)?)?;
        Ok(())
    })
}
