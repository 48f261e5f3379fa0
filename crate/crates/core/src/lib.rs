//! Matrix-based Rényi α-cross-entropy estimators built from kernel Gram matrices.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`kernels`] | kernel families, Gram and cross-Gram construction, trace normalization |
//! | [`psd_linalg`] | symmetric eigendecomposition, support-restricted powers and logs, support tests |
//! | [`estimators`] | non-mirrored, mirrored and tripartite cross-entropies, entropies, bounds |
//! | [`verification`] | seeded instances, pinching maps, the property suite |
//! | [`experiments`] | sweep runners, CSV input, result emission |
//!
//! ```
//! use gramxent::estimators::{nonmirrored_cross_entropy, Alpha};
//! use gramxent::kernels::{gram_univariate, normalize_trace, KernelSpec};
//! use gramxent::verification::standard_normal_samples;
//!
//! let spec = KernelSpec::gaussian(1.0)?;
//! let k1 = normalize_trace(&gram_univariate(&spec, &standard_normal_samples(1, 32, 3))?)?;
//! let k2 = normalize_trace(&gram_univariate(&spec, &standard_normal_samples(2, 32, 3))?)?;
//! let c = nonmirrored_cross_entropy(&k1, &k2, Alpha::new(2.0)?)?;
//! assert!(c.value >= 0.0);
//! # Ok::<(), gramxent::Error>(())
//! ```

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod kernels;
pub mod psd_linalg;
pub mod verification;

pub use error::{Error, Result};
pub use estimators::{Alpha, CrossEntropyResult};
pub use kernels::{CrossGram, GramMatrix, KernelFamily, KernelSpec, SampleSet};
