//! Eigenvector inversion statistics for a two-level system resonantly
//! coupled to a banded environment.
//!
//! The toolkit works on the energy-conserving "cross-state" subspace spanned
//! by `|0, band k'>` and `|1, band k>`. For any Hamiltonian on that subspace
//! it computes the inversion `lambda = |beta|^2 - |alpha|^2` carried by each
//! energy eigenvector, and from the variance of those inversions predicts the
//! long-time inversion of the two-level system:
//!
//! ```text
//! <sigma_z>_eq = (g - g')/(g + g') + (g + g')/(2g) * Var(lambda)
//! ```
//!
//! Modules:
//!
//! - [`subspace`]: band pairs, cross-state basis ordering, canonical closed forms
//! - [`ensembles`]: GUE and block-structured random Hamiltonians
//! - [`spinbath`]: spin-star / spin-ring environments and their projection
//! - [`analysis`]: eigendecomposition, inversion statistics, analytic GUE density, `V_R`
//! - [`dynamics`]: spectral time evolution and diagonal-ensemble averages
//! - [`family`]: named Hamiltonian families with seeded construction

pub mod analysis;
pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod family;
pub mod spinbath;
pub mod subspace;

pub use error::{Error, Result};

/// Complex scalar used throughout (identical to `num_complex::Complex64`).
pub use faer::c64;
