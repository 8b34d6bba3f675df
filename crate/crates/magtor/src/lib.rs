//! Exact and floating-point analysis of translation-invariant magnetic
//! systems on flat even-dimensional tori ℤ^{2m}\ℝ^{2m}.
//!
//! A system pairs a flat metric (rational Gram matrix 𝐡, symmetric positive
//! definite) with an integral magnetic 2-form (integer skew-symmetric
//! nondegenerate Gram matrix 𝛚). On top of that datum the crate computes:
//!
//! - spectral signatures {d₁², …, d_m²} (the paired imaginary parts of the
//!   eigenvalues of F = 𝐡⁻¹𝛚) together with the symplectic volume √det 𝛚 —
//!   jointly a complete invariant for equality of the Landau spectra at
//!   every quantization level ([`spectra::quantum_equivalent`]);
//! - the Landau spectra themselves with exact multiplicities, and the
//!   inverse reconstruction of the signature from a spectrum
//!   ([`spectra::reconstruct_signature`]);
//! - Chern invariant factors of 𝛚 over ℤ and the induced obstruction to the
//!   twisted cotangent phase spaces being symplectomorphic
//!   ([`normal_form::phase_space_obstruction`]);
//! - Kähler detection ([`spectra::is_kahler`]);
//! - explicit linear symplectomorphisms of T*M preserving the kinetic-energy
//!   Hamiltonian, closed-form magnetic flows, isospectral metric
//!   deformations, and truncated length spectra certifying non-isometry
//!   (module [`classical`]).
//!
//! Algebraic identities are verified in exact arithmetic (`BigInt` /
//! `BigRational`); only eigenvalue extraction and spectra use binary64.

pub mod classical;
pub mod demo;
pub mod io;
pub mod linalg;
pub mod model;
pub mod normal_form;
pub mod spectra;

pub use model::{MetricGram, SpectralSignature, SymplecticGram, TorusMagneticSystem};

/// Default relative tolerance for floating-point comparisons.
///
/// Overridable in every operation that compares binary64 quantities; exact
/// (rational/integer) identities take no tolerance at all.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {0} is not even and positive")]
    OddDimension(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("metric is not symmetric")]
    MetricNotSymmetric,
    #[error("metric is not positive definite: leading principal minor of order {order} is not positive")]
    MetricNotPositiveDefinite { order: usize },
    #[error("magnetic form is not skew-symmetric")]
    MagneticNotSkew,
    #[error("magnetic form is degenerate (zero determinant)")]
    MagneticDegenerate,
    #[error("singular values failed to pair at index {index}: relative gap {gap:e}")]
    PairingFailure { index: usize, gap: f64 },
    #[error("{0} is not a perfect square")]
    NotPerfectSquare(String),
    #[error("symplectic volume {0} is not within tolerance of a positive integer")]
    NonIntegralVolume(f64),
    #[error("no Landau level fits under cutoff {0}")]
    CutoffTooSmall(f64),
    #[error("spectrum is truncated before reconstruction could finish: {0}")]
    InsufficientCutoff(String),
    #[error("spectrum is inconsistent: {0}")]
    InconsistentSpectrum(String),
    #[error("transform is not a linear symplectomorphism of the given magnetic form")]
    NotSymplectic,
    #[error("transform is singular")]
    SingularTransform,
    #[error("matrix is not invertible")]
    Singular,
    #[error("lattice enumeration too large: {candidates} candidates exceed limit {limit}")]
    BoundTooLarge { candidates: u128, limit: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
