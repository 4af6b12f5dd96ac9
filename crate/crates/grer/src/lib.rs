//! Directive, reciprocal diffuse-scattering models for ray tracing.
//!
//! This crate implements the reciprocal effective-roughness (RER) family of
//! diffuse scattering models: the legacy RER pattern with its exact
//! double-sum normalization, and the Gaussian-lobe variant (G-RER) whose
//! normalization admits a fast Legendre/Bessel series and a rational
//! approximation that removes series evaluation entirely.
//!
//! The crate is organized around a strict "two routes to every number"
//! discipline: every closed form in [`patterns`] is checked against the
//! brute-force hemispherical quadrature in [`oracle`], and frozen reference
//! values under `references/` are re-checked by [`refcheck`].
//!
//! Modules:
//!
//! - [`specfun`] — Legendre polynomials, exponentially scaled modified
//!   spherical Bessel functions, half-range Legendre moments `b_l`,
//!   combinatorial helpers.
//! - [`geometry`] — direction vectors, the specular reflection, and the lobe
//!   angle every pattern depends on.
//! - [`patterns`] — the RER and G-RER scattering patterns and all of their
//!   normalization routes.
//! - [`oracle`] — independent Gauss–Legendre hemisphere quadrature and the
//!   discrete least-squares projection used to validate the closed forms.
//! - [`scatter`] — scattered-power evaluation, Fresnel reflectivity,
//!   depolarization split, reciprocity residual.
//! - [`calib`] — multipath-component classification, synthetic dataset
//!   generation, and two-stage particle-swarm calibration.
//! - [`bench`] — term-count and wall-clock benchmark harness with CSV
//!   emitters for the standard sweeps.
//! - [`refcheck`] — frozen reference tables and drift detection.
//!
//! A narrative guide with runnable snippets lives in `book/`; the snippets
//! are compiled as doctests so the guide cannot drift from the API.

pub mod bench;
pub mod calib;
pub mod geometry;
pub mod oracle;
pub mod patterns;
pub mod refcheck;
pub mod scatter;
pub mod specfun;

pub use geometry::{ScatterGeometry, UnitVector3};
pub use patterns::{ModelParams, NormalizationMode, ScatteringModel};
pub use scatter::{LinkBudget, Material, Polarization};
pub use specfun::SeriesResult;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A degree/order exceeded the configured limit.
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeLimit { degree: u32, max: u32 },

    /// A result is not representable in `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A truncated series exhausted its term budget.
    #[error("series did not converge within {budget} terms")]
    NonConvergence { budget: usize },

    /// Quadrature refinement did not reach the requested tolerance.
    #[error("quadrature did not converge after {refinements} refinements")]
    QuadratureNonConvergence { refinements: u32 },

    /// Geometrically degenerate input (e.g. a ray parallel to the surface).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A model/normalization combination that is not defined.
    #[error("unsupported combination: {0}")]
    UnsupportedMode(String),

    /// Paired slices of different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A calibration dataset with no usable samples.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    /// Calibration bounds that do not describe a box.
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    /// Malformed input file or record.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

// Compile the book's code snippets as doctests so the guide stays in sync
// with the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(geometry, "../../../book/src/geometry.md");
    chapter!(patterns, "../../../book/src/patterns.md");
    chapter!(normalization, "../../../book/src/normalization.md");
    chapter!(special_functions, "../../../book/src/special-functions.md");
    chapter!(oracle, "../../../book/src/oracle.md");
    chapter!(power, "../../../book/src/power.md");
    chapter!(calibration, "../../../book/src/calibration.md");
    chapter!(benchmarks, "../../../book/src/benchmarks.md");
    chapter!(cli, "../../../book/src/cli.md");
}
