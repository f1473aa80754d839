//! Polynomial curvelet Parseval frames on the unit sphere `S^{d-1}`, `d >= 3`.
//!
//! The library builds band-limited curvelet profiles from a window pair
//! `(phi, kappa)`, rotates them over product quadrature grids to obtain a
//! Parseval frame of polynomial atoms, and provides the closed forms needed
//! to verify the construction end to end: spectral admissibility, frame
//! energy conservation, spatial localization, `L^p` norm scaling,
//! auto-correlation curves, and edge-detection asymptotics for zonal test
//! signals with a jump in the `tau`-th derivative.
//!
//! Module map:
//!
//! * [`specfun`]  - log-gamma, Gegenbauer and Jacobi polynomials, harmonic
//!   space dimensions, and the normalization constants of the orthonormal
//!   harmonic basis.
//! * [`geometry`] - points on `S^{d-1}`, rotations, spherical coordinates,
//!   and the deterministic rotation conventions used by the frame grids.
//! * [`windows`]  - the window pair `(phi, kappa)` in its smooth-bump and
//!   polynomial-spline variants, with admissibility diagnostics.
//! * [`quadrature`] - Gauss-Jacobi rules and tensor-product rules on
//!   `S^{d-1}` exact on polynomials of a prescribed degree.
//! * [`harmonics`] - the explicit orthonormal basis of spherical harmonics
//!   in spherical coordinates, its index set, and Fourier analysis.
//! * [`curvelet`] - curvelet spectra, pointwise evaluation, profiles,
//!   localization ratios, and norm estimates.
//! * [`frames`]   - rotation grids, analysis and synthesis operators, and
//!   the band-limited reproduction operator.
//! * [`autocorr`] - closed-form auto-correlation of a curvelet under
//!   equatorial rotations, with a brute-force quadrature cross-check.
//! * [`edgelab`]  - zonal test signals, their Fourier coefficients in
//!   closed form, and curvelet coefficient scans across scale, polar
//!   offset, and orientation mismatch.

pub mod autocorr;
pub mod curvelet;
pub mod edgelab;
pub mod frames;
pub mod geometry;
pub mod harmonics;
pub mod quadrature;
pub mod specfun;
pub mod windows;

pub use curvelet::CurveletSpectrum;
pub use edgelab::{DetectionScan, ZonalTestSignal};
pub use frames::{FrameAtom, FrameGrid};
pub use geometry::{Rotation, SpherePoint};
pub use harmonics::HarmonicCoefficients;
pub use quadrature::QuadratureRule;
pub use specfun::HarmonicIndex;
pub use windows::{WindowKind, WindowPair};

/// Errors surfaced by fallible constructors and resource-bounded builders.
///
/// Pointwise numerical kernels (polynomial recurrences, pointwise
/// evaluation) are total over their documented domains and panic on
/// programmer errors instead of threading `Result` through hot loops.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
