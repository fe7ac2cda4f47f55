//! Numerical laboratory for weighted Bergman and Hardy spaces on the disk and
//! the upper half-plane.
//!
//! The crate computes moments and Carleson verdicts of radial and vertical
//! measures, weighted norms of truncated Fourier series, certified values of
//! the sum-space norm `‖·‖_{H_μ + L¹}` via a primal–dual splitting scheme, and
//! drives the inequality experiments built on top of them.

pub mod error;
pub mod halfplane;
pub mod harness;
pub mod measure;
pub mod quad;
pub mod report;
pub mod spaces;
pub mod spectral;
pub mod sumnorm;

pub use error::{Error, Result};
pub use measure::{LaplaceConvention, RadialMeasure, VerticalMeasure};
pub use spectral::{CoeffVector, GridFunction};
