//! Homogenized elastic constants of 2D auxetic unit cells with orthogonal
//! voids, random-forest surrogates trained on them, and brute-force inverse
//! design on top of the surrogates.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] parameterizes the four void shapes and rasterizes a cell.
//! * [`elasticity`] holds the base material law and Voigt algebra.
//! * [`fft`] is the Galerkin FFT solver: rotated frequencies, projection,
//!   matrix-free MINRES and effective stiffness extraction.
//! * [`dataset`] samples the design space and writes training CSVs.
//! * [`forest`] is a from-scratch CART random forest.
//! * [`inverse`] searches the surrogate for target constants.
//! * [`sweep`] runs the one-parameter studies (onset of auxeticity,
//!   dataset-size error study).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results are
//! identical either way.

pub mod dataset;
pub mod elasticity;
pub mod error;
pub mod fft;
pub mod forest;
pub mod geometry;
pub mod inverse;
pub mod par;
pub mod sweep;

pub use elasticity::{BaseMaterial, EffectiveStiffness, Regime, VoigtMatrix3};
pub use error::{Error, Result};
pub use fft::{homogenize, HomogenizeOptions, Method};
pub use geometry::{PixelGrid, UnitCellSpec, VoidShape};
