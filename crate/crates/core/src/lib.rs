//! Spatial two-photon states from spontaneous parametric down-conversion
//! pumped by structured Hermite-Gaussian beams.
//!
//! The crate is `no_std` (with `alloc`) and covers the whole numerical
//! pipeline:
//!
//! - [`hermite`]: Hermite polynomials and normalized HG mode functions.
//! - [`quadrature`]: Gauss-Hermite rules rescaled to transverse wavenumbers.
//! - [`biphoton`]: the biphoton amplitude and its decomposition into the
//!   HG product basis, for Gaussian and sinc phase matching.
//! - [`schmidt`]: Schmidt spectra and Schmidt numbers (SVD, closed form,
//!   modified closed form, diagonal estimator).
//! - [`bell`]: the {HG00, HG10} qubit subspace, CHSH and the mirror transform.
//! - [`tomography`]: Gell-Mann projector sets, chi-squared reconstruction over
//!   a Cholesky parametrization and Uhlmann fidelity.
//! - [`pump`]: pump synthesis for the correlated Bell states.
//!
//! Enable the `std` feature to route float math through `std` instead of
//! `libm`.
#![no_std]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bell;
pub mod biphoton;
mod error;
pub mod hermite;
pub mod linalg;
pub mod optimize;
pub mod pump;
pub mod quadrature;
pub mod schmidt;
pub mod tomography;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
