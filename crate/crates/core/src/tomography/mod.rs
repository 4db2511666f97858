//! Projective state tomography on truncated HG mode subspaces.
//!
//! Each photon is measured in `d` modes (`d = 3`: HG00, HG10, HG01; `d = 6`
//! adds HG20, HG11, HG02). Measurement kets are eigenvectors of the
//! generalized Gell-Mann matrices; the density matrix is fitted by
//! minimizing Pearson's chi-squared over a Cholesky parametrization.

mod gell_mann;
mod measurement;
mod reconstruct;
mod state;

pub use gell_mann::{gell_mann_basis, hermitian_basis};
pub use measurement::{
    born_probability, projector_set, projector_set_with, simulate_counts, MeasurementRecord, Noise, ProjectorScheme,
    ProjectorSet,
};
pub use reconstruct::{
    chi2, chi2_with_gradient, linear_inversion, reconstruct, CholeskyParams, Diagnostics, InitialGuess, Reconstruction,
    ReconstructionConfig, PROBABILITY_FLOOR,
};
pub use state::{bell_density, fidelity, product_labels, subspace_modes, DensityMatrix};
