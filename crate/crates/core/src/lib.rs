//! Exact-diagonalization toolkit for the two-mode Bose-Josephson junction.
//!
//! Two tunnel-linked atomic condensates with a conserved total particle
//! number map onto a two-site Bose-Hubbard model. This crate builds that
//! Hamiltonian in the Fock basis, diagonalizes it, and evaluates the
//! Hermitian phase-coherence operators, relative-number statistics,
//! canonical-ensemble thermodynamics, and three approximation schemes
//! (variational Gaussian ansatz, two-level perturbation theory near
//! single-atom resonances, and a classical Boltzmann phase-space estimate).
//! A deterministic sweep engine with resonance/plateau detectors sits on
//! top and feeds the `bjj` command-line front end.
//!
//! All core math is generic over the floating scalar via [`Scalar`];
//! the concrete `f64` aliases below are what the sweep engine and the
//! CLI work with.

pub mod approx;
pub mod eigensolve;
mod error;
pub mod model;
pub mod observables;
mod scalar;
pub mod sweep;
pub mod thermal;

pub(crate) mod kahan;

pub use error::Error;
pub use scalar::Scalar;

/// Junction parameters in `f64`.
pub type Junction = model::JunctionParams<f64>;
/// Banded Hamiltonian in `f64`.
pub type Hamiltonian = model::TridiagonalHamiltonian<f64>;
/// Normalized real amplitude vector in `f64`.
pub type State = model::PureState<f64>;
/// Full eigendecomposition in `f64`.
pub type Spectrum = eigensolve::SpectralDecomposition<f64>;
/// Boltzmann ensemble over an `f64` spectrum.
pub type Ensemble<'a> = thermal::ThermalEnsemble<'a, f64>;

/// Convenience result type used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
