//! Pseudospectral solver and verification suite for the Kelvin-Voigt
//! elastic-viscous-plastic (EVP) sea-ice model on the 2D torus.
//!
//! The library is organised around a spectral Galerkin discretisation:
//! velocity and stress are trigonometric polynomials truncated at mode
//! order `N`, nonlinear terms are evaluated pointwise on an `M x M`
//! physical grid (`M >= 2N + 2`) and truncated back, and time stepping
//! is classical RK4. The [`diagnostics`] and [`experiments`] modules
//! turn the model's a priori estimates (stress L-infinity bound, energy
//! dissipation, symmetry invariance, continuous dependence) into
//! runtime checks and convergence studies.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod experiments;
pub mod forcing;
pub mod io;
pub mod rheology;
pub mod spectral;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("Hermitian symmetry violated (relative residue {residue:.3e})")]
    Hermitian { residue: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid or time mismatch: {0}")]
    Mismatch(String),
    #[error("instability detected at t = {t}: {what} = {value:.6e}")]
    Unstable { t: f64, what: &'static str, value: f64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
