//! Fourier-side machinery on the unit torus: transforms, derivatives,
//! mode projections, inversion of the Voigt/bi-harmonic operator and
//! spectral mollification.
//!
//! Fields are expansions f(x) = sum_k a_k exp(2 pi i k.x) over the full
//! M x M wavenumber lattice; the k = 0 coefficient equals the grid mean.
//! Truncation to |k|_inf <= N is an explicit projection step.

mod fft;
mod field;
mod grid;

pub use field::{gradient, ScalarField, SymTensorField, VectorField};
pub use grid::TorusGrid;

/// Squared magnitude of the physical wavenumber, (2 pi |k|)^2.
pub(crate) fn ksq(kx: i64, ky: i64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    two_pi * two_pi * ((kx * kx + ky * ky) as f64)
}

/// Symbol of the Voigt/bi-harmonic mass operator 1 - a^2 Lap + b^4 Lap^2,
/// i.e. m(k) = 1 + a^2 (2 pi |k|)^2 + b^4 (2 pi |k|)^4. Always >= 1.
pub fn voigt_symbol(kx: i64, ky: i64, alpha: f64, beta: f64) -> f64 {
    let l = ksq(kx, ky);
    1.0 + alpha * alpha * l + beta.powi(4) * l * l
}
