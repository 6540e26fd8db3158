use crate::{Error, Result};

/// Uniform M x M collocation grid on the unit torus together with the
/// retained spectral order N (modes with |k|_inf <= N survive projection).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    m: usize,
    n: usize,
}

impl TorusGrid {
    /// Grid with `n` retained modes and `m` physical points per dimension.
    /// Requires `m` even and `m >= 2n + 2` so that quadratic products of
    /// truncated fields can be dealiased by padding.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Config(format!("N must be >= 1, got {n}")));
        }
        if m % 2 != 0 {
            return Err(Error::Config(format!("M must be even, got {m}")));
        }
        if m < 2 * n + 2 {
            return Err(Error::Config(format!(
                "M must be >= 2N + 2 (N = {n} needs M >= {}, got {m})",
                2 * n + 2
            )));
        }
        Ok(Self { m, n })
    }

    /// Default padding M = 4N, which fully dealiases quadratic products.
    pub fn with_default_padding(n: usize) -> Result<Self> {
        Self::new(n, (4 * n).max(2 * n + 2))
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    /// Number of grid points (and stored coefficients), M^2.
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed wavenumber for a raw FFT index: 0..=M/2 map to themselves,
    /// larger indices to negative frequencies.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        if idx <= self.m / 2 {
            idx as i64
        } else {
            idx as i64 - self.m as i64
        }
    }

    /// Physical coordinate x_j = j / M.
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    /// Row-major flat index of grid point (ix, iy).
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.m + ix
    }
}
