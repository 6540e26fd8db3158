use num_complex::Complex64;

use super::fft::{fft2_forward, fft2_inverse};
use super::grid::TorusGrid;
use super::{ksq, voigt_symbol};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// Real scalar field on the torus, stored as complex Fourier coefficients
/// a_k over the full M x M wavenumber lattice (Hermitian-symmetric).
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Forward transform of M x M physical samples. The k = 0 coefficient
    /// equals the grid mean; Hermitian symmetry is enforced exactly.
    pub fn from_physical(grid: TorusGrid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        let mut coeffs: Vec<Complex64> =
            samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        fft2_forward(&mut coeffs, grid.points());
        let inv_mm = 1.0 / grid.len() as f64;
        for c in &mut coeffs {
            *c *= inv_mm;
        }
        let mut field = Self { grid, coeffs };
        field.symmetrize_hermitian();
        Ok(field)
    }

    /// Inverse transform to M x M physical samples. Fails if the stored
    /// coefficients violate Hermitian symmetry (non-real field), which
    /// signals upstream corruption.
    pub fn to_physical(&self) -> Result<Vec<f64>> {
        let mut data = self.coeffs.clone();
        fft2_inverse(&mut data, self.grid.points());
        let mut max_im: f64 = 0.0;
        let mut sumsq = 0.0;
        for c in &data {
            max_im = max_im.max(c.im.abs());
            sumsq += c.norm_sqr();
        }
        let scale = (sumsq / self.grid.len() as f64).sqrt().max(f64::MIN_POSITIVE);
        if max_im > HERMITIAN_TOL * scale.max(1e-300) && max_im > 1e-300 {
            return Err(Error::Hermitian {
                residue: max_im / scale,
            });
        }
        Ok(data.into_iter().map(|c| c.re).collect())
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of mode (kx, ky); wavenumbers may be negative.
    pub fn mode(&self, kx: i64, ky: i64) -> Complex64 {
        let m = self.grid.points() as i64;
        let ix = kx.rem_euclid(m) as usize;
        let iy = ky.rem_euclid(m) as usize;
        self.coeffs[self.grid.index(ix, iy)]
    }

    /// Set a_k = c and a_{-k} = conj(c), keeping the field real.
    pub fn set_mode_pair(&mut self, kx: i64, ky: i64, c: Complex64) {
        let m = self.grid.points() as i64;
        let i = self.grid.index(kx.rem_euclid(m) as usize, ky.rem_euclid(m) as usize);
        let j = self
            .grid
            .index((-kx).rem_euclid(m) as usize, (-ky).rem_euclid(m) as usize);
        if i == j {
            self.coeffs[i] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[i] = c;
            self.coeffs[j] = c.conj();
        }
    }

    /// Add amp * cos(2 pi k.x + phase) to the field.
    pub fn add_cos_mode(&mut self, kx: i64, ky: i64, amp: f64, phase: f64) {
        let m = self.grid.points() as i64;
        let i = self.grid.index(kx.rem_euclid(m) as usize, ky.rem_euclid(m) as usize);
        let j = self
            .grid
            .index((-kx).rem_euclid(m) as usize, (-ky).rem_euclid(m) as usize);
        let half = 0.5 * amp * Complex64::new(phase.cos(), phase.sin());
        if i == j {
            self.coeffs[i] += Complex64::new(amp * phase.cos(), 0.0);
        } else {
            self.coeffs[i] += half;
            self.coeffs[j] += half.conj();
        }
    }

    fn symmetrize_hermitian(&mut self) {
        let m = self.grid.points();
        for iy in 0..m {
            let jy = (m - iy) % m;
            for ix in 0..m {
                let jx = (m - ix) % m;
                let i = self.grid.index(ix, iy);
                let j = self.grid.index(jx, jy);
                if i == j {
                    self.coeffs[i].im = 0.0;
                } else if i < j {
                    let avg = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
                    self.coeffs[i] = avg;
                    self.coeffs[j] = avg.conj();
                }
            }
        }
    }

    /// Apply a per-mode multiplier g(kx, ky). The caller must keep the
    /// multiplier compatible with reality (g(-k) = conj(g(k))).
    pub fn scale_modes(&mut self, g: impl Fn(i64, i64) -> Complex64) {
        let m = self.grid.points();
        for iy in 0..m {
            let ky = self.grid.wavenumber(iy);
            for ix in 0..m {
                let kx = self.grid.wavenumber(ix);
                self.coeffs[self.grid.index(ix, iy)] *= g(kx, ky);
            }
        }
    }

    /// Zero all coefficients with |k|_inf > n. Idempotent, self-adjoint
    /// and norm-nonincreasing in the discrete L2 inner product.
    pub fn project(&mut self, n: usize) {
        let n = n as i64;
        self.scale_modes(|kx, ky| {
            if kx.abs() > n || ky.abs() > n {
                Complex64::default()
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
    }

    /// Truncate to order `n` and re-tag the grid accordingly, so fields
    /// computed at different mode orders over the same physical grid can
    /// be combined.
    pub fn retruncate(&mut self, n: usize) -> Result<()> {
        let grid = TorusGrid::new(n, self.grid.points())?;
        self.project(n);
        self.grid = grid;
        Ok(())
    }

    /// Spectral mollification: Gaussian multiplier exp(-delta^2 (2 pi |k|)^2 / 2).
    /// delta = 0 is the identity; the mean is always preserved.
    pub fn mollify(&mut self, delta: f64) -> Result<()> {
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mollification radius must be >= 0, got {delta}"
            )));
        }
        if delta == 0.0 {
            return Ok(());
        }
        let d2 = delta * delta;
        self.scale_modes(|kx, ky| Complex64::new((-0.5 * d2 * ksq(kx, ky)).exp(), 0.0));
        Ok(())
    }

    /// Partial derivative along `axis` (0 = x1, 1 = x2): multiplier 2 pi i k_axis.
    /// The unmatched Nyquist frequency is zeroed to keep the result real.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < 2, "axis must be 0 or 1");
        let mut out = self.clone();
        let half = (self.grid.points() / 2) as i64;
        out.scale_modes(|kx, ky| {
            let k = if axis == 0 { kx } else { ky };
            if k == half {
                Complex64::default()
            } else {
                Complex64::new(0.0, std::f64::consts::TAU * k as f64)
            }
        });
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.clone();
        out.scale_modes(|kx, ky| Complex64::new(-ksq(kx, ky), 0.0));
        out
    }

    /// Apply (1 - alpha^2 Lap + beta^4 Lap^2)^{-1} modewise.
    pub fn invert_voigt(&self, alpha: f64, beta: f64) -> Self {
        let mut out = self.clone();
        out.scale_modes(|kx, ky| Complex64::new(1.0 / voigt_symbol(kx, ky, alpha, beta), 0.0));
        out
    }

    /// Forward multiplier of `invert_voigt` (used for round-trip checks).
    pub fn voigt_multiply(&self, alpha: f64, beta: f64) -> Self {
        let mut out = self.clone();
        out.scale_modes(|kx, ky| Complex64::new(voigt_symbol(kx, ky, alpha, beta), 0.0));
        out
    }

    /// Discrete L2 norm via Parseval: sqrt(sum_k |a_k|^2).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Homogeneous Sobolev seminorm of order `p`: sqrt(sum (2 pi |k|)^{2p} |a_k|^2).
    pub fn seminorm(&self, p: u32) -> f64 {
        let m = self.grid.points();
        let mut sum = 0.0;
        for iy in 0..m {
            let ky = self.grid.wavenumber(iy);
            for ix in 0..m {
                let kx = self.grid.wavenumber(ix);
                sum += ksq(kx, ky).powi(p as i32)
                    * self.coeffs[self.grid.index(ix, iy)].norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Inhomogeneous Sobolev norm with multiplier (1 + (2 pi |k|)^2)^{s/2}.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let m = self.grid.points();
        let mut sum = 0.0;
        for iy in 0..m {
            let ky = self.grid.wavenumber(iy);
            for ix in 0..m {
                let kx = self.grid.wavenumber(ix);
                sum += (1.0 + ksq(kx, ky)).powf(s)
                    * self.coeffs[self.grid.index(ix, iy)].norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Maximum of |f| over the physical grid.
    pub fn linf_norm(&self) -> Result<f64> {
        Ok(self
            .to_physical()?
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs())))
    }

    /// Mean of the field over the torus (the k = 0 coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.coeffs {
            *a *= c;
        }
    }

    pub fn diff(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    /// Discrete L2 inner product <f, g>.
    pub fn l2_inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Two-component real vector field with spectral representation.
#[derive(Clone, Debug)]
pub struct VectorField(pub [ScalarField; 2]);

impl std::ops::Index<usize> for VectorField {
    type Output = ScalarField;
    fn index(&self, i: usize) -> &ScalarField {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for VectorField {
    fn index_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.0[i]
    }
}

impl VectorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self([ScalarField::zeros(grid), ScalarField::zeros(grid)])
    }

    pub fn grid(&self) -> TorusGrid {
        self.0[0].grid()
    }

    pub fn from_physical(grid: TorusGrid, samples: &[Vec<f64>; 2]) -> Result<Self> {
        Ok(Self([
            ScalarField::from_physical(grid, &samples[0])?,
            ScalarField::from_physical(grid, &samples[1])?,
        ]))
    }

    pub fn to_physical(&self) -> Result<[Vec<f64>; 2]> {
        Ok([self.0[0].to_physical()?, self.0[1].to_physical()?])
    }

    /// Rotation by pi/2: v_perp = (-v2, v1).
    pub fn perp(&self) -> Self {
        let mut c0 = self.0[1].clone();
        c0.scale(-1.0);
        Self([c0, self.0[0].clone()])
    }

    pub fn divergence(&self) -> ScalarField {
        let mut out = self.0[0].derivative(0);
        out.add_scaled(1.0, &self.0[1].derivative(1));
        out
    }

    pub fn laplacian(&self) -> Self {
        Self([self.0[0].laplacian(), self.0[1].laplacian()])
    }

    pub fn project(&mut self, n: usize) {
        self.0[0].project(n);
        self.0[1].project(n);
    }

    pub fn mollify(&mut self, delta: f64) -> Result<()> {
        self.0[0].mollify(delta)?;
        self.0[1].mollify(delta)
    }

    pub fn retruncate(&mut self, n: usize) -> Result<()> {
        self.0[0].retruncate(n)?;
        self.0[1].retruncate(n)
    }

    pub fn invert_voigt(&self, alpha: f64, beta: f64) -> Self {
        Self([
            self.0[0].invert_voigt(alpha, beta),
            self.0[1].invert_voigt(alpha, beta),
        ])
    }

    pub fn l2_norm(&self) -> f64 {
        (self.0[0].l2_norm().powi(2) + self.0[1].l2_norm().powi(2)).sqrt()
    }

    pub fn seminorm(&self, p: u32) -> f64 {
        (self.0[0].seminorm(p).powi(2) + self.0[1].seminorm(p).powi(2)).sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        (self.0[0].sobolev_norm(s).powi(2) + self.0[1].sobolev_norm(s).powi(2)).sqrt()
    }

    /// Max over the grid of the pointwise Euclidean norm |v(x)|.
    pub fn linf_norm(&self) -> Result<f64> {
        let [a, b] = self.to_physical()?;
        Ok(a.iter()
            .zip(&b)
            .fold(0.0f64, |acc, (&x, &y)| acc.max((x * x + y * y).sqrt())))
    }

    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        self.0[0].add_scaled(c, &other.0[0]);
        self.0[1].add_scaled(c, &other.0[1]);
    }

    pub fn scale(&mut self, c: f64) {
        self.0[0].scale(c);
        self.0[1].scale(c);
    }

    pub fn diff(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    pub fn l2_inner(&self, other: &Self) -> f64 {
        self.0[0].l2_inner(&other.0[0]) + self.0[1].l2_inner(&other.0[1])
    }

    pub fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }
}

/// Gradient of a scalar field.
pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField([f.derivative(0), f.derivative(1)])
}

/// Symmetric 2x2 tensor field; three independent components stored.
#[derive(Clone, Debug)]
pub struct SymTensorField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl SymTensorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            xx: ScalarField::zeros(grid),
            xy: ScalarField::zeros(grid),
            yy: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.xx.grid()
    }

    pub fn from_physical(grid: TorusGrid, samples: &[Vec<f64>; 3]) -> Result<Self> {
        Ok(Self {
            xx: ScalarField::from_physical(grid, &samples[0])?,
            xy: ScalarField::from_physical(grid, &samples[1])?,
            yy: ScalarField::from_physical(grid, &samples[2])?,
        })
    }

    /// Physical samples ordered (s11, s12, s22).
    pub fn to_physical(&self) -> Result<[Vec<f64>; 3]> {
        Ok([
            self.xx.to_physical()?,
            self.xy.to_physical()?,
            self.yy.to_physical()?,
        ])
    }

    /// Row divergence (d1 s11 + d2 s12, d1 s12 + d2 s22).
    pub fn divergence(&self) -> VectorField {
        let mut c0 = self.xx.derivative(0);
        c0.add_scaled(1.0, &self.xy.derivative(1));
        let mut c1 = self.xy.derivative(0);
        c1.add_scaled(1.0, &self.yy.derivative(1));
        VectorField([c0, c1])
    }

    pub fn trace(&self) -> ScalarField {
        let mut t = self.xx.clone();
        t.add_scaled(1.0, &self.yy);
        t
    }

    pub fn project(&mut self, n: usize) {
        self.xx.project(n);
        self.xy.project(n);
        self.yy.project(n);
    }

    pub fn mollify(&mut self, delta: f64) -> Result<()> {
        self.xx.mollify(delta)?;
        self.xy.mollify(delta)?;
        self.yy.mollify(delta)
    }

    pub fn retruncate(&mut self, n: usize) -> Result<()> {
        self.xx.retruncate(n)?;
        self.xy.retruncate(n)?;
        self.yy.retruncate(n)
    }

    /// L2 norm with the Frobenius weighting |s|^2 = s11^2 + 2 s12^2 + s22^2.
    pub fn l2_norm(&self) -> f64 {
        (self.xx.l2_norm().powi(2)
            + 2.0 * self.xy.l2_norm().powi(2)
            + self.yy.l2_norm().powi(2))
        .sqrt()
    }

    pub fn seminorm(&self, p: u32) -> f64 {
        (self.xx.seminorm(p).powi(2)
            + 2.0 * self.xy.seminorm(p).powi(2)
            + self.yy.seminorm(p).powi(2))
        .sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        (self.xx.sobolev_norm(s).powi(2)
            + 2.0 * self.xy.sobolev_norm(s).powi(2)
            + self.yy.sobolev_norm(s).powi(2))
        .sqrt()
    }

    /// Max over the grid of the pointwise Frobenius norm.
    pub fn linf_norm(&self) -> Result<f64> {
        let [a, b, c] = self.to_physical()?;
        let mut max = 0.0f64;
        for i in 0..a.len() {
            max = max.max((a[i] * a[i] + 2.0 * b[i] * b[i] + c[i] * c[i]).sqrt());
        }
        Ok(max)
    }

    /// Frobenius inner product <s, t> = int s11 t11 + 2 s12 t12 + s22 t22.
    pub fn l2_inner(&self, other: &Self) -> f64 {
        self.xx.l2_inner(&other.xx)
            + 2.0 * self.xy.l2_inner(&other.xy)
            + self.yy.l2_inner(&other.yy)
    }

    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        self.xx.add_scaled(c, &other.xx);
        self.xy.add_scaled(c, &other.xy);
        self.yy.add_scaled(c, &other.yy);
    }

    pub fn scale(&mut self, c: f64) {
        self.xx.scale(c);
        self.xy.scale(c);
        self.yy.scale(c);
    }

    pub fn diff(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }
}
