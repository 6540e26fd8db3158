//! External force terms of the momentum balance: atmospheric drag,
//! oceanic drag, Coriolis and sea-surface tilt, plus the parametric
//! generators for the given fields U_a, U_w and H_0.
//!
//! Drag laws are quadratic and non-polynomial (they carry |.|), so they
//! are evaluated pointwise on the padded physical grid; the caller
//! transforms and truncates the assembled force.

use crate::config::PhysicalParams;
use crate::spectral::{gradient, ScalarField, TorusGrid, VectorField};
use crate::{Error, Result};

/// One Fourier mode of a synthetic vector field: per component an
/// amplitude and phase of amp * cos(2 pi k.x + phase).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorMode {
    pub k: [i64; 2],
    pub amp: [f64; 2],
    pub phase: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarMode {
    pub k: [i64; 2],
    pub amp: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VectorForcing {
    Zero,
    Constant([f64; 2]),
    Fourier(Vec<VectorMode>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarForcing {
    Zero,
    Constant(f64),
    Fourier(Vec<ScalarMode>),
}

/// Parametric description of U_a, U_w and H_0, each with an optional
/// cos(omega t) time modulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingSpec {
    pub ua: VectorForcing,
    pub ua_omega: f64,
    pub uw: VectorForcing,
    pub uw_omega: f64,
    pub h0: ScalarForcing,
    pub h0_omega: f64,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        Self {
            ua: VectorForcing::Zero,
            ua_omega: 0.0,
            uw: VectorForcing::Zero,
            uw_omega: 0.0,
            h0: ScalarForcing::Zero,
            h0_omega: 0.0,
        }
    }
}

impl ForcingSpec {
    /// All generated fields must be band-limited to |k|_inf <= n.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |k: &[i64; 2], what: &str| {
            if k[0].unsigned_abs() as usize > n || k[1].unsigned_abs() as usize > n {
                Err(Error::Config(format!(
                    "{what}: mode ({}, {}) exceeds band limit N = {n}",
                    k[0], k[1]
                )))
            } else {
                Ok(())
            }
        };
        if let VectorForcing::Fourier(modes) = &self.ua {
            for m in modes {
                check(&m.k, "ua")?;
            }
        }
        if let VectorForcing::Fourier(modes) = &self.uw {
            for m in modes {
                check(&m.k, "uw")?;
            }
        }
        if let ScalarForcing::Fourier(modes) = &self.h0 {
            for m in modes {
                check(&m.k, "h0")?;
            }
        }
        Ok(())
    }
}

pub fn eval_vector(grid: TorusGrid, spec: &VectorForcing) -> VectorField {
    let mut f = VectorField::zeros(grid);
    match spec {
        VectorForcing::Zero => {}
        VectorForcing::Constant(c) => {
            f.0[0].add_cos_mode(0, 0, c[0], 0.0);
            f.0[1].add_cos_mode(0, 0, c[1], 0.0);
        }
        VectorForcing::Fourier(modes) => {
            for m in modes {
                f.0[0].add_cos_mode(m.k[0], m.k[1], m.amp[0], m.phase[0]);
                f.0[1].add_cos_mode(m.k[0], m.k[1], m.amp[1], m.phase[1]);
            }
        }
    }
    f
}

pub fn eval_scalar(grid: TorusGrid, spec: &ScalarForcing) -> ScalarField {
    let mut f = ScalarField::zeros(grid);
    match spec {
        ScalarForcing::Zero => {}
        ScalarForcing::Constant(c) => f.add_cos_mode(0, 0, *c, 0.0),
        ScalarForcing::Fourier(modes) => {
            for m in modes {
                f.add_cos_mode(m.k[0], m.k[1], m.amp, m.phase);
            }
        }
    }
    f
}

/// v_perp = (-v2, v1) on physical samples.
pub fn perp_phys(v: &[Vec<f64>; 2]) -> [Vec<f64>; 2] {
    [v[1].iter().map(|x| -x).collect(), v[0].clone()]
}

/// Atmospheric drag T_a = c_a rho_a |U_a| (U_a cos phi + U_a_perp sin phi),
/// pointwise on the physical grid.
pub fn atmospheric_drag(ua: &[Vec<f64>; 2], p: &PhysicalParams) -> [Vec<f64>; 2] {
    let n = ua[0].len();
    let (cphi, sphi) = (p.phi.cos(), p.phi.sin());
    let c = p.c_a * p.rho_a;
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let (a1, a2) = (ua[0][i], ua[1][i]);
        let mag = (a1 * a1 + a2 * a2).sqrt();
        out[0][i] = c * mag * (a1 * cphi - a2 * sphi);
        out[1][i] = c * mag * (a2 * cphi + a1 * sphi);
    }
    out
}

/// Oceanic drag T_w = c_w rho_w |U_w - u| [(U_w - u) cos th + (U_w - u)_perp sin th],
/// quadratic in the relative velocity.
pub fn oceanic_drag(uw: &[Vec<f64>; 2], u: &[Vec<f64>; 2], p: &PhysicalParams) -> [Vec<f64>; 2] {
    let n = u[0].len();
    let (cth, sth) = (p.theta.cos(), p.theta.sin());
    let c = p.c_w * p.rho_w;
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let r1 = uw[0][i] - u[0][i];
        let r2 = uw[1][i] - u[1][i];
        let mag = (r1 * r1 + r2 * r2).sqrt();
        out[0][i] = c * mag * (r1 * cth - r2 * sth);
        out[1][i] = c * mag * (r2 * cth + r1 * sth);
    }
    out
}

/// Coriolis force Omega * u_perp (spectral; exact for truncated fields).
pub fn coriolis(u: &VectorField, omega: f64) -> VectorField {
    let mut f = u.perp();
    f.scale(omega);
    f
}

/// Sea-surface tilt force -g grad(H_0), computed spectrally.
pub fn tilt(h0: &ScalarField, g: f64) -> VectorField {
    let mut f = gradient(h0);
    f.scale(-g);
    f
}

/// Forcing fields prepared once per run: base physical samples of U_a and
/// U_w and of grad(H_0), modulated by cos(omega t) at evaluation time.
pub struct PreparedForcing {
    pub ua: [Vec<f64>; 2],
    pub ua_omega: f64,
    pub uw: [Vec<f64>; 2],
    pub uw_omega: f64,
    pub tilt: [Vec<f64>; 2],
    pub h0_omega: f64,
}

impl PreparedForcing {
    pub fn new(grid: TorusGrid, spec: &ForcingSpec, params: &PhysicalParams) -> Result<Self> {
        Ok(Self {
            ua: eval_vector(grid, &spec.ua).to_physical()?,
            ua_omega: spec.ua_omega,
            uw: eval_vector(grid, &spec.uw).to_physical()?,
            uw_omega: spec.uw_omega,
            tilt: tilt(&eval_scalar(grid, &spec.h0), params.g).to_physical()?,
            h0_omega: spec.h0_omega,
        })
    }

    /// Total force T_a + T_w + Omega u_perp - g grad(H_0) at time t, as
    /// physical samples.
    pub fn total(&self, u_phys: &[Vec<f64>; 2], params: &PhysicalParams, t: f64) -> [Vec<f64>; 2] {
        let n = u_phys[0].len();
        let ma = (self.ua_omega * t).cos();
        let mw = (self.uw_omega * t).cos();
        let mh = (self.h0_omega * t).cos();
        let ua: [Vec<f64>; 2] = [
            self.ua[0].iter().map(|v| v * ma).collect(),
            self.ua[1].iter().map(|v| v * ma).collect(),
        ];
        let uw: [Vec<f64>; 2] = [
            self.uw[0].iter().map(|v| v * mw).collect(),
            self.uw[1].iter().map(|v| v * mw).collect(),
        ];
        let ta = atmospheric_drag(&ua, params);
        let tw = oceanic_drag(&uw, u_phys, params);
        let mut out = [vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            out[0][i] = ta[0][i] + tw[0][i] - params.omega_rot * u_phys[1][i] + mh * self.tilt[0][i];
            out[1][i] = ta[1][i] + tw[1][i] + params.omega_rot * u_phys[0][i] + mh * self.tilt[1][i];
        }
        out
    }
}

/// Total forcing from a raw spec (convenience wrapper around
/// [`PreparedForcing`]), returned as physical samples.
pub fn total_forcing(
    u: &VectorField,
    spec: &ForcingSpec,
    params: &PhysicalParams,
    t: f64,
) -> Result<[Vec<f64>; 2]> {
    let prepared = PreparedForcing::new(u.grid(), spec, params)?;
    Ok(prepared.total(&u.to_physical()?, params, t))
}
