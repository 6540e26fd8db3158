//! Norms, energy functionals and bound-slack quantities recorded along a
//! run.

use crate::config::{PhysicalParams, RegularizationParams};
use crate::dynamics::State;
use crate::forcing::PreparedForcing;
use crate::rheology::{self, deviatoric_split, tau_shift};
use crate::spectral::{ScalarField, SymTensorField, VectorField};
use crate::{Error, Result};

/// One row of the per-run diagnostics series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_u: f64,
    pub h1_u: f64,
    pub h2_u: f64,
    pub l2_sigma: f64,
    pub h1_sigma: f64,
    pub linf_sigma: f64,
    pub linf_bound_slack: f64,
    pub energy_l2: f64,
    pub energy_h1: f64,
    pub antisym_norm: f64,
    pub dissipation_i11: f64,
    pub forcing_work: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "t,L2_u,H1_u,H2_u,L2_sigma,H1_sigma,Linf_sigma,\
Linf_bound_slack,energy_L2,energy_H1,antisym_norm,dissipation_I11,forcing_work";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.l2_u,
            self.h1_u,
            self.h2_u,
            self.l2_sigma,
            self.h1_sigma,
            self.linf_sigma,
            self.linf_bound_slack,
            self.energy_l2,
            self.energy_h1,
            self.antisym_norm,
            self.dissipation_i11,
            self.forcing_work
        )
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.l2_u,
            self.h1_u,
            self.h2_u,
            self.l2_sigma,
            self.h1_sigma,
            self.linf_sigma,
            self.linf_bound_slack,
            self.energy_l2,
            self.energy_h1,
            self.antisym_norm,
            self.dissipation_i11,
            self.forcing_work,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Quadratic energy at the L2 level:
/// (1/2)[ ||u||^2 + (1/E)||tau||^2 + alpha^2 ||grad u||^2 + beta^4 ||lap u||^2 ]
/// with tau = sigma + (P/2) I. `beta` is the effective bi-harmonic
/// coefficient (zero when the variant disables it).
pub fn energy_l2(
    u: &VectorField,
    sigma: &SymTensorField,
    phys: &PhysicalParams,
    alpha: f64,
    beta: f64,
) -> f64 {
    let tau = tau_shift(sigma, phys.p);
    let b4 = beta.powi(4);
    0.5 * (u.l2_norm().powi(2)
        + tau.l2_norm().powi(2) / phys.e
        + alpha * alpha * u.seminorm(1).powi(2)
        + b4 * u.seminorm(2).powi(2))
}

/// Quadratic energy at the H1 level:
/// (1/2)[ ||grad u||^2 + (1/E)||grad sigma||^2 + alpha^2 ||lap u||^2
///        + beta^4 ||grad lap u||^2 ].
pub fn energy_h1(
    u: &VectorField,
    sigma: &SymTensorField,
    phys: &PhysicalParams,
    alpha: f64,
    beta: f64,
) -> f64 {
    let b4 = beta.powi(4);
    0.5 * (u.seminorm(1).powi(2)
        + sigma.seminorm(1).powi(2) / phys.e
        + alpha * alpha * u.seminorm(2).powi(2)
        + b4 * u.seminorm(3).powi(2))
}

/// Slack in the stress maximum-principle bound:
/// (||sigma_0||_inf + 2P) - ||sigma(t)||_inf. Nonnegative (up to grid
/// tolerance) along healthy runs.
pub fn linf_bound_check(sigma: &SymTensorField, sigma0_linf: f64, p: f64) -> Result<f64> {
    Ok(sigma0_linf + 2.0 * p - sigma.linf_norm()?)
}

/// L2 norm of the antisymmetric part A = (sigma - sigma^T)/2 of a full
/// four-component stress (order s11, s12, s21, s22): sqrt(2) ||a12||
/// since |A|^2 = 2 a12^2 pointwise.
pub fn antisym_norm(sigma_full: &[ScalarField; 4]) -> f64 {
    let mut a12 = sigma_full[1].clone();
    a12.add_scaled(-1.0, &sigma_full[2]);
    a12.scale(0.5);
    2.0_f64.sqrt() * a12.l2_norm()
}

/// The coercive (nonpositive) term of the stress energy balance:
/// I11 = -Int[ (4 Deps / P) |dev tau|^2 + (Deps / 2P) (Tr tau)^2 ].
pub fn dissipation_i11(
    sigma: &SymTensorField,
    u: &VectorField,
    p: f64,
    epsilon: f64,
) -> Result<f64> {
    let tau = tau_shift(sigma, p);
    let (dev, trace) = deviatoric_split(&tau);
    let d = rheology::deformation(u)?;
    let dcal = rheology::strain_rate(&d, epsilon);
    let [d11, d12, d22] = dev.to_physical()?;
    let tr = trace.to_physical()?;
    let n = dcal.len();
    let mut acc = 0.0;
    for i in 0..n {
        let dev2 = d11[i] * d11[i] + 2.0 * d12[i] * d12[i] + d22[i] * d22[i];
        acc += (4.0 * dcal[i] / p) * dev2 + (dcal[i] / (2.0 * p)) * tr[i] * tr[i];
    }
    Ok(-acc / n as f64)
}

/// Discrete work of the external force against the velocity,
/// <T_a + T_w + Omega u_perp - g grad H0, u>.
pub fn forcing_work(
    u: &VectorField,
    forcing: &PreparedForcing,
    phys: &PhysicalParams,
    t: f64,
) -> Result<f64> {
    let u_phys = u.to_physical()?;
    let f = forcing.total(&u_phys, phys, t);
    let n = u_phys[0].len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += f[0][i] * u_phys[0][i] + f[1][i] * u_phys[1][i];
    }
    Ok(acc / n as f64)
}

/// Residual of the discrete duality pairing <div sigma, u> + <D(u), sigma>,
/// which vanishes identically for matching truncations.
pub fn divergence_pairing_residual(sigma: &SymTensorField, u: &VectorField) -> Result<f64> {
    let div = sigma.divergence();
    let term1 = div.l2_inner(u);
    let d = rheology::deformation(u)?;
    let d_field = SymTensorField::from_physical(u.grid(), &[d.d11, d.d12, d.d22])?;
    let term2 = d_field.l2_inner(sigma);
    Ok(term1 + term2)
}

/// Difference functional ||du||^2 + alpha^2 ||grad du||^2 + (1/E)||dsigma||^2
/// between two states on the same grid and at the same time.
pub fn continuous_dependence_metric(
    a: &State,
    b: &State,
    phys: &PhysicalParams,
    alpha: f64,
) -> Result<f64> {
    if a.u.grid() != b.u.grid() {
        return Err(Error::Mismatch(format!(
            "grid mismatch: {} vs {} points",
            a.u.grid().points(),
            b.u.grid().points()
        )));
    }
    if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs()) {
        return Err(Error::Mismatch(format!(
            "time mismatch: {} vs {}",
            a.t, b.t
        )));
    }
    let du = a.u.diff(&b.u);
    let ds = a.sigma.diff(&b.sigma);
    Ok(du.l2_norm().powi(2) + alpha * alpha * du.seminorm(1).powi(2) + ds.l2_norm().powi(2) / phys.e)
}

/// Assemble one diagnostics row from a state.
pub fn record(
    state: &State,
    phys: &PhysicalParams,
    reg: &RegularizationParams,
    effective_beta: f64,
    forcing: &PreparedForcing,
    sigma0_linf: f64,
    antisym: f64,
) -> Result<DiagnosticsRecord> {
    Ok(DiagnosticsRecord {
        t: state.t,
        l2_u: state.u.l2_norm(),
        h1_u: state.u.sobolev_norm(1.0),
        h2_u: state.u.sobolev_norm(2.0),
        l2_sigma: state.sigma.l2_norm(),
        h1_sigma: state.sigma.sobolev_norm(1.0),
        linf_sigma: state.sigma.linf_norm()?,
        linf_bound_slack: linf_bound_check(&state.sigma, sigma0_linf, phys.p)?,
        energy_l2: energy_l2(&state.u, &state.sigma, phys, reg.alpha, effective_beta),
        energy_h1: energy_h1(&state.u, &state.sigma, phys, reg.alpha, effective_beta),
        antisym_norm: antisym,
        dissipation_i11: dissipation_i11(&state.sigma, &state.u, phys.p, reg.epsilon)?,
        forcing_work: forcing_work(&state.u, forcing, phys, state.t)?,
    })
}
