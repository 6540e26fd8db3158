//! Pointwise constitutive machinery: deformation tensor, regularised
//! strain rate, the constitutive right-hand side of the stress equation,
//! the tau-shift and the deviatoric/trace split.
//!
//! Nonlinear pointwise quantities (the strain rate and its products with
//! sigma) are evaluated on the padded physical grid; callers transform
//! back and truncate to the retained band.

use crate::spectral::{ScalarField, SymTensorField, TorusGrid, VectorField};
use crate::{Error, Result};
use num_complex::Complex64;

/// Symmetric part of the velocity gradient, sampled on the physical grid.
/// Stored as three components so symmetry is exact by construction.
pub struct Deformation {
    pub grid: TorusGrid,
    pub d11: Vec<f64>,
    pub d12: Vec<f64>,
    pub d22: Vec<f64>,
}

impl Deformation {
    /// Frobenius norm |D| at a point, with the weight 2 on the
    /// off-diagonal pair: |D|^2 = d11^2 + 2 d12^2 + d22^2.
    #[inline]
    pub fn frobenius(&self, i: usize) -> f64 {
        (self.d11[i] * self.d11[i] + 2.0 * self.d12[i] * self.d12[i] + self.d22[i] * self.d22[i])
            .sqrt()
    }
}

/// D(u) = (grad u + grad u^T) / 2, computed spectrally and sampled on the
/// physical grid.
pub fn deformation(u: &VectorField) -> Result<Deformation> {
    let grid = u.grid();
    let d11 = u[0].derivative(0).to_physical()?;
    let d22 = u[1].derivative(1).to_physical()?;
    let du1_dy = u[0].derivative(1).to_physical()?;
    let du2_dx = u[1].derivative(0).to_physical()?;
    let d12 = du1_dy
        .iter()
        .zip(&du2_dx)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Ok(Deformation {
        grid,
        d11,
        d12,
        d22,
    })
}

/// Regularised strain rate sqrt(|D|^2 + epsilon^2), pointwise on the grid.
pub fn strain_rate(d: &Deformation, epsilon: f64) -> Vec<f64> {
    let e2 = epsilon * epsilon;
    (0..d.d11.len())
        .map(|i| {
            let f = d.frobenius(i);
            (f * f + e2).sqrt()
        })
        .collect()
}

/// Parameters needed by the constitutive law.
#[derive(Clone, Copy)]
pub struct ConstitutiveParams {
    pub p: f64,
    pub e: f64,
    pub epsilon: f64,
}

/// Right-hand side of the stress equation,
/// d(sigma)/dt = E [ D(u) - (4 Deps / P)(sigma - Tr(sigma)/2 I)
///                   - (Deps / 2P) Tr(sigma) I - (Deps / 2) I ],
/// evaluated pointwise and returned in spectral form without projection
/// (the caller truncates).
pub fn constitutive_rhs(
    sigma: &SymTensorField,
    u: &VectorField,
    params: ConstitutiveParams,
) -> Result<SymTensorField> {
    let d = deformation(u)?;
    let dcal = strain_rate(&d, params.epsilon);
    let [s11, s12, s22] = sigma.to_physical()?;
    let rhs = constitutive_rhs_samples(&d, &dcal, [&s11, &s12, &s22], params);
    SymTensorField::from_physical(sigma.grid(), &rhs)
}

/// Pointwise kernel of `constitutive_rhs` on physical samples.
pub fn constitutive_rhs_samples(
    d: &Deformation,
    dcal: &[f64],
    sigma: [&[f64]; 3],
    params: ConstitutiveParams,
) -> [Vec<f64>; 3] {
    let [s11, s12, s22] = sigma;
    let n = dcal.len();
    let (p, e) = (params.p, params.e);
    let mut r11 = vec![0.0; n];
    let mut r12 = vec![0.0; n];
    let mut r22 = vec![0.0; n];
    for i in 0..n {
        let tr = s11[i] + s22[i];
        let dc = dcal[i];
        let relax = 4.0 * dc / p;
        r11[i] = e * (d.d11[i] - relax * (s11[i] - 0.5 * tr) - dc * tr / (2.0 * p) - 0.5 * dc);
        r12[i] = e * (d.d12[i] - relax * s12[i]);
        r22[i] = e * (d.d22[i] - relax * (s22[i] - 0.5 * tr) - dc * tr / (2.0 * p) - 0.5 * dc);
    }
    [r11, r12, r22]
}

/// Full four-component constitutive right-hand side, for diagnosing how a
/// deliberately injected antisymmetric stress part decays. Component
/// order: (s11, s12, s21, s22).
pub fn constitutive_rhs_full(
    sigma: &[ScalarField; 4],
    u: &VectorField,
    params: ConstitutiveParams,
) -> Result<[ScalarField; 4]> {
    let grid = u.grid();
    let d = deformation(u)?;
    let dcal = strain_rate(&d, params.epsilon);
    let s: Vec<Vec<f64>> = sigma
        .iter()
        .map(|c| c.to_physical())
        .collect::<Result<_>>()?;
    let (p, e) = (params.p, params.e);
    let n = dcal.len();
    // D as a full tensor (symmetric, so D21 = D12).
    let dd = [&d.d11, &d.d12, &d.d12, &d.d22];
    let kron = [1.0, 0.0, 0.0, 1.0];
    let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let tr = s[0][i] + s[3][i];
        let dc = dcal[i];
        for c in 0..4 {
            out[c][i] = e
                * (dd[c][i]
                    - (4.0 * dc / p) * (s[c][i] - kron[c] * 0.5 * tr)
                    - kron[c] * dc * tr / (2.0 * p)
                    - kron[c] * 0.5 * dc);
        }
    }
    let mut fields = Vec::with_capacity(4);
    for c in &out {
        fields.push(ScalarField::from_physical(grid, c)?);
    }
    fields
        .try_into()
        .map_err(|_| Error::Rank("full constitutive rhs".into()))
}

/// tau = sigma + (P/2) I: a constant shift of the diagonal, applied to
/// the mean (k = 0) coefficient.
pub fn tau_shift(sigma: &SymTensorField, p: f64) -> SymTensorField {
    diag_shift(sigma, 0.5 * p)
}

/// Inverse of `tau_shift`.
pub fn sigma_unshift(tau: &SymTensorField, p: f64) -> SymTensorField {
    diag_shift(tau, -0.5 * p)
}

fn diag_shift(t: &SymTensorField, c: f64) -> SymTensorField {
    let mut out = t.clone();
    let xx0 = out.xx.mode(0, 0);
    out.xx.set_mode_pair(0, 0, xx0 + Complex64::new(c, 0.0));
    let yy0 = out.yy.mode(0, 0);
    out.yy.set_mode_pair(0, 0, yy0 + Complex64::new(c, 0.0));
    out
}

/// Split sigma into its trace-free deviator and its trace:
/// sigma = dev + (trace/2) I with dev = sigma - Tr(sigma)/2 I.
pub fn deviatoric_split(sigma: &SymTensorField) -> (SymTensorField, ScalarField) {
    let trace = sigma.trace();
    let mut dev = sigma.clone();
    dev.xx.add_scaled(-0.5, &trace);
    dev.yy.add_scaled(-0.5, &trace);
    (dev, trace)
}

/// grad(Deps) = D(u) : grad D(u) / Deps, pointwise; diagnostic only.
/// The formula divides by Deps, so epsilon must be positive.
pub fn strain_rate_gradient(u: &VectorField, epsilon: f64) -> Result<VectorField> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(
            "strain_rate_gradient requires epsilon > 0".into(),
        ));
    }
    let grid = u.grid();
    let d = deformation(u)?;
    let dcal = strain_rate(&d, epsilon);
    let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for (axis, slot) in out.iter_mut().enumerate() {
        // Spectral derivative of each component of D along `axis`.
        let g11 = ScalarField::from_physical(grid, &d.d11)?
            .derivative(axis)
            .to_physical()?;
        let g12 = ScalarField::from_physical(grid, &d.d12)?
            .derivative(axis)
            .to_physical()?;
        let g22 = ScalarField::from_physical(grid, &d.d22)?
            .derivative(axis)
            .to_physical()?;
        for i in 0..grid.len() {
            let contraction =
                d.d11[i] * g11[i] + 2.0 * d.d12[i] * g12[i] + d.d22[i] * g22[i];
            slot[i] = contraction / dcal[i];
        }
    }
    VectorField::from_physical(grid, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(8, 32).unwrap()
    }

    fn shear_flow(grid: TorusGrid) -> VectorField {
        // u = (sin(2 pi x2), 0)
        let mut u = VectorField::zeros(grid);
        u[0].add_cos_mode(0, 1, 1.0, -std::f64::consts::FRAC_PI_2);
        u
    }

    fn random_velocity(grid: TorusGrid, rng: &mut impl Rng, kmax: i64) -> VectorField {
        let mut u = VectorField::zeros(grid);
        for comp in 0..2 {
            for kx in -kmax..=kmax {
                for ky in -kmax..=kmax {
                    if (kx, ky) == (0, 0) {
                        continue;
                    }
                    u[comp].add_cos_mode(
                        kx,
                        ky,
                        rng.gen_range(-0.5..0.5),
                        rng.gen_range(0.0..2.0 * PI),
                    );
                }
            }
        }
        u
    }

    #[test]
    fn deformation_of_shear_flow() {
        let grid = grid();
        let d = deformation(&shear_flow(grid)).unwrap();
        for iy in 0..grid.points() {
            for ix in 0..grid.points() {
                let i = grid.index(ix, iy);
                let x2 = grid.coord(iy);
                assert!(d.d11[i].abs() < 1e-12);
                assert!(d.d22[i].abs() < 1e-12);
                let expect = PI * (2.0 * PI * x2).cos();
                assert!((d.d12[i] - expect).abs() < 1e-10, "{} vs {}", d.d12[i], expect);
            }
        }
    }

    #[test]
    fn deformation_of_translation_is_zero() {
        let grid = grid();
        let mut u = VectorField::zeros(grid);
        u[0].add_cos_mode(0, 0, 3.0, 0.0);
        u[1].add_cos_mode(0, 0, -1.5, 0.0);
        let d = deformation(&u).unwrap();
        assert!(d.d11.iter().chain(&d.d12).chain(&d.d22).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn strain_rate_three_four_five() {
        let grid = grid();
        // |D| = 3 pointwise via constant diagonal entries: d11 = 3/sqrt(2)... use
        // a direct Deformation instead of a velocity (constant D fields are not
        // periodic gradients).
        let n = grid.len();
        let d = Deformation {
            grid,
            d11: vec![3.0 / 2.0_f64.sqrt(); n],
            d12: vec![0.0; n],
            d22: vec![3.0 / 2.0_f64.sqrt(); n],
        };
        let s = strain_rate(&d, 4.0);
        assert!(s.iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn strain_rate_of_zero_flow_is_epsilon() {
        let grid = grid();
        let d = deformation(&VectorField::zeros(grid)).unwrap();
        let s = strain_rate(&d, 0.01);
        assert!(s.iter().all(|v| (*v - 0.01).abs() < 1e-16));
    }

    #[test]
    fn strain_rate_of_shear_flow() {
        let grid = grid();
        let d = deformation(&shear_flow(grid)).unwrap();
        let s = strain_rate(&d, 0.0);
        for iy in 0..grid.points() {
            let i = grid.index(0, iy);
            let expect = 2.0_f64.sqrt() * PI * (2.0 * PI * grid.coord(iy)).cos().abs();
            assert!((s[i] - expect).abs() < 1e-9, "{} vs {}", s[i], expect);
        }
    }

    #[test]
    fn strain_rate_dominates_epsilon() {
        let grid = grid();
        let mut rng = StdRng::seed_from_u64(7);
        let u = random_velocity(grid, &mut rng, 3);
        let d = deformation(&u).unwrap();
        for &eps in &[0.0, 1e-3, 1.0] {
            assert!(strain_rate(&d, eps).iter().all(|v| *v >= eps));
        }
    }

    #[test]
    fn tau_zero_state_is_a_fixed_point() {
        let grid = grid();
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..20 {
            let p: f64 = rng.gen_range(0.1..5.0);
            let e: f64 = rng.gen_range(0.05..2.0);
            let eps: f64 = rng.gen_range(0.0..1.0);
            let mut sigma = SymTensorField::zeros(grid);
            sigma.xx.add_cos_mode(0, 0, -0.5 * p, 0.0);
            sigma.yy.add_cos_mode(0, 0, -0.5 * p, 0.0);
            let rhs = constitutive_rhs(
                &sigma,
                &VectorField::zeros(grid),
                ConstitutiveParams { p, e, epsilon: eps },
            )
            .unwrap();
            assert!(rhs.l2_norm() < 1e-14, "residual {}", rhs.l2_norm());
        }
    }

    #[test]
    fn zero_state_relaxes_diagonally() {
        let grid = grid();
        let params = ConstitutiveParams {
            p: 1.0,
            e: 0.25,
            epsilon: 0.5,
        };
        let rhs = constitutive_rhs(
            &SymTensorField::zeros(grid),
            &VectorField::zeros(grid),
            params,
        )
        .unwrap();
        // rhs = -E eps/2 I everywhere
        let [r11, r12, r22] = rhs.to_physical().unwrap();
        let expect = -params.e * params.epsilon / 2.0;
        assert!(r11.iter().all(|v| (v - expect).abs() < 1e-14));
        assert!(r22.iter().all(|v| (v - expect).abs() < 1e-14));
        assert!(r12.iter().all(|v| v.abs() < 1e-14));
        // with eps = 0 the rhs vanishes entirely
        let rhs0 = constitutive_rhs(
            &SymTensorField::zeros(grid),
            &VectorField::zeros(grid),
            ConstitutiveParams { epsilon: 0.0, ..params },
        )
        .unwrap();
        assert!(rhs0.l2_norm() < 1e-15);
    }

    #[test]
    fn tau_shift_round_trip() {
        let grid = grid();
        let mut rng = StdRng::seed_from_u64(3);
        let mut sigma = SymTensorField::zeros(grid);
        for c in [&mut sigma.xx, &mut sigma.xy, &mut sigma.yy] {
            for kx in -2..=2i64 {
                for ky in -2..=2i64 {
                    c.add_cos_mode(kx, ky, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0));
                }
            }
        }
        let tau = tau_shift(&sigma, 2.0);
        let back = sigma_unshift(&tau, 2.0);
        assert!(back.diff(&sigma).l2_norm() < 1e-15);
        // sigma = 0, P = 2 -> tau = I
        let tau = tau_shift(&SymTensorField::zeros(grid), 2.0);
        let [t11, t12, t22] = tau.to_physical().unwrap();
        assert!(t11.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(t22.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(t12.iter().all(|v| v.abs() < 1e-15));
        // sigma = -(P/2) I -> tau = 0
        let mut sigma = SymTensorField::zeros(grid);
        sigma.xx.add_cos_mode(0, 0, -1.0, 0.0);
        sigma.yy.add_cos_mode(0, 0, -1.0, 0.0);
        assert!(tau_shift(&sigma, 2.0).l2_norm() < 1e-15);
    }

    #[test]
    fn deviatoric_identity_pointwise() {
        let grid = grid();
        let mut rng = StdRng::seed_from_u64(11);
        let mut sigma = SymTensorField::zeros(grid);
        for c in [&mut sigma.xx, &mut sigma.xy, &mut sigma.yy] {
            for kx in -3..=3i64 {
                for ky in -3..=3i64 {
                    c.add_cos_mode(kx, ky, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0));
                }
            }
        }
        let (dev, trace) = deviatoric_split(&sigma);
        let [s11, s12, s22] = sigma.to_physical().unwrap();
        let [d11, d12, d22] = dev.to_physical().unwrap();
        let tr = trace.to_physical().unwrap();
        for i in 0..grid.len() {
            // deviator is trace-free
            assert!((d11[i] + d22[i]).abs() < 1e-13);
            let full = s11[i] * s11[i] + 2.0 * s12[i] * s12[i] + s22[i] * s22[i];
            let split =
                d11[i] * d11[i] + 2.0 * d12[i] * d12[i] + d22[i] * d22[i] + 0.5 * tr[i] * tr[i];
            assert!((full - split).abs() <= 1e-13 * (1.0 + full.abs()));
        }
        // diag(1, -1) is its own deviator
        let mut s = SymTensorField::zeros(grid);
        s.xx.add_cos_mode(0, 0, 1.0, 0.0);
        s.yy.add_cos_mode(0, 0, -1.0, 0.0);
        let (dev, trace) = deviatoric_split(&s);
        assert!(dev.diff(&s).l2_norm() < 1e-15);
        assert!(trace.l2_norm() < 1e-15);
    }

    #[test]
    fn lipschitz_bound_on_strain_rate() {
        // || Deps(v1) - Deps(v2) ||_L2 <= || grad v1 - grad v2 ||_L2,
        // checked on many random pairs and several epsilons.
        let grid = TorusGrid::new(4, 16).unwrap();
        let mut rng = StdRng::seed_from_u64(42);
        let inv = 1.0 / grid.len() as f64;
        for _ in 0..1000 {
            let v1 = random_velocity(grid, &mut rng, 2);
            let v2 = random_velocity(grid, &mut rng, 2);
            let d1 = deformation(&v1).unwrap();
            let d2 = deformation(&v2).unwrap();
            let grad_diff = {
                let mut s = 0.0_f64;
                for comp in 0..2 {
                    for axis in 0..2 {
                        let g = v1[comp].derivative(axis).diff(&v2[comp].derivative(axis));
                        let n = g.l2_norm();
                        s += n * n;
                    }
                }
                s.sqrt()
            };
            for &eps in &[0.0, 1e-3, 1.0] {
                let s1 = strain_rate(&d1, eps);
                let s2 = strain_rate(&d2, eps);
                let lhs = (s1
                    .iter()
                    .zip(&s2)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    * inv)
                    .sqrt();
                assert!(
                    lhs <= grad_diff * (1.0 + 1e-12),
                    "eps {eps}: {lhs} > {grad_diff}"
                );
            }
        }
    }

    #[test]
    fn full_rhs_matches_symmetric_rhs_on_symmetric_input() {
        let grid = grid();
        let mut rng = StdRng::seed_from_u64(5);
        let u = random_velocity(grid, &mut rng, 3);
        let mut sigma = SymTensorField::zeros(grid);
        for c in [&mut sigma.xx, &mut sigma.xy, &mut sigma.yy] {
            for kx in -2..=2i64 {
                for ky in -2..=2i64 {
                    c.add_cos_mode(kx, ky, rng.gen_range(-0.5..0.5), rng.gen_range(0.0..6.0));
                }
            }
        }
        let params = ConstitutiveParams {
            p: 0.8,
            e: 0.25,
            epsilon: 0.1,
        };
        let rhs3 = constitutive_rhs(&sigma, &u, params).unwrap();
        let full_sigma = [
            sigma.xx.clone(),
            sigma.xy.clone(),
            sigma.xy.clone(),
            sigma.yy.clone(),
        ];
        let rhs4 = constitutive_rhs_full(&full_sigma, &u, params).unwrap();
        assert!(rhs4[0].diff(&rhs3.xx).l2_norm() < 1e-13);
        assert!(rhs4[1].diff(&rhs3.xy).l2_norm() < 1e-13);
        assert!(rhs4[2].diff(&rhs3.xy).l2_norm() < 1e-13);
        assert!(rhs4[3].diff(&rhs3.yy).l2_norm() < 1e-13);
    }

    #[test]
    fn antisymmetric_part_decouples_in_full_rhs() {
        // For sigma = A antisymmetric (s12 = -s21, zero diagonal) and u = 0
        // the antisymmetric part of the rhs is -E (4 Deps / P) A: a pure
        // decay of the same shape. The diagonal keeps the constant
        // -E Deps / 2 source, which acts on the symmetric part only.
        let grid = grid();
        let mut a = ScalarField::zeros(grid);
        a.add_cos_mode(1, 2, 0.3, 0.4);
        let mut neg = a.clone();
        neg.scale(-1.0);
        let sigma = [
            ScalarField::zeros(grid),
            a.clone(),
            neg,
            ScalarField::zeros(grid),
        ];
        let params = ConstitutiveParams {
            p: 1.0,
            e: 0.25,
            epsilon: 0.1,
        };
        let rhs = constitutive_rhs_full(&sigma, &VectorField::zeros(grid), params).unwrap();
        // antisym(rhs)_12 = (rhs12 - rhs21) / 2 = rate * a
        let rate = -params.e * 4.0 * params.epsilon / params.p;
        let mut antisym = rhs[1].clone();
        antisym.add_scaled(-1.0, &rhs[2]);
        antisym.scale(0.5);
        let mut expect = a.clone();
        expect.scale(rate);
        assert!(antisym.diff(&expect).l2_norm() < 1e-13);
        // symmetric off-diagonal part vanishes: rhs12 + rhs21 = 0
        let mut sym = rhs[1].clone();
        sym.add_scaled(1.0, &rhs[2]);
        assert!(sym.l2_norm() < 1e-13);
        // diagonal carries only the constant source -E eps / 2
        let diag = rhs[0].to_physical().unwrap();
        let expect_diag = -params.e * params.epsilon / 2.0;
        assert!(diag.iter().all(|v| (v - expect_diag).abs() < 1e-13));
        assert!(rhs[3].diff(&rhs[0]).l2_norm() < 1e-13);
    }

    #[test]
    fn gradient_of_strain_rate_matches_finite_differences() {
        let grid = TorusGrid::new(32, 128).unwrap();
        let mut u = shear_flow(grid);
        u[0].scale(0.1);
        let eps = 0.5;
        let g = strain_rate_gradient(&u, eps).unwrap();
        let gp = g.to_physical().unwrap();
        let d = deformation(&u).unwrap();
        let s = strain_rate(&d, eps);
        let m = grid.points();
        let h = 1.0 / m as f64;
        // fourth-order central stencil keeps the oracle error well below
        // the comparison tolerance at this resolution
        let fd = |sm2: f64, sm1: f64, sp1: f64, sp2: f64| {
            (-sp2 + 8.0 * sp1 - 8.0 * sm1 + sm2) / (12.0 * h)
        };
        let mut max_err = 0.0_f64;
        let mut max_mag = 0.0_f64;
        for iy in 0..m {
            for ix in 0..m {
                let i = grid.index(ix, iy);
                let sx = |o: usize| s[grid.index((ix + o) % m, iy)];
                let sy = |o: usize| s[grid.index(ix, (iy + o) % m)];
                let fd_x = fd(sx(m - 2), sx(m - 1), sx(1), sx(2));
                let fd_y = fd(sy(m - 2), sy(m - 1), sy(1), sy(2));
                max_err = max_err.max((gp[0][i] - fd_x).abs().max((gp[1][i] - fd_y).abs()));
                max_mag = max_mag.max(fd_x.abs().max(fd_y.abs()));
            }
        }
        assert!(max_err <= 1e-4 * max_mag.max(1.0), "{max_err} vs {max_mag}");
        assert!(strain_rate_gradient(&u, 0.0).is_err());
        assert!(
            strain_rate_gradient(&VectorField::zeros(grid), 0.5)
                .unwrap()
                .l2_norm()
                < 1e-14
        );
    }
}
