//! Randomised property checks over the spectral and constitutive
//! kernels.

use evpkv::rheology;
use evpkv::spectral::{ScalarField, SymTensorField, TorusGrid, VectorField};
use proptest::prelude::*;

fn grid() -> TorusGrid {
    TorusGrid::new(4, 16).unwrap()
}

fn arb_samples() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0..10.0f64, 256)
}

fn arb_mode() -> impl Strategy<Value = (i64, i64, f64, f64)> {
    (-4i64..=4, -4i64..=4, -2.0..2.0f64, 0.0..std::f64::consts::TAU)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(samples in arb_samples()) {
        let f = ScalarField::from_physical(grid(), &samples).unwrap();
        let back = f.to_physical().unwrap();
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn projection_is_idempotent_and_contractive(samples in arb_samples(), n in 0usize..5) {
        let mut f = ScalarField::from_physical(grid(), &samples).unwrap();
        let full = f.l2_norm();
        f.project(n);
        let once = f.l2_norm();
        prop_assert!(once <= full * (1.0 + 1e-14));
        let coeffs: Vec<_> = f.coeffs().to_vec();
        f.project(n);
        prop_assert_eq!(coeffs, f.coeffs().to_vec());
    }

    #[test]
    fn voigt_inverse_round_trip(samples in arb_samples(), alpha in 0.1..3.0f64, beta in 0.0..1.0f64) {
        let f = ScalarField::from_physical(grid(), &samples).unwrap();
        let back = f.voigt_multiply(alpha, beta).invert_voigt(alpha, beta);
        prop_assert!(back.diff(&f).l2_norm() <= 1e-12 * f.l2_norm().max(1e-12));
    }

    #[test]
    fn deviatoric_identity(modes in proptest::collection::vec(arb_mode(), 1..6)) {
        let mut s = SymTensorField::zeros(grid());
        for (i, (kx, ky, amp, phase)) in modes.iter().enumerate() {
            let c = match i % 3 {
                0 => &mut s.xx,
                1 => &mut s.xy,
                _ => &mut s.yy,
            };
            c.add_cos_mode(*kx, *ky, *amp, *phase);
        }
        let (dev, trace) = rheology::deviatoric_split(&s);
        let full = s.l2_norm().powi(2);
        let split = dev.l2_norm().powi(2) + 0.5 * trace.l2_norm().powi(2);
        prop_assert!((full - split).abs() <= 1e-12 * (1.0 + full));
    }

    #[test]
    fn tau_shift_inverts(modes in proptest::collection::vec(arb_mode(), 1..6), p in 0.1..5.0f64) {
        let mut s = SymTensorField::zeros(grid());
        for (kx, ky, amp, phase) in &modes {
            s.xx.add_cos_mode(*kx, *ky, *amp, *phase);
            s.yy.add_cos_mode(*ky, *kx, *amp, -*phase);
        }
        let back = rheology::sigma_unshift(&rheology::tau_shift(&s, p), p);
        prop_assert!(back.diff(&s).l2_norm() <= 1e-13 * (1.0 + s.l2_norm()));
    }

    #[test]
    fn strain_rate_floor(modes in proptest::collection::vec(arb_mode(), 1..6), eps in 0.0..2.0f64) {
        let mut u = VectorField::zeros(grid());
        for (i, (kx, ky, amp, phase)) in modes.iter().enumerate() {
            u[i % 2].add_cos_mode(*kx, *ky, *amp, *phase);
        }
        let d = rheology::deformation(&u).unwrap();
        for v in rheology::strain_rate(&d, eps) {
            prop_assert!(v >= eps);
        }
    }
}
