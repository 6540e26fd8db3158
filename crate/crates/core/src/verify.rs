//! Named runtime check battery behind the `verify` subcommand: each
//! check measures a slack against one of the model's structural bounds
//! and reports pass/fail.

use crate::config::{parse_config, Config};
use crate::diagnostics;
use crate::dynamics::{self, run_debug};
use crate::forcing::{ScalarForcing, VectorForcing};
use crate::rheology;
use crate::spectral::{ScalarField, SymTensorField, TorusGrid, VectorField};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

fn random_velocity(grid: TorusGrid, rng: &mut impl Rng, kmax: i64, amp: f64) -> VectorField {
    let mut u = VectorField::zeros(grid);
    for comp in 0..2 {
        for kx in -kmax..=kmax {
            for ky in -kmax..=kmax {
                u[comp].add_cos_mode(
                    kx,
                    ky,
                    amp * rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0 * PI),
                );
            }
        }
    }
    u
}

fn random_tensor(grid: TorusGrid, rng: &mut impl Rng, kmax: i64, amp: f64) -> SymTensorField {
    let mut s = SymTensorField::zeros(grid);
    for c in [&mut s.xx, &mut s.xy, &mut s.yy] {
        for kx in -kmax..=kmax {
            for ky in -kmax..=kmax {
                c.add_cos_mode(
                    kx,
                    ky,
                    amp * rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0 * PI),
                );
            }
        }
    }
    s
}

fn check_strain_rate_lipschitz(grid: TorusGrid) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let kmax = 3i64.min(grid.modes() as i64);
    let inv = 1.0 / grid.len() as f64;
    let mut worst = 0.0_f64;
    let mut violations = 0usize;
    for _ in 0..1000 {
        let v1 = random_velocity(grid, &mut rng, kmax, 0.5);
        let v2 = random_velocity(grid, &mut rng, kmax, 0.5);
        let d1 = match rheology::deformation(&v1) {
            Ok(d) => d,
            Err(e) => return CheckResult::new("strain_rate_lipschitz", false, e.to_string()),
        };
        let d2 = rheology::deformation(&v2).unwrap();
        let mut grad2 = 0.0_f64;
        for comp in 0..2 {
            for axis in 0..2 {
                let g = v1[comp].derivative(axis).diff(&v2[comp].derivative(axis));
                grad2 += g.l2_norm().powi(2);
            }
        }
        let rhs = grad2.sqrt();
        for &eps in &[0.0, 1e-3, 1.0] {
            let s1 = rheology::strain_rate(&d1, eps);
            let s2 = rheology::strain_rate(&d2, eps);
            let lhs = (s1
                .iter()
                .zip(&s2)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                * inv)
                .sqrt();
            let ratio = lhs / rhs;
            worst = worst.max(ratio);
            if lhs > rhs * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    CheckResult::new(
        "strain_rate_lipschitz",
        violations == 0,
        format!("worst ratio {worst:.12} over 1000 pairs, {violations} violations"),
    )
}

fn check_antisym_decay(config: &Config) -> CheckResult {
    let mut cfg = config.clone();
    cfg.reg.epsilon = 0.1;
    let snaps = match run_debug(&cfg, 0.3) {
        Ok(s) => s,
        Err(e) => return CheckResult::new("antisym_decay", false, e.to_string()),
    };
    let a0 = diagnostics::antisym_norm(&snaps[0].sigma);
    let rate = 4.0 * cfg.physical.e * cfg.reg.epsilon / cfg.physical.p;
    let mut worst = 0.0_f64;
    for s in &snaps {
        let bound = a0 * (-rate * s.t).exp() * (1.0 + 1e-6);
        let a = diagnostics::antisym_norm(&s.sigma);
        worst = worst.max(a / bound);
    }
    CheckResult::new(
        "antisym_decay",
        worst <= 1.0,
        format!("worst norm/bound ratio {worst:.9}"),
    )
}

fn check_stress_bound(config: &Config) -> CheckResult {
    let mut min_slack = f64::INFINITY;
    for advection in [false, true] {
        for seed in 0..2u64 {
            let mut cfg = config.clone();
            cfg.variant.advection = advection;
            cfg.run.seed = config.run.seed.wrapping_add(seed);
            cfg.run.ic = parse_config("ic_u = random 0.1 4\nic_sigma = random 0.2 4")
                .unwrap()
                .run
                .ic;
            let traj = match dynamics::run(&cfg) {
                Ok(t) => t,
                Err(e) => return CheckResult::new("stress_linf_bound", false, e.to_string()),
            };
            for r in &traj.records {
                min_slack = min_slack.min(r.linf_bound_slack);
            }
        }
    }
    CheckResult::new(
        "stress_linf_bound",
        min_slack >= -1e-3,
        format!("min slack {min_slack:.6e}"),
    )
}

fn check_energy_dissipation(config: &Config) -> CheckResult {
    let mut worst_rise = f64::NEG_INFINITY;
    for seed in 0..3u64 {
        let mut cfg = config.clone();
        cfg.variant.advection = false;
        cfg.run.forcing.ua = VectorForcing::Zero;
        cfg.run.forcing.uw = VectorForcing::Zero;
        cfg.run.forcing.h0 = ScalarForcing::Zero;
        cfg.run.seed = config.run.seed.wrapping_add(100 + seed);
        cfg.run.ic = parse_config("ic_u = random 0.1 4\nic_sigma = random 0.1 4")
            .unwrap()
            .run
            .ic;
        let traj = match dynamics::run(&cfg) {
            Ok(t) => t,
            Err(e) => return CheckResult::new("energy_dissipation", false, e.to_string()),
        };
        for w in traj.records.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt > 0.0 {
                worst_rise = worst_rise.max((w[1].energy_l2 - w[0].energy_l2) / dt);
            }
        }
    }
    CheckResult::new(
        "energy_dissipation",
        worst_rise <= 1e-8,
        format!("max energy rise per unit time {worst_rise:.3e}"),
    )
}

fn check_drag_dissipativity(config: &Config, grid: TorusGrid) -> CheckResult {
    // with U_a = U_w = H_0 = 0 the external force reduces to the water
    // drag on -u plus Coriolis, and its work against u must be <= 0 for
    // any turning angle in (-pi/2, pi/2)
    let spec = crate::forcing::ForcingSpec::default();
    let prepared = match crate::forcing::PreparedForcing::new(grid, &spec, &config.physical) {
        Ok(p) => p,
        Err(e) => return CheckResult::new("drag_dissipativity", false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let kmax = 3i64.min(grid.modes() as i64);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let u = random_velocity(grid, &mut rng, kmax, 0.3);
        let work = match diagnostics::forcing_work(&u, &prepared, &config.physical, 0.0) {
            Ok(w) => w,
            Err(e) => return CheckResult::new("drag_dissipativity", false, e.to_string()),
        };
        worst = worst.max(work / u.l2_norm().powi(2).max(1e-300));
    }
    CheckResult::new(
        "drag_dissipativity",
        worst <= 1e-13,
        format!("worst normalised drag work {worst:.3e}"),
    )
}

fn check_divergence_pairing(grid: TorusGrid) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let n = grid.modes();
    let kmax = 4i64.min(n as i64);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let mut u = random_velocity(grid, &mut rng, kmax, 0.5);
        u.project(n);
        let mut sigma = random_tensor(grid, &mut rng, kmax, 0.5);
        sigma.project(n);
        let resid = match diagnostics::divergence_pairing_residual(&sigma, &u) {
            Ok(r) => r,
            Err(e) => return CheckResult::new("divergence_pairing", false, e.to_string()),
        };
        let scale = sigma.l2_norm() * u.seminorm(1) + 1e-300;
        worst = worst.max(resid.abs() / scale);
    }
    CheckResult::new(
        "divergence_pairing",
        worst <= 1e-12,
        format!("worst relative residual {worst:.3e}"),
    )
}

fn check_steady_state(config: &Config) -> CheckResult {
    let mut worst = 0.0_f64;
    for advection in [false, true] {
        let mut cfg = config.clone();
        cfg.variant.advection = advection;
        cfg.run.forcing.ua = VectorForcing::Zero;
        cfg.run.forcing.uw = VectorForcing::Zero;
        cfg.run.forcing.h0 = ScalarForcing::Zero;
        cfg.run.ic = parse_config("ic_u = zero\nic_sigma = tau_zero").unwrap().run.ic;
        let traj = match dynamics::run(&cfg) {
            Ok(t) => t,
            Err(e) => return CheckResult::new("steady_state", false, e.to_string()),
        };
        let s0 = &traj.states[0];
        for s in &traj.states {
            worst = worst
                .max(s.u.diff(&s0.u).l2_norm())
                .max(s.sigma.diff(&s0.sigma).l2_norm());
        }
    }
    CheckResult::new(
        "steady_state",
        worst <= 1e-12,
        format!("max drift {worst:.3e}"),
    )
}

fn check_spectral_kernel(grid: TorusGrid) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst_rt = 0.0_f64;
    let mut worst_voigt = 0.0_f64;
    let mut worst_parseval = 0.0_f64;
    for _ in 0..100 {
        let samples: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = match ScalarField::from_physical(grid, &samples) {
            Ok(f) => f,
            Err(e) => return CheckResult::new("spectral_kernel", false, e.to_string()),
        };
        let back = f.to_physical().unwrap();
        let rt = samples
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_rt = worst_rt.max(rt);
        let v = f.voigt_multiply(1.0, 0.3).invert_voigt(1.0, 0.3);
        worst_voigt = worst_voigt.max(v.diff(&f).l2_norm() / f.l2_norm());
        let spectral = f.l2_norm().powi(2);
        let physical = samples.iter().map(|v| v * v).sum::<f64>() / grid.len() as f64;
        worst_parseval = worst_parseval.max((spectral - physical).abs() / physical);
    }
    let passed = worst_rt <= 1e-12 && worst_voigt <= 1e-13 && worst_parseval <= 1e-12;
    CheckResult::new(
        "spectral_kernel",
        passed,
        format!(
            "round trip {worst_rt:.3e}, voigt round trip {worst_voigt:.3e}, parseval {worst_parseval:.3e}"
        ),
    )
}

/// Run every named check at the scale given by the config.
pub fn run_battery(config: &Config) -> Result<Vec<CheckResult>> {
    config.validate()?;
    let grid = TorusGrid::new(config.run.grid_modes, config.run.physical_points)?;
    Ok(vec![
        check_spectral_kernel(grid),
        check_strain_rate_lipschitz(grid),
        check_divergence_pairing(grid),
        check_drag_dissipativity(config, grid),
        check_steady_state(config),
        check_antisym_decay(config),
        check_stress_bound(config),
        check_energy_dissipation(config),
    ])
}
