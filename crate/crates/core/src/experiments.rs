//! Scripted parameter studies: regularisation limits, resolution
//! self-convergence, twin-run stability envelopes and temporal order.

use crate::config::Config;
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::dynamics::{self, Model, State, Trajectory};
use crate::forcing::{ScalarForcing, VectorForcing};
use crate::spectral::{SymTensorField, VectorField};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tolerances shared by the per-run re-checks every sweep performs.
const SLACK_TOL: f64 = 1e-3;
const ENERGY_RISE_TOL: f64 = 1e-8;

/// Result of one parameter sweep: per-run diagnostics plus successive
/// trajectory distances.
pub struct SweepResult {
    pub kind: String,
    /// Swept parameter value per constituent run.
    pub values: Vec<f64>,
    /// Final diagnostics row per run.
    pub finals: Vec<DiagnosticsRecord>,
    /// Minimum stress-bound slack over each run.
    pub min_slacks: Vec<f64>,
    /// Largest observed energy increase per unit time (only meaningful
    /// for the non-advective unforced case; otherwise NaN).
    pub max_energy_rise: Vec<f64>,
    /// Whether the energy-monotonicity check applies.
    pub energy_check_applies: bool,
    /// Trajectory distances (velocity, discrete C([0,T]; H1)).
    pub cauchy_u_h1: Vec<f64>,
    /// Trajectory distances (stress, discrete C([0,T]; L2)).
    pub cauchy_sigma_l2: Vec<f64>,
    /// Underresolution flags (resolution sweep only, empty otherwise).
    pub underresolved: Vec<bool>,
}

impl SweepResult {
    /// All per-run and cross-run checks that the sweep doubles as.
    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (v, s) in self.values.iter().zip(&self.min_slacks) {
            if *s < -SLACK_TOL {
                out.push(format!("stress bound violated at value {v}: slack {s}"));
            }
        }
        if self.energy_check_applies {
            for (v, r) in self.values.iter().zip(&self.max_energy_rise) {
                if *r > ENERGY_RISE_TOL {
                    out.push(format!("energy rose at value {v}: rate {r}"));
                }
            }
        }
        for w in self.cauchy_u_h1.windows(2) {
            if !(w[1] < w[0]) {
                out.push(format!("velocity distances not decreasing: {} -> {}", w[0], w[1]));
            }
        }
        for w in self.cauchy_sigma_l2.windows(2) {
            if !(w[1] < w[0]) {
                out.push(format!("stress distances not decreasing: {} -> {}", w[0], w[1]));
            }
        }
        for (v, flag) in self.values.iter().zip(&self.underresolved) {
            if *flag {
                out.push(format!("run at value {v} underresolved"));
            }
        }
        out
    }

    /// Per-run CSV: value, terminal diagnostics, slack, energy rise.
    pub fn to_csv(&self) -> String {
        let mut s = format!("value,min_slack,max_energy_rise,{}\n", DiagnosticsRecord::CSV_HEADER);
        for i in 0..self.values.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.values[i],
                self.min_slacks[i],
                self.max_energy_rise[i],
                self.finals[i].csv_row()
            ));
        }
        s.push_str("\npair,cauchy_u_H1,cauchy_sigma_L2\n");
        for (i, (du, ds)) in self.cauchy_u_h1.iter().zip(&self.cauchy_sigma_l2).enumerate() {
            s.push_str(&format!("{i},{du},{ds}\n"));
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("sweep kind: {}\n", self.kind);
        for i in 0..self.values.len() {
            s.push_str(&format!(
                "  value {:>12}: min slack {:+.3e}, energy rise {:+.3e}\n",
                self.values[i], self.min_slacks[i], self.max_energy_rise[i]
            ));
        }
        for (i, (du, ds)) in self.cauchy_u_h1.iter().zip(&self.cauchy_sigma_l2).enumerate() {
            s.push_str(&format!("  distance {i}: u_H1 {du:.6e}, sigma_L2 {ds:.6e}\n"));
        }
        let fails = self.failures();
        if fails.is_empty() {
            s.push_str("result: PASS\n");
        } else {
            for f in &fails {
                s.push_str(&format!("FAIL: {f}\n"));
            }
        }
        s
    }
}

fn is_unforced(config: &Config) -> bool {
    matches!(config.run.forcing.ua, VectorForcing::Zero)
        && matches!(config.run.forcing.uw, VectorForcing::Zero)
        && matches!(config.run.forcing.h0, ScalarForcing::Zero)
}

/// Run several configs, optionally in parallel, preserving input order.
pub fn run_many(configs: &[Config], threads: usize) -> Result<Vec<Trajectory>> {
    if threads <= 1 || configs.len() <= 1 {
        return configs.iter().map(dynamics::run).collect();
    }
    let mut results: Vec<Option<Result<Trajectory>>> = (0..configs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut pending: Vec<(usize, &Config)> = configs.iter().enumerate().collect();
        while !pending.is_empty() {
            let batch: Vec<_> = pending
                .drain(..pending.len().min(threads))
                .collect();
            let handles: Vec<_> = batch
                .into_iter()
                .map(|(i, cfg)| (i, scope.spawn(move || dynamics::run(cfg))))
                .collect();
            for (i, h) in handles {
                results[i] = Some(h.join().expect("worker panicked"));
            }
        }
    });
    results.into_iter().map(|r| r.unwrap()).collect()
}

/// Pin every constituent config to the same explicit dt so trajectories
/// share output times: the minimum of the per-config heuristics.
fn common_dt(configs: &mut [Config]) -> Result<()> {
    if configs.iter().all(|c| c.run.dt.is_some()) {
        return Ok(());
    }
    let mut dt = f64::INFINITY;
    for cfg in configs.iter() {
        match cfg.run.dt {
            Some(d) => dt = dt.min(d),
            None => {
                let model = Model::new(cfg)?;
                let ic = dynamics::prepare_ic(
                    model.grid,
                    &cfg.run.ic,
                    cfg.reg.delta,
                    model.n,
                    cfg.run.seed,
                    cfg.physical.p,
                )?;
                dt = dt.min(model.stable_dt(&ic)?);
            }
        }
    }
    for cfg in configs {
        cfg.run.dt = Some(dt);
    }
    Ok(())
}

fn check_run(traj: &Trajectory) -> (f64, f64) {
    let min_slack = traj
        .records
        .iter()
        .map(|r| r.linf_bound_slack)
        .fold(f64::INFINITY, f64::min);
    let mut max_rise = f64::NEG_INFINITY;
    for w in traj.records.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt > 0.0 {
            max_rise = max_rise.max((w[1].energy_l2 - w[0].energy_l2) / dt);
        }
    }
    if !max_rise.is_finite() {
        max_rise = 0.0;
    }
    (min_slack, max_rise)
}

/// Max over matched output times of the H1 distance between velocities
/// and the L2 distance between stresses. States may live at different
/// truncation orders; both are restricted to the shared band first.
fn trajectory_distance(a: &Trajectory, b: &Trajectory, common_n: usize) -> Result<(f64, f64)> {
    if a.states.len() != b.states.len() {
        return Err(Error::Mismatch(format!(
            "trajectories have {} vs {} snapshots",
            a.states.len(),
            b.states.len()
        )));
    }
    let mut du = 0.0_f64;
    let mut ds = 0.0_f64;
    for (x, y) in a.states.iter().zip(&b.states) {
        if (x.t - y.t).abs() > 1e-12 * (1.0 + x.t.abs()) {
            return Err(Error::Mismatch(format!("times differ: {} vs {}", x.t, y.t)));
        }
        let mut ux = x.u.clone();
        let mut uy = y.u.clone();
        ux.retruncate(common_n)?;
        uy.retruncate(common_n)?;
        let mut sx = x.sigma.clone();
        let mut sy = y.sigma.clone();
        sx.retruncate(common_n)?;
        sy.retruncate(common_n)?;
        du = du.max(ux.diff(&uy).sobolev_norm(1.0));
        ds = ds.max(sx.diff(&sy).l2_norm());
    }
    Ok((du, ds))
}

fn collect_sweep(
    kind: &str,
    values: Vec<f64>,
    trajs: &[Trajectory],
    energy_check_applies: bool,
    distances: Vec<(f64, f64)>,
    underresolved: Vec<bool>,
) -> SweepResult {
    let mut min_slacks = Vec::new();
    let mut max_energy_rise = Vec::new();
    let mut finals = Vec::new();
    for t in trajs {
        let (s, r) = check_run(t);
        min_slacks.push(s);
        max_energy_rise.push(if energy_check_applies { r } else { f64::NAN });
        finals.push(*t.records.last().unwrap());
    }
    SweepResult {
        kind: kind.to_string(),
        values,
        finals,
        min_slacks,
        max_energy_rise,
        energy_check_applies,
        cauchy_u_h1: distances.iter().map(|d| d.0).collect(),
        cauchy_sigma_l2: distances.iter().map(|d| d.1).collect(),
        underresolved,
    }
}

/// Vary the strain-rate floor epsilon over a strictly decreasing list and
/// report successive trajectory distances.
pub fn sweep_epsilon(config: &Config, eps_list: &[f64], threads: usize) -> Result<SweepResult> {
    if eps_list.len() < 2 || eps_list.windows(2).any(|w| !(w[1] < w[0])) || eps_list.iter().any(|e| *e < 0.0) {
        return Err(Error::InvalidArgument(
            "epsilon list must be strictly decreasing and nonnegative".into(),
        ));
    }
    let mut configs: Vec<Config> = eps_list
        .iter()
        .map(|&e| {
            let mut c = config.clone();
            c.reg.epsilon = e;
            c
        })
        .collect();
    common_dt(&mut configs)?;
    let trajs = run_many(&configs, threads)?;
    let n = config.run.grid_modes;
    let mut distances = Vec::new();
    for w in trajs.windows(2) {
        distances.push(trajectory_distance(&w[0], &w[1], n)?);
    }
    Ok(collect_sweep(
        "epsilon",
        eps_list.to_vec(),
        &trajs,
        !config.variant.advection && is_unforced(config),
        distances,
        vec![],
    ))
}

/// Joint limit of the bi-harmonic coefficient and the mollification
/// radius: runs at (beta, delta) = (b, b) for each listed b, plus the
/// b = 0 target; distances are measured to the target.
pub fn sweep_beta_delta(config: &Config, beta_list: &[f64], threads: usize) -> Result<SweepResult> {
    if beta_list.len() < 2
        || beta_list.windows(2).any(|w| !(w[1] < w[0]))
        || beta_list.iter().any(|b| !(*b > 0.0))
    {
        return Err(Error::InvalidArgument(
            "beta list must be strictly decreasing and positive".into(),
        ));
    }
    let mut configs: Vec<Config> = beta_list
        .iter()
        .chain(std::iter::once(&0.0))
        .map(|&b| {
            let mut c = config.clone();
            c.reg.beta = b;
            c.reg.delta = b;
            c.variant.voigt_biharmonic = b > 0.0;
            c
        })
        .collect();
    common_dt(&mut configs)?;
    let trajs = run_many(&configs, threads)?;
    let n = config.run.grid_modes;
    let target = trajs.last().unwrap();
    let mut distances = Vec::new();
    for t in &trajs[..trajs.len() - 1] {
        distances.push(trajectory_distance(t, target, n)?);
    }
    let mut values = beta_list.to_vec();
    values.push(0.0);
    Ok(collect_sweep(
        "beta_delta",
        values,
        &trajs,
        !config.variant.advection && is_unforced(config),
        distances,
        vec![],
    ))
}

/// Fraction of spectral energy in the top third of the retained band.
fn top_band_fraction(state: &State, n: usize) -> f64 {
    let cutoff = (2 * n) / 3;
    let mut low = state.u.clone();
    low.project(cutoff);
    let total = state.u.l2_norm().powi(2);
    if total == 0.0 {
        return 0.0;
    }
    let high = (total - low.l2_norm().powi(2)).max(0.0);
    high / total
}

/// Increase the truncation order over a shared physical grid and report
/// self-convergence on the common mode band.
pub fn sweep_resolution(config: &Config, n_list: &[usize], threads: usize) -> Result<SweepResult> {
    if n_list.len() < 2 || n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "resolution list must be strictly increasing".into(),
        ));
    }
    let m = config
        .run
        .physical_points
        .max(4 * n_list.last().unwrap());
    let mut configs: Vec<Config> = n_list
        .iter()
        .map(|&n| {
            let mut c = config.clone();
            c.run.grid_modes = n;
            c.run.physical_points = m;
            c
        })
        .collect();
    common_dt(&mut configs)?;
    let trajs = run_many(&configs, threads)?;
    let mut distances = Vec::new();
    for (i, w) in trajs.windows(2).enumerate() {
        distances.push(trajectory_distance(&w[0], &w[1], n_list[i])?);
    }
    let underresolved = trajs
        .iter()
        .zip(n_list)
        .map(|(t, &n)| top_band_fraction(t.states.last().unwrap(), n) > 1e-6)
        .collect();
    Ok(collect_sweep(
        "resolution",
        n_list.iter().map(|&n| n as f64).collect(),
        &trajs,
        !config.variant.advection && is_unforced(config),
        distances,
        underresolved,
    ))
}

/// Stability envelope from perturbed twin runs.
pub struct TwinReport {
    pub scales: Vec<f64>,
    pub times: Vec<f64>,
    /// metric(t) per scale, indexed [scale][time].
    pub series: Vec<Vec<f64>>,
    pub terminal_sqrt: Vec<f64>,
    /// Ratios of successive terminal sqrt-metrics.
    pub ratios: Vec<f64>,
    /// Single fitted envelope exponent shared across scales.
    pub envelope_c: f64,
    /// Least-squares slope of ln(metric) per scale.
    pub per_scale_slope: Vec<f64>,
}

impl TwinReport {
    /// metric(t) <= metric(0) exp(C t) (1 + tol) for the shared C.
    pub fn envelope_holds(&self, tol: f64) -> bool {
        self.series.iter().all(|series| {
            let m0 = series[0];
            m0 > 0.0
                && series
                    .iter()
                    .zip(&self.times)
                    .all(|(m, t)| *m <= m0 * (self.envelope_c * t).exp() * (1.0 + tol))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for scale in &self.scales {
            s.push_str(&format!(",metric_scale_{scale}"));
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            s.push_str(&t.to_string());
            for series in &self.series {
                s.push_str(&format!(",{}", series[i]));
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "twin run: scales {:?}\n  envelope C = {:.6}\n",
            self.scales, self.envelope_c
        );
        for (i, scale) in self.scales.iter().enumerate() {
            s.push_str(&format!(
                "  scale {scale}: terminal sqrt-metric {:.6e}, slope {:.4}\n",
                self.terminal_sqrt[i], self.per_scale_slope[i]
            ));
        }
        for (i, r) in self.ratios.iter().enumerate() {
            s.push_str(&format!("  terminal ratio {i}: {r:.4}\n"));
        }
        s
    }
}

/// Deterministic unit-norm perturbation direction derived from the seed.
fn perturbation_direction(model: &Model, seed: u64) -> Result<(VectorField, SymTensorField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut du = VectorField::zeros(model.grid);
    let mut dsigma = SymTensorField::zeros(model.grid);
    {
        use rand::Rng;
        use std::f64::consts::PI;
        let kmax = 3i64.min(model.n as i64);
        let mut fill = |f: &mut crate::spectral::ScalarField| {
            for kx in -kmax..=kmax {
                for ky in -kmax..=kmax {
                    if (kx, ky) == (0, 0) {
                        continue;
                    }
                    let decay = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
                    f.add_cos_mode(kx, ky, decay * rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI));
                }
            }
        };
        fill(&mut du[0]);
        fill(&mut du[1]);
        fill(&mut dsigma.xx);
        fill(&mut dsigma.xy);
        fill(&mut dsigma.yy);
    }
    let norm = (du.l2_norm().powi(2) + dsigma.l2_norm().powi(2)).sqrt();
    du.scale(1.0 / norm);
    dsigma.scale(1.0 / norm);
    Ok((du, dsigma))
}

/// Run a base trajectory plus one per perturbation scale and track the
/// difference functional over time.
pub fn twin_run(config: &Config, scales: &[f64], threads: usize) -> Result<TwinReport> {
    if scales.is_empty() || scales.windows(2).any(|w| !(w[1] < w[0])) || scales.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidArgument(
            "perturbation scales must be strictly decreasing and positive".into(),
        ));
    }
    let model = Model::new(config)?;
    let base_ic = dynamics::prepare_ic(
        model.grid,
        &config.run.ic,
        config.reg.delta,
        model.n,
        config.run.seed,
        config.physical.p,
    )?;
    let dt = match config.run.dt {
        Some(d) => d,
        None => model.stable_dt(&base_ic)?,
    };
    let mut cfg = config.clone();
    cfg.run.dt = Some(dt);
    let (du, dsigma) = perturbation_direction(&model, config.run.seed)?;
    let base = dynamics::run_from(&model, base_ic.clone(), &cfg)?;

    let perturbed: Vec<Trajectory> = if threads <= 1 {
        scales
            .iter()
            .map(|&s| {
                let mut ic = base_ic.clone();
                ic.u.add_scaled(s, &du);
                ic.sigma.add_scaled(s, &dsigma);
                dynamics::run_from(&model, ic, &cfg)
            })
            .collect::<Result<_>>()?
    } else {
        let mut out: Vec<Option<Result<Trajectory>>> = (0..scales.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = scales
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    let model = &model;
                    let cfg = &cfg;
                    let base_ic = &base_ic;
                    let du = &du;
                    let dsigma = &dsigma;
                    (
                        i,
                        scope.spawn(move || {
                            let mut ic = base_ic.clone();
                            ic.u.add_scaled(s, du);
                            ic.sigma.add_scaled(s, dsigma);
                            dynamics::run_from(model, ic, cfg)
                        }),
                    )
                })
                .collect();
            for (i, h) in handles {
                out[i] = Some(h.join().expect("worker panicked"));
            }
        });
        out.into_iter().map(|r| r.unwrap()).collect::<Result<_>>()?
    };

    let times: Vec<f64> = base.states.iter().map(|s| s.t).collect();
    let mut series = Vec::new();
    for traj in &perturbed {
        let mut m = Vec::new();
        for (a, b) in base.states.iter().zip(&traj.states) {
            m.push(diagnostics::continuous_dependence_metric(
                a,
                b,
                &model.phys,
                model.reg.alpha,
            )?);
        }
        series.push(m);
    }
    let terminal_sqrt: Vec<f64> = series.iter().map(|s| s.last().unwrap().sqrt()).collect();
    let ratios = terminal_sqrt
        .windows(2)
        .map(|w| w[0] / w[1])
        .collect();
    // shared envelope exponent: the smallest C for which every series
    // stays under metric(0) exp(C t)
    let mut envelope_c = 0.0_f64;
    for s in &series {
        let m0 = s[0];
        for (m, t) in s.iter().zip(&times).skip(1) {
            if *t > 0.0 && *m > 0.0 && m0 > 0.0 {
                envelope_c = envelope_c.max((m / m0).ln() / t);
            }
        }
    }
    // per-scale least-squares slope of ln(metric) against t
    let per_scale_slope = series
        .iter()
        .map(|s| {
            let pts: Vec<(f64, f64)> = times
                .iter()
                .zip(s)
                .filter(|(_, m)| **m > 0.0)
                .map(|(t, m)| (*t, m.ln()))
                .collect();
            least_squares_slope(&pts)
        })
        .collect();
    Ok(TwinReport {
        scales: scales.to_vec(),
        times,
        series,
        terminal_sqrt,
        ratios,
        envelope_c,
        per_scale_slope,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Richardson self-convergence study over a halving dt sequence. Returns
/// the fitted order and the successive terminal differences.
pub fn temporal_order_study(config: &Config, dt_list: &[f64]) -> Result<(f64, Vec<f64>)> {
    if dt_list.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three dt values for an order estimate".into(),
        ));
    }
    for w in dt_list.windows(2) {
        if !((w[1] - w[0] / 2.0).abs() < 1e-12 * w[0]) {
            return Err(Error::InvalidArgument("dt list must halve".into()));
        }
    }
    let mut finals = Vec::new();
    for &dt in dt_list {
        let mut c = config.clone();
        c.run.dt = Some(dt);
        let traj = dynamics::run(&c)?;
        finals.push(traj.states.last().unwrap().clone());
    }
    let mut errs = Vec::new();
    for w in finals.windows(2) {
        errs.push(
            w[0].u.diff(&w[1].u).l2_norm() + w[0].sigma.diff(&w[1].sigma).l2_norm(),
        );
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let fitted = orders.iter().sum::<f64>() / orders.len() as f64;
    Ok((fitted, errs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn base_config(extra: &str) -> Config {
        parse_config(&format!(
            "N = 8\nM = 32\nt_final = 0.4\nic_u = random 0.1 3\nic_sigma = random 0.1 3\nseed = 11\noutput_every = 4\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn epsilon_sweep_distances_decrease() {
        let cfg = base_config("");
        let res = sweep_epsilon(&cfg, &[0.1, 0.05, 0.025, 0.0125], 1).unwrap();
        assert!(res.passed(), "{}", res.summary());
        assert!(res.cauchy_u_h1.windows(2).all(|w| w[1] < w[0]));
        assert!(res.cauchy_sigma_l2.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn epsilon_sweep_trivial_on_steady_state() {
        let cfg = parse_config(
            "N = 8\nM = 32\nt_final = 0.3\nic_u = zero\nic_sigma = tau_zero\ndt = 0.05",
        )
        .unwrap();
        let res = sweep_epsilon(&cfg, &[0.1, 0.05], 1).unwrap();
        // the steady state is epsilon-independent, so distances vanish;
        // strict decrease is then not required
        assert!(res.cauchy_u_h1.iter().all(|d| *d < 1e-12));
        assert!(res.cauchy_sigma_l2.iter().all(|d| *d < 1e-12));
    }

    #[test]
    fn beta_delta_sweep_converges_to_target() {
        let cfg = base_config("epsilon = 0.1");
        let res = sweep_beta_delta(&cfg, &[0.2, 0.1, 0.05], 1).unwrap();
        assert!(res.passed(), "{}", res.summary());
        assert_eq!(res.cauchy_u_h1.len(), 3);
    }

    #[test]
    fn resolution_sweep_on_steady_state_is_exact() {
        let cfg = parse_config(
            "N = 8\nM = 64\nt_final = 0.3\nic_u = zero\nic_sigma = tau_zero\nepsilon = 0.1\ndt = 0.05",
        )
        .unwrap();
        let res = sweep_resolution(&cfg, &[8, 12, 16], 1).unwrap();
        assert!(res.cauchy_u_h1.iter().all(|d| *d < 1e-13));
        assert!(res.cauchy_sigma_l2.iter().all(|d| *d < 1e-13));
        assert!(res.underresolved.iter().all(|f| !f));
    }

    #[test]
    fn twin_runs_scale_linearly() {
        let cfg = base_config("epsilon = 0.1");
        let report = twin_run(&cfg, &[1e-2, 1e-3], 1).unwrap();
        let ratio = report.ratios[0];
        assert!((ratio - 10.0).abs() < 1.5, "ratio {ratio}");
        assert!(report.envelope_holds(1e-3), "{}", report.summary());
        assert!(report.envelope_c.is_finite());
    }

    #[test]
    fn parallel_and_serial_sweeps_agree() {
        let cfg = base_config("epsilon = 0.1");
        let a = sweep_epsilon(&cfg, &[0.1, 0.05, 0.025], 1).unwrap();
        let b = sweep_epsilon(&cfg, &[0.1, 0.05, 0.025], 3).unwrap();
        assert_eq!(a.cauchy_u_h1, b.cauchy_u_h1);
        assert_eq!(a.cauchy_sigma_l2, b.cauchy_sigma_l2);
        for (x, y) in a.finals.iter().zip(&b.finals) {
            assert_eq!(x.csv_row(), y.csv_row());
        }
    }

    #[test]
    fn order_study_reports_fourth_order() {
        let cfg = parse_config(
            "N = 8\nM = 32\nt_final = 0.4\nepsilon = 0.1\nic_u = fourier 1 0 0.2 0.0 0.0 0.0\nic_sigma = fourier 0 1 0.1 0.0 0.05 0.3 0.1 0.0",
        )
        .unwrap();
        let (order, errs) = temporal_order_study(&cfg, &[0.04, 0.02, 0.01, 0.005]).unwrap();
        assert!((order - 4.0).abs() < 0.2, "order {order}, errs {errs:?}");
    }

    #[test]
    fn invalid_parameter_lists_are_rejected() {
        let cfg = base_config("");
        assert!(sweep_epsilon(&cfg, &[0.05, 0.1], 1).is_err());
        assert!(sweep_beta_delta(&cfg, &[0.1, 0.2], 1).is_err());
        assert!(sweep_resolution(&cfg, &[16, 8], 1).is_err());
        assert!(twin_run(&cfg, &[1e-3, 1e-2], 1).is_err());
        assert!(temporal_order_study(&cfg, &[0.04, 0.03, 0.02]).is_err());
    }
}
