//! Model parameters, variant selection and run configuration.
//!
//! Config files are UTF-8 text, one `key = value` per line, `#` starts a
//! comment, unknown keys are an error. The full key list is documented in
//! the README. Angles may be given in degrees (`phi_deg`, `theta_deg`) or
//! radians (`phi_rad`, `theta_rad`); internal storage is radians.

use crate::forcing::{ForcingSpec, ScalarForcing, ScalarMode, VectorForcing, VectorMode};
use crate::{Error, Result};
use std::path::Path;

/// Physical constants of the EVP model (Table-1 symbols).
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Internal ice strength P (> 0).
    pub p: f64,
    /// Elastic modulus E (> 0).
    pub e: f64,
    /// Air drag coefficient.
    pub c_a: f64,
    /// Ocean drag coefficient.
    pub c_w: f64,
    /// Air density (kg/m^3).
    pub rho_a: f64,
    /// Ocean water density (kg/m^3).
    pub rho_w: f64,
    /// Air turning angle (radians).
    pub phi: f64,
    /// Water turning angle (radians).
    pub theta: f64,
    /// Rotation parameter Omega (1/s).
    pub omega_rot: f64,
    /// Gravitational constant (m/s^2).
    pub g: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        default_params()
    }
}

/// Typical parameter values. P carries no typical value in the literature
/// table; the normalised default P = 1 keeps the stress bound O(1).
pub fn default_params() -> PhysicalParams {
    PhysicalParams {
        p: 1.0,
        e: 0.25,
        c_a: 1.2e-3,
        c_w: 5.5e-3,
        rho_a: 1.3,
        rho_w: 1026.0,
        phi: 25.0_f64.to_radians(),
        theta: 25.0_f64.to_radians(),
        omega_rot: 1.46e-4,
        g: 9.81,
    }
}

/// Regularisation parameters: Voigt length alpha, bi-harmonic beta,
/// mollification radius delta, strain-rate floor epsilon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for RegularizationParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            delta: 0.0,
            epsilon: 0.0,
        }
    }
}

/// Model-variant switches: advection term in the momentum balance on/off,
/// bi-harmonic beta-term active or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ModelVariant {
    pub advection: bool,
    pub voigt_biharmonic: bool,
}

/// Parametric initial condition for the velocity.
#[derive(Clone, Debug, PartialEq)]
pub enum IcVectorSpec {
    Zero,
    Constant([f64; 2]),
    Fourier(Vec<VectorMode>),
    /// Seeded random band-limited field with smooth spectral decay.
    Random { amp: f64, kmax: usize },
}

/// Parametric initial condition for the stress tensor.
#[derive(Clone, Debug, PartialEq)]
pub enum IcTensorSpec {
    Zero,
    /// sigma = -(P/2) I, the tau = 0 steady state.
    TauZero,
    Constant([f64; 3]),
    Fourier(Vec<TensorMode>),
    Random { amp: f64, kmax: usize },
}

/// One Fourier mode of a symmetric tensor field: (amp, phase) per
/// component (s11, s12, s22).
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMode {
    pub k: [i64; 2],
    pub amp: [f64; 3],
    pub phase: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcSpec {
    pub u: IcVectorSpec,
    pub sigma: IcTensorSpec,
}

impl Default for IcSpec {
    fn default() -> Self {
        Self {
            u: IcVectorSpec::Random { amp: 0.1, kmax: 4 },
            sigma: IcTensorSpec::Random { amp: 0.2, kmax: 4 },
        }
    }
}

/// Run configuration: discretisation, horizon, output cadence, forcing
/// and initial-condition specs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Fourier truncation order N.
    pub grid_modes: usize,
    /// Physical points per dimension M (>= 2N + 2, even).
    pub physical_points: usize,
    pub t_final: f64,
    /// Time step; `None` selects the stability heuristic.
    pub dt: Option<f64>,
    /// Step cadence for diagnostics/snapshots.
    pub output_every: usize,
    pub forcing: ForcingSpec,
    pub ic: IcSpec,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_modes: 32,
            physical_points: 128,
            t_final: 1.0,
            dt: None,
            output_every: 10,
            forcing: ForcingSpec::default(),
            ic: IcSpec::default(),
            seed: 0,
        }
    }
}

/// Full validated configuration.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Config {
    pub physical: PhysicalParams,
    pub reg: RegularizationParams,
    pub variant: ModelVariant,
    pub run: RunConfig,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let p = &self.physical;
        let positive = [
            ("P", p.p),
            ("E", p.e),
            ("rho_a", p.rho_a),
            ("rho_w", p.rho_w),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        let nonneg = [("c_a", p.c_a), ("c_w", p.c_w), ("g", p.g)];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        let r = &self.reg;
        if !(r.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be > 0, got {}", r.alpha)));
        }
        for (name, v) in [("beta", r.beta), ("delta", r.delta), ("epsilon", r.epsilon)] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        let run = &self.run;
        if run.grid_modes < 1 {
            return Err(Error::Config("N must be >= 1".into()));
        }
        if run.physical_points % 2 != 0 {
            return Err(Error::Config(format!(
                "M must be even, got {}",
                run.physical_points
            )));
        }
        if run.physical_points < 2 * run.grid_modes + 2 {
            return Err(Error::Config(format!(
                "M must be >= 2N + 2, got M = {} for N = {}",
                run.physical_points, run.grid_modes
            )));
        }
        if let Some(dt) = run.dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt must be > 0, got {dt}")));
            }
        }
        if !(run.t_final >= 0.0) {
            return Err(Error::Config(format!(
                "t_final must be >= 0, got {}",
                run.t_final
            )));
        }
        if run.output_every == 0 {
            return Err(Error::Config("output_every must be >= 1".into()));
        }
        run.forcing.validate(run.grid_modes)?;
        validate_ic(&self.run.ic, run.grid_modes)?;
        Ok(())
    }

    /// Effective bi-harmonic coefficient: beta when the variant enables
    /// the beta-term, zero otherwise.
    pub fn effective_beta(&self) -> f64 {
        if self.variant.voigt_biharmonic {
            self.reg.beta
        } else {
            0.0
        }
    }
}

fn validate_ic(ic: &IcSpec, n: usize) -> Result<()> {
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
    if let IcVectorSpec::Fourier(modes) = &ic.u {
        for m in modes {
            check(&m.k, "ic_u")?;
        }
    }
    if let IcTensorSpec::Fourier(modes) = &ic.sigma {
        for m in modes {
            check(&m.k, "ic_sigma")?;
        }
    }
    Ok(())
}

/// Load and validate a config file; defaults fill omitted keys.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config(&text)
}

/// Parse config text; defaults fill omitted keys, unknown keys error out.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value)
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: not a number: `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: not a nonnegative integer: `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: not a boolean: `{v}`"))),
    }
}

fn parse_numbers(key: &str, words: &[&str]) -> Result<Vec<f64>> {
    words.iter().map(|w| parse_f64(key, w)).collect()
}

fn parse_vector_forcing(key: &str, v: &str) -> Result<VectorForcing> {
    let words: Vec<&str> = v.split_whitespace().collect();
    match words.first().copied() {
        Some("zero") => Ok(VectorForcing::Zero),
        Some("constant") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.len() != 2 {
                return Err(Error::Config(format!("{key}: constant expects 2 values")));
            }
            Ok(VectorForcing::Constant([nums[0], nums[1]]))
        }
        Some("fourier") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.is_empty() || nums.len() % 6 != 0 {
                return Err(Error::Config(format!(
                    "{key}: fourier expects groups of 6 numbers (kx ky ampx phasex ampy phasey)"
                )));
            }
            let modes = nums
                .chunks_exact(6)
                .map(|c| VectorMode {
                    k: [c[0] as i64, c[1] as i64],
                    amp: [c[2], c[4]],
                    phase: [c[3], c[5]],
                })
                .collect();
            Ok(VectorForcing::Fourier(modes))
        }
        _ => Err(Error::Config(format!(
            "{key}: expected zero | constant ... | fourier ..."
        ))),
    }
}

fn parse_scalar_forcing(key: &str, v: &str) -> Result<ScalarForcing> {
    let words: Vec<&str> = v.split_whitespace().collect();
    match words.first().copied() {
        Some("zero") => Ok(ScalarForcing::Zero),
        Some("constant") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.len() != 1 {
                return Err(Error::Config(format!("{key}: constant expects 1 value")));
            }
            Ok(ScalarForcing::Constant(nums[0]))
        }
        Some("fourier") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.is_empty() || nums.len() % 4 != 0 {
                return Err(Error::Config(format!(
                    "{key}: fourier expects groups of 4 numbers (kx ky amp phase)"
                )));
            }
            let modes = nums
                .chunks_exact(4)
                .map(|c| ScalarMode {
                    k: [c[0] as i64, c[1] as i64],
                    amp: c[2],
                    phase: c[3],
                })
                .collect();
            Ok(ScalarForcing::Fourier(modes))
        }
        _ => Err(Error::Config(format!(
            "{key}: expected zero | constant ... | fourier ..."
        ))),
    }
}

fn parse_ic_vector(key: &str, v: &str) -> Result<IcVectorSpec> {
    let words: Vec<&str> = v.split_whitespace().collect();
    match words.first().copied() {
        Some("random") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.len() != 2 {
                return Err(Error::Config(format!("{key}: random expects `amp kmax`")));
            }
            Ok(IcVectorSpec::Random {
                amp: nums[0],
                kmax: nums[1] as usize,
            })
        }
        _ => Ok(match parse_vector_forcing(key, v)? {
            VectorForcing::Zero => IcVectorSpec::Zero,
            VectorForcing::Constant(c) => IcVectorSpec::Constant(c),
            VectorForcing::Fourier(m) => IcVectorSpec::Fourier(m),
        }),
    }
}

fn parse_ic_tensor(key: &str, v: &str) -> Result<IcTensorSpec> {
    let words: Vec<&str> = v.split_whitespace().collect();
    match words.first().copied() {
        Some("zero") => Ok(IcTensorSpec::Zero),
        Some("tau_zero") => Ok(IcTensorSpec::TauZero),
        Some("constant") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.len() != 3 {
                return Err(Error::Config(format!(
                    "{key}: constant expects 3 values (s11 s12 s22)"
                )));
            }
            Ok(IcTensorSpec::Constant([nums[0], nums[1], nums[2]]))
        }
        Some("fourier") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.is_empty() || nums.len() % 8 != 0 {
                return Err(Error::Config(format!(
                    "{key}: fourier expects groups of 8 numbers (kx ky a11 p11 a12 p12 a22 p22)"
                )));
            }
            let modes = nums
                .chunks_exact(8)
                .map(|c| TensorMode {
                    k: [c[0] as i64, c[1] as i64],
                    amp: [c[2], c[4], c[6]],
                    phase: [c[3], c[5], c[7]],
                })
                .collect();
            Ok(IcTensorSpec::Fourier(modes))
        }
        Some("random") => {
            let nums = parse_numbers(key, &words[1..])?;
            if nums.len() != 2 {
                return Err(Error::Config(format!("{key}: random expects `amp kmax`")));
            }
            Ok(IcTensorSpec::Random {
                amp: nums[0],
                kmax: nums[1] as usize,
            })
        }
        _ => Err(Error::Config(format!(
            "{key}: expected zero | tau_zero | constant ... | fourier ... | random ..."
        ))),
    }
}

fn apply_key(cfg: &mut Config, key: &str, v: &str) -> Result<()> {
    match key {
        "P" => cfg.physical.p = parse_f64(key, v)?,
        "E" => cfg.physical.e = parse_f64(key, v)?,
        "c_a" => cfg.physical.c_a = parse_f64(key, v)?,
        "c_w" => cfg.physical.c_w = parse_f64(key, v)?,
        "rho_a" => cfg.physical.rho_a = parse_f64(key, v)?,
        "rho_w" => cfg.physical.rho_w = parse_f64(key, v)?,
        "phi_deg" => cfg.physical.phi = parse_f64(key, v)?.to_radians(),
        "phi_rad" => cfg.physical.phi = parse_f64(key, v)?,
        "theta_deg" => cfg.physical.theta = parse_f64(key, v)?.to_radians(),
        "theta_rad" => cfg.physical.theta = parse_f64(key, v)?,
        "Omega" => cfg.physical.omega_rot = parse_f64(key, v)?,
        "g" => cfg.physical.g = parse_f64(key, v)?,
        "alpha" => cfg.reg.alpha = parse_f64(key, v)?,
        "beta" => {
            cfg.reg.beta = parse_f64(key, v)?;
            cfg.variant.voigt_biharmonic = cfg.reg.beta > 0.0;
        }
        "delta" => cfg.reg.delta = parse_f64(key, v)?,
        "epsilon" => cfg.reg.epsilon = parse_f64(key, v)?,
        "advection" => cfg.variant.advection = parse_bool(key, v)?,
        "voigt_biharmonic" => cfg.variant.voigt_biharmonic = parse_bool(key, v)?,
        "N" => cfg.run.grid_modes = parse_usize(key, v)?,
        "M" => cfg.run.physical_points = parse_usize(key, v)?,
        "t_final" => cfg.run.t_final = parse_f64(key, v)?,
        "dt" => {
            cfg.run.dt = if v == "auto" {
                None
            } else {
                Some(parse_f64(key, v)?)
            }
        }
        "output_every" => cfg.run.output_every = parse_usize(key, v)?,
        "seed" => {
            cfg.run.seed = v
                .parse()
                .map_err(|_| Error::Config(format!("seed: not an integer: `{v}`")))?
        }
        "ua" => cfg.run.forcing.ua = parse_vector_forcing(key, v)?,
        "uw" => cfg.run.forcing.uw = parse_vector_forcing(key, v)?,
        "h0" => cfg.run.forcing.h0 = parse_scalar_forcing(key, v)?,
        "ua_omega" => cfg.run.forcing.ua_omega = parse_f64(key, v)?,
        "uw_omega" => cfg.run.forcing.uw_omega = parse_f64(key, v)?,
        "h0_omega" => cfg.run.forcing.h0_omega = parse_f64(key, v)?,
        "ic_u" => cfg.run.ic.u = parse_ic_vector(key, v)?,
        "ic_sigma" => cfg.run.ic.sigma = parse_ic_tensor(key, v)?,
        _ => return Err(Error::Config(format!("unknown key `{key}`"))),
    }
    Ok(())
}

fn fmt_vector_forcing(f: &VectorForcing) -> String {
    match f {
        VectorForcing::Zero => "zero".into(),
        VectorForcing::Constant(c) => format!("constant {} {}", c[0], c[1]),
        VectorForcing::Fourier(modes) => {
            let mut s = "fourier".to_string();
            for m in modes {
                s.push_str(&format!(
                    " {} {} {} {} {} {}",
                    m.k[0], m.k[1], m.amp[0], m.phase[0], m.amp[1], m.phase[1]
                ));
            }
            s
        }
    }
}

fn fmt_scalar_forcing(f: &ScalarForcing) -> String {
    match f {
        ScalarForcing::Zero => "zero".into(),
        ScalarForcing::Constant(c) => format!("constant {c}"),
        ScalarForcing::Fourier(modes) => {
            let mut s = "fourier".to_string();
            for m in modes {
                s.push_str(&format!(" {} {} {} {}", m.k[0], m.k[1], m.amp, m.phase));
            }
            s
        }
    }
}

fn fmt_ic_vector(f: &IcVectorSpec) -> String {
    match f {
        IcVectorSpec::Zero => "zero".into(),
        IcVectorSpec::Constant(c) => format!("constant {} {}", c[0], c[1]),
        IcVectorSpec::Fourier(modes) => fmt_vector_forcing(&VectorForcing::Fourier(modes.clone())),
        IcVectorSpec::Random { amp, kmax } => format!("random {amp} {kmax}"),
    }
}

fn fmt_ic_tensor(f: &IcTensorSpec) -> String {
    match f {
        IcTensorSpec::Zero => "zero".into(),
        IcTensorSpec::TauZero => "tau_zero".into(),
        IcTensorSpec::Constant(c) => format!("constant {} {} {}", c[0], c[1], c[2]),
        IcTensorSpec::Fourier(modes) => {
            let mut s = "fourier".to_string();
            for m in modes {
                s.push_str(&format!(
                    " {} {} {} {} {} {} {} {}",
                    m.k[0], m.k[1], m.amp[0], m.phase[0], m.amp[1], m.phase[1], m.amp[2], m.phase[2]
                ));
            }
            s
        }
        IcTensorSpec::Random { amp, kmax } => format!("random {amp} {kmax}"),
    }
}

/// Serialise a config to the text format. Floats are written in shortest
/// round-trip form, so parse(serialize(c)) reproduces c bit-for-bit.
pub fn serialize_config(cfg: &Config) -> String {
    let p = &cfg.physical;
    let r = &cfg.reg;
    let run = &cfg.run;
    let mut s = String::new();
    s.push_str("# physical parameters\n");
    s.push_str(&format!("P = {}\n", p.p));
    s.push_str(&format!("E = {}\n", p.e));
    s.push_str(&format!("c_a = {}\n", p.c_a));
    s.push_str(&format!("c_w = {}\n", p.c_w));
    s.push_str(&format!("rho_a = {}\n", p.rho_a));
    s.push_str(&format!("rho_w = {}\n", p.rho_w));
    s.push_str(&format!("phi_rad = {}\n", p.phi));
    s.push_str(&format!("theta_rad = {}\n", p.theta));
    s.push_str(&format!("Omega = {}\n", p.omega_rot));
    s.push_str(&format!("g = {}\n", p.g));
    s.push_str("# regularisation\n");
    s.push_str(&format!("alpha = {}\n", r.alpha));
    s.push_str(&format!("beta = {}\n", r.beta));
    s.push_str(&format!("delta = {}\n", r.delta));
    s.push_str(&format!("epsilon = {}\n", r.epsilon));
    s.push_str("# variant\n");
    s.push_str(&format!("advection = {}\n", cfg.variant.advection));
    s.push_str(&format!("voigt_biharmonic = {}\n", cfg.variant.voigt_biharmonic));
    s.push_str("# run\n");
    s.push_str(&format!("N = {}\n", run.grid_modes));
    s.push_str(&format!("M = {}\n", run.physical_points));
    s.push_str(&format!("t_final = {}\n", run.t_final));
    match run.dt {
        Some(dt) => s.push_str(&format!("dt = {dt}\n")),
        None => s.push_str("dt = auto\n"),
    }
    s.push_str(&format!("output_every = {}\n", run.output_every));
    s.push_str(&format!("seed = {}\n", run.seed));
    s.push_str("# forcing\n");
    s.push_str(&format!("ua = {}\n", fmt_vector_forcing(&run.forcing.ua)));
    s.push_str(&format!("ua_omega = {}\n", run.forcing.ua_omega));
    s.push_str(&format!("uw = {}\n", fmt_vector_forcing(&run.forcing.uw)));
    s.push_str(&format!("uw_omega = {}\n", run.forcing.uw_omega));
    s.push_str(&format!("h0 = {}\n", fmt_scalar_forcing(&run.forcing.h0)));
    s.push_str(&format!("h0_omega = {}\n", run.forcing.h0_omega));
    s.push_str("# initial data\n");
    s.push_str(&format!("ic_u = {}\n", fmt_ic_vector(&run.ic.u)));
    s.push_str(&format!("ic_sigma = {}\n", fmt_ic_tensor(&run.ic.sigma)));
    s
}
