use clap::{Parser, Subcommand};
use evpkv::config::{load_config, Config};
use evpkv::io::{write_diagnostics_csv, write_snapshot, Snapshot};
use evpkv::{dynamics, experiments, verify, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_UNSTABLE: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "evpkv", about = "Pseudospectral sea-ice solver on the torus")]
struct Cli {
    /// Worker threads for multi-run commands (1 = fully serial).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Override the config's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configured run; write diagnostics CSV and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the named invariant check battery at the config's scale.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Parameter study: epsilon | betadelta | resolution | twin | dtorder.
    Sweep {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the default parameter list, comma-separated.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Unstable { .. } => EXIT_UNSTABLE,
        _ => EXIT_CONFIG,
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<Config, Error> {
    let mut cfg = load_config(path)?;
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    // test hook: deliberately corrupt the water-drag turning angle so the
    // check battery's mutation sensitivity can be exercised end to end
    if std::env::var_os("EVPKV_FLIP_DRAG_ANGLE").is_some() {
        cfg.physical.theta = std::f64::consts::PI - cfg.physical.theta;
    }
    Ok(cfg)
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>) -> u8 {
    let cfg = match load(config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("cannot create output directory: {e}");
        return EXIT_CONFIG;
    }
    let traj = match dynamics::run(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("run aborted: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = write_diagnostics_csv(out.join("diagnostics.csv"), &traj.records) {
        eprintln!("cannot write diagnostics: {e}");
        return EXIT_CONFIG;
    }
    for (i, state) in traj.states.iter().enumerate() {
        let snap = match Snapshot::from_state(state, &cfg) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("cannot build snapshot {i}: {e}");
                return EXIT_CONFIG;
            }
        };
        if let Err(e) = write_snapshot(out.join(format!("snapshot_{i:05}.snap")), &snap) {
            eprintln!("cannot write snapshot {i}: {e}");
            return EXIT_CONFIG;
        }
    }
    println!(
        "run complete: {} outputs to t = {}, dt = {}",
        traj.states.len(),
        traj.states.last().map(|s| s.t).unwrap_or(0.0),
        traj.dt
    );
    EXIT_OK
}

fn cmd_verify(config: &Path, seed: Option<u64>) -> u8 {
    let cfg = match load(config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let results = match verify::run_battery(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verify error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut all_ok = true;
    for r in &results {
        println!(
            "{:<24} {}  ({})",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        all_ok &= r.passed;
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn write_report(out: &Path, csv: &str, summary: &str) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("sweep.csv"), csv)?;
    std::fs::write(out.join("summary.txt"), summary)?;
    Ok(())
}

fn cmd_sweep(
    kind: &str,
    config: &Path,
    out: &Path,
    values: Option<Vec<f64>>,
    threads: usize,
    seed: Option<u64>,
) -> u8 {
    let cfg = match load(config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let sweep = |res: Result<experiments::SweepResult, Error>| -> u8 {
        match res {
            Ok(r) => {
                let summary = r.summary();
                print!("{summary}");
                if let Err(e) = write_report(out, &r.to_csv(), &summary) {
                    eprintln!("cannot write report: {e}");
                    return EXIT_CONFIG;
                }
                if r.passed() {
                    EXIT_OK
                } else {
                    EXIT_CHECK_FAILED
                }
            }
            Err(e) => {
                eprintln!("sweep failed: {e}");
                exit_code_for(&e)
            }
        }
    };
    match kind {
        "epsilon" => {
            let vals = values.unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]);
            sweep(experiments::sweep_epsilon(&cfg, &vals, threads))
        }
        "betadelta" => {
            let vals = values.unwrap_or_else(|| vec![0.2, 0.1, 0.05]);
            sweep(experiments::sweep_beta_delta(&cfg, &vals, threads))
        }
        "resolution" => {
            let vals: Vec<usize> = values
                .map(|v| v.iter().map(|x| *x as usize).collect())
                .unwrap_or_else(|| vec![16, 24, 32]);
            sweep(experiments::sweep_resolution(&cfg, &vals, threads))
        }
        "twin" => {
            let vals = values.unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]);
            match experiments::twin_run(&cfg, &vals, threads) {
                Ok(report) => {
                    let summary = report.summary();
                    print!("{summary}");
                    if let Err(e) = write_report(out, &report.to_csv(), &summary) {
                        eprintln!("cannot write report: {e}");
                        return EXIT_CONFIG;
                    }
                    let ratios_ok = report
                        .ratios
                        .iter()
                        .zip(report.scales.windows(2))
                        .all(|(r, w)| {
                            let expect = w[0] / w[1];
                            (r - expect).abs() <= 0.15 * expect
                        });
                    if report.envelope_holds(1e-3) && ratios_ok {
                        EXIT_OK
                    } else {
                        EXIT_CHECK_FAILED
                    }
                }
                Err(e) => {
                    eprintln!("twin run failed: {e}");
                    exit_code_for(&e)
                }
            }
        }
        "dtorder" => {
            let vals = values.unwrap_or_else(|| vec![0.04, 0.02, 0.01, 0.005]);
            match experiments::temporal_order_study(&cfg, &vals) {
                Ok((order, errs)) => {
                    let mut summary = format!("fitted temporal order: {order:.4}\n");
                    for (i, e) in errs.iter().enumerate() {
                        summary.push_str(&format!("  terminal diff {i}: {e:.6e}\n"));
                    }
                    print!("{summary}");
                    let mut csv = String::from("pair,terminal_diff\n");
                    for (i, e) in errs.iter().enumerate() {
                        csv.push_str(&format!("{i},{e}\n"));
                    }
                    if let Err(e) = write_report(out, &csv, &summary) {
                        eprintln!("cannot write report: {e}");
                        return EXIT_CONFIG;
                    }
                    if (order - 4.0).abs() <= 0.2 {
                        EXIT_OK
                    } else {
                        EXIT_CHECK_FAILED
                    }
                }
                Err(e) => {
                    eprintln!("order study failed: {e}");
                    exit_code_for(&e)
                }
            }
        }
        other => {
            eprintln!("unknown sweep kind `{other}` (expected epsilon | betadelta | resolution | twin | dtorder)");
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out, cli.seed),
        Command::Verify { config } => cmd_verify(config, cli.seed),
        Command::Sweep {
            kind,
            config,
            out,
            values,
        } => cmd_sweep(kind, config, out, values.clone(), cli.threads, cli.seed),
    };
    ExitCode::from(code)
}
