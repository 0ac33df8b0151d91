// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! `qhpc` command line. Exit codes: 0 success or pass, 1 domain failure,
//! 2 usage or configuration error.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Parser, Subcommand};
use qhpc_core::scenario::Simulation;
use qhpc_core::scheduler::estimate_output_rate;
use qhpc_core::survey::evaluate_site;

use crate::fft::FftEstimator;
use crate::{scenario_io, server, survey_io};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qhpc", version, about = "Digital twin of an HPC-integrated quantum computer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Site survey tools.
    Survey {
        #[command(subcommand)]
        command: SurveyCommand,
    },
    /// Run a scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the scenario's `out_dir`, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw readout data rate for N qubits.
    Rate {
        n_qubits: f64,
        reset_us: f64,
        bits: f64,
    },
    /// Serve the HTTP intake while the scenario runs in scaled real time.
    Serve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Simulated seconds per wall-clock second.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SurveyCommand {
    /// Evaluate every channel CSV in a directory against the site criteria.
    Validate {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        siting: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    ExitCode::from(dispatch(cli.command))
}

pub fn dispatch(cmd: Command) -> u8 {
    match cmd {
        Command::Survey { command: SurveyCommand::Validate { dir, siting, report } } => {
            survey_validate(&dir, &siting, report.as_deref())
        }
        Command::Run { config, seed, out } => run(&config, seed, out.as_deref()),
        Command::Rate { n_qubits, reset_us, bits } => rate(n_qubits, reset_us, bits),
        Command::Serve { config, seed, addr, speed } => serve(&config, seed, addr, speed),
    }
}

fn usage(err: impl std::fmt::Display) -> u8 {
    eprintln!("error: {err:#}");
    EXIT_USAGE
}

fn survey_validate(dir: &Path, siting: &Path, report_path: Option<&Path>) -> u8 {
    let channels = match survey_io::load_dir(dir) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let siting = match survey_io::load_siting(siting) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let channels: Vec<_> = channels.into_iter().map(|(_, c)| c).collect();
    let report = evaluate_site(&channels, &siting, &FftEstimator);
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    println!("{text}");
    if let Some(p) = report_path {
        if let Err(e) = std::fs::write(p, text + "\n") {
            return usage(format!("writing {}: {e}", p.display()));
        }
    }
    for f in report.failures() {
        eprintln!("FAIL {}: {}", f.criterion, f.detail);
    }
    for m in &report.missing {
        eprintln!("FAIL {m}");
    }
    if report.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn run(config: &Path, seed: Option<u64>, out: Option<&Path>) -> u8 {
    let mut cfg = match scenario_io::load_scenario(config) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out = out.map(Path::to_path_buf).or_else(|| cfg.out_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| "out".into());
    let mut sim = match Simulation::new(cfg) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    if let Err(e) = sim.run() {
        eprintln!("simulation failed: {e}");
        return EXIT_FAIL;
    }
    let art = match scenario_io::write_artifacts(&sim, &out) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_FAIL;
        }
    };
    let m = sim.metrics();
    println!(
        "availability {:.4}  utilization {:.4}  jobs {} done / {} failed / {} queued  -> {}",
        m.availability,
        m.utilization,
        m.completed,
        m.failed,
        m.still_queued,
        art.metrics.parent().unwrap_or(&out).display()
    );
    if m.failed > 0 {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

/// `533333 bit/s (533 kbit/s)` style rendering.
pub fn format_rate(bits_per_s: f64) -> String {
    let kbit = bits_per_s / 1e3;
    let k = if kbit >= 1.0 { format!("{kbit:.0}") } else { format!("{kbit:.3}") };
    format!("{bits_per_s:.0} bit/s ({k} kbit/s)")
}

fn rate(n: f64, reset_us: f64, bits: f64) -> u8 {
    let whole = |x: f64| x > 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64;
    if !whole(n) || !whole(bits) {
        return usage("n_qubits and bits must be positive integers");
    }
    match estimate_output_rate(n as u64, reset_us * 1e-6, bits as u64) {
        Ok(r) => {
            println!("{}", format_rate(r));
            EXIT_OK
        }
        Err(e) => usage(e),
    }
}

fn serve(config: &Path, seed: Option<u64>, addr: SocketAddr, speed: f64) -> u8 {
    if !(speed > 0.0 && speed.is_finite()) {
        return usage("--speed must be positive");
    }
    let mut cfg = match scenario_io::load_scenario(config) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let sim = match Simulation::new(cfg) {
        Ok(s) => Arc::new(Mutex::new(s)),
        Err(e) => return usage(e),
    };
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return usage(e),
    };
    match rt.block_on(server::serve(sim, addr, speed)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAIL
        }
    }
}
