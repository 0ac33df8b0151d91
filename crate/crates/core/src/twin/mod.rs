// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Digital twin of the square-grid transmon QPU.
//!
//! The twin owns its calibration state. Between calibrations every metric
//! relaxes exponentially from its post-calibration value toward a floor;
//! recalibration resets the post-calibration value (to the ceiling for a
//! full run, part of the way for a quick run). Execution is a Pauli-trajectory
//! statevector simulation driven by those fidelities.

mod bench;
mod calibration;
mod circuit;
mod execute;
mod statevector;
mod topology;

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bench::{ghz_circuit, ghz_probability};
pub use calibration::{
    drift_bound, drift_value, CalibrationKind, CalibrationState, DriftParams, MetricFamily, MetricSet,
};
pub use circuit::{estimate_shot_duration, Circuit, Gate, GateDurations, DEFAULT_RESET_S};
pub use execute::{iq_separation, JobResult, OutputFormat, ResultData};
pub use statevector::{prx_matrix, BasisSampler, Matrix2, Pauli, StateVector};
pub use topology::{NativeGate, QpuTopology, NATIVE_GATES};

use crate::rng::RngStream;
use crate::time::SimTime;

pub const FULL_RECAL_S: f64 = 100.0 * 60.0;
pub const QUICK_RECAL_S: f64 = 40.0 * 60.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwinError {
    #[error("{name} must lie in (0, 1], got {value}")]
    FidelityOutOfRange { name: &'static str, value: f64 },
    #[error("invalid twin config: {0}")]
    Config(String),
    #[error("circuit width {width} exceeds the {available} qubits of the device")]
    TooWide { width: usize, available: usize },
    #[error("gate {gate} addresses qubit {qubit} outside width {width}")]
    QubitOutOfRange { gate: usize, qubit: usize, width: usize },
    #[error("gate {gate}: CZ({a}, {b}) is not on a coupler")]
    Unmapped { gate: usize, a: usize, b: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("no connected {n}-qubit chain on a {available}-qubit device")]
    BenchmarkTooWide { n: usize, available: usize },
}

/// Nominal (ceiling) fidelities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nominal {
    pub f1q: f64,
    pub f_ro: f64,
    pub f_cz: f64,
}

impl Default for Nominal {
    fn default() -> Self {
        Nominal { f1q: 0.999, f_ro: 0.98, f_cz: 0.99 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwinConfig {
    pub rows: usize,
    pub cols: usize,
    pub nominal: Nominal,
    /// Per-element ceilings are drawn uniformly from
    /// `[nominal − spread, nominal]`; zero gives a uniform device.
    pub ceiling_spread: f64,
    pub drift: DriftParams,
    /// Quick recalibration lands at `floor + q·(ceiling − floor)`, `q ∈ (0, 1)`,
    /// or keeps the current value when that is higher.
    pub quick_fraction: f64,
    pub durations: GateDurations,
    /// Control-software efficiency `η ∈ (0, 1]`; job time is divided by it.
    pub efficiency: f64,
    pub seed: u64,
}

impl Default for TwinConfig {
    fn default() -> Self {
        TwinConfig {
            rows: 4,
            cols: 5,
            nominal: Nominal::default(),
            ceiling_spread: 0.0,
            drift: DriftParams::default(),
            quick_fraction: 0.9,
            durations: GateDurations::default(),
            efficiency: 0.8,
            seed: 0,
        }
    }
}

impl TwinConfig {
    pub fn validate(&self) -> Result<(), TwinError> {
        for (name, value) in [("f1q", self.nominal.f1q), ("f_ro", self.nominal.f_ro), ("f_cz", self.nominal.f_cz)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(TwinError::FidelityOutOfRange { name, value });
            }
        }
        let bad = |msg: &str| Err(TwinError::Config(String::from(msg)));
        if self.rows == 0 || self.cols == 0 {
            return bad("grid dimensions must be positive");
        }
        if self.rows * self.cols > 24 {
            return bad("grid larger than 24 qubits is not supported by the statevector executor");
        }
        if !(self.quick_fraction > 0.0 && self.quick_fraction < 1.0) {
            return bad("quick_fraction must lie strictly between 0 and 1");
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return bad("efficiency must lie in (0, 1]");
        }
        let d = &self.drift;
        if !(d.tau_1q_s > 0.0 && d.tau_ro_s > 0.0 && d.tau_cz_s > 0.0) {
            return bad("drift time constants must be positive");
        }
        if !(0.0..1.0).contains(&d.jitter) {
            return bad("drift jitter must lie in [0, 1)");
        }
        if !(d.floor_offset >= 0.0) || !(self.ceiling_spread >= 0.0) {
            return bad("floor offset and ceiling spread must be non-negative");
        }
        let lowest = self.nominal.f1q.min(self.nominal.f_ro).min(self.nominal.f_cz);
        if lowest - self.ceiling_spread - d.floor_offset <= 0.0 {
            return bad("ceiling spread plus floor offset drives a floor to zero");
        }
        let g = &self.durations;
        if !(g.prx >= 0.0 && g.cz >= 0.0 && g.measure >= 0.0) {
            return bad("gate durations must be non-negative");
        }
        Ok(())
    }
}

/// The QPU twin. Exclusive: callers serialise access.
#[derive(Clone, Debug)]
pub struct QpuTwin {
    topology: QpuTopology,
    config: TwinConfig,
    state: CalibrationState,
    at_cal: MetricSet,
    tau: MetricSet,
    now: SimTime,
}

impl QpuTwin {
    /// Fully calibrated twin (every metric at its ceiling) at t=0.
    pub fn new(config: TwinConfig) -> Result<Self, TwinError> {
        config.validate()?;
        let topology = QpuTopology::grid(config.rows, config.cols);
        let (nq, nc) = (topology.num_qubits(), topology.num_couplers());
        let n = config.nominal;
        let mut rng = RngStream::new(config.seed, "twin.calibration");
        let mut ceiling = MetricSet::uniform(nq, nc, n.f1q, n.f_ro, n.f_cz);
        if config.ceiling_spread > 0.0 {
            for fam in MetricFamily::ALL {
                for v in ceiling.family_mut(fam) {
                    *v -= config.ceiling_spread * rng.random::<f64>();
                }
            }
        }
        let floor = ceiling.zip_map(&ceiling, |c, _| c - config.drift.floor_offset);
        let mut tau = MetricSet::uniform(nq, nc, config.drift.tau_1q_s, config.drift.tau_ro_s, config.drift.tau_cz_s);
        if config.drift.jitter > 0.0 {
            for fam in MetricFamily::ALL {
                for t in tau.family_mut(fam) {
                    *t *= 1.0 + config.drift.jitter * (2.0 * rng.random::<f64>() - 1.0);
                }
            }
        }
        let state = CalibrationState {
            values: ceiling.clone(),
            ceiling: ceiling.clone(),
            floor,
            t_last_cal: SimTime::ZERO,
            last_kind: CalibrationKind::Full,
        };
        Ok(QpuTwin { topology, config, at_cal: ceiling, state, tau, now: SimTime::ZERO })
    }

    pub fn topology(&self) -> &QpuTopology {
        &self.topology
    }

    pub fn config(&self) -> &TwinConfig {
        &self.config
    }

    pub fn calibration(&self) -> &CalibrationState {
        &self.state
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Per-element drift time constants.
    pub fn time_constants(&self) -> &MetricSet {
        &self.tau
    }

    /// Advances the twin clock by `dt` seconds and re-evaluates the drift law.
    pub fn drift(&mut self, dt: f64) -> &CalibrationState {
        let t = self.now + dt.max(0.0);
        self.advance_to(t)
    }

    /// Moves the twin clock forward to `t` (never backward).
    pub fn advance_to(&mut self, t: SimTime) -> &CalibrationState {
        if t > self.now {
            self.now = t;
        }
        let elapsed = self.now.since(self.state.t_last_cal);
        for fam in MetricFamily::ALL {
            let at_cal = self.at_cal.family(fam);
            let floor = self.state.floor.family(fam);
            let tau = self.tau.family(fam);
            for (i, v) in self.state.values.family_mut(fam).iter_mut().enumerate() {
                *v = drift_value(at_cal[i], floor[i], tau[i], elapsed);
            }
        }
        &self.state
    }

    /// Applies a completed calibration at the current twin time. Returns the
    /// new state and the procedure's duration.
    pub fn recalibrate(&mut self, kind: CalibrationKind) -> (CalibrationState, f64) {
        let duration = match kind {
            CalibrationKind::Full => {
                self.at_cal = self.state.ceiling.clone();
                FULL_RECAL_S
            }
            CalibrationKind::Quick => {
                let q = self.config.quick_fraction;
                let target = self.state.floor.zip_map(&self.state.ceiling, |f, c| f + q * (c - f));
                // A quick run never undoes a better calibration.
                self.at_cal = self.state.values.zip_map(&target, f64::max);
                QUICK_RECAL_S
            }
            CalibrationKind::None => return (self.state.clone(), 0.0),
        };
        self.state.t_last_cal = self.now;
        self.state.last_kind = kind;
        self.state.values = self.at_cal.clone();
        (self.state.clone(), duration)
    }

    /// Calibration lost after a warm-up above 1 K: every metric drops to
    /// its floor until the next full calibration.
    pub fn lose_calibration(&mut self) {
        self.at_cal = self.state.floor.clone();
        self.state.t_last_cal = self.now;
        self.state.last_kind = CalibrationKind::None;
        self.state.values = self.at_cal.clone();
    }

    /// Replaces the current values; used by tests and the mapper oracle.
    pub fn set_calibration(&mut self, values: MetricSet) -> Result<(), TwinError> {
        for (_, _, v) in values.iter() {
            if !(v > 0.0 && v <= 1.0) {
                return Err(TwinError::FidelityOutOfRange { name: "calibration value", value: v });
            }
        }
        self.at_cal = values.clone();
        self.state.values = values;
        self.state.t_last_cal = self.now;
        Ok(())
    }

    pub fn shot_duration(&self, circuit: &Circuit) -> f64 {
        estimate_shot_duration(circuit, &self.config.durations)
    }

    /// Wall time to run every shot, including software inefficiency.
    pub fn job_duration(&self, circuit: &Circuit) -> f64 {
        f64::from(circuit.shots) * self.shot_duration(circuit) / self.config.efficiency
    }

    /// Runs an already-mapped circuit with the current calibration.
    pub fn execute<R: Rng + ?Sized>(
        &self,
        circuit: &Circuit,
        format: OutputFormat,
        rng: &mut R,
    ) -> Result<JobResult, TwinError> {
        execute::run(self, circuit, format, rng)
    }

    /// Linear-chain GHZ health check: `P(0…0) + P(1…1)`.
    pub fn ghz_benchmark<R: Rng + ?Sized>(&self, n: usize, shots: u32, rng: &mut R) -> Result<f64, TwinError> {
        if n == 0 || n > self.topology.num_qubits() {
            return Err(TwinError::BenchmarkTooWide { n, available: self.topology.num_qubits() });
        }
        let chain: Vec<usize> = self.topology.snake().into_iter().take(n).collect();
        let circuit = ghz_circuit(&chain, self.topology.num_qubits(), shots);
        let result = self.execute(&circuit, OutputFormat::Histogram, rng)?;
        Ok(ghz_probability(&result))
    }
}
