// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Second-level quantum resource manager: job intake and routing, sessions,
//! calibration and maintenance planning, circuit mapping and metrics.

mod intake;
mod job;
mod mapper;
mod metrics;
mod plan;

use alloc::string::String;

use thiserror::Error;

pub use intake::{route, JobCounts, Lane, RoutingDecision, Scheduler, Session, SessionRequest};
pub use job::{Job, JobId, JobRequest, JobState, Origin};
pub use mapper::{map_circuit, mapping_fidelity, route_with, MappedCircuit, PlacementMode, BRUTE_FORCE_MAX_WIDTH};
pub use metrics::{compute_metrics, find_overlap, Activity, Occupancy, OpsMetrics};
pub use plan::{
    calibration_duration, plan_calibration, plan_maintenance, CalWindow, CalibrationPolicy, MaintWindow,
    MaintenanceConfig, OperatorWindow, WindowSource, MAINTENANCE_TASKS,
};

use crate::facility::CryostatMode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedError {
    #[error("{id} rejected: {reason}")]
    Rejected { id: JobId, reason: String },
    #[error("circuit width {width} exceeds the {available} device qubits")]
    TooWide { width: usize, available: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("no path between the physical qubits of virtual {a} and {b}")]
    Unroutable { a: usize, b: usize },
    #[error("a session is already active")]
    SessionActive,
    #[error("device unavailable ({0})")]
    DeviceUnavailable(CryostatMode),
    #[error("session needs at least one iteration, a positive window and a non-negative classical gap")]
    BadSession,
    #[error("unknown job {0}")]
    UnknownJob(JobId),
    #[error("{id}: cannot move from {} to {}", from.as_str(), to.as_str())]
    BadJobTransition { id: JobId, from: JobState, to: JobState },
    #[error("invalid calibration policy: {0}")]
    Policy(&'static str),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// Raw readout rate: one record of `bits_per_measured_bit` bits per qubit
/// per shot, one shot per reset period.
pub fn estimate_output_rate(n_qubits: u64, reset_duration_s: f64, bits_per_measured_bit: u64) -> Result<f64, SchedError> {
    if n_qubits == 0 {
        return Err(SchedError::NonPositive { name: "n_qubits", value: 0.0 });
    }
    if !(reset_duration_s > 0.0 && reset_duration_s.is_finite()) {
        return Err(SchedError::NonPositive { name: "reset_duration", value: reset_duration_s });
    }
    if bits_per_measured_bit == 0 {
        return Err(SchedError::NonPositive { name: "bits_per_measured_bit", value: 0.0 });
    }
    Ok(n_qubits as f64 * bits_per_measured_bit as f64 / reset_duration_s)
}
