// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::facility::{Fault, FacilityConfig, FaultPlan};
use crate::scheduler::{CalibrationPolicy, JobRequest, MaintenanceConfig, Origin, PlacementMode, SessionRequest};
use crate::time::{SimTime, HOUR};
use crate::twin::{Circuit, OutputFormat, TwinConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// One line of a job trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    #[serde(rename = "arrival_s")]
    pub arrival: SimTime,
    pub origin: Origin,
    pub circuit: Circuit,
    #[serde(default = "histogram")]
    pub format: OutputFormat,
    #[serde(default)]
    pub priority: i32,
}

fn histogram() -> OutputFormat {
    OutputFormat::Histogram
}

impl TraceEntry {
    pub fn request(&self) -> JobRequest {
        JobRequest { origin: self.origin, circuit: self.circuit.clone(), format: self.format, priority: self.priority }
    }
}

/// Step change of the room temperature from `at_s` on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomStep {
    pub at_s: f64,
    pub delta_c: f64,
}

/// Room temperature: a diurnal sine plus step changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomModel {
    pub mean_c: f64,
    pub amplitude_c: f64,
    pub period_s: f64,
    pub steps: Vec<RoomStep>,
}

impl Default for RoomModel {
    fn default() -> Self {
        RoomModel { mean_c: 21.0, amplitude_c: 0.2, period_s: 24.0 * HOUR, steps: Vec::new() }
    }
}

impl RoomModel {
    pub fn at(&self, t: f64) -> f64 {
        let diurnal = if self.period_s > 0.0 {
            self.amplitude_c * libm::sin(2.0 * core::f64::consts::PI * t / self.period_s)
        } else {
            0.0
        };
        self.mean_c + diurnal + self.steps.iter().filter(|s| s.at_s <= t).map(|s| s.delta_c).sum::<f64>()
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub duration_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub twin: TwinConfig,
    #[serde(default)]
    pub facility: FacilityConfig,
    #[serde(default)]
    pub policy: CalibrationPolicy,
    #[serde(default)]
    pub maintenance: MaintenanceConfig,
    #[serde(default)]
    pub jobs: Vec<TraceEntry>,
    /// JSON-lines trace file, read by the command-line front end and
    /// appended to `jobs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job_trace: Option<String>,
    #[serde(default)]
    pub sessions: Vec<SessionRequest>,
    #[serde(default)]
    pub faults: Vec<Fault>,
    /// Cooling-water temperature as `[t_s, °C]` pairs.
    #[serde(default)]
    pub water_temp: Vec<(f64, f64)>,
    #[serde(default)]
    pub room: RoomModel,
    #[serde(default = "default_interval")]
    pub telemetry_interval_s: f64,
    #[serde(default = "default_placement")]
    pub placement: PlacementMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

fn default_interval() -> f64 {
    HOUR
}

fn default_placement() -> PlacementMode {
    PlacementMode::Auto
}

impl ScenarioConfig {
    /// Minimal valid scenario of the given length.
    pub fn new(duration_s: f64, seed: u64) -> Self {
        ScenarioConfig {
            schema: SCHEMA_VERSION,
            duration_s,
            seed,
            twin: TwinConfig::default(),
            facility: FacilityConfig::default(),
            policy: CalibrationPolicy::default(),
            maintenance: MaintenanceConfig::default(),
            jobs: Vec::new(),
            job_trace: None,
            sessions: Vec::new(),
            faults: Vec::new(),
            water_temp: Vec::new(),
            room: RoomModel::default(),
            telemetry_interval_s: HOUR,
            placement: PlacementMode::Auto,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s must be positive, got {}", self.duration_s));
        }
        if !(self.telemetry_interval_s > 0.0) {
            return bad(format!("telemetry_interval_s must be positive, got {}", self.telemetry_interval_s));
        }
        self.twin.validate().map_err(|e| ScenarioError::Config(format!("twin: {e}")))?;
        self.facility.validate().map_err(|e| ScenarioError::Config(format!("facility: {e}")))?;
        self.policy.validate().map_err(|e| ScenarioError::Config(format!("policy: {e}")))?;
        if self.maintenance.enabled && !(self.maintenance.interval_s > self.maintenance.duration_s && self.maintenance.duration_s > 0.0) {
            return bad("maintenance: interval_s must exceed a positive duration_s".into());
        }
        if self.policy.benchmark_qubits > self.twin.rows * self.twin.cols {
            return bad(format!("policy: benchmark_qubits {} exceeds the device", self.policy.benchmark_qubits));
        }
        self.fault_plan()?;
        for (i, w) in self.water_temp.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return bad(format!("water_temp: sample {} is not after sample {i}", i + 1));
            }
        }
        Ok(())
    }

    /// Configured faults plus overtemperature faults derived from the water
    /// series.
    pub fn fault_plan(&self) -> Result<FaultPlan, ScenarioError> {
        let mut plan = FaultPlan::new();
        let (derived, _) = crate::facility::water_faults(&self.water_temp, &self.facility);
        for (i, f) in self.faults.iter().chain(derived.iter()).enumerate() {
            plan.inject(*f, SimTime::ZERO).map_err(|e| ScenarioError::Config(format!("fault {i}: {e}")))?;
        }
        Ok(plan)
    }
}
