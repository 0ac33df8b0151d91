// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SchedError;
use crate::time::{DAY, HOUR};
use crate::twin::{CalibrationKind, FULL_RECAL_S, QUICK_RECAL_S};

pub fn calibration_duration(kind: CalibrationKind) -> f64 {
    match kind {
        CalibrationKind::Full => FULL_RECAL_S,
        CalibrationKind::Quick => QUICK_RECAL_S,
        CalibrationKind::None => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorWindow {
    #[serde(rename = "time_s")]
    pub time: crate::time::SimTime,
    pub kind: CalibrationKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationPolicy {
    /// Spacing of routine full recalibrations; `None` disables them.
    pub period_s: Option<f64>,
    /// GHZ success probability below which `recalibration_needed` fires.
    pub benchmark_threshold: f64,
    pub degraded_action: CalibrationKind,
    pub operator_windows: Vec<OperatorWindow>,
    /// Spacing of GHZ benchmark probes; `None` disables them.
    pub benchmark_interval_s: Option<f64>,
    pub benchmark_qubits: usize,
    pub benchmark_shots: u32,
}

impl Default for CalibrationPolicy {
    fn default() -> Self {
        CalibrationPolicy {
            period_s: Some(24.0 * HOUR),
            benchmark_threshold: 0.75,
            degraded_action: CalibrationKind::Quick,
            operator_windows: Vec::new(),
            benchmark_interval_s: Some(6.0 * HOUR),
            benchmark_qubits: 5,
            benchmark_shots: 1000,
        }
    }
}

impl CalibrationPolicy {
    pub fn validate(&self) -> Result<(), SchedError> {
        if !(self.benchmark_threshold > 0.0 && self.benchmark_threshold < 1.0) {
            return Err(SchedError::Policy("benchmark_threshold must lie in (0, 1)"));
        }
        if self.degraded_action == CalibrationKind::None {
            return Err(SchedError::Policy("degraded_action must be quick or full"));
        }
        if self.period_s.is_some_and(|p| !(p > 0.0 && p.is_finite())) {
            return Err(SchedError::Policy("period_s must be positive"));
        }
        if self.benchmark_interval_s.is_some_and(|p| !(p > 0.0 && p.is_finite())) {
            return Err(SchedError::Policy("benchmark_interval_s must be positive"));
        }
        if self.benchmark_qubits < 2 || self.benchmark_shots == 0 {
            return Err(SchedError::Policy("benchmark needs at least 2 qubits and 1 shot"));
        }
        if self.operator_windows.iter().any(|w| w.kind == CalibrationKind::None) {
            return Err(SchedError::Policy("operator windows must be quick or full"));
        }
        Ok(())
    }
}

/// Why a window exists. Declaration order is scheduling precedence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSource {
    Operator,
    Alarm,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalWindow {
    #[serde(rename = "start_s")]
    pub start: crate::time::SimTime,
    pub kind: CalibrationKind,
    pub source: WindowSource,
}

impl CalWindow {
    pub fn duration(&self) -> f64 {
        calibration_duration(self.kind)
    }
}

/// Calibration windows requested over `[0, horizon)`: periodic full runs at
/// multiples of the period, operator windows (which displace periodic ones
/// within half a period), and one degraded-action window per alarm.
///
/// Start times are requests. The runtime opens each window at the first
/// idle point at or after its start.
pub fn plan_calibration(policy: &CalibrationPolicy, horizon: f64, alarms: &[crate::time::SimTime]) -> Vec<CalWindow> {
    use crate::time::SimTime;
    let mut out: Vec<CalWindow> = Vec::new();
    if let Some(period) = policy.period_s {
        let mut k = 0u64;
        loop {
            let t = k as f64 * period;
            if t >= horizon {
                break;
            }
            let displaced = policy.operator_windows.iter().any(|w| libm::fabs(w.time.secs() - t) <= period / 2.0);
            if !displaced {
                out.push(CalWindow { start: SimTime::from_secs(t), kind: CalibrationKind::Full, source: WindowSource::Periodic });
            }
            k += 1;
        }
    }
    out.extend(
        policy
            .operator_windows
            .iter()
            .filter(|w| w.time.secs() < horizon)
            .map(|w| CalWindow { start: w.time, kind: w.kind, source: WindowSource::Operator }),
    );
    out.extend(alarms.iter().filter(|t| t.secs() < horizon).map(|&t| CalWindow {
        start: t,
        kind: policy.degraded_action,
        source: WindowSource::Alarm,
    }));
    out.sort_by(|a, b| a.start.cmp(&b.start).then(a.source.cmp(&b.source)));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaintenanceConfig {
    pub enabled: bool,
    pub interval_s: f64,
    pub duration_s: f64,
}

impl Default for MaintenanceConfig {
    fn default() -> Self {
        MaintenanceConfig { enabled: true, interval_s: 180.0 * DAY, duration_s: DAY }
    }
}

pub const MAINTENANCE_TASKS: [&str; 2] = ["ln2_flush", "ups_battery_check"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaintWindow {
    #[serde(rename = "start_s")]
    pub start: crate::time::SimTime,
    #[serde(rename = "duration_s")]
    pub duration: f64,
}

/// Preventive maintenance every `interval_s`, the first one interval in.
pub fn plan_maintenance(cfg: &MaintenanceConfig, horizon: f64) -> Vec<MaintWindow> {
    let mut out = Vec::new();
    if !cfg.enabled || !(cfg.interval_s > 0.0) {
        return out;
    }
    let mut k = 1u64;
    while (k as f64) * cfg.interval_s < horizon {
        out.push(MaintWindow { start: crate::time::SimTime::from_secs(k as f64 * cfg.interval_s), duration: cfg.duration_s });
        k += 1;
    }
    out
}
