// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Power, cooling water, UPS and cryostat model with the outage-recovery
//! state machine.

mod faults;
mod recovery;
mod thermal;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use faults::{cooling_outages, water_faults, CoolingOutage, Fault, FaultKind, FaultPlan, WaterExcursion};
pub use recovery::{recovery_advance, CryostatMode, CryostatState, RecoveryEvent, Transition};
pub use thermal::{cooldown_duration, tau_warm, thermal_step, warm_time_to};

use crate::time::{DAY, HOUR, WEEK};

/// Temperature of the mixing-chamber stage while operating.
pub const BASE_TEMP_K: f64 = 0.010;
/// Above this peak a warm-up is unrecoverable without a cooldown.
pub const WARM_THRESHOLD_K: f64 = 1.0;
pub const AMBIENT_K: f64 = 295.0;
/// Time without cooling at which the stage reaches `WARM_THRESHOLD_K`.
pub const WARM_THRESHOLD_TIME_S: f64 = 120.0;
pub const MIN_COOLDOWN_S: f64 = 2.0 * DAY;
pub const MAX_COOLDOWN_S: f64 = 5.0 * DAY;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FacilityError {
    #[error("invalid facility config: {0}")]
    Config(&'static str),
    #[error("fault duration must be positive, got {0} s")]
    BadDuration(f64),
    #[error("fault starts at {start} s, before the current time {now} s")]
    PastFault { start: f64, now: f64 },
    #[error("{kind} fault at {start} s overlaps another {kind} fault")]
    Overlap { kind: FaultKind, start: f64 },
    #[error("no cooldown below {threshold} K (peak {peak} K takes the auto-restore path)")]
    NoCooldown { peak: f64, threshold: f64 },
    #[error("illegal transition: {event} while {from}")]
    IllegalTransition { from: CryostatMode, event: RecoveryEvent },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FacilityConfig {
    pub water_temp_upper_c: f64,
    pub water_temp_lower_c: f64,
    pub peak_power_kw: f64,
    pub steady_power_kw: f64,
    pub ups_runtime_s: f64,
    pub redundant_cooling: bool,
    /// Gap before standby cooling takes over.
    pub failover_delay_s: f64,
    pub ln2_interval_s: f64,
    pub ln2_liters: f64,
    /// Manual repair before a cooldown can start.
    pub repair_duration_s: f64,
    /// Relaxation constant back to base temperature once cooling resumes
    /// after a short excursion.
    pub recool_tau_s: f64,
}

impl Default for FacilityConfig {
    fn default() -> Self {
        FacilityConfig {
            water_temp_upper_c: 25.0,
            water_temp_lower_c: 15.0,
            peak_power_kw: 30.0,
            steady_power_kw: 20.0,
            ups_runtime_s: 300.0,
            redundant_cooling: false,
            failover_delay_s: 30.0,
            ln2_interval_s: WEEK,
            ln2_liters: 10.0,
            repair_duration_s: 4.0 * HOUR,
            recool_tau_s: 60.0,
        }
    }
}

impl FacilityConfig {
    pub fn validate(&self) -> Result<(), FacilityError> {
        let positive = [
            (self.water_temp_upper_c, "water_temp_upper_c must be positive"),
            (self.water_temp_lower_c, "water_temp_lower_c must be positive"),
            (self.peak_power_kw, "peak_power_kw must be positive"),
            (self.steady_power_kw, "steady_power_kw must be positive"),
            (self.ln2_interval_s, "ln2_interval_s must be positive"),
            (self.ln2_liters, "ln2_liters must be positive"),
            (self.recool_tau_s, "recool_tau_s must be positive"),
        ];
        for (v, msg) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FacilityError::Config(msg));
            }
        }
        if self.water_temp_lower_c >= self.water_temp_upper_c {
            return Err(FacilityError::Config("water_temp_lower_c must be below water_temp_upper_c"));
        }
        for (v, msg) in [
            (self.ups_runtime_s, "ups_runtime_s must be non-negative"),
            (self.failover_delay_s, "failover_delay_s must be non-negative"),
            (self.repair_duration_s, "repair_duration_s must be non-negative"),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(FacilityError::Config(msg));
            }
        }
        Ok(())
    }
}

/// Where the facility draws power from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Supply {
    Grid,
    Ups,
    /// Grid down and UPS drained.
    None,
}

pub fn power_draw(mode: CryostatMode, supply: Supply, cfg: &FacilityConfig) -> f64 {
    match (supply, mode) {
        (Supply::None, _) => 0.0,
        (_, CryostatMode::Cooldown) => cfg.peak_power_kw,
        _ => cfg.steady_power_kw,
    }
}

/// Liquid-nitrogen consumption, charged against Operating time only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ln2Counter {
    interval: f64,
    per_refill: f64,
    operating: f64,
    refills: u64,
}

impl Ln2Counter {
    pub fn new(cfg: &FacilityConfig) -> Self {
        Ln2Counter { interval: cfg.ln2_interval_s, per_refill: cfg.ln2_liters, operating: 0.0, refills: 0 }
    }

    /// Adds Operating time and returns how many refills became due.
    pub fn accrue(&mut self, operating_s: f64) -> u64 {
        self.operating += operating_s.max(0.0);
        let due = libm::floor(self.operating / self.interval + 1e-9) as u64;
        let new = due.saturating_sub(self.refills);
        self.refills = due.max(self.refills);
        new
    }

    /// Operating time remaining until the next refill.
    pub fn until_next(&self) -> f64 {
        ((self.refills + 1) as f64 * self.interval - self.operating).max(0.0)
    }

    pub fn refills(&self) -> u64 {
        self.refills
    }

    pub fn liters(&self) -> f64 {
        self.refills as f64 * self.per_refill
    }
}
