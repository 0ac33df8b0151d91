// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{FacilityConfig, FacilityError};
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    GridPowerLoss,
    CoolingWaterOvertemp,
    PumpFailure,
    VacuumBreach,
}

impl FaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::GridPowerLoss => "grid_power_loss",
            FaultKind::CoolingWaterOvertemp => "cooling_water_overtemp",
            FaultKind::PumpFailure => "pump_failure",
            FaultKind::VacuumBreach => "vacuum_breach",
        }
    }

    /// Faults that stop the cooling circuit directly (standby cooling covers
    /// these after the failover delay).
    pub fn is_cooling(self) -> bool {
        matches!(self, FaultKind::CoolingWaterOvertemp | FaultKind::PumpFailure)
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fault {
    pub kind: FaultKind,
    #[serde(rename = "start_s")]
    pub start: SimTime,
    #[serde(rename = "duration_s")]
    pub duration: f64,
}

impl Fault {
    pub fn new(kind: FaultKind, start: f64, duration: f64) -> Self {
        Fault { kind, start: SimTime::from_secs(start), duration }
    }

    pub fn end(&self) -> SimTime {
        self.start + self.duration
    }
}

/// Accepted faults, kept in start order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultPlan {
    faults: Vec<Fault>,
}

impl FaultPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inject(&mut self, fault: Fault, now: SimTime) -> Result<(), FacilityError> {
        if !(fault.duration > 0.0 && fault.duration.is_finite()) {
            return Err(FacilityError::BadDuration(fault.duration));
        }
        if fault.start < now {
            return Err(FacilityError::PastFault { start: fault.start.secs(), now: now.secs() });
        }
        let clash = self
            .faults
            .iter()
            .any(|f| f.kind == fault.kind && f.start < fault.end() && fault.start < f.end());
        if clash {
            return Err(FacilityError::Overlap { kind: fault.kind, start: fault.start.secs() });
        }
        let at = self.faults.partition_point(|f| (f.start, f.kind) <= (fault.start, fault.kind));
        self.faults.insert(at, fault);
        Ok(())
    }

    pub fn faults(&self) -> &[Fault] {
        &self.faults
    }
}

/// Interval during which the cryostat has no active cooling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingOutage {
    pub start: SimTime,
    pub end: SimTime,
    pub cause: FaultKind,
}

/// Cooling-loss intervals implied by `plan`, merged where they overlap.
///
/// Grid loss only bites once the UPS is drained. Cooling-circuit faults cut
/// cooling at once; with redundant cooling the gap lasts only until the
/// standby circuit takes over. A vacuum breach removes the insulation and
/// counts as lost cooling for its whole duration.
pub fn cooling_outages(plan: &FaultPlan, cfg: &FacilityConfig) -> Vec<CoolingOutage> {
    let mut raw: Vec<CoolingOutage> = plan
        .faults()
        .iter()
        .filter_map(|f| {
            let (start, len) = match f.kind {
                FaultKind::GridPowerLoss => (f.start + cfg.ups_runtime_s, f.duration - cfg.ups_runtime_s),
                k if k.is_cooling() && cfg.redundant_cooling => (f.start, f.duration.min(cfg.failover_delay_s)),
                _ => (f.start, f.duration),
            };
            (len > 0.0).then(|| CoolingOutage { start, end: start + len, cause: f.kind })
        })
        .collect();
    raw.sort_by(|a, b| a.start.cmp(&b.start));
    let mut merged: Vec<CoolingOutage> = Vec::with_capacity(raw.len());
    for o in raw {
        match merged.last_mut() {
            Some(last) if o.start <= last.end => last.end = last.end.max(o.end),
            _ => merged.push(o),
        }
    }
    merged
}

/// Water temperature below the lower limit. Logged, never a fault.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaterExcursion {
    pub time: SimTime,
    pub temp_c: f64,
}

/// Derives overtemperature faults from a `(t, °C)` series. A fault lasts from
/// the first sample above the upper limit to the next sample back within it.
pub fn water_faults(samples: &[(f64, f64)], cfg: &FacilityConfig) -> (Vec<Fault>, Vec<WaterExcursion>) {
    let mut faults = Vec::new();
    let mut warnings = Vec::new();
    let mut open: Option<f64> = None;
    for &(t, c) in samples {
        if c < cfg.water_temp_lower_c {
            warnings.push(WaterExcursion { time: SimTime::from_secs(t), temp_c: c });
        }
        match (open, c > cfg.water_temp_upper_c) {
            (None, true) => open = Some(t),
            (Some(s), false) => {
                faults.push(Fault::new(FaultKind::CoolingWaterOvertemp, s, t - s));
                open = None;
            }
            _ => {}
        }
    }
    if let (Some(s), Some(&(t_last, _))) = (open, samples.last()) {
        if t_last > s {
            faults.push(Fault::new(FaultKind::CoolingWaterOvertemp, s, t_last - s));
        }
    }
    (faults, warnings)
}
