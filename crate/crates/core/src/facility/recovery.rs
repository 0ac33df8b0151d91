// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use core::fmt;

use serde::{Deserialize, Serialize};

use super::{FacilityError, BASE_TEMP_K, WARM_THRESHOLD_K};
use crate::time::SimTime;
use crate::twin::CalibrationKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CryostatMode {
    Operating,
    CoolingFault,
    WarmedUp,
    Repair,
    Cooldown,
    Recalibration,
    Benchmarking,
}

impl CryostatMode {
    pub const ALL: [CryostatMode; 7] = [
        CryostatMode::Operating,
        CryostatMode::CoolingFault,
        CryostatMode::WarmedUp,
        CryostatMode::Repair,
        CryostatMode::Cooldown,
        CryostatMode::Recalibration,
        CryostatMode::Benchmarking,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CryostatMode::Operating => "Operating",
            CryostatMode::CoolingFault => "CoolingFault",
            CryostatMode::WarmedUp => "WarmedUp",
            CryostatMode::Repair => "Repair",
            CryostatMode::Cooldown => "Cooldown",
            CryostatMode::Recalibration => "Recalibration",
            CryostatMode::Benchmarking => "Benchmarking",
        }
    }
}

impl fmt::Display for CryostatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryEvent {
    CoolingLost,
    /// Stage temperature reached the warm threshold while cooling was lost.
    ThresholdCrossed,
    /// Every cooling-affecting fault has ended.
    FaultCleared,
    VacuumBreach,
    VacuumRestored,
    RepairComplete,
    CooldownComplete,
    RecalComplete,
    BenchmarkComplete,
}

impl RecoveryEvent {
    pub const ALL: [RecoveryEvent; 9] = [
        RecoveryEvent::CoolingLost,
        RecoveryEvent::ThresholdCrossed,
        RecoveryEvent::FaultCleared,
        RecoveryEvent::VacuumBreach,
        RecoveryEvent::VacuumRestored,
        RecoveryEvent::RepairComplete,
        RecoveryEvent::CooldownComplete,
        RecoveryEvent::RecalComplete,
        RecoveryEvent::BenchmarkComplete,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecoveryEvent::CoolingLost => "cooling_lost",
            RecoveryEvent::ThresholdCrossed => "threshold_crossed",
            RecoveryEvent::FaultCleared => "fault_cleared",
            RecoveryEvent::VacuumBreach => "vacuum_breach",
            RecoveryEvent::VacuumRestored => "vacuum_restored",
            RecoveryEvent::RepairComplete => "repair_complete",
            RecoveryEvent::CooldownComplete => "cooldown_complete",
            RecoveryEvent::RecalComplete => "recal_complete",
            RecoveryEvent::BenchmarkComplete => "benchmark_complete",
        }
    }
}

impl fmt::Display for RecoveryEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CryostatState {
    pub mode: CryostatMode,
    pub qpu_temp: f64,
    pub vacuum_intact: bool,
    pub t_entered_mode: SimTime,
    pub peak_temp_during_fault: f64,
    /// Set by a vacuum breach; the repair needs the vendor.
    pub vendor_flag: bool,
    /// Kind of the recalibration in progress (meaningful in Recalibration).
    pub recal: CalibrationKind,
}

impl CryostatState {
    pub fn operating(at: SimTime) -> Self {
        CryostatState {
            mode: CryostatMode::Operating,
            qpu_temp: BASE_TEMP_K,
            vacuum_intact: true,
            t_entered_mode: at,
            peak_temp_during_fault: BASE_TEMP_K,
            vendor_flag: false,
            recal: CalibrationKind::None,
        }
    }

    /// Records a new stage temperature and tracks the fault peak.
    pub fn observe_temp(&mut self, temp: f64) {
        self.qpu_temp = temp;
        if self.mode != CryostatMode::Operating {
            self.peak_temp_during_fault = self.peak_temp_during_fault.max(temp);
        }
    }

    pub fn is_operating(&self) -> bool {
        self.mode == CryostatMode::Operating
    }

    fn enter(mut self, mode: CryostatMode, at: SimTime) -> Self {
        self.mode = mode;
        self.t_entered_mode = at;
        self
    }
}

/// One applied state-machine step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub time: SimTime,
    pub event: RecoveryEvent,
    pub from: CryostatMode,
    pub to: CryostatMode,
}

/// Applies `event` to `state`.
///
/// A warm-up that stayed below 1 K is restored by a quick automated
/// recalibration. A warm-up to 1 K or above goes through manual repair,
/// cooldown, full recalibration and a benchmark before the device operates
/// again. A vacuum breach forces repair and cannot be left until the vacuum
/// is restored.
pub fn recovery_advance(
    state: &CryostatState,
    event: RecoveryEvent,
    at: SimTime,
) -> Result<CryostatState, FacilityError> {
    use CryostatMode::*;
    use RecoveryEvent::*;

    let s = *state;
    let illegal = Err(FacilityError::IllegalTransition { from: s.mode, event });
    let next = match (s.mode, event) {
        (_, VacuumBreach) => {
            let mut n = s.enter(Repair, at);
            n.vacuum_intact = false;
            n.vendor_flag = true;
            n.peak_temp_during_fault = n.peak_temp_during_fault.max(n.qpu_temp);
            n
        }
        (_, VacuumRestored) if !s.vacuum_intact => CryostatState { vacuum_intact: true, ..s },
        (Operating | Recalibration | Benchmarking | Cooldown, CoolingLost) => {
            let mut n = s.enter(CoolingFault, at);
            n.peak_temp_during_fault = n.qpu_temp;
            n
        }
        (Repair, CoolingLost | FaultCleared) => s,
        (CoolingFault, ThresholdCrossed) => s.enter(WarmedUp, at),
        (CoolingFault, FaultCleared) if s.peak_temp_during_fault < WARM_THRESHOLD_K => {
            CryostatState { recal: CalibrationKind::Quick, ..s.enter(Recalibration, at) }
        }
        (CoolingFault | WarmedUp, FaultCleared) => s.enter(Repair, at),
        (Repair, RepairComplete) if s.vacuum_intact => {
            if s.peak_temp_during_fault >= WARM_THRESHOLD_K {
                s.enter(Cooldown, at)
            } else {
                CryostatState { recal: CalibrationKind::Full, ..s.enter(Recalibration, at) }
            }
        }
        (Cooldown, CooldownComplete) => {
            CryostatState { recal: CalibrationKind::Full, qpu_temp: BASE_TEMP_K, ..s.enter(Recalibration, at) }
        }
        (Recalibration, RecalComplete) if s.recal == CalibrationKind::Full => s.enter(Benchmarking, at),
        (Recalibration, RecalComplete) => finish(s, at),
        (Benchmarking, BenchmarkComplete) => finish(s, at),
        _ => return illegal,
    };
    Ok(next)
}

fn finish(s: CryostatState, at: SimTime) -> CryostatState {
    CryostatState {
        qpu_temp: BASE_TEMP_K,
        peak_temp_during_fault: BASE_TEMP_K,
        recal: CalibrationKind::None,
        ..s.enter(CryostatMode::Operating, at)
    }
}
