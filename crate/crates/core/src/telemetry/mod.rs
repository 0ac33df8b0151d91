// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-node time-series store with edge-triggered watches, plus the
//! device-property snapshot consumed by the mapper and external tools.

mod snapshot;
mod store;
mod watch;

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use snapshot::{device_snapshot, mirror_calibration, DeviceSnapshot};
pub use store::{Aggregation, QueryResult, Sample, TelemetryStore};
pub use watch::{Alarm, Predicate, Rearm, WatchId};

pub const ALARM_RECALIBRATION_NEEDED: &str = "recalibration_needed";
pub const ALARM_AMBIENT_DRIFT: &str = "ambient_drift";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TelemetryError {
    #[error("invalid sensor key `{0}`")]
    InvalidKey(String),
    #[error("{key}: sample at t={time} s is not after the latest sample (t={last} s)")]
    OutOfOrder { key: SensorKey, time: f64, last: f64 },
    #[error("unknown sensor key `{0}`")]
    UnknownKey(SensorKey),
    #[error("empty query range [{t0}, {t1}]")]
    BadRange { t0: f64, t1: f64 },
    #[error("watch window must be positive, got {0}")]
    BadWindow(f64),
    #[error("non-finite value for {0}")]
    NonFinite(SensorKey),
}

/// Dotted sensor path, e.g. `qpu.fidelity.cz.0-1` or `room.temp_c`.
///
/// Segments are non-empty runs of ASCII alphanumerics, `-` and `_`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SensorKey(String);

impl SensorKey {
    pub fn new(path: impl Into<String>) -> Result<Self, TelemetryError> {
        let path = path.into();
        let ok = !path.is_empty()
            && path
                .split('.')
                .all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'));
        if ok {
            Ok(SensorKey(path))
        } else {
            Err(TelemetryError::InvalidKey(path))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for SensorKey {
    type Error = TelemetryError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        SensorKey::new(s)
    }
}

impl TryFrom<&str> for SensorKey {
    type Error = TelemetryError;

    fn try_from(s: &str) -> Result<Self, Self::Error> {
        SensorKey::new(s)
    }
}

impl From<SensorKey> for String {
    fn from(k: SensorKey) -> String {
        k.0
    }
}

impl fmt::Display for SensorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Well-known keys.
pub mod keys {
    use alloc::format;
    use alloc::string::String;

    pub const ROOM_TEMP_C: &str = "room.temp_c";
    pub const CRYO_TEMP_MK: &str = "facility.cryostat.temp_mk";
    pub const POWER_KW: &str = "facility.power.kw";
    pub const WATER_TEMP_C: &str = "facility.water.temp_c";
    pub const LN2_LITERS: &str = "facility.ln2.liters";
    pub const GHZ_FIDELITY: &str = "qpu.benchmark.ghz";

    pub fn f1q(q: usize) -> String {
        format!("qpu.fidelity.1q.{q}")
    }

    pub fn f_ro(q: usize) -> String {
        format!("qpu.fidelity.ro.{q}")
    }

    pub fn f_cz(a: usize, b: usize) -> String {
        format!("qpu.fidelity.cz.{a}-{b}")
    }
}
