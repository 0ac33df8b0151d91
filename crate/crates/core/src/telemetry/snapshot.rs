// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::store::TelemetryStore;
use super::{keys, Alarm, TelemetryError};
use crate::time::SimTime;
use crate::twin::{NativeGate, QpuTopology, QpuTwin, NATIVE_GATES};

/// Device properties at one instant: topology, calibrated fidelities and
/// execution constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceSnapshot {
    pub time: SimTime,
    pub rows: usize,
    pub cols: usize,
    pub num_qubits: usize,
    pub couplers: Vec<(usize, usize)>,
    pub f1q: Vec<f64>,
    pub f_ro: Vec<f64>,
    /// Indexed like `couplers`.
    pub f_cz: Vec<f64>,
    pub native_gates: Vec<NativeGate>,
    pub max_width: usize,
}

impl DeviceSnapshot {
    pub fn topology(&self) -> QpuTopology {
        QpuTopology::grid(self.rows, self.cols)
    }

    pub fn cz_fidelity(&self, a: usize, b: usize) -> Option<f64> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplers.binary_search(&key).ok().map(|i| self.f_cz[i])
    }
}

pub fn device_snapshot(twin: &QpuTwin) -> DeviceSnapshot {
    let topo = twin.topology();
    let cal = twin.calibration();
    DeviceSnapshot {
        time: twin.now(),
        rows: topo.rows(),
        cols: topo.cols(),
        num_qubits: topo.num_qubits(),
        couplers: topo.couplers().to_vec(),
        f1q: cal.values.f1q.clone(),
        f_ro: cal.values.f_ro.clone(),
        f_cz: cal.values.f_cz.clone(),
        native_gates: NATIVE_GATES.to_vec(),
        max_width: topo.num_qubits(),
    }
}

/// Writes every calibrated fidelity of `twin` under the `qpu.fidelity.*` keys
/// at the twin's current time.
pub fn mirror_calibration(store: &mut TelemetryStore, twin: &QpuTwin) -> Result<Vec<Alarm>, TelemetryError> {
    let t = twin.now();
    let cal = twin.calibration();
    let mut alarms = Vec::new();
    for q in 0..twin.topology().num_qubits() {
        alarms.extend(store.record(&keys::f1q(q), t, cal.f1q(q))?);
        alarms.extend(store.record(&keys::f_ro(q), t, cal.f_ro(q))?);
    }
    for (i, &(a, b)) in twin.topology().couplers().iter().enumerate() {
        alarms.extend(store.record(&keys::f_cz(a, b), t, cal.f_cz(i))?);
    }
    Ok(alarms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::DAY;
    use crate::twin::TwinConfig;

    #[test]
    fn fresh_snapshot_equals_ceilings() {
        let twin = QpuTwin::new(TwinConfig::default()).unwrap();
        let s = device_snapshot(&twin);
        assert_eq!(s.f1q, twin.calibration().ceiling.f1q);
        assert_eq!(s.f_cz, twin.calibration().ceiling.f_cz);
        assert_eq!(s.couplers.len(), 31);
    }

    #[test]
    fn drifted_snapshot_and_mirror_match_twin() {
        let mut twin = QpuTwin::new(TwinConfig::default()).unwrap();
        twin.drift(2.0 * DAY);
        let s = device_snapshot(&twin);
        let mut store = TelemetryStore::new();
        mirror_calibration(&mut store, &twin).unwrap();
        for (i, &(a, b)) in s.couplers.iter().enumerate() {
            assert_eq!(s.f_cz[i], twin.calibration().f_cz(i));
            assert_eq!(store.latest(&keys::f_cz(a, b)).unwrap().value, twin.calibration().f_cz(i));
            assert_eq!(s.cz_fidelity(b, a), Some(s.f_cz[i]));
        }
    }
}
