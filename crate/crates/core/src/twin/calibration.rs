// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::time::{SimTime, DAY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricFamily {
    /// Single-qubit gate fidelity, per qubit.
    F1q,
    /// Readout (assignment) fidelity, per qubit.
    FRo,
    /// CZ fidelity, per coupler.
    FCz,
}

impl MetricFamily {
    pub const ALL: [MetricFamily; 3] = [MetricFamily::F1q, MetricFamily::FRo, MetricFamily::FCz];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricFamily::F1q => "f1q",
            MetricFamily::FRo => "f_ro",
            MetricFamily::FCz => "f_cz",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationKind {
    None,
    Quick,
    Full,
}

/// One value per qubit (1Q, readout) and per coupler (CZ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub f1q: Vec<f64>,
    pub f_ro: Vec<f64>,
    pub f_cz: Vec<f64>,
}

impl MetricSet {
    pub fn uniform(qubits: usize, couplers: usize, f1q: f64, f_ro: f64, f_cz: f64) -> Self {
        MetricSet { f1q: alloc::vec![f1q; qubits], f_ro: alloc::vec![f_ro; qubits], f_cz: alloc::vec![f_cz; couplers] }
    }

    pub fn family(&self, family: MetricFamily) -> &[f64] {
        match family {
            MetricFamily::F1q => &self.f1q,
            MetricFamily::FRo => &self.f_ro,
            MetricFamily::FCz => &self.f_cz,
        }
    }

    pub fn family_mut(&mut self, family: MetricFamily) -> &mut [f64] {
        match family {
            MetricFamily::F1q => &mut self.f1q,
            MetricFamily::FRo => &mut self.f_ro,
            MetricFamily::FCz => &mut self.f_cz,
        }
    }

    /// Every value tagged with its family and element index.
    pub fn iter(&self) -> impl Iterator<Item = (MetricFamily, usize, f64)> + '_ {
        MetricFamily::ALL
            .into_iter()
            .flat_map(move |fam| self.family(fam).iter().enumerate().map(move |(i, &v)| (fam, i, v)))
    }

    pub fn zip_map(&self, other: &MetricSet, f: impl Fn(f64, f64) -> f64) -> MetricSet {
        let z = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
        MetricSet { f1q: z(&self.f1q, &other.f1q), f_ro: z(&self.f_ro, &other.f_ro), f_cz: z(&self.f_cz, &other.f_cz) }
    }
}

/// Exponential relaxation of every metric toward its floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriftParams {
    pub tau_1q_s: f64,
    pub tau_ro_s: f64,
    pub tau_cz_s: f64,
    /// Floor = ceiling − offset.
    pub floor_offset: f64,
    /// Relative spread of per-element time constants, drawn once from the
    /// twin seed. Zero keeps every element on the family constant.
    pub jitter: f64,
}

impl Default for DriftParams {
    fn default() -> Self {
        DriftParams { tau_1q_s: 14.0 * DAY, tau_ro_s: 7.0 * DAY, tau_cz_s: 7.0 * DAY, floor_offset: 0.02, jitter: 0.0 }
    }
}

impl DriftParams {
    pub fn tau(&self, family: MetricFamily) -> f64 {
        match family {
            MetricFamily::F1q => self.tau_1q_s,
            MetricFamily::FRo => self.tau_ro_s,
            MetricFamily::FCz => self.tau_cz_s,
        }
    }
}

/// `floor + (at_cal − floor)·exp(−elapsed/τ)`.
pub fn drift_value(at_cal: f64, floor: f64, tau: f64, elapsed: f64) -> f64 {
    floor + (at_cal - floor) * libm::exp(-elapsed / tau)
}

/// Largest possible drop of a freshly full-calibrated metric after
/// `elapsed` seconds: `(ceiling − floor)·(1 − exp(−elapsed/τ))`.
pub fn drift_bound(ceiling: f64, floor: f64, tau: f64, elapsed: f64) -> f64 {
    (ceiling - floor) * (1.0 - libm::exp(-elapsed / tau))
}

/// Calibrated fidelities at one instant, with their ceilings and floors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationState {
    pub values: MetricSet,
    pub ceiling: MetricSet,
    pub floor: MetricSet,
    pub t_last_cal: SimTime,
    pub last_kind: CalibrationKind,
}

impl CalibrationState {
    pub fn f1q(&self, q: usize) -> f64 {
        self.values.f1q[q]
    }

    pub fn f_ro(&self, q: usize) -> f64 {
        self.values.f_ro[q]
    }

    pub fn f_cz(&self, coupler: usize) -> f64 {
        self.values.f_cz[coupler]
    }
}
