// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Noisy execution.
//!
//! Each shot draws an error pattern: after every unitary gate, with
//! probability `1 − f_gate`, a uniformly random non-identity Pauli hits the
//! gate's qubit(s). Shots sharing a pattern share one statevector run.
//! Histogram and bitstring readout flips each bit with probability
//! `1 − f_ro`; IQ readout draws unit-variance Gaussian clouds at `±d/2` on
//! the real axis with `d = 2·Φ⁻¹(f_ro)`, so a threshold at zero recovers
//! `f_ro`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate};
use super::statevector::{BasisSampler, Pauli, StateVector};
use super::{QpuTwin, TwinError};
use crate::mathx::normal_quantile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Histogram,
    RawBitstrings,
    RawIq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultData {
    Histogram(BTreeMap<String, u64>),
    RawBitstrings(Vec<String>),
    /// Per shot, per measured qubit, `(a, b)` for `a + b·i`.
    RawIq(Vec<Vec<(f64, f64)>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    pub format: OutputFormat,
    pub shots: u32,
    /// Qubits in output-bit order.
    pub measured: Vec<usize>,
    pub data: ResultData,
    pub total_duration: f64,
}

impl JobResult {
    /// Number of shots recorded in the payload.
    pub fn recorded_shots(&self) -> u64 {
        match &self.data {
            ResultData::Histogram(h) => h.values().sum(),
            ResultData::RawBitstrings(b) => b.len() as u64,
            ResultData::RawIq(iq) => iq.len() as u64,
        }
    }

    pub fn histogram(&self) -> Option<&BTreeMap<String, u64>> {
        match &self.data {
            ResultData::Histogram(h) => Some(h),
            _ => None,
        }
    }
}

/// Separation of the two IQ clouds for assignment fidelity `f_ro`.
pub fn iq_separation(f_ro: f64) -> f64 {
    2.0 * normal_quantile(f_ro)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ErrorHit {
    gate: u32,
    paulis: (u8, u8),
}

fn pauli(code: u8) -> Pauli {
    Pauli::ALL[code as usize]
}

pub(super) fn run<R: Rng + ?Sized>(
    twin: &QpuTwin,
    circuit: &Circuit,
    format: OutputFormat,
    rng: &mut R,
) -> Result<JobResult, TwinError> {
    let topo = twin.topology();
    if circuit.width > topo.num_qubits() {
        return Err(TwinError::TooWide { width: circuit.width, available: topo.num_qubits() });
    }
    circuit.validate()?;
    let cal = twin.calibration();

    // Gate error probabilities, and the compact index of every touched qubit.
    let mut local = vec![usize::MAX; circuit.width];
    let mut active = 0usize;
    let mut error_prob = Vec::with_capacity(circuit.gates.len());
    for (i, g) in circuit.gates.iter().enumerate() {
        let (qs, n) = g.qubits();
        for &q in &qs[..n] {
            if local[q] == usize::MAX {
                local[q] = active;
                active += 1;
            }
        }
        error_prob.push(match *g {
            Gate::Prx { qubit, .. } => 1.0 - cal.f1q(qubit),
            Gate::Cz { a, b } => {
                let c = topo.coupler_index(a, b).ok_or(TwinError::Unmapped { gate: i, a, b })?;
                1.0 - cal.f_cz(c)
            }
            Gate::Measure { .. } => 0.0,
        });
    }
    let measured = circuit.measured();

    // Error pattern per shot, grouped.
    let shots = circuit.shots as usize;
    let mut groups: BTreeMap<Vec<ErrorHit>, Vec<usize>> = BTreeMap::new();
    for shot in 0..shots {
        let mut pattern = Vec::new();
        for (i, g) in circuit.gates.iter().enumerate() {
            let p = error_prob[i];
            if p > 0.0 && rng.random::<f64>() < p {
                let paulis = match g {
                    Gate::Cz { .. } => {
                        let k = rng.random_range(1..16u8);
                        (k / 4, k % 4)
                    }
                    _ => (rng.random_range(1..4u8), 0),
                };
                pattern.push(ErrorHit { gate: i as u32, paulis });
            }
        }
        groups.entry(pattern).or_default().push(shot);
    }

    // True measured bits per shot (bit i = i-th measurement).
    let mut outcomes = vec![0u32; shots];
    for (pattern, members) in &groups {
        let mut state = StateVector::zero(active);
        let mut hits = pattern.iter().peekable();
        for (i, g) in circuit.gates.iter().enumerate() {
            let lg = match *g {
                Gate::Prx { qubit, theta, phi } => Gate::Prx { qubit: local[qubit], theta, phi },
                Gate::Cz { a, b } => Gate::Cz { a: local[a], b: local[b] },
                Gate::Measure { qubit } => Gate::Measure { qubit: local[qubit] },
            };
            state.apply_gate(&lg);
            while let Some(hit) = hits.next_if(|h| h.gate as usize == i) {
                let (qs, n) = g.qubits();
                state.apply_pauli(local[qs[0]], pauli(hit.paulis.0));
                if n == 2 {
                    state.apply_pauli(local[qs[1]], pauli(hit.paulis.1));
                }
            }
        }
        let sampler = BasisSampler::new(&state.probabilities());
        for &shot in members {
            let basis = sampler.sample(rng);
            outcomes[shot] = measured
                .iter()
                .enumerate()
                .fold(0u32, |acc, (bit, &q)| acc | ((((basis >> local[q]) & 1) as u32) << bit));
        }
    }

    let to_string = |mask: u32| -> String {
        (0..measured.len()).map(|b| if mask >> b & 1 == 1 { '1' } else { '0' }).collect()
    };
    let flip = |mask: u32, rng: &mut R| -> u32 {
        measured.iter().enumerate().fold(mask, |m, (bit, &q)| {
            if rng.random::<f64>() < 1.0 - cal.f_ro(q) {
                m ^ (1 << bit)
            } else {
                m
            }
        })
    };

    let data = match format {
        OutputFormat::Histogram => {
            let mut h = BTreeMap::new();
            for &o in &outcomes {
                *h.entry(to_string(flip(o, rng))).or_insert(0u64) += 1;
            }
            ResultData::Histogram(h)
        }
        OutputFormat::RawBitstrings => {
            ResultData::RawBitstrings(outcomes.iter().map(|&o| to_string(flip(o, rng))).collect())
        }
        OutputFormat::RawIq => {
            let half: Vec<f64> = measured.iter().map(|&q| iq_separation(cal.f_ro(q)) / 2.0).collect();
            ResultData::RawIq(
                outcomes
                    .iter()
                    .map(|&o| {
                        (0..measured.len())
                            .map(|bit| {
                                let centre = if o >> bit & 1 == 1 { half[bit] } else { -half[bit] };
                                let a: f64 = rng.sample(StandardNormal);
                                let b: f64 = rng.sample(StandardNormal);
                                (centre + a, b)
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
    };

    Ok(JobResult { format, shots: circuit.shots, measured, data, total_duration: twin.job_duration(circuit) })
}
