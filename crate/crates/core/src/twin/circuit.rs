// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::TwinError;

pub const DEFAULT_RESET_S: f64 = 300e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Gate {
    /// Phased-X rotation: angle `theta` about the axis `cos(phi)·X + sin(phi)·Y`.
    Prx { qubit: usize, theta: f64, phi: f64 },
    Cz { a: usize, b: usize },
    Measure { qubit: usize },
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Prx { qubit, .. } | Gate::Measure { qubit } => ([qubit, 0], 1),
            Gate::Cz { a, b } => ([a, b], 2),
        }
    }

    pub fn ry(qubit: usize, theta: f64) -> Gate {
        Gate::Prx { qubit, theta, phi: core::f64::consts::FRAC_PI_2 }
    }
}

/// Gate list over qubit indices `0..width`.
///
/// Output bit `i` of every result belongs to the `i`-th `Measure` gate.
///
/// Serialized as `{width, shots, reset_us, gates: [{op, qubits, params}]}`
/// with `op` one of `prx` (params `[theta, phi]`), `cz` or `measure`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireCircuit", into = "WireCircuit")]
pub struct Circuit {
    pub width: usize,
    pub shots: u32,
    /// Passive reset at the start of each shot, seconds.
    pub reset_duration: f64,
    pub gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGate {
    op: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCircuit {
    width: usize,
    shots: u32,
    #[serde(default = "default_reset_us")]
    reset_us: f64,
    gates: Vec<WireGate>,
}

fn default_reset_us() -> f64 {
    DEFAULT_RESET_S * 1e6
}

impl TryFrom<WireGate> for Gate {
    type Error = String;

    fn try_from(w: WireGate) -> Result<Self, String> {
        match (w.op.as_str(), w.qubits.as_slice(), w.params.as_slice()) {
            ("prx", &[qubit], &[theta, phi]) => Ok(Gate::Prx { qubit, theta, phi }),
            ("cz", &[a, b], &[]) => Ok(Gate::Cz { a, b }),
            ("measure", &[qubit], &[]) => Ok(Gate::Measure { qubit }),
            ("prx" | "cz" | "measure", q, p) => {
                Err(format!("`{}` with {} qubits and {} params", w.op, q.len(), p.len()))
            }
            (op, _, _) => Err(format!("unknown op `{op}` (expected prx, cz or measure)")),
        }
    }
}

impl From<Gate> for WireGate {
    fn from(g: Gate) -> Self {
        let (op, qubits, params) = match g {
            Gate::Prx { qubit, theta, phi } => ("prx", vec![qubit], vec![theta, phi]),
            Gate::Cz { a, b } => ("cz", vec![a, b], Vec::new()),
            Gate::Measure { qubit } => ("measure", vec![qubit], Vec::new()),
        };
        WireGate { op: op.into(), qubits, params }
    }
}

impl TryFrom<WireCircuit> for Circuit {
    type Error = String;

    fn try_from(w: WireCircuit) -> Result<Self, String> {
        let gates = w
            .gates
            .into_iter()
            .enumerate()
            .map(|(i, g)| Gate::try_from(g).map_err(|e| format!("gate {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Circuit { width: w.width, shots: w.shots, reset_duration: w.reset_us * 1e-6, gates })
    }
}

impl From<Circuit> for WireCircuit {
    fn from(c: Circuit) -> Self {
        WireCircuit {
            width: c.width,
            shots: c.shots,
            reset_us: c.reset_duration * 1e6,
            gates: c.gates.into_iter().map(WireGate::from).collect(),
        }
    }
}

impl Circuit {
    pub fn new(width: usize, shots: u32) -> Self {
        Circuit { width, shots, reset_duration: DEFAULT_RESET_S, gates: Vec::new() }
    }

    pub fn with_gates(mut self, gates: impl IntoIterator<Item = Gate>) -> Self {
        self.gates.extend(gates);
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn measure_all(mut self) -> Self {
        for q in 0..self.width {
            self.gates.push(Gate::Measure { qubit: q });
        }
        self
    }

    /// Qubits in measurement order.
    pub fn measured(&self) -> Vec<usize> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Measure { qubit } => Some(qubit),
                _ => None,
            })
            .collect()
    }

    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cz { .. })).count()
    }

    /// Indices in range, distinct CZ operands, at most one terminal
    /// measurement per qubit, finite angles, non-negative reset.
    pub fn validate(&self) -> Result<(), TwinError> {
        if !(self.reset_duration.is_finite() && self.reset_duration >= 0.0) {
            return Err(TwinError::InvalidCircuit("reset duration must be non-negative".into()));
        }
        let mut measured = alloc::vec![false; self.width];
        for (i, g) in self.gates.iter().enumerate() {
            let (qs, n) = g.qubits();
            for &q in &qs[..n] {
                if q >= self.width {
                    return Err(TwinError::QubitOutOfRange { gate: i, qubit: q, width: self.width });
                }
                if measured[q] {
                    return Err(TwinError::InvalidCircuit(alloc::format!(
                        "gate {i} acts on qubit {q} after its measurement"
                    )));
                }
            }
            match *g {
                Gate::Cz { a, b } if a == b => {
                    return Err(TwinError::InvalidCircuit(alloc::format!("gate {i}: CZ on a single qubit {a}")));
                }
                Gate::Prx { theta, phi, .. } if !(theta.is_finite() && phi.is_finite()) => {
                    return Err(TwinError::InvalidCircuit(alloc::format!("gate {i}: non-finite angle")));
                }
                Gate::Measure { qubit } => measured[qubit] = true,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Per-gate durations in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateDurations {
    pub prx: f64,
    pub cz: f64,
    pub measure: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        GateDurations { prx: 20e-9, cz: 40e-9, measure: 2e-6 }
    }
}

impl GateDurations {
    pub fn of(&self, gate: &Gate) -> f64 {
        match gate {
            Gate::Prx { .. } => self.prx,
            Gate::Cz { .. } => self.cz,
            Gate::Measure { .. } => self.measure,
        }
    }
}

/// Reset plus the serial sum of gate durations.
pub fn estimate_shot_duration(circuit: &Circuit, durations: &GateDurations) -> f64 {
    circuit.reset_duration + circuit.gates.iter().map(|g| durations.of(g)).sum::<f64>()
}
