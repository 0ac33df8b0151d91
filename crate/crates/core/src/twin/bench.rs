// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use core::f64::consts::FRAC_PI_2;

use super::circuit::{Circuit, Gate};
use super::execute::JobResult;

/// GHZ preparation along `chain` (consecutive entries must be coupled):
/// RY(π/2) on the head, then CNOT = RY(π/2)·CZ·RY(−π/2) down the chain.
pub fn ghz_circuit(chain: &[usize], width: usize, shots: u32) -> Circuit {
    let mut c = Circuit::new(width, shots);
    if let Some(&head) = chain.first() {
        c.push(Gate::ry(head, FRAC_PI_2));
    }
    for pair in chain.windows(2) {
        let (ctrl, tgt) = (pair[0], pair[1]);
        c.push(Gate::ry(tgt, -FRAC_PI_2));
        c.push(Gate::Cz { a: ctrl, b: tgt });
        c.push(Gate::ry(tgt, FRAC_PI_2));
    }
    for &q in chain {
        c.push(Gate::Measure { qubit: q });
    }
    c
}

/// Fraction of shots reading all-zeros or all-ones.
pub fn ghz_probability(result: &JobResult) -> f64 {
    let Some(h) = result.histogram() else { return 0.0 };
    let n = result.measured.len();
    let total: u64 = h.values().sum();
    if total == 0 {
        return 0.0;
    }
    let zeros: alloc::string::String = core::iter::repeat_n('0', n).collect();
    let ones: alloc::string::String = core::iter::repeat_n('1', n).collect();
    let hits = h.get(&zeros).copied().unwrap_or(0) + if n > 0 { h.get(&ones).copied().unwrap_or(0) } else { 0 };
    hits as f64 / total as f64
}
