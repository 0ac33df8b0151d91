// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense statevector. Qubit `q` is bit `q` of the basis index.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use super::circuit::Gate;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2 {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// `exp(-i·θ/2·(cos φ·X + sin φ·Y))`.
pub fn prx_matrix(theta: f64, phi: f64) -> Matrix2 {
    let c = libm::cos(theta / 2.0);
    let s = libm::sin(theta / 2.0);
    let minus_i = Complex64::new(0.0, -1.0);
    let e_minus = Complex64::new(libm::cos(phi), -libm::sin(phi));
    let e_plus = Complex64::new(libm::cos(phi), libm::sin(phi));
    [[Complex64::new(c, 0.0), minus_i * e_minus * s], [minus_i * e_plus * s, Complex64::new(c, 0.0)]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![ZERO; 1usize << n];
        amps[0] = ONE;
        StateVector { n, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Option<Self> {
        let len = amps.len();
        (len.is_power_of_two()).then(|| StateVector { n: len.trailing_zeros() as usize, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        if p != Pauli::I {
            self.apply_1q(q, &p.matrix());
        }
    }

    /// Applies a unitary gate; `Measure` is a no-op here.
    pub fn apply_gate(&mut self, gate: &Gate) {
        match *gate {
            Gate::Prx { qubit, theta, phi } => self.apply_1q(qubit, &prx_matrix(theta, phi)),
            Gate::Cz { a, b } => self.apply_cz(a, b),
            Gate::Measure { .. } => {}
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    }
}

/// Samples basis indices from a probability vector by inverse CDF.
#[derive(Clone, Debug)]
pub struct BasisSampler {
    cumulative: Vec<f64>,
}

impl BasisSampler {
    pub fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        BasisSampler { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cumulative.last().copied().unwrap_or(1.0);
        let u: f64 = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}
