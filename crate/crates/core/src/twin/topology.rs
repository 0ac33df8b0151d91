// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Native gate set of the device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NativeGate {
    #[serde(rename = "prx")]
    Prx,
    #[serde(rename = "cz")]
    Cz,
    #[serde(rename = "measure")]
    Measure,
}

pub const NATIVE_GATES: [NativeGate; 3] = [NativeGate::Prx, NativeGate::Cz, NativeGate::Measure];

/// Rectangular qubit grid with tunable couplers between nearest neighbours.
///
/// Qubit `q` sits at `(q / cols, q % cols)`. Couplers are stored as
/// `(low, high)` pairs in lexicographic order; a coupler's position in that
/// list is its index everywhere else in the crate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GridDims", into = "GridDims")]
pub struct QpuTopology {
    rows: usize,
    cols: usize,
    couplers: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct GridDims {
    rows: usize,
    cols: usize,
}

impl From<GridDims> for QpuTopology {
    fn from(d: GridDims) -> Self {
        QpuTopology::grid(d.rows, d.cols)
    }
}

impl From<QpuTopology> for GridDims {
    fn from(t: QpuTopology) -> Self {
        GridDims { rows: t.rows, cols: t.cols }
    }
}

impl QpuTopology {
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut couplers = Vec::new();
        for q in 0..rows * cols {
            let (r, c) = (q / cols, q % cols);
            if c + 1 < cols {
                couplers.push((q, q + 1));
            }
            if r + 1 < rows {
                couplers.push((q, q + cols));
            }
        }
        couplers.sort_unstable();
        let index = couplers.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        QpuTopology { rows, cols, couplers, index }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn num_couplers(&self) -> usize {
        self.couplers.len()
    }

    pub fn couplers(&self) -> &[(usize, usize)] {
        &self.couplers
    }

    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn coupler_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.index.get(&key).copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.coupler_index(a, b).is_some()
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = self.coords(q);
        let cols = self.cols;
        [
            (r > 0).then(|| q - cols),
            (c > 0).then(|| q - 1),
            (c + 1 < cols).then(|| q + 1),
            (r + 1 < self.rows).then(|| q + cols),
        ]
        .into_iter()
        .flatten()
    }

    /// Grid (Manhattan) distance.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        ra.abs_diff(rb) + ca.abs_diff(cb)
    }

    /// Boustrophedon ordering; consecutive entries are always coupled.
    pub fn snake(&self) -> Vec<usize> {
        (0..self.rows)
            .flat_map(|r| {
                let row: Vec<usize> = (0..self.cols).map(|c| r * self.cols + c).collect();
                if r % 2 == 0 {
                    row
                } else {
                    row.into_iter().rev().collect()
                }
            })
            .collect()
    }

    /// Breadth-first hop counts from `src`.
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_qubits()];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(q) = queue.pop_front() {
            for n in self.neighbors(q) {
                if dist[n] == usize::MAX {
                    dist[n] = dist[q] + 1;
                    queue.push_back(n);
                }
            }
        }
        dist
    }
}

impl Default for QpuTopology {
    fn default() -> Self {
        QpuTopology::grid(4, 5)
    }
}
