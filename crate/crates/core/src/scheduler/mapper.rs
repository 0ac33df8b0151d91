// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fidelity-aware placement and SWAP routing onto the device grid.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::SchedError;
use crate::telemetry::DeviceSnapshot;
use crate::twin::{Circuit, Gate, QpuTopology, StateVector};

/// Widths up to this are placed by exhaustive search.
pub const BRUTE_FORCE_MAX_WIDTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// Exhaustive for small widths, greedy otherwise.
    Auto,
    BruteForce,
    Greedy,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappedCircuit {
    /// Gates on physical qubits; width is the device size.
    pub circuit: Circuit,
    /// Physical qubit of each virtual qubit before the first gate.
    pub initial: Vec<usize>,
    /// Physical qubit of each virtual qubit after the last gate.
    pub fin: Vec<usize>,
    pub swaps: usize,
    /// Product of the calibrated fidelities of every emitted PRX and CZ.
    pub fidelity_product: f64,
}

/// Fidelity lookups plus precomputed all-pairs hop distances and routes.
struct Device {
    topo: QpuTopology,
    ln_f1q: Vec<f64>,
    ln_fcz: Vec<f64>,
    dist: Vec<Vec<usize>>,
    /// `paths[src][dst]`, see [`Device::next_hops`].
    paths: Vec<Vec<Option<Vec<usize>>>>,
}

impl Device {
    fn new(snapshot: &DeviceSnapshot) -> Self {
        let topo = snapshot.topology();
        let n = topo.num_qubits();
        let dist = (0..n)
            .map(|s| {
                let mut d = vec![usize::MAX; n];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for v in topo.neighbors(u) {
                        if d[v] == usize::MAX {
                            d[v] = d[u] + 1;
                            q.push_back(v);
                        }
                    }
                }
                d
            })
            .collect();
        let mut dev = Device {
            ln_f1q: snapshot.f1q.iter().map(|f| libm::log(*f)).collect(),
            ln_fcz: snapshot.f_cz.iter().map(|f| libm::log(*f)).collect(),
            topo,
            dist,
            paths: Vec::new(),
        };
        let hops: Vec<Vec<usize>> = (0..n).map(|dst| dev.next_hops(dst)).collect();
        let walk = |src: usize, dst: usize| -> Option<Vec<usize>> {
            if dev.dist[dst][src] == usize::MAX {
                return None;
            }
            let mut path = vec![src];
            let mut u = src;
            while u != dst {
                u = hops[dst][u];
                path.push(u);
            }
            Some(path)
        };
        let paths = (0..n).map(|a| (0..n).map(|b| walk(a, b)).collect()).collect();
        dev.paths = paths;
        dev
    }

    fn path(&self, src: usize, dst: usize) -> Option<&[usize]> {
        self.paths[src][dst].as_deref()
    }

    fn n(&self) -> usize {
        self.topo.num_qubits()
    }

    fn ln_cz(&self, a: usize, b: usize) -> f64 {
        self.ln_fcz[self.topo.coupler_index(a, b).expect("routed CZ on a coupler")]
    }

    /// Next hop from every qubit toward `dst` along the minimum-hop path with
    /// the largest CZ product, ties broken toward lower qubit indices.
    fn next_hops(&self, dst: usize) -> Vec<usize> {
        let n = self.n();
        let d = &self.dist[dst];
        let mut order: Vec<usize> = (0..n).filter(|&u| d[u] != usize::MAX).collect();
        order.sort_by_key(|&u| (d[u], u));
        // best[u]: best log-product from u to dst along a shortest path.
        let mut best = vec![f64::NEG_INFINITY; n];
        let mut next = vec![usize::MAX; n];
        best[dst] = 0.0;
        for &u in &order {
            if u == dst {
                continue;
            }
            for v in self.topo.neighbors(u) {
                if d[v] != usize::MAX && d[v] + 1 == d[u] {
                    let cand = best[v] + self.ln_cz(u, v);
                    if cand > best[u] || (cand == best[u] && v < next[u]) {
                        best[u] = cand;
                        next[u] = v;
                    }
                }
            }
        }
        next
    }
}

/// Emits `gates` under `placement`, inserting SWAPs for non-adjacent CZs.
/// Gates touching an unplaced virtual qubit are skipped, which lets the
/// greedy search score partial placements.
struct Router<'d> {
    dev: &'d Device,
    v2p: Vec<Option<usize>>,
    p2v: Vec<Option<usize>>,
    out: Vec<Gate>,
    ln_score: f64,
    swaps: usize,
    emit: bool,
}

impl<'d> Router<'d> {
    fn new(dev: &'d Device, placement: &[Option<usize>], emit: bool) -> Self {
        let mut p2v = vec![None; dev.n()];
        for (v, p) in placement.iter().enumerate() {
            if let Some(p) = p {
                p2v[*p] = Some(v);
            }
        }
        Router { dev, v2p: placement.to_vec(), p2v, out: Vec::new(), ln_score: 0.0, swaps: 0, emit }
    }

    fn prx(&mut self, q: usize, theta: f64, phi: f64) {
        self.ln_score += self.dev.ln_f1q[q];
        if self.emit {
            self.out.push(Gate::Prx { qubit: q, theta, phi });
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.ln_score += self.dev.ln_cz(a, b);
        if self.emit {
            self.out.push(Gate::Cz { a, b });
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        self.prx(t, -FRAC_PI_2, FRAC_PI_2);
        self.cz(c, t);
        self.prx(t, FRAC_PI_2, FRAC_PI_2);
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.cnot(a, b);
        self.cnot(b, a);
        self.cnot(a, b);
        self.swaps += 1;
        let (va, vb) = (self.p2v[a], self.p2v[b]);
        self.p2v[a] = vb;
        self.p2v[b] = va;
        if let Some(v) = va {
            self.v2p[v] = Some(b);
        }
        if let Some(v) = vb {
            self.v2p[v] = Some(a);
        }
    }

    fn run(&mut self, gates: &[Gate]) -> Result<(), SchedError> {
        for g in gates {
            match *g {
                Gate::Prx { qubit, theta, phi } => {
                    if let Some(p) = self.v2p[qubit] {
                        self.prx(p, theta, phi);
                    }
                }
                Gate::Measure { qubit } => {
                    if let (Some(p), true) = (self.v2p[qubit], self.emit) {
                        self.out.push(Gate::Measure { qubit: p });
                    }
                }
                Gate::Cz { a, b } => {
                    let (Some(pa), Some(pb)) = (self.v2p[a], self.v2p[b]) else { continue };
                    if !self.dev.topo.adjacent(pa, pb) {
                        let path = self.dev.path(pa, pb).ok_or(SchedError::Unroutable { a, b })?;
                        for w in path[..path.len() - 1].windows(2) {
                            self.swap(w[0], w[1]);
                        }
                    }
                    let (pa, pb) = (self.v2p[a].unwrap_or(pa), self.v2p[b].unwrap_or(pb));
                    self.cz(pa, pb);
                }
            }
        }
        Ok(())
    }
}

fn score(dev: &Device, gates: &[Gate], placement: &[Option<usize>]) -> Option<f64> {
    let mut r = Router::new(dev, placement, false);
    r.run(gates).ok().map(|_| r.ln_score)
}

/// Every injective placement of `width` virtual qubits on `n` physical
/// ones in lexicographic order (the identity first).
fn for_each_placement(width: usize, n: usize, mut f: impl FnMut(&[Option<usize>])) {
    fn rec(v: usize, width: usize, n: usize, cur: &mut Vec<Option<usize>>, used: &mut [bool], f: &mut dyn FnMut(&[Option<usize>])) {
        if v == width {
            f(cur);
            return;
        }
        for p in 0..n {
            if !used[p] {
                used[p] = true;
                cur[v] = Some(p);
                rec(v + 1, width, n, cur, used, f);
                used[p] = false;
            }
        }
    }
    let mut cur = vec![None; width];
    let mut used = vec![false; n];
    rec(0, width, n, &mut cur, &mut used, &mut f);
}

fn brute_force(dev: &Device, circuit: &Circuit) -> Vec<Option<usize>> {
    let mut best: Option<(f64, Vec<Option<usize>>)> = None;
    for_each_placement(circuit.width, dev.n(), |pl| {
        if let Some(s) = score(dev, &circuit.gates, pl) {
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, pl.to_vec()));
            }
        }
    });
    best.map(|(_, p)| p).unwrap_or_else(|| (0..circuit.width).map(Some).collect())
}

/// CZ counts per unordered virtual pair, most frequent first.
fn interaction_pairs(circuit: &Circuit) -> Vec<(usize, usize, usize)> {
    let mut counts: Vec<(usize, usize, usize)> = Vec::new();
    for g in &circuit.gates {
        if let Gate::Cz { a, b } = *g {
            let key = (a.min(b), a.max(b));
            match counts.iter_mut().find(|(x, y, _)| (*x, *y) == key) {
                Some(c) => c.2 += 1,
                None => counts.push((key.0, key.1, 1)),
            }
        }
    }
    counts.sort_by(|x, y| y.2.cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    counts
}

/// Places the remaining virtual qubits one at a time, each on the free
/// physical qubit that maximises the score of the gates placed so far.
fn complete(dev: &Device, circuit: &Circuit, mut pl: Vec<Option<usize>>, order: &[usize]) -> Option<(f64, Vec<Option<usize>>)> {
    for &v in order {
        if pl[v].is_some() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for p in 0..dev.n() {
            if pl.contains(&Some(p)) {
                continue;
            }
            pl[v] = Some(p);
            if let Some(s) = score(dev, &circuit.gates, &pl) {
                if best.is_none_or(|(b, _)| s > b) {
                    best = Some((s, p));
                }
            }
        }
        pl[v] = Some(best?.1);
    }
    let s = score(dev, &circuit.gates, &pl)?;
    Some((s, pl))
}

/// Multi-seed greedy placement followed by single-qubit relocation.
fn greedy(dev: &Device, circuit: &Circuit) -> Vec<Option<usize>> {
    let w = circuit.width;
    let identity: Vec<Option<usize>> = (0..w).map(Some).collect();
    let mut best = (score(dev, &circuit.gates, &identity).unwrap_or(f64::NEG_INFINITY), identity);

    let pairs = interaction_pairs(circuit);
    // Virtual qubits by interaction degree, then index.
    let mut degree = vec![0usize; w];
    for &(a, b, c) in &pairs {
        degree[a] += c;
        degree[b] += c;
    }
    let mut order: Vec<usize> = (0..w).collect();
    order.sort_by(|&x, &y| degree[y].cmp(&degree[x]).then(x.cmp(&y)));

    let seed_pairs: Vec<(usize, usize)> = if w <= 4 || pairs.is_empty() {
        (0..w).flat_map(|a| (a + 1..w).map(move |b| (a, b))).collect()
    } else {
        pairs.iter().take(3).map(|&(a, b, _)| (a, b)).collect()
    };
    for &(a, b) in &seed_pairs {
        for &(u, v) in dev.topo.couplers() {
            for (pu, pv) in [(u, v), (v, u)] {
                let mut pl = vec![None; w];
                pl[a] = Some(pu);
                pl[b] = Some(pv);
                if let Some(c) = complete(dev, circuit, pl, &order) {
                    if c.0 > best.0 {
                        best = c;
                    }
                }
            }
        }
    }

    // Relocate single qubits while that helps.
    for _ in 0..4 {
        let mut improved = false;
        for v in 0..w {
            for p in 0..dev.n() {
                let mut cand = best.1.clone();
                match cand.iter().position(|x| *x == Some(p)) {
                    Some(other) if other == v => continue,
                    Some(other) => cand[other] = cand[v],
                    None => {}
                }
                cand[v] = Some(p);
                if let Some(s) = score(dev, &circuit.gates, &cand) {
                    if s > best.0 {
                        best = (s, cand);
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    best.1
}

/// Places and routes `circuit` onto the device described by `snapshot`.
pub fn map_circuit(circuit: &Circuit, snapshot: &DeviceSnapshot, mode: PlacementMode) -> Result<MappedCircuit, SchedError> {
    circuit.validate().map_err(|e| SchedError::InvalidCircuit(alloc::format!("{e}")))?;
    let dev = Device::new(snapshot);
    if circuit.width > dev.n() {
        return Err(SchedError::TooWide { width: circuit.width, available: dev.n() });
    }
    let placement = match mode {
        PlacementMode::Identity => (0..circuit.width).map(Some).collect(),
        PlacementMode::BruteForce => brute_force(&dev, circuit),
        PlacementMode::Greedy => greedy(&dev, circuit),
        PlacementMode::Auto if circuit.width <= BRUTE_FORCE_MAX_WIDTH => brute_force(&dev, circuit),
        PlacementMode::Auto => greedy(&dev, circuit),
    };
    route(&dev, circuit, &placement)
}

/// Routes `circuit` under a fixed placement.
pub fn route_with(circuit: &Circuit, snapshot: &DeviceSnapshot, placement: &[usize]) -> Result<MappedCircuit, SchedError> {
    let dev = Device::new(snapshot);
    let pl: Vec<Option<usize>> = placement.iter().copied().map(Some).collect();
    route(&dev, circuit, &pl)
}

fn route(dev: &Device, circuit: &Circuit, placement: &[Option<usize>]) -> Result<MappedCircuit, SchedError> {
    let mut r = Router::new(dev, placement, true);
    r.run(&circuit.gates)?;
    let mut mapped = Circuit::new(dev.n(), circuit.shots);
    mapped.reset_duration = circuit.reset_duration;
    mapped.gates = r.out;
    Ok(MappedCircuit {
        circuit: mapped,
        initial: placement.iter().map(|p| p.expect("complete placement")).collect(),
        fin: r.v2p.iter().map(|p| p.expect("complete placement")).collect(),
        swaps: r.swaps,
        fidelity_product: libm::exp(r.ln_score),
    })
}

/// Noiseless overlap `|⟨original|mapped⟩|²` from `|0…0⟩`, with the mapped
/// state read through the final placement. Global phase drops out.
///
/// Only touched physical qubits are simulated, so the cost follows the
/// number of qubits the routed circuit uses rather than the device size.
pub fn mapping_fidelity(original: &Circuit, mapped: &MappedCircuit) -> f64 {
    let mut local = vec![usize::MAX; mapped.circuit.width];
    let mut order = Vec::new();
    let touch = |q: usize, local: &mut Vec<usize>, order: &mut Vec<usize>| {
        if local[q] == usize::MAX {
            local[q] = order.len();
            order.push(q);
        }
    };
    for &p in &mapped.fin {
        touch(p, &mut local, &mut order);
    }
    for g in &mapped.circuit.gates {
        let (qs, n) = g.qubits();
        for &q in &qs[..n] {
            touch(q, &mut local, &mut order);
        }
    }
    let relabel = |g: &Gate, m: &dyn Fn(usize) -> usize| match *g {
        Gate::Prx { qubit, theta, phi } => Gate::Prx { qubit: m(qubit), theta, phi },
        Gate::Cz { a, b } => Gate::Cz { a: m(a), b: m(b) },
        Gate::Measure { qubit } => Gate::Measure { qubit: m(qubit) },
    };
    let mut got = StateVector::zero(order.len());
    for g in &mapped.circuit.gates {
        got.apply_gate(&relabel(g, &|q| local[q]));
    }
    let mut want_v = StateVector::zero(original.width);
    for g in &original.gates {
        want_v.apply_gate(g);
    }
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1usize << order.len()];
    for (x, a) in want_v.amplitudes().iter().enumerate() {
        let idx = (0..original.width).fold(0usize, |acc, v| acc | (((x >> v) & 1) << local[mapped.fin[v]]));
        amps[idx] = *a;
    }
    let want = StateVector::from_amplitudes(amps).expect("power of two");
    got.fidelity(&want)
}
