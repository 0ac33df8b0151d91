// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Runtime budgets are part of each
//! criterion.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use qhpc::fft::FftEstimator;
use qhpc::formats::{write_event_log, write_fidelity_csv};
use qhpc_core::facility::{thermal_step, CryostatMode, Fault, FaultKind, BASE_TEMP_K, MAX_COOLDOWN_S, MIN_COOLDOWN_S};
use qhpc_core::scenario::{ScenarioConfig, Simulation};
use qhpc_core::scheduler::{
    calibration_duration, estimate_output_rate, find_overlap, map_circuit, mapping_fidelity, plan_calibration, route_with,
    Activity, CalibrationPolicy, OperatorWindow, PlacementMode,
};
use qhpc_core::survey::{
    check_ac_magnetic, check_dc_magnetic, check_humidity, check_sound, check_temperature, check_vibration, spectrum,
    Axis, DirectDft, SurveyChannel,
};
use qhpc_core::telemetry::{device_snapshot, DeviceSnapshot};
use qhpc_core::time::{SimTime, DAY, HOUR};
use qhpc_core::twin::{
    drift_bound, ghz_circuit, CalibrationKind, Circuit, Gate, MetricFamily, Nominal, OutputFormat, QpuTwin, ResultData,
    TwinConfig,
};
use qhpc_core::RngStream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

type Criterion = fn(&mut Checks);

fn main() {
    let criteria: [(u8, &str, Criterion, u64); 10] = [
        (1, "data rate", data_rate, 1),
        (2, "survey boundary suite", survey_boundaries, 10),
        (3, "autonomy campaign", autonomy_campaign, 60),
        (4, "calibration ordering", calibration_ordering, 5),
        (5, "recovery thresholds", recovery_thresholds, 10),
        (6, "redundancy A/B", redundancy_ab, 60),
        (7, "mapper oracle equivalence", mapper_oracle, 120),
        (8, "twin statistics", twin_statistics, 30),
        (9, "scheduler invariants", scheduler_invariants, 120),
        (10, "determinism", determinism, 60),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let t = Instant::now();
        let mut c = Checks::default();
        let panicked = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut c))).err();
        let elapsed = t.elapsed();
        if let Some(p) = panicked {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            c.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        if elapsed > Duration::from_secs(budget) {
            c.failures.push(format!("took {:.1} s, budget {budget} s", elapsed.as_secs_f64()));
        }
        let pass = c.failures.is_empty();
        if !pass {
            failed += 1;
        }
        let detail = if pass { c.notes.join("; ") } else { c.failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ") };
        println!(
            "{} {n:>2} {name}: {} checks, {:.2} s{}{}",
            if pass { "PASS" } else { "FAIL" },
            c.total,
            elapsed.as_secs_f64(),
            if detail.is_empty() { "" } else { " | " },
            detail
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// 1

fn data_rate(c: &mut Checks) {
    let r20 = estimate_output_rate(20, 300e-6, 8).unwrap();
    c.expect(r20.round() == 533_333.0, || format!("20 qubits: {r20}"));
    c.expect(rel(r20, 20.0 * 8.0 / 300e-6) < 1e-15, || format!("20 qubits not 20·8/300 µs: {r20}"));
    c.expect(qhpc::cli::format_rate(r20) == "533333 bit/s (533 kbit/s)", || qhpc::cli::format_rate(r20));
    for n in [54u64, 150] {
        let r = estimate_output_rate(n, 300e-6, 8).unwrap();
        c.expect(rel(r / n as f64, r20 / 20.0) <= 4.0 * f64::EPSILON, || format!("{n} qubits: {r} not linear"));
    }
    c.note(format!("{r20:.3} bit/s"));
}

// 2

fn pass_of(r: Result<qhpc_core::survey::CriterionResult, qhpc_core::survey::SurveyError>) -> bool {
    r.expect("fixture is well formed").pass
}

fn edge(c: &mut Checks, name: &str, at_099: bool, at_101: bool) {
    c.expect(at_099, || format!("{name} at 0.99× limit should pass"));
    c.expect(!at_101, || format!("{name} at 1.01× limit should fail"));
}

fn amplitude(c: &mut Checks, name: &str, ch: &SurveyChannel, lo: f64, hi: f64, want: f64) {
    let s = spectrum(ch, lo, hi, &FftEstimator).unwrap();
    let (_, a) = s.peak().unwrap();
    c.expect(rel(a, want) < 0.01, || format!("{name}: recovered amplitude {a} vs {want}"));
}

fn survey_boundaries(c: &mut Checks) {
    let est = FftEstimator;
    let dc_set = |x: f64| vec![dc(Axis::X, x), dc(Axis::Y, 30.0), dc(Axis::Z, -40.0)];
    let dc_pass = |x: f64| pass_of(check_dc_magnetic(&dc_set(x).iter().collect::<Vec<_>>()));
    edge(c, "dc_magnetic", dc_pass(99.0), dc_pass(101.0));
    edge(c, "dc_magnetic (negative)", dc_pass(-99.0), dc_pass(-101.0));

    let ac_set = |pp: f64| vec![ac(Axis::X, 0.2), ac(Axis::Y, pp), ac(Axis::Z, 0.3)];
    let ac_pass = |pp: f64, e: &dyn qhpc_core::survey::SpectrumEstimator| {
        pass_of(check_ac_magnetic(&ac_set(pp).iter().collect::<Vec<_>>(), e))
    };
    edge(c, "ac_magnetic", ac_pass(0.99, &est), ac_pass(1.01, &est));
    edge(c, "ac_magnetic (direct DFT)", ac_pass(0.99, &DirectDft), ac_pass(1.01, &DirectDft));
    amplitude(c, "ac_magnetic", &ac(Axis::X, 0.99), 5.0, 1000.0, 0.495);

    let vib_pass = |rms: f64| pass_of(check_vibration(&[&vibration(rms)], &est));
    edge(c, "vibration", vib_pass(396.0), vib_pass(404.0));
    amplitude(c, "vibration", &vibration(396.0), 1.0, 200.0, 396.0 * std::f64::consts::SQRT_2);

    let snd_pass = |dba: f64| pass_of(check_sound(&sound(dba), &est));
    edge(c, "sound_pressure", snd_pass(79.2), snd_pass(80.8));
    amplitude(c, "sound_pressure", &sound(79.2), 20.0, 20_000.0, sound_amplitude(79.2, 1000.0));
    let level = check_sound(&sound(79.2), &est).unwrap().worst;
    c.expect((level - 79.2).abs() < 0.01, || format!("sound level {level} vs 79.2 dBA"));

    let stab = |spike: f64| check_temperature(&temperature_spike(spike)).unwrap()[0].pass;
    edge(c, "temperature_stability", stab(0.99), stab(1.01));
    let sp = |t: f64| check_temperature(&temperature_const(t)).unwrap()[1].pass;
    c.expect(!sp(19.9) && sp(20.1) && sp(24.9) && !sp(25.1), || "temperature set point edges".into());
    let rh = |h: f64| pass_of(check_humidity(&humidity_const(h)));
    c.expect(!rh(24.9) && rh(25.1) && rh(59.9) && !rh(60.1), || "humidity edges".into());
    c.note("every criterion flips between 0.99× and 1.01× of its limit");
}

// 3

fn autonomy_campaign(c: &mut Checks) {
    let mut cfg = ScenarioConfig::new(146.0 * DAY, 2026);
    cfg.policy = CalibrationPolicy { period_s: Some(24.0 * HOUR), ..CalibrationPolicy::default() };
    cfg.jobs = trace(146.0, 4.0 * HOUR);
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    c.expect(sim.manual_interventions() == 0, || format!("{} manual interventions", sim.manual_interventions()));

    let state = sim.twin().calibration();
    let tau = sim.twin().time_constants();
    let min = sim.min_fidelity();
    let mut lowest = [f64::INFINITY; 3];
    let mut bound_lo = [f64::INFINITY; 3];
    let mut ceil_hi = [0.0f64; 3];
    for (k, fam) in MetricFamily::ALL.into_iter().enumerate() {
        for i in 0..state.ceiling.family(fam).len() {
            let ceil = state.ceiling.family(fam)[i];
            let floor = state.floor.family(fam)[i];
            let lo = ceil - drift_bound(ceil, floor, tau.family(fam)[i], 24.0 * HOUR);
            let m = min.family(fam)[i];
            c.expect(m >= lo - 1e-12 && m <= ceil + 1e-12, || format!("{} element {i}: min {m} outside [{lo}, {ceil}]", fam.as_str()));
            lowest[k] = lowest[k].min(m);
            bound_lo[k] = bound_lo[k].min(lo);
            ceil_hi[k] = ceil_hi[k].max(ceil);
        }
    }

    let rows = sim.fidelity_rows();
    let mut csv = Vec::new();
    write_fidelity_csv(&mut csv, &rows).unwrap();
    let mut families = BTreeSet::new();
    for line in String::from_utf8(csv).unwrap().lines().skip(1) {
        families.insert(line.split(',').nth(1).unwrap_or_default().to_string());
    }
    let want: BTreeSet<String> = MetricFamily::ALL.iter().map(|f| f.as_str().to_string()).collect();
    c.expect(families == want, || format!("fidelity CSV families {families:?}"));
    for r in &rows {
        let k = MetricFamily::ALL.iter().position(|f| f.as_str() == r.family).unwrap();
        c.expect(r.value >= bound_lo[k] - 1e-12 && r.value <= ceil_hi[k] + 1e-12, || {
            format!("{} {} at t={}: {}", r.family, r.element, r.time_s, r.value)
        });
    }
    let fulls = sim
        .occupancy()
        .iter()
        .filter(|o| matches!(o.activity, Activity::Calibration { kind: CalibrationKind::Full, .. }))
        .count();
    c.expect(fulls == 146, || format!("{fulls} full calibrations in 146 days"));
    c.note(format!(
        "{} rows, lowest f1q/f_ro/f_cz {:.5}/{:.5}/{:.5} vs bounds {:.5}/{:.5}/{:.5}",
        rows.len(),
        lowest[0],
        lowest[1],
        lowest[2],
        bound_lo[0],
        bound_lo[1],
        bound_lo[2]
    ));
}

// 4

fn calibration_ordering(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let mut cfg = TwinConfig::default();
        cfg.seed = i;
        cfg.ceiling_spread = rng.random_range(0.0..0.02);
        cfg.drift.jitter = rng.random_range(0.0..0.5);
        cfg.quick_fraction = rng.random_range(0.05..0.95);
        let mut twin = QpuTwin::new(cfg).unwrap();
        twin.drift(rng.random_range(0.0..30.0 * DAY));
        if rng.random_bool(0.2) {
            twin.lose_calibration();
        }
        if rng.random_bool(0.3) {
            twin.recalibrate(CalibrationKind::Quick);
            twin.drift(rng.random_range(0.0..5.0 * DAY));
        }
        let mut quick = twin.clone();
        let mut full = twin;
        let (q, dq) = quick.recalibrate(CalibrationKind::Quick);
        let (f, df) = full.recalibrate(CalibrationKind::Full);
        c.expect(dq == 2400.0 && df == 6000.0, || format!("state {i}: durations {dq}/{df}"));
        for ((fam, e, qv), (_, _, fv)) in q.values.iter().zip(f.values.iter()) {
            c.expect(qv <= fv, || format!("state {i}: {} element {e} quick {qv} > full {fv}", fam.as_str()));
        }
    }

    c.expect(calibration_duration(CalibrationKind::Quick) == 40.0 * 60.0, || "quick window".into());
    c.expect(calibration_duration(CalibrationKind::Full) == 100.0 * 60.0, || "full window".into());
    let mut policy = CalibrationPolicy::default();
    policy.operator_windows.push(OperatorWindow { time: SimTime::from_days(3.6), kind: CalibrationKind::Quick });
    for w in plan_calibration(&policy, 6.0 * DAY, &[SimTime::from_days(1.3)]) {
        let want = if w.kind == CalibrationKind::Full { 6000.0 } else { 2400.0 };
        c.expect(w.duration() == want, || format!("planned {:?} lasts {}", w.kind, w.duration()));
    }

    let mut cfg = ScenarioConfig::new(6.0 * DAY, 4);
    cfg.policy = policy;
    cfg.jobs = trace(6.0, 5.0 * HOUR);
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    let mut seen = BTreeSet::new();
    for o in sim.occupancy() {
        if let Activity::Calibration { kind, .. } = o.activity {
            let want = if kind == CalibrationKind::Full { 6000.0 } else { 2400.0 };
            c.expect((o.duration() - want).abs() < 1e-6, || format!("scheduled {kind:?} lasted {}", o.duration()));
            seen.insert(format!("{kind:?}"));
        }
    }
    c.expect(seen.len() == 2, || format!("window kinds seen: {seen:?}"));
    c.note("100 drifted states, quick never above full");
}

// 5

fn outage_run(fault_s: f64) -> Simulation {
    let mut cfg = ScenarioConfig::new(10.0 * DAY, 5);
    cfg.jobs = trace(10.0, 2.0 * HOUR);
    cfg.facility.ups_runtime_s = 0.0;
    cfg.facility.redundant_cooling = false;
    cfg.faults = vec![Fault::new(FaultKind::PumpFailure, DAY + 30.0, fault_s)];
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    sim
}

fn recovery_thresholds(c: &mut Checks) {
    let t = thermal_step(BASE_TEMP_K, 120.0, false, 600.0);
    c.expect((t - 1.0).abs() <= 1e-6, || format!("thermal_step(120 s) = {t}"));
    let split = thermal_step(thermal_step(BASE_TEMP_K, 50.0, false, 600.0), 70.0, false, 600.0);
    c.expect((split - t).abs() < 1e-12, || "warming does not compose".into());

    let short = outage_run(60.0);
    let modes: Vec<CryostatMode> = short.transitions().iter().map(|t| t.to).collect();
    c.expect(!modes.contains(&CryostatMode::Cooldown), || format!("60 s fault entered cooldown: {modes:?}"));
    c.expect(modes.last() == Some(&CryostatMode::Operating), || format!("60 s fault did not restore: {modes:?}"));
    c.expect(short.manual_interventions() == 0, || "60 s fault needed an operator".into());

    let long = outage_run(600.0);
    let tr = long.transitions();
    let into = tr.iter().find(|t| t.to == CryostatMode::Cooldown);
    let out = tr.iter().find(|t| t.from == CryostatMode::Cooldown);
    match (into, out) {
        (Some(a), Some(b)) => {
            let d = b.time.since(a.time);
            c.expect((MIN_COOLDOWN_S..=MAX_COOLDOWN_S).contains(&d), || format!("cooldown {:.2} d", d / DAY));
            let first_job = long
                .occupancy()
                .iter()
                .filter(|o| matches!(o.activity, Activity::Job { .. }) && o.start >= a.time)
                .map(|o| o.start)
                .min();
            let recal = long.occupancy().iter().find(|o| {
                o.start >= b.time
                    && matches!(
                        o.activity,
                        Activity::Recovery { mode: CryostatMode::Recalibration }
                            | Activity::Calibration { kind: CalibrationKind::Full, .. }
                    )
            });
            match (first_job, recal) {
                (Some(j), Some(r)) => {
                    c.expect(r.end <= j, || format!("first job at {} before recalibration ends at {}", j.secs(), r.end.secs()));
                    c.expect((r.duration() - 6000.0).abs() < 1e-6, || format!("recalibration lasted {}", r.duration()));
                }
                _ => c.expect(false, || "no post-outage job or recalibration".into()),
            }
            c.note(format!("cooldown {:.2} d", d / DAY));
        }
        _ => c.expect(false, || format!("600 s fault never cooled down: {:?}", tr.iter().map(|t| t.to).collect::<Vec<_>>())),
    }
}

// 6

fn redundancy_ab(c: &mut Checks) {
    let run = |ups: f64, redundant: bool| {
        let mut cfg = ScenarioConfig::new(90.0 * DAY, 6);
        cfg.jobs = trace(90.0, 3.0 * HOUR);
        cfg.facility.ups_runtime_s = ups;
        cfg.facility.redundant_cooling = redundant;
        cfg.faults = vec![Fault::new(FaultKind::GridPowerLoss, 40.0 * DAY, 600.0)];
        let mut sim = Simulation::new(cfg).unwrap();
        sim.run().unwrap();
        sim.metrics().availability
    };
    let with = run(900.0, true);
    let without = run(0.0, false);
    c.expect(with - without >= 2.0 / 90.0, || format!("with {with:.4} − without {without:.4} < {:.4}", 2.0 / 90.0));
    c.note(format!("availability {with:.4} vs {without:.4}, gap {:.2} d", (with - without) * 90.0));
}

// 7

fn random_snapshot(rng: &mut ChaCha8Rng, base: &DeviceSnapshot) -> DeviceSnapshot {
    let mut s = base.clone();
    for v in &mut s.f1q {
        *v = rng.random_range(0.99..1.0);
    }
    for v in &mut s.f_ro {
        *v = rng.random_range(0.9..0.99);
    }
    for v in &mut s.f_cz {
        *v = rng.random_range(0.9..0.999);
    }
    s
}

fn patterns() -> Vec<(&'static str, Circuit)> {
    let cz = |pairs: &[(usize, usize)], w: usize| {
        Circuit::new(w, 1).with_gates(pairs.iter().map(|&(a, b)| Gate::Cz { a, b })).measure_all()
    };
    vec![
        ("single CZ", cz(&[(0, 1)], 2)),
        ("path centred on 0", cz(&[(0, 1), (0, 2)], 3)),
        ("path centred on 1", cz(&[(0, 1), (1, 2)], 3)),
        ("path centred on 2", cz(&[(0, 2), (1, 2)], 3)),
        ("triangle", cz(&[(0, 1), (1, 2), (0, 2)], 3)),
    ]
}

fn placements(width: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(width: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == width {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                rec(width, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(width, n, &mut cur, &mut out);
    out
}

/// Best CZ product over placements where every interacting pair already
/// shares a coupler, computed straight from the snapshot.
fn swap_free_best(circuit: &Circuit, s: &DeviceSnapshot, all: &[Vec<usize>]) -> f64 {
    all.iter()
        .filter_map(|pl| {
            circuit.gates.iter().try_fold(1.0, |acc, g| match *g {
                Gate::Cz { a, b } => s.cz_fidelity(pl[a], pl[b]).map(|f| acc * f),
                _ => Some(acc),
            })
        })
        .fold(0.0, f64::max)
}

fn random_small_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let w = rng.random_range(2..=4);
    let mut c = Circuit::new(w, 1);
    for _ in 0..rng.random_range(1..16) {
        let a = rng.random_range(0..w);
        if rng.random_bool(0.4) {
            c.push(Gate::Cz { a, b: (a + rng.random_range(1..w)) % w });
        } else {
            c.push(Gate::Prx { qubit: a, theta: rng.random_range(-PI..PI), phi: rng.random_range(-PI..PI) });
        }
    }
    c.measure_all()
}

fn mapper_oracle(c: &mut Checks) {
    let base = device_snapshot(&QpuTwin::new(TwinConfig::default()).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let snaps: Vec<DeviceSnapshot> = (0..20).map(|_| random_snapshot(&mut rng, &base)).collect();
    let pl2 = placements(2, base.num_qubits);
    let pl3 = placements(3, base.num_qubits);
    let mut compared = 0;
    for s in &snaps {
        for (name, circ) in patterns() {
            let all = if circ.width == 2 { &pl2 } else { &pl3 };
            let exhaustive = all.iter().map(|pl| route_with(&circ, s, pl).unwrap().fidelity_product).fold(0.0, f64::max);
            let direct = swap_free_best(&circ, s, all);
            let m = map_circuit(&circ, s, PlacementMode::Auto).unwrap();
            c.expect(rel(m.fidelity_product, exhaustive) <= 1e-12, || {
                format!("{name}: mapper {} vs exhaustive {exhaustive}", m.fidelity_product)
            });
            // A triangle never embeds in the grid, so it always routes a SWAP.
            if direct > 0.0 {
                c.expect(rel(exhaustive, direct) <= 1e-12, || format!("{name}: exhaustive {exhaustive} vs swap-free {direct}"));
            } else {
                c.expect(m.swaps > 0, || format!("{name}: no swap-free placement yet no SWAP routed"));
            }
            let mut prepared = Circuit::new(circ.width, 1);
            for q in 0..circ.width {
                prepared.push(Gate::Prx { qubit: q, theta: 0.7 + q as f64, phi: 0.3 * q as f64 });
            }
            prepared.gates.extend(circ.gates.iter().copied());
            let pm = route_with(&prepared, s, &m.initial).unwrap();
            c.expect(mapping_fidelity(&prepared, &pm) > 1.0 - 1e-9, || format!("{name}: routed state differs"));
            compared += 1;
        }
    }
    for i in 0..200 {
        let circ = random_small_circuit(&mut rng);
        let s = &snaps[i % snaps.len()];
        for mode in [PlacementMode::Auto, PlacementMode::Identity] {
            let m = map_circuit(&circ, s, mode).unwrap();
            let f = mapping_fidelity(&circ, &m);
            c.expect(f > 1.0 - 1e-9, || format!("random circuit {i} ({mode:?}): overlap {f}"));
            let topo = s.topology();
            let on_couplers = m.circuit.gates.iter().all(|g| match *g {
                Gate::Cz { a, b } => topo.adjacent(a, b),
                _ => true,
            });
            c.expect(on_couplers, || format!("random circuit {i} ({mode:?}): CZ off the coupler map"));
        }
    }
    c.note(format!("{compared} pattern/snapshot pairs, 200 random circuits"));
}

// 8

fn within_3_sigma(count: u64, n: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
    ((count as f64 / n as f64) - p).abs() <= 3.0 * sigma
}

fn stat_twin(f: f64) -> QpuTwin {
    let mut cfg = TwinConfig::default();
    cfg.nominal = Nominal { f1q: f, f_ro: f, f_cz: f };
    cfg.drift.floor_offset = 0.0;
    QpuTwin::new(cfg).unwrap()
}

type M2 = [[Complex64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                o[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    o
}

fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// P(read 1) after PRX(θ, φ), depolarizing with Pauli probability `p` and
/// a readout flip with probability `r`, from the density matrix.
fn density_p1(theta: f64, phi: f64, p: f64, r: f64) -> f64 {
    let z0 = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let u: M2 =
        [[Complex64::new(cs, 0.0), -i * Complex64::from_polar(sn, -phi)], [-i * Complex64::from_polar(sn, phi), Complex64::new(cs, 0.0)]];
    let rho = mul(&mul(&u, &[[one, z0], [z0, z0]]), &dagger(&u));
    let paulis: [M2; 3] = [[[z0, one], [one, z0]], [[z0, -i], [i, z0]], [[one, z0], [z0, -one]]];
    let mut p1 = (1.0 - p) * rho[1][1].re;
    for m in &paulis {
        p1 += p / 3.0 * mul(&mul(m, &rho), &dagger(m))[1][1].re;
    }
    p1 * (1.0 - r) + (1.0 - p1) * r
}

fn twin_statistics(c: &mut Checks) {
    let t = stat_twin(1.0);
    let chain: Vec<usize> = t.topology().snake().into_iter().take(5).collect();
    let r = t.execute(&ghz_circuit(&chain, 20, 10_000), OutputFormat::Histogram, &mut RngStream::new(1, "ghz")).unwrap();
    let h = r.histogram().unwrap();
    c.expect(h.len() == 2 && h.contains_key("00000") && h.contains_key("11111"), || format!("GHZ outcomes {h:?}"));
    for key in ["00000", "11111"] {
        let k = h.get(key).copied().unwrap_or(0);
        c.expect(within_3_sigma(k, 10_000, 0.5), || format!("GHZ {key}: {k} of 10000"));
    }

    let n = 40_000u32;
    for (k, (theta, phi, f1q, fro)) in
        [(0.0, 0.0, 0.9, 1.0), (1.1, 0.3, 0.85, 1.0), (PI, 0.0, 1.0, 0.9), (2.0, 1.0, 1.0, 0.93), (0.7, -0.5, 0.9, 0.95)]
            .into_iter()
            .enumerate()
    {
        let mut t = stat_twin(0.99);
        let mut m = t.calibration().values.clone();
        m.f1q[0] = f1q;
        m.f_ro[0] = fro;
        t.set_calibration(m).unwrap();
        let circ = Circuit::new(1, n).with_gates([Gate::Prx { qubit: 0, theta, phi }, Gate::Measure { qubit: 0 }]);
        let r = t.execute(&circ, OutputFormat::Histogram, &mut RngStream::new(k as u64, "dm")).unwrap();
        let ones = r.histogram().unwrap().get("1").copied().unwrap_or(0);
        let want = density_p1(theta, phi, 1.0 - f1q, 1.0 - fro);
        c.expect(within_3_sigma(ones, n as u64, want), || format!("case {k}: {} vs {want}", ones as f64 / n as f64));
    }

    for (prep_one, fro) in [(false, 0.93), (true, 0.97), (true, 0.85)] {
        let mut t = stat_twin(1.0);
        let mut m = t.calibration().values.clone();
        m.f_ro[3] = fro;
        t.set_calibration(m).unwrap();
        let mut circ = Circuit::new(4, 20_000);
        if prep_one {
            circ.push(Gate::Prx { qubit: 3, theta: PI, phi: 0.0 });
        }
        circ.push(Gate::Measure { qubit: 3 });
        let r = t.execute(&circ, OutputFormat::RawIq, &mut RngStream::new(9, "iq")).unwrap();
        let ResultData::RawIq(iq) = &r.data else { panic!("expected IQ data") };
        let correct = iq.iter().filter(|shot| (shot[0].0 > 0.0) == prep_one).count() as u64;
        c.expect(within_3_sigma(correct, 20_000, fro), || format!("IQ f_ro {fro}: {}", correct as f64 / 20_000.0));
    }
    c.note("GHZ, 5 density-matrix cases, 3 IQ cases");
}

// 9

fn scheduler_invariants(c: &mut Checks) {
    for seed in 0..50u64 {
        let cfg = random_scenario(1000 + seed);
        let mut sim = Simulation::new(cfg).unwrap();
        sim.run().unwrap();
        c.expect(find_overlap(sim.occupancy()).is_none(), || format!("seed {seed}: overlap {:?}", find_overlap(sim.occupancy())));
        let counts = sim.scheduler().counts();
        c.expect(counts.conserved(), || format!("seed {seed}: {counts:?}"));
        let m = sim.metrics();
        c.expect(
            counts.submitted == counts.done + counts.failed + counts.cancelled + counts.queued,
            || format!("seed {seed}: identity {counts:?}"),
        );
        c.expect((0.0..=1.0).contains(&m.availability), || format!("seed {seed}: availability {}", m.availability));
    }

    let mut cfg = ScenarioConfig::new(365.0 * DAY, 9);
    cfg.jobs = trace(365.0, 12.0 * HOUR);
    cfg.telemetry_interval_s = 6.0 * HOUR;
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    let maint: Vec<f64> = sim
        .occupancy()
        .iter()
        .filter(|o| matches!(o.activity, Activity::Maintenance))
        .map(|o| o.start.secs() / DAY)
        .collect();
    c.expect(maint.len() == 2, || format!("365-day run has {} maintenance windows: {maint:?}", maint.len()));
    c.expect(find_overlap(sim.occupancy()).is_none(), || "365-day run overlaps".into());
    c.note(format!("50 scenarios; maintenance on days {maint:?}"));
}

// 10

fn reference_scenario() -> ScenarioConfig {
    let mut cfg = random_scenario(42);
    cfg.duration_s = 30.0 * DAY;
    cfg.jobs.extend(trace(30.0, 5.0 * HOUR));
    cfg.faults.push(Fault::new(FaultKind::GridPowerLoss, 20.0 * DAY, 900.0));
    cfg
}

fn log_bytes(cfg: ScenarioConfig) -> Vec<u8> {
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    let mut out = Vec::new();
    write_event_log(&mut out, sim.log()).unwrap();
    out
}

fn determinism(c: &mut Checks) {
    let a = log_bytes(reference_scenario());
    let b = log_bytes(reference_scenario());
    c.expect(!a.is_empty() && a == b, || "reference scenario logs differ".into());
    for seed in [3u64, 77] {
        let x = log_bytes(random_scenario(seed));
        let y = log_bytes(random_scenario(seed));
        c.expect(x == y, || format!("seed {seed}: logs differ"));
    }
    c.note(format!("{} bytes, {} lines", a.len(), a.iter().filter(|&&b| b == b'\n').count()));
}
