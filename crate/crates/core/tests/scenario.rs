// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use qhpc_core::facility::{CryostatMode, Fault, FaultKind};
use qhpc_core::scenario::{ScenarioConfig, Simulation, TraceEntry};
use qhpc_core::scheduler::{find_overlap, Activity, Origin};
use qhpc_core::time::{SimTime, DAY, HOUR};
use qhpc_core::twin::{Circuit, Gate, OutputFormat};

fn bell(shots: u32) -> Circuit {
    Circuit::new(2, shots).with_gates([Gate::ry(0, core::f64::consts::FRAC_PI_2), Gate::Cz { a: 0, b: 1 }]).measure_all()
}

fn trace(days: f64, every_s: f64) -> Vec<TraceEntry> {
    let n = (days * DAY / every_s) as usize;
    (0..n)
        .map(|i| TraceEntry {
            arrival: SimTime::from_secs(i as f64 * every_s + 17.0),
            origin: Origin::Remote,
            circuit: bell(2000),
            format: OutputFormat::Histogram,
            priority: 0,
        })
        .collect()
}

#[test]
fn quiet_week_runs_jobs_and_calibrates() {
    let mut cfg = ScenarioConfig::new(7.0 * DAY, 11);
    cfg.jobs = trace(7.0, 3.0 * HOUR);
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    let m = sim.metrics();
    assert_eq!(m.submitted, 56);
    assert_eq!(m.completed, 56);
    assert!(m.availability > 0.8 && m.availability < 1.0, "{m:?}");
    assert!(find_overlap(sim.occupancy()).is_none());
    let cals = sim.occupancy().iter().filter(|o| matches!(o.activity, Activity::Calibration { .. })).count();
    assert!(cals >= 7, "{cals}");
    assert_eq!(sim.manual_interventions(), 0);
    assert_eq!(sim.results().len(), 56);
}

#[test]
fn long_outage_goes_through_cooldown() {
    let mut cfg = ScenarioConfig::new(10.0 * DAY, 3);
    cfg.jobs = trace(10.0, 6.0 * HOUR);
    cfg.faults = vec![Fault::new(FaultKind::PumpFailure, DAY, 600.0)];
    let mut sim = Simulation::new(cfg).unwrap();
    sim.run().unwrap();
    let modes: Vec<_> = sim.transitions().iter().map(|t| t.to).collect();
    assert!(modes.contains(&CryostatMode::Cooldown), "{modes:?}");
    assert_eq!(*modes.last().unwrap(), CryostatMode::Operating);
    assert_eq!(sim.manual_interventions(), 1);
    let c = sim.scheduler().counts();
    assert!(c.conserved());
}

#[test]
fn same_seed_same_log() {
    let mk = || {
        let mut cfg = ScenarioConfig::new(3.0 * DAY, 5);
        cfg.jobs = trace(3.0, 2.0 * HOUR);
        cfg.faults = vec![Fault::new(FaultKind::GridPowerLoss, 30.0 * HOUR, 900.0)];
        let mut sim = Simulation::new(cfg).unwrap();
        sim.run().unwrap();
        format!("{:?}", sim.log())
    };
    assert_eq!(mk(), mk());
}
