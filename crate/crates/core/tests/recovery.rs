// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use qhpc_core::facility::{
    cooldown_duration, recovery_advance, thermal_step, warm_time_to, CryostatMode, CryostatState, RecoveryEvent,
    BASE_TEMP_K, MAX_COOLDOWN_S, MIN_COOLDOWN_S,
};
use qhpc_core::time::SimTime;
use qhpc_core::twin::CalibrationKind;

const EVENTS: [RecoveryEvent; 9] = [
    RecoveryEvent::CoolingLost,
    RecoveryEvent::ThresholdCrossed,
    RecoveryEvent::FaultCleared,
    RecoveryEvent::VacuumBreach,
    RecoveryEvent::VacuumRestored,
    RecoveryEvent::RepairComplete,
    RecoveryEvent::CooldownComplete,
    RecoveryEvent::RecalComplete,
    RecoveryEvent::BenchmarkComplete,
];

type Key = (CryostatMode, bool, bool, u8);

fn key(s: &CryostatState) -> Key {
    let recal = match s.recal {
        CalibrationKind::None => 0,
        CalibrationKind::Quick => 1,
        CalibrationKind::Full => 2,
    };
    (s.mode, s.vacuum_intact, s.peak_temp_during_fault >= 1.0, recal)
}

/// Successors under every event, with the stage either still cold or well
/// above the warm threshold when the event arrives.
fn successors(s: &CryostatState) -> Vec<CryostatState> {
    let mut out = Vec::new();
    for temp in [0.5, 5.0] {
        for e in EVENTS {
            let mut pre = s.clone();
            pre.observe_temp(temp);
            if let Ok(next) = recovery_advance(&pre, e, SimTime::ZERO) {
                out.push(next);
            }
        }
    }
    out
}

fn reachable() -> Vec<CryostatState> {
    let start = CryostatState::operating(SimTime::ZERO);
    let mut seen = BTreeSet::from([key(&start)]);
    let mut states = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for n in successors(&s) {
            if seen.insert(key(&n)) {
                states.push(n.clone());
                queue.push_back(n);
            }
        }
    }
    states
}

#[test]
fn every_reachable_state_can_return_to_operating() {
    let states = reachable();
    assert!(states.len() > 7);
    let modes: BTreeSet<_> = states.iter().map(|s| s.mode.as_str()).collect();
    assert_eq!(modes.len(), CryostatMode::ALL.len());
    for s in states {
        let mut seen = BTreeSet::from([key(&s)]);
        let mut queue = VecDeque::from([s.clone()]);
        let mut ok = false;
        while let Some(x) = queue.pop_front() {
            if x.mode == CryostatMode::Operating {
                ok = true;
                break;
            }
            for n in successors(&x) {
                if seen.insert(key(&n)) {
                    queue.push_back(n);
                }
            }
        }
        assert!(ok, "stuck from {:?}", key(&s));
    }
}

#[test]
fn full_path_order_after_warm_up() {
    let mut s = CryostatState::operating(SimTime::ZERO);
    let t = SimTime::ZERO;
    let path = [
        (RecoveryEvent::CoolingLost, CryostatMode::CoolingFault),
        (RecoveryEvent::ThresholdCrossed, CryostatMode::WarmedUp),
        (RecoveryEvent::FaultCleared, CryostatMode::Repair),
        (RecoveryEvent::RepairComplete, CryostatMode::Cooldown),
        (RecoveryEvent::CooldownComplete, CryostatMode::Recalibration),
        (RecoveryEvent::RecalComplete, CryostatMode::Benchmarking),
        (RecoveryEvent::BenchmarkComplete, CryostatMode::Operating),
    ];
    for (e, want) in path {
        if e == RecoveryEvent::ThresholdCrossed {
            s.observe_temp(1.2);
        }
        s = recovery_advance(&s, e, t).unwrap();
        assert_eq!(s.mode, want, "after {e:?}");
        if want == CryostatMode::Recalibration {
            assert_eq!(s.recal, CalibrationKind::Full);
        }
    }
}

#[test]
fn short_fault_skips_cooldown() {
    let s = CryostatState::operating(SimTime::ZERO);
    let mut s = recovery_advance(&s, RecoveryEvent::CoolingLost, SimTime::ZERO).unwrap();
    s.observe_temp(thermal_step(BASE_TEMP_K, 60.0, false, 60.0));
    let s = recovery_advance(&s, RecoveryEvent::FaultCleared, SimTime::from_secs(60.0)).unwrap();
    assert_eq!((s.mode, s.recal), (CryostatMode::Recalibration, CalibrationKind::Quick));
    let s = recovery_advance(&s, RecoveryEvent::RecalComplete, SimTime::from_secs(3000.0)).unwrap();
    assert_eq!(s.mode, CryostatMode::Operating);
}

#[test]
fn warm_threshold_reached_at_two_minutes() {
    assert!((thermal_step(BASE_TEMP_K, 120.0, false, 60.0) - 1.0).abs() < 1e-6);
    assert!((warm_time_to(BASE_TEMP_K, 1.0).unwrap() - 120.0).abs() < 1e-6);
}

#[test]
fn breach_repair_waits_for_vacuum() {
    let s = CryostatState::operating(SimTime::ZERO);
    let s = recovery_advance(&s, RecoveryEvent::VacuumBreach, SimTime::ZERO).unwrap();
    assert_eq!(s.mode, CryostatMode::Repair);
    assert!(s.vendor_flag);
    assert!(recovery_advance(&s, RecoveryEvent::RepairComplete, SimTime::ZERO).is_err());
    let s = recovery_advance(&s, RecoveryEvent::VacuumRestored, SimTime::ZERO).unwrap();
    assert!(recovery_advance(&s, RecoveryEvent::RepairComplete, SimTime::ZERO).is_ok());
}

proptest! {
    #[test]
    fn cooldown_within_bounds_and_monotone(a in 1.0001..295.0f64, b in 1.0001..295.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (dl, dh) = (cooldown_duration(lo).unwrap(), cooldown_duration(hi).unwrap());
        prop_assert!((MIN_COOLDOWN_S..=MAX_COOLDOWN_S).contains(&dl));
        prop_assert!((MIN_COOLDOWN_S..=MAX_COOLDOWN_S).contains(&dh));
        prop_assert!(dl <= dh);
    }

    #[test]
    fn warming_is_monotone_and_bounded(t0 in 0.0..1e5f64, dt in 0.0..1e5f64) {
        let a = thermal_step(BASE_TEMP_K, t0, false, 60.0);
        let b = thermal_step(BASE_TEMP_K, t0 + dt, false, 60.0);
        prop_assert!(a <= b + 1e-12);
        prop_assert!(b <= 295.0);
        let c = thermal_step(b, dt, true, 60.0);
        prop_assert!(c <= b + 1e-12 && c >= BASE_TEMP_K - 1e-12);
    }

    #[test]
    fn random_event_sequences_never_leave_the_mode_set(seq in prop::collection::vec((0..9usize, 0.0..10.0f64), 0..40)) {
        let mut s = CryostatState::operating(SimTime::ZERO);
        for (e, temp) in seq {
            s.observe_temp(temp);
            if let Ok(n) = recovery_advance(&s, EVENTS[e], SimTime::ZERO) {
                if n.mode == CryostatMode::Cooldown {
                    prop_assert!(s.peak_temp_during_fault >= 1.0);
                }
                s = n;
            }
            prop_assert!(CryostatMode::ALL.contains(&s.mode));
        }
    }
}
