// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Synthetic survey recordings and scenario builders shared by the
//! integration tests.

#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use qhpc::survey_io::channel_to_csv;
use qhpc_core::facility::{Fault, FaultKind};
use qhpc_core::scenario::{ScenarioConfig, TraceEntry};
use qhpc_core::scheduler::{OperatorWindow, Origin, SessionRequest};
use qhpc_core::survey::{a_weighting_db, Axis, ChannelKind, Siting, SurveyChannel, Unit};
use qhpc_core::time::{SimTime, DAY, HOUR};
use qhpc_core::twin::{CalibrationKind, Circuit, Gate, OutputFormat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CLIMATE_RECORD_S: f64 = 26.0 * HOUR;
pub const CLIMATE_RATE_HZ: f64 = 1.0 / 60.0;

/// `offset + amp·sin(2πft)` sampled at `fs` for `secs` seconds.
pub fn tone(kind: ChannelKind, axis: Axis, unit: Unit, fs: f64, secs: f64, f: f64, amp: f64, offset: f64) -> SurveyChannel {
    let n = (fs * secs).round() as usize;
    SurveyChannel::from_values(kind, axis, unit, fs, (0..n).map(|i| offset + amp * (2.0 * PI * f * i as f64 / fs).sin()))
        .unwrap()
}

pub fn dc(axis: Axis, value: f64) -> SurveyChannel {
    SurveyChannel::from_values(ChannelKind::DcMagneticAxis, axis, Unit::MicroTesla, 1.0, vec![value; 60]).unwrap()
}

/// 50 Hz mains pickup with the given peak-to-peak value.
pub fn ac(axis: Axis, pp: f64) -> SurveyChannel {
    tone(ChannelKind::AcMagneticAxis, axis, Unit::MicroTesla, 2048.0, 2.0, 50.0, pp / 2.0, 0.0)
}

/// 10 Hz floor vibration with the given RMS.
pub fn vibration(rms: f64) -> SurveyChannel {
    tone(ChannelKind::Vibration, Axis::Z, Unit::MicroMetrePerSecond, 512.0, 10.0, 10.0, rms * SQRT_2, 0.0)
}

/// 1 kHz tone whose A-weighted level is `dba`.
pub fn sound(dba: f64) -> SurveyChannel {
    let amp = sound_amplitude(dba, 1000.0);
    tone(ChannelKind::SoundPressure, Axis::None, Unit::Pascal, 48_000.0, 0.5, 1000.0, amp, 0.0)
}

pub fn sound_amplitude(dba: f64, f: f64) -> f64 {
    let weight = 10f64.powf(a_weighting_db(f) / 10.0);
    SQRT_2 * 20e-6 * 10f64.powf(dba / 20.0) / weight.sqrt()
}

/// 26 hours at one sample per minute.
pub fn climate(kind: ChannelKind, unit: Unit, value: impl Fn(usize) -> f64) -> SurveyChannel {
    let n = (CLIMATE_RECORD_S * CLIMATE_RATE_HZ) as usize + 1;
    SurveyChannel::from_values(kind, Axis::None, unit, CLIMATE_RATE_HZ, (0..n).map(value)).unwrap()
}

pub fn temperature_const(c: f64) -> SurveyChannel {
    climate(ChannelKind::Temperature, Unit::Celsius, |_| c)
}

/// Constant 22 °C with one sample raised by `spike`.
pub fn temperature_spike(spike: f64) -> SurveyChannel {
    climate(ChannelKind::Temperature, Unit::Celsius, |i| if i == 600 { 22.0 + spike } else { 22.0 })
}

pub fn humidity_const(rh: f64) -> SurveyChannel {
    climate(ChannelKind::Humidity, Unit::PercentRh, |_| rh)
}

pub fn passing_channels() -> Vec<SurveyChannel> {
    vec![
        dc(Axis::X, 30.0),
        dc(Axis::Y, 40.0),
        dc(Axis::Z, 50.0),
        ac(Axis::X, 0.3),
        ac(Axis::Y, 0.2),
        ac(Axis::Z, 0.4),
        vibration(100.0),
        sound(60.0),
        temperature_const(22.0),
        humidity_const(45.0),
    ]
}

pub fn passing_siting() -> Siting {
    Siting {
        path_width_cm: 120.0,
        floor_capacity_kg_per_m2: 1500.0,
        distance_to_transmitter_m: 300.0,
        distance_to_fluorescent_m: 5.0,
        non_condensing_attested: true,
    }
}

/// Writes one CSV per channel plus `siting.json`; returns the siting path.
pub fn write_survey(dir: &Path, channels: &[SurveyChannel], siting: &Siting) -> std::path::PathBuf {
    for (i, ch) in channels.iter().enumerate() {
        let name = format!("{i:02}_{}_{}.csv", ch.kind(), ch.axis().as_str().replace('-', "n"));
        std::fs::write(dir.join(name), channel_to_csv(ch)).unwrap();
    }
    let siting_path = dir.join("siting.json");
    std::fs::write(&siting_path, serde_json::to_string(siting).unwrap()).unwrap();
    siting_path
}

pub fn bell(shots: u32) -> Circuit {
    Circuit::new(2, shots).with_gates([Gate::ry(0, std::f64::consts::FRAC_PI_2), Gate::Cz { a: 0, b: 1 }]).measure_all()
}

/// Remote Bell jobs every `every_s` seconds.
pub fn trace(days: f64, every_s: f64) -> Vec<TraceEntry> {
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

pub fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let w = rng.random_range(1..=6);
    let mut c = Circuit::new(w, rng.random_range(100..3000));
    for _ in 0..rng.random_range(0..12) {
        let a = rng.random_range(0..w);
        if w > 1 && rng.random_bool(0.4) {
            let b = (a + rng.random_range(1..w)) % w;
            c.push(Gate::Cz { a, b });
        } else {
            c.push(Gate::Prx { qubit: a, theta: rng.random_range(-3.0..3.0), phi: rng.random_range(-3.0..3.0) });
        }
    }
    c.measure_all()
}

/// Jobs, sessions, faults and policy drawn from `seed`.
pub fn random_scenario(seed: u64) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let days = rng.random_range(3.0..15.0);
    let mut cfg = ScenarioConfig::new(days * DAY, seed);
    cfg.telemetry_interval_s = 2.0 * HOUR;
    cfg.facility.redundant_cooling = rng.random_bool(0.5);
    cfg.facility.ups_runtime_s = rng.random_range(0.0..1200.0);
    cfg.policy.period_s = if rng.random_bool(0.8) { Some(rng.random_range(6.0..48.0) * HOUR) } else { None };
    if rng.random_bool(0.5) {
        let t = rng.random_range(0.0..days * DAY);
        cfg.policy.operator_windows.push(OperatorWindow { time: SimTime::from_secs(t), kind: CalibrationKind::Quick });
    }
    for _ in 0..rng.random_range(0..120) {
        let origin = if rng.random_bool(0.8) { Origin::Remote } else { Origin::Hpc };
        let circuit = random_circuit(&mut rng);
        let format = [OutputFormat::Histogram, OutputFormat::RawBitstrings, OutputFormat::RawIq][rng.random_range(0..3)];
        cfg.jobs.push(TraceEntry {
            arrival: SimTime::from_secs(rng.random_range(0.0..days * DAY)),
            origin,
            circuit,
            format,
            priority: rng.random_range(0..3),
        });
    }
    if rng.random_bool(0.5) {
        cfg.sessions.push(SessionRequest {
            start: SimTime::from_secs(rng.random_range(0.0..days * DAY)),
            max_duration_s: rng.random_range(60.0..4.0 * HOUR),
            iterations: rng.random_range(1..50),
            classical_s: rng.random_range(0.0..30.0),
            circuit: random_circuit(&mut rng),
            format: OutputFormat::Histogram,
        });
    }
    let kinds = [FaultKind::GridPowerLoss, FaultKind::CoolingWaterOvertemp, FaultKind::PumpFailure, FaultKind::VacuumBreach];
    let mut last_end = [0.0f64; 4];
    for _ in 0..rng.random_range(0..3) {
        let k = rng.random_range(0..4);
        let start = rng.random_range(0.0..days * DAY).max(last_end[k] + 1.0);
        let dur = rng.random_range(10.0..3600.0);
        last_end[k] = start + dur;
        cfg.faults.push(Fault::new(kinds[k], start, dur));
    }
    cfg
}

/// A one-day scenario with a handful of Bell jobs, as JSON.
pub fn small_scenario_json(seed: u64) -> String {
    let mut cfg = ScenarioConfig::new(DAY, seed);
    cfg.jobs = trace(1.0, 4.0 * HOUR);
    cfg.jobs[1].format = OutputFormat::RawIq;
    cfg.jobs[1].circuit.shots = 50;
    serde_json::to_string_pretty(&cfg).unwrap()
}
