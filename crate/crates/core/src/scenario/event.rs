// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use crate::facility::{Fault, FaultKind, RecoveryEvent, Transition};
use crate::scheduler::{CalWindow, JobId, JobRequest, MaintWindow, SessionRequest, MAINTENANCE_TASKS};
use crate::sim::Payload;
use crate::telemetry::Alarm;

/// Scenario event payloads.
#[derive(Clone, Debug)]
pub enum Ev {
    Arrival(JobId, Box<JobRequest>),
    SessionOpen(Box<SessionRequest>),
    CalDue(CalWindow),
    CalEnd,
    MaintDue(MaintWindow),
    MaintEnd,
    FaultStart(Fault),
    FaultEnd(Fault),
    CoolingLost(FaultKind),
    CoolingRestored,
    PumpShutdown,
    Threshold,
    Recovery(RecoveryEvent),
    Transition(Transition),
    JobEnd(JobId),
    BenchmarkDue,
    BenchmarkEnd,
    Alarm(Alarm),
    Ln2Refill(u64),
    Sample,
    Wake,
}

impl Payload for Ev {
    fn summary(&self) -> String {
        match self {
            Ev::Arrival(id, r) => format!(
                "arrival {id} origin={} width={} shots={} priority={}",
                r.origin.as_str(),
                r.circuit.width,
                r.circuit.shots,
                r.priority
            ),
            Ev::SessionOpen(s) => {
                format!("session_request iterations={} window_s={}", s.iterations, s.max_duration_s)
            }
            Ev::CalDue(w) => format!("calibration_due kind={:?} source={:?}", w.kind, w.source).to_lowercase(),
            Ev::CalEnd => "calibration_end".into(),
            Ev::MaintDue(w) => format!("maintenance_due duration_s={} tasks={}", w.duration, MAINTENANCE_TASKS.join(",")),
            Ev::MaintEnd => "maintenance_end".into(),
            Ev::FaultStart(f) => format!("fault_start {} duration_s={}", f.kind, f.duration),
            Ev::FaultEnd(f) => format!("fault_end {}", f.kind),
            Ev::CoolingLost(k) => format!("cooling_lost cause={k}"),
            Ev::CoolingRestored => "cooling_restored".into(),
            Ev::PumpShutdown => "pump_shutdown".into(),
            Ev::Threshold => "qpu_temp_threshold".into(),
            Ev::Recovery(e) => format!("recovery {e}"),
            Ev::Transition(t) => format!("cryostat {} -> {} ({})", t.from, t.to, t.event),
            Ev::JobEnd(id) => format!("job_end {id}"),
            Ev::BenchmarkDue => "benchmark_due".into(),
            Ev::BenchmarkEnd => "benchmark_end".into(),
            Ev::Alarm(a) => format!("alarm {} key={} value={}", a.label, a.key, a.value),
            Ev::Ln2Refill(n) => format!("ln2_refill n={n}"),
            Ev::Sample => "telemetry_sample".into(),
            Ev::Wake => "wake".into(),
        }
    }
}
