// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::event::Ev;
use super::ScenarioError;
use crate::facility::{
    cooldown_duration, cooling_outages, power_draw, recovery_advance, thermal_step, warm_time_to, CryostatMode,
    CryostatState, FaultKind, Ln2Counter, RecoveryEvent, Supply, Transition, BASE_TEMP_K, MIN_COOLDOWN_S,
    WARM_THRESHOLD_K,
};
use crate::rng::RngStream;
use crate::scheduler::{
    calibration_duration, compute_metrics, map_circuit, plan_calibration, plan_maintenance, Activity, CalWindow,
    JobId, JobRequest, MaintWindow, Occupancy, OpsMetrics, Scheduler, WindowSource,
};
use crate::sim::{Engine, EventId, EventKind, EventQueue, Handler, HandlerFault, LogEntry};
use crate::telemetry::{
    device_snapshot, keys, mirror_calibration, Alarm, Predicate, Rearm, TelemetryStore, WatchId,
    ALARM_AMBIENT_DRIFT, ALARM_RECALIBRATION_NEEDED,
};
use crate::time::{SimTime, HOUR};
use crate::twin::{ghz_circuit, ghz_probability, CalibrationKind, JobResult, MetricFamily, MetricSet, OutputFormat, QpuTwin};

/// One point of the fidelity time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub time_s: f64,
    pub family: &'static str,
    /// Qubit index, or `a-b` for a coupler.
    pub element: String,
    pub value: f64,
}

/// Stage temperature law currently in force.
#[derive(Clone, Copy, Debug)]
enum Thermal {
    Base,
    Warming { since: SimTime, from: f64 },
    Recooling { since: SimTime, from: f64 },
    Holding(f64),
    Ramp { since: SimTime, from: f64, until: SimTime },
}

impl Thermal {
    fn at(&self, now: SimTime, recool_tau: f64) -> f64 {
        match *self {
            Thermal::Base => BASE_TEMP_K,
            Thermal::Warming { since, from } => thermal_step(from, now.since(since), false, recool_tau),
            Thermal::Recooling { since, from } => thermal_step(from, now.since(since), true, recool_tau),
            Thermal::Holding(t) => t,
            Thermal::Ramp { since, from, until } => {
                let span = until.since(since);
                let f = if span > 0.0 { (now.since(since) / span).min(1.0) } else { 1.0 };
                from + (BASE_TEMP_K - from) * f
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Busy {
    activity: Activity,
    start: SimTime,
    end_event: EventId,
    result: Option<JobResult>,
}

fn fault(e: impl core::fmt::Display) -> HandlerFault {
    HandlerFault(e.to_string())
}

struct World {
    cfg: ScenarioConfig,
    horizon: SimTime,
    twin: QpuTwin,
    sched: Scheduler,
    store: TelemetryStore,
    cryo: CryostatState,
    thermal: Thermal,
    ln2: Ln2Counter,
    ln2_mark: SimTime,
    rng_exec: RngStream,
    rng_bench: RngStream,
    busy: Option<Busy>,
    pending_cal: Vec<CalWindow>,
    maint_pending: Option<MaintWindow>,
    benchmark_due: bool,
    /// Start and length of every planned window, in time order.
    calendar: Vec<(SimTime, f64)>,
    cal_consumed: usize,
    /// Longest stretch between planned windows; longer jobs may delay one.
    max_free_gap: f64,
    outage_active: bool,
    grid_down_since: Option<SimTime>,
    recovery_ev: Option<EventId>,
    threshold_ev: Option<EventId>,
    wake_at: Option<SimTime>,
    recovery_bench: Option<JobResult>,
    recal_watch: WatchId,
    modes: Vec<(SimTime, CryostatMode)>,
    transitions: Vec<Transition>,
    occupancy: Vec<Occupancy>,
    results: BTreeMap<JobId, JobResult>,
    min_fid: MetricSet,
    manual_interventions: u32,
    alarms: Vec<Alarm>,
    benchmarks: Vec<(SimTime, f64)>,
    sessions_closed: Vec<crate::scheduler::Session>,
    notes: Vec<(SimTime, String)>,
}

/// A scenario wired to its event engine.
pub struct Simulation {
    engine: Engine<Ev>,
    world: World,
    finished: bool,
}

impl Simulation {
    pub fn new(mut cfg: ScenarioConfig) -> Result<Self, ScenarioError> {
        cfg.validate()?;
        cfg.twin.seed = cfg.seed;
        let twin = QpuTwin::new(cfg.twin.clone()).map_err(|e| ScenarioError::Config(format!("twin: {e}")))?;
        let horizon = SimTime::from_secs(cfg.duration_s);
        let mut store = TelemetryStore::new();
        let bad_watch = |e| ScenarioError::Config(format!("telemetry: {e}"));
        store
            .watch(keys::ROOM_TEMP_C, Predicate::SpanExceeds(1.0), 24.0 * HOUR, ALARM_AMBIENT_DRIFT, Rearm::Auto)
            .map_err(bad_watch)?;
        let recal_watch = store
            .watch(
                keys::GHZ_FIDELITY,
                Predicate::Below(cfg.policy.benchmark_threshold),
                1.0,
                ALARM_RECALIBRATION_NEEDED,
                Rearm::Manual,
            )
            .map_err(bad_watch)?;

        let mut engine: Engine<Ev> = Engine::new();
        let q = engine.queue_mut();
        let windows = plan_calibration(&cfg.policy, cfg.duration_s, &[]);
        let maint = plan_maintenance(&cfg.maintenance, cfg.duration_s);
        let plan = cfg.fault_plan()?;

        let mut calendar: Vec<(SimTime, f64)> = windows
            .iter()
            .map(|w| (w.start, w.duration()))
            .chain(maint.iter().map(|m| (m.start, m.duration)))
            .collect();
        calendar.sort_by(|a, b| a.0.cmp(&b.0));
        let mut max_free_gap: f64 = 0.0;
        let mut free_from = 0.0_f64;
        for &(s, d) in &calendar {
            max_free_gap = max_free_gap.max(s.secs() - free_from);
            free_from = free_from.max(s.secs() + d);
        }
        max_free_gap = max_free_gap.max(cfg.duration_s - free_from);

        let mut sched = Scheduler::new();
        let mut arrivals: Vec<(SimTime, JobId, JobRequest)> = Vec::new();
        for entry in &cfg.jobs {
            arrivals.push((entry.arrival, sched.reserve_id(), entry.request()));
        }
        arrivals.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let within = |t: SimTime| t <= horizon;
        for (t, id, req) in arrivals.into_iter().filter(|a| within(a.0)) {
            q.schedule(t, EventKind::JobArrival, Ev::Arrival(id, Box::new(req)))?;
        }
        for s in cfg.sessions.iter().filter(|s| within(s.start)) {
            q.schedule(s.start, EventKind::JobArrival, Ev::SessionOpen(Box::new(s.clone())))?;
        }
        for w in windows {
            q.schedule(w.start, EventKind::CalibrationStart, Ev::CalDue(w))?;
        }
        for m in maint {
            q.schedule(m.start, EventKind::Maintenance, Ev::MaintDue(m))?;
        }
        for f in plan.faults().iter().filter(|f| within(f.start)) {
            q.schedule(f.start, EventKind::FaultStart, Ev::FaultStart(*f))?;
            if within(f.end()) {
                q.schedule(f.end(), EventKind::FaultEnd, Ev::FaultEnd(*f))?;
            }
        }
        for o in cooling_outages(&plan, &cfg.facility).into_iter().filter(|o| within(o.start)) {
            q.schedule(o.start, EventKind::FaultStart, Ev::CoolingLost(o.cause))?;
            if within(o.end) {
                q.schedule(o.end, EventKind::FaultEnd, Ev::CoolingRestored)?;
            }
        }
        q.schedule(SimTime::ZERO, EventKind::TelemetrySample, Ev::Sample)?;
        if let Some(dt) = cfg.policy.benchmark_interval_s {
            if dt <= cfg.duration_s {
                q.schedule(SimTime::from_secs(dt), EventKind::StateTransition, Ev::BenchmarkDue)?;
            }
        }

        let min_fid = twin.calibration().values.clone();
        let world = World {
            horizon,
            rng_exec: RngStream::new(cfg.seed, "scenario/execute"),
            rng_bench: RngStream::new(cfg.seed, "scenario/benchmark"),
            ln2: Ln2Counter::new(&cfg.facility),
            ln2_mark: SimTime::ZERO,
            twin,
            sched,
            store,
            cryo: CryostatState::operating(SimTime::ZERO),
            thermal: Thermal::Base,
            busy: None,
            pending_cal: Vec::new(),
            maint_pending: None,
            benchmark_due: false,
            calendar,
            cal_consumed: 0,
            max_free_gap,
            outage_active: false,
            grid_down_since: None,
            recovery_ev: None,
            threshold_ev: None,
            wake_at: None,
            recovery_bench: None,
            recal_watch,
            modes: alloc::vec![(SimTime::ZERO, CryostatMode::Operating)],
            transitions: Vec::new(),
            occupancy: Vec::new(),
            results: BTreeMap::new(),
            min_fid,
            manual_interventions: 0,
            alarms: Vec::new(),
            benchmarks: Vec::new(),
            sessions_closed: Vec::new(),
            notes: Vec::new(),
            cfg,
        };
        Ok(Simulation { engine, world, finished: false })
    }

    /// Runs to the configured duration.
    pub fn run(&mut self) -> Result<(), ScenarioError> {
        let h = self.world.horizon;
        self.run_until(h)?;
        Ok(())
    }

    /// Advances to `t` (clamped to the horizon). Reaching the horizon closes
    /// every open interval.
    pub fn run_until(&mut self, t: SimTime) -> Result<(), ScenarioError> {
        let t = t.min(self.world.horizon);
        if self.finished || t < self.engine.now() {
            return Ok(());
        }
        self.engine.run_until(t, &mut self.world)?;
        if t >= self.world.horizon {
            self.world.finish(t);
            self.finished = true;
        }
        Ok(())
    }

    /// Queues an external submission; the loop accepts it at the current
    /// simulation time on its next step.
    pub fn submit_external(&mut self, req: JobRequest) -> Result<JobId, ScenarioError> {
        let id = self.world.sched.reserve_id();
        let now = self.engine.now();
        self.engine.schedule_event(now, EventKind::JobArrival, Ev::Arrival(id, Box::new(req)))?;
        Ok(id)
    }

    pub fn now(&self) -> SimTime {
        self.engine.now()
    }

    pub fn horizon(&self) -> SimTime {
        self.world.horizon
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.world.cfg
    }

    pub fn log(&self) -> &[LogEntry] {
        self.engine.log()
    }

    pub fn twin(&self) -> &QpuTwin {
        &self.world.twin
    }

    /// Twin with calibration values brought up to the current time.
    pub fn twin_now(&mut self) -> &QpuTwin {
        let now = self.engine.now();
        self.world.twin.advance_to(now);
        &self.world.twin
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.world.sched
    }

    pub fn telemetry(&self) -> &TelemetryStore {
        &self.world.store
    }

    pub fn cryostat(&self) -> &CryostatState {
        &self.world.cryo
    }

    pub fn results(&self) -> &BTreeMap<JobId, JobResult> {
        &self.world.results
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.world.transitions
    }

    pub fn occupancy(&self) -> &[Occupancy] {
        &self.world.occupancy
    }

    pub fn alarms(&self) -> &[Alarm] {
        &self.world.alarms
    }

    pub fn benchmarks(&self) -> &[(SimTime, f64)] {
        &self.world.benchmarks
    }

    pub fn closed_sessions(&self) -> &[crate::scheduler::Session] {
        &self.world.sessions_closed
    }

    /// Entries into manual repair.
    pub fn manual_interventions(&self) -> u32 {
        self.world.manual_interventions
    }

    /// Lowest value each metric reached, including the instant before every
    /// calibration reset.
    pub fn min_fidelity(&self) -> &MetricSet {
        &self.world.min_fid
    }

    pub fn ln2_liters(&self) -> f64 {
        self.world.ln2.liters()
    }

    /// Diagnostics that did not abort the run (rejected sessions and the like).
    pub fn notes(&self) -> &[(SimTime, String)] {
        &self.world.notes
    }

    pub fn metrics(&self) -> OpsMetrics {
        let total = self.engine.now().secs();
        let jobs: Vec<_> = self.world.sched.jobs().collect();
        let mut occ = self.world.occupancy.clone();
        if !self.finished {
            if let Some(b) = &self.world.busy {
                occ.push(Occupancy { start: b.start, end: self.engine.now(), activity: b.activity });
            }
        }
        compute_metrics(total, &self.world.modes, &occ, &jobs, self.world.sched.counts())
    }

    /// Every mirrored calibration sample, time-major.
    pub fn fidelity_rows(&self) -> Vec<FidelityRow> {
        let mut rows = Vec::new();
        for (key, sample) in self.world.store.dump() {
            let Some(rest) = key.as_str().strip_prefix("qpu.fidelity.") else { continue };
            let Some((fam, element)) = rest.split_once('.') else { continue };
            let family = match fam {
                "1q" => MetricFamily::F1q,
                "ro" => MetricFamily::FRo,
                "cz" => MetricFamily::FCz,
                _ => continue,
            };
            rows.push(FidelityRow {
                time_s: sample.time.secs(),
                family: family.as_str(),
                element: element.to_string(),
                value: sample.value,
            });
        }
        let order = |f: &str| ["f1q", "f_ro", "f_cz"].iter().position(|x| *x == f).unwrap_or(3);
        let elem = |e: &str| -> (usize, usize) {
            match e.split_once('-') {
                Some((a, b)) => (a.parse().unwrap_or(0), b.parse().unwrap_or(0)),
                None => (e.parse().unwrap_or(0), 0),
            }
        };
        rows.sort_by(|a, b| {
            a.time_s
                .total_cmp(&b.time_s)
                .then(order(a.family).cmp(&order(b.family)))
                .then(elem(&a.element).cmp(&elem(&b.element)))
        });
        rows
    }
}

type Q = EventQueue<Ev>;

impl World {
    fn temp(&self, now: SimTime) -> f64 {
        self.thermal.at(now, self.cfg.facility.recool_tau_s)
    }

    fn supply(&self, now: SimTime) -> Supply {
        match self.grid_down_since {
            None => Supply::Grid,
            Some(t) if now.since(t) < self.cfg.facility.ups_runtime_s => Supply::Ups,
            Some(_) => Supply::None,
        }
    }

    fn track_min(&mut self) {
        let v = &self.twin.calibration().values;
        self.min_fid = self.min_fid.zip_map(v, f64::min);
    }

    fn twin_at(&mut self, now: SimTime) {
        self.twin.advance_to(now);
        self.track_min();
    }

    fn accrue_ln2(&mut self, q: &mut Q) -> Result<(), HandlerFault> {
        let now = q.now();
        if self.cryo.is_operating() {
            let due = self.ln2.accrue(now.since(self.ln2_mark));
            for _ in 0..due {
                q.schedule(now, EventKind::Maintenance, Ev::Ln2Refill(self.ln2.refills())).map_err(fault)?;
            }
        }
        self.ln2_mark = now;
        Ok(())
    }

    fn note(&mut self, now: SimTime, msg: String) {
        self.notes.push((now, msg));
    }

    fn interrupt(&mut self, q: &mut Q) -> Result<(), HandlerFault> {
        let now = q.now();
        let Some(b) = self.busy.take() else { return Ok(()) };
        q.cancel(b.end_event);
        self.occupancy.push(Occupancy { start: b.start, end: now, activity: b.activity });
        match b.activity {
            Activity::Job { job } => {
                self.sched.requeue_interrupted(job).map_err(fault)?;
                self.note(now, format!("{job} interrupted and requeued"));
            }
            Activity::Calibration { .. } => self.note(now, "calibration aborted".into()),
            Activity::Benchmark => self.benchmark_due = true,
            Activity::Maintenance => self.note(now, "maintenance aborted".into()),
            Activity::Recovery { .. } => {}
        }
        Ok(())
    }

    /// Applies one state-machine event and performs the entry actions of the
    /// new mode.
    fn advance(&mut self, q: &mut Q, event: RecoveryEvent) -> Result<(), HandlerFault> {
        let now = q.now();
        let temp = self.temp(now);
        self.cryo.observe_temp(temp);
        if event == RecoveryEvent::ThresholdCrossed {
            self.cryo.observe_temp(temp.max(WARM_THRESHOLD_K));
        }
        let from = self.cryo.mode;
        if from == CryostatMode::Operating {
            self.accrue_ln2(q)?;
        }
        let next = recovery_advance(&self.cryo, event, now).map_err(fault)?;
        let to = next.mode;
        self.cryo = next;
        if to == from {
            if event == RecoveryEvent::VacuumRestored {
                self.try_schedule_repair(q)?;
            }
            return Ok(());
        }
        if from == CryostatMode::Operating {
            self.interrupt(q)?;
        } else {
            let entered = self.modes.last().map_or(SimTime::ZERO, |m| m.0);
            self.occupancy.push(Occupancy { start: entered, end: now, activity: Activity::Recovery { mode: from } });
        }
        if let Some(id) = self.recovery_ev.take() {
            q.cancel(id);
        }
        if let Some(id) = self.threshold_ev.take() {
            q.cancel(id);
        }
        let tr = Transition { time: now, event, from, to };
        self.transitions.push(tr);
        self.modes.push((now, to));
        q.schedule(now, EventKind::StateTransition, Ev::Transition(tr)).map_err(fault)?;

        match to {
            CryostatMode::CoolingFault => {
                self.thermal = Thermal::Warming { since: now, from: temp };
                let wait = warm_time_to(temp, WARM_THRESHOLD_K).unwrap_or(0.0);
                self.threshold_ev = Some(q.schedule_in(wait, EventKind::StateTransition, Ev::Threshold).map_err(fault)?);
            }
            CryostatMode::WarmedUp => {
                self.twin_at(now);
                self.twin.lose_calibration();
            }
            CryostatMode::Repair => {
                self.manual_interventions += 1;
                self.twin_at(now);
                self.twin.lose_calibration();
                if !self.outage_active && self.cryo.vacuum_intact {
                    self.thermal = Thermal::Holding(temp);
                } else if !matches!(self.thermal, Thermal::Warming { .. }) {
                    self.thermal = Thermal::Warming { since: now, from: temp };
                }
                self.try_schedule_repair(q)?;
            }
            CryostatMode::Cooldown => {
                let peak = self.cryo.peak_temp_during_fault;
                let d = cooldown_duration(peak).unwrap_or(MIN_COOLDOWN_S);
                self.thermal = Thermal::Ramp { since: now, from: temp, until: now + d };
                self.recovery_ev = Some(
                    q.schedule_in(d, EventKind::StateTransition, Ev::Recovery(RecoveryEvent::CooldownComplete))
                        .map_err(fault)?,
                );
            }
            CryostatMode::Recalibration => {
                self.thermal = match self.cryo.recal {
                    CalibrationKind::Quick => Thermal::Recooling { since: now, from: temp },
                    _ => Thermal::Base,
                };
                let d = calibration_duration(self.cryo.recal);
                self.recovery_ev = Some(
                    q.schedule_in(d, EventKind::CalibrationStart, Ev::Recovery(RecoveryEvent::RecalComplete))
                        .map_err(fault)?,
                );
            }
            CryostatMode::Benchmarking => {
                self.thermal = Thermal::Base;
                self.twin_at(now);
                let result = self.run_ghz()?;
                let d = result.total_duration;
                self.recovery_bench = Some(result);
                self.recovery_ev = Some(
                    q.schedule_in(d, EventKind::StateTransition, Ev::Recovery(RecoveryEvent::BenchmarkComplete))
                        .map_err(fault)?,
                );
            }
            CryostatMode::Operating => {
                self.thermal = Thermal::Base;
                self.ln2_mark = now;
                if event == RecoveryEvent::BenchmarkComplete {
                    // A full recovery supersedes routine work that fell due meanwhile.
                    self.pending_cal.retain(|w| w.source == WindowSource::Operator);
                    self.benchmark_due = false;
                }
            }
        }
        Ok(())
    }

    fn try_schedule_repair(&mut self, q: &mut Q) -> Result<(), HandlerFault> {
        if self.cryo.mode == CryostatMode::Repair
            && self.cryo.vacuum_intact
            && !self.outage_active
            && self.recovery_ev.is_none()
        {
            let d = self.cfg.facility.repair_duration_s;
            self.recovery_ev = Some(
                q.schedule_in(d, EventKind::StateTransition, Ev::Recovery(RecoveryEvent::RepairComplete))
                    .map_err(fault)?,
            );
        }
        Ok(())
    }

    fn run_ghz(&mut self) -> Result<JobResult, HandlerFault> {
        let n = self.cfg.policy.benchmark_qubits;
        let chain: Vec<usize> = self.twin.topology().snake().into_iter().take(n).collect();
        let c = ghz_circuit(&chain, self.twin.topology().num_qubits(), self.cfg.policy.benchmark_shots);
        self.twin.execute(&c, OutputFormat::Histogram, &mut self.rng_bench).map_err(fault)
    }

    fn record_benchmark(&mut self, q: &mut Q, result: &JobResult) -> Result<(), HandlerFault> {
        let now = q.now();
        let p = ghz_probability(result);
        self.benchmarks.push((now, p));
        let alarms = self.store.record(keys::GHZ_FIDELITY, now, p).map_err(fault)?;
        self.raise(q, alarms)
    }

    fn raise(&mut self, q: &mut Q, alarms: Vec<Alarm>) -> Result<(), HandlerFault> {
        for a in alarms {
            q.schedule(q.now(), EventKind::StateTransition, Ev::Alarm(a)).map_err(fault)?;
        }
        Ok(())
    }

    fn next_planned(&self) -> Option<SimTime> {
        self.calendar.get(self.cal_consumed).map(|c| c.0)
    }

    /// Backfill rule: work may start only if it ends before the next planned
    /// window, unless it could never fit between windows.
    fn fits(&self, now: SimTime, duration: f64) -> bool {
        match self.next_planned() {
            None => true,
            Some(t) => now.secs() + duration <= t.secs() || duration > self.max_free_gap,
        }
    }

    fn occupy(&mut self, q: &mut Q, activity: Activity, duration: f64, end: Ev, kind: EventKind, result: Option<JobResult>) -> Result<(), HandlerFault> {
        let now = q.now();
        let end_event = q.schedule_in(duration, kind, end).map_err(fault)?;
        self.busy = Some(Busy { activity, start: now, end_event, result });
        Ok(())
    }

    fn release(&mut self, now: SimTime) -> Option<Busy> {
        let b = self.busy.take()?;
        self.occupancy.push(Occupancy { start: b.start, end: now, activity: b.activity });
        Some(b)
    }

    /// Maps, executes and occupies the device with job `id`. Returns false if
    /// the job did not start (mapping failed or it does not fit).
    fn start_job(&mut self, q: &mut Q, id: JobId, check_fit: bool) -> Result<bool, HandlerFault> {
        let now = q.now();
        let Some(job) = self.sched.job(id).cloned() else { return Ok(false) };
        let estimate = self.twin.job_duration(&job.circuit);
        if check_fit && !self.fits(now, estimate) {
            return Ok(false);
        }
        self.twin_at(now);
        let snapshot = device_snapshot(&self.twin);
        let mapped = match map_circuit(&job.circuit, &snapshot, self.cfg.placement) {
            Ok(m) => m,
            Err(e) => {
                self.sched.mark_failed(id, now, format!("mapping: {e}")).map_err(fault)?;
                return Ok(false);
            }
        };
        let duration = self.twin.job_duration(&mapped.circuit);
        if check_fit && !self.fits(now, duration) {
            return Ok(false);
        }
        let mut result = match self.twin.execute(&mapped.circuit, job.format, &mut self.rng_exec) {
            Ok(r) => r,
            Err(e) => {
                self.sched.mark_failed(id, now, format!("execution: {e}")).map_err(fault)?;
                return Ok(false);
            }
        };
        result.measured = job.circuit.measured();
        self.sched.mark_mapped(id).map_err(fault)?;
        self.sched.mark_running(id, now).map_err(fault)?;
        self.occupy(q, Activity::Job { job: id }, duration, Ev::JobEnd(id), EventKind::StateTransition, Some(result))?;
        Ok(true)
    }

    fn schedule_wake(&mut self, q: &mut Q, at: SimTime) -> Result<(), HandlerFault> {
        if at > q.now() && at <= self.horizon && self.wake_at.is_none_or(|w| w <= q.now() || at < w) {
            q.schedule(at, EventKind::StateTransition, Ev::Wake).map_err(fault)?;
            self.wake_at = Some(at);
        }
        Ok(())
    }

    /// Starts the highest-precedence pending work if the device is free.
    fn dispatch(&mut self, q: &mut Q) -> Result<(), HandlerFault> {
        let now = q.now();
        if self.busy.is_some() || !self.cryo.is_operating() || self.outage_active {
            return Ok(());
        }
        let width = self.twin.topology().num_qubits();

        // Sessions hold the device exclusively.
        if self.sched.session().is_some() {
            if self.sched.session_finished(now) {
                if let Some(s) = self.sched.close_session(now) {
                    self.note(now, format!("session {} closed: {} done, {} refused", s.id, s.completed, s.refused));
                    self.sessions_closed.push(s);
                }
            } else {
                if let Some(id) = self.sched.session_iteration(now, width) {
                    if self.start_job(q, id, false)? {
                        return Ok(());
                    }
                }
                let hpc = self.sched.hpc_queue().next();
                if let Some(id) = hpc {
                    if self.start_job(q, id, false)? {
                        return Ok(());
                    }
                }
                let (next_at, expires) = {
                    let s = self.sched.session().expect("checked");
                    (s.next_at, s.expires())
                };
                self.schedule_wake(q, next_at.max(now))?;
                self.schedule_wake(q, expires)?;
                return Ok(());
            }
        }

        if let Some(m) = self.maint_pending.take() {
            self.occupy(q, Activity::Maintenance, m.duration, Ev::MaintEnd, EventKind::Maintenance, None)?;
            return Ok(());
        }

        if !self.pending_cal.is_empty() {
            self.pending_cal.sort_by(|a, b| a.source.cmp(&b.source).then(a.start.cmp(&b.start)));
            let w = self.pending_cal.remove(0);
            let activity = Activity::Calibration { kind: w.kind, source: w.source };
            self.occupy(q, activity, w.duration(), Ev::CalEnd, EventKind::CalibrationEnd, None)?;
            return Ok(());
        }

        loop {
            let Some(id) = self.sched.hpc_queue().next() else { break };
            if self.start_job(q, id, false)? {
                return Ok(());
            }
        }

        if self.benchmark_due {
            self.twin_at(now);
            let result = self.run_ghz()?;
            if self.fits(now, result.total_duration) {
                self.benchmark_due = false;
                let d = result.total_duration;
                self.occupy(q, Activity::Benchmark, d, Ev::BenchmarkEnd, EventKind::StateTransition, Some(result))?;
                return Ok(());
            }
        }

        let candidates: Vec<JobId> = self.sched.remote_queue().to_vec();
        for id in candidates {
            if self.start_job(q, id, true)? {
                return Ok(());
            }
        }
        Ok(())
    }

    fn sample(&mut self, q: &mut Q) -> Result<(), HandlerFault> {
        let now = q.now();
        self.twin_at(now);
        self.accrue_ln2(q)?;
        let mut alarms = mirror_calibration(&mut self.store, &self.twin).map_err(fault)?;
        let temp = self.temp(now);
        let supply = self.supply(now);
        alarms.extend(self.store.record(keys::ROOM_TEMP_C, now, self.cfg.room.at(now.secs())).map_err(fault)?);
        alarms.extend(self.store.record(keys::CRYO_TEMP_MK, now, temp * 1e3).map_err(fault)?);
        alarms.extend(
            self.store
                .record(keys::POWER_KW, now, power_draw(self.cryo.mode, supply, &self.cfg.facility))
                .map_err(fault)?,
        );
        alarms.extend(self.store.record(keys::LN2_LITERS, now, self.ln2.liters()).map_err(fault)?);
        let water = &self.cfg.water_temp;
        let at = water.partition_point(|s| s.0 <= now.secs());
        if at > 0 {
            let c = water[at - 1].1;
            alarms.extend(self.store.record(keys::WATER_TEMP_C, now, c).map_err(fault)?);
            if c < self.cfg.facility.water_temp_lower_c {
                self.note(now, format!("cooling water {c} °C below the lower limit"));
            }
        }
        self.raise(q, alarms)?;
        let next = now + self.cfg.telemetry_interval_s;
        if next <= self.horizon {
            q.schedule(next, EventKind::TelemetrySample, Ev::Sample).map_err(fault)?;
        }
        Ok(())
    }

    fn finish(&mut self, end: SimTime) {
        if let Some(b) = self.busy.take() {
            self.occupancy.push(Occupancy { start: b.start, end, activity: b.activity });
            self.busy = Some(b);
        }
        if !self.cryo.is_operating() {
            let entered = self.modes.last().map_or(SimTime::ZERO, |m| m.0);
            self.occupancy.push(Occupancy { start: entered, end, activity: Activity::Recovery { mode: self.cryo.mode } });
        } else {
            self.ln2.accrue(end.since(self.ln2_mark));
            self.ln2_mark = end;
        }
        self.twin.advance_to(end);
        self.track_min();
    }
}

impl Handler<Ev> for World {
    fn handle(&mut self, q: &mut Q, event: &crate::sim::SimEvent<Ev>) -> Result<(), HandlerFault> {
        let now = q.now();
        match &event.payload {
            Ev::Arrival(id, req) => {
                let width = self.twin.topology().num_qubits();
                if let Err(e) = self.sched.submit_reserved(*id, (**req).clone(), now, width) {
                    self.note(now, format!("{e}"));
                }
            }
            Ev::SessionOpen(req) => {
                let mut req = (**req).clone();
                req.start = now;
                if let Err(e) = self.sched.open_session(req, now, self.cryo.mode) {
                    self.note(now, format!("session refused: {e}"));
                }
            }
            Ev::CalDue(w) => {
                self.cal_consumed += 1;
                self.pending_cal.push(*w);
            }
            Ev::CalEnd => {
                if let Some(b) = self.release(now) {
                    if let Activity::Calibration { kind, source } = b.activity {
                        self.twin_at(now);
                        self.twin.recalibrate(kind);
                        if source == WindowSource::Alarm {
                            self.store.reset_watch(self.recal_watch);
                        }
                    }
                }
            }
            Ev::MaintDue(m) => {
                self.cal_consumed += 1;
                self.maint_pending = Some(*m);
            }
            Ev::MaintEnd => {
                self.release(now);
            }
            Ev::FaultStart(f) => match f.kind {
                FaultKind::GridPowerLoss => self.grid_down_since = Some(now),
                FaultKind::CoolingWaterOvertemp => {
                    q.schedule(now, EventKind::StateTransition, Ev::PumpShutdown).map_err(fault)?;
                }
                FaultKind::PumpFailure => {}
                FaultKind::VacuumBreach => self.advance(q, RecoveryEvent::VacuumBreach)?,
            },
            Ev::FaultEnd(f) => match f.kind {
                FaultKind::GridPowerLoss => self.grid_down_since = None,
                FaultKind::VacuumBreach => self.advance(q, RecoveryEvent::VacuumRestored)?,
                _ => {}
            },
            Ev::CoolingLost(_) => {
                let temp = self.temp(now);
                self.outage_active = true;
                match self.cryo.mode {
                    CryostatMode::Operating
                    | CryostatMode::Recalibration
                    | CryostatMode::Benchmarking
                    | CryostatMode::Cooldown => self.advance(q, RecoveryEvent::CoolingLost)?,
                    _ => self.thermal = Thermal::Warming { since: now, from: temp },
                }
            }
            Ev::CoolingRestored => {
                self.outage_active = false;
                let temp = self.temp(now);
                match self.cryo.mode {
                    CryostatMode::CoolingFault | CryostatMode::WarmedUp => {
                        if let Some(id) = self.threshold_ev.take() {
                            q.cancel(id);
                        }
                        self.advance(q, RecoveryEvent::FaultCleared)?;
                    }
                    CryostatMode::Repair => {
                        self.cryo.observe_temp(temp);
                        if self.cryo.vacuum_intact {
                            self.thermal = Thermal::Holding(temp);
                        }
                        self.try_schedule_repair(q)?;
                    }
                    _ => {}
                }
            }
            Ev::PumpShutdown => {}
            Ev::Threshold => {
                self.threshold_ev = None;
                if self.cryo.mode == CryostatMode::CoolingFault {
                    self.advance(q, RecoveryEvent::ThresholdCrossed)?;
                }
            }
            Ev::Recovery(e) => {
                self.recovery_ev = None;
                match e {
                    RecoveryEvent::RecalComplete => {
                        self.twin_at(now);
                        self.twin.recalibrate(self.cryo.recal);
                    }
                    RecoveryEvent::BenchmarkComplete => {
                        if let Some(r) = self.recovery_bench.take() {
                            self.record_benchmark(q, &r)?;
                        }
                    }
                    _ => {}
                }
                self.advance(q, *e)?;
            }
            Ev::Transition(_) => {}
            Ev::JobEnd(id) => {
                if let Some(mut b) = self.release(now) {
                    self.sched.mark_done(*id, now).map_err(fault)?;
                    if let Some(r) = b.result.take() {
                        self.results.insert(*id, r);
                    }
                }
            }
            Ev::BenchmarkDue => {
                self.benchmark_due = true;
                if let Some(dt) = self.cfg.policy.benchmark_interval_s {
                    let next = now + dt;
                    if next <= self.horizon {
                        q.schedule(next, EventKind::StateTransition, Ev::BenchmarkDue).map_err(fault)?;
                    }
                }
            }
            Ev::BenchmarkEnd => {
                if let Some(mut b) = self.release(now) {
                    if let Some(r) = b.result.take() {
                        self.record_benchmark(q, &r)?;
                    }
                }
            }
            Ev::Alarm(a) => {
                self.alarms.push(a.clone());
                if a.label == ALARM_RECALIBRATION_NEEDED {
                    self.pending_cal.push(CalWindow {
                        start: now,
                        kind: self.cfg.policy.degraded_action,
                        source: WindowSource::Alarm,
                    });
                }
            }
            Ev::Ln2Refill(_) => {}
            Ev::Sample => self.sample(q)?,
            Ev::Wake => {
                if self.wake_at == Some(now) {
                    self.wake_at = None;
                }
            }
        }
        self.dispatch(q)
    }
}
