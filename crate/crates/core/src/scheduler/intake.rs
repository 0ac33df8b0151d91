// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::job::{Job, JobId, JobRequest, JobState, Origin};
use super::SchedError;
use crate::facility::CryostatMode;
use crate::time::SimTime;
use crate::twin::{Circuit, OutputFormat};

/// Lane a job is routed to; decided by origin alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lane {
    Queue,
    Session,
}

pub fn route(origin: Origin) -> Lane {
    match origin {
        Origin::Remote => Lane::Queue,
        Origin::Hpc => Lane::Session,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionRequest {
    #[serde(rename = "start_s")]
    pub start: SimTime,
    pub max_duration_s: f64,
    pub iterations: u32,
    /// Classical compute between iterations.
    #[serde(default)]
    pub classical_s: f64,
    pub circuit: Circuit,
    #[serde(default = "histogram")]
    pub format: OutputFormat,
}

fn histogram() -> OutputFormat {
    OutputFormat::Histogram
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: u64,
    pub start: SimTime,
    pub max_duration_s: f64,
    pub iteration_budget: u32,
    pub classical_s: f64,
    pub circuit: Circuit,
    pub format: OutputFormat,
    pub completed: u32,
    pub refused: u32,
    /// Earliest start of the next iteration.
    pub next_at: SimTime,
    pub in_flight: Option<JobId>,
}

impl Session {
    pub fn expires(&self) -> SimTime {
        self.start + self.max_duration_s
    }

    pub fn remaining(&self) -> u32 {
        self.iteration_budget - self.completed - self.refused - u32::from(self.in_flight.is_some())
    }
}

/// Job counts for the conservation identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobCounts {
    pub submitted: u64,
    pub done: u64,
    pub failed: u64,
    pub cancelled: u64,
    /// Queued, mapped or running when counted.
    pub queued: u64,
}

impl JobCounts {
    pub fn conserved(&self) -> bool {
        self.submitted == self.done + self.failed + self.cancelled + self.queued
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub job: JobId,
    pub origin: Origin,
    pub lane: Lane,
    pub time: SimTime,
}

/// Job intake with a priority-ordered remote queue, an HPC lane and at most
/// one exclusive session.
#[derive(Clone, Debug, Default)]
pub struct Scheduler {
    jobs: BTreeMap<JobId, Job>,
    remote: Vec<JobId>,
    hpc: VecDeque<JobId>,
    session: Option<Session>,
    next_job: u64,
    next_session: u64,
    routing: Vec<RoutingDecision>,
}

impl Scheduler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accepts a job. An oversized circuit is recorded as failed and
    /// reported as an error carrying its id.
    pub fn submit(&mut self, req: JobRequest, now: SimTime, device_width: usize) -> Result<JobId, SchedError> {
        let id = self.reserve_id();
        self.submit_reserved(id, req, now, device_width)
    }

    /// Hands out the id an external submission will carry once the event
    /// loop accepts it.
    pub fn reserve_id(&mut self) -> JobId {
        let id = JobId(self.next_job);
        self.next_job += 1;
        id
    }

    pub fn submit_reserved(
        &mut self,
        id: JobId,
        req: JobRequest,
        now: SimTime,
        device_width: usize,
    ) -> Result<JobId, SchedError> {
        let mut job = Job {
            id,
            origin: req.origin,
            circuit: req.circuit,
            format: req.format,
            priority: req.priority,
            arrival: now,
            state: JobState::Queued,
            restarted: false,
            started: None,
            finished: None,
            error: None,
            session: None,
        };
        let problem = if job.circuit.width > device_width {
            Some(format!("circuit width {} exceeds the {device_width} device qubits", job.circuit.width))
        } else {
            job.circuit.validate().err().map(|e| format!("{e}"))
        };
        if let Some(reason) = problem {
            job.state = JobState::Failed;
            job.finished = Some(now);
            job.error = Some(reason.clone());
            self.jobs.insert(id, job);
            return Err(SchedError::Rejected { id, reason });
        }
        let lane = route(job.origin);
        self.routing.push(RoutingDecision { job: id, origin: job.origin, lane, time: now });
        self.jobs.insert(id, job);
        self.enqueue(id);
        Ok(id)
    }

    fn enqueue(&mut self, id: JobId) {
        let job = &self.jobs[&id];
        match route(job.origin) {
            Lane::Session => self.hpc.push_back(id),
            Lane::Queue => {
                let key = (-job.priority, job.arrival, id);
                let jobs = &self.jobs;
                let at = self.remote.partition_point(|o| {
                    let j = &jobs[o];
                    (-j.priority, j.arrival, j.id) < key
                });
                self.remote.insert(at, id);
            }
        }
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.get(&id)
    }

    pub fn jobs(&self) -> impl Iterator<Item = &Job> {
        self.jobs.values()
    }

    pub fn routing_log(&self) -> &[RoutingDecision] {
        &self.routing
    }

    /// Remote queue in service order.
    pub fn remote_queue(&self) -> &[JobId] {
        &self.remote
    }

    pub fn hpc_queue(&self) -> impl Iterator<Item = JobId> + '_ {
        self.hpc.iter().copied()
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn session_mut(&mut self) -> Option<&mut Session> {
        self.session.as_mut()
    }

    pub fn open_session(&mut self, req: SessionRequest, now: SimTime, mode: CryostatMode) -> Result<u64, SchedError> {
        if self.session.is_some() {
            return Err(SchedError::SessionActive);
        }
        if mode != CryostatMode::Operating {
            return Err(SchedError::DeviceUnavailable(mode));
        }
        if req.iterations == 0 || !(req.max_duration_s > 0.0) || !(req.classical_s >= 0.0) {
            return Err(SchedError::BadSession);
        }
        let id = self.next_session;
        self.next_session += 1;
        self.session = Some(Session {
            id,
            start: now,
            max_duration_s: req.max_duration_s,
            iteration_budget: req.iterations,
            classical_s: req.classical_s,
            circuit: req.circuit,
            format: req.format,
            completed: 0,
            refused: 0,
            next_at: now,
            in_flight: None,
        });
        Ok(id)
    }

    /// Creates the next session iteration as an HPC job if the session can
    /// still start one at `now`. An expired window refuses the remainder and
    /// closes the session once nothing is in flight.
    pub fn session_iteration(&mut self, now: SimTime, device_width: usize) -> Option<JobId> {
        let s = self.session.as_mut()?;
        if s.in_flight.is_some() || now < s.next_at {
            return None;
        }
        if now >= s.expires() {
            s.refused += s.remaining();
            return None;
        }
        if s.remaining() == 0 {
            return None;
        }
        let (sid, circuit, format) = (s.id, s.circuit.clone(), s.format);
        let req = JobRequest { origin: Origin::Hpc, circuit, format, priority: 0 };
        let id = self.submit(req, now, device_width).ok()?;
        self.hpc.retain(|j| *j != id);
        self.jobs.get_mut(&id).expect("just submitted").session = Some(sid);
        self.session.as_mut().expect("checked").in_flight = Some(id);
        Some(id)
    }

    /// True once every iteration is completed or refused.
    pub fn session_finished(&self, now: SimTime) -> bool {
        self.session.as_ref().is_some_and(|s| {
            s.in_flight.is_none() && (s.remaining() == 0 || now >= s.expires())
        })
    }

    pub fn close_session(&mut self, now: SimTime) -> Option<Session> {
        let mut s = self.session.take()?;
        if s.in_flight.is_none() && now >= s.expires() {
            s.refused += s.remaining();
        }
        Some(s)
    }

    /// Job to start next outside a session: the HPC lane first, then the
    /// first remote job accepted by `fits`.
    pub fn next_job(&self, mut fits: impl FnMut(&Job) -> bool) -> Option<JobId> {
        if let Some(&id) = self.hpc.front() {
            return Some(id);
        }
        self.remote.iter().copied().find(|id| fits(&self.jobs[id]))
    }

    fn set_state(&mut self, id: JobId, to: JobState) -> Result<&mut Job, SchedError> {
        let job = self.jobs.get_mut(&id).ok_or(SchedError::UnknownJob(id))?;
        if !job.state.can_become(to) {
            return Err(SchedError::BadJobTransition { id, from: job.state, to });
        }
        job.state = to;
        Ok(job)
    }

    fn dequeue(&mut self, id: JobId) {
        self.remote.retain(|j| *j != id);
        self.hpc.retain(|j| *j != id);
    }

    pub fn mark_mapped(&mut self, id: JobId) -> Result<(), SchedError> {
        self.set_state(id, JobState::Mapped)?;
        self.dequeue(id);
        Ok(())
    }

    pub fn mark_running(&mut self, id: JobId, now: SimTime) -> Result<(), SchedError> {
        self.set_state(id, JobState::Running)?.started = Some(now);
        Ok(())
    }

    pub fn mark_done(&mut self, id: JobId, now: SimTime) -> Result<(), SchedError> {
        self.set_state(id, JobState::Done)?.finished = Some(now);
        self.finish_iteration(id, now);
        Ok(())
    }

    pub fn mark_failed(&mut self, id: JobId, now: SimTime, reason: String) -> Result<(), SchedError> {
        let job = self.set_state(id, JobState::Failed)?;
        job.finished = Some(now);
        job.error = Some(reason);
        self.dequeue(id);
        self.finish_iteration(id, now);
        Ok(())
    }

    pub fn cancel(&mut self, id: JobId, now: SimTime) -> Result<(), SchedError> {
        self.set_state(id, JobState::Cancelled)?.finished = Some(now);
        self.dequeue(id);
        self.finish_iteration(id, now);
        Ok(())
    }

    /// Returns an interrupted job to the queue with the `restarted` flag.
    pub fn requeue_interrupted(&mut self, id: JobId) -> Result<(), SchedError> {
        let job = self.set_state(id, JobState::Queued)?;
        job.restarted = true;
        job.started = None;
        if let Some(s) = self.session.as_mut().filter(|s| s.in_flight == Some(id)) {
            // A session iteration is retried within the session.
            s.in_flight = None;
            self.jobs.get_mut(&id).expect("exists").state = JobState::Cancelled;
            return Ok(());
        }
        self.enqueue(id);
        Ok(())
    }

    /// Operator resubmission of a failed job.
    pub fn resubmit(&mut self, id: JobId) -> Result<(), SchedError> {
        let job = self.set_state(id, JobState::Queued)?;
        job.error = None;
        job.finished = None;
        self.enqueue(id);
        Ok(())
    }

    fn finish_iteration(&mut self, id: JobId, now: SimTime) {
        if let Some(s) = self.session.as_mut().filter(|s| s.in_flight == Some(id)) {
            s.in_flight = None;
            s.completed += 1;
            s.next_at = now + s.classical_s;
        }
    }

    pub fn counts(&self) -> JobCounts {
        let mut c = JobCounts::default();
        for j in self.jobs.values() {
            c.submitted += 1;
            match j.state {
                JobState::Done => c.done += 1,
                JobState::Failed => c.failed += 1,
                JobState::Cancelled => c.cancelled += 1,
                _ => c.queued += 1,
            }
        }
        c
    }

    /// Non-terminal jobs, for persisting the queue across runs.
    pub fn dump_queue(&self) -> Vec<Job> {
        self.jobs.values().filter(|j| !j.state.is_terminal()).cloned().collect()
    }

    /// Re-queues jobs from a dump, assigning fresh ids after the existing
    /// ones. Returns the new ids in dump order.
    pub fn load_queue(&mut self, jobs: Vec<Job>) -> Vec<JobId> {
        let mut ids = Vec::with_capacity(jobs.len());
        for mut job in jobs {
            let id = JobId(self.next_job);
            self.next_job += 1;
            job.id = id;
            job.state = JobState::Queued;
            job.started = None;
            job.session = None;
            self.jobs.insert(id, job);
            self.enqueue(id);
            ids.push(id);
        }
        ids
    }
}
