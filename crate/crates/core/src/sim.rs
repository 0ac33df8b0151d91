// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-threaded discrete-event engine.
//!
//! Events are ordered by `(time, id)`. Ids are handed out in insertion order,
//! so equal timestamps dispatch first-in first-out. Cancellation is lazy: the
//! heap keeps stale keys which are skipped on pop.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u64);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    JobArrival,
    CalibrationStart,
    CalibrationEnd,
    FaultStart,
    FaultEnd,
    Maintenance,
    TelemetrySample,
    StateTransition,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::JobArrival => "job_arrival",
            EventKind::CalibrationStart => "calibration_start",
            EventKind::CalibrationEnd => "calibration_end",
            EventKind::FaultStart => "fault_start",
            EventKind::FaultEnd => "fault_end",
            EventKind::Maintenance => "maintenance",
            EventKind::TelemetrySample => "telemetry_sample",
            EventKind::StateTransition => "state_transition",
        }
    }
}

/// Module-owned event payloads describe themselves for the event log.
pub trait Payload {
    fn summary(&self) -> String;
}

impl Payload for () {
    fn summary(&self) -> String {
        String::new()
    }
}

impl Payload for &'static str {
    fn summary(&self) -> String {
        String::from(*self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimEvent<P> {
    pub id: EventId,
    pub time: SimTime,
    pub kind: EventKind,
    pub payload: P,
}

/// One line of the dispatched-event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub id: EventId,
    pub time: SimTime,
    pub kind: EventKind,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("cannot schedule at t={requested} s: clock is already at t={now} s")]
    PastTime { requested: SimTime, now: SimTime },
    #[error("run horizon t={requested} s lies before the clock (t={now} s)")]
    PastHorizon { requested: SimTime, now: SimTime },
    #[error("handler fault while dispatching event {id}: {message}")]
    Handler { id: EventId, message: String },
}

/// Unrecoverable error raised by a handler; aborts the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerFault(pub String);

impl<T: Into<String>> From<T> for HandlerFault {
    fn from(message: T) -> Self {
        HandlerFault(message.into())
    }
}

/// Pending events plus the clock. Handlers receive this to schedule
/// follow-ups during dispatch.
#[derive(Debug)]
pub struct EventQueue<P> {
    now: SimTime,
    next_id: u64,
    heap: BinaryHeap<Reverse<(SimTime, u64)>>,
    pending: BTreeMap<u64, SimEvent<P>>,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        EventQueue {
            now: SimTime::ZERO,
            next_id: 1,
            heap: BinaryHeap::new(),
            pending: BTreeMap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn schedule(&mut self, time: SimTime, kind: EventKind, payload: P) -> Result<EventId, SimError> {
        if time < self.now {
            return Err(SimError::PastTime { requested: time, now: self.now });
        }
        let id = self.next_id;
        self.next_id += 1;
        self.heap.push(Reverse((time, id)));
        self.pending.insert(id, SimEvent { id: EventId(id), time, kind, payload });
        Ok(EventId(id))
    }

    /// Schedules `delay` seconds after the current clock.
    pub fn schedule_in(&mut self, delay: f64, kind: EventKind, payload: P) -> Result<EventId, SimError> {
        let time = SimTime::new(self.now.secs() + delay)
            .ok_or(SimError::PastTime { requested: self.now, now: self.now })?;
        self.schedule(time, kind, payload)
    }

    /// True iff the event was pending and is now removed.
    pub fn cancel(&mut self, id: EventId) -> bool {
        self.pending.remove(&id.0).is_some()
    }

    pub fn is_pending(&self, id: EventId) -> bool {
        self.pending.contains_key(&id.0)
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn get(&self, id: EventId) -> Option<&SimEvent<P>> {
        self.pending.get(&id.0)
    }

    /// Time of the earliest live event.
    pub fn peek_time(&mut self) -> Option<SimTime> {
        self.discard_stale();
        self.heap.peek().map(|Reverse((t, _))| *t)
    }

    fn discard_stale(&mut self) {
        while let Some(Reverse((_, id))) = self.heap.peek() {
            if self.pending.contains_key(id) {
                break;
            }
            self.heap.pop();
        }
    }

    /// Pops the next event with `time <= horizon`, advancing the clock to it.
    pub fn pop_until(&mut self, horizon: SimTime) -> Option<SimEvent<P>> {
        self.discard_stale();
        let Reverse((time, _)) = *self.heap.peek()?;
        if time > horizon {
            return None;
        }
        let Reverse((_, id)) = self.heap.pop()?;
        let event = self.pending.remove(&id)?;
        debug_assert!(event.time >= self.now);
        self.now = event.time;
        Some(event)
    }

    fn advance_to(&mut self, t: SimTime) {
        if t > self.now {
            self.now = t;
        }
    }
}

/// Receives every dispatched event.
pub trait Handler<P> {
    fn handle(&mut self, queue: &mut EventQueue<P>, event: &SimEvent<P>) -> Result<(), HandlerFault>;

    /// Called at every idle point of the loop (before each dispatch and at
    /// the end of a run). Inboxes convert external submissions here.
    fn on_idle(&mut self, _queue: &mut EventQueue<P>) {}
}

impl<P, F> Handler<P> for F
where
    F: FnMut(&mut EventQueue<P>, &SimEvent<P>) -> Result<(), HandlerFault>,
{
    fn handle(&mut self, queue: &mut EventQueue<P>, event: &SimEvent<P>) -> Result<(), HandlerFault> {
        self(queue, event)
    }
}

/// The event loop: a queue plus the cumulative dispatch log.
#[derive(Debug)]
pub struct Engine<P> {
    queue: EventQueue<P>,
    log: Vec<LogEntry>,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Engine { queue: EventQueue::new(), log: Vec::new() }
    }

    pub fn now(&self) -> SimTime {
        self.queue.now()
    }

    pub fn queue(&self) -> &EventQueue<P> {
        &self.queue
    }

    pub fn queue_mut(&mut self) -> &mut EventQueue<P> {
        &mut self.queue
    }

    pub fn schedule_event(&mut self, time: SimTime, kind: EventKind, payload: P) -> Result<EventId, SimError> {
        self.queue.schedule(time, kind, payload)
    }

    pub fn cancel_event(&mut self, id: EventId) -> bool {
        self.queue.cancel(id)
    }

    /// Every event dispatched so far, across runs.
    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }
}

impl<P: Payload> Engine<P> {
    /// Dispatches every event with `time <= t_end` and leaves the clock at
    /// `t_end`. Returns the entries dispatched by this call.
    pub fn run_until<H: Handler<P>>(&mut self, t_end: SimTime, handler: &mut H) -> Result<&[LogEntry], SimError> {
        if t_end < self.queue.now() {
            return Err(SimError::PastHorizon { requested: t_end, now: self.queue.now() });
        }
        let first = self.log.len();
        loop {
            handler.on_idle(&mut self.queue);
            let Some(event) = self.queue.pop_until(t_end) else { break };
            self.log.push(LogEntry {
                id: event.id,
                time: event.time,
                kind: event.kind,
                summary: event.payload.summary(),
            });
            handler
                .handle(&mut self.queue, &event)
                .map_err(|HandlerFault(message)| SimError::Handler { id: event.id, message })?;
        }
        self.queue.advance_to(t_end);
        Ok(&self.log[first..])
    }
}
