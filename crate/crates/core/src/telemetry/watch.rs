// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::store::Sample;
use super::SensorKey;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WatchId(pub usize);

/// Condition over the trailing window of one key.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// `max − min` over the window exceeds the threshold.
    SpanExceeds(f64),
    /// Latest value strictly below the threshold.
    Below(f64),
    /// Latest value strictly above the threshold.
    Above(f64),
}

/// How a fired watch becomes armed again.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rearm {
    /// As soon as the predicate evaluates false.
    Auto,
    /// Only through `TelemetryStore::reset_watch`.
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alarm {
    pub watch: WatchId,
    pub label: String,
    pub key: SensorKey,
    pub time: SimTime,
    /// Span or latest value that tripped the predicate.
    pub value: f64,
}

#[derive(Clone, Debug)]
pub(super) struct Watch {
    id: WatchId,
    pub(super) key: SensorKey,
    predicate: Predicate,
    window: f64,
    label: String,
    rearm: Rearm,
    pub(super) armed: bool,
}

impl Watch {
    pub(super) fn new(id: WatchId, key: SensorKey, predicate: Predicate, window: f64, label: &str, rearm: Rearm) -> Self {
        Watch { id, key, predicate, window, label: String::from(label), rearm, armed: true }
    }

    /// Edge-triggered: fires on a false→true transition while armed.
    pub(super) fn evaluate(&mut self, series: &[Sample]) -> Option<Alarm> {
        let last = series.last()?;
        let start = last.time.secs() - self.window;
        let from = series.partition_point(|s| s.time.secs() < start);
        let window = &series[from..];
        let (holds, value) = match self.predicate {
            Predicate::SpanExceeds(threshold) => {
                let (lo, hi) = window
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)));
                (hi - lo > threshold, hi - lo)
            }
            Predicate::Below(threshold) => (last.value < threshold, last.value),
            Predicate::Above(threshold) => (last.value > threshold, last.value),
        };
        if !holds {
            if self.rearm == Rearm::Auto {
                self.armed = true;
            }
            return None;
        }
        if !self.armed {
            return None;
        }
        self.armed = false;
        Some(Alarm { watch: self.id, label: self.label.clone(), key: self.key.clone(), time: last.time, value })
    }
}
