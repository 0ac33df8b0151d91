// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::watch::{Alarm, Predicate, Rearm, Watch, WatchId};
use super::{SensorKey, TelemetryError};
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: SimTime,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Mean,
    Min,
    Max,
    Raw,
}

/// Range query outcome. An empty range is reported as `Empty`, never as 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryResult {
    Empty,
    Scalar(f64),
    Series(Vec<Sample>),
}

#[derive(Clone, Debug, Default)]
pub struct TelemetryStore {
    series: BTreeMap<SensorKey, Vec<Sample>>,
    watches: Vec<Watch>,
}

impl TelemetryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores a sample (creating the key on first use) and returns the
    /// alarms that fired on this append.
    pub fn append(&mut self, key: &SensorKey, time: SimTime, value: f64) -> Result<Vec<Alarm>, TelemetryError> {
        if !value.is_finite() {
            return Err(TelemetryError::NonFinite(key.clone()));
        }
        let series = self.series.entry(key.clone()).or_default();
        if let Some(last) = series.last() {
            if time <= last.time {
                return Err(TelemetryError::OutOfOrder { key: key.clone(), time: time.secs(), last: last.time.secs() });
            }
        }
        series.push(Sample { time, value });
        let series = &self.series[key];
        Ok(self.watches.iter_mut().filter(|w| &w.key == key).filter_map(|w| w.evaluate(series)).collect())
    }

    /// Convenience wrapper taking a string key.
    pub fn record(&mut self, key: &str, time: SimTime, value: f64) -> Result<Vec<Alarm>, TelemetryError> {
        self.append(&SensorKey::new(key)?, time, value)
    }

    pub fn latest(&self, key: &str) -> Option<Sample> {
        self.series.iter().find(|(k, _)| k.as_str() == key).and_then(|(_, s)| s.last().copied())
    }

    pub fn series(&self, key: &str) -> Option<&[Sample]> {
        self.series.iter().find(|(k, _)| k.as_str() == key).map(|(_, s)| s.as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = &SensorKey> {
        self.series.keys()
    }

    pub fn len(&self) -> usize {
        self.series.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Aggregates samples with `t0 <= t <= t1`.
    pub fn query_range(&self, key: &str, t0: f64, t1: f64, agg: Aggregation) -> Result<QueryResult, TelemetryError> {
        if !(t0 <= t1) {
            return Err(TelemetryError::BadRange { t0, t1 });
        }
        let k = SensorKey::new(key)?;
        let series = self.series.get(&k).ok_or(TelemetryError::UnknownKey(k))?;
        let lo = series.partition_point(|s| s.time.secs() < t0);
        let hi = series.partition_point(|s| s.time.secs() <= t1);
        let window = &series[lo..hi.max(lo)];
        if window.is_empty() {
            return Ok(QueryResult::Empty);
        }
        let values = window.iter().map(|s| s.value);
        Ok(match agg {
            Aggregation::Raw => QueryResult::Series(window.to_vec()),
            Aggregation::Mean => QueryResult::Scalar(values.sum::<f64>() / window.len() as f64),
            Aggregation::Min => QueryResult::Scalar(values.fold(f64::INFINITY, f64::min)),
            Aggregation::Max => QueryResult::Scalar(values.fold(f64::NEG_INFINITY, f64::max)),
        })
    }

    /// Registers a watch on `key` evaluated over the trailing `window` seconds.
    pub fn watch(
        &mut self,
        key: &str,
        predicate: Predicate,
        window: f64,
        label: &str,
        rearm: Rearm,
    ) -> Result<WatchId, TelemetryError> {
        if !(window > 0.0) {
            return Err(TelemetryError::BadWindow(window));
        }
        let id = WatchId(self.watches.len());
        self.watches.push(Watch::new(id, SensorKey::new(key)?, predicate, window, label, rearm));
        Ok(id)
    }

    /// Re-arms a manually reset watch.
    pub fn reset_watch(&mut self, id: WatchId) {
        if let Some(w) = self.watches.get_mut(id.0) {
            w.armed = true;
        }
    }

    /// Every sample as `(key, time, value)`, key-major.
    pub fn dump(&self) -> impl Iterator<Item = (&SensorKey, Sample)> {
        self.series.iter().flat_map(|(k, s)| s.iter().map(move |x| (k, *x)))
    }

    /// Rebuilds a store from dumped records; ordering rules still apply.
    pub fn restore<'a>(
        records: impl IntoIterator<Item = (&'a str, f64, f64)>,
    ) -> Result<TelemetryStore, TelemetryError> {
        let mut store = TelemetryStore::new();
        for (key, t, v) in records {
            let time = SimTime::new(t).ok_or(TelemetryError::BadRange { t0: t, t1: t })?;
            store.record(key, time, v)?;
        }
        Ok(store)
    }
}
