// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! On-disk formats for telemetry, results, logs, queues and metrics.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context};
use qhpc_core::scenario::{FidelityRow, Simulation};
use qhpc_core::scheduler::{Job, JobState, OpsMetrics, Origin};
use qhpc_core::sim::LogEntry;
use qhpc_core::telemetry::{TelemetryError, TelemetryStore};
use qhpc_core::twin::{JobResult, MetricSet, OutputFormat, ResultData};
use serde::{Deserialize, Serialize};

/// One JSON object per line: `{id, time, kind, summary}`.
pub fn write_event_log<W: Write>(mut w: W, log: &[LogEntry]) -> anyhow::Result<()> {
    for e in log {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_event_log<R: BufRead>(r: R) -> anyhow::Result<Vec<LogEntry>> {
    r.lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, l)| serde_json::from_str(&l?).with_context(|| format!("event log line {}", i + 1)))
        .collect()
}

/// `key,timestamp_s,value`, key-major.
pub fn write_telemetry_csv<W: Write>(w: W, store: &TelemetryStore) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["key", "timestamp_s", "value"])?;
    for (key, s) in store.dump() {
        out.write_record([key.as_str(), &s.time.secs().to_string(), &s.value.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_telemetry_csv<R: std::io::Read>(r: R) -> anyhow::Result<TelemetryStore> {
    let mut rows = Vec::new();
    for (i, rec) in csv::Reader::from_reader(r).records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            bail!("telemetry row {}: expected 3 fields", i + 2);
        }
        let num = |s: &str| s.parse::<f64>().with_context(|| format!("telemetry row {}: `{s}`", i + 2));
        rows.push((rec[0].to_string(), num(&rec[1])?, num(&rec[2])?));
    }
    TelemetryStore::restore(rows.iter().map(|(k, t, v)| (k.as_str(), *t, *v))).map_err(|e: TelemetryError| e.into())
}

/// Plot-ready `time_s,family,element,value`.
pub fn write_fidelity_csv<W: Write>(w: W, rows: &[FidelityRow]) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "family", "element", "value"])?;
    for r in rows {
        out.write_record([&r.time_s.to_string(), r.family, &r.element, &r.value.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `shot,qubit,a,b` for every shot and measured qubit.
pub fn write_iq_csv<W: Write>(w: W, result: &JobResult) -> anyhow::Result<()> {
    let ResultData::RawIq(iq) = &result.data else { bail!("result is not raw_iq") };
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["shot", "qubit", "a", "b"])?;
    for (shot, points) in iq.iter().enumerate() {
        for (bit, &(a, b)) in points.iter().enumerate() {
            let q = result.measured.get(bit).copied().unwrap_or(bit);
            out.write_record([shot.to_string(), q.to_string(), a.to_string(), b.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Per-job outbox document. IQ payloads live in a sibling CSV named by
/// `data_file`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: String,
    pub origin: Origin,
    pub state: JobState,
    pub format: OutputFormat,
    pub arrival_s: f64,
    pub started_s: Option<f64>,
    pub finished_s: Option<f64>,
    pub restarted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<ResultData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_file: Option<String>,
}

impl JobRecord {
    pub fn new(job: &Job, result: Option<&JobResult>) -> Self {
        let iq = result.is_some_and(|r| r.format == OutputFormat::RawIq);
        JobRecord {
            id: job.id.to_string(),
            origin: job.origin,
            state: job.state,
            format: job.format,
            arrival_s: job.arrival.secs(),
            started_s: job.started.map(|t| t.secs()),
            finished_s: job.finished.map(|t| t.secs()),
            restarted: job.restarted,
            error: job.error.clone(),
            shots: result.map(|r| r.shots),
            measured: result.map(|r| r.measured.clone()),
            duration_s: result.map(|r| r.total_duration),
            data: result.filter(|_| !iq).map(|r| r.data.clone()),
            data_file: iq.then(|| format!("{}.iq.csv", job.id)),
        }
    }
}

/// Writes `<id>.json` (and `<id>.iq.csv` for IQ results) for every job.
pub fn write_outbox(dir: &Path, sim: &Simulation) -> anyhow::Result<usize> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut n = 0;
    for job in sim.scheduler().jobs() {
        let result = sim.results().get(&job.id);
        let rec = JobRecord::new(job, result);
        let path = dir.join(format!("{}.json", job.id));
        std::fs::write(&path, serde_json::to_string_pretty(&rec)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        if let (Some(file), Some(r)) = (&rec.data_file, result) {
            write_iq_csv(std::fs::File::create(dir.join(file))?, r)?;
        }
        n += 1;
    }
    Ok(n)
}

/// Metrics document written after a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub duration_s: f64,
    #[serde(flatten)]
    pub ops: OpsMetrics,
    pub manual_interventions: u32,
    pub alarms: usize,
    pub transitions: usize,
    pub benchmarks: usize,
    pub ln2_liters: f64,
    pub min_fidelity: MetricSet,
}

impl RunReport {
    pub fn new(sim: &Simulation) -> Self {
        RunReport {
            seed: sim.config().seed,
            duration_s: sim.config().duration_s,
            ops: sim.metrics(),
            manual_interventions: sim.manual_interventions(),
            alarms: sim.alarms().len(),
            transitions: sim.transitions().len(),
            benchmarks: sim.benchmarks().len(),
            ln2_liters: sim.ln2_liters(),
            min_fidelity: sim.min_fidelity().clone(),
        }
    }
}

/// Queue snapshot as a JSON array of jobs.
pub fn dump_queue(jobs: &[Job]) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(jobs)?)
}

pub fn load_queue(text: &str) -> anyhow::Result<Vec<Job>> {
    serde_json::from_str(text).context("parsing queue dump")
}
