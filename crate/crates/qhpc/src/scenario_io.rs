// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario documents, job traces and run artifacts.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use qhpc_core::scenario::{ScenarioConfig, Simulation, TraceEntry};
use qhpc_core::twin::Circuit;
use serde_json::Value;

use crate::formats;

/// Reads one trace line. `circuit_ref` names a circuit JSON file relative
/// to `base`; otherwise `circuit` is inline.
pub fn parse_trace_line(line: &str, base: &Path) -> anyhow::Result<TraceEntry> {
    let mut v: Value = serde_json::from_str(line)?;
    let obj = v.as_object_mut().ok_or_else(|| anyhow!("trace line is not an object"))?;
    if let Some(r) = obj.remove("circuit_ref") {
        if obj.contains_key("circuit") {
            return Err(anyhow!("both circuit and circuit_ref given"));
        }
        let r = r.as_str().ok_or_else(|| anyhow!("circuit_ref must be a string"))?;
        let path = base.join(r);
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let c: Circuit = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        obj.insert("circuit".into(), serde_json::to_value(c)?);
    }
    Ok(serde_json::from_value(v)?)
}

pub fn load_trace(path: &Path) -> anyhow::Result<Vec<TraceEntry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_trace_line(l, base).with_context(|| format!("{} line {}", path.display(), i + 1)))
        .collect()
}

/// Parses a scenario and appends its trace file, if any, to `jobs`.
pub fn load_scenario(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg: ScenarioConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(trace) = cfg.job_trace.clone() {
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.jobs.extend(load_trace(&base.join(trace))?);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Files produced by [`write_artifacts`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub events: PathBuf,
    pub metrics: PathBuf,
    pub fidelity: PathBuf,
    pub telemetry: PathBuf,
    pub queue: PathBuf,
    pub outbox: PathBuf,
    pub jobs_written: usize,
}

pub fn write_artifacts(sim: &Simulation, out: &Path) -> anyhow::Result<Artifacts> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let file = |name: &str| -> anyhow::Result<(PathBuf, std::io::BufWriter<std::fs::File>)> {
        let p = out.join(name);
        let f = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        Ok((p, std::io::BufWriter::new(f)))
    };
    let (events, w) = file("events.jsonl")?;
    formats::write_event_log(w, sim.log())?;
    let (fidelity, w) = file("fidelity.csv")?;
    formats::write_fidelity_csv(w, &sim.fidelity_rows())?;
    let (telemetry, w) = file("telemetry.csv")?;
    formats::write_telemetry_csv(w, sim.telemetry())?;
    let metrics = out.join("metrics.json");
    std::fs::write(&metrics, serde_json::to_string_pretty(&formats::RunReport::new(sim))? + "\n")?;
    let queue = out.join("queue.json");
    std::fs::write(&queue, formats::dump_queue(&sim.scheduler().dump_queue())? + "\n")?;
    let outbox = out.join("outbox");
    let jobs_written = formats::write_outbox(&outbox, sim)?;
    Ok(Artifacts { events, metrics, fidelity, telemetry, queue, outbox, jobs_written })
}
