// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channel CSV documents.
//!
//! ```text
//! # kind=humidity axis=- unit=%RH sample_rate_hz=1
//! timestamp_s,value
//! 0,45.0
//! ```
//!
//! The column header line is optional.

use std::path::{Path, PathBuf};

use anyhow::Context;
use qhpc_core::survey::{Axis, ChannelKind, Siting, SurveyChannel, SurveyError, Unit};

fn format_err(msg: impl Into<String>) -> SurveyError {
    SurveyError::Format(msg.into())
}

pub fn load_channel(doc: &str) -> Result<SurveyChannel, SurveyError> {
    let mut lines = doc.lines();
    let header = lines.next().ok_or_else(|| format_err("empty document"))?;
    let header = header.trim().strip_prefix('#').ok_or_else(|| format_err("line 1 must start with `#`"))?;
    let (mut kind, mut axis, mut unit, mut rate) = (None, None, None, None);
    for field in header.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| format_err(format!("bad header field `{field}`")))?;
        match k {
            "kind" => kind = Some(v.parse::<ChannelKind>()?),
            "axis" => axis = Some(v.parse::<Axis>()?),
            "unit" => unit = Some(v.parse::<Unit>()?),
            "sample_rate_hz" => {
                rate = Some(v.parse::<f64>().map_err(|_| format_err(format!("bad sample_rate_hz `{v}`")))?)
            }
            other => return Err(format_err(format!("unknown header field `{other}`"))),
        }
    }
    let kind = kind.ok_or_else(|| format_err("header lacks kind"))?;
    let unit = unit.ok_or_else(|| format_err("header lacks unit"))?;
    let rate = rate.ok_or_else(|| format_err("header lacks sample_rate_hz"))?;
    let axis = axis.unwrap_or(Axis::None);

    let body: String = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(body.as_bytes());
    let mut samples = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format_err(e.to_string()))?;
        if rec.len() == 0 || (rec.len() == 1 && rec[0].is_empty()) {
            continue;
        }
        if i == 0 && rec.get(0) == Some("timestamp_s") {
            continue;
        }
        if rec.len() != 2 {
            return Err(format_err(format!("row {} has {} fields, expected 2", i + 2, rec.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format_err(format!("row {}: `{s}` is not a number", i + 2)));
        samples.push((num(&rec[0])?, num(&rec[1])?));
    }
    SurveyChannel::new(kind, axis, unit, rate, samples)
}

pub fn channel_to_csv(ch: &SurveyChannel) -> String {
    let mut out = format!(
        "# kind={} axis={} unit={} sample_rate_hz={}\ntimestamp_s,value\n",
        ch.kind(),
        ch.axis().as_str(),
        ch.unit().as_str(),
        ch.sample_rate()
    );
    for (t, v) in ch.samples() {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Every `*.csv` in `dir`, by file name.
pub fn load_dir(dir: &Path) -> anyhow::Result<Vec<(PathBuf, SurveyChannel)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let ch = load_channel(&text).with_context(|| format!("parsing {}", p.display()))?;
            Ok((p, ch))
        })
        .collect()
}

pub fn load_siting(path: &Path) -> anyhow::Result<Siting> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
