// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Local HTTP intake and telemetry endpoints.
//!
//! Handlers lock the shared [`Simulation`], so submissions are serialized
//! into the event loop and every read sees one consistent instant.

use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qhpc_core::scenario::Simulation;
use qhpc_core::scheduler::{JobId, JobRequest, Origin};
use qhpc_core::telemetry::{device_snapshot, Aggregation};
use qhpc_core::time::SimTime;
use qhpc_core::twin::{Circuit, OutputFormat};
use serde::Deserialize;
use serde_json::json;

use crate::formats::JobRecord;

pub type Shared = Arc<Mutex<Simulation>>;

pub fn router(sim: Shared) -> Router {
    Router::new()
        .route("/properties", get(properties))
        .route("/metrics", get(metrics))
        .route("/jobs", post(submit))
        .route("/jobs/{id}", get(job))
        .with_state(sim)
}

fn error(status: StatusCode, msg: impl std::fmt::Display) -> Response {
    (status, Json(json!({ "error": msg.to_string() }))).into_response()
}

async fn properties(State(sim): State<Shared>) -> Response {
    let mut sim = sim.lock().expect("simulation lock");
    Json(device_snapshot(sim.twin_now())).into_response()
}

#[derive(Deserialize)]
struct MetricsQuery {
    key: String,
    t0: Option<f64>,
    t1: Option<f64>,
    #[serde(default = "mean")]
    agg: Aggregation,
}

fn mean() -> Aggregation {
    Aggregation::Mean
}

async fn metrics(State(sim): State<Shared>, Query(q): Query<MetricsQuery>) -> Response {
    let sim = sim.lock().expect("simulation lock");
    let t1 = q.t1.unwrap_or(sim.now().secs());
    match sim.telemetry().query_range(&q.key, q.t0.unwrap_or(0.0), t1, q.agg) {
        Ok(r) => Json(json!({ "key": q.key, "agg": q.agg, "result": r })).into_response(),
        Err(e @ qhpc_core::telemetry::TelemetryError::UnknownKey(_)) => error(StatusCode::NOT_FOUND, e),
        Err(e) => error(StatusCode::BAD_REQUEST, e),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Submission {
    #[serde(default = "remote")]
    origin: Origin,
    circuit: Circuit,
    #[serde(default = "histogram")]
    format: OutputFormat,
    #[serde(default)]
    priority: i32,
}

fn remote() -> Origin {
    Origin::Remote
}

fn histogram() -> OutputFormat {
    OutputFormat::Histogram
}

async fn submit(State(sim): State<Shared>, Json(s): Json<Submission>) -> Response {
    let mut sim = sim.lock().expect("simulation lock");
    if sim.is_finished() {
        return error(StatusCode::SERVICE_UNAVAILABLE, "simulation has reached its horizon");
    }
    let req = JobRequest { origin: s.origin, circuit: s.circuit, format: s.format, priority: s.priority };
    let id = match sim.submit_external(req) {
        Ok(id) => id,
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e),
    };
    let now = sim.now();
    if let Err(e) = sim.run_until(now) {
        return error(StatusCode::INTERNAL_SERVER_ERROR, e);
    }
    let state = sim.scheduler().job(id).map(|j| j.state);
    (StatusCode::ACCEPTED, Json(json!({ "id": id.to_string(), "state": state }))).into_response()
}

fn parse_id(s: &str) -> Option<JobId> {
    s.strip_prefix("job-").unwrap_or(s).parse().ok().map(JobId)
}

async fn job(State(sim): State<Shared>, Path(id): Path<String>) -> Response {
    let Some(id) = parse_id(&id) else { return error(StatusCode::BAD_REQUEST, format!("bad job id `{id}`")) };
    let sim = sim.lock().expect("simulation lock");
    match sim.scheduler().job(id) {
        Some(job) => Json(JobRecord::new(job, sim.results().get(&id))).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("{id} not found")),
    }
}

/// Advances the simulation `speed` simulated seconds per wall second until
/// it reaches its horizon.
pub async fn drive(sim: Shared, speed: f64, tick: Duration) {
    let mut interval = tokio::time::interval(tick);
    loop {
        interval.tick().await;
        let mut s = sim.lock().expect("simulation lock");
        if s.is_finished() {
            break;
        }
        let next = SimTime::from_secs(s.now().secs() + speed * tick.as_secs_f64());
        if let Err(e) = s.run_until(next) {
            eprintln!("simulation stopped: {e}");
            break;
        }
    }
}

pub async fn serve(sim: Shared, addr: std::net::SocketAddr, speed: f64) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    tokio::spawn(drive(sim.clone(), speed, Duration::from_millis(100)));
    axum::serve(listener, router(sim)).await?;
    Ok(())
}
