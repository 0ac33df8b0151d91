// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end operations scenario: the twin, facility, scheduler and
//! telemetry driven by one event loop.

mod config;
mod event;
mod run;

use alloc::string::String;

use thiserror::Error;

pub use config::{RoomModel, RoomStep, ScenarioConfig, TraceEntry, SCHEMA_VERSION};
pub use event::Ev;
pub use run::{FidelityRow, Simulation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}
