// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;
use crate::twin::{Circuit, OutputFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u64);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "job-{}", self.0)
    }
}

/// Where a submission came from. Remote jobs go through the asynchronous
/// queue; jobs from inside the HPC system take the session lane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Remote,
    Hpc,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Remote => "remote",
            Origin::Hpc => "hpc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Mapped,
    Running,
    Done,
    Failed,
    Cancelled,
}

impl JobState {
    pub fn as_str(self) -> &'static str {
        match self {
            JobState::Queued => "queued",
            JobState::Mapped => "mapped",
            JobState::Running => "running",
            JobState::Done => "done",
            JobState::Failed => "failed",
            JobState::Cancelled => "cancelled",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed | JobState::Cancelled)
    }

    /// Forward moves, plus the two ways back into the queue: operator
    /// resubmission of a failed job and an outage interrupting a job.
    pub fn can_become(self, to: JobState) -> bool {
        use JobState::*;
        match (self, to) {
            (Failed, Queued) => true,
            (Mapped | Running, Queued) => true,
            (from, _) if from.is_terminal() => false,
            (_, Cancelled | Failed) => true,
            (Queued, Mapped) | (Mapped, Running) | (Running, Done) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobRequest {
    pub origin: Origin,
    pub circuit: Circuit,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default)]
    pub priority: i32,
}

fn default_format() -> OutputFormat {
    OutputFormat::Histogram
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub origin: Origin,
    pub circuit: Circuit,
    pub format: OutputFormat,
    pub priority: i32,
    pub arrival: SimTime,
    pub state: JobState,
    /// Set when an outage sent the job back to the queue.
    #[serde(default)]
    pub restarted: bool,
    #[serde(default)]
    pub started: Option<SimTime>,
    #[serde(default)]
    pub finished: Option<SimTime>,
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub session: Option<u64>,
}
