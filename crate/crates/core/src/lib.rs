// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic digital twin of a 20-qubit superconducting quantum computer
//! hosted in an HPC center.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithm of the
//! stack: the discrete-event engine, site-survey signal analysis, the QPU
//! twin with its noisy statevector executor, the telemetry store, the
//! facility and cryostat recovery model, the calibration-aware scheduler
//! with its fidelity-aware mapper, and the scenario simulation that ties
//! them together. File formats, the CLI and the HTTP surface live in the
//! `qhpc` companion crate.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod facility;
pub mod mathx;
pub mod rng;
pub mod scenario;
pub mod scheduler;
pub mod sim;
pub mod survey;
pub mod telemetry;
pub mod time;
pub mod twin;

pub use rng::RngStream;
pub use sim::{Engine, EventId, EventKind, EventQueue, LogEntry, SimError, SimEvent};
pub use time::SimTime;
