// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! File formats, FFT-backed spectra, the command line and the local HTTP
//! surface around [`qhpc_core`].

pub mod cli;
pub mod fft;
pub mod formats;
pub mod scenario_io;
pub mod server;
pub mod survey_io;

pub use qhpc_core as core;
