// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use qhpc_core::survey::SpectrumEstimator;
use rustfft::FftPlanner;

/// Spectrum estimator backed by `rustfft`; any record length works.
#[derive(Clone, Copy, Debug, Default)]
pub struct FftEstimator;

impl SpectrumEstimator for FftEstimator {
    fn magnitudes(&self, values: &[f64], lo: usize, hi: usize) -> Vec<f64> {
        if values.is_empty() || lo > hi {
            return Vec::new();
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
        let hi = hi.min(buf.len() - 1);
        buf[lo.min(hi)..=hi].iter().map(|c| c.norm()).collect()
    }
}
