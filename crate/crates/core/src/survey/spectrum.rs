// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-sided amplitude spectra with a rectangular window.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{SurveyChannel, SurveyError};

/// Amplitude per frequency bin, scaled so a sinusoid of amplitude `A` that
/// completes an integer number of periods in the window reads `A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub bin_spacing: f64,
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Bins as `(frequency, amplitude)`.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies.iter().copied().zip(self.amplitudes.iter().copied())
    }

    /// Amplitude at the bin nearest to `f`.
    pub fn at(&self, f: f64) -> Option<f64> {
        let first = *self.frequencies.first()?;
        let idx = libm::round((f - first) / self.bin_spacing);
        if idx < 0.0 {
            return None;
        }
        self.amplitudes.get(idx as usize).copied()
    }

    /// Loudest bin as `(frequency, amplitude)`.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.bins().fold(None, |best, (f, a)| match best {
            Some((_, b)) if b >= a => best,
            _ => Some((f, a)),
        })
    }
}

/// Computes DFT magnitudes `|X_k|` for bins `lo..=hi` of a real series.
pub trait SpectrumEstimator {
    fn magnitudes(&self, values: &[f64], lo: usize, hi: usize) -> Vec<f64>;
}

/// Direct O(N·bins) DFT from a precomputed twiddle table. Exact, and
/// adequate for short records; the std crate swaps in an FFT.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectDft;

impl SpectrumEstimator for DirectDft {
    fn magnitudes(&self, values: &[f64], lo: usize, hi: usize) -> Vec<f64> {
        let n = values.len();
        let twiddle: Vec<Complex64> = (0..n)
            .map(|j| {
                let angle = -2.0 * PI * j as f64 / n as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        (lo..=hi)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = 0usize;
                for &x in values {
                    acc += twiddle[idx] * x;
                    idx += k;
                    if idx >= n {
                        idx %= n;
                    }
                }
                acc.norm()
            })
            .collect()
    }
}

/// Spectrum of `channel` restricted to `[f_lo, f_hi]`.
///
/// Requires `sample_rate >= 2·f_hi` and a record of at least `10 / f_lo`
/// seconds.
pub fn spectrum<E: SpectrumEstimator + ?Sized>(
    channel: &SurveyChannel,
    f_lo: f64,
    f_hi: f64,
    estimator: &E,
) -> Result<Spectrum, SurveyError> {
    if !(f_lo > 0.0 && f_hi >= f_lo) {
        return Err(SurveyError::BadBand { f_lo, f_hi });
    }
    let fs = channel.sample_rate();
    if fs < 2.0 * f_hi {
        return Err(SurveyError::Nyquist { sample_rate: fs, f_hi, needed: 2.0 * f_hi });
    }
    let duration = channel.window_duration();
    let needed = 10.0 / f_lo;
    if duration < needed {
        return Err(SurveyError::WindowTooShort { duration, needed, f_lo });
    }

    let values: Vec<f64> = channel.values().collect();
    let n = values.len();
    let spacing = fs / n as f64;
    let lo = libm::ceil(f_lo / spacing - 1e-9) as usize;
    let hi = (libm::floor(f_hi / spacing + 1e-9) as usize).min(n / 2);
    if hi < lo {
        return Ok(Spectrum { bin_spacing: spacing, frequencies: Vec::new(), amplitudes: Vec::new() });
    }

    let magnitudes = estimator.magnitudes(&values, lo, hi);
    let amplitudes = (lo..=hi)
        .zip(magnitudes)
        .map(|(k, m)| {
            let single_sided = k != 0 && !(n % 2 == 0 && k == n / 2);
            if single_sided {
                2.0 * m / n as f64
            } else {
                m / n as f64
            }
        })
        .collect();
    Ok(Spectrum {
        bin_spacing: spacing,
        frequencies: (lo..=hi).map(|k| k as f64 * spacing).collect(),
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::{Axis, ChannelKind, Unit};

    fn tone(fs: f64, n: usize, parts: &[(f64, f64)]) -> SurveyChannel {
        SurveyChannel::from_values(
            ChannelKind::AcMagneticAxis,
            Axis::X,
            Unit::MicroTesla,
            fs,
            (0..n).map(|i| {
                let t = i as f64 / fs;
                parts.iter().map(|&(f, a)| a * libm::sin(2.0 * PI * f * t)).sum::<f64>()
            }),
        )
        .unwrap()
    }

    #[test]
    fn pure_tone_reads_its_amplitude() {
        let ch = tone(4000.0, 8000, &[(50.0, 0.6)]);
        let s = spectrum(&ch, 5.0, 1000.0, &DirectDft).unwrap();
        let a = s.at(50.0).unwrap();
        assert!((a - 0.6).abs() < 0.006, "{a}");
        assert_eq!(s.bin_spacing, 0.5);
    }

    #[test]
    fn dc_signal_has_empty_band() {
        let ch = SurveyChannel::from_values(ChannelKind::AcMagneticAxis, Axis::X, Unit::MicroTesla, 2000.0, (0..4000).map(|_| 3.0))
            .unwrap();
        let s = spectrum(&ch, 5.0, 1000.0, &DirectDft).unwrap();
        assert!(s.amplitudes.iter().all(|&a| a < 1e-9));
    }

    #[test]
    fn two_tones_resolve_independently() {
        let ch = tone(2000.0, 4000, &[(10.0, 2.0), (100.0, 3.0)]);
        let s = spectrum(&ch, 5.0, 1000.0, &DirectDft).unwrap();
        assert!((s.at(10.0).unwrap() - 2.0).abs() < 0.02);
        assert!((s.at(100.0).unwrap() - 3.0).abs() < 0.03);
    }

    #[test]
    fn nyquist_and_window_checks() {
        let ch = tone(1000.0, 2000, &[(50.0, 1.0)]);
        assert!(matches!(spectrum(&ch, 5.0, 1000.0, &DirectDft), Err(SurveyError::Nyquist { .. })));
        let short = tone(4000.0, 100, &[(50.0, 1.0)]);
        assert!(matches!(spectrum(&short, 5.0, 1000.0, &DirectDft), Err(SurveyError::WindowTooShort { .. })));
    }
}
