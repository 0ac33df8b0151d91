// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! The six channel acceptance checks.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::spectrum::{spectrum, SpectrumEstimator};
use super::{a_weighting_db, Axis, ChannelKind, CriterionResult, Limit, SurveyChannel, SurveyError, Unit};
use crate::mathx::db_power;
use crate::time::HOUR;

pub mod limits {
    pub const DC_MAGNETIC_UT: f64 = 100.0;
    pub const AC_MAGNETIC_PP_UT: f64 = 1.0;
    pub const AC_BAND_HZ: (f64, f64) = (5.0, 1000.0);
    pub const VIBRATION_RMS_UM_S: f64 = 400.0;
    pub const VIBRATION_BAND_HZ: (f64, f64) = (1.0, 200.0);
    pub const SOUND_DBA: f64 = 80.0;
    pub const SOUND_BAND_HZ: (f64, f64) = (20.0, 20_000.0);
    pub const SOUND_REFERENCE_PA: f64 = 20e-6;
    pub const TEMPERATURE_DEVIATION_C: f64 = 1.0;
    pub const TEMPERATURE_WINDOW_S: f64 = 12.0 * super::HOUR;
    pub const SET_POINT_C: (f64, f64) = (20.0, 25.0);
    pub const HUMIDITY_RH: (f64, f64) = (25.0, 60.0);
    /// Minimum record length for temperature and humidity.
    pub const MIN_CLIMATE_RECORD_S: f64 = 25.0 * super::HOUR;
}

fn expect_kind(ch: &SurveyChannel, expected: ChannelKind) -> Result<(), SurveyError> {
    if ch.kind() == expected {
        Ok(())
    } else {
        Err(SurveyError::WrongKind { expected, got: ch.kind() })
    }
}

fn three_axes<'a>(
    channels: &[&'a SurveyChannel],
    kind: ChannelKind,
) -> Result<[&'a SurveyChannel; 3], SurveyError> {
    let find = |axis: Axis| {
        channels
            .iter()
            .copied()
            .find(|c| c.kind() == kind && c.axis() == axis)
            .ok_or(SurveyError::MissingAxis { kind, axis })
    };
    Ok([find(Axis::X)?, find(Axis::Y)?, find(Axis::Z)?])
}

/// Range verdicts use the value farthest from the range centre as "worst",
/// so `pass == limit.admits(worst)` holds for ranges too.
fn farthest_from_centre(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    values.fold(mid, |w, v| if (v - mid).abs() > (w - mid).abs() { v } else { w })
}

/// DC field: every |sample| below 100 µT on X, Y and Z.
pub fn check_dc_magnetic(channels: &[&SurveyChannel]) -> Result<CriterionResult, SurveyError> {
    let axes = three_axes(channels, ChannelKind::DcMagneticAxis)?;
    let mut worst = 0.0f64;
    let mut at = Axis::X;
    for ch in axes {
        for v in ch.values() {
            if v.abs() > worst {
                worst = v.abs();
                at = ch.axis();
            }
        }
    }
    Ok(CriterionResult::judge(
        "dc_magnetic",
        Limit::Below { value: limits::DC_MAGNETIC_UT, unit: "µT" },
        worst,
        format!("max |B| {worst:.3} µT on axis {}", at.as_str()),
    ))
}

/// AC field: per-bin peak-to-peak amplitude (twice the sinusoid amplitude)
/// below 1 µT over 5–1000 Hz on every axis.
pub fn check_ac_magnetic<E: SpectrumEstimator + ?Sized>(
    channels: &[&SurveyChannel],
    estimator: &E,
) -> Result<CriterionResult, SurveyError> {
    let axes = three_axes(channels, ChannelKind::AcMagneticAxis)?;
    let (lo, hi) = limits::AC_BAND_HZ;
    let mut worst = (0.0f64, 0.0f64, Axis::X);
    for ch in axes {
        let s = spectrum(ch, lo, hi, estimator)?;
        if let Some((f, a)) = s.peak() {
            if 2.0 * a > worst.0 {
                worst = (2.0 * a, f, ch.axis());
            }
        }
    }
    Ok(CriterionResult::judge(
        "ac_magnetic",
        Limit::Below { value: limits::AC_MAGNETIC_PP_UT, unit: "µT p-p" },
        worst.0,
        format!("per-bin limit; peak {:.4} µT p-p at {:.2} Hz on axis {}", worst.0, worst.1, worst.2.as_str()),
    ))
}

/// Floor vibration: per-bin RMS (amplitude / √2) below 400 µm/s over
/// 1–200 Hz, applied to each supplied vibration channel.
pub fn check_vibration<E: SpectrumEstimator + ?Sized>(
    channels: &[&SurveyChannel],
    estimator: &E,
) -> Result<CriterionResult, SurveyError> {
    let (lo, hi) = limits::VIBRATION_BAND_HZ;
    if channels.is_empty() {
        return Err(SurveyError::MissingAxis { kind: ChannelKind::Vibration, axis: Axis::None });
    }
    let mut worst = (0.0f64, 0.0f64, Axis::None);
    for ch in channels {
        expect_kind(ch, ChannelKind::Vibration)?;
        let s = spectrum(ch, lo, hi, estimator)?;
        if let Some((f, a)) = s.peak() {
            let rms = a / core::f64::consts::SQRT_2;
            if rms > worst.0 {
                worst = (rms, f, ch.axis());
            }
        }
    }
    Ok(CriterionResult::judge(
        "vibration",
        Limit::Below { value: limits::VIBRATION_RMS_UM_S, unit: "µm/s RMS" },
        worst.0,
        format!(
            "peak {:.2} µm/s RMS at {:.2} Hz ({} channel(s), axis {})",
            worst.0,
            worst.1,
            channels.len(),
            worst.2.as_str()
        ),
    ))
}

/// Sound: A-weighted band power over 20 Hz–20 kHz, in dBA re 20 µPa,
/// below 80 dBA.
///
/// A `dB-SPL` channel holds sound-level-meter readings instead of a
/// waveform; its loudest reading is compared directly.
pub fn check_sound<E: SpectrumEstimator + ?Sized>(
    ch: &SurveyChannel,
    estimator: &E,
) -> Result<CriterionResult, SurveyError> {
    expect_kind(ch, ChannelKind::SoundPressure)?;
    let limit = Limit::Below { value: limits::SOUND_DBA, unit: "dBA" };
    if ch.unit() == Unit::DecibelSpl {
        let worst = ch.values().fold(f64::NEG_INFINITY, f64::max);
        return Ok(CriterionResult::judge("sound_pressure", limit, worst, format!("max meter reading {worst:.2} dB")));
    }
    let (lo, hi) = limits::SOUND_BAND_HZ;
    let s = spectrum(ch, lo, hi, estimator)?;
    let power: f64 = s
        .bins()
        .map(|(f, a)| {
            let mean_square = 0.5 * a * a;
            mean_square * libm::pow(10.0, a_weighting_db(f) / 10.0)
        })
        .sum();
    let level = db_power(power / (limits::SOUND_REFERENCE_PA * limits::SOUND_REFERENCE_PA));
    Ok(CriterionResult::judge("sound_pressure", limit, level, format!("integrated level {level:.2} dBA")))
}

fn insufficient(name: &str, limit: Limit, ch: &SurveyChannel) -> Option<CriterionResult> {
    (ch.span() < limits::MIN_CLIMATE_RECORD_S).then(|| {
        CriterionResult::failed(
            name,
            limit,
            format!(
                "insufficient duration: {:.2} h recorded, {:.0} h required",
                ch.span() / HOUR,
                limits::MIN_CLIMATE_RECORD_S / HOUR
            ),
        )
    })
}

/// Per-window statistics of the 12-hour temperature scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct WindowStat {
    pub start: f64,
    pub mean: f64,
    pub deviation: f64,
}

/// Every window `[t_i, t_i + 12 h]` that fits inside the record, stride one
/// sample. Prefix sums give the mean and monotone deques give the extremes.
pub(crate) fn temperature_windows(samples: &[(f64, f64)]) -> Vec<WindowStat> {
    let n = samples.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &(_, v) in samples {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + v);
    }
    let t_last = samples.last().map_or(0.0, |s| s.0);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::new();
    let mut end = 0usize;
    for start in 0..n {
        let t0 = samples[start].0;
        if t0 + limits::TEMPERATURE_WINDOW_S > t_last + 1e-9 {
            break;
        }
        while end < n && samples[end].0 <= t0 + limits::TEMPERATURE_WINDOW_S + 1e-9 {
            let v = samples[end].1;
            while maxq.back().is_some_and(|&j| samples[j].1 <= v) {
                maxq.pop_back();
            }
            maxq.push_back(end);
            while minq.back().is_some_and(|&j| samples[j].1 >= v) {
                minq.pop_back();
            }
            minq.push_back(end);
            end += 1;
        }
        while maxq.front().is_some_and(|&j| j < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < start) {
            minq.pop_front();
        }
        let count = (end - start) as f64;
        let mean = (prefix[end] - prefix[start]) / count;
        let hi = samples[maxq[0]].1;
        let lo = samples[minq[0]].1;
        out.push(WindowStat { start: t0, mean, deviation: (hi - mean).max(mean - lo) });
    }
    out
}

/// Temperature stability and set point, reported as two results: every
/// 12-hour window stays strictly within ±1 °C of its mean, and every
/// window mean lies in [20, 25] °C.
pub fn check_temperature(ch: &SurveyChannel) -> Result<[CriterionResult; 2], SurveyError> {
    expect_kind(ch, ChannelKind::Temperature)?;
    let stability = Limit::Below { value: limits::TEMPERATURE_DEVIATION_C, unit: "°C" };
    let (lo, hi) = limits::SET_POINT_C;
    let set_point = Limit::Range { lo, hi, unit: "°C" };
    if let (Some(a), Some(b)) = (
        insufficient("temperature_stability", stability, ch),
        insufficient("temperature_set_point", set_point, ch),
    ) {
        return Ok([a, b]);
    }
    let windows = temperature_windows(ch.samples());
    let worst_dev = windows
        .iter()
        .copied()
        .fold(WindowStat { start: 0.0, mean: 0.0, deviation: 0.0 }, |w, s| if s.deviation > w.deviation { s } else { w });
    let worst_sp = farthest_from_centre(windows.iter().map(|w| w.mean), lo, hi);
    Ok([
        CriterionResult::judge(
            "temperature_stability",
            stability,
            worst_dev.deviation,
            format!(
                "max deviation {:.3} °C from window mean {:.3} °C (window starting t={:.0} s, {} windows)",
                worst_dev.deviation,
                worst_dev.mean,
                worst_dev.start,
                windows.len()
            ),
        ),
        CriterionResult::judge(
            "temperature_set_point",
            set_point,
            worst_sp,
            format!("extreme 12 h set point {worst_sp:.3} °C"),
        ),
    ])
}

/// Relative humidity within [25, 60] %RH for the whole record.
pub fn check_humidity(ch: &SurveyChannel) -> Result<CriterionResult, SurveyError> {
    expect_kind(ch, ChannelKind::Humidity)?;
    let (lo, hi) = limits::HUMIDITY_RH;
    let limit = Limit::Range { lo, hi, unit: "%RH" };
    if let Some(r) = insufficient("humidity", limit, ch) {
        return Ok(r);
    }
    let worst = farthest_from_centre(ch.values(), lo, hi);
    let at = ch.samples().iter().find(|s| s.1 == worst).map_or(0.0, |s| s.0);
    Ok(CriterionResult::judge("humidity", limit, worst, format!("extreme reading {worst:.2} %RH at t={at:.0} s")))
}

pub(crate) fn describe(err: &SurveyError) -> String {
    format!("{err}")
}
