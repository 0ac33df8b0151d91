// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Site-survey ingestion and acceptance checks.
//!
//! Channels are timestamped sensor series. Each acceptance criterion turns
//! one or more channels into a [`CriterionResult`]; [`evaluate_site`]
//! combines them with the siting rules into a [`SiteReport`].

mod aweight;
mod criteria;
mod site;
mod spectrum;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aweight::a_weighting_db;
pub use criteria::{
    check_ac_magnetic, check_dc_magnetic, check_humidity, check_sound, check_temperature, check_vibration,
    limits,
};
pub use site::{evaluate_site, SiteReport, Siting};
pub use spectrum::{spectrum, DirectDft, Spectrum, SpectrumEstimator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    DcMagneticAxis,
    AcMagneticAxis,
    Vibration,
    SoundPressure,
    Temperature,
    Humidity,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 6] = [
        ChannelKind::DcMagneticAxis,
        ChannelKind::AcMagneticAxis,
        ChannelKind::Vibration,
        ChannelKind::SoundPressure,
        ChannelKind::Temperature,
        ChannelKind::Humidity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::DcMagneticAxis => "dc_magnetic_axis",
            ChannelKind::AcMagneticAxis => "ac_magnetic_axis",
            ChannelKind::Vibration => "vibration",
            ChannelKind::SoundPressure => "sound_pressure",
            ChannelKind::Temperature => "temperature",
            ChannelKind::Humidity => "humidity",
        }
    }

    pub fn accepts(self, unit: Unit) -> bool {
        matches!(
            (self, unit),
            (ChannelKind::DcMagneticAxis | ChannelKind::AcMagneticAxis, Unit::MicroTesla)
                | (ChannelKind::Vibration, Unit::MicroMetrePerSecond)
                | (ChannelKind::SoundPressure, Unit::Pascal | Unit::DecibelSpl)
                | (ChannelKind::Temperature, Unit::Celsius)
                | (ChannelKind::Humidity, Unit::PercentRh)
        )
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = SurveyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SurveyError::UnknownKind(String::from(s)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
    /// Scalar channel.
    None,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
            Axis::None => "-",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = SurveyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            "-" | "" => Ok(Axis::None),
            other => Err(SurveyError::UnknownAxis(String::from(other))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "µT")]
    MicroTesla,
    #[serde(rename = "µm/s")]
    MicroMetrePerSecond,
    #[serde(rename = "Pa")]
    Pascal,
    #[serde(rename = "dB-SPL")]
    DecibelSpl,
    #[serde(rename = "°C")]
    Celsius,
    #[serde(rename = "%RH")]
    PercentRh,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::MicroTesla => "µT",
            Unit::MicroMetrePerSecond => "µm/s",
            Unit::Pascal => "Pa",
            Unit::DecibelSpl => "dB-SPL",
            Unit::Celsius => "°C",
            Unit::PercentRh => "%RH",
        }
    }
}

impl FromStr for Unit {
    type Err = SurveyError;

    /// Accepts the canonical spelling and an ASCII fallback (`uT`, `um/s`, `C`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "µT" | "μT" | "uT" => Ok(Unit::MicroTesla),
            "µm/s" | "μm/s" | "um/s" => Ok(Unit::MicroMetrePerSecond),
            "Pa" => Ok(Unit::Pascal),
            "dB-SPL" | "dBSPL" | "dB" => Ok(Unit::DecibelSpl),
            "°C" | "C" | "degC" => Ok(Unit::Celsius),
            "%RH" | "%" | "RH" => Ok(Unit::PercentRh),
            other => Err(SurveyError::UnknownUnit(String::from(other))),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurveyError {
    #[error("unknown channel kind `{0}`")]
    UnknownKind(String),
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("unit {unit} does not match channel kind {kind}")]
    UnitMismatch { kind: ChannelKind, unit: Unit },
    #[error("sample rate must be positive, got {0}")]
    BadSampleRate(f64),
    #[error("channel has no samples")]
    Empty,
    #[error("timestamps not strictly increasing at row {row} (t={time})")]
    NonMonotone { row: usize, time: f64 },
    #[error("non-finite sample at row {row}")]
    NonFinite { row: usize },
    #[error("sample rate {sample_rate} Hz cannot resolve {f_hi} Hz (needs ≥ {needed} Hz)")]
    Nyquist { sample_rate: f64, f_hi: f64, needed: f64 },
    #[error("record of {duration} s is shorter than the {needed} s needed to resolve {f_lo} Hz")]
    WindowTooShort { duration: f64, needed: f64, f_lo: f64 },
    #[error("invalid band [{f_lo}, {f_hi}] Hz")]
    BadBand { f_lo: f64, f_hi: f64 },
    #[error("{kind}: axis {axis} missing")]
    MissingAxis { kind: ChannelKind, axis: Axis },
    #[error("expected a {expected} channel, got {got}")]
    WrongKind { expected: ChannelKind, got: ChannelKind },
    #[error("malformed channel document: {0}")]
    Format(String),
}

/// A timestamped sensor series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyChannel {
    kind: ChannelKind,
    axis: Axis,
    unit: Unit,
    sample_rate: f64,
    samples: Vec<(f64, f64)>,
}

impl SurveyChannel {
    pub fn new(
        kind: ChannelKind,
        axis: Axis,
        unit: Unit,
        sample_rate: f64,
        samples: Vec<(f64, f64)>,
    ) -> Result<Self, SurveyError> {
        if !kind.accepts(unit) {
            return Err(SurveyError::UnitMismatch { kind, unit });
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(SurveyError::BadSampleRate(sample_rate));
        }
        if samples.is_empty() {
            return Err(SurveyError::Empty);
        }
        for (row, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(SurveyError::NonFinite { row });
            }
            if row > 0 && t <= samples[row - 1].0 {
                return Err(SurveyError::NonMonotone { row, time: t });
            }
        }
        Ok(SurveyChannel { kind, axis, unit, sample_rate, samples })
    }

    /// Uniformly sampled series starting at t=0.
    pub fn from_values(
        kind: ChannelKind,
        axis: Axis,
        unit: Unit,
        sample_rate: f64,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self, SurveyError> {
        let samples = values.into_iter().enumerate().map(|(i, v)| (i as f64 / sample_rate, v)).collect();
        Self::new(kind, axis, unit, sample_rate, samples)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Span between first and last timestamp.
    pub fn span(&self) -> f64 {
        self.samples.last().map_or(0.0, |l| l.0) - self.samples.first().map_or(0.0, |f| f.0)
    }

    /// Length of the uniformly sampled window, `N / sample_rate`.
    pub fn window_duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Same channel with every value scaled by `c`.
    pub fn scaled(&self, c: f64) -> SurveyChannel {
        SurveyChannel {
            samples: self.samples.iter().map(|&(t, v)| (t, v * c)).collect(),
            ..self.clone()
        }
    }
}

/// The acceptance bound a criterion applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Limit {
    /// Strictly below `value`.
    Below { value: f64, unit: &'static str },
    /// Inclusive range.
    Range { lo: f64, hi: f64, unit: &'static str },
    /// At least `value`, inclusive.
    AtLeast { value: f64, unit: &'static str },
}

impl Limit {
    pub fn admits(&self, observed: f64) -> bool {
        match *self {
            Limit::Below { value, .. } => observed < value,
            Limit::Range { lo, hi, .. } => lo <= observed && observed <= hi,
            Limit::AtLeast { value, .. } => observed >= value,
        }
    }
}

/// Verdict of one acceptance criterion.
///
/// `pass` always equals `limit.admits(worst)` except for evaluation failures
/// (insufficient data, missing channel), which never pass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub limit: Limit,
    pub worst: f64,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub(crate) fn judge(criterion: &str, limit: Limit, worst: f64, detail: String) -> Self {
        CriterionResult { criterion: String::from(criterion), pass: limit.admits(worst), limit, worst, detail }
    }

    pub(crate) fn failed(criterion: &str, limit: Limit, detail: String) -> Self {
        CriterionResult { criterion: String::from(criterion), limit, worst: f64::NAN, pass: false, detail }
    }
}
