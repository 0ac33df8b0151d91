// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::criteria::{self, describe, limits};
use super::spectrum::SpectrumEstimator;
use super::{ChannelKind, CriterionResult, Limit, SurveyChannel};

/// Physical siting facts gathered alongside the sensor recordings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Siting {
    pub path_width_cm: f64,
    pub floor_capacity_kg_per_m2: f64,
    pub distance_to_transmitter_m: f64,
    pub distance_to_fluorescent_m: f64,
    /// Operator attestation that humidity stayed non-condensing; %RH alone
    /// cannot show it.
    #[serde(default)]
    pub non_condensing_attested: bool,
}

pub const MIN_PATH_WIDTH_CM: f64 = 90.0;
pub const MIN_FLOOR_CAPACITY_KG_PER_M2: f64 = 1000.0;
pub const MIN_TRANSMITTER_DISTANCE_M: f64 = 100.0;
pub const MIN_FLUORESCENT_DISTANCE_M: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteReport {
    pub criteria: Vec<CriterionResult>,
    pub siting: Vec<CriterionResult>,
    /// Channel kinds with no recording, e.g. `"sound_pressure absent"`.
    pub missing: Vec<String>,
    pub non_condensing_attested: bool,
    pub pass: bool,
}

impl SiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CriterionResult> {
        self.criteria.iter().chain(&self.siting).filter(|c| !c.pass)
    }
}

fn minimum(name: &str, value: f64, min: f64, unit: &'static str) -> CriterionResult {
    CriterionResult::judge(name, Limit::AtLeast { value: min, unit }, value, format!("{value} {unit} (minimum {min} {unit})"))
}

fn placeholder(kind: ChannelKind) -> (&'static str, Limit) {
    let below = |value, unit| Limit::Below { value, unit };
    match kind {
        ChannelKind::DcMagneticAxis => ("dc_magnetic", below(limits::DC_MAGNETIC_UT, "µT")),
        ChannelKind::AcMagneticAxis => ("ac_magnetic", below(limits::AC_MAGNETIC_PP_UT, "µT p-p")),
        ChannelKind::Vibration => ("vibration", below(limits::VIBRATION_RMS_UM_S, "µm/s RMS")),
        ChannelKind::SoundPressure => ("sound_pressure", below(limits::SOUND_DBA, "dBA")),
        ChannelKind::Temperature => ("temperature_stability", below(limits::TEMPERATURE_DEVIATION_C, "°C")),
        ChannelKind::Humidity => {
            let (lo, hi) = limits::HUMIDITY_RH;
            ("humidity", Limit::Range { lo, hi, unit: "%RH" })
        }
    }
}

/// Evaluates every channel criterion and siting rule. The verdict is the
/// AND of all results and fails when any channel kind is absent.
pub fn evaluate_site<E: SpectrumEstimator + ?Sized>(
    channels: &[SurveyChannel],
    siting: &Siting,
    estimator: &E,
) -> SiteReport {
    let mut results = Vec::new();
    let mut missing = Vec::new();

    for kind in ChannelKind::ALL {
        let of_kind: Vec<&SurveyChannel> = channels.iter().filter(|c| c.kind() == kind).collect();
        let (name, limit) = placeholder(kind);
        if of_kind.is_empty() {
            missing.push(format!("{kind} absent"));
            results.push(CriterionResult::failed(name, limit, format!("{kind} absent")));
            continue;
        }
        let outcome = match kind {
            ChannelKind::DcMagneticAxis => criteria::check_dc_magnetic(&of_kind).map(|r| alloc::vec![r]),
            ChannelKind::AcMagneticAxis => criteria::check_ac_magnetic(&of_kind, estimator).map(|r| alloc::vec![r]),
            ChannelKind::Vibration => criteria::check_vibration(&of_kind, estimator).map(|r| alloc::vec![r]),
            ChannelKind::SoundPressure => criteria::check_sound(of_kind[0], estimator).map(|r| alloc::vec![r]),
            ChannelKind::Temperature => criteria::check_temperature(of_kind[0]).map(|r| r.to_vec()),
            ChannelKind::Humidity => criteria::check_humidity(of_kind[0]).map(|r| alloc::vec![r]),
        };
        match outcome {
            Ok(rs) => results.extend(rs),
            Err(e) => results.push(CriterionResult::failed(name, limit, describe(&e))),
        }
    }

    let siting_results = alloc::vec![
        minimum("access_path_width", siting.path_width_cm, MIN_PATH_WIDTH_CM, "cm"),
        minimum("floor_capacity", siting.floor_capacity_kg_per_m2, MIN_FLOOR_CAPACITY_KG_PER_M2, "kg/m²"),
        minimum("transmitter_distance", siting.distance_to_transmitter_m, MIN_TRANSMITTER_DISTANCE_M, "m"),
        minimum("fluorescent_distance", siting.distance_to_fluorescent_m, MIN_FLUORESCENT_DISTANCE_M, "m"),
    ];

    let pass = missing.is_empty() && results.iter().chain(&siting_results).all(|r| r.pass);
    SiteReport {
        criteria: results,
        siting: siting_results,
        missing,
        non_condensing_attested: siting.non_condensing_attested,
        pass,
    }
}
