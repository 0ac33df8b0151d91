// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{
    FacilityError, AMBIENT_K, BASE_TEMP_K, MAX_COOLDOWN_S, MIN_COOLDOWN_S, WARM_THRESHOLD_K, WARM_THRESHOLD_TIME_S,
};

/// Warm-up time constant chosen so that `T(120 s) = 1 K` from base.
pub fn tau_warm() -> f64 {
    WARM_THRESHOLD_TIME_S / libm::log((AMBIENT_K - BASE_TEMP_K) / (AMBIENT_K - WARM_THRESHOLD_K))
}

/// Advances the stage temperature by `dt` seconds.
///
/// Without cooling the stage relaxes toward ambient with `tau_warm`; with
/// cooling it relaxes toward base with `recool_tau`. Both laws compose, so
/// stepping in pieces equals one step over the sum.
pub fn thermal_step(temp: f64, dt: f64, cooling: bool, recool_tau: f64) -> f64 {
    if dt <= 0.0 {
        return temp;
    }
    if cooling {
        BASE_TEMP_K + (temp - BASE_TEMP_K) * libm::exp(-dt / recool_tau)
    } else {
        AMBIENT_K - (AMBIENT_K - temp) * libm::exp(-dt / tau_warm())
    }
}

/// Seconds without cooling for the stage to go from `from` to `to` kelvin,
/// or `None` if `to` is unreachable.
pub fn warm_time_to(from: f64, to: f64) -> Option<f64> {
    if to <= from {
        return Some(0.0);
    }
    if to >= AMBIENT_K {
        return None;
    }
    Some(tau_warm() * libm::log((AMBIENT_K - from) / (AMBIENT_K - to)))
}

/// Cooldown after a warm-up to `peak` kelvin: 2 days at 1 K rising linearly
/// to 5 days at ambient.
pub fn cooldown_duration(peak: f64) -> Result<f64, FacilityError> {
    if !(peak > WARM_THRESHOLD_K) {
        return Err(FacilityError::NoCooldown { peak, threshold: WARM_THRESHOLD_K });
    }
    let frac = ((peak - WARM_THRESHOLD_K) / (AMBIENT_K - WARM_THRESHOLD_K)).clamp(0.0, 1.0);
    Ok(MIN_COOLDOWN_S + frac * (MAX_COOLDOWN_S - MIN_COOLDOWN_S))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::DAY;

    #[test]
    fn two_minutes_reaches_one_kelvin() {
        let t = thermal_step(BASE_TEMP_K, 120.0, false, 60.0);
        assert!((t - 1.0).abs() < 1e-9, "{t}");
        assert!((warm_time_to(BASE_TEMP_K, 1.0).unwrap() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn one_minute_stays_below() {
        let t = thermal_step(BASE_TEMP_K, 60.0, false, 60.0);
        let closed = AMBIENT_K - (AMBIENT_K - BASE_TEMP_K) * libm::exp(-60.0 / tau_warm());
        assert!(t < 1.0);
        assert_eq!(t, closed);
    }

    #[test]
    fn zero_step_is_identity() {
        assert_eq!(thermal_step(0.4, 0.0, false, 60.0), 0.4);
        assert_eq!(thermal_step(0.4, 0.0, true, 60.0), 0.4);
    }

    #[test]
    fn steps_compose() {
        let a = thermal_step(thermal_step(BASE_TEMP_K, 50.0, false, 60.0), 70.0, false, 60.0);
        let b = thermal_step(BASE_TEMP_K, 120.0, false, 60.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cooldown_range() {
        assert_eq!(cooldown_duration(295.0).unwrap(), 5.0 * DAY);
        assert!((cooldown_duration(1.0 + 1e-9).unwrap() - 2.0 * DAY).abs() < 1.0);
        assert!((cooldown_duration(148.0).unwrap() - 3.5 * DAY).abs() < 1e-6);
        assert_eq!(cooldown_duration(400.0).unwrap(), 5.0 * DAY);
        assert!(cooldown_duration(1.0).is_err());
        assert!(cooldown_duration(0.5).is_err());
    }
}
