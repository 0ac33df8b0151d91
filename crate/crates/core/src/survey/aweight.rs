// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

/// A-weighting gain in dB at `f` Hz (analytic IEC 61672 curve, normalised
/// to 0 dB at 1 kHz).
pub fn a_weighting_db(f: f64) -> f64 {
    if f <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let f2 = f * f;
    let c1 = 20.598_997 * 20.598_997;
    let c2 = 107.652_65 * 107.652_65;
    let c3 = 737.862_23 * 737.862_23;
    let c4 = 12_194.217 * 12_194.217;
    let ra = c4 * f2 * f2 / ((f2 + c1) * libm::sqrt((f2 + c2) * (f2 + c3)) * (f2 + c4));
    20.0 * libm::log10(ra) + 2.0
}
