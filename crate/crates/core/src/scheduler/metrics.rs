// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::intake::JobCounts;
use super::job::{Job, JobId};
use super::plan::WindowSource;
use crate::facility::CryostatMode;
use crate::time::SimTime;
use crate::twin::CalibrationKind;

/// What holds the device during an occupancy interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Activity {
    Job { job: JobId },
    Calibration { kind: CalibrationKind, source: WindowSource },
    Benchmark,
    Maintenance,
    /// Any non-Operating cryostat mode.
    Recovery { mode: CryostatMode },
}

impl Activity {
    pub fn counts_as_unavailable(&self) -> bool {
        !matches!(self, Activity::Job { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Occupancy {
    #[serde(rename = "start_s")]
    pub start: SimTime,
    #[serde(rename = "end_s")]
    pub end: SimTime,
    pub activity: Activity,
}

impl Occupancy {
    pub fn duration(&self) -> f64 {
        self.end.since(self.start)
    }
}

/// First pair of overlapping intervals (by index into `log`), if any.
pub fn find_overlap(log: &[Occupancy]) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..log.len()).filter(|&i| log[i].duration() > 0.0).collect();
    idx.sort_by(|&a, &b| log[a].start.cmp(&log[b].start).then(a.cmp(&b)));
    idx.windows(2).find(|w| log[w[1]].start < log[w[0]].end).map(|w| (w[0], w[1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpsMetrics {
    pub total_s: f64,
    pub operating_s: f64,
    pub available_s: f64,
    pub job_s: f64,
    pub calibration_s: f64,
    pub maintenance_s: f64,
    pub availability: f64,
    pub utilization: f64,
    pub calibration_fraction: f64,
    pub mean_wait_s: Option<f64>,
    pub median_wait_s: Option<f64>,
    pub submitted: u64,
    pub completed: u64,
    pub failed: u64,
    pub cancelled: u64,
    pub still_queued: u64,
    pub restarted: u64,
}

fn clip(o: &Occupancy, total: f64) -> f64 {
    (o.end.secs().min(total) - o.start.secs().min(total)).max(0.0)
}

/// Availability is Operating time not spent calibrating, benchmarking or in
/// maintenance, over total time. Utilization is job time over Operating
/// time.
pub fn compute_metrics(
    total_s: f64,
    modes: &[(SimTime, CryostatMode)],
    occupancy: &[Occupancy],
    jobs: &[&Job],
    counts: JobCounts,
) -> OpsMetrics {
    let mut operating_s = 0.0;
    for (i, &(t, mode)) in modes.iter().enumerate() {
        let end = modes.get(i + 1).map_or(total_s, |n| n.0.secs()).min(total_s);
        if mode == CryostatMode::Operating {
            operating_s += (end - t.secs().min(total_s)).max(0.0);
        }
    }
    let sum = |pred: &dyn Fn(&Activity) -> bool| -> f64 {
        occupancy.iter().filter(|o| pred(&o.activity)).fold(0.0, |acc, o| acc + clip(o, total_s))
    };
    let job_s = sum(&|a| matches!(a, Activity::Job { .. }));
    let calibration_s = sum(&|a| {
        matches!(a, Activity::Calibration { .. } | Activity::Recovery { mode: CryostatMode::Recalibration })
    });
    let maintenance_s = sum(&|a| matches!(a, Activity::Maintenance));
    let busy_operating = sum(&|a| matches!(a, Activity::Calibration { .. } | Activity::Benchmark | Activity::Maintenance));
    let available_s = (operating_s - busy_operating).max(0.0);

    let mut waits: Vec<f64> = jobs.iter().filter_map(|j| j.started.map(|s| s.since(j.arrival))).collect();
    waits.sort_by(f64::total_cmp);
    let mean_wait_s = (!waits.is_empty()).then(|| waits.iter().sum::<f64>() / waits.len() as f64);
    let median_wait_s = (!waits.is_empty()).then(|| {
        let m = waits.len() / 2;
        if waits.len() % 2 == 1 {
            waits[m]
        } else {
            0.5 * (waits[m - 1] + waits[m])
        }
    });
    let frac = |x: f64, of: f64| if of > 0.0 { (x / of).clamp(0.0, 1.0) } else { 0.0 };
    OpsMetrics {
        total_s,
        operating_s,
        available_s,
        job_s,
        calibration_s,
        maintenance_s,
        availability: frac(available_s, total_s),
        utilization: frac(job_s, operating_s),
        calibration_fraction: frac(calibration_s, total_s),
        mean_wait_s,
        median_wait_s,
        submitted: counts.submitted,
        completed: counts.done,
        failed: counts.failed,
        cancelled: counts.cancelled,
        still_queued: counts.queued,
        restarted: jobs.iter().filter(|j| j.restarted).count() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::DAY;

    #[test]
    fn idle_run_fully_available() {
        let m = compute_metrics(10.0 * DAY, &[(SimTime::ZERO, CryostatMode::Operating)], &[], &[], JobCounts::default());
        assert_eq!(m.availability, 1.0);
        assert_eq!(m.utilization, 0.0);
    }

    #[test]
    fn one_recal_costs_its_duration() {
        let occ = [Occupancy {
            start: SimTime::from_days(2.0),
            end: SimTime::from_days(2.0) + 6000.0,
            activity: Activity::Calibration { kind: CalibrationKind::Full, source: WindowSource::Periodic },
        }];
        let m = compute_metrics(10.0 * DAY, &[(SimTime::ZERO, CryostatMode::Operating)], &occ, &[], JobCounts::default());
        assert!((m.availability - (1.0 - 6000.0 / 864_000.0)).abs() < 1e-15);
    }

    #[test]
    fn conservation_with_one_left() {
        let c = JobCounts { submitted: 5, done: 4, failed: 0, cancelled: 0, queued: 1 };
        assert!(c.conserved());
    }

    #[test]
    fn overlap_detection() {
        let a = |s: f64, e: f64| Occupancy {
            start: SimTime::from_secs(s),
            end: SimTime::from_secs(e),
            activity: Activity::Benchmark,
        };
        assert_eq!(find_overlap(&[a(0.0, 1.0), a(1.0, 2.0)]), None);
        assert_eq!(find_overlap(&[a(0.0, 1.5), a(1.0, 2.0)]), Some((0, 1)));
    }
}
