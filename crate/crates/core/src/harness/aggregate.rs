//! Median and interquartile objective curves on a shared log-spaced time grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::RunRecord;
use crate::error::{Error, Result};
use crate::solvers::{SolverKind, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub solver: SolverKind,
    pub time: Vec<f64>,
    pub median: Vec<f64>,
    pub p25: Vec<f64>,
    pub p75: Vec<f64>,
    /// Number of runs defined at each grid point.
    pub count: Vec<usize>,
}

/// Linear-interpolation percentile (`q` in [0, 100]) of an ascending slice.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// `points` log-spaced values from `start` to `end` inclusive.
pub fn log_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    assert!(start > 0.0 && end >= start && points >= 1);
    if points == 1 || end == start {
        return vec![end];
    }
    let (a, b) = (start.ln(), end.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                start
            } else if i == points - 1 {
                end
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// Objective of the last sample at or before `t`, if any.
pub fn value_at(trajectory: &Trajectory, t: f64) -> Option<f64> {
    let idx = trajectory.samples.partition_point(|s| s.wall_time_s <= t);
    idx.checked_sub(1).map(|i| trajectory.samples[i].objective)
}

/// One curve per solver (in [`SolverKind`] order) over a grid spanning the earliest
/// positive sample time to `end_s`.
pub fn aggregate(records: &[RunRecord], grid_points: usize, end_s: f64) -> Result<Vec<AggregateCurve>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if grid_points == 0 {
        return Err(Error::InvalidParameter("grid_points must be positive".into()));
    }
    let earliest = records
        .iter()
        .flat_map(|r| r.trajectory.samples.iter())
        .map(|s| s.wall_time_s)
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min);
    let end = end_s.max(f64::MIN_POSITIVE);
    let start = if earliest.is_finite() {
        earliest.min(end)
    } else {
        end * 1e-3
    };
    let grid = log_grid(start, end, grid_points);

    let mut by_solver: BTreeMap<SolverKind, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_solver.entry(r.solver).or_default().push(r);
    }

    let mut curves = Vec::new();
    for (solver, runs) in by_solver {
        let mut curve = AggregateCurve {
            solver,
            time: Vec::new(),
            median: Vec::new(),
            p25: Vec::new(),
            p75: Vec::new(),
            count: Vec::new(),
        };
        for &t in &grid {
            let mut values: Vec<f64> = runs
                .iter()
                .filter_map(|r| value_at(&r.trajectory, t))
                .filter(|v| !v.is_nan())
                .collect();
            if values.is_empty() {
                continue;
            }
            values.sort_by(f64::total_cmp);
            curve.time.push(t);
            curve.median.push(percentile_sorted(&values, 50.0));
            curve.p25.push(percentile_sorted(&values, 25.0));
            curve.p75.push(percentile_sorted(&values, 75.0));
            curve.count.push(values.len());
        }
        curves.push(curve);
    }
    Ok(curves)
}
