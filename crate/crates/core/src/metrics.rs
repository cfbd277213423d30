//! Step-response characteristics and oscillation measurement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::format_sig9;
use crate::simulation::TimeSeries;

/// Fraction of samples averaged for the final value.
const FINAL_WINDOW: f64 = 0.05;
/// Fraction of samples checked for being settled.
const SETTLED_WINDOW: f64 = 0.10;
const SETTLED_SPREAD: f64 = 0.01;
const SETTLING_BAND: f64 = 0.02;
const RISE_LOW: f64 = 0.1;
const RISE_HIGH: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    /// Settling time (2% band), s.
    pub t_s: f64,
    /// Rise time (10% to 90%), s.
    pub t_r: f64,
    pub peak: f64,
    pub overshoot_pct: f64,
    pub e_ss: f64,
}

impl StepMetrics {
    pub const CSV_HEADER: &'static str = "t_s,t_r,peak,overshoot_pct,e_ss";

    pub fn csv_row(&self) -> String {
        [self.t_s, self.t_r, self.peak, self.overshoot_pct, self.e_ss]
            .iter()
            .map(|v| format_sig9(*v))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationEstimate {
    /// s
    pub period: f64,
    /// Mean ratio of successive peak heights above the series mean.
    pub amplitude_ratio: f64,
}

fn window(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n)
}

/// Mean computed relative to the first element, exact for constant input.
fn mean(values: &[f64]) -> f64 {
    let base = values[0];
    base + values.iter().map(|v| v - base).sum::<f64>() / values.len() as f64
}

/// Vertex of the parabola through three equally spaced samples, as
/// (offset from the middle sample in steps, value).
fn parabolic_vertex(left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curvature = left - 2.0 * mid + right;
    if curvature == 0.0 {
        return (0.0, mid);
    }
    let offset = 0.5 * (left - right) / curvature;
    (offset, mid - 0.25 * (left - right) * offset)
}

/// Characterize a unit-step-like response against `ref_value`.
///
/// The final value is the mean of the last 5% of samples. Rise time runs
/// from the first 10% crossing to the first 90% crossing of that value;
/// settling time is where the response last leaves the 2% band. Crossings
/// are linearly interpolated between samples.
pub fn step_metrics(ts: &TimeSeries, ref_value: f64) -> Result<StepMetrics> {
    let y = &ts.y;
    let n = y.len();
    if n < 3 || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::SettlingNotReached);
    }
    let dt = ts.dt();
    let scale = if ref_value != 0.0 { ref_value.abs() } else { 1.0 };
    let settled = &y[n - window(n, SETTLED_WINDOW)..];
    let spread = settled.iter().cloned().fold(f64::MIN, f64::max)
        - settled.iter().cloned().fold(f64::MAX, f64::min);
    if spread >= SETTLED_SPREAD * scale {
        return Err(Error::SettlingNotReached);
    }

    let tail_len = window(n, FINAL_WINDOW);
    let y_final = mean(&y[n - tail_len..]);
    let e_ss = ref_value - y_final;
    // Orient so the response heads upward.
    let sign = if y_final < 0.0 { -1.0 } else { 1.0 };
    let z: Vec<f64> = y.iter().map(|v| sign * v).collect();
    let target = sign * y_final;

    let crossing = |level: f64| -> f64 {
        match z.iter().position(|v| *v >= level) {
            Some(0) | None => ts.t[0],
            Some(i) => ts.t[i - 1] + (level - z[i - 1]) / (z[i] - z[i - 1]) * dt,
        }
    };
    let t_r = crossing(RISE_HIGH * target) - crossing(RISE_LOW * target);

    let band = SETTLING_BAND * target.abs();
    let t_s = match z.iter().rposition(|v| (v - target).abs() > band) {
        None => ts.t[0],
        Some(j) if j + 1 >= n => ts.t[n - 1],
        Some(j) => {
            let dj = (z[j] - target).abs();
            let dn = (z[j + 1] - target).abs();
            ts.t[j] + (dj - band) / (dj - dn) * dt
        }
    };

    let imax = z
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > z[best] { i } else { best });
    let (peak, overshoot_pct) = if imax >= n - tail_len {
        (target, 0.0)
    } else {
        let mut p = z[imax];
        if imax > 0 && imax + 1 < n && z[imax - 1] < p && z[imax + 1] < p {
            p = parabolic_vertex(z[imax - 1], p, z[imax + 1]).1;
        }
        let ov = if target > 0.0 {
            (100.0 * (p - target) / target).max(0.0)
        } else {
            0.0
        };
        (p.max(target), ov)
    };

    Ok(StepMetrics {
        t_s,
        t_r,
        peak: sign * peak,
        overshoot_pct,
        e_ss,
    })
}

/// Period and growth of an oscillating series from its local maxima above
/// the series mean.
pub fn oscillation_estimate(ts: &TimeSeries) -> Result<OscillationEstimate> {
    let y = &ts.y;
    if y.len() < 3 {
        return Err(Error::InsufficientPeaks(0));
    }
    let level = mean(y);
    let peaks: Vec<(f64, f64)> = (1..y.len() - 1)
        .filter(|&i| y[i] > level && y[i - 1] < y[i] && y[i] >= y[i + 1])
        .map(|i| {
            let (offset, value) = parabolic_vertex(y[i - 1], y[i], y[i + 1]);
            (ts.t[i] + offset * ts.dt(), value)
        })
        .collect();
    if peaks.len() < 3 {
        return Err(Error::InsufficientPeaks(peaks.len()));
    }
    let gaps = peaks.len() - 1;
    let period = (peaks[gaps].0 - peaks[0].0) / gaps as f64;
    let amplitude_ratio = peaks
        .windows(2)
        .map(|w| (w[1].1 - level) / (w[0].1 - level))
        .sum::<f64>()
        / gaps as f64;
    Ok(OscillationEstimate {
        period,
        amplitude_ratio,
    })
}
