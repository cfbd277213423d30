//! Frequency response of delayed transfer functions, gain margin at the
//! first phase crossover, and ultimate-cycle parameters derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::columns_to_csv;
use crate::plant::{DelayedTransferFunction, FoptdModel};

/// Grid density of the crossover scan.
const POINTS_PER_DECADE: usize = 400;
/// Decades scanned below `omega_max`.
const SCAN_DECADES: usize = 6;
const PHASE_TOL: f64 = 1e-8;
const POLE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyPoint {
    /// rad/s
    pub omega: f64,
    pub re: f64,
    pub im: f64,
    pub mag_db: f64,
    /// Continuous (unwrapped) phase, rad.
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    pub gm_db: f64,
    pub gm_mag: f64,
    /// Phase-crossover frequency, rad/s.
    pub omega_c: f64,
}

/// Critical gain and period of the sustained oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UltimateParams {
    pub k_u: f64,
    /// s
    pub t_u: f64,
}

/// Evaluates a delayed transfer function along the imaginary axis with a
/// phase that is continuous in `omega`.
///
/// The rational phase is summed factor by factor over the zeros and poles;
/// each factor's argument is taken on a branch that cannot wrap as `omega`
/// sweeps upward, and the total is anchored so the phase at `omega -> 0+`
/// lies in `(-pi, pi]`.
#[derive(Debug, Clone)]
pub struct FrequencyEvaluator {
    g: DelayedTransferFunction,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    offset: f64,
}

impl FrequencyEvaluator {
    pub fn new(g: &DelayedTransferFunction) -> Result<Self> {
        let zeros = g.rational.zeros()?;
        let poles = g.rational.poles()?;
        let mut eval = FrequencyEvaluator {
            g: g.clone(),
            zeros,
            poles,
            offset: 0.0,
        };
        if !g.rational.num().is_zero() {
            let lead = g.rational.num().leading() / g.rational.den().leading();
            let base = if lead < 0.0 { PI } else { 0.0 };
            let at_zero = base + eval.factor_phase(0.0);
            let k = ((at_zero - PI) / (2.0 * PI)).ceil();
            eval.offset = base - 2.0 * PI * k;
        }
        Ok(eval)
    }

    fn factor_phase(&self, omega: f64) -> f64 {
        let arg = |r: &Complex64| {
            if r.re == 0.0 && r.im == 0.0 {
                // origin root, limit from omega -> 0+
                return if omega == 0.0 { PI / 2.0 } else { Complex64::new(0.0, omega).arg() };
            }
            let w = Complex64::new(-r.re, omega - r.im);
            let a = w.arg();
            if r.re > 0.0 && a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        };
        self.zeros.iter().map(arg).sum::<f64>() - self.poles.iter().map(arg).sum::<f64>()
    }

    pub fn value(&self, omega: f64) -> Result<Complex64> {
        let s = Complex64::new(0.0, omega);
        if self.poles.iter().any(|p| (s - p).norm() < POLE_DISTANCE) {
            return Err(Error::PoleOnAxis(omega));
        }
        Ok(self.g.freq_response(omega))
    }

    pub fn phase(&self, omega: f64) -> f64 {
        if self.g.rational.num().is_zero() {
            return -self.g.delay * omega;
        }
        self.offset + self.factor_phase(omega) - self.g.delay * omega
    }

    pub fn point(&self, omega: f64) -> Result<FrequencyPoint> {
        if !(omega >= 0.0) {
            return Err(Error::InvalidArgument(format!("omega must be >= 0, got {omega}")));
        }
        let v = self.value(omega)?;
        Ok(FrequencyPoint {
            omega,
            re: v.re,
            im: v.im,
            mag_db: 20.0 * v.norm().log10(),
            phase: self.phase(omega),
        })
    }
}

pub fn evaluate_response(g: &DelayedTransferFunction, omega: f64) -> Result<FrequencyPoint> {
    FrequencyEvaluator::new(g)?.point(omega)
}

/// Default upper bound of the crossover search: `100/theta`, or `100/tau`
/// for a delay-free model.
pub fn default_omega_max(m: &FoptdModel) -> f64 {
    if m.theta > 0.0 {
        100.0 / m.theta
    } else {
        100.0 / m.tau
    }
}

/// First frequency at which the phase falls through `-pi`, and the gain
/// margin there.
pub fn phase_crossover(g: &DelayedTransferFunction, omega_max: f64) -> Result<MarginReport> {
    if !(omega_max > 0.0) || !omega_max.is_finite() {
        return Err(Error::InvalidArgument(format!("omega_max must be positive, got {omega_max}")));
    }
    let eval = FrequencyEvaluator::new(g)?;
    let n = POINTS_PER_DECADE * SCAN_DECADES;
    let lo = omega_max * 10f64.powi(-(SCAN_DECADES as i32));
    let grid = log_grid(lo, omega_max, n + 1);
    let excess = |w: f64| eval.phase(w) + PI;

    let mut prev = excess(grid[0]);
    let mut bracket = None;
    for pair in grid.windows(2) {
        let cur = excess(pair[1]);
        if prev > 0.0 && cur <= 0.0 {
            bracket = Some((pair[0], pair[1]));
            break;
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoCrossover(omega_max))?;
    let mut omega_c = b;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let e = excess(mid);
        omega_c = mid;
        if e.abs() < PHASE_TOL && (b - a) < 1e-12 * mid {
            break;
        }
        if e > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * mid {
            break;
        }
    }
    let gm_mag = 1.0 / eval.value(omega_c)?.norm();
    Ok(MarginReport {
        gm_db: 20.0 * gm_mag.log10(),
        gm_mag,
        omega_c,
    })
}

/// `k_u = 10^(G_m,dB / 20)`, `T_u = 2 pi / omega_c`.
pub fn ultimate_from_margins(m: &MarginReport) -> UltimateParams {
    UltimateParams {
        k_u: 10f64.powf(m.gm_db / 20.0),
        t_u: 2.0 * PI / m.omega_c,
    }
}

/// `n` log-spaced response points over `[omega_lo, omega_hi]`, phase
/// unwrapped in sweep order.
pub fn nyquist_series(
    g: &DelayedTransferFunction,
    omega_lo: f64,
    omega_hi: f64,
    n: usize,
) -> Result<Vec<FrequencyPoint>> {
    if !(omega_lo > 0.0 && omega_lo < omega_hi) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need 0 < omega_lo < omega_hi and n >= 2, got [{omega_lo}, {omega_hi}], n = {n}"
        )));
    }
    let eval = FrequencyEvaluator::new(g)?;
    let mut points = log_grid(omega_lo, omega_hi, n)
        .into_iter()
        .map(|w| eval.point(w))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..points.len() {
        let prev = points[i - 1].phase;
        let p = &mut points[i].phase;
        while *p - prev > PI {
            *p -= 2.0 * PI;
        }
        while *p - prev < -PI {
            *p += 2.0 * PI;
        }
    }
    Ok(points)
}

/// `omega,re,im,mag_db,phase_rad`
pub fn nyquist_csv(points: &[FrequencyPoint]) -> String {
    let col = |f: fn(&FrequencyPoint) -> f64| points.iter().map(f).collect::<Vec<f64>>();
    columns_to_csv(
        &["omega", "re", "im", "mag_db", "phase_rad"],
        &[
            &col(|p| p.omega),
            &col(|p| p.re),
            &col(|p| p.im),
            &col(|p| p.mag_db),
            &col(|p| p.phase),
        ],
    )
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
