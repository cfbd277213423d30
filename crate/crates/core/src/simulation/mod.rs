//! Fixed-step unit-step simulation of closed loops.
//!
//! Rational loops are realized in controllable canonical form and integrated
//! with classical RK4. Loops that keep the dead time carry the controller
//! output through a [`DelayBuffer`]; the delayed plant input is held
//! constant across each step.

mod delay;
mod state_space;

use serde::Serialize;

pub use delay::DelayBuffer;
pub use state_space::{realize, StateSpace};

use crate::error::{Error, Result, Warning};
use crate::export::columns_to_csv;
use crate::plant::FoptdModel;
use crate::tf_core::RationalTransferFunction;
use crate::tuning::{DerivativeFilter, PidGains};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    /// s
    pub dt: f64,
    /// s
    pub t_final: f64,
    pub derivative: DerivativeFilter,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: DEFAULT_DT,
            t_final: DEFAULT_T_FINAL,
            derivative: DerivativeFilter::default(),
        }
    }
}

impl SimConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let cfg = SimConfig {
            dt,
            t_final,
            ..SimConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_derivative(mut self, derivative: DerivativeFilter) -> Self {
        self.derivative = derivative;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 10.0 * self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "t_final must be at least 10 dt, got {}",
                self.t_final
            )));
        }
        if let DerivativeFilter::Filtered { n } = self.derivative {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "derivative filter coefficient must be positive, got {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Shrink `dt` to the nearest value that divides `theta` evenly.
    pub fn aligned_to_delay(mut self, theta: f64) -> Self {
        if theta > 0.0 {
            let slots = (theta / self.dt - 1e-9).ceil().max(1.0);
            self.dt = theta / slots;
        }
        self
    }

    /// Number of whole steps spanned by `theta`.
    pub fn delay_steps(&self, theta: f64) -> Result<usize> {
        let ratio = theta / self.dt;
        let slots = ratio.round();
        if (ratio - slots).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::DelayNotMultipleOfStep { theta, dt: self.dt });
        }
        Ok(slots as usize)
    }
}

/// Uniformly sampled response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(skip)]
    dt: f64,
}

impl TimeSeries {
    /// Samples `y[i]` at `t0 + i dt`.
    pub fn new(t0: f64, dt: f64, y: Vec<f64>) -> Self {
        let t = (0..y.len()).map(|i| t0 + i as f64 * dt).collect();
        TimeSeries { t, y, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `t,y` with 9 significant digits.
    pub fn to_csv(&self) -> String {
        columns_to_csv(&["t", "y"], &[&self.t, &self.y])
    }
}

fn rk4(x: &[f64], dt: f64, f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let shift = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(b, k)| b + h * k).collect()
    };
    let k1 = f(x);
    let k2 = f(&shift(x, &k1, 0.5 * dt));
    let k3 = f(&shift(x, &k2, 0.5 * dt));
    let k4 = f(&shift(x, &k3, dt));
    (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Unit-step response of a proper rational transfer function, feedthrough
/// included at `t = 0`.
pub fn step_rational(tf: &RationalTransferFunction, cfg: &SimConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let ss = realize(tf)?;
    let n = cfg.steps();
    let mut x = vec![0.0; ss.order()];
    let mut y = Vec::with_capacity(n + 1);
    y.push(ss.output(&x, 1.0));
    for _ in 0..n {
        x = rk4(&x, cfg.dt, |s| ss.derivative(s, 1.0));
        y.push(ss.output(&x, 1.0));
    }
    Ok(TimeSeries::new(0.0, cfg.dt, y))
}

/// Warns when a nonzero derivative gain sees the reference step.
pub fn derivative_warning(g: &PidGains) -> Option<Warning> {
    (g.kd != 0.0).then_some(Warning::DerivativeOnStep { kd: g.kd })
}

/// Unit-step response of a PID loop around the process with its dead time
/// kept exact.
///
/// States are plant output, error integral and derivative-filter state, all
/// starting at rest. The derivative acts on the error through the filter in
/// `cfg.derivative`; an ideal derivative is rejected when `kd != 0`.
pub fn step_delayed_loop(m: &FoptdModel, g: &PidGains, cfg: &SimConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let delay_steps = cfg.delay_steps(m.theta)?;
    let tau_f = match (g.kd != 0.0, cfg.derivative.time_constant()) {
        (false, _) => None,
        (true, Some(tf)) => Some(tf),
        (true, None) => {
            return Err(Error::InvalidArgument(
                "an ideal derivative cannot be simulated in the time domain".into(),
            ))
        }
    };
    if let Some(w) = derivative_warning(g) {
        log::warn!("{w}");
    }

    let controller = |s: &[f64]| -> f64 {
        let e = 1.0 - s[0];
        let d = tau_f.map_or(0.0, |tf| g.kd * (e - s[2]) / tf);
        g.kp * e + g.ki * s[1] + d
    };
    let rates = |s: &[f64], plant_input: f64| -> Vec<f64> {
        let e = 1.0 - s[0];
        vec![
            (-s[0] + m.k * plant_input) / m.tau,
            e,
            tau_f.map_or(0.0, |tf| (e - s[2]) / tf),
        ]
    };

    let n = cfg.steps();
    let mut state = vec![0.0; 3];
    let mut y = Vec::with_capacity(n + 1);
    y.push(0.0);
    let mut buffer = DelayBuffer::new(delay_steps);
    for _ in 0..n {
        state = if delay_steps == 0 {
            rk4(&state, cfg.dt, |s| rates(s, controller(s)))
        } else {
            let held = buffer.push(controller(&state));
            rk4(&state, cfg.dt, |s| rates(s, held))
        };
        y.push(state[0]);
    }
    Ok(TimeSeries::new(0.0, cfg.dt, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tf_core::{pid_transfer_function, unity_feedback};

    fn first_order() -> RationalTransferFunction {
        RationalTransferFunction::from_coeffs(vec![1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 1.0).is_err());
        assert!(SimConfig::new(0.1, 0.5).is_err());
        let cfg = SimConfig::new(1e-3, 10.0).unwrap();
        assert_eq!(cfg.steps(), 10_000);
        assert_eq!(cfg.delay_steps(0.3).unwrap(), 300);
        assert!(SimConfig::new(7e-4, 10.0).unwrap().delay_steps(0.3).is_err());
    }

    #[test]
    fn dt_alignment() {
        let cfg = SimConfig::new(7e-4, 10.0).unwrap().aligned_to_delay(0.3);
        assert!(cfg.dt <= 7e-4);
        assert_eq!(cfg.delay_steps(0.3).unwrap(), 429);
        let same = SimConfig::default().aligned_to_delay(0.3);
        assert_eq!(same.delay_steps(0.3).unwrap(), 300);
    }

    #[test]
    fn first_order_step_is_exact() {
        let ts = step_rational(&first_order(), &SimConfig::new(1e-3, 10.0).unwrap()).unwrap();
        assert_eq!(ts.len(), 10_001);
        let err = ts
            .t
            .iter()
            .zip(&ts.y)
            .map(|(t, y)| (y - (1.0 - (-t).exp())).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn feedthrough_appears_at_time_zero() {
        let tf = RationalTransferFunction::from_coeffs(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let ts = step_rational(&tf, &SimConfig::default()).unwrap();
        assert_eq!(ts.y[0], -1.0);
        assert!((ts.y.last().unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn delay_free_pi_loop_matches_rational_loop() {
        let m = FoptdModel::new(1.0, 1.0, 0.0).unwrap();
        let g = PidGains::new(1.5, 2.0, 0.0).unwrap();
        let cfg = SimConfig::default();
        let delayed = step_delayed_loop(&m, &g, &cfg).unwrap();
        let plant = RationalTransferFunction::from_coeffs(vec![1.0], vec![1.0, 1.0]).unwrap();
        let cl = unity_feedback(&pid_transfer_function(&g).series(&plant)).unwrap();
        let rational = step_rational(&cl, &cfg).unwrap();
        let diff = delayed
            .y
            .iter()
            .zip(&rational.y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn ideal_derivative_rejected_for_delayed_loop() {
        let m = FoptdModel::new(1.0, 1.0, 0.3).unwrap();
        let g = PidGains::new(1.0, 1.0, 0.1).unwrap();
        let cfg = SimConfig::default().with_derivative(DerivativeFilter::Ideal);
        assert!(step_delayed_loop(&m, &g, &cfg).is_err());
        let pi = PidGains::new(1.0, 1.0, 0.0).unwrap();
        assert!(step_delayed_loop(&m, &pi, &cfg).is_ok());
    }

    #[test]
    fn output_waits_for_dead_time() {
        let m = FoptdModel::new(1.0, 1.0, 0.3).unwrap();
        let ts = step_delayed_loop(&m, &PidGains::proportional(1.0).unwrap(), &SimConfig::default()).unwrap();
        assert!(ts.y[..=300].iter().all(|v| *v == 0.0));
        assert!(ts.y[301] > 0.0);
    }

    #[test]
    fn misaligned_delay_rejected() {
        let m = FoptdModel::new(1.0, 1.0, 0.3).unwrap();
        let cfg = SimConfig::new(7e-4, 5.0).unwrap();
        assert!(matches!(
            step_delayed_loop(&m, &PidGains::proportional(1.0).unwrap(), &cfg),
            Err(Error::DelayNotMultipleOfStep { .. })
        ));
    }

    #[test]
    fn csv_has_header() {
        let ts = TimeSeries::new(0.0, 0.5, vec![0.0, 0.25]);
        assert_eq!(ts.to_csv(), "t,y\n0,0\n0.5,0.25\n");
    }
}
