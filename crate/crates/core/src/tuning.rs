//! Tuning rules: Ziegler-Nichols ultimate cycle, IMC PI and SIMC PI.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::UltimateParams;
use crate::plant::FoptdModel;

/// Parallel-form PID gains `Kp + Ki/s + Kd s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    /// 1/s
    pub ki: f64,
    /// s
    pub kd: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Result<Self> {
        if ![kp, ki, kd].iter().all(|g| g.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gains must be finite, got ({kp}, {ki}, {kd})"
            )));
        }
        if kp == 0.0 && ki == 0.0 && kd == 0.0 {
            return Err(Error::ZeroGains);
        }
        Ok(PidGains { kp, ki, kd })
    }

    pub fn proportional(kp: f64) -> Result<Self> {
        Self::new(kp, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControllerType {
    P,
    PI,
    PID,
}

impl fmt::Display for ControllerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControllerType::P => "P",
            ControllerType::PI => "PI",
            ControllerType::PID => "PID",
        })
    }
}

impl FromStr for ControllerType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P" => Ok(ControllerType::P),
            "PI" => Ok(ControllerType::PI),
            "PID" => Ok(ControllerType::PID),
            other => Err(Error::InvalidArgument(format!("unknown controller type {other:?}"))),
        }
    }
}

/// Controller settings in time-constant form (`Kp`, `tau_i`, `tau_d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningRow {
    pub controller_type: ControllerType,
    pub kp: f64,
    pub tau_i: Option<f64>,
    pub tau_d: Option<f64>,
}

impl TuningRow {
    /// Time-constant form of parallel gains: `tau_i = Kp/Ki`, `tau_d = Kd/Kp`.
    pub fn from_gains(g: &PidGains) -> Result<Self> {
        if g.kp == 0.0 {
            return Err(Error::InvalidArgument(
                "time-constant form needs a nonzero Kp".into(),
            ));
        }
        let tau_i = (g.ki != 0.0).then(|| g.kp / g.ki);
        let tau_d = (g.kd != 0.0).then(|| g.kd / g.kp);
        let controller_type = match (tau_i, tau_d) {
            (None, None) => ControllerType::P,
            (Some(_), None) => ControllerType::PI,
            _ => ControllerType::PID,
        };
        Ok(TuningRow {
            controller_type,
            kp: g.kp,
            tau_i,
            tau_d,
        })
    }
}

/// Ziegler-Nichols ultimate-cycle settings.
///
/// | type | Kp      | tau_i    | tau_d     |
/// |------|---------|----------|-----------|
/// | P    | 0.5 ku  |          |           |
/// | PI   | 0.45 ku | 0.83 Tu  |           |
/// | PID  | 0.6 ku  | 0.5 Tu   | 0.125 Tu  |
pub fn zn_ultimate(u: &UltimateParams, controller_type: ControllerType) -> TuningRow {
    let (kp, tau_i, tau_d) = match controller_type {
        ControllerType::P => (0.5 * u.k_u, None, None),
        ControllerType::PI => (0.45 * u.k_u, Some(0.83 * u.t_u), None),
        ControllerType::PID => (0.6 * u.k_u, Some(0.5 * u.t_u), Some(0.125 * u.t_u)),
    };
    TuningRow {
        controller_type,
        kp,
        tau_i,
        tau_d,
    }
}

/// `Ki = Kp / tau_i`, `Kd = Kp * tau_d`; absent times give zero gains.
pub fn to_parallel_gains(row: &TuningRow) -> Result<PidGains> {
    let ki = match row.tau_i {
        Some(ti) if ti <= 0.0 => return Err(Error::NonPositiveTauI(ti)),
        Some(ti) => row.kp / ti,
        None => 0.0,
    };
    let kd = row.tau_d.map_or(0.0, |td| row.kp * td);
    PidGains::new(row.kp, ki, kd)
}

/// IMC PI settings from the first-order Taylor delay model:
/// `Kp = tau / (k (tau_c + theta))`, `tau_i = tau`.
pub fn imc_pi(m: &FoptdModel, tau_c: f64) -> Result<PidGains> {
    if !(tau_c > 0.0) {
        return Err(Error::InvalidArgument(format!("tau_c must be positive, got {tau_c}")));
    }
    let kp = m.tau / (m.k * (tau_c + m.theta));
    PidGains::new(kp, kp / m.tau, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SimcPreset {
    /// tau_c = theta
    Tight,
    /// tau_c = 1.5 theta
    Smooth,
    Custom,
}

/// Desired closed-loop time constant for SIMC, resolved against a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimcConfig {
    pub tau_c: f64,
    pub preset: SimcPreset,
}

impl SimcConfig {
    pub fn tight(m: &FoptdModel) -> Self {
        SimcConfig {
            tau_c: m.theta,
            preset: SimcPreset::Tight,
        }
    }

    pub fn smooth(m: &FoptdModel) -> Self {
        SimcConfig {
            tau_c: 1.5 * m.theta,
            preset: SimcPreset::Smooth,
        }
    }

    pub fn custom(tau_c: f64) -> Self {
        SimcConfig {
            tau_c,
            preset: SimcPreset::Custom,
        }
    }
}

/// SIMC PI settings: `Kc = tau / (k (tau_c + theta))`,
/// `tau_i = min(tau, 4 (tau_c + theta))`.
pub fn simc_pi(m: &FoptdModel, cfg: &SimcConfig) -> Result<PidGains> {
    if !(cfg.tau_c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolved tau_c must be positive, got {}",
            cfg.tau_c
        )));
    }
    let closed = cfg.tau_c + m.theta;
    let kc = m.tau / (m.k * closed);
    let tau_i = m.tau.min(4.0 * closed);
    PidGains::new(kc, kc / tau_i, 0.0)
}

/// How the derivative term is realized in simulation.
///
/// `Filtered { n }` is `Kd s N / (s + N)`, a first-order lag of time
/// constant `1/N` on the ideal derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DerivativeFilter {
    Ideal,
    Filtered { n: f64 },
}

impl Default for DerivativeFilter {
    fn default() -> Self {
        DerivativeFilter::Filtered { n: 100.0 }
    }
}

impl DerivativeFilter {
    pub fn time_constant(&self) -> Option<f64> {
        match self {
            DerivativeFilter::Ideal => None,
            DerivativeFilter::Filtered { n } => Some(1.0 / n),
        }
    }
}
