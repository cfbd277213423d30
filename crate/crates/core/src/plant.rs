//! First-order-plus-time-delay process model and its rational approximations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::tf_core::{poly_mul, Polynomial, RationalTransferFunction};

/// `k e^{-theta s} / (tau s + 1)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct FoptdModel {
    pub k: f64,
    /// Time constant, s.
    pub tau: f64,
    /// Dead time, s.
    pub theta: f64,
}

#[derive(Deserialize)]
struct RawModel {
    k: f64,
    tau: f64,
    theta: f64,
}

impl TryFrom<RawModel> for FoptdModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        FoptdModel::new(r.k, r.tau, r.theta)
    }
}

impl FoptdModel {
    pub fn new(k: f64, tau: f64, theta: f64) -> Result<Self> {
        if !(k.is_finite() && tau.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        if k == 0.0 {
            return Err(Error::InvalidModel("gain k must be nonzero".into()));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidModel(format!("time constant must be positive, got {tau}")));
        }
        if theta < 0.0 {
            return Err(Error::InvalidModel(format!("dead time must be non-negative, got {theta}")));
        }
        Ok(FoptdModel { k, tau, theta })
    }

    /// Warn when the dead time is no longer small against the time constant.
    pub fn delay_warning(&self) -> Option<Warning> {
        (self.theta > 0.5 * self.tau).then_some(Warning::DelayDominant {
            theta: self.theta,
            tau: self.tau,
        })
    }

    fn lag(&self) -> Polynomial {
        Polynomial::new(vec![self.tau, 1.0])
    }
}

/// Rational part times a pure delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedTransferFunction {
    pub rational: RationalTransferFunction,
    /// s
    pub delay: f64,
}

impl DelayedTransferFunction {
    pub fn new(rational: RationalTransferFunction, delay: f64) -> Result<Self> {
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(Error::InvalidArgument(format!("delay must be >= 0, got {delay}")));
        }
        Ok(DelayedTransferFunction { rational, delay })
    }

    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.rational.freq_response(omega) * Complex64::from_polar(1.0, -self.delay * omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxMethod {
    /// `(1 - theta s / 2) / (1 + theta s / 2)`
    Pade11,
    /// `1 - theta s`
    Taylor1,
}

/// First-order Pade approximant of `e^{-theta s}`.
pub fn pade_1_1(theta: f64) -> Result<RationalTransferFunction> {
    if !(theta > 0.0) {
        return Err(Error::NonPositiveDelay(theta));
    }
    let h = 0.5 * theta;
    RationalTransferFunction::from_coeffs(vec![-h, 1.0], vec![h, 1.0])
}

/// Delay-free rational model of the process.
pub fn approximate_plant(m: &FoptdModel, method: ApproxMethod) -> Result<RationalTransferFunction> {
    match method {
        ApproxMethod::Pade11 => {
            let delay = pade_1_1(m.theta)?;
            let num = delay.num().scale(m.k);
            let den = poly_mul(&m.lag(), delay.den());
            RationalTransferFunction::new(num, den)
        }
        ApproxMethod::Taylor1 => RationalTransferFunction::new(
            Polynomial::new(vec![-m.k * m.theta, m.k]),
            m.lag(),
        ),
    }
}

/// The exact process as a rational lag plus dead time.
pub fn delayed_plant(m: &FoptdModel) -> DelayedTransferFunction {
    DelayedTransferFunction {
        rational: RationalTransferFunction::new(Polynomial::constant(m.k), m.lag())
            .expect("tau > 0 keeps the lag nonzero"),
        delay: m.theta,
    }
}
