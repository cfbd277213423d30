use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::{poly_mul, Polynomial};
use crate::error::{Error, Result};
use crate::tuning::{DerivativeFilter, PidGains};

/// Ratio of two real polynomials in `s`.
///
/// Stored as given. Comparisons go through [`RationalTransferFunction::normalized`],
/// which scales both polynomials so the denominator is monic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalTransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RationalTransferFunction { num, den })
    }

    pub fn from_coeffs(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Self::new(Polynomial::new(num), Polynomial::new(den))
    }

    pub fn gain(k: f64) -> Self {
        RationalTransferFunction {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    /// Same function with a monic denominator.
    pub fn normalized(&self) -> Self {
        let lead = self.den.leading();
        RationalTransferFunction {
            num: self.num.scale(1.0 / lead),
            den: self.den.scale(1.0 / lead),
        }
    }

    /// Coefficient-wise comparison after normalization, relative to the
    /// largest coefficient magnitude of each polynomial.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        let same = |p: &Polynomial, q: &Polynomial| {
            let scale = p.max_abs_coeff().max(q.max_abs_coeff()).max(f64::MIN_POSITIVE);
            let n = p.degree().max(q.degree());
            (0..=n).all(|k| (p.coeff(k) - q.coeff(k)).abs() <= rel_tol * scale)
        };
        same(&a.num, &b.num) && same(&a.den, &b.den)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// Value at `s = j*omega`.
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn dc_gain(&self) -> f64 {
        self.num.eval(0.0) / self.den.eval(0.0)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        self.num.roots()
    }

    /// Cascade `self` followed by `other`.
    pub fn series(&self, other: &Self) -> Self {
        RationalTransferFunction {
            num: poly_mul(&self.num, &other.num),
            den: poly_mul(&self.den, &other.den),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        RationalTransferFunction {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Closed loop `F / (1 + F)` under unity negative feedback.
    pub fn unity_feedback(&self) -> Result<Self> {
        unity_feedback(self)
    }
}

/// Unity negative feedback around `forward`: `num / (den + num)`.
pub fn unity_feedback(forward: &RationalTransferFunction) -> Result<RationalTransferFunction> {
    let den = &forward.den + &forward.num;
    if den.is_zero() {
        return Err(Error::DegenerateLoop);
    }
    Ok(RationalTransferFunction {
        num: forward.num.clone(),
        den,
    })
}

/// Ideal parallel PID `Kp + Ki/s + Kd s = (Kd s^2 + Kp s + Ki) / s`.
///
/// Without an integral term the exact `s/s` factor is cancelled, so a P
/// controller comes back as the static gain `Kp/1`.
pub fn pid_transfer_function(g: &PidGains) -> RationalTransferFunction {
    if g.ki == 0.0 {
        return RationalTransferFunction {
            num: Polynomial::new(vec![g.kd, g.kp]),
            den: Polynomial::constant(1.0),
        };
    }
    RationalTransferFunction {
        num: Polynomial::new(vec![g.kd, g.kp, g.ki]),
        den: Polynomial::monomial(1.0, 1),
    }
}

/// PID with the derivative path low-passed: `Kp + Ki/s + Kd s / (tau_f s + 1)`.
///
/// Falls back to [`pid_transfer_function`] when the filter is ideal or `Kd = 0`.
pub fn filtered_pid_transfer_function(
    g: &PidGains,
    filter: DerivativeFilter,
) -> RationalTransferFunction {
    let tau_f = match filter.time_constant() {
        Some(tf) if g.kd != 0.0 => tf,
        _ => return pid_transfer_function(g),
    };
    let lag = Polynomial::new(vec![tau_f, 1.0]);
    // (Kp s + Ki)(tau_f s + 1) + Kd s^2 over s (tau_f s + 1)
    let pi_part = poly_mul(&Polynomial::new(vec![g.kp, g.ki]), &lag);
    let num = &pi_part + &Polynomial::monomial(g.kd, 2);
    let den = poly_mul(&Polynomial::monomial(1.0, 1), &lag);
    if g.ki == 0.0 {
        let (num, _) = num.strip_origin_roots();
        return RationalTransferFunction { num, den: lag };
    }
    RationalTransferFunction { num, den }
}

impl fmt::Display for RationalTransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
