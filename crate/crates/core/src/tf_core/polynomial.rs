use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Relative magnitude below which a leading coefficient is treated as zero.
pub const TRIM_RELATIVE: f64 = 1e-12;

/// Real polynomial in `s`, coefficients stored in descending powers.
///
/// The representation is always trimmed: the leading coefficient is nonzero
/// unless the polynomial is the zero polynomial, which is stored as `[0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", from = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c * s^n`
    pub fn monomial(c: f64, n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = c;
        Polynomial::new(coeffs)
    }

    /// Monic real polynomial with the given roots. Complex roots must come
    /// in conjugate pairs for the result to be real; imaginary residue is
    /// discarded.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            acc = next;
        }
        Polynomial::new(acc.into_iter().map(|c| c.re).collect())
    }

    fn trim(&mut self) {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale == 0.0 || !scale.is_finite() {
            if scale == 0.0 {
                self.coeffs = vec![0.0];
            }
            return;
        }
        let cut = TRIM_RELATIVE * scale;
        let first = self
            .coeffs
            .iter()
            .position(|c| c.abs() >= cut)
            .unwrap_or(self.coeffs.len() - 1);
        self.coeffs.drain(..first);
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of `s^power`, zero beyond the degree.
    pub fn coeff(&self, power: usize) -> f64 {
        let n = self.degree();
        if power > n {
            0.0
        } else {
            self.coeffs[n - power]
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let n = self.degree();
        if n == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[..n]
                .iter()
                .enumerate()
                .map(|(i, c)| c * (n - i) as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divide out `s^n` when the `n` lowest coefficients are exactly zero.
    /// Returns the reduced polynomial and how many powers of `s` were removed.
    pub fn strip_origin_roots(&self) -> (Polynomial, usize) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        let n = self.coeffs.iter().rev().take_while(|c| **c == 0.0).count();
        let kept = self.coeffs[..self.coeffs.len() - n].to_vec();
        (Polynomial::new(kept), n)
    }

    /// All complex roots; see [`crate::tf_core::roots`].
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        super::roots::poly_roots(self)
    }

    fn zip_with(&self, other: &Polynomial, f: impl Fn(f64, f64) -> f64) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let pad = |p: &Polynomial| {
            let mut v = vec![0.0; n - p.coeffs.len()];
            v.extend_from_slice(&p.coeffs);
            v
        };
        let a = pad(self);
        let b = pad(other);
        Polynomial::new(a.iter().zip(&b).map(|(x, y)| f(*x, *y)).collect())
    }
}

/// Product of two polynomials.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![0.0; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Polynomial::new(out)
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        poly_mul(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let power = n - i;
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match power {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}s")?,
                _ => write!(f, "{mag}s^{power}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Polynomial, b: &[f64], tol: f64) -> bool {
        a.coeffs().len() == b.len() && a.coeffs().iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn trims_leading_zeros() {
        let p = Polynomial::new(vec![0.0, 1e-15, 2.0, 3.0]);
        assert_eq!(p.coeffs(), &[2.0, 3.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
        assert!(Polynomial::new(vec![]).is_zero());
    }

    #[test]
    fn mul_matches_hand_expansion() {
        let pid = Polynomial::new(vec![0.473, 4.6, 11.194]);
        let zero = Polynomial::new(vec![-0.3, 2.0]);
        let p = poly_mul(&pid, &zero);
        assert!(close(&p, &[-0.1419, -0.434, 5.8418, 22.388], 1e-12));
    }

    #[test]
    fn mul_identity_and_monomials() {
        let a = Polynomial::new(vec![1.0, 1.0]);
        assert_eq!(poly_mul(&a, &Polynomial::constant(1.0)), a);
        let s = Polynomial::monomial(1.0, 1);
        assert_eq!(poly_mul(&s, &s).coeffs(), &[1.0, 0.0, 0.0]);
        assert!(poly_mul(&a, &Polynomial::zero()).is_zero());
    }

    #[test]
    fn add_cancels_leading_term() {
        let a = Polynomial::new(vec![1.0, 2.0, 3.0]);
        let b = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!((&a + &b).coeffs(), &[2.0, 4.0]);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::new(vec![0.3, 2.3, 2.0]);
        assert!((p.eval(1.0) - 4.6).abs() < 1e-12);
        assert_eq!(p.derivative().coeffs(), &[0.6, 2.3]);
        let z = p.eval_complex(Complex64::new(0.0, 1.0));
        assert!((z.re - 1.7).abs() < 1e-12 && (z.im - 2.3).abs() < 1e-12);
    }

    #[test]
    fn strips_roots_at_origin() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        let (q, n) = p.strip_origin_roots();
        assert_eq!(n, 2);
        assert_eq!(q.coeffs(), &[1.0, 2.0]);
    }

    #[test]
    fn from_roots_builds_real_quadratic() {
        let p = Polynomial::from_roots(&[Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)]);
        assert!(close(&p, &[1.0, 2.0, 5.0], 1e-14));
    }

    #[test]
    fn display() {
        let p = Polynomial::new(vec![-0.3, 0.0, 2.0]);
        assert_eq!(p.to_string(), "-0.3s^2 + 2");
    }
}
