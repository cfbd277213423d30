use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tf_core::RationalTransferFunction;

/// Single-input single-output realization `x' = Ax + Bu`, `y = Cx + Du`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpace {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.b.len()
    }

    pub fn derivative(&self, x: &[f64], u: f64) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + bi * u)
            .collect()
    }

    pub fn output(&self, x: &[f64], u: f64) -> f64 {
        self.c.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>() + self.d * u
    }

    /// `C (sI - A)^{-1} B + D`, by Gaussian elimination with partial pivoting.
    pub fn transfer_at(&self, s: Complex64) -> Complex64 {
        let n = self.order();
        let mut m: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                let mut row: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
                        diag - self.a[i][j]
                    })
                    .collect();
                row.push(Complex64::new(self.b[i], 0.0));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| m[p][col].norm().total_cmp(&m[q][col].norm()))
                .expect("non-empty range");
            m.swap(col, pivot);
            for r in col + 1..n {
                let f = m[r][col] / m[col][col];
                for k in col..=n {
                    let v = m[col][k];
                    m[r][k] -= f * v;
                }
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let tail: Complex64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
            x[i] = (m[i][n] - tail) / m[i][i];
        }
        x.iter().zip(&self.c).map(|(xi, ci)| xi * ci).sum::<Complex64>() + self.d
    }
}

/// Controllable-canonical realization of a proper transfer function.
pub fn realize(tf: &RationalTransferFunction) -> Result<StateSpace> {
    if !tf.is_proper() {
        return Err(Error::ImproperTransferFunction {
            num: tf.num().degree(),
            den: tf.den().degree(),
        });
    }
    let n = tf.den().degree();
    let lead = tf.den().leading();
    let a: Vec<f64> = (1..=n).map(|i| tf.den().coeff(n - i) / lead).collect();
    let b: Vec<f64> = (0..=n).map(|i| tf.num().coeff(n - i) / lead).collect();
    let d = b[0];
    let c: Vec<f64> = (1..=n).map(|i| b[i] - d * a[i - 1]).collect();
    let mut rows = vec![vec![0.0; n]; n];
    if n > 0 {
        for (j, ai) in a.iter().enumerate() {
            rows[0][j] = -ai;
        }
        for i in 1..n {
            rows[i][i - 1] = 1.0;
        }
    }
    let mut input = vec![0.0; n];
    if n > 0 {
        input[0] = 1.0;
    }
    Ok(StateSpace {
        a: rows,
        b: input,
        c,
        d,
    })
}
