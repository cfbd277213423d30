//! Polynomial root finding.
//!
//! Degrees one and two use closed forms. Higher degrees use simultaneous
//! Aberth-Ehrlich iteration followed by a Newton polish; for real input the
//! result is post-processed so complex roots come out as exact conjugate
//! pairs.

use num_complex::Complex64;

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Roots of `p`, sorted by real part then by descending imaginary part.
///
/// The zero polynomial is an error; a nonzero constant has no roots.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (reduced, at_origin) = p.strip_origin_roots();
    let mut roots = vec![Complex64::new(0.0, 0.0); at_origin];
    roots.extend(match reduced.degree() {
        0 => Vec::new(),
        1 => vec![Complex64::new(-reduced.coeffs()[1] / reduced.coeffs()[0], 0.0)],
        2 => quadratic(reduced.coeffs()),
        _ => pair_conjugates(aberth(&reduced)),
    });
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)));
    Ok(roots)
}

fn quadratic(c: &[f64]) -> Vec<Complex64> {
    let (a, b, cc) = (c[0], c[1], c[2]);
    let disc = b * b - 4.0 * a * cc;
    if disc >= 0.0 {
        // Avoid cancellation: compute the larger-magnitude root first.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        vec![Complex64::new(q / a, 0.0), Complex64::new(cc / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn aberth(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    let dp = p.derivative();
    let lead = p.leading();
    // Cauchy bound on root moduli.
    let radius = 1.0
        + p.coeffs()[1..]
            .iter()
            .fold(0.0_f64, |m, c| m.max((c / lead).abs()));
    // Start from a circle of geometric-mean radius, rotated off the real axis.
    let mean_radius = (p.coeffs()[n] / lead).abs().powf(1.0 / n as f64);
    let r0 = if mean_radius > 0.0 && mean_radius.is_finite() {
        mean_radius.min(radius)
    } else {
        radius
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r0, angle)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let pv = p.eval_complex(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval_complex(z[i]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.iter().map(|&root| polish(p, &dp, root)).collect()
}

fn polish(p: &Polynomial, dp: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut best = p.eval_complex(z).norm();
    for _ in 0..5 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = z - p.eval_complex(z) / d;
        let r = p.eval_complex(candidate).norm();
        if r.is_finite() && r < best {
            z = candidate;
            best = r;
        } else {
            break;
        }
    }
    z
}

/// Force exact conjugate symmetry on a root set of a real polynomial.
fn pair_conjugates(roots: Vec<Complex64>) -> Vec<Complex64> {
    let real_tol = |z: &Complex64| 1e-10 * z.norm().max(1.0);
    let mut out = Vec::with_capacity(roots.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in roots {
        if z.im.abs() <= real_tol(&z) {
            out.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    for u in upper {
        let best = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - u.conj()).norm().total_cmp(&(**b - u.conj()).norm()))
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let l = lower.swap_remove(i);
                let re = 0.5 * (u.re + l.re);
                let im = 0.5 * (u.im - l.im);
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
            None => out.push(Complex64::new(u.re, 0.0)),
        }
    }
    out.extend(lower.into_iter().map(|l| Complex64::new(l.re, 0.0)));
    out
}
