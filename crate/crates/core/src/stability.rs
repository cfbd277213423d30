//! Routh-Hurwitz analysis and proportional-gain stability intervals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::format_sig9;
use crate::freq::UltimateParams;
use crate::tf_core::{Polynomial, RationalTransferFunction};

/// Relative size under which a first-column entry counts as zero.
const ZERO_PIVOT: f64 = 1e-12;
/// Replacement for a zero first-column entry, relative to the row scale.
const PIVOT_EPSILON: f64 = 1e-9;
/// Number of grid points scanned before bisection.
const GRID_POINTS: usize = 101;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Routh array, one row per power of `s` from `s^n` down to `s^0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouthArray {
    pub rows: Vec<Vec<f64>>,
    /// Set when a zero first-column entry had to be replaced by an epsilon.
    pub marginal: bool,
}

impl RouthArray {
    pub fn degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn first_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// Sign changes down the first column; equals the number of
    /// right-half-plane roots when no entry was replaced.
    pub fn sign_changes(&self) -> usize {
        self.first_column()
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count()
    }

    /// `power,c0,c1,...` with one line per row.
    pub fn to_csv(&self) -> String {
        let width = self.rows[0].len();
        let mut out = String::from("power");
        for j in 0..width {
            out.push_str(&format!(",c{j}"));
        }
        out.push('\n');
        let n = self.degree();
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("s^{}", n - i));
            for v in row {
                out.push(',');
                out.push_str(&format_sig9(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Build the Routh array of `p`.
///
/// An exact zero in the first column is replaced by `1e-9` times the row
/// scale (signed like the leading coefficient) and the array is flagged
/// marginal.
pub fn routh_array(p: &Polynomial) -> Result<RouthArray> {
    if p.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Routh array needs degree >= 1".into(),
        ));
    }
    let width = n / 2 + 1;
    let sign = p.leading().signum();
    let c = p.coeffs();
    let pick = |offset: usize| -> Vec<f64> {
        (0..width)
            .map(|j| c.get(offset + 2 * j).copied().unwrap_or(0.0))
            .collect()
    };
    let mut rows = vec![pick(0), pick(1)];
    let mut marginal = false;

    let mut fix_pivot = |row: &mut Vec<f64>, prev: &[f64]| {
        let mut scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            scale = prev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        }
        if row[0].abs() <= ZERO_PIVOT * scale || row[0] == 0.0 {
            row[0] = sign * PIVOT_EPSILON * scale.max(f64::MIN_POSITIVE);
            marginal = true;
        }
    };

    let first = rows[0].clone();
    fix_pivot(&mut rows[1], &first);
    for r in 2..=n {
        let a = &rows[r - 2];
        let b = &rows[r - 1];
        let mut next: Vec<f64> = (0..width)
            .map(|j| {
                let a_next = a.get(j + 1).copied().unwrap_or(0.0);
                let b_next = b.get(j + 1).copied().unwrap_or(0.0);
                (b[0] * a_next - a[0] * b_next) / b[0]
            })
            .collect();
        let prev = b.clone();
        fix_pivot(&mut next, &prev);
        rows.push(next);
    }
    Ok(RouthArray { rows, marginal })
}

/// True when every root of `p` lies strictly in the open left half-plane.
pub fn is_hurwitz(p: &Polynomial) -> Result<bool> {
    let arr = routh_array(p)?;
    let sign = p.leading().signum();
    Ok(!arr.marginal && arr.first_column().iter().all(|v| v.signum() == sign && *v != 0.0))
}

/// Characteristic polynomial `base(s) + K * slope(s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineGainPolynomial {
    pub base: Polynomial,
    pub slope: Polynomial,
}

impl AffineGainPolynomial {
    pub fn new(base: Polynomial, slope: Polynomial) -> Self {
        AffineGainPolynomial { base, slope }
    }

    /// `den + K num` for the proportional loop around `plant`.
    pub fn from_plant(plant: &RationalTransferFunction) -> Self {
        AffineGainPolynomial {
            base: plant.den().clone(),
            slope: plant.num().clone(),
        }
    }

    pub fn at(&self, k: f64) -> Polynomial {
        &self.base + &self.slope.scale(k)
    }

    fn stable_at(&self, k: f64) -> bool {
        let p = self.at(k);
        p.degree() >= 1 && is_hurwitz(&p).unwrap_or(false)
    }
}

/// Open gain interval over which the loop is stable.
///
/// An endpoint that coincides with the search bound is reported at that
/// bound with the matching `*_bounded` flag cleared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityInterval {
    pub k_min: f64,
    pub k_max: f64,
    pub tolerance: f64,
    pub lower_bounded: bool,
    pub upper_bounded: bool,
}

impl StabilityInterval {
    pub fn contains(&self, k: f64) -> bool {
        k > self.k_min && k < self.k_max
    }
}

/// Locate the stable gain interval of `char_poly` within `search` by a
/// 101-point grid scan refined by bisection to `tol`.
///
/// If the grid shows several stable runs, the widest one is returned.
/// Returned endpoints sit on the stable side of the boundary.
pub fn gain_stability_interval(
    char_poly: &AffineGainPolynomial,
    search: (f64, f64),
    tol: f64,
) -> Result<StabilityInterval> {
    let (lo, hi) = search;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad search range [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| if i == GRID_POINTS - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let stable: Vec<bool> = grid.iter().map(|&k| char_poly.stable_at(k)).collect();

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < GRID_POINTS {
        if stable[i] {
            let start = i;
            while i + 1 < GRID_POINTS && stable[i + 1] {
                i += 1;
            }
            if best.map_or(true, |(s, e)| i - start > e - s) {
                best = Some((start, i));
            }
        }
        i += 1;
    }
    let (start, end) = best.ok_or(Error::NoStableGain { lo, hi })?;

    let refine = |mut inside: f64, mut outside: f64| {
        while (outside - inside).abs() > tol {
            let mid = 0.5 * (inside + outside);
            if char_poly.stable_at(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let (k_min, lower_bounded) = if start == 0 {
        (lo, false)
    } else {
        (refine(grid[start], grid[start - 1]), true)
    };
    let (k_max, upper_bounded) = if end == GRID_POINTS - 1 {
        (hi, false)
    } else {
        (refine(grid[end], grid[end + 1]), true)
    };
    Ok(StabilityInterval {
        k_min,
        k_max,
        tolerance: tol,
        lower_bounded,
        upper_bounded,
    })
}

/// Ultimate gain and period from the upper stability boundary: `k_u` is the
/// boundary gain and `T_u = 2 pi / omega` for the imaginary-axis pair there.
pub fn ultimate_params_from_interval(
    char_poly: &AffineGainPolynomial,
    interval: &StabilityInterval,
) -> Result<UltimateParams> {
    if !interval.upper_bounded || !interval.k_max.is_finite() {
        return Err(Error::UnboundedInterval);
    }
    let k_u = interval.k_max;
    let roots = char_poly.at(k_u).roots()?;
    let crossing = roots
        .iter()
        .filter(|z| z.im > 0.0)
        .min_by(|a, b| (a.re.abs() / a.norm()).total_cmp(&(b.re.abs() / b.norm())))
        .filter(|z| z.re.abs() <= 1e-3 * z.norm())
        .ok_or(Error::NoImaginaryPair(k_u))?;
    Ok(UltimateParams {
        k_u,
        t_u: 2.0 * std::f64::consts::PI / crossing.im,
    })
}
