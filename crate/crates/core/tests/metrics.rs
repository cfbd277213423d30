use foptd_core::metrics::step_metrics;
use foptd_core::simulation::TimeSeries;
use proptest::prelude::*;

/// Underdamped second-order step response, run until it equals 1 to machine
/// precision.
fn response(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = (40.0 / a / dt) as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 * dt;
            1.0 - (-a * t).exp() * ((b * t).cos() + a / b * (b * t).sin())
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prepending_rest_shifts_times(a in 0.5f64..3.0, b in 0.1f64..5.0, n in 1usize..2000) {
        let dt = 1e-2;
        let y = response(a, b, dt);
        let mut shifted = vec![y[0]; n];
        shifted.extend_from_slice(&y);
        let base = step_metrics(&TimeSeries::new(0.0, dt, y), 1.0).unwrap();
        let moved = step_metrics(&TimeSeries::new(0.0, dt, shifted), 1.0).unwrap();
        let shift = n as f64 * dt;
        prop_assert!(close(moved.t_r, base.t_r, 1e-9), "{} vs {}", moved.t_r, base.t_r);
        prop_assert!(close(moved.t_s, base.t_s + shift, 1e-9), "{} vs {}", moved.t_s, base.t_s + shift);
        prop_assert!(close(moved.peak, base.peak, 1e-9));
        prop_assert!(close(moved.overshoot_pct, base.overshoot_pct, 1e-9));
        prop_assert!((moved.e_ss - base.e_ss).abs() < 1e-9);
    }

    #[test]
    fn scaling_response_and_reference(a in 0.5f64..3.0, b in 0.1f64..5.0, c in 0.01f64..100.0) {
        let dt = 1e-2;
        let y = response(a, b, dt);
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        let base = step_metrics(&TimeSeries::new(0.0, dt, y), 1.0).unwrap();
        let big = step_metrics(&TimeSeries::new(0.0, dt, scaled), c).unwrap();
        prop_assert!(close(big.t_r, base.t_r, 1e-9));
        prop_assert!(close(big.t_s, base.t_s, 1e-9));
        prop_assert!(close(big.overshoot_pct, base.overshoot_pct, 1e-9));
        prop_assert!(close(big.peak, c * base.peak, 1e-12));
        prop_assert!((big.e_ss - c * base.e_ss).abs() <= 1e-12 * c);
    }

    #[test]
    fn nondecreasing_series_has_no_overshoot(
        steps in prop::collection::vec(0.0f64..1.0, 10..400),
        flat in 0.2f64..1.0,
    ) {
        let mut y = Vec::with_capacity(steps.len() * 3);
        let mut level = 0.0;
        for s in &steps {
            level += s;
            y.push(level);
        }
        let tail = ((steps.len() as f64) * flat).ceil() as usize + 1;
        // A flat tail at least as long as the settled window.
        let tail = tail.max(y.len() / 4 + 1);
        y.extend(std::iter::repeat(level).take(tail));
        let m = step_metrics(&TimeSeries::new(0.0, 0.1, y), level).unwrap();
        prop_assert_eq!(m.overshoot_pct, 0.0);
        prop_assert_eq!(m.peak, level);
        prop_assert_eq!(m.e_ss, 0.0);
    }
}
