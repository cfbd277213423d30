use foptd_core::freq::UltimateParams;
use foptd_core::plant::FoptdModel;
use foptd_core::tuning::{simc_pi, to_parallel_gains, zn_ultimate, ControllerType, SimcConfig, TuningRow};
use proptest::prelude::*;

fn controller_type() -> impl Strategy<Value = ControllerType> {
    prop_oneof![Just(ControllerType::P), Just(ControllerType::PI), Just(ControllerType::PID)]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn parallel_form_round_trip(k_u in 0.01f64..100.0, t_u in 0.01f64..100.0, ty in controller_type()) {
        let row = zn_ultimate(&UltimateParams { k_u, t_u }, ty);
        let g = to_parallel_gains(&row).unwrap();
        let back = TuningRow::from_gains(&g).unwrap();
        prop_assert_eq!(back.controller_type, ty);
        prop_assert!(close(back.kp, row.kp));
        match (back.tau_i, row.tau_i) {
            (Some(a), Some(b)) => prop_assert!(close(a, b)),
            (a, b) => prop_assert_eq!(a, b),
        }
        match (back.tau_d, row.tau_d) {
            (Some(a), Some(b)) => prop_assert!(close(a, b)),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn zn_is_homogeneous_in_ultimate_gain(
        k_u in 0.01f64..100.0,
        t_u in 0.01f64..100.0,
        c in 0.01f64..100.0,
        ty in controller_type(),
    ) {
        let base = zn_ultimate(&UltimateParams { k_u, t_u }, ty);
        let scaled = zn_ultimate(&UltimateParams { k_u: c * k_u, t_u }, ty);
        prop_assert!(close(scaled.kp, c * base.kp));
        prop_assert_eq!(scaled.tau_i, base.tau_i);
        prop_assert_eq!(scaled.tau_d, base.tau_d);
    }

    #[test]
    fn simc_branches_meet_at_boundary(
        k in 0.1f64..10.0,
        tau_c in 0.01f64..5.0,
        theta in 0.01f64..5.0,
        side in -1e-9f64..1e-9,
    ) {
        let boundary = 4.0 * (tau_c + theta);
        let at = |tau: f64| simc_pi(&FoptdModel::new(k, tau, theta).unwrap(), &SimcConfig::custom(tau_c)).unwrap();
        let exact = at(boundary);
        let integral_branch = exact.kp / boundary;
        prop_assert!(close(exact.ki, integral_branch));
        // Continuity across the switch.
        let nearby = at(boundary * (1.0 + side));
        prop_assert!((nearby.ki - exact.ki).abs() <= 1e-8 * exact.ki);
        prop_assert!((nearby.kp - exact.kp).abs() <= 1e-8 * exact.kp);
    }
}
