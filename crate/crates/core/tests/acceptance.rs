//! Acceptance criteria for the example process `e^{-0.3 s} / (s + 1)`.
//!
//! Runs as a plain binary so that every criterion prints one PASS/FAIL line
//! even when the whole suite succeeds. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use foptd_core::freq::{evaluate_response, UltimateParams};
use foptd_core::metrics::{oscillation_estimate, step_metrics, StepMetrics};
use foptd_core::pipeline::{
    compare, nyquist_ultimate, pade_routh_ultimate, presets, tune, Method, TuneOptions,
};
use foptd_core::plant::{approximate_plant, delayed_plant, pade_1_1, ApproxMethod};
use foptd_core::simulation::{step_delayed_loop, step_rational, DelayBuffer, SimConfig, TimeSeries};
use foptd_core::stability::{gain_stability_interval, is_hurwitz, AffineGainPolynomial};
use foptd_core::tf_core::{pid_transfer_function, poly_roots, unity_feedback, Polynomial};
use foptd_core::tuning::{
    imc_pi, simc_pi, to_parallel_gains, zn_ultimate, ControllerType, PidGains, SimcConfig,
};
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Individual checks of one criterion.
struct Criterion {
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn within(&mut self, name: &str, value: f64, expected: f64, tol: f64) {
        let ok = (value - expected).abs() <= tol;
        self.checks.push((format!("{name}={value:.6} (want {expected} ± {tol})"), ok));
    }

    fn range(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        let ok = value >= lo && value <= hi;
        self.checks.push((format!("{name}={value:.6} (want [{lo}, {hi}])"), ok));
    }

    fn below(&mut self, name: &str, value: f64, limit: f64) {
        let ok = value < limit;
        self.checks.push((format!("{name}={value:.3e} (want < {limit})"), ok));
    }

    fn rel(&mut self, name: &str, value: f64, expected: f64, rel_tol: f64) {
        let err = (value - expected).abs() / expected.abs();
        self.checks.push((
            format!("{name}={value:.6} (want {expected} ± {:.2}%)", rel_tol * 100.0),
            err <= rel_tol,
        ));
    }

    fn holds(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    fn faster_than(&mut self, name: &str, elapsed: Duration, limit: Duration) {
        self.checks.push((
            format!("{name} took {:.3}s (want < {:.1}s)", elapsed.as_secs_f64(), limit.as_secs_f64()),
            elapsed < limit,
        ));
    }

    fn metrics(&mut self, prefix: &str, m: &StepMetrics) {
        self.checks.push((
            format!(
                "{prefix}: t_s={:.4} t_r={:.4} peak={:.4} OV={:.2}% e_ss={:.2e}",
                m.t_s, m.t_r, m.peak, m.overshoot_pct, m.e_ss
            ),
            true,
        ));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn c1_stability_interval() -> Criterion {
    let mut c = Criterion::new();
    let m = presets::example_model();
    let start = Instant::now();
    let (iv, _) = pade_routh_ultimate(&m).unwrap();
    let elapsed = start.elapsed();
    c.within("k_min", iv.k_min, -1.0, 1e-3);
    c.within("k_max", iv.k_max, 23.0 / 3.0, 1e-3);
    c.holds("both ends bounded", iv.lower_bounded && iv.upper_bounded);
    // Independent check straight from the characteristic polynomial
    // 0.3 s^2 + (2.3 - 0.3 K) s + (2 + 2 K).
    let plant = approximate_plant(&m, ApproxMethod::Pade11).unwrap();
    let cp = AffineGainPolynomial::from_plant(&plant);
    let direct = gain_stability_interval(&cp, (-50.0, 50.0), 1e-9).unwrap();
    c.within("k_max on wide search", direct.k_max, 23.0 / 3.0, 1e-6);
    c.faster_than("interval", elapsed, Duration::from_millis(100));
    c
}

fn c2_nyquist_margins() -> Criterion {
    let mut c = Criterion::new();
    let (margins, u) = nyquist_ultimate(&presets::example_model()).unwrap();
    c.within("gm_db", margins.gm_db, 15.4026, 0.002);
    c.within("omega_c", margins.omega_c, 5.8047, 0.001);
    c.within("k_u", u.k_u, 5.8902, 0.001);
    c.within("T_u", u.t_u, 1.0824, 0.001);
    // Scalar oracle: atan(w) + 0.3 w = pi.
    let (mut lo, mut hi) = (1.0_f64, 10.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.atan() + 0.3 * mid < PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    c.within("omega_c vs scalar root", margins.omega_c, lo, 1e-8);
    let p = evaluate_response(&delayed_plant(&presets::example_model()), margins.omega_c).unwrap();
    c.within("phase at omega_c", p.phase, -PI, 1e-8);
    c
}

fn c3_tuning_tables() -> Criterion {
    let mut c = Criterion::new();
    let m = presets::example_model();
    let (_, routh) = pade_routh_ultimate(&m).unwrap();
    let analytic_tu = 2.0 * PI / 57.78_f64.sqrt();
    c.within("Routh T_u (analytic)", routh.t_u, analytic_tu, 1e-3);
    for t_u in [presets::PLOT_READ_ULTIMATE.t_u, routh.t_u] {
        let row = zn_ultimate(&UltimateParams { k_u: routh.k_u, t_u }, ControllerType::PID);
        c.rel(&format!("Table 3 Kp (T_u={t_u:.4})"), row.kp, 4.6, 0.01);
        c.rel(&format!("Table 3 tau_i (T_u={t_u:.4})"), row.tau_i.unwrap(), 0.411, 0.01);
        c.rel(&format!("Table 3 tau_d (T_u={t_u:.4})"), row.tau_d.unwrap(), 0.103, 0.01);
    }
    let pade_gains = to_parallel_gains(&zn_ultimate(
        &UltimateParams { k_u: routh.k_u, t_u: presets::PLOT_READ_ULTIMATE.t_u },
        ControllerType::PID,
    ))
    .unwrap();
    c.rel("Case 1 Kp", pade_gains.kp, 4.6, 0.005);
    c.rel("Case 1 Ki", pade_gains.ki, 11.194, 0.005);
    c.rel("Case 1 Kd", pade_gains.kd, 0.473, 0.005);

    let (_, nyq) = nyquist_ultimate(&m).unwrap();
    let row = zn_ultimate(&nyq, ControllerType::PID);
    c.rel("Table 4 Kp", row.kp, 3.5341, 0.001);
    c.rel("Table 4 tau_i", row.tau_i.unwrap(), 0.5412, 0.001);
    c.rel("Table 4 tau_d", row.tau_d.unwrap(), 0.1353, 0.001);
    let g = to_parallel_gains(&row).unwrap();
    c.rel("Case 2 Kp", g.kp, 3.5341, 0.005);
    c.rel("Case 2 Ki", g.ki, 6.5301, 0.005);
    c.rel("Case 2 Kd", g.kd, 0.4782, 0.005);
    let chained = tune(&m, Method::ZnNyquist, ControllerType::PID, &TuneOptions::default()).unwrap();
    c.holds("zn-nyquist chain gives the same gains", chained.gains == g);
    c
}

fn c4_imc_simc() -> Criterion {
    let mut c = Criterion::new();
    let m = presets::example_model();
    let imc = imc_pi(&m, presets::IMC_TAU_C).unwrap();
    c.within("IMC Kp", imc.kp, 0.555, 0.003);
    c.within("IMC Ki", imc.ki, 0.555, 0.003);
    let tight = simc_pi(&m, &SimcConfig::tight(&m)).unwrap();
    c.within("SIMC tight Kp", tight.kp, 1.67, 0.01);
    c.within("SIMC tight Ki", tight.ki, 1.67, 0.01);
    let smooth = simc_pi(&m, &SimcConfig::smooth(&m)).unwrap();
    c.within("SIMC smooth Kp", smooth.kp, 1.33, 0.01);
    c.within("SIMC smooth Ki", smooth.ki, 1.33, 0.01);
    c
}

/// Printed closed-loop coefficients, numerator then denominator.
const PRINTED_NUM: [f64; 4] = [-0.1418, -0.4348, 5.842, 22.39];
const PRINTED_DEN: [f64; 4] = [0.1582, 1.865, 7.842, 22.39];

/// Half a unit in the 4th significant figure.
fn half_ulp4(x: f64) -> f64 {
    0.5 * 10f64.powf(x.abs().log10().floor() - 3.0)
}

fn c5_closed_loop_algebra() -> Criterion {
    let mut c = Criterion::new();
    let plant = approximate_plant(&presets::example_model(), ApproxMethod::Pade11).unwrap();
    let closed = |g: PidGains| {
        let cl = unity_feedback(&pid_transfer_function(&g).series(&plant)).unwrap();
        let lead = cl.den().leading();
        (cl.num().scale(1.0 / lead), cl.den().scale(1.0 / lead))
    };
    // Range of each monic coefficient over the rounding box of the gains.
    let mut lo = [f64::INFINITY; 8];
    let mut hi = [f64::NEG_INFINITY; 8];
    for corner in 0..8 {
        let d = |bit: usize| if corner >> bit & 1 == 1 { 5e-4 } else { -5e-4 };
        let (num, den) = closed(PidGains::new(4.6 + d(0), 11.194 + d(1), 0.473 + d(2)).unwrap());
        for i in 0..4 {
            let (a, b) = (num.coeff(3 - i), den.coeff(3 - i));
            lo[i] = lo[i].min(a);
            hi[i] = hi[i].max(a);
            lo[4 + i] = lo[4 + i].min(b);
            hi[4 + i] = hi[4 + i].max(b);
        }
    }
    // Range of each printed coefficient, normalized by the printed lead.
    let lead = PRINTED_DEN[0];
    let leads = [lead - half_ulp4(lead), lead + half_ulp4(lead)];
    let printed = PRINTED_NUM.iter().chain(PRINTED_DEN.iter());
    for (i, &p) in printed.enumerate() {
        let bounds: Vec<f64> = [-1.0, 1.0]
            .iter()
            .flat_map(|s| leads.iter().map(move |l| (p + s * half_ulp4(p)) / l))
            .collect();
        let (plo, phi) = bounds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let overlap = lo[i] <= phi && plo <= hi[i];
        let label = if i < 4 { format!("num s^{}", 3 - i) } else { format!("den s^{}", 7 - i) };
        c.holds(
            &format!("{label}: computed [{:.5}, {:.5}] meets printed [{plo:.5}, {phi:.5}]", lo[i], hi[i]),
            overlap,
        );
    }
    let (num, den) = closed(PidGains::new(4.6, 11.194, 0.473).unwrap());
    c.rel("monic num s^0 / den s^0", num.coeff(0) / den.coeff(0), 1.0, 1e-12);
    c
}

fn c6_poles() -> Criterion {
    let mut c = Criterion::new();
    let plant = approximate_plant(&presets::example_model(), ApproxMethod::Pade11).unwrap();
    for (k, re, im) in [(4.6, -1.5333, 5.9146), (5.0, -1.3333, 6.1824)] {
        let cl = unity_feedback(&pid_transfer_function(&PidGains::proportional(k).unwrap()).series(&plant)).unwrap();
        let poles = cl.poles().unwrap();
        c.holds(&format!("K={k}: two poles"), poles.len() == 2);
        let upper = poles.iter().find(|p| p.im > 0.0).unwrap();
        let lower = poles.iter().find(|p| p.im < 0.0).unwrap();
        c.within(&format!("K={k} re"), upper.re, re, 1e-3);
        c.within(&format!("K={k} im"), upper.im, im, 1e-3);
        c.holds(&format!("K={k}: conjugate pair"), *lower == upper.conj());
        // Oracle: quadratic formula on 0.3 s^2 + (2.3 - 0.3 K) s + (2 + 2 K).
        let (a, b, cc) = (0.3, 2.3 - 0.3 * k, 2.0 + 2.0 * k);
        let disc: f64 = 4.0 * a * cc - b * b;
        c.within(&format!("K={k} re vs quadratic"), upper.re, -b / (2.0 * a), 1e-10);
        c.within(&format!("K={k} im vs quadratic"), upper.im, disc.sqrt() / (2.0 * a), 1e-10);
    }
    c
}

fn c7_two_cases() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let results = compare(&presets::two_cases());
    let elapsed = start.elapsed();
    let case1 = results[0].as_ref().unwrap();
    let case2 = results[1].as_ref().unwrap();
    let m1 = case1.metrics.unwrap();
    let m2 = case2.metrics.unwrap();
    c.metrics("case 1", &m1);
    c.within("case 1 t_s", m1.t_s, 1.83, 0.05);
    c.range("case 1 t_r", m1.t_r, 0.12, 0.15);
    c.within("case 1 peak", m1.peak, 1.44, 0.02);
    c.within("case 1 OV", m1.overshoot_pct, 44.1, 1.5);
    c.below("case 1 |e_ss|", m1.e_ss.abs(), 1e-3);
    c.metrics("case 2", &m2);
    c.within("case 2 t_s", m2.t_s, 1.70, 0.08);
    c.within("case 2 t_r", m2.t_r, 0.12, 0.02);
    c.within("case 2 peak", m2.peak, 1.56, 0.03);
    c.within("case 2 OV", m2.overshoot_pct, 56.4, 2.0);
    c.below("case 2 |e_ss|", m2.e_ss.abs(), 1e-3);
    c.faster_than("both cases", elapsed, Duration::from_secs(5));
    c
}

fn c8_comparison_table() -> Criterion {
    let mut c = Criterion::new();
    let results = compare(&presets::controller_comparison());
    let metrics: Vec<StepMetrics> = results.iter().map(|r| r.as_ref().unwrap().metrics.unwrap()).collect();
    let (zn, imc, tight, smooth) = (metrics[0], metrics[1], metrics[2], metrics[3]);
    c.metrics("zn-pade", &zn);
    c.metrics("imc", &imc);
    c.within("IMC t_s", imc.t_s, 5.99, 0.3);
    c.within("IMC t_r", imc.t_r, 3.22, 0.15);
    c.below("IMC OV", imc.overshoot_pct, 0.5);
    c.metrics("simc-tight", &tight);
    c.within("SIMC tight t_s", tight.t_s, 1.82, 0.15);
    c.within("SIMC tight OV", tight.overshoot_pct, 4.12, 1.0);
    c.metrics("simc-smooth", &smooth);
    c.within("SIMC smooth t_s", smooth.t_s, 1.64, 0.15);
    c.below("SIMC smooth OV", smooth.overshoot_pct, 0.5);
    for (name, m) in [("IMC", imc), ("SIMC tight", tight), ("SIMC smooth", smooth)] {
        c.below(&format!("{name} |e_ss|"), m.e_ss.abs(), 1e-3);
    }
    c
}

fn window(ts: &TimeSeries, from: f64) -> TimeSeries {
    let start = (from / ts.dt()).round() as usize;
    TimeSeries::new(ts.t[start], ts.dt(), ts.y[start..].to_vec())
}

fn c9_oscillation_boundaries() -> Criterion {
    let mut c = Criterion::new();
    let m = presets::example_model();
    let (_, routh) = pade_routh_ultimate(&m).unwrap();
    let plant = approximate_plant(&m, ApproxMethod::Pade11).unwrap();
    let cl = unity_feedback(&pid_transfer_function(&PidGains::proportional(routh.k_u).unwrap()).series(&plant)).unwrap();
    // Six periods so the estimate spans at least five.
    let cfg = SimConfig::new(1e-3, 6.0 * routh.t_u + 0.5).unwrap();
    let osc = oscillation_estimate(&step_rational(&cl, &cfg).unwrap()).unwrap();
    c.range("case 1 amplitude ratio", osc.amplitude_ratio, 0.98, 1.02);
    c.within("case 1 period", osc.period, 0.8266, 0.01);

    let (_, nyq) = nyquist_ultimate(&m).unwrap();
    let ts = step_delayed_loop(&m, &PidGains::proportional(nyq.k_u).unwrap(), &SimConfig::new(1e-3, 30.0).unwrap()).unwrap();
    // Skip the start-up transient of the non-dominant modes.
    let osc = oscillation_estimate(&window(&ts, 15.0)).unwrap();
    c.within("case 2 period", osc.period, 1.0824, 0.02);
    c.range("case 2 amplitude ratio", osc.amplitude_ratio, 0.98, 1.02);
    c
}

fn c10_property_suites() -> Criterion {
    let mut c = Criterion::new();
    let mut rng = StdRng::seed_from_u64(2024);

    let mut disagreements = 0;
    for _ in 0..1000 {
        let degree = rng.gen_range(1..=5);
        let mut coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-10.0..10.0)).collect();
        if coeffs[0].abs() < 1e-3 {
            coeffs[0] = 1.0;
        }
        let p = Polynomial::new(coeffs);
        let max_re = poly_roots(&p).unwrap().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if max_re.abs() >= 1e-8 && is_hurwitz(&p).unwrap() != (max_re < 0.0) {
            disagreements += 1;
        }
    }
    c.holds(&format!("Routh vs roots: {disagreements} disagreements in 1000"), disagreements == 0);

    let m = foptd_core::plant::FoptdModel::new(1.0, 1.0, 0.0).unwrap();
    let g = PidGains::new(1.5, 2.0, 0.0).unwrap();
    let run_dt = |dt: f64| step_delayed_loop(&m, &g, &SimConfig::new(dt, 5.0).unwrap()).unwrap();
    let reference = run_dt(0.01);
    let dev = |ts: &TimeSeries| {
        let r = (ts.dt() / 0.01).round() as usize;
        ts.y.iter().enumerate().map(|(i, y)| (y - reference.y[i * r]).abs()).fold(0.0, f64::max)
    };
    let ratio = dev(&run_dt(0.04)) / dev(&run_dt(0.02));
    c.holds(&format!("RK4 error ratio on halving dt: {ratio:.1} (want >= 8)"), ratio >= 8.0);

    let mut buf = DelayBuffer::new(300);
    let exact = (0..3000).all(|i| {
        let out = buf.push(i as f64 * 1e-3);
        let want = if i < 300 { 0.0 } else { (i - 300) as f64 * 1e-3 };
        (out - want).abs() <= 1e-12
    });
    c.holds("delay buffer reproduces shifted ramp", exact);

    let pade = pade_1_1(0.3).unwrap();
    let all_pass = (0..1000).all(|i| (pade.freq_response(i as f64 * 0.1).norm() - 1.0).abs() < 1e-12);
    c.holds("Pade all-pass", all_pass);
    let dc = [ApproxMethod::Pade11, ApproxMethod::Taylor1]
        .iter()
        .all(|&a| (approximate_plant(&presets::example_model(), a).unwrap().dc_gain() - 1.0).abs() < 1e-12);
    c.holds("approximation DC gain", dc);

    let dt = 1e-2;
    let y: Vec<f64> = (0..4000)
        .map(|i| {
            let t = i as f64 * dt;
            1.0 - (-t).exp() * ((2.0 * t).cos() + 0.5 * (2.0 * t).sin())
        })
        .collect();
    let base = step_metrics(&TimeSeries::new(0.0, dt, y.clone()), 1.0).unwrap();
    let mut shifted = vec![0.0; 250];
    shifted.extend_from_slice(&y);
    let moved = step_metrics(&TimeSeries::new(0.0, dt, shifted), 1.0).unwrap();
    c.holds(
        "metrics shift invariance",
        (moved.t_s - base.t_s - 2.5).abs() < 1e-9 && (moved.t_r - base.t_r).abs() < 1e-9 && moved.peak == base.peak,
    );
    let scaled = step_metrics(&TimeSeries::new(0.0, dt, y.iter().map(|v| 3.0 * v).collect()), 3.0).unwrap();
    c.holds(
        "metrics scale equivariance",
        (scaled.t_s - base.t_s).abs() < 1e-9
            && (scaled.overshoot_pct - base.overshoot_pct).abs() < 1e-9
            && (scaled.peak - 3.0 * base.peak).abs() < 1e-12,
    );
    c
}

fn main() {
    let criteria: [(&str, fn() -> Criterion); 10] = [
        ("1 stability interval", c1_stability_interval),
        ("2 Nyquist margins", c2_nyquist_margins),
        ("3 tuning tables", c3_tuning_tables),
        ("4 IMC/SIMC gains", c4_imc_simc),
        ("5 closed-loop algebra", c5_closed_loop_algebra),
        ("6 closed-loop poles", c6_poles),
        ("7 step metrics, two cases", c7_two_cases),
        ("8 controller comparison", c8_comparison_table),
        ("9 oscillation boundaries", c9_oscillation_boundaries),
        ("10 property suites", c10_property_suites),
    ];
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "-v");
    let mut failures = 0;
    for (name, check) in criteria {
        let result = check();
        let ok = result.passed();
        failures += usize::from(!ok);
        println!("[{}] criterion {name}", if ok { "PASS" } else { "FAIL" });
        for (line, passed) in &result.checks {
            if verbose || !ok {
                println!("    {} {line}", if *passed { "ok  " } else { "FAIL" });
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
