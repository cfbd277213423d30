//! End-to-end tuning chains and closed-loop runs.
//!
//! A [`RunSpec`] names a process model, a tuning method and a controller
//! type. [`tune`] turns it into controller gains; [`run`] also simulates the
//! unit-step response and measures it.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::freq::{self, MarginReport, UltimateParams};
use crate::metrics::{step_metrics, StepMetrics};
use crate::plant::{approximate_plant, delayed_plant, ApproxMethod, FoptdModel};
use crate::simulation::{
    derivative_warning, step_delayed_loop, step_rational, SimConfig, TimeSeries,
};
use crate::stability::{
    gain_stability_interval, ultimate_params_from_interval, AffineGainPolynomial,
    StabilityInterval, DEFAULT_TOLERANCE,
};
use crate::tf_core::{filtered_pid_transfer_function, unity_feedback, RationalTransferFunction};
use crate::tuning::{
    imc_pi, simc_pi, to_parallel_gains, zn_ultimate, ControllerType, PidGains, SimcConfig,
    TuningRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Pade 1/1 delay, Routh interval, Ziegler-Nichols.
    ZnPade,
    /// Exact delay, gain margin at phase crossover, Ziegler-Nichols.
    ZnNyquist,
    Imc,
    SimcTight,
    SimcSmooth,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ZnPade,
        Method::ZnNyquist,
        Method::Imc,
        Method::SimcTight,
        Method::SimcSmooth,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::ZnPade => "zn-pade",
            Method::ZnNyquist => "zn-nyquist",
            Method::Imc => "imc",
            Method::SimcTight => "simc-tight",
            Method::SimcSmooth => "simc-smooth",
        }
    }

    pub fn is_pi_only(&self) -> bool {
        matches!(self, Method::Imc | Method::SimcTight | Method::SimcSmooth)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Which plant the closed loop is simulated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantView {
    /// Pade-approximated rational plant, simulated as a rational loop.
    Pade,
    /// Exact dead time through a delay buffer.
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TuneOptions {
    /// Desired closed-loop time constant; required by IMC, overrides the
    /// SIMC preset when set.
    pub tau_c: Option<f64>,
    /// Use these ultimate parameters instead of computing them (Z-N only).
    pub ultimate: Option<UltimateParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneOutcome {
    pub method: Method,
    pub controller_type: ControllerType,
    pub gains: PidGains,
    pub row: TuningRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ultimate: Option<UltimateParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<StabilityInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<MarginReport>,
    pub warnings: Vec<Warning>,
}

/// Gain search range for the Pade loop, wide enough to hold both boundaries.
pub fn default_gain_search(m: &FoptdModel) -> (f64, f64) {
    let ratio = if m.theta > 0.0 {
        (2.0 * m.tau + m.theta) / m.theta
    } else {
        1e3
    };
    let bound = 2.0 * ratio.max(1.0) / m.k.abs();
    (-bound, bound)
}

/// Stability interval and ultimate parameters of the Pade-approximated
/// proportional loop.
pub fn pade_routh_ultimate(m: &FoptdModel) -> Result<(StabilityInterval, UltimateParams)> {
    let plant = approximate_plant(m, ApproxMethod::Pade11)?;
    let char_poly = AffineGainPolynomial::from_plant(&plant);
    let interval = gain_stability_interval(&char_poly, default_gain_search(m), DEFAULT_TOLERANCE)?;
    let ultimate = ultimate_params_from_interval(&char_poly, &interval)?;
    Ok((interval, ultimate))
}

/// Gain margin and ultimate parameters of the exact delayed plant.
pub fn nyquist_ultimate(m: &FoptdModel) -> Result<(MarginReport, UltimateParams)> {
    let margins = freq::phase_crossover(&delayed_plant(m), freq::default_omega_max(m))?;
    Ok((margins, freq::ultimate_from_margins(&margins)))
}

pub fn tune(
    m: &FoptdModel,
    method: Method,
    controller_type: ControllerType,
    opts: &TuneOptions,
) -> Result<TuneOutcome> {
    if method.is_pi_only() && controller_type != ControllerType::PI {
        return Err(Error::InvalidArgument(format!(
            "{method} only produces PI controllers, got {controller_type}"
        )));
    }
    let mut warnings: Vec<Warning> = m.delay_warning().into_iter().collect();
    let mut interval = None;
    let mut margins = None;
    let mut ultimate = opts.ultimate;
    let mut tau_c = None;

    let gains = match method {
        Method::ZnPade | Method::ZnNyquist => {
            let u = match (ultimate, method) {
                (Some(u), _) => u,
                (None, Method::ZnPade) => {
                    let (iv, u) = pade_routh_ultimate(m)?;
                    interval = Some(iv);
                    u
                }
                (None, _) => {
                    let (mr, u) = nyquist_ultimate(m)?;
                    margins = Some(mr);
                    u
                }
            };
            ultimate = Some(u);
            to_parallel_gains(&zn_ultimate(&u, controller_type))?
        }
        Method::Imc => {
            let tc = opts.tau_c.ok_or_else(|| {
                Error::InvalidArgument("imc needs an explicit tau_c".into())
            })?;
            tau_c = Some(tc);
            imc_pi(m, tc)?
        }
        Method::SimcTight | Method::SimcSmooth => {
            let cfg = match (opts.tau_c, method) {
                (Some(tc), _) => SimcConfig::custom(tc),
                (None, Method::SimcTight) => SimcConfig::tight(m),
                (None, _) => SimcConfig::smooth(m),
            };
            tau_c = Some(cfg.tau_c);
            simc_pi(m, &cfg)?
        }
    };
    let row = match method {
        Method::ZnPade | Method::ZnNyquist => zn_ultimate(&ultimate.expect("set above"), controller_type),
        _ => TuningRow::from_gains(&gains)?,
    };
    warnings.extend(derivative_warning(&gains));
    Ok(TuneOutcome {
        method,
        controller_type,
        gains,
        row,
        tau_c,
        ultimate,
        interval,
        margins,
        warnings,
    })
}

/// Unity-feedback loop of `gains` around the Pade-approximated plant.
pub fn pade_closed_loop(
    m: &FoptdModel,
    gains: &PidGains,
    cfg: &SimConfig,
) -> Result<RationalTransferFunction> {
    let plant = approximate_plant(m, ApproxMethod::Pade11)?;
    let controller = filtered_pid_transfer_function(gains, cfg.derivative);
    unity_feedback(&controller.series(&plant))
}

/// Unit-step response of `gains` against the chosen view of the plant.
pub fn simulate(m: &FoptdModel, gains: &PidGains, view: PlantView, cfg: &SimConfig) -> Result<TimeSeries> {
    match view {
        PlantView::Pade => step_rational(&pade_closed_loop(m, gains, cfg)?, cfg),
        PlantView::Delayed => step_delayed_loop(m, gains, &cfg.aligned_to_delay(m.theta)),
    }
}

/// Everything needed to tune and simulate one loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub label: String,
    pub model: FoptdModel,
    pub method: Method,
    pub controller_type: ControllerType,
    pub options: TuneOptions,
    pub sim: SimConfig,
    pub view: PlantView,
    /// Skip tuning and use these gains.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<PidGains>,
}

impl RunSpec {
    /// Default plant view: Pade loop for `zn-pade`, exact delay otherwise.
    pub fn new(model: FoptdModel, method: Method, controller_type: ControllerType) -> Self {
        RunSpec {
            label: format!("{method}-{controller_type}"),
            model,
            method,
            controller_type,
            options: TuneOptions::default(),
            sim: SimConfig::default(),
            view: if method == Method::ZnPade {
                PlantView::Pade
            } else {
                PlantView::Delayed
            },
            gains: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub label: String,
    pub method: Method,
    pub view: PlantView,
    pub gains: PidGains,
    pub metrics: Option<StepMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_error: Option<String>,
    pub warnings: Vec<Warning>,
    #[serde(skip)]
    pub series: TimeSeries,
}

pub fn run(spec: &RunSpec) -> Result<RunResult> {
    let (gains, warnings) = match spec.gains {
        Some(g) => (g, derivative_warning(&g).into_iter().collect()),
        None => {
            let t = tune(&spec.model, spec.method, spec.controller_type, &spec.options)?;
            (t.gains, t.warnings)
        }
    };
    let series = simulate(&spec.model, &gains, spec.view, &spec.sim)?;
    let (metrics, metrics_error) = match step_metrics(&series, 1.0) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(RunResult {
        label: spec.label.clone(),
        method: spec.method,
        view: spec.view,
        gains,
        metrics,
        metrics_error,
        warnings,
        series,
    })
}

/// Run every spec on its own thread; results keep the input order.
pub fn compare(specs: &[RunSpec]) -> Vec<Result<RunResult>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = specs.iter().map(|s| scope.spawn(move || run(s))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// Reproduction scenarios for the example process `e^{-0.3 s} / (s + 1)`.
pub mod presets {
    use super::*;

    pub fn example_model() -> FoptdModel {
        FoptdModel::new(1.0, 1.0, 0.3).expect("valid model")
    }

    /// Ultimate parameters as read from the plot of the boundary oscillation.
    pub const PLOT_READ_ULTIMATE: UltimateParams = UltimateParams { k_u: 7.67, t_u: 0.8219 };
    /// Desired closed-loop time constant of the IMC comparison run.
    pub const IMC_TAU_C: f64 = 1.5;
    /// Duration long enough for the slowest (IMC) loop to settle.
    pub const COMPARISON_T_FINAL: f64 = 12.0;

    /// Case 1 (Pade loop, Routh/Z-N PID) and Case 2 (exact delay,
    /// Nyquist/Z-N PID).
    pub fn two_cases() -> Vec<RunSpec> {
        let m = example_model();
        let mut case1 = RunSpec::new(m, Method::ZnPade, ControllerType::PID);
        case1.label = "case-1".into();
        let mut case2 = RunSpec::new(m, Method::ZnNyquist, ControllerType::PID);
        case2.label = "case-2".into();
        vec![case1, case2]
    }

    /// Z-N/Pade PID against IMC and both SIMC presets.
    pub fn controller_comparison() -> Vec<RunSpec> {
        let m = example_model();
        let sim = SimConfig {
            t_final: COMPARISON_T_FINAL,
            ..SimConfig::default()
        };
        let mut zn = RunSpec::new(m, Method::ZnPade, ControllerType::PID);
        let mut imc = RunSpec::new(m, Method::Imc, ControllerType::PI);
        imc.options.tau_c = Some(IMC_TAU_C);
        let mut tight = RunSpec::new(m, Method::SimcTight, ControllerType::PI);
        let mut smooth = RunSpec::new(m, Method::SimcSmooth, ControllerType::PI);
        for (spec, label) in [
            (&mut zn, "zn-pade"),
            (&mut imc, "imc"),
            (&mut tight, "simc-tight"),
            (&mut smooth, "simc-smooth"),
        ] {
            spec.sim = sim;
            spec.label = label.into();
        }
        vec![zn, imc, tight, smooth]
    }
}
