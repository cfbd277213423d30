//! Subcommand arguments and handlers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use foptd_core::freq::{self, nyquist_csv, nyquist_series, UltimateParams};
use foptd_core::metrics::{oscillation_estimate, StepMetrics};
use foptd_core::pipeline::{
    self, default_gain_search, presets, simulate as simulate_loop, tune as tune_chain, Method,
    PlantView, RunResult, RunSpec, TuneOptions,
};
use foptd_core::plant::{approximate_plant, delayed_plant, ApproxMethod, FoptdModel};
use foptd_core::simulation::{step_delayed_loop, step_rational, SimConfig, TimeSeries};
use foptd_core::stability::{
    gain_stability_interval, routh_array, ultimate_params_from_interval, AffineGainPolynomial,
    DEFAULT_TOLERANCE,
};
use foptd_core::tf_core::{pid_transfer_function, unity_feedback};
use foptd_core::tuning::{to_parallel_gains, zn_ultimate, ControllerType, PidGains};
use foptd_core::Error;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{parse_gains, parse_range, CommonArgs, Resolved};
use crate::output::{emit, envelope, write_file, CliError, CliResult};

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// zn-pade, zn-nyquist, imc, simc-tight or simc-smooth.
    #[arg(long)]
    pub method: Option<String>,
    /// P, PI or PID (IMC and SIMC give PI only).
    #[arg(long = "type")]
    pub controller_type: Option<String>,
    /// Desired closed-loop time constant for IMC / SIMC, s.
    #[arg(long = "tau-c")]
    pub tau_c: Option<f64>,
    /// Use this ultimate gain instead of computing it (Z-N methods).
    #[arg(long, requires = "tu")]
    pub ku: Option<f64>,
    /// Use this ultimate period instead of computing it (Z-N methods), s.
    #[arg(long, requires = "ku")]
    pub tu: Option<f64>,
}

impl MethodArgs {
    fn resolve(&self, r: &Resolved) -> CliResult<(Method, ControllerType, TuneOptions)> {
        let method: Method = self
            .method
            .as_ref()
            .or(r.file.method.as_ref())
            .ok_or_else(|| CliError::usage("--method is required"))?
            .parse()?;
        let controller_type = match self.controller_type.as_ref().or(r.file.controller_type.as_ref()) {
            Some(t) => t.parse()?,
            None if method.is_pi_only() => ControllerType::PI,
            None => ControllerType::PID,
        };
        let ultimate = match (self.ku, self.tu) {
            (Some(k_u), Some(t_u)) => Some(UltimateParams { k_u, t_u }),
            _ => None,
        };
        let tau_c = self.tau_c.or(r.file.tau_c);
        Ok((method, controller_type, TuneOptions { tau_c, ultimate }))
    }
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub method: MethodArgs,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn warnings_text(out: &mut String, warnings: &[foptd_core::Warning]) {
    for w in warnings {
        let _ = writeln!(out, "warning: {w}");
    }
}

pub fn tune(args: &TuneArgs) -> CliResult<()> {
    let r = args.common.resolve()?;
    let model = r.require_model()?;
    let (method, ty, opts) = args.method.resolve(&r)?;
    let outcome = tune_chain(&model, method, ty, &opts)?;

    let report = envelope("tune", json!({ "model": model, "tuning": outcome }));
    let mut text = String::new();
    let _ = writeln!(text, "method {method}, {ty} controller");
    if let Some(u) = outcome.ultimate {
        let _ = writeln!(text, "ultimate gain {:.6}, ultimate period {:.6} s", u.k_u, u.t_u);
    }
    if let Some(tc) = outcome.tau_c {
        let _ = writeln!(text, "tau_c {tc:.6} s");
    }
    let _ = writeln!(
        text,
        "Kp {:.6}  tau_i {}  tau_d {}",
        outcome.row.kp,
        fmt_opt(outcome.row.tau_i),
        fmt_opt(outcome.row.tau_d)
    );
    let g = outcome.gains;
    let _ = writeln!(text, "Kp {:.6}  Ki {:.6}  Kd {:.6}", g.kp, g.ki, g.kd);
    warnings_text(&mut text, &outcome.warnings);
    emit(args.common.json.as_deref(), &report, &text)
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(subcommand)]
    pub what: AnalyzeWhat,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeWhat {
    /// Stable proportional-gain interval of the Pade-approximated loop.
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Gain search range `lo,hi`.
        #[arg(long)]
        search: Option<String>,
        /// Bisection tolerance on the endpoints.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Write the Routh array at `--gain` as CSV.
        #[arg(long = "dump-array")]
        dump_array: Option<PathBuf>,
        /// Proportional gain for the Routh array dump.
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
    },
    /// Gain margin of the exact delayed plant.
    Margins {
        #[command(flatten)]
        common: CommonArgs,
        /// Write Nyquist data (omega,re,im,mag_db,phase_rad) as CSV.
        #[arg(long = "nyquist-csv")]
        nyquist_csv: Option<PathBuf>,
        /// Frequency range `lo,hi` for the Nyquist data, rad/s.
        #[arg(long = "omega-range")]
        omega_range: Option<String>,
        /// Number of Nyquist points.
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
    /// Closed-loop poles and zeros around the Pade-approximated plant.
    Poles {
        #[command(flatten)]
        common: CommonArgs,
        /// Proportional gain.
        #[arg(long, conflicts_with = "gains")]
        gain: Option<f64>,
        /// PID gains `kp,ki,kd` (ideal derivative).
        #[arg(long)]
        gains: Option<String>,
    },
}

fn complex_json(z: &[Complex64]) -> Value {
    Value::Array(z.iter().map(|c| json!({ "re": c.re, "im": c.im })).collect())
}

fn pade_plant(m: &FoptdModel) -> CliResult<foptd_core::tf_core::RationalTransferFunction> {
    Ok(approximate_plant(m, ApproxMethod::Pade11)?)
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    match &args.what {
        AnalyzeWhat::Stability { common, search, tol, dump_array, gain } => {
            let r = common.resolve()?;
            let model = r.require_model()?;
            let char_poly = AffineGainPolynomial::from_plant(&pade_plant(&model)?);
            let search = match search {
                Some(s) => parse_range(s)?,
                None => default_gain_search(&model),
            };
            let interval = gain_stability_interval(&char_poly, search, *tol)?;
            let ultimate = ultimate_params_from_interval(&char_poly, &interval).ok();
            let array = routh_array(&char_poly.at(*gain))?;
            if let Some(path) = dump_array {
                write_file(path, &array.to_csv())?;
            }
            let report = envelope(
                "analyze-stability",
                json!({
                    "model": model,
                    "characteristic_polynomial": {
                        "base": char_poly.base.coeffs(),
                        "slope": char_poly.slope.coeffs(),
                    },
                    "interval": interval,
                    "ultimate": ultimate,
                    "routh_array": { "gain": gain, "rows": array.rows, "marginal": array.marginal },
                }),
            );
            let mut text = format!(
                "stable for {:.6} < K < {:.6}{}\n",
                interval.k_min,
                interval.k_max,
                if interval.lower_bounded && interval.upper_bounded { "" } else { " (clipped at search range)" }
            );
            if let Some(u) = ultimate {
                let _ = writeln!(text, "ultimate gain {:.6}, ultimate period {:.6} s", u.k_u, u.t_u);
            }
            let _ = write!(text, "Routh array at K = {gain}:\n{}", array.to_csv());
            emit(common.json.as_deref(), &report, &text)
        }
        AnalyzeWhat::Margins { common, nyquist_csv: csv_path, omega_range, points } => {
            let r = common.resolve()?;
            let model = r.require_model()?;
            let g = delayed_plant(&model);
            let margins = freq::phase_crossover(&g, freq::default_omega_max(&model))?;
            let ultimate = freq::ultimate_from_margins(&margins);
            if let Some(path) = csv_path {
                let (lo, hi) = match omega_range {
                    Some(s) => parse_range(s)?,
                    None => (1e-2 * margins.omega_c, 1e2 * margins.omega_c),
                };
                write_file(path, &nyquist_csv(&nyquist_series(&g, lo, hi, *points)?))?;
            }
            let report = envelope("analyze-margins", json!({ "model": model, "margins": margins, "ultimate": ultimate }));
            let text = format!(
                "phase crossover {:.6} rad/s, gain margin {:.6} dB ({:.6})\nultimate gain {:.6}, ultimate period {:.6} s\n",
                margins.omega_c, margins.gm_db, margins.gm_mag, ultimate.k_u, ultimate.t_u
            );
            emit(common.json.as_deref(), &report, &text)
        }
        AnalyzeWhat::Poles { common, gain, gains } => {
            let r = common.resolve()?;
            let model = r.require_model()?;
            let g = match (gain, gains) {
                (Some(k), _) => PidGains::proportional(*k)?,
                (None, Some(s)) => parse_gains(s)?,
                (None, None) => return Err(CliError::usage("--gain or --gains is required")),
            };
            let cl = unity_feedback(&pid_transfer_function(&g).series(&pade_plant(&model)?))?;
            let poles = cl.poles()?;
            let zeros = cl.zeros()?;
            let stable = poles.iter().all(|p| p.re < 0.0);
            let minimum_phase = stable && zeros.iter().all(|z| z.re < 0.0);
            let report = envelope(
                "analyze-poles",
                json!({
                    "model": model,
                    "gains": g,
                    "closed_loop": { "num": cl.num().coeffs(), "den": cl.den().coeffs() },
                    "poles": complex_json(&poles),
                    "zeros": complex_json(&zeros),
                    "stable": stable,
                    "minimum_phase": minimum_phase,
                }),
            );
            let mut text = String::new();
            for p in &poles {
                let _ = writeln!(text, "pole {:.6} {:+.6}j", p.re, p.im);
            }
            for z in &zeros {
                let _ = writeln!(text, "zero {:.6} {:+.6}j", z.re, z.im);
            }
            let _ = writeln!(text, "{}", if stable { "stable" } else { "unstable" });
            emit(common.json.as_deref(), &report, &text)
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Explicit gains `kp,ki,kd` instead of a tuning method.
    #[arg(long, conflicts_with = "method")]
    pub gains: Option<String>,
    /// `pade` (rational loop) or `delayed` (exact dead time).
    #[arg(long)]
    pub plant: Option<String>,
    /// Write the response as CSV (`t,y`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_view(s: &str) -> CliResult<PlantView> {
    match s {
        "pade" => Ok(PlantView::Pade),
        "delayed" => Ok(PlantView::Delayed),
        other => Err(CliError::usage(&format!("--plant must be pade or delayed, got {other:?}"))),
    }
}

fn metrics_json(result: &Result<StepMetrics, Error>) -> Value {
    match result {
        Ok(m) => json!({ "metrics": m }),
        Err(e) => json!({ "metrics": null, "metrics_error": { "kind": e.kind(), "message": e.to_string() } }),
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let r = args.common.resolve()?;
    let model = r.require_model()?;
    let (gains, method, warnings) = match &args.gains {
        Some(s) => {
            let g = parse_gains(s)?;
            (g, None, foptd_core::simulation::derivative_warning(&g).into_iter().collect())
        }
        None => {
            let (method, ty, opts) = args.method.resolve(&r)?;
            let t = tune_chain(&model, method, ty, &opts)?;
            (t.gains, Some(method), t.warnings)
        }
    };
    let view = match &args.plant {
        Some(s) => parse_view(s)?,
        None if method == Some(Method::ZnPade) => PlantView::Pade,
        None => PlantView::Delayed,
    };
    let series = simulate_loop(&model, &gains, view, &r.sim)?;
    if let Some(path) = &args.csv {
        write_file(path, &series.to_csv())?;
    }
    let metrics = foptd_core::metrics::step_metrics(&series, 1.0);
    let mut payload = json!({
        "model": model,
        "method": method,
        "gains": gains,
        "plant": view,
        "sim": r.sim,
        "samples": series.len(),
        "warnings": warnings,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut payload, metrics_json(&metrics)) {
        dst.extend(src);
    }
    let report = envelope("simulate", payload);
    let mut text = format!("{} samples at dt = {} s\n", series.len(), r.sim.dt);
    match &metrics {
        Ok(m) => {
            let _ = writeln!(
                text,
                "t_s {:.4} s  t_r {:.4} s  peak {:.4}  overshoot {:.2}%  e_ss {:.2e}",
                m.t_s, m.t_r, m.peak, m.overshoot_pct, m.e_ss
            );
        }
        Err(e) => {
            let _ = writeln!(text, "no metrics: {e}");
        }
    }
    warnings_text(&mut text, &warnings);
    emit(args.common.json.as_deref(), &report, &text)
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Run as `method[:type[:tau_c]]`, e.g. `imc:PI:1.5`; repeat for each loop.
    #[arg(long = "run", required = true, num_args = 1)]
    pub runs: Vec<String>,
    /// Also simulate Pade-tuned gains against the exact delayed plant.
    #[arg(long = "true-delay")]
    pub true_delay: bool,
    /// Write one `t,y` CSV per run into this directory.
    #[arg(long = "csv-dir")]
    pub csv_dir: Option<PathBuf>,
}

fn parse_run(text: &str, model: FoptdModel, sim: SimConfig) -> CliResult<RunSpec> {
    let mut parts = text.split(':');
    let method: Method = parts.next().unwrap_or_default().parse()?;
    let ty = match parts.next() {
        Some(t) => t.parse()?,
        None if method.is_pi_only() => ControllerType::PI,
        None => ControllerType::PID,
    };
    let tau_c = parts
        .next()
        .map(|v| v.parse::<f64>().map_err(|_| CliError::usage(&format!("bad tau_c in {text:?}"))))
        .transpose()?;
    if parts.next().is_some() {
        return Err(CliError::usage(&format!("run must be method[:type[:tau_c]], got {text:?}")));
    }
    let mut spec = RunSpec::new(model, method, ty);
    spec.options.tau_c = tau_c;
    spec.sim = sim;
    spec.label = match tau_c {
        Some(tc) => format!("{method}-{ty}-tc{tc}"),
        None => format!("{method}-{ty}"),
    };
    Ok(spec)
}

/// Table-shaped summary of a set of runs.
fn comparison_table(specs: &[RunSpec], results: &[Result<RunResult, Error>]) -> String {
    let mut out = format!(
        "{:<22} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>10}\n",
        "run", "Kp", "Ki", "Kd", "t_s", "t_r", "%OV", "peak", "e_ss"
    );
    for (spec, result) in specs.iter().zip(results) {
        match result {
            Ok(r) => {
                let g = r.gains;
                let _ = write!(out, "{:<22} {:>9.4} {:>9.4} {:>9.4}", r.label, g.kp, g.ki, g.kd);
                match &r.metrics {
                    Some(m) => {
                        let _ = writeln!(
                            out,
                            " {:>8.3} {:>8.3} {:>8.2} {:>8.3} {:>10.2e}",
                            m.t_s, m.t_r, m.overshoot_pct, m.peak, m.e_ss
                        );
                    }
                    None => {
                        let _ = writeln!(out, " {}", r.metrics_error.as_deref().unwrap_or("no metrics"));
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(out, "{:<22} error: {e}", spec.label);
            }
        }
    }
    out
}

fn run_json(spec: &RunSpec, result: &Result<RunResult, Error>) -> Value {
    match result {
        Ok(r) => serde_json::to_value(r).expect("run result serializes"),
        Err(e) => json!({
            "label": spec.label,
            "method": spec.method,
            "error": { "kind": e.kind(), "message": e.to_string() },
        }),
    }
}

fn csv_name(index: usize, label: &str) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    format!("{:02}-{clean}.csv", index + 1)
}

fn write_series(dir: &Path, files: &[(String, &TimeSeries)]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (name, series) in files {
        write_file(&dir.join(name), &series.to_csv())?;
    }
    Ok(())
}

/// Run the specs and collect the report parts shared by `compare` and
/// `reproduce`.
fn run_comparison(specs: &[RunSpec], csv_dir: Option<&Path>) -> CliResult<(Value, String)> {
    let results = pipeline::compare(specs);
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()).filter(|_| results.iter().all(|r| r.is_err())) {
        return Err(e.clone().into());
    }
    if let Some(dir) = csv_dir {
        let files: Vec<(String, &TimeSeries)> = results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().ok().map(|r| (csv_name(i, &r.label), &r.series)))
            .collect();
        write_series(dir, &files)?;
    }
    let runs: Vec<Value> = specs.iter().zip(&results).map(|(s, r)| run_json(s, r)).collect();
    Ok((json!({ "runs": runs }), comparison_table(specs, &results)))
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    if args.runs.len() < 2 {
        return Err(CliError::usage("compare needs at least two --run specs"));
    }
    let r = args.common.resolve()?;
    let model = r.require_model()?;
    let mut specs = Vec::new();
    for text in &args.runs {
        let spec = parse_run(text, model, r.sim)?;
        if args.true_delay && spec.method == Method::ZnPade {
            let mut delayed = spec.clone();
            delayed.view = PlantView::Delayed;
            delayed.label.push_str("-delayed");
            specs.push(spec);
            specs.push(delayed);
        } else {
            specs.push(spec);
        }
    }
    let (payload, text) = run_comparison(&specs, args.csv_dir.as_deref())?;
    let mut report = envelope("compare", json!({ "model": model, "sim": r.sim }));
    if let (Value::Object(dst), Value::Object(src)) = (&mut report, payload) {
        dst.extend(src);
    }
    emit(args.common.json.as_deref(), &report, &text)
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Scenario name; `list` shows all of them.
    pub preset: String,
    /// Directory for CSV data (Routh array, Nyquist points, responses).
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Write the JSON report to PATH (`-` for stdout) instead of the text summary.
    #[arg(long)]
    pub json: Option<String>,
}

struct Scenario {
    payload: Value,
    text: String,
    files: Vec<(String, String)>,
}

const PRESETS: [(&str, &str); 10] = [
    ("routh-array", "Routh array and stability interval of the Pade loop"),
    ("zn-pade-settings", "Z-N settings from the Routh ultimate gain and period"),
    ("zn-nyquist-settings", "gain margin and Z-N settings from the Nyquist crossover"),
    ("poles", "closed-loop poles at K = 4.6 and K = 5"),
    ("two-cases", "step metrics of the Pade-tuned and Nyquist-tuned PID loops"),
    ("controller-comparison", "Z-N PID against IMC-PI and SIMC-PI"),
    ("boundary-pade", "sustained oscillation of the Pade loop at its ultimate gain"),
    ("boundary-delay", "sustained oscillation of the delayed loop at its ultimate gain"),
    ("nyquist", "Nyquist data of the delayed plant"),
    ("gain-sweep", "Pade-loop step responses for K = 4.6, 5, 7.67 and 8"),
];

const ALIASES: [(&str, &str); 6] = [
    ("table-1", "routh-array"),
    ("table-3", "zn-pade-settings"),
    ("table-4", "zn-nyquist-settings"),
    ("table-5", "poles"),
    ("table-6", "two-cases"),
    ("table-7", "controller-comparison"),
];

fn settings_rows(u: &UltimateParams) -> CliResult<(Value, String)> {
    let mut rows = Vec::new();
    let mut text = String::new();
    for ty in [ControllerType::P, ControllerType::PI, ControllerType::PID] {
        let row = zn_ultimate(u, ty);
        let g = to_parallel_gains(&row)?;
        let _ = writeln!(
            text,
            "{:<4} Kp {:.4}  tau_i {}  tau_d {}  (Ki {:.4}, Kd {:.4})",
            ty.to_string(),
            row.kp,
            fmt_opt(row.tau_i),
            fmt_opt(row.tau_d),
            g.ki,
            g.kd
        );
        rows.push(json!({ "row": row, "gains": g }));
    }
    Ok((Value::Array(rows), text))
}

fn oscillation_scenario(ts: &TimeSeries, skip: f64, name: &str, ultimate: &UltimateParams) -> CliResult<Scenario> {
    let start = (skip / ts.dt()).round() as usize;
    let tail = TimeSeries::new(ts.t[start], ts.dt(), ts.y[start..].to_vec());
    let osc = oscillation_estimate(&tail)?;
    Ok(Scenario {
        payload: json!({ "ultimate": ultimate, "oscillation": osc }),
        text: format!(
            "K = {:.4}: period {:.4} s (ultimate period {:.4} s), amplitude ratio {:.4}\n",
            ultimate.k_u, osc.period, ultimate.t_u, osc.amplitude_ratio
        ),
        files: vec![(format!("{name}.csv"), ts.to_csv())],
    })
}

fn comparison_scenario(specs: &[RunSpec]) -> CliResult<Scenario> {
    let results = pipeline::compare(specs);
    let files = results
        .iter()
        .filter_map(|r| r.as_ref().ok().map(|r| (format!("{}.csv", r.label), r.series.to_csv())))
        .collect();
    let runs: Vec<Value> = specs.iter().zip(&results).map(|(s, r)| run_json(s, r)).collect();
    Ok(Scenario {
        payload: json!({ "runs": runs }),
        text: comparison_table(specs, &results),
        files,
    })
}

fn scenario(name: &str) -> CliResult<Scenario> {
    let m = presets::example_model();
    let cfg = SimConfig::default();
    let pade = pade_plant(&m)?;
    let char_poly = AffineGainPolynomial::from_plant(&pade);
    match name {
        "routh-array" => {
            let interval = gain_stability_interval(&char_poly, default_gain_search(&m), DEFAULT_TOLERANCE)?;
            let ultimate = ultimate_params_from_interval(&char_poly, &interval)?;
            let gain = (0.6 * ultimate.k_u * 1e6).round() / 1e6;
            let array = routh_array(&char_poly.at(gain))?;
            Ok(Scenario {
                payload: json!({
                    "interval": interval,
                    "ultimate": ultimate,
                    "routh_array": { "gain": gain, "rows": array.rows, "marginal": array.marginal },
                }),
                text: format!(
                    "stable for {:.4} < K < {:.4}; ultimate period {:.4} s\nRouth array at K = {gain:.4}:\n{}",
                    interval.k_min,
                    interval.k_max,
                    ultimate.t_u,
                    array.to_csv()
                ),
                files: vec![("routh-array.csv".into(), array.to_csv())],
            })
        }
        "zn-pade-settings" => {
            let (_, computed) = pipeline::pade_routh_ultimate(&m)?;
            let (rows, text) = settings_rows(&computed)?;
            let plot = UltimateParams { k_u: computed.k_u, t_u: presets::PLOT_READ_ULTIMATE.t_u };
            let (rows_plot, text_plot) = settings_rows(&plot)?;
            Ok(Scenario {
                payload: json!({
                    "computed": { "ultimate": computed, "settings": rows },
                    "plot_read_period": { "ultimate": plot, "settings": rows_plot },
                }),
                text: format!(
                    "computed ultimate period {:.4} s:\n{text}plot-read ultimate period {:.4} s:\n{text_plot}",
                    computed.t_u, plot.t_u
                ),
                files: Vec::new(),
            })
        }
        "zn-nyquist-settings" => {
            let (margins, u) = pipeline::nyquist_ultimate(&m)?;
            let (rows, text) = settings_rows(&u)?;
            Ok(Scenario {
                payload: json!({ "margins": margins, "ultimate": u, "settings": rows }),
                text: format!(
                    "gain margin {:.4} dB at {:.4} rad/s; k_u {:.4}, T_u {:.4} s\n{text}",
                    margins.gm_db, margins.omega_c, u.k_u, u.t_u
                ),
                files: Vec::new(),
            })
        }
        "poles" => {
            let mut entries = Vec::new();
            let mut text = String::new();
            for k in [4.6, 5.0] {
                let cl = unity_feedback(&pid_transfer_function(&PidGains::proportional(k)?).series(&pade))?;
                let poles = cl.poles()?;
                for p in &poles {
                    let _ = writeln!(text, "K = {k}: pole {:.4} {:+.4}j", p.re, p.im);
                }
                entries.push(json!({ "gain": k, "poles": complex_json(&poles) }));
            }
            Ok(Scenario { payload: Value::Array(entries), text, files: Vec::new() })
        }
        "two-cases" => comparison_scenario(&presets::two_cases()),
        "controller-comparison" => comparison_scenario(&presets::controller_comparison()),
        "boundary-pade" => {
            let (_, u) = pipeline::pade_routh_ultimate(&m)?;
            let cl = unity_feedback(&pid_transfer_function(&PidGains::proportional(u.k_u)?).series(&pade))?;
            let ts = step_rational(&cl, &cfg)?;
            oscillation_scenario(&ts, 0.0, "boundary-pade", &u)
        }
        "boundary-delay" => {
            let (_, u) = pipeline::nyquist_ultimate(&m)?;
            let ts = step_delayed_loop(&m, &PidGains::proportional(u.k_u)?, &SimConfig { t_final: 30.0, ..cfg })?;
            oscillation_scenario(&ts, 15.0, "boundary-delay", &u)
        }
        "nyquist" => {
            let g = delayed_plant(&m);
            let margins = freq::phase_crossover(&g, freq::default_omega_max(&m))?;
            let points = nyquist_series(&g, 1e-2, 1e2, 2000)?;
            Ok(Scenario {
                payload: json!({ "margins": margins, "points": points.len() }),
                text: format!(
                    "gain margin {:.4} dB at {:.4} rad/s; {} Nyquist points\n",
                    margins.gm_db,
                    margins.omega_c,
                    points.len()
                ),
                files: vec![("nyquist.csv".into(), nyquist_csv(&points))],
            })
        }
        "gain-sweep" => {
            let mut entries = Vec::new();
            let mut text = String::new();
            let mut files = Vec::new();
            for k in [4.6, 5.0, 7.67, 8.0] {
                let cl = unity_feedback(&pid_transfer_function(&PidGains::proportional(k)?).series(&pade))?;
                let ts = step_rational(&cl, &cfg)?;
                let metrics = foptd_core::metrics::step_metrics(&ts, 1.0);
                let _ = writeln!(
                    text,
                    "K = {k}: {}",
                    match &metrics {
                        Ok(mt) => format!("settles to {:.4}, overshoot {:.2}%", 1.0 - mt.e_ss, mt.overshoot_pct),
                        Err(e) => e.to_string(),
                    }
                );
                let mut entry = json!({ "gain": k });
                if let (Value::Object(dst), Value::Object(src)) = (&mut entry, metrics_json(&metrics)) {
                    dst.extend(src);
                }
                entries.push(entry);
                files.push((format!("gain-{k}.csv"), ts.to_csv()));
            }
            Ok(Scenario { payload: Value::Array(entries), text, files })
        }
        other => Err(CliError::usage(&format!("unknown preset {other:?}; try `reproduce list`"))),
    }
}

pub fn reproduce(args: &ReproduceArgs) -> CliResult<()> {
    if args.preset == "list" {
        let mut text = String::new();
        for (name, about) in PRESETS {
            let _ = writeln!(text, "{name:<22} {about}");
        }
        for (alias, target) in ALIASES {
            let _ = writeln!(text, "{alias:<22} same as {target}");
        }
        let _ = writeln!(text, "{:<22} every scenario above", "all");
        print!("{text}");
        return Ok(());
    }
    let names: Vec<&str> = if args.preset == "all" {
        PRESETS.iter().map(|(n, _)| *n).collect()
    } else {
        let name = ALIASES
            .iter()
            .find(|(alias, _)| *alias == args.preset)
            .map_or(args.preset.as_str(), |(_, target)| *target);
        vec![name]
    };
    let mut scenarios = serde_json::Map::new();
    let mut text = String::new();
    for name in names {
        let s = scenario(name)?;
        if let Some(dir) = &args.out_dir {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            for (file, contents) in &s.files {
                write_file(&dir.join(file), contents)?;
            }
        }
        let _ = write!(text, "== {name}\n{}", s.text);
        scenarios.insert(name.to_string(), s.payload);
    }
    let report = envelope(
        "reproduce",
        json!({ "model": presets::example_model(), "scenarios": Value::Object(scenarios) }),
    );
    emit(args.json.as_deref(), &report, &text)
}
