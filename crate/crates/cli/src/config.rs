//! Flag parsing helpers and the optional JSON config file.
//!
//! Precedence is flag, then config file, then built-in default.

use std::path::Path;

use foptd_core::plant::FoptdModel;
use foptd_core::simulation::{SimConfig, DEFAULT_DT, DEFAULT_T_FINAL};
use foptd_core::tuning::{DerivativeFilter, PidGains};
use foptd_core::{Error, Result};
use serde::Deserialize;

/// Contents of `--config PATH`; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<FoptdModel>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub tau_c: Option<f64>,
    pub method: Option<String>,
    #[serde(rename = "type")]
    pub controller_type: Option<String>,
    pub derivative_filter: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("bad config {}: {e}", path.display())))
    }
}

/// Parse `k=<f>,tau=<f>,theta=<f>` (any order, all three required).
pub fn parse_model(text: &str) -> Result<FoptdModel> {
    let (mut k, mut tau, mut theta) = (None, None, None);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got {part:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad number in {part:?}")))?;
        let slot = match key.trim() {
            "k" => &mut k,
            "tau" => &mut tau,
            "theta" => &mut theta,
            other => return Err(Error::InvalidArgument(format!("unknown model parameter {other:?}"))),
        };
        *slot = Some(value);
    }
    match (k, tau, theta) {
        (Some(k), Some(tau), Some(theta)) => FoptdModel::new(k, tau, theta),
        _ => Err(Error::InvalidArgument(
            "model needs k=<f>,tau=<f>,theta=<f>".into(),
        )),
    }
}

/// Parse `kp,ki,kd`.
pub fn parse_gains(text: &str) -> Result<PidGains> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("gains must be kp,ki,kd, got {text:?}")))?;
    match values.as_slice() {
        [kp, ki, kd] => PidGains::new(*kp, *ki, *kd),
        _ => Err(Error::InvalidArgument(format!("gains must be kp,ki,kd, got {text:?}"))),
    }
}

/// Parse `lo,hi`.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("range must be lo,hi, got {text:?}"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// `ideal` or a positive filter coefficient `N`.
pub fn parse_derivative_filter(text: &str) -> Result<DerivativeFilter> {
    if text.eq_ignore_ascii_case("ideal") {
        return Ok(DerivativeFilter::Ideal);
    }
    let n: f64 = text
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("derivative filter must be N or 'ideal', got {text:?}")))?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("filter coefficient must be positive, got {n}")));
    }
    Ok(DerivativeFilter::Filtered { n })
}

/// Flags shared by every command that needs a model and a simulation setup.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Process model, `k=<f>,tau=<f>,theta=<f>`.
    #[arg(long)]
    pub model: Option<String>,
    /// JSON config file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Integration step, s.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated duration, s.
    #[arg(long = "t-final")]
    pub t_final: Option<f64>,
    /// Derivative realization: filter coefficient N (rad/s) or `ideal`.
    #[arg(long = "derivative-filter")]
    pub derivative_filter: Option<String>,
    /// Write the JSON report to PATH (`-` for stdout) instead of the text summary.
    #[arg(long)]
    pub json: Option<String>,
}

/// Resolved common settings.
pub struct Resolved {
    pub file: FileConfig,
    pub model: Option<FoptdModel>,
    pub sim: SimConfig,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<Resolved> {
        let file = FileConfig::load(self.config.as_deref())?;
        let model = match &self.model {
            Some(text) => Some(parse_model(text)?),
            None => file.model,
        };
        let derivative = match self.derivative_filter.as_ref().or(file.derivative_filter.as_ref()) {
            Some(text) => parse_derivative_filter(text)?,
            None => DerivativeFilter::default(),
        };
        let sim = SimConfig::new(
            self.dt.or(file.dt).unwrap_or(DEFAULT_DT),
            self.t_final.or(file.t_final).unwrap_or(DEFAULT_T_FINAL),
        )?
        .with_derivative(derivative);
        Ok(Resolved { file, model, sim })
    }
}

impl Resolved {
    pub fn require_model(&self) -> Result<FoptdModel> {
        self.model
            .ok_or_else(|| Error::InvalidArgument("a model is required (--model or config)".into()))
    }
}
