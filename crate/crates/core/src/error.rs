use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis, tuning and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("denominator polynomial is identically zero")]
    ZeroDenominator,
    #[error("closed loop is degenerate: den + num is the zero polynomial")]
    DegenerateLoop,
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("dead time must be positive, got {0}")]
    NonPositiveDelay(f64),
    #[error("invalid process model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no gain in [{lo}, {hi}] yields a stable closed loop")]
    NoStableGain { lo: f64, hi: f64 },
    #[error("stability interval has no finite upper bound within the search range")]
    UnboundedInterval,
    #[error("no imaginary-axis root pair at K = {0}")]
    NoImaginaryPair(f64),
    #[error("j*omega = j*{0} lies on a pole of the transfer function")]
    PoleOnAxis(f64),
    #[error("phase never reaches -pi below omega = {0} rad/s")]
    NoCrossover(f64),
    #[error("integral time must be positive, got {0}")]
    NonPositiveTauI(f64),
    #[error("all controller gains are zero")]
    ZeroGains,
    #[error("transfer function is improper (num degree {num} > den degree {den})")]
    ImproperTransferFunction { num: usize, den: usize },
    #[error("dead time {theta} is not an integer multiple of step {dt}")]
    DelayNotMultipleOfStep { theta: f64, dt: f64 },
    #[error("response has not settled")]
    SettlingNotReached,
    #[error("found {0} peaks, need at least 3")]
    InsufficientPeaks(usize),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::DegenerateLoop => "DegenerateLoop",
            Error::ZeroLeadingCoefficient => "ZeroLeadingCoefficient",
            Error::NonPositiveDelay(_) => "NonPositiveDelay",
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NoStableGain { .. } => "NoStableGain",
            Error::UnboundedInterval => "UnboundedInterval",
            Error::NoImaginaryPair(_) => "NoImaginaryPair",
            Error::PoleOnAxis(_) => "PoleOnAxis",
            Error::NoCrossover(_) => "NoCrossover",
            Error::NonPositiveTauI(_) => "NonPositiveTauI",
            Error::ZeroGains => "ZeroGains",
            Error::ImproperTransferFunction { .. } => "ImproperTransferFunction",
            Error::DelayNotMultipleOfStep { .. } => "DelayNotMultipleOfStep",
            Error::SettlingNotReached => "SettlingNotReached",
            Error::InsufficientPeaks(_) => "InsufficientPeaks",
        }
    }

    /// True for input-validation failures, false for failures of the numerics
    /// on otherwise valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ZeroPolynomial
                | Error::ZeroDenominator
                | Error::ZeroLeadingCoefficient
                | Error::NonPositiveDelay(_)
                | Error::InvalidModel(_)
                | Error::InvalidArgument(_)
                | Error::NonPositiveTauI(_)
                | Error::ZeroGains
                | Error::ImproperTransferFunction { .. }
                | Error::DelayNotMultipleOfStep { .. }
        )
    }
}

/// Non-fatal conditions worth surfacing to the caller.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind")]
pub enum Warning {
    /// Dead time is large relative to the time constant, so rational delay
    /// approximations lose accuracy.
    DelayDominant { theta: f64, tau: f64 },
    /// The reference step excites the derivative path of the controller.
    DerivativeOnStep { kd: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::DelayDominant { theta, tau } => {
                write!(f, "dead time {theta} exceeds half the time constant {tau}")
            }
            Warning::DerivativeOnStep { kd } => {
                write!(f, "derivative gain {kd} acts on a step reference")
            }
        }
    }
}
