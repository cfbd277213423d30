//! Tuning and analysis of first-order-plus-time-delay (FOPTD) processes.
//!
//! The crate covers the full chain from process model to measured
//! closed-loop behaviour:
//!
//! - [`tf_core`]: polynomial and rational transfer-function algebra
//! - [`plant`]: the FOPTD model and its Pade / Taylor approximations
//! - [`stability`]: Routh arrays and proportional-gain stability intervals
//! - [`freq`]: frequency response, phase crossover and gain margin
//! - [`tuning`]: Ziegler-Nichols, IMC and SIMC rules
//! - [`simulation`]: fixed-step RK4 step responses, with or without dead time
//! - [`metrics`]: rise/settling time, overshoot and oscillation period
//! - [`pipeline`]: method chains and reproduction scenarios

pub mod error;
pub mod export;
pub mod freq;
pub mod metrics;
pub mod pipeline;
pub mod plant;
pub mod simulation;
pub mod stability;
pub mod tf_core;
pub mod tuning;

pub use error::{Error, Result, Warning};
