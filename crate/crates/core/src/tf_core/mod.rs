//! Polynomial and rational transfer-function algebra.

mod polynomial;
mod rational;
pub mod roots;

pub use polynomial::{poly_mul, Polynomial, TRIM_RELATIVE};
pub use rational::{
    filtered_pid_transfer_function, pid_transfer_function, unity_feedback,
    RationalTransferFunction,
};
pub use roots::poly_roots;
