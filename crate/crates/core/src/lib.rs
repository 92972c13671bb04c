//! Sensitivity and complementary sensitivity of discrete-time feedback
//! loops, and numerical checks of their log-integral constraints.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod integrals;
pub mod lti;
pub mod mimo;
pub mod polynomial;

pub use error::{Result, WaterbedError};
pub use integrals::{waterbed_verify, IntegralResult, LoopSystem, QuadratureConfig, WaterbedReport};
pub use lti::{RationalSystem, StateSpaceSystem};
pub use mimo::{RightMfd, TransferMatrix};
pub use num_complex::Complex64;
pub use polynomial::{cancel_common_roots, Polynomial, RootSet};
