// SPDX-License-Identifier: MIT OR Apache-2.0

//! Structural-break testing for polynomial regression.
//!
//! The crate detects a single change at an unknown position in the
//! coefficients of a polynomial trend fitted to an equispaced series. The
//! detection statistic is a likelihood-ratio scan over all admissible split
//! points; its null distribution is of extreme-value type, which gives
//! closed-form critical values and p-values. Supporting machinery includes
//! a seeded Monte Carlo engine for size/power studies and a simulator of
//! the limiting Gaussian processes (stochastic integrals of monic Legendre
//! polynomials) used to validate the asymptotics and to tabulate quantiles
//! for the trimmed variant of the scan.

#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod error;
pub mod limitlab;
pub mod regression;
pub mod scan;
pub mod simulate;
pub mod stream;

pub use error::{Error, Result};
pub use regression::{Sample, Scaling};
