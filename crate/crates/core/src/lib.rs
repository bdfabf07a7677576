//! Anticanonical divisors and Ricci-flat hermitian metrics built from bases of
//! holomorphic polynomial vector fields on ℂⁿ and ℙⁿ, together with the
//! Kähler/completeness criteria and the G-Kähler cone of a semi-torus.
//!
//! Everything symbolic runs in exact arithmetic over ℚ(i) ([`symkernel`]);
//! floating point only appears in the numerical probes of [`metric`] and the
//! flow probe in [`fields`].

pub mod cone;
pub mod divisor;
pub mod error;
pub mod fields;
pub mod metric;
pub mod report;
pub mod scenario;
pub mod symkernel;

pub use error::{Error, Result};
