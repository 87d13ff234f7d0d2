//! Bell-state QKD laboratory.
//!
//! Exact entanglement-swapping algebra over Bell-pair products, an
//! independent four-qubit state-vector oracle, protocol and eavesdropper
//! models, closed-form security quantities and a seeded Monte Carlo harness.

pub mod adversary;
pub mod analytics;
pub mod bell;
pub mod cli;
pub mod dyadic;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod protocols;
pub mod report;
pub mod rng;
pub mod verify;

pub use bell::{BellLabel, Pairing};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
