//! Core algorithms for multipass interferometric phase estimation.
//!
//! A single probe applies the unknown phase `phi` with some multiplicity
//! `p` (passes through the sample) against a controllable reference phase
//! `theta`, and yields one binary outcome with probability
//! `[1 + (-1)^u cos(p*phi - theta)] / 2`. Everything else is built on top
//! of that primitive:
//!
//! - [`measurement`]: the likelihood and seeded outcome sampling,
//! - [`posterior`]: an exact Bayesian posterior over `phi` kept as a
//!   trigonometric-moment vector, plus a grid fallback,
//! - [`schemes`]: the protocol drivers (standard interferometry, the
//!   iterative phase estimation algorithm, the hybrid combination and the
//!   predetermined non-adaptive schedules),
//! - [`bounds`]: closed-form tail and variance bounds with the standard
//!   quantum limit and Heisenberg-limit reference curves,
//! - [`stats`]: Holevo-variance circular statistics over trial ensembles,
//! - [`oracle`]: brute-force enumeration of small instances for exact
//!   verification of the Monte Carlo path.
//!
//! The crate is `no_std` (alloc only); IO, parallel campaigns and the CLI
//! live in the companion `phaseest` crate.

#![no_std]

extern crate alloc;

pub mod angle;
pub mod bounds;
pub mod measurement;
pub mod oracle;
pub mod posterior;
pub mod schemes;
pub mod stats;

pub use measurement::{likelihood, sample_outcome, MeasurementSetting, Outcome};
pub use posterior::PhasePosterior;
pub use schemes::{EstimateSample, SchemeConfig, SchemeKind};

use core::fmt;

/// Errors surfaced by the core operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The first circular moment vanishes; no direction can be extracted.
    DegenerateEstimate,
    /// Statistics over an empty sample list.
    EmptySamples,
    /// Exact enumeration would exceed the work cap.
    EnumerationCapExceeded { required: u64, cap: u64 },
    /// A scheme configuration violates its invariants.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateEstimate => write!(f, "degenerate estimate: first circular moment vanishes"),
            Error::EmptySamples => write!(f, "statistics require at least one sample"),
            Error::EnumerationCapExceeded { required, cap } => {
                write!(f, "exact enumeration needs {required} evaluations, cap is {cap}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid scheme config: {msg}"),
        }
    }
}
