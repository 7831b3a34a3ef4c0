//! Hawkes processes as competing hazards.
//!
//! The excitation function of a linear Hawkes process is the hazard of a
//! (defective) waiting time. This crate builds on that reading:
//!
//! - [`waiting_dist`]: five excitation families with hazard, cumulative
//!   hazard, quantile and left-truncated sampling;
//! - [`model`]: the Hawkes model, event sequences, intensity and compensator;
//! - [`sim`]: the competing-hazards simulator with ancestry, plus thinning
//!   and cluster baselines;
//! - [`inference`]: log-likelihood, maximum-likelihood fitting and the
//!   time-rescaling goodness-of-fit test;
//! - [`benchmark`]: the replicated simulator comparison harness.

pub mod benchmark;
pub mod error;
pub mod inference;
pub mod io;
pub mod model;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod waiting_dist;

pub use error::{Error, Result};
pub use model::{EventSequence, HawkesModel};
pub use sim::{Method, SimConfig, SimResult};
pub use waiting_dist::{
    CensoredExponential, GevMinTruncated, Gompertz, Kernel, Omori, PiecewiseConstantHazard,
    WaitingDistribution, NEVER,
};
