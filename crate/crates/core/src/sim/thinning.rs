//! Ogata thinning.
//!
//! Candidates are proposed from a homogeneous process at the current bound
//! `lambda_bar` and accepted with probability `lambda(t) / lambda_bar`. With a
//! nonincreasing kernel hazard the intensity just after the current time is a
//! valid bound until the next proposal, so the bound is refreshed to
//! `lambda(t)` after every proposal (plus `h(0)` after an acceptance).

use std::time::Instant;

use rand::Rng;

use super::SimResult;
use crate::error::{Error, Result};
use crate::model::{EventSequence, HawkesModel};
use crate::rng::{stream_rng, unit_exponential};
use crate::waiting_dist::WaitingDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundPolicy {
    /// Intensity at the left end of the proposal interval; needs a
    /// nonincreasing kernel hazard.
    LeftEndpointForDecreasing,
    /// `eta + sup_h * (number of events still inside the kernel support)`,
    /// where `sup_h` bounds the kernel hazard everywhere.
    UserSuppliedBound(f64),
}

#[derive(Debug, Clone)]
pub struct ThinningConfig {
    pub model: HawkesModel,
    pub horizon: f64,
    pub seed: u64,
    pub stream: u64,
    pub bound_policy: BoundPolicy,
}

impl ThinningConfig {
    pub fn new(model: HawkesModel, horizon: f64, seed: u64) -> Self {
        Self {
            model,
            horizon,
            seed,
            stream: 0,
            bound_policy: BoundPolicy::LeftEndpointForDecreasing,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_bound(mut self, policy: BoundPolicy) -> Self {
        self.bound_policy = policy;
        self
    }
}

/// Relative slack for rounding when checking `lambda <= lambda_bar`.
const BOUND_SLACK: f64 = 1e-12;

/// Thinning simulation on `[0, horizon]`. The result carries no parents.
pub fn thinning_simulate(cfg: &ThinningConfig) -> Result<SimResult> {
    cfg.model.check_stable()?;
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return Err(Error::Domain {
            what: "horizon",
            value: cfg.horizon,
            expected: "finite and > 0",
        });
    }
    let kernel = cfg.model.kernel();
    let eta = cfg.model.eta();
    let sup_hazard = match cfg.bound_policy {
        BoundPolicy::LeftEndpointForDecreasing => {
            if !kernel.is_hazard_nonincreasing() {
                return Err(Error::UnsupportedBound {
                    family: kernel.family(),
                });
            }
            None
        }
        BoundPolicy::UserSuppliedBound(b) => {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::param("bound", format!("must be finite and >= 0, got {b}")));
            }
            Some(b)
        }
    };
    let support = kernel.support_bound();
    let jump = kernel.hazard_at(0.0);

    let clock = Instant::now();
    let mut rng = stream_rng(cfg.seed, cfg.stream);
    let mut times: Vec<f64> = Vec::new();
    let mut live = 0usize;
    let mut now = 0.0;
    let mut bound = eta;
    let mut draws = 0u64;
    loop {
        let candidate = now + unit_exponential(&mut rng) / bound;
        draws += 1;
        if candidate > cfg.horizon {
            break;
        }
        if let Some(s) = support {
            while live < times.len() && candidate - times[live] >= s {
                live += 1;
            }
        }
        let intensity = eta
            + times[live..]
                .iter()
                .map(|&t| kernel.hazard_at(candidate - t))
                .sum::<f64>();
        if intensity > bound * (1.0 + BOUND_SLACK) {
            return Err(Error::BoundViolated {
                time: candidate,
                intensity,
                bound,
            });
        }
        let accepted = rng.random::<f64>() * bound < intensity;
        draws += 1;
        now = candidate;
        if accepted {
            times.push(candidate);
        }
        bound = match sup_hazard {
            None if accepted => intensity + jump,
            None => intensity,
            Some(h) => eta + h * (times.len() - live) as f64,
        };
    }
    let seq = EventSequence::new(times, 0.0, cfg.horizon)?;
    Ok(SimResult {
        seq,
        draws_made: draws,
        wall_time: clock.elapsed(),
    })
}
