//! Hawkes path simulators.
//!
//! [`hazards`] is the competing-hazards (Gillespie-type) simulator with
//! ancestry; [`thinning`] and [`cluster`] are the reference methods it is
//! validated and benchmarked against. All of them return a [`SimResult`] and
//! are deterministic given `(seed, stream)`.

pub mod cluster;
pub mod hazards;
pub mod thinning;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::{EventSequence, HawkesModel};

pub use cluster::{cluster_simulate, ClusterConfig};
pub use hazards::{continue_from, prune_candidates, simulate, simulate_min_stable, FastPath, SimConfig};
pub use thinning::{thinning_simulate, BoundPolicy, ThinningConfig};

#[derive(Debug, Clone)]
pub struct SimResult {
    /// Simulated events; parents are present except for thinning.
    pub seq: EventSequence,
    /// Number of random timers/proposals drawn.
    pub draws_made: u64,
    pub wall_time: Duration,
}

impl SimResult {
    pub fn metadata(&self, method: Method, model: &HawkesModel, seed: u64, stream: u64) -> SimMetadata {
        SimMetadata {
            method,
            seed,
            stream,
            model: model.clone(),
            start: self.seq.start(),
            end: self.seq.end(),
            events: self.seq.len(),
            pre_history_events: self.seq.pre_history().len(),
            draws_made: self.draws_made,
            wall_time_secs: self.wall_time.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Hazards,
    Thinning,
    Cluster,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Hazards, Method::Thinning, Method::Cluster];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hazards => "hazards",
            Method::Thinning => "thinning",
            Method::Cluster => "cluster",
        }
    }
}

/// JSON sidecar written next to a simulated event CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetadata {
    pub method: Method,
    pub seed: u64,
    pub stream: u64,
    pub model: HawkesModel,
    pub start: f64,
    pub end: f64,
    pub events: usize,
    pub pre_history_events: usize,
    pub draws_made: u64,
    pub wall_time_secs: f64,
}
