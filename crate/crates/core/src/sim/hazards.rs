//! Competing-hazards simulation.
//!
//! Every past event `j` carries a timer whose law is the kernel waiting time
//! left-truncated at the event's current age, and the background carries an
//! `Exponential(eta)` timer. At each step all timers are redrawn, the
//! smallest finite one fires, and its owner becomes the parent of the new
//! event. Timers of events older than a finite kernel support can never fire
//! and are skipped.

use std::ops::Range;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::SimResult;
use crate::error::{Error, Result};
use crate::model::{EventSequence, HawkesModel};
use crate::rng::{stream_rng, unit_exponential, SimRng};
use crate::waiting_dist::{Gompertz, Kernel, WaitingDistribution, NEVER};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FastPath {
    /// Min-stable sampling for Gompertz kernels, the generic loop otherwise.
    #[default]
    Auto,
    Off,
    MinStable,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    model: HawkesModel,
    horizon: f64,
    seed: u64,
    stream: u64,
    pre_history: Option<EventSequence>,
    fast_path: FastPath,
    prune: bool,
    max_events: Option<usize>,
}

impl SimConfig {
    /// Simulate on `[0, horizon]`, or on `[history end, horizon]` once a
    /// pre-history is attached.
    pub fn new(model: HawkesModel, horizon: f64, seed: u64) -> Self {
        Self {
            model,
            horizon,
            seed,
            stream: 0,
            pre_history: None,
            fast_path: FastPath::Auto,
            prune: true,
            max_events: None,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_pre_history(mut self, history: EventSequence) -> Self {
        self.pre_history = Some(history);
        self
    }

    pub fn with_fast_path(mut self, fast_path: FastPath) -> Self {
        self.fast_path = fast_path;
        self
    }

    /// Skip timers of events older than a finite kernel support (default on).
    pub fn with_pruning(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    /// Stop after this many new events; the window then ends at the last one.
    pub fn with_max_events(mut self, max_events: usize) -> Self {
        self.max_events = Some(max_events);
        self
    }

    pub fn model(&self) -> &HawkesModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    fn start(&self) -> f64 {
        self.pre_history.as_ref().map_or(0.0, |h| h.end())
    }

    fn validate(&self) -> Result<()> {
        self.model.check_stable()?;
        let start = self.start();
        if !(self.horizon > start) || !self.horizon.is_finite() {
            return Err(Error::Domain {
                what: "horizon",
                value: self.horizon,
                expected: "finite and after the simulation start",
            });
        }
        Ok(())
    }

    fn history(&self) -> Vec<f64> {
        self.pre_history
            .as_ref()
            .map(|h| h.all_times().to_vec())
            .unwrap_or_default()
    }

    fn uses_min_stable(&self) -> Result<bool> {
        let gompertz = matches!(self.model.kernel(), Kernel::Gompertz(_));
        match self.fast_path {
            FastPath::Auto => Ok(gompertz),
            FastPath::Off => Ok(false),
            FastPath::MinStable if gompertz => Ok(true),
            FastPath::MinStable => Err(Error::UnsupportedFastPath {
                requested: "min_stable",
                family: self.model.kernel().family(),
            }),
        }
    }
}

/// Indices of `history` (sorted ascending, all `<= now`) whose timers can
/// still fire at `now`: those with `now - t_j < support`. Unbounded kernels
/// keep every event.
pub fn prune_candidates(history: &[f64], now: f64, kernel: &Kernel) -> Range<usize> {
    let lo = match kernel.support_bound() {
        Some(s) => history.partition_point(|&t| now - t >= s),
        None => 0,
    };
    lo..history.len()
}

/// Simulate a path, choosing the min-stable fast path per `cfg`.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if cfg.uses_min_stable()? {
        simulate_min_stable(cfg)
    } else {
        let clock = Instant::now();
        let mut rng = stream_rng(cfg.seed, cfg.stream);
        let out = competing_hazards(cfg, &mut rng);
        finish(cfg, out, clock)
    }
}

/// Simulate forward from `history`, which acts as the pool of potential
/// parents. Only the new events on `(history end, history end + extra]` are
/// returned; the history is carried as their pre-history.
pub fn continue_from(
    history: &EventSequence,
    model: &HawkesModel,
    extra_horizon: f64,
    seed: u64,
    stream: u64,
) -> Result<SimResult> {
    if !(extra_horizon > 0.0) {
        return Err(Error::Domain {
            what: "extra_horizon",
            value: extra_horizon,
            expected: "> 0",
        });
    }
    let cfg = SimConfig::new(model.clone(), history.end() + extra_horizon, seed)
        .with_stream(stream)
        .with_pre_history(history.clone());
    simulate(&cfg)
}

struct Path {
    all: Vec<f64>,
    n_history: usize,
    parents: Vec<usize>,
    draws: u64,
    end: f64,
}

fn competing_hazards(cfg: &SimConfig, rng: &mut SimRng) -> Path {
    let kernel = cfg.model.kernel();
    let eta = cfg.model.eta();
    let mut all = cfg.history();
    let n_history = all.len();
    let mut parents = Vec::new();
    let mut draws = 0u64;
    let mut now = cfg.start();
    let limit = cfg.max_events.unwrap_or(usize::MAX);
    while parents.len() < limit {
        let mut best = unit_exponential(rng) / eta;
        let mut parent = 0;
        draws += 1;
        let candidates = if cfg.prune {
            prune_candidates(&all, now, kernel)
        } else {
            0..all.len()
        };
        draws += candidates.len() as u64;
        for j in candidates {
            let wait = kernel.sample_truncated_unchecked(now - all[j], rng);
            // strict: ties go to the lowest index
            if wait < best {
                best = wait;
                parent = j + 1;
            }
        }
        let next = now + best;
        if next > cfg.horizon {
            break;
        }
        all.push(next);
        parents.push(parent);
        now = next;
    }
    let end = if parents.len() == limit { now } else { cfg.horizon };
    Path {
        all,
        n_history,
        parents,
        draws,
        end,
    }
}

/// Gompertz fast path.
///
/// The truncated timers of all past events are Gompertz with a shared decay,
/// so their minimum is one Gompertz draw at the summed current rate. When a
/// kernel timer wins, the parent is drawn afterwards with probability
/// proportional to each event's hazard at the new event time.
pub fn simulate_min_stable(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let Kernel::Gompertz(g) = cfg.model.kernel() else {
        return Err(Error::UnsupportedFastPath {
            requested: "min_stable",
            family: cfg.model.kernel().family(),
        });
    };
    let clock = Instant::now();
    let mut rng = stream_rng(cfg.seed, cfg.stream);
    let out = min_stable_path(cfg, g, &mut rng);
    finish(cfg, out, clock)
}

fn min_stable_path(cfg: &SimConfig, g: &Gompertz, rng: &mut SimRng) -> Path {
    use rand::Rng;

    let (alpha, beta) = (g.alpha(), g.beta());
    let eta = cfg.model.eta();
    let mut all = cfg.history();
    let n_history = all.len();
    let mut now = cfg.start();
    // summed kernel hazard of all past events at `now`
    let mut rate: f64 = all.iter().map(|&t| alpha * (-beta * (now - t)).exp()).sum();
    let mut parents = Vec::new();
    let mut draws = 0u64;
    let limit = cfg.max_events.unwrap_or(usize::MAX);
    while parents.len() < limit {
        let background = unit_exponential(rng) / eta;
        draws += 1;
        let excited = if rate > 0.0 {
            draws += 1;
            Gompertz::wait_for_rate(rate, beta, unit_exponential(rng))
        } else {
            NEVER
        };
        let wait = background.min(excited);
        let next = now + wait;
        if next > cfg.horizon {
            break;
        }
        rate *= (-beta * wait).exp();
        let parent = if background <= excited {
            0
        } else {
            // walk back from the youngest event; weights decay with age
            let mut target = rng.random::<f64>() * rate;
            let mut chosen = all.len();
            for j in (0..all.len()).rev() {
                target -= alpha * (-beta * (next - all[j])).exp();
                if target < 0.0 {
                    chosen = j + 1;
                    break;
                }
            }
            chosen
        };
        all.push(next);
        parents.push(parent);
        rate += alpha;
        now = next;
    }
    let end = if parents.len() == limit { now } else { cfg.horizon };
    Path {
        all,
        n_history,
        parents,
        draws,
        end,
    }
}

fn finish(cfg: &SimConfig, mut path: Path, clock: Instant) -> Result<SimResult> {
    let new_times = path.all.split_off(path.n_history);
    let seq = EventSequence::new(new_times, cfg.start(), path.end)?
        .with_pre_history(path.all)?
        .with_parents(path.parents)?;
    Ok(SimResult {
        seq,
        draws_made: path.draws,
        wall_time: clock.elapsed(),
    })
}
