//! Cluster (branching) simulation.
//!
//! Immigrants arrive as a Poisson(`eta`) process on `[0, T]`. Every event then
//! has Poisson(`n*`) children, each delayed by an independent draw with CDF
//! `H(t) / H(inf)`, so that its offspring form a Poisson process of intensity
//! `h`. Children beyond `T` are dropped (and with them their descendants);
//! ancestors before 0 are not generated.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::SimResult;
use crate::error::{Error, Result};
use crate::model::{EventSequence, HawkesModel};
use crate::rng::stream_rng;
use crate::waiting_dist::WaitingDistribution;

#[derive(Debug, Clone)]
pub struct ClusterConfig {
    pub model: HawkesModel,
    pub horizon: f64,
    pub seed: u64,
    pub stream: u64,
}

impl ClusterConfig {
    pub fn new(model: HawkesModel, horizon: f64, seed: u64) -> Self {
        Self {
            model,
            horizon,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ClusterStats {
    /// Children drawn, including those beyond the horizon.
    pub offspring: u64,
}

pub fn cluster_simulate(cfg: &ClusterConfig) -> Result<SimResult> {
    cluster_with_stats(cfg).map(|(r, _)| r)
}

pub(crate) fn cluster_with_stats(cfg: &ClusterConfig) -> Result<(SimResult, ClusterStats)> {
    cfg.model.check_stable()?;
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return Err(Error::Domain {
            what: "horizon",
            value: cfg.horizon,
            expected: "finite and > 0",
        });
    }
    let kernel = cfg.model.kernel();
    let horizon = cfg.horizon;
    let clock = Instant::now();
    let mut rng = stream_rng(cfg.seed, cfg.stream);
    let poisson = |mean: f64| {
        Poisson::new(mean).map_err(|e| Error::Numerical(format!("poisson({mean}): {e}")))
    };

    let immigrants = poisson(cfg.model.eta() * horizon)?.sample(&mut rng) as usize;
    let mut times: Vec<f64> = (0..immigrants).map(|_| rng.random::<f64>() * horizon).collect();
    let mut origin: Vec<Option<usize>> = vec![None; immigrants];
    let mut stats = ClusterStats::default();
    let mut draws = immigrants as u64 + 1;

    let ratio = kernel.total_mass();
    if ratio > 0.0 {
        let offspring = poisson(ratio)?;
        let mut next = 0;
        // breadth-first over generations; `times` grows as children are added
        while next < times.len() {
            let parent_time = times[next];
            let children = offspring.sample(&mut rng) as u64;
            stats.offspring += children;
            draws += 1 + children;
            for _ in 0..children {
                let delay = loop {
                    let d = kernel.sample_offspring_delay(&mut rng);
                    if d > 0.0 {
                        break d;
                    }
                };
                let t = parent_time + delay;
                if t <= horizon {
                    times.push(t);
                    origin.push(Some(next));
                }
            }
            next += 1;
        }
    }

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_unstable_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut rank = vec![0usize; times.len()];
    for (pos, &node) in order.iter().enumerate() {
        rank[node] = pos;
    }
    let sorted: Vec<f64> = order.iter().map(|&n| times[n]).collect();
    let parents: Vec<usize> = order
        .iter()
        .map(|&n| origin[n].map_or(0, |p| rank[p] + 1))
        .collect();
    let seq = EventSequence::new(sorted, 0.0, horizon)?.with_parents(parents)?;
    Ok((
        SimResult {
            seq,
            draws_made: draws,
            wall_time: clock.elapsed(),
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waiting_dist::{Gompertz, Kernel, Omori, PiecewiseConstantHazard};

    #[test]
    fn zero_kernel_is_pure_background() {
        let m = HawkesModel::new(2.0, PiecewiseConstantHazard::new(1.0, vec![0.0]).unwrap()).unwrap();
        let res = cluster_simulate(&ClusterConfig::new(m, 100.0, 3)).unwrap();
        assert_eq!(res.seq.background_count(), Some(res.seq.len()));
    }

    #[test]
    fn mean_offspring_matches_branching_ratio() {
        for (kernel, target) in [
            (Kernel::from(Omori::new(0.082, 0.145, 0.141).unwrap()), 0.7636),
            (Gompertz::new(1.0, 2.0).unwrap().into(), 0.5),
        ] {
            let m = HawkesModel::new(2.295, kernel).unwrap();
            let mut offspring = 0u64;
            let mut events = 0u64;
            for r in 0..200 {
                let (res, stats) = cluster_with_stats(&ClusterConfig::new(m.clone(), 200.0, 4).with_stream(r)).unwrap();
                offspring += stats.offspring;
                events += res.seq.len() as u64;
            }
            let mean = offspring as f64 / events as f64;
            // Poisson offspring: se ~ sqrt(n*/events)
            let se = (target / events as f64).sqrt();
            assert!((mean - target).abs() < 3.0 * se, "{mean} vs {target}");
        }
    }

    #[test]
    fn ancestry_is_causal() {
        let m = HawkesModel::new(1.0, Gompertz::new(0.8, 1.0).unwrap()).unwrap();
        let res = cluster_simulate(&ClusterConfig::new(m, 300.0, 5)).unwrap();
        let seq = &res.seq;
        for (i, &p) in seq.parents().unwrap().iter().enumerate() {
            if p > 0 {
                assert!(p <= i);
                assert!(seq.times()[p - 1] < seq.times()[i]);
            }
        }
    }
}
