//! Conditional forecasts: many paths continued from one observed history.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use hawkes_hazards::sim::continue_from;
use hawkes_hazards::{Error, EventSequence, HawkesModel};
use rayon::prelude::*;
use serde::Serialize;

pub struct Request {
    pub horizon: f64,
    pub paths: usize,
    pub bins: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct CountBin {
    pub count: usize,
    pub paths: usize,
}

/// Paths whose background fraction lies in `[lo, hi)`, or `[lo, 1]` for the last bin.
#[derive(Debug, Serialize)]
pub struct FractionBin {
    pub lo: f64,
    pub hi: f64,
    pub paths: usize,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub model: HawkesModel,
    pub seed: u64,
    pub paths: usize,
    pub history_events: usize,
    pub forecast_start: f64,
    pub forecast_end: f64,
    pub mean_count: f64,
    pub count_histogram: Vec<CountBin>,
    /// Paths with no events, which have no background fraction.
    pub empty_paths: usize,
    /// Mean over non-empty paths of background events / events.
    pub mean_background_fraction: Option<f64>,
    /// Background events / events, pooled over all paths.
    pub pooled_background_fraction: Option<f64>,
    pub background_fraction_histogram: Vec<FractionBin>,
}

pub fn run(model: &HawkesModel, history: &EventSequence, req: &Request) -> Result<Summary> {
    model.check_stable()?;
    if req.paths == 0 || req.bins == 0 {
        bail!(Error::InvalidParameter {
            name: "paths/bins",
            reason: "need at least one path and one bin".into(),
        });
    }
    let outcomes: Vec<(usize, usize)> = (0..req.paths)
        .into_par_iter()
        .map(|i| {
            let sim = continue_from(history, model, req.horizon, req.seed, i as u64)?;
            let background = sim.seq.background_count().unwrap_or(0);
            Ok((sim.seq.len(), background))
        })
        .collect::<hawkes_hazards::Result<_>>()?;

    let mut counts = BTreeMap::new();
    let mut fractions = vec![0usize; req.bins];
    let (mut total, mut total_background, mut fraction_sum, mut empty) = (0usize, 0usize, 0.0, 0usize);
    for &(n, b) in &outcomes {
        *counts.entry(n).or_insert(0) += 1;
        total += n;
        total_background += b;
        if n == 0 {
            empty += 1;
            continue;
        }
        let f = b as f64 / n as f64;
        fraction_sum += f;
        fractions[((f * req.bins as f64) as usize).min(req.bins - 1)] += 1;
    }
    let nonempty = req.paths - empty;
    Ok(Summary {
        model: model.clone(),
        seed: req.seed,
        paths: req.paths,
        history_events: history.len(),
        forecast_start: history.end(),
        forecast_end: history.end() + req.horizon,
        mean_count: total as f64 / req.paths as f64,
        count_histogram: counts.into_iter().map(|(count, paths)| CountBin { count, paths }).collect(),
        empty_paths: empty,
        mean_background_fraction: (nonempty > 0).then(|| fraction_sum / nonempty as f64),
        pooled_background_fraction: (total > 0).then(|| total_background as f64 / total as f64),
        background_fraction_histogram: fractions
            .into_iter()
            .enumerate()
            .map(|(i, paths)| FractionBin {
                lo: i as f64 / req.bins as f64,
                hi: (i + 1) as f64 / req.bins as f64,
                paths,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hawkes_hazards::{Gompertz, PiecewiseConstantHazard};

    fn history() -> EventSequence {
        EventSequence::new(vec![1.0, 2.0, 2.5, 9.0], 0.0, 10.0).unwrap()
    }

    fn request(paths: usize) -> Request {
        Request {
            horizon: 5.0,
            paths,
            bins: 10,
            seed: 3,
        }
    }

    #[test]
    fn histograms_account_for_every_path() {
        let model = HawkesModel::new(1.0, Gompertz::new(0.5, 1.0).unwrap()).unwrap();
        let s = run(&model, &history(), &request(300)).unwrap();
        assert_eq!(s.count_histogram.iter().map(|b| b.paths).sum::<usize>(), 300);
        let binned: usize = s.background_fraction_histogram.iter().map(|b| b.paths).sum();
        assert_eq!(binned + s.empty_paths, 300);
        let f = s.mean_background_fraction.unwrap();
        assert!(f > 0.0 && f < 1.0);
    }

    #[test]
    fn zero_kernel_is_all_background() {
        let model = HawkesModel::new(2.0, PiecewiseConstantHazard::new(1.0, vec![0.0]).unwrap()).unwrap();
        let s = run(&model, &history(), &request(200)).unwrap();
        assert_eq!(s.mean_background_fraction, Some(1.0));
        assert_eq!(s.background_fraction_histogram.last().unwrap().paths + s.empty_paths, 200);
        assert!((s.mean_count - 10.0).abs() < 4.0 * (10.0f64 / 200.0).sqrt());
    }

    #[test]
    fn rejects_zero_paths() {
        let model = HawkesModel::new(2.0, Gompertz::new(0.5, 1.0).unwrap()).unwrap();
        assert!(run(&model, &history(), &request(0)).is_err());
    }
}
