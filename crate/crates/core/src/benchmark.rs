//! Seeded comparison of the three simulators: time-rescaling rejection rates
//! and runtime per simulated point over a grid of kernel families and norms.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::time_rescale_test;
use crate::model::HawkesModel;
use crate::sim::{cluster_simulate, simulate, thinning_simulate, ClusterConfig, Method, SimConfig, SimResult, ThinningConfig};
use crate::stats::binomial_acceptance_region;
use crate::waiting_dist::{Gompertz, Kernel, Omori, PiecewiseConstantHazard};

pub const DEFAULT_ETA: f64 = 2.0;
pub const DEFAULT_REPS: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Expected number of points per path; sets the horizon of each scenario.
pub const TARGET_POINTS: f64 = 2000.0;
pub const NORMS: [f64; 3] = [0.1, 0.5, 0.9];
/// Gompertz decay rate of the exponential scenarios.
pub const EXPONENTIAL_BETA: f64 = 1.0;
/// Omori offset and exponent of the omori scenarios.
pub const OMORI_C: f64 = 1.0;
pub const OMORI_P: f64 = 1.0;
/// Bin width and bin count of the discrete scenarios.
pub const DISCRETE_DELTA: f64 = 0.5;
pub const DISCRETE_BINS: usize = 2;
/// Confidence of the binomial acceptance region for rejection counts.
pub const REGION_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchFamily {
    Exponential,
    Omori,
    Discrete,
}

impl BenchFamily {
    pub const ALL: [BenchFamily; 3] = [BenchFamily::Exponential, BenchFamily::Omori, BenchFamily::Discrete];

    pub fn name(self) -> &'static str {
        match self {
            BenchFamily::Exponential => "exponential",
            BenchFamily::Omori => "omori",
            BenchFamily::Discrete => "discrete",
        }
    }
}

/// Kernel with total mass `norm` for a benchmark family.
pub fn scenario_params(family: BenchFamily, norm: f64) -> Result<Kernel> {
    if !(norm > 0.0 && norm < 1.0) {
        return Err(Error::Domain {
            what: "norm",
            value: norm,
            expected: "in (0, 1)",
        });
    }
    Ok(match family {
        BenchFamily::Exponential => Gompertz::new(norm * EXPONENTIAL_BETA, EXPONENTIAL_BETA)?.into(),
        BenchFamily::Omori => Omori::new(norm * OMORI_P * OMORI_C.powf(OMORI_P), OMORI_C, OMORI_P)?.into(),
        BenchFamily::Discrete => {
            let rate = norm / (DISCRETE_DELTA * DISCRETE_BINS as f64);
            PiecewiseConstantHazard::new(DISCRETE_DELTA, vec![rate; DISCRETE_BINS])?.into()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchScenario {
    pub family: BenchFamily,
    pub norm: f64,
    pub eta: f64,
    pub horizon: f64,
    pub reps: usize,
    pub alpha_level: f64,
}

impl BenchScenario {
    /// Defaults: `eta = 2`, 200 replications, level 0.05 and a horizon with
    /// about 2000 expected points.
    pub fn new(family: BenchFamily, norm: f64) -> Result<Self> {
        scenario_params(family, norm)?;
        Ok(Self {
            family,
            norm,
            eta: DEFAULT_ETA,
            horizon: TARGET_POINTS * (1.0 - norm) / DEFAULT_ETA,
            reps: DEFAULT_REPS,
            alpha_level: DEFAULT_ALPHA,
        })
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn model(&self) -> Result<HawkesModel> {
        HawkesModel::new(self.eta, scenario_params(self.family, self.norm)?)
    }
}

/// The 3 x 3 grid of families and norms.
pub fn default_grid() -> Vec<BenchScenario> {
    BenchFamily::ALL
        .iter()
        .flat_map(|&f| NORMS.iter().map(move |&n| BenchScenario::new(f, n).expect("grid norms are valid")))
        .collect()
}

/// ChaCha stream of one replication: the scenario's grid position in the top
/// 24 bits, the method in the next 8 and the replication in the low 32.
pub fn replication_stream(scenario: usize, method: Method, rep: usize) -> u64 {
    let m = match method {
        Method::Hazards => 0u64,
        Method::Thinning => 1,
        Method::Cluster => 2,
    };
    ((scenario as u64) << 40) | (m << 32) | rep as u64
}

pub fn simulate_with(method: Method, model: &HawkesModel, horizon: f64, seed: u64, stream: u64) -> Result<SimResult> {
    match method {
        Method::Hazards => simulate(&SimConfig::new(model.clone(), horizon, seed).with_stream(stream)),
        Method::Thinning => thinning_simulate(&ThinningConfig::new(model.clone(), horizon, seed).with_stream(stream)),
        Method::Cluster => cluster_simulate(&ClusterConfig::new(model.clone(), horizon, seed).with_stream(stream)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub seed: u64,
    /// Run replications on the rayon pool. Timings then include contention.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub stream: u64,
    pub points: usize,
    pub p_value: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub scenario: BenchScenario,
    pub method: Method,
    pub rejections: usize,
    pub rejection_rate: f64,
    /// Binomial acceptance region for the rejection count under the null.
    pub acceptance_region: (u64, u64),
    /// Total wall time over total points, in microseconds.
    pub runtime_per_point_us: f64,
    pub total_points: usize,
    pub replications: Vec<Replication>,
}

impl CellReport {
    pub fn within_region(&self) -> bool {
        let r = self.rejections as u64;
        self.acceptance_region.0 <= r && r <= self.acceptance_region.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub parallel: bool,
    pub region_confidence: f64,
    pub constants: BenchConstants,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConstants {
    pub target_points: f64,
    pub exponential_beta: f64,
    pub omori_c: f64,
    pub omori_p: f64,
    pub discrete_delta: f64,
    pub discrete_bins: usize,
}

impl Default for BenchConstants {
    fn default() -> Self {
        Self {
            target_points: TARGET_POINTS,
            exponential_beta: EXPONENTIAL_BETA,
            omori_c: OMORI_C,
            omori_p: OMORI_P,
            discrete_delta: DISCRETE_DELTA,
            discrete_bins: DISCRETE_BINS,
        }
    }
}

/// Runs every scenario with every method.
///
/// Each replication simulates on `[0, horizon]`, times only the simulation
/// call, and applies the time-rescaling test with the generating model.
pub fn run_bench(grid: &[BenchScenario], methods: &[Method], opts: &BenchOptions) -> Result<BenchReport> {
    let mut cells = Vec::with_capacity(grid.len() * methods.len());
    for (si, scenario) in grid.iter().enumerate() {
        let model = scenario.model()?;
        for &method in methods {
            cells.push(run_cell(si, scenario, &model, method, opts)?);
        }
    }
    Ok(BenchReport {
        seed: opts.seed,
        parallel: opts.parallel,
        region_confidence: REGION_CONFIDENCE,
        constants: BenchConstants::default(),
        cells,
    })
}

fn run_cell(
    index: usize,
    scenario: &BenchScenario,
    model: &HawkesModel,
    method: Method,
    opts: &BenchOptions,
) -> Result<CellReport> {
    let one = |rep: usize| -> Result<Replication> {
        let stream = replication_stream(index, method, rep);
        let sim = simulate_with(method, model, scenario.horizon, opts.seed, stream)?;
        let gof = time_rescale_test(model, &sim.seq).map_err(|e| {
            Error::Numerical(format!(
                "{} / n*={} / {} rep {rep}: {e}",
                scenario.family.name(),
                scenario.norm,
                method.name()
            ))
        })?;
        Ok(Replication {
            stream,
            points: sim.seq.len(),
            p_value: gof.p_value,
            wall_time_secs: sim.wall_time.as_secs_f64(),
        })
    };
    let replications: Vec<Replication> = if opts.parallel {
        (0..scenario.reps).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (0..scenario.reps).map(one).collect::<Result<_>>()?
    };
    let rejections = replications.iter().filter(|r| r.p_value < scenario.alpha_level).count();
    let total_points: usize = replications.iter().map(|r| r.points).sum();
    let total_time: f64 = replications.iter().map(|r| r.wall_time_secs).sum();
    Ok(CellReport {
        scenario: *scenario,
        method,
        rejections,
        rejection_rate: rejections as f64 / scenario.reps.max(1) as f64,
        acceptance_region: binomial_acceptance_region(scenario.reps as u64, scenario.alpha_level, REGION_CONFIDENCE),
        runtime_per_point_us: 1e6 * total_time / total_points.max(1) as f64,
        total_points,
        replications,
    })
}

impl BenchReport {
    pub fn cell(&self, family: BenchFamily, norm: f64, method: Method) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.scenario.family == family && c.scenario.norm == norm && c.method == method)
    }

    /// The report without timing fields, for reproducibility checks.
    pub fn without_timings(&self) -> BenchReport {
        let mut r = self.clone();
        for c in &mut r.cells {
            c.runtime_per_point_us = 0.0;
            for rep in &mut c.replications {
                rep.wall_time_secs = 0.0;
            }
        }
        r
    }

    /// Aligned text table: rejection rates, then microseconds per point.
    pub fn table(&self) -> String {
        let mut methods: Vec<Method> = Vec::new();
        let mut rows: Vec<(BenchFamily, f64)> = Vec::new();
        for c in &self.cells {
            if !methods.contains(&c.method) {
                methods.push(c.method);
            }
            let key = (c.scenario.family, c.scenario.norm);
            if !rows.contains(&key) {
                rows.push(key);
            }
        }
        let mut out = String::new();
        let header = |out: &mut String, title: &str| {
            let _ = writeln!(out, "{title}");
            let _ = write!(out, "{:<12} {:>5}", "family", "n*");
            for m in &methods {
                let _ = write!(out, " {:>10}", m.name());
            }
            out.push('\n');
        };
        let reps = self.cells.first().map_or(0, |c| c.scenario.reps);
        header(&mut out, &format!("rejection frequency at level {DEFAULT_ALPHA} ({reps} reps, seed {})", self.seed));
        for &(f, n) in &rows {
            let _ = write!(out, "{:<12} {:>5}", f.name(), n);
            for &m in &methods {
                match self.cell(f, n, m) {
                    Some(c) => {
                        let flag = if c.within_region() { ' ' } else { '*' };
                        let _ = write!(out, " {:>9.3}{flag}", c.rejection_rate);
                    }
                    None => {
                        let _ = write!(out, " {:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
        header(&mut out, "mean runtime per point (microseconds)");
        for &(f, n) in &rows {
            let _ = write!(out, "{:<12} {:>5}", f.name(), n);
            for &m in &methods {
                match self.cell(f, n, m) {
                    Some(c) => {
                        let _ = write!(out, " {:>10.3}", c.runtime_per_point_us);
                    }
                    None => {
                        let _ = write!(out, " {:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
