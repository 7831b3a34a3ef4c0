use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::likelihood::log_likelihood;
use super::nelder_mead::{minimize, SimplexOptions, SimplexOutcome};
use super::{FitResult, KernelFamily};
use crate::error::{Error, Result};
use crate::model::{EventSequence, HawkesModel};
use crate::rng::stream_rng;
use crate::waiting_dist::{
    CensoredExponential, GevMinTruncated, Gompertz, Kernel, Omori, PiecewiseConstantHazard,
};

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Number of simplex starts; the first is `init` (or a data-driven guess).
    pub starts: usize,
    /// Standard deviation of the start perturbations in log-parameter units.
    pub jitter: f64,
    pub seed: u64,
    /// Tolerances of the per-start searches.
    pub simplex: SimplexOptions,
    /// Tolerances of the final search restarted from the best start.
    pub polish: SimplexOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 5,
            jitter: 1.0,
            seed: 0x5eed_f17,
            simplex: SimplexOptions {
                max_evals: 1000,
                f_tol: 1e-6,
                x_tol: 1e-3,
            },
            polish: SimplexOptions {
                max_evals: 2000,
                f_tol: 1e-12,
                x_tol: 1e-8,
            },
        }
    }
}

/// Maximum-likelihood fit with the default options.
pub fn fit_mle(
    seq: &EventSequence,
    family: &KernelFamily,
    init: Option<&HawkesModel>,
) -> Result<FitResult> {
    fit_mle_with(seq, family, init, &FitOptions::default())
}

/// Maximum-likelihood fit of `eta` and the kernel of `family`.
///
/// Shape parameters are searched by a multi-start simplex over their
/// logarithms. For every shape the likelihood is concave in the linear
/// amplitudes (`eta` and the kernel scale or bin rates), which are solved for
/// exactly, so the simplex only sees the profile likelihood. GEV kernels have
/// no such split and are searched jointly. Fits with `n* >= 1` are rejected.
pub fn fit_mle_with(
    seq: &EventSequence,
    family: &KernelFamily,
    init: Option<&HawkesModel>,
    opts: &FitOptions,
) -> Result<FitResult> {
    if seq.is_empty() {
        return Err(Error::InsufficientData("cannot fit an empty sequence".into()));
    }
    if seq.window_length() <= 0.0 {
        return Err(Error::InsufficientData("observation window has zero length".into()));
    }
    if let KernelFamily::PiecewiseConstant { delta, bins } = *family {
        if !(delta.is_finite() && delta > 0.0) || bins == 0 {
            return Err(Error::param("family", "piecewise fits need delta > 0 and bins >= 1"));
        }
    }
    let problem = Problem::new(seq, family);
    let base = init
        .and_then(|m| problem.coordinates_of(m))
        .unwrap_or_else(|| problem.default_start());
    let dim = base.len();
    let step = vec![0.5; dim];

    let mut rng = stream_rng(opts.seed, 0);
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut best: Option<SimplexOutcome> = None;
    let starts = opts.starts.max(1);
    for k in 0..starts {
        let x0: Vec<f64> = if k == 0 {
            base.clone()
        } else {
            base.iter()
                .map(|&b| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    b + opts.jitter * z
                })
                .collect()
        };
        let x0 = pull_into_domain(&problem, x0, &base);
        let run = minimize(|x| problem.objective(x), &x0, &step, &opts.simplex);
        iterations += run.iterations;
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
        if dim == 0 {
            break;
        }
    }
    let mut best = best.expect("at least one start");
    if dim > 0 && best.f.is_finite() {
        let polish = minimize(|x| problem.objective(x), &best.x, &vec![0.05; dim], &opts.polish);
        iterations += polish.iterations;
        evaluations += polish.evaluations;
        if polish.f <= best.f {
            best = polish;
        } else {
            best.converged = false;
        }
    }
    if !best.f.is_finite() {
        return Err(Error::Numerical(format!(
            "no start reached a stable {} fit",
            family.name()
        )));
    }
    let model = problem.model_at(&best.x)?;
    let loglik = log_likelihood(&model, seq);
    if !loglik.is_finite() {
        return Err(Error::Numerical(format!("fitted log-likelihood is {loglik}")));
    }
    Ok(FitResult {
        branching_ratio: model.branching_ratio(),
        model,
        loglik,
        iterations,
        evaluations,
        converged: best.converged,
        starts,
    })
}

/// Moves an infeasible start halfway towards `base` until the objective is
/// finite, giving up after a few halvings.
fn pull_into_domain(problem: &Problem, mut x: Vec<f64>, base: &[f64]) -> Vec<f64> {
    for _ in 0..12 {
        if problem.objective(&x).is_finite() {
            break;
        }
        for (xi, b) in x.iter_mut().zip(base) {
            *xi = 0.5 * (*xi + b);
        }
    }
    x
}

/// Kernel shape with unit amplitude.
#[derive(Debug, Clone, Copy)]
enum Shape {
    Exponential { beta: f64 },
    Omori { c: f64, p: f64 },
    Censored { kappa: f64 },
    Piecewise { delta: f64, bins: usize },
}

impl Shape {
    fn columns(&self) -> usize {
        match self {
            Shape::Piecewise { bins, .. } => *bins,
            _ => 1,
        }
    }

    /// Total mass of a unit column.
    fn unit_mass(&self) -> f64 {
        match *self {
            Shape::Exponential { beta } => 1.0 / beta,
            Shape::Omori { c, p } => 1.0 / (p * c.powf(p)),
            Shape::Censored { kappa } => kappa,
            Shape::Piecewise { delta, .. } => delta,
        }
    }

    /// Cumulative hazard of column `k` at lag `d >= 0`.
    fn unit_cumulative(&self, k: usize, d: f64) -> f64 {
        match *self {
            Shape::Exponential { beta } => -(-beta * d).exp_m1() / beta,
            Shape::Omori { c, p } => -c.powf(-p) * (-p * (d / c).ln_1p()).exp_m1() / p,
            Shape::Censored { kappa } => d.min(kappa),
            Shape::Piecewise { delta, .. } => {
                let lo = k as f64 * delta;
                (d - lo).clamp(0.0, delta)
            }
        }
    }

    fn kernel(&self, amplitudes: &[f64]) -> Result<Kernel> {
        let tiny = |a: f64| a.max(f64::MIN_POSITIVE);
        Ok(match *self {
            Shape::Exponential { beta } => Gompertz::new(tiny(amplitudes[0]), beta)?.into(),
            Shape::Omori { c, p } => Omori::new(tiny(amplitudes[0]), c, p)?.into(),
            Shape::Censored { kappa } => CensoredExponential::new(tiny(amplitudes[0]), kappa)?.into(),
            Shape::Piecewise { delta, .. } => {
                PiecewiseConstantHazard::new(delta, amplitudes.to_vec())?.into()
            }
        })
    }
}

/// Event-wise unit intensities (`rows[i * dim + k]`, column 0 is the
/// background) and the matching window exposures.
struct Design {
    dim: usize,
    rows: Vec<f64>,
    exposure: Vec<f64>,
}

fn design(seq: &EventSequence, shape: &Shape) -> Design {
    let all = seq.all_times();
    let n_pre = seq.pre_history().len();
    let (start, end) = (seq.start(), seq.end());
    let cols = shape.columns();
    let dim = cols + 1;
    let n = seq.len();
    let mut rows = vec![0.0; n * dim];
    for i in 0..n {
        rows[i * dim] = 1.0;
    }

    match *shape {
        Shape::Exponential { beta } => {
            let mut s = 0.0;
            for idx in 1..all.len() {
                s = (s + 1.0) * (-beta * (all[idx] - all[idx - 1])).exp();
                if idx >= n_pre {
                    rows[(idx - n_pre) * dim + 1] = s;
                }
            }
        }
        Shape::Omori { c, p } => {
            let q = -1.0 - p;
            for i in 0..n {
                let t = all[n_pre + i];
                rows[i * dim + 1] = all[..n_pre + i]
                    .iter()
                    .map(|&tj| (q * (t - tj + c).ln()).exp())
                    .sum();
            }
        }
        Shape::Censored { kappa } => {
            let mut lo = 0;
            for i in 0..n {
                let idx = n_pre + i;
                let t = all[idx];
                while lo < idx && t - all[lo] > kappa {
                    lo += 1;
                }
                rows[i * dim + 1] = (idx - lo) as f64;
            }
        }
        Shape::Piecewise { delta, bins } => {
            let support = delta * bins as f64;
            let mut lo = 0;
            for i in 0..n {
                let idx = n_pre + i;
                let t = all[idx];
                while lo < idx && t - all[lo] >= support {
                    lo += 1;
                }
                for &tj in &all[lo..idx] {
                    let k = (((t - tj) / delta) as usize).min(bins - 1);
                    rows[i * dim + 1 + k] += 1.0;
                }
            }
        }
    }

    let mut exposure = vec![0.0; dim];
    exposure[0] = end - start;
    for &tj in all {
        for k in 0..cols {
            let mut e = shape.unit_cumulative(k, end - tj);
            if tj < start {
                e -= shape.unit_cumulative(k, start - tj);
            }
            exposure[k + 1] += e;
        }
    }
    Design { dim, rows, exposure }
}

/// Maximises `sum_i ln(a . x_i) - a . C` over `a >= 0`.
///
/// Damped Newton steps kept inside the positive orthant, with an EM update as
/// the fallback; columns that never fire are pinned at zero.
fn solve_amplitudes(d: &Design) -> Option<(Vec<f64>, f64)> {
    let dim = d.dim;
    let n = d.rows.len() / dim;
    let fires: Vec<bool> = (0..dim)
        .map(|k| (0..n).any(|i| d.rows[i * dim + k] > 0.0))
        .collect();
    let active: Vec<usize> = (0..dim).filter(|&k| fires[k] && d.exposure[k] > 0.0).collect();
    if !active.contains(&0) {
        return None;
    }
    let m = active.len();
    let mut a = vec![0.0; dim];
    let half = 0.5 * n as f64;
    a[0] = half / d.exposure[0];
    for &k in &active[1..] {
        a[k] = half / ((m - 1) as f64 * d.exposure[k]);
    }

    let value = |a: &[f64]| -> f64 {
        let mut f = 0.0;
        for i in 0..n {
            let row = &d.rows[i * dim..(i + 1) * dim];
            let lam: f64 = active.iter().map(|&k| a[k] * row[k]).sum();
            f += lam.ln();
        }
        f - active.iter().map(|&k| a[k] * d.exposure[k]).sum::<f64>()
    };

    let mut f = value(&a);
    let mut quiet = 0;
    for _ in 0..500 {
        let mut grad = DVector::<f64>::zeros(m);
        let mut info = DMatrix::<f64>::zeros(m, m);
        let mut em = vec![0.0; m];
        for i in 0..n {
            let row = &d.rows[i * dim..(i + 1) * dim];
            let lam: f64 = active.iter().map(|&k| a[k] * row[k]).sum();
            let inv = 1.0 / lam;
            for (u, &ku) in active.iter().enumerate() {
                let xu = row[ku] * inv;
                grad[u] += xu;
                em[u] += xu;
                for (v, &kv) in active.iter().enumerate().skip(u) {
                    info[(u, v)] += xu * row[kv] * inv;
                }
            }
        }
        for u in 0..m {
            grad[u] -= d.exposure[active[u]];
            for v in 0..u {
                info[(u, v)] = info[(v, u)];
            }
        }

        let mut candidate = None;
        if let Some(chol) = info.clone().cholesky() {
            let dir = chol.solve(&grad);
            let mut t: f64 = 1.0;
            for u in 0..m {
                if dir[u] < 0.0 {
                    t = t.min(-0.5 * a[active[u]] / dir[u]);
                }
            }
            for _ in 0..40 {
                let mut trial = a.clone();
                for u in 0..m {
                    trial[active[u]] += t * dir[u];
                }
                let ft = value(&trial);
                if ft >= f {
                    candidate = Some((trial, ft));
                    break;
                }
                t *= 0.5;
            }
        }
        let (next, fn_) = candidate.unwrap_or_else(|| {
            let mut trial = a.clone();
            for (u, &k) in active.iter().enumerate() {
                trial[k] *= em[u] / d.exposure[k];
            }
            let ft = value(&trial);
            (trial, ft)
        });
        if !fn_.is_finite() {
            return None;
        }
        let gain = fn_ - f;
        if gain >= 0.0 {
            a = next;
            f = fn_;
        }
        if gain <= 1e-13 * (1.0 + f.abs()) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Some((a, f))
}

enum Problem<'a> {
    Profiled { seq: &'a EventSequence, family: KernelFamily, gap: f64 },
    Gev { seq: &'a EventSequence, gap: f64 },
}

impl<'a> Problem<'a> {
    fn new(seq: &'a EventSequence, family: &KernelFamily) -> Self {
        let gap = seq.window_length() / seq.len() as f64;
        match family {
            KernelFamily::GevMin => Problem::Gev { seq, gap },
            f => Problem::Profiled {
                seq,
                family: f.clone(),
                gap,
            },
        }
    }

    fn default_start(&self) -> Vec<f64> {
        match self {
            Problem::Profiled { family, gap, .. } => match family {
                KernelFamily::Exponential => vec![-gap.ln()],
                KernelFamily::Omori => vec![gap.ln(), 0.5f64.ln()],
                KernelFamily::CensoredExponential => vec![(5.0 * gap).ln()],
                _ => Vec::new(),
            },
            Problem::Gev { gap, .. } => vec![(0.5 / gap).ln(), 2.0, gap.ln(), 0.0, 0.0],
        }
    }

    /// Search coordinates of `model`, when it belongs to the fitted family.
    fn coordinates_of(&self, model: &HawkesModel) -> Option<Vec<f64>> {
        match (self, model.kernel()) {
            (Problem::Profiled { family: KernelFamily::Exponential, .. }, Kernel::Gompertz(g)) => {
                Some(vec![g.beta().ln()])
            }
            (Problem::Profiled { family: KernelFamily::Omori, .. }, Kernel::Omori(o)) => {
                Some(vec![o.c().ln(), o.p().ln()])
            }
            (
                Problem::Profiled { family: KernelFamily::CensoredExponential, .. },
                Kernel::CensoredExponential(c),
            ) => Some(vec![c.kappa().ln()]),
            (Problem::Gev { gap, .. }, Kernel::GevMin(g)) => {
                let mass = model.branching_ratio();
                Some(vec![
                    model.eta().ln(),
                    g.mu() / gap,
                    g.sigma().ln(),
                    g.xi(),
                    (mass / (1.0 - mass)).ln(),
                ])
            }
            _ => None,
        }
    }

    fn shape(&self, x: &[f64]) -> Option<Shape> {
        let Problem::Profiled { family, .. } = self else {
            return None;
        };
        let shape = match *family {
            KernelFamily::Exponential => Shape::Exponential { beta: x[0].exp() },
            KernelFamily::Omori => Shape::Omori {
                c: x[0].exp(),
                p: x[1].exp(),
            },
            KernelFamily::CensoredExponential => Shape::Censored { kappa: x[0].exp() },
            KernelFamily::PiecewiseConstant { delta, bins } => Shape::Piecewise { delta, bins },
            KernelFamily::GevMin => return None,
        };
        let ok = match shape {
            Shape::Exponential { beta } => beta.is_finite() && beta > 0.0,
            Shape::Omori { c, p } => c.is_finite() && p.is_finite() && c > 0.0 && p > 0.0,
            Shape::Censored { kappa } => kappa.is_finite() && kappa > 0.0,
            Shape::Piecewise { .. } => true,
        };
        ok.then_some(shape)
    }

    /// Profile optimum for a shape: amplitudes and log-likelihood, if stable.
    fn profile(&self, shape: &Shape) -> Option<(Vec<f64>, f64)> {
        let Problem::Profiled { seq, .. } = self else {
            return None;
        };
        let (a, f) = solve_amplitudes(&design(seq, shape))?;
        let ratio: f64 = (0..shape.columns()).map(|k| a[k + 1] * shape.unit_mass()).sum();
        (ratio < 1.0 && ratio.is_finite()).then_some((a, f))
    }

    fn gev_model(&self, x: &[f64]) -> Result<HawkesModel> {
        let Problem::Gev { gap, .. } = self else {
            unreachable!("gev coordinates on a profiled problem");
        };
        let mass = 1.0 / (1.0 + (-x[4]).exp());
        let kernel = GevMinTruncated::with_total_mass(x[1] * gap, x[2].exp(), x[3], mass)?;
        HawkesModel::new(x[0].exp(), kernel)
    }

    fn objective(&self, x: &[f64]) -> f64 {
        match self {
            Problem::Profiled { .. } => self
                .shape(x)
                .and_then(|s| self.profile(&s))
                .map_or(f64::INFINITY, |(_, f)| -f),
            Problem::Gev { seq, .. } => match self.gev_model(x) {
                Ok(model) => -log_likelihood(&model, seq),
                Err(_) => f64::INFINITY,
            },
        }
    }

    fn model_at(&self, x: &[f64]) -> Result<HawkesModel> {
        match self {
            Problem::Profiled { .. } => {
                let shape = self
                    .shape(x)
                    .ok_or_else(|| Error::Numerical("fitted shape is invalid".into()))?;
                let (a, _) = self
                    .profile(&shape)
                    .ok_or_else(|| Error::Numerical("fitted shape has no stable optimum".into()))?;
                HawkesModel::new(a[0], shape.kernel(&a[1..])?)
            }
            Problem::Gev { .. } => self.gev_model(x),
        }
    }
}
