#![allow(dead_code)]

use hawkes_hazards::benchmark::simulate_with;
use hawkes_hazards::rng::stream_rng;
use hawkes_hazards::sim::Method;
use hawkes_hazards::{
    CensoredExponential, GevMinTruncated, Gompertz, HawkesModel, Kernel, Omori, PiecewiseConstantHazard,
    WaitingDistribution,
};
use rand::Rng;

pub const FAMILIES: [&str; 5] = ["censored_exponential", "gompertz", "omori", "gev_min", "piecewise_constant"];

/// A kernel of the named family with total mass `mass`.
pub fn kernel_with_mass(family: &str, mass: f64) -> Kernel {
    match family {
        "censored_exponential" => CensoredExponential::new(mass / 1.5, 1.5).unwrap().into(),
        "gompertz" => Gompertz::new(mass * 2.0, 2.0).unwrap().into(),
        "omori" => Omori::new(mass * 1.2 * 0.5f64.powf(1.2), 0.5, 1.2).unwrap().into(),
        "gev_min" => GevMinTruncated::with_total_mass(1.0, 0.5, 0.2, mass).unwrap().into(),
        "piecewise_constant" => {
            let w = [0.5, 0.3, 0.2];
            let delta = 0.4;
            PiecewiseConstantHazard::new(delta, w.iter().map(|x| x * mass / delta).collect())
                .unwrap()
                .into()
        }
        other => panic!("unknown family {other}"),
    }
}

/// Random kernel of any family. With `max_mass < 1` the kernel is a stable
/// Hawkes excitation.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, max_mass: f64) -> Kernel {
    let mass: f64 = rng.random_range(0.01..max_mass);
    match rng.random_range(0..5) {
        0 => {
            let kappa = rng.random_range(0.1..5.0);
            CensoredExponential::new(mass / kappa, kappa).unwrap().into()
        }
        1 => {
            let beta = rng.random_range(0.2..5.0);
            Gompertz::new(mass * beta, beta).unwrap().into()
        }
        2 => {
            let c: f64 = rng.random_range(0.05..2.0);
            let p = rng.random_range(0.1..3.0);
            Omori::new(mass * p * c.powf(p), c, p).unwrap().into()
        }
        3 => {
            let sigma = rng.random_range(0.2..2.0);
            let xi = rng.random_range(-0.5..0.5);
            let mu = sigma * rng.random_range(0.0..1.5);
            GevMinTruncated::with_total_mass(mu, sigma, xi, mass).unwrap().into()
        }
        _ => {
            let bins = rng.random_range(1..6);
            let delta = rng.random_range(0.1..1.0);
            let w: Vec<f64> = (0..bins).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum::<f64>().max(1e-9);
            PiecewiseConstantHazard::new(delta, w.iter().map(|x| x * mass / (total * delta)).collect())
                .unwrap()
                .into()
        }
    }
}

/// Points where the hazard jumps, to keep finite differences away from them.
pub fn discontinuities(k: &Kernel) -> Vec<f64> {
    match k {
        Kernel::CensoredExponential(c) => vec![c.kappa()],
        Kernel::PiecewiseConstant(p) => (0..=p.alphas().len()).map(|i| i as f64 * p.delta()).collect(),
        Kernel::GevMin(g) => g.kappa().into_iter().collect(),
        _ => Vec::new(),
    }
}

/// Smallest `t` in `[0, hi]` with `F(t) >= p`, by bisection on the CDF.
pub fn bisect_quantile(d: &impl WaitingDistribution, p: f64, mut hi: f64) -> f64 {
    let mut lo = 0.0;
    while d.cdf(hi).unwrap() < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d.cdf(mid).unwrap() < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Event counts of `reps` independent paths on `[0, horizon]`.
pub fn counts(method: Method, model: &HawkesModel, horizon: f64, reps: usize, seed: u64) -> Vec<f64> {
    (0..reps)
        .map(|r| simulate_with(method, model, horizon, seed, r as u64).unwrap().seq.len() as f64)
        .collect()
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn seeded(seed: u64) -> hawkes_hazards::rng::SimRng {
    stream_rng(seed, 0xfeed)
}

/// Supremum of the kernel hazard over its support.
pub fn hazard_sup(k: &Kernel) -> f64 {
    match k {
        Kernel::GevMin(g) => g.hazard_at(g.kappa().expect("censored GEV")),
        Kernel::PiecewiseConstant(p) => p.alphas().iter().copied().fold(0.0, f64::max),
        _ => k.hazard_at(0.0),
    }
}

/// Thinning with the left-endpoint bound where valid, else the hazard supremum.
pub fn thinning_counts(model: &HawkesModel, horizon: f64, reps: usize, seed: u64) -> Vec<f64> {
    use hawkes_hazards::sim::{thinning_simulate, BoundPolicy, ThinningConfig};
    let policy = if model.kernel().is_hazard_nonincreasing() {
        BoundPolicy::LeftEndpointForDecreasing
    } else {
        BoundPolicy::UserSuppliedBound(hazard_sup(model.kernel()))
    };
    (0..reps)
        .map(|r| {
            let cfg = ThinningConfig::new(model.clone(), horizon, seed)
                .with_stream(r as u64)
                .with_bound(policy);
            thinning_simulate(&cfg).unwrap().seq.len() as f64
        })
        .collect()
}
