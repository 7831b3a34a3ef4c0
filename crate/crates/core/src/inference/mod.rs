//! Likelihood, maximum-likelihood fitting and the time-rescaling test.

mod fit;
mod gof;
mod likelihood;
pub mod nelder_mead;

use serde::{Deserialize, Serialize};

use crate::model::HawkesModel;

pub use fit::{fit_mle, fit_mle_with, FitOptions};
pub use gof::time_rescale_test;
pub use likelihood::log_likelihood;

/// Kernel family to fit, with any structure that is held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelFamily {
    /// `alpha exp(-beta t)`.
    #[serde(alias = "gompertz")]
    Exponential,
    Omori,
    CensoredExponential,
    /// Step kernel on `bins` bins of width `delta`; only the rates are fitted.
    PiecewiseConstant { delta: f64, bins: usize },
    /// Censored GEV-min kernel.
    GevMin,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Exponential => "exponential",
            KernelFamily::Omori => "omori",
            KernelFamily::CensoredExponential => "censored_exponential",
            KernelFamily::PiecewiseConstant { .. } => "piecewise_constant",
            KernelFamily::GevMin => "gev_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: HawkesModel,
    pub branching_ratio: f64,
    pub loglik: f64,
    /// Simplex iterations summed over all starts.
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub starts: usize,
}

/// Outcome of the time-rescaling test.
///
/// There is one rescaled wait per event: the first runs from the window start,
/// where the compensator is zero, to the first event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub ks_statistic: f64,
    pub p_value: f64,
    pub rescaled_waits: Vec<f64>,
    /// `(Exp(1) quantile, sorted rescaled wait)` at positions `(i - 0.5) / n`.
    pub qq_pairs: Vec<(f64, f64)>,
}
