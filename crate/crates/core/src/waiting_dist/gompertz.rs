use super::{positive, WaitingDistribution, NEVER};
use crate::error::Result;

/// Exponential excitation `h(t) = alpha * exp(-beta t)`.
///
/// The waiting time is Gompertz with a negative shape:
///
/// ```text
/// S(t) = exp((alpha / beta) (exp(-beta t) - 1)),   S(inf) = exp(-alpha / beta)
/// Q(p) = -(1 / beta) ln(1 + (beta / alpha) ln(1 - p))
/// ```
///
/// Conditioning on survival to age `a` gives `Gompertz(alpha exp(-beta a), beta)`,
/// and the minimum of Gompertz variables sharing `beta` is Gompertz with the
/// summed `alpha`. The min-stable simulator relies on both facts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gompertz {
    alpha: f64,
    beta: f64,
}

impl Gompertz {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            alpha: positive("alpha", alpha)?,
            beta: positive("beta", beta)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Wait until the first event of a Gompertz timer with initial rate `rate`
    /// and decay `beta`, driven by the unit exponential `e`.
    #[inline]
    pub(crate) fn wait_for_rate(rate: f64, beta: f64, e: f64) -> f64 {
        let x = e * beta / rate;
        if x >= 1.0 {
            NEVER
        } else {
            -(-x).ln_1p() / beta
        }
    }
}

impl WaitingDistribution for Gompertz {
    fn family(&self) -> &'static str {
        "gompertz"
    }

    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        self.alpha * (-self.beta * t).exp()
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        -(self.alpha / self.beta) * (-self.beta * t).exp_m1()
    }

    fn total_mass(&self) -> f64 {
        self.alpha / self.beta
    }

    fn support_bound(&self) -> Option<f64> {
        None
    }

    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        self.residual_wait(0.0, y)
    }

    #[inline]
    fn residual_wait(&self, age: f64, e: f64) -> f64 {
        let rate = if age == 0.0 {
            self.alpha
        } else {
            self.alpha * (-self.beta * age).exp()
        };
        Self::wait_for_rate(rate, self.beta, e)
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        true
    }
}
