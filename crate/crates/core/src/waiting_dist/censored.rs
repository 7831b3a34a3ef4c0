use super::{positive, WaitingDistribution, NEVER};
use crate::error::Result;

/// Constant excitation `alpha` switched off after `kappa`.
///
/// The waiting time is `Exponential(alpha)` censored at `kappa`: a draw that
/// would land beyond `kappa` never fires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredExponential {
    alpha: f64,
    kappa: f64,
}

impl CensoredExponential {
    pub fn new(alpha: f64, kappa: f64) -> Result<Self> {
        Ok(Self {
            alpha: positive("alpha", alpha)?,
            kappa: positive("kappa", kappa)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl WaitingDistribution for CensoredExponential {
    fn family(&self) -> &'static str {
        "censored_exponential"
    }

    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        if t <= self.kappa {
            self.alpha
        } else {
            0.0
        }
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        self.alpha * t.min(self.kappa)
    }

    fn total_mass(&self) -> f64 {
        self.alpha * self.kappa
    }

    fn support_bound(&self) -> Option<f64> {
        Some(self.kappa)
    }

    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        self.residual_wait(0.0, y)
    }

    #[inline]
    fn residual_wait(&self, age: f64, e: f64) -> f64 {
        if age >= self.kappa || e >= self.alpha * (self.kappa - age) {
            NEVER
        } else {
            e / self.alpha
        }
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        true
    }
}
