use super::{positive, WaitingDistribution, NEVER};
use crate::error::{Error, Result};

/// Step excitation `h(t) = alphas[k]` on `[k delta, (k + 1) delta)`, zero past
/// the last bin. The waiting time is composite (piecewise) exponential.
/// Inversion walks the bins in order; bin counts are small in practice.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantHazard {
    delta: f64,
    alphas: Vec<f64>,
    /// `cumulative[k] = H(k delta)`.
    cumulative: Vec<f64>,
}

impl PiecewiseConstantHazard {
    pub fn new(delta: f64, alphas: Vec<f64>) -> Result<Self> {
        let delta = positive("delta", delta)?;
        if alphas.is_empty() {
            return Err(Error::param("alphas", "need at least one bin"));
        }
        if let Some(bad) = alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::param(
                "alphas",
                format!("rates must be finite and non-negative, got {bad}"),
            ));
        }
        let mut cumulative = Vec::with_capacity(alphas.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for a in &alphas {
            acc += a * delta;
            cumulative.push(acc);
        }
        Ok(Self {
            delta,
            alphas,
            cumulative,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    fn end(&self) -> f64 {
        self.delta * self.alphas.len() as f64
    }
}

impl WaitingDistribution for PiecewiseConstantHazard {
    fn family(&self) -> &'static str {
        "piecewise_constant"
    }

    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        if t >= self.end() {
            return 0.0;
        }
        let k = ((t / self.delta) as usize).min(self.alphas.len() - 1);
        self.alphas[k]
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        if t >= self.end() {
            return self.total_mass();
        }
        let k = ((t / self.delta) as usize).min(self.alphas.len() - 1);
        self.cumulative[k] + self.alphas[k] * (t - k as f64 * self.delta)
    }

    fn total_mass(&self) -> f64 {
        self.cumulative[self.alphas.len()]
    }

    fn support_bound(&self) -> Option<f64> {
        Some(self.end())
    }

    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        if y >= self.total_mass() {
            return NEVER;
        }
        for (k, rate) in self.alphas.iter().enumerate() {
            if self.cumulative[k + 1] > y {
                let start = k as f64 * self.delta;
                let t = start + (y - self.cumulative[k]) / rate;
                return t.min(start + self.delta);
            }
        }
        NEVER
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        self.alphas.windows(2).all(|w| w[1] <= w[0])
    }
}
