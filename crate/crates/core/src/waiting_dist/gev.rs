use super::{positive, WaitingDistribution, NEVER};
use crate::error::{Error, Result};

/// Generalised-extreme-value-for-minima waiting time truncated to `t >= 0`,
/// optionally censored at `kappa`.
///
/// With `z(t) = 1 - xi (t - mu) / sigma`, the untruncated law has cumulative
/// hazard `G(t) = z^(-1/xi)` (`exp((t - mu)/sigma)` when `xi = 0`) and hazard
///
/// ```text
/// h(t) = (1/sigma) z^(-1 - 1/xi) = G(t) / (sigma z)
/// ```
///
/// Truncating to positive times keeps the hazard and shifts the cumulative
/// hazard to `H(t) = G(t) - G(0)`. `G` grows without bound for every `xi`
/// (towards the asymptote `mu + sigma/xi` when `xi > 0`, polynomially or
/// exponentially otherwise), so the uncensored law is proper and never a
/// stable Hawkes kernel. Censoring at `kappa` makes it defective with
/// `H(inf) = G(kappa) - G(0)`.
///
/// The origin must lie inside the support: `z(0) = 1 + xi mu / sigma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevMinTruncated {
    mu: f64,
    sigma: f64,
    xi: f64,
    kappa: Option<f64>,
    g0: f64,
    end: f64,
}

impl GevMinTruncated {
    pub fn new(mu: f64, sigma: f64, xi: f64, kappa: Option<f64>) -> Result<Self> {
        let sigma = positive("sigma", sigma)?;
        if !mu.is_finite() {
            return Err(Error::param("mu", "must be finite"));
        }
        if !xi.is_finite() {
            return Err(Error::param("xi", "must be finite"));
        }
        let kappa = kappa.map(|k| positive("kappa", k)).transpose()?;
        if 1.0 + xi * mu / sigma <= 0.0 {
            return Err(Error::param(
                "mu",
                "the origin must lie inside the support (1 + xi mu / sigma > 0)",
            ));
        }
        let asymptote = if xi > 0.0 { mu + sigma / xi } else { f64::INFINITY };
        let mut d = Self {
            mu,
            sigma,
            xi,
            kappa,
            g0: 0.0,
            end: kappa.map_or(asymptote, |k| k.min(asymptote)),
        };
        d.g0 = d.untruncated_cumulative_hazard(0.0);
        Ok(d)
    }

    /// Censor a GEV law so that its total mass is `mass`.
    pub fn with_total_mass(mu: f64, sigma: f64, xi: f64, mass: f64) -> Result<Self> {
        let uncensored = Self::new(mu, sigma, xi, None)?;
        let kappa = uncensored.inverse_cumulative_hazard(positive("mass", mass)?);
        Self::new(mu, sigma, xi, Some(kappa))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    /// `(z, G)` at `t`, or `None` beyond the asymptote.
    #[inline]
    fn z_and_g(&self, t: f64) -> Option<(f64, f64)> {
        let w = (t - self.mu) / self.sigma;
        if self.xi == 0.0 {
            return Some((1.0, w.exp()));
        }
        let z = 1.0 - self.xi * w;
        if z <= 0.0 {
            return None;
        }
        Some((z, (-(-self.xi * w).ln_1p() / self.xi).exp()))
    }

    fn untruncated_cumulative_hazard(&self, t: f64) -> f64 {
        self.z_and_g(t).map_or(f64::INFINITY, |(_, g)| g)
    }
}

impl WaitingDistribution for GevMinTruncated {
    fn family(&self) -> &'static str {
        "gev_min"
    }

    /// Infinite at and beyond the asymptote of an uncensored `xi > 0` law.
    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        if self.kappa.is_some_and(|k| t > k) {
            return 0.0;
        }
        match self.z_and_g(t) {
            Some((z, g)) => g / (self.sigma * z),
            None => f64::INFINITY,
        }
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        let t = self.kappa.map_or(t, |k| t.min(k));
        self.untruncated_cumulative_hazard(t) - self.g0
    }

    fn total_mass(&self) -> f64 {
        self.cumulative_hazard_at(f64::INFINITY)
    }

    fn support_bound(&self) -> Option<f64> {
        self.end.is_finite().then_some(self.end)
    }

    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        if y >= self.total_mass() {
            return NEVER;
        }
        let target = self.g0 + y;
        let w = if self.xi == 0.0 {
            target.ln()
        } else {
            -(-self.xi * target.ln()).exp_m1() / self.xi
        };
        (self.mu + self.sigma * w).clamp(0.0, self.end)
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        self.xi <= -1.0
    }
}
