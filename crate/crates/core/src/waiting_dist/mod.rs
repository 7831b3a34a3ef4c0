//! Waiting-time distributions tied to Hawkes excitation functions.
//!
//! An excitation function `h` is read as the hazard of a waiting time `V`.
//! Its integral `H(t)` gives the survival `S(t) = exp(-H(t))`, and because a
//! stable Hawkes kernel has `H(inf) < 1`, the law of `V` is *defective*: with
//! probability `exp(-H(inf))` the event never happens. That outcome is the
//! ordinary [`NEVER`] value (positive infinity), not an error.
//!
//! Sampling works in cumulative-hazard space. A left-truncated draw
//! `V - a | V >= a` is obtained from a unit exponential `E` as the `s` that
//! solves `H(a + s) - H(a) = E`, with `NEVER` when `E >= H(inf) - H(a)`. With
//! `E = -ln(1 - U)` this is exactly inversion with `U ~ Unif(F(a), 1)`.

mod censored;
mod gev;
mod gompertz;
mod omori;
mod piecewise;

pub use censored::CensoredExponential;
pub use gev::GevMinTruncated;
pub use gompertz::Gompertz;
pub use omori::Omori;
pub use piecewise::PiecewiseConstantHazard;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_exponential;

/// The "event never happens" outcome of a defective waiting time.
pub const NEVER: f64 = f64::INFINITY;

pub trait WaitingDistribution {
    fn family(&self) -> &'static str;

    /// Hazard at `t`; the caller guarantees `t >= 0`.
    fn hazard_at(&self, t: f64) -> f64;

    /// Cumulative hazard `H(t)`; the caller guarantees `t >= 0` (may be infinite).
    fn cumulative_hazard_at(&self, t: f64) -> f64;

    /// `H(inf)`, the expected number of direct offspring of one event.
    fn total_mass(&self) -> f64;

    /// Time after which the hazard is identically zero, if finite.
    fn support_bound(&self) -> Option<f64>;

    /// Smallest `t` with `H(t) >= y`, or [`NEVER`] when `y >= H(inf)`.
    fn inverse_cumulative_hazard(&self, y: f64) -> f64;

    /// Remaining wait `s` with `H(age + s) - H(age) = e`, or [`NEVER`].
    fn residual_wait(&self, age: f64, e: f64) -> f64 {
        let target = self.cumulative_hazard_at(age) + e;
        let t = self.inverse_cumulative_hazard(target);
        if t == NEVER {
            NEVER
        } else {
            (t - age).max(0.0)
        }
    }

    fn is_hazard_nonincreasing(&self) -> bool;

    fn hazard(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.hazard_at(t))
    }

    fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.cumulative_hazard_at(t))
    }

    fn survival(&self, t: f64) -> Result<f64> {
        Ok((-self.cumulative_hazard(t)?).exp())
    }

    fn cdf(&self, t: f64) -> Result<f64> {
        Ok(-(-self.cumulative_hazard(t)?).exp_m1())
    }

    /// `lim F(t) = 1 - exp(-H(inf))`, the probability that the event happens at all.
    fn defective_limit(&self) -> f64 {
        -(-self.total_mass()).exp_m1()
    }

    /// Quantile of the (defective) law: finite when `p < F(inf)`, else [`NEVER`].
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain {
                what: "probability",
                value: p,
                expected: "0 <= p < 1",
            });
        }
        Ok(self.inverse_cumulative_hazard(-(-p).ln_1p()))
    }

    /// Draw `V - age` conditional on `V >= age`, possibly [`NEVER`].
    fn sample_truncated<R: Rng + ?Sized>(&self, age: f64, rng: &mut R) -> Result<f64>
    where
        Self: Sized,
    {
        check_time(age)?;
        Ok(self.sample_truncated_unchecked(age, rng))
    }

    #[inline]
    fn sample_truncated_unchecked<R: Rng + ?Sized>(&self, age: f64, rng: &mut R) -> f64
    where
        Self: Sized,
    {
        if let Some(bound) = self.support_bound() {
            if age >= bound {
                return NEVER;
            }
        }
        let e = unit_exponential(rng);
        self.residual_wait(age, e)
    }

    /// Draw from the normalised kernel `h(t) / H(inf)`: the delay of a child
    /// in the cluster representation.
    fn sample_offspring_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> f64
    where
        Self: Sized,
    {
        let mass = self.total_mass();
        loop {
            let u: f64 = rng.random();
            let t = self.inverse_cumulative_hazard(u * mass);
            if t.is_finite() {
                return t;
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "time",
            value: t,
            expected: "t >= 0",
        })
    }
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be finite and positive, got {v}")))
    }
}

/// Any of the supported excitation families.
///
/// Serialized as a flat JSON object tagged by `family`:
///
/// ```json
/// {"family": "censored_exponential", "alpha": 0.3, "kappa": 2.0}
/// {"family": "gompertz", "alpha": 1.0, "beta": 2.0}
/// {"family": "omori", "K": 0.082, "c": 0.145, "p": 0.141}
/// {"family": "gev_min", "mu": 0.0, "sigma": 1.0, "xi": -2.0, "kappa": 5.0}
/// {"family": "piecewise_constant", "delta": 0.5, "alphas": [0.1, 0.1]}
/// ```
///
/// `"exponential"` is accepted as an alias of `"gompertz"`, and `kappa` is
/// optional for `gev_min`. Parameters are validated on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelSpec", into = "KernelSpec")]
pub enum Kernel {
    CensoredExponential(CensoredExponential),
    Gompertz(Gompertz),
    Omori(Omori),
    GevMin(GevMinTruncated),
    PiecewiseConstant(PiecewiseConstantHazard),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum KernelSpec {
    CensoredExponential {
        alpha: f64,
        kappa: f64,
    },
    #[serde(alias = "exponential")]
    Gompertz {
        alpha: f64,
        beta: f64,
    },
    Omori {
        #[serde(rename = "K")]
        k: f64,
        c: f64,
        p: f64,
    },
    GevMin {
        mu: f64,
        sigma: f64,
        xi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    PiecewiseConstant {
        delta: f64,
        alphas: Vec<f64>,
    },
}

impl TryFrom<KernelSpec> for Kernel {
    type Error = Error;

    fn try_from(spec: KernelSpec) -> Result<Self> {
        Ok(match spec {
            KernelSpec::CensoredExponential { alpha, kappa } => {
                CensoredExponential::new(alpha, kappa)?.into()
            }
            KernelSpec::Gompertz { alpha, beta } => Gompertz::new(alpha, beta)?.into(),
            KernelSpec::Omori { k, c, p } => Omori::new(k, c, p)?.into(),
            KernelSpec::GevMin {
                mu,
                sigma,
                xi,
                kappa,
            } => GevMinTruncated::new(mu, sigma, xi, kappa)?.into(),
            KernelSpec::PiecewiseConstant { delta, alphas } => {
                PiecewiseConstantHazard::new(delta, alphas)?.into()
            }
        })
    }
}

impl From<Kernel> for KernelSpec {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::CensoredExponential(d) => KernelSpec::CensoredExponential {
                alpha: d.alpha(),
                kappa: d.kappa(),
            },
            Kernel::Gompertz(d) => KernelSpec::Gompertz {
                alpha: d.alpha(),
                beta: d.beta(),
            },
            Kernel::Omori(d) => KernelSpec::Omori {
                k: d.k(),
                c: d.c(),
                p: d.p(),
            },
            Kernel::GevMin(d) => KernelSpec::GevMin {
                mu: d.mu(),
                sigma: d.sigma(),
                xi: d.xi(),
                kappa: d.kappa(),
            },
            Kernel::PiecewiseConstant(d) => KernelSpec::PiecewiseConstant {
                delta: d.delta(),
                alphas: d.alphas().to_vec(),
            },
        }
    }
}

macro_rules! impl_from_family {
    ($($variant:ident($ty:ty)),*) => {
        $(impl From<$ty> for Kernel {
            fn from(d: $ty) -> Self {
                Kernel::$variant(d)
            }
        })*
    };
}

impl_from_family!(
    CensoredExponential(CensoredExponential),
    Gompertz(Gompertz),
    Omori(Omori),
    GevMin(GevMinTruncated),
    PiecewiseConstant(PiecewiseConstantHazard)
);

macro_rules! dispatch {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Kernel::CensoredExponential($d) => $e,
            Kernel::Gompertz($d) => $e,
            Kernel::Omori($d) => $e,
            Kernel::GevMin($d) => $e,
            Kernel::PiecewiseConstant($d) => $e,
        }
    };
}

impl WaitingDistribution for Kernel {
    fn family(&self) -> &'static str {
        dispatch!(self, d => d.family())
    }

    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        dispatch!(self, d => d.hazard_at(t))
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        dispatch!(self, d => d.cumulative_hazard_at(t))
    }

    fn total_mass(&self) -> f64 {
        dispatch!(self, d => d.total_mass())
    }

    #[inline]
    fn support_bound(&self) -> Option<f64> {
        dispatch!(self, d => d.support_bound())
    }

    #[inline]
    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        dispatch!(self, d => d.inverse_cumulative_hazard(y))
    }

    #[inline]
    fn residual_wait(&self, age: f64, e: f64) -> f64 {
        dispatch!(self, d => d.residual_wait(age, e))
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        dispatch!(self, d => d.is_hazard_nonincreasing())
    }
}
