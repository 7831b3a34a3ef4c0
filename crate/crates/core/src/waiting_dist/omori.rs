use super::{positive, WaitingDistribution, NEVER};
use crate::error::Result;

/// Omori-law excitation `h(t) = K / (t + c)^(1 + p)`.
///
/// Integrating the hazard gives
///
/// ```text
/// H(t)   = (K / p) (c^-p - (t + c)^-p)
/// H(inf) = K / (p c^p)
/// ```
///
/// and inverting `H(t) = y` yields `t = (c^-p - p y / K)^(-1/p) - c` while the
/// bracket is positive, [`NEVER`] otherwise. The implementation uses the
/// equivalent `t = c * expm1(-ln(1 - y / H(inf)) / p)`, which keeps precision
/// for small `y`. A draw at age `a` is the same computation with `c`
/// replaced by `a + c` and `H(inf)` by the remaining mass `(K / p)(a + c)^-p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omori {
    k: f64,
    c: f64,
    p: f64,
}

impl Omori {
    pub fn new(k: f64, c: f64, p: f64) -> Result<Self> {
        Ok(Self {
            k: positive("K", k)?,
            c: positive("c", c)?,
            p: positive("p", p)?,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `H(inf) - H(age)`.
    #[inline]
    fn remaining_mass(&self, age: f64) -> f64 {
        self.k / (self.p * (age + self.c).powf(self.p))
    }
}

impl WaitingDistribution for Omori {
    fn family(&self) -> &'static str {
        "omori"
    }

    #[inline]
    fn hazard_at(&self, t: f64) -> f64 {
        self.k * (t + self.c).powf(-1.0 - self.p)
    }

    #[inline]
    fn cumulative_hazard_at(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return self.total_mass();
        }
        // c^-p (1 - (1 + t/c)^-p)
        let tail = -(-self.p * (t / self.c).ln_1p()).exp_m1();
        self.total_mass() * tail
    }

    fn total_mass(&self) -> f64 {
        self.remaining_mass(0.0)
    }

    fn support_bound(&self) -> Option<f64> {
        None
    }

    fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        self.residual_wait(0.0, y)
    }

    #[inline]
    fn residual_wait(&self, age: f64, e: f64) -> f64 {
        let remaining = self.remaining_mass(age);
        if e >= remaining {
            return NEVER;
        }
        (age + self.c) * (-(-e / remaining).ln_1p() / self.p).exp_m1()
    }

    fn is_hazard_nonincreasing(&self) -> bool {
        true
    }
}
