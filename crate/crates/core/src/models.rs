//! Gumbel type-II distribution primitives and the comparator families used
//! for goodness-of-fit comparison.
//!
//! The distribution has CDF `F(x) = exp(-beta * x^(-alpha))` on x > 0 with
//! shape `alpha > 0` and scale `beta > 0`. Its hazard rate is either
//! decreasing or upside-down bathtub shaped depending on the shape parameter.

use crate::error::{Error, Result};
use crate::numeric::inv_expm1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Shape/scale parameter pair of a Gumbel type-II distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    alpha: f64,
    beta: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `beta * x^(-alpha)`, the exponent entering every distribution formula.
    #[inline]
    pub(crate) fn exponent(&self, x: f64) -> f64 {
        self.beta * x.powf(-self.alpha)
    }

    /// Distribution function `exp(-beta x^(-alpha))`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        Ok((-self.exponent(x)).exp())
    }

    /// Density `alpha beta x^(-alpha-1) exp(-beta x^(-alpha))`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        Ok((self.ln_pdf_unchecked(x)).exp())
    }

    #[inline]
    pub(crate) fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        self.alpha.ln() + self.beta.ln() - (self.alpha + 1.0) * x.ln() - self.exponent(x)
    }

    /// Hazard rate `alpha beta x^(-alpha-1) / (exp(beta x^(-alpha)) - 1)`.
    ///
    /// Evaluated through expm1 so the x -> infinity tail (where the
    /// denominator vanishes) stays accurate.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        let z = self.exponent(x);
        Ok(self.alpha * self.beta * x.powf(-self.alpha - 1.0) * inv_expm1(z))
    }

    /// Quantile `(beta / (-ln u))^(1/alpha)`, the exact inverse of `cdf`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile requires u in (0,1), got {u}")));
        }
        Ok((self.beta / -u.ln()).powf(1.0 / self.alpha))
    }

    /// `count` iid draws by inversion, deterministic for a given seed.
    pub fn sample_iid(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::Domain("sample count must be >= 1".into()));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Ok(self.sample_into(count, &mut rng))
    }

    pub(crate) fn sample_into(&self, count: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    #[inline]
    pub(crate) fn draw(&self, rng: &mut ChaCha12Rng) -> f64 {
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        (self.beta / -u.ln()).powf(1.0 / self.alpha)
    }
}

#[inline]
fn check_support(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("x must be finite and > 0, got {x}")));
    }
    Ok(())
}

/// Families fitted alongside Gumbel type-II on complete data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparatorFamily {
    /// Nadarajah-Haghighi: `F(x) = 1 - exp(1 - (1 + p2 x)^p1)`.
    NadarajahHaghighi,
    /// Burr III: `F(x) = (1 + x^(-p1))^(-p2)`.
    BurrIii,
    /// Inverted Kumaraswamy: `F(x) = (1 - (1 + x)^(-p1))^p2`.
    InvertedKumaraswamy,
}

impl ComparatorFamily {
    pub fn label(&self) -> &'static str {
        match self {
            ComparatorFamily::NadarajahHaghighi => "NH",
            ComparatorFamily::BurrIii => "BurrIII",
            ComparatorFamily::InvertedKumaraswamy => "IKum",
        }
    }
}

impl std::str::FromStr for ComparatorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nh" | "nadarajah-haghighi" => Ok(ComparatorFamily::NadarajahHaghighi),
            "burriii" | "burr3" | "burr-iii" => Ok(ComparatorFamily::BurrIii),
            "ikum" | "inverted-kumaraswamy" => Ok(ComparatorFamily::InvertedKumaraswamy),
            other => Err(Error::Domain(format!("unknown comparator family: {other}"))),
        }
    }
}

/// A comparator family with fixed positive parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparatorModel {
    pub family: ComparatorFamily,
    p1: f64,
    p2: f64,
}

impl ComparatorModel {
    pub fn new(family: ComparatorFamily, p1: f64, p2: f64) -> Result<Self> {
        if !(p1.is_finite() && p1 > 0.0 && p2.is_finite() && p2 > 0.0) {
            return Err(Error::Domain(format!(
                "comparator parameters must be finite and > 0, got ({p1}, {p2})"
            )));
        }
        Ok(Self { family, p1, p2 })
    }

    #[inline]
    pub fn p1(&self) -> f64 {
        self.p1
    }

    #[inline]
    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        let (p1, p2) = (self.p1, self.p2);
        Ok(match self.family {
            ComparatorFamily::NadarajahHaghighi => -((1.0 - (1.0 + p2 * x).powf(p1)).exp_m1()),
            ComparatorFamily::BurrIii => (1.0 + x.powf(-p1)).powf(-p2),
            ComparatorFamily::InvertedKumaraswamy => (-(1.0 + x).powf(-p1)).ln_1p().exp().powf(p2),
        })
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        let (p1, p2) = (self.p1, self.p2);
        Ok(match self.family {
            ComparatorFamily::NadarajahHaghighi => {
                (p1 * p2).ln() + (p1 - 1.0) * (p2 * x).ln_1p() + (1.0 - (1.0 + p2 * x).powf(p1))
            }
            ComparatorFamily::BurrIii => {
                (p1 * p2).ln() - (p1 + 1.0) * x.ln() - (p2 + 1.0) * x.powf(-p1).ln_1p()
            }
            ComparatorFamily::InvertedKumaraswamy => {
                (p1 * p2).ln() - (p1 + 1.0) * x.ln_1p()
                    + (p2 - 1.0) * (-(1.0 + x).powf(-p1)).ln_1p()
            }
        })
    }

    /// Sum of log-densities over a complete sample.
    pub fn loglik(&self, data: &[f64]) -> Result<f64> {
        data.iter().map(|&x| self.ln_pdf(x)).sum()
    }
}
