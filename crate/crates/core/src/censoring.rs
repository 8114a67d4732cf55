//! Adaptive type-II progressive hybrid censoring: removal plans and sample
//! generation by direct simulation of the life test.
//!
//! A plan puts `n` units on test, observes exactly `m` failures, and removes
//! `R_i` surviving units at the i-th failure. Once the threshold time `T` is
//! passed, planned removals are suspended (set to zero) and every survivor is
//! withdrawn at the m-th failure, so the test always ends with `m` observed
//! failures.

use crate::error::{Error, Result};
use crate::models::Params;
use crate::numeric::split_seed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// A removal plan `(n, m, T, R)` with `sum(R) = n - m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoringPlan {
    n: usize,
    m: usize,
    threshold: f64,
    removals: Vec<usize>,
}

impl CensoringPlan {
    pub fn new(n: usize, m: usize, threshold: f64, removals: Vec<usize>) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidPlan(format!("need 1 <= m <= n, got n={n} m={m}")));
        }
        if !(threshold > 0.0) || threshold.is_nan() {
            return Err(Error::InvalidPlan(format!("threshold must be > 0, got {threshold}")));
        }
        if removals.len() != m {
            return Err(Error::InvalidPlan(format!(
                "removal vector must have m={m} entries, got {}",
                removals.len()
            )));
        }
        let total: usize = removals.iter().sum();
        if total != n - m {
            return Err(Error::InvalidPlan(format!(
                "removals must sum to n-m={}, got {total}",
                n - m
            )));
        }
        Ok(Self { n, m, threshold, removals })
    }

    /// Complete-data plan: every unit observed, no removals.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, n, f64::INFINITY, vec![0; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    #[inline]
    pub fn removals(&self) -> &[usize] {
        &self.removals
    }
}

/// One of the three removal patterns used in the evaluation campaigns.
///
/// * kind 1: `(0, ..., 0, n-m)`
/// * kind 2: `(n-2m+1, 1, ..., 1)` (requires `n >= 2m-1`)
/// * kind 3: `(n-m-5, 0, ..., 0, 1, 1, 1, 1, 1)` (requires `m >= 6`, `n-m >= 5`)
pub fn scheme(kind: u8, n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidPlan(format!("need 1 <= m <= n, got n={n} m={m}")));
    }
    match kind {
        1 => {
            let mut r = vec![0; m];
            r[m - 1] = n - m;
            Ok(r)
        }
        2 => {
            if n + 1 < 2 * m {
                return Err(Error::InvalidPlan(format!(
                    "scheme 2 needs n >= 2m-1, got n={n} m={m}"
                )));
            }
            let mut r = vec![1; m];
            r[0] = n + 1 - 2 * m;
            Ok(r)
        }
        3 => {
            if m < 6 || n - m < 5 {
                return Err(Error::InvalidPlan(format!(
                    "scheme 3 needs m >= 6 and n-m >= 5, got n={n} m={m}"
                )));
            }
            let mut r = vec![0; m];
            r[0] = n - m - 5;
            for slot in r[m - 5..].iter_mut() {
                *slot = 1;
            }
            Ok(r)
        }
        other => Err(Error::InvalidPlan(format!("scheme kind must be 1, 2 or 3, got {other}"))),
    }
}

/// An observed AT-II progressive hybrid censored sample.
///
/// `change_point` is the number of failures at or before the threshold; the
/// effective removal vector equals the plan up to the change point, is zero
/// after it, and withdraws every survivor at the final failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveCensoredSample {
    times: Vec<f64>,
    change_point: usize,
    effective_removals: Vec<usize>,
    plan: CensoringPlan,
}

impl AdaptiveCensoredSample {
    /// Build a sample from ordered failure times, deriving the change point
    /// and effective removals from the plan.
    ///
    /// Times must be positive and non-decreasing. Exact ties are admitted
    /// because fixed real-world data sets contain repeated values; generated
    /// samples from a continuous model are strictly increasing almost surely.
    pub fn new(times: Vec<f64>, plan: CensoringPlan) -> Result<Self> {
        if times.len() != plan.m() {
            return Err(Error::InvalidSample(format!(
                "expected m={} failure times, got {}",
                plan.m(),
                times.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidSample("failure times must be finite and > 0".into()));
        }
        if times.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSample("failure times must be non-decreasing".into()));
        }
        let change_point = times.iter().filter(|&&t| t <= plan.threshold()).count();
        let effective_removals = effective_removals(&plan, change_point);
        Ok(Self { times, change_point, effective_removals, plan })
    }

    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.times.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.plan.n()
    }

    /// Number of failures observed at or before the threshold.
    #[inline]
    pub fn change_point(&self) -> usize {
        self.change_point
    }

    #[inline]
    pub fn effective_removals(&self) -> &[usize] {
        &self.effective_removals
    }

    #[inline]
    pub fn plan(&self) -> &CensoringPlan {
        &self.plan
    }
}

fn effective_removals(plan: &CensoringPlan, change_point: usize) -> Vec<usize> {
    let m = plan.m();
    if change_point + 1 >= m {
        return plan.removals().to_vec();
    }
    let mut eff = vec![0; m];
    let mut removed_early = 0;
    for i in 0..change_point {
        eff[i] = plan.removals()[i];
        removed_early += eff[i];
    }
    eff[m - 1] = plan.n() - m - removed_early;
    eff
}

/// Generate a sample by simulating the life test at the given parameters:
/// draw `n` iid lifetimes, take the minimum of the survivors as each failure,
/// and apply the plan's removal (suspended once past the threshold) after
/// every failure but the last, at which all survivors are withdrawn.
pub fn generate(params: &Params, plan: &CensoringPlan, seed: u64) -> AdaptiveCensoredSample {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let lifetimes = params.sample_into(plan.n(), &mut rng);
    run_life_test(lifetimes, plan, &mut rng)
        .expect("generated lifetimes are positive and match the plan")
}

/// Apply the censoring mechanism to a fixed data set of `plan.n()` values.
/// Which survivors are withdrawn at each failure is chosen uniformly at
/// random from the seeded stream.
pub fn censor_real_data(
    data: &[f64],
    plan: &CensoringPlan,
    seed: u64,
) -> Result<AdaptiveCensoredSample> {
    if data.len() != plan.n() {
        return Err(Error::InvalidSample(format!(
            "data length {} does not match plan n={}",
            data.len(),
            plan.n()
        )));
    }
    if data.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidSample("data values must be finite and > 0".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    run_life_test(data.to_vec(), plan, &mut rng)
}

fn run_life_test(
    mut survivors: Vec<f64>,
    plan: &CensoringPlan,
    rng: &mut ChaCha12Rng,
) -> Result<AdaptiveCensoredSample> {
    let m = plan.m();
    let mut times = Vec::with_capacity(m);
    for i in 0..m {
        let (min_idx, _) = survivors
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("survivors remain before the m-th failure");
        let failure = survivors.swap_remove(min_idx);
        times.push(failure);
        if i + 1 < m {
            let planned = if failure <= plan.threshold() { plan.removals()[i] } else { 0 };
            for _ in 0..planned {
                let k = rng.random_range(0..survivors.len());
                survivors.swap_remove(k);
            }
        }
    }
    AdaptiveCensoredSample::new(times, plan.clone())
}

/// Derive a per-replicate seed from a master seed.
#[inline]
pub fn replicate_seed(master: u64, replicate: u64) -> u64 {
    split_seed(master, replicate)
}
