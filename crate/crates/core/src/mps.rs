//! Maximum product spacing estimation under adaptive type-II progressive
//! hybrid censoring.
//!
//! The objective multiplies the CDF increments between consecutive order
//! statistics (plus the two boundary spacings) by the same survival factors
//! that appear in the likelihood. Exact ties in fixed data sets would zero a
//! spacing, so a tied spacing is replaced by the density at the tied point
//! (the Cheng-Amin remedy).

use crate::censoring::AdaptiveCensoredSample;
use crate::error::{Error, Result};
use crate::mle::{fit_objective, FitObjective, FitOptions, FitReport};
use crate::models::Params;
use crate::numeric::{inv_expm1, ln_one_minus_exp_neg};
use serde::{Deserialize, Serialize};

/// The `m + 1` spacings `F(x_1), F(x_2)-F(x_1), ..., 1-F(x_m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSet {
    pub values: Vec<f64>,
}

impl SpacingSet {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// CDF increments between consecutive observed failures; they always sum to
/// one by telescoping.
pub fn spacings(p: &Params, s: &AdaptiveCensoredSample) -> SpacingSet {
    let times = s.times();
    let mut values = Vec::with_capacity(times.len() + 1);
    let cdf = |x: f64| (-p.exponent(x)).exp();
    values.push(cdf(times[0]));
    for w in times.windows(2) {
        values.push(cdf(w[1]) - cdf(w[0]));
    }
    values.push(1.0 - cdf(times[times.len() - 1]));
    SpacingSet { values }
}

/// Log product-spacing objective, with tie substitution.
pub fn log_spacing(p: &Params, s: &AdaptiveCensoredSample) -> Result<f64> {
    let value = log_spacing_raw(p.alpha(), p.beta(), s);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation(format!("log spacing is {value} at {p:?}")))
    }
}

fn log_spacing_raw(alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> f64 {
    let times = s.times();
    let m = times.len();
    let z = |x: f64| beta * x.powf(-alpha);

    let z_first = z(times[0]);
    let z_last = z(times[m - 1]);
    let mut value = -z_first + ln_one_minus_exp_neg(z_last);
    for w in times.windows(2) {
        if w[1] == w[0] {
            // D_i = 0: substitute the density contribution at the tie.
            value += alpha.ln() + beta.ln() - (alpha + 1.0) * w[1].ln() - z(w[1]);
        } else {
            let (z_prev, z_cur) = (z(w[0]), z(w[1]));
            value += -z_cur + ln_one_minus_exp_neg(z_prev - z_cur);
        }
    }
    for (&x, &r) in times.iter().zip(s.effective_removals()) {
        if r > 0 {
            value += r as f64 * ln_one_minus_exp_neg(z(x));
        }
    }
    value
}

/// Analytic gradient of the log product-spacing objective.
pub fn mps_score(p: &Params, s: &AdaptiveCensoredSample) -> Result<[f64; 2]> {
    let g = mps_score_raw(p.alpha(), p.beta(), s);
    if g[0].is_finite() && g[1].is_finite() {
        Ok(g)
    } else {
        Err(Error::Evaluation(format!("spacing gradient is nonfinite at {p:?}")))
    }
}

fn mps_score_raw(alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [f64; 2] {
    let times = s.times();
    let m = times.len();
    let tl = |x: f64| {
        let l: f64 = x.ln();
        let t = x.powf(-alpha);
        (t, l)
    };

    let (t1, l1) = tl(times[0]);
    let (tm, lm) = tl(times[m - 1]);
    let (z1, zm) = (beta * t1, beta * tm);
    let wm = inv_expm1(zm);

    let mut da = z1 * l1 - wm * zm * lm;
    let mut db = -t1 + wm * tm;

    for w in times.windows(2) {
        let (t_prev, l_prev) = tl(w[0]);
        let (t_cur, l_cur) = tl(w[1]);
        let (z_prev, z_cur) = (beta * t_prev, beta * t_cur);
        if w[1] == w[0] {
            da += 1.0 / alpha - l_cur + z_cur * l_cur;
            db += 1.0 / beta - t_cur;
        } else {
            // Ratios divided through by exp(-z_cur); delta > 0.
            let delta = z_prev - z_cur;
            let e = (-delta).exp();
            let denom = -(-delta).exp_m1();
            da += (z_cur * l_cur - e * z_prev * l_prev) / denom;
            db += (-t_cur + e * t_prev) / denom;
        }
    }
    for (&x, &r) in times.iter().zip(s.effective_removals()) {
        if r > 0 {
            let (t, l) = tl(x);
            let z = beta * t;
            let w = inv_expm1(z);
            da -= r as f64 * w * z * l;
            db += r as f64 * w * t;
        }
    }
    [da, db]
}

struct SpacingObjective;

impl FitObjective for SpacingObjective {
    fn value(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> f64 {
        log_spacing_raw(alpha, beta, s)
    }
    fn grad(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [f64; 2] {
        mps_score_raw(alpha, beta, s)
    }
    fn hessian(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [[f64; 2]; 2] {
        // Central differences of the analytic gradient.
        let ha = 1e-6 * alpha.max(1e-3);
        let hb = 1e-6 * beta.max(1e-3);
        let ga_p = mps_score_raw(alpha + ha, beta, s);
        let ga_m = mps_score_raw(alpha - ha, beta, s);
        let gb_p = mps_score_raw(alpha, beta + hb, s);
        let gb_m = mps_score_raw(alpha, beta - hb, s);
        let h_aa = (ga_p[0] - ga_m[0]) / (2.0 * ha);
        let h_ba = (ga_p[1] - ga_m[1]) / (2.0 * ha);
        let h_ab = (gb_p[0] - gb_m[0]) / (2.0 * hb);
        let h_bb = (gb_p[1] - gb_m[1]) / (2.0 * hb);
        let off = 0.5 * (h_ab + h_ba);
        [[h_aa, off], [off, h_bb]]
    }
}

/// Maximum product spacing fit, sharing the Newton machinery and stopping
/// rules of the likelihood fit.
pub fn fit_mps(
    s: &AdaptiveCensoredSample,
    init: Option<Params>,
    opts: &FitOptions,
) -> Result<FitReport> {
    fit_objective(s, init, opts, &SpacingObjective)
}
