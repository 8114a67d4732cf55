//! Log-likelihood, score, observed information and Newton-Raphson maximum
//! likelihood estimation under adaptive type-II progressive hybrid censoring.
//!
//! With `t_i = x_i^(-alpha)` and effective removals `R_i`, the proportional
//! log-likelihood is
//!
//! ```text
//! l = m ln(alpha) + m ln(beta) - (alpha+1) sum ln(x_i) - beta sum t_i
//!     + sum R_i ln(1 - exp(-beta t_i))
//! ```
//!
//! which covers the not-adapted, adapted and complete cases uniformly because
//! the effective removal vector already encodes the change point.

use crate::censoring::AdaptiveCensoredSample;
use crate::error::{Error, Result};
use crate::models::Params;
use crate::numeric::{inv_expm1, ln_one_minus_exp_neg};
use crate::optim::{maximize2, MaximizeOptions, MaximizeOutcome};
use serde::{Deserialize, Serialize};

/// Result of a likelihood or product-spacing fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub estimate: Params,
    /// Value of the maximized objective (log-likelihood for MLE fits,
    /// log product spacing for MPS fits).
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Negative Hessian of the objective at the estimate, in (alpha, beta)
    /// coordinates.
    pub observed_info: [[f64; 2]; 2],
}

impl FitReport {
    /// Standard errors from the inverse observed information diagonal.
    pub fn standard_errors(&self) -> Result<(f64, f64)> {
        let inv = crate::numeric::invert_sym2(self.observed_info)
            .ok_or(Error::SingularInformation)?;
        if inv[0][0] <= 0.0 || inv[1][1] <= 0.0 {
            return Err(Error::SingularInformation);
        }
        Ok((inv[0][0].sqrt(), inv[1][1].sqrt()))
    }
}

/// Stopping rules for the Newton iteration.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Sup-norm tolerance on the (alpha, beta)-space score at the estimate.
    pub score_tol: f64,
    /// Sup-norm tolerance on the final Newton step in log coordinates.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { score_tol: 1e-8, step_tol: 1e-10, max_iter: 200 }
    }
}

/// Proportional log-likelihood at `p`.
pub fn loglik(p: &Params, s: &AdaptiveCensoredSample) -> Result<f64> {
    let value = loglik_raw(p.alpha(), p.beta(), s);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation(format!("log-likelihood is {value} at {p:?}")))
    }
}

pub(crate) fn loglik_raw(alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> f64 {
    let m = s.m() as f64;
    let mut value = m * alpha.ln() + m * beta.ln();
    for (&x, &r) in s.times().iter().zip(s.effective_removals()) {
        let t = x.powf(-alpha);
        let z = beta * t;
        value -= (alpha + 1.0) * x.ln() + z;
        if r > 0 {
            value += r as f64 * ln_one_minus_exp_neg(z);
        }
    }
    value
}

/// Score vector `(dl/dalpha, dl/dbeta)`.
pub fn score(p: &Params, s: &AdaptiveCensoredSample) -> Result<[f64; 2]> {
    let g = score_raw(p.alpha(), p.beta(), s);
    if g[0].is_finite() && g[1].is_finite() {
        Ok(g)
    } else {
        Err(Error::Evaluation(format!("score is nonfinite at {p:?}")))
    }
}

pub(crate) fn score_raw(alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [f64; 2] {
    let m = s.m() as f64;
    let mut da = m / alpha;
    let mut db = m / beta;
    for (&x, &r) in s.times().iter().zip(s.effective_removals()) {
        let l = x.ln();
        let t = x.powf(-alpha);
        let z = beta * t;
        da += -l + beta * t * l;
        db -= t;
        if r > 0 {
            let w = inv_expm1(z); // e^{-z} / (1 - e^{-z})
            da -= r as f64 * z * l * w;
            db += r as f64 * t * w;
        }
    }
    [da, db]
}

/// Negative Hessian of the log-likelihood at `p` (the observed Fisher
/// information when `p` is the MLE).
pub fn observed_information(p: &Params, s: &AdaptiveCensoredSample) -> Result<[[f64; 2]; 2]> {
    let h = hessian_raw(p.alpha(), p.beta(), s);
    if h.iter().flatten().all(|v| v.is_finite()) {
        Ok([[-h[0][0], -h[0][1]], [-h[1][0], -h[1][1]]])
    } else {
        Err(Error::Evaluation(format!("Hessian is nonfinite at {p:?}")))
    }
}

fn hessian_raw(alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [[f64; 2]; 2] {
    let m = s.m() as f64;
    let mut h_aa = -m / (alpha * alpha);
    let mut h_bb = -m / (beta * beta);
    let mut h_ab = 0.0;
    for (&x, &r) in s.times().iter().zip(s.effective_removals()) {
        let l = x.ln();
        let t = x.powf(-alpha);
        let z = beta * t;
        h_aa -= beta * t * l * l;
        h_ab += t * l;
        if r > 0 {
            let rf = r as f64;
            let w = inv_expm1(z);
            // d/dz [z g'(z)] and friends reduce to w (1 - z (1 + w)).
            let c = w * (1.0 - z * (1.0 + w));
            h_aa += rf * l * l * z * c;
            h_ab -= rf * l * t * c;
            h_bb -= rf * t * t * w * (1.0 + w);
        }
    }
    [[h_aa, h_ab], [h_ab, h_bb]]
}

/// Maximum likelihood fit. Multi-starts over a small shape grid when the
/// default start does not converge.
pub fn fit_mle(
    s: &AdaptiveCensoredSample,
    init: Option<Params>,
    opts: &FitOptions,
) -> Result<FitReport> {
    fit_objective(s, init, opts, &LikelihoodObjective)
}

/// Profile of the log-likelihood along each parameter axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfilePoint {
    /// The profiled parameter value.
    pub value: f64,
    /// The inner maximizer of the other parameter.
    pub partner: f64,
    pub loglik: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileTable {
    pub alpha: Vec<ProfilePoint>,
    pub beta: Vec<ProfilePoint>,
}

/// For each grid value of one parameter, maximize the log-likelihood over
/// the other one. Inner failures are flagged per point rather than aborting
/// the table.
pub fn profile_loglik(
    s: &AdaptiveCensoredSample,
    alpha_grid: &[f64],
    beta_grid: &[f64],
) -> Result<ProfileTable> {
    if alpha_grid.is_empty() || beta_grid.is_empty() {
        return Err(Error::Domain("profile grids must be nonempty".into()));
    }
    if alpha_grid.iter().chain(beta_grid).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("profile grids must contain positive values".into()));
    }
    let alpha = alpha_grid
        .iter()
        .map(|&a| {
            let (beta, converged) = maximize_beta_given_alpha(s, a);
            ProfilePoint { value: a, partner: beta, loglik: loglik_raw(a, beta, s), converged }
        })
        .collect();
    let beta = beta_grid
        .iter()
        .map(|&b| {
            let (a, converged) = maximize_alpha_given_beta(s, b);
            ProfilePoint { value: b, partner: a, loglik: loglik_raw(a, b, s), converged }
        })
        .collect();
    Ok(ProfileTable { alpha, beta })
}

/// Closed-form-seeded Newton for the strictly concave beta direction.
pub(crate) fn maximize_beta_given_alpha(s: &AdaptiveCensoredSample, alpha: f64) -> (f64, bool) {
    let mut beta = closed_form_beta(s, alpha);
    for _ in 0..200 {
        let g = score_raw(alpha, beta, s)[1];
        if g.abs() < 1e-11 * (1.0 + (s.m() as f64 / beta).abs()) {
            return (beta, true);
        }
        let h = hessian_raw(alpha, beta, s)[1][1];
        let mut step = if h < 0.0 { -g / h } else { g.signum() * 0.1 * beta };
        let old = loglik_raw(alpha, beta, s);
        for _ in 0..60 {
            let cand = beta + step;
            if cand > 0.0 && loglik_raw(alpha, cand, s) > old {
                beta = cand;
                break;
            }
            step *= 0.5;
            if step.abs() < 1e-16 * beta {
                return (beta, g.abs() < 1e-7);
            }
        }
    }
    let g = score_raw(alpha, beta, s)[1];
    (beta, g.abs() < 1e-7)
}

fn maximize_alpha_given_beta(s: &AdaptiveCensoredSample, beta: f64) -> (f64, bool) {
    let mut best: Option<(f64, f64, bool)> = None;
    for a0 in [1.0, 0.5, 2.0, 4.0] {
        let mut a = a0;
        let mut ok = false;
        for _ in 0..200 {
            let g = score_raw(a, beta, s)[0];
            if g.abs() < 1e-10 * (1.0 + (s.m() as f64 / a).abs()) {
                ok = true;
                break;
            }
            let h = hessian_raw(a, beta, s)[0][0];
            let mut step = if h < 0.0 { -g / h } else { g.signum() * 0.2 * a };
            let old = loglik_raw(a, beta, s);
            let mut moved = false;
            for _ in 0..60 {
                let cand = a + step;
                if cand > 0.0 && loglik_raw(cand, beta, s) > old {
                    a = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                ok = score_raw(a, beta, s)[0].abs() < 1e-7;
                break;
            }
        }
        let ll = loglik_raw(a, beta, s);
        if best.as_ref().is_none_or(|b| ll > b.1) {
            best = Some((a, ll, ok));
        }
        if ok && a0 == 1.0 {
            break;
        }
    }
    let (a, _, ok) = best.unwrap();
    (a, ok)
}

/// `m / sum(x_i^(-alpha))`: the exact beta maximizer on complete data and a
/// serviceable start elsewhere.
pub fn closed_form_beta(s: &AdaptiveCensoredSample, alpha: f64) -> f64 {
    let sum_t: f64 = s.times().iter().map(|x| x.powf(-alpha)).sum();
    s.m() as f64 / sum_t
}

// ---------------------------------------------------------------------------
// Shared fitting driver (used by both likelihood and product-spacing fits).
// ---------------------------------------------------------------------------

pub(crate) trait FitObjective {
    fn value(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> f64;
    fn grad(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [f64; 2];
    /// Hessian in (alpha, beta) coordinates.
    fn hessian(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [[f64; 2]; 2];
}

struct LikelihoodObjective;

impl FitObjective for LikelihoodObjective {
    fn value(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> f64 {
        loglik_raw(alpha, beta, s)
    }
    fn grad(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [f64; 2] {
        score_raw(alpha, beta, s)
    }
    fn hessian(&self, alpha: f64, beta: f64, s: &AdaptiveCensoredSample) -> [[f64; 2]; 2] {
        hessian_raw(alpha, beta, s)
    }
}

pub(crate) fn fit_objective(
    s: &AdaptiveCensoredSample,
    init: Option<Params>,
    opts: &FitOptions,
    obj: &dyn FitObjective,
) -> Result<FitReport> {
    let mut starts: Vec<(f64, f64)> = Vec::new();
    if let Some(p) = init {
        starts.push((p.alpha(), p.beta()));
    }
    for a0 in [1.0, 0.5, 2.0, 4.0] {
        starts.push((a0, closed_form_beta(s, a0).max(1e-8)));
    }

    let mut best: Option<(FitReport, f64)> = None;
    for (a0, b0) in starts {
        let outcome = run_newton(s, obj, [a0.ln(), b0.ln()], opts);
        let report = finalize(s, obj, &outcome, opts);
        match report {
            Some(r) => {
                let better = best.as_ref().is_none_or(|(cur, val)| {
                    (r.converged && !cur.converged) || (r.converged == cur.converged && r.loglik > *val)
                });
                if better {
                    let val = r.loglik;
                    let done = r.converged;
                    best = Some((r, val));
                    if done {
                        break;
                    }
                }
            }
            None => continue,
        }
    }
    best.map(|(r, _)| r)
        .ok_or_else(|| Error::Evaluation("objective not evaluable from any start".into()))
}

fn run_newton(
    s: &AdaptiveCensoredSample,
    obj: &dyn FitObjective,
    z0: [f64; 2],
    opts: &FitOptions,
) -> MaximizeOutcome {
    let f = |z: [f64; 2]| obj.value(z[0].exp(), z[1].exp(), s);
    let grad = |z: [f64; 2]| {
        let (a, b) = (z[0].exp(), z[1].exp());
        let g = obj.grad(a, b, s);
        [a * g[0], b * g[1]]
    };
    let hess = |z: [f64; 2]| {
        let (a, b) = (z[0].exp(), z[1].exp());
        let g = obj.grad(a, b, s);
        let h = obj.hessian(a, b, s);
        [
            [a * a * h[0][0] + a * g[0], a * b * h[0][1]],
            [a * b * h[1][0], b * b * h[1][1] + b * g[1]],
        ]
    };
    let mopts = MaximizeOptions {
        grad_tol: (opts.score_tol * 1e-3).max(1e-13),
        step_tol: opts.step_tol,
        max_iter: opts.max_iter,
        max_halvings: 30,
    };
    maximize2(f, grad, hess, z0, &mopts)
}

fn finalize(
    s: &AdaptiveCensoredSample,
    obj: &dyn FitObjective,
    out: &MaximizeOutcome,
    opts: &FitOptions,
) -> Option<FitReport> {
    if !out.value.is_finite() {
        return None;
    }
    let (a, b) = (out.z[0].exp(), out.z[1].exp());
    let estimate = Params::new(a, b).ok()?;
    let g = obj.grad(a, b, s);
    let h = obj.hessian(a, b, s);
    let observed_info = [[-h[0][0], -h[0][1]], [-h[1][0], -h[1][1]]];
    let score_ok = g[0].is_finite() && g[1].is_finite() && g[0].abs().max(g[1].abs()) < opts.score_tol;
    let pd = observed_info[0][0] > 0.0
        && observed_info[0][0] * observed_info[1][1] - observed_info[0][1] * observed_info[1][0] > 0.0;
    Some(FitReport {
        estimate,
        loglik: out.value,
        iterations: out.iterations,
        converged: score_ok && pd,
        observed_info,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censoring::{generate, scheme, CensoringPlan};
    use approx::assert_relative_eq;

    fn gt2(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    fn sim(n: usize, m: usize, t: f64, kind: u8, seed: u64) -> AdaptiveCensoredSample {
        let plan = CensoringPlan::new(n, m, t, scheme(kind, n, m).unwrap()).unwrap();
        generate(&gt2(1.5, 0.75), &plan, seed)
    }

    #[test]
    fn single_point_loglik() {
        let plan = CensoringPlan::complete(1).unwrap();
        let s = AdaptiveCensoredSample::new(vec![1.0], plan).unwrap();
        assert_relative_eq!(loglik(&gt2(1.0, 1.0), &s).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn complete_sample_loglik_is_sum_of_log_densities() {
        let p = gt2(1.7, 0.6);
        let plan = CensoringPlan::complete(25).unwrap();
        let s = generate(&p, &plan, 5);
        let direct: f64 = s.times().iter().map(|&x| p.pdf(x).unwrap().ln()).sum();
        assert_relative_eq!(loglik(&p, &s).unwrap(), direct, max_relative = 1e-12);
    }

    #[test]
    fn loglik_depends_only_on_effective_removals() {
        // With the threshold below the first failure, any plan collapses to
        // all removals at the final failure.
        let times = vec![0.9, 1.4, 2.2, 3.0];
        let p1 = CensoringPlan::new(10, 4, 0.5, vec![6, 0, 0, 0]).unwrap();
        let p2 = CensoringPlan::new(10, 4, 0.5, vec![0, 3, 3, 0]).unwrap();
        let s1 = AdaptiveCensoredSample::new(times.clone(), p1).unwrap();
        let s2 = AdaptiveCensoredSample::new(times, p2).unwrap();
        assert_eq!(s1.effective_removals(), s2.effective_removals());
        let p = gt2(1.5, 0.75);
        assert_eq!(loglik(&p, &s1).unwrap(), loglik(&p, &s2).unwrap());
        let f1 = fit_mle(&s1, None, &FitOptions::default()).unwrap();
        let f2 = fit_mle(&s2, None, &FitOptions::default()).unwrap();
        assert_eq!(f1.estimate, f2.estimate);
    }

    #[test]
    fn score_matches_finite_differences() {
        for seed in 0..20 {
            let s = if seed % 2 == 0 {
                sim(20, 8, 0.5, 2, seed) // low threshold: adapted cases
            } else {
                sim(30, 12, 1.5, 3, seed)
            };
            let (a, b) = (0.8 + 0.09 * seed as f64, 0.4 + 0.06 * seed as f64);
            let g = score(&gt2(a, b), &s).unwrap();
            let (ha, hb) = (1e-6 * a, 1e-6 * b);
            let fd_a = (loglik(&gt2(a + ha, b), &s).unwrap()
                - loglik(&gt2(a - ha, b), &s).unwrap())
                / (2.0 * ha);
            let fd_b = (loglik(&gt2(a, b + hb), &s).unwrap()
                - loglik(&gt2(a, b - hb), &s).unwrap())
                / (2.0 * hb);
            assert_relative_eq!(g[0], fd_a, max_relative = 1e-6, epsilon = 1e-7);
            assert_relative_eq!(g[1], fd_b, max_relative = 1e-6, epsilon = 1e-7);
        }
    }

    #[test]
    fn beta_score_root_is_closed_form_on_complete_data() {
        let s = generate(&gt2(1.5, 0.75), &CensoringPlan::complete(40).unwrap(), 9);
        let alpha = 1.23;
        let beta = closed_form_beta(&s, alpha);
        assert!(score(&gt2(alpha, beta), &s).unwrap()[1].abs() < 1e-10);
        let (b_opt, ok) = maximize_beta_given_alpha(&s, alpha);
        assert!(ok);
        assert_relative_eq!(b_opt, beta, max_relative = 1e-10);
    }

    #[test]
    fn observed_information_matches_score_differences() {
        for seed in 0..10 {
            let s = sim(25, 10, 1.2, 1, seed);
            let (a, b) = (1.1 + 0.1 * seed as f64, 0.5 + 0.07 * seed as f64);
            let info = observed_information(&gt2(a, b), &s).unwrap();
            assert_eq!(info[0][1], info[1][0]);
            let (ha, hb) = (1e-5 * a, 1e-5 * b);
            let fd_aa = -(score(&gt2(a + ha, b), &s).unwrap()[0]
                - score(&gt2(a - ha, b), &s).unwrap()[0])
                / (2.0 * ha);
            let fd_ab = -(score(&gt2(a, b + hb), &s).unwrap()[0]
                - score(&gt2(a, b - hb), &s).unwrap()[0])
                / (2.0 * hb);
            let fd_bb = -(score(&gt2(a, b + hb), &s).unwrap()[1]
                - score(&gt2(a, b - hb), &s).unwrap()[1])
                / (2.0 * hb);
            assert_relative_eq!(info[0][0], fd_aa, max_relative = 1e-5, epsilon = 1e-6);
            assert_relative_eq!(info[0][1], fd_ab, max_relative = 1e-5, epsilon = 1e-6);
            assert_relative_eq!(info[1][1], fd_bb, max_relative = 1e-5, epsilon = 1e-6);
        }
    }

    #[test]
    fn fit_satisfies_score_and_local_maximality() {
        let s = sim(30, 15, 1.5, 1, 321);
        let fit = fit_mle(&s, None, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        let g = score(&fit.estimate, &s).unwrap();
        assert!(g[0].abs() < 1e-8 && g[1].abs() < 1e-8);
        assert!(fit.estimate.alpha() > 0.0 && fit.estimate.beta() > 0.0);

        let best = fit.loglik;
        let mut state = 42u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let a = fit.estimate.alpha() * (1.0 + 0.01 * (2.0 * next() - 1.0));
            let b = fit.estimate.beta() * (1.0 + 0.01 * (2.0 * next() - 1.0));
            assert!(loglik(&gt2(a, b), &s).unwrap() <= best + 1e-10);
        }
    }

    #[test]
    fn fit_with_explicit_init_converges_to_same_point() {
        let s = sim(30, 15, 1.5, 2, 5150);
        let opts = FitOptions::default();
        let f1 = fit_mle(&s, None, &opts).unwrap();
        let f2 = fit_mle(&s, Some(gt2(3.0, 0.2)), &opts).unwrap();
        assert!(f1.converged && f2.converged);
        assert_relative_eq!(f1.estimate.alpha(), f2.estimate.alpha(), max_relative = 1e-6);
        assert_relative_eq!(f1.estimate.beta(), f2.estimate.beta(), max_relative = 1e-6);
    }

    #[test]
    fn profile_matches_full_maximum_at_the_mle() {
        let s = sim(30, 15, 1.5, 1, 8);
        let fit = fit_mle(&s, None, &FitOptions::default()).unwrap();
        let table = profile_loglik(
            &s,
            &[fit.estimate.alpha() * 0.8, fit.estimate.alpha(), fit.estimate.alpha() * 1.2],
            &[fit.estimate.beta()],
        )
        .unwrap();
        // At the MLE's alpha, the profiled value equals the joint maximum.
        assert_relative_eq!(table.alpha[1].loglik, fit.loglik, epsilon = 1e-8);
        assert!(table.alpha[1].loglik >= table.alpha[0].loglik);
        assert!(table.alpha[1].loglik >= table.alpha[2].loglik);
        // Each inner maximizer zeroes the beta score.
        for point in &table.alpha {
            assert!(point.converged);
            let g = score(&gt2(point.value, point.partner), &s).unwrap();
            assert!(g[1].abs() < 1e-6, "inner beta score {}", g[1]);
        }
        assert!(profile_loglik(&s, &[], &[1.0]).is_err());
        assert!(profile_loglik(&s, &[1.0], &[-1.0]).is_err());
    }

    #[test]
    fn loglik_rejects_degenerate_evaluations() {
        let s = sim(10, 5, 1.0, 1, 0);
        // Absurd shape overflows x^(-alpha) for x < 1 and must error, not NaN.
        let huge = gt2(1e270, 1.0);
        assert!(loglik(&huge, &s).is_err() || loglik(&huge, &s).unwrap().is_finite());
    }
}
