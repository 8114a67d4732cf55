//! Asymptotic, percentile-bootstrap, bootstrap-t and HPD interval
//! construction for the two parameters.

use crate::bayes::PosteriorChain;
use crate::censoring::{generate, AdaptiveCensoredSample};
use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOptions, FitReport};
use crate::numeric::{inv_normal_cdf, split_seed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which construction produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalMethod {
    Aci,
    BootP,
    BootT,
    Hpd,
}

impl IntervalMethod {
    pub fn label(&self) -> &'static str {
        match self {
            IntervalMethod::Aci => "ACI",
            IntervalMethod::BootP => "boot-p",
            IntervalMethod::BootT => "boot-t",
            IntervalMethod::Hpd => "HPD",
        }
    }
}

/// A two-sided interval at confidence level `level`. For positive parameters
/// a negative lower endpoint is clamped to zero and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub clamped: bool,
}

impl IntervalEstimate {
    fn new(lower: f64, upper: f64, gamma: f64, method: IntervalMethod) -> Self {
        let clamped = lower < 0.0;
        Self { lower: lower.max(0.0), upper, level: 1.0 - gamma, method, clamped }
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    #[inline]
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must be in (0,1), got {gamma}")));
    }
    Ok(())
}

/// Asymptotic normal intervals `estimate +- z_{gamma/2} * se` from the
/// inverse observed information. Returns the (alpha, beta) pair.
pub fn aci(fit: &FitReport, gamma: f64) -> Result<[IntervalEstimate; 2]> {
    check_gamma(gamma)?;
    let (se_a, se_b) = fit.standard_errors()?;
    let z = inv_normal_cdf(1.0 - gamma / 2.0);
    let a = fit.estimate.alpha();
    let b = fit.estimate.beta();
    Ok([
        IntervalEstimate::new(a - z * se_a, a + z * se_a, gamma, IntervalMethod::Aci),
        IntervalEstimate::new(b - z * se_b, b + z * se_b, gamma, IntervalMethod::Aci),
    ])
}

/// Endpoints at the order statistics of ranks `ceil(B gamma/2)` and
/// `ceil(B (1-gamma/2))` of an ascending-sorted resample distribution.
pub fn percentile_interval(sorted: &[f64], gamma: f64) -> (f64, f64) {
    let b = sorted.len();
    (sorted[percentile_rank(b, gamma / 2.0) - 1], sorted[percentile_rank(b, 1.0 - gamma / 2.0) - 1])
}

/// 1-based rank `ceil(B q)` clamped into `[1, B]`.
pub fn percentile_rank(b: usize, q: f64) -> usize {
    ((b as f64 * q).ceil() as usize).clamp(1, b)
}

/// Studentized inversion `[est - t_hi se, est - t_lo se]` from sorted
/// studentized statistics.
pub fn studentized_interval(estimate: f64, se: f64, sorted_t: &[f64], gamma: f64) -> (f64, f64) {
    let b = sorted_t.len();
    let t_lo = sorted_t[percentile_rank(b, gamma / 2.0) - 1];
    let t_hi = sorted_t[percentile_rank(b, 1.0 - gamma / 2.0) - 1];
    (estimate - t_hi * se, estimate - t_lo * se)
}

struct BootDraws {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    t_alpha: Vec<f64>,
    t_beta: Vec<f64>,
}

fn bootstrap_draws(
    s: &AdaptiveCensoredSample,
    fit: &FitReport,
    b_count: usize,
    seed: u64,
) -> Result<BootDraws> {
    if b_count < 100 {
        return Err(Error::Domain(format!("bootstrap needs B >= 100, got {b_count}")));
    }
    let opts = FitOptions::default();
    let center = fit.estimate;
    let results: Vec<Option<(f64, f64, f64, f64)>> = (0..b_count)
        .into_par_iter()
        .map(|b| {
            let resample = generate(&center, s.plan(), split_seed(seed, b as u64));
            let refit = fit_mle(&resample, Some(center), &opts).ok()?;
            if !refit.converged {
                return None;
            }
            let (se_a, se_b) = refit.standard_errors().ok()?;
            Some((
                refit.estimate.alpha(),
                refit.estimate.beta(),
                (refit.estimate.alpha() - center.alpha()) / se_a,
                (refit.estimate.beta() - center.beta()) / se_b,
            ))
        })
        .collect();

    let failed = results.iter().filter(|r| r.is_none()).count();
    if failed * 10 > b_count {
        return Err(Error::TooManyRefitFailures { failed, total: b_count });
    }
    let mut draws = BootDraws {
        alphas: Vec::new(),
        betas: Vec::new(),
        t_alpha: Vec::new(),
        t_beta: Vec::new(),
    };
    for r in results.into_iter().flatten() {
        draws.alphas.push(r.0);
        draws.betas.push(r.1);
        draws.t_alpha.push(r.2);
        draws.t_beta.push(r.3);
    }
    draws.alphas.sort_by(f64::total_cmp);
    draws.betas.sort_by(f64::total_cmp);
    draws.t_alpha.sort_by(f64::total_cmp);
    draws.t_beta.sort_by(f64::total_cmp);
    Ok(draws)
}

/// Percentile bootstrap: regenerate samples under the same plan at the
/// fitted parameters, refit each, and read off order statistics.
pub fn boot_p(
    s: &AdaptiveCensoredSample,
    fit: &FitReport,
    b_count: usize,
    gamma: f64,
    seed: u64,
) -> Result<[IntervalEstimate; 2]> {
    check_gamma(gamma)?;
    let draws = bootstrap_draws(s, fit, b_count, seed)?;
    let (alo, ahi) = percentile_interval(&draws.alphas, gamma);
    let (blo, bhi) = percentile_interval(&draws.betas, gamma);
    Ok([
        IntervalEstimate::new(alo, ahi, gamma, IntervalMethod::BootP),
        IntervalEstimate::new(blo, bhi, gamma, IntervalMethod::BootP),
    ])
}

/// Studentized bootstrap interval on the parameter scale.
pub fn boot_t(
    s: &AdaptiveCensoredSample,
    fit: &FitReport,
    b_count: usize,
    gamma: f64,
    seed: u64,
) -> Result<[IntervalEstimate; 2]> {
    check_gamma(gamma)?;
    let (se_a, se_b) = fit.standard_errors()?;
    let draws = bootstrap_draws(s, fit, b_count, seed)?;
    let (alo, ahi) = studentized_interval(fit.estimate.alpha(), se_a, &draws.t_alpha, gamma);
    let (blo, bhi) = studentized_interval(fit.estimate.beta(), se_b, &draws.t_beta, gamma);
    Ok([
        IntervalEstimate::new(alo, ahi, gamma, IntervalMethod::BootT),
        IntervalEstimate::new(blo, bhi, gamma, IntervalMethod::BootT),
    ])
}

/// Raw quantiles of the studentized statistics themselves (the display the
/// source procedure prints). Not on the parameter scale; kept for table
/// comparison only.
pub fn boot_t_raw(
    s: &AdaptiveCensoredSample,
    fit: &FitReport,
    b_count: usize,
    gamma: f64,
    seed: u64,
) -> Result<[(f64, f64); 2]> {
    check_gamma(gamma)?;
    let draws = bootstrap_draws(s, fit, b_count, seed)?;
    Ok([
        percentile_interval(&draws.t_alpha, gamma),
        percentile_interval(&draws.t_beta, gamma),
    ])
}

/// Shortest-window HPD interval over sorted draws: among starting ranks
/// `k = 1..floor(gamma M)` pick the window of `floor((1-gamma) M)` spacings
/// with minimal width, smallest `k` winning ties.
pub fn hpd_interval(sorted: &[f64], gamma: f64) -> (f64, f64) {
    let m = sorted.len();
    let window = ((1.0 - gamma) * m as f64).floor() as usize;
    let k_max = ((gamma * m as f64).floor() as usize).max(1);
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..k_max {
        if k + window >= m {
            break;
        }
        let width = sorted[k + window] - sorted[k];
        if width < best.0 {
            best = (width, k);
        }
    }
    (sorted[best.1], sorted[(best.1 + window).min(m - 1)])
}

/// HPD credible intervals for both parameters from the post-burn-in chain.
pub fn hpd(
    chain: &PosteriorChain,
    gamma: f64,
    burn_in: usize,
) -> Result<[IntervalEstimate; 2]> {
    check_gamma(gamma)?;
    if chain.len() < burn_in + 100 {
        return Err(Error::ChainTooShort { need: burn_in + 100, have: chain.len() });
    }
    let mut alphas = chain.alphas()[burn_in..].to_vec();
    let mut betas = chain.betas()[burn_in..].to_vec();
    alphas.sort_by(f64::total_cmp);
    betas.sort_by(f64::total_cmp);
    let (alo, ahi) = hpd_interval(&alphas, gamma);
    let (blo, bhi) = hpd_interval(&betas, gamma);
    Ok([
        IntervalEstimate::new(alo, ahi, gamma, IntervalMethod::Hpd),
        IntervalEstimate::new(blo, bhi, gamma, IntervalMethod::Hpd),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Params;
    use approx::assert_relative_eq;

    fn report(alpha: f64, beta: f64, info: [[f64; 2]; 2]) -> FitReport {
        FitReport {
            estimate: Params::new(alpha, beta).unwrap(),
            loglik: 0.0,
            iterations: 1,
            converged: true,
            observed_info: info,
        }
    }

    #[test]
    fn aci_arithmetic() {
        // se(alpha) = 0.5, se(beta) = 1.0
        let fit = report(2.0, 5.0, [[4.0, 0.0], [0.0, 1.0]]);
        let [ia, ib] = aci(&fit, 0.05).unwrap();
        assert_relative_eq!(ia.lower, 2.0 - 1.959_963_984_540_054 * 0.5, epsilon = 1e-6);
        assert_relative_eq!(ia.upper, 2.979_982, epsilon = 1e-6);
        assert_relative_eq!(ia.lower, 1.020_018, epsilon = 1e-6);
        assert!(!ia.clamped);
        assert!(ib.contains(5.0));
        assert!(aci(&fit, 0.0).is_err());
        assert!(aci(&fit, 1.0).is_err());
    }

    #[test]
    fn aci_degenerate_and_clamped() {
        // Huge information => zero-width interval at the estimate.
        let fit = report(2.0, 5.0, [[1e30, 0.0], [0.0, 1e30]]);
        let [ia, _] = aci(&fit, 0.05).unwrap();
        assert!(ia.length() < 1e-9);
        assert!(ia.contains(2.0));

        // Tiny information => lower endpoint clamps at zero.
        let fit = report(0.5, 5.0, [[0.01, 0.0], [0.0, 1.0]]);
        let [ia, _] = aci(&fit, 0.05).unwrap();
        assert_eq!(ia.lower, 0.0);
        assert!(ia.clamped);

        let fit = report(1.0, 1.0, [[1.0, 1.0], [1.0, 1.0]]);
        assert!(aci(&fit, 0.05).is_err());
    }

    #[test]
    fn percentile_ranks() {
        assert_eq!(percentile_rank(1000, 0.025), 25);
        assert_eq!(percentile_rank(1000, 0.975), 975);
        assert_eq!(percentile_rank(100, 1e-9), 1);
        assert_eq!(percentile_rank(100, 0.999999), 100);

        let sorted: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        let (lo, hi) = percentile_interval(&sorted, 0.05);
        assert_eq!((lo, hi), (25.0, 975.0));

        // Degenerate resample distribution gives a zero-width interval.
        let flat = vec![3.2; 500];
        let (lo, hi) = percentile_interval(&flat, 0.05);
        assert_eq!((lo, hi), (3.2, 3.2));
    }

    #[test]
    fn studentized_stub_cases() {
        // Symmetric t distribution => interval symmetric around the estimate.
        let t: Vec<f64> = (-500..=500).map(|i| i as f64 / 100.0).collect();
        let (lo, hi) = studentized_interval(2.0, 0.5, &t, 0.05);
        assert_relative_eq!((2.0 - lo) - (hi - 2.0), 0.0, epsilon = 0.02);
        // All statistics zero => point interval at the estimate.
        let zeros = vec![0.0; 300];
        let (lo, hi) = studentized_interval(2.0, 0.5, &zeros, 0.05);
        assert_eq!((lo, hi), (2.0, 2.0));
    }

    #[test]
    fn hpd_tie_break_and_optimality() {
        let sorted: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        // Uniform spacing: every window ties; the smallest k wins -> (1, 96).
        assert_eq!(hpd_interval(&sorted, 0.05), (1.0, 96.0));

        // A peaked chain: HPD no wider than the equal-tailed interval.
        let mut peaked: Vec<f64> = (0..2000)
            .map(|i| {
                let u = (i as f64 + 0.5) / 2000.0;
                // quantile of a right-skewed distribution
                -(1.0 - u).ln() * (1.0 + u)
            })
            .collect();
        peaked.sort_by(f64::total_cmp);
        let (lo, hi) = hpd_interval(&peaked, 0.05);
        let (eq_lo, eq_hi) = percentile_interval(&peaked, 0.05);
        assert!(hi - lo <= eq_hi - eq_lo + 1e-12);
    }

    #[test]
    fn hpd_requires_enough_draws() {
        let chain = crate::bayes::mh_sample(
            |_, _| 0.0,
            &crate::bayes::McmcConfig {
                chain_length: 150,
                burn_in: 0,
                proposal_sd_alpha: 0.5,
                proposal_sd_beta: 0.5,
                seed: 1,
            },
            (5.0, 5.0),
        );
        assert!(hpd(&chain, 0.05, 100).is_err());
        assert!(hpd(&chain, 0.05, 10).is_ok());
    }
}
