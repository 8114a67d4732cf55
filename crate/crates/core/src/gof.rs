//! Goodness-of-fit statistics, information criteria and plot-ready data
//! tables for model comparison on complete data.

use crate::censoring::CensoringPlan;
use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOptions};
use crate::models::Params;
use crate::numeric::split_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fit summary for one model on a complete data set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub neg_loglik: f64,
    pub aic: f64,
    pub bic: f64,
    /// Cramer-von Mises statistic.
    pub cvm: f64,
    /// Anderson-Darling statistic.
    pub ad: f64,
    /// Parametric-bootstrap p-value when computed.
    pub p_value: Option<f64>,
}

/// `AIC = 2k + 2 nll`, `BIC = k ln(n) + 2 nll`.
pub fn information_criteria(neg_loglik: f64, k: usize, n: usize) -> (f64, f64) {
    let aic = 2.0 * k as f64 + 2.0 * neg_loglik;
    let bic = k as f64 * (n as f64).ln() + 2.0 * neg_loglik;
    (aic, bic)
}

const U_CLIP: f64 = 1e-12;

/// Cramer-von Mises and Anderson-Darling statistics of `data` against the
/// supplied distribution function. Probability transforms are clipped away
/// from 0 and 1 to keep the log terms finite.
pub fn cvm_ad<F>(data: &[f64], cdf: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if data.is_empty() {
        return Err(Error::Domain("goodness-of-fit needs nonempty data".into()));
    }
    let n = data.len();
    let mut u: Vec<f64> = data
        .iter()
        .map(|&x| cdf(x).map(|v| v.clamp(U_CLIP, 1.0 - U_CLIP)))
        .collect::<Result<_>>()?;
    u.sort_by(f64::total_cmp);

    let nf = n as f64;
    let mut cvm = 1.0 / (12.0 * nf);
    let mut ad_sum = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        let plotting = (2 * i + 1) as f64 / (2.0 * nf);
        cvm += (ui - plotting).powi(2);
        ad_sum += (2 * i + 1) as f64 * (ui.ln() + (1.0 - u[n - 1 - i]).ln());
    }
    let ad = -nf - ad_sum / nf;
    Ok((cvm, ad))
}

/// Parametric-bootstrap p-value of the Anderson-Darling statistic for the
/// Gumbel type-II fit: regenerate complete samples at the fitted parameters,
/// refit each, and count statistics at least as large as the observed one.
pub fn gof_pvalue(data: &[f64], fitted: &Params, b_count: usize, seed: u64) -> Result<f64> {
    if b_count < 200 {
        return Err(Error::Domain(format!("p-value bootstrap needs B >= 200, got {b_count}")));
    }
    let n = data.len();
    let (_, observed) = cvm_ad(data, |x| fitted.cdf(x))?;
    let opts = FitOptions::default();
    let stats: Vec<Option<f64>> = (0..b_count)
        .into_par_iter()
        .map(|b| {
            let draws = fitted.sample_iid(n, split_seed(seed, b as u64)).ok()?;
            let plan = CensoringPlan::complete(n).ok()?;
            let sample = crate::censoring::censor_real_data(&draws, &plan, 0).ok()?;
            let refit = fit_mle(&sample, Some(*fitted), &opts).ok()?;
            if !refit.converged {
                return None;
            }
            let (_, ad) = cvm_ad(&draws, |x| refit.estimate.cdf(x)).ok()?;
            Some(ad)
        })
        .collect();
    let failed = stats.iter().filter(|s| s.is_none()).count();
    if failed * 10 > b_count {
        return Err(Error::TooManyRefitFailures { failed, total: b_count });
    }
    let kept: Vec<f64> = stats.into_iter().flatten().collect();
    let exceed = kept.iter().filter(|&&ad| ad >= observed).count();
    Ok(exceed as f64 / kept.len() as f64)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EcdfRow {
    pub x: f64,
    pub empirical: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QqRow {
    pub theoretical: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TttRow {
    pub fraction: f64,
    pub scaled_ttt: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Plot-ready tables: empirical vs fitted CDF, QQ pairs, a five-number
/// boxplot summary and the scaled total-time-on-test transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlotData {
    pub ecdf: Vec<EcdfRow>,
    pub qq: Vec<QqRow>,
    pub boxplot: BoxplotSummary,
    pub ttt: Vec<TttRow>,
}

pub fn plot_data(data: &[f64], fitted: &Params) -> Result<PlotData> {
    if data.is_empty() {
        return Err(Error::Domain("plot data needs nonempty input".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;

    let ecdf = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            Ok(EcdfRow { x, empirical: (i + 1) as f64 / nf, fitted: fitted.cdf(x)? })
        })
        .collect::<Result<_>>()?;

    let qq = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            Ok(QqRow { theoretical: fitted.quantile((i as f64 + 0.5) / nf)?, observed: x })
        })
        .collect::<Result<_>>()?;

    let total: f64 = sorted.iter().sum();
    let mut running = 0.0;
    let ttt = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            running += x;
            let numerator = running + (n - i - 1) as f64 * x;
            TttRow { fraction: (i + 1) as f64 / nf, scaled_ttt: numerator / total }
        })
        .collect();

    let boxplot = BoxplotSummary {
        min: sorted[0],
        q1: quantile_type7(&sorted, 0.25),
        median: quantile_type7(&sorted, 0.5),
        q3: quantile_type7(&sorted, 0.75),
        max: sorted[n - 1],
        mean: total / nf,
    };

    Ok(PlotData { ecdf, qq, boxplot, ttt })
}

/// Linear-interpolation sample quantile on sorted data.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
