//! Monte Carlo evaluation campaigns: absolute bias and MSE of the point
//! estimators plus average length and coverage of the interval methods over
//! replicated censored samples.

use crate::bayes::{
    bayes_estimate, proposal_from_mle, run_mh, GammaPriorPair, LossFunction, McmcConfig,
};
use crate::censoring::{generate, scheme, CensoringPlan};
use crate::error::{Error, Result};
use crate::intervals::{aci, boot_p, boot_t, hpd, IntervalEstimate, IntervalMethod};
use crate::mle::{fit_mle, FitOptions};
use crate::models::Params;
use crate::mps::fit_mps;
use crate::numeric::split_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Removal pattern: one of the named kinds or an explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeSpec {
    Kind(u8),
    Explicit(Vec<usize>),
}

impl SchemeSpec {
    pub fn removals(&self, n: usize, m: usize) -> Result<Vec<usize>> {
        match self {
            SchemeSpec::Kind(k) => scheme(*k, n, m),
            SchemeSpec::Explicit(r) => Ok(r.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SchemeSpec::Kind(k) => format!("scheme-{k}"),
            SchemeSpec::Explicit(r) => {
                // Run-length encoding like "0*39,50".
                let mut parts: Vec<String> = Vec::new();
                let mut iter = r.iter().peekable();
                while let Some(&v) = iter.next() {
                    let mut count = 1;
                    while iter.peek() == Some(&&v) {
                        iter.next();
                        count += 1;
                    }
                    parts.push(if count > 1 { format!("{v}*{count}") } else { format!("{v}") });
                }
                parts.join(",")
            }
        }
    }
}

/// One experimental design in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSpec {
    pub n: usize,
    pub m: usize,
    pub threshold: f64,
    pub scheme: SchemeSpec,
}

impl PlanSpec {
    pub fn to_plan(&self) -> Result<CensoringPlan> {
        CensoringPlan::new(self.n, self.m, self.threshold, self.scheme.removals(self.n, self.m)?)
    }
}

/// Which point estimators a campaign evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSet {
    #[serde(default = "default_true")]
    pub mle: bool,
    #[serde(default = "default_true")]
    pub mps: bool,
    /// Posterior mean under squared-error loss.
    #[serde(default = "default_true")]
    pub self_loss: bool,
    /// LINEX asymmetry values, one estimator per entry.
    #[serde(default = "default_pq")]
    pub linex_p: Vec<f64>,
    /// General entropy exponents, one estimator per entry.
    #[serde(default = "default_pq")]
    pub gelf_q: Vec<f64>,
}

fn default_true() -> bool {
    true
}

fn default_pq() -> Vec<f64> {
    vec![-0.25, 0.25]
}

impl Default for EstimatorSet {
    fn default() -> Self {
        Self { mle: true, mps: true, self_loss: true, linex_p: default_pq(), gelf_q: default_pq() }
    }
}

impl EstimatorSet {
    fn needs_chain(&self) -> bool {
        self.self_loss || !self.linex_p.is_empty() || !self.gelf_q.is_empty()
    }

    /// Stable labels in output order.
    fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.mle {
            out.push("MLE".to_string());
        }
        if self.mps {
            out.push("MPS".to_string());
        }
        if self.self_loss {
            out.push("SELF".to_string());
        }
        for p in &self.linex_p {
            out.push(format!("LINEX(p={p})"));
        }
        for q in &self.gelf_q {
            out.push(format!("GELF(q={q})"));
        }
        out
    }
}

/// Full campaign configuration; deterministic given `master_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub truth: Params,
    pub plans: Vec<PlanSpec>,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub estimators: EstimatorSet,
    #[serde(default = "default_intervals")]
    pub interval_methods: Vec<IntervalMethod>,
    #[serde(default = "default_prior")]
    pub prior: GammaPriorPair,
    #[serde(default = "default_chain")]
    pub chain_length: usize,
    /// Burn-in; defaults to 20% of the chain length when absent.
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "default_boot")]
    pub bootstrap_b: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_reps() -> usize {
    2000
}
fn default_intervals() -> Vec<IntervalMethod> {
    vec![IntervalMethod::Aci, IntervalMethod::Hpd]
}
fn default_prior() -> GammaPriorPair {
    GammaPriorPair { a: 3.0, b: 2.0, c: 3.0, d: 4.0 }
}
fn default_chain() -> usize {
    5000
}
fn default_boot() -> usize {
    1000
}
fn default_gamma() -> f64 {
    0.05
}

impl SimulationConfig {
    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.chain_length / 5)
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replications must be >= 1".into()));
        }
        if self.plans.is_empty() {
            return Err(Error::Domain("campaign needs at least one plan".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must be in (0,1), got {}", self.gamma)));
        }
        GammaPriorPair::new(self.prior.a, self.prior.b, self.prior.c, self.prior.d)?;
        Params::new(self.truth.alpha(), self.truth.beta())?;
        if self.burn_in() >= self.chain_length {
            return Err(Error::Domain("burn-in must be below the chain length".into()));
        }
        for p in &self.plans {
            p.to_plan()?;
        }
        Ok(())
    }
}

/// Per-(plan, estimator, parameter) bias and squared-error summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRow {
    pub n: usize,
    pub m: usize,
    pub scheme: String,
    pub threshold: f64,
    pub estimator: String,
    pub ab_alpha: f64,
    pub mse_alpha: f64,
    pub ab_beta: f64,
    pub mse_beta: f64,
}

/// Per-(plan, method, parameter) interval summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub n: usize,
    pub m: usize,
    pub scheme: String,
    pub threshold: f64,
    pub method: String,
    pub length_alpha: f64,
    pub coverage_alpha: f64,
    pub length_beta: f64,
    pub coverage_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub estimator_rows: Vec<EstimatorRow>,
    pub interval_rows: Vec<IntervalRow>,
    /// Replicates dropped because some requested component failed.
    pub failures: usize,
    pub attempted: usize,
}

struct Replicate {
    estimates: Vec<(f64, f64)>,
    intervals: Vec<[IntervalEstimate; 2]>,
}

/// Run the campaign. Replicates run in parallel with counter-derived seeds;
/// failed replicates are excluded from every average and counted.
pub fn run_campaign(cfg: &SimulationConfig) -> Result<SimulationSummary> {
    cfg.validate()?;
    let labels = cfg.estimators.labels();
    let mut estimator_rows = Vec::new();
    let mut interval_rows = Vec::new();
    let mut failures = 0;

    for (plan_idx, plan_spec) in cfg.plans.iter().enumerate() {
        let plan = plan_spec.to_plan()?;
        let plan_seed = split_seed(cfg.master_seed, plan_idx as u64);
        let records: Vec<Option<Replicate>> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| run_replicate(cfg, &plan, split_seed(plan_seed, rep as u64)))
            .collect();

        let kept: Vec<&Replicate> = records.iter().flatten().collect();
        failures += records.len() - kept.len();
        if kept.is_empty() {
            return Err(Error::Evaluation(format!(
                "every replicate failed for plan {}",
                plan_spec.scheme.label()
            )));
        }

        let count = kept.len() as f64;
        let (ta, tb) = (cfg.truth.alpha(), cfg.truth.beta());
        for (ei, label) in labels.iter().enumerate() {
            let mut ab = [0.0f64; 2];
            let mut mse = [0.0f64; 2];
            for r in &kept {
                let (a, b) = r.estimates[ei];
                ab[0] += (a - ta).abs();
                ab[1] += (b - tb).abs();
                mse[0] += (a - ta).powi(2);
                mse[1] += (b - tb).powi(2);
            }
            estimator_rows.push(EstimatorRow {
                n: plan_spec.n,
                m: plan_spec.m,
                scheme: plan_spec.scheme.label(),
                threshold: plan_spec.threshold,
                estimator: label.clone(),
                ab_alpha: ab[0] / count,
                mse_alpha: mse[0] / count,
                ab_beta: ab[1] / count,
                mse_beta: mse[1] / count,
            });
        }
        for (mi, method) in cfg.interval_methods.iter().enumerate() {
            let mut len = [0.0f64; 2];
            let mut cover = [0.0f64; 2];
            for r in &kept {
                let pair = &r.intervals[mi];
                len[0] += pair[0].length();
                len[1] += pair[1].length();
                cover[0] += f64::from(pair[0].contains(ta));
                cover[1] += f64::from(pair[1].contains(tb));
            }
            interval_rows.push(IntervalRow {
                n: plan_spec.n,
                m: plan_spec.m,
                scheme: plan_spec.scheme.label(),
                threshold: plan_spec.threshold,
                method: method.label().to_string(),
                length_alpha: len[0] / count,
                coverage_alpha: cover[0] / count,
                length_beta: len[1] / count,
                coverage_beta: cover[1] / count,
            });
        }
    }

    Ok(SimulationSummary {
        estimator_rows,
        interval_rows,
        failures,
        attempted: cfg.replications * cfg.plans.len(),
    })
}

fn run_replicate(cfg: &SimulationConfig, plan: &CensoringPlan, seed: u64) -> Option<Replicate> {
    let gen_seed = split_seed(seed, 0);
    let mcmc_seed = split_seed(seed, 1);
    let boot_seed = split_seed(seed, 2);
    let opts = FitOptions::default();
    let sample = generate(&cfg.truth, plan, gen_seed);

    let needs_chain =
        cfg.estimators.needs_chain() || cfg.interval_methods.contains(&IntervalMethod::Hpd);
    let needs_fit = cfg.estimators.mle
        || needs_chain
        || !cfg.interval_methods.is_empty();

    let fit = if needs_fit {
        let f = fit_mle(&sample, None, &opts).ok()?;
        if !f.converged {
            return None;
        }
        Some(f)
    } else {
        None
    };

    let chain = if needs_chain {
        let fit = fit.as_ref()?;
        let (sd_a, sd_b) = proposal_from_mle(fit).ok()?;
        let mcmc = McmcConfig {
            chain_length: cfg.chain_length,
            burn_in: cfg.burn_in(),
            proposal_sd_alpha: sd_a,
            proposal_sd_beta: sd_b,
            seed: mcmc_seed,
        };
        Some(run_mh(&sample, &cfg.prior, &mcmc, fit.estimate).ok()?)
    } else {
        None
    };

    let mut estimates = Vec::new();
    if cfg.estimators.mle {
        let p = fit.as_ref()?.estimate;
        estimates.push((p.alpha(), p.beta()));
    }
    if cfg.estimators.mps {
        let f = fit_mps(&sample, None, &opts).ok()?;
        if !f.converged {
            return None;
        }
        estimates.push((f.estimate.alpha(), f.estimate.beta()));
    }
    let burn = cfg.burn_in();
    if cfg.estimators.self_loss {
        let p = bayes_estimate(chain.as_ref()?, LossFunction::SquaredError, burn).ok()?;
        estimates.push((p.alpha(), p.beta()));
    }
    for &pv in &cfg.estimators.linex_p {
        let p = bayes_estimate(chain.as_ref()?, LossFunction::Linex(pv), burn).ok()?;
        estimates.push((p.alpha(), p.beta()));
    }
    for &qv in &cfg.estimators.gelf_q {
        let p = bayes_estimate(chain.as_ref()?, LossFunction::GeneralEntropy(qv), burn).ok()?;
        estimates.push((p.alpha(), p.beta()));
    }

    let mut intervals = Vec::new();
    for method in &cfg.interval_methods {
        let pair = match method {
            IntervalMethod::Aci => aci(fit.as_ref()?, cfg.gamma).ok()?,
            IntervalMethod::BootP => {
                boot_p(&sample, fit.as_ref()?, cfg.bootstrap_b, cfg.gamma, boot_seed).ok()?
            }
            IntervalMethod::BootT => {
                boot_t(&sample, fit.as_ref()?, cfg.bootstrap_b, cfg.gamma, split_seed(boot_seed, 1))
                    .ok()?
            }
            IntervalMethod::Hpd => hpd(chain.as_ref()?, cfg.gamma, burn).ok()?,
        };
        intervals.push(pair);
    }

    Some(Replicate { estimates, intervals })
}

/// Render the estimator summary as comma-separated text, one row per
/// (plan, estimator).
pub fn summary_to_table(summary: &SimulationSummary) -> String {
    let mut out = String::from("n,m,scheme,T,estimator,ab_alpha,mse_alpha,ab_beta,mse_beta\n");
    for r in &summary.estimator_rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.n, r.m, r.scheme, r.threshold, r.estimator, r.ab_alpha, r.mse_alpha, r.ab_beta,
            r.mse_beta
        ));
    }
    out
}

/// Render the interval summary as comma-separated text, one row per
/// (plan, method).
pub fn interval_table(summary: &SimulationSummary) -> String {
    let mut out =
        String::from("n,m,scheme,T,method,length_alpha,coverage_alpha,length_beta,coverage_beta\n");
    for r in &summary.interval_rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.n, r.m, r.scheme, r.threshold, r.method, r.length_alpha, r.coverage_alpha,
            r.length_beta, r.coverage_beta
        ));
    }
    out
}
