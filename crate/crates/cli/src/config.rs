//! Resolution of the effective run configuration: defaults, then the TOML
//! config file, then command-line flags.

use crate::{CliError, RunArgs};
use gt2::bayes::{GammaPriorPair, LossFunction};
use gt2::censoring::CensoringPlan;
use gt2::models::{ComparatorFamily, ComparatorModel};
use gt2::sim::SimulationConfig;
use serde::Deserialize;
use serde_json::json;
use std::path::PathBuf;

/// File-configurable mirror of the command-line flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub bundled_covid: Option<bool>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    #[serde(rename = "T")]
    pub threshold: Option<f64>,
    pub scheme: Option<u8>,
    pub removals: Option<String>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub loss: Option<String>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub prior: Option<String>,
    pub chain: Option<usize>,
    pub burn_in: Option<usize>,
    pub gamma: Option<f64>,
    pub boot_b: Option<usize>,
    pub comparator: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    /// Full campaign description for `simulate`.
    pub campaign: Option<SimulationConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    BundledCovid,
}

/// Effective configuration after merging defaults, file and flags.
pub struct Resolved {
    pub data: Vec<f64>,
    /// None means complete data (n = m = data length, no removals).
    pub plan: Option<CensoringPlan>,
    pub seed: u64,
    pub gamma: f64,
    pub prior: GammaPriorPair,
    pub chain: usize,
    pub burn_in: usize,
    pub boot_b: usize,
    pub losses: Vec<(String, LossFunction)>,
    pub comparators: Vec<(String, ComparatorModel)>,
    pub out: PathBuf,
    pub campaign: Option<SimulationConfig>,
    echo: serde_json::Value,
}

impl Resolved {
    /// The resolved configuration embedded into every report.
    pub fn echo(&self) -> serde_json::Value {
        self.echo.clone()
    }

    /// The plan in force, materializing the complete-data default.
    pub fn effective_plan(&self) -> Result<CensoringPlan, CliError> {
        match &self.plan {
            Some(p) => Ok(p.clone()),
            None => Ok(CensoringPlan::complete(self.data.len())?),
        }
    }
}

pub fn resolve(args: &RunArgs, needs_data: bool) -> Result<Resolved, CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let input = args.input.clone().or(file.input);
    let bundled = args.bundled_covid || file.bundled_covid.unwrap_or(false);
    let source = match (&input, bundled) {
        (Some(_), true) => {
            return Err(CliError::Config("choose either --input or --bundled-covid".into()))
        }
        (Some(p), false) => Some(DataSource::File(p.clone())),
        (None, true) => Some(DataSource::BundledCovid),
        (None, false) => None,
    };
    let data = match &source {
        Some(DataSource::File(p)) => crate::ingest::ingest(p)?,
        Some(DataSource::BundledCovid) => gt2::data::covid19_death_rates()?,
        None if needs_data => {
            return Err(CliError::Config("an input source is required: --input or --bundled-covid".into()))
        }
        None => Vec::new(),
    };

    let n = args.n.or(file.n);
    let m = args.m.or(file.m);
    let threshold = args.threshold.or(file.threshold).unwrap_or(f64::INFINITY);
    let scheme = args.scheme.or(file.scheme);
    let removals_text = args.removals.clone().or(file.removals);
    let plan = build_plan(&data, n, m, threshold, scheme, removals_text.as_deref())?;

    let seed = args.seed.or(file.seed).unwrap_or(0);
    let gamma = args.gamma.or(file.gamma).unwrap_or(0.05);
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(CliError::Config(format!("gamma must be in (0,1), got {gamma}")));
    }
    let prior_text = args.prior.clone().or(file.prior);
    let prior = match &prior_text {
        Some(t) => parse_prior(t)?,
        None => GammaPriorPair::noninformative(),
    };
    let chain = args.chain.or(file.chain).unwrap_or(5000);
    let burn_in = args.burn_in.or(file.burn_in).unwrap_or(chain / 5);
    if burn_in >= chain {
        return Err(CliError::Config(format!("burn-in {burn_in} must be below chain length {chain}")));
    }
    let boot_b = args.boot_b.or(file.boot_b).unwrap_or(1000);

    let p_values = args.p.clone().or(file.p).unwrap_or_else(|| vec![-0.25, 0.25]);
    let q_values = args.q.clone().or(file.q).unwrap_or_else(|| vec![-0.25, 0.25]);
    let loss_kind = args.loss.clone().or(file.loss).unwrap_or_else(|| "all".into());
    let losses = build_losses(&loss_kind, &p_values, &q_values)?;

    let comparator_specs: Vec<String> = if args.comparator.is_empty() {
        file.comparator.unwrap_or_default()
    } else {
        args.comparator.clone()
    };
    let comparators = comparator_specs
        .iter()
        .map(|s| parse_comparator(s))
        .collect::<Result<Vec<_>, _>>()?;

    let out = args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("gt2-out"));
    let reps = args.reps.or(file.reps);

    let mut campaign = file.campaign;
    if let Some(c) = campaign.as_mut() {
        if let Some(r) = reps {
            c.replications = r;
        }
        if let Some(s) = args.seed.or(file.seed) {
            c.master_seed = s;
        }
    }

    let echo = json!({
        "input": match &source {
            Some(DataSource::File(p)) => json!(p.display().to_string()),
            Some(DataSource::BundledCovid) => json!("bundled-covid"),
            None => serde_json::Value::Null,
        },
        "count": data.len(),
        "n": plan.as_ref().map(|p| p.n()),
        "m": plan.as_ref().map(|p| p.m()),
        "T": plan.as_ref().map(|p| threshold_string(p.threshold())),
        "removals": plan.as_ref().map(|p| run_length(p.removals())),
        "seed": seed,
        "gamma": gamma,
        "prior": [prior.a, prior.b, prior.c, prior.d],
        "chain": chain,
        "burn_in": burn_in,
        "boot_b": boot_b,
        "loss": loss_kind,
        "p": p_values,
        "q": q_values,
    });

    Ok(Resolved {
        data,
        plan,
        seed,
        gamma,
        prior,
        chain,
        burn_in,
        boot_b,
        losses,
        comparators,
        out,
        campaign,
        echo,
    })
}

fn build_plan(
    data: &[f64],
    n: Option<usize>,
    m: Option<usize>,
    threshold: f64,
    scheme: Option<u8>,
    removals: Option<&str>,
) -> Result<Option<CensoringPlan>, CliError> {
    if m.is_none() && scheme.is_none() && removals.is_none() {
        return Ok(None);
    }
    let n = n.unwrap_or(data.len());
    let m = m.ok_or_else(|| CliError::Config("a censoring plan needs --m".into()))?;
    let r = match (scheme, removals) {
        (Some(k), None) => gt2::censoring::scheme(k, n, m)?,
        (None, Some(text)) => parse_removals(text)?,
        (None, None) => {
            return Err(CliError::Config("a censoring plan needs --scheme or --removals".into()))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Config("--scheme and --removals are mutually exclusive".into()))
        }
    };
    Ok(Some(CensoringPlan::new(n, m, threshold, r)?))
}

/// Run-length removal syntax: comma-separated `value` or `value*count`.
pub fn parse_removals(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match token.split_once('*') {
            Some((v, k)) => {
                let v: usize = v.trim().parse().map_err(|_| bad_removals(token))?;
                let k: usize = k.trim().parse().map_err(|_| bad_removals(token))?;
                out.extend(std::iter::repeat_n(v, k));
            }
            None => out.push(token.parse().map_err(|_| bad_removals(token))?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("empty removal vector".into()));
    }
    Ok(out)
}

fn bad_removals(token: &str) -> CliError {
    CliError::Config(format!("cannot parse removal token '{token}' (expected K or K*COUNT)"))
}

pub fn run_length(removals: &[usize]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut iter = removals.iter().peekable();
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

pub fn threshold_string(t: f64) -> String {
    if t.is_infinite() {
        "inf".to_string()
    } else {
        format!("{t}")
    }
}

fn parse_prior(text: &str) -> Result<GammaPriorPair, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::Config(format!("--prior expects 'a,b,c,d', got '{text}'")));
    }
    let mut v = [0.0; 4];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse prior component '{part}'")))?;
    }
    Ok(GammaPriorPair::new(v[0], v[1], v[2], v[3])?)
}

fn build_losses(
    kind: &str,
    p: &[f64],
    q: &[f64],
) -> Result<Vec<(String, LossFunction)>, CliError> {
    let mut out = Vec::new();
    let kind = kind.to_ascii_lowercase();
    let want = |k: &str| kind == "all" || kind == k;
    if want("self") {
        out.push(("SELF".to_string(), LossFunction::SquaredError));
    }
    if want("linex") {
        for &pv in p {
            out.push((format!("LINEX(p={pv})"), LossFunction::Linex(pv)));
        }
    }
    if want("gelf") {
        for &qv in q {
            out.push((format!("GELF(q={qv})"), LossFunction::GeneralEntropy(qv)));
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(format!(
            "unknown loss '{kind}' (expected self, linex, gelf or all)"
        )));
    }
    Ok(out)
}

/// "NH:138.7024,0.0003" -> a fixed comparator model.
fn parse_comparator(spec: &str) -> Result<(String, ComparatorModel), CliError> {
    let (name, params) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("comparator '{spec}' must be FAMILY:p1,p2")))?;
    let family: ComparatorFamily = name.parse()?;
    let (p1, p2) = params
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("comparator '{spec}' must name two parameters")))?;
    let p1: f64 = p1.trim().parse().map_err(|_| {
        CliError::Config(format!("cannot parse comparator parameter '{p1}'"))
    })?;
    let p2: f64 = p2.trim().parse().map_err(|_| {
        CliError::Config(format!("cannot parse comparator parameter '{p2}'"))
    })?;
    Ok((family.label().to_string(), ComparatorModel::new(family, p1, p2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removal_run_lengths_roundtrip() {
        let r = parse_removals("0*39,50").unwrap();
        assert_eq!(r.len(), 40);
        assert_eq!(r[39], 50);
        assert_eq!(run_length(&r), "0*39,50");
        assert_eq!(parse_removals("1, 2,0*2").unwrap(), vec![1, 2, 0, 0]);
        assert!(parse_removals("x*3").is_err());
        assert!(parse_removals("").is_err());
    }

    #[test]
    fn prior_parsing() {
        let p = parse_prior("3,2,3,4").unwrap();
        assert_eq!((p.a, p.b, p.c, p.d), (3.0, 2.0, 3.0, 4.0));
        assert!(parse_prior("3,2,3").is_err());
        assert!(parse_prior("3,2,3,-1").is_err());
    }

    #[test]
    fn comparator_parsing() {
        let (label, m) = parse_comparator("BurrIII:2.0256,85.8196").unwrap();
        assert_eq!(label, "BurrIII");
        assert_eq!(m.p1(), 2.0256);
        assert!(parse_comparator("Nope:1,2").is_err());
        assert!(parse_comparator("NH:1").is_err());
    }
}
