//! Command implementations and their output artifacts.
//!
//! Every command writes `report.json` into the output directory. Table
//! columns are:
//!
//! * `gof.csv` — `model,p1,p2,neg_loglik,aic,bic,cvm,ad,p_value`
//! * `ecdf.csv` — `x,empirical,fitted`
//! * `qq.csv` — `theoretical,observed`
//! * `boxplot.csv` — `statistic,value`
//! * `ttt.csv` — `fraction,scaled_ttt`
//! * `profile_alpha.csv` / `profile_beta.csv` — `value,partner,loglik,converged`
//! * `censored.csv` — `time`
//! * `summary.csv` — `n,m,scheme,T,estimator,ab_alpha,mse_alpha,ab_beta,mse_beta`
//! * `intervals.csv` — `n,m,scheme,T,method,length_alpha,coverage_alpha,length_beta,coverage_beta`

use crate::config::{resolve, run_length, threshold_string, Resolved};
use crate::report::write_report;
use crate::{CliError, RunArgs};
use gt2::bayes::{bayes_estimate, proposal_from_mle, run_mh, McmcConfig, PosteriorChain};
use gt2::censoring::censor_real_data;
use gt2::gof::{cvm_ad, gof_pvalue, information_criteria, plot_data};
use gt2::intervals::{aci, boot_p, boot_t, hpd, IntervalEstimate};
use gt2::mle::{fit_mle, profile_loglik, FitOptions, FitReport};
use gt2::mps::fit_mps;
use gt2::sim::{interval_table, run_campaign, summary_to_table};
use gt2::AdaptiveCensoredSample;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

fn out_dir(r: &Resolved) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&r.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", r.out.display())))?;
    Ok(r.out.clone())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn make_sample(r: &Resolved) -> Result<AdaptiveCensoredSample, CliError> {
    Ok(censor_real_data(&r.data, &r.effective_plan()?, r.seed)?)
}

fn fit_sample(sample: &AdaptiveCensoredSample, use_mps: bool) -> Result<FitReport, CliError> {
    let opts = FitOptions::default();
    let report = if use_mps {
        fit_mps(sample, None, &opts)?
    } else {
        fit_mle(sample, None, &opts)?
    };
    if !report.converged {
        return Err(CliError::Estimation(format!(
            "{} fit did not converge after {} iterations",
            if use_mps { "product spacing" } else { "likelihood" },
            report.iterations
        )));
    }
    Ok(report)
}

fn fit_json(fit: &FitReport) -> Value {
    let se = fit.standard_errors().ok();
    json!({
        "estimate": {"alpha": fit.estimate.alpha(), "beta": fit.estimate.beta()},
        "objective": fit.loglik,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "observed_info": fit.observed_info,
        "se": se.map(|(a, b)| json!({"alpha": a, "beta": b})).unwrap_or(Value::Null),
    })
}

fn sample_json(s: &AdaptiveCensoredSample) -> Value {
    json!({
        "n": s.n(),
        "m": s.m(),
        "T": threshold_string(s.plan().threshold()),
        "change_point": s.change_point(),
        "effective_removals": run_length(s.effective_removals()),
    })
}

fn interval_json(pair: &[IntervalEstimate; 2]) -> Value {
    let one = |e: &IntervalEstimate| {
        json!({"lower": e.lower, "upper": e.upper, "level": e.level, "clamped": e.clamped})
    };
    json!({"alpha": one(&pair[0]), "beta": one(&pair[1])})
}

fn report_skeleton(command: &str, r: &Resolved, results: Value) -> Value {
    json!({
        "tool": "gt2",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": r.echo(),
        "results": results,
    })
}

pub fn fit(args: &RunArgs, use_mps: bool) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let fit = fit_sample(&sample, use_mps)?;
    let command = if use_mps { "mps" } else { "fit" };
    let results = json!({"fit": fit_json(&fit), "sample": sample_json(&sample)});
    write_report(&dir.join("report.json"), report_skeleton(command, &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "{command}: alpha = {:.6}, beta = {:.6} ({} iterations, objective {:.6})",
        fit.estimate.alpha(),
        fit.estimate.beta(),
        fit.iterations,
        fit.loglik
    );
    println!("report: {}", dir.join("report.json").display());
    Ok(())
}

fn run_chain(
    r: &Resolved,
    sample: &AdaptiveCensoredSample,
    fit: &FitReport,
) -> Result<(PosteriorChain, McmcConfig), CliError> {
    let (sd_a, sd_b) = proposal_from_mle(fit)?;
    let cfg = McmcConfig {
        chain_length: r.chain,
        burn_in: r.burn_in,
        proposal_sd_alpha: sd_a,
        proposal_sd_beta: sd_b,
        seed: r.seed,
    };
    Ok((run_mh(sample, &r.prior, &cfg, fit.estimate)?, cfg))
}

pub fn bayes(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let fit = fit_sample(&sample, false)?;
    let (chain, cfg) = run_chain(&r, &sample, &fit)?;

    let mut estimates = serde_json::Map::new();
    for (label, loss) in &r.losses {
        let est = bayes_estimate(&chain, *loss, cfg.burn_in)?;
        estimates.insert(
            label.clone(),
            json!({"alpha": est.alpha(), "beta": est.beta()}),
        );
    }
    let hpd_pair = hpd(&chain, r.gamma, cfg.burn_in)?;
    let results = json!({
        "mle_init": fit_json(&fit),
        "sample": sample_json(&sample),
        "chain": {
            "length": chain.len(),
            "burn_in": cfg.burn_in,
            "accepted": chain.accepted(),
            "acceptance_rate": chain.acceptance_rate(),
            "proposal_sd": {"alpha": cfg.proposal_sd_alpha, "beta": cfg.proposal_sd_beta},
        },
        "estimates": Value::Object(estimates),
        "hpd": interval_json(&hpd_pair),
    });
    write_report(&dir.join("report.json"), report_skeleton("bayes", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "bayes: {} estimates from a chain of {} (acceptance {:.3})",
        r.losses.len(),
        chain.len(),
        chain.acceptance_rate()
    );
    println!("report: {}", dir.join("report.json").display());
    Ok(())
}

pub fn intervals(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let fit = fit_sample(&sample, false)?;
    let aci_pair = aci(&fit, r.gamma)?;
    let bp = boot_p(&sample, &fit, r.boot_b, r.gamma, r.seed)?;
    let bt = boot_t(&sample, &fit, r.boot_b, r.gamma, gt2::numeric::split_seed(r.seed, 1))?;
    let (chain, cfg) = run_chain(&r, &sample, &fit)?;
    let hp = hpd(&chain, r.gamma, cfg.burn_in)?;

    let results = json!({
        "fit": fit_json(&fit),
        "sample": sample_json(&sample),
        "level": 1.0 - r.gamma,
        "aci": interval_json(&aci_pair),
        "boot_p": interval_json(&bp),
        "boot_t": interval_json(&bt),
        "hpd": interval_json(&hp),
    });
    write_report(&dir.join("report.json"), report_skeleton("intervals", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "intervals at {:.0}%: ACI alpha ({:.4}, {:.4}), HPD alpha ({:.4}, {:.4})",
        100.0 * (1.0 - r.gamma),
        aci_pair[0].lower,
        aci_pair[0].upper,
        hp[0].lower,
        hp[0].upper
    );
    println!("report: {}", dir.join("report.json").display());
    Ok(())
}

pub fn gof(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    if r.plan.is_some() {
        return Err(CliError::Config(
            "gof operates on complete data; drop the censoring-plan flags".into(),
        ));
    }
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let fit = fit_sample(&sample, false)?;
    let n = r.data.len();

    let (cvm, ad) = cvm_ad(&r.data, |x| fit.estimate.cdf(x))?;
    let (aic, bic) = information_criteria(-fit.loglik, 2, n);
    let p_value = gof_pvalue(&r.data, &fit.estimate, r.boot_b.max(200), r.seed)?;

    let mut rows = vec![json!({
        "model": "GT-II",
        "p1": fit.estimate.alpha(),
        "p2": fit.estimate.beta(),
        "neg_loglik": -fit.loglik,
        "aic": aic,
        "bic": bic,
        "cvm": cvm,
        "ad": ad,
        "p_value": p_value,
        "p_value_note": if p_value == 0.0 {
            format!("< 1/{}", r.boot_b.max(200))
        } else {
            String::new()
        },
    })];
    for (label, model) in &r.comparators {
        let ll = model.loglik(&r.data)?;
        let (aic, bic) = information_criteria(-ll, 2, n);
        let (cvm, ad) = cvm_ad(&r.data, |x| model.cdf(x))?;
        rows.push(json!({
            "model": label,
            "p1": model.p1(),
            "p2": model.p2(),
            "neg_loglik": -ll,
            "aic": aic,
            "bic": bic,
            "cvm": cvm,
            "ad": ad,
            "p_value": Value::Null,
        }));
    }

    let mut csv = String::from("model,p1,p2,neg_loglik,aic,bic,cvm,ad,p_value\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            row["model"].as_str().unwrap(),
            row["p1"],
            row["p2"],
            row["neg_loglik"].as_f64().unwrap(),
            row["aic"].as_f64().unwrap(),
            row["bic"].as_f64().unwrap(),
            row["cvm"].as_f64().unwrap(),
            row["ad"].as_f64().unwrap(),
            row["p_value"].as_f64().map(|v| format!("{v:.6}")).unwrap_or_default(),
        ));
    }
    write_text(&dir.join("gof.csv"), &csv)?;

    let results = json!({"models": rows, "sample_size": n});
    write_report(&dir.join("report.json"), report_skeleton("gof", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "gof: GT-II alpha = {:.4}, beta = {:.4}, -logL = {:.4}, C* = {:.4}, A* = {:.4}, p = {:.4}",
        fit.estimate.alpha(),
        fit.estimate.beta(),
        -fit.loglik,
        cvm,
        ad,
        p_value
    );
    println!("report: {}", dir.join("report.json").display());
    Ok(())
}

pub fn simulate(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, false)?;
    let campaign = r.campaign.clone().ok_or_else(|| {
        CliError::Config("simulate needs a [campaign] section in the --config file".into())
    })?;
    let dir = out_dir(&r)?;
    let summary = run_campaign(&campaign)?;
    write_text(&dir.join("summary.csv"), &summary_to_table(&summary))?;
    write_text(&dir.join("intervals.csv"), &interval_table(&summary))?;
    let results = json!({
        "campaign": serde_json::to_value(&campaign).map_err(|e| CliError::Io(e.to_string()))?,
        "summary": serde_json::to_value(&summary).map_err(|e| CliError::Io(e.to_string()))?,
    });
    write_report(&dir.join("results.json"), report_skeleton("simulate", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "simulate: {} replicates x {} plans, {} failures",
        campaign.replications,
        campaign.plans.len(),
        summary.failures
    );
    println!("summary: {}", dir.join("summary.csv").display());
    Ok(())
}

pub fn censor(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    if r.plan.is_none() {
        return Err(CliError::Config("censor needs a plan: --m with --scheme or --removals".into()));
    }
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let mut csv = String::from("time\n");
    for t in sample.times() {
        csv.push_str(&format!("{t}\n"));
    }
    write_text(&dir.join("censored.csv"), &csv)?;
    let results = json!({
        "sample": sample_json(&sample),
        "times": sample.times(),
    });
    write_report(&dir.join("report.json"), report_skeleton("censor", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "censor: kept {} of {} observations (change point {})",
        sample.m(),
        sample.n(),
        sample.change_point()
    );
    println!("written: {}", dir.join("censored.csv").display());
    Ok(())
}

pub fn plotdata(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args, true)?;
    let dir = out_dir(&r)?;
    let sample = make_sample(&r)?;
    let fit = fit_sample(&sample, false)?;
    let tables = plot_data(&r.data, &fit.estimate)?;

    let mut ecdf = String::from("x,empirical,fitted\n");
    for row in &tables.ecdf {
        ecdf.push_str(&format!("{},{:.8},{:.8}\n", row.x, row.empirical, row.fitted));
    }
    write_text(&dir.join("ecdf.csv"), &ecdf)?;

    let mut qq = String::from("theoretical,observed\n");
    for row in &tables.qq {
        qq.push_str(&format!("{:.8},{}\n", row.theoretical, row.observed));
    }
    write_text(&dir.join("qq.csv"), &qq)?;

    let b = &tables.boxplot;
    let boxplot = format!(
        "statistic,value\nmin,{}\nq1,{}\nmedian,{}\nq3,{}\nmax,{}\nmean,{}\n",
        b.min, b.q1, b.median, b.q3, b.max, b.mean
    );
    write_text(&dir.join("boxplot.csv"), &boxplot)?;

    let mut ttt = String::from("fraction,scaled_ttt\n");
    for row in &tables.ttt {
        ttt.push_str(&format!("{:.8},{:.8}\n", row.fraction, row.scaled_ttt));
    }
    write_text(&dir.join("ttt.csv"), &ttt)?;

    let grid = |center: f64| -> Vec<f64> {
        (0..41).map(|i| center * (0.5 + i as f64 / 40.0)).collect()
    };
    let profile = profile_loglik(
        &sample,
        &grid(fit.estimate.alpha()),
        &grid(fit.estimate.beta()),
    )?;
    for (name, points) in [("profile_alpha.csv", &profile.alpha), ("profile_beta.csv", &profile.beta)]
    {
        let mut text = String::from("value,partner,loglik,converged\n");
        for p in points {
            text.push_str(&format!(
                "{:.8},{:.8},{:.8},{}\n",
                p.value, p.partner, p.loglik, p.converged
            ));
        }
        write_text(&dir.join(name), &text)?;
    }

    let results = json!({
        "fit": fit_json(&fit),
        "boxplot": {
            "min": b.min, "q1": b.q1, "median": b.median,
            "q3": b.q3, "max": b.max, "mean": b.mean,
        },
        "files": ["ecdf.csv", "qq.csv", "boxplot.csv", "ttt.csv",
                  "profile_alpha.csv", "profile_beta.csv"],
    });
    write_report(&dir.join("report.json"), report_skeleton("plotdata", &r, results))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!("plotdata: tables written to {}", dir.display());
    Ok(())
}
