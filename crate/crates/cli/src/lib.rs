//! Experiment runner behind the `sfw` binary.
//!
//! Every command renders one or more CSV/JSON documents in memory; files are
//! written by a single writer once all trials have been aggregated. A `#`
//! metadata line (version, spec echo, wall time) precedes each CSV body.

pub mod spec;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use sfw_core::bounds::{critical_intensity_upper_bound, evaluate_all, protected_fraction, LambdaC1};
use sfw_core::lattice::{run_validation_suite, write_validator_csv, SuiteSize};
use sfw_core::percolation::{
    estimate_percolation_probability, estimate_protected_fraction, find_critical_firewall_intensity, CriticalSearch,
};
use sfw_core::Error as CoreError;

pub use spec::{Command, ExperimentSpec, NetworkSpec, SweepAxis};

pub const SWEEP_HEADER: &str = "lambda_r,r_r,lambda_f,r_f,window_size,trials,theta_hat,std_err,seed";
pub const CRITICAL_HEADER: &str = "lambda_r,lambda_f_critical,epsilon,step,trials_per_point";
pub const CRITICAL_GRID_HEADER: &str = "lambda_r,lambda_f,theta_hat,std_err,trials";
pub const UPPER_BOUNDS_HEADER: &str = "lc1,r_r,r_f,critical_upper_bound";
pub const PROTECTED_HEADER: &str =
    "lambda_r,lambda_f,r_f,firewall_margin,trials,empirical_fraction,std_err,analytic_fraction";

/// A rendered output document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// Destination; `None` means standard output.
    pub path: Option<PathBuf>,
    pub body: String,
    /// CSV documents get a `#` metadata line, JSON does not.
    pub csv: bool,
}

#[derive(Debug)]
pub struct Outcome {
    pub documents: Vec<Document>,
    /// Human-readable summary for standard output.
    pub summary: String,
    /// Set when the run failed after producing partial output.
    pub failure: Option<anyhow::Error>,
    pub wall_time_s: f64,
}

/// `out.csv` -> `out.<tag>.csv`.
pub fn sibling_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("[sfw] {}", msg.as_ref());
}

/// Runs `spec` on a pool of `spec.threads` workers (rayon default when unset).
pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let start = Instant::now();
    let mut outcome = match spec.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            pool.install(|| dispatch(spec))?
        }
        None => dispatch(spec)?,
    };
    outcome.wall_time_s = start.elapsed().as_secs_f64();
    Ok(outcome)
}

fn dispatch(spec: &ExperimentSpec) -> Result<Outcome> {
    match spec.command {
        Command::Sweep => sweep(spec),
        Command::Critical => critical(spec),
        Command::Bounds => bounds(spec),
        Command::Validate => validate(spec),
        Command::Protected => protected(spec),
    }
}

fn outcome(documents: Vec<Document>, summary: String, failure: Option<anyhow::Error>) -> Outcome {
    Outcome {
        documents,
        summary,
        failure,
        wall_time_s: 0.0,
    }
}

fn sweep(spec: &ExperimentSpec) -> Result<Outcome> {
    let mut body = format!("{SWEEP_HEADER}\n");
    let mut summary = String::new();
    for v in spec.axis_values() {
        let cfg = spec.network_config(v)?;
        let est = estimate_percolation_probability(&cfg, spec.trials)?;
        progress(format!(
            "lambda_r={} lambda_f={} r_f={} theta_hat={}",
            cfg.lambda_r, cfg.lambda_f, cfg.r_f, est.theta_hat
        ));
        writeln!(
            body,
            "{},{},{},{},{},{},{},{},{}",
            cfg.lambda_r,
            cfg.r_r,
            cfg.lambda_f,
            cfg.r_f,
            cfg.window.width(),
            est.trials,
            est.theta_hat,
            est.std_err,
            spec.master_seed
        )?;
        writeln!(summary, "{} theta_hat={} std_err={}", axis_label(spec, v), est.theta_hat, est.std_err)?;
    }
    Ok(outcome(
        vec![Document {
            path: spec.output.clone(),
            body,
            csv: true,
        }],
        summary,
        None,
    ))
}

fn axis_label(spec: &ExperimentSpec, v: Option<f64>) -> String {
    match (&spec.axis, v) {
        (Some(a), Some(v)) => format!("{}={v}", a.parameter),
        _ => "point".into(),
    }
}

fn critical(spec: &ExperimentSpec) -> Result<Outcome> {
    let mut body = format!("{CRITICAL_HEADER}\n");
    let mut grid = format!("{CRITICAL_GRID_HEADER}\n");
    let mut summary = String::new();
    let mut failure = None;
    for v in spec.axis_values() {
        let cfg = spec.network_config(v)?.with_lambda_f(0.0);
        let search = CriticalSearch {
            lambda_f_max: match spec.lambda_f_max {
                Some(m) => m,
                None => CriticalSearch::default_max(cfg.r_r, cfg.r_f)?,
            },
            step: spec.search_step,
            trials: spec.trials,
            epsilon: spec.epsilon,
        };
        let result = find_critical_firewall_intensity(&cfg, &search);
        let evaluated = match &result {
            Ok(r) => r.evaluated.clone(),
            Err(CoreError::SearchExhausted { evaluated, .. }) => evaluated.clone(),
            Err(_) => Vec::new(),
        };
        for (lambda_f, est) in &evaluated {
            writeln!(grid, "{},{},{},{},{}", cfg.lambda_r, lambda_f, est.theta_hat, est.std_err, est.trials)?;
        }
        match result {
            Ok(r) => {
                progress(format!("lambda_r={} lambda_f_critical={}", cfg.lambda_r, r.lambda_f_critical));
                writeln!(
                    body,
                    "{},{},{},{},{}",
                    cfg.lambda_r, r.lambda_f_critical, search.epsilon, search.step, search.trials
                )?;
                writeln!(summary, "lambda_r={} lambda_f_critical={}", cfg.lambda_r, r.lambda_f_critical)?;
            }
            Err(e @ CoreError::SearchExhausted { .. }) => {
                failure = Some(anyhow::Error::new(e).context(format!("critical search at lambda_r={}", cfg.lambda_r)));
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }

    let base = spec.network_config(None)?;
    let mut upper = format!("{UPPER_BOUNDS_HEADER}\n");
    let mut lcs = vec![LambdaC1::approximation(), LambdaC1::upper()];
    let chosen = spec.lc1()?;
    if !lcs.contains(&chosen) {
        lcs.push(chosen);
    }
    for lc in lcs {
        let ub = critical_intensity_upper_bound(base.r_r, base.r_f, lc)?;
        writeln!(upper, "{},{},{},{}", lc.value, base.r_r, base.r_f, ub)?;
    }

    let mut documents = vec![Document {
        path: spec.output.clone(),
        body,
        csv: true,
    }];
    if let Some(out) = &spec.output {
        documents.push(Document {
            path: Some(sibling_path(out, "upper_bounds")),
            body: upper,
            csv: true,
        });
        documents.push(Document {
            path: Some(sibling_path(out, "grid")),
            body: grid,
            csv: true,
        });
    }
    Ok(outcome(documents, summary, failure))
}

fn bounds(spec: &ExperimentSpec) -> Result<Outcome> {
    let cfg = spec.network_config(None)?;
    let report = evaluate_all(&cfg, spec.lc1()?);
    let table = report.to_table();
    let json = report.to_json() + "\n";
    let documents = vec![Document {
        path: spec.output.clone(),
        body: if spec.output.is_some() { json } else { table.clone() },
        csv: false,
    }];
    let summary = if spec.output.is_some() { table } else { String::new() };
    Ok(outcome(documents, summary, None))
}

fn validate(spec: &ExperimentSpec) -> Result<Outcome> {
    let rows = run_validation_suite(spec.master_seed, SuiteSize::default())?;
    let mut buf = Vec::new();
    write_validator_csv(&rows, &mut buf)?;
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let mut summary = String::new();
    for r in &rows {
        writeln!(summary, "{:<32} {}", r.check_name, if r.violations == 0 { "ok" } else { "VIOLATED" })?;
    }
    let failure = (violations > 0).then(|| anyhow::anyhow!("{violations} validator violation(s)"));
    Ok(outcome(
        vec![Document {
            path: spec.output.clone(),
            body: String::from_utf8(buf)?,
            csv: true,
        }],
        summary,
        failure,
    ))
}

fn protected(spec: &ExperimentSpec) -> Result<Outcome> {
    let mut body = format!("{PROTECTED_HEADER}\n");
    let mut summary = String::new();
    for v in spec.axis_values() {
        let cfg = spec.network_config(v)?;
        let est = estimate_protected_fraction(&cfg, spec.trials)?;
        let analytic = protected_fraction(cfg.lambda_f, cfg.r_f)?;
        progress(format!("lambda_f={} r_f={} fraction={}", cfg.lambda_f, cfg.r_f, est.mean));
        writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            cfg.lambda_r,
            cfg.lambda_f,
            cfg.r_f,
            cfg.firewall_margin,
            est.trials_used,
            est.mean,
            est.std_err,
            analytic
        )?;
        writeln!(summary, "{} empirical={} analytic={analytic}", axis_label(spec, v), est.mean)?;
    }
    Ok(outcome(
        vec![Document {
            path: spec.output.clone(),
            body,
            csv: true,
        }],
        summary,
        None,
    ))
}

/// `# sfw <version> command=... wall_time_s=... spec=<json>`
pub fn metadata_line(spec: &ExperimentSpec, wall_time_s: f64) -> String {
    format!(
        "# sfw {} command={} wall_time_s={:.3} spec={}\n",
        env!("CARGO_PKG_VERSION"),
        spec.command.name(),
        wall_time_s,
        serde_json::to_string(spec).unwrap_or_default()
    )
}

/// Writes every document; documents without a path go to standard output.
pub fn write_outputs(spec: &ExperimentSpec, outcome: &Outcome) -> Result<()> {
    let meta = metadata_line(spec, outcome.wall_time_s);
    for doc in &outcome.documents {
        let text = if doc.csv {
            format!("{meta}{}", doc.body)
        } else {
            doc.body.clone()
        };
        match &doc.path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
    }
    Ok(())
}

/// Strips `#` metadata lines.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
