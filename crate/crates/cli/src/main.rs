use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use sfw_cli::{run, write_outputs, Command, ExperimentSpec, SweepAxis};

/// Monte-Carlo experiments on device networks shielded by spatial firewalls.
#[derive(Debug, Parser)]
#[command(name = "sfw", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// 1.44, 3.37, 0.768 or any positive value.
    #[arg(long)]
    lc1: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    lambda_r: Option<f64>,
    #[arg(long)]
    r_r: Option<f64>,
    #[arg(long)]
    lambda_f: Option<f64>,
    #[arg(long)]
    r_f: Option<f64>,
    #[arg(long)]
    window_size: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    /// Swept parameter: lambda_r, r_r, lambda_f, r_f or window_size.
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    search_step: Option<f64>,
    #[arg(long)]
    lambda_f_max: Option<f64>,
}

impl Cli {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let s = ExperimentSpec::load(path)?;
                if s.command != self.command {
                    bail!(
                        "config command `{}` does not match `{}`",
                        s.command.name(),
                        self.command.name()
                    );
                }
                s
            }
            None => ExperimentSpec::new(self.command),
        };
        let n = &mut spec.network;
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        set!(n.lambda_r, self.lambda_r);
        set!(n.r_r, self.r_r);
        set!(n.lambda_f, self.lambda_f);
        set!(n.r_f, self.r_f);
        set!(n.window_size, self.window_size);
        if self.margin.is_some() {
            n.firewall_margin = self.margin;
        }
        set!(spec.master_seed, self.seed);
        set!(spec.trials, self.trials);
        set!(spec.epsilon, self.epsilon);
        set!(spec.lc1, self.lc1);
        set!(spec.search_step, self.search_step);
        if self.out.is_some() {
            spec.output = self.out;
        }
        if self.threads.is_some() {
            spec.threads = self.threads;
        }
        if self.lambda_f_max.is_some() {
            spec.lambda_f_max = self.lambda_f_max;
        }
        if self.axis.is_some() || self.start.is_some() || self.stop.is_some() || self.step.is_some() {
            let mut axis = match (spec.axis.take(), self.axis) {
                (Some(mut a), p) => {
                    if let Some(p) = p {
                        a.parameter = p;
                    }
                    a
                }
                (None, Some(p)) => match (self.start, self.stop, self.step) {
                    (Some(start), Some(stop), Some(step)) => SweepAxis {
                        parameter: p,
                        start,
                        stop,
                        step,
                    },
                    _ => bail!("--axis needs --start, --stop and --step"),
                },
                (None, None) => bail!("--start/--stop/--step need --axis"),
            };
            set!(axis.start, self.start);
            set!(axis.stop, self.stop);
            set!(axis.step, self.step);
            spec.axis = Some(axis);
        }
        Ok(spec)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.into_spec().and_then(|spec| {
        let outcome = run(&spec)?;
        write_outputs(&spec, &outcome)?;
        if !outcome.summary.is_empty() && spec.output.is_some() {
            print!("{}", outcome.summary);
        }
        match outcome.failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
