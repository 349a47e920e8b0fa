use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sfw_core::{LambdaC1, NetworkConfig, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sweep,
    Critical,
    Bounds,
    Validate,
    Protected,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Critical => "critical",
            Command::Bounds => "bounds",
            Command::Validate => "validate",
            Command::Protected => "protected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub lambda_r: f64,
    pub r_r: f64,
    pub lambda_f: f64,
    pub r_f: f64,
    pub window_size: f64,
    /// `None` means 0, except for `protected`, which defaults to `r_f`.
    #[serde(default)]
    pub firewall_margin: Option<f64>,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            lambda_r: 0.8,
            r_r: 2.0,
            lambda_f: 0.0,
            r_f: 2.0,
            window_size: 100.0,
            firewall_margin: None,
        }
    }
}

pub const AXIS_PARAMETERS: [&str; 5] = ["lambda_r", "r_r", "lambda_f", "r_f", "window_size"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if !AXIS_PARAMETERS.contains(&self.parameter.as_str()) {
            bail!(
                "axis.parameter `{}` is not one of {}",
                self.parameter,
                AXIS_PARAMETERS.join(", ")
            );
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            bail!("axis.step must be > 0, got {}", self.step);
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            bail!("axis.stop ({}) must be >= axis.start ({})", self.stop, self.start);
        }
        Ok(())
    }

    /// `start, start + step, ...` up to `stop`, each rounded to 12 significant digits.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| round12(self.start + k as f64 * self.step)).collect()
    }
}

pub fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn default_trials() -> usize {
    100
}

fn default_epsilon() -> f64 {
    0.02
}

fn default_search_step() -> f64 {
    0.005
}

fn default_lc1() -> String {
    "1.44".into()
}

/// One experiment, as read from a JSON config file and/or flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: Command,
    #[serde(default)]
    pub network: NetworkSpec,
    #[serde(default)]
    pub axis: Option<SweepAxis>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Coarse step of the critical-intensity scan.
    #[serde(default = "default_search_step")]
    pub search_step: f64,
    #[serde(default)]
    pub lambda_f_max: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_lc1")]
    pub lc1: String,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            network: NetworkSpec::default(),
            axis: None,
            trials: default_trials(),
            epsilon: default_epsilon(),
            search_step: default_search_step(),
            lambda_f_max: None,
            output: None,
            master_seed: 0,
            lc1: default_lc1(),
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            anyhow::anyhow!("parse error at line {} column {}: {e}", e.line(), e.column())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("config {}", path.display()))
    }

    pub fn lc1(&self) -> Result<LambdaC1> {
        Ok(self.lc1.parse::<LambdaC1>()?)
    }

    /// Network configuration with `axis` set to `value` (when given).
    pub fn network_config(&self, axis_value: Option<f64>) -> Result<NetworkConfig> {
        let mut n = self.network;
        if let (Some(axis), Some(v)) = (&self.axis, axis_value) {
            match axis.parameter.as_str() {
                "lambda_r" => n.lambda_r = v,
                "r_r" => n.r_r = v,
                "lambda_f" => n.lambda_f = v,
                "r_f" => n.r_f = v,
                "window_size" => n.window_size = v,
                other => bail!("unknown axis parameter `{other}`"),
            }
        }
        let cfg = NetworkConfig {
            lambda_r: n.lambda_r,
            r_r: n.r_r,
            lambda_f: n.lambda_f,
            r_f: n.r_f,
            window: Window::square(n.window_size)?,
            master_seed: self.master_seed,
            firewall_margin: match (n.firewall_margin, self.command) {
                (Some(m), _) => m,
                (None, Command::Protected) => n.r_f,
                (None, _) => 0.0,
            },
            allow_small_rf: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(axis) = &self.axis {
            axis.validate()?;
        }
        if self.trials == 0 {
            bail!("trials must be >= 1");
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            bail!("epsilon must be in [0, 1), got {}", self.epsilon);
        }
        if !(self.search_step.is_finite() && self.search_step > 0.0) {
            bail!("search_step must be > 0, got {}", self.search_step);
        }
        if self.threads == Some(0) {
            bail!("threads must be >= 1");
        }
        self.lc1()?;
        self.network_config(None)?;
        Ok(())
    }

    /// Axis values, or a single `None` when the spec has no axis.
    pub fn axis_values(&self) -> Vec<Option<f64>> {
        match &self.axis {
            Some(a) => a.values().into_iter().map(Some).collect(),
            None => vec![None],
        }
    }
}
