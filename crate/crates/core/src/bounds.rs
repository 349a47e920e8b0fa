//! Closed-form thresholds and bounds for device percolation, firewall
//! intensity and the protected-device fraction.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::network::NetworkConfig;

/// Where a value of the unit-range critical intensity λc(1) comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lc1Provenance {
    /// Numerical estimate 1.44.
    Approximation144,
    /// Rigorous upper bound 3.37.
    Upper337,
    /// Rigorous lower bound 0.768.
    Lower0768,
    Custom,
}

/// Critical device intensity for continuum percolation at unit range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaC1 {
    pub value: f64,
    pub provenance: Lc1Provenance,
}

impl LambdaC1 {
    pub const APPROXIMATION: f64 = 1.44;
    pub const UPPER: f64 = 3.37;
    pub const LOWER: f64 = 0.768;

    pub const fn approximation() -> Self {
        Self {
            value: Self::APPROXIMATION,
            provenance: Lc1Provenance::Approximation144,
        }
    }

    pub const fn upper() -> Self {
        Self {
            value: Self::UPPER,
            provenance: Lc1Provenance::Upper337,
        }
    }

    pub const fn lower() -> Self {
        Self {
            value: Self::LOWER,
            provenance: Lc1Provenance::Lower0768,
        }
    }

    pub fn custom(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(invalid(format!("lambda_c(1) must be > 0, got {value}")));
        }
        Ok(Self {
            value,
            provenance: Lc1Provenance::Custom,
        })
    }
}

impl Default for LambdaC1 {
    fn default() -> Self {
        Self::approximation()
    }
}

impl FromStr for LambdaC1 {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1.44" => Ok(Self::approximation()),
            "3.37" => Ok(Self::upper()),
            "0.768" => Ok(Self::lower()),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| invalid(format!("lc1 must be 1.44, 3.37, 0.768 or a number, got `{other}`")))?;
                Self::custom(v)
            }
        }
    }
}

impl fmt::Display for LambdaC1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Device intensity above which the device graph percolates: λc(1) / r_r².
pub fn device_percolation_threshold(r_r: f64, lc1: LambdaC1) -> Result<f64> {
    positive("r_r", r_r)?;
    Ok(lc1.value / (r_r * r_r))
}

/// Rounded constant for the closed-face sufficient condition, times 1/r_r².
pub const SUBCRITICAL_ROUNDED_CONSTANT: f64 = 3.65;

/// Firewall intensity at which a hexagonal face of side `r_r` is closed with
/// probability exactly 1/2: `-(4 / (√3 r_r²)) ln(1 - 2^(-1/3))`.
/// Any larger intensity keeps the ISG sub-critical.
pub fn subcritical_sufficient_intensity(r_r: f64) -> Result<f64> {
    positive("r_r", r_r)?;
    let x = -(1.0 - 2f64.powf(-1.0 / 3.0)).ln();
    Ok(4.0 * x / (3f64.sqrt() * r_r * r_r))
}

/// `3.65 / r_r²`, the rounded form of [`subcritical_sufficient_intensity`].
pub fn subcritical_sufficient_intensity_rounded(r_r: f64) -> Result<f64> {
    positive("r_r", r_r)?;
    Ok(SUBCRITICAL_ROUNDED_CONSTANT / (r_r * r_r))
}

/// Probability that each of three equilateral triangles of side `r_r`
/// holds at least one firewall.
pub fn closed_face_probability(lambda_f: f64, r_r: f64) -> Result<f64> {
    non_negative("lambda_f", lambda_f)?;
    positive("r_r", r_r)?;
    let triangle_area = 3f64.sqrt() / 4.0 * r_r * r_r;
    let occupied = -(-lambda_f * triangle_area).exp_m1();
    Ok(occupied.powi(3))
}

/// `ceil(x)` that ignores rounding noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Square-lattice dependency geometry for the super-critical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependencyGeometry {
    /// Cells of A(e) along the long side of S1 ∪ S2.
    pub a: u64,
    /// Cells of A(e) along the short side.
    pub b: u64,
    /// Edges whose state may depend on a given edge.
    pub n: u64,
    /// Cells covered by A(e).
    pub n_a: u64,
    /// Lattice side r_r / √5.
    pub s: f64,
}

/// Maximum dependent-edge count for an `a x b` dependency region:
/// `(2a - 1)(2b - 1) + (2a - 2) 2b = 8ab - 2a - 6b + 1`.
pub fn dependent_edge_count(a: u64, b: u64) -> u64 {
    8 * a * b + 1 - 2 * a - 6 * b
}

pub fn dependency_counts(r_f: f64, r_r: f64) -> Result<DependencyGeometry> {
    positive("r_r", r_r)?;
    positive("r_f", r_f)?;
    if r_f < r_r {
        return Err(invalid(format!("dependency geometry needs r_f >= r_r, got r_f = {r_f}, r_r = {r_r}")));
    }
    let k = ceil_tol(5f64.sqrt() * r_f / r_r) as u64;
    let a = 2 * k + 2;
    let b = 2 * k + 1;
    Ok(DependencyGeometry {
        a,
        b,
        n: dependent_edge_count(a, b),
        n_a: a * b,
        s: r_r / 5f64.sqrt(),
    })
}

/// Base of β: (11 - 2√10) / 27.
pub fn beta_base() -> f64 {
    (11.0 - 2.0 * 10f64.sqrt()) / 27.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalBound {
    /// Firewall intensity below which the ISG is super-critical; 0 when vacuous.
    pub bound: f64,
    /// The right-hand side is non-positive, so nothing is certified.
    pub vacuous: bool,
    pub beta: f64,
    pub log_beta: f64,
    /// Unclamped right-hand side.
    pub raw: f64,
}

/// Sufficient condition for a super-critical ISG:
/// `lambda_f < 10 / (N_A r_r²) ln((1 - e^(-λr r_r² / 5)) / sqrt(1 - β))`
/// with `β = base^N`. β is carried in log space.
pub fn supercritical_sufficient_bound(lambda_r: f64, r_r: f64, r_f: f64) -> Result<SupercriticalBound> {
    non_negative("lambda_r", lambda_r)?;
    let geom = dependency_counts(r_f, r_r)?;
    let log_beta = geom.n as f64 * beta_base().ln();
    let beta = log_beta.exp();
    let x = lambda_r * r_r * r_r / 5.0;
    // ln(1 - e^-x) - ln(1 - β) / 2
    let log_arg = (-(-x).exp_m1()).ln() - 0.5 * (-beta).ln_1p();
    let raw = 10.0 / (geom.n_a as f64 * r_r * r_r) * log_arg;
    let vacuous = raw.is_nan() || raw <= 0.0;
    Ok(SupercriticalBound {
        bound: if vacuous { 0.0 } else { raw },
        vacuous,
        beta,
        log_beta,
        raw,
    })
}

/// Upper bound on the critical firewall intensity: λc(1) / (4 r_f² - r_r²).
pub fn critical_intensity_upper_bound(r_r: f64, r_f: f64, lc1: LambdaC1) -> Result<f64> {
    positive("r_r", r_r)?;
    positive("r_f", r_f)?;
    let denom = 4.0 * r_f * r_f - r_r * r_r;
    if denom <= 0.0 {
        return Err(invalid(format!("4 r_f² must exceed r_r², got r_f = {r_f}, r_r = {r_r}")));
    }
    Ok(lc1.value / denom)
}

/// Factor by which the critical-intensity upper bound drops when `r_f` doubles:
/// `(16 r_f² - r_r²) / (4 r_f² - r_r²)`, 5 at `r_f = r_r`.
pub fn rf_doubling_reduction(r_r: f64, r_f: f64) -> Result<f64> {
    let lc = LambdaC1::approximation();
    Ok(critical_intensity_upper_bound(r_r, r_f, lc)? / critical_intensity_upper_bound(r_r, 2.0 * r_f, lc)?)
}

/// D2D ranges that keep the device graph connected while the given
/// firewalls keep it sub-critical: `[sqrt(λc(1)/λr), sqrt(4 r_f² - λc(1)/λf)]`.
/// `None` when the interval is empty.
pub fn safe_d2d_range(lambda_r: f64, lambda_f: f64, r_f: f64, lc1: LambdaC1) -> Result<Option<(f64, f64)>> {
    positive("lambda_r", lambda_r)?;
    positive("lambda_f", lambda_f)?;
    positive("r_f", r_f)?;
    let lo = (lc1.value / lambda_r).sqrt();
    let hi_sq = 4.0 * r_f * r_f - lc1.value / lambda_f;
    if hi_sq < 0.0 {
        return Ok(None);
    }
    let hi = hi_sq.sqrt();
    Ok((lo <= hi).then_some((lo, hi)))
}

/// Expected fraction of devices inside some secured zone: 1 - exp(-π λf r_f²).
pub fn protected_fraction(lambda_f: f64, r_f: f64) -> Result<f64> {
    non_negative("lambda_f", lambda_f)?;
    positive("r_f", r_f)?;
    Ok(-(-PI * lambda_f * r_f * r_f).exp_m1())
}

/// Protected fraction at the critical-intensity upper bound:
/// `1 - exp(-π λc(1) / (4 - (r_r / r_f)²))`.
pub fn critical_protected_fraction(r_r: f64, r_f: f64, lc1: LambdaC1) -> Result<f64> {
    positive("r_r", r_r)?;
    positive("r_f", r_f)?;
    if r_f < r_r {
        return Err(invalid(format!("needs r_f >= r_r, got r_f = {r_f}, r_r = {r_r}")));
    }
    let ratio = r_r / r_f;
    Ok(-(-PI * lc1.value / (4.0 - ratio * ratio)).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Too sparse for long-range device connectivity.
    Immune,
    /// Connected and under-protected.
    AtRisk,
    /// Firewalls at or above the critical-intensity upper bound.
    Safeguarded,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Immune => "immune",
            Regime::AtRisk => "at risk",
            Regime::Safeguarded => "safeguarded",
        })
    }
}

pub fn classify_regime(lambda_r: f64, lambda_f: f64, device_threshold: f64, critical_upper_bound: f64) -> Regime {
    if lambda_r <= device_threshold {
        Regime::Immune
    } else if lambda_f >= critical_upper_bound {
        Regime::Safeguarded
    } else {
        Regime::AtRisk
    }
}

/// All closed-form quantities for one configuration. Fields that could not
/// be evaluated are `None` and explained in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lc1: f64,
    pub lc1_provenance: Lc1Provenance,
    pub device_percolation_threshold: Option<f64>,
    pub subcritical_sufficient_lambda_f: Option<f64>,
    pub subcritical_sufficient_lambda_f_rounded: Option<f64>,
    pub closed_face_prob: Option<f64>,
    pub supercritical_bound: Option<f64>,
    pub supercritical_vacuous: Option<bool>,
    pub beta: Option<f64>,
    pub log_beta: Option<f64>,
    pub critical_upper_bound: Option<f64>,
    pub rf_doubling_reduction: Option<f64>,
    pub d2d_range_lo: Option<f64>,
    pub d2d_range_hi: Option<f64>,
    pub d2d_range_feasible: Option<bool>,
    pub protected_fraction: Option<f64>,
    pub critical_protected_fraction: Option<f64>,
    pub regime: Option<Regime>,
    pub errors: BTreeMap<String, String>,
}

fn record<T>(errors: &mut BTreeMap<String, String>, field: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.insert(field.to_string(), e.to_string());
            None
        }
    }
}

pub fn evaluate_all(config: &NetworkConfig, lc1: LambdaC1) -> BoundsReport {
    let mut errors = BTreeMap::new();
    let (lr, rr, lf, rf) = (config.lambda_r, config.r_r, config.lambda_f, config.r_f);

    let device_percolation_threshold = record(&mut errors, "device_percolation_threshold", device_percolation_threshold(rr, lc1));
    let subcritical = record(&mut errors, "subcritical_sufficient_lambda_f", subcritical_sufficient_intensity(rr));
    let subcritical_rounded = record(
        &mut errors,
        "subcritical_sufficient_lambda_f_rounded",
        subcritical_sufficient_intensity_rounded(rr),
    );
    let closed_face_prob = record(&mut errors, "closed_face_prob", closed_face_probability(lf, rr));
    let supercritical = record(&mut errors, "supercritical_bound", supercritical_sufficient_bound(lr, rr, rf));
    let critical_upper_bound = record(&mut errors, "critical_upper_bound", critical_intensity_upper_bound(rr, rf, lc1));
    let doubling = record(&mut errors, "rf_doubling_reduction", rf_doubling_reduction(rr, rf));
    let range = record(&mut errors, "d2d_range", safe_d2d_range(lr, lf, rf, lc1));
    let protected = record(&mut errors, "protected_fraction", protected_fraction(lf, rf));
    let critical_protected = record(
        &mut errors,
        "critical_protected_fraction",
        critical_protected_fraction(rr, rf, lc1),
    );
    let regime = match (device_percolation_threshold, critical_upper_bound) {
        (Some(t), Some(u)) => Some(classify_regime(lr, lf, t, u)),
        _ => None,
    };

    BoundsReport {
        lc1: lc1.value,
        lc1_provenance: lc1.provenance,
        device_percolation_threshold,
        subcritical_sufficient_lambda_f: subcritical,
        subcritical_sufficient_lambda_f_rounded: subcritical_rounded,
        closed_face_prob,
        supercritical_bound: supercritical.map(|s| s.bound),
        supercritical_vacuous: supercritical.map(|s| s.vacuous),
        beta: supercritical.map(|s| s.beta),
        log_beta: supercritical.map(|s| s.log_beta),
        critical_upper_bound,
        rf_doubling_reduction: doubling,
        d2d_range_lo: range.flatten().map(|r| r.0),
        d2d_range_hi: range.flatten().map(|r| r.1),
        d2d_range_feasible: range.map(|r| r.is_some()),
        protected_fraction: protected,
        critical_protected_fraction: critical_protected,
        regime,
        errors,
    }
}

/// Rounds to 12 significant digits.
fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

impl BoundsReport {
    /// Flat JSON object, numbers rounded to 12 significant digits.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let serde_json::Value::Object(map) = &mut value {
            for v in map.values_mut() {
                if let Some(f) = v.as_f64().filter(|_| v.is_f64()) {
                    *v = serde_json::Value::from(round12(f));
                }
            }
        }
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    /// Two-column human-readable table.
    pub fn to_table(&self) -> String {
        let num = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{:.6}", round12(x)));
        let sci = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4e}"));
        let range = match (self.d2d_range_lo, self.d2d_range_hi, self.d2d_range_feasible) {
            (Some(lo), Some(hi), _) => format!("[{lo:.6}, {hi:.6}]"),
            (_, _, Some(false)) => "infeasible".to_string(),
            _ => "n/a".to_string(),
        };
        let rows = [
            ("lambda_c(1)", format!("{}", self.lc1)),
            ("device percolation threshold", num(self.device_percolation_threshold)),
            ("sub-critical sufficient lambda_f", num(self.subcritical_sufficient_lambda_f)),
            ("  (rounded 3.65 / r_r^2)", num(self.subcritical_sufficient_lambda_f_rounded)),
            ("closed face probability", num(self.closed_face_prob)),
            (
                "super-critical sufficient lambda_f",
                match self.supercritical_vacuous {
                    Some(true) => "vacuous".to_string(),
                    _ => sci(self.supercritical_bound),
                },
            ),
            ("beta", sci(self.beta)),
            ("critical intensity upper bound", num(self.critical_upper_bound)),
            ("  reduction when r_f doubles", num(self.rf_doubling_reduction)),
            ("safe D2D range", range),
            ("protected fraction", num(self.protected_fraction)),
            ("critical protected fraction", num(self.critical_protected_fraction)),
            ("regime", self.regime.map_or("n/a".to_string(), |r| r.to_string())),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<36} {v}\n"));
        }
        for (k, e) in &self.errors {
            out.push_str(&format!("error[{k}]: {e}\n"));
        }
        out
    }
}
