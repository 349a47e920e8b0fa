//! Spanning-cluster detection, Monte Carlo percolation probability and the
//! critical firewall intensity search.
//!
//! Trial `t` of a configuration draws its devices and firewalls from seeds
//! derived from `(master_seed, t)`. Because point counts are drawn by CDF
//! inversion, raising `lambda_f` under a fixed master seed only appends
//! firewalls to every trial, so the per-trial spanning indicator is
//! non-increasing in `lambda_f` and the estimate is monotone across a grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{critical_intensity_upper_bound, LambdaC1};
use crate::error::{invalid, Error, Result};
use crate::network::{classify_points, component_labels, sample_world, NetworkConfig, Realization};
use crate::seed::trial_seed;
use crate::spatial::{Point, Window};

const LEFT: u8 = 1;
const RIGHT: u8 = 2;
const BOTTOM: u8 = 4;
const TOP: u8 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Spanning {
    /// Some component touches both the left and the right strip.
    pub left_right: bool,
    /// Some component touches both the bottom and the top strip.
    pub bottom_top: bool,
    /// A single component touches all four strips. This is the percolation event.
    pub percolates: bool,
}

/// Spanning flags for susceptible `points` with component `labels`.
/// Strips have width `strip` along each window edge, boundary inclusive.
pub fn spanning_of(points: &[Point], labels: &[usize], window: &Window, strip: f64) -> Spanning {
    let mut touch = vec![0u8; points.len()];
    for (p, &l) in points.iter().zip(labels) {
        let mut bits = 0;
        if p.x <= window.x_min + strip {
            bits |= LEFT;
        }
        if p.x >= window.x_max - strip {
            bits |= RIGHT;
        }
        if p.y <= window.y_min + strip {
            bits |= BOTTOM;
        }
        if p.y >= window.y_max - strip {
            bits |= TOP;
        }
        touch[l] |= bits;
    }
    let mut s = Spanning::default();
    for bits in touch {
        s.left_right |= bits & (LEFT | RIGHT) == LEFT | RIGHT;
        s.bottom_top |= bits & (BOTTOM | TOP) == BOTTOM | TOP;
        s.percolates |= bits == LEFT | RIGHT | BOTTOM | TOP;
    }
    s
}

/// Spanning flags of a realization's ISG, strips of width `r_r`.
pub fn detect_spanning(realization: &Realization) -> Spanning {
    let pts: Vec<Point> = realization
        .isg
        .vertices
        .iter()
        .map(|&d| realization.devices.points[d])
        .collect();
    spanning_of(
        &pts,
        &realization.isg.component_label,
        &realization.window(),
        realization.r_r,
    )
}

/// Spanning flags of one trial without materializing adjacency lists.
pub fn trial_spanning(config: &NetworkConfig, trial_seed: u64) -> Result<Spanning> {
    let (devices, firewalls) = sample_world(config, trial_seed)?;
    let class = classify_points(&devices.points, &firewalls.points, config.r_f)?;
    let pts: Vec<Point> = class.susceptible_idx.iter().map(|&i| devices.points[i]).collect();
    let labels = component_labels(&pts, config.r_r)?;
    Ok(spanning_of(&pts, &labels, &config.window, config.r_r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationEstimate {
    pub theta_hat: f64,
    pub trials: usize,
    pub spanning_trials: usize,
    pub std_err: f64,
    pub config: NetworkConfig,
}

impl PercolationEstimate {
    pub fn from_counts(config: NetworkConfig, spanning_trials: usize, trials: usize) -> Self {
        let theta_hat = spanning_trials as f64 / trials as f64;
        Self {
            theta_hat,
            trials,
            spanning_trials,
            std_err: (theta_hat * (1.0 - theta_hat) / trials as f64).sqrt(),
            config,
        }
    }
}

/// Fraction of `trials` independent realizations that percolate.
pub fn estimate_percolation_probability(config: &NetworkConfig, trials: usize) -> Result<PercolationEstimate> {
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    config.validate()?;
    let spanning = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_spanning(config, trial_seed(config.master_seed, t)).map(|s| s.percolates as usize))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(PercolationEstimate::from_counts(*config, spanning, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSearch {
    pub lambda_f_max: f64,
    pub step: f64,
    pub trials: usize,
    pub epsilon: f64,
}

impl CriticalSearch {
    pub const DEFAULT_EPSILON: f64 = 0.02;
    pub const DEFAULT_TRIALS: usize = 50;
    pub const DEFAULT_STEP: f64 = 0.005;

    /// Scan ceiling 1.5x the critical-intensity upper bound at λc(1) = 1.44.
    pub fn default_max(r_r: f64, r_f: f64) -> Result<f64> {
        Ok(1.5 * critical_intensity_upper_bound(r_r, r_f, LambdaC1::default())?)
    }

    pub fn for_config(config: &NetworkConfig) -> Result<Self> {
        Ok(Self {
            lambda_f_max: Self::default_max(config.r_r, config.r_f)?,
            step: Self::DEFAULT_STEP,
            trials: Self::DEFAULT_TRIALS,
            epsilon: Self::DEFAULT_EPSILON,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid(format!("step must be > 0, got {}", self.step)));
        }
        if !(self.lambda_f_max.is_finite() && self.lambda_f_max >= 0.0) {
            return Err(invalid(format!("lambda_f_max must be finite, got {}", self.lambda_f_max)));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(invalid(format!("epsilon must be in [0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Width of the final bisection bracket.
    pub fn resolution(&self) -> f64 {
        self.step / 8.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSearchResult {
    pub lambda_f_critical: f64,
    /// Every evaluated intensity, ascending.
    pub evaluated: Vec<(f64, PercolationEstimate)>,
    pub search: CriticalSearch,
}

impl CriticalSearchResult {
    pub fn estimate_at(&self, lambda_f: f64) -> Option<&PercolationEstimate> {
        self.evaluated.iter().find(|(l, _)| *l == lambda_f).map(|(_, e)| e)
    }
}

/// Smallest firewall intensity whose estimated percolation probability is at
/// most `epsilon`: a coarse scan from 0 in `step` increments, then bisection
/// of the last bracket down to `step / 8`.
pub fn find_critical_firewall_intensity(base: &NetworkConfig, search: &CriticalSearch) -> Result<CriticalSearchResult> {
    search.validate()?;
    base.validate()?;
    let mut evaluated = Vec::new();
    let mut eval = |lambda_f: f64| -> Result<bool> {
        let est = estimate_percolation_probability(&base.with_lambda_f(lambda_f), search.trials)?;
        let stops = est.theta_hat <= search.epsilon;
        evaluated.push((lambda_f, est));
        Ok(stops)
    };

    if eval(0.0)? {
        return Ok(finish(0.0, evaluated, *search));
    }

    let mut lo = 0.0;
    let mut hi = None;
    let mut k = 1u64;
    loop {
        let mut lambda = clean(k as f64 * search.step);
        let last = lambda >= search.lambda_f_max * (1.0 - 1e-12);
        if last {
            lambda = search.lambda_f_max;
        }
        if lambda > lo && eval(lambda)? {
            hi = Some(lambda);
            break;
        }
        if last {
            break;
        }
        lo = lambda;
        k += 1;
    }
    let Some(mut hi) = hi else {
        evaluated.sort_by(|a, b| a.0.total_cmp(&b.0));
        return Err(Error::SearchExhausted {
            lambda_f_max: search.lambda_f_max,
            epsilon: search.epsilon,
            evaluated,
        });
    };

    let resolution = search.resolution();
    while hi - lo > resolution * (1.0 + 1e-9) {
        let mid = clean(0.5 * (lo + hi));
        if eval(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(finish(hi, evaluated, *search))
}

/// Rounds to 12 significant digits so grid points print cleanly.
fn clean(v: f64) -> f64 {
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn finish(lambda: f64, mut evaluated: Vec<(f64, PercolationEstimate)>, search: CriticalSearch) -> CriticalSearchResult {
    evaluated.sort_by(|a, b| a.0.total_cmp(&b.0));
    CriticalSearchResult {
        lambda_f_critical: lambda,
        evaluated,
        search,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtectedFraction {
    pub mean: f64,
    pub std_err: f64,
    /// Trials that contributed (had at least one device).
    pub trials_used: usize,
    pub empty_trials: usize,
}

/// Mean of `|protected| / |devices|` over trials, skipping device-free trials.
pub fn estimate_protected_fraction(config: &NetworkConfig, trials: usize) -> Result<ProtectedFraction> {
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    config.validate()?;
    let fractions: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Option<f64>> {
            let (devices, firewalls) = sample_world(config, trial_seed(config.master_seed, t))?;
            Ok(classify_points(&devices.points, &firewalls.points, config.r_f)?.protected_fraction())
        })
        .collect::<Result<_>>()?;
    let used: Vec<f64> = fractions.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::NoDevices { trials });
    }
    let n = used.len() as f64;
    let mean = used.iter().sum::<f64>() / n;
    let std_err = if used.len() > 1 {
        let var = used.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(ProtectedFraction {
        mean,
        std_err,
        trials_used: used.len(),
        empty_trials: trials - used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::PointSet;

    fn w100() -> Window {
        Window::square(100.0).unwrap()
    }

    #[test]
    fn empty_isg_does_not_span() {
        let r = Realization::from_parts(PointSet::empty(w100()), PointSet::empty(w100()), 2.0, 2.0).unwrap();
        assert_eq!(detect_spanning(&r), Spanning::default());
    }

    #[test]
    fn horizontal_chain_spans_left_right_only() {
        let pts: Vec<Point> = (0..=50).map(|i| Point::new(2.0 * i as f64, 50.0)).collect();
        let r = Realization::from_parts(PointSet::from_points(w100(), pts).unwrap(), PointSet::empty(w100()), 2.0, 2.0).unwrap();
        assert_eq!(
            detect_spanning(&r),
            Spanning {
                left_right: true,
                bottom_top: false,
                percolates: false
            }
        );
    }

    #[test]
    fn cross_spans_both() {
        let mut pts: Vec<Point> = (0..=50).map(|i| Point::new(2.0 * i as f64, 50.0)).collect();
        pts.extend((0..=50).map(|i| Point::new(50.0, 2.0 * i as f64)));
        let r = Realization::from_parts(PointSet::from_points(w100(), pts).unwrap(), PointSet::empty(w100()), 2.0, 2.0).unwrap();
        assert!(detect_spanning(&r).percolates);
    }

    #[test]
    fn one_axis_is_not_percolation() {
        // left-right chain along the bottom edge
        let pts: Vec<Point> = (0..=50).map(|i| Point::new(2.0 * i as f64, 1.0)).collect();
        let r = Realization::from_parts(PointSet::from_points(w100(), pts).unwrap(), PointSet::empty(w100()), 2.0, 2.0).unwrap();
        let s = detect_spanning(&r);
        assert!(s.left_right);
        assert!(!s.bottom_top);
        assert!(!s.percolates);
    }

    #[test]
    fn estimate_with_no_devices_is_zero() {
        let cfg = NetworkConfig::new(0.0, 2.0, 0.0, 2.0, 100.0, 1).unwrap();
        let e = estimate_percolation_probability(&cfg, 20).unwrap();
        assert_eq!(e.theta_hat, 0.0);
        assert_eq!(e.std_err, 0.0);
        assert_eq!(e.trials, 20);
    }

    #[test]
    fn estimate_rejects_zero_trials() {
        let cfg = NetworkConfig::new(0.5, 2.0, 0.0, 2.0, 100.0, 1).unwrap();
        assert!(estimate_percolation_probability(&cfg, 0).is_err());
        assert!(estimate_protected_fraction(&cfg, 0).is_err());
    }

    #[test]
    fn std_err_formula() {
        let cfg = NetworkConfig::new(0.5, 2.0, 0.0, 2.0, 100.0, 1).unwrap();
        let e = PercolationEstimate::from_counts(cfg, 30, 120);
        assert_eq!(e.theta_hat, 0.25);
        assert_eq!(e.std_err, (0.25f64 * 0.75 / 120.0).sqrt());
    }

    #[test]
    fn detect_spanning_agrees_with_lean_path() {
        let cfg = NetworkConfig::new(0.6, 2.0, 0.01, 2.0, 40.0, 77).unwrap();
        for t in 0..10 {
            let s = trial_seed(77, t);
            let r = crate::network::build_isg(&cfg, s).unwrap();
            assert_eq!(detect_spanning(&r), trial_spanning(&cfg, s).unwrap());
        }
    }

    #[test]
    fn protected_fraction_without_firewalls_is_zero() {
        let cfg = NetworkConfig::new(0.2, 2.0, 0.0, 2.0, 50.0, 5).unwrap();
        let f = estimate_protected_fraction(&cfg, 10).unwrap();
        assert_eq!(f.mean, 0.0);
        assert_eq!(f.std_err, 0.0);
    }

    #[test]
    fn protected_fraction_needs_devices() {
        let cfg = NetworkConfig::new(0.0, 2.0, 0.1, 2.0, 50.0, 5).unwrap();
        assert!(matches!(
            estimate_protected_fraction(&cfg, 4),
            Err(Error::NoDevices { trials: 4 })
        ));
    }

    #[test]
    fn search_rejects_bad_parameters() {
        let cfg = NetworkConfig::new(0.8, 2.0, 0.0, 2.0, 20.0, 5).unwrap();
        let mut s = CriticalSearch::for_config(&cfg).unwrap();
        s.step = 0.0;
        assert!(find_critical_firewall_intensity(&cfg, &s).is_err());
    }

    #[test]
    fn search_exhausted_carries_grid() {
        let cfg = NetworkConfig::new(3.0, 2.0, 0.0, 2.0, 20.0, 5).unwrap();
        let s = CriticalSearch {
            lambda_f_max: 0.012,
            step: 0.005,
            trials: 5,
            epsilon: 0.02,
        };
        match find_critical_firewall_intensity(&cfg, &s) {
            Err(Error::SearchExhausted { evaluated, .. }) => {
                let grid: Vec<f64> = evaluated.iter().map(|(l, _)| *l).collect();
                assert_eq!(grid, vec![0.0, 0.005, 0.01, 0.012]);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn default_scan_ceiling() {
        let m = CriticalSearch::default_max(2.0, 2.0).unwrap();
        assert!((m - 0.18).abs() < 1e-12);
    }
}
