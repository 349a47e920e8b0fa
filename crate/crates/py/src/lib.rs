//! Python bindings for `sfw_core`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sfw_core::bounds::{self, LambdaC1};
use sfw_core::lattice;
use sfw_core::percolation::{self, CriticalSearch};
use sfw_core::{Error, NetworkConfig, Window};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn lc1_of(value: Option<f64>) -> PyResult<LambdaC1> {
    match value {
        None => Ok(LambdaC1::approximation()),
        Some(v) => v.to_string().parse::<LambdaC1>().map_err(to_py),
    }
}

#[pyclass(name = "NetworkConfig", module = "sfw", skip_from_py_object)]
#[derive(Clone)]
struct PyNetworkConfig {
    inner: NetworkConfig,
}

#[pymethods]
impl PyNetworkConfig {
    #[new]
    #[pyo3(signature = (lambda_r, r_r, lambda_f, r_f, window_size=100.0, seed=0, firewall_margin=0.0))]
    fn new(
        lambda_r: f64,
        r_r: f64,
        lambda_f: f64,
        r_f: f64,
        window_size: f64,
        seed: u64,
        firewall_margin: f64,
    ) -> PyResult<Self> {
        let inner = NetworkConfig::new(lambda_r, r_r, lambda_f, r_f, window_size, seed)
            .map_err(to_py)?
            .with_margin(firewall_margin);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn lambda_r(&self) -> f64 {
        self.inner.lambda_r
    }
    #[getter]
    fn r_r(&self) -> f64 {
        self.inner.r_r
    }
    #[getter]
    fn lambda_f(&self) -> f64 {
        self.inner.lambda_f
    }
    #[getter]
    fn r_f(&self) -> f64 {
        self.inner.r_f
    }
    #[getter]
    fn window_size(&self) -> f64 {
        self.inner.window.width()
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.master_seed
    }
    #[getter]
    fn firewall_margin(&self) -> f64 {
        self.inner.firewall_margin
    }

    fn with_lambda_f(&self, lambda_f: f64) -> PyResult<Self> {
        let inner = self.inner.with_lambda_f(lambda_f);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn with_lambda_r(&self, lambda_r: f64) -> PyResult<Self> {
        let inner = self.inner.with_lambda_r(lambda_r);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "NetworkConfig(lambda_r={}, r_r={}, lambda_f={}, r_f={}, window_size={}, seed={}, firewall_margin={})",
            c.lambda_r,
            c.r_r,
            c.lambda_f,
            c.r_f,
            c.window.width(),
            c.master_seed,
            c.firewall_margin
        )
    }
}

/// One sampled world: points, protection status and ISG components.
#[pyclass(name = "Realization", module = "sfw")]
struct PyRealization {
    #[pyo3(get)]
    devices: Vec<(f64, f64)>,
    #[pyo3(get)]
    firewalls: Vec<(f64, f64)>,
    #[pyo3(get)]
    protected: Vec<usize>,
    #[pyo3(get)]
    susceptible: Vec<usize>,
    /// Component label per susceptible device, aligned with `susceptible`.
    #[pyo3(get)]
    components: Vec<usize>,
    #[pyo3(get)]
    left_right: bool,
    #[pyo3(get)]
    bottom_top: bool,
    #[pyo3(get)]
    percolates: bool,
}

#[pymethods]
impl PyRealization {
    fn __repr__(&self) -> String {
        format!(
            "Realization(devices={}, firewalls={}, susceptible={}, percolates={})",
            self.devices.len(),
            self.firewalls.len(),
            self.susceptible.len(),
            if self.percolates { "True" } else { "False" }
        )
    }
}

fn xy(points: &[sfw_core::Point]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.x, p.y)).collect()
}

#[pyfunction]
fn sample_ppp(intensity: f64, window_size: f64, seed: u64) -> PyResult<Vec<(f64, f64)>> {
    let w = Window::square(window_size).map_err(to_py)?;
    let pts = sfw_core::sample_ppp(intensity, w, seed).map_err(to_py)?;
    Ok(xy(&pts.points))
}

#[pyfunction]
#[pyo3(signature = (config, trial=0))]
fn build_isg(config: &PyNetworkConfig, trial: u64) -> PyResult<PyRealization> {
    let seed = sfw_core::seed::trial_seed(config.inner.master_seed, trial);
    let r = sfw_core::build_isg(&config.inner, seed).map_err(to_py)?;
    let sp = percolation::detect_spanning(&r);
    Ok(PyRealization {
        devices: xy(&r.devices.points),
        firewalls: xy(&r.firewalls.points),
        protected: r.classification.protected_idx.clone(),
        susceptible: r.classification.susceptible_idx.clone(),
        components: r.isg.component_label.clone(),
        left_right: sp.left_right,
        bottom_top: sp.bottom_top,
        percolates: sp.percolates,
    })
}

/// Returns `(theta_hat, std_err, spanning_trials, trials)`.
#[pyfunction]
fn estimate_percolation_probability(config: &PyNetworkConfig, trials: usize) -> PyResult<(f64, f64, usize, usize)> {
    let e = percolation::estimate_percolation_probability(&config.inner, trials).map_err(to_py)?;
    Ok((e.theta_hat, e.std_err, e.spanning_trials, e.trials))
}

/// Returns `(lambda_f_critical, [(lambda_f, theta_hat), ...])`.
#[pyfunction]
#[pyo3(signature = (config, trials=50, epsilon=0.02, step=0.005, lambda_f_max=None))]
fn find_critical_firewall_intensity(
    config: &PyNetworkConfig,
    trials: usize,
    epsilon: f64,
    step: f64,
    lambda_f_max: Option<f64>,
) -> PyResult<(f64, Vec<(f64, f64)>)> {
    let lambda_f_max = match lambda_f_max {
        Some(m) => m,
        None => CriticalSearch::default_max(config.inner.r_r, config.inner.r_f).map_err(to_py)?,
    };
    let search = CriticalSearch {
        lambda_f_max,
        step,
        trials,
        epsilon,
    };
    let r = percolation::find_critical_firewall_intensity(&config.inner, &search).map_err(to_py)?;
    Ok((
        r.lambda_f_critical,
        r.evaluated.iter().map(|(l, e)| (*l, e.theta_hat)).collect(),
    ))
}

/// Returns `(mean, std_err, trials_used)`.
#[pyfunction]
fn estimate_protected_fraction(config: &PyNetworkConfig, trials: usize) -> PyResult<(f64, f64, usize)> {
    let p = percolation::estimate_protected_fraction(&config.inner, trials).map_err(to_py)?;
    Ok((p.mean, p.std_err, p.trials_used))
}

#[pyfunction]
#[pyo3(signature = (r_r, lc1=None))]
fn device_percolation_threshold(r_r: f64, lc1: Option<f64>) -> PyResult<f64> {
    bounds::device_percolation_threshold(r_r, lc1_of(lc1)?).map_err(to_py)
}

#[pyfunction]
fn subcritical_sufficient_intensity(r_r: f64) -> PyResult<f64> {
    bounds::subcritical_sufficient_intensity(r_r).map_err(to_py)
}

#[pyfunction]
fn closed_face_probability(lambda_f: f64, r_r: f64) -> PyResult<f64> {
    bounds::closed_face_probability(lambda_f, r_r).map_err(to_py)
}

/// Returns `(a, b, n, n_a)`.
#[pyfunction]
fn dependency_counts(r_f: f64, r_r: f64) -> PyResult<(u64, u64, u64, u64)> {
    let g = bounds::dependency_counts(r_f, r_r).map_err(to_py)?;
    Ok((g.a, g.b, g.n, g.n_a))
}

/// Returns `(bound, vacuous, log_beta)`.
#[pyfunction]
fn supercritical_sufficient_bound(lambda_r: f64, r_r: f64, r_f: f64) -> PyResult<(f64, bool, f64)> {
    let b = bounds::supercritical_sufficient_bound(lambda_r, r_r, r_f).map_err(to_py)?;
    Ok((b.bound, b.vacuous, b.log_beta))
}

#[pyfunction]
#[pyo3(signature = (r_r, r_f, lc1=None))]
fn critical_intensity_upper_bound(r_r: f64, r_f: f64, lc1: Option<f64>) -> PyResult<f64> {
    bounds::critical_intensity_upper_bound(r_r, r_f, lc1_of(lc1)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (lambda_r, lambda_f, r_f, lc1=None))]
fn safe_d2d_range(lambda_r: f64, lambda_f: f64, r_f: f64, lc1: Option<f64>) -> PyResult<Option<(f64, f64)>> {
    bounds::safe_d2d_range(lambda_r, lambda_f, r_f, lc1_of(lc1)?).map_err(to_py)
}

#[pyfunction]
fn protected_fraction(lambda_f: f64, r_f: f64) -> PyResult<f64> {
    bounds::protected_fraction(lambda_f, r_f).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r_r, r_f, lc1=None))]
fn critical_protected_fraction(r_r: f64, r_f: f64, lc1: Option<f64>) -> PyResult<f64> {
    bounds::critical_protected_fraction(r_r, r_f, lc1_of(lc1)?).map_err(to_py)
}

/// Every closed-form quantity as a JSON string.
#[pyfunction]
#[pyo3(signature = (config, lc1=None))]
fn evaluate_all(config: &PyNetworkConfig, lc1: Option<f64>) -> PyResult<String> {
    Ok(bounds::evaluate_all(&config.inner, lc1_of(lc1)?).to_json())
}

/// Returns `(frequency, std_err)`.
#[pyfunction]
fn closed_face_frequency(lambda_f: f64, side: f64, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    lattice::closed_face_frequency(lambda_f, side, samples, seed).map_err(to_py)
}

#[pyfunction]
fn count_dependent_edges_bruteforce(a: u64, b: u64) -> PyResult<u64> {
    lattice::count_dependent_edges_bruteforce(a, b).map_err(to_py)
}

/// List of dicts with `check_name`, `trials`, `violations`, `details`.
#[pyfunction]
#[pyo3(signature = (seed=0, face_samples=2000, blocking_trials=100_000, coupling_realizations=100))]
fn run_validation_suite<'py>(
    py: Python<'py>,
    seed: u64,
    face_samples: usize,
    blocking_trials: usize,
    coupling_realizations: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let size = lattice::SuiteSize {
        face_samples,
        blocking_trials,
        coupling_realizations,
    };
    let rows = lattice::run_validation_suite(seed, size).map_err(to_py)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("check_name", r.check_name)?;
            d.set_item("trials", r.trials)?;
            d.set_item("violations", r.violations)?;
            d.set_item("details", r.details)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn sfw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkConfig>()?;
    m.add_class::<PyRealization>()?;
    m.add_function(wrap_pyfunction!(sample_ppp, m)?)?;
    m.add_function(wrap_pyfunction!(build_isg, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_percolation_probability, m)?)?;
    m.add_function(wrap_pyfunction!(find_critical_firewall_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_protected_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(device_percolation_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(subcritical_sufficient_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(closed_face_probability, m)?)?;
    m.add_function(wrap_pyfunction!(dependency_counts, m)?)?;
    m.add_function(wrap_pyfunction!(supercritical_sufficient_bound, m)?)?;
    m.add_function(wrap_pyfunction!(critical_intensity_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(safe_d2d_range, m)?)?;
    m.add_function(wrap_pyfunction!(protected_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(critical_protected_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_all, m)?)?;
    m.add_function(wrap_pyfunction!(closed_face_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(count_dependent_edges_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation_suite, m)?)?;
    Ok(())
}
