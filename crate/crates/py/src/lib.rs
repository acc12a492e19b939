//! Python bindings: band profiles, correlator ratios, regime limits and the
//! spectral checks.

use bandcorr::blockgate::{ct_bound, scenario_generator, suite_params};
use bandcorr::correlator::{ratio_curve, RatioEstimate};
use bandcorr::ensemble::{covariance, spectral_params, BandProfile};
use bandcorr::limits::{critical_limit, factorized_limit, ginibre_limit, A0Mode, DEFAULT_TRUNCATION};
use bandcorr::transferop::{a_star_spectrum, lambda_ell, su2_average_t00, SU2AverageSpec};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: bandcorr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Matrix size `n` and bandwidth `w`.
#[pyclass(name = "BandProfile", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyBandProfile(BandProfile);

#[pymethods]
impl PyBandProfile {
    #[new]
    fn new(n: usize, w: f64) -> PyResult<Self> {
        BandProfile::new(n, w).map(Self).map_err(err)
    }

    /// `W = round(kappa * sqrt(n))`.
    #[staticmethod]
    fn from_kappa(n: usize, kappa: f64) -> PyResult<Self> {
        BandProfile::from_kappa(n, kappa).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn w(&self) -> f64 {
        self.0.w()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa()
    }

    /// The variance profile `J` as a list of rows.
    fn covariance(&self) -> Vec<Vec<f64>> {
        let j = covariance(&self.0);
        j.entries.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// `kappa_u = u_* W / sqrt(n)` at spectral centre `z`.
    fn kappa_u(&self, z: Complex64) -> PyResult<f64> {
        Ok(spectral_params(z, self.0.w()).map_err(err)?.kappa_u(self.0.n()))
    }

    fn __repr__(&self) -> String {
        format!("BandProfile(n={}, w={})", self.0.n(), self.0.w())
    }
}

/// Monte Carlo estimate of the normalised correlator at one offset.
#[pyclass(name = "RatioEstimate", frozen, get_all)]
struct PyRatioEstimate {
    zeta: Complex64,
    ratio: f64,
    stderr_log: f64,
    log_theta12: f64,
    log_theta11: f64,
    log_theta22: f64,
    n_samples: usize,
    n_excluded: usize,
}

impl PyRatioEstimate {
    fn new(zeta: Complex64, e: RatioEstimate) -> Self {
        Self {
            zeta,
            ratio: e.ratio,
            stderr_log: e.stderr_log,
            log_theta12: e.log_theta12,
            log_theta11: e.log_theta11,
            log_theta22: e.log_theta22,
            n_samples: e.n_samples,
            n_excluded: e.n_excluded,
        }
    }
}

#[pymethods]
impl PyRatioEstimate {
    fn __repr__(&self) -> String {
        format!("RatioEstimate(zeta={}, ratio={}, stderr_log={})", self.zeta, self.ratio, self.stderr_log)
    }
}

/// Ratios at every offset in `zetas`, sharing one batch of samples.
#[pyfunction]
#[pyo3(name = "ratio_curve", signature = (profile, z, zetas, n_samples, seed = 1))]
fn ratio_curve_py(
    py: Python<'_>,
    profile: PyBandProfile,
    z: Complex64,
    zetas: Vec<Complex64>,
    n_samples: usize,
    seed: u64,
) -> PyResult<Vec<PyRatioEstimate>> {
    let curve = py.detach(|| ratio_curve(&profile.0, z, &zetas, n_samples, seed)).map_err(err)?;
    Ok(curve.into_iter().map(|(zeta, e)| PyRatioEstimate::new(zeta, e)).collect())
}

fn parse_mode(mode: &str) -> PyResult<A0Mode> {
    mode.parse().map_err(err)
}

#[pyfunction]
#[pyo3(name = "ginibre_limit")]
fn ginibre_py(zeta: Complex64) -> f64 {
    ginibre_limit(zeta)
}

#[pyfunction]
#[pyo3(name = "factorized_limit")]
fn factorized_py(zeta: Complex64) -> f64 {
    factorized_limit(zeta)
}

#[pyfunction]
#[pyo3(name = "critical_limit", signature = (kappa_u, zeta, m = DEFAULT_TRUNCATION, mode = "regime-consistent"))]
fn critical_py(kappa_u: f64, zeta: Complex64, m: usize, mode: &str) -> PyResult<f64> {
    critical_limit(kappa_u, zeta, m, parse_mode(mode)?).map_err(err)
}

/// Leading Nyström eigenvalues of the Gaussian kernel next to `top * λ_*^m`.
#[pyfunction]
#[pyo3(name = "a_star_spectrum", signature = (u_star, w, quad_order = 200, k_max = 7))]
fn spectrum_py<'py>(py: Python<'py>, u_star: f64, w: f64, quad_order: usize, k_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| a_star_spectrum(u_star, w, quad_order, k_max)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lambda_star", r.lambda_star)?;
    d.set_item("computed", r.computed)?;
    d.set_item("predicted", r.predicted)?;
    d.set_item("max_rel_err", r.max_rel_err)?;
    d.set_item("doubling_change", r.doubling_change)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(name = "lambda_ell")]
fn lambda_ell_py(ell: usize, u_star: f64, w: f64) -> f64 {
    lambda_ell(ell, u_star, w)
}

/// Weighted SU(2) average of `t^{(ℓ)}_{00}`.
#[pyfunction]
#[pyo3(name = "su2_average", signature = (ell, w, u_star = 1.0, tr_s = 2.0))]
fn su2_py<'py>(py: Python<'py>, ell: usize, w: f64, u_star: f64, tr_s: f64) -> PyResult<Bound<'py, PyDict>> {
    let spec = SU2AverageSpec { tr_s, ..SU2AverageSpec::new(ell, w, u_star) };
    let r = py.detach(|| su2_average_t00(&spec)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("average", r.average)?;
    d.set_item("one_minus_average", r.one_minus_average)?;
    d.set_item("lambda_ell", r.lambda_ell)?;
    d.set_item("deviation", r.deviation)?;
    Ok(d)
}

/// Block-matrix bounds for the scenario drawn from `seed`.
#[pyfunction]
#[pyo3(name = "block_gate")]
fn block_gate_py(py: Python<'_>, seed: u64) -> PyResult<Bound<'_, PyDict>> {
    let r = scenario_generator(seed, suite_params(seed), None).and_then(|s| ct_bound(&s)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lambda_max_actual", r.lambda_max_actual)?;
    d.set_item("ct1_bound", r.ct1_bound)?;
    d.set_item("ct1_holds", r.ct1_holds)?;
    d.set_item("projection_holds", r.projection_holds)?;
    d.set_item("resolvent_holds", r.resolvent_holds)?;
    d.set_item("leading_in_regime", r.leading_in_regime)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "bandcorr")]
fn bandcorr_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBandProfile>()?;
    m.add_class::<PyRatioEstimate>()?;
    m.add_function(wrap_pyfunction!(ratio_curve_py, m)?)?;
    m.add_function(wrap_pyfunction!(ginibre_py, m)?)?;
    m.add_function(wrap_pyfunction!(factorized_py, m)?)?;
    m.add_function(wrap_pyfunction!(critical_py, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_py, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_ell_py, m)?)?;
    m.add_function(wrap_pyfunction!(su2_py, m)?)?;
    m.add_function(wrap_pyfunction!(block_gate_py, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
