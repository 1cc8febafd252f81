//! Python bindings for `rootcert`.
//!
//! Exact rationals cross the boundary as `"num/den"` strings. `p` may be an
//! int or a string such as `"5/2"`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rootcert::rational::{parse_rational, to_fraction_string};
use rootcert::root_maps::{map_eval, weights_for};
use rootcert::theorem::WeightSequence;
use rootcert::{verification, MapKind, Method, Rational, RootParameter, Series, SeriesRoute};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parameter(p: &Bound<'_, PyAny>) -> PyResult<RootParameter> {
    let text = if let Ok(n) = p.extract::<i64>() {
        n.to_string()
    } else {
        p.extract::<String>()?
    };
    RootParameter::parse(&text).map_err(value_error)
}

fn method(name: &str) -> PyResult<Method> {
    match name {
        "newton" => Ok(Method::Newton),
        "halley" => Ok(Method::Halley),
        _ => Err(PyValueError::new_err(format!(
            "method must be \"newton\" or \"halley\", got {name:?}"
        ))),
    }
}

fn map_kind(name: &str) -> PyResult<MapKind> {
    match name {
        "f" => Ok(MapKind::F),
        "g" => Ok(MapKind::G),
        _ => Err(PyValueError::new_err(format!(
            "map must be \"f\" or \"g\", got {name:?}"
        ))),
    }
}

fn fractions(s: &Series<Rational>) -> Vec<String> {
    s.coeffs().iter().map(to_fraction_string).collect()
}

/// Disk sampling plan. Defaults match the command line.
#[pyclass(frozen, name = "SamplingPlan")]
pub struct PySamplingPlan {
    inner: verification::DiskSamplingPlan,
}

#[pymethods]
impl PySamplingPlan {
    #[new]
    #[pyo3(signature = (radii=64, angles=128, random_count=4096, seed=42, exclusion=1e-3))]
    fn new(
        radii: usize,
        angles: usize,
        random_count: usize,
        seed: u64,
        exclusion: f64,
    ) -> PyResult<Self> {
        let inner = verification::DiskSamplingPlan {
            radii_count: radii,
            angle_count: angles,
            random_count,
            seed,
            exclusion_radius: exclusion,
        };
        inner.validate().map_err(value_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// The sample points, in order.
    fn points(&self) -> Vec<Complex64> {
        verification::sample_disk(&self.inner)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SamplingPlan(radii={}, angles={}, random_count={}, seed={}, exclusion={})",
            p.radii_count, p.angle_count, p.random_count, p.seed, p.exclusion_radius
        )
    }
}

fn plan_or_default(plan: Option<&PySamplingPlan>) -> verification::DiskSamplingPlan {
    plan.map(|p| p.inner).unwrap_or_default()
}

#[pyclass(frozen, name = "Certificate")]
pub struct PyCertificate {
    #[pyo3(get)]
    label: String,
    #[pyo3(get)]
    ell: usize,
    #[pyo3(get)]
    order: usize,
    #[pyo3(get)]
    b: Vec<String>,
    #[pyo3(get)]
    c: Vec<String>,
    #[pyo3(get)]
    checks: BTreeMap<String, bool>,
    json: String,
}

#[pymethods]
impl PyCertificate {
    fn all_passed(&self) -> bool {
        self.checks.values().all(|&ok| ok)
    }

    fn failed_checks(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.clone())
            .collect()
    }

    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(label={:?}, ell={}, order={}, passed={})",
            self.label,
            self.ell,
            self.order,
            self.all_passed()
        )
    }
}

fn run_certify(a: &WeightSequence, order: usize) -> PyResult<PyCertificate> {
    let cert = rootcert::certify(a, order).map_err(value_error)?;
    Ok(PyCertificate {
        json: cert.to_json(),
        label: cert.label,
        ell: cert.ell,
        order: cert.order,
        b: cert.b.iter().map(to_fraction_string).collect(),
        c: cert.c.iter().map(to_fraction_string).collect(),
        checks: cert.checks,
    })
}

/// Certificate for the Newton or Halley weights of `p`.
#[pyfunction]
#[pyo3(signature = (method_name, p, order=rootcert::DEFAULT_ORDER))]
fn certify(method_name: &str, p: &Bound<'_, PyAny>, order: usize) -> PyResult<PyCertificate> {
    let m = method(method_name)?;
    run_certify(&weights_for(&parameter(p)?, m.residual_map()), order)
}

/// Certificate for a finite weight prefix; the last weight repeats.
#[pyfunction]
#[pyo3(signature = (weights, order, label="custom"))]
fn certify_weights(weights: Vec<String>, order: usize, label: &str) -> PyResult<PyCertificate> {
    let values = weights
        .iter()
        .map(|w| {
            parse_rational(w).ok_or_else(|| PyValueError::new_err(format!("not a rational: {w:?}")))
        })
        .collect::<PyResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(PyValueError::new_err("weights must not be empty"));
    }
    run_certify(&WeightSequence::from_prefix(label, values), order)
}

#[pyfunction]
#[pyo3(signature = (which, p, order=rootcert::DEFAULT_ORDER, route="weights"))]
fn map_series(
    which: &str,
    p: &Bound<'_, PyAny>,
    order: usize,
    route: &str,
) -> PyResult<Vec<String>> {
    let route = match route {
        "weights" => SeriesRoute::Weights,
        "closed-form" => SeriesRoute::ClosedForm,
        _ => {
            return Err(PyValueError::new_err(format!(
                "route must be \"weights\" or \"closed-form\", got {route:?}"
            )))
        }
    };
    let s = rootcert::map_series(&parameter(p)?, map_kind(which)?, order, route)
        .map_err(value_error)?;
    Ok(fractions(&s))
}

#[pyfunction]
fn binomial_root_series(p: &Bound<'_, PyAny>, order: usize) -> PyResult<Vec<String>> {
    let s = verification::binomial_root_series(&parameter(p)?, order).map_err(value_error)?;
    Ok(fractions(&s))
}

#[pyfunction]
fn iterate_series(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    k: usize,
    order: usize,
) -> PyResult<Vec<String>> {
    let s = verification::iterate_series(&parameter(p)?, method(method_name)?, k, order)
        .map_err(value_error)?;
    Ok(fractions(&s))
}

#[pyfunction]
fn map_value(which: &str, p: &Bound<'_, PyAny>, t: Complex64) -> PyResult<Complex64> {
    map_eval(&parameter(p)?, map_kind(which)?, t).map_err(value_error)
}

/// `[(k, iterate, residual)]` for `k = 0..=k_max`.
#[pyfunction]
fn run_iteration(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    z: Complex64,
    k_max: usize,
) -> PyResult<Vec<(usize, Complex64, Complex64)>> {
    let trace = rootcert::run_iteration(&parameter(p)?, method(method_name)?, z, k_max)
        .map_err(value_error)?;
    Ok(trace
        .steps
        .iter()
        .map(|s| (s.k, s.iterate, s.residual))
        .collect())
}

#[pyclass(frozen, name = "BoundReport")]
pub struct PyBoundReport {
    inner: verification::BoundReport,
}

#[pymethods]
impl PyBoundReport {
    #[getter]
    fn claim(&self) -> &str {
        &self.inner.claim
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn sample_count(&self) -> usize {
        self.inner.sample_count
    }
    #[getter]
    fn max_log_ratio(&self) -> f64 {
        self.inner.max_log_ratio
    }
    #[getter]
    fn violation_count(&self) -> usize {
        self.inner.violations.len()
    }
    #[getter]
    fn underflow_count(&self) -> usize {
        self.inner.underflow_count
    }
    #[getter]
    fn min_iterate_modulus(&self) -> Option<f64> {
        self.inner.min_iterate_modulus
    }
    #[getter]
    fn min_denominator_modulus(&self) -> Option<f64> {
        self.inner.min_denominator_modulus
    }

    fn holds(&self) -> bool {
        self.inner.holds()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "BoundReport({:?}, holds={})",
            self.inner.claim,
            self.inner.holds()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (which, p, plan=None))]
fn check_map_contraction(
    which: &str,
    p: &Bound<'_, PyAny>,
    plan: Option<&PySamplingPlan>,
) -> PyResult<PyBoundReport> {
    let inner = verification::check_map_contraction(
        &parameter(p)?,
        map_kind(which)?,
        &plan_or_default(plan),
    )
    .map_err(value_error)?;
    Ok(PyBoundReport { inner })
}

#[pyfunction]
#[pyo3(signature = (method_name, p, k_max=3, plan=None))]
fn check_residual_bounds(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    k_max: usize,
    plan: Option<&PySamplingPlan>,
) -> PyResult<Vec<PyBoundReport>> {
    let reports = verification::check_residual_bounds(
        &parameter(p)?,
        method(method_name)?,
        k_max,
        &plan_or_default(plan),
    )
    .map_err(value_error)?;
    Ok(reports
        .into_iter()
        .map(|inner| PyBoundReport { inner })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (method_name, p, k_max, floor, plan=None))]
fn check_no_pole_no_zero(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    k_max: usize,
    floor: f64,
    plan: Option<&PySamplingPlan>,
) -> PyResult<PyBoundReport> {
    let inner = verification::check_no_pole_no_zero(
        &parameter(p)?,
        method(method_name)?,
        k_max,
        &plan_or_default(plan),
        floor,
    )
    .map_err(value_error)?;
    Ok(PyBoundReport { inner })
}

/// `(prefix_len, required)` for the iterate against the binomial series.
#[pyfunction]
fn check_prefix_agreement(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    k: usize,
    order: usize,
) -> PyResult<(usize, usize)> {
    let r = verification::check_prefix_agreement(&parameter(p)?, method(method_name)?, k, order)
        .map_err(value_error)?;
    Ok((r.prefix_len, r.required))
}

/// `[(k, log|r_{k+1}| / log|r_k|)]` at one point.
#[pyfunction]
fn estimate_convergence_order(
    method_name: &str,
    p: &Bound<'_, PyAny>,
    z: Complex64,
    k_max: usize,
) -> PyResult<Vec<(usize, f64)>> {
    let est =
        verification::estimate_convergence_order(&parameter(p)?, method(method_name)?, z, k_max)
            .map_err(value_error)?;
    Ok(est.ratios.iter().map(|r| (r.k, r.ratio)).collect())
}

#[pymodule]
fn pyrootcert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySamplingPlan>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyBoundReport>()?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(certify_weights, m)?)?;
    m.add_function(wrap_pyfunction!(map_series, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_root_series, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_series, m)?)?;
    m.add_function(wrap_pyfunction!(map_value, m)?)?;
    m.add_function(wrap_pyfunction!(run_iteration, m)?)?;
    m.add_function(wrap_pyfunction!(check_map_contraction, m)?)?;
    m.add_function(wrap_pyfunction!(check_residual_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(check_no_pole_no_zero, m)?)?;
    m.add_function(wrap_pyfunction!(check_prefix_agreement, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_convergence_order, m)?)?;
    Ok(())
}
