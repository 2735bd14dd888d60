//! Python module `pyigmc`.

use std::collections::BTreeMap;

use igmc::deep::{self, BlobSpec, ClassPosterior, LabeledDataset, Schedule, TrainConfig};
use igmc::ecdf::{self, DEFAULT_L1_TOL};
use igmc::engine;
use igmc::generative::{fit_bernoulli, fit_exponential, BuiltinApproach};
use igmc::reference::{self, BetaRef, GammaRef, UniformRef};
use igmc::{Cdf, EmpiricalCdf, Error, IgmcConfig, Interval, SampleSet, Support};
use pyo3::exceptions::{PyArithmeticError, PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(err: Error) -> PyErr {
    match err {
        Error::QuadratureFailure { .. } | Error::NonFiniteLoss { .. } | Error::ZeroMean => {
            PyArithmeticError::new_err(err.to_string())
        }
        Error::Io(_) => PyIOError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn approach(name: &str) -> PyResult<(BuiltinApproach, Support)> {
    match BuiltinApproach::parse(name) {
        Some(BuiltinApproach::Bernoulli) => Ok((BuiltinApproach::Bernoulli, Support::Binary)),
        Some(BuiltinApproach::Exponential) => Ok((BuiltinApproach::Exponential, Support::NonnegReals)),
        None => Err(PyValueError::new_err(format!(
            "unknown approach {name:?}; expected 'bernoulli' or 'exponential'"
        ))),
    }
}

/// Step CDF `F(t) = #{x_i <= t} / n`.
#[pyclass(name = "EmpiricalCdf", frozen)]
struct PyEmpiricalCdf(EmpiricalCdf);

#[pymethods]
impl PyEmpiricalCdf {
    #[new]
    fn new(samples: Vec<f64>) -> PyResult<Self> {
        EmpiricalCdf::from_samples(&samples).map(PyEmpiricalCdf).map_err(py_err)
    }

    fn __call__(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints().to_vec()
    }

    #[getter]
    fn cumulative(&self) -> Vec<f64> {
        self.0.cumulative().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("EmpiricalCdf(steps={}, min={}, max={})", self.0.len(), self.0.min(), self.0.max())
    }
}

/// Success probability `a / M` of the fitted Bernoulli model.
#[pyfunction]
fn fit_bernoulli_p(values: Vec<f64>) -> PyResult<f64> {
    let s = SampleSet::new(values, Support::Binary).map_err(py_err)?;
    Ok(fit_bernoulli(&s).map_err(py_err)?.p())
}

/// Rate `1 / mean` of the fitted exponential model.
#[pyfunction]
fn fit_exponential_rate(values: Vec<f64>) -> PyResult<f64> {
    let s = SampleSet::new(values, Support::NonnegReals).map_err(py_err)?;
    Ok(fit_exponential(&s).map_err(py_err)?.rate())
}

/// Posterior draws `mu_1..mu_N` of the mean. Chains run in parallel with the
/// interpreter lock released; the result depends only on the arguments.
#[pyfunction]
#[pyo3(signature = (values, approach_name, n = 1000, h = 1000, seed = 0))]
fn run_igmc(py: Python<'_>, values: Vec<f64>, approach_name: &str, n: usize, h: usize, seed: u64) -> PyResult<Vec<f64>> {
    let (phi, support) = approach(approach_name)?;
    let initial = SampleSet::new(values, support).map_err(py_err)?;
    let config = IgmcConfig::new(n, h, seed).map_err(py_err)?;
    py.detach(|| engine::run_igmc(&initial, &phi, &config))
        .map(|p| p.into_mus())
        .map_err(py_err)
}

/// Convenience: the Bernoulli experiment on `a` ones out of `m`.
#[pyfunction]
#[pyo3(signature = (m, a, n = 1000, h = 1000, seed = 0))]
fn run_bernoulli(py: Python<'_>, m: usize, a: usize, n: usize, h: usize, seed: u64) -> PyResult<Vec<f64>> {
    let initial = SampleSet::binary_counts(m, a).map_err(py_err)?;
    let config = IgmcConfig::new(n, h, seed).map_err(py_err)?;
    py.detach(|| engine::run_igmc(&initial, &BuiltinApproach::Bernoulli, &config))
        .map(|p| p.into_mus())
        .map_err(py_err)
}

#[pyfunction]
fn posterior_cdf(mus: Vec<f64>) -> PyResult<PyEmpiricalCdf> {
    PyEmpiricalCdf::new(mus)
}

#[pyfunction]
#[pyo3(signature = (f, g, lo = 0.0, hi = 1.0))]
fn l1_step_step(f: &PyEmpiricalCdf, g: &PyEmpiricalCdf, lo: f64, hi: f64) -> PyResult<f64> {
    let domain = Interval::new(lo, hi).map_err(py_err)?;
    Ok(ecdf::l1_distance_step_step(&f.0, &g.0, domain))
}

fn reference_cdf(family: &str, a: f64, b: f64) -> PyResult<Box<dyn Cdf + Send + Sync>> {
    Ok(match family {
        "beta" => Box::new(BetaRef::new(a, b).map_err(py_err)?),
        "gamma" => Box::new(GammaRef::new(a, b).map_err(py_err)?),
        "uniform" => Box::new(UniformRef::new(a, b).map_err(py_err)?),
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown family {family:?}; expected 'beta', 'gamma' or 'uniform'"
            )))
        }
    })
}

/// L1 distance between a step CDF and a `beta(a, b)`, `gamma(shape, rate)`
/// or `uniform(lo, hi)` CDF over `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (f, family, a, b, lo = 0.0, hi = 1.0, tol = DEFAULT_L1_TOL))]
fn l1_to_reference(f: &PyEmpiricalCdf, family: &str, a: f64, b: f64, lo: f64, hi: f64, tol: f64) -> PyResult<f64> {
    let g = reference_cdf(family, a, b)?;
    let domain = Interval::new(lo, hi).map_err(py_err)?;
    ecdf::l1_distance_step_ref(&f.0, g.as_ref(), domain, tol).map_err(py_err)
}

#[pyfunction]
fn ks_to_reference(f: &PyEmpiricalCdf, family: &str, a: f64, b: f64) -> PyResult<f64> {
    let g = reference_cdf(family, a, b)?;
    Ok(ecdf::ks_distance(&f.0, g.as_ref()))
}

#[pyfunction]
#[pyo3(signature = (n, alpha = 0.05))]
fn dkw_band(n: usize, alpha: f64) -> PyResult<f64> {
    ecdf::dkw_band(n, alpha).map_err(py_err)
}

#[pyfunction]
fn beta_cdf(alpha: f64, beta: f64, t: f64) -> PyResult<f64> {
    Ok(reference::beta_cdf(&BetaRef::new(alpha, beta).map_err(py_err)?, t))
}

#[pyfunction]
fn gamma_cdf(shape: f64, rate: f64, t: f64) -> PyResult<f64> {
    Ok(reference::gamma_cdf(&GammaRef::new(shape, rate).map_err(py_err)?, t))
}

#[pyfunction]
fn hoeffding_bound(m: usize, t: f64) -> f64 {
    reference::hoeffding_bound(m, t)
}

#[pyfunction]
fn azuma_tail(m: usize, h: usize, a: f64) -> f64 {
    reference::azuma_tail(m, h, a)
}

#[pyfunction]
fn dkw_tail(n: usize, a: f64) -> f64 {
    reference::dkw_tail(n, a)
}

/// `{"value": ..., "azuma": ..., "dkw": ...}`.
#[pyfunction]
fn theorem1_l1_bound(m: usize, h: usize, n: usize) -> BTreeMap<String, f64> {
    let report = reference::theorem1_l1_bound(m, h, n);
    let mut out = report.terms;
    out.insert("value".into(), report.value);
    out
}

/// Gaussian blob fixture as `(features, labels)`, labels 1-based.
#[pyfunction]
#[pyo3(signature = (classes = 2, per_class = 20, separation = 6.0, seed = 0))]
fn blobs(classes: usize, per_class: usize, separation: f64, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<usize>)> {
    let spec = BlobSpec { classes, per_class, separation, seed };
    let data = spec.generate().map_err(py_err)?;
    let rows = (0..data.len()).map(|i| data.features(i).to_vec()).collect();
    Ok((rows, data.labels().to_vec()))
}

#[pyfunction]
#[pyo3(signature = (classes = 2, separation = 6.0))]
fn blob_centers(classes: usize, separation: f64) -> Vec<[f64; 2]> {
    BlobSpec { classes, separation, ..BlobSpec::default() }.centers()
}

/// Per-chain class frequencies from a deep run.
#[pyclass(name = "ClassPosterior", frozen)]
struct PyClassPosterior(ClassPosterior);

#[pymethods]
impl PyClassPosterior {
    #[getter]
    fn counts(&self) -> Vec<Vec<u32>> {
        self.0.counts().to_vec()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    /// `{"mean": [...], "uncertainty": [...], "cells": [...]}` with
    /// uncertainty `4 * variance` per class.
    fn summarize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let report = deep::summarize_uncertainty(&self.0).map_err(py_err)?;
        let out = pyo3::types::PyDict::new(py);
        out.set_item("cells", report.cells())?;
        out.set_item("top_class", report.top_class())?;
        out.set_item("mean", report.mean)?;
        out.set_item("uncertainty", report.uncertainty)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("ClassPosterior(chains={}, depth={}, classes={})", self.0.chains(), self.0.depth(), self.0.classes())
    }
}

#[pyfunction]
#[pyo3(signature = (
    features, labels, x, n = 20, h = 20, seed = 0, *,
    num_classes = None, epochs = 30, learning_rate = 0.002, momentum = 0.9,
    schedule = "cosine", batch_size = 1, hidden = 16, init_seed = 0, warm_start = false
))]
#[allow(clippy::too_many_arguments)]
fn run_deep_igmc(
    py: Python<'_>,
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    x: Vec<f64>,
    n: usize,
    h: usize,
    seed: u64,
    num_classes: Option<usize>,
    epochs: usize,
    learning_rate: f64,
    momentum: f64,
    schedule: &str,
    batch_size: usize,
    hidden: usize,
    init_seed: u64,
    warm_start: bool,
) -> PyResult<PyClassPosterior> {
    let k = num_classes.unwrap_or_else(|| labels.iter().copied().max().unwrap_or(0));
    let data = LabeledDataset::new(features, labels, k).map_err(py_err)?;
    let schedule = match schedule {
        "cosine" => Schedule::Cosine,
        "constant" => Schedule::Constant,
        other => return Err(PyValueError::new_err(format!("unknown schedule {other:?}"))),
    };
    let cfg = TrainConfig {
        epochs,
        learning_rate,
        momentum,
        schedule,
        batch_size,
        init_seed,
        hidden_width: hidden,
        warm_start,
    };
    let igmc = IgmcConfig::new(n, h, seed).map_err(py_err)?;
    py.detach(|| deep::run_deep_igmc(&data, &x, &cfg, &igmc))
        .map(PyClassPosterior)
        .map_err(py_err)
}

#[pymodule]
fn pyigmc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyEmpiricalCdf>()?;
    m.add_class::<PyClassPosterior>()?;
    m.add_function(wrap_pyfunction!(fit_bernoulli_p, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponential_rate, m)?)?;
    m.add_function(wrap_pyfunction!(run_igmc, m)?)?;
    m.add_function(wrap_pyfunction!(run_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(posterior_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(l1_step_step, m)?)?;
    m.add_function(wrap_pyfunction!(l1_to_reference, m)?)?;
    m.add_function(wrap_pyfunction!(ks_to_reference, m)?)?;
    m.add_function(wrap_pyfunction!(dkw_band, m)?)?;
    m.add_function(wrap_pyfunction!(beta_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_bound, m)?)?;
    m.add_function(wrap_pyfunction!(azuma_tail, m)?)?;
    m.add_function(wrap_pyfunction!(dkw_tail, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_l1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(blobs, m)?)?;
    m.add_function(wrap_pyfunction!(blob_centers, m)?)?;
    m.add_function(wrap_pyfunction!(run_deep_igmc, m)?)?;
    Ok(())
}
