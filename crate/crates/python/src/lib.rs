//! Python bindings: `import lxcim`.

use lxcim_core::lxc::{check_rank_lxc_invariance, duplicate_dataset, exchange_subset, ExchangeMask};
use lxcim_core::metrics::{self, Curve, Metric};
use lxcim_core::verify::{generate as generate_dataset, GeneratorConfig, GeneratorKind, WeightMode};
use lxcim_core::{io, Dataset, SymmetricSpec};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spec(s_star: f64) -> PyResult<SymmetricSpec> {
    if s_star.is_finite() {
        Ok(SymmetricSpec::new(s_star))
    } else {
        Err(PyValueError::new_err("s_star must be finite"))
    }
}

/// Weighted binary predictions: one score, 0/1 label and positive weight per sample.
#[pyclass(name = "Dataset", module = "lxcim", frozen)]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (scores, labels, weights = None))]
    fn new(scores: Vec<f64>, labels: Vec<i64>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        if labels.len() != scores.len() || weights.as_ref().is_some_and(|w| w.len() != scores.len()) {
            return Err(PyValueError::new_err("scores, labels and weights must have equal length"));
        }
        let bits = labels
            .iter()
            .map(|&l| match l {
                0 | 1 => Ok(l as u8),
                _ => Err(PyValueError::new_err(format!("labels must be 0 or 1, got {l}"))),
            })
            .collect::<PyResult<Vec<u8>>>()?;
        let inner = Dataset::from_parts(&scores, &bits, weights.as_deref()).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Reads a CSV or JSONL prediction file.
    #[staticmethod]
    #[pyo3(signature = (path, positive_label = "1", format = None))]
    fn from_file(path: std::path::PathBuf, positive_label: &str, format: Option<&str>) -> PyResult<Self> {
        let format = match format {
            Some(f) => f.parse().map_err(value_error)?,
            None => io::Format::from_path(&path),
        };
        let ing = io::ingest(&path, format, positive_label, 0.0).map_err(|e| match e {
            io::FileError::Open { .. } => PyIOError::new_err(e.to_string()),
            _ => value_error(e),
        })?;
        Ok(Self { inner: ing.dataset })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: PyRef<'_, PyDataset>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, total_weight={})", self.inner.len(), self.inner.total_weight())
    }

    #[getter]
    fn scores(&self) -> Vec<f64> {
        self.inner.iter().map(|s| s.score()).collect()
    }

    #[getter]
    fn labels(&self) -> Vec<u8> {
        self.inner.iter().map(|s| s.label().as_bit()).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.iter().map(|s| s.weight()).collect()
    }

    #[getter]
    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }
}

fn wrap(inner: Dataset) -> PyDataset {
    PyDataset { inner }
}

#[pyfunction]
#[pyo3(name = "lxcim", signature = (d, s_star = 0.0))]
fn lxcim_score(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<f64> {
    metrics::lxcim(&d.inner, &spec(s_star)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn audrc(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<f64> {
    metrics::audrc(&d.inner, &spec(s_star)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn accuracy(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<f64> {
    metrics::accuracy(&d.inner, &spec(s_star)?).map_err(value_error)
}

/// Raises `ValueError` when only one class is present.
#[pyfunction]
fn auroc(d: PyRef<'_, PyDataset>) -> PyResult<f64> {
    metrics::auroc(&d.inner).map_err(value_error)
}

/// All four metrics as a dict; `auroc` is None on single-class data.
#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn report<'py>(py: Python<'py>, d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = metrics::report(&d.inner, &spec(s_star)?).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("lxcim", r.lxcim)?;
    out.set_item("accuracy", r.accuracy)?;
    out.set_item("auroc", r.auroc)?;
    out.set_item("audrc", r.audrc)?;
    out.set_item("n", r.n)?;
    out.set_item("total_weight", r.total_weight)?;
    Ok(out)
}

fn points(c: Curve) -> Vec<(f64, f64)> {
    c.points
}

#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn cumulative_accuracy_curve(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<Vec<(f64, f64)>> {
    metrics::cumulative_accuracy_curve(&d.inner, &spec(s_star)?)
        .map(points)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn accuracy_rate_curve(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<Vec<(f64, f64)>> {
    metrics::accuracy_rate_curve(&d.inner, &spec(s_star)?)
        .map(points)
        .map_err(value_error)
}

#[pyfunction]
fn roc_curve(d: PyRef<'_, PyDataset>) -> PyResult<Vec<(f64, f64)>> {
    metrics::roc_curve(&d.inner).map(points).map_err(value_error)
}

/// Reflects the score and flips the label of every listed sample.
#[pyfunction]
#[pyo3(signature = (d, indices, s_star = 0.0))]
fn exchange(d: PyRef<'_, PyDataset>, indices: Vec<usize>, s_star: f64) -> PyResult<PyDataset> {
    exchange_subset(&d.inner, &ExchangeMask::new(indices), &spec(s_star)?)
        .map(wrap)
        .map_err(value_error)
}

/// The samples followed by their exchanged copies.
#[pyfunction]
#[pyo3(signature = (d, s_star = 0.0))]
fn duplicate(d: PyRef<'_, PyDataset>, s_star: f64) -> PyResult<PyDataset> {
    duplicate_dataset(&d.inner, &spec(s_star)?)
        .map(wrap)
        .map_err(value_error)
}

/// Random local exchanges; returns a dict with `invariant`, `baseline`,
/// `max_deviation` and the first changing mask as `witness` (or None).
#[pyfunction]
#[pyo3(signature = (d, metric = "lxcim", trials = 100, seed = 0, s_star = 0.0))]
fn check_invariance<'py>(
    py: Python<'py>,
    d: PyRef<'_, PyDataset>,
    metric: &str,
    trials: usize,
    seed: u64,
    s_star: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let metric: Metric = metric.parse().map_err(PyValueError::new_err)?;
    let spec = spec(s_star)?;
    let r = check_rank_lxc_invariance(|x| metric.evaluate(x, &spec), &d.inner, &spec, trials, seed)
        .map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("invariant", r.is_invariant())?;
    out.set_item("baseline", r.baseline)?;
    out.set_item("max_deviation", r.max_deviation)?;
    out.set_item(
        "witness",
        r.violation.map(|v| v.mask.indices().collect::<Vec<usize>>()),
    )?;
    Ok(out)
}

/// Synthetic dataset: kind is "random", "ideal", "adversarial" or "biased" (needs p).
#[pyfunction]
#[pyo3(signature = (kind, n, seed = 0, p = None, random_weights = false))]
fn generate(kind: &str, n: usize, seed: u64, p: Option<f64>, random_weights: bool) -> PyResult<PyDataset> {
    let kind = match (kind, p) {
        ("random", None) => GeneratorKind::Random,
        ("ideal", None) => GeneratorKind::Ideal,
        ("adversarial", None) => GeneratorKind::Adversarial,
        ("biased", Some(p)) => GeneratorKind::Biased(p),
        ("biased", None) => return Err(PyValueError::new_err("kind 'biased' needs p")),
        (other, _) => return Err(PyValueError::new_err(format!("unsupported kind/p combination: {other}"))),
    };
    let weights = if random_weights {
        WeightMode::RandomPositive
    } else {
        WeightMode::Uniform
    };
    generate_dataset(&GeneratorConfig::new(kind, n, seed).with_weights(weights))
        .map(wrap)
        .map_err(value_error)
}

#[pymodule]
#[pyo3(name = "lxcim")]
fn lxcim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(lxcim_score, m)?)?;
    m.add_function(wrap_pyfunction!(audrc, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(auroc, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(cumulative_accuracy_curve, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy_rate_curve, m)?)?;
    m.add_function(wrap_pyfunction!(roc_curve, m)?)?;
    m.add_function(wrap_pyfunction!(exchange, m)?)?;
    m.add_function(wrap_pyfunction!(duplicate, m)?)?;
    m.add_function(wrap_pyfunction!(check_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
