//! Python bindings: `import pyuigraph`.

use pyo3::exceptions::{PyIndexError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use uigraph::audit::{self, Kind};
use uigraph::{
    classic_to_universal, normalize_to_classic, AdjCode, CellProbeCode, DegCode, Error,
    UniversalRep, WordProbes,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::VertexOutOfRange { .. } | Error::IndexOutOfRange { .. } => {
            PyIndexError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<Kind> {
    kind.parse().map_err(to_py)
}

#[pyclass(name = "UniversalRep", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyUniversalRep {
    inner: UniversalRep,
}

#[pymethods]
impl PyUniversalRep {
    /// Right endpoints `e_1..e_n`, vertices 1-based.
    #[new]
    fn new(endpoints: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: UniversalRep::new(endpoints).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn sample(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: uigraph::sample_uniform(n, seed).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: UniversalRep::complete(n).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn edgeless(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: UniversalRep::edgeless(n).map_err(to_py)?,
        })
    }

    /// Converts arbitrary closed intervals `[(left, right), ...]`.
    #[staticmethod]
    fn from_intervals(intervals: Vec<(f64, f64)>) -> PyResult<Self> {
        let classic = normalize_to_classic(&intervals).map_err(to_py)?;
        Ok(Self {
            inner: classic_to_universal(&classic),
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: UniversalRep::from_text(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_binary(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: UniversalRep::from_binary(data).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn endpoints(&self) -> Vec<usize> {
        self.inner.endpoints().to_vec()
    }

    fn adj(&self, i: usize, j: usize) -> PyResult<bool> {
        self.inner.adj(i, j).map_err(to_py)
    }

    fn deg(&self, i: usize) -> PyResult<usize> {
        self.inner.deg(i).map_err(to_py)
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_binary<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_binary())
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        let e = self.inner.endpoints();
        if e.len() <= 16 {
            format!("UniversalRep({e:?})")
        } else {
            format!("UniversalRep(n={})", e.len())
        }
    }
}

#[pyclass(name = "AdjCode", frozen)]
pub struct PyAdjCode {
    inner: AdjCode,
}

#[pymethods]
impl PyAdjCode {
    #[new]
    fn new(rep: PyRef<'_, PyUniversalRep>) -> PyResult<Self> {
        Ok(Self {
            inner: AdjCode::build(&rep.inner).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: AdjCode::from_bytes(data).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn measured_bits(&self) -> usize {
        self.inner.measured_bits()
    }

    fn query(&self, i: usize, j: usize) -> PyResult<bool> {
        self.inner.query(i, j).map_err(to_py)
    }

    fn endpoint(&self, i: usize) -> PyResult<usize> {
        self.inner.endpoint(i).map_err(to_py)
    }

    /// Distinct memory words read by `query(i, j)`.
    fn probes(&self, i: usize, j: usize) -> PyResult<usize> {
        let mut p = WordProbes::new();
        self.inner.query_probed(i, j, &mut p).map_err(to_py)?;
        Ok(p.count())
    }

    fn decode(&self) -> PyResult<PyUniversalRep> {
        Ok(PyUniversalRep {
            inner: self.inner.decode().map_err(to_py)?,
        })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }
}

#[pyclass(name = "DegCode", frozen)]
pub struct PyDegCode {
    inner: DegCode,
}

#[pymethods]
impl PyDegCode {
    #[new]
    fn new(rep: PyRef<'_, PyUniversalRep>) -> PyResult<Self> {
        Ok(Self {
            inner: DegCode::build(&rep.inner).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: DegCode::from_bytes(data).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn measured_bits(&self) -> usize {
        self.inner.measured_bits()
    }

    fn query(&self, i: usize) -> PyResult<usize> {
        self.inner.query(i).map_err(to_py)
    }

    fn probes(&self, i: usize) -> PyResult<usize> {
        let mut p = WordProbes::new();
        self.inner.query_probed(i, &mut p).map_err(to_py)?;
        Ok(p.count())
    }

    fn reconstruct(&self) -> PyResult<PyUniversalRep> {
        Ok(PyUniversalRep {
            inner: self.inner.reconstruct().map_err(to_py)?,
        })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }
}

#[pyclass(name = "CellProbeCode", frozen)]
pub struct PyCellProbeCode {
    inner: CellProbeCode,
}

#[pymethods]
impl PyCellProbeCode {
    #[new]
    fn new(rep: PyRef<'_, PyUniversalRep>) -> PyResult<Self> {
        Ok(Self {
            inner: CellProbeCode::build(&rep.inner).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: CellProbeCode::from_bytes(data).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn data_bits(&self) -> usize {
        self.inner.data_bits()
    }

    #[getter]
    fn meta_bits(&self) -> usize {
        self.inner.meta_bits()
    }

    fn query(&self, i: usize, j: usize) -> PyResult<bool> {
        self.inner.query(i, j).map_err(to_py)
    }

    /// Same answer as `query`, re-deriving the group plan instead of reading it.
    fn query_recomputed(&self, i: usize, j: usize) -> PyResult<bool> {
        self.inner.query_recomputed(i, j, &mut ()).map_err(to_py)
    }

    fn probes(&self, i: usize, j: usize) -> PyResult<usize> {
        let mut p = WordProbes::new();
        self.inner.query_probed(i, j, &mut p).map_err(to_py)?;
        Ok(p.count())
    }

    fn decode(&self) -> PyResult<PyUniversalRep> {
        Ok(PyUniversalRep {
            inner: self.inner.decode().map_err(to_py)?,
        })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }
}

fn report_dict<'py>(py: Python<'py>, r: &audit::AuditReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("kind", r.kind.as_str())?;
    d.set_item("measured_bits", r.measured_bits)?;
    d.set_item("benchmark_bits", r.benchmark_bits)?;
    d.set_item("redundancy", r.redundancy)?;
    d.set_item("normalized_redundancy", r.normalized_redundancy)?;
    d.set_item("probe_min", r.probe_min)?;
    d.set_item("probe_mean", r.probe_mean)?;
    d.set_item("probe_max", r.probe_max)?;
    d.set_item("meta_bits", r.meta_bits)?;
    Ok(d)
}

#[pyfunction]
fn log_factorial_bits(n: usize) -> f64 {
    audit::log_factorial_bits(n)
}

/// Audit one structure kind (`"adj"`, `"deg"` or `"cellprobe"`) at size `n`.
#[pyfunction]
#[pyo3(signature = (kind, n, seed = 1, query_samples = 10_000))]
fn redundancy_report<'py>(
    py: Python<'py>,
    kind: &str,
    n: usize,
    seed: u64,
    query_samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_kind(kind)?;
    let r = py
        .detach(|| audit::redundancy_report(kind, n, seed, query_samples))
        .map_err(to_py)?;
    report_dict(py, &r)
}

/// The audit CSV for a list of sizes.
#[pyfunction]
#[pyo3(signature = (kind, n_list, seed = 1, query_samples = 10_000))]
fn audit_csv(
    py: Python<'_>,
    kind: &str,
    n_list: Vec<usize>,
    seed: u64,
    query_samples: usize,
) -> PyResult<String> {
    let kind = parse_kind(kind)?;
    let rows = py
        .detach(|| audit::redundancy_curve(kind, &n_list, seed, query_samples))
        .map_err(to_py)?;
    Ok(audit::to_csv(&rows))
}

#[pymodule]
mod pyuigraph {
    #[pymodule_export]
    use super::{
        audit_csv, log_factorial_bits, redundancy_report, PyAdjCode, PyCellProbeCode, PyDegCode,
        PyUniversalRep,
    };
}
