//! Python bindings: presented algebras with normal forms and bases, the
//! structural verification suites, projector matrices and the numeric
//! winding pairing.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList};
use serde_json::Value;

use qhopf::bundle::HopfFibration;
use qhopf::galois::StrongConnection;
use qhopf::ncpoly::word_to_text;
use qhopf::oper;
use qhopf::report::CheckReport;
use qhopf::rewrite::presets;
use qhopf::scalar::{parse_scalar, AlgebraParams};

fn to_py_err(e: qhopf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn make_params(p: &str, q: &str) -> PyResult<AlgebraParams> {
    let p = parse_scalar(p).map_err(to_py_err)?;
    let q = parse_scalar(q).map_err(to_py_err)?;
    AlgebraParams::new(p, q).map_err(to_py_err)
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .into_any()
                    .unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn reports_to_py(py: Python<'_>, reports: &[CheckReport]) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(reports)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// A presented *-algebra with exact normal forms: one of "disc",
/// "disc-p", "disc-q", "circle", "sphere", "s3", "hopf-u1".
#[pyclass(name = "Presentation")]
struct PyPresentation {
    inner: qhopf::Presentation,
}

#[pymethods]
impl PyPresentation {
    #[new]
    #[pyo3(signature = (name, p = "1/2", q = "1/4"))]
    fn new(name: &str, p: &str, q: &str) -> PyResult<Self> {
        let params = make_params(p, q)?;
        Ok(PyPresentation {
            inner: presets::by_name(name, &params).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// Letter names in their term order.
    #[getter]
    fn letters(&self) -> Vec<String> {
        self.inner
            .alphabet
            .letters()
            .map(|l| self.inner.alphabet.name(l).to_string())
            .collect()
    }

    /// Normal form of a parsed expression, as canonical text.
    fn nf(&self, expr: &str) -> PyResult<String> {
        let f = self.inner.parse(expr).map_err(to_py_err)?;
        Ok(self.inner.nf_extending(&f).map_err(to_py_err)?.to_text())
    }

    /// Normal words of exactly the given degree.
    fn basis(&self, degree: usize) -> PyResult<Vec<String>> {
        self.inner.ensure_complete(degree).map_err(to_py_err)?;
        Ok(self
            .inner
            .basis(degree)
            .map_err(to_py_err)?
            .iter()
            .map(|w| word_to_text(w, &self.inner.alphabet))
            .collect())
    }

    /// Normal words of all degrees up to the given one.
    fn basis_upto(&self, degree: usize) -> PyResult<Vec<String>> {
        self.inner.ensure_complete(degree).map_err(to_py_err)?;
        Ok(self
            .inner
            .basis_upto(degree)
            .map_err(to_py_err)?
            .iter()
            .map(|w| word_to_text(w, &self.inner.alphabet))
            .collect())
    }

    /// Completes the rewrite system up to a degree; returns the number of
    /// rules afterwards.
    fn complete(&self, degree: usize) -> PyResult<usize> {
        self.inner.ensure_complete(degree).map_err(to_py_err)?;
        Ok(self.inner.system().rules().len())
    }

    /// Degree up to which all critical pairs are known to resolve.
    fn completed_to(&self) -> usize {
        self.inner.completed_to()
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?})", self.inner.name)
    }
}

/// Runs the bundle structure suite (coverings, cocycle, trivializations,
/// completeness, embedding rank) at the given degree; returns a list of
/// check dicts.
#[pyfunction]
#[pyo3(signature = (degree = 3, p = "1/2", q = "1/4"))]
fn verify_bundle(py: Python<'_>, degree: usize, p: &str, q: &str) -> PyResult<Py<PyAny>> {
    let params = make_params(p, q)?;
    let fib = HopfFibration::new(&params).map_err(to_py_err)?;
    let reports = fib.verify_bundle(degree).map_err(to_py_err)?;
    reports_to_py(py, &reports)
}

/// Runs the strong-connection suite (canonical map, unit contraction,
/// homogeneity) for windings up to the bound.
#[pyfunction]
#[pyo3(signature = (max_winding = 3, p = "1/2", q = "1/4"))]
fn verify_galois(py: Python<'_>, max_winding: i64, p: &str, q: &str) -> PyResult<Py<PyAny>> {
    let params = make_params(p, q)?;
    let pres = presets::s3(&params).map_err(to_py_err)?;
    let conn = StrongConnection::new(&pres).map_err(to_py_err)?;
    let mut reports = conn.verify_galois(max_winding).map_err(to_py_err)?;
    reports.extend(conn.verify_unit_contraction(max_winding).map_err(to_py_err)?);
    reports.extend(conn.verify_homogeneity(max_winding).map_err(to_py_err)?);
    reports_to_py(py, &reports)
}

/// The representation family names.
#[pyfunction]
fn families() -> Vec<String> {
    oper::FAMILY_NAMES.iter().map(|s| s.to_string()).collect()
}

/// Largest relation residual of a representation family inside the
/// window.
#[pyfunction]
#[pyo3(signature = (family, dim = 64, window = 58, p = "1/2", q = "1/4", phases = vec![]))]
fn relation_residual(
    family: &str,
    dim: usize,
    window: usize,
    p: &str,
    q: &str,
    phases: Vec<f64>,
) -> PyResult<f64> {
    let params = make_params(p, q)?;
    let fam = oper::build_family(family, &params, dim, &phases).map_err(to_py_err)?;
    fam.rep.relation_residual(&fam.pres, window).map_err(to_py_err)
}

/// Operator-norm bounds of the generator images of a family.
#[pyfunction]
#[pyo3(signature = (family, dim = 64, p = "1/2", q = "1/4"))]
fn generator_norms(family: &str, dim: usize, p: &str, q: &str) -> PyResult<Vec<(String, f64)>> {
    let params = make_params(p, q)?;
    let fam = oper::build_family(family, &params, dim, &[]).map_err(to_py_err)?;
    Ok(fam.rep.generator_norms())
}

/// Projector matrix of the winding-n line bundle, entries as canonical
/// text.
#[pyfunction]
#[pyo3(signature = (winding, p = "1/2", q = "1/4"))]
fn projector(winding: i64, p: &str, q: &str) -> PyResult<Vec<Vec<String>>> {
    let params = make_params(p, q)?;
    let pres = presets::s3(&params).map_err(to_py_err)?;
    let conn = StrongConnection::new(&pres).map_err(to_py_err)?;
    let e = conn.projector(winding).map_err(to_py_err)?;
    Ok(e.entries
        .iter()
        .map(|row| row.iter().map(|f| f.to_text()).collect())
        .collect())
}

/// Numeric pairing of the difference trace with the winding-n projector;
/// returns a report dict with the value, tail bound and nearest integer.
#[pyfunction]
#[pyo3(signature = (winding, dim = 128, window = 64, p = "1/2", q = "1/4"))]
fn pairing(
    py: Python<'_>,
    winding: i64,
    dim: usize,
    window: usize,
    p: &str,
    q: &str,
) -> PyResult<Py<PyAny>> {
    let params = make_params(p, q)?;
    let pres = presets::s3(&params).map_err(to_py_err)?;
    let conn = StrongConnection::new(&pres).map_err(to_py_err)?;
    let e = conn.projector(winding).map_err(to_py_err)?;
    let report = oper::chern_pairing(&pres, &e, dim, window).map_err(to_py_err)?;
    let v = serde_json::to_value(&report)
        .map_err(|err| PyValueError::new_err(err.to_string()))?;
    json_to_py(py, &v)
}

#[pymodule]
fn qhopf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPresentation>()?;
    m.add_function(wrap_pyfunction!(verify_bundle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_galois, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add_function(wrap_pyfunction!(relation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(generator_norms, m)?)?;
    m.add_function(wrap_pyfunction!(projector, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    Ok(())
}
