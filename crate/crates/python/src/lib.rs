//! Python bindings: the `pykmod` extension module.
//!
//! Reports are returned as JSON strings; `json.loads` turns them into
//! dictionaries.

use std::collections::BTreeMap;

use kmod_core::generators::{self, GenSpec};
use kmod_core::homology;
use kmod_core::module::Parity;
use kmod_core::orbit::{self, Regularity};
use kmod_core::reflection;
use kmod_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(
    pykmod,
    FalsifiedError,
    PyException,
    "A structural law failed; args are (claim, bundle_json)."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Falsified { claim, bundle } => FalsifiedError::new_err((claim, bundle.to_string())),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A finite-dimensional representation of the bipartite tree T(n).
#[pyclass(name = "TreeModule", module = "pykmod", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTreeModule {
    inner: kmod_core::module::TreeModule,
}

impl From<kmod_core::module::TreeModule> for PyTreeModule {
    fn from(inner: kmod_core::module::TreeModule) -> Self {
        PyTreeModule { inner }
    }
}

#[pymethods]
impl PyTreeModule {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        kmod_core::module::TreeModule::from_json(s)
            .map(Into::into)
            .map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        kmod_core::module::TreeModule::load(path.as_ref())
            .map(Into::into)
            .map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path.as_ref()).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.field().p
    }

    #[getter]
    fn parity(&self) -> &'static str {
        match self.inner.parity() {
            Parity::Omega => "omega",
            Parity::SigmaOmega => "sigma_omega",
        }
    }

    /// Vertex word (`""` for the root) to dimension.
    #[getter]
    fn dims(&self) -> BTreeMap<String, usize> {
        self.inner
            .dims()
            .iter()
            .map(|(v, d)| (v.to_string(), *d))
            .collect()
    }

    #[getter]
    fn total_dim(&self) -> usize {
        self.inner.total_dim()
    }

    fn validate(&self) -> Vec<String> {
        self.inner.validate()
    }

    /// Dimension vector `(d1, d2)` of the push-down to K(n).
    fn pushdown_dims(&self) -> PyResult<(usize, usize)> {
        Ok(self.inner.pushdown().map_err(py_err)?.dims())
    }

    fn sigma(&self) -> PyResult<Self> {
        reflection::sigma(&self.inner)
            .map(Into::into)
            .map_err(py_err)
    }

    fn sigma_minus(&self) -> PyResult<Self> {
        reflection::sigma_minus(&self.inner)
            .map(Into::into)
            .map_err(py_err)
    }

    fn sigma_power(&self, t: i64) -> PyResult<Self> {
        reflection::sigma_power(&self.inner, t)
            .map(Into::into)
            .map_err(py_err)
    }

    fn dual(&self) -> PyResult<Self> {
        self.inner.dual().map(Into::into).map_err(py_err)
    }

    fn direct_sum(&self, other: &PyTreeModule) -> PyResult<Self> {
        self.inner
            .direct_sum(&other.inner)
            .map(Into::into)
            .map_err(py_err)
    }

    /// `(kind, radius, diameter, center)` of the support tree.
    fn classify(&self) -> PyResult<(String, usize, usize, String)> {
        let c = orbit::classify(&self.inner).map_err(py_err)?;
        Ok((
            c.kind.to_string(),
            c.radius,
            c.diameter,
            c.center.to_string(),
        ))
    }

    fn is_indecomposable(&self) -> PyResult<bool> {
        homology::is_indecomposable(&self.inner).map_err(py_err)
    }

    fn is_regular(&self) -> PyResult<bool> {
        Ok(orbit::is_regular(&self.inner).map_err(py_err)? == Regularity::Regular)
    }

    fn end_dim(&self) -> PyResult<usize> {
        Ok(homology::end_radical(&self.inner).map_err(py_err)?.dim())
    }

    fn to_dot(&self, highlight_center: bool) -> PyResult<String> {
        orbit::to_dot(&self.inner, highlight_center).map_err(py_err)
    }

    fn __eq__(&self, other: &PyTreeModule) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "TreeModule(n={}, parity={}, dims=[{}])",
            self.inner.n(),
            self.parity(),
            self.inner.dims_summary()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (l1 = 1, l3 = 1))]
fn example4(l1: u64, l3: u64) -> PyResult<PyTreeModule> {
    generators::fixture_example4(l1, l3)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn fixture_edge(lam: u64, label: u32) -> PyResult<PyTreeModule> {
    generators::fixture_edge(lam, label)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (seed, n = 3, max_total_dim = 24))]
fn random_regular(seed: u64, n: usize, max_total_dim: usize) -> PyResult<PyTreeModule> {
    let spec = GenSpec {
        seed,
        n,
        max_total_dim,
        ..GenSpec::default()
    };
    generators::random_regular(&spec)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn is_isomorphic(a: &PyTreeModule, b: &PyTreeModule) -> bool {
    homology::iso_test(&a.inner, &b.inner).is_some()
}

#[pyfunction]
fn hom_dim(a: &PyTreeModule, b: &PyTreeModule) -> PyResult<usize> {
    Ok(homology::hom_basis(&a.inner, &b.inner)
        .map_err(py_err)?
        .dim())
}

#[pyfunction]
fn ext_dim(a: &PyTreeModule, b: &PyTreeModule) -> PyResult<usize> {
    Ok(homology::ext1(&a.inner, &b.inner).map_err(py_err)?.dim())
}

#[pyfunction]
fn euler_form(a: &PyTreeModule, b: &PyTreeModule) -> i64 {
    homology::euler_form(&a.inner, &b.inner)
}

/// The indecomposable summands, repeated by multiplicity.
#[pyfunction]
fn decompose(m: &PyTreeModule) -> PyResult<Vec<PyTreeModule>> {
    let parts = homology::decompose(&m.inner).map_err(py_err)?;
    Ok(parts
        .into_iter()
        .flat_map(|s| std::iter::repeat_n(s.module, s.multiplicity))
        .map(Into::into)
        .collect())
}

#[pyfunction]
#[pyo3(signature = (m, back = 4, fwd = None))]
fn orbit_report(m: &PyTreeModule, back: usize, fwd: Option<usize>) -> PyResult<String> {
    to_json(&orbit::orbit_report(&m.inner, back, fwd).map_err(py_err)?)
}

#[pyfunction]
fn ar_sequence(z: &PyTreeModule) -> PyResult<String> {
    Ok(homology::ar_sequence(&z.inner)
        .map_err(py_err)?
        .to_json_value()
        .to_string())
}

#[pyfunction]
fn middle_term_check(z: &PyTreeModule) -> PyResult<String> {
    to_json(&orbit::middle_term_check(&z.inner).map_err(py_err)?)
}

#[pyfunction]
fn transition_check(m: &PyTreeModule) -> PyResult<String> {
    to_json(&orbit::transition_check(&m.inner).map_err(py_err)?)
}

/// Runs the command line with `args` (without the program name) and
/// returns `(exit_code, text)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let r = kmod_core::cli::run(std::iter::once("kmod".to_string()).chain(args));
    (r.code, r.text)
}

#[pymodule]
pub fn pykmod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTreeModule>()?;
    m.add("FalsifiedError", m.py().get_type::<FalsifiedError>())?;
    m.add_function(wrap_pyfunction!(example4, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_edge, m)?)?;
    m.add_function(wrap_pyfunction!(random_regular, m)?)?;
    m.add_function(wrap_pyfunction!(is_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(hom_dim, m)?)?;
    m.add_function(wrap_pyfunction!(ext_dim, m)?)?;
    m.add_function(wrap_pyfunction!(euler_form, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_report, m)?)?;
    m.add_function(wrap_pyfunction!(ar_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(middle_term_check, m)?)?;
    m.add_function(wrap_pyfunction!(transition_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
