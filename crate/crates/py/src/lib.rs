//! Python bindings. Rationals cross the boundary as `"p/q"` strings; lattice
//! elements are addressed by label.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use choquet_core::choquet::{choquet_represent, Mode};
use choquet_core::io::{carrier_id, SetFunctionFile};
use choquet_core::lattice::{Elem, FiniteLattice};
use choquet_core::lfv::{lfv_certificate, FiniteMixture, FinitePoisson, LfvOptions};
use choquet_core::random_sets::{
    estimate_functional, unit_lebesgue, unit_window, CompoundSet, Functional, MixtureSet, PoissonProcess,
    RandomSetModel, SimReport,
};
use choquet_core::rational::{format_rational, parse_rational, Rational};
use choquet_core::setfun::{classify_with, levy_divisibility, ClassId, ClassifyOptions, Direction};
use choquet_core::space::IntervalUnion;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(|_| PyValueError::new_err(format!("bad rational {s:?}")))
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite lattice with labelled elements.
#[pyclass(name = "Lattice", frozen, from_py_object)]
#[derive(Clone)]
struct PyLattice {
    inner: Arc<FiniteLattice>,
}

impl PyLattice {
    fn elem(&self, label: &str) -> PyResult<Elem> {
        self.inner
            .index_of(label)
            .ok_or_else(|| PyValueError::new_err(format!("unknown element {label:?}")))
    }

    fn elems(&self, labels: &[String]) -> PyResult<Vec<Elem>> {
        labels.iter().map(|l| self.elem(l)).collect()
    }

    fn labels_of(&self, xs: &[Elem]) -> Vec<String> {
        xs.iter().map(|&x| self.inner.label(x).to_string()).collect()
    }
}

#[pymethods]
impl PyLattice {
    /// Subsets of an `n`-point set under reverse inclusion.
    #[staticmethod]
    fn powerset(n: usize) -> PyResult<Self> {
        if n > 16 {
            return Err(PyValueError::new_err("at most 16 points"));
        }
        Ok(PyLattice { inner: Arc::new(FiniteLattice::powerset_reverse(n)) })
    }

    #[staticmethod]
    fn boolean(n: usize) -> PyResult<Self> {
        if n > 16 {
            return Err(PyValueError::new_err("at most 16 atoms"));
        }
        Ok(PyLattice { inner: Arc::new(FiniteLattice::boolean(n)) })
    }

    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("a chain needs at least one element"));
        }
        Ok(PyLattice { inner: Arc::new(FiniteLattice::chain(n)) })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Lattice({} elements)", self.inner.len())
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn top(&self) -> String {
        self.inner.label(self.inner.top()).to_string()
    }

    #[getter]
    fn bottom(&self) -> String {
        self.inner.label(self.inner.bottom()).to_string()
    }

    fn leq(&self, x: &str, y: &str) -> PyResult<bool> {
        Ok(self.inner.leq(self.elem(x)?, self.elem(y)?))
    }

    fn meet(&self, x: &str, y: &str) -> PyResult<String> {
        Ok(self.inner.label(self.inner.meet(self.elem(x)?, self.elem(y)?)).to_string())
    }

    fn join(&self, x: &str, y: &str) -> PyResult<String> {
        Ok(self.inner.label(self.inner.join(self.elem(x)?, self.elem(y)?)).to_string())
    }
}

/// Exact nonnegative monotone function on a finite lattice.
#[pyclass(name = "SetFunction", frozen)]
struct PySetFunction {
    inner: choquet_core::setfun::SetFunction,
    lattice: PyLattice,
}

#[pymethods]
impl PySetFunction {
    /// `values` maps every label to a `"p/q"` string; `direction` is
    /// `"inc"` or `"dec"`.
    #[new]
    #[pyo3(signature = (lattice, values, direction = "inc"))]
    fn new(lattice: PyLattice, values: BTreeMap<String, String>, direction: &str) -> PyResult<Self> {
        let direction = match direction {
            "inc" => Direction::Increasing,
            "dec" => Direction::Decreasing,
            d => return Err(PyValueError::new_err(format!("unknown direction {d:?}"))),
        };
        if let Some(k) = values.keys().find(|k| lattice.inner.index_of(k).is_none()) {
            return Err(PyValueError::new_err(format!("unknown element {k:?}")));
        }
        let vals = lattice
            .inner
            .elements()
            .map(|x| {
                let label = lattice.inner.label(x);
                let s = values
                    .get(label)
                    .ok_or_else(|| PyValueError::new_err(format!("missing value for {label:?}")))?;
                rational(s)
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inner = choquet_core::setfun::SetFunction::new(lattice.inner.clone(), vals, direction).map_err(err)?;
        Ok(PySetFunction { inner, lattice })
    }

    /// Parses the JSON set-function format used by the command line.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: SetFunctionFile = serde_json::from_str(text).map_err(err)?;
        let inner = file.to_set_function(None).map_err(err)?;
        let lattice = PyLattice { inner: inner.lattice_arc().clone() };
        Ok(PySetFunction { inner, lattice })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&SetFunctionFile::from_set_function(&self.inner)).map_err(err)
    }

    #[getter]
    fn lattice(&self) -> PyLattice {
        self.lattice.clone()
    }

    fn value(&self, x: &str) -> PyResult<String> {
        Ok(format_rational(self.inner.value(self.lattice.elem(x)?)))
    }

    /// Meet difference `∇_A f(x)`.
    fn nabla(&self, a: Vec<String>, x: &str) -> PyResult<String> {
        let a = self.lattice.elems(&a)?;
        Ok(format_rational(&self.inner.nabla(&a, self.lattice.elem(x)?).map_err(err)?))
    }

    /// Join difference `Δ_A f(x)`.
    fn delta(&self, a: Vec<String>, x: &str) -> PyResult<String> {
        let a = self.lattice.elems(&a)?;
        Ok(format_rational(&self.inner.delta(&a, self.lattice.elem(x)?).map_err(err)?))
    }

    /// Möbius weights keyed by label.
    fn mobius_inverse(&self) -> BTreeMap<String, String> {
        let m = self.inner.mobius_inverse();
        let l = self.inner.lattice();
        l.elements()
            .map(|x| (l.label(x).to_string(), format_rational(&m.index_weight(x))))
            .collect()
    }

    /// Class test; the witness, if any, is reported with labels.
    #[pyo3(signature = (class_id, full_subsets = false))]
    fn classify<'py>(&self, py: Python<'py>, class_id: &str, full_subsets: bool) -> PyResult<Bound<'py, PyDict>> {
        let cls: ClassId = class_id.parse().map_err(PyValueError::new_err)?;
        let rep = classify_with(&self.inner, cls, ClassifyOptions { full_subsets }).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("class", cls.to_string())?;
        d.set_item("holds", rep.holds)?;
        match &rep.witness {
            Some(w) => {
                let wd = PyDict::new(py);
                wd.set_item("set", self.lattice.labels_of(&w.set))?;
                wd.set_item("x", self.lattice.inner.label(w.x))?;
                wd.set_item("value", format_rational(&w.value))?;
                d.set_item("witness", wd)?;
            }
            None => d.set_item("witness", py.None())?,
        }
        Ok(d)
    }

    /// Representing measure for `mode` (monotone, alternating, containment,
    /// vee_alternating), keyed by carrier label.
    fn represent(&self, mode: &str) -> PyResult<BTreeMap<String, String>> {
        let mode: Mode = mode.parse().map_err(err)?;
        let m = choquet_represent(&self.inner, mode).map_err(err)?;
        let l = self.inner.lattice();
        Ok(m.weights().map(|(c, w)| (carrier_id(c, l), format_rational(w))).collect())
    }

    #[pyo3(signature = (n_max = 16))]
    fn levy_divisibility<'py>(&self, py: Python<'py>, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
        let rep = levy_divisibility(&self.inner, n_max).map_err(err)?;
        let out = to_py(py, &rep)?;
        if let Some((x, y)) = rep.support_witness {
            out.set_item("support_witness", self.lattice.labels_of(&[x, y]))?;
        }
        Ok(out)
    }
}

fn sim_dict<'py>(py: Python<'py>, r: &SimReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("estimate", r.estimate)?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("theory", r.theory)?;
    d.set_item("theory_exact", r.theory_exact.as_ref().map(format_rational))?;
    d.set_item("z", r.z)?;
    d.set_item("count", r.count)?;
    d.set_item("n", r.n)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

fn estimate<'py, M: RandomSetModel>(
    py: Python<'py>,
    model: &M,
    q: &M::Query,
    n: u64,
    seed: u64,
    functional: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let f: Functional = functional.parse().map_err(PyValueError::new_err)?;
    let r = py.detach(|| estimate_functional(model, f, q, n, seed)).map_err(err)?;
    sim_dict(py, &r)
}

fn weighted(items: Vec<(usize, String)>) -> PyResult<Vec<(usize, Rational)>> {
    items.into_iter().map(|(m, w)| Ok((m, rational(&w)?))).collect()
}

/// Boolean model on a finite ground set: grains are bitmasks with Poisson
/// intensities; `q` is a bitmask.
#[pyfunction]
#[pyo3(signature = (grains, q, n, seed, functional = "avoidance"))]
fn estimate_compound<'py>(
    py: Python<'py>,
    grains: Vec<(usize, String)>,
    q: usize,
    n: u64,
    seed: u64,
    functional: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let model = CompoundSet::new(weighted(grains)?).map_err(err)?;
    estimate(py, &model, &q, n, seed, functional)
}

/// Random set taking finitely many values (bitmasks) with given
/// probabilities.
#[pyfunction]
#[pyo3(signature = (outcomes, q, n, seed, functional = "avoidance"))]
fn estimate_mixture<'py>(
    py: Python<'py>,
    outcomes: Vec<(usize, String)>,
    q: usize,
    n: u64,
    seed: u64,
    functional: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let model = MixtureSet::new(weighted(outcomes)?).map_err(err)?;
    estimate(py, &model, &q, n, seed, functional)
}

/// Poisson process with Lebesgue intensity on `[0, 1]`; `q` is a list of
/// closed intervals `("lo", "hi")`.
#[pyfunction]
#[pyo3(signature = (q, n, seed, functional = "avoidance"))]
fn estimate_poisson<'py>(
    py: Python<'py>,
    q: Vec<(String, String)>,
    n: u64,
    seed: u64,
    functional: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let pairs = q
        .iter()
        .map(|(a, b)| Ok((rational(a)?, rational(b)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let q = IntervalUnion::from_pairs(&pairs).map_err(err)?;
    let process = PoissonProcess::new(unit_lebesgue(), unit_window());
    estimate(py, &process, &q, n, seed, functional)
}

fn options(delta: &str, n_max: usize) -> PyResult<LfvOptions> {
    Ok(LfvOptions { delta: rational(delta)?, n_max, ..LfvOptions::default() })
}

/// Certificate for independent points: point `i` is absent with
/// probability `p[i]`. Windows are bitmasks.
#[pyfunction]
#[pyo3(signature = (p, windows, delta = "1/20", n_max = 20))]
fn lfv_poisson<'py>(
    py: Python<'py>,
    p: Vec<String>,
    windows: Vec<usize>,
    delta: &str,
    n_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = FinitePoisson { p: p.iter().map(|s| rational(s)).collect::<PyResult<_>>()? };
    let opts = options(delta, n_max)?;
    let cert = py.detach(|| lfv_certificate(&phi, &windows, &opts)).map_err(err)?;
    to_py(py, &cert)
}

/// Certificate for a random set taking finitely many values.
#[pyfunction]
#[pyo3(signature = (outcomes, windows, delta = "1/20", n_max = 20))]
fn lfv_mixture<'py>(
    py: Python<'py>,
    outcomes: Vec<(usize, String)>,
    windows: Vec<usize>,
    delta: &str,
    n_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = FiniteMixture { outcomes: weighted(outcomes)? };
    let opts = options(delta, n_max)?;
    let cert = py.detach(|| lfv_certificate(&phi, &windows, &opts)).map_err(err)?;
    to_py(py, &cert)
}

#[pymodule]
fn choquet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PySetFunction>()?;
    m.add_function(wrap_pyfunction!(estimate_compound, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(lfv_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(lfv_mixture, m)?)?;
    Ok(())
}
