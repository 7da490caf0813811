//! Python bindings. Results that are structs on the Rust side come back as
//! plain dicts (round-tripped through JSON).

use std::sync::Arc;

use isotropy_core::cocycle::{alternating_form, is_nondegenerate, isotropy_test, ScanMode, TwoCocycle};
use isotropy_core::cohomology::{h2_representatives, Coefficients};
use isotropy_core::gallery::{make_family, verify_rank_obstruction};
use isotropy_core::group::{center, conjugacy_classes, is_normal, subgroup_generated};
use isotropy_core::iyb::{cocycle_from_one_cocycle, roundtrip_residual};
use isotropy_core::search::{
    containment_obstruction, find_isotropic_central_reduction, isotropic_tower, search_lagrangian,
    LagrangianOptions, Strategy,
};
use isotropy_core::spec::{build_cocycle, build_group, build_one_cocycle, cocycle_shorthand, group_shorthand};
use isotropy_core::twisted::{build_module_nu, heisenberg_pipeline, intertwiner_obstruction};
use isotropy_core::{Elem, Error, FiniteGroup, Limits};
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::Threshold { .. } => PyOverflowError::new_err(e.to_string()),
        Error::Verification(_) | Error::CocycleIdentity(..) | Error::OneCocycleLaw(..) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

/// JSON text or a shorthand such as `family_gn:3,3`.
fn document(text: &str, shorthand: fn(&str) -> Option<Value>) -> PyResult<Value> {
    if let Some(v) = shorthand(text) {
        return Ok(v);
    }
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("neither shorthand nor JSON: {e}")))
}

fn strategy(name: &str) -> PyResult<Strategy> {
    Ok(match name {
        "constructive" => Strategy::Constructive,
        "tower" => Strategy::Tower,
        "exhaustive" => Strategy::Exhaustive,
        "backtracking" => Strategy::Backtracking,
        _ => return Err(PyValueError::new_err(format!("unknown strategy '{name}'"))),
    })
}

#[pyclass(name = "Group", frozen)]
struct PyGroup {
    inner: Arc<FiniteGroup>,
}

impl PyGroup {
    fn check(&self, xs: &[Elem]) -> PyResult<()> {
        match xs.iter().find(|&&x| x as u64 >= self.inner.order()) {
            Some(x) => Err(PyValueError::new_err(format!("element {x} out of range"))),
            None => Ok(()),
        }
    }
}

#[pymethods]
impl PyGroup {
    /// Builds a group from a spec (JSON text or shorthand).
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let doc = document(spec, group_shorthand)?;
        Ok(PyGroup { inner: build_group(&doc, &Limits::default()).map_err(err)? })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn mul(&self, a: Elem, b: Elem) -> PyResult<Elem> {
        self.check(&[a, b])?;
        Ok(self.inner.mul(a, b))
    }

    fn inv(&self, a: Elem) -> PyResult<Elem> {
        self.check(&[a])?;
        Ok(self.inner.inv(a))
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    /// Sorted elements of `⟨gens⟩`.
    fn subgroup(&self, gens: Vec<Elem>) -> PyResult<Vec<Elem>> {
        self.check(&gens)?;
        Ok(subgroup_generated(&self.inner, &gens, &Limits::default()).map_err(err)?.elements().to_vec())
    }

    fn is_normal(&self, gens: Vec<Elem>) -> PyResult<bool> {
        self.check(&gens)?;
        let h = subgroup_generated(&self.inner, &gens, &Limits::default()).map_err(err)?;
        Ok(is_normal(&self.inner, &h))
    }

    fn center(&self) -> PyResult<Vec<Elem>> {
        Ok(center(&self.inner, &Limits::default()).map_err(err)?.elements().to_vec())
    }

    fn conjugacy_classes(&self) -> PyResult<Vec<Vec<Elem>>> {
        conjugacy_classes(&self.inner, &Limits::default()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Group({}, order={})", self.inner.label(), self.inner.order())
    }
}

#[pyclass(name = "Cocycle", frozen)]
struct PyCocycle {
    inner: TwoCocycle,
}

impl PyCocycle {
    fn span(&self, gens: &[Elem]) -> PyResult<isotropy_core::SubgroupSet> {
        let g = self.inner.group();
        if let Some(x) = gens.iter().find(|&&x| x as u64 >= g.order()) {
            return Err(PyValueError::new_err(format!("element {x} out of range")));
        }
        subgroup_generated(g, gens, &Limits::default()).map_err(err)
    }
}

#[pymethods]
impl PyCocycle {
    #[new]
    fn new(group: &PyGroup, spec: &str) -> PyResult<Self> {
        let doc = document(spec, cocycle_shorthand)?;
        Ok(PyCocycle { inner: build_cocycle(&group.inner, &doc, &Limits::default()).map_err(err)? })
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup { inner: self.inner.group().clone() }
    }

    fn __call__(&self, g: Elem, h: Elem) -> u64 {
        self.inner.eval(g, h)
    }

    fn alternating_form(&self, g: Elem, h: Elem) -> u64 {
        alternating_form(&self.inner, g, h)
    }

    #[pyo3(signature = (exhaustive = false))]
    fn is_nondegenerate(&self, py: Python<'_>, exhaustive: bool) -> PyResult<Py<PyAny>> {
        let mode = if exhaustive { ScanMode::Exhaustive } else { ScanMode::ClassRepresentatives };
        let v = py.detach(|| is_nondegenerate(&self.inner, &Limits::default(), mode)).map_err(err)?;
        to_py(py, &v)
    }

    fn isotropy(&self, py: Python<'_>, gens: Vec<Elem>) -> PyResult<Py<PyAny>> {
        let h = self.span(&gens)?;
        to_py(py, &isotropy_test(&self.inner, &h, &Limits::default()).map_err(err)?)
    }

    fn tower(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let t = py.detach(|| isotropic_tower(&self.inner, &Limits::default())).map_err(err)?;
        to_py(py, &t)
    }

    #[pyo3(signature = (normal_only = false, strategy = "exhaustive", contains = None))]
    fn lagrangian(&self, py: Python<'_>, normal_only: bool, strategy: &str, contains: Option<Vec<Elem>>) -> PyResult<Py<PyAny>> {
        let must_contain = contains.map(|g| self.span(&g)).transpose()?;
        let opts = LagrangianOptions { normal_only, must_contain, budget: None };
        let s = self::strategy(strategy)?;
        let out = py.detach(|| search_lagrangian(&self.inner, &opts, s, &Limits::default())).map_err(err)?;
        to_py(py, &out)
    }

    #[pyo3(signature = (k, branching = false))]
    fn construct(&self, py: Python<'_>, k: u32, branching: bool) -> PyResult<Py<PyAny>> {
        let out = py
            .detach(|| find_isotropic_central_reduction(&self.inner, k, branching, &Limits::default()))
            .map_err(err)?;
        to_py(py, &out)
    }

    fn obstruct(&self, py: Python<'_>, gens: Vec<Elem>) -> PyResult<Py<PyAny>> {
        let a = self.span(&gens)?;
        to_py(py, &containment_obstruction(&self.inner, &a, &Limits::default()).map_err(err)?)
    }

    #[pyo3(signature = (seed = 0))]
    fn nu(&self, py: Python<'_>, seed: u64) -> PyResult<Py<PyAny>> {
        let m = build_module_nu(&self.inner, seed).map_err(err)?;
        let v = serde_json::json!({
            "dimension": m.dim(),
            "law_checked_pairs": m.law_checked_pairs,
            "character_norm": m.character_norm,
            "irreducible": m.is_irreducible(),
        });
        to_py(py, &v)
    }

    #[pyo3(signature = (seed = 0))]
    fn obstruction_scalar(&self, py: Python<'_>, seed: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &intertwiner_obstruction(&self.inner, seed).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Cocycle({:?}, modulus={})", self.inner.group().label(), self.inner.modulus())
    }
}

/// `(group, cocycle)` for the family `G_n` with parameter `r`.
#[pyfunction]
fn family(p: u32, n: usize, r: u32) -> PyResult<(PyGroup, PyCocycle)> {
    let (g, c, _) = make_family(p, n, r).map_err(err)?;
    Ok((PyGroup { inner: g }, PyCocycle { inner: c }))
}

/// Invariants and order of `H²(G, Z/m)`.
#[pyfunction]
#[pyo3(signature = (group, m, roots_of_unity = true))]
fn h2(py: Python<'_>, group: &PyGroup, m: u64, roots_of_unity: bool) -> PyResult<Py<PyAny>> {
    let mode = if roots_of_unity { Coefficients::RootsOfUnity } else { Coefficients::Exact };
    let b = py.detach(|| h2_representatives(group.inner.clone(), m, mode, &Limits::default())).map_err(err)?;
    to_py(py, &serde_json::json!({"invariants": b.invariants(), "order": b.order()}))
}

#[pyfunction]
fn rank_lemma(py: Python<'_>, p: u32, n: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &verify_rank_obstruction(p, n).map_err(err)?)
}

#[pyfunction]
fn heisenberg_lift(py: Python<'_>, p: u32) -> PyResult<Py<PyAny>> {
    let rep = py.detach(|| heisenberg_pipeline(p, &Limits::default())).map_err(err)?;
    to_py(py, &rep)
}

/// Builds `c_π` on `A⋊Q` from a 1-cocycle spec (JSON text); returns the
/// cocycle and, for small groups, the round-trip result.
#[pyfunction]
fn iyb_build(py: Python<'_>, spec: &str) -> PyResult<(PyCocycle, Py<PyAny>)> {
    let doc: Value = serde_json::from_str(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let limits = Limits::default();
    let pi = build_one_cocycle(&doc, &limits).map_err(err)?;
    let (sd, c) = cocycle_from_one_cocycle(&pi, &limits).map_err(err)?;
    let rt = if sd.group.order() <= 81 { Some(roundtrip_residual(&sd, &c, &limits).map_err(err)?) } else { None };
    let info = serde_json::json!({
        "bijective": pi.is_bijective(),
        "roundtrip": rt,
        "a_generators": sd.a_subgroup().generators(),
    });
    Ok((PyCocycle { inner: c }, to_py(py, &info)?))
}

#[pymodule]
#[pyo3(name = "isotropy")]
fn isotropy_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyCocycle>()?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(h2, m)?)?;
    m.add_function(wrap_pyfunction!(rank_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg_lift, m)?)?;
    m.add_function(wrap_pyfunction!(iyb_build, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
