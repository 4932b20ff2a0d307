//! Python bindings for `confpersist`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::{json, Value};

use confpersist::config::{
    build_independence_filtration, critical_radii, delta_check, DEFAULT_BUDGET,
};
use confpersist::covering::{build_config_rips, verify_covering, w1, RipsParams};
use confpersist::metric::{
    sample_circle, shortest_path_metric, FiniteMetricSpace, Tolerance, WeightedGraph,
};
use confpersist::obstruction::obstruction_report;
use confpersist::packing::{conf_nonempty, max_packing_radius, PackingMode};
use confpersist::persistence::{barcode_json, compute_persistence};
use confpersist::regular::{is_affine_kr_regular, is_kr_regular, SampledMap, DEFAULT_RANK_TOL};
use confpersist::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) if s == "inf" => f64::INFINITY.into_pyobject(py)?.into_any(),
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let items = items
                .iter()
                .map(|i| to_py(py, i))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, v) in map {
                d.set_item(k, to_py(py, v)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py_ser<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A finite metric space; distances may be `inf`.
#[pyclass(name = "MetricSpace", module = "confpersist", skip_from_py_object)]
#[derive(Clone)]
pub struct PyMetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[new]
    fn new(ids: Vec<String>, dist: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyMetricSpace {
            inner: FiniteMetricSpace::new(ids, dist).map_err(err)?,
        })
    }

    /// `n` equally spaced points on a circle of circumference `length`.
    #[staticmethod]
    fn circle(n: usize, length: f64) -> PyResult<Self> {
        Ok(PyMetricSpace {
            inner: sample_circle(n, length).map_err(err)?,
        })
    }

    /// Shortest-path metric of a weighted graph given as `(u, v, w)` edges.
    #[staticmethod]
    fn from_graph(vertices: Vec<String>, edges: Vec<(String, String, f64)>) -> PyResult<Self> {
        let g = WeightedGraph::new(vertices, edges).map_err(err)?;
        Ok(PyMetricSpace {
            inner: shortest_path_metric(&g),
        })
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        let f = std::fs::File::open(path).map_err(|e| err(e.into()))?;
        Ok(PyMetricSpace {
            inner: FiniteMetricSpace::from_csv(f).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace(n={})", self.inner.len())
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn dist(&self, a: &str, b: &str) -> PyResult<f64> {
        let idx = self.inner.indices_of(&[a, b]).map_err(err)?;
        Ok(self.inner.dist(idx[0], idx[1]))
    }

    fn critical_radii(&self) -> Vec<f64> {
        critical_radii(&self.inner)
    }

    /// Returns `(r_star, witness_ids)`.
    #[pyo3(signature = (k, mode = "exact", budget = DEFAULT_BUDGET, seed = 0))]
    fn max_packing_radius(
        &self,
        k: usize,
        mode: &str,
        budget: u64,
        seed: u64,
    ) -> PyResult<(f64, Vec<String>)> {
        let mode = match mode {
            "exact" => PackingMode::Exact,
            "greedy" => PackingMode::Greedy,
            other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
        };
        let p = max_packing_radius(&self.inner, k, mode, budget, seed).map_err(err)?;
        Ok((
            p.r_star,
            p.witness
                .iter()
                .map(|&i| self.inner.id(i).to_string())
                .collect(),
        ))
    }

    #[pyo3(signature = (k, r, budget = DEFAULT_BUDGET))]
    fn conf_nonempty(&self, k: usize, r: f64, budget: u64) -> PyResult<bool> {
        conf_nonempty(&self.inner, k, r, budget, Tolerance::default()).map_err(err)
    }

    /// Z/2 barcode of the independence filtration on subsets of at most
    /// `k_max` points.
    #[pyo3(signature = (k_max, budget = DEFAULT_BUDGET))]
    fn barcode<'py>(
        &self,
        py: Python<'py>,
        k_max: usize,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let filt = build_independence_filtration(&self.inner, k_max, budget).map_err(err)?;
        let b = compute_persistence(&filt, k_max.saturating_sub(1)).map_err(err)?;
        to_py(py, &barcode_json(&b))
    }

    #[pyo3(signature = (k, delta, r_grid, budget = DEFAULT_BUDGET))]
    fn covering<'py>(
        &self,
        py: Python<'py>,
        k: usize,
        delta: f64,
        r_grid: Vec<f64>,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tol = Tolerance::default();
        let params = RipsParams {
            budget,
            ..RipsParams::default()
        };
        let (model, g) = build_config_rips(&self.inner, k, delta, &r_grid, params).map_err(err)?;
        let report = verify_covering(&self.inner, &model, &g, model.r_lo, tol).map_err(err)?;
        let v = json!({
            "vertices": model.configurations.len(),
            "edges": g.labels.len(),
            "odd_edges": w1(&g).odd_edges.len(),
            "excluded_triangles": model.excluded_triangles.len(),
            "report": report,
            "is_covering": report.is_covering(),
        });
        to_py(py, &v)
    }

    #[pyo3(signature = (k, r, delta, r_grid, t_max = 2, budget = DEFAULT_BUDGET))]
    fn obstruction_report<'py>(
        &self,
        py: Python<'py>,
        k: usize,
        r: f64,
        delta: f64,
        r_grid: Vec<f64>,
        t_max: usize,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rep = obstruction_report(
            &self.inner,
            k,
            r,
            delta,
            &r_grid,
            t_max,
            budget,
            Tolerance::default(),
        )
        .map_err(err)?;
        to_py_ser(py, &rep)
    }

    #[pyo3(signature = (k_max, radii = None, budget = DEFAULT_BUDGET))]
    fn delta_check<'py>(
        &self,
        py: Python<'py>,
        k_max: usize,
        radii: Option<Vec<f64>>,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let radii = radii.unwrap_or_else(|| critical_radii(&self.inner));
        let rep =
            delta_check(&self.inner, k_max, &radii, Tolerance::default(), budget).map_err(err)?;
        let passed = rep.passed();
        let mut v = serde_json::to_value(rep).map_err(|e| PyValueError::new_err(e.to_string()))?;
        v["passed"] = json!(passed);
        to_py(py, &v)
    }
}

/// Exhaustive (k,r)-regularity of a real map given as one row per point.
#[pyfunction]
#[pyo3(signature = (space, values, k, r, tol = DEFAULT_RANK_TOL, affine = false, budget = DEFAULT_BUDGET))]
fn is_regular<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    values: Vec<Vec<f64>>,
    k: usize,
    r: f64,
    tol: f64,
    affine: bool,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let f = SampledMap::real(space.inner.clone(), values).map_err(err)?;
    let verdict = if affine {
        is_affine_kr_regular(&f, k, r, tol, budget)
    } else {
        is_kr_regular(&f, k, r, tol, budget)
    }
    .map_err(err)?;
    to_py_ser(py, &verdict)
}

#[pymodule]
#[pyo3(name = "confpersist")]
fn confpersist_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_function(wrap_pyfunction!(is_regular, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
