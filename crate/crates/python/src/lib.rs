//! Python bindings. Functions on the atom space cross the boundary as lists of
//! `fractions.Fraction`, indexed by atom.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use blp_core::exact::{fmt_rational, parse_rational};
use blp_core::filtration::PartitionSpec;
use blp_core::operators::analysis::{difference_grid, martingale_transform, maximal, square, MaximalKind, SquareKind};
use blp_core::operators::{difference_op, norm_estimate, DifferenceKind};
use blp_core::verify::{self, predictable_coefficients, random_function, RunOptions};
use blp_core::{ExactVec, Filtration};
use num_rational::BigRational;

fn err(e: blp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_vec(values: &Bound<'_, PyAny>) -> PyResult<ExactVec> {
    let mut out = Vec::new();
    for item in values.try_iter()? {
        let item = item?;
        let text = item.str()?.to_string();
        let r = parse_rational(&text).ok_or_else(|| PyValueError::new_err(format!("not a rational: {text}")))?;
        out.push(r);
    }
    Ok(ExactVec::from_rationals(&out))
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_rational(r),))
}

fn to_list<'py>(py: Python<'py>, v: &ExactVec) -> PyResult<Bound<'py, PyList>> {
    let items = v.to_rationals().iter().map(|r| fraction(py, r)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((text,))
}

/// Model parameters. `A`, `B`, `C` default to `C = I + J`, `A = C − j0`, `B = C − i0`.
#[pyclass(name = "ModelConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: blp_core::ModelConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (p, i0, j0, I, J, A=None, B=None, C=None))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(p: u64, i0: i64, j0: i64, I: i64, J: i64, A: Option<i64>, B: Option<i64>, C: Option<i64>) -> PyResult<Self> {
        let inner = blp_core::ModelConfig::new(p, i0, j0, I, J).with_exponents(A, B, C);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p
    }

    #[getter]
    fn exponents(&self) -> (i64, i64, i64) {
        (self.inner.a, self.inner.b, self.inner.c)
    }

    #[getter]
    fn atom_count(&self) -> String {
        self.inner.atom_count_big().to_string()
    }

    fn grid(&self) -> Vec<(i64, i64)> {
        self.inner.grid().iter().map(|l| (l.i, l.j)).collect()
    }

    /// Index set of `D_λ`, `D*_λ`: `[i0, A] × [j0, B]`.
    fn difference_grid(&self) -> Vec<(i64, i64)> {
        difference_grid(&self.inner).iter().map(|l| (l.i, l.j)).collect()
    }

    fn interior(&self) -> Vec<(i64, i64)> {
        self.inner.interior().iter().map(|l| (l.i, l.j)).collect()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("ModelConfig(p={}, i0={}, j0={}, I={}, J={}, A={}, B={}, C={})", c.p, c.i0, c.j0, c.i_max, c.j_max, c.a, c.b, c.c)
    }
}

/// The atom space with its filtration.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    filt: Filtration,
}

fn maximal_kind(kind: &str) -> PyResult<MaximalKind> {
    match kind {
        "Mstar" => Ok(MaximalKind::Mstar),
        "Lstar" => Ok(MaximalKind::Lstar),
        "Rstar" => Ok(MaximalKind::Rstar),
        _ => Err(PyValueError::new_err(format!("unknown maximal operator `{kind}`; expected Mstar, Lstar or Rstar"))),
    }
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(config: PyConfig) -> PyResult<Self> {
        Ok(Self { filt: Filtration::from_config(config.inner).map_err(err)? })
    }

    #[getter]
    fn atom_count(&self) -> usize {
        self.filt.space().atom_count()
    }

    /// Group coordinates `(u, v, w)` of an atom.
    fn element(&self, atom: usize) -> PyResult<(u64, u64, u64)> {
        if atom >= self.atom_count() {
            return Err(PyValueError::new_err(format!("atom {atom} out of range")));
        }
        let g = self.filt.space().element(atom);
        Ok((g.u, g.v, g.w))
    }

    fn mul_atoms(&self, a: usize, b: usize) -> PyResult<usize> {
        let n = self.atom_count();
        if a >= n || b >= n {
            return Err(PyValueError::new_err("atom out of range"));
        }
        Ok(self.filt.space().mul_atoms(a, b))
    }

    fn metadata<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&self.filt.space().metadata()).map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }

    /// Cell id of every atom for `Level(i,j)`, `Row(i)`, `Col(j)` or `Join(..;..)`.
    fn partition(&self, spec: &str) -> PyResult<Vec<u32>> {
        let spec: PartitionSpec = spec.parse().map_err(err)?;
        Ok(self.filt.partition(&spec).map_err(err)?.cell_of().to_vec())
    }

    #[pyo3(signature = (seed, level=None, nonnegative=false))]
    fn random_function<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        level: Option<(i64, i64)>,
        nonnegative: bool,
    ) -> PyResult<Bound<'py, PyList>> {
        let spec = level.map(|(i, j)| PartitionSpec::level(i, j));
        let f = random_function(&self.filt, seed, spec.as_ref(), nonnegative).map_err(err)?;
        to_list(py, &f)
    }

    fn cond_expect<'py>(&self, py: Python<'py>, f: &Bound<'py, PyAny>, spec: &str) -> PyResult<Bound<'py, PyList>> {
        let spec: PartitionSpec = spec.parse().map_err(err)?;
        let out = self.filt.cond_expect(&to_vec(f)?, &spec).map_err(err)?;
        to_list(py, &out)
    }

    /// Applies `L:i`, `R:j`, `D:i,j`, `Dstar:i,j` or `d:i,j`.
    fn apply<'py>(&self, py: Python<'py>, operator: &str, f: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyList>> {
        let f = to_vec(f)?;
        if f.len() != self.atom_count() {
            return Err(PyValueError::new_err("function length differs from the atom count"));
        }
        let kind: DifferenceKind = operator.parse().map_err(err)?;
        let t = difference_op(&self.filt, kind).map_err(err)?;
        to_list(py, &t.apply(&f))
    }

    fn maximal<'py>(&self, py: Python<'py>, kind: &str, f: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyList>> {
        let out = maximal(&self.filt, maximal_kind(kind)?, &to_vec(f)?).map_err(err)?;
        to_list(py, &out)
    }

    /// Pointwise values of the double-difference square function `S f`.
    fn square_function(&self, f: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
        Ok(square(&self.filt, SquareKind::S, &to_vec(f)?).map_err(err)?.values)
    }

    /// `Σ a_λ d_λ^m f` with seeded predictable coefficients bounded by `bound`.
    #[pyo3(signature = (f, seed, m=1, bound="1"))]
    fn transform<'py>(&self, py: Python<'py>, f: &Bound<'py, PyAny>, seed: u64, m: u32, bound: &str) -> PyResult<Bound<'py, PyList>> {
        let bound = parse_rational(bound).ok_or_else(|| PyValueError::new_err(format!("not a rational: {bound}")))?;
        let a = predictable_coefficients(&self.filt, seed, &bound).map_err(err)?;
        let out = martingale_transform(&self.filt, &a, m, &to_vec(f)?).map_err(err)?;
        to_list(py, &out)
    }

    /// `L²` operator norm estimate of `L:i`, `R:j`, `D:i,j`, `Dstar:i,j` or `d:i,j`.
    fn norm<'py>(&self, py: Python<'py>, operator: &str) -> PyResult<Bound<'py, PyDict>> {
        let kind: DifferenceKind = operator.parse().map_err(err)?;
        let t = difference_op(&self.filt, kind).map_err(err)?;
        let e = norm_estimate(&t, self.filt.space());
        let d = PyDict::new(py);
        d.set_item("norm", e.norm)?;
        d.set_item("iterations", e.iterations)?;
        d.set_item("residual", e.residual)?;
        d.set_item("converged", e.converged)?;
        Ok(d)
    }

    /// Runs a suite (or `all`) and returns the report as a dict.
    #[pyo3(signature = (suite="all", seed=0))]
    fn verify<'py>(&self, py: Python<'py>, suite: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        if !verify::is_suite(suite) {
            return Err(PyValueError::new_err(format!("unknown suite `{suite}`")));
        }
        let report = py.detach(|| verify::run_on(suite, &self.filt, seed, &RunOptions::default())).map_err(err)?;
        json_to_py(py, &report.to_json().map_err(err)?)
    }
}

/// PG(2, q) for prime `q`.
#[pyclass(name = "ProjectivePlane", frozen)]
struct PyPlane {
    inner: blp_core::ProjectivePlane,
}

#[pymethods]
impl PyPlane {
    #[new]
    fn new(q: u64) -> PyResult<Self> {
        Ok(Self { inner: blp_core::build_plane(q).map_err(err)? })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    fn points(&self) -> Vec<[u64; 3]> {
        self.inner.points().to_vec()
    }

    fn lines(&self) -> Vec<[u64; 3]> {
        self.inner.lines().to_vec()
    }

    fn incident(&self, point: usize, line: usize) -> PyResult<bool> {
        if point >= self.inner.point_count() || line >= self.inner.line_count() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.incident(point, line))
    }

    fn lines_through(&self, point: usize) -> Vec<usize> {
        self.inner.lines_through(point)
    }

    fn points_on(&self, line: usize) -> Vec<usize> {
        self.inner.points_on(line)
    }

    /// Axiom and residue-identity check results.
    fn checks<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let checks = [
            blp_core::pgplane::check_plane_axioms(&self.inner),
            blp_core::pgplane::check_residue_identities(&self.inner),
        ];
        let text = serde_json::to_string(&checks).map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }
}

#[pymodule]
fn blp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyPlane>()?;
    m.add("SUITES", verify::SUITES.to_vec())?;
    Ok(())
}
