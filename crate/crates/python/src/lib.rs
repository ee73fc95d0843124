//! Python bindings. Indices in dictionaries are 1-based, as in scenario files; series are
//! written in the canonical term grammar (`1/2 h^1 x^(1,0) + -1 h^0 x^(0,0)`).

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use forge::fedosov::{fedosov_recursion, ConnectionData, FedosovState, Mode};
use forge::gauge::{gauge_transform, gauge_transform_ode};
use forge::matrix::SeriesMatrix;
use forge::polyvector::{DiffForm, PolyVectorField};
use forge::report::Residual;
use forge::scenario::{is_input_error, Scenario};
use forge::star::{ConstPoissonMatrix, StarProduct};
use forge::text::{format_hseries, format_weyl, parse_hseries};
use forge::{Error, HSeries};

fn py_err(e: Error) -> PyErr {
    if is_input_error(&e) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

#[pyclass(name = "Profile", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyProfile(forge::Profile);

#[pymethods]
impl PyProfile {
    #[new]
    fn new(hbar_order: u32, x_degree: u32, y_degree: u32, dim: usize) -> PyResult<Self> {
        let p = forge::Profile::new(hbar_order, x_degree, y_degree, dim).map_err(py_err)?;
        p.check_cli_bounds().map_err(py_err)?;
        Ok(PyProfile(p))
    }

    /// N=6, Dx=4, Dy=6, dim=2.
    #[staticmethod]
    fn desk() -> Self {
        PyProfile(forge::Profile::desk())
    }

    /// From `"N,Dx,Dy,dim"`.
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        let p: forge::Profile = s.parse().map_err(py_err)?;
        p.check_cli_bounds().map_err(py_err)?;
        Ok(PyProfile(p))
    }

    #[getter]
    fn hbar_order(&self) -> u32 {
        self.0.hbar_order
    }

    #[getter]
    fn x_degree(&self) -> u32 {
        self.0.x_degree
    }

    #[getter]
    fn y_degree(&self) -> u32 {
        self.0.y_degree
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Profile('{}')", self.0)
    }
}

/// A truncated formal power series in ℏ with polynomial coefficients in x.
#[pyclass(name = "Series", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySeries(HSeries);

#[pymethods]
impl PySeries {
    #[new]
    #[pyo3(signature = (profile, text = "0"))]
    fn new(profile: PyProfile, text: &str) -> PyResult<Self> {
        Ok(PySeries(parse_hseries(&profile.0, text).map_err(py_err)?))
    }

    #[getter]
    fn profile(&self) -> PyProfile {
        PyProfile(*self.0.profile())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Number of nonzero terms.
    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// ∂/∂xᵢ, 1-based.
    fn deriv(&self, i: usize) -> PyResult<Self> {
        if i == 0 || i > self.0.profile().dim {
            return Err(PyValueError::new_err(format!("index {i} out of range")));
        }
        Ok(PySeries(self.0.deriv(i - 1)))
    }

    fn invert(&self) -> PyResult<Self> {
        Ok(PySeries(self.0.series_invert().map_err(py_err)?))
    }

    fn __add__(&self, o: &PySeries) -> PyResult<Self> {
        same(&self.0, &o.0)?;
        Ok(PySeries(&self.0 + &o.0))
    }

    fn __sub__(&self, o: &PySeries) -> PyResult<Self> {
        same(&self.0, &o.0)?;
        Ok(PySeries(&self.0 - &o.0))
    }

    fn __mul__(&self, o: &PySeries) -> PyResult<Self> {
        same(&self.0, &o.0)?;
        Ok(PySeries(&self.0 * &o.0))
    }

    fn __neg__(&self) -> Self {
        PySeries(-&self.0)
    }

    fn __str__(&self) -> String {
        format_hseries(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Series('{}')", format_hseries(&self.0))
    }
}

fn same(a: &HSeries, b: &HSeries) -> PyResult<()> {
    if a.profile() != b.profile() {
        return Err(py_err(Error::ProfileMismatch));
    }
    Ok(())
}

/// `{(i, j): text}` to a d×d matrix; entries without a given transpose are mirrored with `sign`.
fn matrix(
    p: &forge::Profile,
    entries: &HashMap<(usize, usize), String>,
    sign: i64,
) -> PyResult<SeriesMatrix> {
    let d = p.dim;
    let mut m = SeriesMatrix::zero(p, d);
    for (&(i, j), text) in entries {
        if i == 0 || j == 0 || i > d || j > d {
            return Err(PyValueError::new_err(format!(
                "index ({i}, {j}) out of range 1..={d}"
            )));
        }
        let v = parse_hseries(p, text).map_err(py_err)?;
        if !entries.contains_key(&(j, i)) {
            m.set(j - 1, i - 1, v.scale_int(sign));
        }
        m.set(i - 1, j - 1, v);
    }
    Ok(m)
}

fn matrix_out(m: &SeriesMatrix) -> HashMap<(usize, usize), String> {
    let mut out = HashMap::new();
    for i in 0..m.n {
        for j in 0..m.n {
            let c = m.get(i, j);
            if !c.is_zero() {
                out.insert((i + 1, j + 1), format_hseries(c));
            }
        }
    }
    out
}

/// The Moyal product of a constant formal Poisson matrix.
#[pyclass(name = "Moyal", frozen)]
struct PyMoyal(StarProduct);

#[pymethods]
impl PyMoyal {
    /// `pi` maps `(i, j)` to series text; `(j, i)` defaults to the negative.
    #[new]
    fn new(profile: PyProfile, pi: HashMap<(usize, usize), String>) -> PyResult<Self> {
        let m = matrix(&profile.0, &pi, -1)?;
        Ok(PyMoyal(StarProduct::moyal(
            &ConstPoissonMatrix::new(m).map_err(py_err)?,
        )))
    }

    fn mul(&self, f: &PySeries, g: &PySeries) -> PyResult<PySeries> {
        self.check(f)?;
        self.check(g)?;
        Ok(PySeries(self.0.mul(&f.0, &g.0)))
    }

    /// `(f*g)*h − f*(g*h)`.
    fn assoc_residual(&self, f: &PySeries, g: &PySeries, h: &PySeries) -> PyResult<PySeries> {
        for a in [f, g, h] {
            self.check(a)?;
        }
        Ok(PySeries(self.0.assoc_residual(&f.0, &g.0, &h.0)))
    }

    /// Term count of the Maurer–Cartan residual of the product's bidifferential part.
    fn mc_residual_terms(&self) -> usize {
        self.0.mc_residual().term_count()
    }
}

impl PyMoyal {
    fn check(&self, f: &PySeries) -> PyResult<()> {
        if f.0.profile() != self.0.profile() {
            return Err(py_err(Error::ProfileMismatch));
        }
        Ok(())
    }
}

fn bivector_and_form(
    profile: &PyProfile,
    b: &HashMap<(usize, usize), String>,
    pi: &HashMap<(usize, usize), String>,
) -> PyResult<(DiffForm, PolyVectorField)> {
    let bm = matrix(&profile.0, b, -1)?;
    let pm = matrix(&profile.0, pi, -1)?;
    if !bm.is_antisymmetric() || !pm.is_antisymmetric() {
        return Err(py_err(Error::NotAntisymmetric));
    }
    Ok((
        DiffForm::from_matrix(&bm),
        PolyVectorField::from_matrix(&pm),
    ))
}

/// `𝔞(B, π) = (1 + πB)⁻¹π` by the Neumann series.
#[pyfunction]
fn gauge(
    profile: PyProfile,
    b: HashMap<(usize, usize), String>,
    pi: HashMap<(usize, usize), String>,
) -> PyResult<HashMap<(usize, usize), String>> {
    let (b, pi) = bivector_and_form(&profile, &b, &pi)?;
    Ok(matrix_out(
        &gauge_transform(&b, &pi).map_err(py_err)?.to_matrix(),
    ))
}

/// `𝔞(B, π)` by integrating the flow `dπₜ/dt = πₜ♯(B)`.
#[pyfunction]
fn gauge_ode(
    profile: PyProfile,
    b: HashMap<(usize, usize), String>,
    pi: HashMap<(usize, usize), String>,
) -> PyResult<HashMap<(usize, usize), String>> {
    let (b, pi) = bivector_and_form(&profile, &b, &pi)?;
    Ok(matrix_out(
        &gauge_transform_ode(&b, &pi).map_err(py_err)?.to_matrix(),
    ))
}

/// A solved Fedosov connection on a polynomial chart.
#[pyclass(name = "Fedosov", frozen)]
struct PyFedosov(FedosovState);

#[pymethods]
impl PyFedosov {
    /// `gamma` maps `(k, i, j)` to Γᵏᵢⱼ; `(k, j, i)` defaults to the same value.
    #[new]
    #[pyo3(signature = (profile, pi, gamma = None, mode = "quantum"))]
    fn new(
        profile: PyProfile,
        pi: HashMap<(usize, usize), String>,
        gamma: Option<HashMap<(usize, usize, usize), String>>,
        mode: &str,
    ) -> PyResult<Self> {
        let p = profile.0;
        let d = p.dim;
        let pm = matrix(&p, &pi, -1)?;
        let conn = match gamma {
            None => ConnectionData::flat(&p),
            Some(g) => {
                let mut v = vec![HSeries::zero(&p); d * d * d];
                for (&(k, i, j), text) in &g {
                    if [k, i, j].iter().any(|&x| x == 0 || x > d) {
                        return Err(PyValueError::new_err(format!(
                            "index ({k}, {i}, {j}) out of range"
                        )));
                    }
                    let s = parse_hseries(&p, text).map_err(py_err)?;
                    if !g.contains_key(&(k, j, i)) {
                        v[((k - 1) * d + j - 1) * d + i - 1] = s.clone();
                    }
                    v[((k - 1) * d + i - 1) * d + j - 1] = s;
                }
                ConnectionData::new(&p, v).map_err(py_err)?
            }
        };
        let mode = match mode {
            "quantum" => Mode::Quantum,
            "classical" => Mode::Classical,
            m => {
                return Err(PyValueError::new_err(format!(
                    "mode must be quantum or classical, got {m}"
                )))
            }
        };
        Ok(PyFedosov(
            fedosov_recursion(&conn, &pm, mode).map_err(py_err)?,
        ))
    }

    #[getter]
    fn r(&self) -> String {
        format_weyl(&self.0.r())
    }

    #[getter]
    fn b(&self) -> String {
        format_weyl(&self.0.b())
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    fn certificate_terms(&self) -> PyResult<usize> {
        Ok(self.0.certificate().map_err(py_err)?.term_count())
    }

    fn class_residual_terms(&self) -> PyResult<usize> {
        Ok(self.0.class_residual().map_err(py_err)?.term_count())
    }

    /// The flat section of `f`, as Weyl-algebra text.
    fn lift(&self, f: &PySeries) -> PyResult<String> {
        Ok(format_weyl(&self.0.lift(&f.0).map_err(py_err)?))
    }

    fn star(&self, f: &PySeries, g: &PySeries) -> PyResult<PySeries> {
        Ok(PySeries(self.0.star(&f.0, &g.0).map_err(py_err)?))
    }
}

/// Outcome of a scenario run or a selftest.
#[pyclass(name = "Report", frozen)]
struct PyReport(forge::report::Report);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    fn text(&self) -> String {
        self.0.render()
    }

    fn json(&self) -> String {
        self.0.render_json()
    }

    fn timings(&self) -> String {
        self.0.timings()
    }

    /// `(section, check, terms, passed)` for every check.
    fn checks(&self) -> Vec<(String, String, usize, bool)> {
        self.0
            .sections
            .iter()
            .flat_map(|s| {
                s.checks
                    .iter()
                    .map(|c| (s.name.clone(), c.name.clone(), c.terms, c.passed()))
            })
            .collect()
    }
}

/// Parses and runs scenario text; raises ValueError on parse or validation errors.
#[pyfunction]
#[pyo3(signature = (text, profile = None))]
fn run_scenario(py: Python<'_>, text: &str, profile: Option<PyProfile>) -> PyResult<PyReport> {
    let sc = Scenario::parse(text, profile.map(|p| p.0)).map_err(py_err)?;
    let r = py.detach(|| sc.run()).map_err(py_err)?;
    Ok(PyReport(r))
}

/// Canonical form of scenario text.
#[pyfunction]
fn canonical_scenario(text: &str) -> PyResult<String> {
    Ok(Scenario::parse(text, None).map_err(py_err)?.to_text())
}

/// The built-in verification matrix.
#[pyfunction]
#[pyo3(signature = (profile = None))]
fn selftest(py: Python<'_>, profile: Option<PyProfile>) -> PyReport {
    let p = profile.map_or_else(forge::Profile::desk, |p| p.0);
    PyReport(py.detach(|| forge::suite::selftest(&p)))
}

#[pymodule]
#[pyo3(name = "star_forge")]
pub fn star_forge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyMoyal>()?;
    m.add_class::<PyFedosov>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(gauge, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_ode, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
