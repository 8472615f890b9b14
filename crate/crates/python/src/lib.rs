use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hartree_core::harness::{self, Experiment, ExperimentConfig, ExtrapolationModel, RawConfig};
use hartree_core::propagate::{evolve as core_evolve, HamiltonianSpec, Sampling};
use hartree_core::recon::{self, DigitOptions, RatioMode};
use hartree_core::scattering::{pairing, ScatterConfig};
use hartree_core::spectral::{norm as lp_norm, Profile};
use hartree_core::{yukawa, ComplexField, Error, Family, Grid3, ModelParams, ProfileSpec};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for hartree_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Periodic cubic grid with `n` points per axis on a box of side `length`.
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: Grid3,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, length: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Grid3::new(n, length).py()?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.box_length()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, length={})", self.inner.n(), self.inner.box_length())
    }
}

/// Model parameters: `V0` (linear) and the nonlinearity kernel.
#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ModelParams,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn nls(q0: f64, mu0: f64, q1: f64, mu1: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ModelParams::nls(q0, mu0, q1, mu1).py()?,
        })
    }

    #[staticmethod]
    fn srh(q: f64, mu: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ModelParams::srh(q, mu).py()?,
        })
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.to_string()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.v1.q
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.v1.mu
    }

    /// `Q / mu^2` of the nonlinearity.
    #[getter]
    fn ratio(&self) -> f64 {
        self.inner.v1.ratio()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(family={}, q0={}, mu0={}, q={}, mu={})",
            self.inner.family, self.inner.v0.q, self.inner.v0.mu, self.inner.v1.q, self.inner.v1.mu
        )
    }
}

/// Complex field on a grid (physical representation).
#[pyclass(name = "Field", from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: ComplexField,
}

#[pymethods]
impl PyField {
    /// Sample a profile such as `"gaussian:width=2,cx=5,unit"`.
    #[staticmethod]
    fn from_profile(grid: &PyGrid, spec: &str) -> PyResult<Self> {
        let p: ProfileSpec = spec.parse().py()?;
        Ok(Self {
            inner: ComplexField::from_fn(grid.inner, |x| p.value(x)),
        })
    }

    #[staticmethod]
    fn from_values(grid: &PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: ComplexField::from_values(grid.inner, values, hartree_core::Space::Physical).py()?,
        })
    }

    fn values(&self) -> Vec<Complex64> {
        self.inner.to_physical().into_values()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: *self.inner.grid(),
        }
    }

    /// `L^p` norm; `p = inf` gives the max.
    #[pyo3(signature = (p = 2.0))]
    fn norm(&self, p: f64) -> PyResult<f64> {
        lp_norm(&self.inner, p).py()
    }

    fn scale(&self, c: f64) -> Self {
        Self {
            inner: self.inner.scale_real(c),
        }
    }

    fn distance(&self, other: &PyField) -> PyResult<f64> {
        self.inner.distance(&other.inner).py()
    }

    fn __len__(&self) -> usize {
        self.inner.grid().len()
    }
}

fn spec_for(kind: &str, model: Option<&PyModel>) -> PyResult<HamiltonianSpec> {
    let m = model.map(|m| m.inner).unwrap_or_else(ModelParams::default_nls);
    Ok(match kind {
        "free" => HamiltonianSpec::FreeSchrodinger,
        "yukawa" => HamiltonianSpec::yukawa(m.v0),
        "semirel" => HamiltonianSpec::Semirel { mass: 1.0 },
        "nls" => HamiltonianSpec::NlsFull(ModelParams { family: Family::Nls, ..m }),
        "srh" => HamiltonianSpec::SrhFull(ModelParams { family: Family::Srh, ..m }),
        other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
    })
}

/// Evolve `field` from 0 to `t`; returns `(final_field, mass_drift)`.
#[pyfunction]
#[pyo3(signature = (field, kind, t, dt, model = None))]
fn evolve(field: &PyField, kind: &str, t: f64, dt: f64, model: Option<&PyModel>) -> PyResult<(PyField, f64)> {
    let spec = spec_for(kind, model)?;
    let r = core_evolve(&spec, &field.inner, 0.0, t, dt, Sampling::None).py()?;
    Ok((PyField { inner: r.final_state }, r.mass_drift))
}

/// `(name, closed_form, numeric, rel_err)` for every kernel check.
#[pyfunction]
fn kernel_checks() -> Vec<(String, f64, f64, f64)> {
    harness::experiments::kernel_checks()
        .into_iter()
        .map(|k| {
            let e = k.rel_err();
            (k.name, k.closed_form, k.numeric, e)
        })
        .collect()
}

#[pyfunction]
fn constants() -> HashMap<&'static str, f64> {
    let c = yukawa::constants();
    HashMap::from([
        ("c_b", c.c_b),
        ("hls", c.hls),
        ("rollnik_bound", c.rollnik_bound),
        ("kato", c.kato),
        ("embedding_margin", c.embedding_margin),
    ])
}

/// `(estimate, order, confidence_width, non_monotone)`.
#[pyfunction]
#[pyo3(signature = (points, model = "power_in_inverse_param"))]
fn extrapolate(points: Vec<(f64, f64)>, model: &str) -> PyResult<(f64, Option<f64>, f64, bool)> {
    let m: ExtrapolationModel = model.parse().py()?;
    let r = harness::extrapolate(&points, m).py()?;
    Ok((r.estimate, r.order, r.confidence_width, r.non_monotone))
}

fn scatter_config(grid: &PyGrid, horizon: f64, dt: f64) -> PyResult<ScatterConfig> {
    ScatterConfig::new(grid.inner, horizon, dt).py()
}

/// `<(S - id)(eps phi), phi>` scaled by the frame Jacobian, with the
/// defect and horizon sensitivity of the run.
#[pyfunction]
#[pyo3(signature = (model, phi, epsilon, lambda_ = 1.0, horizon = 8.0, dt = 0.005))]
fn scatter(model: &PyModel, phi: &PyField, epsilon: f64, lambda_: f64, horizon: f64, dt: f64) -> PyResult<(Complex64, f64, f64)> {
    let cfg = scatter_config(&phi.grid(), horizon, dt)?
        .with_epsilon(epsilon)
        .with_lambda(lambda_);
    let (p, r) = pairing(&model.inner, &cfg, &phi.inner).py()?;
    Ok((p, r.defect, r.horizon_sensitivity))
}

/// Ratio `Q/mu^2` estimate: `(ratio, width, [(lambda, ratio_point)])`.
#[pyfunction]
#[pyo3(signature = (model, phi, lambdas, horizon = 8.0, dt = 0.005))]
fn recon_ratio(model: &PyModel, phi: &PyField, lambdas: Vec<f64>, horizon: f64, dt: f64) -> PyResult<(f64, f64, Vec<(f64, f64)>)> {
    let cfg = scatter_config(&phi.grid(), horizon, dt)?;
    let r = match model.inner.family {
        Family::Nls => recon::recon_ratio(&model.inner, &cfg, &phi.inner, &lambdas, RatioMode::Production),
        Family::Srh => recon::recon_ratio_srh(&model.inner, &cfg, &phi.inner, &lambdas),
    }
    .py()?;
    let pts = r.points.iter().map(|p| (p.lambda, p.ratio)).collect();
    Ok((r.ratio, r.extrapolation.confidence_width, pts))
}

/// Full reconstruction; returns a dict with `q`, `q_width`, `mu`, `ratio`,
/// `ratio_width`, `born`, `measured` and the `RESULT` line.
#[pyfunction]
#[pyo3(signature = (model, phi, lambdas, eps, depth = 8, horizon = 8.0, dt = 0.005))]
fn reconstruct(
    model: &PyModel,
    phi: &PyField,
    lambdas: Vec<f64>,
    eps: Vec<f64>,
    depth: u32,
    horizon: f64,
    dt: f64,
) -> PyResult<HashMap<&'static str, Py<PyAny>>> {
    let cfg = scatter_config(&phi.grid(), horizon, dt)?;
    let opts = DigitOptions {
        depth,
        ..DigitOptions::default()
    };
    let r = match model.inner.family {
        Family::Nls => recon::recon_full(&model.inner, &cfg, &phi.inner, &lambdas, &eps, opts),
        Family::Srh => recon::recon_srh(&model.inner, &cfg, &phi.inner, &lambdas, &eps, opts),
    }
    .py()?;
    Python::attach(|py| {
        let mut d: HashMap<&'static str, Py<PyAny>> = HashMap::new();
        d.insert("q", r.coupling.into_pyobject(py)?.into_any().unbind());
        d.insert("q_width", r.coupling_width.into_pyobject(py)?.into_any().unbind());
        d.insert("mu", r.screening.into_pyobject(py)?.into_any().unbind());
        d.insert("ratio", r.ratio.into_pyobject(py)?.into_any().unbind());
        d.insert("ratio_width", r.ratio_width.into_pyobject(py)?.into_any().unbind());
        d.insert("born", r.born.into_pyobject(py)?.into_any().unbind());
        let measured = r.measured.as_ref().map(|m| m.estimate);
        d.insert("measured", measured.into_pyobject(py)?.into_any().unbind());
        d.insert("result", r.result_line().into_pyobject(py)?.into_any().unbind());
        Ok(d)
    })
}

/// Run a named experiment with `key = value` overrides; returns
/// `(passed, lines, files)`.
#[pyfunction]
#[pyo3(signature = (name, config = None))]
fn run_experiment(name: &str, config: Option<HashMap<String, String>>) -> PyResult<(bool, Vec<String>, Vec<String>)> {
    let exp: Experiment = name.parse().py()?;
    let mut raw = RawConfig::default();
    if let Some(c) = config {
        let text: String = c.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        raw = RawConfig::parse(&text).py()?;
    }
    let cfg = ExperimentConfig::from_raw(Some(exp), &raw).py()?;
    let out = harness::run_experiment(&cfg).py()?;
    let files = out.files.iter().map(|p| p.display().to_string()).collect();
    Ok((out.passed(), out.lines, files))
}

#[pymodule]
fn hartree_inverse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_checks, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate, m)?)?;
    m.add_function(wrap_pyfunction!(scatter, m)?)?;
    m.add_function(wrap_pyfunction!(recon_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
