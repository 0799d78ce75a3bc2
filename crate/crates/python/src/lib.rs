//! Python bindings: configuration, runs, stepping, profiles, the analytic
//! formulas and the acceptance suite.

use num_complex::Complex64;
use pmlwave::analysis;
use pmlwave::config::ScenarioConfig;
use pmlwave::pml::{self, Side};
use pmlwave::probe::ProbeData;
use pmlwave::{parse_config, validate, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(pmlwave_py, InstabilityError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Instability { .. } => InstabilityError::new_err(e.to_string()),
        Error::Io { .. } | Error::Measurement(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn config(text: &str) -> PyResult<ScenarioConfig> {
    parse_config(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn side(name: &str) -> PyResult<Side> {
    match name {
        "x_lo" => Ok(Side::XLo),
        "x_hi" => Ok(Side::XHi),
        "y_lo" => Ok(Side::YLo),
        "y_hi" => Ok(Side::YHi),
        _ => Err(PyValueError::new_err(format!("unknown side {name:?}"))),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn probe_to_py<'py>(py: Python<'py>, data: &ProbeData) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match data {
        ProbeData::TimeSeries {
            point,
            times,
            values,
        } => {
            d.set_item("kind", "time_series")?;
            d.set_item("point", *point)?;
            d.set_item("t", times)?;
            d.set_item("u", values)?;
        }
        ProbeData::LineProfile {
            positions,
            times,
            rows,
        } => {
            d.set_item("kind", "line_profile")?;
            d.set_item("positions", positions)?;
            d.set_item("t", times)?;
            d.set_item("u", rows)?;
        }
        ProbeData::Dft {
            positions, omegas, ..
        } => {
            d.set_item("kind", "dft")?;
            d.set_item("positions", positions)?;
            d.set_item("omegas", omegas)?;
            let amps: Vec<Vec<f64>> = (0..omegas.len())
                .map(|k| data.dft_amplitudes(k).unwrap_or_default())
                .collect();
            d.set_item("amplitude", amps)?;
        }
    }
    Ok(d)
}

#[pyfunction]
fn sigma_profile(xi: f64, degree: u32, sigma_max: f64) -> PyResult<f64> {
    pml::sigma_profile(xi, degree, sigma_max).map_err(py_err)
}

#[pyfunction]
fn sigma_max_for_round_trip(r_target: f64, thickness: f64, degree: u32, c: f64) -> PyResult<f64> {
    pml::sigma_max_for_round_trip(r_target, thickness, degree, c).map_err(py_err)
}

#[pyfunction]
fn attenuation_factor(k_x: f64, omega: f64, sigma_integral: f64) -> f64 {
    pml::attenuation_factor(k_x, omega, sigma_integral)
}

#[pyfunction]
fn evanescent_factor(decay_rate: f64, sigma: f64, omega: f64, kappa: f64, x: f64) -> Complex64 {
    pml::evanescent_factor(decay_rate, sigma, omega, kappa, x)
}

#[pyfunction]
#[pyo3(signature = (region_extent, boundary_distance, dim = 3))]
fn cone_angle_bound(region_extent: f64, boundary_distance: f64, dim: usize) -> PyResult<f64> {
    analysis::cone_angle_bound(region_extent, boundary_distance, dim).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (dim = 3))]
fn cone_angle_limit(dim: usize) -> f64 {
    analysis::cone_angle_limit(dim)
}

/// Validates a JSON configuration and returns it with defaults filled in.
#[pyfunction]
fn normalize_config(text: &str) -> PyResult<String> {
    Ok(config(text)?.to_json())
}

/// Runs a JSON configuration into `out_dir`; returns the manifest.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str, out_dir: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(text)?;
    let manifest = py
        .detach(|| pmlwave::run_scenario(&cfg, std::path::Path::new(out_dir)))
        .map_err(py_err)?;
    to_py(py, &manifest)
}

/// Reflection of the absorber on `side` seen at `probe`.
#[pyfunction]
#[pyo3(signature = (text, probe, side = "x_hi", pad_factor = 1.0))]
fn measure_reflection<'py>(
    py: Python<'py>,
    text: &str,
    probe: Vec<f64>,
    side: &str,
    pad_factor: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let scenario = config(text)?
        .to_scenario()
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let s = self::side(side)?;
    let r = py
        .detach(|| analysis::measure_reflection(&scenario, &probe, s, pad_factor))
        .map_err(py_err)?;
    to_py(py, &r)
}

/// Runs acceptance criteria (all when `ids` is omitted); returns
/// `(id, title, passed, detail)` tuples.
#[pyfunction]
#[pyo3(signature = (ids = None))]
fn run_validation(
    py: Python<'_>,
    ids: Option<Vec<u32>>,
) -> PyResult<Vec<(u32, String, bool, String)>> {
    let ids = ids.unwrap_or_else(|| (1..=validate::TITLES.len() as u32).collect());
    if let Some(bad) = ids
        .iter()
        .find(|&&i| i == 0 || i as usize > validate::TITLES.len())
    {
        return Err(PyValueError::new_err(format!("no criterion {bad}")));
    }
    Ok(py.detach(|| {
        ids.iter()
            .map(|&id| {
                let r = validate::run_criterion(id);
                (r.id, r.title.to_string(), r.passed, r.detail)
            })
            .collect()
    }))
}

/// A scenario being stepped from Python.
#[pyclass(name = "Simulation")]
struct PySimulation {
    inner: pmlwave::Simulation,
}

#[pymethods]
impl PySimulation {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let scenario = config(text)?
            .to_scenario()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = pmlwave::Simulation::new(&scenario).map_err(py_err)?;
        Ok(PySimulation { inner })
    }

    /// Advances `n` steps (sources and probes included).
    #[pyo3(signature = (n = 1))]
    fn step(&mut self, py: Python<'_>, n: u64) -> PyResult<()> {
        let sim = &mut self.inner;
        py.detach(|| {
            for _ in 0..n {
                sim.advance();
            }
        });
        if sim.state.is_finite() {
            Ok(())
        } else {
            Err(InstabilityError::new_err(format!(
                "non-finite field at step {}",
                sim.state.step
            )))
        }
    }

    /// Runs to the configured duration.
    fn run(&mut self, py: Python<'_>) -> PyResult<()> {
        let sim = &mut self.inner;
        py.detach(|| sim.run()).map_err(py_err)
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn steps(&self) -> u64 {
        self.inner.state.step
    }

    #[getter]
    fn total_steps(&self) -> u64 {
        self.inner.total_steps
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    /// `(nx, ny)`; `ny` is 1 in 1D.
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.grid.nx, self.inner.grid.ny)
    }

    /// `u` at cell centers, row-major (`j * nx + i`).
    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.state.u.clone()
    }

    fn energy(&self) -> f64 {
        self.inner.energy()
    }

    fn interior_energy(&self) -> f64 {
        self.inner.interior_energy()
    }

    fn probe<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
        let rec = self
            .inner
            .probes
            .iter()
            .find(|p| p.spec.name == name)
            .ok_or_else(|| PyValueError::new_err(format!("no probe named {name:?}")))?;
        probe_to_py(py, &rec.data)
    }

    /// Sampled sigma/kappa arrays as CSV text.
    fn profile_csv(&self) -> String {
        pmlwave::run::profile_csv(&self.inner.grid, &self.inner.coeffs)
    }
}

#[pymodule]
fn pmlwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InstabilityError", m.py().get_type::<InstabilityError>())?;
    m.add(
        "BUNDLED",
        validate::BUNDLED
            .iter()
            .map(|(n, _)| *n)
            .collect::<Vec<_>>(),
    )?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(sigma_profile, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_max_for_round_trip, m)?)?;
    m.add_function(wrap_pyfunction!(attenuation_factor, m)?)?;
    m.add_function(wrap_pyfunction!(evanescent_factor, m)?)?;
    m.add_function(wrap_pyfunction!(cone_angle_bound, m)?)?;
    m.add_function(wrap_pyfunction!(cone_angle_limit, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(measure_reflection, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_config, m)?)?;
    Ok(())
}

/// JSON text of a bundled scenario.
#[pyfunction]
fn bundled_config(name: &str) -> PyResult<String> {
    validate::bundled_config(name)
        .map(|c| c.to_json())
        .ok_or_else(|| PyValueError::new_err(format!("no bundled scenario {name:?}")))
}
