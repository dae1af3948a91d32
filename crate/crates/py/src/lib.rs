//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use quasisum_core::amo::{self, default_gap_close_tol, SpectrumResult as CoreSpectrum, DEFAULT_EDGE_TOL};
use quasisum_core::bounds;
use quasisum_core::dioph::{self, DcVariant, FrequencySpec};
use quasisum_core::gaplemma::{self, AstelsOptions};
use quasisum_core::ids::{self, IdsParams, DEFAULT_N_MAX, DEFAULT_PHASE_AVG};
use quasisum_core::pipeline;
use quasisum_core::setalg::{self, IntervalUnion as CoreUnion};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(err)
}

fn parse_freq(s: &str) -> PyResult<FrequencySpec> {
    s.parse().map_err(err)
}

/// A finite union of disjoint closed intervals.
#[pyclass(name = "IntervalUnion", module = "quasisum", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyUnion {
    inner: CoreUnion,
}

#[pymethods]
impl PyUnion {
    #[new]
    fn new(pairs: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(PyUnion { inner: CoreUnion::from_pairs(&pairs).map_err(err)? })
    }

    fn parts(&self) -> Vec<(f64, f64)> {
        self.inner.parts().iter().map(|p| (p.lo, p.hi)).collect()
    }

    fn is_interval(&self) -> bool {
        self.inner.is_interval()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    /// Newhouse thickness; `inf` for an interval.
    fn thickness(&self) -> f64 {
        setalg::thickness(&self.inner).tau.to_f64()
    }

    fn thickness_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &setalg::thickness(&self.inner))
    }

    fn hausdorff(&self, other: &PyUnion) -> f64 {
        setalg::hausdorff_distance(&self.inner, &other.inner)
    }

    fn __add__(&self, other: &PyUnion) -> PyUnion {
        PyUnion { inner: setalg::minkowski_sum(&self.inner, &other.inner) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &PyUnion) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self.inner.parts().iter().map(|p| format!("[{}, {}]", p.lo, p.hi)).collect();
        format!("IntervalUnion({})", parts.join(" ∪ "))
    }
}

/// Spectrum of the almost Mathieu operator with its tolerances.
#[pyclass(name = "SpectrumResult", module = "quasisum", frozen)]
pub struct PySpectrum {
    inner: CoreSpectrum,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.params.lambda
    }

    #[getter]
    fn freq(&self) -> (i64, i64) {
        (self.inner.params.freq.p, self.inner.params.freq.q)
    }

    #[getter]
    fn union(&self) -> PyUnion {
        PyUnion { inner: self.inner.union.clone() }
    }

    #[getter]
    fn edge_tol(&self) -> f64 {
        self.inner.edge_tol
    }

    #[getter]
    fn gap_close_tol(&self) -> f64 {
        self.inner.gap_close_tol
    }

    #[getter]
    fn approx_order(&self) -> usize {
        self.inner.approx_order
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectrumResult(lambda={}, freq={}, bands={})",
            self.inner.params.lambda,
            self.inner.params.freq,
            self.inner.union.len()
        )
    }
}

fn unions(sets: &[PyUnion]) -> Vec<CoreUnion> {
    sets.iter().map(|s| s.inner.clone()).collect()
}

/// Phase-union spectrum at a rational frequency or at a convergent of an
/// irrational one; with `phase`, the fixed-phase spectrum instead.
#[pyfunction]
#[pyo3(signature = (lam, freq, order=None, phase=None, edge_tol=DEFAULT_EDGE_TOL, gap_close_tol=None))]
fn spectrum(
    py: Python<'_>,
    lam: f64,
    freq: &str,
    order: Option<usize>,
    phase: Option<f64>,
    edge_tol: f64,
    gap_close_tol: Option<f64>,
) -> PyResult<PySpectrum> {
    let spec = parse_freq(freq)?;
    let gtol = gap_close_tol.unwrap_or_else(|| default_gap_close_tol(lam));
    let order = order.unwrap_or(pipeline::DEFAULT_APPROX_ORDER);
    let inner = py
        .detach(|| match (&spec, phase) {
            (FrequencySpec::Rational(r), None) => amo::spectrum_rational(lam, *r, edge_tol, gtol),
            (FrequencySpec::Rational(r), Some(w)) => amo::spectrum_fixed_phase(lam, *r, w, edge_tol),
            (s, None) => amo::spectrum_irrational(lam, s, order, edge_tol, gtol),
            (s, Some(w)) => {
                let f = dioph::convergent(s, order)?;
                amo::spectrum_fixed_phase(lam, f, w, edge_tol)
            }
        })
        .map_err(err)?;
    Ok(PySpectrum { inner })
}

/// Independent band-structure oracle on an omega by theta grid.
#[pyfunction]
#[pyo3(signature = (lam, freq, omega_grid=256, theta_grid=256))]
fn bloch_oracle(py: Python<'_>, lam: f64, freq: &str, omega_grid: usize, theta_grid: usize) -> PyResult<PyUnion> {
    let r: dioph::Rational = freq.parse().map_err(err)?;
    let inner = py.detach(|| amo::bloch_oracle(lam, r, omega_grid, theta_grid)).map_err(err)?;
    Ok(PyUnion { inner })
}

#[pyfunction]
#[pyo3(signature = (lam, q_max, edge_tol=DEFAULT_EDGE_TOL))]
fn butterfly<'py>(py: Python<'py>, lam: f64, q_max: i64, edge_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let rows = py.detach(|| amo::butterfly(lam, q_max, edge_tol)).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
fn minkowski_sum(sets: Vec<PyUnion>) -> PyResult<PyUnion> {
    let inner = setalg::minkowski_sum_all(&unions(&sets)).ok_or_else(|| err("need at least one set"))?;
    Ok(PyUnion { inner })
}

#[pyfunction]
fn middle_thirds(level: u32) -> PyUnion {
    PyUnion { inner: setalg::cantor::middle_thirds(level) }
}

#[pyfunction]
fn check_newhouse<'py>(py: Python<'py>, k1: &PyUnion, k2: &PyUnion) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &gaplemma::check_newhouse(&k1.inner, &k2.inner))
}

#[pyfunction]
#[pyo3(signature = (sets, search_orderings=false))]
fn check_astels<'py>(py: Python<'py>, sets: Vec<PyUnion>, search_orderings: bool) -> PyResult<Bound<'py, PyAny>> {
    let v = gaplemma::check_astels_with(&unions(&sets), AstelsOptions { search_orderings }).map_err(err)?;
    to_py(py, &v)
}

/// Gap Lemma verdict together with the exact sum and their agreement.
#[pyfunction]
#[pyo3(signature = (sets, search_orderings=false))]
fn verify_prediction<'py>(py: Python<'py>, sets: Vec<PyUnion>, search_orderings: bool) -> PyResult<Bound<'py, PyAny>> {
    let v = gaplemma::verify_prediction_with(&unions(&sets), AstelsOptions { search_orderings }).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
fn convergents(freq: &str, depth: usize) -> PyResult<Vec<(i64, i64)>> {
    let cs = dioph::convergents(&parse_freq(freq)?, depth).map_err(err)?;
    Ok(cs.into_iter().map(|r| (r.p, r.q)).collect())
}

#[pyfunction]
#[pyo3(signature = (freq, t, q_max, variant="plain"))]
fn dc_constants<'py>(py: Python<'py>, freq: &str, t: f64, q_max: u64, variant: &str) -> PyResult<Bound<'py, PyAny>> {
    let v = match variant {
        "plain" => DcVariant::Plain,
        "two_pi" => DcVariant::TwoPi,
        other => return Err(err(format!("unknown variant {other:?}; use \"plain\" or \"two_pi\""))),
    };
    let spec = parse_freq(freq)?;
    let r = py.detach(|| dioph::dc_constants(&spec, t, q_max, v)).map_err(err)?;
    to_py(py, &r)
}

/// IDS samples `[(x, value)]` on the given grid.
#[pyfunction]
#[pyo3(signature = (lam, freq, grid, volume=2000, phase_avg=DEFAULT_PHASE_AVG, phase=0.0))]
fn ids_curve(
    py: Python<'_>,
    lam: f64,
    freq: &str,
    grid: Vec<f64>,
    volume: usize,
    phase_avg: usize,
    phase: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let params = IdsParams::new(lam, parse_freq(freq)?, phase);
    let curve = py.detach(|| ids::ids_curve(&params, volume, phase_avg, &grid)).map_err(err)?;
    Ok(curve.samples)
}

/// Label the gaps of a spectrum from the IDS at their midpoints.
#[pyfunction]
#[pyo3(signature = (spectrum, freq, volume=20000, phase_avg=DEFAULT_PHASE_AVG, n_max=DEFAULT_N_MAX, tol=None))]
fn label_gaps<'py>(
    py: Python<'py>,
    spectrum: &PySpectrum,
    freq: &str,
    volume: usize,
    phase_avg: usize,
    n_max: u64,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = &spectrum.inner;
    let params = IdsParams::new(s.params.lambda, parse_freq(freq)?, 0.0);
    let tol = tol.unwrap_or_else(|| ids::default_label_tol(volume));
    let report = py
        .detach(|| {
            let curve = ids::ids_at_gaps(&params, s, volume, phase_avg)?;
            ids::label_gaps(s, &curve, n_max, tol)
        })
        .map_err(err)?;
    to_py(py, &report)
}

/// Thickness lower bound at `kappa`; `params` is a dict of bound parameters,
/// missing keys taking their defaults.
#[pyfunction]
#[pyo3(signature = (kappa, params=None))]
fn thickness_lower_bound(kappa: f64, params: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let p = bound_params(params)?;
    bounds::thickness_lower_bound(&p, kappa).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (gap_length, params=None))]
fn kappa(gap_length: f64, params: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let p = bound_params(params)?;
    bounds::kappa(&p, gap_length).map_err(err)
}

fn bound_params(params: Option<&Bound<'_, PyAny>>) -> PyResult<bounds::BoundParams> {
    let Some(obj) = params else { return Ok(bounds::BoundParams::default()) };
    let mut base = serde_json::to_value(bounds::BoundParams::default()).map_err(err)?;
    let over: serde_json::Map<String, serde_json::Value> = from_py(obj)?;
    for (k, v) in over {
        if base.get(&k).is_none() {
            return Err(err(format!("unknown bound parameter {k:?}")));
        }
        base[k] = v;
    }
    serde_json::from_value(base).map_err(err)
}

/// Run an experiment config (a dict or a JSON string) end to end.
#[pyfunction]
fn run_pipeline<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let text: String = match config.extract::<String>() {
        Ok(s) => s,
        Err(_) => py.import("json")?.call_method1("dumps", (config,))?.extract()?,
    };
    let cfg = pipeline::parse_config(&text).map_err(err)?;
    let report = py.detach(|| pipeline::run_main_theorem(&cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn quasisum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnion>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(butterfly, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_sum, m)?)?;
    m.add_function(wrap_pyfunction!(middle_thirds, m)?)?;
    m.add_function(wrap_pyfunction!(check_newhouse, m)?)?;
    m.add_function(wrap_pyfunction!(check_astels, m)?)?;
    m.add_function(wrap_pyfunction!(verify_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(convergents, m)?)?;
    m.add_function(wrap_pyfunction!(dc_constants, m)?)?;
    m.add_function(wrap_pyfunction!(ids_curve, m)?)?;
    m.add_function(wrap_pyfunction!(label_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(thickness_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add("DEFAULT_EDGE_TOL", DEFAULT_EDGE_TOL)?;
    Ok(())
}
