//! Python bindings: channels, ensembles and the bound computations.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mbios_bounds::analysis::{self, SearchConfig, ThresholdMethod, ThresholdQuery};
use mbios_bounds::channels::{self, LlrDensity};
use mbios_bounds::ensembles::{self, EnsembleSpec};
use mbios_bounds::numerics::{self, DEFAULT_SEED};
use mbios_bounds::quantized::{self, DensityMethod, GapToCapacity};
use mbios_bounds::unquantized::{self, BerBoundInput, BerShape, SeriesConfig};

fn to_py(e: mbios_bounds::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for mbios_bounds::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn threshold_method(name: &str) -> PyResult<ThresholdMethod> {
    Ok(match name {
        "capacity" => ThresholdMethod::CapacityLimit,
        "2level" => ThresholdMethod::TwoLevel,
        "q4" => ThresholdMethod::Quantized(2),
        "q8" => ThresholdMethod::Quantized(3),
        "unq" => ThresholdMethod::Unquantized,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method '{other}'; expected capacity, 2level, q4, q8 or unq"
            )))
        }
    })
}

fn series(p: usize) -> PyResult<SeriesConfig> {
    SeriesConfig::new(p).py_err()
}

/// A memoryless binary-input output-symmetric channel.
#[pyclass(name = "Channel", module = "mbios_bounds", frozen)]
pub struct PyChannel {
    inner: channels::Channel,
}

#[pymethods]
impl PyChannel {
    #[staticmethod]
    fn bec(p: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: channels::Channel::bec(p).py_err()?,
        })
    }

    #[staticmethod]
    fn bsc(eps: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: channels::Channel::bsc(eps).py_err()?,
        })
    }

    #[staticmethod]
    fn biawgn(sigma: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: channels::Channel::biawgn(sigma).py_err()?,
        })
    }

    /// BIAWGN channel at `ebn0_db` for a code of rate `rate`.
    #[staticmethod]
    fn from_ebn0(ebn0_db: f64, rate: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: channels::biawgn_from_ebn0(ebn0_db, rate).py_err()?,
        })
    }

    /// BIAWGN channel whose capacity is `c`.
    #[staticmethod]
    fn with_capacity(c: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: analysis::biawgn_with_capacity(c).py_err()?,
        })
    }

    /// Channel from a JSON description of its LLR density.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let density = LlrDensity::from_json(text).py_err()?;
        Ok(PyChannel {
            inner: channels::Channel::custom(density).py_err()?,
        })
    }

    fn capacity(&self) -> PyResult<f64> {
        self.inner.capacity().py_err()
    }

    fn error_weight(&self) -> f64 {
        self.inner.error_weight_w()
    }

    fn quantity_a(&self) -> PyResult<f64> {
        self.inner.quantity_a().py_err()
    }

    fn tanh_moments(&self, count: usize) -> PyResult<Vec<f64>> {
        self.inner.tanh_moments(count).py_err()
    }

    fn __repr__(&self) -> String {
        format!("Channel({})", self.inner)
    }
}

/// An LDPC ensemble given by its check-degree fractions and design rate.
#[pyclass(name = "Ensemble", module = "mbios_bounds", frozen)]
pub struct PyEnsemble {
    inner: EnsembleSpec,
}

#[pymethods]
impl PyEnsemble {
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyEnsemble {
            inner: ensembles::builtin(name).py_err()?,
        })
    }

    #[staticmethod]
    fn builtin_names() -> Vec<&'static str> {
        ensembles::BUILTIN_NAMES.to_vec()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyEnsemble {
            inner: EnsembleSpec::from_json(text).py_err()?,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn design_rate(&self) -> f64 {
        self.inner.design_rate
    }

    #[getter]
    fn a_r(&self) -> f64 {
        self.inner.dk().a_r()
    }

    /// Fraction of checks of each degree.
    fn check_degrees(&self) -> Vec<(usize, f64)> {
        self.inner.dk().fractions().iter().map(|(&k, &v)| (k, v)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Ensemble({}, rate={:.6})", self.inner.name, self.inner.design_rate)
    }
}

#[pyfunction]
fn h2(x: f64) -> PyResult<f64> {
    numerics::h2(x).py_err()
}

/// Upper bound on the achievable rate of `ensemble` over `channel`.
#[pyfunction]
#[pyo3(signature = (channel, ensemble, method = "unq", series_p = 10, seed = DEFAULT_SEED))]
fn rate_bound(channel: &PyChannel, ensemble: &PyEnsemble, method: &str, series_p: usize, seed: u64) -> PyResult<f64> {
    let m = threshold_method(method)?;
    analysis::rate_bound(m, &channel.inner, &ensemble.inner.dk(), series(series_p)?, seed).py_err()
}

/// Lower bound on the parity-check density at gap `epsilon`; returns `(value, trivial)`.
#[pyfunction]
#[pyo3(signature = (channel, epsilon, method = "unq", seed = DEFAULT_SEED))]
fn density_bound(channel: &PyChannel, epsilon: f64, method: &str, seed: u64) -> PyResult<(f64, bool)> {
    let dm = match method {
        "2level" if matches!(channel.inner.kind(), channels::ChannelKind::Bec { .. }) => DensityMethod::TwoLevelBec,
        "2level" => DensityMethod::TwoLevel,
        "q4" => DensityMethod::Quantized(2),
        "q8" => DensityMethod::Quantized(3),
        "unq" => DensityMethod::Unquantized,
        other => return Err(PyValueError::new_err(format!("method '{other}' has no density bound"))),
    };
    let k = quantized::density_bound_coeffs_seeded(&channel.inner, dm, seed).py_err()?;
    let b = quantized::density_lower_bound(&k, GapToCapacity::new(epsilon).py_err()?);
    Ok((b.value, b.trivial))
}

/// Bit error probability lower bound for a code of rate `rate`, described by
/// either an ensemble's check degrees or a normalized density `t`.
#[pyfunction]
#[pyo3(signature = (channel, rate, ensemble = None, t = None, series_p = 10))]
fn ber_bound<'py>(
    py: Python<'py>,
    channel: &PyChannel,
    rate: f64,
    ensemble: Option<&PyEnsemble>,
    t: Option<f64>,
    series_p: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let shape = match (ensemble, t) {
        (Some(e), None) => BerShape::DegreeProfile(e.inner.dk()),
        (None, Some(t)) => BerShape::Normalized { t },
        _ => return Err(PyValueError::new_err("give exactly one of ensemble or t")),
    };
    let input = BerBoundInput::new(rate, channel.inner.clone(), shape).py_err()?;
    let b = unquantized::ber_lower_bound(&input, series(series_p)?).py_err()?;
    let out = PyDict::new(py);
    out.set_item("h2_pb", b.h2_pb_bound)?;
    out.set_item("pb", b.pb_bound)?;
    out.set_item("trivial", b.trivial)?;
    if t.is_some() {
        let legacy = unquantized::legacy_ber_bound(&input).py_err()?;
        out.set_item("legacy_pb", legacy.pb_bound)?;
    }
    Ok(out)
}

/// Smallest normalized density `t` for which the bound admits bit error rate `pb`.
#[pyfunction]
#[pyo3(signature = (channel, rate, pb, legacy = false, series_p = 10))]
fn required_density(channel: &PyChannel, rate: f64, pb: f64, legacy: bool, series_p: usize) -> PyResult<f64> {
    let model = analysis::BerModel::from_channel(&channel.inner, series(series_p)?).py_err()?;
    let kind = if legacy {
        analysis::BerBoundKind::Legacy
    } else {
        analysis::BerBoundKind::Series
    };
    model.required_t(kind, rate, pb).py_err()
}

/// `Eb/N0` threshold (dB) of `ensemble` on the BIAWGN channel under `method`.
#[pyfunction]
#[pyo3(signature = (ensemble, method = "unq", series_p = 10, seed = DEFAULT_SEED))]
fn threshold(ensemble: &PyEnsemble, method: &str, series_p: usize, seed: u64) -> PyResult<f64> {
    let query = ThresholdQuery {
        ensemble: ensemble.inner.clone(),
        method: threshold_method(method)?,
        config: SearchConfig {
            series: series(series_p)?,
            seed,
            ..SearchConfig::default()
        },
    };
    analysis::threshold_ebn0(&query).py_err()
}

/// Rows of a threshold table as `(ensemble, design_rate, method, dB, provenance)`.
#[pyfunction]
fn reproduce_table(py: Python<'_>, id: u8) -> PyResult<Vec<(String, f64, String, f64, &'static str)>> {
    let rows = py.detach(|| analysis::reproduce_table(id)).py_err()?;
    Ok(rows
        .iter()
        .flat_map(|r| {
            r.cells.iter().map(|c| {
                (r.ensemble.clone(), r.design_rate, c.method.clone(), c.value_db, c.provenance.tag())
            })
        })
        .collect())
}

/// χ-optimal positive levels of a `2^d`-level quantizer and the attained χ.
#[pyfunction]
#[pyo3(signature = (channel, d, seed = DEFAULT_SEED))]
fn optimize_levels(channel: &PyChannel, d: usize, seed: u64) -> PyResult<(Vec<f64>, f64)> {
    let q = quantized::optimize_levels_seeded(&channel.inner, d, seed).py_err()?;
    Ok((q.levels.levels().to_vec(), q.chi))
}

#[pymodule]
#[pyo3(name = "mbios_bounds")]
pub fn mbios_bounds_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(h2, m)?)?;
    m.add_function(wrap_pyfunction!(rate_bound, m)?)?;
    m.add_function(wrap_pyfunction!(density_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ber_bound, m)?)?;
    m.add_function(wrap_pyfunction!(required_density, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_table, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_levels, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
