//! Python bindings: Gold codes, the Q-function, operation counts, the
//! JIO-MBER detector and the Monte Carlo harness.

use std::path::Path;

use jiomber_core::complexity::{op_count as count, Algorithm, OpParams};
use jiomber_core::harness::config::{parse_config_str, DetectorKind, ExperimentConfig};
use jiomber_core::harness::monte_carlo::{run_monte_carlo as monte_carlo, ExperimentResult};
use jiomber_core::harness::sweep::{sweep as run_sweep, SweepAxis};
use jiomber_core::jio::{JioParams, JioState, Mode, RankSelectionConfig};
use jiomber_core::{Bit, CMatrix, CVector, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_config() || matches!(e, Error::Dimension(_)) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn bit_from(value: i64) -> PyResult<Bit> {
    match value {
        1 => Ok(Bit::Plus),
        -1 => Ok(Bit::Minus),
        other => Err(PyValueError::new_err(format!("bits are +1 or -1, got {other}"))),
    }
}

/// Chips (±1/√N) of every code in the Gold family of the given degree (5 or 7).
#[pyfunction]
fn gold_family(degree: u32) -> PyResult<Vec<Vec<f64>>> {
    let family = jiomber_core::signal::generate_gold_family(degree).map_err(to_py)?;
    Ok(family.into_iter().map(|c| c.chips().to_vec()).collect())
}

/// Gaussian tail probability `Q(x)`.
#[pyfunction]
fn q_function(x: f64) -> f64 {
    jiomber_core::detector::q_function(x)
}

/// `(multiplications, additions)` per symbol for one algorithm.
#[pyfunction]
#[pyo3(signature = (algorithm, m, d=None, j=None, lp=None, d_max=None))]
fn op_count(
    algorithm: &str,
    m: u64,
    d: Option<u64>,
    j: Option<u64>,
    lp: Option<u64>,
    d_max: Option<u64>,
) -> PyResult<(u64, u64)> {
    let alg: Algorithm = algorithm.parse().map_err(to_py)?;
    let r = count(
        alg,
        OpParams {
            m: Some(m),
            d,
            j,
            lp,
            d_max,
        },
    )
    .map_err(to_py)?;
    Ok((r.multiplications, r.additions))
}

/// Joint-iterative MBER reduced-rank detector.
///
/// `JioDetector(M, D, mu_w, mu_s, cycles, rho, d_min=None)`: with `d_min`
/// set, the detector adapts at rank `D` and selects a rank in `[d_min, D]`
/// for every symbol.
#[pyclass(name = "JioDetector")]
struct PyJioDetector {
    state: JioState,
}

#[pymethods]
impl PyJioDetector {
    #[new]
    #[pyo3(signature = (m, d, mu_w, mu_s, cycles, rho, d_min=None))]
    fn new(m: usize, d: usize, mu_w: f64, mu_s: f64, cycles: usize, rho: f64, d_min: Option<usize>) -> PyResult<Self> {
        let mut state = JioState::new(m, d, JioParams { mu_w, mu_s, cycles, rho }).map_err(to_py)?;
        if let Some(d_min) = d_min {
            state = state.with_rank_selection(RankSelectionConfig::new(d_min, d)).map_err(to_py)?;
        }
        Ok(Self { state })
    }

    /// Detects one window and adapts on it. Pass the transmitted bit while
    /// training; in decision-directed mode it is ignored. Returns `(decision, rank)`.
    #[pyo3(signature = (r, bit=None))]
    fn step(&mut self, r: Vec<Complex64>, bit: Option<i64>) -> PyResult<(i8, usize)> {
        let known = bit.map(bit_from).transpose()?;
        let out = self
            .state
            .step(&CVector::from_vec(r), known)
            .map_err(to_py)?;
        Ok((out.decision.into(), out.rank))
    }

    /// `"training"` or `"decision_directed"`.
    #[getter]
    fn mode(&self) -> &'static str {
        match self.state.mode() {
            Mode::Training => "training",
            Mode::DecisionDirected => "decision_directed",
        }
    }

    #[setter]
    fn set_mode(&mut self, mode: &str) -> PyResult<()> {
        let mode = match mode {
            "training" | "tr" => Mode::Training,
            "decision_directed" | "dd" => Mode::DecisionDirected,
            other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
        };
        self.state.set_mode(mode);
        Ok(())
    }

    /// `wᴴSᴴSw`.
    #[getter]
    fn norm_sq(&self) -> f64 {
        self.state.norm_sq()
    }

    #[getter]
    fn w(&self) -> Vec<Complex64> {
        self.state.w().iter().copied().collect()
    }

    /// Projection matrix as a list of rows.
    #[getter]
    fn s(&self) -> Vec<Vec<Complex64>> {
        let s: &CMatrix = self.state.s();
        s.row_iter().map(|row| row.iter().copied().collect()).collect()
    }

    /// Output `wᴴSᴴr` before adaptation.
    fn output(&self, r: Vec<Complex64>) -> PyResult<Complex64> {
        self.state.output(&CVector::from_vec(r)).map_err(to_py)
    }
}

fn load(config: &str, trials: Option<usize>, seed: Option<u64>) -> PyResult<ExperimentConfig> {
    let mut cfg = parse_config_str(config, Path::new("<python>")).map_err(to_py)?;
    if let Some(t) = trials {
        cfg.num_trials = t;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn result_dict<'py>(py: Python<'py>, result: &ExperimentResult) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for d in &result.detectors {
        let (ber, stderr) = d.final_ber(result.config.final_window);
        let entry = PyDict::new(py);
        entry.set_item("trace", d.trace.clone())?;
        entry.set_item("final_ber", ber)?;
        entry.set_item("stderr", stderr)?;
        entry.set_item("rank_range", d.rank_range)?;
        out.set_item(d.detector.name(), entry)?;
    }
    Ok(out)
}

/// Runs a Monte Carlo experiment. `config` uses the `key = value` file
/// format; omitted keys take their defaults. Returns a dict keyed by detector.
#[pyfunction]
#[pyo3(signature = (config="", trials=None, seed=None))]
fn run_monte_carlo<'py>(
    py: Python<'py>,
    config: &str,
    trials: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = load(config, trials, seed)?;
    let result = py.detach(|| monte_carlo(&cfg)).map_err(to_py)?;
    result_dict(py, &result)
}

/// Final BER along `axis` (`snr`, `users` or `rank`): a list of
/// `(axis_value, detector, ber, stderr)` tuples.
#[pyfunction]
#[pyo3(signature = (axis, config="", trials=None, seed=None))]
fn sweep(
    py: Python<'_>,
    axis: &str,
    config: &str,
    trials: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Vec<(f64, String, f64, f64)>> {
    let axis: SweepAxis = axis.parse().map_err(to_py)?;
    let cfg = load(config, trials, seed)?;
    let result = py.detach(|| run_sweep(&cfg, axis)).map_err(to_py)?;
    Ok(result
        .rows
        .into_iter()
        .map(|r| (r.axis_value, r.detector.name().to_string(), r.ber, r.stderr))
        .collect())
}

/// Names accepted in the `detectors` config key.
#[pyfunction]
fn detector_names() -> Vec<&'static str> {
    DetectorKind::ALL.iter().map(|d| d.name()).collect()
}

#[pymodule]
#[pyo3(name = "jiomber")]
fn jiomber_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gold_family, m)?)?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(op_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(detector_names, m)?)?;
    m.add_class::<PyJioDetector>()?;
    Ok(())
}
