//! Python bindings for `qst_sim`, importable as `pyqst`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use qst_sim::io::{parse_config, write_csv, RunConfig};
use qst_sim::rng::derive_stream_id;
use qst_sim::{self as core, CountVector, EstimatorOptions, RngStream, SourceParams, SweepResult};

type Matrix = [[Complex64; 2]; 2];
type Row = (String, f64, f64, f64, usize);

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn source(mean_photons: f64) -> PyResult<SourceParams> {
    SourceParams::new(mean_photons).map_err(value_error)
}

/// A validated 2x2 qubit density matrix.
#[pyclass(name = "DensityMatrix", module = "pyqst", frozen)]
struct PyDensityMatrix(core::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: Matrix) -> PyResult<Self> {
        core::DensityMatrix::new(core::ComplexMatrix2::new(matrix))
            .map(Self)
            .map_err(value_error)
    }

    /// `|psi><psi|` with `|psi> = cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>`.
    #[staticmethod]
    fn pure(theta: f64, phi: f64) -> PyResult<Self> {
        let angles = core::PureStateAngles::new(theta, phi).map_err(value_error)?;
        Ok(Self(core::pure_state_density(angles)))
    }

    #[staticmethod]
    fn from_cholesky(t: [f64; 4]) -> PyResult<Self> {
        let params = core::CholeskyParams::new(t).map_err(value_error)?;
        core::density_from_cholesky(&params)
            .map(Self)
            .map_err(value_error)
    }

    #[staticmethod]
    fn from_bloch(s: [f64; 3]) -> PyResult<Self> {
        core::DensityMatrix::from_bloch(s)
            .map(Self)
            .map_err(value_error)
    }

    #[staticmethod]
    fn maximally_mixed() -> Self {
        Self(core::DensityMatrix::maximally_mixed())
    }

    fn matrix(&self) -> Matrix {
        self.0.matrix().0
    }

    fn bloch_vector(&self) -> [f64; 3] {
        self.0.bloch_vector()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn __repr__(&self) -> String {
        let [x, y, z] = self.0.bloch_vector();
        format!("DensityMatrix(bloch=({x:.6}, {y:.6}, {z:.6}))")
    }
}

/// Fiber and noise parameters. Lengths in km, powers in W, wavelengths in nm.
#[pyclass(name = "ChannelParams", module = "pyqst")]
struct PyChannelParams {
    #[pyo3(get, set)]
    gamma_db_per_km: f64,
    #[pyo3(get, set)]
    length_km: f64,
    #[pyo3(get, set)]
    lambda_q_nm: f64,
    #[pyo3(get, set)]
    delta_lambda_nm: f64,
    #[pyo3(get, set)]
    raman_cross_section_per_km_nm: f64,
    #[pyo3(get, set)]
    p_in_watts: f64,
    #[pyo3(get, set)]
    xi_per_km: f64,
    #[pyo3(get, set)]
    tau_s: f64,
}

impl PyChannelParams {
    fn params(&self) -> PyResult<core::ChannelParams> {
        let p = core::ChannelParams {
            gamma_db_per_km: self.gamma_db_per_km,
            length_km: self.length_km,
            lambda_q_nm: self.lambda_q_nm,
            delta_lambda_nm: self.delta_lambda_nm,
            raman_cross_section_per_km_nm: self.raman_cross_section_per_km_nm,
            p_in_watts: self.p_in_watts,
            xi_per_km: self.xi_per_km,
            tau_s: self.tau_s,
        };
        p.validate().map_err(value_error)?;
        Ok(p)
    }
}

#[pymethods]
impl PyChannelParams {
    #[new]
    #[pyo3(signature = (
        length_km = 0.0,
        p_in_watts = 0.0,
        xi_per_km = 0.0,
        gamma_db_per_km = 0.2,
        lambda_q_nm = 1548.0,
        delta_lambda_nm = 0.045,
        raman_cross_section_per_km_nm = 1.5e-9,
        tau_s = 1e-5,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        length_km: f64,
        p_in_watts: f64,
        xi_per_km: f64,
        gamma_db_per_km: f64,
        lambda_q_nm: f64,
        delta_lambda_nm: f64,
        raman_cross_section_per_km_nm: f64,
        tau_s: f64,
    ) -> PyResult<Self> {
        let p = Self {
            gamma_db_per_km,
            length_km,
            lambda_q_nm,
            delta_lambda_nm,
            raman_cross_section_per_km_nm,
            p_in_watts,
            xi_per_km,
            tau_s,
        };
        p.params()?;
        Ok(p)
    }

    fn transmittance(&self) -> PyResult<f64> {
        Ok(core::transmittance(&self.params()?))
    }

    /// Raman photons per second at the receiver.
    fn raman_rate(&self) -> PyResult<f64> {
        Ok(core::raman_rate_per_s(&self.params()?))
    }

    /// Crosstalk photons per second at the receiver.
    fn crosstalk_rate(&self) -> PyResult<f64> {
        Ok(core::crosstalk_rate_per_s(&self.params()?))
    }

    fn mean_noise_photons(&self) -> PyResult<f64> {
        Ok(core::mean_noise_photons_per_window(&self.params()?))
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelParams(length_km={}, p_in_watts={}, xi_per_km={}, gamma_db_per_km={})",
            self.length_km, self.p_in_watts, self.xi_per_km, self.gamma_db_per_km
        )
    }
}

#[pyclass(name = "ReconstructionResult", module = "pyqst", frozen)]
struct PyReconstructionResult(core::ReconstructionResult);

#[pymethods]
impl PyReconstructionResult {
    #[getter]
    fn rho(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.rho_hat)
    }

    #[getter]
    fn t(&self) -> [f64; 4] {
        self.0.t_hat.as_array()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.0.objective_value
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn restarts_used(&self) -> usize {
        self.0.restarts_used
    }
}

/// The four tetrahedral SIC-POVM operators as 2x2 complex matrices.
#[pyfunction]
fn sic_povm() -> Vec<Matrix> {
    core::sic_povm().operators().iter().map(|m| m.0).collect()
}

#[pyfunction]
fn born_probabilities(rho: &PyDensityMatrix) -> [f64; 4] {
    core::born_probabilities(&rho.0, &core::sic_povm())
}

#[pyfunction]
fn fidelity(rho: &PyDensityMatrix, sigma: &PyDensityMatrix) -> f64 {
    core::fidelity(&rho.0, &sigma.0)
}

#[pyfunction]
fn expected_counts(rho: &PyDensityMatrix, mean_photons: f64, eta: f64) -> PyResult<[u64; 4]> {
    Ok(core::expected_counts(&rho.0, &source(mean_photons)?, eta, &core::sic_povm()).0)
}

fn operator_streams(seed: u64, stream: u64) -> [RngStream; 4] {
    [0u64, 1, 2, 3].map(|j| RngStream::new(seed, derive_stream_id(&[stream, j])))
}

#[pyfunction]
#[pyo3(signature = (rho, mean_photons, eta, seed, stream = 0))]
fn simulate_counts_shot(
    rho: &PyDensityMatrix,
    mean_photons: f64,
    eta: f64,
    seed: u64,
    stream: u64,
) -> PyResult<[u64; 4]> {
    let mut streams = operator_streams(seed, stream);
    core::simulate_counts_shot(
        &rho.0,
        &source(mean_photons)?,
        eta,
        &core::sic_povm(),
        &mut streams,
    )
    .map(|c| c.0)
    .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (rho, mean_photons, channel, seed, stream = 0))]
fn simulate_counts_full(
    rho: &PyDensityMatrix,
    mean_photons: f64,
    channel: &PyChannelParams,
    seed: u64,
    stream: u64,
) -> PyResult<[u64; 4]> {
    let mut streams = operator_streams(seed, stream);
    core::simulate_counts_full(
        &rho.0,
        &source(mean_photons)?,
        &channel.params()?,
        &core::sic_povm(),
        &mut streams,
    )
    .map(|c| c.0)
    .map_err(value_error)
}

/// Least-squares state estimate from four counts.
#[pyfunction]
#[pyo3(signature = (counts, mean_photons, eta = 1.0, restarts = 9, seed = 0))]
fn reconstruct(
    py: Python<'_>,
    counts: [u64; 4],
    mean_photons: f64,
    eta: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<PyReconstructionResult> {
    let source = source(mean_photons)?;
    let opts = EstimatorOptions {
        restarts,
        rng_seed_for_restarts: seed,
        ..EstimatorOptions::default()
    };
    py.detach(|| core::reconstruct(&CountVector(counts), &source, eta, &core::sic_povm(), &opts))
        .map(PyReconstructionResult)
        .map_err(value_error)
}

/// `(theta, phi)` pairs of the pure-state grid, theta-major.
#[pyfunction]
fn generate_state_sample(n_theta: usize, n_phi: usize) -> PyResult<Vec<(f64, f64)>> {
    let sample = core::generate_state_sample(n_theta, n_phi).map_err(value_error)?;
    Ok(sample.states.iter().map(|a| (a.theta(), a.phi())).collect())
}

fn run_all(
    py: Python<'_>,
    configs: Vec<core::ScenarioConfig>,
    n_theta: usize,
    n_phi: usize,
    threads: Option<usize>,
) -> PyResult<Vec<SweepResult>> {
    let sample = core::generate_state_sample(n_theta, n_phi).map_err(value_error)?;
    py.detach(|| {
        configs
            .iter()
            .map(|cfg| match threads {
                Some(n) => core::run_sweep_with_threads(cfg, &sample, n),
                None => core::run_sweep(cfg, &sample),
            })
            .collect::<qst_sim::Result<Vec<_>>>()
    })
    .map_err(value_error)
}

fn rows(results: &[SweepResult]) -> Vec<Row> {
    results
        .iter()
        .flat_map(|r| {
            r.points.iter().map(|p| {
                (
                    r.config.label.clone(),
                    p.length_km,
                    p.mean_fidelity,
                    p.sd_fidelity,
                    p.n_states,
                )
            })
        })
        .collect()
}

fn csv_text(results: &[SweepResult]) -> PyResult<String> {
    let mut buf = Vec::new();
    write_csv(results, &mut buf).map_err(|e| PyIOError::new_err(e.to_string()))?;
    String::from_utf8(buf).map_err(value_error)
}

fn config_from_text(text: &str, seed: Option<u64>) -> PyResult<RunConfig> {
    let mut cfg = parse_config(text).map_err(value_error)?;
    if let Some(seed) = seed {
        cfg.scenario.master_seed = seed;
    }
    Ok(cfg)
}

/// Checks a configuration file body and returns its scenario label.
#[pyfunction]
fn validate_config(text: &str) -> PyResult<String> {
    Ok(config_from_text(text, None)?.scenario.label)
}

/// Runs a configuration file body; rows are `(label, L, mean, sd, n_states)`.
#[pyfunction]
#[pyo3(signature = (text, seed = None, threads = None))]
fn run_config(
    py: Python<'_>,
    text: &str,
    seed: Option<u64>,
    threads: Option<usize>,
) -> PyResult<Vec<Row>> {
    let cfg = config_from_text(text, seed)?;
    Ok(rows(&run_all(
        py,
        vec![cfg.scenario],
        cfg.n_theta,
        cfg.n_phi,
        threads,
    )?))
}

#[pyfunction]
#[pyo3(signature = (name, seed = 42, threads = None))]
fn run_preset(py: Python<'_>, name: &str, seed: u64, threads: Option<usize>) -> PyResult<Vec<Row>> {
    let configs = core::preset(name, seed).map_err(value_error)?;
    Ok(rows(&run_all(py, configs, 10, 20, threads)?))
}

/// Same bytes as `qst-sim preset --name NAME --seed SEED`.
#[pyfunction]
#[pyo3(signature = (name, seed = 42, threads = None))]
fn preset_csv(py: Python<'_>, name: &str, seed: u64, threads: Option<usize>) -> PyResult<String> {
    let configs = core::preset(name, seed).map_err(value_error)?;
    csv_text(&run_all(py, configs, 10, 20, threads)?)
}

#[pymodule]
fn pyqst(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyChannelParams>()?;
    m.add_class::<PyReconstructionResult>()?;
    m.add_function(wrap_pyfunction!(sic_povm, m)?)?;
    m.add_function(wrap_pyfunction!(born_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(expected_counts, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_counts_shot, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_counts_full, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(generate_state_sample, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(preset_csv, m)?)?;
    Ok(())
}
