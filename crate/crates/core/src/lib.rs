//! Monte Carlo simulation of qubit state tomography over a noisy fiber link.
//!
//! Polarization qubits are measured with the tetrahedral SIC-POVM after
//! passing through a fiber that attenuates the signal and adds forward Raman
//! and WDM crosstalk photons. Counts are fitted by least squares over a
//! Cholesky parameterization, and reconstruction quality is reported as the
//! average fidelity over a sample of pure input states.

pub mod channel;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod io;
pub mod nelder_mead;
pub mod photon;
pub mod quantum;
pub mod rng;

pub use channel::{
    crosstalk_rate_per_s, mean_noise_photons_per_window, raman_power_watts, raman_rate_per_s,
    transmittance, ChannelParams, PhysicalConstants,
};
pub use error::{Error, Result};
pub use estimator::{
    ls_objective, model_counts, reconstruct, EstimatorOptions, ReconstructionResult,
};
pub use harness::{
    generate_state_sample, preset, run_sweep, run_sweep_with_threads, run_trial, NoiseMode,
    ScenarioConfig, StateSample, SweepPoint, SweepResult, TrialIndices,
};
pub use photon::{
    expected_counts, poisson_sample, simulate_counts_full, simulate_counts_shot, CountVector,
    SourceParams,
};
pub use quantum::{
    born_probabilities, density_from_cholesky, fidelity, pure_state_density, sic_povm,
    CholeskyParams, ComplexMatrix2, DensityMatrix, PureStateAngles, SicPovm,
};
pub use rng::RngStream;
