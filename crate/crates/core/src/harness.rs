//! Monte Carlo driver: state samples, single trials and fiber-length sweeps.
//!
//! Every trial seeds its random streams from `(master_seed, scenario, state,
//! length, operator)` so results do not depend on how trials are scheduled
//! across worker threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{transmittance, ChannelParams};
use crate::error::{Error, Result};
use crate::estimator::{reconstruct, EstimatorOptions};
use crate::photon::{simulate_counts_full, simulate_counts_shot, SourceParams};
use crate::quantum::{fidelity, pure_state_density, sic_povm, PureStateAngles};
use crate::rng::{derive_stream_id, fnv1a64, RngStream};

/// Tag mixed into the estimator restart seed so it never collides with a
/// photon-count stream.
const RESTART_TAG: u64 = 0x4553_5449_4d41_5445;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSample {
    pub states: Vec<PureStateAngles>,
}

impl StateSample {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Midpoint grid in theta times uniform grid in phi, theta-major.
///
/// `theta_i = pi (i + 1/2) / n_theta`, `phi_k = 2 pi k / n_phi`.
pub fn generate_state_sample(n_theta: usize, n_phi: usize) -> Result<StateSample> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::InvalidScenario(
            "n_theta and n_phi must be at least 1".into(),
        ));
    }
    let mut states = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = PI * (i as f64 + 0.5) / n_theta as f64;
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            states.push(PureStateAngles::new(theta, phi)?);
        }
    }
    Ok(StateSample { states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    ShotOnly,
    FullNoise,
}

impl NoiseMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseMode::ShotOnly => "shot_only",
            NoiseMode::FullNoise => "full_noise",
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "shot_only" => Ok(NoiseMode::ShotOnly),
            "full_noise" => Ok(NoiseMode::FullNoise),
            other => Err(format!("expected shot_only or full_noise, got '{other}'")),
        }
    }
}

/// One curve of an experiment: a source, a channel and a list of lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: String,
    pub source: SourceParams,
    /// Channel parameters; `length_km` is ignored and set per sweep point.
    pub channel_template: ChannelParams,
    pub lengths_km: Vec<f64>,
    pub noise_mode: NoiseMode,
    pub master_seed: u64,
    pub estimator_opts: EstimatorOptions,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.label.trim().is_empty() {
            return Err(Error::InvalidScenario("label must be non-empty".into()));
        }
        if self.lengths_km.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one length is required".into(),
            ));
        }
        if self.lengths_km.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidScenario(
                "lengths must be finite and non-negative".into(),
            ));
        }
        if self.lengths_km.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScenario(
                "lengths must be strictly increasing".into(),
            ));
        }
        self.channel_template.validate()?;
        self.estimator_opts.validate()
    }

    /// Stream component identifying this scenario, derived from its label.
    pub fn scenario_index(&self) -> u64 {
        fnv1a64(self.label.as_bytes())
    }
}

/// Position of a trial within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialIndices {
    pub scenario: u64,
    pub state: u64,
    pub length: u64,
}

impl TrialIndices {
    fn operator_streams(&self, seed: u64) -> [RngStream; 4] {
        [0u64, 1, 2, 3].map(|op| {
            RngStream::new(
                seed,
                derive_stream_id(&[self.scenario, self.state, self.length, op]),
            )
        })
    }

    fn restart_seed(&self, seed: u64) -> u64 {
        derive_stream_id(&[seed, self.scenario, self.state, self.length, RESTART_TAG])
    }
}

/// Simulates, reconstructs and scores a single input state at one length.
pub fn run_trial(
    state: PureStateAngles,
    config: &ScenarioConfig,
    length_km: f64,
    indices: TrialIndices,
) -> Result<f64> {
    let povm = sic_povm();
    let rho_in = pure_state_density(state);
    let channel = config.channel_template.with_length(length_km);
    let eta = transmittance(&channel);
    let mut streams = indices.operator_streams(config.master_seed);

    let counts = match config.noise_mode {
        NoiseMode::ShotOnly => {
            simulate_counts_shot(&rho_in, &config.source, eta, &povm, &mut streams)?
        }
        NoiseMode::FullNoise => {
            simulate_counts_full(&rho_in, &config.source, &channel, &povm, &mut streams)?
        }
    };

    let opts = EstimatorOptions {
        rng_seed_for_restarts: indices.restart_seed(config.master_seed),
        ..config.estimator_opts
    };
    let fit = reconstruct(&counts, &config.source, eta, &povm, &opts)?;
    Ok(fidelity(&rho_in, &fit.rho_hat))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub length_km: f64,
    pub mean_fidelity: f64,
    pub sd_fidelity: f64,
    pub n_states: usize,
    pub fidelities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point_at(&self, length_km: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.length_km == length_km)
    }

    /// Smallest length whose mean fidelity falls below `threshold`.
    pub fn first_length_below(&self, threshold: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.mean_fidelity < threshold)
            .map(|p| p.length_km)
    }
}

/// Mean and sample standard deviation (n - 1); the SD is 0 for a single value.
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Runs every state at every length on the current rayon pool.
pub fn run_sweep(config: &ScenarioConfig, sample: &StateSample) -> Result<SweepResult> {
    config.validate()?;
    if sample.is_empty() {
        return Err(Error::InvalidScenario("state sample is empty".into()));
    }
    let scenario = config.scenario_index();
    let n_states = sample.len();
    let jobs: Vec<(usize, usize)> = (0..config.lengths_km.len())
        .flat_map(|l| (0..n_states).map(move |s| (l, s)))
        .collect();

    let fidelities: Vec<f64> = jobs
        .par_iter()
        .map(|&(l, s)| {
            let indices = TrialIndices {
                scenario,
                state: s as u64,
                length: l as u64,
            };
            run_trial(sample.states[s], config, config.lengths_km[l], indices)
        })
        .collect::<Result<_>>()?;

    let points = config
        .lengths_km
        .iter()
        .zip(fidelities.chunks_exact(n_states))
        .map(|(&length_km, chunk)| {
            let (mean_fidelity, sd_fidelity) = mean_and_sd(chunk);
            SweepPoint {
                length_km,
                mean_fidelity,
                sd_fidelity,
                n_states,
                fidelities: chunk.to_vec(),
            }
        })
        .collect();
    Ok(SweepResult {
        config: config.clone(),
        points,
    })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(
    config: &ScenarioConfig,
    sample: &StateSample,
    threads: usize,
) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidScenario(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(config, sample))
}

/// Fiber lengths 0, 10, ..., 200 km.
pub fn default_lengths_km() -> Vec<f64> {
    (0..=20).map(|k| 10.0 * k as f64).collect()
}

/// Mean photon number used by the classical-power and crosstalk presets.
pub const PRESET_NOISE_MEAN_PHOTONS: f64 = 500.0;

/// The three built-in experiment families.
pub fn preset(name: &str, master_seed: u64) -> Result<Vec<ScenarioConfig>> {
    let base = |label: String, mean_photons: f64, noise_mode, p_in_mw: f64, xi_per_km: f64| {
        Ok(ScenarioConfig {
            label,
            source: SourceParams::new(mean_photons)?,
            channel_template: ChannelParams {
                p_in_watts: p_in_mw * 1e-3,
                xi_per_km,
                ..ChannelParams::default()
            },
            lengths_km: default_lengths_km(),
            noise_mode,
            master_seed,
            estimator_opts: EstimatorOptions::default(),
        })
    };
    match name {
        "fig1" => [100.0, 200.0, 500.0]
            .iter()
            .map(|&n| base(format!("fig1_n{n:03}"), n, NoiseMode::ShotOnly, 0.0, 0.0))
            .collect(),
        "fig2" => [0.0, 1.0, 10.0, 50.0]
            .iter()
            .map(|&p| {
                base(
                    format!("fig2_pin{p:02}mw"),
                    PRESET_NOISE_MEAN_PHOTONS,
                    NoiseMode::FullNoise,
                    p,
                    0.0,
                )
            })
            .collect(),
        "fig3" => [
            ("1e-12", 1e-12),
            ("5e-11", 5e-11),
            ("5e-10", 5e-10),
            ("5e-9", 5e-9),
        ]
        .iter()
        .map(|&(tag, xi)| {
            base(
                format!("fig3_xi{tag}"),
                PRESET_NOISE_MEAN_PHOTONS,
                NoiseMode::FullNoise,
                1.0,
                xi,
            )
        })
        .collect(),
        other => Err(Error::InvalidScenario(format!(
            "unknown preset '{other}' (expected fig1, fig2 or fig3)"
        ))),
    }
}
