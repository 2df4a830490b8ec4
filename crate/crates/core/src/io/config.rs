//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments and blank lines are ignored
//! scenario.label = fig2_pin01mw
//! source.mean_photons = 500
//! channel.p_in_mw = 1
//! sweep.lengths_km = 0, 10, 20, 30
//! sweep.noise_mode = full_noise
//! ```
//!
//! Omitted channel keys take the standard C-band values (1548 nm, 45 pm,
//! 1.5e-9 per km nm, 0.2 dB/km, 10 us).

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;

use crate::channel::ChannelParams;
use crate::estimator::EstimatorOptions;
use crate::harness::{default_lengths_km, NoiseMode, ScenarioConfig};
use crate::photon::SourceParams;

pub const DEFAULT_LABEL: &str = "scenario";
pub const DEFAULT_MEAN_PHOTONS: f64 = 500.0;
pub const DEFAULT_MASTER_SEED: u64 = 42;
pub const DEFAULT_N_THETA: usize = 10;
pub const DEFAULT_N_PHI: usize = 20;

const KNOWN_KEYS: [&str; 15] = [
    "scenario.label",
    "source.mean_photons",
    "channel.gamma_db_per_km",
    "channel.lambda_q_nm",
    "channel.delta_lambda_nm",
    "channel.raman_cross_section_per_km_nm",
    "channel.tau_s",
    "channel.p_in_mw",
    "channel.xi_per_km",
    "sweep.lengths_km",
    "sweep.noise_mode",
    "sample.n_theta",
    "sample.n_phi",
    "seed.master",
    "estimator.restarts",
];

/// A parse or validation failure; `line` is 1-based, 0 when not tied to a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub key: String,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (0, true) => write!(f, "{}", self.reason),
            (0, false) => write!(f, "{}: {}", self.key, self.reason),
            (line, true) => write!(f, "line {line}: {}", self.reason),
            (line, false) => write!(f, "line {line}: {}: {}", self.key, self.reason),
        }
    }
}

impl std::error::Error for ParseError {}

/// A parsed configuration file: one scenario plus the state-sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig {
                label: DEFAULT_LABEL.into(),
                source: SourceParams::new(DEFAULT_MEAN_PHOTONS).expect("valid default"),
                channel_template: ChannelParams::default(),
                lengths_km: default_lengths_km(),
                noise_mode: NoiseMode::FullNoise,
                master_seed: DEFAULT_MASTER_SEED,
                estimator_opts: EstimatorOptions::default(),
            },
            n_theta: DEFAULT_N_THETA,
            n_phi: DEFAULT_N_PHI,
        }
    }
}

fn err(line: usize, key: &str, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    let x: f64 = value
        .parse()
        .map_err(|_| err(line, key, format!("'{value}' is not a number")))?;
    if !x.is_finite() {
        return Err(err(line, key, "must be finite"));
    }
    Ok(x)
}

fn parse_non_negative(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    let x = parse_f64(line, key, value)?;
    if x < 0.0 {
        return Err(err(line, key, format!("must be non-negative, got {x}")));
    }
    Ok(x)
}

fn parse_positive(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    let x = parse_f64(line, key, value)?;
    if x <= 0.0 {
        return Err(err(line, key, format!("must be positive, got {x}")));
    }
    Ok(x)
}

fn parse_count(line: usize, key: &str, value: &str) -> Result<usize, ParseError> {
    let n: usize = value.parse().map_err(|_| {
        err(
            line,
            key,
            format!("'{value}' is not a non-negative integer"),
        )
    })?;
    if n == 0 {
        return Err(err(line, key, "must be at least 1"));
    }
    Ok(n)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ParseError> {
    let mut config = RunConfig::default();
    let mut seen = HashSet::new();
    let mut lengths_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, "", format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(line, key, "unknown key"));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(line, key, "duplicate key"));
        }

        let scenario = &mut config.scenario;
        let channel = &mut scenario.channel_template;
        match key {
            "scenario.label" => {
                if value.is_empty() || value.contains(',') {
                    return Err(err(line, key, "must be non-empty and contain no commas"));
                }
                scenario.label = value.to_string();
            }
            "source.mean_photons" => {
                scenario.source = SourceParams::new(parse_non_negative(line, key, value)?)
                    .map_err(|e| err(line, key, e.to_string()))?;
            }
            "channel.gamma_db_per_km" => {
                channel.gamma_db_per_km = parse_non_negative(line, key, value)?
            }
            "channel.lambda_q_nm" => channel.lambda_q_nm = parse_positive(line, key, value)?,
            "channel.delta_lambda_nm" => {
                channel.delta_lambda_nm = parse_non_negative(line, key, value)?
            }
            "channel.raman_cross_section_per_km_nm" => {
                channel.raman_cross_section_per_km_nm = parse_non_negative(line, key, value)?
            }
            "channel.tau_s" => channel.tau_s = parse_positive(line, key, value)?,
            "channel.p_in_mw" => {
                channel.p_in_watts = mw_to_watts(parse_non_negative(line, key, value)?)
            }
            "channel.xi_per_km" => channel.xi_per_km = parse_non_negative(line, key, value)?,
            "sweep.lengths_km" => {
                lengths_line = line;
                scenario.lengths_km = value
                    .split(',')
                    .map(|v| parse_non_negative(line, key, v.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "sweep.noise_mode" => {
                scenario.noise_mode = value.parse().map_err(|e: String| err(line, key, e))?;
            }
            "sample.n_theta" => config.n_theta = parse_count(line, key, value)?,
            "sample.n_phi" => config.n_phi = parse_count(line, key, value)?,
            "seed.master" => {
                scenario.master_seed = value.parse().map_err(|_| {
                    err(
                        line,
                        key,
                        format!("'{value}' is not an unsigned 64-bit integer"),
                    )
                })?;
            }
            "estimator.restarts" => {
                scenario.estimator_opts.restarts = parse_count(line, key, value)?
            }
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    if config.scenario.lengths_km.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err(
            lengths_line,
            "sweep.lengths_km",
            "lengths must be strictly increasing",
        ));
    }
    config
        .scenario
        .validate()
        .map_err(|e| err(0, "", e.to_string()))?;
    Ok(config)
}

fn mw_to_watts(mw: f64) -> f64 {
    mw * 1e-3
}

/// A milliwatt value that converts back to exactly `watts`, when one exists
/// next to the naive quotient.
fn watts_to_mw_exact(watts: f64) -> f64 {
    let guess = watts * 1e3;
    let mut candidates = [guess, guess, guess, guess, guess];
    let mut up = guess;
    let mut down = guess;
    for k in 0..2 {
        up = next_toward(up, f64::INFINITY);
        down = next_toward(down, f64::NEG_INFINITY);
        candidates[1 + 2 * k] = up;
        candidates[2 + 2 * k] = down;
    }
    candidates
        .into_iter()
        .find(|mw| mw_to_watts(*mw) == watts)
        .unwrap_or(guess)
}

fn next_toward(x: f64, target: f64) -> f64 {
    if x == 0.0 {
        return if target > 0.0 {
            f64::from_bits(1)
        } else {
            -f64::from_bits(1)
        };
    }
    let bits = x.to_bits();
    let away_from_zero = (target > x) == (x > 0.0);
    f64::from_bits(if away_from_zero { bits + 1 } else { bits - 1 })
}

/// Writes every key so that [`parse_config`] reproduces `config` exactly.
pub fn serialize_config(config: &RunConfig) -> String {
    let s = &config.scenario;
    let c = &s.channel_template;
    let lengths: Vec<String> = s.lengths_km.iter().map(|l| format!("{l:?}")).collect();
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("scenario.label", s.label.clone());
    put(
        "source.mean_photons",
        format!("{:?}", s.source.mean_photons()),
    );
    put(
        "channel.gamma_db_per_km",
        format!("{:?}", c.gamma_db_per_km),
    );
    put("channel.lambda_q_nm", format!("{:?}", c.lambda_q_nm));
    put(
        "channel.delta_lambda_nm",
        format!("{:?}", c.delta_lambda_nm),
    );
    put(
        "channel.raman_cross_section_per_km_nm",
        format!("{:?}", c.raman_cross_section_per_km_nm),
    );
    put("channel.tau_s", format!("{:?}", c.tau_s));
    put(
        "channel.p_in_mw",
        format!("{:?}", watts_to_mw_exact(c.p_in_watts)),
    );
    put("channel.xi_per_km", format!("{:?}", c.xi_per_km));
    put("sweep.lengths_km", lengths.join(", "));
    put("sweep.noise_mode", s.noise_mode.to_string());
    put("sample.n_theta", config.n_theta.to_string());
    put("sample.n_phi", config.n_phi.to_string());
    put("seed.master", s.master_seed.to_string());
    put("estimator.restarts", s.estimator_opts.restarts.to_string());
    out
}
