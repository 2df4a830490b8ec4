//! Photon-count generation: noiseless expected counts, shot-noise counts and
//! counts with Raman and crosstalk contamination.

use crate::channel::{crosstalk_rate_per_s, raman_rate_per_s, transmittance, ChannelParams};
use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, DensityMatrix, SicPovm};
use crate::rng::RngStream;

/// Means below this use sequential inversion; at or above it, PTRS.
pub const POISSON_INVERSION_LIMIT: f64 = 10.0;

/// Means above this are rejected.
pub const POISSON_MAX_MEAN: f64 = 1e12;

/// Fraction of the noise photons that pass each measurement setting.
pub const NOISE_PASS_FRACTION: f64 = 0.5;

/// Mean photon number per measurement setting at the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    mean_photons: f64,
}

impl SourceParams {
    pub fn new(mean_photons: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return Err(Error::InvalidMean(mean_photons));
        }
        Ok(Self { mean_photons })
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }
}

/// Photon counts for the four POVM outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CountVector(pub [u64; 4]);

impl CountVector {
    pub fn as_f64(&self) -> [f64; 4] {
        self.0.map(|c| c as f64)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Draws from `Pois(mean)`.
///
/// Means below [`POISSON_INVERSION_LIMIT`] use inversion by sequential search
/// over the CDF with one uniform per draw. Larger means use Hörmann's PTRS
/// transformed rejection with squeeze (exact, two uniforms per attempt). Both
/// consume uniforms from `rng` in a fixed order, and all transcendental
/// functions come from `libm`, so a stream yields the same draws everywhere.
pub fn poisson_sample(mean: f64, rng: &mut RngStream) -> Result<u64> {
    if !mean.is_finite() || !(0.0..=POISSON_MAX_MEAN).contains(&mean) {
        return Err(Error::InvalidMean(mean));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < POISSON_INVERSION_LIMIT {
        Ok(poisson_inversion(mean, rng))
    } else {
        Ok(poisson_ptrs(mean, rng))
    }
}

fn poisson_inversion(mean: f64, rng: &mut RngStream) -> u64 {
    let u = rng.next_open01();
    let mut k = 0u64;
    let mut p = libm::exp(-mean);
    let mut cdf = p;
    // The tail beyond k = 200 has probability far below 2^-53 for mean < 10.
    while u > cdf && k < 200 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k
}

fn poisson_ptrs(mean: f64, rng: &mut RngStream) -> u64 {
    let slam = mean.sqrt();
    let loglam = libm::log(mean);
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.next_open01() - 0.5;
        let v = rng.next_open01();
        let us = 0.5 - u.abs();
        let k = libm::floor((2.0 * a / us + b) * u + mean + 0.43);
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = libm::log(v) + libm::log(inv_alpha) - libm::log(a / (us * us) + b);
        let rhs = -mean + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

fn round_count(x: f64) -> u64 {
    // Inputs are non-negative, so round() is round-half-up.
    x.max(0.0).round() as u64
}

/// Noiseless counts `round(N eta Tr(M_j rho))`.
pub fn expected_counts(
    rho: &DensityMatrix,
    source: &SourceParams,
    eta: f64,
    povm: &SicPovm,
) -> CountVector {
    let scale = source.mean_photons * eta;
    CountVector(born_probabilities(rho, povm).map(|p| round_count(scale * p)))
}

/// Shot-noise counts. Operator `j` draws its own total `Pois(N eta)` from
/// `streams[j]` and keeps the Born fraction of it.
pub fn simulate_counts_shot(
    rho_in: &DensityMatrix,
    source: &SourceParams,
    eta: f64,
    povm: &SicPovm,
    streams: &mut [RngStream; 4],
) -> Result<CountVector> {
    let mean = source.mean_photons * eta;
    let probs = born_probabilities(rho_in, povm);
    let mut counts = [0u64; 4];
    for ((count, p), rng) in counts.iter_mut().zip(probs).zip(streams.iter_mut()) {
        let total = poisson_sample(mean, rng)?;
        *count = round_count(total as f64 * p);
    }
    Ok(CountVector(counts))
}

/// Counts with shot noise, attenuation, Raman scattering and crosstalk.
///
/// Each operator draws, in this order from its own stream: the signal total
/// `Pois(N eta)`, Raman photons `Pois(tau N_ram)`, crosstalk photons
/// `Pois(tau N_cr)`. Half of the noise photons are added to the count.
pub fn simulate_counts_full(
    rho_in: &DensityMatrix,
    source: &SourceParams,
    channel: &ChannelParams,
    povm: &SicPovm,
    streams: &mut [RngStream; 4],
) -> Result<CountVector> {
    let eta = transmittance(channel);
    let signal_mean = source.mean_photons * eta;
    let raman_mean = channel.tau_s * raman_rate_per_s(channel);
    let crosstalk_mean = channel.tau_s * crosstalk_rate_per_s(channel);
    let probs = born_probabilities(rho_in, povm);
    let mut counts = [0u64; 4];
    for ((count, p), rng) in counts.iter_mut().zip(probs).zip(streams.iter_mut()) {
        let total = poisson_sample(signal_mean, rng)?;
        let raman = poisson_sample(raman_mean, rng)?;
        let crosstalk = poisson_sample(crosstalk_mean, rng)?;
        *count = round_count(total as f64 * p + NOISE_PASS_FRACTION * (raman + crosstalk) as f64);
    }
    Ok(CountVector(counts))
}
