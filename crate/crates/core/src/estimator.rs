//! Least-squares density-matrix reconstruction over the Cholesky parameters.
//!
//! The fitted model is the noise-free Born prediction `N eta Tr(M_j rho(t))`
//! without integer rounding, so the objective is smooth in `t`. The estimator
//! knows `N` and `eta` but not the Raman or crosstalk contribution.

use crate::error::{Error, Result};
use crate::nelder_mead::{self, NelderMeadOptions};
use crate::photon::{CountVector, SourceParams};
use crate::quantum::{
    born_probabilities, cholesky_raw, density_from_cholesky, CholeskyParams, DensityMatrix,
    SicPovm, MAXIMALLY_MIXED_CHOLESKY,
};
use crate::rng::RngStream;

/// Objective value returned at the degenerate Cholesky origin.
pub const DEGENERATE_PENALTY: f64 = 1e30;

/// Stream id used for the random restart points.
const RESTART_STREAM: u64 = 0x7265_7374_6172_7473;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub restarts: usize,
    pub max_iterations_per_restart: usize,
    pub objective_tolerance: f64,
    pub initial_simplex_scale: f64,
    pub rng_seed_for_restarts: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            restarts: 9,
            max_iterations_per_restart: 2000,
            objective_tolerance: 1e-10,
            initial_simplex_scale: 0.25,
            rng_seed_for_restarts: 0,
        }
    }
}

impl EstimatorOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations_per_restart == 0 {
            return Err(Error::InvalidEstimatorInput(
                "restarts and max_iterations_per_restart must be at least 1".into(),
            ));
        }
        if !(self.objective_tolerance > 0.0) || !(self.initial_simplex_scale > 0.0) {
            return Err(Error::InvalidEstimatorInput(
                "objective_tolerance and initial_simplex_scale must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    pub t_hat: CholeskyParams,
    pub objective_value: f64,
    pub converged: bool,
    pub restarts_used: usize,
}

/// Unrounded Born-model counts `N eta Tr(M_j rho(t))`.
pub fn model_counts(
    t: &CholeskyParams,
    source: &SourceParams,
    eta: f64,
    povm: &SicPovm,
) -> Result<[f64; 4]> {
    let rho = density_from_cholesky(t)?;
    let scale = source.mean_photons() * eta;
    Ok(born_probabilities(&rho, povm).map(|p| scale * p))
}

/// Sum of squared residuals, evaluated in sorted order so that the value does
/// not depend on how the POVM elements are labeled.
fn sum_sorted_squares(mut residuals: [f64; 4]) -> f64 {
    for r in &mut residuals {
        *r *= *r;
    }
    residuals.sort_by(f64::total_cmp);
    residuals.iter().sum()
}

fn objective_raw(t: &[f64; 4], measured: &[f64; 4], scale: f64, povm: &SicPovm) -> f64 {
    let Some(rho) = cholesky_raw(t) else {
        return DEGENERATE_PENALTY;
    };
    let probs = born_probabilities(&rho, povm);
    sum_sorted_squares(std::array::from_fn(|j| scale * probs[j] - measured[j]))
}

/// `sum_j (model_j - m_j)^2`.
pub fn ls_objective(
    t: &[f64; 4],
    measured: &CountVector,
    source: &SourceParams,
    eta: f64,
    povm: &SicPovm,
) -> f64 {
    objective_raw(t, &measured.as_f64(), source.mean_photons() * eta, povm)
}

/// Fits `rho` to `measured` by multi-restart Nelder-Mead over `(t1..t4)`.
///
/// The first restart starts at the maximally mixed point; the others start at
/// uniform points in `[-1, 1]^4` drawn from `opts.rng_seed_for_restarts`.
pub fn reconstruct(
    measured: &CountVector,
    source: &SourceParams,
    eta: f64,
    povm: &SicPovm,
    opts: &EstimatorOptions,
) -> Result<ReconstructionResult> {
    opts.validate()?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEstimatorInput(format!(
            "transmittance {eta} outside (0, 1]"
        )));
    }
    let scale = source.mean_photons() * eta;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidEstimatorInput(
            "mean photon number times transmittance must be positive".into(),
        ));
    }

    let data = measured.as_f64();
    // Residuals below tolerance times the count scale are treated as an exact fit.
    let count_scale = scale.max(data.iter().sum());
    let nm_opts = NelderMeadOptions {
        max_iterations: opts.max_iterations_per_restart,
        tolerance: opts.objective_tolerance,
        absolute_floor: (opts.objective_tolerance * count_scale).powi(2),
        initial_step: opts.initial_simplex_scale,
    };
    let mut starts = RngStream::new(opts.rng_seed_for_restarts, RESTART_STREAM);

    let mut best: Option<nelder_mead::Minimum<4>> = None;
    for restart in 0..opts.restarts {
        let x0 = if restart == 0 {
            MAXIMALLY_MIXED_CHOLESKY
        } else {
            std::array::from_fn(|_| starts.uniform(-1.0, 1.0))
        };
        let run = nelder_mead::minimize(|t| objective_raw(t, &data, scale, povm), x0, &nm_opts);
        if run.value >= DEGENERATE_PENALTY || !run.value.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }

    let best = best.ok_or(Error::NoValidResult)?;
    let t_hat = CholeskyParams::new(best.x).map_err(|_| Error::NoValidResult)?;
    let rho_hat = density_from_cholesky(&t_hat)?;
    Ok(ReconstructionResult {
        rho_hat,
        t_hat,
        objective_value: best.value,
        converged: best.converged,
        restarts_used: opts.restarts,
    })
}
