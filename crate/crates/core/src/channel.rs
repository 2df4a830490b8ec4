//! Fiber-link noise budget: attenuation, forward Raman scattering and WDM crosstalk.
//!
//! Parameters are carried in the units engineers quote them in (km, nm, W, dB/km);
//! conversion to SI happens only inside the photon-rate computations.

use crate::error::{Error, Result};

/// Planck constant, J s (exact SI value).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

const NM_TO_M: f64 = 1e-9;

/// Fixed physical constants used by the photon-rate conversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h_joule_s: f64,
    pub c_m_per_s: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        h_joule_s: PLANCK_J_S,
        c_m_per_s: SPEED_OF_LIGHT_M_S,
    };
}

/// Physical description of the fiber link and the co-propagating classical channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub gamma_db_per_km: f64,
    pub length_km: f64,
    pub lambda_q_nm: f64,
    pub delta_lambda_nm: f64,
    pub raman_cross_section_per_km_nm: f64,
    pub p_in_watts: f64,
    pub xi_per_km: f64,
    pub tau_s: f64,
}

impl Default for ChannelParams {
    /// Telecom C-band defaults: 1548 nm quantum channel, 45 pm filter,
    /// 0.2 dB/km loss, 10 us gate, no classical power, no crosstalk.
    fn default() -> Self {
        Self {
            gamma_db_per_km: 0.2,
            length_km: 0.0,
            lambda_q_nm: 1548.0,
            delta_lambda_nm: 0.045,
            raman_cross_section_per_km_nm: 1.5e-9,
            p_in_watts: 0.0,
            xi_per_km: 0.0,
            tau_s: 1e-5,
        }
    }
}

impl ChannelParams {
    pub fn with_length(mut self, length_km: f64) -> Self {
        self.length_km = length_km;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_db_per_km", self.gamma_db_per_km),
            ("length_km", self.length_km),
            ("lambda_q_nm", self.lambda_q_nm),
            ("delta_lambda_nm", self.delta_lambda_nm),
            (
                "raman_cross_section_per_km_nm",
                self.raman_cross_section_per_km_nm,
            ),
            ("p_in_watts", self.p_in_watts),
            ("xi_per_km", self.xi_per_km),
            ("tau_s", self.tau_s),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidChannel {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
            if value < 0.0 {
                return Err(Error::InvalidChannel {
                    field,
                    reason: format!("must be non-negative, got {value}"),
                });
            }
        }
        if self.lambda_q_nm <= 0.0 {
            return Err(Error::InvalidChannel {
                field: "lambda_q_nm",
                reason: "must be positive".into(),
            });
        }
        if self.tau_s <= 0.0 {
            return Err(Error::InvalidChannel {
                field: "tau_s",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Power transmittance `10^(-gamma L / 10)` with `gamma` in dB/km.
pub fn transmittance(params: &ChannelParams) -> f64 {
    if params.length_km == 0.0 {
        return 1.0;
    }
    libm::pow(10.0, -params.gamma_db_per_km * params.length_km / 10.0)
}

/// Forward Raman scatter power reaching the quantum receiver, in W.
pub fn raman_power_watts(params: &ChannelParams) -> f64 {
    params.p_in_watts
        * params.length_km
        * transmittance(params)
        * params.raman_cross_section_per_km_nm
        * params.delta_lambda_nm
}

/// Crosstalk power leaking from the classical channel, in W.
pub fn crosstalk_power_watts(params: &ChannelParams) -> f64 {
    params.p_in_watts * params.length_km * transmittance(params) * params.xi_per_km
}

/// Converts an optical power at the quantum wavelength to photons per second.
fn photons_per_second(power_watts: f64, lambda_q_nm: f64) -> f64 {
    let c = PhysicalConstants::CODATA;
    power_watts * (lambda_q_nm * NM_TO_M) / (c.h_joule_s * c.c_m_per_s)
}

pub fn raman_rate_per_s(params: &ChannelParams) -> f64 {
    photons_per_second(raman_power_watts(params), params.lambda_q_nm)
}

pub fn crosstalk_rate_per_s(params: &ChannelParams) -> f64 {
    photons_per_second(crosstalk_power_watts(params), params.lambda_q_nm)
}

/// Mean Raman plus crosstalk photons in one detection window.
pub fn mean_noise_photons_per_window(params: &ChannelParams) -> f64 {
    params.tau_s * (raman_rate_per_s(params) + crosstalk_rate_per_s(params))
}
