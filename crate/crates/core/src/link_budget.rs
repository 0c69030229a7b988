//! Antenna gain, thermal noise and Shannon capacity of a single link, plus
//! the closed-form minimum beamwidth that meets a target rate.
//!
//! Gain follows the ideal conical main lobe `G = X / (delta_h * delta_v)`
//! with equal horizontal and vertical beamwidths in degrees. Noise is
//! integrated over the link bandwidth: `N = N0 + 10 log10(B)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Aperture factor of a uniformly illuminated circular aperture.
pub const CIRCULAR_APERTURE: f64 = 52_525.0;
/// Aperture factor of a uniformly illuminated rectangular aperture.
pub const RECTANGULAR_APERTURE: f64 = 41_253.0;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("invalid link parameter: {0}")]
    InvalidParameter(String),
    #[error("target rate unattainable: required SNR {required_snr_db:.2} dB leaves no positive beamwidth")]
    Unattainable { required_snr_db: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaModel {
    aperture_factor: f64,
    beamwidth_deg: f64,
}

impl AntennaModel {
    pub fn new(aperture_factor: f64, beamwidth_deg: f64) -> Result<Self, LinkError> {
        if !(aperture_factor > 0.0 && aperture_factor.is_finite()) {
            return Err(LinkError::InvalidParameter(format!(
                "aperture factor must be positive, got {aperture_factor}"
            )));
        }
        if !(beamwidth_deg > 0.0 && beamwidth_deg <= 180.0) {
            return Err(LinkError::InvalidParameter(format!(
                "beamwidth must be in (0, 180] degrees, got {beamwidth_deg}"
            )));
        }
        Ok(Self {
            aperture_factor,
            beamwidth_deg,
        })
    }

    /// Circular aperture (X = 52525).
    pub fn circular(beamwidth_deg: f64) -> Result<Self, LinkError> {
        Self::new(CIRCULAR_APERTURE, beamwidth_deg)
    }

    pub fn aperture_factor(&self) -> f64 {
        self.aperture_factor
    }

    pub fn beamwidth_deg(&self) -> f64 {
        self.beamwidth_deg
    }

    pub fn with_beamwidth(&self, beamwidth_deg: f64) -> Result<Self, LinkError> {
        Self::new(self.aperture_factor, beamwidth_deg)
    }

    pub fn gain_linear(&self) -> f64 {
        antenna_gain_linear(self)
    }

    pub fn gain_dbi(&self) -> f64 {
        10.0 * self.gain_linear().log10()
    }
}

/// `X / delta^2`, dimensionless.
pub fn antenna_gain_linear(antenna: &AntennaModel) -> f64 {
    antenna.aperture_factor / (antenna.beamwidth_deg * antenna.beamwidth_deg)
}

/// Thermal noise power spectral density `10 log10(k T) + NF` in dBW/Hz.
pub fn noise_psd_dbw_per_hz(noise_figure_db: f64, temperature_k: f64) -> f64 {
    10.0 * (BOLTZMANN * temperature_k).log10() + noise_figure_db
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
    pub tx_antenna: AntennaModel,
    pub rx_antenna: AntennaModel,
}

impl RadioParams {
    pub fn new(
        tx_power_dbm: f64,
        noise_figure_db: f64,
        temperature_k: f64,
        tx_antenna: AntennaModel,
        rx_antenna: AntennaModel,
    ) -> Result<Self, LinkError> {
        let radio = Self {
            tx_power_dbm,
            noise_figure_db,
            temperature_k,
            tx_antenna,
            rx_antenna,
        };
        radio.validate()?;
        Ok(radio)
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        if !(self.temperature_k > 0.0 && self.temperature_k.is_finite()) {
            return Err(LinkError::InvalidParameter(format!(
                "temperature must be positive, got {} K",
                self.temperature_k
            )));
        }
        if !(self.noise_figure_db >= 0.0 && self.noise_figure_db.is_finite()) {
            return Err(LinkError::InvalidParameter(format!(
                "noise figure must be >= 0 dB, got {}",
                self.noise_figure_db
            )));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(LinkError::InvalidParameter("transmit power must be finite".into()));
        }
        // re-check antennas in case they were deserialized
        AntennaModel::new(self.tx_antenna.aperture_factor, self.tx_antenna.beamwidth_deg)?;
        AntennaModel::new(self.rx_antenna.aperture_factor, self.rx_antenna.beamwidth_deg)?;
        Ok(())
    }

    /// Same radio with both ends set to `beamwidth_deg`.
    pub fn with_beamwidth(&self, beamwidth_deg: f64) -> Result<Self, LinkError> {
        Ok(Self {
            tx_antenna: self.tx_antenna.with_beamwidth(beamwidth_deg)?,
            rx_antenna: self.rx_antenna.with_beamwidth(beamwidth_deg)?,
            ..*self
        })
    }

    pub fn noise_psd_dbw_per_hz(&self) -> f64 {
        noise_psd_dbw_per_hz(self.noise_figure_db, self.temperature_k)
    }

    /// Received SNR in dB over `bandwidth_hz` for a total path loss.
    pub fn snr_db(&self, bandwidth_hz: f64, loss_total_db: f64) -> f64 {
        let tx_dbw = self.tx_power_dbm - 30.0;
        let noise_dbw = self.noise_psd_dbw_per_hz() + 10.0 * bandwidth_hz.log10();
        tx_dbw + self.tx_antenna.gain_dbi() + self.rx_antenna.gain_dbi() - loss_total_db - noise_dbw
    }
}

impl Default for RadioParams {
    /// 0 dBm, 10 dB noise figure, 25 degC, circular apertures at 10 degrees.
    fn default() -> Self {
        let antenna = AntennaModel {
            aperture_factor: CIRCULAR_APERTURE,
            beamwidth_deg: 10.0,
        };
        Self {
            tx_power_dbm: 0.0,
            noise_figure_db: 10.0,
            temperature_k: 298.15,
            tx_antenna: antenna,
            rx_antenna: antenna,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkDemand {
    pub target_rate_bps: f64,
    pub bandwidth_hz: f64,
    pub center_freq_ghz: f64,
}

impl LinkDemand {
    pub fn new(target_rate_bps: f64, bandwidth_hz: f64, center_freq_ghz: f64) -> Result<Self, LinkError> {
        for (name, v) in [
            ("target rate", target_rate_bps),
            ("bandwidth", bandwidth_hz),
            ("center frequency", center_freq_ghz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LinkError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            target_rate_bps,
            bandwidth_hz,
            center_freq_ghz,
        })
    }
}

/// Shannon capacity `B log2(1 + SNR)` in bit/s.
pub fn capacity_bps(radio: &RadioParams, demand: &LinkDemand, loss_total_db: f64) -> f64 {
    let snr = 10f64.powf(radio.snr_db(demand.bandwidth_hz, loss_total_db) / 10.0);
    demand.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Smallest common beamwidth (degrees) at which [`capacity_bps`] reaches
/// `demand.target_rate_bps`:
///
/// `delta^4 = X_t X_r P_t / (L_T N B (2^(R/B) - 1))`
///
/// The result is not capped at 180 degrees; values above that mean even an
/// isotropic-ish beam meets the demand.
pub fn min_beamwidth_deg(radio: &RadioParams, demand: &LinkDemand, loss_total_db: f64) -> Result<f64, LinkError> {
    let required_snr = (demand.target_rate_bps / demand.bandwidth_hz * std::f64::consts::LN_2).exp_m1();
    let required_snr_db = 10.0 * required_snr.log10();
    let p_watt = 10f64.powf((radio.tx_power_dbm - 30.0) / 10.0);
    let loss = 10f64.powf(loss_total_db / 10.0);
    let noise_watt = 10f64.powf(radio.noise_psd_dbw_per_hz() / 10.0) * demand.bandwidth_hz;
    let apertures = radio.tx_antenna.aperture_factor * radio.rx_antenna.aperture_factor;
    let radicand = apertures * p_watt / (loss * noise_watt * required_snr);
    if !required_snr.is_finite() || !radicand.is_normal() {
        return Err(LinkError::Unattainable { required_snr_db });
    }
    Ok(radicand.sqrt().sqrt())
}
