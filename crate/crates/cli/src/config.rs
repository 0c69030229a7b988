//! JSON run configuration.
//!
//! Every key is optional; missing keys take the library defaults and unknown
//! keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thz_core::channel::{AbsorptionTable, Atmosphere};
use thz_core::geometry::{PlacementScenario, Room};
use thz_core::link_budget::{AntennaModel, RadioParams, CIRCULAR_APERTURE};
use thz_core::mobility::{default_profile, MobilityProfile, ServiceType};
use thz_core::simulator::{Objective, SimConfig, UserSpec, WindowPolicy, DEFAULT_DEMAND_BPS, DEFAULT_SEED};
use thz_core::spectrum::WindowParams;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserGroup {
    pub service: ServiceType,
    #[serde(default = "one")]
    pub count: usize,
    /// Replaces the service's default profile.
    #[serde(default)]
    pub profile: Option<MobilityProfile>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    /// Used for both ends of the link.
    pub beamwidth_deg: f64,
    pub aperture_factor: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self {
            tx_power_dbm: 0.0,
            noise_figure_db: 10.0,
            beamwidth_deg: 10.0,
            aperture_factor: CIRCULAR_APERTURE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub bw_lo: f64,
    pub bw_hi: f64,
    pub bw_step: f64,
    pub objective: Objective,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            bw_lo: 1.0,
            bw_hi: 60.0,
            bw_step: 1.0,
            objective: Objective::Coverage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub room: Room,
    pub placement: PlacementScenario,
    pub users: Vec<UserGroup>,
    pub target_rate_gbps: f64,
    pub radio: RadioSection,
    pub atmosphere: Atmosphere,
    pub n_slots: usize,
    pub seed: u64,
    pub window: WindowPolicy,
    pub window_params: WindowParams,
    pub ap_tracking_lag_slots: usize,
    pub sweep: SweepSection,
    /// Per-slot trace CSV written by `simulate`.
    pub trace_path: Option<PathBuf>,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        Self {
            room: Room::default(),
            placement: PlacementScenario::CeilingCenter,
            users: vec![UserGroup {
                service: ServiceType::S3LowMobility,
                count: 10,
                profile: None,
            }],
            target_rate_gbps: DEFAULT_DEMAND_BPS / 1e9,
            radio: RadioSection::default(),
            atmosphere: Atmosphere::default(),
            n_slots: 2000,
            seed: DEFAULT_SEED,
            window: WindowPolicy::AdaptiveLookup,
            window_params: WindowParams::default(),
            ap_tracking_lag_slots: 1,
            sweep: SweepSection::default(),
            trace_path: None,
        }
    }
}

impl RunConfigFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn user_count(&self) -> usize {
        self.users.iter().map(|g| g.count).sum()
    }

    /// `S1`, `S2-fast`, ... or `mixed`.
    pub fn service_label(&self) -> String {
        match self.users.first() {
            Some(first) if self.users.iter().all(|g| g.service == first.service) => first.service.label().to_owned(),
            _ => "mixed".to_owned(),
        }
    }

    pub fn radio_params(&self) -> Result<RadioParams, CliError> {
        let antenna = AntennaModel::new(self.radio.aperture_factor, self.radio.beamwidth_deg)
            .map_err(|e| CliError::Config(format!("radio: {e}")))?;
        let radio = RadioParams {
            tx_power_dbm: self.radio.tx_power_dbm,
            noise_figure_db: self.radio.noise_figure_db,
            temperature_k: self.atmosphere.temperature_k(),
            tx_antenna: antenna,
            rx_antenna: antenna,
        };
        radio.validate().map_err(|e| CliError::Config(format!("radio: {e}")))?;
        Ok(radio)
    }

    pub fn to_sim_config(&self, absorption: Arc<AbsorptionTable>) -> Result<SimConfig, CliError> {
        if self.user_count() == 0 {
            return Err(CliError::Config("config: at least one user is required".into()));
        }
        let users = self
            .users
            .iter()
            .flat_map(|g| {
                let spec = UserSpec {
                    service: g.service,
                    profile: g.profile.unwrap_or_else(|| default_profile(g.service)),
                };
                std::iter::repeat_n(spec, g.count)
            })
            .collect();
        Ok(SimConfig {
            room: self.room,
            placement: self.placement,
            users,
            target_rate_bps: self.target_rate_gbps * 1e9,
            radio: self.radio_params()?,
            atmosphere: self.atmosphere,
            absorption,
            n_slots: self.n_slots,
            master_seed: self.seed,
            window_policy: self.window,
            window_params: self.window_params,
            ap_tracking_lag_slots: self.ap_tracking_lag_slots,
        })
    }
}
