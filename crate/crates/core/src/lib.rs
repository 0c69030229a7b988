//! Indoor terahertz link simulation.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: spreading and water-vapour absorption loss over gridded
//!   absorption data.
//! - [`link_budget`]: beamwidth-dependent antenna gain, thermal noise, Shannon
//!   capacity and its closed-form inversion to a minimum beamwidth.
//! - [`spectrum`]: rate spectra, frequency-window detection and
//!   distance-indexed window lookup tables.
//! - [`mobility`]: six-DoF small-scale user motion for the service types.
//! - [`geometry`]: room, access-point placement and beam misalignment.
//! - [`simulator`]: the slotted multi-user engine and beamwidth sweeps.

pub mod channel;
pub mod geometry;
pub mod link_budget;
pub mod mobility;
pub mod simulator;
pub mod spectrum;

pub use channel::{AbsorptionTable, Atmosphere, ChannelError};
pub use geometry::{PlacementScenario, Room, Vec3};
pub use link_budget::{AntennaModel, LinkDemand, LinkError, RadioParams};
pub use mobility::{MobilityProfile, ServiceType, UserState};
pub use simulator::{Objective, SimConfig, SimError, SimOutcome, Simulation, SweepResult, UserSpec, WindowPolicy};
pub use spectrum::{FrequencyBand, FrequencyWindow, WindowLookupTable, WindowParams};
