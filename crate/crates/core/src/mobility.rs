//! Six-DoF small-scale user motion.
//!
//! Horizontal motion is a random-waypoint walk whose per-slot step is drawn
//! from `Normal(dxy_mean, dxy_std)` along the heading to the current
//! waypoint; a negative draw steps backwards. Height is the base height plus
//! a bobbing sinusoid of amplitude `dz_mean` and Gaussian jitter `dz_std`.
//! Body rotation is sinusoidal for walking and sedentary users and uniformly
//! random per slot for high-mobility users.
//!
//! Every user owns a ChaCha8 stream seeded from the master seed and the user
//! index, so trajectories are reproducible across platforms and independent
//! of evaluation order.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Room, Vec3};

/// Rotation noise is truncated at this many standard deviations.
pub const NOISE_TRUNCATION_SIGMAS: f64 = 4.0;
/// Pitch amplitude factor on the weaker roll half-cycle while walking.
pub const WALKING_PITCH_MODULATION: f64 = 0.7;

const ROLL_PHASE: f64 = FRAC_PI_2;
const SEDENTARY_PITCH_PHASE: f64 = PI / 3.0;
const MAX_WAYPOINTS_PER_SLOT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ServiceType {
    /// Games and other bursty full-body motion.
    #[serde(rename = "S1")]
    S1HighMobility,
    #[serde(rename = "S2-fast")]
    S2FastWalk,
    #[serde(rename = "S2-slow")]
    S2SlowWalk,
    /// Sitting or standing.
    #[serde(rename = "S3")]
    S3LowMobility,
}

impl ServiceType {
    pub const ALL: [ServiceType; 4] = [
        ServiceType::S1HighMobility,
        ServiceType::S2FastWalk,
        ServiceType::S2SlowWalk,
        ServiceType::S3LowMobility,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::S1HighMobility => "S1",
            Self::S2FastWalk => "S2-fast",
            Self::S2SlowWalk => "S2-slow",
            Self::S3LowMobility => "S3",
        }
    }

    pub fn is_walking(&self) -> bool {
        matches!(self, Self::S2FastWalk | Self::S2SlowWalk)
    }
}

impl std::fmt::Display for ServiceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityProfile {
    /// Horizontal step per slot (m).
    pub dxy_mean: f64,
    pub dxy_std: f64,
    /// Bobbing amplitude (m).
    pub dz_mean: f64,
    /// Vertical jitter (m).
    pub dz_std: f64,
    pub yaw_peak_deg: f64,
    pub pitch_peak_deg: f64,
    pub roll_peak_deg: f64,
    /// Slots per gait cycle. Drives bobbing, and the rotation sinusoids of
    /// every service type except high mobility.
    pub rotation_period_slots: u32,
    pub rotation_noise_std_deg: f64,
    pub base_height_m: f64,
}

impl MobilityProfile {
    /// A profile with no motion at all.
    pub fn stationary(base_height_m: f64) -> Self {
        Self {
            dxy_mean: 0.0,
            dxy_std: 0.0,
            dz_mean: 0.0,
            dz_std: 0.0,
            yaw_peak_deg: 0.0,
            pitch_peak_deg: 0.0,
            roll_peak_deg: 0.0,
            rotation_period_slots: 2,
            rotation_noise_std_deg: 0.0,
            base_height_m,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let non_negative = [
            ("dxy_std", self.dxy_std),
            ("dz_mean", self.dz_mean),
            ("dz_std", self.dz_std),
            ("yaw_peak_deg", self.yaw_peak_deg),
            ("pitch_peak_deg", self.pitch_peak_deg),
            ("roll_peak_deg", self.roll_peak_deg),
            ("rotation_noise_std_deg", self.rotation_noise_std_deg),
            ("base_height_m", self.base_height_m),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !self.dxy_mean.is_finite() {
            return Err("dxy_mean must be finite".into());
        }
        if self.rotation_period_slots < 2 {
            return Err("rotation_period_slots must be >= 2".into());
        }
        Ok(())
    }
}

/// Per-service defaults: per-slot step and bobbing statistics, rotation
/// peaks, and standing (1.5 m) or sitting (1.2 m) height.
pub fn default_profile(service: ServiceType) -> MobilityProfile {
    let base = |dxy: (f64, f64), dz: (f64, f64), peaks: (f64, f64, f64), period, height| MobilityProfile {
        dxy_mean: dxy.0,
        dxy_std: dxy.1,
        dz_mean: dz.0,
        dz_std: dz.1,
        yaw_peak_deg: peaks.0,
        pitch_peak_deg: peaks.1,
        roll_peak_deg: peaks.2,
        rotation_period_slots: period,
        rotation_noise_std_deg: 0.2,
        base_height_m: height,
    };
    match service {
        ServiceType::S1HighMobility => base((1.0, 0.5), (0.5, 0.05), (15.5, 13.8, 15.0), 20, 1.5),
        ServiceType::S2FastWalk => base((0.9, 0.7), (0.094, 0.02), (4.0, 5.0, 5.0), 20, 1.5),
        ServiceType::S2SlowWalk => base((0.3, 0.27), (0.015, 0.003), (3.0, 3.0, 3.0), 40, 1.5),
        ServiceType::S3LowMobility => base((0.0, 0.01), (0.0, 0.001), (5.0, 3.0, 1.0), 60, 1.2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rotation {
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UserState {
    pub position: Vec3,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
    /// Current horizontal target `(x, y)`.
    pub waypoint: (f64, f64),
    pub slot_index: u64,
    /// Signed horizontal path length covered in the last slot (m); negative
    /// when the user stepped away from the waypoint.
    pub last_step_m: f64,
    /// Per-user offset into the gait cycle, so users are not in lockstep.
    pub gait_offset_slots: u32,
}

impl UserState {
    pub fn rotation(&self) -> Rotation {
        Rotation {
            yaw_deg: self.yaw_deg,
            pitch_deg: self.pitch_deg,
            roll_deg: self.roll_deg,
        }
    }

    /// Slot counter shifted by the user's gait offset.
    pub fn gait_slot(&self) -> u64 {
        self.slot_index + u64::from(self.gait_offset_slots)
    }
}

/// Phase (radians) of gait slot `slot` within a cycle of `period` slots.
pub fn gait_phase(slot: u64, period: u32) -> f64 {
    TAU * (slot % u64::from(period)) as f64 / f64::from(period)
}

/// Independent random stream for user `user_index`.
pub fn user_rng(master_seed: u64, user_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed.wrapping_add(user_index))
}

fn normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + std * z
}

fn truncated_noise<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    std * z.clamp(-NOISE_TRUNCATION_SIGMAS, NOISE_TRUNCATION_SIGMAS)
}

fn uniform_symmetric<R: Rng + ?Sized>(rng: &mut R, peak: f64) -> f64 {
    if peak == 0.0 {
        // keep the stream aligned with the non-degenerate case
        let _: f64 = rng.random();
        return 0.0;
    }
    rng.random_range(-peak..=peak)
}

fn random_waypoint<R: Rng + ?Sized>(rng: &mut R, room: &Room) -> (f64, f64) {
    (rng.random::<f64>() * room.width_m, rng.random::<f64>() * room.depth_m)
}

/// Initial state: uniform floor position at base height, first waypoint
/// drawn, random gait offset, rotation of slot 0.
pub fn spawn_user<R: Rng + ?Sized>(service: ServiceType, profile: &MobilityProfile, room: &Room, rng: &mut R) -> UserState {
    let (x, y) = random_waypoint(rng, room);
    let waypoint = random_waypoint(rng, room);
    let gait_offset_slots = rng.random_range(0..profile.rotation_period_slots);
    let mut state = UserState {
        position: room.clamp(Vec3::new(x, y, profile.base_height_m)),
        waypoint,
        gait_offset_slots,
        ..UserState::default()
    };
    let r = rotation_at(state.gait_slot(), profile, service, rng);
    state.yaw_deg = r.yaw_deg;
    state.pitch_deg = r.pitch_deg;
    state.roll_deg = r.roll_deg;
    state
}

/// Moves the user for the slot following `state.slot_index`.
///
/// Horizontal: one signed step toward the waypoint, carrying any remainder
/// past reached waypoints onto freshly drawn ones. Vertical: bobbing plus
/// jitter around the base height. The slot index is left unchanged.
pub fn advance_position<R: Rng + ?Sized>(state: &UserState, profile: &MobilityProfile, room: &Room, rng: &mut R) -> UserState {
    let step = normal(rng, profile.dxy_mean, profile.dxy_std);
    let start = (state.position.x, state.position.y);
    let mut pos = start;
    let mut waypoint = state.waypoint;
    let mut travelled = 0.0;

    if step >= 0.0 {
        let mut remaining = step;
        for _ in 0..MAX_WAYPOINTS_PER_SLOT {
            let (dx, dy) = (waypoint.0 - pos.0, waypoint.1 - pos.1);
            let dist = dx.hypot(dy);
            if dist <= remaining {
                pos = waypoint;
                remaining -= dist;
                travelled += dist;
                waypoint = random_waypoint(rng, room);
                if remaining <= 0.0 {
                    break;
                }
            } else {
                pos = (pos.0 + dx / dist * remaining, pos.1 + dy / dist * remaining);
                travelled += remaining;
                break;
            }
        }
    } else {
        let (mut dx, mut dy) = (waypoint.0 - pos.0, waypoint.1 - pos.1);
        if dx == 0.0 && dy == 0.0 {
            waypoint = random_waypoint(rng, room);
            (dx, dy) = (waypoint.0 - pos.0, waypoint.1 - pos.1);
        }
        let dist = dx.hypot(dy);
        if dist > 0.0 {
            let back = Vec3::new(pos.0 + dx / dist * step, pos.1 + dy / dist * step, 0.0);
            let clamped = room.clamp(back);
            pos = (clamped.x, clamped.y);
            travelled = -(pos.0 - start.0).hypot(pos.1 - start.1);
        }
    }

    let next_gait_slot = state.gait_slot() + 1;
    let bob = profile.dz_mean * gait_phase(next_gait_slot, profile.rotation_period_slots).sin();
    let z = profile.base_height_m + bob + normal(rng, 0.0, profile.dz_std);

    UserState {
        position: room.clamp(Vec3::new(pos.0, pos.1, z)),
        waypoint,
        last_step_m: travelled,
        ..*state
    }
}

/// Body rotation at gait slot `slot`.
///
/// Walking and sedentary users follow sinusoids of the profile period with
/// truncated Gaussian noise; while walking, pitch runs at twice the stride
/// rate and is damped on alternate roll half-cycles. High-mobility users
/// draw each angle uniformly within its peak.
pub fn rotation_at<R: Rng + ?Sized>(slot: u64, profile: &MobilityProfile, service: ServiceType, rng: &mut R) -> Rotation {
    if service == ServiceType::S1HighMobility {
        return Rotation {
            yaw_deg: uniform_symmetric(rng, profile.yaw_peak_deg),
            pitch_deg: uniform_symmetric(rng, profile.pitch_peak_deg),
            roll_deg: uniform_symmetric(rng, profile.roll_peak_deg),
        };
    };
    let theta = gait_phase(slot, profile.rotation_period_slots);
    let roll_wave = (theta + ROLL_PHASE).sin();
    let pitch_wave = if service.is_walking() {
        let modulation = if roll_wave >= 0.0 { 1.0 } else { WALKING_PITCH_MODULATION };
        modulation * (2.0 * theta).sin()
    } else {
        (theta + SEDENTARY_PITCH_PHASE).sin()
    };
    let sigma = profile.rotation_noise_std_deg;
    Rotation {
        yaw_deg: profile.yaw_peak_deg * theta.sin() + truncated_noise(rng, sigma),
        pitch_deg: profile.pitch_peak_deg * pitch_wave + truncated_noise(rng, sigma),
        roll_deg: profile.roll_peak_deg * roll_wave + truncated_noise(rng, sigma),
    }
}

/// One slot of motion: position, then rotation, then the slot counter.
pub fn advance_user<R: Rng + ?Sized>(
    state: &UserState,
    profile: &MobilityProfile,
    service: ServiceType,
    room: &Room,
    rng: &mut R,
) -> UserState {
    let mut next = advance_position(state, profile, room, rng);
    next.slot_index += 1;
    let r = rotation_at(next.gait_slot(), profile, service, rng);
    next.yaw_deg = r.yaw_deg;
    next.pitch_deg = r.pitch_deg;
    next.roll_deg = r.roll_deg;
    next
}

/// States of every user for slots `0..=n_slots`; slot 0 is the spawn state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectories {
    per_user: Vec<Vec<UserState>>,
}

impl Trajectories {
    pub fn n_users(&self) -> usize {
        self.per_user.len()
    }

    /// Number of advanced slots (excluding the spawn state).
    pub fn n_slots(&self) -> usize {
        self.per_user.first().map_or(0, |t| t.len() - 1)
    }

    pub fn state(&self, user: usize, slot: usize) -> &UserState {
        &self.per_user[user][slot]
    }

    pub fn user(&self, user: usize) -> &[UserState] {
        &self.per_user[user]
    }

    /// `slot,user,x,y,z,yaw,pitch,roll` for every advanced slot.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "slot,user,x,y,z,yaw,pitch,roll")?;
        for slot in 1..=self.n_slots() {
            for (u, t) in self.per_user.iter().enumerate() {
                let s = &t[slot];
                writeln!(
                    out,
                    "{slot},{u},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
                    s.position.x, s.position.y, s.position.z, s.yaw_deg, s.pitch_deg, s.roll_deg
                )?;
            }
        }
        Ok(())
    }
}

/// Spawns and advances every user for `n_slots` slots.
pub fn generate_trajectories(
    users: &[(ServiceType, MobilityProfile)],
    room: &Room,
    n_slots: usize,
    master_seed: u64,
) -> Trajectories {
    let per_user = users
        .par_iter()
        .enumerate()
        .map(|(index, (service, profile))| {
            let mut rng = user_rng(master_seed, index as u64);
            let mut states = Vec::with_capacity(n_slots + 1);
            states.push(spawn_user(*service, profile, room, &mut rng));
            for _ in 0..n_slots {
                let next = advance_user(states.last().expect("spawned"), profile, *service, room, &mut rng);
                states.push(next);
            }
            states
        })
        .collect();
    Trajectories { per_user }
}
