//! Room, access-point placement and two-sided beam misalignment.
//!
//! World axes: `x` across the room width, `y` along its depth, `z` up. Body
//! rotations are intrinsic yaw (about `z`), then pitch (about the yawed `y`),
//! then roll (about the twice-rotated `x`), applied to the device's nominal
//! AP-pointing boresight.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobility::UserState;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid room: {0}")]
    InvalidRoom(String),
    #[error("position ({0}, {1}, {2}) lies outside the room")]
    OutsideRoom(f64, f64, f64),
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Rodrigues rotation of `self` about unit `axis` by `angle_rad`.
    pub fn rotated_about(self, axis: Self, angle_rad: f64) -> Self {
        let (s, c) = angle_rad.sin_cos();
        self * c + axis.cross(self) * s + axis * (axis.dot(self) * (1.0 - c))
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Axis-aligned room with a corner at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Room {
    pub width_m: f64,
    pub depth_m: f64,
    pub height_m: f64,
}

impl Room {
    pub fn new(width_m: f64, depth_m: f64, height_m: f64) -> Result<Self, GeometryError> {
        let room = Self {
            width_m,
            depth_m,
            height_m,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if [self.width_m, self.depth_m, self.height_m]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(GeometryError::InvalidRoom(format!(
                "dimensions must be positive, got {} x {} x {}",
                self.width_m, self.depth_m, self.height_m
            )))
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0.0..=self.width_m).contains(&p.x)
            && (0.0..=self.depth_m).contains(&p.y)
            && (0.0..=self.height_m).contains(&p.z)
    }

    pub fn clamp(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(0.0, self.width_m),
            p.y.clamp(0.0, self.depth_m),
            p.z.clamp(0.0, self.height_m),
        )
    }

    pub fn diagonal_m(&self) -> f64 {
        Vec3::new(self.width_m, self.depth_m, self.height_m).norm()
    }
}

impl Default for Room {
    /// 10 m x 10 m x 3 m.
    fn default() -> Self {
        Self {
            width_m: 10.0,
            depth_m: 10.0,
            height_m: 3.0,
        }
    }
}

/// Height of the table carrying the AP in [`PlacementScenario::TableCenter`].
pub const TABLE_HEIGHT_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlacementScenario {
    /// Middle of the ceiling.
    #[serde(rename = "A")]
    CeilingCenter,
    /// Middle of the `y = 0` wall at half height.
    #[serde(rename = "B")]
    WallCenter,
    /// Middle of the room on a 1 m table.
    #[serde(rename = "C")]
    TableCenter,
    #[serde(rename = "custom")]
    Custom(Vec3),
}

impl PlacementScenario {
    pub fn label(&self) -> &'static str {
        match self {
            Self::CeilingCenter => "A",
            Self::WallCenter => "B",
            Self::TableCenter => "C",
            Self::Custom(_) => "custom",
        }
    }
}

pub fn ap_position(scenario: PlacementScenario, room: &Room) -> Result<Vec3, GeometryError> {
    room.validate()?;
    let (w, d, h) = (room.width_m, room.depth_m, room.height_m);
    let p = match scenario {
        PlacementScenario::CeilingCenter => Vec3::new(w / 2.0, d / 2.0, h),
        PlacementScenario::WallCenter => Vec3::new(w / 2.0, 0.0, h / 2.0),
        PlacementScenario::TableCenter => Vec3::new(w / 2.0, d / 2.0, TABLE_HEIGHT_M.min(h)),
        PlacementScenario::Custom(p) => p,
    };
    if room.contains(p) {
        Ok(p)
    } else {
        Err(GeometryError::OutsideRoom(p.x, p.y, p.z))
    }
}

/// Euclidean AP-to-user distance (m).
pub fn los_distance(ap: Vec3, user: &UserState) -> f64 {
    (user.position - ap).norm()
}

/// Angle between two vectors in degrees, accurate near 0 and 180.
pub fn angle_between_deg(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// Applies intrinsic yaw, pitch, roll (degrees) to `v`.
pub fn rotate_body(v: Vec3, yaw_deg: f64, pitch_deg: f64, roll_deg: f64) -> Vec3 {
    let (mut ex, mut ey, mut ez) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0));
    let yaw = yaw_deg.to_radians();
    ex = ex.rotated_about(ez, yaw);
    ey = ey.rotated_about(ez, yaw);
    let pitch = pitch_deg.to_radians();
    ex = ex.rotated_about(ey, pitch);
    ez = ez.rotated_about(ey, pitch);
    let roll = roll_deg.to_radians();
    ey = ey.rotated_about(ex, roll);
    ez = ez.rotated_about(ex, roll);
    // v expressed in the body frame, mapped back to world coordinates
    ex * v.x + ey * v.y + ez * v.z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Misalignment {
    /// Angle between the AP boresight and the AP-to-user direction.
    pub ap_side_deg: f64,
    /// Angle between the rotated device boresight and the user-to-AP direction.
    pub ue_side_deg: f64,
}

pub fn misalignment_angles(ap: Vec3, user: &UserState, ap_boresight: Vec3) -> Result<Misalignment, GeometryError> {
    let to_user = user.position - ap;
    if to_user.normalized().is_none() {
        return Err(GeometryError::Degenerate("AP and user coincide"));
    }
    if ap_boresight.normalized().is_none() {
        return Err(GeometryError::Degenerate("zero-length AP boresight"));
    }
    let to_ap = to_user * -1.0;
    let device = rotate_body(to_ap, user.yaw_deg, user.pitch_deg, user.roll_deg);
    Ok(Misalignment {
        ap_side_deg: angle_between_deg(ap_boresight, to_user),
        ue_side_deg: angle_between_deg(device, to_ap),
    })
}
