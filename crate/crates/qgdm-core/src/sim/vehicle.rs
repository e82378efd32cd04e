//! Vehicle state: a point-kinematic body with an oriented rectangular
//! footprint, owned by a path in the scenario geometry.

use serde::Serialize;

use super::geometry::Geometry;
use super::path::{Pose, Vec2};
use super::{VEHICLE_LENGTH, VEHICLE_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VehicleId(pub u32);

/// Who sets this vehicle's commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Controller {
    /// The ego: commands come from the decision policy.
    EgoPolicy,
    /// Background traffic: IDM longitudinal, MOBIL lateral.
    IdmMobil,
    /// Interacting vehicle drawing uniformly from its action set each
    /// decision period.
    RandomIv,
}

/// An in-progress lateral transition toward the centerline of the current
/// path. The vehicle's `path` is already the target; `from_path` remembers
/// where it came from for dual-lane leader checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneChange {
    pub from_path: usize,
    /// Lateral offset at the start of the maneuver (signed, left-positive
    /// relative to the target path).
    pub lateral_start: f64,
    pub elapsed: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: VehicleId,
    pub controller: Controller,
    /// Index into the geometry's path table.
    pub path: usize,
    /// Arc length along `path`, m.
    pub s: f64,
    /// Lateral offset from the path centerline (left-positive), m. Nonzero
    /// only during lane changes.
    pub lateral: f64,
    /// Speed along the path, m/s (never negative).
    pub speed: f64,
    /// Longitudinal acceleration currently in effect, m/s^2.
    pub accel: f64,
    /// Desired speed for IDM and for efficiency scoring, m/s.
    pub v_desired: f64,
    pub lane_change: Option<LaneChange>,
    /// Total distance traveled, m (monotone).
    pub odometer: f64,
    /// Crashed vehicles stop and become inert obstacles.
    pub crashed: bool,
    /// Vehicles that left the road are excluded from queries and collision.
    pub departed: bool,
}

impl Vehicle {
    pub fn new(id: VehicleId, controller: Controller, path: usize, s: f64, speed: f64) -> Self {
        Self {
            id,
            controller,
            path,
            s,
            lateral: 0.0,
            speed,
            accel: 0.0,
            v_desired: 0.0,
            lane_change: None,
            odometer: 0.0,
            crashed: false,
            departed: false,
        }
    }

    pub fn half_length(&self) -> f64 {
        VEHICLE_LENGTH / 2.0
    }

    pub fn pose(&self, geometry: &Geometry) -> Pose {
        geometry.paths[self.path].pose_with_offset(self.s, self.lateral)
    }

    /// Footprint corners in world coordinates (counterclockwise).
    pub fn corners(&self, geometry: &Geometry) -> [Vec2; 4] {
        corners_at(self.pose(geometry))
    }

    pub fn is_active(&self) -> bool {
        !self.departed
    }
}

/// Corners of the standard footprint at an arbitrary pose.
pub fn corners_at(pose: Pose) -> [Vec2; 4] {
    let forward = Vec2::unit(pose.heading);
    let left = forward.perp();
    let hl = VEHICLE_LENGTH / 2.0;
    let hw = VEHICLE_WIDTH / 2.0;
    let c = pose.pos;
    [
        c + forward * hl + left * hw,
        c + forward * -hl + left * hw,
        c + forward * -hl + left * -hw,
        c + forward * hl + left * -hw,
    ]
}
