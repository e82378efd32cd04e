//! Purpose-built kinematic traffic simulator: lane/ring geometry, point-mass
//! vehicles, IDM/MOBIL background traffic, random interacting vehicles,
//! collision and stuck detection, and the episode loop with per-episode
//! metrics.
//!
//! The simulator is deliberately small: no perception, no vehicle dynamics
//! beyond clamped point kinematics along paths, no pedestrians. Vehicles are
//! oriented 5 m x 2 m rectangles; everything runs at a fixed physics
//! timestep with decisions at a slower fixed period.

mod episode;
mod geometry;
mod idm;
mod metrics;
mod mobil;
mod path;
pub mod rng;
mod scenario;
mod vehicle;
mod world;

pub use episode::{
    apply_player_action, run_episode, run_from_world, DecisionPolicy, EgoSnapshot,
    EpisodeOptions, PolicyDecision, TraceRecord,
};
pub use geometry::{highway_neighbors, Geometry, GeometryKind};
pub use idm::{idm_accel, IdmParams};
pub use metrics::{compute_metrics, AggregateMetrics, EpisodeResult, EpisodeStats};
pub use mobil::{mobil_decide, MobilAssessment, MobilParams};
pub use path::{Path, Pose, Segment, Vec2};
pub use scenario::{
    ego_action_set, init_scenario, iv_action_set, player_setup, random_iv_action, safe_action,
    PlayerSetup, ScenarioKind, ScenarioSpec,
};
pub use vehicle::{corners_at, Controller, LaneChange, Vehicle, VehicleId};
pub use world::{
    detect_collision, detect_collisions, rect_separation, rects_collide, Leader, WorldState,
};

use serde::{Deserialize, Serialize};

/// Physics timestep (seconds).
pub const DT: f64 = 0.1;

/// Seconds between ego decisions (and random-IV action redraws).
pub const DECISION_PERIOD: f64 = 1.0;

/// Vehicle footprint, meters.
pub const VEHICLE_LENGTH: f64 = 5.0;
pub const VEHICLE_WIDTH: f64 = 2.0;

/// Rectangles closer than this on every separating axis count as touching,
/// and touching counts as a collision.
pub const CONTACT_TOL: f64 = 1e-6;

/// Center-to-center distance beyond which a vehicle pair is skipped by the
/// narrow-phase collision test.
pub const BROAD_PHASE_RADIUS: f64 = 20.0;

/// Headway distances are capped at this sensor range (meters).
pub const SENSOR_RANGE: f64 = 100.0;

/// An ego advancing less than [`STUCK_PROGRESS`] meters over this many
/// seconds is declared stuck.
pub const STUCK_WINDOW: f64 = 30.0;
pub const STUCK_PROGRESS: f64 = 1.0;

/// Discrete maneuvers available to game players. Which subset a player may
/// use is a per-scenario fact (see [`player_setup`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Accelerate,
    Decelerate,
    Idle,
    Merge,
    ChangeLaneLeft,
    ChangeLaneRight,
}

impl Action {
    pub fn label(self) -> &'static str {
        match self {
            Action::Accelerate => "Accelerate",
            Action::Decelerate => "Decelerate",
            Action::Idle => "Idle",
            Action::Merge => "Merge",
            Action::ChangeLaneLeft => "ChangeLaneLeft",
            Action::ChangeLaneRight => "ChangeLaneRight",
        }
    }

    /// Whether this maneuver starts a lateral transition (as opposed to a
    /// pure longitudinal command).
    pub fn is_lateral(self) -> bool {
        matches!(self, Action::Merge | Action::ChangeLaneLeft | Action::ChangeLaneRight)
    }
}

/// Longitudinal magnitudes behind the discrete actions, and the fixed
/// lateral transition time. The values are conventions, not physics, so
/// they live in config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionMagnitudes {
    /// Acceleration for `Accelerate`, m/s^2.
    pub accelerate: f64,
    /// Acceleration for `Decelerate`, m/s^2 (negative).
    pub decelerate: f64,
    /// Duration of a lane change / merge lateral transition, seconds.
    pub lane_change_duration: f64,
}

impl Default for ActionMagnitudes {
    fn default() -> Self {
        Self { accelerate: 2.0, decelerate: -3.0, lane_change_duration: 2.0 }
    }
}

impl ActionMagnitudes {
    /// Longitudinal acceleration a held action commands; lateral maneuvers
    /// hold speed (the highway ego is the exception — its longitudinal
    /// control is delegated to IDM by the world).
    pub fn accel_of(&self, action: Action) -> f64 {
        match action {
            Action::Accelerate => self.accelerate,
            Action::Decelerate => self.decelerate,
            Action::Idle | Action::Merge | Action::ChangeLaneLeft | Action::ChangeLaneRight => 0.0,
        }
    }
}

/// How an episode ended. Exactly one outcome per episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Collision,
    Stuck,
    Timeout,
}

/// Simulator errors. Placement failures carry the episode so a failing seed
/// can be reproduced directly.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("could not place vehicles without overlap (episode {episode}, {attempts} attempts)")]
    PlacementFailed { episode: u64, attempts: u32 },
    #[error("invalid scenario spec: {0}")]
    InvalidSpec(String),
}
