//! Scene scoring: turn the current traffic scene into a normal-form game.
//!
//! Every joint action profile is rolled out over a short constant-action
//! horizon on a cloned world. Each player's predicted trajectory is reduced
//! to a handful of metrics (worst time-to-collision, predicted overlap,
//! acceleration effort, speed, progress) and blended into a single payoff in
//! `[0, 1]` weighing safety, comfort, and efficiency. The game is rebuilt
//! from scratch at every decision step, so the payoffs always reflect the
//! live scene.

use serde::{Deserialize, Serialize};

use crate::game::NormalFormGame;
use crate::sim::{
    corners_at, rects_collide, Action, ActionMagnitudes, Controller, Pose, Vec2, VehicleId,
    WorldState, DT, SimError, VEHICLE_LENGTH, VEHICLE_WIDTH,
};

/// Sampling resolution of the frozen-kinematics time-to-collision scan, s.
/// Fine enough that a crossing vehicle cannot pass clean through another
/// between samples at the speeds these layouts produce (1.5 m of relative
/// travel per sample at 12 m/s, against a 2 m minimum body width).
const TTC_SCAN_DT: f64 = 0.125;

/// Scoring weights plus the rollout parameters they are calibrated against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayoffWeights {
    pub w_safety: f64,
    pub w_comfort: f64,
    pub w_efficiency: f64,
    /// Rollout horizon, s.
    pub horizon: f64,
    /// Time-to-collision at or above this saturates the safety term, s.
    pub ttc_floor: f64,
    /// Acceleration magnitude that zeroes the comfort term, m/s^2.
    pub accel_comfort_limit: f64,
}

impl Default for PayoffWeights {
    fn default() -> Self {
        Self {
            w_safety: 0.5,
            w_comfort: 0.2,
            w_efficiency: 0.3,
            horizon: 2.0,
            ttc_floor: 4.0,
            accel_comfort_limit: 3.0,
        }
    }
}

impl PayoffWeights {
    pub fn validate(&self) -> Result<(), SimError> {
        let ws = [self.w_safety, self.w_comfort, self.w_efficiency];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(SimError::InvalidSpec(format!("negative payoff weight in {ws:?}")));
        }
        let total: f64 = ws.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidSpec(format!(
                "payoff weights sum to {total}, expected 1"
            )));
        }
        for (name, v) in [
            ("horizon", self.horizon),
            ("ttc_floor", self.ttc_floor),
            ("accel_comfort_limit", self.accel_comfort_limit),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A frozen snapshot of the world plus the ordered players whose joint
/// actions are being evaluated. Capturing clones the world, so scoring never
/// disturbs the live simulation.
#[derive(Debug, Clone)]
pub struct Scene {
    world: WorldState,
    players: Vec<VehicleId>,
    timestamp: f64,
}

impl Scene {
    /// # Panics
    /// If a player id is not present in the world (player lists come from
    /// the scenario's player setup, which only names live vehicles).
    pub fn capture(world: &WorldState, players: &[VehicleId]) -> Self {
        for &p in players {
            let v = world.vehicle(p);
            debug_assert!(v.speed >= 0.0);
        }
        Self { world: world.clone(), players: players.to_vec(), timestamp: world.time }
    }

    pub fn players(&self) -> &[VehicleId] {
        &self.players
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    /// Decision timestamp the scene was captured at, s.
    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }
}

/// Per-player summary of one profile rollout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutMetrics {
    /// Smallest frozen-kinematics time-to-collision seen at any rollout
    /// step, s; infinite when no collision course was ever detected within
    /// the scan window.
    pub min_ttc: f64,
    /// The rollout predicted actual body overlap for this player.
    pub overlap: bool,
    /// Mean |longitudinal acceleration| over the horizon, m/s^2.
    pub mean_abs_accel: f64,
    /// Mean speed over the horizon, m/s.
    pub mean_speed: f64,
    /// Distance traveled over the horizon, m.
    pub progress: f64,
    /// The player's desired speed (efficiency reference), m/s.
    pub v_desired: f64,
}

/// Outcome of rolling out one joint action profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Indexed like the scene's player list.
    pub per_player: Vec<RolloutMetrics>,
    /// Horizon the metrics were collected over, s.
    pub horizon: f64,
}

/// Roll out one joint action profile from the scene under constant actions.
///
/// Each player's commanded action replaces its live controller for the
/// horizon (a held acceleration, or a lateral transition with longitudinal
/// hold), with one exception: the ego on a highway layout keeps its
/// lane-keeping cruise law, because its discrete actions there are lane
/// commands, not accelerations. Non-player vehicles follow their current
/// controller with lane-change reconsideration frozen.
///
/// # Panics
/// If the profile length does not match the scene's player count, or an
/// action is invalid for the scene's layout (lateral command with no target
/// lane).
pub fn rollout_profile(
    scene: &Scene,
    profile: &[Action],
    weights: &PayoffWeights,
    magnitudes: &ActionMagnitudes,
) -> Trajectory {
    assert_eq!(profile.len(), scene.players.len(), "one action per player");
    let mut world = scene.world.clone();
    for (&player, &action) in scene.players.iter().zip(profile) {
        if player != world.ego {
            // The hypothesized action must stick for the whole horizon even
            // for vehicles that live under an adaptive cruise controller.
            world.vehicle_mut(player).controller = Controller::RandomIv;
        }
        crate::sim::apply_player_action(&mut world, player, action, magnitudes);
    }

    let substeps = (weights.horizon / DT).round().max(1.0) as usize;
    let n = scene.players.len();
    let odometer_start: Vec<f64> =
        scene.players.iter().map(|&p| world.vehicle(p).odometer).collect();
    let mut speed_sum = vec![0.0; n];
    let mut accel_sum = vec![0.0; n];
    let mut min_ttc = vec![f64::INFINITY; n];
    let mut overlap = vec![false; n];

    for _ in 0..substeps {
        world.step(DT);
        for (i, &p) in scene.players.iter().enumerate() {
            let v = world.vehicle(p);
            speed_sum[i] += v.speed;
            accel_sum[i] += v.accel.abs();
            if !overlap[i] {
                overlap[i] = overlaps_any(&world, p);
            }
            min_ttc[i] = min_ttc[i].min(scan_ttc(&world, p, weights.ttc_floor));
        }
    }

    let per_player = (0..n)
        .map(|i| {
            let v = world.vehicle(scene.players[i]);
            RolloutMetrics {
                min_ttc: min_ttc[i],
                overlap: overlap[i],
                mean_abs_accel: accel_sum[i] / substeps as f64,
                mean_speed: speed_sum[i] / substeps as f64,
                progress: v.odometer - odometer_start[i],
                v_desired: v.v_desired,
            }
        })
        .collect();
    Trajectory { per_player, horizon: weights.horizon }
}

/// Whether the vehicle's body currently overlaps any other active vehicle.
fn overlaps_any(world: &WorldState, id: VehicleId) -> bool {
    let me = world.vehicle(id);
    if !me.is_active() {
        return false;
    }
    let mine = me.corners(&world.geometry);
    let my_pos = me.pose(&world.geometry).pos;
    world.vehicles.iter().any(|other| {
        other.id != id
            && other.is_active()
            && other.pose(&world.geometry).pos.dist(my_pos) <= VEHICLE_LENGTH + VEHICLE_WIDTH
            && rects_collide(&mine, &other.corners(&world.geometry))
    })
}

/// Frozen-kinematics time-to-collision: every vehicle keeps its current
/// world-frame velocity and heading, and the first sampled instant at which
/// the player's body meets another is returned. Infinite when nothing meets
/// within the scan window.
fn scan_ttc(world: &WorldState, id: VehicleId, scan: f64) -> f64 {
    let me = world.vehicle(id);
    if !me.is_active() {
        return f64::INFINITY;
    }
    let my_pose = me.pose(&world.geometry);
    let my_vel = Vec2::unit(my_pose.heading) * me.speed;
    // Two circumscribed circles: beyond this the bodies cannot touch.
    let reach_radius = f64::hypot(VEHICLE_LENGTH, VEHICLE_WIDTH);
    let samples = (scan / TTC_SCAN_DT).ceil() as usize;
    let mut best = f64::INFINITY;
    for other in &world.vehicles {
        if other.id == id || !other.is_active() {
            continue;
        }
        let o_pose = other.pose(&world.geometry);
        let o_vel = Vec2::unit(o_pose.heading) * other.speed;
        let closing = (o_vel - my_vel).norm();
        if my_pose.pos.dist(o_pose.pos) > closing * scan + reach_radius {
            continue;
        }
        for k in 0..=samples {
            let t = k as f64 * TTC_SCAN_DT;
            if t >= best {
                break;
            }
            let a = corners_at(Pose { pos: my_pose.pos + my_vel * t, heading: my_pose.heading });
            let b = corners_at(Pose { pos: o_pose.pos + o_vel * t, heading: o_pose.heading });
            if rects_collide(&a, &b) {
                best = t;
                break;
            }
        }
    }
    best
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Blend one player's rollout metrics into a payoff in `[0, 1]`.
///
/// `v = w_safety*S + w_comfort*C + w_efficiency*E` where `S` is the scaled
/// worst time-to-collision (zero outright if the rollout predicted overlap),
/// `C` falls linearly with acceleration effort, and `E` blends speed kept
/// against desired speed with distance made good over the horizon.
pub fn score_profile(trajectory: &Trajectory, player: usize, weights: &PayoffWeights) -> f64 {
    let m = &trajectory.per_player[player];
    let safety =
        if m.overlap { 0.0 } else { clamp01(m.min_ttc / weights.ttc_floor) };
    let comfort = 1.0 - clamp01(m.mean_abs_accel / weights.accel_comfort_limit);
    let v_des = m.v_desired.max(1e-9);
    let efficiency = 0.5 * clamp01(m.mean_speed / v_des)
        + 0.5 * clamp01(m.progress / (v_des * trajectory.horizon));
    clamp01(
        weights.w_safety * safety
            + weights.w_comfort * comfort
            + weights.w_efficiency * efficiency,
    )
}

/// Build the normal-form game for the scene: one rollout per joint action
/// profile, one payoff entry per player per profile.
///
/// # Panics
/// If the action-set count does not match the scene's player count, or the
/// resulting shape is outside the supported 2-3 players x 2-3 actions.
pub fn build_game(
    scene: &Scene,
    action_sets: &[Vec<Action>],
    weights: &PayoffWeights,
    magnitudes: &ActionMagnitudes,
) -> NormalFormGame {
    assert_eq!(action_sets.len(), scene.players.len(), "one action set per player");
    let n = scene.players.len();
    let counts: Vec<usize> = action_sets.iter().map(Vec::len).collect();
    let n_profiles: usize = counts.iter().product();
    let labels: Vec<Vec<&'static str>> =
        action_sets.iter().map(|set| set.iter().map(|a| a.label()).collect()).collect();

    let mut utilities = vec![vec![0.0; n_profiles]; n];
    let mut profile = vec![Action::Idle; n];
    for flat in 0..n_profiles {
        let mut rem = flat;
        for p in (0..n).rev() {
            profile[p] = action_sets[p][rem % counts[p]];
            rem /= counts[p];
        }
        let trajectory = rollout_profile(scene, &profile, weights, magnitudes);
        for (p, u) in utilities.iter_mut().enumerate() {
            u[flat] = score_profile(&trajectory, p, weights);
        }
    }
    NormalFormGame::new(labels, utilities).expect("scores are clamped into [0, 1]")
}
