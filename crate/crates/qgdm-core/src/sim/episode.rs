//! The episode loop: decisions at the slow period, physics at the fast
//! timestep, outcome detection, and trace/statistics collection.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::geometry::{GeometryKind, HIGHWAY_LANES};
use super::idm::IdmParams;
use super::metrics::{EpisodeResult, EpisodeStats};
use super::mobil::MobilParams;
use super::rng::{substream, PURPOSE_ACTIONS};
use super::scenario::{
    init_scenario, iv_action_set, player_setup, random_iv_action, PlayerSetup, ScenarioSpec,
};
use super::vehicle::VehicleId;
use super::world::{detect_collisions, WorldState};
use super::{
    Action, ActionMagnitudes, Outcome, SimError, DECISION_PERIOD, DT, SENSOR_RANGE,
    STUCK_PROGRESS, STUCK_WINDOW,
};

/// A decision maker for the ego vehicle. Implementations must be pure
/// given the world (no interior mutability that affects the result), so
/// episodes stay reproducible and parallelizable.
pub trait DecisionPolicy: Sync {
    fn decide(&self, world: &WorldState, setup: &PlayerSetup) -> PolicyDecision;
}

/// The outcome of one decision round.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDecision {
    pub action: Action,
    /// Per-player payoff tables (player-major, profile-indexed), when a
    /// game was built this round. Recorded into traces.
    pub payoffs: Option<Vec<Vec<f64>>>,
    /// Joint action-profile distribution consulted in the final step, when
    /// the pipeline got that far.
    pub distribution: Option<Vec<f64>>,
}

impl PolicyDecision {
    pub fn plain(action: Action) -> Self {
        Self { action, payoffs: None, distribution: None }
    }
}

/// Runtime knobs for one batch of episodes.
#[derive(Debug, Clone)]
pub struct EpisodeOptions {
    /// Record one [`TraceRecord`] per ego decision.
    pub trace: bool,
    /// Measure wall-clock decision latency. Timing reads the host clock,
    /// so switch this off when comparing traces bit-for-bit.
    pub record_latency: bool,
    pub magnitudes: ActionMagnitudes,
    pub idm: IdmParams,
    pub mobil: MobilParams,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        Self {
            trace: false,
            record_latency: true,
            magnitudes: ActionMagnitudes::default(),
            idm: IdmParams::default(),
            mobil: MobilParams::default(),
        }
    }
}

/// Ego state at the moment of a decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EgoSnapshot {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub accel: f64,
    pub path: usize,
    pub s: f64,
}

/// One line of an exported episode trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    /// Simulated decision time, s.
    pub t: f64,
    pub action: &'static str,
    pub payoffs: Option<Vec<Vec<f64>>>,
    pub distribution: Option<Vec<f64>>,
    pub ego: EgoSnapshot,
}

/// Apply a player's chosen action to the world: longitudinal actions set
/// the held acceleration; lateral actions start the fixed-duration
/// transition (holding speed — except the highway ego, whose longitudinal
/// control stays with IDM inside the world).
pub fn apply_player_action(
    world: &mut WorldState,
    id: VehicleId,
    action: Action,
    magnitudes: &ActionMagnitudes,
) {
    match action {
        Action::Merge => {
            let GeometryKind::Merging { main_path, .. } = world.geometry.kind else {
                panic!("Merge action outside a merging layout");
            };
            world.vehicle_mut(id).accel = 0.0;
            if world.vehicle(id).path != main_path {
                world.begin_lane_change(id, main_path, magnitudes.lane_change_duration);
            }
        }
        Action::ChangeLaneLeft | Action::ChangeLaneRight => {
            let GeometryKind::Highway { lane_paths, .. } = world.geometry.kind else {
                panic!("lane-change action outside a highway layout");
            };
            let lane = world
                .geometry
                .lane_of_path(world.vehicle(id).path)
                .expect("lane-change from a lane path");
            let target = if action == Action::ChangeLaneLeft {
                lane + 1
            } else {
                lane.checked_sub(1).expect("infeasible right change was not masked")
            };
            assert!(target < HIGHWAY_LANES, "infeasible left change was not masked");
            world.begin_lane_change(id, lane_paths[target], magnitudes.lane_change_duration);
        }
        longitudinal => {
            world.vehicle_mut(id).accel = magnitudes.accel_of(longitudinal);
        }
    }
}

fn success_reached(world: &WorldState) -> bool {
    let ego = world.vehicle(world.ego);
    match world.geometry.kind {
        GeometryKind::Roundabout { success_ego_s, .. } => ego.s >= success_ego_s,
        GeometryKind::Merging { main_path, .. } => {
            ego.path == main_path && ego.lane_change.is_none()
        }
        GeometryKind::Highway { success_x, .. } => ego.s >= success_x,
    }
}

/// Merging-specific stuck condition: the ego's front bumper reaches the end
/// of the acceleration lane without having merged.
fn merge_lane_exhausted(world: &WorldState) -> bool {
    let GeometryKind::Merging { accel_path, accel_end, .. } = world.geometry.kind else {
        return false;
    };
    let ego = world.vehicle(world.ego);
    ego.path == accel_path && ego.s + ego.half_length() >= accel_end
}

fn sample_stats(stats: &mut EpisodeStats, world: &WorldState) {
    let ego = world.vehicle(world.ego);
    if !ego.is_active() {
        return;
    }
    stats.step_count += 1;
    stats.v_sum += ego.speed;
    stats.a_abs_sum += ego.accel.abs();
    let headway = match world.leader_of(world.ego.0 as usize, ego.path) {
        Some(leader) => {
            (leader.gap + ego.half_length() + super::VEHICLE_LENGTH / 2.0).min(SENSOR_RANGE)
        }
        None => SENSOR_RANGE,
    };
    stats.hd_sum += headway;
    stats.hd_count += 1;
}

fn snapshot(world: &WorldState) -> EgoSnapshot {
    let ego = world.vehicle(world.ego);
    let pose = ego.pose(&world.geometry);
    EgoSnapshot {
        x: pose.pos.x,
        y: pose.pos.y,
        heading: pose.heading,
        speed: ego.speed,
        accel: ego.accel,
        path: ego.path,
        s: ego.s,
    }
}

/// Place vehicles for `(base_seed, episode)` and run the episode.
pub fn run_episode(
    policy: &dyn DecisionPolicy,
    spec: &ScenarioSpec,
    base_seed: u64,
    episode: u64,
    opts: &EpisodeOptions,
) -> Result<EpisodeResult, SimError> {
    let mut world = init_scenario(spec, base_seed, episode)?;
    world.idm = opts.idm;
    world.mobil = opts.mobil;
    Ok(run_from_world(policy, spec, world, base_seed, episode, opts))
}

/// Run an episode from an already-built world (placement already done).
/// Exposed for scripted-geometry tests and rollout debugging.
pub fn run_from_world(
    policy: &dyn DecisionPolicy,
    spec: &ScenarioSpec,
    mut world: WorldState,
    base_seed: u64,
    episode: u64,
    opts: &EpisodeOptions,
) -> EpisodeResult {
    let substeps = (spec.decision_period / spec.dt).round().max(1.0) as usize;
    debug_assert!(
        (substeps as f64 * spec.dt - spec.decision_period).abs() < 1e-6,
        "timestep must divide the decision period"
    );
    let stuck_lag = (STUCK_WINDOW / spec.decision_period).round().max(1.0) as usize;

    let mut iv_rngs: Vec<(VehicleId, ChaCha8Rng)> = world
        .fixed_ivs
        .iter()
        .map(|&id| (id, substream(base_seed, episode, id.0, PURPOSE_ACTIONS)))
        .collect();

    let mut stats = EpisodeStats::default();
    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut odometer_samples: Vec<f64> = Vec::new();
    let mut collision: Option<(VehicleId, VehicleId)> = None;

    let outcome = 'episode: loop {
        if world.time >= spec.timeout - 1e-9 {
            break Outcome::Timeout;
        }

        // Decision tick: stuck bookkeeping first, on the pre-step state.
        let odometer = world.vehicle(world.ego).odometer;
        odometer_samples.push(odometer);
        if odometer_samples.len() > stuck_lag {
            let past = odometer_samples[odometer_samples.len() - 1 - stuck_lag];
            if odometer - past < STUCK_PROGRESS {
                break Outcome::Stuck;
            }
        }

        // Random interacting vehicles redraw their held action.
        for (id, rng) in &mut iv_rngs {
            let vehicle = world.vehicle(*id);
            if !vehicle.is_active() || vehicle.crashed {
                continue;
            }
            let action = random_iv_action(rng, iv_action_set(spec.kind));
            world.vehicle_mut(*id).accel = opts.magnitudes.accel_of(action);
        }

        // Background traffic considers lane changes.
        world.mobil_tick(opts.magnitudes.lane_change_duration);

        // Ego decision, unless a lateral maneuver is still in progress.
        let ego_ready = {
            let ego = world.vehicle(world.ego);
            !ego.crashed && ego.lane_change.is_none()
        };
        if ego_ready {
            let setup = player_setup(spec.kind, &world);
            let started = opts.record_latency.then(Instant::now);
            let decision = policy.decide(&world, &setup);
            if let Some(t0) = started {
                let ms = t0.elapsed().as_secs_f64() * 1e3;
                stats.lat_sum_ms += ms;
                stats.lat_max_ms = stats.lat_max_ms.max(ms);
            }
            stats.decisions += 1;
            if spec.kind.is_highway() {
                match decision.action {
                    Action::ChangeLaneLeft => stats.cll += 1,
                    Action::ChangeLaneRight => stats.clr += 1,
                    _ => stats.kl += 1,
                }
            }
            if opts.trace {
                trace.push(TraceRecord {
                    t: world.time,
                    action: decision.action.label(),
                    payoffs: decision.payoffs.clone(),
                    distribution: decision.distribution.clone(),
                    ego: snapshot(&world),
                });
            }
            let ego_id = world.ego;
            apply_player_action(&mut world, ego_id, decision.action, &opts.magnitudes);
        }

        // Physics substeps under the held commands.
        for _ in 0..substeps {
            world.step(spec.dt);
            sample_stats(&mut stats, &world);

            let pairs = detect_collisions(&world);
            if !pairs.is_empty() {
                if let Some(&pair) =
                    pairs.iter().find(|&&(a, b)| a == world.ego || b == world.ego)
                {
                    collision = Some(pair);
                    break 'episode Outcome::Collision;
                }
                // Collisions not involving the ego leave wreckage behind
                // but do not end the episode.
                for (a, b) in pairs {
                    for id in [a, b] {
                        let v = world.vehicle_mut(id);
                        v.crashed = true;
                        v.speed = 0.0;
                        v.accel = 0.0;
                    }
                }
            }

            if success_reached(&world) {
                break 'episode Outcome::Success;
            }
            if merge_lane_exhausted(&world) {
                break 'episode Outcome::Stuck;
            }
            if world.time >= spec.timeout - 1e-9 {
                break;
            }
        }
    };

    EpisodeResult { outcome, collision, duration: world.time.min(spec.timeout), stats, trace }
}
