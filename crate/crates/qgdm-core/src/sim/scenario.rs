//! Scenario catalogue: the five interaction setups, their sampling ranges,
//! deterministic initial placement, and the per-decision player/action-set
//! structure handed to decision policies.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{Geometry, GeometryKind, HIGHWAY_LANES};
use super::rng::{substream, NO_VEHICLE, PURPOSE_PLACEMENT};
use super::vehicle::{corners_at, Controller, Vehicle, VehicleId};
use super::world::{rects_collide, WorldState};
use super::{Action, SimError};

/// The five experiment scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "roundabout-2p")]
    RoundaboutTwoP,
    #[serde(rename = "roundabout-3p")]
    RoundaboutThreeP,
    #[serde(rename = "merging-2p")]
    MergingTwoP,
    #[serde(rename = "merging-3p")]
    MergingThreeP,
    #[serde(rename = "highway")]
    Highway,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::RoundaboutTwoP,
        ScenarioKind::RoundaboutThreeP,
        ScenarioKind::MergingTwoP,
        ScenarioKind::MergingThreeP,
        ScenarioKind::Highway,
    ];

    /// Number of game players (ego included).
    pub fn n_players(self) -> usize {
        match self {
            ScenarioKind::RoundaboutThreeP | ScenarioKind::MergingThreeP => 3,
            _ => 2,
        }
    }

    /// Default Monte-Carlo episode count.
    pub fn default_episodes(self) -> u64 {
        match self {
            ScenarioKind::Highway => 200,
            _ => 2000,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::RoundaboutTwoP => "roundabout-2p",
            ScenarioKind::RoundaboutThreeP => "roundabout-3p",
            ScenarioKind::MergingTwoP => "merging-2p",
            ScenarioKind::MergingThreeP => "merging-3p",
            ScenarioKind::Highway => "highway",
        }
    }

    pub fn is_highway(self) -> bool {
        matches!(self, ScenarioKind::Highway)
    }

    fn geometry(self) -> Geometry {
        match self {
            ScenarioKind::RoundaboutTwoP | ScenarioKind::RoundaboutThreeP => {
                Geometry::roundabout()
            }
            ScenarioKind::MergingTwoP | ScenarioKind::MergingThreeP => Geometry::merging(),
            ScenarioKind::Highway => Geometry::highway(),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected one of roundabout-2p, roundabout-3p, merging-2p, merging-3p, highway)"))
    }
}

/// Sampling ranges and episode limits for one scenario. All ranges are
/// `[low, high]` closed-open intervals; equal endpoints pin the value.
/// Defaults are project-chosen to make the intended conflicts frequent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Episode wall-clock limit, simulated seconds.
    pub timeout: f64,
    /// Physics integration timestep, s.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Seconds between ego decision rounds; must be an integer multiple of
    /// `dt`.
    #[serde(default = "default_decision_period")]
    pub decision_period: f64,
    /// Ego initial arc length along its path, m.
    pub ego_s: [f64; 2],
    /// Ego initial speed, m/s.
    pub ego_speed: [f64; 2],
    /// Ego desired speed, m/s (efficiency reference; IDM target on highway).
    pub ego_v_desired: f64,
    /// One range per interacting vehicle, in player order.
    pub iv_s: Vec<[f64; 2]>,
    pub iv_speed: [f64; 2],
    pub iv_v_desired: f64,
    /// Background traffic count (highway only; zero elsewhere).
    pub n_background: usize,
    /// Background initial x relative to the ego, m.
    pub bg_dx: [f64; 2],
    pub bg_speed: [f64; 2],
    pub bg_v_desired: [f64; 2],
    /// Minimum same-lane center-to-center spacing at placement, m.
    pub min_spacing: f64,
}

fn default_dt() -> f64 {
    crate::sim::DT
}

fn default_decision_period() -> f64 {
    crate::sim::DECISION_PERIOD
}

impl ScenarioSpec {
    pub fn default_for(kind: ScenarioKind) -> Self {
        let base = Self {
            kind,
            timeout: 60.0,
            dt: default_dt(),
            decision_period: default_decision_period(),
            ego_s: [10.0, 40.0],
            ego_speed: [5.0, 9.0],
            ego_v_desired: 8.0,
            iv_s: vec![],
            iv_speed: [5.0, 9.0],
            iv_v_desired: 8.0,
            n_background: 0,
            bg_dx: [0.0, 0.0],
            bg_speed: [0.0, 0.0],
            bg_v_desired: [0.0, 0.0],
            min_spacing: 12.0,
        };
        match kind {
            ScenarioKind::RoundaboutTwoP => Self { iv_s: vec![[55.0, 115.0]], ..base },
            ScenarioKind::RoundaboutThreeP => {
                Self { iv_s: vec![[45.0, 110.0], [75.0, 123.0]], ..base }
            }
            ScenarioKind::MergingTwoP => Self {
                ego_s: [30.0, 70.0],
                ego_speed: [8.0, 13.0],
                ego_v_desired: 13.0,
                iv_s: vec![[0.0, 60.0]],
                iv_speed: [10.0, 15.0],
                iv_v_desired: 14.0,
                ..base
            },
            ScenarioKind::MergingThreeP => Self {
                ego_s: [30.0, 70.0],
                ego_speed: [8.0, 13.0],
                ego_v_desired: 13.0,
                iv_s: vec![[40.0, 100.0], [0.0, 45.0]],
                iv_speed: [10.0, 15.0],
                iv_v_desired: 14.0,
                ..base
            },
            ScenarioKind::Highway => Self {
                timeout: 90.0,
                ego_s: [40.0, 80.0],
                ego_speed: [20.0, 25.0],
                ego_v_desired: 25.0,
                iv_s: vec![],
                iv_speed: [0.0, 0.0],
                iv_v_desired: 0.0,
                n_background: 15,
                bg_dx: [-30.0, 350.0],
                bg_speed: [15.0, 25.0],
                bg_v_desired: [16.0, 27.0],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let ranges = [self.ego_s, self.ego_speed, self.iv_speed, self.bg_dx, self.bg_speed,
            self.bg_v_desired];
        for r in ranges.iter().chain(self.iv_s.iter()) {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(SimError::InvalidSpec(format!("bad range {r:?}")));
            }
        }
        if !(self.timeout > 0.0) {
            return Err(SimError::InvalidSpec(format!("bad timeout {}", self.timeout)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::InvalidSpec(format!("bad timestep {}", self.dt)));
        }
        if !(self.decision_period > 0.0 && self.decision_period.is_finite()) {
            return Err(SimError::InvalidSpec(format!(
                "bad decision period {}",
                self.decision_period
            )));
        }
        let per_round = self.decision_period / self.dt;
        if (per_round - per_round.round()).abs() > 1e-6 || per_round < 0.5 {
            return Err(SimError::InvalidSpec(format!(
                "decision period {} is not an integer multiple of timestep {}",
                self.decision_period, self.dt
            )));
        }
        let expected_ivs =
            if self.kind.is_highway() { 0 } else { self.kind.n_players() - 1 };
        if self.iv_s.len() != expected_ivs {
            return Err(SimError::InvalidSpec(format!(
                "{} needs {} interacting-vehicle ranges, got {}",
                self.kind,
                expected_ivs,
                self.iv_s.len()
            )));
        }
        if self.min_spacing < 0.0 {
            return Err(SimError::InvalidSpec("negative min_spacing".into()));
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[1] > range[0] {
        rng.random_range(range[0]..range[1])
    } else {
        range[0]
    }
}

/// True when `candidate` keeps legal clearance from every placed vehicle:
/// same-path traffic at least `min_spacing` apart (closed paths measured
/// around the shorter way), and no footprint overlap anywhere.
fn placement_ok(
    candidate: &Vehicle,
    placed: &[Vehicle],
    geometry: &Geometry,
    min_spacing: f64,
) -> bool {
    let cand_pose = candidate.pose(geometry);
    for other in placed {
        if other.path == candidate.path {
            let path = geometry.path(candidate.path);
            let direct = (candidate.s - other.s).abs();
            let gap = if path.is_closed() {
                direct.min(path.length() - direct)
            } else {
                direct
            };
            if gap < min_spacing {
                return false;
            }
        } else if rects_collide(&corners_at(cand_pose), &other.corners(geometry)) {
            return false;
        }
    }
    true
}

/// Draw candidates until one satisfies clearance, up to 100 attempts.
fn place(
    vehicles: &mut Vec<Vehicle>,
    geometry: &Geometry,
    rng: &mut ChaCha8Rng,
    min_spacing: f64,
    episode: u64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Vehicle,
) -> Result<(), SimError> {
    for _ in 0..100 {
        let candidate = draw(rng);
        if placement_ok(&candidate, vehicles, geometry, min_spacing) {
            vehicles.push(candidate);
            return Ok(());
        }
    }
    Err(SimError::PlacementFailed { episode, attempts: 100 })
}

/// Deterministically place all vehicles for one episode. The placement
/// stream is keyed on (seed, episode); identical inputs give an identical
/// world. Each vehicle is resampled up to 100 times to satisfy clearance.
pub fn init_scenario(
    spec: &ScenarioSpec,
    base_seed: u64,
    episode: u64,
) -> Result<WorldState, SimError> {
    spec.validate()?;
    let geometry = spec.kind.geometry();
    let mut rng = substream(base_seed, episode, NO_VEHICLE, PURPOSE_PLACEMENT);
    let mut vehicles: Vec<Vehicle> = Vec::new();
    let spacing = spec.min_spacing;

    match spec.kind {
        ScenarioKind::RoundaboutTwoP | ScenarioKind::RoundaboutThreeP => {
            let GeometryKind::Roundabout { ring_path, ego_path, .. } = geometry.kind else {
                unreachable!()
            };
            place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                let mut ego = Vehicle::new(
                    VehicleId(0),
                    Controller::EgoPolicy,
                    ego_path,
                    sample(rng, spec.ego_s),
                    sample(rng, spec.ego_speed),
                );
                ego.v_desired = spec.ego_v_desired;
                ego
            })?;
            for (i, range) in spec.iv_s.iter().enumerate() {
                place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                    let mut iv = Vehicle::new(
                        VehicleId(1 + i as u32),
                        Controller::RandomIv,
                        ring_path,
                        sample(rng, *range),
                        sample(rng, spec.iv_speed),
                    );
                    iv.v_desired = spec.iv_v_desired;
                    iv
                })?;
            }
        }
        ScenarioKind::MergingTwoP | ScenarioKind::MergingThreeP => {
            let GeometryKind::Merging { main_path, accel_path, .. } = geometry.kind else {
                unreachable!()
            };
            place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                let mut ego = Vehicle::new(
                    VehicleId(0),
                    Controller::EgoPolicy,
                    accel_path,
                    sample(rng, spec.ego_s),
                    sample(rng, spec.ego_speed),
                );
                ego.v_desired = spec.ego_v_desired;
                ego
            })?;
            for (i, range) in spec.iv_s.iter().enumerate() {
                place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                    let mut iv = Vehicle::new(
                        VehicleId(1 + i as u32),
                        Controller::RandomIv,
                        main_path,
                        sample(rng, *range),
                        sample(rng, spec.iv_speed),
                    );
                    iv.v_desired = spec.iv_v_desired;
                    iv
                })?;
            }
        }
        ScenarioKind::Highway => {
            let GeometryKind::Highway { lane_paths, length, .. } = geometry.kind else {
                unreachable!()
            };
            place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                let lane = rng.random_range(0..HIGHWAY_LANES);
                let mut ego = Vehicle::new(
                    VehicleId(0),
                    Controller::EgoPolicy,
                    lane_paths[lane],
                    sample(rng, spec.ego_s),
                    sample(rng, spec.ego_speed),
                );
                ego.v_desired = spec.ego_v_desired;
                ego
            })?;
            let ego_x = vehicles[0].s;
            for i in 0..spec.n_background {
                place(&mut vehicles, &geometry, &mut rng, spacing, episode, |rng| {
                    let lane = rng.random_range(0..HIGHWAY_LANES);
                    let x = (ego_x + sample(rng, spec.bg_dx)).clamp(5.0, length - 5.0);
                    let mut ov = Vehicle::new(
                        VehicleId(1 + i as u32),
                        Controller::IdmMobil,
                        lane_paths[lane],
                        x,
                        sample(rng, spec.bg_speed),
                    );
                    ov.v_desired = sample(rng, spec.bg_v_desired);
                    ov
                })?;
            }
        }
    }

    let ego = vehicles[0].id;
    let fixed_ivs: Vec<VehicleId> = vehicles
        .iter()
        .filter(|v| v.controller == Controller::RandomIv)
        .map(|v| v.id)
        .collect();
    Ok(WorldState::new(geometry, vehicles, ego, fixed_ivs))
}

/// Action set of the ego, before feasibility masking.
pub fn ego_action_set(kind: ScenarioKind) -> &'static [Action] {
    match kind {
        ScenarioKind::MergingTwoP | ScenarioKind::MergingThreeP => {
            &[Action::Merge, Action::Decelerate]
        }
        ScenarioKind::RoundaboutTwoP | ScenarioKind::RoundaboutThreeP => {
            &[Action::Accelerate, Action::Decelerate]
        }
        ScenarioKind::Highway => {
            &[Action::ChangeLaneLeft, Action::ChangeLaneRight, Action::Idle]
        }
    }
}

/// Action set of each interacting vehicle.
pub fn iv_action_set(kind: ScenarioKind) -> &'static [Action] {
    match kind {
        ScenarioKind::Highway => &[Action::Accelerate, Action::Decelerate, Action::Idle],
        _ => &[Action::Accelerate, Action::Decelerate],
    }
}

/// The safety-biased fallback action used to break expected-utility ties.
pub fn safe_action(kind: ScenarioKind) -> Action {
    match kind {
        ScenarioKind::Highway => Action::Idle,
        _ => Action::Decelerate,
    }
}

/// Uniform draw over an action set from the vehicle's dedicated stream.
pub fn random_iv_action(rng: &mut ChaCha8Rng, set: &[Action]) -> Action {
    assert!(!set.is_empty(), "empty action set");
    set[rng.random_range(0..set.len())]
}

/// Who plays this decision round and with which actions, ego first.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerSetup {
    pub players: Vec<VehicleId>,
    pub action_sets: Vec<Vec<Action>>,
    pub safe_action: Action,
}

/// Build the decision-round player structure. Fixed interacting vehicles
/// participate while still on the road; on the highway the single
/// interacting vehicle is re-chosen every round as the closest other
/// vehicle (ties to the lower id), and infeasible ego lane changes are
/// masked out. Degenerate rounds (no opponent left) return the ego alone.
pub fn player_setup(kind: ScenarioKind, world: &WorldState) -> PlayerSetup {
    let ego = world.vehicle(world.ego);
    let mut players = vec![world.ego];
    let mut action_sets: Vec<Vec<Action>> = Vec::new();

    if kind.is_highway() {
        let mut ego_actions: Vec<Action> = Vec::new();
        let lane = world
            .geometry
            .lane_of_path(ego.path)
            .expect("highway ego rides a lane path");
        let (left, right) = super::geometry::highway_neighbors(lane);
        for &action in ego_action_set(kind) {
            let feasible = match action {
                Action::ChangeLaneLeft => left.is_some(),
                Action::ChangeLaneRight => right.is_some(),
                _ => true,
            };
            if feasible {
                ego_actions.push(action);
            }
        }
        action_sets.push(ego_actions);

        let ego_pos = ego.pose(&world.geometry).pos;
        let nearest = world
            .vehicles
            .iter()
            .filter(|v| v.id != world.ego && v.is_active())
            .map(|v| (v.pose(&world.geometry).pos.dist(ego_pos), v.id))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        if let Some((_, id)) = nearest {
            players.push(id);
            action_sets.push(iv_action_set(kind).to_vec());
        }
    } else {
        action_sets.push(ego_action_set(kind).to_vec());
        for &id in &world.fixed_ivs {
            if world.vehicle(id).is_active() {
                players.push(id);
                action_sets.push(iv_action_set(kind).to_vec());
            }
        }
    }

    PlayerSetup { players, action_sets, safe_action: safe_action(kind) }
}
