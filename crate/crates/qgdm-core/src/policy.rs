//! Decision policies: the staged game pipeline (dominant strategy, unique
//! pure equilibrium, expected utility under a pluggable probability
//! provider) plus the rule-based and utility-based baselines.
//!
//! All game policies share the same pipeline and differ only in where the
//! Step-3 joint distribution comes from: a classical provider (uniform,
//! support-enumerated mixed equilibrium, uniform over pure equilibria) or a
//! quantum circuit evaluation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::{
    evaluate_circuit, preset, profile_probabilities, CircuitError, CircuitKind, QuantumGameConfig,
    QuantumModel,
};
use crate::game::{
    epd_distribution, expected_utilities_with, find_pure_nash, find_strictly_dominant,
    mixed_strategy_distribution, nash_distribution, select_action, EuNormalization,
    JointDistribution, NormalFormGame,
};
use crate::payoff::{build_game, rollout_profile, score_profile, PayoffWeights, Scene};
use crate::sim::{
    mobil_decide, Action, ActionMagnitudes, DecisionPolicy, GeometryKind, PlayerSetup,
    PolicyDecision, WorldState, VEHICLE_LENGTH,
};

/// Where the Step-3 joint action-profile distribution comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    /// Equal probability over all profiles.
    Epd,
    /// Support-enumerated mixed equilibrium (two-player games).
    MixedStrategy,
    /// Uniform over the pure equilibria.
    NashUniform,
    /// Quantum circuit, parameterized-rotation preset.
    QuantumUnitary,
    /// Quantum circuit, fixed-gate preset.
    QuantumGate,
}

impl Provider {
    pub const ALL: [Provider; 5] = [
        Provider::Epd,
        Provider::MixedStrategy,
        Provider::NashUniform,
        Provider::QuantumUnitary,
        Provider::QuantumGate,
    ];
}

/// A selectable policy, as named in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Reactive driving rules: car-following for roundabouts, gap
    /// acceptance for merging, both for the highway. No game is built.
    Rule,
    /// Argmax of the ego's own rollout score with opponents extrapolated
    /// as-is. No game reasoning.
    Utility,
    /// Game pipeline with the equal-probability provider.
    CgEpd,
    /// Game pipeline with the mixed-strategy provider.
    CgMs,
    /// Game pipeline with the uniform-over-equilibria provider.
    CgNe,
    /// Game pipeline with the rotation-parameterized quantum provider.
    QgdmU,
    /// Game pipeline with the fixed-gate quantum provider.
    QgdmG,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Rule,
        PolicyKind::Utility,
        PolicyKind::CgEpd,
        PolicyKind::CgMs,
        PolicyKind::CgNe,
        PolicyKind::QgdmU,
        PolicyKind::QgdmG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Rule => "rule",
            PolicyKind::Utility => "utility",
            PolicyKind::CgEpd => "cg-epd",
            PolicyKind::CgMs => "cg-ms",
            PolicyKind::CgNe => "cg-ne",
            PolicyKind::QgdmU => "qgdm-u",
            PolicyKind::QgdmG => "qgdm-g",
        }
    }

    /// The Step-3 provider behind this policy, if it is a game policy.
    pub fn provider(self) -> Option<Provider> {
        match self {
            PolicyKind::Rule | PolicyKind::Utility => None,
            PolicyKind::CgEpd => Some(Provider::Epd),
            PolicyKind::CgMs => Some(Provider::MixedStrategy),
            PolicyKind::CgNe => Some(Provider::NashUniform),
            PolicyKind::QgdmU => Some(Provider::QuantumUnitary),
            PolicyKind::QgdmG => Some(Provider::QuantumGate),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unknown policy name on the command line or in config.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown policy '{0}'; expected one of rule, utility, cg-epd, cg-ms, cg-ne, qgdm-u, qgdm-g")]
pub struct ParsePolicyError(pub String);

impl FromStr for PolicyKind {
    type Err = ParsePolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ParsePolicyError(s.to_owned()))
    }
}

/// Per-model circuit parameter overrides, keyed by circuit shape. Anything
/// not listed falls back to the built-in presets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumOverrides {
    pub qgdm_u: HashMap<CircuitKind, QuantumGameConfig>,
    pub qgdm_g: HashMap<CircuitKind, QuantumGameConfig>,
}

impl QuantumOverrides {
    fn config_for(&self, model: QuantumModel, circuit: CircuitKind) -> QuantumGameConfig {
        let table = match model {
            QuantumModel::QgdmU => &self.qgdm_u,
            QuantumModel::QgdmG => &self.qgdm_g,
        };
        table.get(&circuit).cloned().unwrap_or_else(|| preset(model, circuit))
    }
}

/// Everything a policy needs besides the scene itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionConfig {
    pub weights: PayoffWeights,
    pub magnitudes: ActionMagnitudes,
    pub eu_normalization: EuNormalization,
    pub quantum: QuantumOverrides,
}

/// A fully configured policy; implements the simulator's decision hook.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    config: DecisionConfig,
}

impl Policy {
    pub fn new(kind: PolicyKind, config: DecisionConfig) -> Self {
        Self { kind, config }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }
}

impl DecisionPolicy for Policy {
    fn decide(&self, world: &WorldState, setup: &PlayerSetup) -> PolicyDecision {
        match self.kind {
            PolicyKind::Rule => PolicyDecision::plain(rule_decide(world, setup, &self.config)),
            PolicyKind::Utility => utility_decide(world, setup, &self.config),
            game_kind => {
                let provider = game_kind.provider().expect("remaining kinds are game policies");
                if setup.players.len() < 2 {
                    // Opponents all gone: there is no game to build, so fall
                    // back to maximizing the ego's own rollout score.
                    return utility_decide(world, setup, &self.config);
                }
                let scene = Scene::capture(world, &setup.players);
                let game = build_game(
                    &scene,
                    &setup.action_sets,
                    &self.config.weights,
                    &self.config.magnitudes,
                );
                let safe_index = safe_action_index(setup);
                let (index, distribution) =
                    decide_game(&game, provider, safe_index, &self.config);
                let payoffs = (0..game.n_players())
                    .map(|p| (0..game.n_profiles()).map(|f| game.utility_at(p, f)).collect())
                    .collect();
                PolicyDecision {
                    action: setup.action_sets[0][index],
                    payoffs: Some(payoffs),
                    distribution: distribution.map(|d| d.probs().to_vec()),
                }
            }
        }
    }
}

/// Index of the scenario's safe action within the ego's action set; falls
/// back to the first action if masking removed it (it never does: the safe
/// action is always longitudinal).
fn safe_action_index(setup: &PlayerSetup) -> usize {
    setup.action_sets[0].iter().position(|&a| a == setup.safe_action).unwrap_or(0)
}

/// The staged pipeline on an already built game. Returns the ego action
/// index and, when the final step was reached, the joint distribution it
/// consulted.
///
/// Stage order: the ego's strictly dominant action wins outright; otherwise
/// a *unique* pure equilibrium decides (zero or several fall through);
/// otherwise the provider's joint distribution is folded into per-action
/// expected utilities and the argmax (safety-preferring on ties) is taken.
pub fn decide_game(
    game: &NormalFormGame,
    provider: Provider,
    safe_index: usize,
    config: &DecisionConfig,
) -> (usize, Option<JointDistribution>) {
    if let Some(action) = find_strictly_dominant(game, 0) {
        return (action, None);
    }
    let equilibria = find_pure_nash(game);
    if equilibria.len() == 1 {
        return (equilibria[0].action(0), None);
    }
    let distribution = provider_distribution(provider, game, &config.quantum);
    let eu = expected_utilities_with(game, 0, &distribution, config.eu_normalization);
    (select_action(&eu, safe_index), Some(distribution))
}

/// The Step-3 joint distribution for a provider. Provider failure (only the
/// quantum path can fail, and only on inconsistent overrides) degrades to
/// the equal-probability distribution with a logged warning.
pub fn provider_distribution(
    provider: Provider,
    game: &NormalFormGame,
    overrides: &QuantumOverrides,
) -> JointDistribution {
    let result = match provider {
        Provider::Epd => Ok(epd_distribution(game)),
        Provider::MixedStrategy => Ok(mixed_strategy_distribution(game)),
        Provider::NashUniform => Ok(nash_distribution(game)),
        Provider::QuantumUnitary => quantum_distribution(QuantumModel::QgdmU, game, overrides),
        Provider::QuantumGate => quantum_distribution(QuantumModel::QgdmG, game, overrides),
    };
    result.unwrap_or_else(|error| {
        log::warn!("probability provider failed ({error}); falling back to equal probabilities");
        epd_distribution(game)
    })
}

/// The circuit shape serving a game of this shape. Mixed action counts ride
/// the two-strategy circuit; the embedding in [`quantum_distribution`] puts
/// zero mass on the actions the circuit cannot express.
pub fn circuit_for_game(game: &NormalFormGame) -> CircuitKind {
    if game.n_players() == 3 {
        CircuitKind::ThreePTwoS
    } else if (0..game.n_players()).all(|p| game.n_actions(p) == 3) {
        CircuitKind::TwoPThreeS
    } else {
        CircuitKind::TwoPTwoS
    }
}

/// Evaluate the model's circuit for this game shape and lift the profile
/// distribution onto the game's profile grid.
///
/// When the circuit's strategy count per player matches the game exactly
/// the lift is the identity. When an action set is wider than the circuit
/// (a masked three-action set next to an unmasked one), the circuit's
/// strategies map onto the first actions and the remainder get zero mass.
pub fn quantum_distribution(
    model: QuantumModel,
    game: &NormalFormGame,
    overrides: &QuantumOverrides,
) -> Result<JointDistribution, CircuitError> {
    let circuit = circuit_for_game(game);
    let config = overrides.config_for(model, circuit);
    if config.circuit != circuit {
        return Err(CircuitError::WrongOperatorCount {
            circuit,
            expected: circuit.n_players(),
            got: config.player_ops.len(),
        });
    }
    config.validate()?;
    let state = evaluate_circuit(&config)?;
    let circuit_probs = profile_probabilities(&state, circuit);

    let counts: Vec<usize> = (0..game.n_players()).map(|p| game.n_actions(p)).collect();
    let strategies = circuit.strategies_per_player();
    let mut lifted = vec![0.0; game.n_profiles()];
    for (flat, &p) in circuit_probs.probs().iter().enumerate() {
        let mut rem = flat;
        let mut game_flat = 0;
        let mut stride = 1;
        // Decode the circuit profile (base `strategies`, player 0 most
        // significant) and re-encode it in the game's mixed radix.
        let mut digits = [0usize; 3];
        for player in (0..counts.len()).rev() {
            digits[player] = rem % strategies;
            rem /= strategies;
        }
        for (player, &count) in counts.iter().enumerate().rev() {
            game_flat += digits[player] * stride;
            stride *= count;
            let _ = player;
        }
        lifted[game_flat] += p;
    }
    Ok(JointDistribution::new(lifted).expect("reindexing preserves the simplex"))
}

/// Pick the longitudinal action whose commanded acceleration is closest to
/// the continuous target; exact ties prefer the safe action.
fn quantize_longitudinal(
    set: &[Action],
    target: f64,
    magnitudes: &ActionMagnitudes,
    safe: Action,
) -> Action {
    let mut best: Option<(f64, Action)> = None;
    for &action in set {
        if action.is_lateral() {
            continue;
        }
        let distance = (magnitudes.accel_of(action) - target).abs();
        let better = match best {
            None => true,
            Some((d, _)) => distance < d || (distance == d && action == safe),
        };
        if better {
            best = Some((distance, action));
        }
    }
    best.expect("every ego action set has a longitudinal action").1
}

/// Reactive baseline. Roundabout: car-following plus a yield rule at the
/// ring entry. Merging: gap acceptance onto the main lane. Highway: gap
/// acceptance between lanes (longitudinal control is already the cruise
/// law's job there).
fn rule_decide(world: &WorldState, setup: &PlayerSetup, config: &DecisionConfig) -> Action {
    let ego_set = &setup.action_sets[0];
    match world.geometry.kind {
        GeometryKind::Roundabout { .. } => {
            let target = roundabout_following_accel(world);
            quantize_longitudinal(ego_set, target, &config.magnitudes, setup.safe_action)
        }
        GeometryKind::Merging { main_path, accel_end, .. } => {
            let ego_index = world.ego.0 as usize;
            let ego = world.vehicle(world.ego);
            let mut assessment = world.assess_lane_change(ego_index, main_path);
            // The acceleration lane runs out: staying means braking for a
            // wall, which the generic lane assessment cannot know about.
            let wall_gap = accel_end - ego.s - ego.half_length();
            assessment.own_now = assessment.own_now.min(crate::sim::idm_accel(
                wall_gap,
                ego.speed,
                0.0,
                &world.idm.with_v0(ego.v_desired),
            ));
            if mobil_decide(&assessment, &world.mobil) {
                Action::Merge
            } else {
                Action::Decelerate
            }
        }
        GeometryKind::Highway { lane_paths, .. } => {
            let ego_index = world.ego.0 as usize;
            let ego = world.vehicle(world.ego);
            let lane = world.geometry.lane_of_path(ego.path).expect("ego rides a lane");
            let (left, right) = crate::sim::highway_neighbors(lane);
            let mut best: Option<(f64, Action)> = None;
            for (candidate, action) in [
                (left, Action::ChangeLaneLeft),
                (right, Action::ChangeLaneRight),
            ] {
                let Some(target_lane) = candidate else { continue };
                if !ego_set.contains(&action) {
                    continue;
                }
                let assessment = world.assess_lane_change(ego_index, lane_paths[target_lane]);
                if !mobil_decide(&assessment, &world.mobil) {
                    continue;
                }
                let margin = (assessment.own_after - assessment.own_now)
                    + world.mobil.politeness
                        * ((assessment.new_follower_after - assessment.new_follower_now)
                            + (assessment.old_follower_after - assessment.old_follower_now));
                if best.is_none_or(|(b, _)| margin > b) {
                    best = Some((margin, action));
                }
            }
            best.map_or(Action::Idle, |(_, action)| action)
        }
    }
}

/// Continuous car-following acceleration for the roundabout ego: its own
/// lane's cruise law, tightened by a stop-line hold while the entry is
/// claimed by circulating traffic and by the nearest circulating vehicle
/// ahead once the ego is on the ring.
fn roundabout_following_accel(world: &WorldState) -> f64 {
    let GeometryKind::Roundabout {
        ring_path, entry_ego_s, exit_ego_s, entry_ring_s, ..
    } = world.geometry.kind
    else {
        unreachable!("caller matched the layout");
    };
    let ego = world.vehicle(world.ego);
    let params = world.idm.with_v0(ego.v_desired);
    let ring_len = world.geometry.path(ring_path).length();
    let mut accel = world.idm_accel_for(world.ego.0 as usize);

    if ego.s < entry_ego_s {
        // Approaching the ring: hold at the entry line while any
        // circulating vehicle is about to claim the joint point.
        let blocked = world.vehicles.iter().any(|v| {
            if v.id == world.ego || !v.is_active() || v.path != ring_path {
                return false;
            }
            let to_entry = (entry_ring_s - v.s).rem_euclid(ring_len);
            let claims_soon =
                to_entry <= (ENTRY_YIELD_HORIZON * v.speed).max(ENTRY_CLEAR_ZONE);
            let still_in_mouth = ring_len - to_entry <= ENTRY_CLEAR_ZONE;
            claims_soon || still_in_mouth
        });
        if blocked {
            let gap = entry_ego_s - ENTRY_STOP_SETBACK - ego.s - ego.half_length();
            accel = accel.min(crate::sim::idm_accel(gap, ego.speed, 0.0, &params));
        }
    } else if ego.s <= exit_ego_s {
        // On the ring: follow the nearest circulating vehicle ahead, in
        // ring arc coordinates (the ego route's arc overlays the ring).
        let ego_ring_s = (entry_ring_s + (ego.s - entry_ego_s)).rem_euclid(ring_len);
        let ahead = world
            .vehicles
            .iter()
            .filter(|v| v.id != world.ego && v.is_active() && v.path == ring_path)
            .map(|v| ((v.s - ego_ring_s).rem_euclid(ring_len), v.speed))
            .filter(|&(d, _)| d > 0.0)
            .min_by(|a, b| a.0.partial_cmp(&b.0).expect("arc distances are finite"));
        if let Some((distance, lead_speed)) = ahead {
            let gap = distance - VEHICLE_LENGTH;
            accel = accel.min(crate::sim::idm_accel(gap, ego.speed, lead_speed, &params));
        }
    }
    accel
}

/// How far ahead (in seconds of circulating travel) the entry yield rule
/// looks along the ring.
const ENTRY_YIELD_HORIZON: f64 = 3.0;
/// Arc distance around the joint point treated as physically occupied, m.
const ENTRY_CLEAR_ZONE: f64 = 8.0;
/// Hold line distance short of the joint point, m: far enough back that a
/// waiting vehicle is out of reach of circulating bodies.
const ENTRY_STOP_SETBACK: f64 = 5.0;

/// Greedy baseline: roll out each ego action alone — everyone else keeps
/// doing what they are doing — and take the best own score, preferring the
/// safe action on exact ties.
fn utility_decide(
    world: &WorldState,
    setup: &PlayerSetup,
    config: &DecisionConfig,
) -> PolicyDecision {
    let ego_set = &setup.action_sets[0];
    let scene = Scene::capture(world, &setup.players[..1]);
    let scores: Vec<f64> = ego_set
        .iter()
        .map(|&action| {
            let trajectory =
                rollout_profile(&scene, &[action], &config.weights, &config.magnitudes);
            score_profile(&trajectory, 0, &config.weights)
        })
        .collect();
    let index = select_action(&scores, safe_action_index(setup));
    PolicyDecision {
        action: ego_set[index],
        payoffs: Some(vec![scores]),
        distribution: None,
    }
}
