//! Normal-form games and the classical solver machinery: strict dominance,
//! pure Nash enumeration, expected utility, action selection, and the
//! classical probability providers.
//!
//! Games here are tiny — two or three players with two or three actions
//! each — so every algorithm is exhaustive enumeration over at most 27
//! action profiles.

mod providers;
mod solve;

pub use providers::{epd_distribution, mixed_strategy_distribution, nash_distribution};
pub use solve::{
    expected_utilities, expected_utilities_with, find_pure_nash, find_strictly_dominant,
    select_action, EuNormalization,
};

/// Tolerance on probability-mass bookkeeping (distribution sums, equilibrium
/// deviation checks).
pub const DIST_TOL: f64 = 1e-9;

/// Errors raised while constructing game values from external data.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("games must have 2 or 3 players, got {0}")]
    BadPlayerCount(usize),
    #[error("player {player} must have 2 or 3 actions, got {count}")]
    BadActionCount { player: usize, count: usize },
    #[error("utilities for player {player} cover {got} profiles, expected {expected}")]
    UtilityShapeMismatch { player: usize, got: usize, expected: usize },
    #[error("payoff {value} for player {player} at profile {profile} outside [0, 1]")]
    PayoffOutOfRange { player: usize, profile: usize, value: f64 },
    #[error("probability vector has {got} entries, expected {expected}")]
    DistributionShapeMismatch { got: usize, expected: usize },
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    BadProbabilitySum(f64),
}

/// One action index per player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionProfile {
    actions: Vec<usize>,
}

impl ActionProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        Self { actions }
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn action(&self, player: usize) -> usize {
        self.actions[player]
    }
}

/// A finite normal-form game: per-player action labels and a payoff in
/// `[0, 1]` for every player at every action profile.
///
/// Profiles are flattened row-major with player 0 most significant, so for
/// a 2x2 game the order is `(0,0), (0,1), (1,0), (1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame {
    action_labels: Vec<Vec<&'static str>>,
    /// `utilities[player][flat_profile_index]`
    utilities: Vec<Vec<f64>>,
}

impl NormalFormGame {
    pub fn new(
        action_labels: Vec<Vec<&'static str>>,
        utilities: Vec<Vec<f64>>,
    ) -> Result<Self, GameError> {
        let n_players = action_labels.len();
        if !(2..=3).contains(&n_players) {
            return Err(GameError::BadPlayerCount(n_players));
        }
        for (player, labels) in action_labels.iter().enumerate() {
            if !(2..=3).contains(&labels.len()) {
                return Err(GameError::BadActionCount { player, count: labels.len() });
            }
        }
        let n_profiles: usize = action_labels.iter().map(Vec::len).product();
        if utilities.len() != n_players {
            return Err(GameError::UtilityShapeMismatch {
                player: utilities.len(),
                got: utilities.len(),
                expected: n_players,
            });
        }
        for (player, u) in utilities.iter().enumerate() {
            if u.len() != n_profiles {
                return Err(GameError::UtilityShapeMismatch {
                    player,
                    got: u.len(),
                    expected: n_profiles,
                });
            }
            for (profile, &value) in u.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(GameError::PayoffOutOfRange { player, profile, value });
                }
            }
        }
        Ok(Self { action_labels, utilities })
    }

    pub fn n_players(&self) -> usize {
        self.action_labels.len()
    }

    pub fn n_actions(&self, player: usize) -> usize {
        self.action_labels[player].len()
    }

    pub fn action_label(&self, player: usize, action: usize) -> &'static str {
        self.action_labels[player][action]
    }

    pub fn n_profiles(&self) -> usize {
        self.action_labels.iter().map(Vec::len).product()
    }

    /// Flat index of a profile (row-major, player 0 most significant).
    pub fn profile_index(&self, actions: &[usize]) -> usize {
        assert_eq!(actions.len(), self.n_players(), "profile arity mismatch");
        let mut index = 0;
        for (player, &a) in actions.iter().enumerate() {
            debug_assert!(a < self.n_actions(player));
            index = index * self.n_actions(player) + a;
        }
        index
    }

    /// All profiles in lexicographic (= flat index) order.
    pub fn profiles(&self) -> Vec<ActionProfile> {
        let mut out = Vec::with_capacity(self.n_profiles());
        let mut current = vec![0usize; self.n_players()];
        loop {
            out.push(ActionProfile::new(current.clone()));
            // Odometer increment, least-significant player last.
            let mut player = self.n_players();
            loop {
                if player == 0 {
                    return out;
                }
                player -= 1;
                current[player] += 1;
                if current[player] < self.n_actions(player) {
                    break;
                }
                current[player] = 0;
            }
        }
    }

    pub fn utility(&self, player: usize, profile: &ActionProfile) -> f64 {
        self.utilities[player][self.profile_index(profile.actions())]
    }

    pub fn utility_at(&self, player: usize, flat_index: usize) -> f64 {
        self.utilities[player][flat_index]
    }
}

/// Probability per action profile, aligned with the game's flat profile
/// order. Non-negative and summing to one within [`DIST_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, GameError> {
        if probs.is_empty() {
            return Err(GameError::DistributionShapeMismatch { got: 0, expected: 1 });
        }
        for &p in &probs {
            if p < 0.0 {
                return Err(GameError::NegativeProbability(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DIST_TOL {
            return Err(GameError::BadProbabilitySum(sum));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self { probs: vec![1.0 / n as f64; n] }
    }

    pub fn point_mass(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, flat_index: usize) -> f64 {
        self.probs[flat_index]
    }
}
