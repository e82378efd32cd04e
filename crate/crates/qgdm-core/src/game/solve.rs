use super::{ActionProfile, JointDistribution, NormalFormGame};

/// Whether expected utilities weight payoffs by joint profile probabilities
/// (the default) or renormalize within each of the player's actions.
///
/// With joint weighting, `EU_i(a_i)` is scaled by the marginal probability
/// of `a_i` itself; conditional normalization divides that scale back out.
/// The default stays with joint weighting; conditional mode exists for
/// sensitivity studies and is reachable from config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EuNormalization {
    #[default]
    Joint,
    Conditional,
}

/// Returns the strictly dominant action for `player`, if one exists:
/// the action whose payoff beats every alternative for *every* combination
/// of opponent actions. Strictness means at most one can qualify.
pub fn find_strictly_dominant(g: &NormalFormGame, player: usize) -> Option<usize> {
    assert!(player < g.n_players(), "player index out of range");
    let profiles = g.profiles();
    'candidate: for a_star in 0..g.n_actions(player) {
        for profile in &profiles {
            if profile.action(player) != a_star {
                continue;
            }
            let u_star = g.utility(player, profile);
            let mut deviant = profile.actions().to_vec();
            for a_other in 0..g.n_actions(player) {
                if a_other == a_star {
                    continue;
                }
                deviant[player] = a_other;
                if g.utility_at(player, g.profile_index(&deviant)) >= u_star {
                    continue 'candidate;
                }
            }
        }
        return Some(a_star);
    }
    None
}

/// All pure Nash equilibria, in lexicographic profile order: profiles where
/// no player can strictly gain by a unilateral deviation.
pub fn find_pure_nash(g: &NormalFormGame) -> Vec<ActionProfile> {
    g.profiles()
        .into_iter()
        .filter(|profile| {
            let mut deviant = profile.actions().to_vec();
            for player in 0..g.n_players() {
                let u_here = g.utility(player, profile);
                for a in 0..g.n_actions(player) {
                    if a == profile.action(player) {
                        continue;
                    }
                    deviant[player] = a;
                    if g.utility_at(player, g.profile_index(&deviant)) > u_here {
                        return false;
                    }
                }
                deviant[player] = profile.action(player);
            }
            true
        })
        .collect()
}

/// Expected utility of each of `player`'s actions under a joint profile
/// distribution: `EU_i(a_i) = sum over a_-i of p(a_i, a_-i) * u_i(a_i, a_-i)`.
///
/// The sum weights by *joint* probabilities, so an action's EU carries the
/// marginal probability of the action itself.
pub fn expected_utilities(g: &NormalFormGame, player: usize, dist: &JointDistribution) -> Vec<f64> {
    expected_utilities_with(g, player, dist, EuNormalization::Joint)
}

/// [`expected_utilities`] with an explicit normalization mode. In
/// conditional mode each action's EU is divided by the action's marginal
/// probability (zero marginal leaves the EU at zero).
pub fn expected_utilities_with(
    g: &NormalFormGame,
    player: usize,
    dist: &JointDistribution,
    normalization: EuNormalization,
) -> Vec<f64> {
    assert!(player < g.n_players(), "player index out of range");
    assert_eq!(dist.len(), g.n_profiles(), "distribution does not match game");
    let mut eu = vec![0.0; g.n_actions(player)];
    let mut marginal = vec![0.0; g.n_actions(player)];
    for (flat, profile) in g.profiles().iter().enumerate() {
        let a = profile.action(player);
        let p = dist.prob(flat);
        eu[a] += p * g.utility_at(player, flat);
        marginal[a] += p;
    }
    if normalization == EuNormalization::Conditional {
        for (e, m) in eu.iter_mut().zip(&marginal) {
            if *m > 0.0 {
                *e /= m;
            }
        }
    }
    eu
}

/// Argmax over expected utilities with deterministic tie-breaking: among the
/// maximizers, prefer `safe_action` if present, otherwise the lowest index.
pub fn select_action(eu: &[f64], safe_action: usize) -> usize {
    assert!(!eu.is_empty(), "expected-utility vector must be non-empty");
    let max = eu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if safe_action < eu.len() && eu[safe_action] == max {
        return safe_action;
    }
    eu.iter().position(|&v| v == max).expect("max came from this slice")
}
