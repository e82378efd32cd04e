use super::{find_pure_nash, JointDistribution, NormalFormGame, DIST_TOL};

/// Equal probability distribution: uniform over all action profiles.
pub fn epd_distribution(g: &NormalFormGame) -> JointDistribution {
    JointDistribution::uniform(g.n_profiles())
}

/// Uniform distribution over the pure Nash equilibria; falls back to the
/// equal probability distribution when no pure equilibrium exists.
pub fn nash_distribution(g: &NormalFormGame) -> JointDistribution {
    let nash = find_pure_nash(g);
    if nash.is_empty() {
        return epd_distribution(g);
    }
    let share = 1.0 / nash.len() as f64;
    let mut probs = vec![0.0; g.n_profiles()];
    for profile in &nash {
        probs[g.profile_index(profile.actions())] = share;
    }
    JointDistribution::new(probs).expect("uniform mass over equilibria is valid")
}

/// Mixed-strategy equilibrium distribution for 2-player games, computed by
/// support enumeration: for each equal-size support pair (smallest first,
/// lexicographic within a size), solve the opponent-indifference linear
/// system and accept the first solution whose probabilities are valid and
/// where no action outside the support earns more than the support value.
/// The joint distribution is the product of the two mixed strategies.
///
/// Three-player games, and games where enumeration finds nothing (possible
/// only through degeneracy, since singular systems are skipped), fall back
/// to the equal probability distribution.
pub fn mixed_strategy_distribution(g: &NormalFormGame) -> JointDistribution {
    if g.n_players() != 2 {
        return epd_distribution(g);
    }
    let (n1, n2) = (g.n_actions(0), g.n_actions(1));
    for size in 1..=n1.min(n2) {
        for s1 in combinations(n1, size) {
            for s2 in combinations(n2, size) {
                if let Some((x, y)) = solve_support_pair(g, &s1, &s2) {
                    let mut probs = vec![0.0; g.n_profiles()];
                    for (i, &a) in s1.iter().enumerate() {
                        for (j, &b) in s2.iter().enumerate() {
                            probs[g.profile_index(&[a, b])] = x[i] * y[j];
                        }
                    }
                    return JointDistribution::new(probs)
                        .expect("product of mixed strategies is valid");
                }
            }
        }
    }
    log::warn!("support enumeration found no mixed equilibrium; using EPD fallback");
    epd_distribution(g)
}

/// Attempts the support pair (s1 for player 0, s2 for player 1). Returns the
/// two mixed strategies over their supports on success.
fn solve_support_pair(g: &NormalFormGame, s1: &[usize], s2: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    // Player 1's mixture y over s2 must make player 0 indifferent across s1;
    // the accepted pair must also survive the outside-deviation check.
    let u1 = |a: usize, b: usize| g.utility_at(0, g.profile_index(&[a, b]));
    let u2 = |a: usize, b: usize| g.utility_at(1, g.profile_index(&[a, b]));

    let (y, v1) = solve_indifference(s1, s2, &u1)?;
    let (x, v2) = solve_indifference(s2, s1, &|b, a| u2(a, b))?;

    // No action outside a support may beat the support's value.
    for a in 0..g.n_actions(0) {
        if s1.contains(&a) {
            continue;
        }
        let eu: f64 = s2.iter().zip(&y).map(|(&b, &p)| p * u1(a, b)).sum();
        if eu > v1 + DIST_TOL {
            return None;
        }
    }
    for b in 0..g.n_actions(1) {
        if s2.contains(&b) {
            continue;
        }
        let eu: f64 = s1.iter().zip(&x).map(|(&a, &p)| p * u2(a, b)).sum();
        if eu > v2 + DIST_TOL {
            return None;
        }
    }
    Some((x, y))
}

/// Solves for a mixture over `own_support` of the *column* player that makes
/// the *row* player indifferent across `row_support`, where `u(row, col)` is
/// the row player's payoff. Returns the mixture and the indifference value.
///
/// The system has `k` unknowns for the mixture plus the value `v`:
/// `sum_j u(a, j) y_j - v = 0` for each row action, and `sum_j y_j = 1`.
fn solve_indifference(
    row_support: &[usize],
    own_support: &[usize],
    u: &dyn Fn(usize, usize) -> f64,
) -> Option<(Vec<f64>, f64)> {
    let k = own_support.len();
    debug_assert_eq!(row_support.len(), k, "supports must have equal size");
    let n = k + 1;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (row, &ra) in row_support.iter().enumerate() {
        for (col, &ca) in own_support.iter().enumerate() {
            a[row][col] = u(ra, ca);
        }
        a[row][k] = -1.0; // the value v
    }
    for col in 0..k {
        a[k][col] = 1.0; // mixture sums to one
    }
    b[k] = 1.0;

    let solution = gaussian_solve(&mut a, &mut b)?;
    let (mix, v) = (&solution[..k], solution[k]);
    // Reject mixtures outside the simplex (tiny negative roundoff is
    // clamped; anything worse means this support has no equilibrium).
    if mix.iter().any(|&p| p < -DIST_TOL) {
        return None;
    }
    let mut mix: Vec<f64> = mix.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = mix.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return None;
    }
    for p in &mut mix {
        *p /= total;
    }
    Some((mix, v))
}

/// Gaussian elimination with partial pivoting on an `n x n` system.
/// Returns `None` for (numerically) singular systems.
fn gaussian_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc -= a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// All k-subsets of `0..n` in lexicographic order. `n` is at most 3 here,
/// so a simple recursive build is plenty.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in start..n {
            prefix.push(i);
            go(i + 1, n, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
