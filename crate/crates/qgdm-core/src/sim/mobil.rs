//! MOBIL lane-change criterion (Minimizing Overall Braking Induced by Lane
//! changes), evaluated on precomputed IDM accelerations.
//!
//! The world supplies the six accelerations (self, new follower, old
//! follower — each before/after the hypothetical change); this module is
//! just the safety and incentive inequalities, which keeps it trivially
//! testable.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilParams {
    /// Politeness factor weighting other drivers' gains.
    pub politeness: f64,
    /// Safety limit: the new follower may not be forced to brake harder
    /// than this (m/s^2, positive).
    pub b_safe: f64,
    /// Incentive threshold the weighted gain must strictly exceed, m/s^2.
    pub threshold: f64,
}

impl Default for MobilParams {
    fn default() -> Self {
        Self { politeness: 0.3, b_safe: 4.0, threshold: 0.2 }
    }
}

/// IDM accelerations before and after a hypothetical lane change. "New"
/// follower is in the target lane, "old" follower in the current lane.
/// Vehicles that don't exist contribute no change (set both fields equal,
/// e.g. zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilAssessment {
    pub own_now: f64,
    pub own_after: f64,
    pub new_follower_now: f64,
    pub new_follower_after: f64,
    pub old_follower_now: f64,
    pub old_follower_after: f64,
}

/// True when the change is both safe for the new follower and worth it:
///
/// ```text
/// own_after - own_now
///   + politeness * ((nf_after - nf_now) + (of_after - of_now)) > threshold
/// ```
///
/// The incentive inequality is strict, so a marginal gain exactly at the
/// threshold stays in lane.
pub fn mobil_decide(a: &MobilAssessment, p: &MobilParams) -> bool {
    if a.new_follower_after < -p.b_safe {
        return false;
    }
    let own_gain = a.own_after - a.own_now;
    let others_gain =
        (a.new_follower_after - a.new_follower_now) + (a.old_follower_after - a.old_follower_now);
    own_gain + p.politeness * others_gain > p.threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assessment() -> MobilAssessment {
        MobilAssessment {
            own_now: 0.0,
            own_after: 0.0,
            new_follower_now: 0.0,
            new_follower_after: 0.0,
            old_follower_now: 0.0,
            old_follower_after: 0.0,
        }
    }

    #[test]
    fn blocked_lane_with_empty_target_changes() {
        // Braking hard behind a slow leader; target lane free.
        let a = MobilAssessment { own_now: -2.0, own_after: 1.0, ..assessment() };
        assert!(mobil_decide(&a, &MobilParams::default()));
    }

    #[test]
    fn occupied_alongside_fails_safety() {
        // Squeezing in on top of someone forces emergency braking on them.
        let a = MobilAssessment {
            own_now: -2.0,
            own_after: 1.5,
            new_follower_after: -5.0,
            ..assessment()
        };
        assert!(!mobil_decide(&a, &MobilParams::default()));
    }

    #[test]
    fn incentive_exactly_at_threshold_stays_in_lane() {
        let p = MobilParams::default();
        let a = MobilAssessment { own_after: p.threshold, ..assessment() };
        assert!(!mobil_decide(&a, &p));
        let slightly_more = MobilAssessment { own_after: p.threshold + 1e-9, ..assessment() };
        assert!(mobil_decide(&slightly_more, &p));
    }

    #[test]
    fn politeness_weighs_follower_losses() {
        // Own gain 0.5; new follower loses 2.0. With politeness 0.3 the
        // weighted sum is 0.5 - 0.6 = -0.1 < threshold: no change. An
        // egoistic driver (politeness 0) goes.
        let a = MobilAssessment {
            own_after: 0.5,
            new_follower_now: -0.5,
            new_follower_after: -2.5,
            ..assessment()
        };
        assert!(!mobil_decide(&a, &MobilParams::default()));
        let egoistic = MobilParams { politeness: 0.0, ..MobilParams::default() };
        assert!(mobil_decide(&a, &egoistic));
    }
}
