//! Intelligent Driver Model longitudinal control.

use serde::{Deserialize, Serialize};

/// IDM parameters, "regular driver" flavored. `v0` is the desired speed and
/// is routinely overridden per vehicle; the rest are shared defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdmParams {
    /// Desired speed, m/s.
    pub v0: f64,
    /// Desired time headway, s.
    pub t_headway: f64,
    /// Jam distance, m.
    pub s0: f64,
    /// Maximum acceleration, m/s^2.
    pub a_max: f64,
    /// Comfortable braking deceleration, m/s^2 (positive).
    pub b_comfort: f64,
    /// Physical braking limit, m/s^2 (positive); output is clamped to
    /// `[-b_max, a_max]`.
    pub b_max: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self { v0: 25.0, t_headway: 1.5, s0: 2.0, a_max: 1.5, b_comfort: 2.0, b_max: 5.0 }
    }
}

impl IdmParams {
    /// Copy of these parameters with a different desired speed.
    pub fn with_v0(&self, v0: f64) -> Self {
        Self { v0, ..*self }
    }
}

/// IDM acceleration toward a leader `gap` meters ahead (bumper to bumper)
/// moving at `v_lead`. Pass `f64::INFINITY` for a free road.
///
/// ```text
/// a = a_max * [1 - (v/v0)^4 - (s*/gap)^2]
/// s* = s0 + v*T + v*(v - v_lead) / (2*sqrt(a_max*b))
/// ```
///
/// A non-positive gap means the leader is already overlapping: emergency
/// braking at `-b_max`.
pub fn idm_accel(gap: f64, v: f64, v_lead: f64, p: &IdmParams) -> f64 {
    if gap <= 0.0 {
        return -p.b_max;
    }
    let free = (v / p.v0).powi(4);
    let interaction = if gap.is_finite() {
        let s_star =
            p.s0 + v * p.t_headway + v * (v - v_lead) / (2.0 * (p.a_max * p.b_comfort).sqrt());
        // A closing-from-far leader can make s* negative; the desired gap
        // never drops below zero.
        (s_star.max(0.0) / gap).powi(2)
    } else {
        0.0
    };
    (p.a_max * (1.0 - free - interaction)).clamp(-p.b_max, p.a_max)
}
