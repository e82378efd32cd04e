//! Per-episode statistics and their corpus-level aggregation into the
//! reported table metrics.

use serde::Serialize;

use super::episode::TraceRecord;
use super::Outcome;

/// Raw accumulators gathered while an episode runs. Sums are over physics
/// substeps (ego only) or over ego decision rounds, as noted.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EpisodeStats {
    /// Sum of ego speed over substeps, m/s.
    pub v_sum: f64,
    /// Sum of |ego acceleration| over substeps, m/s^2.
    pub a_abs_sum: f64,
    pub step_count: u64,
    /// Sum of capped center-to-center headway distance over substeps, m.
    pub hd_sum: f64,
    pub hd_count: u64,
    /// Highway maneuver counts over ego decision rounds.
    pub cll: u64,
    pub clr: u64,
    pub kl: u64,
    /// Ego decision rounds taken.
    pub decisions: u64,
    /// Decision latency accumulators (zero when latency recording is off).
    pub lat_sum_ms: f64,
    pub lat_max_ms: f64,
}

/// Everything one episode produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    /// The ego-involved colliding pair when the outcome is a collision.
    pub collision: Option<(crate::sim::VehicleId, crate::sim::VehicleId)>,
    /// Simulated episode duration, s (never beyond the timeout).
    pub duration: f64,
    pub stats: EpisodeStats,
    /// One record per ego decision when tracing is enabled, else empty.
    pub trace: Vec<TraceRecord>,
}

/// The reported aggregate row for one (scenario, policy) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateMetrics {
    pub episodes: u64,
    /// Percentage of episodes ending in a collision.
    pub cr_pct: f64,
    /// Percentage of episodes completing without collision or getting stuck.
    pub sr_pct: f64,
    pub n_col: u64,
    /// Mean headway distance to the vehicle ahead in lane, m (capped at
    /// sensor range when none).
    pub hd_m: f64,
    /// Mean ego speed over all substeps, m/s.
    pub v_mean: f64,
    /// Mean |ego acceleration| over all substeps, m/s^2.
    pub a_mean: f64,
    /// Mean episode duration, s.
    pub t_mean: f64,
    /// Maneuver proportions over ego decisions, % (highway; zero elsewhere).
    pub rho_cll: f64,
    pub rho_clr: f64,
    pub rho_kl: f64,
    pub lat_mean_ms: f64,
    pub lat_max_ms: f64,
}

/// Pool episode results into one aggregate row. Panics on an empty batch.
pub fn compute_metrics(results: &[EpisodeResult]) -> AggregateMetrics {
    assert!(!results.is_empty(), "no episodes to aggregate");
    let episodes = results.len() as u64;
    let n_col = results.iter().filter(|r| r.outcome == Outcome::Collision).count() as u64;
    let n_success = results.iter().filter(|r| r.outcome == Outcome::Success).count() as u64;

    let mut s = EpisodeStats::default();
    let mut t_sum = 0.0;
    for r in results {
        t_sum += r.duration;
        s.v_sum += r.stats.v_sum;
        s.a_abs_sum += r.stats.a_abs_sum;
        s.step_count += r.stats.step_count;
        s.hd_sum += r.stats.hd_sum;
        s.hd_count += r.stats.hd_count;
        s.cll += r.stats.cll;
        s.clr += r.stats.clr;
        s.kl += r.stats.kl;
        s.decisions += r.stats.decisions;
        s.lat_sum_ms += r.stats.lat_sum_ms;
        s.lat_max_ms = s.lat_max_ms.max(r.stats.lat_max_ms);
    }

    let pct = |count: u64| count as f64 / episodes as f64 * 100.0;
    let mean = |sum: f64, count: u64| if count > 0 { sum / count as f64 } else { 0.0 };
    let lane_decisions = s.cll + s.clr + s.kl;

    AggregateMetrics {
        episodes,
        cr_pct: pct(n_col),
        sr_pct: pct(n_success),
        n_col,
        hd_m: mean(s.hd_sum, s.hd_count),
        v_mean: mean(s.v_sum, s.step_count),
        a_mean: mean(s.a_abs_sum, s.step_count),
        t_mean: t_sum / episodes as f64,
        rho_cll: mean(s.cll as f64 * 100.0, lane_decisions),
        rho_clr: mean(s.clr as f64 * 100.0, lane_decisions),
        rho_kl: mean(s.kl as f64 * 100.0, lane_decisions),
        lat_mean_ms: mean(s.lat_sum_ms, s.decisions),
        lat_max_ms: s.lat_max_ms,
    }
}
