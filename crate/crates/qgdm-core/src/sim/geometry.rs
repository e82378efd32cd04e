//! Road layouts for the three scenario families.
//!
//! Each layout is a table of arc-length-parameterized paths plus the
//! scenario-specific landmarks (entry points, lane adjacency, goals) that
//! the runner and policies need. Dimensions are project defaults chosen to
//! make the intended conflicts geometrically realizable.

use std::f64::consts::{FRAC_PI_2, PI};

use super::path::{Path, Segment, Vec2};

/// Single circulating lane radius of the roundabout, m.
pub const RING_RADIUS: f64 = 20.0;
/// Angle between the roundabout's entry/exit legs and the ring tangent at
/// the joint point, rad. A vehicle holding a few metres short of the joint
/// on an angled leg sits clear of circulating bodies; a tangent leg would
/// leave it inside their swept band.
pub const ROUNDABOUT_LEG_ANGLE: f64 = 40.0 * PI / 180.0;
/// Lane width used by the merging and highway layouts, m.
pub const LANE_WIDTH: f64 = 3.5;
/// Main-carriageway length of the merging layout, m.
pub const MERGE_MAIN_LENGTH: f64 = 400.0;
/// Acceleration-lane length of the merging layout, m.
pub const MERGE_ACCEL_LENGTH: f64 = 150.0;
/// Highway segment length, m.
pub const HIGHWAY_LENGTH: f64 = 1000.0;
/// Reaching this x on the highway counts as completing the episode.
pub const HIGHWAY_SUCCESS_X: f64 = 950.0;
/// Number of highway lanes.
pub const HIGHWAY_LANES: usize = 4;

/// Scenario-specific landmark data alongside the shared path table.
#[derive(Debug, Clone)]
pub enum GeometryKind {
    Roundabout {
        /// Closed circulating lane.
        ring_path: usize,
        /// Ego route: approach, half circulation, exit.
        ego_path: usize,
        ring_radius: f64,
        /// Ego-route arc length where the route joins the ring.
        entry_ego_s: f64,
        /// Ego-route arc length where the route leaves the ring.
        exit_ego_s: f64,
        /// Ring arc length of the joint point (the conflict point).
        entry_ring_s: f64,
        /// Ego-route arc length at which the episode succeeds.
        success_ego_s: f64,
    },
    Merging {
        main_path: usize,
        accel_path: usize,
        lane_width: f64,
        /// Arc length at which the acceleration lane ends.
        accel_end: f64,
    },
    Highway {
        /// `lane_paths[lane]` is the path index of that lane's centerline;
        /// lane 0 is the rightmost (lowest y).
        lane_paths: [usize; HIGHWAY_LANES],
        lane_width: f64,
        length: f64,
        /// Ego x (= path arc length) at which the episode succeeds.
        success_x: f64,
    },
}

/// A complete road layout: paths, per-path hard speed caps, landmarks.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub paths: Vec<Path>,
    /// Hard clamp on speed for vehicles traveling each path, m/s.
    pub speed_caps: Vec<f64>,
    pub kind: GeometryKind,
}

impl Geometry {
    /// Single-lane roundabout. The ring is a counterclockwise circle with
    /// s = 0 at its bottom point, which is exactly where the ego's angled
    /// approach joins it; the ego circulates half the ring and exits left
    /// on an equally angled leg.
    pub fn roundabout() -> Self {
        let center = Vec2::new(0.0, 0.0);
        let ring = Path::circle(center, RING_RADIUS, -FRAC_PI_2);
        let approach_len = 50.0;
        let half_ring = PI * RING_RADIUS;
        let exit_len = 40.0;
        let entry_point = Vec2::new(0.0, -RING_RADIUS);
        let exit_point = Vec2::new(0.0, RING_RADIUS);
        // Travel direction along the approach (up-right into the joint)
        // and away down the exit (up-left out of it), both tilted off the
        // ring tangent by the leg angle.
        let entry_dir =
            Vec2::new(ROUNDABOUT_LEG_ANGLE.cos(), ROUNDABOUT_LEG_ANGLE.sin());
        let exit_dir =
            Vec2::new(-ROUNDABOUT_LEG_ANGLE.cos(), ROUNDABOUT_LEG_ANGLE.sin());
        let ego = Path::new(
            vec![
                Segment::Line {
                    start: entry_point - entry_dir * approach_len,
                    end: entry_point,
                },
                Segment::Arc {
                    center,
                    radius: RING_RADIUS,
                    start_angle: -FRAC_PI_2,
                    sweep: PI,
                },
                Segment::Line {
                    start: exit_point,
                    end: exit_point + exit_dir * exit_len,
                },
            ],
            false,
        );
        let ego_len = ego.length();
        Self {
            paths: vec![ring, ego],
            speed_caps: vec![11.0, 12.0],
            kind: GeometryKind::Roundabout {
                ring_path: 0,
                ego_path: 1,
                ring_radius: RING_RADIUS,
                entry_ego_s: approach_len,
                exit_ego_s: approach_len + half_ring,
                entry_ring_s: 0.0,
                success_ego_s: ego_len - 5.0,
            },
        }
    }

    /// One main lane plus a parallel acceleration lane one lane width to
    /// its right. Both start at x = 0 so arc lengths agree across lanes.
    pub fn merging() -> Self {
        let main = Path::line(Vec2::new(0.0, 0.0), Vec2::new(MERGE_MAIN_LENGTH, 0.0));
        let accel = Path::line(
            Vec2::new(0.0, -LANE_WIDTH),
            Vec2::new(MERGE_ACCEL_LENGTH, -LANE_WIDTH),
        );
        Self {
            paths: vec![main, accel],
            speed_caps: vec![20.0, 15.0],
            kind: GeometryKind::Merging {
                main_path: 0,
                accel_path: 1,
                lane_width: LANE_WIDTH,
                accel_end: MERGE_ACCEL_LENGTH,
            },
        }
    }

    /// Straight four-lane highway; lane `i` runs along y = i·lane width,
    /// so "left" (increasing lane index) is increasing y.
    pub fn highway() -> Self {
        let mut paths = Vec::with_capacity(HIGHWAY_LANES);
        for lane in 0..HIGHWAY_LANES {
            let y = lane as f64 * LANE_WIDTH;
            paths.push(Path::line(Vec2::new(0.0, y), Vec2::new(HIGHWAY_LENGTH, y)));
        }
        Self {
            paths,
            speed_caps: vec![30.0; HIGHWAY_LANES],
            kind: GeometryKind::Highway {
                lane_paths: [0, 1, 2, 3],
                lane_width: LANE_WIDTH,
                length: HIGHWAY_LENGTH,
                success_x: HIGHWAY_SUCCESS_X,
            },
        }
    }

    pub fn path(&self, index: usize) -> &Path {
        &self.paths[index]
    }

    pub fn speed_cap(&self, path: usize) -> f64 {
        self.speed_caps[path]
    }

    /// Highway only: the lane index a path represents.
    pub fn lane_of_path(&self, path: usize) -> Option<usize> {
        match &self.kind {
            GeometryKind::Highway { lane_paths, .. } => {
                lane_paths.iter().position(|&p| p == path)
            }
            _ => None,
        }
    }
}

/// Neighboring highway lanes: (left, right) of `lane`, i.e. toward higher
/// and lower indices, `None` past the road edge.
pub fn highway_neighbors(lane: usize) -> (Option<usize>, Option<usize>) {
    let left = if lane + 1 < HIGHWAY_LANES { Some(lane + 1) } else { None };
    let right = if lane > 0 { Some(lane - 1) } else { None };
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundabout_legs_meet_the_ring_at_the_leg_angle() {
        let geo = Geometry::roundabout();
        let GeometryKind::Roundabout { ring_path, ego_path, entry_ego_s, entry_ring_s, .. } =
            geo.kind
        else {
            panic!("wrong kind");
        };
        let on_ego = geo.path(ego_path).pose(entry_ego_s - 1e-6);
        let on_ring = geo.path(ring_path).pose(entry_ring_s);
        assert!(geo.path(ego_path).pose(entry_ego_s).pos.dist(on_ring.pos) < 1e-9);
        let heading_gap = (on_ego.heading - on_ring.heading)
            .rem_euclid(std::f64::consts::TAU)
            .min((on_ring.heading - on_ego.heading).rem_euclid(std::f64::consts::TAU));
        assert!(
            (heading_gap - ROUNDABOUT_LEG_ANGLE).abs() < 1e-6,
            "heading gap {heading_gap}"
        );
    }

    #[test]
    fn holding_short_of_the_joint_clears_circulating_bodies() {
        // A vehicle stopped on the approach with its nose 5 m short of the
        // joint point must not be touchable by any circulating body — that
        // is the whole point of the angled leg.
        use crate::sim::{corners_at, rects_collide, VEHICLE_LENGTH};
        let geo = Geometry::roundabout();
        let GeometryKind::Roundabout { ring_path, ego_path, entry_ego_s, .. } = geo.kind
        else {
            panic!("wrong kind");
        };
        let nose_back = 5.0 + VEHICLE_LENGTH / 2.0;
        let held = corners_at(geo.path(ego_path).pose(entry_ego_s - nose_back));
        let ring = geo.path(ring_path);
        let steps = 1000;
        for i in 0..steps {
            let s = ring.length() * i as f64 / steps as f64;
            let body = corners_at(ring.pose(s));
            assert!(
                !rects_collide(&held, &body),
                "circulating body at ring s = {s} clips the held vehicle"
            );
        }
    }

    #[test]
    fn ego_arc_coincides_with_the_ring_for_half_a_turn() {
        let geo = Geometry::roundabout();
        let GeometryKind::Roundabout { ring_path, ego_path, entry_ego_s, exit_ego_s, .. } =
            geo.kind
        else {
            panic!("wrong kind");
        };
        let half = exit_ego_s - entry_ego_s;
        assert!((half - PI * RING_RADIUS).abs() < 1e-9);
        for i in 0..=8 {
            let d = half * i as f64 / 8.0;
            let a = geo.path(ego_path).pose(entry_ego_s + d);
            let b = geo.path(ring_path).pose(d);
            assert!(a.pos.dist(b.pos) < 1e-9, "diverges at d = {d}");
        }
    }

    #[test]
    fn ring_circumference_and_wrapping() {
        let geo = Geometry::roundabout();
        let ring = geo.path(0);
        assert!((ring.length() - std::f64::consts::TAU * RING_RADIUS).abs() < 1e-9);
        assert!(ring.is_closed());
        let a = ring.pose(5.0);
        let b = ring.pose(5.0 + ring.length());
        assert!(a.pos.dist(b.pos) < 1e-9);
    }

    #[test]
    fn merging_accel_lane_is_one_width_right_of_main() {
        let geo = Geometry::merging();
        let GeometryKind::Merging { main_path, accel_path, lane_width, accel_end } = geo.kind
        else {
            panic!("wrong kind");
        };
        for s in [0.0, 40.0, accel_end] {
            let shifted = geo.path(main_path).pose_with_offset(s, -lane_width);
            let on_accel = geo.path(accel_path).pose(s.min(accel_end));
            assert!(shifted.pos.dist(on_accel.pos) < 1e-9);
        }
    }

    #[test]
    fn highway_lanes_stack_leftward_in_y() {
        let geo = Geometry::highway();
        for lane in 0..HIGHWAY_LANES {
            let GeometryKind::Highway { lane_paths, .. } = geo.kind else { panic!() };
            let pose = geo.path(lane_paths[lane]).pose(100.0);
            assert!((pose.pos.y - lane as f64 * LANE_WIDTH).abs() < 1e-12);
            assert!((pose.pos.x - 100.0).abs() < 1e-12);
            assert_eq!(geo.lane_of_path(lane_paths[lane]), Some(lane));
        }
    }

    #[test]
    fn highway_edge_lanes_lose_one_neighbor() {
        assert_eq!(highway_neighbors(0), (Some(1), None));
        assert_eq!(highway_neighbors(1), (Some(2), Some(0)));
        assert_eq!(highway_neighbors(3), (None, Some(2)));
    }
}
