//! Planar vectors, poses, and arc-length-parameterized driving paths.
//!
//! A path is a chain of line and circular-arc segments queried by arc
//! length. Closed paths (the roundabout ring) wrap; open paths clamp to
//! their endpoints.

use std::ops::{Add, Mul, Sub};

use serde::Serialize;

/// 2D vector / point, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn unit(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    /// This vector rotated 90 degrees counterclockwise (the "left" normal).
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Position plus heading (radians, counterclockwise from +x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub pos: Vec2,
    pub heading: f64,
}

/// One path piece.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Line { start: Vec2, end: Vec2 },
    /// Circular arc from `start_angle`, sweeping `sweep` radians
    /// (counterclockwise when positive). Headings are tangent.
    Arc { center: Vec2, radius: f64, start_angle: f64, sweep: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end } => start.dist(*end),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Pose at arc length `s` into the segment; `s` must be in `[0, length]`.
    fn pose_at(&self, s: f64) -> Pose {
        match self {
            Segment::Line { start, end } => {
                let dir = *end - *start;
                let len = dir.norm();
                let unit = dir * (1.0 / len);
                Pose { pos: *start + unit * s, heading: unit.y.atan2(unit.x) }
            }
            Segment::Arc { center, radius, start_angle, sweep } => {
                let angle = start_angle + sweep.signum() * s / radius;
                let radial = Vec2::unit(angle);
                let tangent_sign = if *sweep >= 0.0 { 1.0 } else { -1.0 };
                Pose {
                    pos: *center + radial * *radius,
                    heading: (angle + tangent_sign * std::f64::consts::FRAC_PI_2)
                        .rem_euclid(std::f64::consts::TAU),
                }
            }
        }
    }
}

/// A chain of segments addressed by cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    segments: Vec<Segment>,
    /// `cumulative[i]` = arc length at the *end* of segment `i`.
    cumulative: Vec<f64>,
    closed: bool,
}

impl Path {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Self {
        assert!(!segments.is_empty(), "a path needs at least one segment");
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut total = 0.0;
        for seg in &segments {
            let len = seg.length();
            assert!(len > 0.0, "zero-length segment");
            total += len;
            cumulative.push(total);
        }
        Self { segments, cumulative, closed }
    }

    pub fn line(start: Vec2, end: Vec2) -> Self {
        Self::new(vec![Segment::Line { start, end }], false)
    }

    /// Closed counterclockwise circle starting (s = 0) at `start_angle`.
    pub fn circle(center: Vec2, radius: f64, start_angle: f64) -> Self {
        Self::new(
            vec![Segment::Arc { center, radius, start_angle, sweep: std::f64::consts::TAU }],
            true,
        )
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Pose at arc length `s`. Closed paths wrap `s` modulo the length;
    /// open paths clamp to the endpoints.
    pub fn pose(&self, s: f64) -> Pose {
        let len = self.length();
        let s = if self.closed { s.rem_euclid(len) } else { s.clamp(0.0, len) };
        // Find the segment containing s (paths have <= 3 segments; linear
        // scan beats anything clever).
        let mut start = 0.0;
        for (seg, &end) in self.segments.iter().zip(&self.cumulative) {
            if s <= end || std::ptr::eq(seg, self.segments.last().unwrap()) {
                return seg.pose_at((s - start).clamp(0.0, seg.length()));
            }
            start = end;
        }
        unreachable!("arc length {s} not located in path of length {len}");
    }

    /// Pose at arc length `s`, displaced `lateral` meters along the local
    /// left normal (positive = left of travel direction).
    pub fn pose_with_offset(&self, s: f64, lateral: f64) -> Pose {
        let base = self.pose(s);
        if lateral == 0.0 {
            return base;
        }
        let left = Vec2::unit(base.heading).perp();
        Pose { pos: base.pos + left * lateral, heading: base.heading }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    use super::*;

    #[test]
    fn line_pose_advances_linearly() {
        let p = Path::line(Vec2::new(0.0, -20.0), Vec2::new(50.0, -20.0));
        assert_eq!(p.length(), 50.0);
        let pose = p.pose(30.0);
        assert!((pose.pos.x - 30.0).abs() < 1e-12);
        assert!((pose.pos.y + 20.0).abs() < 1e-12);
        assert!(pose.heading.abs() < 1e-12);
    }

    #[test]
    fn open_path_clamps_and_closed_path_wraps() {
        let line = Path::line(Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0));
        assert!((line.pose(25.0).pos.x - 10.0).abs() < 1e-12);
        assert!((line.pose(-5.0).pos.x).abs() < 1e-12);

        let ring = Path::circle(Vec2::new(0.0, 0.0), 20.0, -FRAC_PI_2);
        let circumference = TAU * 20.0;
        assert!((ring.length() - circumference).abs() < 1e-9);
        let wrapped = ring.pose(circumference + 1.0);
        let direct = ring.pose(1.0);
        assert!(wrapped.pos.dist(direct.pos) < 1e-9);
    }

    #[test]
    fn circle_pose_and_tangent_heading() {
        // CCW ring of radius 20 starting at the bottom (angle -pi/2): at
        // s = 0 the car sits at (0, -20) heading +x; a quarter turn later it
        // sits at (20, 0) heading +y.
        let ring = Path::circle(Vec2::new(0.0, 0.0), 20.0, -FRAC_PI_2);
        let bottom = ring.pose(0.0);
        assert!(bottom.pos.dist(Vec2::new(0.0, -20.0)) < 1e-12);
        assert!(bottom.heading.abs() < 1e-12 || (bottom.heading - TAU).abs() < 1e-9);

        let quarter = ring.pose(20.0 * FRAC_PI_2);
        assert!(quarter.pos.dist(Vec2::new(20.0, 0.0)) < 1e-9);
        assert!((quarter.heading - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn clockwise_arc_heads_the_other_way() {
        let arc = Path::new(
            vec![Segment::Arc {
                center: Vec2::new(0.0, 0.0),
                radius: 10.0,
                start_angle: 0.0,
                sweep: -PI,
            }],
            false,
        );
        let start = arc.pose(0.0);
        assert!(start.pos.dist(Vec2::new(10.0, 0.0)) < 1e-12);
        // Clockwise travel at angle 0 means heading -y.
        assert!((start.heading - 3.0 * FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn multi_segment_chain_is_continuous() {
        // Straight approach that joins the ring tangentially at the bottom.
        let approach_end = Vec2::new(0.0, -20.0);
        let path = Path::new(
            vec![
                Segment::Line { start: Vec2::new(-50.0, -20.0), end: approach_end },
                Segment::Arc {
                    center: Vec2::new(0.0, 0.0),
                    radius: 20.0,
                    start_angle: -FRAC_PI_2,
                    sweep: PI,
                },
            ],
            false,
        );
        assert!((path.length() - (50.0 + 20.0 * PI)).abs() < 1e-9);
        // Poses just before and after the joint nearly coincide.
        let before = path.pose(50.0 - 1e-6);
        let after = path.pose(50.0 + 1e-6);
        assert!(before.pos.dist(after.pos) < 1e-4);
        assert!((before.heading - after.heading).abs() < 1e-4);
    }

    #[test]
    fn lateral_offset_displaces_left_of_heading() {
        let p = Path::line(Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0));
        let offset = p.pose_with_offset(5.0, 2.0);
        // Heading +x, left is +y.
        assert!((offset.pos.y - 2.0).abs() < 1e-12);
        let neg = p.pose_with_offset(5.0, -3.5);
        assert!((neg.pos.y + 3.5).abs() < 1e-12);
    }
}
