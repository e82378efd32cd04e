//! World state and physics: per-substep integration, leader/follower
//! queries, MOBIL lane-change ticks, and oriented-rectangle collision
//! detection.

use super::geometry::{highway_neighbors, Geometry, GeometryKind};
use super::idm::{idm_accel, IdmParams};
use super::mobil::{mobil_decide, MobilAssessment, MobilParams};
use super::path::Vec2;
use super::vehicle::{corners_at, Controller, LaneChange, Vehicle, VehicleId};
use super::{BROAD_PHASE_RADIUS, CONTACT_TOL};

/// A leader seen by a follower: bumper-to-bumper gap and leader speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leader {
    pub gap: f64,
    pub speed: f64,
    pub id: VehicleId,
}

/// Complete simulation state for one episode. Vehicles are stored in id
/// order and never removed; departed vehicles stay as inert records.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub geometry: Geometry,
    pub vehicles: Vec<Vehicle>,
    /// Simulated time since episode start, s.
    pub time: f64,
    pub ego: VehicleId,
    /// Designated interacting vehicles (empty on the highway, where the
    /// opponent is re-chosen every decision round).
    pub fixed_ivs: Vec<VehicleId>,
    pub idm: IdmParams,
    pub mobil: MobilParams,
}

impl WorldState {
    pub fn new(
        geometry: Geometry,
        vehicles: Vec<Vehicle>,
        ego: VehicleId,
        fixed_ivs: Vec<VehicleId>,
    ) -> Self {
        for (i, v) in vehicles.iter().enumerate() {
            assert_eq!(v.id.0 as usize, i, "vehicles must be stored in id order");
        }
        Self {
            geometry,
            vehicles,
            time: 0.0,
            ego,
            fixed_ivs,
            idm: IdmParams::default(),
            mobil: MobilParams::default(),
        }
    }

    pub fn vehicle(&self, id: VehicleId) -> &Vehicle {
        &self.vehicles[id.0 as usize]
    }

    pub fn vehicle_mut(&mut self, id: VehicleId) -> &mut Vehicle {
        &mut self.vehicles[id.0 as usize]
    }

    /// Whether the vehicle occupies `path` for traffic queries: its target
    /// path, or the lane it is still leaving during a change.
    fn occupies(v: &Vehicle, path: usize) -> bool {
        v.path == path || v.lane_change.is_some_and(|lc| lc.from_path == path)
    }

    /// Nearest vehicle strictly ahead of vehicle `i` on `path`, comparing
    /// shared arc-length coordinates (closed paths wrap forward).
    pub fn leader_of(&self, i: usize, path: usize) -> Option<Leader> {
        let me = &self.vehicles[i];
        let path_obj = self.geometry.path(path);
        let mut best: Option<(f64, &Vehicle)> = None;
        for (j, other) in self.vehicles.iter().enumerate() {
            if j == i || !other.is_active() || !Self::occupies(other, path) {
                continue;
            }
            let raw = other.s - me.s;
            let ahead = if path_obj.is_closed() {
                let d = raw.rem_euclid(path_obj.length());
                if d <= 0.0 {
                    continue;
                }
                d
            } else {
                if raw <= 0.0 {
                    continue;
                }
                raw
            };
            if best.is_none_or(|(b, _)| ahead < b) {
                best = Some((ahead, other));
            }
        }
        best.map(|(ahead, other)| Leader {
            gap: ahead - me.half_length() - other.half_length(),
            speed: other.speed,
            id: other.id,
        })
    }

    /// Nearest vehicle strictly behind vehicle `i` on `path`.
    pub fn follower_of(&self, i: usize, path: usize) -> Option<usize> {
        let me = &self.vehicles[i];
        let path_obj = self.geometry.path(path);
        let mut best: Option<(f64, usize)> = None;
        for (j, other) in self.vehicles.iter().enumerate() {
            if j == i || !other.is_active() || !Self::occupies(other, path) {
                continue;
            }
            let raw = me.s - other.s;
            let behind = if path_obj.is_closed() {
                let d = raw.rem_euclid(path_obj.length());
                if d <= 0.0 {
                    continue;
                }
                d
            } else {
                if raw <= 0.0 {
                    continue;
                }
                raw
            };
            if best.is_none_or(|(b, _)| behind < b) {
                best = Some((behind, j));
            }
        }
        best.map(|(_, j)| j)
    }

    fn idm_toward(&self, i: usize, leader: Option<(f64, f64)>) -> f64 {
        let v = &self.vehicles[i];
        let p = self.idm.with_v0(v.v_desired);
        match leader {
            Some((gap, speed)) => idm_accel(gap, v.speed, speed, &p),
            None => idm_accel(f64::INFINITY, v.speed, v.speed, &p),
        }
    }

    fn idm_on_path(&self, i: usize, path: usize) -> f64 {
        self.idm_toward(i, self.leader_of(i, path).map(|l| (l.gap, l.speed)))
    }

    /// IDM acceleration for vehicle `i`, honoring both lanes while a change
    /// is in progress (the more cautious of the two).
    pub fn idm_accel_for(&self, i: usize) -> f64 {
        let v = &self.vehicles[i];
        let mut a = self.idm_on_path(i, v.path);
        if let Some(lc) = v.lane_change {
            a = a.min(self.idm_on_path(i, lc.from_path));
        }
        a
    }

    /// Longitudinal command for one substep. Held commands (the ego outside
    /// the highway, random interacting vehicles) pass through unchanged —
    /// except that random vehicles keep a physical collision guard toward
    /// their in-lane leader; IDM-driven vehicles — and the highway ego,
    /// whose longitudinal control is always delegated to IDM — are
    /// recomputed each substep.
    fn controller_accel(&self, i: usize) -> f64 {
        let v = &self.vehicles[i];
        if v.crashed {
            return 0.0;
        }
        match v.controller {
            Controller::EgoPolicy => {
                if matches!(self.geometry.kind, GeometryKind::Highway { .. }) {
                    self.idm_accel_for(i)
                } else {
                    v.accel
                }
            }
            Controller::IdmMobil => self.idm_accel_for(i),
            Controller::RandomIv => v.accel.min(self.guard_accel(i)),
        }
    }

    /// Collision guard applied on top of a held random command: however
    /// aggressive the drawn action, a driver still brakes for the vehicle
    /// directly ahead in their lane. Computed as the IDM interaction law
    /// with the free-road term saturated, so it only ever lowers the
    /// command, and only reacts to in-lane leaders — crossing traffic and
    /// vehicles still short of the lane are nobody's responsibility here.
    fn guard_accel(&self, i: usize) -> f64 {
        let me = &self.vehicles[i];
        let mut nearest: Option<(f64, f64)> =
            self.leader_of(i, me.path).map(|l| (l.gap, l.speed));
        // On the roundabout the ego rides its own route path whose middle
        // arc overlays the ring, so ring traffic must treat an inserted
        // ego as its leader even though the path indices differ.
        if let GeometryKind::Roundabout {
            ring_path, entry_ego_s, exit_ego_s, entry_ring_s, ..
        } = self.geometry.kind
        {
            let ego = self.vehicle(self.ego);
            if i != self.ego.0 as usize
                && me.path == ring_path
                && ego.is_active()
                && (entry_ego_s..=exit_ego_s).contains(&ego.s)
            {
                let ring_len = self.geometry.path(ring_path).length();
                let ego_ring_s =
                    (entry_ring_s + (ego.s - entry_ego_s)).rem_euclid(ring_len);
                let ahead = (ego_ring_s - me.s).rem_euclid(ring_len);
                if ahead > 0.0 {
                    let gap = ahead - me.half_length() - ego.half_length();
                    if nearest.is_none_or(|(g, _)| gap < g) {
                        nearest = Some((gap, ego.speed));
                    }
                }
            }
        }
        match nearest {
            Some((gap, speed)) => {
                let p = self.idm.with_v0(f64::INFINITY);
                let braking = idm_accel(gap, me.speed, speed, &p);
                // Engage only when the car-following law calls for braking;
                // a far leader must not dilute the held command.
                if braking < 0.0 { braking } else { f64::INFINITY }
            }
            None => f64::INFINITY,
        }
    }

    /// Advance physics by `dt`: recompute controller accelerations from the
    /// frozen current state, then integrate speeds (clamped to [0, path
    /// cap]), positions, lane-change lateral progress, and path-end exits.
    pub fn step(&mut self, dt: f64) {
        let accels: Vec<f64> = (0..self.vehicles.len())
            .map(|i| if self.vehicles[i].departed { 0.0 } else { self.controller_accel(i) })
            .collect();
        for (i, a) in accels.into_iter().enumerate() {
            if self.vehicles[i].departed {
                continue;
            }
            let cap = self.geometry.speed_cap(self.vehicles[i].path);
            let path_closed = self.geometry.path(self.vehicles[i].path).is_closed();
            let path_len = self.geometry.path(self.vehicles[i].path).length();
            let v = &mut self.vehicles[i];
            if v.crashed {
                v.accel = 0.0;
                v.speed = 0.0;
                continue;
            }
            v.accel = a;
            let v_new = (v.speed + a * dt).clamp(0.0, cap);
            let ds = 0.5 * (v.speed + v_new) * dt;
            v.speed = v_new;
            v.s += ds;
            v.odometer += ds;
            if let Some(lc) = &mut v.lane_change {
                lc.elapsed += dt;
                if lc.elapsed >= lc.duration - 1e-12 {
                    v.lateral = 0.0;
                    v.lane_change = None;
                } else {
                    v.lateral = lc.lateral_start * (1.0 - lc.elapsed / lc.duration);
                }
            }
            if path_closed {
                v.s = v.s.rem_euclid(path_len);
            } else if v.s >= path_len {
                v.s = path_len;
                v.departed = true;
            }
        }
        self.time += dt;
    }

    /// Start a lateral transition onto `target_path`, preserving the
    /// vehicle's world position (arc-length coordinates are shared between
    /// parallel lanes). The vehicle counts as occupying both lanes until
    /// the transition completes.
    pub fn begin_lane_change(&mut self, id: VehicleId, target_path: usize, duration: f64) {
        assert!(duration > 0.0);
        let idx = id.0 as usize;
        assert!(
            self.vehicles[idx].lane_change.is_none(),
            "lane change already in progress"
        );
        let current = self.vehicles[idx].pose(&self.geometry);
        let target_center = self.geometry.path(target_path).pose(self.vehicles[idx].s);
        let left = Vec2::unit(target_center.heading).perp();
        let lateral = (current.pos - target_center.pos).dot(left);
        let v = &mut self.vehicles[idx];
        v.lane_change = Some(LaneChange {
            from_path: v.path,
            lateral_start: lateral,
            elapsed: 0.0,
            duration,
        });
        v.path = target_path;
        v.lateral = lateral;
    }

    /// MOBIL lane-change evaluation for `i` moving onto `target`.
    pub fn assess_lane_change(&self, i: usize, target: usize) -> MobilAssessment {
        let me = &self.vehicles[i];
        let own_now = self.idm_on_path(i, me.path);
        let own_after = self.idm_on_path(i, target);

        let bumper_gap = |behind: &Vehicle, ahead_s: f64, ahead_half: f64| {
            (ahead_s - behind.s) - behind.half_length() - ahead_half
        };

        let (new_follower_now, new_follower_after) = match self.follower_of(i, target) {
            Some(j) => {
                let now = self.idm_on_path(j, target);
                let f = &self.vehicles[j];
                let gap = bumper_gap(f, me.s, me.half_length());
                let after =
                    idm_accel(gap, f.speed, me.speed, &self.idm.with_v0(f.v_desired));
                (now, after)
            }
            None => (0.0, 0.0),
        };

        let (old_follower_now, old_follower_after) = match self.follower_of(i, me.path) {
            Some(j) => {
                let now = self.idm_on_path(j, me.path);
                let f = &self.vehicles[j];
                let after = match self.leader_of(i, me.path) {
                    Some(l) => {
                        let leader = &self.vehicles[l.id.0 as usize];
                        let gap = bumper_gap(f, leader.s, leader.half_length());
                        idm_accel(gap, f.speed, leader.speed, &self.idm.with_v0(f.v_desired))
                    }
                    None => self.idm_toward(j, None),
                };
                (now, after)
            }
            None => (0.0, 0.0),
        };

        MobilAssessment {
            own_now,
            own_after,
            new_follower_now,
            new_follower_after,
            old_follower_now,
            old_follower_after,
        }
    }

    /// Run one MOBIL decision round for the IDM/MOBIL background vehicles
    /// (highway only). All decisions are made against the same frozen
    /// snapshot, then applied, so in-tick ordering cannot leak.
    pub fn mobil_tick(&mut self, lane_change_duration: f64) {
        let GeometryKind::Highway { lane_paths, .. } = self.geometry.kind else {
            return;
        };
        let mut changes: Vec<(VehicleId, usize)> = Vec::new();
        for (i, v) in self.vehicles.iter().enumerate() {
            if v.controller != Controller::IdmMobil
                || !v.is_active()
                || v.crashed
                || v.lane_change.is_some()
            {
                continue;
            }
            let lane = self.geometry.lane_of_path(v.path).expect("background rides a lane");
            let (left, right) = highway_neighbors(lane);
            let mut best: Option<(f64, usize)> = None;
            for candidate in [left, right].into_iter().flatten() {
                let target = lane_paths[candidate];
                let assessment = self.assess_lane_change(i, target);
                if !mobil_decide(&assessment, &self.mobil) {
                    continue;
                }
                let margin = (assessment.own_after - assessment.own_now)
                    + self.mobil.politeness
                        * ((assessment.new_follower_after - assessment.new_follower_now)
                            + (assessment.old_follower_after - assessment.old_follower_now));
                // Strict comparison keeps the left candidate on exact ties.
                if best.is_none_or(|(b, _)| margin > b) {
                    best = Some((margin, target));
                }
            }
            if let Some((_, target)) = best {
                changes.push((v.id, target));
            }
        }
        for (id, target) in changes {
            self.begin_lane_change(id, target, lane_change_duration);
        }
    }
}

/// Projection interval of a rectangle onto a unit axis.
fn project(corners: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in corners {
        let d = c.dot(axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

/// Best separating-axis distance between two oriented rectangles: the
/// maximum, over the four edge normals, of the projection-interval gap.
/// Positive means separated by at least that distance; non-positive means
/// the projections overlap on every axis (the rectangles intersect).
pub fn rect_separation(a: &[Vec2; 4], b: &[Vec2; 4]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (rect, other) in [(a, b), (b, a)] {
        for k in 0..2 {
            let edge = rect[k + 1] - rect[k];
            let axis = edge.perp() * (1.0 / edge.norm());
            let (alo, ahi) = project(rect, axis);
            let (blo, bhi) = project(other, axis);
            best = best.max((blo - ahi).max(alo - bhi));
        }
    }
    best
}

/// Two footprints collide when no axis separates them by at least the
/// contact tolerance — touching counts as a collision.
pub fn rects_collide(a: &[Vec2; 4], b: &[Vec2; 4]) -> bool {
    rect_separation(a, b) < CONTACT_TOL
}

/// All colliding pairs among active vehicles (id-ordered), using a center
/// broad phase before the exact separating-axis test.
pub fn detect_collisions(world: &WorldState) -> Vec<(VehicleId, VehicleId)> {
    let footprints: Vec<Option<(Vec2, [Vec2; 4])>> = world
        .vehicles
        .iter()
        .map(|v| {
            v.is_active().then(|| {
                let pose = v.pose(&world.geometry);
                (pose.pos, corners_at(pose))
            })
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..footprints.len() {
        let Some((ci, ri)) = &footprints[i] else { continue };
        for j in (i + 1)..footprints.len() {
            let Some((cj, rj)) = &footprints[j] else { continue };
            if ci.dist(*cj) > BROAD_PHASE_RADIUS {
                continue;
            }
            if rects_collide(ri, rj) {
                pairs.push((world.vehicles[i].id, world.vehicles[j].id));
            }
        }
    }
    pairs
}

/// First colliding pair, if any.
pub fn detect_collision(world: &WorldState) -> Option<(VehicleId, VehicleId)> {
    detect_collisions(world).into_iter().next()
}
