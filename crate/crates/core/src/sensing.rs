//! Local perception: beam sensing, neighbor discovery and the geometric
//! decisions a robot makes about the object it sees.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{raycast_circle, raycast_distance, side_of_segment, Side, Vec2};
use crate::potential::Mode;
use crate::scalar::Real;
use crate::world::WorldState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Neighbor<S> {
    pub relative_position: Vec2<S>,
    pub velocity: Vec2<S>,
}

/// Everything a robot knows at one tick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Perception<S> {
    pub neighbors: Vec<Neighbor<S>>,
    /// Points detected on the object, world frame.
    pub object_points: Vec<Vec2<S>>,
    /// Points detected on obstacles and walls, world frame.
    pub obstacle_points: Vec<Vec2<S>>,
    /// Consecutive differences of the ordered object points.
    pub surface_gradients: Vec<Vec2<S>>,
    pub goal_bearing: Vec2<S>,
    pub self_pose: Vec2<S>,
    pub self_velocity: Vec2<S>,
}

impl<S: Real> Perception<S> {
    pub fn empty(self_pose: Vec2<S>, goal_bearing: Vec2<S>) -> Self {
        Self {
            neighbors: Vec::new(),
            object_points: Vec::new(),
            obstacle_points: Vec::new(),
            surface_gradients: Vec::new(),
            goal_bearing,
            self_pose,
            self_velocity: Vec2::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SensorParams<S> {
    pub lambda: S,
    pub beam_count: usize,
    pub goal_stop_radius: S,
}

impl<S: Real> Default for SensorParams<S> {
    fn default() -> Self {
        Self {
            lambda: S::lit(0.5),
            beam_count: 72,
            goal_stop_radius: S::lit(0.1),
        }
    }
}

impl<S: Real> SensorParams<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > S::zero()) {
            return Err(Error::param("lambda", "must be > 0"));
        }
        if self.beam_count < 8 {
            return Err(Error::param("beam_count", "must be >= 8"));
        }
        if !(self.goal_stop_radius > S::zero()) {
            return Err(Error::param("goal_stop_radius", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HitKind {
    Object,
    Obstacle,
}

/// Builds the perception of robot `robot_id` from the frozen world.
pub fn sense<S: Real>(
    world: &WorldState<S>,
    robot_id: usize,
    params: &SensorParams<S>,
) -> Result<Perception<S>> {
    let me = world.robot(robot_id)?;
    if !me.alive {
        return Err(Error::DeadRobot(robot_id));
    }
    let pose = me.position;
    let lambda = params.lambda;
    let object_poly = world.object_polygon();
    let reach = lambda + S::lit(1e-9);

    // shapes whose bounding disc is out of range cannot be hit
    let object_poly =
        object_poly.filter(|p| p.centroid().distance(pose) <= lambda + p.bounding_radius());
    let obstacles: Vec<_> = world
        .obstacles
        .iter()
        .filter(|p| p.centroid().distance(pose) <= lambda + p.bounding_radius())
        .collect();
    let dead: Vec<_> = world
        .robots
        .iter()
        .filter(|r| !r.alive && r.id != robot_id && r.position.distance(pose) <= lambda + r.radius)
        .collect();

    let mut object_points = Vec::new();
    let mut obstacle_points = Vec::new();
    let step = S::TAU() / S::from_usize_lossy(params.beam_count);
    for k in 0..params.beam_count {
        let dir = Vec2::from_angle(step * S::from_usize_lossy(k));
        let mut best: Option<(S, HitKind)> = None;
        let mut consider = |t: Option<S>, kind: HitKind| {
            if let Some(t) = t {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, kind));
                }
            }
        };
        if let Some(poly) = &object_poly {
            consider(raycast_distance(pose, dir, poly), HitKind::Object);
        }
        for poly in &obstacles {
            consider(raycast_distance(pose, dir, poly), HitKind::Obstacle);
        }
        for r in &dead {
            consider(
                raycast_circle(pose, dir, r.position, r.radius),
                HitKind::Obstacle,
            );
        }
        consider(raycast_distance(pose, dir, &world.arena), HitKind::Obstacle);
        if let Some((t, kind)) = best {
            if t <= reach {
                let p = pose + dir * t;
                match kind {
                    HitKind::Object => object_points.push(p),
                    HitKind::Obstacle => obstacle_points.push(p),
                }
            }
        }
    }

    let neighbors = world
        .robots
        .iter()
        .filter(|r| r.alive && r.id != robot_id)
        .filter_map(|r| {
            let rel = r.position - pose;
            (rel.norm() <= lambda).then_some(Neighbor {
                relative_position: rel,
                velocity: r.velocity,
            })
        })
        .collect();

    let goal_bearing_v = world
        .object
        .as_ref()
        .and_then(|o| goal_bearing(pose, o.goal).ok())
        .or_else(|| me.heading.and_then(Vec2::normalized))
        .unwrap_or_else(|| Vec2::new(S::one(), S::zero()));
    let motion_dir = me
        .velocity
        .normalized()
        .or_else(|| me.heading.and_then(Vec2::normalized))
        .unwrap_or(goal_bearing_v);

    let ordered = order_object_points(&object_points, pose, motion_dir);
    let surface_gradients = surface_gradient(&ordered);

    Ok(Perception {
        neighbors,
        object_points: ordered,
        obstacle_points,
        surface_gradients,
        goal_bearing: goal_bearing_v,
        self_pose: pose,
        self_velocity: me.velocity,
    })
}

fn count_sides<S: Real>(points: &[Vec2<S>], from: Vec2<S>, dir: Vec2<S>) -> (usize, usize) {
    let to = from + dir;
    points
        .iter()
        .fold((0, 0), |(l, r), &p| match side_of_segment(from, to, p) {
            Ok(Side::Left) => (l + 1, r),
            Ok(Side::Right) => (l, r + 1),
            _ => (l, r),
        })
}

/// Orders object points around `self_pose`: clockwise when more points lie
/// left of the front segment than right, counterclockwise otherwise. The
/// angular sequence starts right after the widest empty sector, so a
/// contiguous arc of surface comes out in traversal order.
pub fn order_object_points<S: Real>(
    object_points: &[Vec2<S>],
    self_pose: Vec2<S>,
    motion_dir: Vec2<S>,
) -> Vec<Vec2<S>> {
    if object_points.len() < 2 {
        return object_points.to_vec();
    }
    let (left, right) = count_sides(object_points, self_pose, motion_dir);
    let clockwise = left > right;

    let mut keyed: Vec<(S, S, Vec2<S>)> = object_points
        .iter()
        .map(|&p| {
            let d = p - self_pose;
            (d.angle(), d.norm_sq(), p)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });

    let n = keyed.len();
    let mut widest = (S::neg_infinity(), 0usize);
    for k in 0..n {
        let next = (k + 1) % n;
        let mut gap = keyed[next].0 - keyed[k].0;
        if next == 0 {
            gap += S::TAU();
        }
        if gap > widest.0 {
            widest = (gap, next);
        }
    }
    let mut ordered: Vec<Vec2<S>> = (0..n).map(|k| keyed[(widest.1 + k) % n].2).collect();
    if clockwise {
        ordered.reverse();
    }
    ordered
}

/// Consecutive differences of an ordered point list; empty below two points.
pub fn surface_gradient<S: Real>(ordered_points: &[Vec2<S>]) -> Vec<Vec2<S>> {
    ordered_points.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Push when the object splits the goal line with a balanced enough share
/// of points on each side; circulate otherwise. Only points ahead of the
/// robot along the goal bearing can occlude the goal.
pub fn pushing_decision<S: Real>(
    object_points: &[Vec2<S>],
    self_pose: Vec2<S>,
    goal_bearing: Vec2<S>,
    rho: S,
) -> Mode {
    let ahead: Vec<Vec2<S>> = object_points
        .iter()
        .copied()
        .filter(|&p| (p - self_pose).dot(goal_bearing) > S::zero())
        .collect();
    if ahead.is_empty() {
        return Mode::Circulate;
    }
    let (l, r) = count_sides(&ahead, self_pose, goal_bearing);
    if l == 0 || r == 0 {
        return Mode::Circulate;
    }
    let ratio = S::from_usize_lossy(l.min(r)) / S::from_usize_lossy(l.max(r));
    if ratio >= rho {
        Mode::Push
    } else {
        Mode::Circulate
    }
}

pub fn goal_bearing<S: Real>(self_pose: Vec2<S>, goal: Vec2<S>) -> Result<Vec2<S>> {
    (goal - self_pose).normalized().ok_or(Error::CoincidentGoal)
}
