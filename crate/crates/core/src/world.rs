//! Simulation state and the per-tick update.
//!
//! A tick runs in two phases. Every alive robot first senses and samples its
//! next velocity against the frozen state of the previous tick; these runs
//! are independent and execute on the rayon pool. Integration, overlap
//! resolution and object motion then run sequentially.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{closest_point_on_polygon, convex_separation, Polygon, Vec2};
use crate::potential::{EnergyParams, Mode};
use crate::sampler::{sample_velocity, RngStream, SamplerParams};
use crate::scalar::Real;
use crate::sensing::{pushing_decision, sense, SensorParams};

/// What a robot is doing, for traces: no object in view, circulating it,
/// or pushing it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    #[default]
    Search,
    Circulate,
    Push,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct RobotState<S> {
    pub id: usize,
    pub position: Vec2<S>,
    pub velocity: Vec2<S>,
    pub radius: S,
    pub alive: bool,
    /// Direction of the last nonzero velocity.
    pub heading: Option<Vec2<S>>,
    pub behavior: Behavior,
}

impl<S: Real> RobotState<S> {
    pub fn new(id: usize, position: Vec2<S>, radius: S) -> Self {
        Self {
            id,
            position,
            velocity: Vec2::zero(),
            radius,
            alive: true,
            heading: None,
            behavior: Behavior::Search,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct TransportObject<S> {
    /// Outline in the body frame, centroid at the origin.
    pub shape: Polygon<S>,
    /// World position of the centroid.
    pub position: Vec2<S>,
    pub orientation: S,
    pub mass: S,
    pub goal: Vec2<S>,
    /// Goals still to visit after the current one.
    pub waypoints: Vec<Vec2<S>>,
    pub velocity: Vec2<S>,
    pub angular_velocity: S,
    pub moving: bool,
}

impl<S: Real> TransportObject<S> {
    pub fn new(shape: Polygon<S>, position: Vec2<S>, mass: S, goal: Vec2<S>) -> Self {
        let c = shape.centroid();
        Self {
            shape: shape.transformed(-c, S::zero()),
            position,
            orientation: S::zero(),
            mass,
            goal,
            waypoints: Vec::new(),
            velocity: Vec2::zero(),
            angular_velocity: S::zero(),
            moving: false,
        }
    }

    pub fn polygon(&self) -> Polygon<S> {
        self.shape.transformed(self.position, self.orientation)
    }

    pub fn distance_to_goal(&self) -> S {
        self.position.distance(self.goal)
    }

    pub fn speed(&self) -> S {
        self.velocity.norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct PhysicsParams<S> {
    /// Pushing speed needed to start a reference-mass object at rest.
    pub static_start_speed: S,
    /// Drive needed to keep a moving object going.
    pub kinetic_keep_speed: S,
    /// Mass the speed thresholds are quoted for.
    pub reference_mass: S,
    pub max_object_speed: S,
    pub rotation_enabled: bool,
    /// rad/s per (m * m/s) of pushing moment.
    pub rot_gain: S,
}

impl<S: Real> Default for PhysicsParams<S> {
    fn default() -> Self {
        Self {
            static_start_speed: S::lit(0.10),
            kinetic_keep_speed: S::lit(0.01),
            reference_mass: S::lit(0.2),
            max_object_speed: S::lit(0.12),
            rotation_enabled: true,
            rot_gain: S::lit(0.5),
        }
    }
}

impl<S: Real> PhysicsParams<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.kinetic_keep_speed > S::zero()
            && self.kinetic_keep_speed < self.static_start_speed)
        {
            return Err(Error::param(
                "kinetic_keep_speed",
                "must satisfy 0 < kinetic_keep_speed < static_start_speed",
            ));
        }
        if !(self.reference_mass > S::zero()) {
            return Err(Error::param("reference_mass", "must be > 0"));
        }
        if !(self.max_object_speed > S::zero()) {
            return Err(Error::param("max_object_speed", "must be > 0"));
        }
        if !(self.rot_gain >= S::zero()) {
            return Err(Error::param("rot_gain", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real", rename_all = "snake_case")]
pub enum Event<S> {
    GoalChange(Vec2<S>),
    KillRobots(Vec<usize>),
    /// Kills up to this many robots that are pushing the object right now,
    /// lowest ids first.
    KillPushers(usize),
    NextWaypoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real", rename_all = "snake_case")]
pub enum Trigger<S> {
    AtTick(u64),
    /// Object centroid closer than this to its current goal.
    GoalDistanceBelow(S),
    /// At least this many robots in push mode touching the object.
    PushersAtLeast(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct ScheduledEvent<S> {
    pub trigger: Trigger<S>,
    pub event: Event<S>,
    #[serde(default)]
    pub fired: bool,
}

impl<S: Real> ScheduledEvent<S> {
    pub fn new(trigger: Trigger<S>, event: Event<S>) -> Self {
        Self {
            trigger,
            event,
            fired: false,
        }
    }
}

/// Per-robot contact with the object: point, inward normal, robot velocity.
pub type Contact<S> = (Vec2<S>, Vec2<S>, Vec2<S>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct WorldState<S> {
    pub robots: Vec<RobotState<S>>,
    pub object: Option<TransportObject<S>>,
    pub obstacles: Vec<Polygon<S>>,
    pub arena: Polygon<S>,
    pub tick: u64,
    pub dt: S,
    pub seed: u64,
    pub events: Vec<ScheduledEvent<S>>,
    /// First tick on which any robot touched the object.
    pub first_contact_tick: Option<u64>,
}

/// Passes of the overlap relaxation per tick.
const RELAX_PASSES: usize = 200;
const OVERLAP_TOL: f64 = 1e-9;

impl<S: Real> WorldState<S> {
    pub fn new(
        robots: Vec<RobotState<S>>,
        object: Option<TransportObject<S>>,
        obstacles: Vec<Polygon<S>>,
        arena: Polygon<S>,
        dt: S,
    ) -> Result<Self> {
        if !(dt > S::zero()) {
            return Err(Error::param("dt", "must be > 0"));
        }
        for (k, r) in robots.iter().enumerate() {
            if r.id != k {
                return Err(Error::param(
                    "robots",
                    format!("robot at index {k} has id {}", r.id),
                ));
            }
            if !(r.radius > S::zero()) {
                return Err(Error::param("robots.radius", "must be > 0"));
            }
        }
        if let Some(o) = &object {
            if !(o.mass > S::zero()) {
                return Err(Error::param("object.mass", "must be > 0"));
            }
        }
        Ok(Self {
            robots,
            object,
            obstacles,
            arena,
            tick: 0,
            dt,
            seed: 0,
            events: Vec::new(),
            first_contact_tick: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_events(mut self, events: Vec<ScheduledEvent<S>>) -> Self {
        self.events = events;
        self
    }

    pub fn robot(&self, id: usize) -> Result<&RobotState<S>> {
        self.robots.get(id).ok_or(Error::UnknownRobot(id))
    }

    pub fn object_polygon(&self) -> Option<Polygon<S>> {
        self.object.as_ref().map(TransportObject::polygon)
    }

    pub fn alive_count(&self) -> usize {
        self.robots.iter().filter(|r| r.alive).count()
    }

    /// Ids of alive robots in push mode currently touching the object.
    pub fn pushing_robots(&self) -> Vec<usize> {
        let Some(poly) = self.object_polygon() else {
            return Vec::new();
        };
        let slack = S::lit(1e-6);
        self.robots
            .iter()
            .filter(|r| r.alive && r.behavior == Behavior::Push)
            .filter(|r| {
                let c = closest_point_on_polygon(r.position, &poly);
                c.inside || c.distance <= r.radius + slack
            })
            .map(|r| r.id)
            .collect()
    }
}

/// Holonomic motion model.
#[inline]
pub fn apply_kinematics<S: Real>(position: Vec2<S>, v: Vec2<S>, dt: S) -> Vec2<S> {
    position + v * dt
}

/// Applies one scripted event.
pub fn inject_event<S: Real>(world: &mut WorldState<S>, event: &Event<S>) -> Result<()> {
    match event {
        Event::GoalChange(goal) => {
            if let Some(o) = world.object.as_mut() {
                o.goal = *goal;
            }
        }
        Event::KillRobots(ids) => {
            if let Some(&bad) = ids.iter().find(|&&id| id >= world.robots.len()) {
                return Err(Error::UnknownRobot(bad));
            }
            for &id in ids {
                let r = &mut world.robots[id];
                r.alive = false;
                r.velocity = Vec2::zero();
            }
        }
        Event::KillPushers(n) => {
            let ids: Vec<usize> = world.pushing_robots().into_iter().take(*n).collect();
            inject_event(world, &Event::KillRobots(ids))?;
        }
        Event::NextWaypoint => {
            if let Some(o) = world.object.as_mut() {
                if !o.waypoints.is_empty() {
                    o.goal = o.waypoints.remove(0);
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Success,
    Running,
    Timeout(u64),
}

pub fn is_terminated<S: Real>(
    world: &WorldState<S>,
    sensor: &SensorParams<S>,
    tick_limit: u64,
) -> Termination {
    if let Some(o) = &world.object {
        if o.waypoints.is_empty() && o.distance_to_goal() < sensor.goal_stop_radius {
            return Termination::Success;
        }
    }
    if world.tick >= tick_limit {
        Termination::Timeout(tick_limit)
    } else {
        Termination::Running
    }
}

/// Quasi-static velocity-level update of the pushed object.
///
/// Each contact contributes its inward pushing speed along the contact
/// normal. A resting object starts when the summed impact speed reaches the
/// mass-scaled static threshold and the net drive is not cancelled out; a
/// moving one keeps going while the net drive stays above the kinetic
/// threshold.
pub fn resolve_object_motion<S: Real>(
    object: &TransportObject<S>,
    contacts: &[Contact<S>],
    pparams: &PhysicsParams<S>,
    dt: S,
) -> TransportObject<S> {
    let mut next = object.clone();
    let mut drive = Vec2::zero();
    let mut torque = S::zero();
    let mut impact = S::zero();
    for &(point, normal, robot_v) in contacts {
        let s = robot_v.dot(normal).max(S::zero());
        let push = normal * s;
        impact += s;
        drive += push;
        torque += (point - object.position).cross(push);
    }
    let mass_ratio = object.mass / pparams.reference_mass;
    let strength = drive.norm();
    let moves = strength >= pparams.kinetic_keep_speed
        && (object.moving || impact >= pparams.static_start_speed * mass_ratio);
    if contacts.is_empty() || !moves {
        next.moving = false;
        next.velocity = Vec2::zero();
        next.angular_velocity = S::zero();
        return next;
    }
    let inv_ratio = S::one() / mass_ratio;
    next.moving = true;
    next.velocity = (drive * inv_ratio).clamp_norm(pparams.max_object_speed);
    next.position = apply_kinematics(object.position, next.velocity, dt);
    next.angular_velocity = if pparams.rotation_enabled {
        torque * inv_ratio * pparams.rot_gain
    } else {
        S::zero()
    };
    next.orientation = object.orientation + next.angular_velocity * dt;
    next
}

/// Advances the world by one tick.
pub fn step<S: Real>(
    world: &WorldState<S>,
    eparams: &EnergyParams<S>,
    sparams: &SamplerParams<S>,
    senseparams: &SensorParams<S>,
    pparams: &PhysicsParams<S>,
) -> Result<WorldState<S>> {
    // (1)-(2): sample against the frozen snapshot
    let decisions: Vec<Option<(Vec2<S>, Behavior)>> = world
        .robots
        .par_iter()
        .map(|r| -> Result<Option<(Vec2<S>, Behavior)>> {
            if !r.alive {
                return Ok(None);
            }
            let perception = sense(world, r.id, senseparams)?;
            // the occlusion segment ends at the goal
            let reach = world
                .object
                .as_ref()
                .map(|o| o.goal.distance(perception.self_pose))
                .unwrap_or_else(S::zero);
            let on_segment: Vec<Vec2<S>> = perception
                .object_points
                .iter()
                .copied()
                .filter(|&p| (p - perception.self_pose).dot(perception.goal_bearing) <= reach)
                .collect();
            let mode = pushing_decision(
                &on_segment,
                perception.self_pose,
                perception.goal_bearing,
                eparams.rho,
            );
            let mut rng = RngStream::new(world.seed, r.id as u64, world.tick);
            let v = sample_velocity(&perception, mode, eparams, sparams, world.dt, &mut rng);
            let behavior = match (perception.object_points.is_empty(), mode) {
                (true, _) => Behavior::Search,
                (false, Mode::Push) => Behavior::Push,
                (false, Mode::Circulate) => Behavior::Circulate,
            };
            Ok(Some((v, behavior)))
        })
        .collect::<Result<_>>()?;

    let mut next = world.clone();
    for (robot, d) in next.robots.iter_mut().zip(decisions) {
        if let Some((v, behavior)) = d {
            robot.velocity = v;
            robot.behavior = behavior;
            if let Some(h) = v.normalized() {
                robot.heading = Some(h);
            }
        }
    }

    // (3) scripted events
    fire_due_events(&mut next)?;

    // (4) integrate
    for r in next.robots.iter_mut().filter(|r| r.alive) {
        r.position = apply_kinematics(r.position, r.velocity, next.dt);
    }

    // (5) robot-robot / robot-environment overlaps
    relax_robots(&mut next, None);
    slide_along_walls(&mut next);

    // (6) contacts drive the object, which then shoves robots out of its way
    if let Some(object) = next.object.clone() {
        let poly = object.polygon();
        let contacts: Vec<Contact<S>> = next
            .robots
            .iter()
            .filter(|r| r.alive)
            .filter_map(|r| {
                let c = closest_point_on_polygon(r.position, &poly);
                (c.inside || c.distance < r.radius).then_some((
                    c.point,
                    c.inward_normal,
                    r.velocity,
                ))
            })
            .collect();
        if !contacts.is_empty() && next.first_contact_tick.is_none() {
            next.first_contact_tick = Some(world.tick);
        }
        let mut moved = resolve_object_motion(&object, &contacts, pparams, next.dt);
        keep_object_clear(&mut moved, &next.arena, &next.obstacles);
        let obj_poly = moved.polygon();
        next.object = Some(moved);
        relax_robots(&mut next, Some(&obj_poly));
    }

    // waypoint advance once the current goal is reached
    if let Some(o) = next.object.as_ref() {
        if !o.waypoints.is_empty() && o.distance_to_goal() < senseparams.goal_stop_radius {
            inject_event(&mut next, &Event::NextWaypoint)?;
        }
    }

    // (7)
    next.tick += 1;
    Ok(next)
}

fn fire_due_events<S: Real>(world: &mut WorldState<S>) -> Result<()> {
    for k in 0..world.events.len() {
        if world.events[k].fired {
            continue;
        }
        let due = match &world.events[k].trigger {
            Trigger::AtTick(t) => world.tick >= *t,
            Trigger::GoalDistanceBelow(d) => world
                .object
                .as_ref()
                .is_some_and(|o| o.distance_to_goal() < *d),
            Trigger::PushersAtLeast(n) => world.pushing_robots().len() >= *n,
        };
        if due {
            let event = world.events[k].event.clone();
            inject_event(world, &event)?;
            world.events[k].fired = true;
        }
    }
    Ok(())
}

/// Pushes the object back inside the arena and out of obstacles.
fn keep_object_clear<S: Real>(
    object: &mut TransportObject<S>,
    arena: &Polygon<S>,
    obstacles: &[Polygon<S>],
) {
    for _ in 0..4 {
        let poly = object.polygon();
        let mut shift = Vec2::zero();
        for (a, b) in arena.edges() {
            let inward = match (b - a).perp().normalized() {
                Some(n) => n,
                None => continue,
            };
            let depth = poly
                .vertices()
                .iter()
                .map(|&v| -(v - a).dot(inward))
                .fold(S::zero(), S::max);
            if depth > S::zero() {
                shift += inward * depth;
            }
        }
        for obs in obstacles {
            if let Some(mtv) = convex_separation(obs, &poly) {
                shift += mtv;
            }
        }
        if shift.norm() <= S::lit(OVERLAP_TOL) {
            break;
        }
        object.position += shift;
    }
}

/// Separates overlapping robots, then keeps them out of obstacles, the
/// object (when given) and inside the arena.
fn relax_robots<S: Real>(world: &mut WorldState<S>, object: Option<&Polygon<S>>) {
    let n = world.robots.len();
    let half = S::lit(0.5);
    let tol = S::lit(OVERLAP_TOL);
    for _ in 0..RELAX_PASSES {
        let mut worst = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let (pi, pj) = (world.robots[i].position, world.robots[j].position);
                let min_d = world.robots[i].radius + world.robots[j].radius;
                let d = pj - pi;
                let dist = d.norm();
                if dist >= min_d {
                    continue;
                }
                let depth = min_d - dist;
                worst = worst.max(depth);
                let dir = d.normalized().unwrap_or_else(|| {
                    // coincident centers: split along a fixed id-dependent axis
                    Vec2::from_angle(S::from_usize_lossy(i * 7 + j))
                });
                // dead robots are moved like any other disc
                let push = dir * (depth * half);
                world.robots[i].position -= push;
                world.robots[j].position += push;
            }
        }
        for r in world.robots.iter_mut() {
            for obs in &world.obstacles {
                worst = worst.max(push_disc_out(&mut r.position, r.radius, obs));
            }
            if let Some(poly) = object {
                worst = worst.max(push_disc_out(&mut r.position, r.radius, poly));
            }
            worst = worst.max(keep_disc_inside(&mut r.position, r.radius, &world.arena));
        }
        if worst <= tol {
            break;
        }
    }
}

/// Drops the velocity component that points into an arena wall or a static
/// obstacle the robot is touching, so a blocked robot slides instead of
/// pressing on.
fn slide_along_walls<S: Real>(world: &mut WorldState<S>) {
    let slack = S::lit(1e-7);
    let edges: Vec<(Vec2<S>, Vec2<S>)> = world
        .arena
        .edges()
        .filter_map(|(a, b)| (b - a).perp().normalized().map(|n| (a, n)))
        .collect();
    for r in world.robots.iter_mut().filter(|r| r.alive) {
        let blocked = |v: &mut Vec2<S>, free: Vec2<S>| {
            let into = v.dot(free);
            if into < S::zero() {
                *v -= free * into;
            }
        };
        for &(a, n) in &edges {
            if (r.position - a).dot(n) <= r.radius + slack {
                blocked(&mut r.velocity, n);
            }
        }
        for obs in &world.obstacles {
            let c = closest_point_on_polygon(r.position, obs);
            if !c.inside && c.distance <= r.radius + slack {
                blocked(&mut r.velocity, -c.inward_normal);
            }
        }
    }
}

/// Moves a disc out of a polygon; returns the penetration that was fixed.
fn push_disc_out<S: Real>(center: &mut Vec2<S>, radius: S, poly: &Polygon<S>) -> S {
    let c = closest_point_on_polygon(*center, poly);
    if c.inside {
        let depth = c.distance + radius;
        *center = c.point - c.inward_normal * radius;
        depth
    } else if c.distance < radius {
        let depth = radius - c.distance;
        *center -= c.inward_normal * depth;
        depth
    } else {
        S::zero()
    }
}

/// Keeps a disc inside the arena polygon; returns the largest correction.
/// Repeated so a disc wedged in a corner clears both walls.
fn keep_disc_inside<S: Real>(center: &mut Vec2<S>, radius: S, arena: &Polygon<S>) -> S {
    let mut worst = S::zero();
    for _ in 0..4 {
        let c = closest_point_on_polygon(*center, arena);
        let fix = if !c.inside {
            *center = c.point + c.inward_normal * radius;
            c.distance + radius
        } else if c.distance < radius {
            let depth = radius - c.distance;
            *center += c.inward_normal * depth;
            depth
        } else {
            break;
        };
        worst = worst.max(fix);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn arena() -> Polygon<f64> {
        Polygon::rectangle(4.0, 4.0).unwrap()
    }

    fn rect_object() -> TransportObject<f64> {
        TransportObject::new(
            Polygon::rectangle(0.5, 0.4).unwrap(),
            v(0.0, 0.0),
            0.2,
            v(1.7, 0.0),
        )
    }

    fn params() -> (
        EnergyParams<f64>,
        SamplerParams<f64>,
        SensorParams<f64>,
        PhysicsParams<f64>,
    ) {
        Default::default()
    }

    #[test]
    fn kinematics_examples() {
        assert_eq!(apply_kinematics(v(0.0, 0.0), v(0.1, 0.0), 1.0), v(0.1, 0.0));
        assert_eq!(apply_kinematics(v(0.3, 0.4), v(0.0, 0.0), 0.1), v(0.3, 0.4));
        let p = apply_kinematics(v(1.0, 1.0), v(-0.12, 0.05), 0.1);
        assert_abs_diff_eq!(p.x, 0.988, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 1.005, epsilon = 1e-12);
    }

    #[test]
    fn all_dead_world_only_ticks() {
        let mut robots: Vec<_> = (0..3)
            .map(|k| RobotState::new(k, v(-1.0 + k as f64 * 0.5, 1.0), 0.05))
            .collect();
        for r in &mut robots {
            r.alive = false;
        }
        let w = WorldState::new(robots, Some(rect_object()), vec![], arena(), 0.1).unwrap();
        let (e, s, se, p) = params();
        let next = step(&w, &e, &s, &se, &p).unwrap();
        assert_eq!(next.tick, 1);
        for (a, b) in w.robots.iter().zip(&next.robots) {
            assert_eq!(a.position, b.position);
        }
        assert_eq!(
            w.object.as_ref().unwrap().position,
            next.object.as_ref().unwrap().position
        );
    }

    fn head_on(speed: f64) -> TransportObject<f64> {
        let obj = rect_object();
        let contact = (v(-0.25, 0.0), v(1.0, 0.0), v(speed, 0.0));
        resolve_object_motion(&obj, &[contact], &PhysicsParams::default(), 0.1)
    }

    #[test]
    fn object_motion_examples() {
        let obj = rect_object();
        let still = resolve_object_motion(&obj, &[], &PhysicsParams::default(), 0.1);
        assert_eq!(still.position, obj.position);
        assert!(!still.moving);

        let pushed = head_on(0.12);
        assert!(pushed.moving);
        assert_abs_diff_eq!(pushed.velocity.norm(), 0.12, epsilon = 1e-12);
        assert!(pushed.position.x > 0.0);

        assert!(!head_on(0.05).moving);

        let opposing = [
            (v(-0.25, 0.0), v(1.0, 0.0), v(0.12, 0.0)),
            (v(0.25, 0.0), v(-1.0, 0.0), v(-0.12, 0.0)),
        ];
        let stuck = resolve_object_motion(&obj, &opposing, &PhysicsParams::default(), 0.1);
        assert!(!stuck.moving);
        assert_eq!(stuck.position, obj.position);
    }

    #[test]
    fn moving_object_keeps_going_above_kinetic_threshold() {
        let mut obj = head_on(0.12);
        let slow = [(v(-0.25, 0.0) + obj.position, v(1.0, 0.0), v(0.02, 0.0))];
        obj = resolve_object_motion(&obj, &slow, &PhysicsParams::default(), 0.1);
        assert!(obj.moving);
        let crawl = [(v(-0.25, 0.0) + obj.position, v(1.0, 0.0), v(0.005, 0.0))];
        obj = resolve_object_motion(&obj, &crawl, &PhysicsParams::default(), 0.1);
        assert!(!obj.moving);
    }

    #[test]
    fn heavier_object_needs_more_drive() {
        let mut obj = rect_object();
        obj.mass = 0.4;
        let one = [(v(-0.25, 0.0), v(1.0, 0.0), v(0.12, 0.0))];
        assert!(!resolve_object_motion(&obj, &one, &PhysicsParams::default(), 0.1).moving);
        let two = [
            (v(-0.25, 0.1), v(1.0, 0.0), v(0.12, 0.0)),
            (v(-0.25, -0.1), v(1.0, 0.0), v(0.12, 0.0)),
        ];
        let moved = resolve_object_motion(&obj, &two, &PhysicsParams::default(), 0.1);
        assert!(moved.moving);
        assert_abs_diff_eq!(moved.velocity.x, 0.12, epsilon = 1e-12);
    }

    #[test]
    fn uneven_opposing_pushes_start_the_object() {
        let obj = rect_object();
        let uneven = [
            (v(-0.25, 0.0), v(1.0, 0.0), v(0.12, 0.0)),
            (v(0.25, 0.0), v(-1.0, 0.0), v(-0.09, 0.0)),
        ];
        let moved = resolve_object_motion(&obj, &uneven, &PhysicsParams::default(), 0.1);
        assert!(moved.moving);
        assert_abs_diff_eq!(moved.velocity.x, 0.03, epsilon = 1e-12);
    }

    #[test]
    fn scripted_robot_pushes_object_in_step() {
        // robot just touching the left face, sampler frozen at 0.12 m/s
        let mut r = RobotState::new(0, v(-0.30, 0.0), 0.05);
        r.velocity = v(0.12, 0.0);
        let w = WorldState::new(vec![r], Some(rect_object()), vec![], arena(), 0.1).unwrap();
        let (e, _, se, p) = params();
        let s = SamplerParams {
            proposal_sigma: 1e-300,
            ..SamplerParams::default()
        };
        let next = step(&w, &e, &s, &se, &p).unwrap();
        assert!(next.object.as_ref().unwrap().position.x > 0.0);
        assert_eq!(next.first_contact_tick, Some(0));
    }

    #[test]
    fn events() {
        let robots: Vec<_> = (0..10)
            .map(|k| RobotState::new(k, v(-1.5 + 0.3 * k as f64, 1.5), 0.05))
            .collect();
        let mut w = WorldState::new(robots, Some(rect_object()), vec![], arena(), 0.1).unwrap();
        inject_event(&mut w, &Event::KillRobots(vec![1, 2, 3, 4])).unwrap();
        assert_eq!(w.alive_count(), 6);
        assert!(w.robots[2].velocity == v(0.0, 0.0));
        assert!(matches!(
            inject_event(&mut w, &Event::KillRobots(vec![42])),
            Err(Error::UnknownRobot(42))
        ));

        inject_event(&mut w, &Event::GoalChange(v(-1.3, 0.0))).unwrap();
        assert_eq!(w.object.as_ref().unwrap().goal, v(-1.3, 0.0));

        let before = w.clone();
        inject_event(&mut w, &Event::NextWaypoint).unwrap();
        assert_eq!(w, before);

        w.object.as_mut().unwrap().waypoints = vec![v(1.0, 1.0)];
        inject_event(&mut w, &Event::NextWaypoint).unwrap();
        assert_eq!(w.object.as_ref().unwrap().goal, v(1.0, 1.0));
        assert!(w.object.as_ref().unwrap().waypoints.is_empty());
    }

    #[test]
    fn goal_change_fires_on_distance_trigger() {
        let mut obj = rect_object();
        obj.position = v(0.5, 0.0);
        let w = WorldState::new(
            vec![RobotState::new(0, v(-1.5, -1.5), 0.05)],
            Some(obj),
            vec![],
            arena(),
            0.1,
        )
        .unwrap()
        .with_events(vec![ScheduledEvent::new(
            Trigger::GoalDistanceBelow(1.3),
            Event::GoalChange(v(-0.8, 0.0)),
        )]);
        let (e, s, se, p) = params();
        let next = step(&w, &e, &s, &se, &p).unwrap();
        assert_eq!(next.object.as_ref().unwrap().goal, v(-0.8, 0.0));
        assert!(next.events[0].fired);
        assert_eq!(is_terminated(&next, &se, 100), Termination::Running);
    }

    #[test]
    fn termination() {
        let se = SensorParams::default();
        let mut obj = rect_object();
        obj.position = v(1.65, 0.0);
        let mut w = WorldState::new(vec![], Some(obj), vec![], arena(), 0.1).unwrap();
        assert_eq!(is_terminated(&w, &se, 10), Termination::Success);
        w.object.as_mut().unwrap().position = v(1.2, 0.0);
        assert_eq!(is_terminated(&w, &se, 10), Termination::Running);
        w.tick = 10;
        assert_eq!(is_terminated(&w, &se, 10), Termination::Timeout(10));
        // waypoints pending: not done even at the current goal
        w.tick = 0;
        w.object.as_mut().unwrap().position = v(1.65, 0.0);
        w.object.as_mut().unwrap().waypoints = vec![v(0.0, 1.0)];
        assert_eq!(is_terminated(&w, &se, 10), Termination::Running);
    }

    #[test]
    fn overlaps_resolved_and_arena_contains() {
        let mut robots: Vec<_> = (0..6)
            .map(|k| RobotState::new(k, v(1.97, 1.97 - 0.01 * k as f64), 0.05))
            .collect();
        for r in &mut robots {
            r.velocity = v(0.12, 0.12);
        }
        let w = WorldState::new(robots, None, vec![], arena(), 0.1).unwrap();
        let (e, s, se, p) = params();
        let mut cur = w;
        for _ in 0..5 {
            cur = step(&cur, &e, &s, &se, &p).unwrap();
            for r in &cur.robots {
                assert!(r.position.x.abs() <= 2.0 - 0.05 + 1e-6);
                assert!(r.position.y.abs() <= 2.0 - 0.05 + 1e-6);
            }
            for i in 0..cur.robots.len() {
                for j in (i + 1)..cur.robots.len() {
                    let d = cur.robots[i].position.distance(cur.robots[j].position);
                    assert!(d >= 0.1 - 1e-6, "pair ({i},{j}) at {d}");
                }
            }
        }
    }

    #[test]
    fn object_never_moves_without_contacts() {
        let robots: Vec<_> = (0..4)
            .map(|k| RobotState::new(k, v(-1.5, -1.5 + 0.4 * k as f64), 0.05))
            .collect();
        let w = WorldState::new(robots, Some(rect_object()), vec![], arena(), 0.1).unwrap();
        let (e, s, se, p) = params();
        let mut cur = w;
        for _ in 0..50 {
            let before = cur.object.as_ref().unwrap().position;
            cur = step(&cur, &e, &s, &se, &p).unwrap();
            let poly = cur.object_polygon().unwrap();
            let touching = cur
                .robots
                .iter()
                .any(|r| closest_point_on_polygon(r.position, &poly).distance < r.radius + 0.02);
            if !touching {
                assert_eq!(before, cur.object.as_ref().unwrap().position);
            }
        }
    }
}
