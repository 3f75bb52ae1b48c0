//! Scenario definitions, trial and batch runners, and summary statistics.
//!
//! Everything here is fixed to `f64`.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::geometry::closest_point_on_polygon;
use crate::sampler::{Domain, RngStream};
use crate::trace::round_sig;
use crate::world::{is_terminated, step, Behavior, Termination};
use crate::{
    EnergyParams, Event, PhysicsParams, Polygon, RobotState, SamplerParams, ScheduledEvent,
    SensorParams, TransportObject, Trigger, Vec2, WorldState,
};

/// Width and height of the reference rectangle, meters.
pub const BASE_RECT: (f64, f64) = (0.5, 0.4);
/// Mass of the reference object, kg.
pub const BASE_MASS: f64 = 0.2;
pub const ROBOT_RADIUS: f64 = 0.05;
pub const ARENA_SIZE: f64 = 4.0;
pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_TICK_LIMIT: u64 = 20_000;
pub const DEFAULT_TRIALS: u64 = 30;

/// Clearance kept between randomly placed robots and everything else.
const PLACEMENT_MARGIN: f64 = 0.02;
const PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Rect,
    Octagon,
    Triangle,
}

impl ShapeKind {
    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Rect => "rect",
            ShapeKind::Octagon => "octagon",
            ShapeKind::Triangle => "triangle",
        }
    }
}

impl std::str::FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" | "rectangle" => Ok(ShapeKind::Rect),
            "octagon" => Ok(ShapeKind::Octagon),
            "triangle" => Ok(ShapeKind::Triangle),
            _ => Err(Error::param("shape", format!("unknown shape `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub shape: ShapeKind,
    /// Linear scale applied to width and height.
    pub scale: f64,
    pub mass: f64,
}

impl ObjectSpec {
    /// Body-frame outline. Octagon and triangle have the area of the
    /// reference rectangle at the same scale; the triangle points one corner
    /// back along `-x`.
    pub fn polygon(&self) -> Result<Polygon> {
        let (w, h) = BASE_RECT;
        let area = w * h;
        let poly = match self.shape {
            ShapeKind::Rect => Polygon::rectangle(w, h)?,
            ShapeKind::Octagon => {
                // area = 2 sqrt(2) R^2
                let r = (area / (2.0 * 2f64.sqrt())).sqrt();
                Polygon::regular(8, r, FRAC_PI_8)?
            }
            ShapeKind::Triangle => {
                // area = 3 sqrt(3) / 4 R^2
                let r = (4.0 * area / (3.0 * 3f64.sqrt())).sqrt();
                Polygon::regular(3, r, PI)?
            }
        };
        Ok(poly.scaled(self.scale))
    }
}

/// The experiments this crate knows how to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Scalability(usize),
    /// 10 robots, 2.6 m, nothing scripted. Baseline for the two below.
    IdealAdaptability,
    FailureAdaptability,
    GoalChangeAdaptability,
    Robustness {
        shape: ShapeKind,
        scale: f64,
        mass: f64,
    },
    Waypoints(Vec<Vec2>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub robot_count: usize,
    #[serde(default = "default_radius")]
    pub robot_radius: f64,
    pub object: ObjectSpec,
    /// Initial centroid of the object.
    pub start: Vec2,
    #[serde(default)]
    pub orientation: f64,
    pub goal: Vec2,
    /// Goals visited after `goal`, in order.
    #[serde(default)]
    pub waypoints: Vec<Vec2>,
    /// Arena width and height; the arena is centered at the origin.
    #[serde(default = "default_arena")]
    pub arena: [f64; 2],
    #[serde(default)]
    pub obstacles: Vec<Polygon>,
    #[serde(default)]
    pub events: Vec<ScheduledEvent>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_tick_limit")]
    pub tick_limit: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub energy: EnergyParams,
    #[serde(default)]
    pub sampler: SamplerParams,
    #[serde(default)]
    pub sensor: SensorParams,
    #[serde(default)]
    pub physics: PhysicsParams,
}

fn default_radius() -> f64 {
    ROBOT_RADIUS
}

fn default_arena() -> [f64; 2] {
    [ARENA_SIZE, ARENA_SIZE]
}

fn default_tick_limit() -> u64 {
    DEFAULT_TICK_LIMIT
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn cfg_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        reason: reason.into(),
    }
}

/// Re-roots a parameter error under `prefix` so diagnostics carry the full
/// field path.
fn nested(prefix: &str, r: Result<()>) -> Result<()> {
    r.map_err(|e| match e {
        Error::InvalidParam { field, reason } => cfg_err(&format!("{prefix}.{field}"), reason),
        other => other,
    })
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(cfg_err("name", "must not be empty"));
        }
        if self.robot_count == 0 {
            return Err(cfg_err("robot_count", "must be >= 1"));
        }
        if !(self.robot_radius > 0.0) {
            return Err(cfg_err("robot_radius", "must be > 0"));
        }
        if !(self.object.scale > 0.0) {
            return Err(cfg_err("object.scale", "must be > 0"));
        }
        if !(self.object.mass > 0.0) {
            return Err(cfg_err("object.mass", "must be > 0"));
        }
        if !(self.arena[0] > 0.0 && self.arena[1] > 0.0) {
            return Err(cfg_err("arena", "width and height must be > 0"));
        }
        if !self.start.is_finite() {
            return Err(cfg_err("start", "must be finite"));
        }
        if !self.goal.is_finite() {
            return Err(cfg_err("goal", "must be finite"));
        }
        if let Some(k) = self.waypoints.iter().position(|w| !w.is_finite()) {
            return Err(cfg_err(&format!("waypoints[{k}]"), "must be finite"));
        }
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds", "must not be empty"));
        }
        let mut seen = HashSet::new();
        for (k, s) in self.seeds.iter().enumerate() {
            if !seen.insert(*s) {
                return Err(cfg_err(
                    &format!("seeds[{k}]"),
                    format!("duplicate seed {s}"),
                ));
            }
        }
        if self.tick_limit == 0 {
            return Err(cfg_err("tick_limit", "must be >= 1"));
        }
        if !(self.dt > 0.0) {
            return Err(cfg_err("dt", "must be > 0"));
        }
        for (k, e) in self.events.iter().enumerate() {
            if let Event::KillRobots(ids) = &e.event {
                if let Some(bad) = ids.iter().find(|&&id| id >= self.robot_count) {
                    return Err(cfg_err(
                        &format!("events[{k}].event.kill_robots"),
                        format!(
                            "robot id {bad} out of range for {} robots",
                            self.robot_count
                        ),
                    ));
                }
            }
        }
        nested("energy", self.energy.validate())?;
        nested("sampler", self.sampler.validate())?;
        nested("sensor", self.sensor.validate())?;
        nested("physics", self.physics.validate())?;
        let arena = self.arena_polygon()?;
        let object = self.object_polygon_at_start()?;
        if object.vertices().iter().any(|&v| !arena.contains(v)) {
            return Err(cfg_err("start", "object does not fit inside the arena"));
        }
        Ok(())
    }

    pub fn arena_polygon(&self) -> Result<Polygon> {
        Polygon::rectangle(self.arena[0], self.arena[1])
    }

    fn object_polygon_at_start(&self) -> Result<Polygon> {
        Ok(self
            .object
            .polygon()?
            .transformed(self.start, self.orientation))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Parses and validates a config.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the initial world for one trial. Robots are placed uniformly
    /// at random in free space using the placement stream of `seed`.
    pub fn build_world(&self, seed: u64) -> Result<WorldState> {
        let arena = self.arena_polygon()?;
        let shape = self.object.polygon()?;
        let mut object = TransportObject::new(shape, self.start, self.object.mass, self.goal);
        object.orientation = self.orientation;
        object.waypoints = self.waypoints.clone();
        let object_poly = object.polygon();

        let mut rng = RngStream::with_domain(seed, 0, 0, Domain::Placement);
        let r = self.robot_radius;
        let (hw, hh) = (self.arena[0] / 2.0 - r, self.arena[1] / 2.0 - r);
        let mut robots: Vec<RobotState> = Vec::with_capacity(self.robot_count);
        for id in 0..self.robot_count {
            let mut placed = None;
            for _ in 0..PLACEMENT_ATTEMPTS {
                let p = Vec2::new(
                    -hw + 2.0 * hw * rng.uniform(),
                    -hh + 2.0 * hh * rng.uniform(),
                );
                let clear = |poly: &Polygon| {
                    let c = closest_point_on_polygon(p, poly);
                    !c.inside && c.distance >= r + PLACEMENT_MARGIN
                };
                let free = clear(&object_poly)
                    && self.obstacles.iter().all(clear)
                    && robots
                        .iter()
                        .all(|o| o.position.distance(p) >= o.radius + r + PLACEMENT_MARGIN);
                if free {
                    placed = Some(p);
                    break;
                }
            }
            let p = placed.ok_or_else(|| {
                cfg_err("robot_count", format!("no free space to place robot {id}"))
            })?;
            robots.push(RobotState::new(id, p, r));
        }
        Ok(
            WorldState::new(robots, Some(object), self.obstacles.clone(), arena, self.dt)?
                .with_seed(seed)
                .with_events(self.events.clone()),
        )
    }
}

fn base_config(
    name: &str,
    robot_count: usize,
    object: ObjectSpec,
    start: Vec2,
    goal: Vec2,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        robot_count,
        robot_radius: ROBOT_RADIUS,
        object,
        start,
        orientation: 0.0,
        goal,
        waypoints: Vec::new(),
        arena: default_arena(),
        obstacles: Vec::new(),
        events: Vec::new(),
        seeds: (0..DEFAULT_TRIALS).collect(),
        tick_limit: DEFAULT_TICK_LIMIT,
        dt: DEFAULT_DT,
        energy: EnergyParams::default(),
        sampler: SamplerParams::default(),
        sensor: SensorParams::default(),
        physics: PhysicsParams::default(),
    }
}

fn base_object() -> ObjectSpec {
    ObjectSpec {
        shape: ShapeKind::Rect,
        scale: 1.0,
        mass: BASE_MASS,
    }
}

/// Start and goal 2.6 m apart on the arena diagonal, from near one corner
/// toward the opposite one. Keeps both ends clear of the walls, which
/// also leaves room for doubled objects.
fn long_course() -> (Vec2, Vec2) {
    let d = Vec2::from_angle(FRAC_PI_4);
    (d * -1.3, d * 1.3)
}

fn long_config(name: &str, object: ObjectSpec) -> ScenarioConfig {
    let (s, g) = long_course();
    let mut c = base_config(name, 10, object, s, g);
    c.orientation = FRAC_PI_4;
    c
}

pub fn build_scenario(kind: &ScenarioKind) -> Result<ScenarioConfig> {
    let cfg = match kind {
        ScenarioKind::Scalability(n) => {
            if *n == 0 {
                return Err(Error::param("robots", "must be >= 1"));
            }
            base_config(
                "scalability",
                *n,
                base_object(),
                Vec2::new(-0.85, 0.0),
                Vec2::new(0.85, 0.0),
            )
        }
        ScenarioKind::IdealAdaptability => long_config("ideal", base_object()),
        ScenarioKind::FailureAdaptability => {
            let mut c = long_config("failure", base_object());
            c.events = vec![ScheduledEvent::new(
                Trigger::PushersAtLeast(4),
                Event::KillPushers(4),
            )];
            c
        }
        ScenarioKind::GoalChangeAdaptability => {
            let mut c = long_config("goal_change", base_object());
            // 1.3 m short of the goal, the goal moves 1.3 m back the other way,
            // which is where the object started
            c.events = vec![ScheduledEvent::new(
                Trigger::GoalDistanceBelow(1.3),
                Event::GoalChange(c.start),
            )];
            c
        }
        ScenarioKind::Robustness { shape, scale, mass } => {
            if !(*scale > 0.0 && *scale <= 2.0) {
                return Err(Error::param("scale", "must lie in (0, 2]"));
            }
            if !(*mass > 0.0) {
                return Err(Error::param("mass", "must be > 0"));
            }
            let object = ObjectSpec {
                shape: *shape,
                scale: *scale,
                mass: *mass,
            };
            long_config("robustness", object)
        }
        ScenarioKind::Waypoints(path) => {
            let Some((&first, rest)) = path.split_first() else {
                return Err(Error::param("waypoints", "need at least one waypoint"));
            };
            let mut c = l_corridor();
            c.goal = first;
            c.waypoints = rest.to_vec();
            c
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// L-shaped corridor: the object starts in the lower-left leg and is taken
/// around the corner into the upper-right leg.
pub fn l_corridor() -> ScenarioConfig {
    let mut c = base_config(
        "waypoints",
        10,
        base_object(),
        Vec2::new(-1.2, -1.2),
        Vec2::new(1.0, -1.2),
    );
    c.waypoints = vec![Vec2::new(1.2, 0.0), Vec2::new(1.2, 1.2)];
    c.obstacles =
        vec![Polygon::aabb(Vec2::new(-2.0, -0.4), Vec2::new(0.4, 2.0)).expect("static box")];
    c
}

pub fn l_corridor_waypoints() -> Vec<Vec2> {
    let c = l_corridor();
    std::iter::once(c.goal).chain(c.waypoints).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub outcome: Outcome,
    /// Seconds from the start of the trial to arrival (or to the cutoff).
    pub transport_time: f64,
    /// Seconds from the first tick any robot saw the object to arrival.
    pub detection_to_arrival: Option<f64>,
    pub distance_series: Vec<(u64, f64)>,
    pub object_speed_series: Vec<(u64, f64)>,
}

pub fn run_trial(config: &ScenarioConfig, seed: u64) -> Result<TrialResult> {
    run_trial_observed(config, seed, |_| Ok(()))
}

/// Like [`run_trial`], calling `observe` with the world after every tick.
pub fn run_trial_observed(
    config: &ScenarioConfig,
    seed: u64,
    mut observe: impl FnMut(&WorldState) -> Result<()>,
) -> Result<TrialResult> {
    let mut world = config.build_world(seed)?;
    let mut distance_series = Vec::new();
    let mut object_speed_series = Vec::new();
    let mut detected_at = None;
    let outcome = loop {
        match is_terminated(&world, &config.sensor, config.tick_limit) {
            Termination::Success => break Outcome::Success,
            Termination::Timeout(_) => break Outcome::Timeout,
            Termination::Running => {}
        }
        world = step(
            &world,
            &config.energy,
            &config.sampler,
            &config.sensor,
            &config.physics,
        )?;
        if detected_at.is_none() && world.robots.iter().any(|r| r.behavior != Behavior::Search) {
            detected_at = Some(world.tick);
        }
        if let Some(o) = &world.object {
            distance_series.push((world.tick, o.distance_to_goal()));
            object_speed_series.push((world.tick, o.speed()));
        }
        observe(&world)?;
    };
    let dt = config.dt;
    let end = world.tick;
    Ok(TrialResult {
        seed,
        outcome,
        transport_time: round_sig(end as f64 * dt),
        detection_to_arrival: match outcome {
            Outcome::Success => detected_at.map(|t| round_sig((end - t) as f64 * dt)),
            Outcome::Timeout => None,
        },
        distance_series,
        object_speed_series,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Number of successful trials the times are computed over.
    pub n: usize,
    /// NaN when no trial succeeded.
    pub mean_time: f64,
    /// NaN when fewer than two trials succeeded.
    pub ci95_halfwidth: f64,
    pub success_rate: f64,
}

impl SummaryStats {
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let times: Vec<f64> = trials
            .iter()
            .filter(|t| t.outcome == Outcome::Success)
            .map(|t| t.transport_time)
            .collect();
        let (mean_time, ci95_halfwidth) = match times.len() {
            0 => (f64::NAN, f64::NAN),
            1 => (times[0], f64::NAN),
            _ => mean_ci95(&times).expect("two or more values"),
        };
        let success_rate = if trials.is_empty() {
            0.0
        } else {
            times.len() as f64 / trials.len() as f64
        };
        Self {
            n: times.len(),
            mean_time,
            ci95_halfwidth,
            success_rate,
        }
    }
}

/// Runs one trial per seed, concurrently on the current rayon pool. Results
/// come back sorted by seed.
pub fn run_batch(
    config: &ScenarioConfig,
    seeds: &[u64],
) -> Result<(Vec<TrialResult>, SummaryStats)> {
    if seeds.is_empty() {
        return Err(Error::param("seeds", "must not be empty"));
    }
    let mut trials: Vec<TrialResult> = seeds
        .par_iter()
        .map(|&s| run_trial(config, s))
        .collect::<Result<_>>()?;
    trials.sort_by_key(|t| t.seed);
    let stats = SummaryStats::from_trials(&trials);
    Ok((trials, stats))
}

/// Sample mean and Student-t 95% confidence half-width.
pub fn mean_ci95(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .expect("dof >= 1")
        .inverse_cdf(0.975);
    Ok((mean, t * (var / nf).sqrt()))
}

/// Reference mean times, seconds, printed next to measured ones.
pub const REFERENCE_SCALABILITY: [(usize, f64); 4] =
    [(2, 829.0), (4, 593.0), (10, 324.0), (20, 278.0)];
pub const REFERENCE_IDEAL: f64 = 438.0;
pub const REFERENCE_FAILURE: f64 = 596.0;
pub const REFERENCE_GOAL_CHANGE: f64 = 449.0;
/// Allowed relative gap between the goal-change and ideal mean times.
pub const GOAL_CHANGE_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl TrendCheck {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

impl std::fmt::Display for TrendCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Strictly decreasing means along increasing robot counts, and a smaller
/// gain at the large end than at the small end. `means` is sorted by count.
pub fn scalability_trend(means: &[(usize, f64)]) -> Vec<TrendCheck> {
    let listing = means
        .iter()
        .map(|(n, m)| {
            let reference = REFERENCE_SCALABILITY
                .iter()
                .find(|(k, _)| k == n)
                .map(|p| p.1);
            match reference {
                Some(p) => format!("{n}: {m:.1}s (reference {p:.0}s)"),
                None => format!("{n}: {m:.1}s"),
            }
        })
        .collect::<Vec<_>>()
        .join(", ");
    let decreasing = means.len() >= 2 && means.windows(2).all(|w| w[1].1 < w[0].1);
    let mut checks = vec![TrendCheck::new(
        "scalability decreasing",
        decreasing,
        listing,
    )];
    if means.len() >= 4 {
        let first = means[0].1 - means[1].1;
        let last = means[means.len() - 2].1 - means[means.len() - 1].1;
        checks.push(TrendCheck::new(
            "scalability diminishing returns",
            first > last,
            format!(
                "gain {}->{} = {first:.1}s vs {}->{} = {last:.1}s",
                means[0].0,
                means[1].0,
                means[means.len() - 2].0,
                means[means.len() - 1].0
            ),
        ));
    }
    checks
}

pub fn adaptability_trend(ideal: f64, failure: f64, goal_change: f64) -> Vec<TrendCheck> {
    let gap = (goal_change - ideal).abs() / ideal;
    vec![
        TrendCheck::new(
            "failure slower than ideal",
            failure > ideal,
            format!("failure {failure:.1}s vs ideal {ideal:.1}s (reference {REFERENCE_FAILURE:.0} vs {REFERENCE_IDEAL:.0})"),
        ),
        TrendCheck::new(
            "goal change near ideal",
            gap <= GOAL_CHANGE_TOLERANCE,
            format!(
                "goal change {goal_change:.1}s vs ideal {ideal:.1}s, gap {:.1}% (reference {REFERENCE_GOAL_CHANGE:.0} vs {REFERENCE_IDEAL:.0})",
                gap * 100.0
            ),
        ),
    ]
}

/// One robustness cell: shape, mass and the mean transport time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobustnessCell {
    pub shape: ShapeKind,
    pub mass: f64,
    pub mean_time: f64,
}

/// Triangle slowest at the base mass, and doubling the mass slows every
/// shape down.
pub fn robustness_trend(cells: &[RobustnessCell]) -> Vec<TrendCheck> {
    let find = |shape: ShapeKind, mass: f64| {
        cells
            .iter()
            .find(|c| c.shape == shape && (c.mass - mass).abs() < 1e-12)
            .map(|c| c.mean_time)
            .unwrap_or(f64::NAN)
    };
    let tri = find(ShapeKind::Triangle, BASE_MASS);
    let rect = find(ShapeKind::Rect, BASE_MASS);
    let oct = find(ShapeKind::Octagon, BASE_MASS);
    let mut checks = vec![
        TrendCheck::new(
            "triangle slower than rectangle",
            tri > rect,
            format!("triangle {tri:.1}s vs rectangle {rect:.1}s"),
        ),
        TrendCheck::new(
            "triangle slower than octagon",
            tri > oct,
            format!("triangle {tri:.1}s vs octagon {oct:.1}s"),
        ),
    ];
    for shape in [ShapeKind::Rect, ShapeKind::Octagon, ShapeKind::Triangle] {
        let light = find(shape, BASE_MASS);
        let heavy = find(shape, 2.0 * BASE_MASS);
        checks.push(TrendCheck::new(
            &format!("{} heavier is slower", shape.name()),
            heavy > light,
            format!(
                "{:.1} kg {heavy:.1}s vs {:.1} kg {light:.1}s",
                2.0 * BASE_MASS,
                BASE_MASS
            ),
        ));
    }
    checks
}

/// Everything the `suite` command runs, with the trend verdicts.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub rows: Vec<(ScenarioConfig, SummaryStats)>,
    pub checks: Vec<TrendCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Optional overrides applied to every suite scenario.
#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub tick_limit: Option<u64>,
}

fn suite_batch(
    kind: &ScenarioKind,
    seeds: &[u64],
    opts: &SuiteOptions,
    rows: &mut Vec<(ScenarioConfig, SummaryStats)>,
) -> Result<SummaryStats> {
    let mut cfg = build_scenario(kind)?;
    cfg.seeds = seeds.to_vec();
    if let Some(t) = opts.tick_limit {
        cfg.tick_limit = t;
    }
    let (_, stats) = run_batch(&cfg, seeds)?;
    rows.push((cfg, stats.clone()));
    Ok(stats)
}

/// Runs the scalability, adaptability and robustness experiments and
/// evaluates their trends.
pub fn run_suite(
    seeds: &[u64],
    robustness_seeds: &[u64],
    opts: &SuiteOptions,
) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();

    let mut means = Vec::new();
    for n in [2, 4, 10, 20] {
        let stats = suite_batch(&ScenarioKind::Scalability(n), seeds, opts, &mut rows)?;
        if n == 10 {
            checks.push(TrendCheck::new(
                "transport success",
                stats.success_rate == 1.0,
                format!(
                    "10 robots: {}/{} trials reached the goal",
                    stats.n,
                    seeds.len()
                ),
            ));
        }
        means.push((n, stats.mean_time));
    }
    checks.extend(scalability_trend(&means));

    let ideal = suite_batch(&ScenarioKind::IdealAdaptability, seeds, opts, &mut rows)?;
    let failure = suite_batch(&ScenarioKind::FailureAdaptability, seeds, opts, &mut rows)?;
    let goal = suite_batch(
        &ScenarioKind::GoalChangeAdaptability,
        seeds,
        opts,
        &mut rows,
    )?;
    checks.extend(adaptability_trend(
        ideal.mean_time,
        failure.mean_time,
        goal.mean_time,
    ));

    let mut cells = Vec::new();
    for shape in [ShapeKind::Rect, ShapeKind::Octagon, ShapeKind::Triangle] {
        for mass in [BASE_MASS, 2.0 * BASE_MASS] {
            let kind = ScenarioKind::Robustness {
                shape,
                scale: 1.0,
                mass,
            };
            let stats = suite_batch(&kind, robustness_seeds, opts, &mut rows)?;
            cells.push(RobustnessCell {
                shape,
                mass,
                mean_time: stats.mean_time,
            });
        }
    }
    checks.extend(robustness_trend(&cells));

    Ok(SuiteReport { rows, checks })
}
