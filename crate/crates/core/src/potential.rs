//! Energy terms scoring a candidate velocity for one robot.
//!
//! Every pairwise interaction uses the exp-6 (Buckingham) well plus a
//! Coulomb tail:
//!
//! ```text
//! phi(r) = eps * [ 6/(a-6) * exp(a * (1 - r/r0)) - a/(a-6) * (r0/r)^6 ] + q / (4 pi eps0 r)
//! ```
//!
//! With `q = 0` the minimum sits exactly at `r0` with depth `-eps`. The sign
//! of the charge product `q` tilts the well toward attraction (`q < 0`) or
//! repulsion (`q > 0`). Kinetic terms are `m/2 * |V|^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Real;
use crate::sensing::Perception;

/// Distances below this are clamped before evaluating the potential.
pub const R_FLOOR: f64 = 1e-6;

/// Standoff selection for the robot-object interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Push,
    Circulate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct CBParams<S> {
    pub epsilon: S,
    pub r0: S,
    pub alpha: S,
    pub charge_product: S,
    pub eps0: S,
}

impl<S: Real> CBParams<S> {
    pub fn new(epsilon: S, r0: S, alpha: S, charge_product: S) -> Self {
        Self {
            epsilon,
            r0,
            alpha,
            charge_product,
            eps0: S::one(),
        }
    }

    pub fn with_r0(self, r0: S) -> Self {
        Self { r0, ..self }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.epsilon > S::zero()) {
            return Err(Error::param(&format!("{field}.epsilon"), "must be > 0"));
        }
        if !(self.r0 > S::zero()) {
            return Err(Error::param(&format!("{field}.r0"), "must be > 0"));
        }
        if !(self.alpha > S::lit(6.0)) {
            return Err(Error::param(&format!("{field}.alpha"), "must be > 6"));
        }
        if !(self.eps0 > S::zero()) {
            return Err(Error::param(&format!("{field}.eps0"), "must be > 0"));
        }
        if !self.charge_product.is_finite() {
            return Err(Error::param(
                &format!("{field}.charge_product"),
                "must be finite",
            ));
        }
        Ok(())
    }

    #[inline]
    fn coulomb_k(&self) -> S {
        self.charge_product / (S::lit(4.0) * S::PI() * self.eps0)
    }
}

/// Exp-6 plus Coulomb potential at distance `r`.
pub fn cb_potential<S: Real>(r: S, p: &CBParams<S>) -> Result<S> {
    if !(r > S::zero()) {
        return Err(Error::NonPositiveDistance(r.as_f64()));
    }
    Ok(cb_energy(r, p))
}

/// Infallible variant: distances are clamped to [`R_FLOOR`].
#[inline]
pub fn cb_energy<S: Real>(r: S, p: &CBParams<S>) -> S {
    let r = r.max(S::lit(R_FLOOR));
    let a = p.alpha;
    let six = S::lit(6.0);
    let x = p.r0 / r;
    let x3 = x * x * x;
    let well = six / (a - six) * (a * (S::one() - r / p.r0)).exp() - a / (a - six) * x3 * x3;
    p.epsilon * well + p.coulomb_k() / r
}

/// Analytic `d phi / d r`.
pub fn cb_derivative<S: Real>(r: S, p: &CBParams<S>) -> S {
    let r = r.max(S::lit(R_FLOOR));
    let a = p.alpha;
    let six = S::lit(6.0);
    let x = p.r0 / r;
    let x3 = x * x * x;
    let exp_term = -six * a / ((a - six) * p.r0) * (a * (S::one() - r / p.r0)).exp();
    let pow_term = six * a / ((a - six) * r) * x3 * x3;
    p.epsilon * (exp_term + pow_term) - p.coulomb_k() / (r * r)
}

/// Radius of the barrier top on the inner side of the well.
///
/// Below it the `-(r0/r)^6` term takes over and the exp-6 form collapses
/// toward minus infinity. Energies used for sampling hold the potential
/// constant inside this radius so a predicted pose that overlaps an object
/// point is never rewarded.
pub fn core_radius<S: Real>(p: &CBParams<S>) -> S {
    let floor = S::lit(R_FLOOR);
    let mut hi = p.r0;
    while cb_derivative(hi, p) >= S::zero() && hi > floor {
        hi *= S::lit(0.9);
    }
    let mut lo = floor;
    for _ in 0..100 {
        let mid = (lo + hi) * S::lit(0.5);
        if cb_derivative(mid, p) > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * S::lit(0.5)
}

/// Potential with the collapse inside [`core_radius`] cut off.
#[derive(Clone, Copy, Debug)]
struct CappedCB<S> {
    p: CBParams<S>,
    core: S,
}

impl<S: Real> CappedCB<S> {
    fn new(p: CBParams<S>) -> Self {
        Self {
            p,
            core: core_radius(&p),
        }
    }

    #[inline]
    fn at(&self, r: S) -> S {
        cb_energy(r.max(self.core), &self.p)
    }
}

#[inline]
pub fn kinetic_energy<S: Real>(v: Vec2<S>, mass: S) -> S {
    S::lit(0.5) * mass * v.dot(v)
}

pub fn neighbor_velocity_sum<S: Real>(relative_velocities: &[Vec2<S>]) -> Vec2<S> {
    relative_velocities.iter().copied().sum()
}

/// Sum over gradient vectors of `(gradient - candidate_v)`.
pub fn movearound_mismatch<S: Real>(
    ordered_gradients: &[Vec2<S>],
    candidate_v: Vec2<S>,
) -> Vec2<S> {
    ordered_gradients.iter().map(|&g| g - candidate_v).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct EnergyParams<S> {
    /// Attractive (`charge_product < 0`) cohesion well between robots.
    pub robot_robot: CBParams<S>,
    /// Repulsive (`charge_product > 0`) interaction with obstacle points.
    pub robot_obstacle: CBParams<S>,
    /// Object interaction; its `r0` is replaced by the mode's standoff.
    pub robot_object: CBParams<S>,
    pub delta_circulate: S,
    pub delta_push: S,
    pub rho: S,
    pub group_mass: S,
    pub v_max: S,
}

impl<S: Real> Default for EnergyParams<S> {
    fn default() -> Self {
        let l = S::lit;
        Self {
            robot_robot: CBParams::new(l(40.0), l(0.25), l(12.0), l(-10.0)),
            robot_obstacle: CBParams::new(l(20.0), l(0.02), l(12.0), l(10.0)),
            robot_object: CBParams::new(l(20.0), l(0.25), l(12.0), l(-10.0)),
            delta_circulate: l(0.25),
            delta_push: l(0.03),
            rho: l(0.4),
            group_mass: l(20.0),
            v_max: l(0.12),
        }
    }
}

impl<S: Real> EnergyParams<S> {
    pub fn validate(&self) -> Result<()> {
        self.robot_robot.validate("robot_robot")?;
        self.robot_obstacle.validate("robot_obstacle")?;
        self.robot_object.validate("robot_object")?;
        if !(self.delta_push > S::zero() && self.delta_push < self.delta_circulate) {
            return Err(Error::param(
                "delta_push",
                "must satisfy 0 < delta_push < delta_circulate",
            ));
        }
        if !(self.rho > S::zero() && self.rho <= S::one()) {
            return Err(Error::param("rho", "must lie in (0, 1]"));
        }
        if !(self.group_mass > S::zero()) {
            return Err(Error::param("group_mass", "must be > 0"));
        }
        if !(self.v_max > S::zero()) {
            return Err(Error::param("v_max", "must be > 0"));
        }
        Ok(())
    }

    pub fn object_params(&self, mode: Mode) -> CBParams<S> {
        let delta = match mode {
            Mode::Push => self.delta_push,
            Mode::Circulate => self.delta_circulate,
        };
        self.robot_object.with_r0(delta)
    }
}

/// Per-robot energy with everything that does not depend on the candidate
/// velocity hoisted out, so a sampler can evaluate it many times per tick.
#[derive(Clone, Debug)]
pub struct LocalEnergy<S> {
    self_pose: Vec2<S>,
    dt: S,
    object: CappedCB<S>,
    obstacle: CappedCB<S>,
    robot: CappedCB<S>,
    /// Surface-following term is only active while circulating.
    follow_surface: bool,
    object_points: Vec<Vec2<S>>,
    obstacle_points: Vec<Vec2<S>>,
    /// `K(q_j, v_j) - q_i` for every neighbor.
    neighbor_offsets: Vec<Vec2<S>>,
    neighbor_velocity_total: Vec2<S>,
    neighbor_count: S,
    gradient_total: Vec2<S>,
    gradient_count: S,
    mass: S,
    v_max: S,
}

impl<S: Real> LocalEnergy<S> {
    pub fn new(perception: &Perception<S>, mode: Mode, params: &EnergyParams<S>, dt: S) -> Self {
        let neighbor_offsets = perception
            .neighbors
            .iter()
            .map(|n| n.relative_position + n.velocity * dt)
            .collect();
        Self {
            self_pose: perception.self_pose,
            dt,
            object: CappedCB::new(params.object_params(mode)),
            obstacle: CappedCB::new(params.robot_obstacle),
            robot: CappedCB::new(params.robot_robot),
            follow_surface: mode == Mode::Circulate,
            object_points: perception.object_points.clone(),
            obstacle_points: perception.obstacle_points.clone(),
            neighbor_offsets,
            neighbor_velocity_total: perception.neighbors.iter().map(|n| n.velocity).sum(),
            neighbor_count: S::from_usize_lossy(perception.neighbors.len()),
            gradient_total: perception.surface_gradients.iter().copied().sum(),
            gradient_count: S::from_usize_lossy(perception.surface_gradients.len()),
            mass: params.group_mass,
            v_max: params.v_max,
        }
    }

    /// Energy of moving with velocity `v` for one time step.
    pub fn energy(&self, v: Vec2<S>) -> S {
        let step = v * self.dt;
        let predicted = self.self_pose + step;
        let mut h = S::zero();
        for &o in &self.object_points {
            h += self.object.at(predicted.distance(o));
        }
        if self.follow_surface {
            // sum_j (g_j - v) = G - n v
            let q = self.gradient_total - v * self.gradient_count;
            h += kinetic_energy(q, self.mass);
        }
        for &w in &self.obstacle_points {
            h += self.obstacle.at(predicted.distance(w));
        }
        for &off in &self.neighbor_offsets {
            h += self.robot.at((step - off).norm());
        }
        // sum_j (v_j - v)
        let rel = self.neighbor_velocity_total - v * self.neighbor_count;
        h += kinetic_energy(rel, self.mass);
        let deficit = self.v_max - v.norm();
        h += S::lit(0.5) * self.mass * deficit * deficit;
        h
    }
}

/// Total energy of a candidate velocity given a perception snapshot.
pub fn total_energy<S: Real>(
    candidate_v: Vec2<S>,
    perception: &Perception<S>,
    mode: Mode,
    params: &EnergyParams<S>,
    dt: S,
) -> S {
    LocalEnergy::new(perception, mode, params, dt).energy(candidate_v)
}
