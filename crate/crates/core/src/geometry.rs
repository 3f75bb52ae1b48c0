//! Planar primitives used by sensing and contact resolution.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Collinearity tolerance for side tests, in square meters.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Vec2<S> {
    #[inline]
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    /// Unit vector at `angle` radians from the +x axis.
    #[inline]
    pub fn from_angle(angle: S) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> S {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> S {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > S::epsilon() {
            Some(self / n)
        } else {
            None
        }
    }

    /// Counterclockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotated(self, angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn angle(self) -> S {
        self.y.atan2(self.x)
    }

    /// Rescales the vector so its norm does not exceed `max`.
    pub fn clamp_norm(self, max: S) -> Self {
        let n = self.norm();
        if n > max && n > S::zero() {
            self * (max / n)
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<S: Real> Add for Vec2<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Real> AddAssign for Vec2<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<S: Real> Sub for Vec2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Real> SubAssign for Vec2<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl<S: Real> Mul<S> for Vec2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<S: Real> Div<S> for Vec2<S> {
    type Output = Self;
    #[inline]
    fn div(self, k: S) -> Self {
        Self::new(self.x / k, self.y / k)
    }
}

impl<S: Real> Neg for Vec2<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<S: Real> std::iter::Sum for Vec2<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, v| acc + v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    On,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::On => Side::On,
        }
    }
}

/// Which side of the directed line `a -> b` the point `p` lies on.
pub fn side_of_segment<S: Real>(a: Vec2<S>, b: Vec2<S>, p: Vec2<S>) -> Result<Side> {
    if a == b {
        return Err(Error::DegenerateSegment);
    }
    let c = (b - a).cross(p - a);
    Ok(if c.abs() <= S::lit(EPS_GEOM) {
        Side::On
    } else if c > S::zero() {
        Side::Left
    } else {
        Side::Right
    })
}

/// Simple polygon with counterclockwise vertex order.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Real")]
pub struct Polygon<S> {
    vertices: Vec<Vec2<S>>,
}

impl<'de, S: Real> Deserialize<'de> for Polygon<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "S: Real")]
        struct Raw<S> {
            vertices: Vec<Vec2<S>>,
        }
        let raw = Raw::<S>::deserialize(d)?;
        Polygon::new(raw.vertices).map_err(serde::de::Error::custom)
    }
}

impl<S: Real> Polygon<S> {
    /// Validates the ring and normalizes it to counterclockwise order.
    pub fn new(mut vertices: Vec<Vec2<S>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let area = signed_area(&vertices);
        if area.abs() <= S::lit(EPS_GEOM) {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        if area < S::zero() {
            vertices.reverse();
        }
        let poly = Self { vertices };
        if !poly.is_simple() {
            return Err(Error::InvalidPolygon("self-intersecting".into()));
        }
        Ok(poly)
    }

    /// Axis-aligned rectangle centered at the origin.
    pub fn rectangle(width: S, height: S) -> Result<Self> {
        let hw = width / S::lit(2.0);
        let hh = height / S::lit(2.0);
        Self::new(vec![
            Vec2::new(-hw, -hh),
            Vec2::new(hw, -hh),
            Vec2::new(hw, hh),
            Vec2::new(-hw, hh),
        ])
    }

    /// Axis-aligned box spanning `min`..`max`.
    pub fn aabb(min: Vec2<S>, max: Vec2<S>) -> Result<Self> {
        Self::new(vec![
            min,
            Vec2::new(max.x, min.y),
            max,
            Vec2::new(min.x, max.y),
        ])
    }

    /// Regular `n`-gon centered at the origin with the given circumradius.
    /// The first vertex sits at `phase` radians.
    pub fn regular(n: usize, circumradius: S, phase: S) -> Result<Self> {
        let step = S::TAU() / S::from_usize_lossy(n);
        Self::new(
            (0..n)
                .map(|k| Vec2::from_angle(phase + step * S::from_usize_lossy(k)) * circumradius)
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Vec2<S>] {
        &self.vertices
    }

    /// Directed edges `(v_k, v_{k+1})`, closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2<S>, Vec2<S>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn area(&self) -> S {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Vec2<S> {
        let mut cx = S::zero();
        let mut cy = S::zero();
        for (a, b) in self.edges() {
            let c = a.cross(b);
            cx += (a.x + b.x) * c;
            cy += (a.y + b.y) * c;
        }
        let k = S::lit(6.0) * self.area();
        Vec2::new(cx / k, cy / k)
    }

    /// Rotation about the origin followed by translation. Rigid motions
    /// preserve validity, so no re-check is needed.
    pub fn transformed(&self, offset: Vec2<S>, angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vec2::new(c * v.x - s * v.y + offset.x, s * v.x + c * v.y + offset.y))
                .collect(),
        }
    }

    pub fn scaled(&self, k: S) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v * k).collect(),
        }
    }

    /// Even-odd point containment (boundary points may go either way).
    pub fn contains(&self, p: Vec2<S>) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|k| {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % n];
            let c = self.vertices[(k + 2) % n];
            (b - a).cross(c - b) >= -S::lit(EPS_GEOM)
        })
    }

    /// Largest distance from the centroid to a vertex.
    pub fn bounding_radius(&self) -> S {
        let c = self.centroid();
        self.vertices
            .iter()
            .map(|v| v.distance(c))
            .fold(S::zero(), S::max)
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                // adjacent edges share a vertex
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return false;
                }
            }
        }
        true
    }
}

fn signed_area<S: Real>(vertices: &[Vec2<S>]) -> S {
    let n = vertices.len();
    let twice: S = (0..n)
        .map(|k| vertices[k].cross(vertices[(k + 1) % n]))
        .sum();
    twice / S::lit(2.0)
}

fn segments_intersect<S: Real>(p1: Vec2<S>, p2: Vec2<S>, q1: Vec2<S>, q2: Vec2<S>) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    ((d1 > S::zero()) != (d2 > S::zero()) && d1 != S::zero() && d2 != S::zero())
        && ((d3 > S::zero()) != (d4 > S::zero()) && d3 != S::zero() && d4 != S::zero())
}

/// Distance along the ray to the nearest polygon edge, if any.
pub fn raycast_distance<S: Real>(
    origin: Vec2<S>,
    direction: Vec2<S>,
    poly: &Polygon<S>,
) -> Option<S> {
    let tol = S::lit(EPS_GEOM);
    let mut best: Option<S> = None;
    for (a, b) in poly.edges() {
        let e = b - a;
        let denom = direction.cross(e);
        if denom.abs() <= tol * e.norm() {
            continue;
        }
        let w = a - origin;
        let t = w.cross(e) / denom;
        let u = w.cross(direction) / denom;
        if t >= S::zero() && u >= -tol && u <= S::one() + tol && best.is_none_or(|bt| t < bt) {
            best = Some(t);
        }
    }
    best
}

/// Nearest intersection point of a ray with the polygon boundary.
pub fn raycast_polygon<S: Real>(
    origin: Vec2<S>,
    direction: Vec2<S>,
    poly: &Polygon<S>,
) -> Option<Vec2<S>> {
    raycast_distance(origin, direction, poly).map(|t| origin + direction * t)
}

/// Distance along the ray to a disc, if the ray hits it.
pub fn raycast_circle<S: Real>(
    origin: Vec2<S>,
    direction: Vec2<S>,
    center: Vec2<S>,
    radius: S,
) -> Option<S> {
    let oc = origin - center;
    let b = oc.dot(direction);
    let c = oc.norm_sq() - radius * radius;
    let disc = b * b - c;
    if disc < S::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = -b - sq;
    let t1 = -b + sq;
    if t0 >= S::zero() {
        Some(t0)
    } else if t1 >= S::zero() {
        Some(t1)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestPoint<S> {
    pub point: Vec2<S>,
    pub distance: S,
    /// Unit normal pointing into the polygon interior.
    pub inward_normal: Vec2<S>,
    /// Whether the query point lies strictly inside the polygon.
    pub inside: bool,
}

fn closest_on_segment<S: Real>(p: Vec2<S>, a: Vec2<S>, b: Vec2<S>) -> Vec2<S> {
    let e = b - a;
    let len2 = e.norm_sq();
    if len2 == S::zero() {
        return a;
    }
    let t = ((p - a).dot(e) / len2).max(S::zero()).min(S::one());
    a + e * t
}

/// Nearest boundary point of the polygon to `p`.
pub fn closest_point_on_polygon<S: Real>(p: Vec2<S>, poly: &Polygon<S>) -> ClosestPoint<S> {
    let mut best_point = poly.vertices[0];
    let mut best_d2 = S::infinity();
    let mut best_edge = (poly.vertices[0], poly.vertices[1]);
    for (a, b) in poly.edges() {
        let q = closest_on_segment(p, a, b);
        let d2 = (q - p).norm_sq();
        if d2 < best_d2 {
            best_d2 = d2;
            best_point = q;
            best_edge = (a, b);
        }
    }
    let distance = best_d2.sqrt();
    let inside = poly.contains(p);
    let edge_normal = (best_edge.1 - best_edge.0)
        .perp()
        .normalized()
        .unwrap_or_else(|| Vec2::new(S::one(), S::zero()));
    let inward_normal = if inside || distance <= S::lit(EPS_GEOM) {
        edge_normal
    } else {
        ((best_point - p) / distance)
            .normalized()
            .unwrap_or(edge_normal)
    };
    ClosestPoint {
        point: best_point,
        distance,
        inward_normal,
        inside,
    }
}

/// Minimal translation that separates `b` from `a` (apply to `b`), for
/// convex polygons. `None` when they do not overlap.
pub fn convex_separation<S: Real>(a: &Polygon<S>, b: &Polygon<S>) -> Option<Vec2<S>> {
    let mut best_depth = S::infinity();
    let mut best_axis = Vec2::zero();
    for poly in [a, b] {
        for (p, q) in poly.edges() {
            let axis = match (q - p).perp().normalized() {
                Some(n) => n,
                None => continue,
            };
            let (amin, amax) = project(a, axis);
            let (bmin, bmax) = project(b, axis);
            let overlap = amax.min(bmax) - amin.max(bmin);
            if overlap <= S::zero() {
                return None;
            }
            if overlap < best_depth {
                best_depth = overlap;
                // push b away from a along the axis
                let dir = if (bmin + bmax) >= (amin + amax) {
                    axis
                } else {
                    -axis
                };
                best_axis = dir;
            }
        }
    }
    Some(best_axis * best_depth)
}

fn project<S: Real>(poly: &Polygon<S>, axis: Vec2<S>) -> (S, S) {
    poly.vertices
        .iter()
        .fold((S::infinity(), S::neg_infinity()), |(lo, hi), v| {
            let d = v.dot(axis);
            (lo.min(d), hi.max(d))
        })
}
