//! Planar primitives and predicates.
//!
//! Every equality-like test goes through [`Tolerance`], which scales an
//! absolute floor by the size of the objects being compared.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate circle: input points are collinear")]
    DegenerateCircle,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("points are not concyclic (max radial deviation {deviation:e})")]
    NotConcyclic { deviation: f64 },
    #[error("points do not form a pseudo-polygon of any regular polygon")]
    NotPseudoPolygon,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point ({x}, {y})");
        Point { x, y }
    }

    /// Point at `radius` from `center` in direction `angle` (radians, ccw from +x).
    pub fn polar(center: Point, radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(center.x + radius * c, center.y + radius * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Angle of the vector in (-π, π].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point, s: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * s, self.y + (o.y - self.y) * s)
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn unit(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| Point::new(self.x / n, self.y / n))
    }

    /// Rotation by `theta` about the origin (counter-clockwise for positive angles).
    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Shared tolerance policy: a length `l` is "zero at scale `s`" when
/// `l < eps_abs + eps_rel * s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_rel: f64,
    pub eps_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_rel: 1e-9, eps_abs: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps_rel: f64, eps_abs: f64) -> Result<Self, GeomError> {
        if !(eps_rel > 0.0 && eps_abs > 0.0) {
            return Err(GeomError::InvalidTolerance("both epsilons must be strictly positive".into()));
        }
        if eps_rel >= 1e-3 {
            return Err(GeomError::InvalidTolerance(format!("eps_rel {eps_rel} must be below 1e-3")));
        }
        Ok(Tolerance { eps_rel, eps_abs })
    }

    /// Length threshold at the given scale.
    pub fn scaled(&self, scale: f64) -> f64 {
        self.eps_abs + self.eps_rel * scale.abs()
    }

    /// Angular threshold (radians) used for gap comparisons.
    pub fn angle_eps(&self) -> f64 {
        self.eps_rel.max(self.eps_abs) * 1e3
    }

    pub fn same_point(&self, p: Point, q: Point, scale: f64) -> bool {
        p.dist(q) <= self.scaled(scale)
    }
}

/// Distance from `p` to the infinite line through `a` and `b` (`a != b`).
pub fn line_distance(a: Point, b: Point, p: Point) -> f64 {
    let d = b - a;
    (d.cross(p - a)).abs() / d.norm()
}

/// Three points are collinear when some point lies within tolerance of the
/// line through the other two, the tolerance being scaled by the triple's
/// diameter. Coincident points count as collinear.
pub fn collinear(p: Point, q: Point, r: Point, tol: Tolerance) -> bool {
    let (pq, qr, rp) = (p.dist(q), q.dist(r), r.dist(p));
    let diam = pq.max(qr).max(rp);
    if pq.min(qr).min(rp) <= tol.eps_abs {
        return true;
    }
    let limit = tol.scaled(diam);
    line_distance(p, q, r) < limit || line_distance(q, r, p) < limit || line_distance(r, p, q) < limit
}

/// `candidate` sits strictly inside the open segment from `observer` to `target`.
pub fn blocks(observer: Point, target: Point, candidate: Point, tol: Tolerance) -> bool {
    let d = target - observer;
    let len = d.norm();
    if len <= tol.eps_abs {
        return false;
    }
    if line_distance(observer, target, candidate) >= tol.scaled(len) {
        return false;
    }
    let along = d.dot(candidate - observer) / len;
    let margin = tol.eps_abs;
    along > margin && along < len - margin
}

pub fn circumcircle(p: Point, q: Point, r: Point) -> Result<(Point, f64), GeomError> {
    if collinear(p, q, r, Tolerance::default()) {
        return Err(GeomError::DegenerateCircle);
    }
    // Solve relative to p for better conditioning.
    let b = q - p;
    let c = r - p;
    let d = 2.0 * b.cross(c);
    let b2 = b.dot(b);
    let c2 = c.dot(c);
    let ux = (c.y * b2 - b.y * c2) / d;
    let uy = (b.x * c2 - c.x * b2) / d;
    let center = Point::new(p.x + ux, p.y + uy);
    let radius = (center.dist(p) + center.dist(q) + center.dist(r)) / 3.0;
    Ok((center, radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }

    /// Orientation of the turn `a -> b -> c`, `None` when (numerically) straight.
    pub fn of(a: Point, b: Point, c: Point) -> Option<Self> {
        let z = (b - a).cross(c - a);
        if z > 0.0 {
            Some(Orientation::Ccw)
        } else if z < 0.0 {
            Some(Orientation::Cw)
        } else {
            None
        }
    }
}

pub fn rotate_about(p: Point, center: Point, theta: f64, orientation: Orientation) -> Point {
    center + (p - center).rotated(orientation.sign() * theta)
}

/// Normalizes an angle into [0, 2π).
pub fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularPolygon {
    pub center: Point,
    pub radius: f64,
    pub n: usize,
    pub phase: f64,
}

impl RegularPolygon {
    pub fn new(center: Point, radius: f64, n: usize, phase: f64) -> Self {
        assert!(n >= 3, "a regular polygon needs at least 3 vertices");
        assert!(radius > 0.0, "radius must be positive");
        RegularPolygon { center, radius, n, phase: norm_angle(phase) }
    }

    pub fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn vertex(&self, k: usize) -> Point {
        Point::polar(self.center, self.radius, self.phase + self.step() * k as f64)
    }

    pub fn vertices(&self) -> Vec<Point> {
        (0..self.n).map(|k| self.vertex(k)).collect()
    }

    pub fn edge_length(&self) -> f64 {
        2.0 * self.radius * (PI / self.n as f64).sin()
    }

    /// Largest signed distance of `x` beyond an edge line (positive = outside).
    pub fn outward_distance(&self, x: Point) -> f64 {
        let vs = self.vertices();
        (0..self.n)
            .map(|k| {
                let a = vs[k];
                let b = vs[(k + 1) % self.n];
                // Vertices run counter-clockwise, so the interior is on the left.
                -(b - a).cross(x - a) / a.dist(b)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the vertex `p` sits on, if any.
    pub fn vertex_index(&self, p: Point, tol: Tolerance) -> Option<usize> {
        let eps = tol.scaled(2.0 * self.radius);
        (0..self.n).find(|&k| self.vertex(k).dist(p) <= eps)
    }

    /// Same polygon up to the choice of starting vertex.
    pub fn same_as(&self, other: &RegularPolygon, tol: Tolerance) -> bool {
        if self.n != other.n {
            return false;
        }
        let scale = 2.0 * self.radius.max(other.radius);
        if !tol.same_point(self.center, other.center, scale) || (self.radius - other.radius).abs() > tol.scaled(scale) {
            return false;
        }
        let v = other.vertex(0);
        self.vertex_index(v, tol).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoPolygon {
    pub members: Vec<Point>,
    pub polygon: RegularPolygon,
}

impl PseudoPolygon {
    /// Vertex index of every member, in input order.
    pub fn indices(&self, tol: Tolerance) -> Vec<usize> {
        self.members
            .iter()
            .map(|&p| self.polygon.vertex_index(p, tol).expect("member sits on a vertex"))
            .collect()
    }
}

fn best_triple(points: &[Point]) -> (usize, usize, usize) {
    let i = 0;
    let j = (1..points.len())
        .max_by(|&a, &b| points[i].dist(points[a]).total_cmp(&points[i].dist(points[b])))
        .unwrap_or(1);
    let k = (0..points.len())
        .filter(|&k| k != i && k != j)
        .max_by(|&a, &b| {
            let area = |k: usize| (points[j] - points[i]).cross(points[k] - points[i]).abs();
            area(a).total_cmp(&area(b))
        })
        .unwrap_or(2);
    (i, j, k)
}

/// Circle through a set of points, with the largest radial deviation.
pub fn fit_circle(points: &[Point]) -> Result<(Point, f64, f64), GeomError> {
    if points.len() < 3 {
        return Err(GeomError::TooFewPoints { needed: 3, got: points.len() });
    }
    let (i, j, k) = best_triple(points);
    let (center, radius) = circumcircle(points[i], points[j], points[k])?;
    let dev = points.iter().map(|p| (p.dist(center) - radius).abs()).fold(0.0, f64::max);
    Ok((center, radius, dev))
}

pub fn concyclic(points: &[Point], tol: Tolerance) -> Option<(Point, f64)> {
    let (center, radius, dev) = fit_circle(points).ok()?;
    (dev <= tol.scaled(2.0 * radius)).then_some((center, radius))
}

/// Recovers the unique regular polygon a pseudo-polygon was drawn from.
pub fn associated_polygon(members: &[Point], tol: Tolerance) -> Result<PseudoPolygon, GeomError> {
    let (center, radius, dev) = fit_circle(members)?;
    let scale = 2.0 * radius;
    if dev > tol.scaled(scale) {
        return Err(GeomError::NotConcyclic { deviation: dev });
    }
    let m = members.len();
    let mut angles: Vec<f64> = members.iter().map(|&p| norm_angle((p - center).angle())).collect();
    angles.sort_by(f64::total_cmp);
    let min_gap = (0..m)
        .map(|i| {
            let next = if i + 1 == m { angles[0] + TAU } else { angles[i + 1] };
            next - angles[i]
        })
        .fold(f64::INFINITY, f64::min);
    // More than half of the vertices: n < 2m.
    let max_n = 2 * m - 1;
    let guess = (TAU / min_gap).round() as usize;
    let mut candidates = vec![guess];
    candidates.extend((3..=max_n).filter(|&n| n != guess));

    let eps = tol.scaled(scale);
    for n in candidates {
        if n < 3 || n < m || n > max_n {
            continue;
        }
        let step = TAU / n as f64;
        let anchor = angles[0];
        let mut slots = Vec::with_capacity(m);
        let fits = angles.iter().all(|&a| {
            let k = (a - anchor) / step;
            let kr = k.round();
            slots.push((kr as i64).rem_euclid(n as i64) as usize);
            (k - kr).abs() * step * radius <= eps
        });
        if !fits {
            continue;
        }
        slots.sort_unstable();
        slots.dedup();
        if slots.len() != m {
            continue;
        }
        let adjacent = slots.iter().any(|&s| slots.binary_search(&((s + 1) % n)).is_ok());
        if !adjacent {
            continue;
        }
        let phase = anchor.rem_euclid(step);
        let polygon = RegularPolygon::new(center, radius, n, phase);
        return Ok(PseudoPolygon { members: members.to_vec(), polygon });
    }
    Err(GeomError::NotPseudoPolygon)
}

/// Membership in the safe zone of a regular polygon.
pub fn safe_zone_contains(poly: &RegularPolygon, x: Point, tol: Tolerance) -> bool {
    let scale = poly.radius.max(x.dist(poly.center));
    // External to the polygon.
    if poly.outward_distance(x) <= tol.scaled(scale) {
        return false;
    }
    let vs = poly.vertices();
    let n = poly.n;
    // Not aligned with any two vertices.
    for i in 0..n {
        for j in (i + 1)..n {
            if collinear(vs[i], vs[j], x, tol) {
                return false;
            }
        }
    }
    // Not on the perpendicular bisector of any edge.
    for k in 0..n {
        let a = vs[k];
        let b = vs[(k + 1) % n];
        let off = (b - a).dot(x - a.midpoint(b)).abs() / a.dist(b);
        if off < tol.scaled(scale) {
            return false;
        }
    }
    // At least one edge length away from every vertex.
    let edge = poly.edge_length();
    vs.iter().all(|v| v.dist(x) >= edge - tol.scaled(edge))
}

/// Points sorted counter-clockwise around a center, with the gap structure.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularOrder {
    /// Input indices in counter-clockwise order, starting from the smallest angle in [0, 2π).
    pub order: Vec<usize>,
    /// Angle in [0, 2π) of each entry of `order`.
    pub angles: Vec<f64>,
    /// `gaps[i]` is the ccw gap from `order[i]` to `order[i + 1]` (cyclically).
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    /// Input indices `(from, to)` of the minimal gap, taken counter-clockwise.
    pub min_pair: (usize, usize),
    /// Position in `order` where the minimal gap starts.
    pub min_pos: usize,
    /// Another gap ties the minimum within angular tolerance.
    pub ambiguous: bool,
}

impl AngularOrder {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Gap starting at order position `pos`, cyclically.
    pub fn gap_at(&self, pos: isize) -> f64 {
        let n = self.gaps.len() as isize;
        self.gaps[pos.rem_euclid(n) as usize]
    }
}

pub fn angular_order(points: &[Point], center: Point, tol: Tolerance) -> Option<AngularOrder> {
    if points.len() < 2 {
        return None;
    }
    let mut idx: Vec<(usize, f64)> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, norm_angle((p - center).angle())))
        .collect();
    idx.sort_by(|a, b| a.1.total_cmp(&b.1));
    let n = idx.len();
    let gaps: Vec<f64> = (0..n)
        .map(|i| {
            let next = if i + 1 == n { idx[0].1 + TAU } else { idx[i + 1].1 };
            next - idx[i].1
        })
        .collect();
    let (min_pos, &min_gap) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let eps = tol.angle_eps();
    let ambiguous = gaps.iter().enumerate().any(|(i, &g)| i != min_pos && (g - min_gap).abs() <= eps);
    Some(AngularOrder {
        order: idx.iter().map(|e| e.0).collect(),
        angles: idx.iter().map(|e| e.1).collect(),
        min_pair: (idx[min_pos].0, idx[(min_pos + 1) % n].0),
        min_pos,
        gaps,
        min_gap,
        ambiguous,
    })
}

/// Closest approach of two points moving linearly over the same time window
/// `[0, 1]` (relative motion is linear, so the distance is convex).
pub fn closest_approach(a0: Point, a1: Point, b0: Point, b1: Point) -> (f64, f64) {
    let d0 = a0 - b0;
    let dv = (a1 - a0) - (b1 - b0);
    let vv = dv.dot(dv);
    let s = if vv == 0.0 { 0.0 } else { (-d0.dot(dv) / vv).clamp(0.0, 1.0) };
    ((d0 + dv * s).norm(), s)
}

/// Closed segments `ab` and `cd` share a point (within tolerance).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point, tol: Tolerance) -> bool {
    segment_distance(a, b, c, d) <= tol.scaled(a.dist(b).max(c.dist(d)))
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let s = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * s)
}

pub fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn collinear_examples() {
        assert!(collinear(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0), tol()));
        assert!(!collinear(Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0), tol()));
        assert!(collinear(Point::new(0.0, 0.0), Point::new(2.0, 1e-12), Point::new(4.0, 0.0), tol()));
        // symmetric in argument order
        let (a, b, c) = (Point::new(0.3, 0.1), Point::new(2.0, 1e-12), Point::new(-1.0, 4.0));
        let v = collinear(a, b, c, tol());
        for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            assert_eq!(collinear(p, q, r, tol()), v);
        }
    }

    #[test]
    fn coincident_pair_counts_as_collinear() {
        assert!(collinear(Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(3.0, 1.0), tol()));
    }

    #[test]
    fn blocks_examples() {
        let (o, t) = (Point::new(0.0, 0.0), Point::new(2.0, 0.0));
        assert!(blocks(o, t, Point::new(1.0, 0.0), tol()));
        assert!(!blocks(o, t, Point::new(3.0, 0.0), tol()));
        assert!(!blocks(o, t, Point::new(1.0, 0.5), tol()));
        assert!(!blocks(o, t, o, tol()));
        assert!(!blocks(o, t, t, tol()));
    }

    #[test]
    fn circumcircle_examples() {
        let (c, r) = circumcircle(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0)).unwrap();
        assert!(c.dist(Point::new(1.0, 1.0)) < 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let (c, r) = circumcircle(Point::new(1.0, 0.0), Point::new(-1.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert!(c.norm() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(
            circumcircle(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)),
            Err(GeomError::DegenerateCircle)
        );
    }

    #[test]
    fn rotate_about_examples() {
        let p = rotate_about(Point::new(1.0, 0.0), Point::ORIGIN, PI / 2.0, Orientation::Ccw);
        assert!(p.dist(Point::new(0.0, 1.0)) < 1e-15);
        let p = rotate_about(Point::new(1.0, 0.0), Point::ORIGIN, 0.0, Orientation::Ccw);
        assert_eq!(p, Point::new(1.0, 0.0));
        // (2,1) about (1,1): offset (1,0) rotated by -π/2 is (0,-1).
        let p = rotate_about(Point::new(2.0, 1.0), Point::new(1.0, 1.0), PI / 2.0, Orientation::Cw);
        assert!(p.dist(Point::new(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn associated_polygon_three_square_vertices() {
        let q = [Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0)];
        let pp = associated_polygon(&q, tol()).unwrap();
        assert_eq!(pp.polygon.n, 4);
        assert!(pp.polygon.center.norm() < 1e-12);
        assert!((pp.polygon.radius - 1.0).abs() < 1e-12);
        for v in [Point::new(0.0, -1.0), Point::new(1.0, 0.0)] {
            assert!(pp.polygon.vertex_index(v, tol()).is_some());
        }
    }

    #[test]
    fn associated_polygon_full_hexagon() {
        let hex = RegularPolygon::new(Point::new(3.0, -2.0), 2.5, 6, 0.3);
        let pp = associated_polygon(&hex.vertices(), tol()).unwrap();
        assert!(pp.polygon.same_as(&hex, tol()));
    }

    #[test]
    fn associated_polygon_octagon_subset() {
        let oct = RegularPolygon::new(Point::ORIGIN, 1.0, 8, deg(22.5));
        let q: Vec<Point> = [0, 1, 2, 4, 5].iter().map(|&k| oct.vertex(k)).collect();
        let pp = associated_polygon(&q, tol()).unwrap();
        assert_eq!(pp.polygon.n, 8);
        assert!(pp.polygon.same_as(&oct, tol()));
    }

    #[test]
    fn associated_polygon_rejects_non_concyclic() {
        let q = [Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0), Point::new(0.0, -2.0)];
        assert!(matches!(associated_polygon(&q, tol()), Err(GeomError::NotConcyclic { .. })));
    }

    #[test]
    fn associated_polygon_rejects_scattered_circle_points() {
        let q: Vec<Point> = [0.0, 50.0, 130.0, 250.0].iter().map(|&a| Point::polar(Point::ORIGIN, 1.0, deg(a))).collect();
        assert_eq!(associated_polygon(&q, tol()), Err(GeomError::NotPseudoPolygon));
    }

    fn square() -> RegularPolygon {
        RegularPolygon::new(Point::ORIGIN, 2f64.sqrt(), 4, PI / 4.0)
    }

    #[test]
    fn safe_zone_examples() {
        let sq = square();
        assert!(!safe_zone_contains(&sq, Point::new(0.0, 0.0), tol()));
        assert!(!safe_zone_contains(&sq, Point::new(10.0, 0.0), tol()));
        assert!(safe_zone_contains(&sq, Point::new(10.0, 3.1), tol()));
        // on the extension of an edge
        assert!(!safe_zone_contains(&sq, Point::new(1.0, 5.0), tol()));
        // on a diagonal
        assert!(!safe_zone_contains(&sq, Point::new(7.0, 7.0), tol()));
        // too close to a vertex
        assert!(!safe_zone_contains(&sq, Point::new(1.5, 2.3), tol()));
    }

    #[test]
    fn angular_order_examples() {
        let pts: Vec<Point> = [0.0, 20.0, 60.0, 100.0, 200.0, 280.0]
            .iter()
            .map(|&a| Point::polar(Point::ORIGIN, 1.0, deg(a)))
            .collect();
        let ao = angular_order(&pts, Point::ORIGIN, tol()).unwrap();
        assert!((ao.min_gap - deg(20.0)).abs() < 1e-12);
        assert_eq!(ao.min_pair, (0, 1));
        assert!(!ao.ambiguous);

        let sq = square().vertices();
        assert!(angular_order(&sq, Point::ORIGIN, tol()).unwrap().ambiguous);

        let pts: Vec<Point> = [0.0, 90.0, 181.0].iter().map(|&a| Point::polar(Point::ORIGIN, 1.0, deg(a))).collect();
        let ao = angular_order(&pts, Point::ORIGIN, tol()).unwrap();
        assert!((ao.min_gap - deg(90.0)).abs() < 1e-12);
        assert_eq!(ao.min_pair, (0, 1));
        assert!(!ao.ambiguous);
    }

    #[test]
    fn closest_approach_crossing() {
        let (d, s) = closest_approach(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0));
        assert!(d < 1e-15);
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-2, 1e-9).is_err());
        assert!(Tolerance::new(1e-6, 1e-6).is_ok());
    }
}
