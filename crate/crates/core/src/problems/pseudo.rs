//! Pseudo. Robots 0..m sit on m vertices of a regular n-gon N (a
//! pseudo-polygon) and robot m is the watcher w in the safe zone of N. The
//! member farthest from w (a) must move to a point x that is in the safe
//! zone, across line(b, c) from a, and off every line through w and another
//! member; b and c are a's neighbors along the perimeter, b the farther
//! from w.

use rand::seq::index::sample;
use rand::Rng;

use super::{param_count, pos_eps, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement, Terminal, MAX_ATTEMPTS};
use crate::geom::{
    associated_polygon, collinear, line_distance, point_segment_distance, safe_zone_contains, Point, RegularPolygon, Tolerance,
};
use crate::trace::ViolationKind;

/// Roles read off a configuration whose watcher and members are known.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub polygon: RegularPolygon,
    /// Indices (into the point list) of the pseudo-polygon members.
    pub members: Vec<usize>,
    pub watcher: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// Relative margin used to declare distance comparisons unambiguous.
const SEPARATION: f64 = 1e-6;

pub fn layout(points: &[Point], members: &[usize], watcher: usize, tol: Tolerance) -> Option<Layout> {
    let mpts: Vec<Point> = members.iter().map(|&i| points[i]).collect();
    let pp = associated_polygon(&mpts, tol).ok()?;
    let poly = pp.polygon;
    let w = points[watcher];
    let margin = SEPARATION * poly.radius;
    let mut by_dist: Vec<usize> = members.to_vec();
    by_dist.sort_by(|&i, &j| w.dist(points[j]).total_cmp(&w.dist(points[i])));
    let a = by_dist[0];
    if w.dist(points[a]) - w.dist(points[by_dist[1]]) <= margin {
        return None;
    }
    let slots = pp.indices(tol);
    let slot_of = |i: usize| slots[members.iter().position(|&m| m == i).expect("member")];
    let ka = slot_of(a);
    let n = poly.n;
    let neighbor = |step: usize| {
        (1..n).map(|d| (ka + step * d) % n).find_map(|k| members.iter().copied().find(|&i| slot_of(i) == k))
    };
    let n1 = neighbor(1)?;
    let n2 = neighbor(n - 1)?;
    if n1 == n2 {
        return None;
    }
    let (d1, d2) = (w.dist(points[n1]), w.dist(points[n2]));
    if (d1 - d2).abs() <= margin {
        return None;
    }
    let (b, c) = if d1 > d2 { (n1, n2) } else { (n2, n1) };
    Some(Layout { polygon: poly, members: members.to_vec(), watcher, a, b, c })
}

/// Splits a point set into a pseudo-polygon and outsiders, trying the fewest
/// outsiders first (up to `max_out`). Returns (members, outsiders).
pub fn decompose(points: &[Point], max_out: usize, tol: Tolerance) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = points.len();
    let try_split = |out: &[usize]| {
        let members: Vec<usize> = (0..n).filter(|i| !out.contains(i)).collect();
        let pts: Vec<Point> = members.iter().map(|&i| points[i]).collect();
        if pts.len() >= 3 && associated_polygon(&pts, tol).is_ok() {
            Some(members)
        } else {
            None
        }
    };
    if max_out >= 1 {
        let found: Vec<_> = (0..n).filter_map(|i| try_split(&[i]).map(|m| (m, vec![i]))).collect();
        if found.len() == 1 {
            return found.into_iter().next();
        }
        if found.len() > 1 {
            return None;
        }
    }
    if max_out >= 2 {
        let mut found = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if let Some(m) = try_split(&[i, j]) {
                    found.push((m, vec![i, j]));
                }
            }
        }
        if found.len() == 1 {
            return found.into_iter().next();
        }
    }
    None
}

/// The three conditions on a's destination.
pub fn target_ok(points: &[Point], lay: &Layout, x: Point, tol: Tolerance) -> bool {
    let (a, b, c) = (points[lay.a], points[lay.b], points[lay.c]);
    let side = |p: Point| (c - b).cross(p - b);
    let scale = lay.polygon.radius;
    safe_zone_contains(&lay.polygon, x, tol)
        && side(x) * side(a) < 0.0
        && line_distance(b, c, x) > tol.scaled(scale)
        && lay
            .members
            .iter()
            .filter(|&&i| i != lay.a)
            .all(|&i| !collinear(points[lay.watcher], points[i], x, tol))
}

/// Deterministic destination for a: points past c along line(b, c), pushed
/// slightly across it, so a's path passes outside c. Each candidate must
/// satisfy the three conditions with a clearance margin and keep a's path
/// away from every other robot.
pub fn construct_target(points: &[Point], lay: &Layout, tol: Tolerance) -> Option<Point> {
    let (a, b, c) = (points[lay.a], points[lay.b], points[lay.c]);
    let edge = lay.polygon.edge_length();
    let u = (c - b).unit()?;
    let mut nrm = u.perp();
    if nrm.dot(a - b) > 0.0 {
        nrm = -nrm;
    }
    let clearance = 0.05 * edge;
    let shifted = |x: Point| -> Vec<Point> { [x + u * clearance, x - u * clearance, x + nrm * clearance, x - nrm * clearance].to_vec() };
    for k in 0..8 {
        for j in 0..8 {
            let along = edge * (1.0 + 0.5 * k as f64);
            let across = edge * (0.12 + 0.05 * j as f64);
            let x = c + u * along + nrm * across;
            let robust = std::iter::once(x).chain(shifted(x)).all(|y| target_ok(points, lay, y, tol));
            if !robust {
                continue;
            }
            let clear = (0..points.len())
                .filter(|&i| i != lay.a)
                .all(|i| point_segment_distance(points[i], a, x) > clearance);
            if clear {
                return Some(x);
            }
        }
    }
    None
}

pub struct Pseudo {
    initial: Vec<Point>,
    pub layout: Layout,
    eps: f64,
    tol: Tolerance,
}

impl Pseudo {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        let m = r.len().checked_sub(1).filter(|&m| m >= 4).ok_or_else(|| ProblemError::InvalidInstance("too few robots".into()))?;
        let members: Vec<usize> = (0..m).collect();
        let lay = layout(r, &members, m, tol)
            .ok_or_else(|| ProblemError::InvalidInstance("no pseudo-polygon with unique a and b/c roles".into()))?;
        if m < lay.polygon.n / 2 + 2 {
            return Err(ProblemError::InvalidInstance(format!("{m} members is fewer than n/2 + 2 for n = {}", lay.polygon.n)));
        }
        if !safe_zone_contains(&lay.polygon, r[m], tol) {
            return Err(ProblemError::InvalidInstance("watcher is outside the safe zone".into()));
        }
        Ok(Pseudo { initial: r.clone(), layout: lay, eps: pos_eps(r, tol), tol })
    }
}

impl Requirement for Pseudo {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Pseudo
    }

    fn terminal(&self) -> Terminal {
        Terminal::Finite(1)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, _to: Point, _entry: &[Point]) -> MoveCheck {
        if robot != self.layout.a {
            return Err((ViolationKind::PathConstraint(phase), format!("robot {robot} is not the farthest member and must stay still")));
        }
        Ok(())
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        next == 1
            && (0..cfg.len()).filter(|&i| i != self.layout.a).all(|i| same(cfg[i], self.initial[i], self.eps))
            && target_ok(&self.initial, &self.layout, cfg[self.layout.a], self.tol)
    }
}

/// Octagon on the unit circle with vertex phases 22.5° + 45°k for
/// k ∈ {0, 1, 2, 4, 5, 6, 7}; watcher at 265°, distance 2.3.
pub fn reference_instance() -> Instance {
    let poly = RegularPolygon::new(Point::ORIGIN, 1.0, 8, 22.5f64.to_radians());
    let mut robots: Vec<Point> = [0, 1, 2, 4, 5, 6, 7].iter().map(|&k| poly.vertex(k)).collect();
    robots.push(Point::polar(Point::ORIGIN, 2.3, 265f64.to_radians()));
    Instance {
        problem: ProblemKind::Pseudo,
        params: [("n".to_string(), 8.0), ("m".to_string(), 7.0)].into_iter().collect(),
        robots,
    }
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let n = param_count(params, "n", 8, 6)?;
    let m = param_count(params, "m", n / 2 + 3, n / 2 + 2)?;
    if m > n {
        return Err(ProblemError::BadParam { name: "m".into(), msg: format!("at most n = {n}") });
    }
    let tol = Tolerance::default();
    let mut rng = rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let radius = rng.gen_range(0.5..2.0);
        let center = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let poly = RegularPolygon::new(center, radius, n, rng.gen_range(0.0..std::f64::consts::TAU));
        let mut ks = sample(&mut rng, n, m).into_vec();
        ks.sort_unstable();
        let mut robots: Vec<Point> = ks.iter().map(|&k| poly.vertex(k)).collect();
        let w = Point::polar(center, radius * rng.gen_range(1.6..3.5), rng.gen_range(0.0..std::f64::consts::TAU));
        robots.push(w);
        if crate::problems::newcomer::has_near_collinear(&robots, 0.01 * poly.edge_length()) {
            continue;
        }
        let inst = Instance { problem: ProblemKind::Pseudo, params: params.clone(), robots };
        let Ok(req) = Pseudo::from_instance(&inst, tol) else { continue };
        let lay = &req.layout;
        let margin = 1e-3 * radius;
        let dw = |i: usize| inst.robots[i].dist(w);
        if dw(lay.b) - dw(lay.c) < margin {
            continue;
        }
        if lay.members.iter().any(|&i| i != lay.a && dw(lay.a) - dw(i) < margin) {
            continue;
        }
        if construct_target(&inst.robots, lay, tol).is_none() {
            continue;
        }
        return Ok(inst);
    }
    Err(ProblemError::Exhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_roles() {
        let inst = reference_instance();
        let req = Pseudo::from_instance(&inst, Tolerance::default()).unwrap();
        assert_eq!(req.layout.polygon.n, 8);
        // Members are listed in order k = 0, 1, 2, 4, ...; a is the vertex at 67.5°.
        assert_eq!(req.layout.a, 1);
        assert_eq!(req.layout.b, 2);
        assert_eq!(req.layout.c, 0);
    }

    #[test]
    fn reference_target_satisfies_conditions() {
        let inst = reference_instance();
        let tol = Tolerance::default();
        let req = Pseudo::from_instance(&inst, tol).unwrap();
        let x = construct_target(&inst.robots, &req.layout, tol).unwrap();
        let mut cfg = inst.robots.clone();
        cfg[req.layout.a] = x;
        assert!(req.phase_holds(1, &cfg, &inst.robots));
        cfg[req.layout.a] = Point::ORIGIN;
        assert!(!req.phase_holds(1, &cfg, &inst.robots));
    }

    #[test]
    fn target_on_watcher_line_rejected() {
        let inst = reference_instance();
        let tol = Tolerance::default();
        let req = Pseudo::from_instance(&inst, tol).unwrap();
        let w = inst.robots[7];
        let m = inst.robots[0];
        let x = w + (m - w) * 3.0;
        assert!(!target_ok(&inst.robots, &req.layout, x, tol));
    }

    #[test]
    fn decomposition_finds_watcher() {
        let inst = reference_instance();
        let (members, out) = decompose(&inst.robots, 2, Tolerance::default()).unwrap();
        assert_eq!(out, vec![7]);
        assert_eq!(members.len(), 7);
    }
}
