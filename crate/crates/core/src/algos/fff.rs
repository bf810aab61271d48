//! Flip-flop-flip: internal phase counter (FSTA), shared phase color under
//! FSYNC (FCOM), and the distance-threshold rule without lights.

use super::{approx, extent};
use crate::engine::{Algorithm, Decision};
use crate::geom::{Point, Tolerance};
use crate::model::{Color, Snapshot};

pub const FLIP1: Color = Color::new("flip1");
pub const FLOP: Color = Color::new("flop");
pub const FLIP2: Color = Color::new("flip2");

/// Geometry seen by r: the midpoint b of pq and u = |pq|, in r's frame.
struct Apex {
    b: Point,
    u: f64,
}

/// Returns the apex geometry when the observer is r (equidistant from the two
/// others, triangle not equilateral).
fn apex(snap: &Snapshot, tol: Tolerance) -> Option<Apex> {
    let seen = snap.canonical();
    if seen.len() != 2 {
        return None;
    }
    let (p, q) = (seen[0].pos, seen[1].pos);
    let scale = extent(&seen);
    let u = p.dist(q);
    if !approx(p.norm(), q.norm(), scale, tol) || approx(p.norm(), u, scale, tol) {
        return None;
    }
    Some(Apex { b: p.midpoint(q), u })
}

/// Reflection through b: same distance, other half-line.
fn flip(g: &Apex) -> Point {
    g.b * 2.0
}

/// One u farther from b on the current half-line.
fn flop(g: &Apex) -> Point {
    let s = g.b.norm();
    g.b * (-g.u / s)
}

/// Other half-line, one u closer to b when that stays clear of the
/// equilateral point, otherwise at the same distance.
fn flip_back(g: &Apex) -> Point {
    let s = g.b.norm();
    let closer = s - g.u;
    let target = if closer >= g.u { closer } else { s };
    g.b * (1.0 + target / s)
}

fn act(g: &Apex, phase: Color) -> Point {
    match phase {
        FLOP => flop(g),
        FLIP2 => flip_back(g),
        _ => flip(g),
    }
}

fn next(phase: Color) -> Color {
    match phase {
        FLOP => FLIP2,
        FLIP2 => FLIP1,
        _ => FLOP,
    }
}

pub struct FffFsta;

impl Algorithm for FffFsta {
    fn name(&self) -> &'static str {
        "fff_fsta"
    }

    fn palette(&self) -> &'static [Color] {
        &[FLIP1, FLOP, FLIP2]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let Some(g) = apex(snap, tol) else { return Decision::stay() };
        let phase = snap.own_internal.unwrap_or(FLIP1);
        Decision::go_with(act(&g, phase), next(phase))
    }
}

/// Every robot shows the current phase; off reads as flip1. All robots
/// advance the color each round, r also performs the action.
pub struct FffFcomFsync;

impl Algorithm for FffFcomFsync {
    fn name(&self) -> &'static str {
        "fff_fcom_fsync"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF, FLOP, FLIP2, FLIP1]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        let Some(phase) = seen.first().and_then(|s| s.color) else { return Decision::stay() };
        let phase = if phase == Color::OFF { FLIP1 } else { phase };
        match apex(snap, tol) {
            Some(g) => Decision::go_with(act(&g, phase), next(phase)),
            None => Decision::stay_with(next(phase)),
        }
    }
}

/// Encodes the pending action in dist(p, r) with unit u = |pq|: below k·u
/// flip to [k·u, h·u), in [k·u, h·u) flop beyond h·u, from h·u on flip back
/// below k·u.
pub struct FffMemoryless {
    pub k: f64,
    pub h: f64,
}

impl Default for FffMemoryless {
    fn default() -> Self {
        FffMemoryless { k: 2.0, h: 4.0 }
    }
}

impl FffMemoryless {
    /// Point on the half-line through b in direction `dir` (±1 relative to
    /// r's side) whose distance to p is `dp`.
    fn at_distance(g: &Apex, dir: f64, dp: f64) -> Point {
        let half = g.u / 2.0;
        let along = (dp * dp - half * half).sqrt();
        let e = -g.b * (1.0 / g.b.norm());
        g.b + e * (dir * along)
    }
}

impl Algorithm for FffMemoryless {
    fn name(&self) -> &'static str {
        "fff_memoryless"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let Some(g) = apex(snap, tol) else { return Decision::stay() };
        let u = g.u;
        let d = snap.visible[0].pos.norm();
        let (k, h) = (self.k * u, self.h * u);
        let dest = if d < k {
            Self::at_distance(&g, -1.0, (k + h) / 2.0)
        } else if d < h {
            Self::at_distance(&g, 1.0, h + u)
        } else {
            Self::at_distance(&g, -1.0, (u + k) / 2.0)
        };
        Decision::go(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};

    const P: Point = Point { x: 0.0, y: 1.0 };
    const Q: Point = Point { x: 0.0, y: -1.0 };

    #[test]
    fn fsta_cycle() {
        let tol = Tolerance::default();
        let mut r = Point::new(2.6, 0.0);
        let mut color = FLIP1;
        let mut xs = Vec::new();
        for _ in 0..6 {
            let s = snap(r, &[(P, None), (Q, None)], Some(color));
            assert_frame_and_order_invariant(&FffFsta, r, &s, tol);
            let d = FffFsta.decide(&s, tol);
            r = global(r, d);
            color = d.color.unwrap();
            xs.push(r.x);
        }
        assert_eq!(color, FLIP1);
        let want = [-2.6, -4.6, 2.6, -2.6, -4.6, 2.6];
        for (x, w) in xs.iter().zip(want) {
            assert!((x - w).abs() < 1e-12, "{xs:?}");
        }
        let s = snap(P, &[(Q, None), (r, None)], Some(FLIP1));
        assert!(FffFsta.decide(&s, tol).is_null());
    }

    #[test]
    fn fcom_round_colors() {
        let tol = Tolerance::default();
        let r = Point::new(2.6, 0.0);
        let off = Some(Color::OFF);
        let d = FffFcomFsync.decide(&snap(r, &[(P, off), (Q, off)], None), tol);
        assert_eq!(d.color, Some(FLOP));
        assert!(global(r, d).dist(Point::new(-2.6, 0.0)) < 1e-12);
        let dp = FffFcomFsync.decide(&snap(P, &[(Q, off), (r, off)], None), tol);
        assert_eq!(dp, Decision::stay_with(FLOP));
        let r2 = Point::new(-2.6, 0.0);
        let d = FffFcomFsync.decide(&snap(r2, &[(P, Some(FLOP)), (Q, Some(FLOP))], None), tol);
        assert_eq!(d.color, Some(FLIP2));
        assert!(global(r2, d).dist(Point::new(-4.6, 0.0)) < 1e-12);
    }

    #[test]
    fn memoryless_thresholds() {
        let tol = Tolerance::default();
        let alg = FffMemoryless::default();
        let dist_p = |x: Point| x.dist(P);
        let r = Point::new(2.6, 0.0);
        let r1 = global(r, alg.decide(&snap(r, &[(P, None), (Q, None)], None), tol));
        assert!(r1.x < 0.0 && (dist_p(r1) - 6.0).abs() < 1e-12);
        let r2 = global(r1, alg.decide(&snap(r1, &[(P, None), (Q, None)], None), tol));
        assert!(r2.x < r1.x && (dist_p(r2) - 10.0).abs() < 1e-12);
        let r3 = global(r2, alg.decide(&snap(r2, &[(P, None), (Q, None)], None), tol));
        assert!(r3.x > 0.0 && (dist_p(r3) - 3.0).abs() < 1e-12);
        let far = Point::new(6.0, 0.0);
        let wrong = global(far, alg.decide(&snap(far, &[(P, None), (Q, None)], None), tol));
        assert!(wrong.x > far.x, "start in [k·u, h·u) on the initial side flops instead of flipping");
    }
}
