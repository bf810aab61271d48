//! Spinning: full-visibility rotation under FSYNC, and a ten-color protocol
//! under ASYNC that fixes the rotation angle through the minimal-gap pair.

use super::{color_set, with_self};
use crate::engine::{Algorithm, Decision};
use crate::geom::{circumcircle, fit_circle, rotate_about, Orientation, Point, Tolerance};
use crate::model::{Color, Snapshot};
use crate::problems::spinning::{spin_rule, SpinRule};

pub const A0: Color = Color::new("a0");
pub const A1: Color = Color::new("a1");
pub const MOVING0: Color = Color::new("moving0");
pub const MOVING1: Color = Color::new("moving1");
pub const M0: Color = Color::new("m0");
pub const M1: Color = Color::new("m1");
pub const MOVING: Color = Color::new("moving");
pub const MOVED: Color = Color::new("moved");
pub const END: Color = Color::new("end");

/// Circle and rotation rule of the observer plus the given points; the
/// observer is the last point of the list.
fn rule_with_self(pts: &[Point], tol: Tolerance) -> Option<(Point, SpinRule)> {
    let (center, _, _) = fit_circle(pts).ok()?;
    Some((center, spin_rule(pts, center, tol)?))
}

/// Step of the observer: half the minimal gap in the agreed direction.
fn spin_self(pts: &[Point], tol: Tolerance) -> Option<Point> {
    let (center, rule) = rule_with_self(pts, tol)?;
    Some(rotate_about(Point::ORIGIN, center, rule.alpha / 2.0, rule.orientation))
}

/// Short-arc angle and direction from `from` to `to` around `center`.
fn arc(center: Point, from: Point, to: Point) -> Option<(f64, Orientation)> {
    let (u, v) = (from - center, to - center);
    let o = Orientation::of(center, from, to)?;
    Some((u.cross(v).abs().atan2(u.dot(v)), o))
}

pub struct SpiOblotFsync;

impl Algorithm for SpiOblotFsync {
    fn name(&self) -> &'static str {
        "spi_oblot_fsync"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        match spin_self(&with_self(&snap.canonical()), tol) {
            Some(p) => Decision::go(p),
            None => Decision::stay(),
        }
    }
}

pub struct SpiLumiAsync;

impl SpiLumiAsync {
    fn off(snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        let cs = color_set(snap);
        if cs.iter().any(|c| [MOVING0, MOVING1, MOVING].contains(c)) {
            return Decision::stay();
        }
        let find = |c: Color| seen.iter().find(|s| s.color == Some(c)).map(|s| s.pos);
        if let (Some(m0), Some(m1)) = (find(M0), find(M1)) {
            let Ok((center, _)) = circumcircle(Point::ORIGIN, m0, m1) else { return Decision::stay() };
            let Some((gap, o)) = arc(center, m0, m1) else { return Decision::stay() };
            return Decision::go_with(rotate_about(Point::ORIGIN, center, gap / 2.0, o), MOVING);
        }
        if cs.iter().all(|c| [Color::OFF, A0, A1].contains(c)) {
            let pts = with_self(&seen);
            let me = pts.len() - 1;
            if let Some((_, rule)) = rule_with_self(&pts, tol) {
                if rule.a0 == me {
                    return Decision::stay_with(A0);
                }
                if rule.a1 == me {
                    return Decision::stay_with(A1);
                }
            }
        }
        Decision::stay()
    }

    fn a0(snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        let cs = color_set(snap);
        if !cs.contains(&A1) || !cs.iter().all(|c| [Color::OFF, A1].contains(c)) {
            return Decision::stay();
        }
        let pts = with_self(&seen);
        match rule_with_self(&pts, tol) {
            Some((center, rule)) if rule.a0 == pts.len() - 1 => {
                Decision::go_with(rotate_about(Point::ORIGIN, center, rule.alpha / 2.0, rule.orientation), MOVING0)
            }
            _ => Decision::stay(),
        }
    }

    fn a1(snap: &Snapshot) -> Decision {
        let seen = snap.canonical();
        let Some(m0) = seen.iter().find(|s| s.color == Some(M0)).map(|s| s.pos) else { return Decision::stay() };
        let mut still: Vec<Point> = seen.iter().filter(|s| s.color == Some(Color::OFF)).map(|s| s.pos).collect();
        still.push(m0);
        still.push(Point::ORIGIN);
        let Ok((center, _, _)) = fit_circle(&still) else { return Decision::stay() };
        let Some((gap, o)) = arc(center, m0, Point::ORIGIN) else { return Decision::stay() };
        Decision::go_with(rotate_about(Point::ORIGIN, center, gap, o), MOVING1)
    }
}

impl Algorithm for SpiLumiAsync {
    fn name(&self) -> &'static str {
        "spi_lumi_async"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF, A0, A1, MOVING0, MOVING1, M0, M1, MOVING, MOVED, END]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let own = snap.own_internal.unwrap_or(Color::OFF);
        let cs = color_set(snap);
        let only = |allowed: &[Color]| cs.iter().all(|c| allowed.contains(c));
        match own {
            A0 => Self::a0(snap, tol),
            A1 => Self::a1(snap),
            MOVING0 => Decision::stay_with(M0),
            MOVING1 => Decision::stay_with(M1),
            MOVING => Decision::stay_with(MOVED),
            M0 | M1 | MOVED if only(&[M0, M1, MOVED, END]) => Decision::stay_with(END),
            END if only(&[END, Color::OFF]) => Decision::stay_with(Color::OFF),
            c if c == Color::OFF => Self::off(snap, tol),
            _ => Decision::stay(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};
    use crate::problems::spinning::reference_instance;
    use std::f64::consts::TAU;

    fn polar_angle(center: Point, p: Point) -> f64 {
        (p - center).angle().rem_euclid(TAU)
    }

    fn view(pts: &[Point], colors: &[Color], i: usize, lumi: bool) -> Snapshot {
        let others: Vec<(Point, Option<Color>)> =
            (0..pts.len()).filter(|&j| j != i).map(|j| (pts[j], lumi.then_some(colors[j]))).collect();
        snap(pts[i], &others, lumi.then_some(colors[i]))
    }

    #[test]
    fn fsync_reference_step() {
        let tol = Tolerance::default();
        let pts = reference_instance().robots;
        let colors = vec![Color::OFF; pts.len()];
        for (i, deg) in [10.0, 30.0, 70.0, 110.0, 210.0, 290.0].iter().enumerate() {
            let d = SpiOblotFsync.decide(&view(&pts, &colors, i, false), tol);
            assert!(global(pts[i], d).dist(Point::polar(Point::ORIGIN, 1.0, f64::to_radians(*deg))) < 1e-12);
        }
        assert_frame_and_order_invariant(&SpiOblotFsync, pts[3], &view(&pts, &colors, 3, false), tol);
    }

    /// Runs the protocol by hand with one activation at a time (moves complete
    /// immediately) and checks one full rotation followed by a reset.
    #[test]
    fn lumi_sequential_cycle() {
        let tol = Tolerance::default();
        let mut pts = reference_instance().robots;
        let n = pts.len();
        let mut colors = vec![Color::OFF; n];
        let start: Vec<f64> = pts.iter().map(|&p| polar_angle(Point::ORIGIN, p)).collect();
        let mut sweeps = 0;
        loop {
            for i in 0..n {
                let s = view(&pts, &colors, i, true);
                let d = SpiLumiAsync.decide(&s, tol);
                assert_frame_and_order_invariant(&SpiLumiAsync, pts[i], &s, tol);
                pts[i] = global(pts[i], d);
                if let Some(c) = d.color {
                    colors[i] = c;
                }
            }
            sweeps += 1;
            if sweeps > 1 && colors.iter().all(|&c| c == Color::OFF) {
                break;
            }
            assert!(sweeps < 30, "{colors:?}");
        }
        let moved: Vec<f64> = pts.iter().map(|&p| polar_angle(Point::ORIGIN, p)).collect();
        for i in 0..n {
            let want = start[i] + 10f64.to_radians();
            assert!((moved[i] - want.rem_euclid(TAU)).abs() < 1e-9, "robot {i}");
        }
    }

    #[test]
    fn lumi_single_rules() {
        let tol = Tolerance::default();
        let pts = reference_instance().robots;
        let mut colors = vec![Color::OFF; pts.len()];
        colors[0] = MOVING;
        assert_eq!(SpiLumiAsync.decide(&view(&pts, &colors, 0, true), tol), Decision::stay_with(MOVED));
        colors = vec![END; pts.len()];
        colors[2] = Color::OFF;
        assert_eq!(SpiLumiAsync.decide(&view(&pts, &colors, 0, true), tol), Decision::stay_with(Color::OFF));
        colors[3] = M1;
        assert!(SpiLumiAsync.decide(&view(&pts, &colors, 0, true), tol).color.is_none());
    }
}
