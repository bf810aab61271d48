//! Triangle round trip with internal memory (FSTA) or acknowledgement
//! colors (FCOM).

use super::{approx, extent};
use crate::engine::{Algorithm, Decision};
use crate::geom::{Point, Tolerance};
use crate::model::{Color, Seen, Snapshot};

pub const START: Color = Color::new("start");
pub const WENT: Color = Color::new("went");

pub const M: Color = Color::new("M");
pub const B: Color = Color::new("B");
pub const D: Color = Color::new("D");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// The observer is the center, the others two vertices.
    Center,
    Equilateral,
    Other,
}

fn shape(seen: &[Seen], tol: Tolerance) -> (Shape, Point, Point) {
    if seen.len() != 2 {
        return (Shape::Other, Point::ORIGIN, Point::ORIGIN);
    }
    let (u, v) = (seen[0].pos, seen[1].pos);
    let scale = extent(seen);
    let (du, dv, duv) = (u.norm(), v.norm(), u.dist(v));
    let s = if approx(du, dv, scale, tol) && approx(duv, du, scale, tol) {
        Shape::Equilateral
    } else if approx(du, dv, scale, tol) && approx(duv, du * 3f64.sqrt(), scale, tol) {
        Shape::Center
    } else {
        Shape::Other
    };
    (s, u, v)
}

pub struct TrtFsta;

impl Algorithm for TrtFsta {
    fn name(&self) -> &'static str {
        "trt_fsta"
    }

    fn palette(&self) -> &'static [Color] {
        &[START, WENT]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let (s, u, v) = shape(&snap.canonical(), tol);
        match (s, snap.own_internal) {
            (Shape::Center, Some(START)) => Decision::go_with(-(u + v), WENT),
            (Shape::Equilateral, Some(WENT)) => Decision::go((u + v) * (1.0 / 3.0)),
            _ => Decision::stay(),
        }
    }
}

/// The mover turns M when leaving; vertices answer B on seeing M; the robot
/// seeing two B robots in an equilateral triangle is the mover and returns
/// with D.
pub struct TrtFcom;

impl Algorithm for TrtFcom {
    fn name(&self) -> &'static str {
        "trt_fcom"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF, M, B, D]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        let (s, u, v) = shape(&seen, tol);
        let colors: Vec<Option<Color>> = seen.iter().map(|x| x.color).collect();
        let all = |c: Color| colors.iter().all(|&x| x == Some(c));
        if s == Shape::Center && all(Color::OFF) {
            return Decision::go_with(-(u + v), M);
        }
        if s == Shape::Equilateral && all(B) {
            return Decision::go_with((u + v) * (1.0 / 3.0), D);
        }
        if colors.contains(&Some(M)) {
            return Decision::stay_with(B);
        }
        Decision::stay()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};

    fn tri() -> (Point, Point, Point, Point) {
        let c = Point::new(0.3, -0.2);
        let p = Point::polar(c, 1.5, 90f64.to_radians());
        let q = Point::polar(c, 1.5, 210f64.to_radians());
        let target = Point::polar(c, 1.5, 330f64.to_radians());
        (p, q, c, target)
    }

    #[test]
    fn fsta_round_trip_steps() {
        let (p, q, c, target) = tri();
        let tol = Tolerance::default();
        let s = snap(c, &[(p, None), (q, None)], Some(START));
        let d = TrtFsta.decide(&s, tol);
        assert_eq!(d.color, Some(WENT));
        assert!(global(c, d).dist(target) < 1e-12);
        assert_frame_and_order_invariant(&TrtFsta, c, &s, tol);
        let back = snap(target, &[(p, None), (q, None)], Some(WENT));
        assert!(global(target, TrtFsta.decide(&back, tol)).dist(c) < 1e-12);
        let home = snap(c, &[(p, None), (q, None)], Some(WENT));
        assert!(TrtFsta.decide(&home, tol).is_null());
        let vertex = snap(p, &[(q, None), (c, None)], Some(START));
        assert!(TrtFsta.decide(&vertex, tol).is_null());
    }

    #[test]
    fn fcom_acknowledgement() {
        let (p, q, c, target) = tri();
        let tol = Tolerance::default();
        let off = Some(Color::OFF);
        let s = snap(c, &[(p, off), (q, off)], None);
        let d = TrtFcom.decide(&s, tol);
        assert_eq!(d.color, Some(M));
        assert!(global(c, d).dist(target) < 1e-12);
        let mid = c.midpoint(target);
        let vertex = TrtFcom.decide(&snap(p, &[(q, off), (mid, Some(M))], None), tol);
        assert_eq!(vertex, Decision::stay_with(B));
        let waiting = TrtFcom.decide(&snap(target, &[(p, Some(B)), (q, off)], None), tol);
        assert!(waiting.is_null());
        let back = snap(target, &[(p, Some(B)), (q, Some(B))], None);
        let d = TrtFcom.decide(&back, tol);
        assert_eq!(d.color, Some(D));
        assert!(global(target, d).dist(c) < 1e-12);
        assert_frame_and_order_invariant(&TrtFcom, target, &back, tol);
        assert!(TrtFcom.decide(&snap(c, &[(p, Some(B)), (q, Some(B))], None), tol).is_null());
    }
}
