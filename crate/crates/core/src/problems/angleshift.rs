//! Angle shift. Robots 0 (a), 1 (b), 2 (c) form an acute scalene triangle
//! with the widest angle α at a and the narrowest at c. b must rotate about a
//! by α and c by π − α, both in the turning direction of a → b → c.

use std::f64::consts::PI;

use rand::Rng;

use super::{place, pos_eps, positive, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement, Terminal, MAX_ATTEMPTS};
use crate::geom::{rotate_about, segment_distance, Orientation, Point, Tolerance};
use crate::trace::ViolationKind;

/// Interior angles at the three vertices.
pub fn angles(a: Point, b: Point, c: Point) -> [f64; 3] {
    let at = |p: Point, q: Point, r: Point| {
        let (u, v) = (q - p, r - p);
        u.cross(v).abs().atan2(u.dot(v))
    };
    [at(a, b, c), at(b, c, a), at(c, a, b)]
}

/// Targets of b and c.
pub fn targets(a: Point, b: Point, c: Point) -> Option<(Point, Point)> {
    let o = Orientation::of(a, b, c)?;
    let alpha = angles(a, b, c)[0];
    Some((rotate_about(b, a, alpha, o), rotate_about(c, a, PI - alpha, o)))
}

pub struct AngleShift {
    initial: Vec<Point>,
    pub b_goal: Point,
    pub c_goal: Point,
    eps: f64,
}

impl AngleShift {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        if r.len() != 3 {
            return Err(ProblemError::InvalidInstance("needs exactly 3 robots".into()));
        }
        let [ta, tb, tc] = angles(r[0], r[1], r[2]);
        let margin = tol.angle_eps();
        if ta >= PI / 2.0 - margin {
            return Err(ProblemError::InvalidInstance("triangle is not acute".into()));
        }
        if !(ta > tb + margin && tb > tc + margin) {
            return Err(ProblemError::InvalidInstance("angles must strictly decrease from a to b to c".into()));
        }
        let (b_goal, c_goal) = targets(r[0], r[1], r[2]).ok_or_else(|| ProblemError::InvalidInstance("degenerate triangle".into()))?;
        Ok(AngleShift { initial: r.clone(), b_goal, c_goal, eps: pos_eps(r, tol) })
    }
}

impl Requirement for AngleShift {
    fn kind(&self) -> ProblemKind {
        ProblemKind::AngleShift
    }

    fn terminal(&self) -> Terminal {
        Terminal::Finite(1)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, to: Point, _entry: &[Point]) -> MoveCheck {
        let goal = match robot {
            1 => self.b_goal,
            2 => self.c_goal,
            _ => return Err((ViolationKind::PathConstraint(phase), "rotation center a must stay still".into())),
        };
        if same(to, goal, self.eps) {
            Ok(())
        } else {
            Err((ViolationKind::PathConstraint(phase), format!("robot {robot} stops at {to} instead of {goal}")))
        }
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        next == 1
            && same(cfg[0], self.initial[0], self.eps)
            && same(cfg[1], self.b_goal, self.eps)
            && same(cfg[2], self.c_goal, self.eps)
    }
}

/// a = (0,0), b = (2,0), c at 80° and distance 3.
pub fn reference_instance() -> Instance {
    Instance {
        problem: ProblemKind::AngleShift,
        params: Params::new(),
        robots: vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::polar(Point::ORIGIN, 3.0, 80f64.to_radians())],
    }
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let scale = positive(params, "scale", 1.0)?;
    let mut rng = rng(seed);
    let deg = |d: f64| d.to_radians();
    for _ in 0..MAX_ATTEMPTS {
        let ta = rng.gen_range(deg(62.0)..deg(85.0));
        let tc = rng.gen_range(deg(15.0)..deg(55.0));
        let tb = PI - ta - tc;
        if !(ta - tb > deg(5.0) && tb - tc > deg(5.0)) {
            continue;
        }
        let k = scale * rng.gen_range(0.5..2.0);
        let a = Point::ORIGIN;
        let b = Point::new(k * tc.sin(), 0.0);
        let c = Point::polar(a, k * tb.sin(), ta);
        let (b2, c2) = targets(a, b, c).expect("non-degenerate");
        if segment_distance(b, b2, c, c2) < 0.05 * k {
            continue;
        }
        let robots = place(&mut rng, &[a, b, c]);
        return Ok(Instance { problem: ProblemKind::AngleShift, params: params.clone(), robots });
    }
    Err(ProblemError::Exhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::collinear;

    #[test]
    fn reference_targets() {
        let inst = reference_instance();
        let req = AngleShift::from_instance(&inst, Tolerance::default()).unwrap();
        assert!(req.b_goal.dist(Point::polar(Point::ORIGIN, 2.0, 80f64.to_radians())) < 1e-12);
        assert!(req.c_goal.dist(Point::new(-3.0, 0.0)) < 1e-12);
        let [ta, _, _] = angles(Point::ORIGIN, req.b_goal, req.c_goal);
        assert!(ta > PI / 2.0);
    }

    #[test]
    fn lone_b_move_makes_collinear() {
        let inst = reference_instance();
        let req = AngleShift::from_instance(&inst, Tolerance::default()).unwrap();
        assert!(collinear(inst.robots[0], req.b_goal, inst.robots[2], Tolerance::default()));
    }

    #[test]
    fn rejects_obtuse_and_isosceles() {
        let mk = |robots| Instance { problem: ProblemKind::AngleShift, params: Params::new(), robots };
        let obtuse = mk(vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::new(-1.0, 1.0)]);
        assert!(AngleShift::from_instance(&obtuse, Tolerance::default()).is_err());
        let iso = mk(vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::new(1.0, 1.5)]);
        assert!(AngleShift::from_instance(&iso, Tolerance::default()).is_err());
    }
}
