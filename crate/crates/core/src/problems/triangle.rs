//! Triangle round trip. Robots 0 and 1 sit on two vertices of an equilateral
//! triangle, robot 2 at its center; robot 2 must reach the empty vertex and
//! then come back to the center.

use std::f64::consts::PI;

use rand::Rng;

use super::{place, pos_eps, positive, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement, Terminal};
use crate::geom::{Point, Tolerance};
use crate::trace::ViolationKind;

pub struct TriangleRoundTrip {
    initial: Vec<Point>,
    /// The empty vertex.
    pub target: Point,
    eps: f64,
}

/// Empty vertex of the triangle whose center is `center` and with vertices `p`, `q`.
pub fn empty_vertex(center: Point, p: Point, q: Point) -> Point {
    center * 3.0 - p - q
}

impl TriangleRoundTrip {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        if r.len() != 3 {
            return Err(ProblemError::InvalidInstance("needs exactly 3 robots".into()));
        }
        let (p, q, c) = (r[0], r[1], r[2]);
        let eps = pos_eps(r, tol);
        let rho = c.dist(p);
        if (c.dist(q) - rho).abs() > eps {
            return Err(ProblemError::InvalidInstance("center robot is not equidistant from the vertices".into()));
        }
        if (p.dist(q) - rho * 3f64.sqrt()).abs() > eps {
            return Err(ProblemError::InvalidInstance("vertices are not two vertices of an equilateral triangle about the center".into()));
        }
        Ok(TriangleRoundTrip { initial: r.clone(), target: empty_vertex(c, p, q), eps })
    }
}

impl Requirement for TriangleRoundTrip {
    fn kind(&self) -> ProblemKind {
        ProblemKind::TriangleRoundTrip
    }

    fn terminal(&self) -> Terminal {
        Terminal::Finite(2)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, _to: Point, _entry: &[Point]) -> MoveCheck {
        if robot != 2 {
            return Err((ViolationKind::PathConstraint(phase), format!("vertex robot {robot} must stay still")));
        }
        Ok(())
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        let still = same(cfg[0], self.initial[0], self.eps) && same(cfg[1], self.initial[1], self.eps);
        let goal = match next {
            1 => self.target,
            2 => self.initial[2],
            _ => return false,
        };
        still && same(cfg[2], goal, self.eps)
    }
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let rho = positive(params, "rho", 1.0)?;
    let mut rng = rng(seed);
    let base = [
        Point::polar(Point::ORIGIN, rho, PI / 2.0),
        Point::polar(Point::ORIGIN, rho, 7.0 * PI / 6.0),
        Point::ORIGIN,
    ];
    let scale = rng.gen_range(0.5..2.0);
    let scaled: Vec<Point> = base.iter().map(|&p| p * scale).collect();
    let mut params = params.clone();
    params.insert("rho".into(), rho * scale);
    Ok(Instance { problem: ProblemKind::TriangleRoundTrip, params, robots: place(&mut rng, &scaled) })
}
