//! Flip-flop-flip. Robots 0 (p) and 1 (q) never move; robot 2 (r) sits on the
//! perpendicular bisector γ of pq and perpetually: flips to the other
//! half-line, moves farther away on it, flips back.

use rand::Rng;

use super::{place, pos_eps, positive, rng, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement, Terminal};
use crate::geom::{Point, Tolerance};
use crate::trace::ViolationKind;

pub struct FlipFlopFlip {
    p: Point,
    q: Point,
    /// Midpoint of pq.
    pub b: Point,
    /// Unit vector along γ pointing to r's initial half-line.
    pub e: Point,
    pub half: f64,
    eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Flip1,
    Flop,
    Flip2,
}

impl Action {
    /// Action that completes phase `next` (>= 1).
    pub fn for_phase(next: usize) -> Action {
        match (next - 1) % 3 {
            0 => Action::Flip1,
            1 => Action::Flop,
            _ => Action::Flip2,
        }
    }
}

impl FlipFlopFlip {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        if r.len() != 3 {
            return Err(ProblemError::InvalidInstance("needs exactly 3 robots".into()));
        }
        let (p, q, apex) = (r[0], r[1], r[2]);
        let eps = pos_eps(r, tol);
        let b = p.midpoint(q);
        let half = p.dist(q) / 2.0;
        if (apex.dist(p) - apex.dist(q)).abs() > eps {
            return Err(ProblemError::InvalidInstance("triangle is not isosceles at r".into()));
        }
        let e = (apex - b).unit().ok_or_else(|| ProblemError::InvalidInstance("r sits between p and q".into()))?;
        let s = FlipFlopFlip { p, q, b, e, half, eps };
        if s.equilateral(apex) {
            return Err(ProblemError::InvalidInstance("initial triangle is equilateral".into()));
        }
        Ok(s)
    }

    /// Signed coordinate along γ (positive on the initial side).
    pub fn along(&self, x: Point) -> f64 {
        (x - self.b).dot(self.e)
    }

    fn off_line(&self, x: Point) -> f64 {
        self.e.cross(x - self.b).abs()
    }

    fn equilateral(&self, x: Point) -> bool {
        (self.along(x).abs() - 3f64.sqrt() * self.half).abs() <= self.eps
    }

    /// Stop of r that completes `action`, starting from `prev` (r's position
    /// when the previous phase was entered).
    pub fn completes(&self, action: Action, to: Point, prev: Point) -> bool {
        if self.off_line(to) > self.eps || self.equilateral(to) {
            return false;
        }
        let s = self.along(to);
        match action {
            Action::Flip1 => s < -self.eps,
            Action::Flop => s < -self.eps && s < self.along(prev) - self.eps,
            Action::Flip2 => s > self.eps,
        }
    }
}

impl Requirement for FlipFlopFlip {
    fn kind(&self) -> ProblemKind {
        ProblemKind::FlipFlopFlip
    }

    fn terminal(&self) -> Terminal {
        Terminal::Perpetual(3)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, to: Point, entry: &[Point]) -> MoveCheck {
        let fail = |msg: String| Err((ViolationKind::PathConstraint(phase), msg));
        if robot != 2 {
            return fail(format!("robot {robot} must stay still"));
        }
        if self.off_line(to) > self.eps {
            return fail(format!("r leaves the bisector line stopping at {to}"));
        }
        if self.along(to).abs() <= self.eps {
            return fail("r stops on the midpoint of pq".into());
        }
        if self.equilateral(to) {
            return fail("r stops where the triangle is equilateral".into());
        }
        let action = Action::for_phase(phase + 1);
        if self.completes(action, to, entry[2]) {
            return Ok(());
        }
        let side_now = self.along(entry[2]) > 0.0;
        let side_to = self.along(to) > 0.0;
        if action == Action::Flop && side_now != side_to {
            return fail("repeated flip where a flop was due".into());
        }
        fail(format!("stop at {to} does not complete {action:?}"))
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], entry: &[Point]) -> bool {
        cfg[0].dist(self.p) <= self.eps
            && cfg[1].dist(self.q) <= self.eps
            && self.completes(Action::for_phase(next), cfg[2], entry[2])
    }
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let half = positive(params, "half", 1.0)?;
    let dist = positive(params, "dist", 2.6)?;
    if (dist - 3f64.sqrt() * half).abs() < 1e-6 * half {
        return Err(ProblemError::BadParam { name: "dist".into(), msg: "r at that distance forms an equilateral triangle".into() });
    }
    let mut rng = rng(seed);
    let scale = rng.gen_range(0.5..2.0);
    let base = [Point::new(0.0, half) * scale, Point::new(0.0, -half) * scale, Point::new(dist, 0.0) * scale];
    Ok(Instance { problem: ProblemKind::FlipFlopFlip, params: params.clone(), robots: place(&mut rng, &base) })
}
