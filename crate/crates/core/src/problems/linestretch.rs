//! Line stretch. Robots 0..n stand in order on a line γ at spacing d; the two
//! endpoints move outward along γ so their neighbor distance becomes d + d/n.

use super::{param_count, place, pos_eps, positive, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement, Terminal};
use crate::geom::{line_distance, Point, Tolerance};
use crate::trace::ViolationKind;

pub struct LineStretch {
    initial: Vec<Point>,
    pub first_goal: Point,
    pub last_goal: Point,
    eps: f64,
}

impl LineStretch {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        let n = r.len();
        if n <= 3 {
            return Err(ProblemError::InvalidInstance("needs more than 3 robots".into()));
        }
        let eps = pos_eps(r, tol);
        let d = r[0].dist(r[1]);
        let e = (r[n - 1] - r[0]).unit().expect("distinct endpoints");
        for i in 0..n {
            let expect = r[0] + e * (d * i as f64);
            if !same(r[i], expect, eps) {
                return Err(ProblemError::InvalidInstance(format!("robot {i} is not at spacing {d} on the line")));
            }
        }
        let step = d / n as f64;
        Ok(LineStretch { initial: r.clone(), first_goal: r[0] - e * step, last_goal: r[n - 1] + e * step, eps })
    }
}

impl Requirement for LineStretch {
    fn kind(&self) -> ProblemKind {
        ProblemKind::LineStretch
    }

    fn terminal(&self) -> Terminal {
        Terminal::Finite(1)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, to: Point, _entry: &[Point]) -> MoveCheck {
        let n = self.initial.len();
        if robot != 0 && robot != n - 1 {
            return Err((ViolationKind::PathConstraint(phase), format!("internal robot {robot} must stay still")));
        }
        if line_distance(self.initial[0], self.initial[n - 1], to) > self.eps {
            return Err((ViolationKind::PathConstraint(phase), format!("endpoint {robot} leaves the line, stopping at {to}")));
        }
        Ok(())
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        let n = cfg.len();
        next == 1
            && same(cfg[0], self.first_goal, self.eps)
            && same(cfg[n - 1], self.last_goal, self.eps)
            && (1..n - 1).all(|i| same(cfg[i], self.initial[i], self.eps))
    }
}

/// Robots at x = 0, d, 2d, ... on the x axis.
pub fn straight_instance(n: usize, d: f64) -> Instance {
    Instance {
        problem: ProblemKind::LineStretch,
        params: [("n".to_string(), n as f64), ("d".to_string(), d)].into_iter().collect(),
        robots: (0..n).map(|i| Point::new(d * i as f64, 0.0)).collect(),
    }
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let n = param_count(params, "n", 5, 4)?;
    let d = positive(params, "d", 1.0)?;
    let mut rng = rng(seed);
    let base = straight_instance(n, d);
    Ok(Instance { robots: place(&mut rng, &base.robots), ..base })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacement() {
        let req = LineStretch::from_instance(&straight_instance(4, 1.0), Tolerance::default()).unwrap();
        assert!(req.first_goal.dist(Point::new(-0.25, 0.0)) < 1e-15);
        let req = LineStretch::from_instance(&straight_instance(5, 2.0), Tolerance::default()).unwrap();
        assert!((req.last_goal.dist(Point::new(6.0, 0.0)) - 2.4).abs() < 1e-12);
    }

    #[test]
    fn internal_move_is_violation() {
        let inst = straight_instance(5, 1.0);
        let req = LineStretch::from_instance(&inst, Tolerance::default()).unwrap();
        assert!(req.check_move(0, 2, inst.robots[2], Point::new(2.0, 1.0), &inst.robots).is_err());
        assert!(req.check_move(0, 0, inst.robots[0], Point::new(-0.2, 0.0), &inst.robots).is_ok());
    }

    #[test]
    fn small_n_rejected() {
        assert!(LineStretch::from_instance(&straight_instance(3, 1.0), Tolerance::default()).is_err());
    }
}
