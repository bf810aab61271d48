//! Newcomer. Robots 0..n sit on a circle of radius ρ, robot n (c) at its
//! center and robot n+1 (s) outside. s travels toward c and stops on the
//! circle; then c moves to distance ρ/2 from s along s's radius.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::{
    param_count, place, pos_eps, positive, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement,
    Terminal, MAX_ATTEMPTS,
};
use crate::geom::{line_distance, Point, Tolerance};
use crate::model::visible_set;
use crate::trace::ViolationKind;

pub struct Newcomer {
    initial: Vec<Point>,
    n: usize,
    pub rho: f64,
    pub s_goal: Point,
    pub c_goal: Point,
    eps: f64,
}

impl Newcomer {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        if r.len() < 9 {
            return Err(ProblemError::InvalidInstance("needs at least 7 circle robots plus c and s".into()));
        }
        let n = r.len() - 2;
        let (c, s) = (r[n], r[n + 1]);
        let eps = pos_eps(r, tol);
        let rho = r[0].dist(c);
        if r[..n].iter().any(|p| (p.dist(c) - rho).abs() > eps) {
            return Err(ProblemError::InvalidInstance("circle robots are not equidistant from c".into()));
        }
        if s.dist(c) <= rho + eps {
            return Err(ProblemError::InvalidInstance("s is not outside the circle".into()));
        }
        if !visible_set(r, n + 1, false, tol).contains(&n) {
            return Err(ProblemError::InvalidInstance("s cannot see c".into()));
        }
        let dir = (s - c).unit().expect("s differs from c");
        let s_goal = c + dir * rho;
        let c_goal = c.midpoint(s_goal);
        Ok(Newcomer { initial: r.clone(), n, rho, s_goal, c_goal, eps })
    }

    fn circle_still(&self, cfg: &[Point]) -> bool {
        (0..self.n).all(|i| same(cfg[i], self.initial[i], self.eps))
    }
}

impl Requirement for Newcomer {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Newcomer
    }

    fn terminal(&self) -> Terminal {
        Terminal::Finite(2)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, to: Point, _entry: &[Point]) -> MoveCheck {
        let fail = |msg: String| Err((ViolationKind::PathConstraint(phase), msg));
        let (c, s) = (self.n, self.n + 1);
        if robot < self.n {
            return fail(format!("circle robot {robot} must stay still"));
        }
        if robot == s {
            if phase >= 1 {
                return fail("s moves after reaching the circle".into());
            }
            if line_distance(self.initial[c], self.initial[s], to) > self.eps {
                return fail(format!("s leaves the line towards c, stopping at {to}"));
            }
            return Ok(());
        }
        debug_assert_eq!(robot, c);
        if phase == 0 {
            return fail("c moves before s reached the circle".into());
        }
        if !same(to, self.c_goal, self.eps) {
            return fail(format!("c stops at {to} instead of halfway to s"));
        }
        Ok(())
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        let (c, s) = (self.n, self.n + 1);
        if !self.circle_still(cfg) || !same(cfg[s], self.s_goal, self.eps) {
            return false;
        }
        match next {
            1 => same(cfg[c], self.initial[c], self.eps),
            2 => same(cfg[c], self.c_goal, self.eps),
            _ => false,
        }
    }
}

fn ang_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let n = param_count(params, "n", 7, 7)?;
    let rho = positive(params, "rho", 2.0)?;
    let mut rng = rng(seed);
    let margin = (3.0f64).to_radians().min(PI / (3.0 * n as f64));
    for _ in 0..MAX_ATTEMPTS {
        let mut angles: Vec<f64> = Vec::with_capacity(n + 1);
        while angles.len() < n + 1 {
            let a = rng.gen_range(0.0..TAU);
            let clash = angles.iter().any(|&b| ang_dist(a, b) < 2.0 * margin || ang_dist(a, b + PI) < margin);
            if !clash {
                angles.push(a);
            }
        }
        let theta_s = angles.pop().expect("n+1 angles");
        let k = rng.gen_range(1.5..2.5);
        let mut pts: Vec<Point> = angles.iter().map(|&a| Point::polar(Point::ORIGIN, rho, a)).collect();
        pts.push(Point::ORIGIN);
        pts.push(Point::polar(Point::ORIGIN, rho * k, theta_s));
        if has_near_collinear(&pts, 0.02 * rho) {
            continue;
        }
        let robots = place(&mut rng, &pts);
        return Ok(Instance { problem: ProblemKind::Newcomer, params: params.clone(), robots });
    }
    Err(ProblemError::Exhausted(MAX_ATTEMPTS))
}

/// Some triple has a point within `margin` of the line through the other two.
pub(crate) fn has_near_collinear(pts: &[Point], margin: f64) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k != i && k != j && line_distance(pts[i], pts[j], pts[k]) < margin {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn final_distance_is_half_radius() {
        let mut p = Params::new();
        p.insert("rho".into(), 2.0);
        let inst = generate(&p, 4).unwrap();
        let req = Newcomer::from_instance(&inst, Tolerance::default()).unwrap();
        assert!((req.s_goal.dist(req.c_goal) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_robot_move_is_violation() {
        let inst = generate(&Params::new(), 2).unwrap();
        let req = Newcomer::from_instance(&inst, Tolerance::default()).unwrap();
        let r = &inst.robots;
        assert!(req.check_move(0, 0, r[0], r[0] * 1.1, r).is_err());
        assert!(req.check_move(0, 8, r[8], req.s_goal, r).is_ok());
        assert!(req.check_move(0, 7, r[7], req.c_goal, r).is_err());
        assert!(req.check_move(1, 7, r[7], req.c_goal, r).is_ok());
    }

    #[test]
    fn all_robots_visible_initially() {
        for seed in 0..10 {
            let inst = generate(&Params::new(), seed).unwrap();
            for i in 0..inst.robots.len() {
                assert_eq!(visible_set(&inst.robots, i, false, Tolerance::default()).len(), inst.robots.len() - 1);
            }
        }
    }
}
