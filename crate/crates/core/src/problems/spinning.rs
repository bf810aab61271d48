//! Spinning. Robots on a circle with a unique minimal angular gap α rotate
//! perpetually, each cycle by α/2 in the direction from the gap endpoint a0
//! to the other endpoint a1. Robot roles are symmetric; index i is the
//! robot starting at the i-th given point.

use std::f64::consts::TAU;

use rand::Rng;

use super::{
    param_count, place, pos_eps, positive, rng, same, Instance, MoveCheck, Params, ProblemError, ProblemKind, Requirement,
    Terminal, MAX_ATTEMPTS,
};
use crate::geom::{angular_order, fit_circle, rotate_about, Orientation, Point, Tolerance};
use crate::trace::ViolationKind;

/// Rotation data read off a configuration of robots on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRule {
    /// Index of the gap endpoint whose other outer gap is larger.
    pub a0: usize,
    pub a1: usize,
    /// Minimal gap.
    pub alpha: f64,
    /// Direction from a0 to a1 along the minimal gap.
    pub orientation: Orientation,
}

/// Reads the rotation rule: unique minimal gap (a0, a1), where a1 is the
/// endpoint whose outer neighbor is closer. `None` when either choice is tied.
pub fn spin_rule(points: &[Point], center: Point, tol: Tolerance) -> Option<SpinRule> {
    let ao = angular_order(points, center, tol)?;
    if ao.ambiguous || ao.len() < 3 {
        return None;
    }
    let pos = ao.min_pos as isize;
    let (u, v) = ao.min_pair;
    let outer_u = ao.gap_at(pos - 1);
    let outer_v = ao.gap_at(pos + 1);
    if (outer_u - outer_v).abs() <= tol.angle_eps() {
        return None;
    }
    let (a0, a1, orientation) = if outer_v < outer_u { (u, v, Orientation::Ccw) } else { (v, u, Orientation::Cw) };
    Some(SpinRule { a0, a1, alpha: ao.min_gap, orientation })
}

pub struct Spinning {
    initial: Vec<Point>,
    pub center: Point,
    pub rule: SpinRule,
    eps: f64,
}

impl Spinning {
    pub fn from_instance(inst: &Instance, tol: Tolerance) -> Result<Self, ProblemError> {
        let r = &inst.robots;
        if r.len() < 5 {
            return Err(ProblemError::InvalidInstance("needs at least 5 robots".into()));
        }
        let eps = pos_eps(r, tol);
        let (center, _, dev) = fit_circle(r)?;
        if dev > eps {
            return Err(ProblemError::InvalidInstance("robots are not on a common circle".into()));
        }
        let rule = spin_rule(r, center, tol)
            .ok_or_else(|| ProblemError::InvalidInstance("minimal gap or its orientation is not unique".into()))?;
        Ok(Spinning { initial: r.clone(), center, rule, eps })
    }

    /// Position of robot `i` after `k` cycles.
    pub fn target(&self, i: usize, k: usize) -> Point {
        rotate_about(self.initial[i], self.center, k as f64 * self.rule.alpha / 2.0, self.rule.orientation)
    }
}

impl Requirement for Spinning {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Spinning
    }

    fn terminal(&self) -> Terminal {
        Terminal::Perpetual(1)
    }

    fn check_move(&self, phase: usize, robot: usize, _from: Point, to: Point, _entry: &[Point]) -> MoveCheck {
        let goal = self.target(robot, phase + 1);
        if same(to, goal, self.eps) {
            Ok(())
        } else {
            Err((ViolationKind::PathConstraint(phase), format!("robot {robot} stops at {to}, target is {goal}")))
        }
    }

    fn phase_holds(&self, next: usize, cfg: &[Point], _entry: &[Point]) -> bool {
        (0..cfg.len()).all(|i| same(cfg[i], self.target(i, next), self.eps))
    }
}

/// Robots at the given angles (degrees) on a circle.
pub fn instance_from_angles(center: Point, radius: f64, degrees: &[f64]) -> Instance {
    Instance {
        problem: ProblemKind::Spinning,
        params: [("n".to_string(), degrees.len() as f64), ("radius".to_string(), radius)].into_iter().collect(),
        robots: degrees.iter().map(|d| Point::polar(center, radius, d.to_radians())).collect(),
    }
}

/// Six robots at 0°, 20°, 60°, 100°, 200°, 280° on the unit circle.
pub fn reference_instance() -> Instance {
    instance_from_angles(Point::ORIGIN, 1.0, &[0.0, 20.0, 60.0, 100.0, 200.0, 280.0])
}

pub fn generate(params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let n = param_count(params, "n", 6, 5)?;
    let radius = positive(params, "radius", 1.0)?;
    let mut rng = rng(seed);
    let margin = 3f64.to_radians();
    for _ in 0..MAX_ATTEMPTS {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let gaps: Vec<f64> = (0..n).map(|i| if i + 1 == n { angles[0] + TAU - angles[i] } else { angles[i + 1] - angles[i] }).collect();
        let mut sorted = gaps.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted[0] < 4.0 * margin || sorted[1] - sorted[0] < margin {
            continue;
        }
        let m = gaps.iter().position(|&g| g == sorted[0]).expect("min gap present");
        let before = gaps[(m + n - 1) % n];
        let after = gaps[(m + 1) % n];
        if (before - after).abs() < margin {
            continue;
        }
        let pts: Vec<Point> = angles.iter().map(|&a| Point::polar(Point::ORIGIN, radius, a)).collect();
        return Ok(Instance { problem: ProblemKind::Spinning, params: params.clone(), robots: place(&mut rng, &pts) });
    }
    Err(ProblemError::Exhausted(MAX_ATTEMPTS))
}
