//! Newcomer with external lights {off, s}.

use super::{approx, extent, SLACK};
use crate::engine::{Algorithm, Decision};
use crate::geom::{Point, Tolerance};
use crate::model::{Color, Seen, Snapshot};

pub const S: Color = Color::new("s");

/// Largest group of points at a common distance from `from` (within slack):
/// (distance, members).
fn equidistant_group(from: Point, pts: &[Point], scale: f64, tol: Tolerance) -> (f64, Vec<usize>) {
    let mut best: (f64, Vec<usize>) = (0.0, Vec::new());
    for &p in pts {
        let d = p.dist(from);
        let group: Vec<usize> = (0..pts.len()).filter(|&j| approx(pts[j].dist(from), d, scale, tol)).collect();
        if group.len() > best.1.len() {
            best = (d, group);
        }
    }
    best
}

/// c: at least 7 visible robots at one distance ρ and at most one elsewhere.
fn center_rule(seen: &[Seen], scale: f64, tol: Tolerance) -> Option<Decision> {
    let pts: Vec<Point> = seen.iter().map(|s| s.pos).collect();
    let (rho, group) = equidistant_group(Point::ORIGIN, &pts, scale, tol);
    if group.len() < 7 || pts.len() - group.len() > 1 {
        return None;
    }
    let s_on_circle = seen.iter().find(|s| s.color == Some(S) && approx(s.pos.norm(), rho, scale, tol));
    Some(match s_on_circle {
        Some(s) => Decision::go(s.pos * 0.5),
        None => Decision::stay(),
    })
}

/// s: some visible X has at least four other visible robots at a common
/// distance ρ, and the observer is strictly farther than ρ from X.
fn newcomer_rule(seen: &[Seen], scale: f64, tol: Tolerance) -> Option<Decision> {
    let pts: Vec<Point> = seen.iter().map(|s| s.pos).collect();
    for (i, &x) in pts.iter().enumerate() {
        let others: Vec<Point> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &p)| p).collect();
        let (rho, group) = equidistant_group(x, &others, scale, tol);
        if group.len() >= 4 && x.norm() > rho + SLACK * tol.scaled(scale) {
            let back = (-x).unit()?;
            return Some(Decision::go_with(x + back * rho, S));
        }
    }
    None
}

pub struct NwcFcom;

impl Algorithm for NwcFcom {
    fn name(&self) -> &'static str {
        "nwc_fcom"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF, S]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        let scale = extent(&seen);
        if let Some(d) = center_rule(&seen, scale, tol) {
            return d;
        }
        newcomer_rule(&seen, scale, tol).unwrap_or_else(Decision::stay)
    }
}
