//! Line stretch with transparent visibility.

use super::{approx, SLACK};
use crate::engine::{Algorithm, Decision};
use crate::geom::{line_distance, Point, Tolerance};
use crate::model::{Color, Snapshot};

pub struct LsOblotTransparent;

impl Algorithm for LsOblotTransparent {
    fn name(&self) -> &'static str {
        "ls_oblot_transparent"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF]
    }

    /// An endpoint whose gap to its neighbor still equals the next gap steps
    /// outward by spacing / n; everyone else stays.
    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        if seen.len() < 2 {
            return Decision::stay();
        }
        let far = seen.iter().map(|s| s.pos).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("non-empty");
        let Some(e) = far.unit() else { return Decision::stay() };
        let scale = far.norm();
        if seen.iter().any(|s| line_distance(Point::ORIGIN, far, s.pos) > SLACK * tol.scaled(scale)) {
            return Decision::stay();
        }
        let mut along: Vec<f64> = seen.iter().map(|s| s.pos.dot(e)).collect();
        if along.iter().any(|&x| x <= 0.0) {
            return Decision::stay();
        }
        along.sort_by(f64::total_cmp);
        let (g1, g2) = (along[0], along[1] - along[0]);
        if !approx(g1, g2, scale, tol) {
            return Decision::stay();
        }
        let n = (seen.len() + 1) as f64;
        Decision::go(e * (-g2 / n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};

    fn line(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64, 0.0)).collect()
    }

    fn view(pts: &[Point], i: usize) -> Snapshot {
        let others: Vec<(Point, Option<Color>)> = (0..pts.len()).filter(|&j| j != i).map(|j| (pts[j], None)).collect();
        snap(pts[i], &others, None)
    }

    #[test]
    fn endpoints_stretch_once() {
        let tol = Tolerance::default();
        let mut pts = line(4);
        let d0 = LsOblotTransparent.decide(&view(&pts, 0), tol);
        assert!(global(pts[0], d0).dist(Point::new(-0.25, 0.0)) < 1e-12);
        assert_frame_and_order_invariant(&LsOblotTransparent, pts[3], &view(&pts, 3), tol);
        assert!(LsOblotTransparent.decide(&view(&pts, 1), tol).is_null());
        pts[0] = Point::new(-0.25, 0.0);
        assert!(LsOblotTransparent.decide(&view(&pts, 0), tol).is_null());
        let d3 = LsOblotTransparent.decide(&view(&pts, 3), tol);
        assert!(global(pts[3], d3).dist(Point::new(3.25, 0.0)) < 1e-12);
    }

    #[test]
    fn single_neighbor_view_is_null() {
        let pts = line(2);
        assert!(LsOblotTransparent.decide(&view(&pts, 0), Tolerance::default()).is_null());
    }
}
