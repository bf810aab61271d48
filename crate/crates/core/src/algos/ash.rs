//! Angle shift under FSYNC without lights.

use std::f64::consts::PI;

use crate::engine::{Algorithm, Decision};
use crate::geom::{rotate_about, Orientation, Point, Tolerance};
use crate::model::{Color, Snapshot};
use crate::problems::angleshift::angles;

pub struct AshOblotFsync;

impl Algorithm for AshOblotFsync {
    fn name(&self) -> &'static str {
        "ash_oblot_fsync"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let seen = snap.canonical();
        if seen.len() != 2 {
            return Decision::stay();
        }
        let pts = [Point::ORIGIN, seen[0].pos, seen[1].pos];
        let ang = angles(pts[0], pts[1], pts[2]);
        let margin = tol.angle_eps();
        if ang.iter().any(|&x| x >= PI / 2.0 - margin) {
            return Decision::stay();
        }
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| ang[j].total_cmp(&ang[i]));
        if ang[idx[0]] - ang[idx[1]] <= margin || ang[idx[1]] - ang[idx[2]] <= margin {
            return Decision::stay();
        }
        let (a, b, c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
        let Some(o) = Orientation::of(a, b, c) else {
            return Decision::stay();
        };
        let alpha = ang[idx[0]];
        match idx.iter().position(|&i| i == 0) {
            Some(1) => Decision::go(rotate_about(b, a, alpha, o)),
            Some(2) => Decision::go(rotate_about(c, a, PI - alpha, o)),
            _ => Decision::stay(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};
    use crate::problems::angleshift::{reference_instance, targets};

    #[test]
    fn reference_round_one_and_terminal() {
        let tol = Tolerance::default();
        let r = reference_instance().robots;
        let (b2, c2) = targets(r[0], r[1], r[2]).unwrap();
        let view = |i: usize, pts: &[Point]| {
            let others: Vec<(Point, Option<Color>)> = (0..3).filter(|&j| j != i).map(|j| (pts[j], None)).collect();
            snap(pts[i], &others, None)
        };
        assert!(AshOblotFsync.decide(&view(0, &r), tol).is_null());
        assert!(global(r[1], AshOblotFsync.decide(&view(1, &r), tol)).dist(b2) < 1e-12);
        assert!(global(r[2], AshOblotFsync.decide(&view(2, &r), tol)).dist(c2) < 1e-12);
        assert_frame_and_order_invariant(&AshOblotFsync, r[2], &view(2, &r), tol);
        let after = [r[0], b2, c2];
        for i in 0..3 {
            assert!(AshOblotFsync.decide(&view(i, &after), tol).is_null());
        }
    }
}
