//! Pseudo: geometric election under synchronous modes, and the four-color
//! protocol {off, on, a, b} under ASYNC.

use super::{color_set, with_self};
use crate::engine::{Algorithm, Decision};
use crate::geom::{Point, Tolerance};
use crate::model::{Color, Snapshot};
use crate::problems::pseudo::{construct_target, decompose, layout, Layout};

pub const ON: Color = Color::new("on");
pub const A: Color = Color::new("a");
pub const B: Color = Color::new("b");

/// Roles in the observer's view (observer last) when exactly one robot lies
/// outside a pseudo-polygon.
fn read_layout(pts: &[Point], tol: Tolerance) -> Option<Layout> {
    let (members, out) = decompose(pts, 2, tol)?;
    if out.len() != 1 {
        return None;
    }
    layout(pts, &members, out[0], tol)
}

/// Elects by geometry alone: the member farthest from the watcher moves.
/// Registered twice: under synchronous modes it is correct; run under ASYNC
/// with internal lights it exhibits the false election.
pub struct PseOblotSync {
    pub name: &'static str,
}

impl Algorithm for PseOblotSync {
    fn name(&self) -> &'static str {
        self.name
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let pts = with_self(&snap.canonical());
        let me = pts.len() - 1;
        match read_layout(&pts, tol) {
            Some(lay) if lay.a == me => construct_target(&pts, &lay, tol).map_or_else(Decision::stay, Decision::go),
            _ => Decision::stay(),
        }
    }
}

pub struct PseFcomAsync;

impl Algorithm for PseFcomAsync {
    fn name(&self) -> &'static str {
        "pse_fcom_async"
    }

    fn palette(&self) -> &'static [Color] {
        &[Color::OFF, ON, A, B]
    }

    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision {
        let pts = with_self(&snap.canonical());
        let me = pts.len() - 1;
        let Some(lay) = read_layout(&pts, tol) else { return Decision::stay() };
        let cs = color_set(snap);
        if cs.contains(&Color::OFF) {
            let role = if lay.a == me {
                A
            } else if lay.b == me {
                B
            } else {
                ON
            };
            return Decision::stay_with(role);
        }
        let is = |set: &[Color]| cs.len() == set.len() && set.iter().all(|c| cs.contains(c));
        if is(&[A, B, ON]) {
            Decision::stay_with(ON)
        } else if is(&[A, ON]) {
            Decision::stay_with(B)
        } else if is(&[B, ON]) && lay.a == me {
            construct_target(&pts, &lay, tol).map_or_else(Decision::stay, |x| Decision::go_with(x, A))
        } else {
            Decision::stay()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::testing::{assert_frame_and_order_invariant, global, snap};
    use crate::problems::pseudo::{reference_instance, target_ok};

    fn view(pts: &[Point], colors: Option<&[Color]>, i: usize) -> Snapshot {
        let others: Vec<(Point, Option<Color>)> =
            (0..pts.len()).filter(|&j| j != i).map(|j| (pts[j], colors.map(|c| c[j]))).collect();
        snap(pts[i], &others, None)
    }

    fn fig() -> (Vec<Point>, Layout) {
        let pts = reference_instance().robots;
        let m = pts.len() - 1;
        let lay = layout(&pts, &(0..m).collect::<Vec<_>>(), m, Tolerance::default()).unwrap();
        (pts, lay)
    }

    #[test]
    fn sync_election() {
        let tol = Tolerance::default();
        let (pts, lay) = fig();
        let alg = PseOblotSync { name: "pse_oblot_sync" };
        for i in 0..pts.len() {
            let d = alg.decide(&view(&pts, None, i), tol);
            if i == lay.a {
                let x = global(pts[i], d);
                assert!(target_ok(&pts, &lay, x, tol));
                assert_frame_and_order_invariant(&alg, pts[i], &view(&pts, None, i), tol);
                let mut after = pts.clone();
                after[i] = x;
                for j in 0..pts.len() {
                    assert!(alg.decide(&view(&after, None, j), tol).is_null(), "robot {j} after the move");
                }
            } else {
                assert!(d.is_null(), "robot {i}");
            }
        }
    }

    #[test]
    fn fcom_color_rules() {
        let tol = Tolerance::default();
        let (pts, lay) = fig();
        let n = pts.len();
        let off = vec![Color::OFF; n];
        assert_eq!(PseFcomAsync.decide(&view(&pts, Some(&off), lay.a), tol), Decision::stay_with(A));
        assert_eq!(PseFcomAsync.decide(&view(&pts, Some(&off), lay.b), tol), Decision::stay_with(B));
        assert_eq!(PseFcomAsync.decide(&view(&pts, Some(&off), lay.c), tol), Decision::stay_with(ON));

        let mut colors = vec![ON; n];
        colors[lay.a] = A;
        colors[lay.b] = B;
        assert_eq!(PseFcomAsync.decide(&view(&pts, Some(&colors), lay.c), tol), Decision::stay_with(ON));
        assert_eq!(PseFcomAsync.decide(&view(&pts, Some(&colors), lay.b), tol), Decision::stay_with(B));
        let s = view(&pts, Some(&colors), lay.a);
        let d = PseFcomAsync.decide(&s, tol);
        assert_eq!(d.color, Some(A));
        assert!(target_ok(&pts, &lay, global(pts[lay.a], d), tol));
        assert_frame_and_order_invariant(&PseFcomAsync, pts[lay.a], &s, tol);
    }
}
