use std::f64::consts::TAU;

use proptest::prelude::*;
use swarm_core::algos;
use swarm_core::experiment::{default_schedule, Experiment};
use swarm_core::geom::{associated_polygon, blocks, collinear, rotate_about, Orientation, Point, RegularPolygon, Tolerance};
use swarm_core::model::{visible_set, LocalFrame, ModelId};
use swarm_core::problems::generate;
use swarm_core::relmap::{close, default_facts, relation_candidates, Relation};
use swarm_core::sched::{
    check_fairness, collinearity_timed_look, epoch_partition_rounds, generate_async, generate_rounds, ScheduleSpec,
};
use swarm_core::trace::{from_jsonl_str, to_jsonl_string};

fn point() -> impl Strategy<Value = Point> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn blocking_implies_collinear(o in point(), q in point(), s in -0.5..1.5f64, jitter in -1e-3..1e-3f64) {
        let c = o.lerp(q, s) + Point::new(jitter, -jitter);
        let tol = Tolerance::default();
        if blocks(o, q, c, tol) {
            prop_assert!(collinear(o, q, c, tol));
        }
    }

    #[test]
    fn rotation_keeps_distance_to_center(p in point(), c in point(), theta in -TAU..TAU, ccw in any::<bool>()) {
        let o = if ccw { Orientation::Ccw } else { Orientation::Cw };
        let r = rotate_about(p, c, theta, o);
        prop_assert!((r.dist(c) - p.dist(c)).abs() <= 1e-9 * (1.0 + p.dist(c)));
        let back = rotate_about(r, c, theta, o.reversed());
        prop_assert!(back.dist(p) <= 1e-9 * (1.0 + p.dist(c)));
    }

    #[test]
    fn frames_round_trip(origin in point(), p in point(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = LocalFrame::sample(&mut rng, origin);
        prop_assert!(f.to_global(f.to_local(p)).dist(p) <= 1e-9 * (1.0 + p.norm() + origin.norm()));
        prop_assert!(f.to_local(origin).norm() <= 1e-12 * (1.0 + origin.norm()));
    }

    #[test]
    fn visibility_is_symmetric_on_lattices(cells in proptest::collection::btree_set((0i32..5, 0i32..5), 3..12)) {
        let pts: Vec<Point> = cells.iter().map(|&(x, y)| Point::new(x as f64, y as f64)).collect();
        let tol = Tolerance::default();
        for i in 0..pts.len() {
            for j in visible_set(&pts, i, false, tol) {
                prop_assert!(visible_set(&pts, j, false, tol).contains(&i));
            }
            prop_assert_eq!(visible_set(&pts, i, true, tol).len(), pts.len() - 1);
        }
    }

    #[test]
    fn more_than_half_the_vertices_determine_the_polygon(
        n in 3usize..13, mask in any::<u32>(), c in point(), r in 0.1..20.0f64, phase in 0.0..TAU,
    ) {
        let poly = RegularPolygon::new(c, r, n, phase);
        let mut ks: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        for k in 0..n {
            if ks.len() * 2 > n && ks.len() >= 3 {
                break;
            }
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
        let members: Vec<Point> = ks.iter().map(|&k| poly.vertex(k)).collect();
        let got = associated_polygon(&members, Tolerance::default()).unwrap();
        prop_assert!(got.polygon.same_as(&poly, Tolerance::default()));
    }

    #[test]
    fn timed_look_lands_on_the_line(from in point(), to in point(), b in point(), c in point(), t0 in 0.0..10.0f64, dt in 0.1..10.0f64) {
        prop_assume!(b.dist(c) > 1e-3);
        if let Some(t) = collinearity_timed_look(from, to, t0, t0 + dt, b, c) {
            prop_assert!((t0..=t0 + dt).contains(&t));
            let a = from.lerp(to, (t - t0) / dt);
            prop_assert!(collinear(a, b, c, Tolerance::new(1e-7, 1e-7).unwrap()));
        }
    }

    #[test]
    fn ssync_schedules_are_fair_and_deterministic(seed in any::<u64>(), n in 2usize..9, rounds in 20usize..200) {
        let spec = ScheduleSpec::ssync(seed, rounds);
        let s = generate_rounds(&spec, n).unwrap();
        prop_assert_eq!(&s, &generate_rounds(&spec, n).unwrap());
        prop_assert!(s.rounds.iter().all(|r| !r.is_empty()));
        prop_assert!(check_fairness(&s, n, 4 * n + 1).is_ok());
        let epochs = epoch_partition_rounds(&s, n).unwrap();
        for &(start, end) in &epochs {
            let mut seen = vec![false; n];
            for r in &s.rounds[start..end] {
                for &i in r {
                    seen[i] = true;
                }
            }
            prop_assert!(seen.iter().any(|s| !s), "epoch [{start}, {end}) is not minimal");
        }
    }

    #[test]
    fn async_activations_are_ordered(seed in any::<u64>(), n in 1usize..8) {
        let spec = ScheduleSpec::asynchronous(seed, 30.0);
        let acts = generate_async(&spec, n).unwrap();
        prop_assert_eq!(&acts, &generate_async(&spec, n).unwrap());
        for a in &acts {
            prop_assert!(a.t_look <= a.t_move_start && a.t_move_start <= a.t_move_end);
        }
        for i in 0..n {
            let mine: Vec<_> = acts.iter().filter(|a| a.robot == i).collect();
            prop_assert!(mine.windows(2).all(|w| w[0].t_move_end <= w[1].t_look));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positive_runs_replay_identically(k in 0usize..11, seed in 0u64..1000) {
        let info = algos::positive().nth(k).unwrap();
        let e = Experiment {
            model: info.weakest,
            algo: info.name.into(),
            instance: generate(info.problem, &info.problem.default_params(), seed).unwrap(),
            schedule: default_schedule(info, info.weakest.sync, seed),
            transparent: info.transparent,
            tol: Tolerance::default(),
            seed,
            force: false,
        };
        let a = e.run().unwrap();
        prop_assert!(a.success, "{} seed {seed}", info.name);
        let text = to_jsonl_string(a.trace.as_ref().unwrap());
        prop_assert_eq!(&text, &to_jsonl_string(e.run().unwrap().trace.as_ref().unwrap()));
        prop_assert_eq!(&to_jsonl_string(&from_jsonl_str(&text, Tolerance::default()).unwrap()), &text);
    }
}

#[test]
fn weaker_models_are_never_greater_or_orthogonal() {
    let mx = close(&default_facts()).unwrap();
    for a in ModelId::all() {
        for b in ModelId::all().into_iter().filter(|&b| b != a && a.structural_leq(b)) {
            let c = relation_candidates(a, b, &mx).unwrap().candidates;
            assert!(!c.contains(&Relation::Greater) && !c.contains(&Relation::Orthogonal), "{a} vs {b}: {c:?}");
        }
    }
}
