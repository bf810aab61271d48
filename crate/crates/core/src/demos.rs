//! Counterexample executions: each one builds an adversarial schedule against
//! an algorithm and reports the violation it leads to. Instances and
//! schedules are fixed so the runs are reproducible bit for bit.

use std::fmt;

use thiserror::Error;

use crate::algos::{self, ash::AshOblotFsync, fff::FffFcomFsync, ls::LsOblotTransparent, spi::SpiOblotFsync};
use crate::engine::{initial_configuration, run_async, run_rounds, EngineError, RunOptions};
use crate::geom::{collinear, Point, Tolerance};
use crate::model::{LightClass, ModelId, SyncMode};
use crate::problems::{linestretch, monitor, pseudo, requirement, spinning, Instance, Params, ProblemError, ProblemKind};
use crate::sched::{
    collinearity_timed_look, AsyncActivation, AsyncRandomSource, DoubleActivation, FsyncSource, ScriptedAsync, ScriptedRounds,
};
use crate::trace::{visibility_audit, Payload, Trace, Violation, ViolationKind};

pub const NAMES: [&str; 5] =
    ["fff-ssync-break", "spinning-double-activation", "pseudo-false-election", "angleshift-ssync-loss", "linestretch-opacity"];

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("unknown demo '{0}' (known: {known})", known = NAMES.join(", "))]
    Unknown(String),
    #[error("demo setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub name: &'static str,
    /// The documented violation occurred.
    pub reproduced: bool,
    pub lines: Vec<String>,
    /// Executions the report is based on.
    pub traces: Vec<Trace>,
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "demo {}: {}", self.name, if self.reproduced { "violation reproduced" } else { "NOT reproduced" })?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        Ok(())
    }
}

pub fn run_demo(name: &str, tol: Tolerance) -> Result<DemoReport, DemoError> {
    match name {
        "fff-ssync-break" => fff_ssync_break(tol),
        "spinning-double-activation" => spinning_double_activation(tol),
        "pseudo-false-election" => pseudo_false_election(tol),
        "angleshift-ssync-loss" => angleshift_ssync_loss(tol),
        "linestretch-opacity" => linestretch_opacity(tol),
        other => Err(DemoError::Unknown(other.to_string())),
    }
}

fn opts(tol: Tolerance) -> RunOptions {
    RunOptions { transparent: false, tol, seed: 0, halt_on_collision: true }
}

fn model(light: LightClass, sync: SyncMode) -> ModelId {
    ModelId::new(light, sync)
}

fn path_violations(inst: &Instance, trace: &Trace, tol: Tolerance) -> Result<Vec<Violation>, DemoError> {
    let req = requirement(inst, tol)?;
    Ok(monitor(req.as_ref(), trace).violations.into_iter().filter(|v| matches!(v.kind, ViolationKind::PathConstraint(_))).collect())
}

/// p, q at distance 2, r on their bisector at 2.6 from the midpoint.
pub fn fff_fixture() -> Instance {
    Instance {
        problem: ProblemKind::FlipFlopFlip,
        params: Params::new(),
        robots: vec![Point::new(0.0, 1.0), Point::new(0.0, -1.0), Point::new(2.6, 0.0)],
    }
}

/// The color-phase protocol under SSYNC: r is activated alone twice in a
/// row, so p and q still show the old phase and r flips again.
fn fff_ssync_break(tol: Tolerance) -> Result<DemoReport, DemoError> {
    let inst = fff_fixture();
    let algo = FffFcomFsync;
    let mut src = DoubleActivation::new(Box::new(FsyncSource), 2);
    let trace = run_rounds(model(LightClass::Fcom, SyncMode::Ssync), &algo, &initial_configuration(&algo, &inst.robots), &mut src, 4, opts(tol))?;
    let v = path_violations(&inst, &trace, tol)?;
    let mut lines = vec![format!("adversary activates r alone in rounds {:?} and {:?}", src.fired_at(), src.fired_at().map(|k| k + 1))];
    let flips: Vec<String> = trace.moves().iter().filter(|m| m.0 == 2).map(|m| format!("r {} -> {} at t={}", m.1, m.2, m.3)).collect();
    lines.extend(flips);
    if let Some(first) = v.first() {
        lines.push(format!("repeated flip: {first}"));
    }
    Ok(DemoReport { name: "fff-ssync-break", reproduced: !v.is_empty(), lines, traces: vec![trace] })
}

/// OBLOT robots under SSYNC: r0 is activated alone twice and rotates twice,
/// since the configuration after its first rotation tells it to rotate again.
fn spinning_double_activation(tol: Tolerance) -> Result<DemoReport, DemoError> {
    let inst = spinning::reference_instance();
    let algo = SpiOblotFsync;
    let m = model(LightClass::Oblot, SyncMode::Ssync);
    let init = initial_configuration(&algo, &inst.robots);
    let probe = run_rounds(model(LightClass::Oblot, SyncMode::Fsync), &algo, &init, &mut FsyncSource, 1, opts(tol))?;
    let target = probe.moves().first().map(|m| m.0).ok_or_else(|| DemoError::Setup("no robot moves in the first round".into()))?;
    let mut src = DoubleActivation::new(Box::new(FsyncSource), target);
    let trace = run_rounds(m, &algo, &init, &mut src, 4, opts(tol))?;
    let v = path_violations(&inst, &trace, tol)?;
    let rotations = trace.moves().iter().filter(|mv| mv.0 == target && mv.3 < 2.0).count();
    let mut lines = vec![
        format!("r0 is robot {target}; activated alone from round {:?} for two rounds", src.fired_at()),
        format!("r0 rotations in those rounds: {rotations}"),
    ];
    if let Some(first) = v.first() {
        lines.push(format!("double rotation: {first}"));
    }
    Ok(DemoReport { name: "spinning-double-activation", reproduced: rotations == 2 && !v.is_empty(), lines, traces: vec![trace] })
}

/// Geometric election with internal lights only, under ASYNC: b looks while
/// a, already on its way, is hidden behind c. b sees a pseudo-polygon without
/// a and elects itself, so two robots move at once.
fn pseudo_false_election(tol: Tolerance) -> Result<DemoReport, DemoError> {
    let inst = pseudo::reference_instance();
    let info = algos::lookup("pse_internal_only").expect("registered");
    let algo = (info.build)();
    let pts = &inst.robots;
    let req = pseudo::Pseudo::from_instance(&inst, tol)?;
    let lay = &req.layout;
    let x = pseudo::construct_target(pts, lay, tol).ok_or_else(|| DemoError::Setup("no target for a".into()))?;
    let (a_start, a_end) = (0.5, 1.5);
    let t_hide = collinearity_timed_look(pts[lay.a], x, a_start, a_end, pts[lay.b], pts[lay.c])
        .ok_or_else(|| DemoError::Setup("a's path does not cross line(b, c)".into()))?;
    let s = (t_hide - a_start) / (a_end - a_start);
    let a_then = pts[lay.a].lerp(x, s);
    if !(pts[lay.b].dist(pts[lay.c]) < pts[lay.b].dist(a_then) && (a_then - pts[lay.b]).dot(pts[lay.c] - pts[lay.b]) > 0.0) {
        return Err(DemoError::Setup("c is not between b and a at the crossing".into()));
    }
    let acts = vec![
        AsyncActivation { robot: lay.a, t_look: 0.0, t_move_start: a_start, t_move_end: a_end },
        AsyncActivation { robot: lay.b, t_look: t_hide, t_move_start: t_hide + 0.05, t_move_end: t_hide + 1.0 },
    ];
    let mut src = ScriptedAsync::new(acts, pts.len());
    let m = model(LightClass::Fsta, SyncMode::Async);
    let trace = run_async(m, algo.as_ref(), &initial_configuration(algo.as_ref(), pts), &mut src, 3.0, opts(tol))?;
    let b_look = trace.looks().find(|l| l.0 == lay.b).map(|l| match l.2 {
        Payload::Look { visible, .. } => *visible,
        _ => 0,
    });
    let moves = trace.moves();
    let overlap = moves.iter().enumerate().find_map(|(i, p)| {
        moves[i + 1..].iter().find(|q| q.0 != p.0 && q.3 < p.4 && p.3 < q.4).map(|q| (p.0, q.0, p.3.max(q.3)))
    });
    let mut lines = vec![
        format!("a = robot {}, b = robot {}, c = robot {}, a moves over [{a_start}, {a_end}]", lay.a, lay.b, lay.c),
        format!("a lies on line(b, c) behind c at t={t_hide}; b looks then and sees {} of {} robots", b_look.unwrap_or(0), pts.len() - 1),
    ];
    if let Some((r1, r2, t)) = overlap {
        lines.push(format!("two robots moving concurrently at t={t}: robots {r1} and {r2}"));
    }
    Ok(DemoReport { name: "pseudo-false-election", reproduced: overlap.is_some(), lines, traces: vec![trace] })
}

/// Triangle with a at the origin, b at (2, 0), c at distance 3 and the given
/// angle at a, in degrees.
pub fn angleshift_fixture(alpha_deg: f64) -> Instance {
    Instance {
        problem: ProblemKind::AngleShift,
        params: Params::new(),
        robots: vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::polar(Point::ORIGIN, 3.0, alpha_deg.to_radians())],
    }
}

fn sorted_distances(p: &[Point]) -> [f64; 3] {
    let mut d = [p[0].dist(p[1]), p[0].dist(p[2]), p[1].dist(p[2])];
    d.sort_by(f64::total_cmp);
    d
}

/// Under SSYNC only b is activated: b lands on line(a, c) and the robots are
/// collinear. Two triangles with the same |ab| and |ac| but different α end
/// in congruent configurations, so c cannot recover α.
fn angleshift_ssync_loss(tol: Tolerance) -> Result<DemoReport, DemoError> {
    let mut lines = Vec::new();
    let mut finals = Vec::new();
    let mut traces = Vec::new();
    for alpha in [80.0, 85.0] {
        let inst = angleshift_fixture(alpha);
        requirement(&inst, tol)?;
        let algo = AshOblotFsync;
        let mut src = ScriptedRounds::new(vec![vec![1]]);
        let m = model(LightClass::Oblot, SyncMode::Ssync);
        let trace = run_rounds(m, &algo, &initial_configuration(&algo, &inst.robots), &mut src, 1, opts(tol))?;
        let f = trace.final_config.positions();
        let flat = collinear(f[0], f[1], f[2], tol);
        lines.push(format!("α = {alpha}°: after b's move a={} b={} c={}, collinear: {flat}", f[0], f[1], f[2]));
        finals.push((flat, sorted_distances(&f)));
        traces.push(trace);
    }
    let (d0, d1) = (finals[0].1, finals[1].1);
    let same = d0.iter().zip(d1).all(|(x, y)| (x - y).abs() <= tol.scaled(*x));
    lines.push(format!("pairwise distances {d0:?} vs {d1:?}: {}", if same { "congruent, α not recoverable" } else { "different" }));
    Ok(DemoReport { name: "angleshift-ssync-loss", reproduced: finals.iter().all(|f| f.0) && same, lines, traces })
}

/// Transparent-visibility algorithm run with opaque robots on a straight
/// line: each endpoint sees only its neighbor and cannot count the swarm.
fn linestretch_opacity(tol: Tolerance) -> Result<DemoReport, DemoError> {
    let mut lines = Vec::new();
    let mut traces = Vec::new();
    let mut all = true;
    for n in 4..=10 {
        let inst = linestretch::straight_instance(n, 1.0);
        let algo = LsOblotTransparent;
        let mut src = AsyncRandomSource::new(n as u64, n);
        let m = model(LightClass::Oblot, SyncMode::Async);
        let trace = run_async(m, &algo, &initial_configuration(&algo, &inst.robots), &mut src, 10.0, opts(tol))?;
        let endpoint_sees = trace.looks().find(|l| l.0 == 0 || l.0 == n - 1).and_then(|l| match l.2 {
            Payload::Look { visible, .. } => Some(*visible),
            _ => None,
        });
        let audit = visibility_audit(&trace, n);
        let ok = endpoint_sees == Some(1) && audit.is_err();
        all &= ok;
        let audit_text = match audit {
            Err((t, r, k)) => format!("audit fails at t={t}: robot {r} sees {k} of {}", n - 1),
            Ok(()) => "audit passes".into(),
        };
        lines.push(format!("n={n}: endpoint sees {} of {}; {audit_text}", endpoint_sees.unwrap_or(0), n - 1));
        traces.push(trace);
    }
    Ok(DemoReport { name: "linestretch-opacity", reproduced: all, lines, traces })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_reproduces() {
        for name in NAMES {
            let r = run_demo(name, Tolerance::default()).unwrap();
            println!("{r}");
            assert!(r.reproduced, "{r}");
        }
    }

    #[test]
    fn unknown_demo_is_an_error() {
        assert!(matches!(run_demo("nope", Tolerance::default()), Err(DemoError::Unknown(_))));
    }
}
