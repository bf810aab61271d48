//! Executes one algorithm under one model and schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{Point, Tolerance};
use crate::model::{
    diameter, snapshot_of, Robot, validate_configuration, visible_set, Color, Configuration, LightClass, LocalFrame, ModelId,
    MultiplicityViolation, Snapshot, SyncMode,
};
use crate::sched::{AsyncSource, RoundContext, RoundSource, SchedError, ScheduleSpec};
use crate::trace::{check_move_start, ActiveMove, Event, EventKind, Payload, Replay, Trace, TraceHeader, Violation, TRACE_VERSION};

/// Robots at `points`, every light set to the algorithm's initial color.
pub fn initial_configuration(algo: &dyn Algorithm, points: &[Point]) -> Configuration {
    let c = algo.palette()[0];
    Configuration { robots: points.iter().map(|&pos| Robot { pos, color: c }).collect() }
}

/// Outcome of one compute step, in the robot's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub dest: Point,
    /// `None` keeps the current light.
    pub color: Option<Color>,
}

impl Decision {
    pub fn stay() -> Self {
        Decision { dest: Point::ORIGIN, color: None }
    }

    pub fn stay_with(c: Color) -> Self {
        Decision { dest: Point::ORIGIN, color: Some(c) }
    }

    pub fn go(dest: Point) -> Self {
        Decision { dest, color: None }
    }

    pub fn go_with(dest: Point, c: Color) -> Self {
        Decision { dest, color: Some(c) }
    }

    pub fn is_null(&self) -> bool {
        self.dest == Point::ORIGIN
    }
}

pub trait Algorithm: Send + Sync {
    fn name(&self) -> &'static str;
    /// Allowed colors; the first one is the initial light.
    fn palette(&self) -> &'static [Color];
    fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Decision;
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("initial configuration has coincident robots {0:?}")]
    InvalidInitial(Vec<(usize, usize)>),
    #[error("algorithm {algo} emitted color '{color}' outside its palette")]
    Palette { algo: &'static str, color: Color },
    #[error("algorithm {0} changed a light under OBLOT")]
    OblotLight(&'static str),
    #[error("algorithm {algo} produced a non-finite destination for robot {robot}")]
    NonFinite { algo: &'static str, robot: usize },
    #[error(transparent)]
    Sched(#[from] SchedError),
}

impl From<MultiplicityViolation> for EngineError {
    fn from(v: MultiplicityViolation) -> Self {
        EngineError::InvalidInitial(v.pairs)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub transparent: bool,
    pub tol: Tolerance,
    pub seed: u64,
    /// Stop at the first collision.
    pub halt_on_collision: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { transparent: false, tol: Tolerance::default(), seed: 0, halt_on_collision: true }
    }
}

/// Runs with the generator named in `schedule`.
pub fn run(
    model: ModelId,
    algo: &dyn Algorithm,
    initial: &Configuration,
    schedule: &ScheduleSpec,
    opts: RunOptions,
) -> Result<Trace, EngineError> {
    let n = initial.len();
    if model.sync.is_round_based() {
        let mut src = schedule.round_source(n)?;
        run_rounds(model, algo, initial, src.as_mut(), schedule.rounds(), opts)
    } else {
        let mut src = schedule.async_source(n)?;
        run_async(model, algo, initial, src.as_mut(), schedule.horizon, opts)
    }
}

struct Exec<'a> {
    model: ModelId,
    algo: &'a dyn Algorithm,
    opts: RunOptions,
    rng: ChaCha8Rng,
    world: Replay,
    events: Vec<Event>,
    violations: Vec<Violation>,
    halted: bool,
}

impl<'a> Exec<'a> {
    fn new(model: ModelId, algo: &'a dyn Algorithm, initial: &Configuration, opts: RunOptions) -> Result<Self, EngineError> {
        let pts = initial.positions();
        validate_configuration(&pts, opts.tol)?;
        Ok(Exec {
            model,
            algo,
            opts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            world: Replay::new(initial),
            events: Vec::new(),
            violations: Vec::new(),
            halted: false,
        })
    }

    fn push(&mut self, ev: Event) {
        self.world.apply(&ev);
        self.events.push(ev);
    }

    fn check_color(&self, c: Option<Color>, current: Color) -> Result<(), EngineError> {
        let Some(c) = c else { return Ok(()) };
        if self.model.light == LightClass::Oblot && c != current {
            return Err(EngineError::OblotLight(self.algo.name()));
        }
        if !self.algo.palette().contains(&c) {
            return Err(EngineError::Palette { algo: self.algo.name(), color: c });
        }
        Ok(())
    }

    /// Look + compute for `robot` at time `t`; returns global destination and new color.
    fn look(&mut self, robot: usize, t: f64) -> Result<(Point, Option<Color>), EngineError> {
        let positions = self.world.positions_at(t);
        let frame = LocalFrame::sample(&mut self.rng, positions[robot]);
        let ids = visible_set(&positions, robot, self.opts.transparent, self.opts.tol);
        let snap = snapshot_of(
            &positions,
            &self.world.color,
            robot,
            &ids,
            &frame,
            self.model,
            self.opts.transparent,
            &mut self.rng,
        );
        let d = self.algo.decide(&snap, self.opts.tol);
        let dest = if d.is_null() { positions[robot] } else { frame.to_global(d.dest) };
        if !dest.is_finite() {
            return Err(EngineError::NonFinite { algo: self.algo.name(), robot });
        }
        self.check_color(d.color, self.world.color[robot])?;
        self.push(Event {
            t,
            kind: EventKind::Look,
            robot: Some(robot),
            payload: Payload::Look { visible: ids.len(), frame, dest, color: d.color },
        });
        Ok((dest, d.color))
    }

    /// Light update and move start at `t`.
    fn start_move(&mut self, robot: usize, t: f64, t_end: f64, dest: Point, color: Option<Color>) {
        if let Some(c) = color {
            if c != self.world.color[robot] {
                self.push(Event { t, kind: EventKind::Light, robot: Some(robot), payload: Payload::Light { color: c } });
            }
        }
        let from = self.world.position_at(robot, t);
        let mv = ActiveMove { from, to: dest, t0: t, t1: t_end };
        let violation = check_move_start(&self.world, robot, &mv, self.opts.tol);
        self.push(Event { t, kind: EventKind::MoveStart, robot: Some(robot), payload: Payload::MoveStart { from, to: dest, t_end } });
        if let Some(v) = violation {
            self.violations.push(v);
            if self.opts.halt_on_collision {
                self.halted = true;
            }
        }
    }

    fn end_move(&mut self, robot: usize, t: f64) {
        let at = self.world.active[robot].map(|m| m.to).unwrap_or(self.world.pos[robot]);
        self.push(Event { t, kind: EventKind::MoveEnd, robot: Some(robot), payload: Payload::MoveEnd { at } });
    }

    fn finish(self, initial: &Configuration, end: f64) -> Trace {
        let final_config = self.world.configuration_at(end);
        Trace {
            header: TraceHeader {
                version: TRACE_VERSION,
                model: self.model,
                seed: self.opts.seed,
                n: initial.len(),
                algorithm: self.algo.name().to_string(),
                transparent: self.opts.transparent,
                end,
                initial: initial.robots.clone(),
            },
            events: self.events,
            final_config,
            violations: self.violations,
        }
    }

    /// Would `robot` perform a non-null move if activated now? Uses an identity
    /// frame and a private generator so probing never perturbs the run.
    fn would_move(&self, robot: usize, t: f64) -> bool {
        let positions = self.world.positions_at(t);
        let frame = LocalFrame::identity(positions[robot]);
        let ids = visible_set(&positions, robot, self.opts.transparent, self.opts.tol);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let snap = snapshot_of(&positions, &self.world.color, robot, &ids, &frame, self.model, self.opts.transparent, &mut rng);
        let d = self.algo.decide(&snap, self.opts.tol);
        !d.is_null() && d.dest.norm() > self.opts.tol.scaled(diameter(&positions))
    }
}

/// Round-based execution: round k begins at t = k, every active robot looks
/// at the round-start configuration, lights and moves start at t = k, moves
/// end at t = k + 1/2.
pub fn run_rounds(
    model: ModelId,
    algo: &dyn Algorithm,
    initial: &Configuration,
    source: &mut dyn RoundSource,
    rounds: usize,
    opts: RunOptions,
) -> Result<Trace, EngineError> {
    let mut ex = Exec::new(model, algo, initial, opts)?;
    let n = initial.len();
    let mut end = 0.0;
    for k in 0..rounds {
        let t = k as f64;
        let active = {
            let probe = |i: usize| ex.would_move(i, t);
            let ctx = RoundContext { round: k, n, would_move: &probe };
            match source.next_round(&ctx) {
                Some(a) => a,
                None => break,
            }
        };
        let mut active: Vec<usize> = active.into_iter().filter(|&i| i < n).collect();
        active.sort_unstable();
        active.dedup();
        if model.sync == SyncMode::Fsync {
            active = (0..n).collect();
        }
        ex.push(Event { t, kind: EventKind::RoundBegin, robot: None, payload: Payload::Round { index: k, active: active.clone() } });
        let mut plans = Vec::with_capacity(active.len());
        for &i in &active {
            plans.push((i, ex.look(i, t)?));
        }
        let t_end = t + 0.5;
        for &(i, (dest, color)) in &plans {
            ex.start_move(i, t, t_end, dest, color);
            if ex.halted {
                break;
            }
        }
        if ex.halted {
            end = t;
            break;
        }
        for &(i, _) in &plans {
            ex.end_move(i, t_end);
        }
        ex.push(Event { t: t_end, kind: EventKind::RoundEnd, robot: None, payload: Payload::Round { index: k, active } });
        end = t_end;
    }
    Ok(ex.finish(initial, end))
}

#[derive(Clone, Copy)]
enum Stage {
    Look,
    MoveStart,
    MoveEnd,
    Done,
}

#[derive(Clone, Copy)]
struct Pending {
    stage: Stage,
    t_look: f64,
    t_ms: f64,
    t_me: f64,
    dest: Point,
    color: Option<Color>,
}

impl Pending {
    fn key(&self) -> Option<(f64, u8)> {
        match self.stage {
            Stage::Look => Some((self.t_look, EventKind::Look.rank())),
            Stage::MoveStart => Some((self.t_ms, EventKind::Light.rank())),
            Stage::MoveEnd => Some((self.t_me, EventKind::MoveEnd.rank())),
            Stage::Done => None,
        }
    }
}

/// Continuous-time execution. Looks at or after `horizon` are not started;
/// moves already under way complete.
pub fn run_async(
    model: ModelId,
    algo: &dyn Algorithm,
    initial: &Configuration,
    source: &mut dyn AsyncSource,
    horizon: f64,
    opts: RunOptions,
) -> Result<Trace, EngineError> {
    let mut ex = Exec::new(model, algo, initial, opts)?;
    let n = initial.len();
    let schedule_next = |src: &mut dyn AsyncSource, i: usize, ready: f64| -> Pending {
        match src.next_activation(i, ready) {
            Some((t_look, t_ms, t_me)) if t_look < horizon => Pending {
                stage: Stage::Look,
                t_look,
                t_ms: t_ms.max(t_look),
                t_me: t_me.max(t_ms).max(t_look),
                dest: Point::ORIGIN,
                color: None,
            },
            _ => Pending { stage: Stage::Done, t_look: 0.0, t_ms: 0.0, t_me: 0.0, dest: Point::ORIGIN, color: None },
        }
    };
    let mut pending: Vec<Pending> = (0..n).map(|i| schedule_next(source, i, 0.0)).collect();
    let mut end: f64 = 0.0;
    loop {
        let next = (0..n)
            .filter_map(|i| pending[i].key().map(|(t, r)| (t, r, i)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let Some((t, _, i)) = next else { break };
        end = end.max(t);
        let p = pending[i];
        match p.stage {
            Stage::Look => {
                let (dest, color) = ex.look(i, t)?;
                pending[i] = Pending { stage: Stage::MoveStart, dest, color, ..p };
            }
            Stage::MoveStart => {
                ex.start_move(i, t, p.t_me, p.dest, p.color);
                if ex.halted {
                    break;
                }
                pending[i].stage = Stage::MoveEnd;
            }
            Stage::MoveEnd => {
                ex.end_move(i, t);
                pending[i] = schedule_next(source, i, t);
            }
            Stage::Done => unreachable!(),
        }
    }
    Ok(ex.finish(initial, end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched::ScheduleSpec;
    use crate::trace::{collision_monitor, configuration_at, ViolationKind};

    struct Still;
    impl Algorithm for Still {
        fn name(&self) -> &'static str {
            "still"
        }
        fn palette(&self) -> &'static [Color] {
            &[Color::OFF]
        }
        fn decide(&self, _: &Snapshot, _: Tolerance) -> Decision {
            Decision::stay()
        }
    }

    /// Every robot moves halfway to the nearest visible robot.
    struct Halfway;
    impl Algorithm for Halfway {
        fn name(&self) -> &'static str {
            "halfway"
        }
        fn palette(&self) -> &'static [Color] {
            &[Color::OFF]
        }
        fn decide(&self, s: &Snapshot, _: Tolerance) -> Decision {
            let p = s.visible.iter().map(|v| v.pos).min_by(|a, b| a.norm().total_cmp(&b.norm()));
            p.map(|p| Decision::go(p * 0.25)).unwrap_or(Decision::stay())
        }
    }

    struct BadColor;
    impl Algorithm for BadColor {
        fn name(&self) -> &'static str {
            "bad"
        }
        fn palette(&self) -> &'static [Color] {
            &[Color::OFF]
        }
        fn decide(&self, _: &Snapshot, _: Tolerance) -> Decision {
            Decision::stay_with(Color::new("red"))
        }
    }

    fn tri() -> Configuration {
        Configuration::from_points(&[Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(1.0, 3.0)])
    }

    fn oblot(s: SyncMode) -> ModelId {
        ModelId::new(LightClass::Oblot, s)
    }

    #[test]
    fn null_algorithm_keeps_configuration() {
        for spec in [ScheduleSpec::fsync(5), ScheduleSpec::ssync(3, 5), ScheduleSpec::asynchronous(4, 20.0)] {
            let t = run(oblot(spec.mode), &Still, &tri(), &spec, RunOptions::default()).unwrap();
            assert_eq!(t.final_config, tri());
            assert!(t.violations.is_empty());
        }
    }

    #[test]
    fn deterministic_and_replayable() {
        let spec = ScheduleSpec::asynchronous(9, 30.0);
        let opts = RunOptions { seed: 5, ..Default::default() };
        let a = run(oblot(SyncMode::Async), &Halfway, &tri(), &spec, opts).unwrap();
        let b = run(oblot(SyncMode::Async), &Halfway, &tri(), &spec, opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(configuration_at(&a, a.end_time()), a.final_config);
        assert_eq!(collision_monitor(&a, Tolerance::default()), a.violations);
    }

    #[test]
    fn rigid_moves_reach_destination() {
        let spec = ScheduleSpec::fsync(3);
        let t = run(oblot(SyncMode::Fsync), &Halfway, &tri(), &spec, RunOptions::default()).unwrap();
        for ev in &t.events {
            if let Payload::Look { dest, .. } = ev.payload {
                let r = ev.robot.unwrap();
                let end = t
                    .events
                    .iter()
                    .find(|e| e.t > ev.t && e.robot == Some(r) && e.kind == EventKind::MoveEnd)
                    .unwrap();
                assert_eq!(end.payload, Payload::MoveEnd { at: dest });
            }
        }
    }

    #[test]
    fn palette_violation_is_an_error() {
        let m = ModelId::new(LightClass::Lumi, SyncMode::Fsync);
        assert!(matches!(run(m, &BadColor, &tri(), &ScheduleSpec::fsync(1), RunOptions::default()), Err(EngineError::Palette { .. })));
        assert!(matches!(
            run(oblot(SyncMode::Fsync), &BadColor, &tri(), &ScheduleSpec::fsync(1), RunOptions::default()),
            Err(EngineError::OblotLight(_))
        ));
    }

    #[test]
    fn invalid_initial_rejected() {
        let c = Configuration::from_points(&[Point::ORIGIN, Point::ORIGIN]);
        assert!(matches!(run(oblot(SyncMode::Fsync), &Still, &c, &ScheduleSpec::fsync(1), RunOptions::default()), Err(EngineError::InvalidInitial(_))));
    }

    /// Moves through the robot straight ahead.
    struct Ram;
    impl Algorithm for Ram {
        fn name(&self) -> &'static str {
            "ram"
        }
        fn palette(&self) -> &'static [Color] {
            &[Color::OFF]
        }
        fn decide(&self, s: &Snapshot, _: Tolerance) -> Decision {
            match s.visible.first() {
                Some(v) => Decision::go(v.pos * 2.0),
                None => Decision::stay(),
            }
        }
    }

    #[test]
    fn collision_halts_run() {
        let c = Configuration::from_points(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        let t = run(oblot(SyncMode::Fsync), &Ram, &c, &ScheduleSpec::fsync(3), RunOptions::default()).unwrap();
        assert_eq!(t.violations.len(), 1);
        assert!(matches!(t.violations[0].kind, ViolationKind::TrajectoryOverlap | ViolationKind::Multiplicity));
        assert_eq!(t.end_time(), 0.0);
    }

    #[test]
    fn round_times() {
        let t = run(oblot(SyncMode::Fsync), &Halfway, &tri(), &ScheduleSpec::fsync(2), RunOptions::default()).unwrap();
        let ends: Vec<f64> = t.events.iter().filter(|e| e.kind == EventKind::MoveEnd).map(|e| e.t).collect();
        assert_eq!(ends, vec![0.5, 0.5, 0.5, 1.5, 1.5, 1.5]);
        assert!(t.events.iter().filter(|e| e.kind == EventKind::Look && e.t == 0.0).count() == 3);
    }
}
