//! Execution traces: events, replay, collision and visibility monitors, and
//! the JSON-lines file format.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{blocks, closest_approach, point_segment_distance, segments_intersect, Point, Tolerance};
use crate::model::{Color, Configuration, LocalFrame, ModelId, Robot, Seen, Snapshot};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    RoundBegin,
    Look,
    Light,
    MoveStart,
    MoveEnd,
    RoundEnd,
}

impl EventKind {
    /// Tie-break among events sharing a timestamp.
    pub fn rank(self) -> u8 {
        match self {
            EventKind::RoundBegin => 0,
            EventKind::Look => 1,
            EventKind::Light => 2,
            EventKind::MoveStart => 3,
            EventKind::MoveEnd => 4,
            EventKind::RoundEnd => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Round { index: usize, active: Vec<usize> },
    Look { visible: usize, frame: LocalFrame, dest: Point, color: Option<Color> },
    Light { color: Color },
    MoveStart { from: Point, to: Point, t_end: f64 },
    MoveEnd { at: Point },
}

impl Payload {
    fn matches(&self, kind: EventKind) -> bool {
        matches!(
            (self, kind),
            (Payload::Round { .. }, EventKind::RoundBegin | EventKind::RoundEnd)
                | (Payload::Look { .. }, EventKind::Look)
                | (Payload::Light { .. }, EventKind::Light)
                | (Payload::MoveStart { .. }, EventKind::MoveStart)
                | (Payload::MoveEnd { .. }, EventKind::MoveEnd)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub robot: Option<usize>,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum ViolationKind {
    Multiplicity,
    TrajectoryOverlap,
    PathConstraint(usize),
    PhaseRegression,
    Starvation,
}

impl ViolationKind {
    pub fn is_collision(self) -> bool {
        matches!(self, ViolationKind::Multiplicity | ViolationKind::TrajectoryOverlap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub t: f64,
    pub robots: Vec<usize>,
    pub details: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Multiplicity => "multiplicity".to_string(),
            ViolationKind::TrajectoryOverlap => "trajectory overlap".to_string(),
            ViolationKind::PathConstraint(i) => format!("path constraint {i}"),
            ViolationKind::PhaseRegression => "phase regression".to_string(),
            ViolationKind::Starvation => "starvation".to_string(),
        };
        write!(f, "{kind} at t={} robots {:?}: {}", self.t, self.robots, self.details)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub model: ModelId,
    pub seed: u64,
    pub n: usize,
    pub algorithm: String,
    pub transparent: bool,
    pub end: f64,
    pub initial: Vec<Robot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<Event>,
    pub final_config: Configuration,
    pub violations: Vec<Violation>,
}

impl Trace {
    pub fn initial(&self) -> Configuration {
        Configuration { robots: self.header.initial.clone() }
    }

    pub fn n(&self) -> usize {
        self.header.n
    }

    pub fn end_time(&self) -> f64 {
        self.header.end
    }

    pub fn looks(&self) -> impl Iterator<Item = (usize, f64, &Payload)> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Look)
            .map(|e| (e.robot.expect("look has a robot"), e.t, &e.payload))
    }

    /// Non-null moves as `(robot, from, to, t_start, t_end)`.
    pub fn moves(&self) -> Vec<(usize, Point, Point, f64, f64)> {
        self.events
            .iter()
            .filter_map(|e| match (&e.payload, e.robot) {
                (Payload::MoveStart { from, to, t_end }, Some(r)) if from != to => Some((r, *from, *to, e.t, *t_end)),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveMove {
    pub from: Point,
    pub to: Point,
    pub t0: f64,
    pub t1: f64,
}

impl ActiveMove {
    pub fn is_null(&self) -> bool {
        self.from == self.to
    }

    pub fn at(&self, t: f64) -> Point {
        if t >= self.t1 || self.t1 <= self.t0 {
            return self.to;
        }
        if t <= self.t0 {
            return self.from;
        }
        self.from.lerp(self.to, (t - self.t0) / (self.t1 - self.t0))
    }
}

/// World state rebuilt by applying events in order. The engine drives the
/// same structure, so replays reproduce runs exactly.
#[derive(Debug, Clone)]
pub struct Replay {
    pub pos: Vec<Point>,
    pub color: Vec<Color>,
    pub active: Vec<Option<ActiveMove>>,
}

impl Replay {
    pub fn new(initial: &Configuration) -> Self {
        Replay {
            pos: initial.positions(),
            color: initial.colors(),
            active: vec![None; initial.len()],
        }
    }

    pub fn apply(&mut self, ev: &Event) {
        let Some(r) = ev.robot else { return };
        match &ev.payload {
            Payload::Light { color } => self.color[r] = *color,
            Payload::MoveStart { from, to, t_end } => {
                self.active[r] = Some(ActiveMove { from: *from, to: *to, t0: ev.t, t1: *t_end });
            }
            Payload::MoveEnd { at } => {
                self.pos[r] = *at;
                self.active[r] = None;
            }
            _ => {}
        }
    }

    pub fn position_at(&self, i: usize, t: f64) -> Point {
        match &self.active[i] {
            Some(m) => m.at(t),
            None => self.pos[i],
        }
    }

    pub fn positions_at(&self, t: f64) -> Vec<Point> {
        (0..self.pos.len()).map(|i| self.position_at(i, t)).collect()
    }

    /// Some robot is in the middle of a non-null move.
    pub fn anyone_moving(&self) -> bool {
        self.active.iter().flatten().any(|m| !m.is_null())
    }

    pub fn configuration_at(&self, t: f64) -> Configuration {
        Configuration {
            robots: (0..self.pos.len()).map(|i| Robot { pos: self.position_at(i, t), color: self.color[i] }).collect(),
        }
    }
}

pub fn configuration_at(trace: &Trace, t: f64) -> Configuration {
    let mut r = Replay::new(&trace.initial());
    for ev in trace.events.iter().take_while(|e| e.t <= t) {
        r.apply(ev);
    }
    r.configuration_at(t)
}

/// Collision check for a move starting now against the current world.
pub fn check_move_start(world: &Replay, robot: usize, mv: &ActiveMove, tol: Tolerance) -> Option<Violation> {
    if mv.is_null() {
        return None;
    }
    let len = mv.from.dist(mv.to);
    for j in 0..world.pos.len() {
        if j == robot {
            continue;
        }
        match &world.active[j] {
            Some(other) if !other.is_null() && other.t1 > mv.t0 => {
                let eps = tol.scaled(len.max(other.from.dist(other.to)));
                let lo = mv.t0.max(other.t0);
                let hi = mv.t1.min(other.t1);
                let (a0, a1) = (mv.at(lo), mv.at(hi));
                let (b0, b1) = (other.at(lo), other.at(hi));
                let (d, s) = closest_approach(a0, a1, b0, b1);
                if d <= eps {
                    return Some(Violation {
                        kind: ViolationKind::Multiplicity,
                        t: lo + s * (hi - lo),
                        robots: vec![j, robot],
                        details: format!("robots {j} and {robot} meet during concurrent moves"),
                    });
                }
                if segments_intersect(mv.from, mv.to, other.from, other.to, tol) {
                    return Some(Violation {
                        kind: ViolationKind::TrajectoryOverlap,
                        t: mv.t0,
                        robots: vec![j, robot],
                        details: format!(
                            "paths {} -> {} and {} -> {} intersect while both move",
                            other.from, other.to, mv.from, mv.to
                        ),
                    });
                }
            }
            _ => {
                let p = world.position_at(j, mv.t0);
                let eps = tol.scaled(len);
                if point_segment_distance(p, mv.from, mv.to) <= eps {
                    let kind = if p.dist(mv.to) <= eps {
                        ViolationKind::Multiplicity
                    } else {
                        ViolationKind::TrajectoryOverlap
                    };
                    return Some(Violation {
                        kind,
                        t: mv.t0,
                        robots: vec![j, robot],
                        details: format!("robot {robot} moving {} -> {} runs into robot {j} at {p}", mv.from, mv.to),
                    });
                }
            }
        }
    }
    None
}

/// Offline collision check over a whole trace.
pub fn collision_monitor(trace: &Trace, tol: Tolerance) -> Vec<Violation> {
    let mut world = Replay::new(&trace.initial());
    let mut out = Vec::new();
    for ev in &trace.events {
        if let (Payload::MoveStart { from, to, t_end }, Some(r)) = (&ev.payload, ev.robot) {
            let mv = ActiveMove { from: *from, to: *to, t0: ev.t, t1: *t_end };
            if let Some(v) = check_move_start(&world, r, &mv, tol) {
                out.push(v);
            }
        }
        world.apply(ev);
    }
    out
}

/// Removes every entry hidden behind another entry, as seen from the local origin.
pub fn filter_snapshot(full: &Snapshot, tol: Tolerance) -> Snapshot {
    let pts: Vec<Point> = full.visible.iter().map(|s| s.pos).collect();
    let visible: Vec<Seen> = full
        .visible
        .iter()
        .enumerate()
        .filter(|(j, s)| !pts.iter().enumerate().any(|(k, &c)| k != *j && blocks(Point::ORIGIN, s.pos, c, tol)))
        .map(|(_, s)| *s)
        .collect();
    Snapshot { visible, own_internal: full.own_internal, transparent_mode: false }
}

/// First look that did not see the other `k - 1` robots.
pub fn visibility_audit(trace: &Trace, k: usize) -> Result<(), (f64, usize, usize)> {
    for (robot, t, payload) in trace.looks() {
        if let Payload::Look { visible, .. } = payload {
            if *visible != k.saturating_sub(1) {
                return Err((t, robot, *visible));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn write_jsonl<W: Write>(trace: &Trace, mut w: W) -> Result<(), TraceIoError> {
    let head = serde_json::to_string(&trace.header).map_err(|e| TraceIoError::Parse { line: 1, msg: e.to_string() })?;
    writeln!(w, "{head}")?;
    for (i, ev) in trace.events.iter().enumerate() {
        let line = serde_json::to_string(ev).map_err(|e| TraceIoError::Parse { line: i + 2, msg: e.to_string() })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn to_jsonl_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_jsonl(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

/// Reads a trace back; collision violations are recomputed from the events.
pub fn read_jsonl<R: BufRead>(r: R, tol: Tolerance) -> Result<Trace, TraceIoError> {
    let mut lines = r.lines();
    let first = lines.next().ok_or(TraceIoError::Parse { line: 1, msg: "empty trace".into() })??;
    let header: TraceHeader =
        serde_json::from_str(&first).map_err(|e| TraceIoError::Parse { line: 1, msg: e.to_string() })?;
    if header.version != TRACE_VERSION {
        return Err(TraceIoError::Parse { line: 1, msg: format!("unsupported version {}", header.version) });
    }
    if header.initial.len() != header.n {
        return Err(TraceIoError::Parse { line: 1, msg: "header n does not match initial configuration".into() });
    }
    let mut events = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let no = i + 2;
        let ev: Event = serde_json::from_str(&line).map_err(|e| TraceIoError::Parse { line: no, msg: e.to_string() })?;
        if !ev.payload.matches(ev.kind) {
            return Err(TraceIoError::Parse { line: no, msg: format!("payload does not match kind {:?}", ev.kind) });
        }
        if ev.robot.is_some_and(|r| r >= header.n) {
            return Err(TraceIoError::Parse { line: no, msg: "robot index out of range".into() });
        }
        if events.last().is_some_and(|p: &Event| p.t > ev.t) {
            return Err(TraceIoError::Parse { line: no, msg: "events out of time order".into() });
        }
        events.push(ev);
    }
    let mut trace = Trace {
        header,
        events,
        final_config: Configuration { robots: vec![] },
        violations: vec![],
    };
    trace.final_config = configuration_at(&trace, trace.header.end);
    trace.violations = collision_monitor(&trace, tol);
    Ok(trace)
}

pub fn from_jsonl_str(s: &str, tol: Tolerance) -> Result<Trace, TraceIoError> {
    read_jsonl(s.as_bytes(), tol)
}
