//! Problem definitions: instance generators and phase/path monitors.
//!
//! Each problem fixes a role for every robot index (documented per module);
//! monitors may use indices, algorithms never see them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{GeomError, Point, Tolerance};
use crate::model::{diameter, validate_configuration, Configuration};
use crate::sched::epoch_partition_looks;
use crate::trace::{Payload, Replay, Trace, Violation, ViolationKind};

pub mod angleshift;
pub mod flipflopflip;
pub mod linestretch;
pub mod newcomer;
pub mod pseudo;
pub mod spinning;
pub mod triangle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter {name}: {msg}")]
    BadParam { name: String, msg: String },
    #[error("unknown problem '{0}'")]
    Unknown(String),
    #[error("no valid instance after {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    TriangleRoundTrip,
    FlipFlopFlip,
    Newcomer,
    Spinning,
    AngleShift,
    Pseudo,
    LineStretch,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 7] = [
        ProblemKind::TriangleRoundTrip,
        ProblemKind::FlipFlopFlip,
        ProblemKind::Newcomer,
        ProblemKind::Spinning,
        ProblemKind::AngleShift,
        ProblemKind::Pseudo,
        ProblemKind::LineStretch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::TriangleRoundTrip => "triangleroundtrip",
            ProblemKind::FlipFlopFlip => "flipflopflip",
            ProblemKind::Newcomer => "newcomer",
            ProblemKind::Spinning => "spinning",
            ProblemKind::AngleShift => "angleshift",
            ProblemKind::Pseudo => "pseudo",
            ProblemKind::LineStretch => "linestretch",
        }
    }

    /// Short tag used in the relation map.
    pub fn tag(self) -> &'static str {
        match self {
            ProblemKind::TriangleRoundTrip => "trt",
            ProblemKind::FlipFlopFlip => "fff",
            ProblemKind::Newcomer => "nwc",
            ProblemKind::Spinning => "spi",
            ProblemKind::AngleShift => "ash",
            ProblemKind::Pseudo => "pse",
            ProblemKind::LineStretch => "ls",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ProblemKind::TriangleRoundTrip => "center robot visits the empty triangle vertex and comes back",
            ProblemKind::FlipFlopFlip => "apex robot perpetually flips across, moves away, flips back",
            ProblemKind::Newcomer => "outside robot lands on the circle, center robot moves halfway to it",
            ProblemKind::Spinning => "circle robots perpetually rotate by half the minimal gap",
            ProblemKind::AngleShift => "two triangle vertices rotate about the widest-angle vertex",
            ProblemKind::Pseudo => "farthest pseudo-polygon robot from the watcher relocates into the safe zone",
            ProblemKind::LineStretch => "line endpoints stretch their spacing to d + d/n",
        }
    }

    pub fn default_params(self) -> Params {
        let kv: &[(&str, f64)] = match self {
            ProblemKind::TriangleRoundTrip => &[("rho", 1.0)],
            ProblemKind::FlipFlopFlip => &[("half", 1.0), ("dist", 2.6)],
            ProblemKind::Newcomer => &[("n", 7.0), ("rho", 2.0)],
            ProblemKind::Spinning => &[("n", 6.0), ("radius", 1.0)],
            ProblemKind::AngleShift => &[("scale", 1.0)],
            ProblemKind::Pseudo => &[("n", 8.0), ("m", 7.0)],
            ProblemKind::LineStretch => &[("n", 5.0), ("d", 1.0)],
        };
        kv.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        ProblemKind::ALL
            .into_iter()
            .find(|p| p.name() == k || p.tag() == k)
            .ok_or_else(|| ProblemError::Unknown(s.to_string()))
    }
}

impl Serialize for ProblemKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ProblemKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Params = BTreeMap<String, f64>;

pub(crate) fn param(p: &Params, name: &str, default: f64) -> f64 {
    p.get(name).copied().unwrap_or(default)
}

pub(crate) fn param_count(p: &Params, name: &str, default: usize, min: usize) -> Result<usize, ProblemError> {
    let v = param(p, name, default as f64);
    if v.fract() != 0.0 || v < min as f64 {
        return Err(ProblemError::BadParam { name: name.into(), msg: format!("must be an integer >= {min}, got {v}") });
    }
    Ok(v as usize)
}

pub(crate) fn positive(p: &Params, name: &str, default: f64) -> Result<f64, ProblemError> {
    let v = param(p, name, default);
    if !(v > 0.0 && v.is_finite()) {
        return Err(ProblemError::BadParam { name: name.into(), msg: format!("must be positive, got {v}") });
    }
    Ok(v)
}

/// A concrete instance: robot positions in role order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub problem: ProblemKind,
    pub params: Params,
    pub robots: Vec<Point>,
}

impl Instance {
    pub fn configuration(&self) -> Configuration {
        Configuration::from_points(&self.robots)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(s).map_err(|e| ProblemError::InvalidInstance(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// Number of phases; the swarm must then stay still.
    Finite(usize),
    /// Phases per cycle; checked up to a number of cycles.
    Perpetual(usize),
}

/// Result of a single move check: which path condition failed and why.
pub type MoveCheck = Result<(), (ViolationKind, String)>;

/// Phase and path conditions of one instance.
pub trait Requirement: Send + Sync {
    fn kind(&self) -> ProblemKind;
    fn terminal(&self) -> Terminal;
    /// Checks a non-null move of `robot` from `from` to `to`, started while
    /// `phase` is the last phase reached. `entry` is the configuration at which
    /// that phase was entered (the initial one for phase 0).
    fn check_move(&self, phase: usize, robot: usize, from: Point, to: Point, entry: &[Point]) -> MoveCheck;
    /// Whether phase `next` (>= 1) holds in `cfg` given the entry configuration
    /// of phase `next - 1`.
    fn phase_holds(&self, next: usize, cfg: &[Point], entry: &[Point]) -> bool;
}

/// Builds the requirement for an instance, validating it first.
pub fn requirement(inst: &Instance, tol: Tolerance) -> Result<Box<dyn Requirement>, ProblemError> {
    if let Err(v) = validate_configuration(&inst.robots, tol) {
        return Err(ProblemError::InvalidInstance(format!("coincident robots {:?}", v.pairs)));
    }
    Ok(match inst.problem {
        ProblemKind::TriangleRoundTrip => Box::new(triangle::TriangleRoundTrip::from_instance(inst, tol)?),
        ProblemKind::FlipFlopFlip => Box::new(flipflopflip::FlipFlopFlip::from_instance(inst, tol)?),
        ProblemKind::Newcomer => Box::new(newcomer::Newcomer::from_instance(inst, tol)?),
        ProblemKind::Spinning => Box::new(spinning::Spinning::from_instance(inst, tol)?),
        ProblemKind::AngleShift => Box::new(angleshift::AngleShift::from_instance(inst, tol)?),
        ProblemKind::Pseudo => Box::new(pseudo::Pseudo::from_instance(inst, tol)?),
        ProblemKind::LineStretch => Box::new(linestretch::LineStretch::from_instance(inst, tol)?),
    })
}

pub fn generate(kind: ProblemKind, params: &Params, seed: u64) -> Result<Instance, ProblemError> {
    let mut p = kind.default_params();
    p.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    match kind {
        ProblemKind::TriangleRoundTrip => triangle::generate(&p, seed),
        ProblemKind::FlipFlopFlip => flipflopflip::generate(&p, seed),
        ProblemKind::Newcomer => newcomer::generate(&p, seed),
        ProblemKind::Spinning => spinning::generate(&p, seed),
        ProblemKind::AngleShift => angleshift::generate(&p, seed),
        ProblemKind::Pseudo => pseudo::generate(&p, seed),
        ProblemKind::LineStretch => linestretch::generate(&p, seed),
    }
}

/// Position tolerance for phase predicates; leaves room for round-off
/// accumulated through frame changes.
pub(crate) fn pos_eps(points: &[Point], tol: Tolerance) -> f64 {
    100.0 * tol.scaled(diameter(points))
}

pub(crate) fn same(p: Point, q: Point, eps: f64) -> bool {
    p.dist(q) <= eps
}

/// Fresh deterministic RNG for generators.
pub(crate) fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random rigid placement: rotation, translation, and optional mirror.
pub(crate) fn place<R: rand::Rng>(rng: &mut R, pts: &[Point]) -> Vec<Point> {
    use std::f64::consts::TAU;
    let rot = rng.gen_range(0.0..TAU);
    let mirror = rng.gen_bool(0.5);
    let off = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    pts.iter()
        .map(|&p| {
            let p = if mirror { Point::new(p.x, -p.y) } else { p };
            p.rotated(rot) + off
        })
        .collect()
}

pub(crate) const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProgress {
    /// Last phase reached (0 = initial).
    pub phase: usize,
    pub entry_times: Vec<f64>,
    /// Completed cycles for perpetual problems.
    pub cycles: Option<usize>,
    /// Complete epochs observed after the final phase of a finite problem.
    pub epochs_after_final: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub problem: ProblemKind,
    pub progress: PhaseProgress,
    pub violations: Vec<Violation>,
}

/// Epochs of terminal stillness required after the last phase.
pub const STILLNESS_EPOCHS: usize = 3;
/// Cycles a perpetual problem must complete.
pub const PERPETUAL_CYCLES: usize = 5;

impl MonitorReport {
    /// All phases reached (with the stillness window) or enough cycles, and no violation.
    pub fn success(&self, req: &dyn Requirement) -> bool {
        self.violations.is_empty() && self.goal_reached(req)
    }

    pub fn goal_reached(&self, req: &dyn Requirement) -> bool {
        match req.terminal() {
            Terminal::Finite(m) => self.progress.phase == m && self.progress.epochs_after_final >= STILLNESS_EPOCHS,
            Terminal::Perpetual(_) => self.progress.cycles.unwrap_or(0) >= PERPETUAL_CYCLES,
        }
    }
}

/// Replays a trace against a requirement.
pub fn monitor(req: &dyn Requirement, trace: &Trace) -> MonitorReport {
    let mut world = Replay::new(&trace.initial());
    let mut phase = 0usize;
    let mut entry = trace.initial().positions();
    let mut entry_times = Vec::new();
    let mut violations = Vec::new();
    let final_phase = match req.terminal() {
        Terminal::Finite(m) => Some(m),
        Terminal::Perpetual(_) => None,
    };
    for ev in &trace.events {
        if let (Payload::MoveStart { from, to, .. }, Some(r)) = (&ev.payload, ev.robot) {
            if from != to {
                if final_phase == Some(phase) {
                    violations.push(Violation {
                        kind: ViolationKind::PathConstraint(phase),
                        t: ev.t,
                        robots: vec![r],
                        details: format!("robot {r} moves after the final phase"),
                    });
                } else if let Err((kind, details)) = req.check_move(phase, r, *from, *to, &entry) {
                    violations.push(Violation { kind, t: ev.t, robots: vec![r], details });
                }
            }
        }
        world.apply(ev);
        if !world.anyone_moving() {
            let cfg = world.positions_at(ev.t);
            while final_phase.is_none_or(|m| phase < m) && req.phase_holds(phase + 1, &cfg, &entry) {
                phase += 1;
                entry = cfg.clone();
                entry_times.push(ev.t);
            }
        }
    }
    let cycles = match req.terminal() {
        Terminal::Perpetual(period) => Some(phase / period),
        Terminal::Finite(_) => None,
    };
    let mut epochs_after_final = 0;
    if let (Some(m), Some(&t_final)) = (final_phase, entry_times.last()) {
        if phase == m {
            let looks: Vec<(usize, f64)> = trace.looks().filter(|l| l.1 > t_final).map(|l| (l.0, l.1)).collect();
            epochs_after_final = match epoch_partition_looks(&looks, trace.n()) {
                Ok(e) => e.len(),
                Err(crate::sched::SchedError::Starved { partial, .. }) => partial.len(),
                Err(_) => 0,
            };
        }
    }
    MonitorReport {
        problem: req.kind(),
        progress: PhaseProgress { phase, entry_times, cycles, epochs_after_final },
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ProblemKind::ALL {
            assert_eq!(k.name().parse::<ProblemKind>().unwrap(), k);
            assert_eq!(k.tag().parse::<ProblemKind>().unwrap(), k);
        }
        assert_eq!("Angle-Shift".parse::<ProblemKind>().unwrap(), ProblemKind::AngleShift);
        assert!("nope".parse::<ProblemKind>().is_err());
    }

    #[test]
    fn generated_instances_are_valid_and_deterministic() {
        let tol = Tolerance::default();
        for k in ProblemKind::ALL {
            for seed in 0..20 {
                let a = generate(k, &Params::new(), seed).unwrap();
                assert_eq!(a, generate(k, &Params::new(), seed).unwrap());
                assert!(validate_configuration(&a.robots, tol).is_ok());
                let req = requirement(&a, tol).unwrap_or_else(|e| panic!("{k} seed {seed}: {e}"));
                assert!(!req.phase_holds(1, &a.robots, &a.robots), "{k} seed {seed}: phase 1 holds initially");
            }
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let a = generate(ProblemKind::Newcomer, &Params::new(), 3).unwrap();
        let b = Instance::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
    }
}
