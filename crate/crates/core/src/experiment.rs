//! One seeded run of a registered algorithm on a problem instance, checked by
//! the problem monitor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algos::{self, AlgoInfo};
use crate::engine::{initial_configuration, run, EngineError, RunOptions};
use crate::geom::Tolerance;
use crate::model::{ModelId, SyncMode};
use crate::problems::{monitor, requirement, Instance, MonitorReport, ProblemError, Terminal};
use crate::sched::ScheduleSpec;
use crate::trace::Trace;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("algorithm {algo} does not claim model {model}")]
    Incompatible { algo: String, model: ModelId },
    #[error("algorithm {algo} solves {expected}, not {got}")]
    WrongProblem { algo: String, expected: String, got: String },
    #[error("schedule mode {schedule:?} does not match model {model}")]
    ScheduleMode { schedule: SyncMode, model: ModelId },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: ModelId,
    pub algo: String,
    pub instance: Instance,
    pub schedule: ScheduleSpec,
    pub transparent: bool,
    pub tol: Tolerance,
    /// Seed of the frame generator.
    pub seed: u64,
    /// Allow algorithm/model pairs the algorithm does not claim.
    pub force: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    pub report: MonitorReport,
    pub success: bool,
    /// Last phase the problem defines (None for perpetual problems).
    pub final_phase: Option<usize>,
    #[serde(skip)]
    pub trace: Option<Trace>,
}

impl Experiment {
    pub fn info(&self) -> Result<&'static AlgoInfo, ExperimentError> {
        algos::lookup(&self.algo).ok_or_else(|| ExperimentError::UnknownAlgorithm(self.algo.clone()))
    }

    pub fn check(&self) -> Result<&'static AlgoInfo, ExperimentError> {
        let info = self.info()?;
        if info.problem != self.instance.problem {
            return Err(ExperimentError::WrongProblem {
                algo: self.algo.clone(),
                expected: info.problem.to_string(),
                got: self.instance.problem.to_string(),
            });
        }
        if !self.force && !info.compatible(self.model) {
            return Err(ExperimentError::Incompatible { algo: self.algo.clone(), model: self.model });
        }
        if self.schedule.mode != self.model.sync {
            return Err(ExperimentError::ScheduleMode { schedule: self.schedule.mode, model: self.model });
        }
        Ok(info)
    }

    pub fn run(&self) -> Result<Outcome, ExperimentError> {
        let info = self.check()?;
        let req = requirement(&self.instance, self.tol)?;
        let algo = (info.build)();
        let opts = RunOptions { transparent: self.transparent, tol: self.tol, seed: self.seed, halt_on_collision: true };
        let trace = run(self.model, algo.as_ref(), &initial_configuration(algo.as_ref(), &self.instance.robots), &self.schedule, opts)?;
        let mut report = monitor(req.as_ref(), &trace);
        let mut collisions = trace.violations.clone();
        collisions.append(&mut report.violations);
        collisions.sort_by(|a, b| a.t.total_cmp(&b.t));
        report.violations = collisions;
        let success = report.success(req.as_ref());
        let final_phase = match req.terminal() {
            Terminal::Finite(m) => Some(m),
            Terminal::Perpetual(_) => None,
        };
        Ok(Outcome { report, success, final_phase, trace: Some(trace) })
    }
}

/// Schedule long enough for an algorithm to finish: FSYNC and SSYNC in
/// rounds, ASYNC in time units. Protocols designed for weaker modes get more
/// rounds since they spend rounds on light changes.
pub fn default_schedule(info: &AlgoInfo, mode: SyncMode, seed: u64) -> ScheduleSpec {
    use crate::problems::ProblemKind::*;
    let protocol = info.weakest.sync != SyncMode::Fsync;
    match mode {
        SyncMode::Fsync if !protocol => ScheduleSpec::fsync(match info.problem {
            Spinning => 8,
            FlipFlopFlip => 20,
            _ => 10,
        }),
        SyncMode::Fsync => ScheduleSpec::fsync(if info.problem == Spinning { 120 } else { 40 }),
        SyncMode::Ssync => ScheduleSpec::ssync(seed, if info.problem == Spinning { 300 } else { 80 }),
        SyncMode::Async => ScheduleSpec::asynchronous(
            seed,
            match info.problem {
                Spinning => 400.0,
                FlipFlopFlip => 200.0,
                _ => 150.0,
            },
        ),
    }
}
