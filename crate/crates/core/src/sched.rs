//! Activation schedules: round-based (FSYNC/SSYNC), continuous-time (ASYNC),
//! fairness and epoch accounting, and adversarial constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{collinear, Point, Tolerance};
use crate::model::SyncMode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedError {
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("generator does not match sync mode {0:?}")]
    Incompatible(SyncMode),
    #[error("robot {0} is starved")]
    StarvedRobot(usize),
    #[error("robot {robot} never acts; {} complete epochs before that", partial.len())]
    Starved { robot: usize, partial: Vec<(f64, f64)> },
    #[error("adversary trigger never fired within {0} rounds")]
    Inconclusive(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid activation probability {0}")]
    BadProbability(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSchedule {
    pub rounds: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsyncActivation {
    pub robot: usize,
    pub t_look: f64,
    pub t_move_start: f64,
    pub t_move_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Fsync,
    SsyncRandom { seed: u64, p: f64 },
    AsyncRandom { seed: u64 },
    ScriptedRounds(Vec<Vec<usize>>),
    ScriptedAsync(Vec<AsyncActivation>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    pub mode: SyncMode,
    pub generator: Generator,
    /// Rounds for FSYNC/SSYNC, time units for ASYNC.
    pub horizon: f64,
}

impl ScheduleSpec {
    pub fn fsync(rounds: usize) -> Self {
        ScheduleSpec { mode: SyncMode::Fsync, generator: Generator::Fsync, horizon: rounds as f64 }
    }

    pub fn ssync(seed: u64, rounds: usize) -> Self {
        ScheduleSpec { mode: SyncMode::Ssync, generator: Generator::SsyncRandom { seed, p: 0.5 }, horizon: rounds as f64 }
    }

    pub fn asynchronous(seed: u64, horizon: f64) -> Self {
        ScheduleSpec { mode: SyncMode::Async, generator: Generator::AsyncRandom { seed }, horizon }
    }

    pub fn validate(&self) -> Result<(), SchedError> {
        if self.horizon.is_nan() || self.horizon <= 0.0 {
            return Err(SchedError::BadHorizon(self.horizon));
        }
        let ok = match (&self.generator, self.mode) {
            (Generator::Fsync, SyncMode::Fsync) => true,
            (Generator::SsyncRandom { p, .. }, SyncMode::Ssync) => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(SchedError::BadProbability(*p));
                }
                true
            }
            (Generator::AsyncRandom { .. } | Generator::ScriptedAsync(_), SyncMode::Async) => true,
            (Generator::ScriptedRounds(_), SyncMode::Fsync | SyncMode::Ssync) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(SchedError::Incompatible(self.mode))
        }
    }

    pub fn rounds(&self) -> usize {
        self.horizon.ceil() as usize
    }

    pub fn round_source(&self, n: usize) -> Result<Box<dyn RoundSource>, SchedError> {
        self.validate()?;
        Ok(match &self.generator {
            Generator::Fsync => Box::new(FsyncSource),
            Generator::SsyncRandom { seed, p } => Box::new(SsyncRandomSource::new(*seed, *p, n)),
            Generator::ScriptedRounds(r) => Box::new(ScriptedRounds::new(r.clone())),
            _ => return Err(SchedError::Incompatible(self.mode)),
        })
    }

    pub fn async_source(&self, n: usize) -> Result<Box<dyn AsyncSource>, SchedError> {
        self.validate()?;
        Ok(match &self.generator {
            Generator::AsyncRandom { seed } => Box::new(AsyncRandomSource::new(*seed, n)),
            Generator::ScriptedAsync(acts) => Box::new(ScriptedAsync::new(acts.clone(), n)),
            _ => return Err(SchedError::Incompatible(self.mode)),
        })
    }
}

/// What a round source may inspect before choosing the next activation set.
pub struct RoundContext<'a> {
    pub round: usize,
    pub n: usize,
    /// Whether robot `i` would perform a non-null move if activated now.
    pub would_move: &'a dyn Fn(usize) -> bool,
}

pub trait RoundSource: Send {
    /// `None` ends the execution.
    fn next_round(&mut self, ctx: &RoundContext) -> Option<Vec<usize>>;
}

pub struct FsyncSource;

impl RoundSource for FsyncSource {
    fn next_round(&mut self, ctx: &RoundContext) -> Option<Vec<usize>> {
        Some((0..ctx.n).collect())
    }
}

/// Each robot active with probability `p`, empty rounds re-rolled, and any
/// robot idle for 4n rounds forced into the next one.
pub struct SsyncRandomSource {
    rng: ChaCha8Rng,
    p: f64,
    idle: Vec<usize>,
}

impl SsyncRandomSource {
    pub fn new(seed: u64, p: f64, n: usize) -> Self {
        SsyncRandomSource { rng: ChaCha8Rng::seed_from_u64(seed), p, idle: vec![0; n] }
    }
}

impl RoundSource for SsyncRandomSource {
    fn next_round(&mut self, ctx: &RoundContext) -> Option<Vec<usize>> {
        let n = ctx.n;
        if self.idle.len() != n {
            self.idle = vec![0; n];
        }
        let bound = 4 * n;
        let mut set: Vec<usize>;
        loop {
            set = (0..n).filter(|&i| self.idle[i] >= bound || self.rng.gen_bool(self.p)).collect();
            if !set.is_empty() {
                break;
            }
        }
        for i in 0..n {
            if set.binary_search(&i).is_ok() {
                self.idle[i] = 0;
            } else {
                self.idle[i] += 1;
            }
        }
        Some(set)
    }
}

pub struct ScriptedRounds {
    rounds: Vec<Vec<usize>>,
    next: usize,
}

impl ScriptedRounds {
    pub fn new(rounds: Vec<Vec<usize>>) -> Self {
        ScriptedRounds { rounds, next: 0 }
    }
}

impl RoundSource for ScriptedRounds {
    fn next_round(&mut self, _ctx: &RoundContext) -> Option<Vec<usize>> {
        let r = self.rounds.get(self.next).cloned();
        self.next += 1;
        r
    }
}

/// Replays `base` until the target would move, then activates the target
/// alone in two consecutive rounds and hands control back to `base`.
pub struct DoubleActivation {
    base: Box<dyn RoundSource>,
    target: usize,
    pending: usize,
    fired_at: Option<usize>,
}

impl DoubleActivation {
    pub fn new(base: Box<dyn RoundSource>, target: usize) -> Self {
        DoubleActivation { base, target, pending: 0, fired_at: None }
    }

    pub fn fired_at(&self) -> Option<usize> {
        self.fired_at
    }
}

impl RoundSource for DoubleActivation {
    fn next_round(&mut self, ctx: &RoundContext) -> Option<Vec<usize>> {
        if self.pending > 0 {
            self.pending -= 1;
            return Some(vec![self.target]);
        }
        if self.fired_at.is_none() && (ctx.would_move)(self.target) {
            self.fired_at = Some(ctx.round);
            self.pending = 1;
            return Some(vec![self.target]);
        }
        self.base.next_round(ctx)
    }
}

/// Builds a finite double-activation schedule offline and reports whether it fired.
pub fn double_activation_adversary(
    base: Box<dyn RoundSource>,
    target: usize,
    n: usize,
    horizon: usize,
    would_move_at: &dyn Fn(usize, usize) -> bool,
) -> Result<RoundSchedule, SchedError> {
    let mut adv = DoubleActivation::new(base, target);
    let mut rounds = Vec::new();
    for round in 0..horizon {
        let probe = |i: usize| would_move_at(round, i);
        let ctx = RoundContext { round, n, would_move: &probe };
        match adv.next_round(&ctx) {
            Some(r) => rounds.push(r),
            None => break,
        }
    }
    if adv.fired_at().is_none() {
        return Err(SchedError::Inconclusive(horizon));
    }
    Ok(RoundSchedule { rounds })
}

pub trait AsyncSource: Send {
    /// Next activation of `robot` whose look is no earlier than `ready_at`,
    /// as `(t_look, t_move_start, t_move_end)`.
    fn next_activation(&mut self, robot: usize, ready_at: f64) -> Option<(f64, f64, f64)>;
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Per-robot independent streams: idle gaps log-uniform in [0.1, 4], look to
/// move-start and move durations log-uniform in [0.1, 2].
pub struct AsyncRandomSource {
    rngs: Vec<ChaCha8Rng>,
}

impl AsyncRandomSource {
    pub fn new(seed: u64, n: usize) -> Self {
        let rngs = (0..n)
            .map(|i| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(i as u64 + 1);
                r
            })
            .collect();
        AsyncRandomSource { rngs }
    }
}

impl AsyncSource for AsyncRandomSource {
    fn next_activation(&mut self, robot: usize, ready_at: f64) -> Option<(f64, f64, f64)> {
        let rng = &mut self.rngs[robot];
        let t_look = ready_at + log_uniform(rng, 0.1, 4.0);
        let t_ms = t_look + log_uniform(rng, 0.1, 2.0);
        let t_me = t_ms + log_uniform(rng, 0.1, 2.0);
        Some((t_look, t_ms, t_me))
    }
}

pub struct ScriptedAsync {
    queues: Vec<std::collections::VecDeque<AsyncActivation>>,
}

impl ScriptedAsync {
    pub fn new(mut acts: Vec<AsyncActivation>, n: usize) -> Self {
        acts.sort_by(|a, b| a.t_look.total_cmp(&b.t_look));
        let mut queues = vec![std::collections::VecDeque::new(); n];
        for a in acts {
            if a.robot < n {
                queues[a.robot].push_back(a);
            }
        }
        ScriptedAsync { queues }
    }
}

impl AsyncSource for ScriptedAsync {
    fn next_activation(&mut self, robot: usize, ready_at: f64) -> Option<(f64, f64, f64)> {
        let q = &mut self.queues[robot];
        while let Some(a) = q.pop_front() {
            if a.t_look >= ready_at {
                return Some((a.t_look, a.t_move_start, a.t_move_end));
            }
        }
        None
    }
}

/// Materializes a round schedule over the schedule's horizon (no adversary probes).
pub fn generate_rounds(spec: &ScheduleSpec, n: usize) -> Result<RoundSchedule, SchedError> {
    let mut src = spec.round_source(n)?;
    let never = |_: usize| false;
    let mut rounds = Vec::new();
    for round in 0..spec.rounds() {
        let ctx = RoundContext { round, n, would_move: &never };
        match src.next_round(&ctx) {
            Some(r) => rounds.push(r),
            None => break,
        }
    }
    Ok(RoundSchedule { rounds })
}

/// Activations with look time before the horizon, sorted by look time then robot.
pub fn generate_async(spec: &ScheduleSpec, n: usize) -> Result<Vec<AsyncActivation>, SchedError> {
    let mut src = spec.async_source(n)?;
    let mut out = Vec::new();
    for robot in 0..n {
        let mut ready = 0.0;
        while let Some((t_look, t_move_start, t_move_end)) = src.next_activation(robot, ready) {
            if t_look >= spec.horizon {
                break;
            }
            out.push(AsyncActivation { robot, t_look, t_move_start, t_move_end });
            ready = t_move_end;
        }
    }
    out.sort_by(|a, b| a.t_look.total_cmp(&b.t_look).then(a.robot.cmp(&b.robot)));
    Ok(out)
}

/// Every robot appears in every window of `window` consecutive rounds.
pub fn check_fairness(schedule: &RoundSchedule, n: usize, window: usize) -> Result<(), SchedError> {
    let rounds = &schedule.rounds;
    if rounds.is_empty() || window == 0 {
        return Ok(());
    }
    let w = window.min(rounds.len());
    for start in 0..=(rounds.len() - w) {
        for robot in 0..n {
            if !rounds[start..start + w].iter().any(|r| r.contains(&robot)) {
                return Err(SchedError::StarvedRobot(robot));
            }
        }
    }
    Ok(())
}

/// Greedy minimal epochs over rounds; returns inclusive 0-based round ranges.
/// A trailing incomplete window is dropped.
pub fn epoch_partition_rounds(schedule: &RoundSchedule, n: usize) -> Result<Vec<(usize, usize)>, SchedError> {
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut start = 0;
    for (k, r) in schedule.rounds.iter().enumerate() {
        for &i in r {
            if i < n && !seen[i] {
                seen[i] = true;
                count += 1;
            }
        }
        if count == n {
            out.push((start, k));
            seen.iter_mut().for_each(|s| *s = false);
            count = 0;
            start = k + 1;
        }
    }
    if let Some(robot) = (0..n).find(|i| !schedule.rounds.iter().any(|r| r.contains(i))) {
        return Err(SchedError::Starved { robot, partial: out.iter().map(|&(a, b)| (a as f64, b as f64)).collect() });
    }
    Ok(out)
}

/// Greedy minimal epochs over look events `(robot, t)` sorted by time.
pub fn epoch_partition_looks(looks: &[(usize, f64)], n: usize) -> Result<Vec<(f64, f64)>, SchedError> {
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut start = None;
    for &(i, t) in looks {
        start.get_or_insert(t);
        if i < n && !seen[i] {
            seen[i] = true;
            count += 1;
        }
        if count == n {
            out.push((start.take().unwrap_or(t), t));
            seen.iter_mut().for_each(|s| *s = false);
            count = 0;
        }
    }
    if let Some(robot) = (0..n).find(|&r| !looks.iter().any(|&(i, _)| i == r)) {
        return Err(SchedError::Starved { robot, partial: out });
    }
    Ok(out)
}

/// Instant at which a robot moving linearly from `from` (at `t0`) to `to`
/// (at `t1`) crosses the line through `b` and `c`.
pub fn collinearity_timed_look(from: Point, to: Point, t0: f64, t1: f64, b: Point, c: Point) -> Option<f64> {
    let dir = c - b;
    let f0 = (from - b).cross(dir);
    let f1 = (to - b).cross(dir);
    let scale = dir.norm() * (from.dist(b) + to.dist(b)).max(1.0);
    let eps = 1e-12 * scale;
    if f0.abs() <= eps && f1.abs() <= eps {
        return Some(t0);
    }
    if f0 == f1 {
        return None;
    }
    let s = f0 / (f0 - f1);
    if !(-1e-12..=1.0 + 1e-12).contains(&s) {
        return None;
    }
    let s = s.clamp(0.0, 1.0);
    let t = t0 + s * (t1 - t0);
    debug_assert!(collinear(from.lerp(to, s), b, c, Tolerance::default()) || from.dist(to) == 0.0);
    Some(t)
}

/// One round per line, comma-separated robot indices; `#` starts a comment.
pub fn parse_round_script(text: &str) -> Result<Vec<Vec<usize>>, SchedError> {
    let mut rounds = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut set = Vec::new();
        for tok in line.split(',') {
            let tok = tok.trim();
            let i: usize = tok
                .parse()
                .map_err(|_| SchedError::Parse { line: no + 1, msg: format!("bad robot index '{tok}'") })?;
            set.push(i);
        }
        set.sort_unstable();
        set.dedup();
        rounds.push(set);
    }
    Ok(rounds)
}

/// JSON-lines of activation records.
pub fn parse_async_script(text: &str) -> Result<Vec<AsyncActivation>, SchedError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let a: AsyncActivation =
            serde_json::from_str(line).map_err(|e| SchedError::Parse { line: no + 1, msg: e.to_string() })?;
        if !(a.t_look <= a.t_move_start && a.t_move_start <= a.t_move_end) || !a.t_move_end.is_finite() {
            return Err(SchedError::Parse { line: no + 1, msg: "times must satisfy look <= move_start <= move_end".into() });
        }
        out.push(a);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fsync_rounds() {
        let s = generate_rounds(&ScheduleSpec::fsync(2), 3).unwrap();
        assert_eq!(s.rounds, vec![vec![0, 1, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn ssync_replay_and_fairness() {
        let spec = ScheduleSpec { mode: SyncMode::Ssync, generator: Generator::SsyncRandom { seed: 7, p: 0.5 }, horizon: 200.0 };
        let a = generate_rounds(&spec, 2).unwrap();
        let b = generate_rounds(&spec, 2).unwrap();
        assert_eq!(a, b);
        assert!(a.rounds.iter().all(|r| !r.is_empty()));
        assert!(check_fairness(&a, 2, 4 * 2 + 1).is_ok());
    }

    #[test]
    fn low_probability_still_fair() {
        let spec = ScheduleSpec { mode: SyncMode::Ssync, generator: Generator::SsyncRandom { seed: 1, p: 0.05 }, horizon: 500.0 };
        let s = generate_rounds(&spec, 5).unwrap();
        assert!(check_fairness(&s, 5, 4 * 5 + 1).is_ok());
    }

    #[test]
    fn scripted_fairness_and_epochs() {
        let s = RoundSchedule { rounds: vec![vec![0], vec![1], vec![0], vec![1]] };
        assert!(check_fairness(&s, 2, 2).is_ok());
        assert_eq!(epoch_partition_rounds(&s, 2).unwrap(), vec![(0, 1), (2, 3)]);
        let s = RoundSchedule { rounds: vec![vec![0]; 5] };
        assert_eq!(check_fairness(&s, 2, 2), Err(SchedError::StarvedRobot(1)));
        assert!(matches!(epoch_partition_rounds(&s, 2), Err(SchedError::Starved { robot: 1, .. })));
        let s = RoundSchedule { rounds: vec![vec![0], vec![1], vec![1], vec![0]] };
        assert_eq!(epoch_partition_rounds(&s, 2).unwrap(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn fsync_epochs_are_rounds() {
        let s = generate_rounds(&ScheduleSpec::fsync(5), 4).unwrap();
        assert_eq!(epoch_partition_rounds(&s, 4).unwrap().len(), 5);
    }

    #[test]
    fn async_stream_is_ordered_and_deterministic() {
        let spec = ScheduleSpec::asynchronous(11, 100.0);
        let a = generate_async(&spec, 3).unwrap();
        assert_eq!(a, generate_async(&spec, 3).unwrap());
        for w in a.iter().filter(|x| x.robot == 0).collect::<Vec<_>>().windows(2) {
            assert!(w[0].t_move_end <= w[1].t_look);
        }
        for x in &a {
            assert!(x.t_look <= x.t_move_start && x.t_move_start <= x.t_move_end);
        }
        let looks: Vec<(usize, f64)> = a.iter().map(|x| (x.robot, x.t_look)).collect();
        assert!(!epoch_partition_looks(&looks, 3).unwrap().is_empty());
    }

    #[test]
    fn async_epoch_closes_at_late_look() {
        let looks = [(0, 1.0), (1, 2.0), (0, 3.0), (2, 9.0), (1, 10.0)];
        assert_eq!(epoch_partition_looks(&looks, 3).unwrap(), vec![(1.0, 9.0)]);
    }

    #[test]
    fn double_activation_emits_two_target_rounds() {
        let s = double_activation_adversary(Box::new(FsyncSource), 1, 3, 5, &|round, i| round == 2 && i == 1).unwrap();
        assert_eq!(s.rounds[2], vec![1]);
        assert_eq!(s.rounds[3], vec![1]);
        assert_eq!(s.rounds[4], vec![0, 1, 2]);
        let r = double_activation_adversary(Box::new(FsyncSource), 1, 3, 5, &|_, _| false);
        assert_eq!(r, Err(SchedError::Inconclusive(5)));
    }

    #[test]
    fn collinearity_timing() {
        let b = Point::new(-1.0, 0.0);
        let c = Point::new(1.0, 0.0);
        let t = collinearity_timed_look(Point::new(0.0, 1.0), Point::new(0.0, -1.0), 0.0, 1.0, b, c).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        assert_eq!(collinearity_timed_look(Point::new(0.0, 1.0), Point::new(2.0, 1.0), 0.0, 1.0, b, c), None);
        assert_eq!(collinearity_timed_look(Point::new(2.0, 0.0), Point::new(3.0, 0.0), 4.0, 5.0, b, c), Some(4.0));
    }

    #[test]
    fn script_parsing() {
        let r = parse_round_script("0\n1, 2\n# comment\n\n0,0\n").unwrap();
        assert_eq!(r, vec![vec![0], vec![1, 2], vec![0]]);
        assert!(matches!(parse_round_script("0\nx\n"), Err(SchedError::Parse { line: 2, .. })));
        let a = parse_async_script(r#"{"robot":0,"t_look":0.0,"t_move_start":0.5,"t_move_end":1.0}"#).unwrap();
        assert_eq!(a[0].robot, 0);
        assert!(parse_async_script(r#"{"robot":0,"t_look":1.0,"t_move_start":0.5,"t_move_end":1.0}"#).is_err());
    }

    #[test]
    fn bad_horizon() {
        assert_eq!(ScheduleSpec::fsync(0).validate(), Err(SchedError::BadHorizon(0.0)));
    }
}
