//! Run configuration from flags and an optional `key = value` file. Flags win
//! over file values; keys are the long flag names.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use swarm_core::algos;
use swarm_core::experiment::{default_schedule, Experiment};
use swarm_core::geom::Tolerance;
use swarm_core::model::{ModelId, SyncMode};
use swarm_core::problems::{generate, Instance, Params, ProblemKind};
use swarm_core::sched::{parse_async_script, parse_round_script, Generator, ScheduleSpec};

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Config file with `key = value` lines (keys as the long flag names).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model as `light,sync`, e.g. `lumi,async` or `FCOM^S`.
    #[arg(long)]
    pub model: Option<String>,
    /// Registered algorithm name.
    #[arg(long)]
    pub algo: Option<String>,
    /// Problem name; defaults to the algorithm's problem.
    #[arg(long)]
    pub problem: Option<String>,
    /// Instance JSON file (instead of --gen).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Generator parameters `k=v,...`; `seed=` picks the generator seed.
    #[arg(long)]
    pub gen: Option<String>,
    /// Seed for frames, and for generators and schedules not seeded explicitly.
    #[arg(long, env = "OPAQUE_SWARM_SEED")]
    pub seed: Option<u64>,
    /// `fsync`, `ssync[:seed=S,p=P]`, `async[:seed=S]`, `rounds:FILE`, or `async-script:FILE`.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Rounds (FSYNC/SSYNC) or time units (ASYNC).
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub transparent: bool,
    /// Run an algorithm in a model it does not claim.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub tol_rel: Option<f64>,
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// JSON-lines trace output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// JSON report output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Number of independent runs with consecutive seeds.
    #[arg(long)]
    pub batch: Option<usize>,
}

pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key = value", no + 1))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("{key}: expected true or false, got '{v}'"),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| anyhow!("{key}: {e}"))
}

impl RunArgs {
    /// Fills unset flags from the config file, if any.
    pub fn merged(mut self) -> Result<RunArgs> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for (k, v) in parse_config_file(&text)? {
            let file = |v: &str| dir.join(v);
            match k.as_str() {
                "model" => self.model = self.model.or(Some(v)),
                "algo" => self.algo = self.algo.or(Some(v)),
                "problem" => self.problem = self.problem.or(Some(v)),
                "instance" => self.instance = self.instance.or(Some(file(&v))),
                "gen" => self.gen = self.gen.or(Some(v)),
                "seed" => self.seed = self.seed.or(Some(num(&k, &v)?)),
                "schedule" => self.schedule = self.schedule.or(Some(v)),
                "horizon" => self.horizon = self.horizon.or(Some(num(&k, &v)?)),
                "transparent" => self.transparent |= parse_bool(&k, &v)?,
                "force" => self.force |= parse_bool(&k, &v)?,
                "tol-rel" => self.tol_rel = self.tol_rel.or(Some(num(&k, &v)?)),
                "tol-abs" => self.tol_abs = self.tol_abs.or(Some(num(&k, &v)?)),
                "trace" => self.trace = self.trace.or(Some(file(&v))),
                "report" => self.report = self.report.or(Some(file(&v))),
                "batch" => self.batch = self.batch.or(Some(num(&k, &v)?)),
                _ => bail!("config: unknown key '{k}'"),
            }
        }
        Ok(self)
    }

    /// Builds the experiment for one seed.
    pub fn experiment(&self, seed: u64) -> Result<Experiment> {
        let algo = self.algo.as_deref().ok_or_else(|| anyhow!("missing --algo"))?;
        let info = algos::lookup(algo).ok_or_else(|| anyhow!("unknown algorithm '{algo}'"))?;
        let model: ModelId = self.model.as_deref().ok_or_else(|| anyhow!("missing --model"))?.parse()?;
        let problem = match &self.problem {
            Some(p) => p.parse::<ProblemKind>()?,
            None => info.problem,
        };
        let instance = match (&self.instance, &self.gen) {
            (Some(_), Some(_)) => bail!("--instance and --gen are exclusive"),
            (Some(path), None) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let inst = Instance::from_json(&text)?;
                if inst.problem != problem {
                    bail!("instance file is a {} instance, not {problem}", inst.problem);
                }
                inst
            }
            (None, gen) => {
                let (params, gen_seed) = parse_gen(gen.as_deref().unwrap_or(""))?;
                generate(problem, &params, gen_seed.unwrap_or(seed))?
            }
        };
        let default = default_schedule(info, model.sync, seed);
        let mut schedule = match &self.schedule {
            Some(s) => parse_schedule(s, seed, model.sync)?,
            None => default.clone(),
        };
        schedule.horizon = match self.horizon {
            Some(h) => h,
            None if schedule.mode == default.mode => default.horizon,
            None => default_schedule(info, schedule.mode, seed).horizon,
        };
        let base = Tolerance::default();
        let tol = Tolerance::new(self.tol_rel.unwrap_or(base.eps_rel), self.tol_abs.unwrap_or(base.eps_abs))?;
        Ok(Experiment {
            model,
            algo: algo.to_string(),
            instance,
            schedule,
            transparent: self.transparent || info.transparent,
            tol,
            seed,
            force: self.force,
        })
    }
}

pub fn parse_gen(s: &str) -> Result<(Params, Option<u64>)> {
    let mut params = Params::new();
    let mut seed = None;
    for kv in s.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--gen: expected k=v, got '{kv}'"))?;
        if k == "seed" {
            seed = Some(num(k, v)?);
        } else {
            params.insert(k.to_string(), num(k, v)?);
        }
    }
    Ok((params, seed))
}

/// Parses a schedule description; the horizon is filled in by the caller.
pub fn parse_schedule(s: &str, default_seed: u64, sync: SyncMode) -> Result<ScheduleSpec> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let opts = || -> Result<BTreeMap<&str, &str>> {
        rest.split(',')
            .filter(|kv| !kv.is_empty())
            .map(|kv| kv.split_once('=').ok_or_else(|| anyhow!("schedule option '{kv}' is not k=v")))
            .collect()
    };
    let seed_of = |o: &BTreeMap<&str, &str>| -> Result<u64> { o.get("seed").map_or(Ok(default_seed), |v| num("seed", v)) };
    let spec = match kind {
        "fsync" => ScheduleSpec::fsync(1),
        "ssync" => {
            let o = opts()?;
            let mut spec = ScheduleSpec::ssync(seed_of(&o)?, 1);
            if let Some(p) = o.get("p") {
                spec.generator = Generator::SsyncRandom { seed: seed_of(&o)?, p: num("p", p)? };
            }
            spec
        }
        "async" => ScheduleSpec::asynchronous(seed_of(&opts()?)?, 1.0),
        "rounds" => {
            let text = fs::read_to_string(rest).with_context(|| format!("reading {rest}"))?;
            let rounds = parse_round_script(&text)?;
            if sync == SyncMode::Async {
                bail!("round scripts need a round-based model");
            }
            ScheduleSpec { mode: sync, generator: Generator::ScriptedRounds(rounds), horizon: 1.0 }
        }
        "async-script" => {
            let text = fs::read_to_string(rest).with_context(|| format!("reading {rest}"))?;
            ScheduleSpec { mode: SyncMode::Async, generator: Generator::ScriptedAsync(parse_async_script(&text)?), horizon: 1.0 }
        }
        _ => bail!("unknown schedule '{kind}'"),
    };
    Ok(spec)
}
