mod config;
mod render;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use swarm_core::algos::REGISTRY;
use swarm_core::demos::{run_demo, NAMES};
use swarm_core::experiment::{Experiment, Outcome};
use swarm_core::geom::Tolerance;
use swarm_core::problems::ProblemKind;
use swarm_core::relmap::{check_table, default_facts, derive_table, emit_table, parse_facts, Format};
use swarm_core::trace::{read_jsonl, write_jsonl};

use config::RunArgs;

#[derive(Parser)]
#[command(name = "opaque-swarm", version, about = "Simulate opaque robot swarms under the look-compute-move cycle")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm on a problem instance and check it.
    Run(Box<RunArgs>),
    /// Replay a counterexample execution.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(NAMES))]
        name: String,
        /// Directory for the demo's traces.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Derive the relation map between models from solvability facts.
    Relmap {
        /// Compare with the reference table and fail on any difference.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
        /// Facts JSON file instead of the built-in facts.
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Draw a trace as SVG.
    Render {
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Draw only the configuration at this time (`2.5` or `t=2.5`).
        #[arg(long, value_parser = parse_time)]
        at: Option<f64>,
    },
    /// List problems and registered algorithms.
    Problems,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

fn parse_time(s: &str) -> Result<f64, String> {
    s.trim_start_matches("t=").parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(args) => cmd_run(*args),
        Command::Demo { name, trace_dir } => cmd_demo(&name, trace_dir.as_deref()),
        Command::Relmap { check, format, facts } => cmd_relmap(check, format, facts.as_deref()),
        Command::Render { trace, out, at } => cmd_render(&trace, &out, at),
        Command::Problems => cmd_problems(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_trace(path: &Path, o: &Outcome) -> Result<()> {
    let trace = o.trace.as_ref().expect("runs keep their trace");
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    write_jsonl(trace, &mut w)?;
    w.flush()?;
    Ok(())
}

fn indexed(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}-{i}{ext}"))
}

fn summary(e: &Experiment, o: &Outcome) -> String {
    let p = &o.report.progress;
    let mut s = format!("{} on {} in {} (seed {}): ", e.algo, e.instance.problem, e.model, e.seed);
    match (o.final_phase, p.cycles) {
        (Some(last), _) => s += &format!("phase {}/{last}, {} epochs after final", p.phase, p.epochs_after_final),
        (None, cycles) => s += &format!("{} cycles", cycles.unwrap_or(0)),
    }
    s += &format!(", {} violations, {}", o.report.violations.len(), if o.success { "ok" } else { "FAILED" });
    s
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let args = args.merged()?;
    let seed = args.seed.unwrap_or(0);
    let batch = args.batch.unwrap_or(1).max(1);
    let experiments: Vec<Experiment> = (0..batch as u64).map(|i| args.experiment(seed + i)).collect::<Result<_>>()?;
    for e in &experiments {
        e.check()?;
    }
    let outcomes: Vec<Outcome> = experiments.par_iter().map(|e| e.run()).collect::<Result<_, _>>()?;
    let mut reports = Vec::new();
    for (i, (e, o)) in experiments.iter().zip(&outcomes).enumerate() {
        if let Some(path) = &args.trace {
            write_trace(&if batch > 1 { indexed(path, i) } else { path.clone() }, o)?;
        }
        println!("{}", summary(e, o));
        let p = &o.report.progress;
        if batch == 1 {
            println!("  phase entry times: {:?}", p.entry_times);
            println!("  schedule: {:?} horizon {}", e.schedule.generator, e.schedule.horizon);
        }
        for v in o.report.violations.iter().take(if batch == 1 { 20 } else { 3 }) {
            println!("  violation: {v}");
        }
        reports.push(json!({
            "algo": e.algo,
            "model": e.model.to_string(),
            "problem": e.instance.problem.to_string(),
            "seed": e.seed,
            "schedule": format!("{:?}", e.schedule.generator),
            "horizon": e.schedule.horizon,
            "transparent": e.transparent,
            "instance": e.instance,
            "outcome": o,
        }));
    }
    let ok = outcomes.iter().filter(|o| o.success).count();
    if batch > 1 {
        println!("batch: {ok}/{batch} runs succeeded");
    }
    if let Some(path) = &args.report {
        fs::write(path, serde_json::to_string_pretty(&json!({ "runs": reports, "succeeded": ok }))?)?;
    }
    Ok(ok == batch)
}

fn cmd_demo(name: &str, trace_dir: Option<&Path>) -> Result<bool> {
    let r = run_demo(name, Tolerance::default())?;
    print!("{r}");
    if let Some(dir) = trace_dir {
        fs::create_dir_all(dir)?;
        for (i, t) in r.traces.iter().enumerate() {
            let mut w = BufWriter::new(File::create(dir.join(format!("{name}-{i}.jsonl")))?);
            write_jsonl(t, &mut w)?;
            w.flush()?;
        }
    }
    Ok(r.reproduced)
}

fn cmd_relmap(check: bool, format: TableFormat, facts: Option<&Path>) -> Result<bool> {
    let facts = match facts {
        Some(p) => parse_facts(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => default_facts(),
    };
    let cells = derive_table(&facts)?;
    let format = match format {
        TableFormat::Text => Format::Text,
        TableFormat::Csv => Format::Csv,
    };
    print!("{}", emit_table(&cells, format));
    if !check {
        return Ok(true);
    }
    let mismatches = check_table(&cells);
    for m in &mismatches {
        eprintln!("mismatch {m}");
    }
    eprintln!("check: {} of {} cells match", cells.len() - mismatches.len(), cells.len());
    Ok(mismatches.is_empty())
}

fn cmd_render(trace: &Path, out: &Path, at: Option<f64>) -> Result<bool> {
    let f = File::open(trace).with_context(|| format!("opening {}", trace.display()))?;
    let t = read_jsonl(BufReader::new(f), Tolerance::default()).with_context(|| format!("reading {}", trace.display()))?;
    let svg = match at {
        Some(time) => render::render_at(&t, time),
        None => render::render_trace(&t),
    };
    fs::write(out, svg).with_context(|| format!("writing {}", out.display()))?;
    Ok(true)
}

fn cmd_problems() -> Result<bool> {
    for p in ProblemKind::ALL {
        println!("{:<18} {:<4} {}", p.name(), p.tag(), p.summary());
        for a in REGISTRY.iter().filter(|a| a.problem == p) {
            let mut notes = Vec::new();
            if a.transparent {
                notes.push("transparent");
            }
            if a.naive {
                notes.push("counterexample only");
            }
            let notes = if notes.is_empty() { String::new() } else { format!(" ({})", notes.join(", ")) };
            println!("    {:<22} from {}{notes}", a.name, a.weakest);
        }
    }
    Ok(true)
}
