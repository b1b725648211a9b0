//! `drfeas`: run, analyse and export Douglas-Rachford sequences for a
//! hyperplane and a finite set.
//!
//! Exit codes: 0 success, 1 closed-form verification mismatch, 2 invalid
//! input or unmet preconditions.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use drfeas::closedform::{beatty_triple, verify_closed_form, verify_closed_form_rebased, ClosedForm};
use drfeas::cycling::{cycle_relation, detect_cycle, heuristic_rationality, rationality_predicate, CycleReport, DoubletonProblem};
use drfeas::dynamics::{iterate_with, Outcome, RunOptions};
use drfeas::export::{dr_rows, map_rows, trace_json, write_csv, write_table, Method, TraceRow};
use drfeas::map::ap_iterate;
use drfeas::{Backend, Error, Problem, TiePolicy};

/// Largest denominator tried by the float rationality heuristic.
const HEURISTIC_MAX_DEN: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "drfeas", version, about = "Douglas-Rachford iteration for a hyperplane and a finite set")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (JSON).
    #[arg(long, global = true)]
    problem: Option<PathBuf>,

    /// Number of steps (defaults depend on the subcommand).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    horizon: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// higher_inner, lower_inner or lowest_index.
    #[arg(long, global = true)]
    tie_policy: Option<TiePolicy>,

    /// Re-express the problem on another backend: f64, rational or surd:D.
    #[arg(long, global = true)]
    backend: Option<String>,

    /// On floats, guess rationality of the distance ratio by continued fractions.
    #[arg(long, global = true)]
    heuristic_rationality: bool,

    /// In `verify`, restart the closed form where iteration first enters its region.
    #[arg(long, global = true)]
    fallback_iterate: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Iterate and export the trace.
    Run,
    /// Detect cycles of a two-point problem and report the rationality test.
    Cycle,
    /// Evaluate the floor-function closed form (falls back to iteration).
    ClosedForm,
    /// Check the closed form against iteration.
    Verify,
    /// Alternating projections trace.
    Map,
    /// Emit the sqrt(2) Beatty triples (u_n, v_n, w_n) for n = 0..horizon.
    Beatty,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Table,
}

impl Command {
    fn default_horizon(self) -> u64 {
        match self {
            Command::Run | Command::ClosedForm => 100,
            Command::Cycle => 100_000,
            Command::Verify => 1_000,
            Command::Map => 10,
            Command::Beatty => 20,
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Cycle | Command::Verify => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<u8> {
    let horizon = cli.horizon.unwrap_or_else(|| cli.command.default_horizon());
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    match cli.command {
        Command::Beatty => cmd_beatty(cli, horizon, format),
        cmd => {
            let problem = load_problem(cli)?;
            match cmd {
                Command::Run => cmd_run(cli, &problem, horizon, format),
                Command::Cycle => cmd_cycle(cli, problem, horizon, format),
                Command::ClosedForm => cmd_closed_form(cli, problem, horizon, format),
                Command::Verify => cmd_verify(cli, problem, horizon, format),
                Command::Map => cmd_map(cli, &problem, horizon, format),
                Command::Beatty => unreachable!(),
            }
        }
    }
}

fn parse_backend(s: &str) -> anyhow::Result<Backend> {
    match s {
        "f64" => Ok(Backend::F64),
        "rational" => Ok(Backend::Rational),
        _ => {
            let d = s
                .strip_prefix("surd:")
                .and_then(|d| d.parse::<u64>().ok())
                .ok_or_else(|| anyhow!("unknown backend {s:?} (expected f64, rational or surd:D)"))?;
            Ok(Backend::surd(d)?)
        }
    }
}

fn load_problem(cli: &Cli) -> anyhow::Result<Problem> {
    let path = cli.problem.as_ref().ok_or_else(|| anyhow!("--problem is required"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut problem = Problem::from_json_str(&text).with_context(|| format!("loading {}", path.display()))?;
    if let Some(b) = &cli.backend {
        problem = problem.convert(parse_backend(b)?)?;
    }
    if let Some(t) = cli.tie_policy {
        problem = problem.with_tie_policy(t);
    }
    Ok(problem)
}

fn doubleton(problem: Problem) -> anyhow::Result<DoubletonProblem> {
    if problem.set.len() != 2 {
        bail!("cycling analysis requires a doubleton (got {} points)", problem.set.len());
    }
    Ok(DoubletonProblem::new(problem)?)
}

fn sink(cli: &Cli) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_rows(cli: &Cli, format: Format, method: Method, rows: &[TraceRow], m: usize, dim: usize, extra: Value) -> anyhow::Result<()> {
    let mut out = sink(cli)?;
    match format {
        Format::Csv => write_csv(&mut out, rows, m, dim)?,
        Format::Table => write_table(&mut out, rows, m, dim)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&trace_json(method, rows, extra))?)?,
    }
    out.flush()?;
    Ok(())
}

fn outcome_text(outcome: &Outcome) -> String {
    match outcome {
        Outcome::HorizonReached => "HorizonReached".into(),
        Outcome::FixedPointReached { at } => format!("FixedPointReached at n={at}"),
        Outcome::DivergenceDetected { at, shadow_limit } => {
            format!("DivergenceDetected at n={at}, shadow {shadow_limit}")
        }
    }
}

fn cmd_run(cli: &Cli, p: &Problem, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let run = iterate_with(&p.hyperplane, &p.set, &p.x0, &RunOptions::horizon(horizon))?;
    let rows = dr_rows(&p.hyperplane, &p.set, &run);
    let extra = json!({ "outcome": run.outcome });
    emit_rows(cli, format, Method::Dr, &rows, p.set.len(), p.dim(), extra)?;
    eprintln!("outcome: {}", outcome_text(&run.outcome));
    Ok(0)
}

fn cmd_map(cli: &Cli, p: &Problem, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let trace = ap_iterate(&p.hyperplane, &p.set, &p.x0, horizon)?;
    let rows = map_rows(&p.hyperplane, &p.set, &trace);
    emit_rows(cli, format, Method::Map, &rows, p.set.len(), p.dim(), json!({ "steps": horizon }))?;
    Ok(0)
}

fn cmd_cycle(cli: &Cli, problem: Problem, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let p = doubleton(problem)?;
    let report = detect_cycle(&p, horizon)?;
    let (rational, relation, guess) = if p.backend().is_exact() {
        let rel = cycle_relation(&p)?.map(|(q1, q2)| json!({ "q1": q1, "q2": q2 }));
        (json!(rationality_predicate(&p)?), rel.unwrap_or(Value::Null), Value::Null)
    } else if cli.heuristic_rationality {
        let guess = heuristic_rationality(&p, HEURISTIC_MAX_DEN).map(|(n, d)| format!("{n}/{d}"));
        (json!("heuristic"), Value::Null, json!(guess))
    } else {
        (json!("unavailable"), Value::Null, Value::Null)
    };

    let mut out = sink(cli)?;
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            let map = v.as_object_mut().expect("report is an object");
            map.insert("backend".into(), json!(p.backend().to_string()));
            map.insert("distance_ratio".into(), json!(p.distance_ratio().to_string()));
            map.insert("rational".into(), rational);
            map.insert("relation".into(), relation);
            if !guess.is_null() {
                map.insert("heuristic_ratio".into(), guess);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Table => {
            match &report {
                CycleReport::Cycle { preperiod, period, states } => {
                    writeln!(out, "status: cycle")?;
                    writeln!(out, "preperiod: {preperiod}")?;
                    writeln!(out, "period: {period}")?;
                    let s: Vec<String> = states.iter().map(ToString::to_string).collect();
                    writeln!(out, "states: {}", s.join(", "))?;
                }
                CycleReport::NoCycle { horizon } => writeln!(out, "status: no_cycle within {horizon}")?,
            }
            writeln!(out, "distance ratio: {}", p.distance_ratio())?;
            writeln!(out, "rational: {}", rational.as_str().map(String::from).unwrap_or(rational.to_string()))?;
            if let Some(r) = relation.as_object() {
                writeln!(out, "relation: q1={}, q2={}", r["q1"], r["q2"])?;
            }
            if let Some(g) = guess.as_str() {
                writeln!(out, "heuristic ratio: {g}")?;
            }
        }
        Format::Csv => {
            // One row per state of the cycle, indexed from the preperiod.
            let dim = p.problem().dim();
            let mut head = vec!["n".to_string()];
            head.extend((1..=dim).map(|i| format!("x_{i}")));
            writeln!(out, "{}", head.join(","))?;
            if let CycleReport::Cycle { preperiod, states, .. } = &report {
                for (i, x) in states.iter().enumerate() {
                    let cells: Vec<String> = x.coords().iter().map(ToString::to_string).collect();
                    writeln!(out, "{},{}", preperiod + i as u64, cells.join(","))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(0)
}

fn cmd_closed_form(cli: &Cli, problem: Problem, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let p = doubleton(problem)?;
    let pr = p.problem();
    let (method, rows) = match ClosedForm::new(&p) {
        Ok(cf) => {
            let rows = (1..=horizon)
                .map(|n| {
                    let (x, k) = cf.point(n)?;
                    Ok(TraceRow { n, k: Some(k), inner: cf.inner(n)?, counts: Vec::new(), x })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (Method::ClosedForm, rows)
        }
        Err(Error::ClosedFormNotApplicable(why)) => {
            eprintln!("warning: closed form not applicable ({why}); falling back to iteration");
            let run = iterate_with(&pr.hyperplane, &pr.set, &pr.x0, &RunOptions::horizon(horizon))?;
            let mut rows = dr_rows(&pr.hyperplane, &pr.set, &run);
            rows.remove(0);
            for r in &mut rows {
                r.counts.clear();
            }
            (Method::Dr, rows)
        }
        Err(e) => return Err(e.into()),
    };
    emit_rows(cli, format, method, &rows, 0, pr.dim(), json!({}))?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, problem: Problem, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let p = doubleton(problem)?;
    let report = if cli.fallback_iterate {
        verify_closed_form_rebased(&p, horizon)?
    } else {
        verify_closed_form(&p, horizon)?
    };
    let mut out = sink(cli)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Table | Format::Csv => {
            let mode = if report.exact { "exact" } else { "relative 1e-9" };
            match &report.mismatch {
                None => writeln!(out, "verified n=1..{} ({mode})", report.horizon)?,
                Some(m) => writeln!(
                    out,
                    "mismatch at n={} ({}): closed form {} vs iteration {}",
                    m.n, m.what, m.closed_form, m.iterated
                )?,
            }
            if report.rebased_at > 0 {
                writeln!(out, "closed form restarted from x_{}", report.rebased_at)?;
            }
        }
    }
    out.flush()?;
    Ok(if report.verified { 0 } else { 1 })
}

fn cmd_beatty(cli: &Cli, horizon: u64, format: Format) -> anyhow::Result<u8> {
    let rows: Vec<(u64, (i64, i64, i64))> = (0..=horizon).map(|n| (n, beatty_triple(n))).collect();
    let mut out = sink(cli)?;
    match format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(n, (u, v, w))| json!({ "n": n, "u": u, "v": v, "w": w }))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            writeln!(out, "n,u,v,w")?;
            for (n, (u, v, w)) in &rows {
                writeln!(out, "{n},{u},{v},{w}")?;
            }
        }
        Format::Table => {
            let width = horizon.to_string().len().max(1);
            writeln!(out, "{:>width$}  u  {:>6}  {:>6}", "n", "v", "w")?;
            for (n, (u, v, w)) in &rows {
                writeln!(out, "{n:>width$}  {u}  {v:>6}  {w:>6}")?;
            }
        }
    }
    out.flush()?;
    Ok(0)
}
