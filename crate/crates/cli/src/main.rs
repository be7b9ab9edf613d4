//! `symdyn`: model checking of effective symbolic dynamical systems.
//!
//! Exit status: 0 when every query holds or fails, 2 when some query is
//! unknown within its budget, 1 on input errors.

mod query;
mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use symdyn::checker::{Budget, Outcome, Strategy};
use symdyn::gallery::HaltTimeTable;
use symdyn::json::{
    self, BuiltSystem, ClopenJson, MachineJson, MachineRef, PartitionJson, PartitionRef,
    PartitionSource, QueryFile, QueryJson, QueryKind, SpaceContext, StrategyJson, SystemRef,
    TableJson,
};
use symdyn::language::{enumerate_language, induced_automaton, Partition};
use symdyn::EffectiveSystem;

use crate::query::{Defaults, Report};

#[derive(Parser)]
#[command(
    name = "symdyn",
    version,
    about = "Model checking for effective symbolic dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run queries and print one JSON verdict per query.
    Check(CheckArgs),
    /// List the induced words up to a length.
    Lang(LangArgs),
    /// Export an automaton, a ball graph or a partition.
    Export(ExportArgs),
    /// Rewrite a clopen set file in canonical form.
    Canon {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the basin of a set, or the points visiting it infinitely often.
    Basin(BasinArgs),
    /// Gallery helpers.
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// Run seeded consistency checks of the library (seed from SYMDYN_SEED).
    Selftest {
        /// Random cases per check.
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

#[derive(Args)]
struct BasinArgs {
    #[arg(long)]
    system: PathBuf,
    /// The target set, in the text syntax for clopen sets.
    #[arg(long)]
    u: String,
    /// Points visiting the set infinitely often instead of the basin.
    #[arg(long)]
    io: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = Budget::default().max_len)]
    budget_len: usize,
    #[arg(long, default_value_t = Budget::default().max_iter)]
    budget_iter: usize,
    #[arg(long, default_value_t = Budget::default().max_depth)]
    budget_depth: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// System spec file.
    #[arg(long)]
    system: Option<PathBuf>,
    /// A query kind (halting, guarded, invariance, regular, omega, basin,
    /// io, reach, pseudo_reach, equicontinuity) or a query file.
    #[arg(long)]
    query: String,
    /// Partition file or `depthN`.
    #[arg(long)]
    partition: Option<String>,
    /// Automaton file or figure name.
    #[arg(long)]
    automaton: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    w: Option<String>,
    /// Ball level for pseudo_reach and equicontinuity.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Exact,
    SemiDecide,
    Basins,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Exact => Strategy::Exact,
            StrategyArg::SemiDecide => Strategy::SemiDecide,
            StrategyArg::Basins => Strategy::Basins,
        }
    }
}

#[derive(Args)]
struct LangArgs {
    #[arg(long)]
    system: PathBuf,
    /// Partition file or `depthN`.
    #[arg(long)]
    partition: String,
    #[arg(long)]
    maxlen: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    Automaton,
    BallGraph,
    Partition,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(value_enum)]
    what: ExportWhat,
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    automaton: Option<String>,
    /// Ball level of the ball graph (at least the partition depth).
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// Simulate a machine on unary inputs and write its halting-time table.
    BuildTable {
        /// Machine file or shipped machine name (parity4, bb3).
        #[arg(long)]
        machine: String,
        #[arg(long)]
        cutoff: u64,
        #[arg(long, default_value_t = 8)]
        max_input: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a shipped machine as JSON.
    Machine {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check(args) => check(args),
        Command::Lang(args) => lang(args).map(|()| ExitCode::SUCCESS),
        Command::Export(args) => export(args).map(|()| ExitCode::SUCCESS),
        Command::Canon { file, out } => {
            let set = json::parse::<ClopenJson>(&read(&file)?)?.build()?;
            emit(
                out.as_deref(),
                &(json::to_string(&ClopenJson::from_set(&set)) + "\n"),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Basin(args) => basin(args),
        Command::Gallery(g) => gallery(g).map(|()| ExitCode::SUCCESS),
        Command::Selftest { cases } => selftest::run(cases),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_system(path: &Path) -> Result<BuiltSystem> {
    let spec = json::parse::<json::SystemJson>(&read(path)?)
        .with_context(|| format!("in {}", path.display()))?;
    spec.build(&dir_of(path))
        .with_context(|| format!("in {}", path.display()))
}

fn check(args: CheckArgs) -> Result<ExitCode> {
    let defaults = Defaults {
        budget: Budget::new(
            args.budget.budget_len,
            args.budget.budget_iter,
            args.budget.budget_depth,
        )?,
        strategy: args.strategy.into(),
    };
    let cwd = PathBuf::new();
    let (queries, base) = match QueryKind::parse(&args.query) {
        Some(kind) => {
            let strategy = match args.strategy {
                StrategyArg::Auto => None,
                StrategyArg::Exact => Some(StrategyJson::Exact),
                StrategyArg::SemiDecide => Some(StrategyJson::SemiDecide),
                StrategyArg::Basins => Some(StrategyJson::Basins),
            };
            let q = QueryJson {
                query: kind,
                system: None,
                partition: args.partition.map(PartitionRef::Named),
                automaton: args.automaton.map(json::AutomatonRef::Named),
                u: args.u,
                v: args.v,
                w: args.w,
                level: args.level,
                budget: None,
                strategy,
            };
            (vec![q], cwd)
        }
        None => {
            let path = Path::new(&args.query);
            let file = json::parse::<QueryFile>(&read(path)?)
                .with_context(|| format!("in {}", path.display()))?;
            (file.into_queries(), dir_of(path))
        }
    };
    let default_system = args.system.as_deref().map(load_system).transpose()?;
    run_queries(
        &queries,
        &base,
        default_system.as_ref(),
        defaults,
        args.out.as_deref(),
    )
}

fn basin(args: BasinArgs) -> Result<ExitCode> {
    let defaults = Defaults {
        budget: Budget::new(
            args.budget.budget_len,
            args.budget.budget_iter,
            args.budget.budget_depth,
        )?,
        strategy: Strategy::Auto,
    };
    let q = QueryJson {
        query: if args.io {
            QueryKind::Io
        } else {
            QueryKind::Basin
        },
        system: None,
        partition: None,
        automaton: None,
        u: Some(args.u),
        v: None,
        w: None,
        level: None,
        budget: None,
        strategy: None,
    };
    let system = load_system(&args.system)?;
    run_queries(
        &[q],
        Path::new(""),
        Some(&system),
        defaults,
        args.out.as_deref(),
    )
}

/// Runs queries on worker threads and prints their verdicts in input order.
fn run_queries(
    queries: &[QueryJson],
    base: &Path,
    default_system: Option<&BuiltSystem>,
    defaults: Defaults,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let one = |i: usize, q: &QueryJson| -> Result<Report> {
        let owned;
        let system = match (&q.system, default_system) {
            (Some(r), _) => {
                owned = load_ref(r, base).with_context(|| format!("query {i}: system"))?;
                &owned
            }
            (None, Some(s)) => s,
            (None, None) => bail!("query {i} names no system and --system is not given"),
        };
        query::run(system, q, base, defaults)
            .with_context(|| format!("query {i} ({})", kind_name(q.query)))
    };
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(queries.len())
        .max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut reports: Vec<Option<Result<Report>>> = (0..queries.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(q) = queries.get(i) else { break done };
                        done.push((i, one(i, q)));
                    }
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("query worker") {
                reports[i] = Some(r);
            }
        }
    });
    let mut lines = String::new();
    let mut unknown = false;
    for r in reports {
        let Report { outcome, json } = r.expect("every query ran")?;
        unknown |= outcome == Outcome::Unknown;
        lines.push_str(&serde_json::to_string(&json)?);
        lines.push('\n');
    }
    emit(out, &lines)?;
    Ok(if unknown {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn kind_name(kind: QueryKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn load_ref(r: &SystemRef, base: &Path) -> Result<BuiltSystem> {
    Ok(r.load(base)?)
}

/// Partition of a loaded system from a `--partition` flag.
fn with_partition<T>(
    system: &BuiltSystem,
    partition: &str,
    clopen: impl FnOnce(
        &dyn EffectiveSystem<Set = symdyn::ClopenSet>,
        Partition<symdyn::ClopenSet>,
    ) -> Result<T>,
    product: impl FnOnce(
        &symdyn::system::ProductSystem,
        Partition<symdyn::system::ProductSet>,
    ) -> Result<T>,
) -> Result<T> {
    let source = PartitionRef::Named(partition.to_string()).resolve(Path::new(""))?;
    match system {
        BuiltSystem::Clopen(s) => {
            let p = match source {
                PartitionSource::Depth(level) => {
                    symdyn::language::ball_partition(s.whole().space(), level)
                }
                PartitionSource::Cells(spec) => {
                    spec.build(s.as_ref(), &SpaceContext(s.whole().space().clone()))?
                }
            };
            clopen(s.as_ref(), p)
        }
        BuiltSystem::Product(ps) => {
            let p = match source {
                PartitionSource::Depth(level) => query::balls(ps.as_ref(), level)?,
                PartitionSource::Cells(spec) => spec.build(ps.as_ref(), ps.as_ref())?,
            };
            product(ps.as_ref(), p)
        }
    }
}

fn lang(args: LangArgs) -> Result<()> {
    let system = load_system(&args.system)?;
    fn listing<Sys: EffectiveSystem + ?Sized>(
        s: &Sys,
        p: Partition<Sys::Set>,
        max_len: usize,
    ) -> Value {
        let words: Vec<String> = enumerate_language(s, &p, max_len)
            .iter()
            .map(|w| p.render(w))
            .collect();
        json!({"count": words.len(), "cells": p.names(), "words": words})
    }
    let out = with_partition(
        &system,
        &args.partition,
        |s, p| Ok(listing(s, p, args.maxlen)),
        |s, p| Ok(listing(s, p, args.maxlen)),
    )?;
    emit(args.out.as_deref(), &(serde_json::to_string(&out)? + "\n"))
}

fn export(args: ExportArgs) -> Result<()> {
    let text = match args.what {
        ExportWhat::Automaton => {
            let name = args
                .automaton
                .as_deref()
                .ok_or_else(|| anyhow!("export automaton needs --automaton"))?;
            let aut = query::load_automaton(name, Path::new(""))?;
            match args.format {
                Format::Dot => aut.to_dot(
                    &Path::new(name)
                        .file_stem()
                        .map_or(name.into(), |s| s.to_string_lossy()),
                ),
                Format::Json => json::to_string(&aut.to_json()) + "\n",
            }
        }
        ExportWhat::BallGraph => {
            let system = load_system(
                args.system
                    .as_deref()
                    .ok_or_else(|| anyhow!("export ball-graph needs --system"))?,
            )?;
            let partition = args.partition.as_deref().unwrap_or("depth0");
            fn graph<Sys: EffectiveSystem + ?Sized>(
                s: &Sys,
                p: Partition<Sys::Set>,
                level: usize,
                format: Format,
            ) -> String {
                let aut = induced_automaton(s, &p, level);
                match format {
                    Format::Dot => aut.nfa.to_dot("ball_graph"),
                    Format::Json => {
                        let names = aut.nfa.states();
                        let edges: Vec<Value> = aut
                            .nfa
                            .edge_list()
                            .into_iter()
                            .map(|(f, a, t)| json!([names[f], p.names()[a], names[t]]))
                            .collect();
                        let v = json!({"level": aut.level, "exact": aut.exact, "states": names, "edges": edges});
                        serde_json::to_string_pretty(&v).expect("plain JSON") + "\n"
                    }
                }
            }
            with_partition(
                &system,
                partition,
                |s, p| Ok(graph(s, p, args.level, args.format)),
                |s, p| Ok(graph(s, p, args.level, args.format)),
            )?
        }
        ExportWhat::Partition => {
            if args.format == Format::Dot {
                bail!("partitions export as JSON only");
            }
            let system = load_system(
                args.system
                    .as_deref()
                    .ok_or_else(|| anyhow!("export partition needs --system"))?,
            )?;
            let partition = args
                .partition
                .as_deref()
                .ok_or_else(|| anyhow!("export partition needs --partition"))?;
            with_partition(
                &system,
                partition,
                |_, p| Ok(json::to_string(&PartitionJson::from_partition(&p)) + "\n"),
                |_, p| {
                    let cells: Vec<Value> = p
                        .names()
                        .iter()
                        .zip(p.cells())
                        .map(|(n, c)| json!({"name": n, "set": c.to_string()}))
                        .collect();
                    Ok(serde_json::to_string_pretty(&json!({"cells": cells}))? + "\n")
                },
            )?
        }
    };
    emit(args.out.as_deref(), &text)
}

fn gallery(cmd: GalleryCommand) -> Result<()> {
    match cmd {
        GalleryCommand::BuildTable {
            machine,
            cutoff,
            max_input,
            out,
        } => {
            let m = MachineRef::Named(machine).load(Path::new(""))?;
            let table = HaltTimeTable::build(m, max_input, cutoff)?;
            emit(
                out.as_deref(),
                &(json::to_string(&TableJson::from_table(&table)) + "\n"),
            )
        }
        GalleryCommand::Machine { name, out } => {
            let m = json::shipped_machine(&name)
                .ok_or_else(|| anyhow!("no shipped machine named {name:?}"))?;
            emit(
                out.as_deref(),
                &(json::to_string(&MachineJson::from_machine(&m)) + "\n"),
            )
        }
    }
}
