//! Runs JSON queries against loaded systems.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use symdyn::automata::{Dfa, Muller};
use symdyn::checker::{
    self, Budget, Evidence, FixpointResult, ModulusResult, Outcome, Strategy, Verdict,
};
use symdyn::json::{
    render_set, AutomatonRef, BuiltAutomaton, BuiltSystem, FigureName, PartitionSource, QueryJson,
    QueryKind, SetContext, SpaceContext,
};
use symdyn::language::{ball_partition, word_in_language, Partition};
use symdyn::{ClopenSet, EffectiveSystem};

/// Defaults that flags supply when a query leaves them out.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub budget: Budget,
    pub strategy: Strategy,
}

/// A verdict as printed, plus its outcome for the exit status.
pub struct Report {
    pub outcome: Outcome,
    pub json: Value,
}

pub fn run(
    system: &BuiltSystem,
    query: &QueryJson,
    base: &Path,
    defaults: Defaults,
) -> Result<Report> {
    match system {
        BuiltSystem::Clopen(s) => {
            let ctx = SpaceContext(s.whole().space().clone());
            let space = s.whole().space().clone();
            let hooks = Hooks {
                render: &render_set,
                point: &|set: &ClopenSet| clopen_point(s.as_ref(), set),
                balls: &|level| Ok(ball_partition(&space, level)),
            };
            execute(s.as_ref(), &ctx, query, base, defaults, &hooks)
        }
        BuiltSystem::Product(p) => {
            let render = |set: &symdyn::system::ProductSet| set.to_string();
            let hooks = Hooks {
                render: &render,
                point: &|_| None,
                balls: &|level| balls(p.as_ref(), level),
            };
            execute(p.as_ref(), p.as_ref(), query, base, defaults, &hooks)
        }
    }
}

/// System-specific rendering: sets as text, and a cylinder of points
/// realizing a witness when the space is a plain clopen space.
struct Hooks<'a, S> {
    render: &'a dyn Fn(&S) -> String,
    point: &'a dyn Fn(&S) -> Option<Value>,
    balls: &'a dyn Fn(usize) -> Result<Partition<S>>,
}

fn clopen_point(system: &dyn EffectiveSystem<Set = ClopenSet>, set: &ClopenSet) -> Option<Value> {
    let space = set.space().clone();
    set.cylinders().into_iter().find_map(|c| {
        let cyl = ClopenSet::cylinder(&space, &c).ok()?;
        system.meets(&cyl).then(|| {
            let word: Vec<&str> = c.word.iter().map(|&a| space.alphabet().symbol(a)).collect();
            json!({"anchor": c.anchor, "word": word.join(" ")})
        })
    })
}

/// Partition given by the query, or built from `u`, `v`, `w` for the
/// named figure queries.
fn partition<Sys, C>(
    system: &Sys,
    ctx: &C,
    hooks: &Hooks<'_, Sys::Set>,
    query: &QueryJson,
    base: &Path,
    cells: &[(&str, Option<&String>)],
    rest: Option<&str>,
) -> Result<Partition<Sys::Set>>
where
    Sys: EffectiveSystem + ?Sized,
    C: SetContext<Set = Sys::Set>,
{
    if let Some(p) = &query.partition {
        return match p.resolve(base)? {
            PartitionSource::Depth(level) => (hooks.balls)(level),
            PartitionSource::Cells(spec) => Ok(spec.build(system, ctx)?),
        };
    }
    let mut named = Vec::new();
    for (name, expr) in cells {
        let expr = expr.ok_or_else(|| {
            anyhow!(
                "this query needs --{} (or a partition)",
                name.to_lowercase()
            )
        })?;
        let set = symdyn::json::parse_set(expr, ctx).with_context(|| format!("cell {name}"))?;
        named.push((name.to_string(), set));
    }
    Ok(match rest {
        Some(r) => Partition::with_rest(system, named, r)?,
        None => Partition::new(system, named)?,
    })
}

/// The balls of `level`, named by their text form.
pub fn balls<Sys: EffectiveSystem + ?Sized>(
    system: &Sys,
    level: usize,
) -> Result<Partition<Sys::Set>> {
    let cells = system
        .balls(level)
        .into_iter()
        .map(|b| (b.to_string(), b))
        .collect();
    Ok(Partition::new(system, cells)?)
}

fn automaton(query: &QueryJson, base: &Path, figure: Option<FigureName>) -> Result<BuiltAutomaton> {
    match (&query.automaton, figure) {
        (Some(a), _) => Ok(a.load(base)?),
        (None, Some(f)) => Ok(BuiltAutomaton::figure(f)),
        (None, None) => bail!("this query needs an automaton"),
    }
}

fn single_set<C: SetContext>(ctx: &C, expr: Option<&String>, flag: &str) -> Result<C::Set> {
    let expr = expr.ok_or_else(|| anyhow!("this query needs --{flag}"))?;
    symdyn::json::parse_set(expr, ctx).with_context(|| format!("set {flag}"))
}

fn execute<Sys, C>(
    system: &Sys,
    ctx: &C,
    query: &QueryJson,
    base: &Path,
    defaults: Defaults,
    hooks: &Hooks<'_, Sys::Set>,
) -> Result<Report>
where
    Sys: EffectiveSystem + ?Sized,
    C: SetContext<Set = Sys::Set>,
{
    let budget = match &query.budget {
        Some(b) => b.build()?,
        None => defaults.budget,
    };
    let strategy = query
        .strategy
        .map(Strategy::from)
        .unwrap_or(defaults.strategy);
    let (u, v, w) = (query.u.as_ref(), query.v.as_ref(), query.w.as_ref());
    let automaton_run =
        |p: Partition<Sys::Set>, aut: BuiltAutomaton| -> Result<(Verdict, Option<Value>)> {
            let verdict = match &aut {
                BuiltAutomaton::Dfa(d) => regular(system, &p, d, &budget, strategy)?,
                BuiltAutomaton::Muller(m) => omega(system, &p, m, &budget, strategy)?,
            };
            // a cylinder of points realizing a finite witness
            let point = match &verdict.evidence {
                Evidence::Witness { word } => {
                    let idx = p.parse_word(word)?;
                    (hooks.point)(&word_in_language(system, &p, &idx).1)
                }
                _ => None,
            };
            Ok((verdict, point))
        };
    let (verdict, point) = match query.query {
        QueryKind::Regular | QueryKind::Omega => {
            let p = partition(system, ctx, hooks, query, base, &[], None)?;
            let aut = automaton(query, base, None)?;
            match (&aut, query.query) {
                (BuiltAutomaton::Dfa(_), QueryKind::Omega) => {
                    bail!("omega queries need a Muller or Büchi automaton")
                }
                (BuiltAutomaton::Muller(_), QueryKind::Regular) => {
                    bail!("regular queries need a finite-word automaton")
                }
                _ => automaton_run(p, aut)?,
            }
        }
        QueryKind::Halting => {
            let p = partition(
                system,
                ctx,
                hooks,
                query,
                base,
                &[("U", u), ("V", v)],
                Some("rest"),
            )?;
            automaton_run(p, automaton(query, base, Some(FigureName::Halting))?)?
        }
        QueryKind::Guarded => {
            let p = partition(
                system,
                ctx,
                hooks,
                query,
                base,
                &[("U", u), ("V", v), ("W", w)],
                Some("T"),
            )?;
            automaton_run(p, automaton(query, base, Some(FigureName::Guarded))?)?
        }
        QueryKind::Invariance => {
            let p = partition(system, ctx, hooks, query, base, &[("U", u)], Some("rest"))?;
            automaton_run(p, automaton(query, base, Some(FigureName::Invariance))?)?
        }
        QueryKind::Basin | QueryKind::Io => {
            let set = single_set(ctx, u, "u")?;
            let result = if query.query == QueryKind::Basin {
                checker::basin(system, &set, &budget)
            } else {
                checker::infinitely_often(system, &set, &budget)
            };
            let verdict = match result {
                FixpointResult::Stable { set, iterations } => Verdict::holds(Evidence::Fixpoint {
                    set: (hooks.render)(&set),
                    iterations,
                }),
                FixpointResult::Unknown { iterations } => Verdict::unknown(
                    &budget,
                    format!("no fixpoint after {iterations} iterations"),
                ),
            };
            (verdict, None)
        }
        QueryKind::Reach => {
            let (su, sv) = (single_set(ctx, u, "u")?, single_set(ctx, v, "v")?);
            let d = checker::decide_reach_shadowing(system, &su, &sv)?;
            let verdict = match (d.steps, d.refuted_at) {
                (Some(steps), _) => Verdict::holds(Evidence::Orbit { steps }),
                (None, Some(level)) => Verdict::fails(Evidence::NoPseudoOrbit { level }),
                (None, None) => unreachable!("a reach decision carries steps or a refuting level"),
            };
            (verdict, None)
        }
        QueryKind::PseudoReach => {
            let (su, sv) = (single_set(ctx, u, "u")?, single_set(ctx, v, "v")?);
            let level = query
                .level
                .unwrap_or_else(|| system.level_of(&su).max(system.level_of(&sv)));
            let verdict = if checker::pseudo_reach(system, &su, &sv, level) {
                Verdict::holds(Evidence::PseudoOrbit { level })
            } else {
                Verdict::fails(Evidence::NoPseudoOrbit { level })
            };
            (verdict, None)
        }
        QueryKind::Equicontinuity => {
            let level = query
                .level
                .ok_or_else(|| anyhow!("equicontinuity needs a level"))?;
            let verdict = match checker::equicontinuity_modulus(system, level, &budget) {
                ModulusResult::Stable {
                    delta_level,
                    rounds,
                    atoms,
                } => Verdict::holds(Evidence::Modulus {
                    delta_level,
                    rounds,
                    atoms,
                }),
                ModulusResult::Unknown { levels } => Verdict::unknown(
                    &budget,
                    format!("refinement still growing; ball levels {levels:?}"),
                ),
            };
            (verdict, None)
        }
    };
    let mut out = serde_json::to_value(&verdict)?;
    out["query"] = serde_json::to_value(query.query)?;
    if let Some(point) = point {
        out["point"] = point;
    }
    Ok(Report {
        outcome: verdict.outcome,
        json: out,
    })
}

fn regular<Sys: EffectiveSystem + ?Sized>(
    system: &Sys,
    p: &Partition<Sys::Set>,
    dfa: &Dfa,
    budget: &Budget,
    strategy: Strategy,
) -> Result<Verdict> {
    Ok(checker::check_regular(system, p, dfa, budget, strategy)?)
}

fn omega<Sys: EffectiveSystem + ?Sized>(
    system: &Sys,
    p: &Partition<Sys::Set>,
    muller: &Muller,
    budget: &Budget,
    strategy: Strategy,
) -> Result<Verdict> {
    Ok(checker::check_omega(system, p, muller, budget, strategy)?)
}

/// Loads the automaton a flag names, for export.
pub fn load_automaton(name: &str, base: &Path) -> Result<BuiltAutomaton> {
    Ok(AutomatonRef::Named(name.to_string()).load(base)?)
}
