//! Decision and semi-decision procedures for model checking trajectories of
//! effective systems against observer automata.

use std::fmt;

use serde::Serialize;

use crate::automata::{omega_emptiness, product_run, Dfa, LabeledGraph, Muller, Nfa};
use crate::clopen::SetAlgebra;
use crate::language::{induced_automaton, materialize, Partition, QueryError};
use crate::system::{Capabilities, EffectiveSystem, SystemError};

/// Largest exact language graph explored before falling back.
const MAX_GRAPH_STATES: usize = 200_000;
/// Largest frontier of the breadth-first witness search.
const MAX_FRONTIER: usize = 1 << 16;
/// Largest set representation a fixpoint iteration may reach before it
/// gives up.
const MAX_SET_SIZE: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown => "unknown",
        })
    }
}

/// What backs a verdict. Words are lists of cell names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// An induced word accepted by the automaton.
    Witness { word: Vec<String> },
    /// An induced ultimately periodic observation accepted by the automaton.
    Lasso {
        stem: Vec<String>,
        cycle: Vec<String>,
    },
    /// The product with an exact presentation of the induced language is empty.
    ExactEmpty {
        method: String,
        level: Option<usize>,
    },
    /// The product with a pseudo-orbit over-approximation at `level` is empty.
    NoPseudoOrbit { level: usize },
    /// A clopen fixpoint computed within the iteration budget.
    Fixpoint { set: String, iterations: usize },
    /// Some orbit goes from the source set to the target in `steps` steps.
    Orbit { steps: usize },
    /// A pseudo-orbit at ball `level` goes from the source set to the target.
    PseudoOrbit { level: usize },
    /// The refinement stabilized: points in a common ball of `delta_level`
    /// stay in common balls of the starting level.
    Modulus {
        delta_level: usize,
        rounds: usize,
        atoms: usize,
    },
    /// Budget exhausted without an answer.
    Budget {
        max_len: usize,
        max_iter: usize,
        max_depth: usize,
        note: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn holds(evidence: Evidence) -> Self {
        Self {
            outcome: Outcome::Holds,
            evidence,
        }
    }

    pub fn fails(evidence: Evidence) -> Self {
        Self {
            outcome: Outcome::Fails,
            evidence,
        }
    }

    pub fn unknown(budget: &Budget, note: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Unknown,
            evidence: Evidence::Budget {
                max_len: budget.max_len,
                max_iter: budget.max_iter,
                max_depth: budget.max_depth,
                note: note.into(),
            },
        }
    }
}

/// Cutoffs for semi-decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Longest witness word tried.
    pub max_len: usize,
    /// Most fixpoint iterations.
    pub max_iter: usize,
    /// Finest ball level for over-approximations.
    pub max_depth: usize,
}

impl Budget {
    pub fn new(max_len: usize, max_iter: usize, max_depth: usize) -> Result<Self, QueryError> {
        if max_len == 0 || max_iter == 0 || max_depth == 0 {
            return Err(QueryError::Invalid("budget values must be positive".into()));
        }
        Ok(Self {
            max_len,
            max_iter,
            max_depth,
        })
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_len: 12,
            max_iter: 64,
            max_depth: 8,
        }
    }
}

/// Which procedure a check may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// The strongest procedure the system's capabilities allow.
    #[default]
    Auto,
    /// Only exact procedures (effectively regular systems or shadowing).
    Exact,
    /// Only witness search, basins and pseudo-orbit refutation.
    SemiDecide,
    /// Only the basin procedure (ω-regular checks).
    Basins,
}

fn names(partition_names: &[String], word: &[usize]) -> Vec<String> {
    word.iter().map(|&a| partition_names[a].clone()).collect()
}

fn check_alphabet(automaton: &[String], partition: &[String]) -> Result<(), QueryError> {
    if automaton != partition {
        return Err(QueryError::Invalid(format!(
            "automaton alphabet {automaton:?} differs from partition cells {partition:?}"
        )));
    }
    Ok(())
}

/// Exact language graph of the system for this partition, when available.
fn exact_graph<Sys>(system: &Sys, partition: &Partition<Sys::Set>) -> Option<LabeledGraph>
where
    Sys: EffectiveSystem + ?Sized,
{
    if !system.capabilities().effectively_regular {
        return None;
    }
    let graph = system.exact_language(partition.cells())?;
    materialize(graph.as_ref(), partition.names(), MAX_GRAPH_STATES)
}

fn graph_nfa(graph: &LabeledGraph) -> Nfa {
    let edges: Vec<(usize, usize, usize)> = graph
        .edges
        .iter()
        .enumerate()
        .flat_map(|(q, row)| row.iter().map(move |&(a, t)| (q, a, t)))
        .collect();
    let finals: Vec<usize> = (0..graph.nodes.len()).collect();
    Nfa::new(
        graph.labels.clone(),
        graph.nodes.clone(),
        &edges,
        graph.initial.clone(),
        &finals,
    )
    .expect("explored graph is valid")
}

/// Shadowing level of the ball graph that presents the induced language
/// exactly, if the system has a modulus.
fn exact_ball_level<Sys>(system: &Sys, partition: &Partition<Sys::Set>) -> Option<usize>
where
    Sys: EffectiveSystem + ?Sized,
{
    let m = system.capabilities().shadowing?;
    Some(m.delta_level(partition.depth(system)))
}

/// Is some finite observation of some orbit accepted by `dfa`?
pub fn check_regular<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    dfa: &Dfa,
    budget: &Budget,
    strategy: Strategy,
) -> Result<Verdict, QueryError>
where
    Sys: EffectiveSystem + ?Sized,
{
    check_alphabet(dfa.alphabet(), partition.names())?;
    let caps = system.capabilities();
    if matches!(strategy, Strategy::Auto | Strategy::Exact) {
        if let Some(graph) = exact_graph(system, partition) {
            let product = product_run(&graph_nfa(&graph), dfa)?;
            return Ok(match product.shortest_word() {
                Some(w) => Verdict::holds(Evidence::Witness {
                    word: names(partition.names(), &w),
                }),
                None => Verdict::fails(Evidence::ExactEmpty {
                    method: "induced language graph".into(),
                    level: None,
                }),
            });
        }
        if let Some(level) = exact_ball_level(system, partition) {
            let aut = induced_automaton(system, partition, level);
            debug_assert!(aut.exact);
            let product = product_run(&aut.nfa, dfa)?;
            return Ok(match product.shortest_word() {
                Some(w) => Verdict::holds(Evidence::Witness {
                    word: names(partition.names(), &w),
                }),
                None => Verdict::fails(Evidence::ExactEmpty {
                    method: "shadowing ball graph".into(),
                    level: Some(aut.level),
                }),
            });
        }
        if strategy == Strategy::Exact {
            return Err(SystemError::Capability(format!(
                "no exact procedure for this system (capabilities {caps:?})"
            ))
            .into());
        }
    }
    semi_decide_regular(system, partition, dfa, budget)
}

/// States of `dfa` from which a final state is reachable.
fn coreachable(dfa: &Dfa) -> Vec<bool> {
    let n = dfa.states().len();
    let mut good: Vec<bool> = (0..n).map(|q| dfa.is_final(q)).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if !good[q] && dfa.delta()[q].iter().any(|&t| good[t]) {
                good[q] = true;
                changed = true;
            }
        }
    }
    good
}

/// Breadth-first witness search interleaved with pseudo-orbit refutation.
fn semi_decide_regular<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    dfa: &Dfa,
    budget: &Budget,
) -> Result<Verdict, QueryError>
where
    Sys: EffectiveSystem + ?Sized,
{
    let useful = coreachable(dfa);
    let base_level = partition.depth(system);
    // `shifted[a]` holds `f^-l(cell a)` for the current length `l`.
    let mut shifted: Vec<Sys::Set> = partition.cells().to_vec();
    let mut frontier: Vec<(Vec<usize>, Sys::Set, usize)> = Vec::new();
    if system.meets(&system.whole()) && useful[dfa.initial()] {
        frontier.push((Vec::new(), system.whole(), dfa.initial()));
    }
    let mut refutation_level = base_level;
    let mut len = 0;
    loop {
        if let Some((w, _, _)) = frontier.iter().find(|(_, _, q)| dfa.is_final(*q)) {
            return Ok(Verdict::holds(Evidence::Witness {
                word: names(partition.names(), w),
            }));
        }
        if frontier.is_empty() {
            return Ok(Verdict::fails(Evidence::ExactEmpty {
                method: "exhausted induced words".into(),
                level: None,
            }));
        }
        if refutation_level <= budget.max_depth {
            let aut = induced_automaton(system, partition, refutation_level);
            if product_run(&aut.nfa, dfa)?.is_empty() {
                return Ok(Verdict::fails(Evidence::NoPseudoOrbit { level: aut.level }));
            }
            refutation_level += 1;
        }
        if len >= budget.max_len {
            break;
        }
        if frontier.len() * partition.len() > MAX_FRONTIER {
            return Ok(Verdict::unknown(
                budget,
                format!("witness frontier exceeded {MAX_FRONTIER} words"),
            ));
        }
        let mut next = Vec::new();
        for (w, set, q) in &frontier {
            for (a, cell) in shifted.iter().enumerate() {
                let q2 = dfa.step(*q, a);
                if !useful[q2] {
                    continue;
                }
                let s = set.intersection(cell);
                if system.meets(&s) {
                    let mut v = w.clone();
                    v.push(a);
                    next.push((v, s, q2));
                }
            }
        }
        frontier = next;
        shifted = shifted.iter().map(|c| system.preimage(c)).collect();
        len += 1;
    }
    // Remaining refutation levels after the word budget is spent.
    while refutation_level <= budget.max_depth {
        let aut = induced_automaton(system, partition, refutation_level);
        if product_run(&aut.nfa, dfa)?.is_empty() {
            return Ok(Verdict::fails(Evidence::NoPseudoOrbit { level: aut.level }));
        }
        refutation_level += 1;
    }
    Ok(Verdict::unknown(
        budget,
        "no witness and no pseudo-orbit refutation within budget",
    ))
}

/// Is the observation of some orbit accepted by the Muller automaton?
pub fn check_omega<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    muller: &Muller,
    budget: &Budget,
    strategy: Strategy,
) -> Result<Verdict, QueryError>
where
    Sys: EffectiveSystem + ?Sized,
{
    check_alphabet(muller.alphabet(), partition.names())?;
    let lasso_verdict =
        |graph: &LabeledGraph, method: &str, level: Option<usize>| -> Result<Verdict, QueryError> {
            Ok(match omega_emptiness(muller, graph)? {
                Some(l) => Verdict::holds(Evidence::Lasso {
                    stem: names(partition.names(), &l.stem),
                    cycle: names(partition.names(), &l.cycle),
                }),
                None => Verdict::fails(Evidence::ExactEmpty {
                    method: method.into(),
                    level,
                }),
            })
        };
    if matches!(strategy, Strategy::Auto | Strategy::Exact) {
        if let Some(graph) = exact_graph(system, partition) {
            return lasso_verdict(&graph, "induced language graph", None);
        }
        if let Some(level) = exact_ball_level(system, partition) {
            let aut = induced_automaton(system, partition, level);
            return lasso_verdict(&aut.nfa.graph(), "shadowing ball graph", Some(aut.level));
        }
        if strategy == Strategy::Exact {
            return Err(
                SystemError::Capability("no exact procedure for this system".into()).into(),
            );
        }
    }
    {
        match muller_via_basins(system, partition, muller, budget)? {
            BasinOutcome::Stable {
                set,
                iterations,
                nonempty,
            } => {
                let evidence = Evidence::Fixpoint { set, iterations };
                return Ok(if nonempty {
                    Verdict::holds(evidence)
                } else {
                    Verdict::fails(evidence)
                });
            }
            BasinOutcome::Unknown { .. } if strategy == Strategy::Basins => {
                return Ok(Verdict::unknown(budget, "basins did not stabilize"));
            }
            BasinOutcome::Unknown { .. } => {}
        }
    }
    // Pseudo-orbit refutation: no accepted path in the ball graph means no
    // accepted orbit.
    for level in partition.depth(system)..=budget.max_depth {
        let aut = induced_automaton(system, partition, level);
        if omega_emptiness(muller, &aut.nfa.graph())?.is_none() {
            return Ok(Verdict::fails(Evidence::NoPseudoOrbit { level: aut.level }));
        }
    }
    Ok(Verdict::unknown(
        budget,
        "basins did not stabilize and pseudo-orbits exist at every level tried",
    ))
}

/// Result of a budgeted clopen fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixpointResult<S> {
    /// The fixpoint, and the number of iterations it took.
    Stable { set: S, iterations: usize },
    /// No stabilization within the iteration budget.
    Unknown { iterations: usize },
}

impl<S> FixpointResult<S> {
    pub fn set(&self) -> Option<&S> {
        match self {
            FixpointResult::Stable { set, .. } => Some(set),
            FixpointResult::Unknown { .. } => None,
        }
    }
}

/// The basin of `v`: points whose orbit enters `v`, as
/// `V_1 = V, V_(m+1) = V ∪ f^-1(V_m)` until `V_(m+1) = V_m` on the space.
pub fn basin<Sys>(system: &Sys, v: &Sys::Set, budget: &Budget) -> FixpointResult<Sys::Set>
where
    Sys: EffectiveSystem + ?Sized,
{
    let mut current = v.clone();
    for m in 1..=budget.max_iter {
        let next = v.union(&system.preimage(&current));
        if !system.meets(&next.difference(&current)) {
            return FixpointResult::Stable {
                set: current,
                iterations: m,
            };
        }
        current = system.simplify(&next);
        if current.size() > MAX_SET_SIZE {
            return FixpointResult::Unknown { iterations: m };
        }
    }
    FixpointResult::Unknown {
        iterations: budget.max_iter,
    }
}

/// Points visiting `v` infinitely often, as the complement of the basin of
/// the complement of the basin of `v`.
pub fn infinitely_often<Sys>(
    system: &Sys,
    v: &Sys::Set,
    budget: &Budget,
) -> FixpointResult<Sys::Set>
where
    Sys: EffectiveSystem + ?Sized,
{
    let FixpointResult::Stable {
        set: b,
        iterations: i1,
    } = basin(system, v, budget)
    else {
        return FixpointResult::Unknown {
            iterations: budget.max_iter,
        };
    };
    match basin(system, &b.complement(), budget) {
        FixpointResult::Stable { set, iterations } => FixpointResult::Stable {
            set: set.complement(),
            iterations: i1 + iterations,
        },
        FixpointResult::Unknown { iterations } => FixpointResult::Unknown {
            iterations: i1 + iterations,
        },
    }
}

/// One set per automaton state: a clopen set of `X x Q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TaggedSet<S> {
    pub parts: Vec<S>,
}

impl<S: SetAlgebra> TaggedSet<S> {
    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(
            self.parts.len(),
            other.parts.len(),
            "tagged sets over different state sets"
        );
        Self {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// `X x {q}` style set: `set` at `q`, empty elsewhere.
    pub fn at(q: usize, set: S, empty: S, states: usize) -> Self {
        let mut parts = vec![empty; states];
        parts[q] = set;
        Self { parts }
    }

    /// Union of the parts, i.e. the projection to `X`.
    pub fn project(&self) -> Option<S> {
        let mut it = self.parts.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, p| acc.union(p)))
    }
}

impl<S: SetAlgebra> SetAlgebra for TaggedSet<S> {
    fn union(&self, other: &Self) -> Self {
        self.zip_with(other, S::union)
    }

    fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, S::intersection)
    }

    fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, S::difference)
    }

    fn complement(&self) -> Self {
        Self {
            parts: self.parts.iter().map(S::complement).collect(),
        }
    }

    fn is_empty(&self) -> bool {
        self.parts.iter().all(S::is_empty)
    }

    fn size(&self) -> usize {
        self.parts.iter().map(S::size).sum()
    }
}

impl<S: fmt::Display> fmt::Display for TaggedSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (q, p) in self.parts.iter().enumerate() {
            let text = p.to_string();
            if text == "∅" {
                continue;
            }
            if !first {
                write!(f, " ∪ ")?;
            }
            first = false;
            write!(f, "{text}×{{q{q}}}")?;
        }
        if first {
            write!(f, "∅")?;
        }
        Ok(())
    }
}

impl<S: fmt::Display> fmt::Debug for TaggedSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TaggedSet({self})")
    }
}

/// Observation system `f_Δ(x, q) = (f(x), Δ(q, cell(x)))`.
pub struct Observed<'a, Sys: EffectiveSystem + ?Sized> {
    system: &'a Sys,
    cells: Vec<Sys::Set>,
    delta: Vec<Vec<usize>>,
}

impl<'a, Sys: EffectiveSystem + ?Sized> Observed<'a, Sys> {
    /// `delta[q][a]` must be total over the partition cells.
    pub fn new(
        system: &'a Sys,
        partition: &Partition<Sys::Set>,
        delta: &[Vec<usize>],
    ) -> Result<Self, QueryError> {
        let n = delta.len();
        if n == 0
            || delta
                .iter()
                .any(|row| row.len() != partition.len() || row.iter().any(|&t| t >= n))
        {
            return Err(
                SystemError::Spec("observation transition table is not total".into()).into(),
            );
        }
        Ok(Self {
            system,
            cells: partition.cells().to_vec(),
            delta: delta.to_vec(),
        })
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    /// `set x {q}`.
    pub fn at(&self, q: usize, set: Sys::Set) -> TaggedSet<Sys::Set> {
        TaggedSet::at(q, set, self.system.empty(), self.states())
    }
}

impl<Sys: EffectiveSystem + ?Sized> EffectiveSystem for Observed<'_, Sys> {
    type Set = TaggedSet<Sys::Set>;

    fn whole(&self) -> Self::Set {
        TaggedSet {
            parts: vec![self.system.whole(); self.states()],
        }
    }

    fn empty(&self) -> Self::Set {
        TaggedSet {
            parts: vec![self.system.empty(); self.states()],
        }
    }

    fn meets(&self, set: &Self::Set) -> bool {
        set.parts.iter().any(|p| self.system.meets(p))
    }

    fn preimage(&self, set: &Self::Set) -> Self::Set {
        let pre: Vec<Sys::Set> = set.parts.iter().map(|p| self.system.preimage(p)).collect();
        let parts = self
            .delta
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold(self.system.empty(), |acc, (a, &q2)| {
                        acc.union(&pre[q2].intersection(&self.cells[a]))
                    })
            })
            .collect();
        TaggedSet { parts }
    }

    fn balls(&self, level: usize) -> Vec<Self::Set> {
        let base = self.system.balls(level);
        (0..self.states())
            .flat_map(|q| base.iter().map(move |b| self.at(q, b.clone())))
            .collect()
    }

    fn level_of(&self, set: &Self::Set) -> usize {
        set.parts
            .iter()
            .map(|p| self.system.level_of(p))
            .max()
            .unwrap_or(0)
    }

    fn validate(&self, set: &Self::Set) -> Result<(), SystemError> {
        if set.parts.len() != self.states() {
            return Err(SystemError::Spec(
                "tagged set over a different state set".into(),
            ));
        }
        set.parts.iter().try_for_each(|p| self.system.validate(p))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::default()
    }

    fn simplify(&self, set: &Self::Set) -> Self::Set {
        TaggedSet {
            parts: set.parts.iter().map(|p| self.system.simplify(p)).collect(),
        }
    }

    fn describe(&self) -> String {
        format!(
            "observation of {} by {} states",
            self.system.describe(),
            self.states()
        )
    }
}

enum BasinOutcome {
    Stable {
        set: String,
        iterations: usize,
        nonempty: bool,
    },
    Unknown {},
}

/// Muller acceptance through infinitely-often sets of the observation
/// system: an orbit is accepted iff its start lies in
/// `X x {q0} ∩ ⋂_(q ∈ S) IO_q ∩ ⋂_(q ∉ S) ¬IO_q` for some `S` in the family.
fn muller_via_basins<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    muller: &Muller,
    budget: &Budget,
) -> Result<BasinOutcome, QueryError>
where
    Sys: EffectiveSystem + ?Sized,
{
    let obs = Observed::new(system, partition, muller.delta())?;
    let mut io = Vec::with_capacity(obs.states());
    let mut iterations = 0;
    for q in 0..obs.states() {
        match infinitely_often(&obs, &obs.at(q, system.whole()), budget) {
            FixpointResult::Stable { set, iterations: i } => {
                iterations += i;
                io.push(set);
            }
            FixpointResult::Unknown { .. } => return Ok(BasinOutcome::Unknown {}),
        }
    }
    let start = obs.at(muller.initial(), system.whole());
    let mut accepted = obs.empty();
    for set in muller.family() {
        let mut s = start.clone();
        for (q, io_q) in io.iter().enumerate() {
            s = if set.contains(&q) {
                s.intersection(io_q)
            } else {
                s.difference(io_q)
            };
        }
        accepted = accepted.union(&s);
    }
    let accepted = obs.simplify(&accepted);
    let nonempty = obs.meets(&accepted);
    Ok(BasinOutcome::Stable {
        set: accepted.to_string(),
        iterations,
        nonempty,
    })
}

/// Whether a `2^-n`-pseudo-orbit leads from `u` to `v`.
///
/// Computes the points from which such a pseudo-orbit reaches `v`:
/// `W_0 = V`, `W_(t+1) = W_t ∪ f^-1(dilate(W_t))`, where `dilate` takes the
/// level-`n` balls meeting a set on the space. A `false` answer refutes true
/// reachability.
pub fn pseudo_reach<Sys>(system: &Sys, u: &Sys::Set, v: &Sys::Set, n: usize) -> bool
where
    Sys: EffectiveSystem + ?Sized,
{
    let balls: Vec<Sys::Set> = system
        .balls(n)
        .into_iter()
        .filter(|b| system.meets(b))
        .collect();
    let dilate = |w: &Sys::Set| -> (Vec<bool>, Sys::Set) {
        let mask: Vec<bool> = balls
            .iter()
            .map(|b| system.meets(&b.intersection(w)))
            .collect();
        let set = balls
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .fold(system.empty(), |acc, (b, _)| acc.union(b));
        (mask, set)
    };
    let mut w = v.clone();
    let (mut mask, mut dilated) = dilate(&w);
    loop {
        w = system.simplify(&w.union(&system.preimage(&dilated)));
        let (m2, d2) = dilate(&w);
        if m2 == mask {
            break;
        }
        mask = m2;
        dilated = d2;
    }
    system.meets(&u.intersection(&w))
}

/// Outcome of the shadowing-based reachability decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachDecision {
    pub reachable: bool,
    /// Number of steps of a real orbit from `u` to `v`, when reachable.
    pub steps: Option<usize>,
    /// Ball level at which pseudo-orbits were ruled out, when unreachable.
    pub refuted_at: Option<usize>,
    pub rounds: usize,
}

/// Decides whether some orbit goes from `u` to `v` (in zero or more steps)
/// for a system with the shadowing property.
///
/// Alternates a witness search over step counts with pseudo-orbit
/// refutation one ball level finer per round. Once the level reaches the
/// shadowing modulus of the sets' level, pseudo-orbits are shadowed by
/// orbits, so the remaining witness search is guaranteed to succeed.
pub fn decide_reach_shadowing<Sys>(
    system: &Sys,
    u: &Sys::Set,
    v: &Sys::Set,
) -> Result<ReachDecision, QueryError>
where
    Sys: EffectiveSystem + ?Sized,
{
    let modulus = system
        .capabilities()
        .shadowing
        .ok_or_else(|| SystemError::Capability("the system has no shadowing modulus".into()))?;
    let eps = system.level_of(u).max(system.level_of(v));
    let delta = modulus.delta_level(eps);
    let mut target = v.clone();
    let mut level = eps;
    let mut shadowed = false;
    for round in 0.. {
        if system.meets(&u.intersection(&target)) {
            return Ok(ReachDecision {
                reachable: true,
                steps: Some(round),
                refuted_at: None,
                rounds: round + 1,
            });
        }
        if !shadowed {
            if !pseudo_reach(system, u, v, level) {
                return Ok(ReachDecision {
                    reachable: false,
                    steps: None,
                    refuted_at: Some(level),
                    rounds: round + 1,
                });
            }
            if level >= delta {
                shadowed = true;
            } else {
                level += 1;
            }
        }
        target = system.preimage(&target);
    }
    unreachable!("the round loop only exits by returning")
}

/// Result of the equicontinuity refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModulusResult {
    /// The refinement stabilized after `rounds`; its atoms are unions of
    /// balls of `delta_level`.
    Stable {
        delta_level: usize,
        rounds: usize,
        atoms: usize,
    },
    /// No stabilization within the budget; ball level of the partition
    /// after each round.
    Unknown { levels: Vec<usize> },
}

/// Refines the `eps_level` ball partition by `B_(n+1) = B_n ∨ f^-1(B_n)`
/// until it stops growing.
pub fn equicontinuity_modulus<Sys>(system: &Sys, eps_level: usize, budget: &Budget) -> ModulusResult
where
    Sys: EffectiveSystem + ?Sized,
{
    let initial: Vec<Sys::Set> = system
        .balls(eps_level)
        .into_iter()
        .filter(|b| system.meets(b))
        .collect();
    let mut atoms = initial.clone();
    // `B_n ∨ f^-1(B_n)` is `B_n ∨ f^-(n+1)(B_0)`; keep the latter layer.
    let mut layer = initial;
    let level = |atoms: &[Sys::Set]| atoms.iter().map(|a| system.level_of(a)).max().unwrap_or(0);
    let mut levels = vec![level(&atoms)];
    for round in 1..=budget.max_iter {
        layer = layer
            .iter()
            .map(|c| system.preimage(c))
            .filter(|c| system.meets(c))
            .collect();
        let layer_size: usize = layer.iter().map(SetAlgebra::size).sum();
        if atoms.len().saturating_mul(layer_size) > MAX_FRONTIER * 16 {
            return ModulusResult::Unknown { levels };
        }
        let mut next = Vec::with_capacity(atoms.len());
        for a in &atoms {
            for c in &layer {
                let s = a.intersection(c);
                if system.meets(&s) {
                    next.push(s);
                }
            }
        }
        if next.len() == atoms.len() {
            return ModulusResult::Stable {
                delta_level: level(&atoms),
                rounds: round,
                atoms: atoms.len(),
            };
        }
        atoms = next;
        levels.push(level(&atoms));
    }
    ModulusResult::Unknown { levels }
}
