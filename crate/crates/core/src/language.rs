//! Clopen partitions and the subshifts they induce: word membership,
//! bounded enumeration, and ball-graph automata of induced languages.

use std::collections::{HashMap, VecDeque};

use log::warn;
use thiserror::Error;

use crate::automata::{AutomatonError, LabeledGraph, Nfa};
use crate::clopen::{balls, ClopenError, ClopenSet, Resolution, SetAlgebra, SpaceSpec};
use crate::system::{EffectiveSystem, SystemError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown cell {0:?}")]
    UnknownCell(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid query: {0}")]
    Invalid(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Clopen(#[from] ClopenError),
}

/// Named clopen cells, pairwise disjoint on the system's space and covering it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition<S> {
    names: Vec<String>,
    cells: Vec<S>,
}

impl<S: SetAlgebra> Partition<S> {
    pub fn new<Sys>(system: &Sys, cells: Vec<(String, S)>) -> Result<Self, QueryError>
    where
        Sys: EffectiveSystem<Set = S> + ?Sized,
    {
        if cells.is_empty() {
            return Err(QueryError::Partition(
                "a partition needs at least one cell".into(),
            ));
        }
        let (names, cells): (Vec<String>, Vec<S>) = cells.into_iter().unzip();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(QueryError::Partition(format!("duplicate cell name {n:?}")));
            }
        }
        for c in &cells {
            system.validate(c)?;
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if system.meets(&cells[i].intersection(&cells[j])) {
                    return Err(QueryError::Partition(format!(
                        "cells {:?} and {:?} overlap",
                        names[i], names[j]
                    )));
                }
            }
        }
        let union = cells.iter().fold(system.empty(), |acc, c| acc.union(c));
        if system.meets(&union.complement()) {
            return Err(QueryError::Partition("cells do not cover the space".into()));
        }
        Ok(Self { names, cells })
    }

    /// Named cells completed by the complement of their union, under `rest`.
    pub fn with_rest<Sys>(
        system: &Sys,
        cells: Vec<(String, S)>,
        rest: &str,
    ) -> Result<Self, QueryError>
    where
        Sys: EffectiveSystem<Set = S> + ?Sized,
    {
        let union = cells.iter().fold(system.empty(), |acc, c| acc.union(&c.1));
        let mut all = cells;
        all.push((rest.to_string(), union.complement()));
        Self::new(system, all)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cells(&self) -> &[S] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &S {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse_word<T: AsRef<str>>(&self, names: &[T]) -> Result<Vec<usize>, QueryError> {
        names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| QueryError::UnknownCell(n.as_ref().to_string()))
            })
            .collect()
    }

    pub fn render(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Finest ball level any cell needs.
    pub fn depth<Sys>(&self, system: &Sys) -> usize
    where
        Sys: EffectiveSystem<Set = S> + ?Sized,
    {
        self.cells
            .iter()
            .map(|c| system.level_of(c))
            .max()
            .unwrap_or(0)
    }
}

/// Partition of `space` into its balls of the given level, each named by
/// its word (prefixed by its tag in tagged spaces).
pub fn ball_partition(space: &std::sync::Arc<SpaceSpec>, level: usize) -> Partition<ClopenSet> {
    let cells = balls(space, Resolution::Depth(level));
    let names = cells
        .iter()
        .map(|c| {
            let tag = (0..space.tag_count())
                .find(|&t| !c.words(t).is_empty())
                .unwrap_or(0);
            let word = space
                .alphabet()
                .render(c.words(tag).first().map_or(&[][..], |w| w));
            let word = if word.is_empty() {
                "X".to_string()
            } else {
                word
            };
            match space.tags() {
                Some(tags) => format!("{}:{word}", tags[tag]),
                None => word,
            }
        })
        .collect();
    Partition { names, cells }
}

/// State of a lazily explored language graph.
pub type GraphState = Vec<u32>;

/// Exact presentation of an induced language: its words are the label
/// sequences of finite paths from the initial states, and every state has a
/// successor.
pub trait LanguageGraph {
    fn initial(&self) -> Vec<GraphState>;

    /// Outgoing edges, each labeled by the cell of the current point.
    fn successors(&self, state: &GraphState) -> Vec<(usize, GraphState)>;
}

/// Explores a language graph into an explicit one; `None` when more than
/// `max_states` states are reachable.
pub fn materialize(
    graph: &dyn LanguageGraph,
    labels: &[String],
    max_states: usize,
) -> Option<LabeledGraph> {
    let mut index: HashMap<GraphState, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for s in graph.initial() {
        let next = nodes.len();
        let id = *index.entry(s.clone()).or_insert(next);
        if id == next {
            nodes.push(s.clone());
            queue.push_back(id);
            initial.push(id);
        }
    }
    let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
    while let Some(id) = queue.pop_front() {
        if nodes.len() > max_states {
            return None;
        }
        let mut row = Vec::new();
        for (label, t) in graph.successors(&nodes[id]) {
            let next = nodes.len();
            let tid = *index.entry(t.clone()).or_insert(next);
            if tid == next {
                nodes.push(t);
                queue.push_back(tid);
            }
            row.push((label, tid));
        }
        if edges.len() <= id {
            edges.resize(id + 1, Vec::new());
        }
        edges[id] = row;
    }
    edges.resize(nodes.len(), Vec::new());
    Some(LabeledGraph {
        labels: labels.to_vec(),
        nodes: nodes.iter().map(|s| format!("{s:?}")).collect(),
        edges,
        initial,
    })
}

/// Decides whether `word` is induced by some orbit: the set
/// `a_0 ∩ f^-1(a_1) ∩ ... ∩ f^-(l-1)(a_(l-1))` meets the space. Returns the
/// decision together with that set.
pub fn word_in_language<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    word: &[usize],
) -> (bool, Sys::Set)
where
    Sys: EffectiveSystem + ?Sized,
{
    let mut set = system.whole();
    for &a in word.iter().rev() {
        set = partition.cell(a).intersection(&system.preimage(&set));
    }
    (system.meets(&set), set)
}

/// All induced words of length at most `max_len`, shortest first and
/// lexicographic by cell order within a length (the empty word included).
pub fn enumerate_language<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    max_len: usize,
) -> Vec<Vec<usize>>
where
    Sys: EffectiveSystem + ?Sized,
{
    let mut out = Vec::new();
    if !system.meets(&system.whole()) {
        return out;
    }
    out.push(Vec::new());
    // Induced languages are suffix closed: extend at the front, keeping the
    // set of points realizing each word.
    let mut layer: Vec<(Vec<usize>, Sys::Set)> = vec![(Vec::new(), system.whole())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, set) in &layer {
            let pre = system.preimage(set);
            for a in 0..partition.len() {
                let s = partition.cell(a).intersection(&pre);
                if system.meets(&s) {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(a);
                    v.extend_from_slice(w);
                    next.push((v, s));
                }
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(next.iter().map(|(w, _)| w.clone()));
        layer = next;
    }
    out
}

/// Ball-graph automaton of an induced language.
#[derive(Debug, Clone)]
pub struct InducedAutomaton<S> {
    /// State 0 is the start; state `i + 1` is `balls[i]`. Every state is final.
    pub nfa: Nfa,
    /// The language equals the induced language (not just contains it).
    pub exact: bool,
    pub level: usize,
    pub balls: Vec<S>,
}

/// Automaton whose states are the level-`n` balls meeting the space, with an
/// edge `B -> B'` when `B ∩ f^-1(B')` meets the space, labeled by the cell
/// of `B'`. It accepts every induced word (pseudo-orbits include orbits) and
/// is exact when the shadowing modulus allows.
pub fn induced_automaton<Sys>(
    system: &Sys,
    partition: &Partition<Sys::Set>,
    n: usize,
) -> InducedAutomaton<Sys::Set>
where
    Sys: EffectiveSystem + ?Sized,
{
    let cell_level = partition.depth(system);
    let level = n.max(cell_level);
    for (name, cell) in partition.names().iter().zip(partition.cells()) {
        if !system.meets(cell) {
            warn!("cell {name:?} does not meet the space and is dropped");
        }
    }
    let balls: Vec<Sys::Set> = system
        .balls(level)
        .into_iter()
        .filter(|b| system.meets(b))
        .collect();
    let labels: Vec<usize> = balls
        .iter()
        .map(|b| {
            partition
                .cells()
                .iter()
                .position(|c| b.is_subset(c))
                .expect("balls at the partition level refine it")
        })
        .collect();
    let mut edges = Vec::new();
    for (j, &label) in labels.iter().enumerate() {
        edges.push((0, label, j + 1));
    }
    for (j, b) in balls.iter().enumerate() {
        let pre = system.preimage(b);
        for (i, a) in balls.iter().enumerate() {
            if system.meets(&a.intersection(&pre)) {
                edges.push((i + 1, labels[j], j + 1));
            }
        }
    }
    let mut names = vec!["start".to_string()];
    names.extend(balls.iter().map(|b| b.to_string()));
    let finals: Vec<usize> = (0..names.len()).collect();
    let nfa = Nfa::new(partition.names().to_vec(), names, &edges, vec![0], &finals)
        .expect("ball graph is valid");
    let exact = system
        .capabilities()
        .shadowing
        .is_some_and(|m| level >= m.delta_level(cell_level));
    InducedAutomaton {
        nfa,
        exact,
        level,
        balls,
    }
}
