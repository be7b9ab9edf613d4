//! Observer automata over partition cells: finite automata, Muller and Büchi
//! automata, products, emptiness with shortest witnesses, and ω-emptiness
//! against finite labeled graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("alphabet mismatch: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
}

fn check_names(kind: &str, names: &[String]) -> Result<(), AutomatonError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(AutomatonError::Invalid(format!("duplicate {kind} {n:?}")));
        }
    }
    Ok(())
}

/// Deterministic complete finite automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<String>,
    states: Vec<String>,
    /// `delta[q][a]`.
    delta: Vec<Vec<usize>>,
    initial: usize,
    finals: Vec<bool>,
}

impl Dfa {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        delta: Vec<Vec<usize>>,
        initial: usize,
        finals: &[usize],
    ) -> Result<Self, AutomatonError> {
        check_names("symbol", &alphabet)?;
        check_names("state", &states)?;
        let n = states.len();
        if delta.len() != n || delta.iter().any(|row| row.len() != alphabet.len()) {
            return Err(AutomatonError::Invalid(
                "transition table is not total".into(),
            ));
        }
        if initial >= n || finals.iter().any(|&f| f >= n) || delta.iter().flatten().any(|&t| t >= n)
        {
            return Err(AutomatonError::Invalid("state index out of range".into()));
        }
        let mut fin = vec![false; n];
        for &f in finals {
            fin[f] = true;
        }
        Ok(Self {
            alphabet,
            states,
            delta,
            initial,
            finals: fin,
        })
    }

    /// Builds from named edges; missing transitions are an error.
    pub fn from_edges(
        alphabet: Vec<String>,
        states: Vec<String>,
        edges: &[(usize, usize, usize)],
        initial: usize,
        finals: &[usize],
    ) -> Result<Self, AutomatonError> {
        let mut delta = vec![vec![usize::MAX; alphabet.len()]; states.len()];
        for &(from, a, to) in edges {
            let slot = delta
                .get_mut(from)
                .and_then(|r| r.get_mut(a))
                .ok_or_else(|| {
                    AutomatonError::Invalid(format!("edge ({from}, {a}, {to}) out of range"))
                })?;
            if *slot != usize::MAX && *slot != to {
                return Err(AutomatonError::Invalid(format!(
                    "nondeterministic edge from state {from}"
                )));
            }
            *slot = to;
        }
        if delta.iter().flatten().any(|&t| t == usize::MAX) {
            return Err(AutomatonError::Invalid(
                "transition table is not total".into(),
            ));
        }
        Self::new(alphabet, states, delta, initial, finals)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.finals[q]).collect()
    }

    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q][a]
    }

    pub fn delta(&self) -> &[Vec<usize>] {
        &self.delta
    }

    pub fn run(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |q, &a| self.delta[q][a])
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.finals[self.run(word)]
    }

    pub fn complement(&self) -> Self {
        let mut c = self.clone();
        c.finals.iter_mut().for_each(|f| *f = !*f);
        c
    }

    /// The automaton accepting every word.
    pub fn universal(alphabet: Vec<String>) -> Self {
        let k = alphabet.len();
        Self::new(alphabet, vec!["q".into()], vec![vec![0; k]], 0, &[0]).expect("valid")
    }

    pub fn to_nfa(&self) -> Nfa {
        let edges = self
            .delta
            .iter()
            .map(|row| row.iter().enumerate().map(|(a, &t)| (a, t)).collect())
            .collect();
        Nfa {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            edges,
            initial: vec![self.initial],
            finals: self.finals.clone(),
        }
    }

    /// States from which some final state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let mut live = self.finals.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..self.states.len() {
                if !live[q] && self.delta[q].iter().any(|&t| live[t]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        live
    }

    /// DOT rendering without dead states (the initial state is always kept).
    pub fn to_dot(&self, name: &str) -> String {
        let mut keep = self.live_states();
        keep[self.initial] = true;
        let index: Vec<Option<usize>> = keep
            .iter()
            .scan(0, |next, &k| {
                let i = k.then_some(*next);
                *next += usize::from(k);
                Some(i)
            })
            .collect();
        let states = (0..self.states.len())
            .filter(|&q| keep[q])
            .map(|q| self.states[q].clone())
            .collect();
        let mut edges = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                if let (Some(i), Some(j)) = (index[q], index[t]) {
                    edges.push((i, a, j));
                }
            }
        }
        let finals: Vec<usize> = self.finals().into_iter().filter_map(|q| index[q]).collect();
        let initial = index[self.initial].expect("initial state kept");
        Nfa::new(
            self.alphabet.clone(),
            states,
            &edges,
            vec![initial],
            &finals,
        )
        .expect("restriction of a valid automaton")
        .to_dot(name)
    }
}

/// Nondeterministic finite automaton with labeled edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    states: Vec<String>,
    /// `edges[q]` lists `(symbol, target)`.
    edges: Vec<Vec<(usize, usize)>>,
    initial: Vec<usize>,
    finals: Vec<bool>,
}

impl Nfa {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        edges: &[(usize, usize, usize)],
        initial: Vec<usize>,
        finals: &[usize],
    ) -> Result<Self, AutomatonError> {
        check_names("symbol", &alphabet)?;
        let n = states.len();
        let mut adj = vec![Vec::new(); n];
        for &(from, a, to) in edges {
            if from >= n || to >= n || a >= alphabet.len() {
                return Err(AutomatonError::Invalid(format!(
                    "edge ({from}, {a}, {to}) out of range"
                )));
            }
            adj[from].push((a, to));
        }
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        if initial.iter().chain(finals).any(|&q| q >= n) {
            return Err(AutomatonError::Invalid("state index out of range".into()));
        }
        let mut fin = vec![false; n];
        for &f in finals {
            fin[f] = true;
        }
        Ok(Self {
            alphabet,
            states,
            edges: adj,
            initial,
            finals: fin,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn edges(&self, q: usize) -> &[(usize, usize)] {
        &self.edges[q]
    }

    pub fn edge_list(&self) -> Vec<(usize, usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(q, row)| row.iter().map(move |&(a, t)| (q, a, t)))
            .collect()
    }

    fn step_set(&self, from: &BTreeSet<usize>, a: usize) -> BTreeSet<usize> {
        from.iter()
            .flat_map(|&q| self.edges[q].iter())
            .filter(|e| e.0 == a)
            .map(|e| e.1)
            .collect()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for &a in word {
            cur = self.step_set(&cur, a);
        }
        cur.iter().any(|&q| self.finals[q])
    }

    /// Subset construction, restricted to reachable subsets.
    pub fn determinize(&self) -> Dfa {
        let start: BTreeSet<usize> = self.initial.iter().copied().collect();
        let mut index = BTreeMap::from([(start.clone(), 0usize)]);
        let mut subsets = vec![start];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let mut row = Vec::with_capacity(self.alphabet.len());
            for a in 0..self.alphabet.len() {
                let next = self.step_set(&subsets[i], a);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    subsets.len() - 1
                });
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let names = subsets
            .iter()
            .map(|s| {
                format!(
                    "{{{}}}",
                    s.iter()
                        .map(|&q| self.states[q].as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        let finals: Vec<usize> = (0..subsets.len())
            .filter(|&i| subsets[i].iter().any(|&q| self.finals[q]))
            .collect();
        Dfa::new(self.alphabet.clone(), names, delta, 0, &finals)
            .expect("subset construction is valid")
    }

    /// Shortest accepted word (breadth first), or `None` when the language
    /// is empty.
    pub fn shortest_word(&self) -> Option<Vec<usize>> {
        let n = self.states.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &q in &self.initial {
            if !seen[q] {
                seen[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            if self.finals[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for &(a, t) in &self.edges[q] {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_word().is_none()
    }

    /// The graph underlying the automaton (finals ignored).
    pub fn graph(&self) -> LabeledGraph {
        LabeledGraph {
            labels: self.alphabet.clone(),
            nodes: self.states.clone(),
            edges: self.edges.clone(),
            initial: self.initial.clone(),
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", dot_id(name)).unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        for (q, s) in self.states.iter().enumerate() {
            let shape = if self.finals[q] {
                "doublecircle"
            } else {
                "circle"
            };
            writeln!(out, "  n{q} [label={}, shape={shape}];", dot_id(s)).unwrap();
        }
        for &q in &self.initial {
            writeln!(out, "  start{q} [shape=point];").unwrap();
            writeln!(out, "  start{q} -> n{q};").unwrap();
        }
        write_grouped_edges(&mut out, &self.alphabet, &self.edges);
        out.push_str("}\n");
        out
    }
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One DOT edge per (source, target) pair with the symbols joined.
fn write_grouped_edges(out: &mut String, alphabet: &[String], edges: &[Vec<(usize, usize)>]) {
    for (q, row) in edges.iter().enumerate() {
        let mut by_target: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for &(a, t) in row {
            by_target.entry(t).or_default().push(&alphabet[a]);
        }
        for (t, syms) in by_target {
            writeln!(out, "  n{q} -> n{t} [label={}];", dot_id(&syms.join(","))).unwrap();
        }
    }
}

/// Intersection of two automata over the same alphabet.
pub fn product_run(nfa: &Nfa, dfa: &Dfa) -> Result<Nfa, AutomatonError> {
    if nfa.alphabet != dfa.alphabet {
        return Err(AutomatonError::AlphabetMismatch(
            nfa.alphabet.clone(),
            dfa.alphabet.clone(),
        ));
    }
    let nd = dfa.states.len();
    let id = |p: usize, q: usize| p * nd + q;
    let mut states = Vec::with_capacity(nfa.states.len() * nd);
    for p in &nfa.states {
        for q in &dfa.states {
            states.push(format!("({p},{q})"));
        }
    }
    let mut edges = Vec::new();
    for (p, row) in nfa.edges.iter().enumerate() {
        for q in 0..nd {
            for &(a, t) in row {
                edges.push((id(p, q), a, id(t, dfa.delta[q][a])));
            }
        }
    }
    let initial = nfa.initial.iter().map(|&p| id(p, dfa.initial)).collect();
    let finals: Vec<usize> = (0..nfa.states.len())
        .flat_map(|p| (0..nd).map(move |q| (p, q)))
        .filter(|&(p, q)| nfa.finals[p] && dfa.finals[q])
        .map(|(p, q)| id(p, q))
        .collect();
    Nfa::new(nfa.alphabet.clone(), states, &edges, initial, &finals)
}

/// Emptiness of a finite automaton, with a shortest witness when nonempty.
pub fn emptiness(nfa: &Nfa) -> Option<Vec<usize>> {
    nfa.shortest_word()
}

/// Finite graph with labeled edges, read from its initial nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub labels: Vec<String>,
    pub nodes: Vec<String>,
    /// `edges[n]` lists `(label, target)`.
    pub edges: Vec<Vec<(usize, usize)>>,
    pub initial: Vec<usize>,
}

impl LabeledGraph {
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", dot_id(name)).unwrap();
        for (q, s) in self.nodes.iter().enumerate() {
            writeln!(out, "  n{q} [label={}];", dot_id(s)).unwrap();
        }
        write_grouped_edges(&mut out, &self.labels, &self.edges);
        out.push_str("}\n");
        out
    }
}

/// Deterministic Muller automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Muller {
    alphabet: Vec<String>,
    states: Vec<String>,
    delta: Vec<Vec<usize>>,
    initial: usize,
    family: Vec<BTreeSet<usize>>,
}

impl Muller {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        delta: Vec<Vec<usize>>,
        initial: usize,
        family: Vec<BTreeSet<usize>>,
    ) -> Result<Self, AutomatonError> {
        let dfa = Dfa::new(alphabet, states, delta, initial, &[])?;
        if family.iter().any(BTreeSet::is_empty) {
            return Err(AutomatonError::Invalid(
                "acceptance sets must be nonempty".into(),
            ));
        }
        if family.iter().flatten().any(|&q| q >= dfa.states.len()) {
            return Err(AutomatonError::Invalid(
                "acceptance set refers to an unknown state".into(),
            ));
        }
        let mut family = family;
        family.sort();
        family.dedup();
        Ok(Self {
            alphabet: dfa.alphabet,
            states: dfa.states,
            delta: dfa.delta,
            initial,
            family,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn family(&self) -> &[BTreeSet<usize>] {
        &self.family
    }

    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q][a]
    }

    pub fn delta(&self) -> &[Vec<usize>] {
        &self.delta
    }

    /// Set of states visited infinitely often on `stem cycle^ω`.
    pub fn inf_set(&self, stem: &[usize], cycle: &[usize]) -> BTreeSet<usize> {
        assert!(
            !cycle.is_empty(),
            "an ultimately periodic word needs a nonempty cycle"
        );
        let mut q = stem.iter().fold(self.initial, |q, &a| self.delta[q][a]);
        // Iterate the cycle until the state at its start repeats.
        let mut starts = HashMap::new();
        let mut visits = Vec::new();
        loop {
            if let Some(&first) = starts.get(&q) {
                return visits[first..].iter().flatten().copied().collect();
            }
            starts.insert(q, visits.len());
            let mut seen = Vec::with_capacity(cycle.len());
            for &a in cycle {
                q = self.delta[q][a];
                seen.push(q);
            }
            visits.push(seen);
        }
    }

    pub fn accepts_lasso(&self, stem: &[usize], cycle: &[usize]) -> bool {
        let inf = self.inf_set(stem, cycle);
        self.family.contains(&inf)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let edges: Vec<Vec<(usize, usize)>> = self
            .delta
            .iter()
            .map(|row| row.iter().copied().enumerate().collect())
            .collect();
        let mut out = String::new();
        writeln!(out, "digraph {} {{", dot_id(name)).unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        let fam: Vec<String> = self
            .family
            .iter()
            .map(|s| {
                format!(
                    "{{{}}}",
                    s.iter()
                        .map(|&q| self.states[q].as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        writeln!(
            out,
            "  label={};",
            dot_id(&format!("F = {{{}}}", fam.join(", ")))
        )
        .unwrap();
        for (q, s) in self.states.iter().enumerate() {
            writeln!(out, "  n{q} [label={}, shape=circle];", dot_id(s)).unwrap();
        }
        writeln!(out, "  start [shape=point];\n  start -> n{};", self.initial).unwrap();
        write_grouped_edges(&mut out, &self.alphabet, &edges);
        out.push_str("}\n");
        out
    }
}

/// Nondeterministic Büchi automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buchi {
    nfa: Nfa,
}

impl Buchi {
    pub fn new(nfa: Nfa) -> Self {
        Self { nfa }
    }

    pub fn automaton(&self) -> &Nfa {
        &self.nfa
    }

    /// Muller form of a deterministic, complete Büchi automaton: the
    /// accepted inf-sets are the state sets meeting the final states.
    pub fn to_muller(&self) -> Result<Muller, AutomatonError> {
        let n = &self.nfa;
        if n.initial.len() != 1 {
            return Err(AutomatonError::Invalid(
                "only deterministic Büchi automata convert to Muller form".into(),
            ));
        }
        let mut delta = vec![vec![usize::MAX; n.alphabet.len()]; n.states.len()];
        for (q, row) in n.edges.iter().enumerate() {
            for &(a, t) in row {
                if delta[q][a] != usize::MAX {
                    return Err(AutomatonError::Invalid(
                        "only deterministic Büchi automata convert to Muller form".into(),
                    ));
                }
                delta[q][a] = t;
            }
        }
        if delta.iter().flatten().any(|&t| t == usize::MAX) {
            return Err(AutomatonError::Invalid(
                "Büchi transition table is not total".into(),
            ));
        }
        let count = n.states.len();
        if count > 16 {
            return Err(AutomatonError::Invalid(
                "Muller conversion is limited to 16 states".into(),
            ));
        }
        let family = (1u32..1 << count)
            .map(|mask| {
                (0..count)
                    .filter(|&q| mask >> q & 1 == 1)
                    .collect::<BTreeSet<_>>()
            })
            .filter(|s| s.iter().any(|&q| n.finals[q]))
            .collect();
        Muller::new(
            n.alphabet.clone(),
            n.states.clone(),
            delta,
            n.initial[0],
            family,
        )
    }
}

/// An ultimately periodic run: labels and graph nodes of a stem and a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
    pub stem_nodes: Vec<usize>,
    pub cycle_nodes: Vec<usize>,
}

/// Product of a graph with a deterministic transition table.
struct ProductGraph {
    /// Product state -> (graph node, automaton state).
    pairs: Vec<(usize, usize)>,
    edges: Vec<Vec<(usize, usize)>>,
    initial: Vec<usize>,
}

fn deterministic_product(graph: &LabeledGraph, delta: &[Vec<usize>], q0: usize) -> ProductGraph {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &n in &graph.initial {
        let id = *index.entry((n, q0)).or_insert_with(|| {
            pairs.push((n, q0));
            queue.push_back(pairs.len() - 1);
            pairs.len() - 1
        });
        if !initial.contains(&id) {
            initial.push(id);
        }
    }
    let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (n, q) = pairs[id];
        let mut row = Vec::new();
        for &(a, t) in &graph.edges[n] {
            let key = (t, delta[q][a]);
            let tid = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                queue.push_back(pairs.len() - 1);
                pairs.len() - 1
            });
            row.push((a, tid));
        }
        if edges.len() <= id {
            edges.resize(id + 1, Vec::new());
        }
        edges[id] = row;
    }
    edges.resize(pairs.len(), Vec::new());
    ProductGraph {
        pairs,
        edges,
        initial,
    }
}

/// Strongly connected components of the subgraph induced by `keep`
/// (Tarjan, iterative). Returns components as sorted vertex lists.
pub(crate) fn sccs(edges: &[Vec<(usize, usize)>], keep: &[bool]) -> Vec<Vec<usize>> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !keep[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < edges[v].len() {
                let w = edges[v][*i].1;
                *i += 1;
                if !keep[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("nonempty stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Breadth-first path inside `allowed` from any of `from` to a vertex
/// satisfying `goal`; returns the edge list `(label, target)`.
fn bfs_path(
    edges: &[Vec<(usize, usize)>],
    from: &[usize],
    allowed: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
    nonempty: bool,
) -> Option<(usize, Vec<(usize, usize)>)> {
    let n = edges.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in from {
        if !nonempty && goal(s) {
            return Some((s, Vec::new()));
        }
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    // For nonempty paths the goal may be a start vertex reached again.
    while let Some(v) = queue.pop_front() {
        for &(a, w) in &edges[v] {
            if !allowed(w) {
                continue;
            }
            if goal(w) {
                let mut path = vec![(a, w)];
                let mut cur = v;
                while let Some((p, b)) = parent[cur] {
                    path.push((b, cur));
                    cur = p;
                }
                path.reverse();
                return Some((cur, path));
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, a));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Cycle through every vertex of a strongly connected `comp`, starting and
/// ending at `comp[0]`.
fn covering_cycle(edges: &[Vec<(usize, usize)>], comp: &[usize]) -> Vec<(usize, usize)> {
    let inside: BTreeSet<usize> = comp.iter().copied().collect();
    let start = comp[0];
    let mut cycle = Vec::new();
    let mut cur = start;
    for &target in comp.iter().skip(1).chain(std::iter::once(&start)) {
        if target == cur && !cycle.is_empty() {
            continue;
        }
        let (_, path) = bfs_path(
            edges,
            &[cur],
            |v| inside.contains(&v),
            |v| v == target,
            true,
        )
        .expect("component is strongly connected");
        cycle.extend(path);
        cur = target;
    }
    cycle
}

fn lasso_from(
    graph_pairs: &[(usize, usize)],
    edges: &[Vec<(usize, usize)>],
    initial: &[usize],
    comp: &[usize],
) -> Lasso {
    let (_, stem) = bfs_path(edges, initial, |_| true, |v| v == comp[0], false)
        .expect("component is reachable");
    let cycle = covering_cycle(edges, comp);
    Lasso {
        stem: stem.iter().map(|e| e.0).collect(),
        cycle: cycle.iter().map(|e| e.0).collect(),
        stem_nodes: stem.iter().map(|e| graph_pairs[e.1].0).collect(),
        cycle_nodes: cycle.iter().map(|e| graph_pairs[e.1].0).collect(),
    }
}

fn reachable(edges: &[Vec<(usize, usize)>], initial: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    let mut stack: Vec<usize> = initial.to_vec();
    for &s in initial {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &(_, w) in &edges[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

fn nontrivial(edges: &[Vec<(usize, usize)>], comp: &[usize]) -> bool {
    comp.len() > 1 || edges[comp[0]].iter().any(|&(_, w)| w == comp[0])
}

/// Whether some infinite path of `graph` from an initial node is accepted by
/// `muller`; returns a lasso witness when one is.
///
/// For every acceptance set `S`, restricts the reachable product to states
/// whose automaton part lies in `S` and looks for a nontrivial strongly
/// connected component projecting onto all of `S`.
pub fn omega_emptiness(
    muller: &Muller,
    graph: &LabeledGraph,
) -> Result<Option<Lasso>, AutomatonError> {
    if muller.alphabet != graph.labels {
        return Err(AutomatonError::AlphabetMismatch(
            muller.alphabet.clone(),
            graph.labels.clone(),
        ));
    }
    let p = deterministic_product(graph, &muller.delta, muller.initial);
    let reach = reachable(&p.edges, &p.initial);
    for set in &muller.family {
        let keep: Vec<bool> = (0..p.pairs.len())
            .map(|i| reach[i] && set.contains(&p.pairs[i].1))
            .collect();
        for comp in sccs(&p.edges, &keep) {
            if !nontrivial(&p.edges, &comp) {
                continue;
            }
            let proj: BTreeSet<usize> = comp.iter().map(|&v| p.pairs[v].1).collect();
            if &proj == set {
                // Restrict the cycle search to this component.
                return Ok(Some(lasso_from(&p.pairs, &p.edges, &p.initial, &comp)));
            }
        }
    }
    Ok(None)
}

/// Büchi acceptance against a graph: a reachable nontrivial component of
/// the product containing a final automaton state.
pub fn buchi_emptiness(
    buchi: &Buchi,
    graph: &LabeledGraph,
) -> Result<Option<Lasso>, AutomatonError> {
    let nfa = &buchi.nfa;
    if nfa.alphabet != graph.labels {
        return Err(AutomatonError::AlphabetMismatch(
            nfa.alphabet.clone(),
            graph.labels.clone(),
        ));
    }
    let nq = nfa.states.len();
    let id = |n: usize, q: usize| n * nq + q;
    let total = graph.nodes.len() * nq;
    let mut edges = vec![Vec::new(); total];
    let mut pairs = Vec::with_capacity(total);
    for n in 0..graph.nodes.len() {
        for q in 0..nq {
            pairs.push((n, q));
            for &(a, t) in &graph.edges[n] {
                for &(b, r) in &nfa.edges[q] {
                    if a == b {
                        edges[id(n, q)].push((a, id(t, r)));
                    }
                }
            }
        }
    }
    let initial: Vec<usize> = graph
        .initial
        .iter()
        .flat_map(|&n| nfa.initial.iter().map(move |&q| id(n, q)))
        .collect();
    let keep = reachable(&edges, &initial);
    for comp in sccs(&edges, &keep) {
        if nontrivial(&edges, &comp) && comp.iter().any(|&v| nfa.finals[pairs[v].1]) {
            return Ok(Some(lasso_from(&pairs, &edges, &initial, &comp)));
        }
    }
    Ok(None)
}

/// The three standard observer automata, over cells named by the caller.
pub mod figures {
    use super::{Dfa, Muller};
    use std::collections::BTreeSet;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Start in `U` and eventually reach `V`; cells `[U, V, rest]`.
    pub fn halting() -> Dfa {
        // q0 -U-> q1 -V-> qf; anything else from q0 is rejected for good.
        let (q0, q1, qf, sink) = (0, 1, 2, 3);
        let (u, v, r) = (0, 1, 2);
        let edges = [
            (q0, u, q1),
            (q0, v, sink),
            (q0, r, sink),
            (q1, u, q1),
            (q1, r, q1),
            (q1, v, qf),
            (qf, u, qf),
            (qf, v, qf),
            (qf, r, qf),
            (sink, u, sink),
            (sink, v, sink),
            (sink, r, sink),
        ];
        Dfa::from_edges(
            names(&["U", "V", "rest"]),
            names(&["q0", "q1", "qf", "sink"]),
            &edges,
            q0,
            &[qf],
        )
        .expect("figure automaton is valid")
    }

    /// Start in `U` and reach `V` without entering `W` before; cells
    /// `[U, V, W, T]` with `T` the rest.
    pub fn guarded_reachability() -> Dfa {
        let (q0, q1, qf, sink) = (0, 1, 2, 3);
        let (u, v, w, t) = (0, 1, 2, 3);
        let mut edges = vec![(q0, u, q1), (q0, v, sink), (q0, w, sink), (q0, t, sink)];
        edges.extend([(q1, u, q1), (q1, t, q1), (q1, v, qf), (q1, w, sink)]);
        for a in [u, v, w, t] {
            edges.push((qf, a, qf));
            edges.push((sink, a, sink));
        }
        Dfa::from_edges(
            names(&["U", "V", "W", "T"]),
            names(&["q0", "q1", "qf", "sink"]),
            &edges,
            q0,
            &[qf],
        )
        .expect("figure automaton is valid")
    }

    /// Never leave `U`; cells `[U, rest]`, acceptance family `{{q0}}`.
    pub fn invariance() -> Muller {
        Muller::new(
            names(&["U", "rest"]),
            names(&["q0", "sink"]),
            vec![vec![0, 1], vec![1, 1]],
            0,
            vec![BTreeSet::from([0])],
        )
        .expect("figure automaton is valid")
    }
}
