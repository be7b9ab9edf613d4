//! Seeded generators and independent oracles shared by the integration tests.
//!
//! Oracles here never call into the library's decision procedures: they work
//! on plain words, graphs and simulations.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;
use std::sync::Arc;

use proptest::test_runner::{Config, RngSeed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::automata::{Dfa, Muller};
use symdyn::gallery::{HaltEntry, HaltTimeTable};
use symdyn::json::{parse, BuiltSystem, SystemJson};
use symdyn::{ClopenSet, Cylinder, EffectiveSystem, SetAlgebra, SpaceSpec, Sym, Word};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Base seed, from `SYMDYN_SEED` when set.
pub fn seed() -> u64 {
    std::env::var("SYMDYN_SEED")
        .ok()
        .and_then(|s| {
            let s = s.trim();
            match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16).ok(),
                None => s.parse().ok(),
            }
        })
        .unwrap_or(DEFAULT_SEED)
}

/// An independent stream per test, derived from the base seed.
pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Property-test configuration pinned to the base seed.
pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed()),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Every system kind the JSON loader knows, one instance each.
pub const SYSTEMS: &[&str] = &[
    r#"{"kind": "full", "space": {"alphabet": "01"}}"#,
    r#"{"kind": "full", "space": {"alphabet": "01", "two_sided": true}}"#,
    r#"{"kind": "sft", "space": {"alphabet": "01"}, "forbidden": ["11"]}"#,
    r#"{"kind": "sofic", "space": {"alphabet": "01"}, "edges": [[0, "0", 0], [0, "1", 1], [1, "1", 0]]}"#,
    r#"{"kind": "ca", "alphabet": "01", "radius": 1, "rule": 110}"#,
    r#"{"kind": "identity", "space": {"alphabet": "01"}}"#,
    r#"{"kind": "prepend_zero"}"#,
    r#"{"kind": "tm_moving", "machine": "parity4"}"#,
    r#"{"kind": "tm_blank", "machine": "bb3"}"#,
    r#"{"kind": "tag", "alphabet": "01", "deletion": 2, "productions": ["00", "1101"]}"#,
    r#"{"kind": "counter", "counters": 1, "program": [{"jz": [0, 2]}, {"dec": 0}, "halt"]}"#,
    r#"{"kind": "collatz", "branches": [[1, 0, 2], [3, 1, 1]]}"#,
    r#"{"kind": "product", "components": [{"kind": "full", "space": {"alphabet": "01"}}, {"kind": "prepend_zero"}]}"#,
];

pub fn build(text: &str) -> BuiltSystem {
    parse::<SystemJson>(text)
        .and_then(|s| s.build(Path::new(".")))
        .unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn one_sided() -> Arc<SpaceSpec> {
    SpaceSpec::one_sided(symdyn::Alphabet::binary())
}

pub fn cyl(space: &Arc<SpaceSpec>, word: &[Sym]) -> ClopenSet {
    ClopenSet::cylinder(space, &Cylinder::at_origin(word.to_vec())).expect("word over the alphabet")
}

/// All words of length `len` over `k` symbols, in lexicographic order.
pub fn words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as Sym).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn words_up_to(k: usize, max: usize) -> Vec<Word> {
    (0..=max).flat_map(|n| words(k, n)).collect()
}

/// Union of up to four random cylinders whose windows fit in depth 6;
/// one-sided cylinders sit at the origin.
pub fn random_clopen(rng: &mut impl Rng, space: &Arc<SpaceSpec>) -> ClopenSet {
    let k = space.alphabet().len() as Sym;
    let tags = space.tag_count();
    let count = rng.gen_range(0..=4);
    let cylinders: Vec<Cylinder> = (0..count)
        .map(|_| {
            let (anchor, len) = if space.is_two_sided() {
                let a = rng.gen_range(-3..=2i64);
                (a, rng.gen_range(1..=(3 - a) as usize))
            } else {
                (0, rng.gen_range(1..=6))
            };
            let word = (0..len).map(|_| rng.gen_range(0..k)).collect();
            if space.tags().is_some() {
                Cylinder::tagged(rng.gen_range(0..tags), anchor, word)
            } else {
                Cylinder::new(anchor, word)
            }
        })
        .collect();
    ClopenSet::normalize(space, &cylinders).expect("cylinders fit the space")
}

/// Union of a random subset of the balls of a random level at most 3,
/// keeping the ball count manageable.
pub fn random_ball_union<Sys: EffectiveSystem + ?Sized>(
    system: &Sys,
    rng: &mut impl Rng,
) -> Sys::Set {
    let mut balls = system.balls(1);
    for level in 2..=rng.gen_range(1..=3) {
        let finer = system.balls(level);
        if finer.len() > 256 {
            break;
        }
        balls = finer;
    }
    balls
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .fold(system.empty(), |acc, b| acc.union(&b))
}

/// Vertices of a labeled graph that start an infinite path.
pub fn alive(edges: &[Vec<(Sym, usize)>]) -> Vec<bool> {
    let mut live = vec![true; edges.len()];
    loop {
        let next: Vec<bool> = (0..edges.len())
            .map(|v| live[v] && edges[v].iter().any(|&(_, t)| live[t]))
            .collect();
        if next == live {
            return live;
        }
        live = next;
    }
}

/// Is `word` the label of a path that continues forever?
pub fn sofic_accepts(edges: &[Vec<(Sym, usize)>], word: &[Sym]) -> bool {
    let live = alive(edges);
    let mut current: BTreeSet<usize> = (0..edges.len()).filter(|&v| live[v]).collect();
    for &a in word {
        current = current
            .iter()
            .flat_map(|&v| {
                edges[v]
                    .iter()
                    .filter(|&&(b, t)| b == a && live[t])
                    .map(|&(_, t)| t)
            })
            .collect();
    }
    !current.is_empty()
}

/// Random binary presentation on `n` vertices with a nonempty shift.
pub fn random_presentation(rng: &mut impl Rng, n: usize) -> Vec<Vec<(Sym, usize)>> {
    loop {
        let mut edges: Vec<Vec<(Sym, usize)>> = vec![Vec::new(); n];
        for row in edges.iter_mut() {
            for a in 0..2 {
                if rng.gen_bool(0.7) {
                    row.push((a, rng.gen_range(0..n)));
                }
            }
        }
        if alive(&edges).contains(&true) {
            return edges;
        }
    }
}

pub fn contains_factor(word: &[Sym], f: &[Sym]) -> bool {
    f.len() <= word.len() && word.windows(f.len()).any(|w| w == f)
}

/// Random binary forbidden words of length 2 or 3 leaving a nonempty shift.
pub fn random_forbidden(rng: &mut impl Rng) -> Vec<Word> {
    loop {
        let count = rng.gen_range(1..=3);
        let forbidden: Vec<Word> = (0..count)
            .map(|_| {
                let len = rng.gen_range(2..=3);
                (0..len).map(|_| rng.gen_range(0..2)).collect()
            })
            .collect();
        if !DeBruijn::new(&forbidden, 3).start.is_empty() {
            return forbidden;
        }
    }
}

/// De Bruijn graph of an SFT: vertices are admissible `k`-words that start
/// an infinite path, edges overlap in `k - 1` symbols.
pub struct DeBruijn {
    pub vertices: Vec<Word>,
    pub edges: Vec<Vec<usize>>,
    pub start: Vec<usize>,
}

impl DeBruijn {
    pub fn new(forbidden: &[Word], min_k: usize) -> Self {
        let k = forbidden.iter().map(Vec::len).max().unwrap_or(1).max(min_k);
        let clean = |w: &[Sym]| !forbidden.iter().any(|f| contains_factor(w, f));
        let vertices: Vec<Word> = words(2, k).into_iter().filter(|w| clean(w)).collect();
        let labeled: Vec<Vec<(Sym, usize)>> = vertices
            .iter()
            .map(|w| {
                (0..2)
                    .filter_map(|b| {
                        let mut ext = w.clone();
                        ext.push(b);
                        if !clean(&ext) {
                            return None;
                        }
                        vertices
                            .iter()
                            .position(|v| v[..] == ext[1..])
                            .map(|t| (b, t))
                    })
                    .collect()
            })
            .collect();
        let live = alive(&labeled);
        let edges = labeled
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|&&(_, t)| live[t])
                    .map(|&(_, t)| t)
                    .collect()
            })
            .collect();
        let start = (0..vertices.len()).filter(|&v| live[v]).collect();
        Self {
            vertices,
            edges,
            start,
        }
    }

    /// Does some point of `[u]` have a forward iterate in `[v]`?
    pub fn reaches(&self, u: &[Sym], v: &[Sym]) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue: VecDeque<usize> = self
            .start
            .iter()
            .copied()
            .filter(|&s| self.vertices[s].starts_with(u))
            .collect();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(x) = queue.pop_front() {
            if self.vertices[x].starts_with(v) {
                return true;
            }
            for &t in &self.edges[x] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        false
    }
}

pub fn fib(n: usize) -> usize {
    let (mut a, mut b) = (0usize, 1usize);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rgs = vec![0; n];
    fn go(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            go(i + 1, max.max(b), rgs, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    go(1, 0, &mut rgs, &mut out);
    out
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_dfa(rng: &mut impl Rng, alphabet: &[String], max_states: usize) -> Dfa {
    let n = rng.gen_range(1..=max_states);
    let delta = (0..n)
        .map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    Dfa::new(alphabet.to_vec(), names("q", n), delta, 0, &finals).expect("valid random automaton")
}

pub fn random_muller(rng: &mut impl Rng, alphabet: &[String], max_states: usize) -> Muller {
    let n = rng.gen_range(1..=max_states);
    let delta = (0..n)
        .map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let family = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut states: Vec<usize> = (0..n).collect();
            states.shuffle(rng);
            states.truncate(rng.gen_range(1..=n));
            states.into_iter().collect::<BTreeSet<usize>>()
        })
        .collect();
    Muller::new(alphabet.to_vec(), names("q", n), delta, 0, family).expect("valid random automaton")
}

/// Does the Muller automaton accept the constant word `a^ω`? Runs the
/// transition table until a state repeats.
pub fn muller_accepts_constant(m: &Muller, a: usize) -> bool {
    let mut seen = Vec::new();
    let mut q = m.initial();
    while !seen.contains(&q) {
        seen.push(q);
        q = m.delta()[q][a];
    }
    let start = seen.iter().position(|&s| s == q).expect("repeated state");
    let inf: BTreeSet<usize> = seen[start..].iter().copied().collect();
    m.family().contains(&inf)
}

/// Word avoids every pattern `0 1^n 0 0^t 1` with `t` below the table limit
/// for `n`; the separator (symbol 2) breaks patterns.
pub fn avoids_halting_patterns(table: &HaltTimeTable, word: &[Sym]) -> bool {
    for i in 0..word.len() {
        if word[i] != 0 {
            continue;
        }
        let ones = word[i + 1..].iter().take_while(|&&s| s == 1).count();
        if ones == 0 || i + 1 + ones >= word.len() {
            continue;
        }
        let rest = &word[i + 1 + ones..];
        let zeros = rest.iter().take_while(|&&s| s == 0).count();
        if zeros == 0 || zeros == rest.len() || rest[zeros] != 1 {
            continue;
        }
        let t = (zeros - 1) as u64;
        let forbidden = match table.entry(ones) {
            Some(HaltEntry::Halts(k)) => t < k,
            Some(HaltEntry::NoHaltWithin(c)) => t <= c,
            Some(HaltEntry::Never) => true,
            None => false,
        };
        if forbidden {
            return false;
        }
    }
    true
}
