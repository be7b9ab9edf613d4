//! Induced languages: closure properties, coarsening, and ball-graph
//! automata.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use symdyn::language::{enumerate_language, induced_automaton, word_in_language, Partition};
use symdyn::system::{
    CellularAutomaton, Identity, LocalRule, PrependZero, Presentation, ShiftSystem,
};
use symdyn::{Alphabet, ClopenSet, DynSystem, EffectiveSystem, SetAlgebra, SpaceSpec};

use common::*;

/// A small system of each flavor; SFTs and sofic shifts are random.
fn system(kind: usize, rng: &mut impl Rng) -> DynSystem {
    let space = one_sided();
    match kind {
        0 => Arc::new(ShiftSystem::full(space).unwrap()),
        1 => Arc::new(ShiftSystem::sft(space, random_forbidden(rng)).unwrap()),
        2 => Arc::new(
            ShiftSystem::sofic(
                space,
                Presentation::graph(random_presentation(rng, 3)).unwrap(),
            )
            .unwrap(),
        ),
        3 => Arc::new(Identity::new(space)),
        4 => Arc::new(PrependZero::new()),
        _ => {
            let rule: u8 = rng.gen();
            let local =
                LocalRule::from_fn(1, 2, |n| (rule >> (4 * n[0] + 2 * n[1] + n[2])) & 1).unwrap();
            Arc::new(
                CellularAutomaton::new(SpaceSpec::two_sided(Alphabet::binary()), local).unwrap(),
            )
        }
    }
}

const KINDS: usize = 6;

/// Groups the depth-`d` balls into at most three cells, plus the grouping.
fn random_partition(
    system: &DynSystem,
    rng: &mut impl Rng,
    depth: usize,
) -> (Partition<ClopenSet>, Vec<usize>) {
    let balls = system.balls(depth);
    let blocks = rng.gen_range(1..=3.min(balls.len()));
    let groups: Vec<usize> = (0..balls.len()).map(|_| rng.gen_range(0..blocks)).collect();
    let used: BTreeSet<usize> = groups.iter().copied().collect();
    let cells = used
        .iter()
        .map(|&b| {
            let set = groups
                .iter()
                .zip(&balls)
                .filter(|(&g, _)| g == b)
                .fold(system.empty(), |acc, (_, c)| acc.union(c));
            (format!("C{b}"), set)
        })
        .collect();
    // Renumber groups to cell indices.
    let index: Vec<usize> = groups
        .iter()
        .map(|g| used.iter().position(|u| u == g).unwrap())
        .collect();
    (Partition::new(system, cells).unwrap(), index)
}

fn setup(kind: usize, seed: u64) -> (DynSystem, Partition<ClopenSet>) {
    let mut rng = rng(seed);
    let s = system(kind, &mut rng);
    let depth = rng.gen_range(0..=2);
    let (p, _) = random_partition(&s, &mut rng, depth);
    (s, p)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn closed_under_prefixes_and_suffixes(kind in 0..KINDS, seed: u64) {
        let (s, p) = setup(kind, seed);
        let words: BTreeSet<Vec<usize>> = enumerate_language(&s, &p, 5).into_iter().collect();
        for w in &words {
            if let Some((_, init)) = w.split_last() {
                prop_assert!(words.contains(init), "prefix of {:?}", w);
                prop_assert!(words.contains(&w[1..].to_vec()), "suffix of {:?}", w);
            }
            // Orbits are infinite, so every short word extends.
            if w.len() < 5 {
                prop_assert!((0..p.len()).any(|a| words.contains(&[w.clone(), vec![a]].concat())), "{:?} is a dead end", w);
            }
        }
    }

    #[test]
    fn enumeration_agrees_with_membership(kind in 0..KINDS, seed: u64) {
        let (s, p) = setup(kind, seed);
        let words: BTreeSet<Vec<usize>> = enumerate_language(&s, &p, 4).into_iter().collect();
        for w in words_up_to(p.len(), 4) {
            let w: Vec<usize> = w.into_iter().map(usize::from).collect();
            prop_assert_eq!(word_in_language(&s, &p, &w).0, words.contains(&w), "{:?}", w);
        }
    }

    /// Merging cells maps the fine language onto the coarse one.
    #[test]
    fn coarsening_is_a_factor(kind in 0..KINDS, seed: u64) {
        let mut rng = rng(seed);
        let s = system(kind, &mut rng);
        let balls = s.balls(1);
        let fine_cells: Vec<(String, ClopenSet)> =
            balls.iter().enumerate().map(|(i, b)| (format!("B{i}"), b.clone())).collect();
        let fine = Partition::new(&s, fine_cells).unwrap();
        let merge: Vec<usize> = (0..balls.len()).map(|_| rng.gen_range(0..2)).collect();
        let used: Vec<usize> = (0..2).filter(|g| merge.contains(g)).collect();
        let coarse_cells = used
            .iter()
            .map(|&g| {
                let set = merge.iter().zip(&balls).filter(|(&m, _)| m == g).fold(s.empty(), |acc, (_, b)| acc.union(b));
                (format!("M{g}"), set)
            })
            .collect();
        let coarse = Partition::new(&s, coarse_cells).unwrap();
        let image: BTreeSet<Vec<usize>> = enumerate_language(&s, &fine, 4)
            .into_iter()
            .map(|w| w.iter().map(|&a| used.iter().position(|&g| g == merge[a]).unwrap()).collect())
            .collect();
        let direct: BTreeSet<Vec<usize>> = enumerate_language(&s, &coarse, 4).into_iter().collect();
        prop_assert_eq!(image, direct);
    }

    /// Ball graphs accept every induced word, and exactly those when the
    /// shadowing modulus says so.
    #[test]
    fn ball_graph_contains_the_language(kind in 0..KINDS, seed: u64, extra in 0..3usize) {
        let (s, p) = setup(kind, seed);
        let depth = p.depth(&s);
        let aut = induced_automaton(&s, &p, depth + extra);
        let words: BTreeSet<Vec<usize>> = enumerate_language(&s, &p, 5).into_iter().collect();
        for w in words_up_to(p.len(), 5) {
            let w: Vec<usize> = w.into_iter().map(usize::from).collect();
            let induced = words.contains(&w);
            if induced {
                prop_assert!(aut.nfa.accepts(&w), "{:?} induced but rejected", w);
            } else if aut.exact {
                prop_assert!(!aut.nfa.accepts(&w), "{:?} accepted by an exact ball graph", w);
            }
        }
    }
}

#[test]
fn shift_ball_graphs_are_exact_at_the_modulus() {
    let mut rng = rng(40);
    for _ in 0..10 {
        let s = system(1, &mut rng);
        let (p, _) = random_partition(&s, &mut rng, 2);
        let modulus = s.capabilities().shadowing.expect("SFTs shadow");
        let aut = induced_automaton(&s, &p, modulus.delta_level(p.depth(&s)));
        assert!(aut.exact);
    }
}
