//! Full shifts, subshifts of finite type and sofic shifts.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{clopen_space_methods, Capabilities, EffectiveSystem, ShadowingModulus, SystemError};
use crate::clopen::{ClopenSet, Cylinder, SpaceSpec, Sym, Word};
use crate::language::{GraphState, LanguageGraph};

/// Labeled graph presenting a subshift.
///
/// For one-sided spaces the points are the labels of infinite paths starting
/// at an initial vertex; for two-sided spaces they are the labels of
/// bi-infinite paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    edges: Vec<Vec<(Sym, usize)>>,
    initial: Vec<usize>,
    /// Vertices with an infinite forward path.
    live: Vec<bool>,
    /// Vertices lying on a bi-infinite path.
    bilive: Vec<bool>,
}

impl Presentation {
    /// `edges[v]` lists `(label, target)`; `initial` are the allowed start vertices.
    pub fn new(edges: Vec<Vec<(Sym, usize)>>, initial: Vec<usize>) -> Result<Self, SystemError> {
        let n = edges.len();
        if let Some(&v) = initial.iter().find(|&&v| v >= n) {
            return Err(SystemError::Spec(format!(
                "initial vertex {v} out of range"
            )));
        }
        if edges.iter().flatten().any(|&(_, t)| t >= n) {
            return Err(SystemError::Spec("edge target out of range".into()));
        }
        let live = prune(n, |v| edges[v].iter().map(|e| e.1).collect());
        let mut incoming = vec![Vec::new(); n];
        for (v, es) in edges.iter().enumerate() {
            for &(_, t) in es {
                incoming[t].push(v);
            }
        }
        let back = prune(n, |v| incoming[v].clone());
        let bilive = live.iter().zip(&back).map(|(a, b)| *a && *b).collect();
        Ok(Self {
            edges,
            initial,
            live,
            bilive,
        })
    }

    /// Every vertex is a start vertex.
    pub fn graph(edges: Vec<Vec<(Sym, usize)>>) -> Result<Self, SystemError> {
        let all = (0..edges.len()).collect();
        Self::new(edges, all)
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, v: usize) -> &[(Sym, usize)] {
        &self.edges[v]
    }

    fn start_set(&self, two_sided: bool) -> BTreeSet<usize> {
        if two_sided {
            (0..self.edges.len()).filter(|&v| self.bilive[v]).collect()
        } else {
            self.initial
                .iter()
                .copied()
                .filter(|&v| self.live[v])
                .collect()
        }
    }

    fn alive(&self, v: usize, two_sided: bool) -> bool {
        if two_sided {
            self.bilive[v]
        } else {
            self.live[v]
        }
    }

    fn step(&self, from: &BTreeSet<usize>, sym: Sym, two_sided: bool) -> BTreeSet<usize> {
        from.iter()
            .flat_map(|&v| self.edges[v].iter())
            .filter(|&&(a, t)| a == sym && self.alive(t, two_sided))
            .map(|&(_, t)| t)
            .collect()
    }

    /// Whether `word` is in the language of the presented subshift.
    pub fn accepts(&self, word: &[Sym], two_sided: bool) -> bool {
        self.reads_from(self.start_set(two_sided), word, two_sided)
    }

    fn reads_from(&self, mut current: BTreeSet<usize>, word: &[Sym], two_sided: bool) -> bool {
        for &s in word {
            if current.is_empty() {
                return false;
            }
            current = self.step(&current, s, two_sided);
        }
        !current.is_empty()
    }

    /// Words of length `len` readable from `v` along live vertices, with
    /// the vertex each reading ends in.
    fn paths_from(&self, v: usize, len: usize) -> BTreeSet<(Word, usize)> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(v, Vec::new())];
        while let Some((u, w)) = stack.pop() {
            if w.len() == len {
                out.insert((w, u));
                continue;
            }
            for &(a, t) in &self.edges[u] {
                if self.live[t] {
                    let mut next = w.clone();
                    next.push(a);
                    stack.push((t, next));
                }
            }
        }
        out
    }
}

/// Marks vertices that survive repeated removal of vertices without
/// neighbors among the survivors.
fn prune(n: usize, neighbors: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let nbrs: Vec<Vec<usize>> = (0..n).map(&neighbors).collect();
    let mut alive = vec![true; n];
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if alive[v] && !nbrs[v].iter().any(|&t| alive[t]) {
                alive[v] = false;
                changed = true;
            }
        }
    }
    alive
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ShiftKind {
    Full,
    Finite { forbidden: Vec<Word> },
    Sofic,
}

/// The shift map restricted to a subshift.
#[derive(Debug, Clone)]
pub struct ShiftSystem {
    space: Arc<SpaceSpec>,
    presentation: Presentation,
    kind: ShiftKind,
}

impl ShiftSystem {
    pub fn full(space: Arc<SpaceSpec>) -> Result<Self, SystemError> {
        check_untagged(&space)?;
        let k = space.alphabet().len();
        let presentation = Presentation::graph(vec![(0..k).map(|a| (a as Sym, 0)).collect()])?;
        Ok(Self {
            space,
            presentation,
            kind: ShiftKind::Full,
        })
    }

    /// Subshift avoiding every word of `forbidden`.
    pub fn sft(space: Arc<SpaceSpec>, forbidden: Vec<Word>) -> Result<Self, SystemError> {
        check_untagged(&space)?;
        let k = space.alphabet().len();
        if forbidden.iter().any(Vec::is_empty) {
            return Err(SystemError::Spec("forbidden words must be nonempty".into()));
        }
        if forbidden.iter().flatten().any(|&s| usize::from(s) >= k) {
            return Err(SystemError::Spec(
                "forbidden word uses a symbol outside the alphabet".into(),
            ));
        }
        let mut forbidden = forbidden;
        forbidden.sort();
        forbidden.dedup();
        let max_len = forbidden.iter().map(Vec::len).max().unwrap_or(1);
        let m = max_len.saturating_sub(1).max(1);
        // Higher-block presentation: vertices are admissible m-words, the
        // edge out of `u` is labeled by its first symbol.
        let clean = |w: &[Sym]| !forbidden.iter().any(|f| contains_factor(w, f));
        let vertices: Vec<Word> = space
            .alphabet()
            .words(m)
            .into_iter()
            .filter(|w| clean(w))
            .collect();
        let index = |w: &[Sym]| vertices.binary_search_by(|v| v.as_slice().cmp(w)).ok();
        let mut edges = vec![Vec::new(); vertices.len()];
        for (i, u) in vertices.iter().enumerate() {
            for c in 0..k as Sym {
                let mut ext = u.clone();
                ext.push(c);
                if !clean(&ext) {
                    continue;
                }
                if let Some(j) = index(&ext[1..]) {
                    edges[i].push((u[0], j));
                }
            }
        }
        let presentation = Presentation::graph(edges)?;
        Ok(Self {
            space,
            presentation,
            kind: ShiftKind::Finite { forbidden },
        })
    }

    /// Subshift presented by a labeled graph (every vertex may start a point).
    pub fn sofic(space: Arc<SpaceSpec>, presentation: Presentation) -> Result<Self, SystemError> {
        check_untagged(&space)?;
        Ok(Self {
            space,
            presentation,
            kind: ShiftKind::Sofic,
        })
    }

    /// One-sided subshift of labels of infinite paths from the presentation's
    /// initial vertices. The caller guarantees shift invariance.
    pub fn anchored(
        space: Arc<SpaceSpec>,
        presentation: Presentation,
    ) -> Result<Self, SystemError> {
        check_untagged(&space)?;
        if space.is_two_sided() {
            return Err(SystemError::Spec(
                "anchored presentations need a one-sided space".into(),
            ));
        }
        Ok(Self {
            space,
            presentation,
            kind: ShiftKind::Sofic,
        })
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn forbidden(&self) -> Option<&[Word]> {
        match &self.kind {
            ShiftKind::Finite { forbidden } => Some(forbidden),
            _ => None,
        }
    }

    /// Membership of a finite word in the language of the subshift.
    pub fn in_language(&self, word: &[Sym]) -> bool {
        self.presentation.accepts(word, self.space.is_two_sided())
    }
}

fn check_untagged(space: &SpaceSpec) -> Result<(), SystemError> {
    if space.tags().is_some() {
        Err(SystemError::Spec("shift spaces cannot be tagged".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn contains_factor(word: &[Sym], factor: &[Sym]) -> bool {
    factor.len() <= word.len() && word.windows(factor.len()).any(|w| w == factor)
}

impl EffectiveSystem for ShiftSystem {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        set.words(0).iter().any(|w| self.in_language(w))
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        if self.space.is_two_sided() {
            set.shifted(1)
        } else {
            set.prepend_free(1)
        }
    }

    fn capabilities(&self) -> Capabilities {
        let shadowing = match &self.kind {
            ShiftKind::Full => Some(ShadowingModulus::Identity),
            ShiftKind::Finite { forbidden } => {
                let max_len = forbidden.iter().map(Vec::len).max().unwrap_or(1);
                Some(ShadowingModulus::Offset(max_len.saturating_sub(1)))
            }
            ShiftKind::Sofic => None,
        };
        Capabilities {
            effectively_regular: !self.space.is_two_sided(),
            shadowing,
            finite: false,
        }
    }

    fn exact_language(&self, cells: &[ClopenSet]) -> Option<Box<dyn LanguageGraph + '_>> {
        if self.space.is_two_sided() {
            return None;
        }
        let depth = cells.iter().map(ClopenSet::level).max().unwrap_or(0);
        Some(Box::new(WindowedPresentation {
            system: self,
            cells: cells.to_vec(),
            depth,
        }))
    }

    /// Adds the cylinders disjoint from the subshift that sit next to the
    /// set's words, letting normalization merge sibling groups.
    fn simplify(&self, set: &ClopenSet) -> ClopenSet {
        let Some(window) = set.window() else {
            return set.clone();
        };
        let k = self.space.alphabet().len() as Sym;
        let mut prefixes = BTreeSet::new();
        for w in set.words(0) {
            for i in 0..w.len() {
                prefixes.insert(w[..i].to_vec());
            }
        }
        let mut raw = set.cylinders();
        let before = raw.len();
        for p in prefixes {
            for a in 0..k {
                let mut word = p.clone();
                word.push(a);
                if !self.in_language(&word) {
                    raw.push(Cylinder::new(window.lo, word));
                }
            }
        }
        if raw.len() == before {
            return set.clone();
        }
        // dead cylinders only help when they let siblings merge
        let out = ClopenSet::normalize(&self.space, &raw).expect("valid cylinders");
        if out.word_count() < set.word_count() {
            out
        } else {
            set.clone()
        }
    }

    fn describe(&self) -> String {
        let sides = if self.space.is_two_sided() {
            "two-sided"
        } else {
            "one-sided"
        };
        let alpha = self.space.alphabet();
        match &self.kind {
            ShiftKind::Full => format!(
                "{sides} full shift over {}",
                alpha.render(&(0..alpha.len() as Sym).collect::<Vec<_>>())
            ),
            ShiftKind::Finite { forbidden } => format!(
                "{sides} SFT forbidding {{{}}}",
                forbidden
                    .iter()
                    .map(|w| alpha.render(w))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            ShiftKind::Sofic => format!(
                "{sides} sofic shift ({} vertices)",
                self.presentation.vertex_count()
            ),
        }
    }
}

/// Exact induced-language graph of a one-sided presented subshift: a state is
/// the next `depth` symbols of the point together with a presentation vertex
/// reached after reading them.
struct WindowedPresentation<'a> {
    system: &'a ShiftSystem,
    cells: Vec<ClopenSet>,
    depth: usize,
}

impl WindowedPresentation<'_> {
    fn cell_of(&self, window: &[Sym]) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.contains_cylinder(0, 0, window))
    }

    fn state(window: &[Sym], v: usize) -> GraphState {
        window
            .iter()
            .map(|&s| u32::from(s))
            .chain(std::iter::once(v as u32))
            .collect()
    }
}

impl LanguageGraph for WindowedPresentation<'_> {
    fn initial(&self) -> Vec<GraphState> {
        let p = &self.system.presentation;
        let mut out = BTreeSet::new();
        for v in p.start_set(false) {
            for (w, u) in p.paths_from(v, self.depth) {
                out.insert(Self::state(&w, u));
            }
        }
        out.into_iter().collect()
    }

    fn successors(&self, state: &GraphState) -> Vec<(usize, GraphState)> {
        let p = &self.system.presentation;
        let (last, window) = state.split_last().expect("states carry a vertex");
        let window: Word = window.iter().map(|&s| s as Sym).collect();
        let Some(label) = self.cell_of(&window) else {
            return Vec::new();
        };
        let mut out = BTreeSet::new();
        for &(a, t) in p.edges(*last as usize) {
            if !p.live[t] {
                continue;
            }
            let mut next = window.clone();
            next.push(a);
            out.insert(Self::state(&next[next.len() - self.depth..], t));
        }
        out.into_iter().map(|s| (label, s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::{Alphabet, Cylinder};

    fn golden() -> ShiftSystem {
        ShiftSystem::sft(SpaceSpec::one_sided(Alphabet::binary()), vec![vec![1, 1]]).unwrap()
    }

    fn count_avoiding_11(n: usize) -> usize {
        Alphabet::binary()
            .words(n)
            .iter()
            .filter(|w| !contains_factor(w, &[1, 1]))
            .count()
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = golden();
        let fib = |n: usize| {
            let (mut a, mut b) = (1usize, 1usize);
            for _ in 0..n {
                (a, b) = (b, a + b);
            }
            a
        };
        for n in 0..=10 {
            let count = Alphabet::binary()
                .words(n)
                .iter()
                .filter(|w| g.in_language(w))
                .count();
            assert_eq!(count, count_avoiding_11(n));
            assert_eq!(count, fib(n + 1), "n = {n}");
        }
    }

    #[test]
    fn forbidden_prefix_does_not_meet() {
        let g = golden();
        let c = ClopenSet::cylinder(g.space(), &Cylinder::at_origin(vec![1, 1, 0])).unwrap();
        assert!(!g.meets(&c));
        assert!(g.meets(&c.complement()));
    }

    #[test]
    fn shift_preimage_prepends_a_free_symbol() {
        let s = ShiftSystem::full(SpaceSpec::one_sided(Alphabet::binary())).unwrap();
        let a = ClopenSet::cylinder(s.space(), &Cylinder::at_origin(vec![1])).unwrap();
        let pre = s.preimage(&a);
        let expected = ClopenSet::normalize(
            s.space(),
            &[
                Cylinder::at_origin(vec![0, 1]),
                Cylinder::at_origin(vec![1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(pre, expected);
        let z = ShiftSystem::full(SpaceSpec::two_sided(Alphabet::binary())).unwrap();
        let b = ClopenSet::cylinder(z.space(), &Cylinder::new(0, vec![1])).unwrap();
        assert_eq!(
            z.preimage(&b),
            ClopenSet::cylinder(z.space(), &Cylinder::new(1, vec![1])).unwrap()
        );
    }

    #[test]
    fn dead_ends_are_not_in_the_language() {
        // 0 -a-> 1, 1 has no way out; 0 -b-> 0.
        let p = Presentation::graph(vec![vec![(0, 1), (1, 0)], vec![]]).unwrap();
        let s = ShiftSystem::sofic(SpaceSpec::one_sided(Alphabet::binary()), p).unwrap();
        assert!(s.in_language(&[1, 1, 1]));
        assert!(!s.in_language(&[0]));
    }

    #[test]
    fn two_sided_sft_needs_bi_infinite_paths() {
        let z = SpaceSpec::two_sided(Alphabet::binary());
        let s = ShiftSystem::sft(z, vec![vec![0, 1]]).unwrap();
        // 1...10...0 is fine, 0 then 1 is not
        assert!(s.in_language(&[1, 1, 0, 0]));
        assert!(!s.in_language(&[0, 1]));
    }

    #[test]
    fn rejects_malformed_forbidden_words() {
        let sp = SpaceSpec::one_sided(Alphabet::binary());
        assert!(ShiftSystem::sft(sp.clone(), vec![vec![]]).is_err());
        assert!(ShiftSystem::sft(sp, vec![vec![2]]).is_err());
    }
}
