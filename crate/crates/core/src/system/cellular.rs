use std::sync::Arc;

use super::{clopen_space_methods, has_prefix, EffectiveSystem, SystemError};
use crate::clopen::{ClopenSet, SpaceSpec, Sym, Window, Word};

/// Local rule of a one-dimensional cellular automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    radius: usize,
    alphabet_size: usize,
    /// Output for every neighborhood, indexed by the neighborhood read as a
    /// base-`alphabet_size` number.
    table: Vec<Sym>,
}

impl LocalRule {
    pub fn new(radius: usize, alphabet_size: usize, table: Vec<Sym>) -> Result<Self, SystemError> {
        let expected = (alphabet_size as u128).checked_pow(2 * radius as u32 + 1);
        if expected != Some(table.len() as u128) {
            return Err(SystemError::Spec(format!(
                "rule table has {} entries, expected {alphabet_size}^{}",
                table.len(),
                2 * radius + 1
            )));
        }
        if table.iter().any(|&s| usize::from(s) >= alphabet_size) {
            return Err(SystemError::Spec("rule output outside the alphabet".into()));
        }
        Ok(Self {
            radius,
            alphabet_size,
            table,
        })
    }

    /// Builds the table by evaluating `f` on every neighborhood.
    pub fn from_fn(
        radius: usize,
        alphabet_size: usize,
        f: impl Fn(&[Sym]) -> Sym,
    ) -> Result<Self, SystemError> {
        let words = crate::clopen::all_words(alphabet_size, 2 * radius + 1);
        Self::new(radius, alphabet_size, words.iter().map(|w| f(w)).collect())
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn table(&self) -> &[Sym] {
        &self.table
    }

    pub fn apply_at(&self, neighborhood: &[Sym]) -> Sym {
        debug_assert_eq!(neighborhood.len(), 2 * self.radius + 1);
        let idx = neighborhood
            .iter()
            .fold(0usize, |acc, &s| acc * self.alphabet_size + usize::from(s));
        self.table[idx]
    }

    /// Image of a finite word; the result is `2 * radius` symbols shorter.
    pub fn apply(&self, word: &[Sym]) -> Word {
        let n = 2 * self.radius + 1;
        if word.len() < n {
            return Vec::new();
        }
        word.windows(n).map(|w| self.apply_at(w)).collect()
    }
}

/// Cellular automaton on `A^Z`.
#[derive(Debug, Clone)]
pub struct CellularAutomaton {
    space: Arc<SpaceSpec>,
    rule: LocalRule,
}

impl CellularAutomaton {
    pub fn new(space: Arc<SpaceSpec>, rule: LocalRule) -> Result<Self, SystemError> {
        if !matches!(space.as_ref(), SpaceSpec::TwoSided(_)) {
            return Err(SystemError::Spec(
                "cellular automata act on an untagged two-sided space".into(),
            ));
        }
        if space.alphabet().len() != rule.alphabet_size {
            return Err(SystemError::Spec(
                "rule and space alphabets differ in size".into(),
            ));
        }
        Ok(Self { space, rule })
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    /// One step on a finite configuration surrounded by an infinite sea of
    /// `background` (which must be a quiescent symbol for the result to be
    /// meaningful).
    pub fn step_finite(&self, cells: &[Sym], background: Sym) -> Word {
        let r = self.rule.radius;
        let mut padded = vec![background; r];
        padded.extend_from_slice(cells);
        padded.extend(std::iter::repeat_n(background, r));
        self.rule.apply(&padded)
    }
}

impl EffectiveSystem for CellularAutomaton {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        !set.is_empty()
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        let Some(win) = set.window() else {
            return set.clone();
        };
        let r = self.rule.radius;
        let n = 2 * r + 1;
        let target = set.words(0);
        let total = win.len() + 2 * r;
        let k = self.rule.alphabet_size;
        let mut found = Vec::new();
        // Depth-first over pre-words, pruning as soon as the determined image
        // prefix leaves every target word.
        let mut stack: Vec<(Word, Word)> = vec![(Vec::new(), Vec::new())];
        while let Some((pre, img)) = stack.pop() {
            if pre.len() == total {
                if target.binary_search(&img).is_ok() {
                    found.push(pre);
                }
                continue;
            }
            for s in (0..k as Sym).rev() {
                let mut next = pre.clone();
                next.push(s);
                let mut next_img = img.clone();
                if next.len() >= n {
                    next_img.push(self.rule.apply_at(&next[next.len() - n..]));
                    if !has_prefix(target, &next_img) {
                        continue;
                    }
                }
                stack.push((next, next_img));
            }
        }
        let window = Window::new(win.lo - r as i64, win.hi + r as i64);
        ClopenSet::from_parts(self.space.clone(), Some(window), vec![found])
    }

    fn describe(&self) -> String {
        format!(
            "cellular automaton of radius {} over {} symbols",
            self.rule.radius, self.rule.alphabet_size
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::{Alphabet, Cylinder};

    fn z2() -> Arc<SpaceSpec> {
        SpaceSpec::two_sided(Alphabet::binary())
    }

    #[test]
    fn radius_zero_identity() {
        let ca = CellularAutomaton::new(z2(), LocalRule::from_fn(0, 2, |w| w[0]).unwrap()).unwrap();
        let a = ClopenSet::cylinder(&z2(), &Cylinder::new(-1, vec![0, 1, 1])).unwrap();
        assert_eq!(ca.preimage(&a), a);
    }

    #[test]
    fn right_neighbor_rule_is_the_shift() {
        let ca = CellularAutomaton::new(z2(), LocalRule::from_fn(1, 2, |w| w[2]).unwrap()).unwrap();
        let a = ClopenSet::cylinder(&z2(), &Cylinder::new(0, vec![1])).unwrap();
        assert_eq!(
            ca.preimage(&a),
            ClopenSet::cylinder(&z2(), &Cylinder::new(1, vec![1])).unwrap()
        );
    }

    #[test]
    fn rule_184_matches_enumeration() {
        // traffic rule 184: a car moves right when the cell ahead is free
        let rule = LocalRule::from_fn(1, 2, |w| if w[1] == 1 { w[2] } else { w[0] }).unwrap();
        let ca = CellularAutomaton::new(z2(), rule.clone()).unwrap();
        let one = ClopenSet::cylinder(&z2(), &Cylinder::new(0, vec![1])).unwrap();
        let pre = ca.preimage(&one);
        for w in Alphabet::binary().words(3) {
            let inside = pre.contains_cylinder(0, -1, &w);
            assert_eq!(inside, rule.apply_at(&w) == 1, "{w:?}");
        }
    }

    #[test]
    fn rejects_partial_tables() {
        assert!(LocalRule::new(1, 2, vec![0; 7]).is_err());
        assert!(LocalRule::new(0, 2, vec![0, 2]).is_err());
    }
}
