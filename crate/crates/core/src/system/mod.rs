//! Effective symbolic systems: a space, a nonemptiness oracle for clopen sets
//! against the system's closed subset, and a preimage transformer.

use std::sync::Arc;

use thiserror::Error;

use crate::clopen::{
    balls, ClopenError, ClopenSet, Cylinder, Resolution, SetAlgebra, SpaceSpec, Sym, Word,
};
use crate::language::LanguageGraph;

mod basic;
mod cellular;
mod embedded;
mod product;
mod shift;
mod turing;

pub use basic::{Identity, PrependZero};
pub use cellular::{CellularAutomaton, LocalRule};
pub use embedded::{
    collatz_value, counter_values, CollatzMap, CounterInstr, CounterMachine, CounterProgram,
    TagSystem, PAD,
};
pub use product::{ProductSet, ProductSystem};
pub use shift::{Presentation, ShiftSystem};
pub use turing::{BlankTm, MachineSpec, Move, MovingTapeTm, RunOutcome, TapeConfig, Transition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("invalid system specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Clopen(#[from] ClopenError),
    #[error("component index {index} is beyond the instantiation horizon {horizon}")]
    Horizon { index: usize, horizon: usize },
    #[error("missing capability: {0}")]
    Capability(String),
}

/// How fine a pseudo-orbit must be to be shadowed at a given precision,
/// expressed on ball levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowingModulus {
    /// `delta = epsilon`.
    Identity,
    /// `delta` level = `epsilon` level + offset.
    Offset(usize),
}

impl ShadowingModulus {
    pub fn delta_level(self, epsilon_level: usize) -> usize {
        match self {
            ShadowingModulus::Identity => epsilon_level,
            ShadowingModulus::Offset(k) => epsilon_level + k,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Capabilities {
    /// An exact automaton of every induced language can be built.
    pub effectively_regular: bool,
    pub shadowing: Option<ShadowingModulus>,
    /// The space is finite.
    pub finite: bool,
}

/// An effective symbolic system `f: X -> X`, where `X` is a closed subset of
/// the ambient space of its clopen sets.
pub trait EffectiveSystem: Send + Sync {
    type Set: SetAlgebra;

    fn whole(&self) -> Self::Set;

    fn empty(&self) -> Self::Set;

    /// Decides whether `set` intersects `X`.
    fn meets(&self, set: &Self::Set) -> bool;

    fn preimage(&self, set: &Self::Set) -> Self::Set;

    /// All balls of radius `2^-level`, in enumeration order.
    fn balls(&self, level: usize) -> Vec<Self::Set>;

    /// Smallest level at which `set` is a union of balls.
    fn level_of(&self, set: &Self::Set) -> usize;

    /// Rejects sets that do not live in this system's space.
    fn validate(&self, set: &Self::Set) -> Result<(), SystemError>;

    fn capabilities(&self) -> Capabilities {
        Capabilities::default()
    }

    /// Exact presentation of the language induced by the partition `cells`,
    /// when the system can build one.
    fn exact_language(&self, _cells: &[Self::Set]) -> Option<Box<dyn LanguageGraph + '_>> {
        None
    }

    fn describe(&self) -> String {
        String::from("effective system")
    }

    /// A possibly smaller representation of a set with the same points in
    /// the space.
    fn simplify(&self, set: &Self::Set) -> Self::Set {
        set.clone()
    }

    /// Equality of the traces of `a` and `b` on `X`.
    fn equal_in_space(&self, a: &Self::Set, b: &Self::Set) -> bool {
        !self.meets(&a.difference(b)) && !self.meets(&b.difference(a))
    }
}

impl<T: EffectiveSystem + ?Sized> EffectiveSystem for Arc<T> {
    type Set = T::Set;

    fn whole(&self) -> Self::Set {
        (**self).whole()
    }
    fn empty(&self) -> Self::Set {
        (**self).empty()
    }
    fn meets(&self, set: &Self::Set) -> bool {
        (**self).meets(set)
    }
    fn preimage(&self, set: &Self::Set) -> Self::Set {
        (**self).preimage(set)
    }
    fn balls(&self, level: usize) -> Vec<Self::Set> {
        (**self).balls(level)
    }
    fn level_of(&self, set: &Self::Set) -> usize {
        (**self).level_of(set)
    }
    fn validate(&self, set: &Self::Set) -> Result<(), SystemError> {
        (**self).validate(set)
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn exact_language(&self, cells: &[Self::Set]) -> Option<Box<dyn LanguageGraph + '_>> {
        (**self).exact_language(cells)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
    fn simplify(&self, set: &Self::Set) -> Self::Set {
        (**self).simplify(set)
    }
    fn equal_in_space(&self, a: &Self::Set, b: &Self::Set) -> bool {
        (**self).equal_in_space(a, b)
    }
}

/// A system over [`ClopenSet`]s, usable behind a trait object.
pub type DynSystem = Arc<dyn EffectiveSystem<Set = ClopenSet>>;

/// Space-derived methods shared by every system over [`ClopenSet`]s that
/// keeps its space in `self.space`.
macro_rules! clopen_space_methods {
    () => {
        fn whole(&self) -> ClopenSet {
            ClopenSet::whole(&self.space)
        }

        fn empty(&self) -> ClopenSet {
            ClopenSet::empty(&self.space)
        }

        fn balls(&self, level: usize) -> Vec<ClopenSet> {
            $crate::system::space_balls(&self.space, level)
        }

        fn level_of(&self, set: &ClopenSet) -> usize {
            set.level()
        }

        fn validate(&self, set: &ClopenSet) -> Result<(), $crate::system::SystemError> {
            $crate::system::check_space(&self.space, set)
        }
    };
}
pub(crate) use clopen_space_methods;

pub(crate) fn space_balls(space: &Arc<SpaceSpec>, level: usize) -> Vec<ClopenSet> {
    balls(space, Resolution::Depth(level))
}

pub(crate) fn check_space(space: &Arc<SpaceSpec>, set: &ClopenSet) -> Result<(), SystemError> {
    if set.space().as_ref() == space.as_ref() {
        Ok(())
    } else {
        Err(SystemError::Clopen(ClopenError::SpaceMismatch))
    }
}

/// Preimage of `target` under a map on a one-sided (possibly tagged) space
/// described by prefix images.
///
/// `image(tag, prefix, need)` returns the image tag, when the prefix
/// determines it, and the image symbols the prefix determines (at least
/// `need` of them whenever that many are determined). Longer prefixes must
/// determine at least as much as their own prefixes, and every point must
/// eventually determine arbitrarily many symbols.
pub(crate) fn preimage_by_prefix_image<F>(
    space: &Arc<SpaceSpec>,
    target: &ClopenSet,
    image: F,
) -> ClopenSet
where
    F: Fn(usize, &[Sym], usize) -> (Option<usize>, Word),
{
    assert!(
        !space.is_two_sided(),
        "prefix images need a one-sided space"
    );
    let depth = target.window().map_or(0, |w| w.len());
    let k = space.alphabet().len();
    let tagged = space.tags().is_some();
    let mut found = Vec::new();
    for tag in 0..space.tag_count() {
        let mut stack: Vec<Word> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            let (image_tag, out) = image(tag, &prefix, depth);
            if let Some(t) = image_tag {
                let slot = target.words(t);
                if slot.is_empty() {
                    continue;
                }
                if out.len() >= depth {
                    let probe = &out[..depth];
                    if slot.binary_search_by(|w| w.as_slice().cmp(probe)).is_ok() {
                        found.push(Cylinder {
                            anchor: 0,
                            word: prefix,
                            tag: tagged.then_some(tag),
                        });
                    }
                    continue;
                }
                if !has_prefix(slot, &out) {
                    continue;
                }
            }
            assert!(
                prefix.len() <= 4 * depth + 64,
                "prefix image does not converge"
            );
            for s in (0..k).rev() {
                let mut next = prefix.clone();
                next.push(s as Sym);
                stack.push(next);
            }
        }
    }
    ClopenSet::normalize(space, &found).expect("prefix cylinders are valid")
}

/// Whether some word of the sorted list starts with `prefix`.
pub(crate) fn has_prefix(sorted: &[Word], prefix: &[Sym]) -> bool {
    let i = sorted.partition_point(|w| w.as_slice() < prefix);
    i < sorted.len() && sorted[i].starts_with(prefix)
}

/// Packs `tracks` parallel words over `base` symbols into one word over
/// `base^tracks` symbols, track 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Zipper {
    pub base: usize,
    pub tracks: usize,
}

impl Zipper {
    pub fn new(base: usize, tracks: usize) -> Result<Self, SystemError> {
        match base.checked_pow(tracks as u32) {
            Some(n) if n <= 256 && tracks > 0 => Ok(Self { base, tracks }),
            _ => Err(SystemError::Spec(format!(
                "{tracks} tracks over {base} symbols exceed 256 symbols"
            ))),
        }
    }

    pub fn size(&self) -> usize {
        self.base.pow(self.tracks as u32)
    }

    pub fn zip(&self, column: &[Sym]) -> Sym {
        column
            .iter()
            .fold(0usize, |acc, &s| acc * self.base + usize::from(s)) as Sym
    }

    pub fn unzip(&self, sym: Sym) -> Vec<Sym> {
        let mut out = vec![0; self.tracks];
        let mut v = usize::from(sym);
        for slot in out.iter_mut().rev() {
            *slot = (v % self.base) as Sym;
            v /= self.base;
        }
        out
    }

    /// Splits a zipped word into its tracks.
    pub fn split(&self, word: &[Sym]) -> Vec<Word> {
        let mut out = vec![Vec::with_capacity(word.len()); self.tracks];
        for &s in word {
            for (t, v) in self.unzip(s).into_iter().enumerate() {
                out[t].push(v);
            }
        }
        out
    }

    /// Zips the first `len` symbols of every track.
    pub fn join(&self, tracks: &[Word], len: usize) -> Word {
        (0..len)
            .map(|i| self.zip(&tracks.iter().map(|t| t[i]).collect::<Vec<_>>()))
            .collect()
    }
}

/// A one-sided track whose symbols after the first `pad` are padding.
///
/// Returns the known content: the symbols before the pad, and whether the
/// pad was seen (so the track is completely determined).
pub(crate) fn padded_track(track: &[Sym], pad: Sym) -> (&[Sym], bool) {
    match track.iter().position(|&s| s == pad) {
        Some(j) => (&track[..j], true),
        None => (track, false),
    }
}

/// Whether a word respects "the pad symbol is followed only by pads".
pub(crate) fn pad_closed(track: &[Sym], pad: Sym) -> bool {
    match track.iter().position(|&s| s == pad) {
        Some(j) => track[j..].iter().all(|&s| s == pad),
        None => true,
    }
}

/// Renders a padded track of length `need`: `content`, then padding if
/// `complete`, else only the content.
pub(crate) fn render_track(content: &[Sym], complete: bool, pad: Sym, need: usize) -> Word {
    let mut out = content.to_vec();
    if complete {
        while out.len() < need {
            out.push(pad);
        }
    }
    out
}
