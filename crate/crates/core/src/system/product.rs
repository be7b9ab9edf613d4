//! Lazy products of countably many one-sided systems over a common alphabet.
//!
//! A clopen set of the product has finite support. It is stored as a clopen
//! set of the one-sided shift over the zipped alphabet of its support
//! components, which is a finite union of boxes.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::{DynSystem, EffectiveSystem, SystemError, Zipper};
use crate::clopen::{Alphabet, ClopenSet, Cylinder, SetAlgebra, SpaceSpec, Sym, Window, Word};

fn zipped_space(base: usize, tracks: usize) -> Arc<SpaceSpec> {
    let size = base.pow(tracks as u32);
    SpaceSpec::one_sided(Alphabet::indexed(size).expect("zipped alphabets stay below 256 symbols"))
}

/// Clopen subset of a product space with finite support.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProductSet {
    base: usize,
    /// Sorted component indices constrained by the set.
    support: Vec<usize>,
    /// Set over the zipped alphabet of `support`, track `j` = `support[j]`.
    set: ClopenSet,
}

impl ProductSet {
    pub fn whole(base: usize) -> Self {
        Self {
            base,
            support: Vec::new(),
            set: ClopenSet::whole(&zipped_space(base, 0)),
        }
    }

    pub fn empty(base: usize) -> Self {
        Self {
            base,
            support: Vec::new(),
            set: ClopenSet::empty(&zipped_space(base, 0)),
        }
    }

    /// `pi_index^-1(component)` for a set of a one-sided component space.
    pub fn lift(base: usize, index: usize, component: &ClopenSet) -> Self {
        assert_eq!(
            component.space().alphabet().len(),
            base,
            "component alphabet size"
        );
        let space = zipped_space(base, 1);
        let set =
            ClopenSet::from_parts(space, component.window(), vec![component.words(0).to_vec()]);
        Self::canonical(base, vec![index], set)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The underlying zipped set.
    pub fn zipped(&self) -> &ClopenSet {
        &self.set
    }

    fn zipper(&self) -> Zipper {
        Zipper {
            base: self.base,
            tracks: self.support.len(),
        }
    }

    /// Boxes of the set: per word, one word per support component.
    pub fn boxes(&self) -> Vec<Vec<Word>> {
        let z = self.zipper();
        self.set.words(0).iter().map(|w| z.split(w)).collect()
    }

    /// The same set written over the larger support `to`, at window length
    /// `len` (at least the current one).
    fn lift_to(&self, to: &[usize], len: usize) -> Vec<Word> {
        let z_to = Zipper {
            base: self.base,
            tracks: to.len(),
        };
        let window = (len > 0).then(|| Window::new(0, len as i64 - 1));
        let refined = &self.set.refined(window)[0];
        let z = self.zipper();
        let free_tracks = crate::clopen::all_words(self.base, len);
        let mut out = Vec::new();
        for w in refined {
            let tracks = z.split(w);
            let tracks = if len == 0 {
                vec![Vec::new(); self.support.len()]
            } else {
                tracks
            };
            // Choose a word for every new track.
            let new: Vec<usize> = (0..to.len())
                .filter(|i| !self.support.contains(&to[*i]))
                .collect();
            let mut choice = vec![0usize; new.len()];
            loop {
                let cols: Vec<Word> = to
                    .iter()
                    .enumerate()
                    .map(
                        |(i, idx)| match self.support.iter().position(|s| s == idx) {
                            Some(j) => tracks[j].clone(),
                            None => free_tracks
                                [choice[new.iter().position(|&n| n == i).expect("new track")]]
                            .clone(),
                        },
                    )
                    .collect();
                out.push(z_to.join(&cols, len));
                // Odometer over the free choices.
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break;
                    }
                    choice[pos] += 1;
                    if choice[pos] < free_tracks.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == choice.len() {
                    break;
                }
            }
        }
        out
    }

    fn combine(&self, other: &Self, op: impl Fn(&ClopenSet, &ClopenSet) -> ClopenSet) -> Self {
        assert_eq!(
            self.base, other.base,
            "product sets over different alphabets"
        );
        let support: Vec<usize> = self
            .support
            .iter()
            .chain(&other.support)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let len = self.set.level().max(other.set.level());
        let space = zipped_space(self.base, support.len());
        let window = (len > 0).then(|| Window::new(0, len as i64 - 1));
        let a = ClopenSet::from_parts(space.clone(), window, vec![self.lift_to(&support, len)]);
        let b = ClopenSet::from_parts(space, window, vec![other.lift_to(&support, len)]);
        Self::canonical(self.base, support, op(&a, &b))
    }

    /// Drops support components the set does not constrain.
    fn canonical(base: usize, mut support: Vec<usize>, mut set: ClopenSet) -> Self {
        let mut j = 0;
        while j < support.len() {
            let z = Zipper {
                base,
                tracks: support.len(),
            };
            let len = set.window().map_or(0, |w| w.len());
            let words = set.words(0);
            let projected: BTreeSet<Word> = words
                .iter()
                .map(|w| {
                    let mut tracks = z.split(w);
                    tracks.remove(j);
                    Zipper {
                        base,
                        tracks: support.len() - 1,
                    }
                    .join(&tracks, len)
                })
                .collect();
            let free = (base as u128).pow(len as u32);
            if set.is_empty() || (projected.len() as u128) * free == words.len() as u128 {
                support.remove(j);
                let window = set.window();
                set = ClopenSet::from_parts(
                    zipped_space(base, support.len()),
                    window,
                    vec![projected.into_iter().collect()],
                );
            } else {
                j += 1;
            }
        }
        if set.is_empty() {
            support.clear();
        }
        Self { base, support, set }
    }
}

impl SetAlgebra for ProductSet {
    fn union(&self, other: &Self) -> Self {
        self.combine(other, SetAlgebra::union)
    }

    fn intersection(&self, other: &Self) -> Self {
        self.combine(other, SetAlgebra::intersection)
    }

    fn difference(&self, other: &Self) -> Self {
        self.combine(other, SetAlgebra::difference)
    }

    fn complement(&self) -> Self {
        Self::canonical(self.base, self.support.clone(), self.set.complement())
    }

    fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    fn size(&self) -> usize {
        self.set.word_count()
    }
}

impl fmt::Display for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.set.is_empty() {
            return write!(f, "∅");
        }
        if self.support.is_empty() {
            return write!(f, "X");
        }
        let boxes = self.boxes();
        for (i, b) in boxes.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            for (j, track) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, "×")?;
                }
                let digits: String = track.iter().map(|s| s.to_string()).collect();
                write!(f, "π{}[{}]", self.support[j], digits)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductSet({self})")
    }
}

type Family = dyn Fn(usize) -> Result<DynSystem, SystemError> + Send + Sync;

/// Product of `f_0 x f_1 x ...`, instantiating components on first use up
/// to a fixed horizon.
pub struct ProductSystem {
    base: usize,
    family: Arc<Family>,
    components: Vec<OnceLock<DynSystem>>,
    name: String,
}

impl ProductSystem {
    /// `family(n)` builds component `n`, a one-sided untagged system over
    /// `base` symbols. Indices `>= horizon` are refused.
    pub fn new(
        name: impl Into<String>,
        base: usize,
        horizon: usize,
        family: impl Fn(usize) -> Result<DynSystem, SystemError> + Send + Sync + 'static,
    ) -> Result<Self, SystemError> {
        Zipper::new(base, horizon)?;
        Ok(Self {
            base,
            family: Arc::new(family),
            components: (0..horizon).map(|_| OnceLock::new()).collect(),
            name: name.into(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.components.len()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn component(&self, index: usize) -> Result<&DynSystem, SystemError> {
        let slot = self.components.get(index).ok_or(SystemError::Horizon {
            index,
            horizon: self.components.len(),
        })?;
        if let Some(c) = slot.get() {
            return Ok(c);
        }
        let built = (self.family)(index)?;
        let space = built.whole().space().clone();
        if space.is_two_sided() || space.tags().is_some() || space.alphabet().len() != self.base {
            return Err(SystemError::Spec(format!(
                "component {index} is not one-sided over {} symbols",
                self.base
            )));
        }
        // A concurrent first touch may win; both values are equal.
        Ok(slot.get_or_init(|| built))
    }

    /// `pi_index^-1([word])`.
    pub fn cylinder(&self, index: usize, word: &[Sym]) -> Result<ProductSet, SystemError> {
        let c = self.component(index)?;
        let set = ClopenSet::cylinder(c.whole().space(), &Cylinder::at_origin(word.to_vec()))?;
        Ok(ProductSet::lift(self.base, index, &set))
    }

    pub fn lift(&self, index: usize, set: &ClopenSet) -> Result<ProductSet, SystemError> {
        let c = self.component(index)?;
        super::check_space(c.whole().space(), set)?;
        Ok(ProductSet::lift(self.base, index, set))
    }

    fn component_cylinder(&self, index: usize, word: &[Sym]) -> ClopenSet {
        let c = self.component(index).expect("validated support");
        ClopenSet::cylinder(c.whole().space(), &Cylinder::at_origin(word.to_vec()))
            .expect("valid word")
    }
}

impl fmt::Debug for ProductSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProductSystem")
            .field("name", &self.name)
            .field("horizon", &self.horizon())
            .finish()
    }
}

impl EffectiveSystem for ProductSystem {
    type Set = ProductSet;

    fn whole(&self) -> ProductSet {
        ProductSet::whole(self.base)
    }

    fn empty(&self) -> ProductSet {
        ProductSet::empty(self.base)
    }

    fn meets(&self, set: &ProductSet) -> bool {
        set.boxes().iter().any(|b| {
            b.iter().zip(&set.support).all(|(track, &idx)| {
                let c = self.component(idx).expect("validated support");
                c.meets(&self.component_cylinder(idx, track))
            })
        })
    }

    fn preimage(&self, set: &ProductSet) -> ProductSet {
        if set.support.is_empty() {
            return set.clone();
        }
        let mut out = ProductSet::empty(self.base);
        for b in set.boxes() {
            let mut acc = ProductSet::whole(self.base);
            for (track, &idx) in b.iter().zip(&set.support) {
                let c = self.component(idx).expect("validated support");
                let pre = c.preimage(&self.component_cylinder(idx, track));
                acc = acc.intersection(&ProductSet::lift(self.base, idx, &pre));
                if acc.is_empty() {
                    break;
                }
            }
            out = out.union(&acc);
        }
        out
    }

    /// Drops boxes with a component cylinder outside that component.
    fn simplify(&self, set: &ProductSet) -> ProductSet {
        let mut out = ProductSet::empty(self.base);
        for b in set.boxes() {
            let cyls: Vec<ClopenSet> = b
                .iter()
                .zip(&set.support)
                .map(|(t, &i)| self.component_cylinder(i, t))
                .collect();
            if cyls
                .iter()
                .zip(&set.support)
                .all(|(c, &i)| self.component(i).expect("validated support").meets(c))
            {
                let boxed = cyls
                    .iter()
                    .zip(&set.support)
                    .fold(ProductSet::whole(self.base), |acc, (c, &i)| {
                        acc.intersection(&ProductSet::lift(self.base, i, c))
                    });
                out = out.union(&boxed);
            }
        }
        out
    }

    fn balls(&self, level: usize) -> Vec<ProductSet> {
        let tracks = level.min(self.horizon());
        let support: Vec<usize> = (0..tracks).collect();
        let space = zipped_space(self.base, tracks);
        let window = (level > 0).then(|| Window::new(0, level as i64 - 1));
        space
            .alphabet()
            .words(level)
            .into_iter()
            .map(|w| {
                let set = ClopenSet::from_parts(space.clone(), window, vec![vec![w]]);
                ProductSet::canonical(self.base, support.clone(), set)
            })
            .collect()
    }

    fn level_of(&self, set: &ProductSet) -> usize {
        let by_support = set.support.last().map_or(0, |&i| i + 1);
        by_support.max(set.set.level())
    }

    fn validate(&self, set: &ProductSet) -> Result<(), SystemError> {
        if set.base != self.base {
            return Err(SystemError::Spec(
                "product set over a different alphabet".into(),
            ));
        }
        for &i in &set.support {
            self.component(i)?;
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{} (horizon {})", self.name, self.horizon())
    }
}
