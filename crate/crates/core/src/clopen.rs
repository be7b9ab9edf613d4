//! Clopen subsets of one-sided, two-sided and tagged shift spaces.
//!
//! A clopen set is stored as a window of positions together with the sorted
//! set of admissible words over that window (one word set per tag). The
//! window is kept minimal, so two sets are equal as point sets exactly when
//! their representations are equal.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Index of a symbol inside its [`Alphabet`].
pub type Sym = u8;

/// A word over an alphabet, stored as symbol indices.
pub type Word = Vec<Sym>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClopenError {
    #[error("operands belong to different spaces")]
    SpaceMismatch,
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("invalid space: {0}")]
    Space(String),
    #[error("invalid cylinder: {0}")]
    Cylinder(String),
}

/// Ordered finite list of distinct symbols. The order fixes the enumeration
/// order of words, balls and cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

const GENERATED_SYMBOLS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, ClopenError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(ClopenError::Alphabet(
                "alphabet must contain at least one symbol".into(),
            ));
        }
        if symbols.len() > usize::from(Sym::MAX) + 1 {
            return Err(ClopenError::Alphabet(format!(
                "alphabet has {} symbols, at most 256 are supported",
                symbols.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.chars().count() != 1 {
                return Err(ClopenError::Alphabet(format!(
                    "symbol {s:?} is not a single codepoint"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(ClopenError::Alphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols })
    }

    /// Alphabet whose symbols are the characters of `chars`, in order.
    pub fn from_chars(chars: &str) -> Result<Self, ClopenError> {
        Self::new(chars.chars().map(String::from))
    }

    /// Alphabet of `n` generated single-character symbols (`0`-`9`, `a`-`z`,
    /// `A`-`Z`, then Latin-1 letters).
    pub fn indexed(n: usize) -> Result<Self, ClopenError> {
        let symbols = GENERATED_SYMBOLS
            .chars()
            .chain((0xC0u32..0x2FF).filter_map(char::from_u32))
            .take(n)
            .map(String::from)
            .collect::<Vec<_>>();
        if symbols.len() < n {
            return Err(ClopenError::Alphabet(format!(
                "cannot generate {n} symbols"
            )));
        }
        Self::new(symbols)
    }

    pub fn binary() -> Self {
        Self::from_chars("01").expect("binary alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, sym: Sym) -> &str {
        &self.symbols[usize::from(sym)]
    }

    pub fn index_of(&self, symbol: &str) -> Option<Sym> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .map(|i| i as Sym)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ClopenError> {
        text.chars()
            .map(|c| {
                let mut buf = [0u8; 4];
                self.index_of(c.encode_utf8(&mut buf)).ok_or_else(|| {
                    ClopenError::Cylinder(format!("symbol {c:?} is not in the alphabet"))
                })
            })
            .collect()
    }

    pub fn render(&self, word: &[Sym]) -> String {
        word.iter().map(|&s| self.symbol(s)).collect()
    }

    /// All words of length `len`, in lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Word> {
        all_words(self.len(), len)
    }
}

/// All words of length `len` over `k` symbols, lexicographically ordered.
pub(crate) fn all_words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * k);
        for w in &out {
            for s in 0..k {
                let mut v = w.clone();
                v.push(s as Sym);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Shape of the ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    /// `A^N`.
    OneSided(Alphabet),
    /// `A^Z`.
    TwoSided(Alphabet),
    /// `T x S` for a finite tag set `T` and an untagged space `S`.
    Tagged {
        tags: Vec<String>,
        inner: Box<SpaceSpec>,
    },
}

impl SpaceSpec {
    pub fn one_sided(alphabet: Alphabet) -> Arc<Self> {
        Arc::new(Self::OneSided(alphabet))
    }

    pub fn two_sided(alphabet: Alphabet) -> Arc<Self> {
        Arc::new(Self::TwoSided(alphabet))
    }

    pub fn tagged(tags: Vec<String>, inner: SpaceSpec) -> Result<Arc<Self>, ClopenError> {
        if tags.is_empty() {
            return Err(ClopenError::Space("tag set must be nonempty".into()));
        }
        for (i, t) in tags.iter().enumerate() {
            if tags[..i].contains(t) {
                return Err(ClopenError::Space(format!("duplicate tag {t:?}")));
            }
        }
        if matches!(inner, SpaceSpec::Tagged { .. }) {
            return Err(ClopenError::Space("tagged spaces cannot be nested".into()));
        }
        Ok(Arc::new(Self::Tagged {
            tags,
            inner: Box::new(inner),
        }))
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            SpaceSpec::OneSided(a) | SpaceSpec::TwoSided(a) => a,
            SpaceSpec::Tagged { inner, .. } => inner.alphabet(),
        }
    }

    pub fn tags(&self) -> Option<&[String]> {
        match self {
            SpaceSpec::Tagged { tags, .. } => Some(tags),
            _ => None,
        }
    }

    /// Number of tag slots: the tag count, or 1 for untagged spaces.
    pub fn tag_count(&self) -> usize {
        self.tags().map_or(1, <[String]>::len)
    }

    pub fn tag_index(&self, tag: &str) -> Option<usize> {
        self.tags()?.iter().position(|t| t == tag)
    }

    pub fn is_two_sided(&self) -> bool {
        match self {
            SpaceSpec::TwoSided(_) => true,
            SpaceSpec::OneSided(_) => false,
            SpaceSpec::Tagged { inner, .. } => inner.is_two_sided(),
        }
    }

    /// The untagged space underneath.
    pub fn base(&self) -> &SpaceSpec {
        match self {
            SpaceSpec::Tagged { inner, .. } => inner,
            other => other,
        }
    }

    /// Window of the radius `2^-level` balls: `[0, level-1]` for one-sided
    /// spaces, `[-level, level]` for two-sided ones.
    pub fn level_window(&self, level: usize) -> Option<Window> {
        if self.is_two_sided() {
            let l = level as i64;
            Some(Window::new(-l, l))
        } else if level == 0 {
            None
        } else {
            Some(Window::new(0, level as i64 - 1))
        }
    }
}

/// Closed integer interval of positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "window [{lo}, {hi}] is empty");
        Self { lo, hi }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, pos: i64) -> bool {
        self.lo <= pos && pos <= self.hi
    }

    pub fn hull(a: Option<Window>, b: Option<Window>) -> Option<Window> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(Window::new(a.lo.min(b.lo), a.hi.max(b.hi))),
        }
    }

    pub fn shifted(&self, by: i64) -> Window {
        Window::new(self.lo + by, self.hi + by)
    }
}

/// `[word]` anchored at `anchor`, optionally restricted to one tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    pub anchor: i64,
    pub word: Word,
    pub tag: Option<usize>,
}

impl Cylinder {
    pub fn new(anchor: i64, word: Word) -> Self {
        Self {
            anchor,
            word,
            tag: None,
        }
    }

    pub fn at_origin(word: Word) -> Self {
        Self::new(0, word)
    }

    pub fn tagged(tag: usize, anchor: i64, word: Word) -> Self {
        Self {
            anchor,
            word,
            tag: Some(tag),
        }
    }
}

/// Resolution of a ball partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Prefixes of length `n` (one-sided) or the window `[-n, n]` (two-sided).
    Depth(usize),
    Interval(i64, i64),
}

/// Canonical clopen subset of a [`SpaceSpec`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    space: Arc<SpaceSpec>,
    window: Option<Window>,
    /// One sorted, deduplicated word list per tag slot.
    words: Vec<Vec<Word>>,
}

impl ClopenSet {
    pub fn empty(space: &Arc<SpaceSpec>) -> Self {
        Self {
            space: space.clone(),
            window: None,
            words: vec![Vec::new(); space.tag_count()],
        }
    }

    pub fn whole(space: &Arc<SpaceSpec>) -> Self {
        Self {
            space: space.clone(),
            window: None,
            words: vec![vec![Vec::new()]; space.tag_count()],
        }
    }

    /// Whole inner space under a single tag.
    pub fn whole_tag(space: &Arc<SpaceSpec>, tag: usize) -> Self {
        let mut words = vec![Vec::new(); space.tag_count()];
        words[tag] = vec![Vec::new()];
        Self {
            space: space.clone(),
            window: None,
            words,
        }
    }

    pub fn cylinder(space: &Arc<SpaceSpec>, cyl: &Cylinder) -> Result<Self, ClopenError> {
        validate_cylinder(space, cyl)?;
        let tags: Vec<usize> = match cyl.tag {
            Some(t) => vec![t],
            None => (0..space.tag_count()).collect(),
        };
        let mut words = vec![Vec::new(); space.tag_count()];
        for t in tags {
            words[t] = vec![cyl.word.clone()];
        }
        let window = if cyl.word.is_empty() {
            None
        } else {
            Some(Window::new(
                cyl.anchor,
                cyl.anchor + cyl.word.len() as i64 - 1,
            ))
        };
        Ok(Self::from_parts(space.clone(), window, words))
    }

    /// Canonical union of a list of cylinders.
    pub fn normalize(space: &Arc<SpaceSpec>, raw: &[Cylinder]) -> Result<Self, ClopenError> {
        let mut window = None;
        for c in raw {
            validate_cylinder(space, c)?;
            if !c.word.is_empty() {
                window = Window::hull(
                    window,
                    Some(Window::new(c.anchor, c.anchor + c.word.len() as i64 - 1)),
                );
            }
        }
        let alpha = space.alphabet().len();
        let mut words = vec![Vec::new(); space.tag_count()];
        for c in raw {
            let cwin = if c.word.is_empty() {
                None
            } else {
                Some(Window::new(c.anchor, c.anchor + c.word.len() as i64 - 1))
            };
            let expanded = expand(alpha, std::slice::from_ref(&c.word), cwin, window);
            match c.tag {
                Some(t) => words[t].extend(expanded),
                None => {
                    for slot in words.iter_mut() {
                        slot.extend(expanded.iter().cloned());
                    }
                }
            }
        }
        for slot in words.iter_mut() {
            slot.sort();
            slot.dedup();
        }
        Ok(Self::from_parts(space.clone(), window, words))
    }

    /// Builds a canonical set from possibly unsorted, non-minimal parts.
    pub(crate) fn from_parts(
        space: Arc<SpaceSpec>,
        window: Option<Window>,
        mut words: Vec<Vec<Word>>,
    ) -> Self {
        debug_assert_eq!(words.len(), space.tag_count());
        for slot in words.iter_mut() {
            slot.sort();
            slot.dedup();
        }
        let mut set = Self {
            space,
            window,
            words,
        };
        set.trim();
        set
    }

    /// Set whose `tag` slot is `inner` (a set over the untagged base space)
    /// and every other slot empty.
    pub fn lift_to_tag(
        space: &Arc<SpaceSpec>,
        tag: usize,
        inner: &ClopenSet,
    ) -> Result<Self, ClopenError> {
        if space.base() != inner.space.as_ref() {
            return Err(ClopenError::SpaceMismatch);
        }
        let mut words = vec![Vec::new(); space.tag_count()];
        words[tag] = inner.words[0].clone();
        Ok(Self::from_parts(space.clone(), inner.window, words))
    }

    /// The slot `tag` as a set over the untagged base space.
    pub fn tag_part(&self, tag: usize) -> ClopenSet {
        let base = Arc::new(self.space.base().clone());
        Self::from_parts(base, self.window, vec![self.words[tag].clone()])
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn window(&self) -> Option<Window> {
        self.window
    }

    /// Sorted words of a tag slot over [`Self::window`].
    pub fn words(&self, tag: usize) -> &[Word] {
        &self.words[tag]
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(Vec::is_empty)
    }

    pub fn is_whole(&self) -> bool {
        self.window.is_none() && self.words.iter().all(|w| !w.is_empty())
    }

    /// Word count summed over tags.
    pub fn word_count(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    /// Smallest ball level at which this set is a union of balls.
    pub fn level(&self) -> usize {
        match self.window {
            None => 0,
            Some(w) if self.space.is_two_sided() => {
                w.lo.unsigned_abs().max(w.hi.unsigned_abs()) as usize
            }
            Some(w) => (w.hi + 1) as usize,
        }
    }

    /// Word sets of every tag refined to the window `to`, which must contain
    /// the current window.
    pub fn refined(&self, to: Option<Window>) -> Vec<Vec<Word>> {
        let alpha = self.space.alphabet().len();
        self.words
            .iter()
            .map(|ws| expand(alpha, ws, self.window, to))
            .collect()
    }

    fn check_space(&self, other: &Self) -> Result<(), ClopenError> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(ClopenError::SpaceMismatch)
        }
    }

    fn combine(
        &self,
        other: &Self,
        op: fn(&[Word], &[Word]) -> Vec<Word>,
    ) -> Result<Self, ClopenError> {
        self.check_space(other)?;
        let window = Window::hull(self.window, other.window);
        let a = self.refined(window);
        let b = other.refined(window);
        let words = a.iter().zip(&b).map(|(x, y)| op(x, y)).collect();
        Ok(Self::from_parts(self.space.clone(), window, words))
    }

    pub fn try_union(&self, other: &Self) -> Result<Self, ClopenError> {
        self.combine(other, sorted_union)
    }

    pub fn try_intersection(&self, other: &Self) -> Result<Self, ClopenError> {
        self.check_space(other)?;
        if covers(self.window, other.window) {
            Ok(self.filter_by(other, true))
        } else if covers(other.window, self.window) {
            Ok(other.filter_by(self, true))
        } else {
            self.combine(other, sorted_intersection)
        }
    }

    pub fn try_difference(&self, other: &Self) -> Result<Self, ClopenError> {
        self.check_space(other)?;
        if covers(self.window, other.window) {
            Ok(self.filter_by(other, false))
        } else {
            self.combine(other, sorted_difference)
        }
    }

    /// Keeps the words whose restriction to `other`'s window lies in `other`
    /// (or outside it, when `inside` is false). The window of `self` must
    /// cover that of `other`; refining only the deeper side avoids an
    /// exponential blowup when a deep set meets a shallow one.
    fn filter_by(&self, other: &Self, inside: bool) -> Self {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(mine, theirs)| {
                mine.iter()
                    .filter(|w| {
                        let hit = match (self.window, other.window) {
                            (Some(a), Some(b)) => {
                                let start = (b.lo - a.lo) as usize;
                                let slice = &w[start..start + b.len()];
                                theirs.binary_search_by(|t| t.as_slice().cmp(slice)).is_ok()
                            }
                            _ => !theirs.is_empty(),
                        };
                        hit == inside
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_parts(self.space.clone(), self.window, words)
    }

    pub fn try_is_subset(&self, other: &Self) -> Result<bool, ClopenError> {
        Ok(self.try_difference(other)?.is_empty())
    }

    pub fn complement(&self) -> Self {
        let len = self.window.map_or(0, |w| w.len());
        let all = self.space.alphabet().words(len);
        let words = self
            .words
            .iter()
            .map(|ws| sorted_difference(&all, ws))
            .collect();
        Self::from_parts(self.space.clone(), self.window, words)
    }

    /// Whether the cylinder `[word]` at `anchor` (in slot `tag`) is contained
    /// in the set.
    pub fn contains_cylinder(&self, tag: usize, anchor: i64, word: &[Sym]) -> bool {
        let Some(win) = self.window else {
            return !self.words[tag].is_empty();
        };
        let cwin = if word.is_empty() {
            None
        } else {
            Some(Window::new(anchor, anchor + word.len() as i64 - 1))
        };
        match cwin {
            Some(c) if c.lo <= win.lo && win.hi <= c.hi => {
                let start = (win.lo - c.lo) as usize;
                let slice = &word[start..start + win.len()];
                self.words[tag]
                    .binary_search_by(|w| w.as_slice().cmp(slice))
                    .is_ok()
            }
            _ => {
                let mut cyl = Cylinder::new(anchor, word.to_vec());
                if self.space.tags().is_some() {
                    cyl.tag = Some(tag);
                }
                ClopenSet::cylinder(&self.space, &cyl)
                    .and_then(|c| c.try_is_subset(self))
                    .unwrap_or(false)
            }
        }
    }

    /// Same word sets, with every position moved by `by` (two-sided spaces).
    pub fn shifted(&self, by: i64) -> Self {
        assert!(
            self.space.is_two_sided(),
            "anchor shifts need a two-sided space"
        );
        Self {
            space: self.space.clone(),
            window: self.window.map(|w| w.shifted(by)),
            words: self.words.clone(),
        }
    }

    /// One-sided only: the set `{ a x : a in A^n, x in self }`.
    pub fn prepend_free(&self, n: usize) -> Self {
        assert!(
            !self.space.is_two_sided(),
            "prepend_free needs a one-sided space"
        );
        if n == 0 || self.window.is_none() {
            return self.clone();
        }
        let w = self.window.expect("checked above");
        let prefixes = self.space.alphabet().words(n);
        let words = self
            .words
            .iter()
            .map(|ws| {
                let mut out = Vec::with_capacity(prefixes.len() * ws.len());
                for p in &prefixes {
                    for x in ws {
                        let mut v = p.clone();
                        v.extend_from_slice(x);
                        out.push(v);
                    }
                }
                out
            })
            .collect();
        Self::from_parts(
            self.space.clone(),
            Some(Window::new(0, w.hi + n as i64)),
            words,
        )
    }

    /// The set as a list of disjoint cylinders over its window.
    pub fn cylinders(&self) -> Vec<Cylinder> {
        let tagged = self.space.tags().is_some();
        let anchor = self.window.map_or(0, |w| w.lo);
        let mut out = Vec::new();
        for (t, ws) in self.words.iter().enumerate() {
            for w in ws {
                out.push(Cylinder {
                    anchor,
                    word: w.clone(),
                    tag: tagged.then_some(t),
                });
            }
        }
        out
    }

    /// Removes end positions on which the word set is a full product.
    fn trim(&mut self) {
        if self.is_empty() {
            self.window = None;
            return;
        }
        let k = self.space.alphabet().len();
        let two_sided = self.space.is_two_sided();
        loop {
            let Some(win) = self.window else { return };
            let mut changed = false;
            if self.words.iter().all(|ws| last_position_free(ws, k)) {
                for ws in self.words.iter_mut() {
                    let mut v: Vec<Word> = ws.iter().map(|w| w[..w.len() - 1].to_vec()).collect();
                    v.dedup();
                    *ws = v;
                }
                self.window = (win.len() > 1).then(|| Window::new(win.lo, win.hi - 1));
                changed = true;
            } else if two_sided && self.words.iter().all(|ws| first_position_free(ws, k)) {
                for ws in self.words.iter_mut() {
                    let mut v: Vec<Word> = ws.iter().map(|w| w[1..].to_vec()).collect();
                    v.sort();
                    v.dedup();
                    *ws = v;
                }
                self.window = (win.len() > 1).then(|| Window::new(win.lo + 1, win.hi));
                changed = true;
            }
            if !changed {
                return;
            }
        }
    }
}

/// Whether window `a` contains window `b`; the empty window is contained
/// in every window.
fn covers(a: Option<Window>, b: Option<Window>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a.lo <= b.lo && b.hi <= a.hi,
    }
}

fn validate_cylinder(space: &SpaceSpec, c: &Cylinder) -> Result<(), ClopenError> {
    if !space.is_two_sided() && c.anchor != 0 {
        return Err(ClopenError::Cylinder(format!(
            "one-sided cylinders are anchored at 0, got {}",
            c.anchor
        )));
    }
    let k = space.alphabet().len();
    if let Some(&s) = c.word.iter().find(|&&s| usize::from(s) >= k) {
        return Err(ClopenError::Cylinder(format!(
            "symbol index {s} out of range"
        )));
    }
    match (space.tags(), c.tag) {
        (Some(tags), Some(t)) if t >= tags.len() => {
            Err(ClopenError::Cylinder(format!("tag index {t} out of range")))
        }
        (None, Some(_)) => Err(ClopenError::Cylinder(
            "untagged space does not accept tags".into(),
        )),
        _ => Ok(()),
    }
}

/// Every group of words sharing all but the last symbol has all `k` last symbols.
fn last_position_free(ws: &[Word], k: usize) -> bool {
    if ws.is_empty() {
        return true;
    }
    if ws[0].is_empty() {
        return false;
    }
    if !ws.len().is_multiple_of(k) {
        return false;
    }
    ws.chunks(k).all(|chunk| {
        let head = &chunk[0][..chunk[0].len() - 1];
        chunk
            .iter()
            .enumerate()
            .all(|(i, w)| &w[..w.len() - 1] == head && usize::from(w[w.len() - 1]) == i)
    })
}

fn first_position_free(ws: &[Word], k: usize) -> bool {
    if ws.is_empty() {
        return true;
    }
    if ws[0].is_empty() || !ws.len().is_multiple_of(k) {
        return false;
    }
    let block = ws.len() / k;
    // Sorted order groups by first symbol; each block must carry the same tails.
    (0..k).all(|s| {
        let chunk = &ws[s * block..(s + 1) * block];
        chunk.iter().all(|w| usize::from(w[0]) == s)
            && chunk
                .iter()
                .zip(&ws[..block])
                .all(|(a, b)| a[1..] == b[1..])
    })
}

/// Refines words over `from` to words over `to` (which contains `from`).
fn expand(k: usize, ws: &[Word], from: Option<Window>, to: Option<Window>) -> Vec<Word> {
    let (left, right) = match (from, to) {
        (_, None) => return ws.to_vec(),
        (None, Some(t)) => (t.len(), 0),
        (Some(f), Some(t)) => {
            debug_assert!(t.lo <= f.lo && f.hi <= t.hi);
            ((f.lo - t.lo) as usize, (t.hi - f.hi) as usize)
        }
    };
    if left == 0 && right == 0 {
        return ws.to_vec();
    }
    let lefts = all_words(k, left);
    let rights = all_words(k, right);
    let mut out = Vec::with_capacity(lefts.len() * ws.len() * rights.len());
    for l in &lefts {
        for w in ws {
            for r in &rights {
                let mut v = Vec::with_capacity(l.len() + w.len() + r.len());
                v.extend_from_slice(l);
                v.extend_from_slice(w);
                v.extend_from_slice(r);
                out.push(v);
            }
        }
    }
    out
}

pub(crate) fn sorted_union(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn sorted_intersection(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn sorted_difference(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut out = Vec::new();
    let mut j = 0;
    for w in a {
        while j < b.len() && b[j] < *w {
            j += 1;
        }
        if j >= b.len() || b[j] != *w {
            out.push(w.clone());
        }
    }
    out
}

/// The partition of `space` into all cylinders of the given resolution, in
/// enumeration order.
pub fn balls(space: &Arc<SpaceSpec>, resolution: Resolution) -> Vec<ClopenSet> {
    let window = match resolution {
        Resolution::Depth(n) => space.level_window(n),
        Resolution::Interval(lo, hi) => {
            assert!(
                space.is_two_sided() || lo == 0,
                "one-sided intervals start at 0"
            );
            Some(Window::new(lo, hi))
        }
    };
    let len = window.map_or(0, |w| w.len());
    let anchor = window.map_or(0, |w| w.lo);
    let words = space.alphabet().words(len);
    let mut out = Vec::with_capacity(words.len() * space.tag_count());
    let tagged = space.tags().is_some();
    for t in 0..space.tag_count() {
        for w in &words {
            let cyl = Cylinder {
                anchor,
                word: w.clone(),
                tag: tagged.then_some(t),
            };
            out.push(ClopenSet::cylinder(space, &cyl).expect("generated cylinder is valid"));
        }
    }
    out
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet({self})")
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let alpha = self.space.alphabet();
        let tags = self.space.tags();
        let mut first = true;
        for (t, ws) in self.words.iter().enumerate() {
            for w in ws {
                if !first {
                    write!(f, " ∪ ")?;
                }
                first = false;
                if let Some(tags) = tags {
                    write!(f, "{}:", tags[t])?;
                }
                match self.window {
                    None => write!(f, "X")?,
                    Some(win) if self.space.is_two_sided() => {
                        write!(f, "[{}]@{}", alpha.render(w), win.lo)?
                    }
                    Some(_) => write!(f, "[{}]", alpha.render(w))?,
                }
            }
        }
        Ok(())
    }
}

/// Boolean algebra of clopen sets, used by the generic algorithms.
///
/// Operands always come from the same system; the implementations panic on a
/// space mismatch, which callers rule out by validating inputs up front.
pub trait SetAlgebra:
    Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn union(&self, other: &Self) -> Self;
    fn intersection(&self, other: &Self) -> Self;
    fn difference(&self, other: &Self) -> Self;
    fn complement(&self) -> Self;
    fn is_empty(&self) -> bool;
    /// Size of the representation, used to cut off runaway fixpoints.
    fn size(&self) -> usize;
    fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }
}

impl SetAlgebra for ClopenSet {
    fn union(&self, other: &Self) -> Self {
        self.try_union(other).expect("clopen space mismatch")
    }

    fn intersection(&self, other: &Self) -> Self {
        self.try_intersection(other).expect("clopen space mismatch")
    }

    fn difference(&self, other: &Self) -> Self {
        self.try_difference(other).expect("clopen space mismatch")
    }

    fn complement(&self) -> Self {
        ClopenSet::complement(self)
    }

    fn is_empty(&self) -> bool {
        ClopenSet::is_empty(self)
    }

    fn size(&self) -> usize {
        self.word_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Arc<SpaceSpec> {
        SpaceSpec::one_sided(Alphabet::binary())
    }

    fn cyl(space: &Arc<SpaceSpec>, w: &str) -> ClopenSet {
        let word = space.alphabet().parse_word(w).unwrap();
        ClopenSet::cylinder(space, &Cylinder::at_origin(word)).unwrap()
    }

    #[test]
    fn union_of_all_letters_is_whole() {
        let s = bin();
        let u = ClopenSet::normalize(
            &s,
            &[Cylinder::at_origin(vec![0]), Cylinder::at_origin(vec![1])],
        )
        .unwrap();
        assert!(u.is_whole());
        assert_eq!(u.window(), None);
    }

    #[test]
    fn absorption_of_longer_cylinder() {
        let s = bin();
        let u = ClopenSet::normalize(
            &s,
            &[
                Cylinder::at_origin(vec![0, 1]),
                Cylinder::at_origin(vec![0]),
            ],
        )
        .unwrap();
        assert_eq!(u, cyl(&s, "0"));
    }

    #[test]
    fn depth_two_set_matches_enumeration() {
        let s = bin();
        let u = ClopenSet::normalize(
            &s,
            &[
                Cylinder::at_origin(vec![0, 0]),
                Cylinder::at_origin(vec![1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(u.window(), Some(Window::new(0, 1)));
        // membership of each depth-2 cylinder, by enumeration
        let members: Vec<bool> = s
            .alphabet()
            .words(2)
            .iter()
            .map(|w| u.contains_cylinder(0, 0, w))
            .collect();
        assert_eq!(members, vec![true, false, false, true]);
    }

    #[test]
    fn complements() {
        let s = bin();
        assert_eq!(cyl(&s, "0").complement(), cyl(&s, "1"));
        let a = cyl(&s, "00").try_union(&cyl(&s, "11")).unwrap();
        let c = a.complement();
        assert_eq!(c.words(0), &[vec![0, 1], vec![1, 0]]);
        assert!(cyl(&s, "00")
            .try_intersection(&cyl(&s, "01"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn subset_and_mismatch() {
        let s = bin();
        assert!(cyl(&s, "011").try_is_subset(&cyl(&s, "01")).unwrap());
        let other = SpaceSpec::one_sided(Alphabet::from_chars("ab").unwrap());
        assert_eq!(
            cyl(&s, "0").try_union(&cyl(&other, "a")),
            Err(ClopenError::SpaceMismatch)
        );
    }

    #[test]
    fn ball_counts() {
        let s = bin();
        assert_eq!(balls(&s, Resolution::Depth(1)).len(), 2);
        assert_eq!(balls(&s, Resolution::Depth(2)).len(), 4);
        let z = SpaceSpec::two_sided(Alphabet::binary());
        let b = balls(&z, Resolution::Interval(-1, 1));
        assert_eq!(b.len(), 8);
        let union = b
            .iter()
            .fold(ClopenSet::empty(&z), |acc, x| acc.try_union(x).unwrap());
        assert!(union.is_whole());
    }

    #[test]
    fn two_sided_trim_keeps_anchor() {
        let z = SpaceSpec::two_sided(Alphabet::binary());
        let c = ClopenSet::cylinder(&z, &Cylinder::new(5, vec![1])).unwrap();
        assert_eq!(c.window(), Some(Window::new(5, 5)));
        // refine to [3,6] and back
        let wide = ClopenSet::from_parts(
            z.clone(),
            Some(Window::new(3, 6)),
            c.refined(Some(Window::new(3, 6))),
        );
        assert_eq!(wide, c);
        assert_eq!(c.shifted(-5).level(), 0);
    }

    #[test]
    fn tagged_slots() {
        let t = SpaceSpec::tagged(
            vec!["p".into(), "q".into()],
            SpaceSpec::TwoSided(Alphabet::binary()),
        )
        .unwrap();
        let a = ClopenSet::cylinder(&t, &Cylinder::tagged(1, 0, vec![1])).unwrap();
        assert!(a.words(0).is_empty());
        assert!(a.complement().tag_part(0).is_whole());
        let whole_q = ClopenSet::whole_tag(&t, 1);
        assert!(a.try_is_subset(&whole_q).unwrap());
        assert_eq!(a.tag_part(1).words(0), &[vec![1]]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Alphabet::from_chars("00").is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        let s = bin();
        assert!(ClopenSet::cylinder(&s, &Cylinder::new(1, vec![0])).is_err());
        assert!(ClopenSet::cylinder(&s, &Cylinder::at_origin(vec![2])).is_err());
    }
}
