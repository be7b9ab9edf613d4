//! Systems on finite-or-infinite words and on `N u {inf}`, realized on padded
//! one-sided shift spaces.
//!
//! A word of `A^* u A^N` is stored as a point of `(A u {PAD})^N` in which the
//! pad symbol is followed only by pads. A counter value `n` is `1^n 0^inf`
//! and infinity is `1^inf`. Maps read everything after the first pad (or the
//! first `0` of a unary track) as padding, which makes them continuous on the
//! whole ambient space; the nonemptiness oracles enforce the constraint.

use std::sync::Arc;

use super::{
    clopen_space_methods, pad_closed, padded_track, preimage_by_prefix_image, render_track,
    EffectiveSystem, SystemError, Zipper,
};
use crate::clopen::{Alphabet, ClopenSet, Cylinder, SpaceSpec, Sym, Word};

/// Padding symbol appended to word alphabets.
pub const PAD: &str = "⊥";

/// Post tag system: delete `deletion` symbols from the front and append the
/// production of the first deleted symbol. Words shorter than `deletion` are
/// fixed points.
#[derive(Debug, Clone)]
pub struct TagSystem {
    space: Arc<SpaceSpec>,
    deletion: usize,
    productions: Vec<Word>,
    pad: Sym,
}

impl TagSystem {
    pub fn new(
        alphabet: &Alphabet,
        deletion: usize,
        productions: Vec<Word>,
    ) -> Result<Self, SystemError> {
        if deletion == 0 {
            return Err(SystemError::Spec(
                "tag systems delete at least one symbol".into(),
            ));
        }
        if productions.len() != alphabet.len() {
            return Err(SystemError::Spec(
                "one production per symbol is required".into(),
            ));
        }
        if productions
            .iter()
            .flatten()
            .any(|&s| usize::from(s) >= alphabet.len())
        {
            return Err(SystemError::Spec(
                "production uses a symbol outside the alphabet".into(),
            ));
        }
        let space = SpaceSpec::one_sided(padded_alphabet(alphabet)?);
        Ok(Self {
            space,
            deletion,
            productions,
            pad: alphabet.len() as Sym,
        })
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn pad(&self) -> Sym {
        self.pad
    }

    /// One rewriting step on a finite word.
    pub fn step_word(&self, word: &[Sym]) -> Word {
        if word.len() < self.deletion {
            return word.to_vec();
        }
        let mut out = word[self.deletion..].to_vec();
        out.extend_from_slice(&self.productions[usize::from(word[0])]);
        out
    }

    /// The isolated point of a finite word.
    pub fn point(&self, word: &[Sym]) -> ClopenSet {
        let mut w = word.to_vec();
        w.push(self.pad);
        ClopenSet::cylinder(&self.space, &Cylinder::at_origin(w)).expect("padded word is valid")
    }

    fn image(&self, prefix: &[Sym], need: usize) -> Word {
        let (content, complete) = padded_track(prefix, self.pad);
        if complete {
            render_track(&self.step_word(content), true, self.pad, need)
        } else if content.len() >= self.deletion {
            content[self.deletion..].to_vec()
        } else {
            Vec::new()
        }
    }
}

impl EffectiveSystem for TagSystem {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        set.words(0).iter().any(|w| pad_closed(w, self.pad))
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        preimage_by_prefix_image(&self.space, set, |_, p, need| {
            (Some(0), self.image(p, need))
        })
    }

    fn describe(&self) -> String {
        format!("tag system deleting {} symbols", self.deletion)
    }
}

fn padded_alphabet(alphabet: &Alphabet) -> Result<Alphabet, SystemError> {
    let mut symbols = alphabet.symbols().to_vec();
    symbols.push(PAD.to_string());
    Ok(Alphabet::new(symbols)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterInstr {
    Inc(usize),
    /// Decrement, with `0 - 1 = 0`.
    Dec(usize),
    /// Jump to the target when the counter is zero, else fall through.
    Jz(usize, usize),
    Halt,
}

/// Program of a `k`-counter machine. Falling off the end halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterProgram {
    counters: usize,
    instrs: Vec<CounterInstr>,
}

impl CounterProgram {
    pub fn new(counters: usize, instrs: Vec<CounterInstr>) -> Result<Self, SystemError> {
        if counters == 0 {
            return Err(SystemError::Spec(
                "a counter machine needs a counter".into(),
            ));
        }
        for (pc, ins) in instrs.iter().enumerate() {
            let ok = match *ins {
                CounterInstr::Inc(i) | CounterInstr::Dec(i) => i < counters,
                CounterInstr::Jz(i, t) => i < counters && t <= instrs.len(),
                CounterInstr::Halt => true,
            };
            if !ok {
                return Err(SystemError::Spec(format!(
                    "instruction {pc} refers outside the machine"
                )));
            }
        }
        Ok(Self { counters, instrs })
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn instrs(&self) -> &[CounterInstr] {
        &self.instrs
    }

    pub fn is_halted(&self, pc: usize) -> bool {
        pc >= self.instrs.len() || self.instrs[pc] == CounterInstr::Halt
    }

    /// One step on finite values; `None` stands for infinity.
    pub fn step(&self, pc: usize, values: &mut [Option<u64>]) -> usize {
        if self.is_halted(pc) {
            return pc;
        }
        match self.instrs[pc] {
            CounterInstr::Inc(i) => {
                values[i] = values[i].map(|v| v + 1);
                pc + 1
            }
            CounterInstr::Dec(i) => {
                values[i] = values[i].map(|v| v.saturating_sub(1));
                pc + 1
            }
            CounterInstr::Jz(i, t) => {
                if values[i] == Some(0) {
                    t
                } else {
                    pc + 1
                }
            }
            CounterInstr::Halt => pc,
        }
    }
}

/// A counter machine on `Q x (N u {inf})^k`: tags are program counters (the
/// last tag is the halted state past the end), tracks are unary counters.
#[derive(Debug, Clone)]
pub struct CounterMachine {
    space: Arc<SpaceSpec>,
    program: CounterProgram,
    zip: Zipper,
}

impl CounterMachine {
    pub fn new(program: CounterProgram) -> Result<Self, SystemError> {
        let zip = Zipper::new(2, program.counters)?;
        let mut tags: Vec<String> = (0..program.instrs.len())
            .map(|i| format!("pc{i}"))
            .collect();
        tags.push("end".into());
        let space = SpaceSpec::tagged(tags, SpaceSpec::OneSided(Alphabet::indexed(zip.size())?))?;
        Ok(Self {
            space,
            program,
            zip,
        })
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn program(&self) -> &CounterProgram {
        &self.program
    }

    /// The isolated point of a finite configuration.
    pub fn point(&self, pc: usize, values: &[u64]) -> ClopenSet {
        assert_eq!(values.len(), self.program.counters);
        let len = values.iter().max().map_or(0, |&m| m as usize) + 1;
        let tracks: Vec<Word> = values
            .iter()
            .map(|&v| (0..len).map(|i| Sym::from(i < v as usize)).collect())
            .collect();
        let word = self.zip.join(&tracks, len);
        ClopenSet::cylinder(
            &self.space,
            &Cylinder::tagged(pc.min(self.program.instrs.len()), 0, word),
        )
        .expect("point cylinder is valid")
    }

    fn image(&self, tag: usize, prefix: &[Sym], need: usize) -> (Option<usize>, Word) {
        let tracks = self.zip.split(prefix);
        // Each track as (known leading ones, value fully determined).
        let mut known: Vec<(usize, bool)> = tracks
            .iter()
            .map(|t| {
                let (ones, complete) = padded_track(t, 0);
                (ones.len(), complete)
            })
            .collect();
        let mut next = tag;
        if !self.program.is_halted(tag) {
            match self.program.instrs[tag] {
                CounterInstr::Inc(i) => {
                    known[i].0 += 1;
                    next = tag + 1;
                }
                CounterInstr::Dec(i) => {
                    let (ones, complete) = known[i];
                    if ones == 0 && !complete {
                        known[i] = (0, false);
                    } else {
                        known[i] = (ones.saturating_sub(1), complete);
                    }
                    next = tag + 1;
                }
                CounterInstr::Jz(i, t) => {
                    let (ones, complete) = known[i];
                    next = match (ones, complete) {
                        (0, true) => t,
                        (0, false) => return (None, Vec::new()),
                        _ => tag + 1,
                    };
                }
                CounterInstr::Halt => {}
            }
        }
        let rendered: Vec<Word> = known
            .iter()
            .map(|&(ones, complete)| render_track(&vec![1; ones], complete, 0, need))
            .collect();
        let len = rendered.iter().map(Vec::len).min().unwrap_or(0);
        (Some(next), self.zip.join(&rendered, len))
    }
}

impl EffectiveSystem for CounterMachine {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        (0..self.space.tag_count()).any(|t| {
            set.words(t)
                .iter()
                .any(|w| self.zip.split(w).iter().all(|track| pad_closed(track, 0)))
        })
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        preimage_by_prefix_image(&self.space, set, |t, p, need| self.image(t, p, need))
    }

    fn describe(&self) -> String {
        format!(
            "{}-counter machine with {} instructions",
            self.program.counters,
            self.program.instrs.len()
        )
    }
}

/// Decodes the counter values of a zipped prefix; `None` when a value is not
/// determined by the prefix.
pub fn counter_values(word: &[Sym], counters: usize) -> Vec<Option<u64>> {
    let zip = Zipper {
        base: 2,
        tracks: counters,
    };
    zip.split(word)
        .iter()
        .map(|t| {
            let (ones, complete) = padded_track(t, 0);
            complete.then_some(ones.len() as u64)
        })
        .collect()
}

/// The value `n` of a unary prefix `1^n 0...`, if determined.
pub fn collatz_value(word: &[Sym]) -> Option<u64> {
    let (ones, complete) = padded_track(word, 0);
    complete.then_some(ones.len() as u64)
}

/// Generalized Collatz map `n -> (a_r n + b_r) / c_r` for `n = r mod m`,
/// extended by `inf -> inf`.
#[derive(Debug, Clone)]
pub struct CollatzMap {
    space: Arc<SpaceSpec>,
    modulus: u64,
    branches: Vec<(u64, u64, u64)>,
}

impl CollatzMap {
    /// `branches[r] = (a, b, c)`; every branch must be integral on its
    /// residue class and increasing (`a >= 1`) so that infinity is a
    /// continuous fixed point.
    pub fn new(branches: Vec<(u64, u64, u64)>) -> Result<Self, SystemError> {
        let modulus = branches.len() as u64;
        if modulus == 0 {
            return Err(SystemError::Spec(
                "a Collatz map needs at least one branch".into(),
            ));
        }
        for (r, &(a, b, c)) in branches.iter().enumerate() {
            if a == 0 || c == 0 {
                return Err(SystemError::Spec(format!(
                    "branch {r} must have a >= 1 and c >= 1"
                )));
            }
            if !(a * r as u64 + b).is_multiple_of(c) || !(a * modulus).is_multiple_of(c) {
                return Err(SystemError::Spec(format!(
                    "branch {r} is not integral on its residue class"
                )));
            }
        }
        Ok(Self {
            space: SpaceSpec::one_sided(Alphabet::binary()),
            modulus,
            branches,
        })
    }

    /// The `3n + 1` map.
    pub fn three_n_plus_one() -> Self {
        Self::new(vec![(1, 0, 2), (3, 1, 1)]).expect("3n+1 branches are valid")
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn apply(&self, n: u64) -> u64 {
        let (a, b, c) = self.branches[(n % self.modulus) as usize];
        (a * n + b) / c
    }

    /// The isolated point `1^n 0`.
    pub fn point(&self, n: u64) -> ClopenSet {
        let mut w = vec![1; n as usize];
        w.push(0);
        ClopenSet::cylinder(&self.space, &Cylinder::at_origin(w)).expect("unary word is valid")
    }

    /// Smallest image of a value `>= m`.
    fn image_lower_bound(&self, m: u64) -> u64 {
        (0..self.modulus)
            .map(|r| {
                let n = m + (r + self.modulus - m % self.modulus) % self.modulus;
                self.apply(n)
            })
            .min()
            .expect("modulus is positive")
    }

    fn image(&self, prefix: &[Sym], need: usize) -> Word {
        let (ones, complete) = padded_track(prefix, 0);
        let n = ones.len() as u64;
        let value = if complete {
            self.apply(n)
        } else {
            self.image_lower_bound(n)
        };
        let ones = vec![1; value.min(need as u64) as usize];
        render_track(&ones, complete, 0, need)
    }
}

impl EffectiveSystem for CollatzMap {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        set.words(0).iter().any(|w| pad_closed(w, 0))
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        preimage_by_prefix_image(&self.space, set, |_, p, need| {
            (Some(0), self.image(p, need))
        })
    }

    fn describe(&self) -> String {
        format!("Collatz map with {} branches", self.modulus)
    }
}
