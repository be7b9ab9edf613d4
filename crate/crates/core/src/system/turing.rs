//! Turing machines as symbolic systems: the moving-tape machine on
//! `Q x A^Z` and the machine with blank on finite-or-infinite tapes.

use std::collections::HashSet;
use std::sync::Arc;

use super::{
    clopen_space_methods, pad_closed, padded_track, preimage_by_prefix_image, render_track,
    EffectiveSystem, SystemError, Zipper, PAD,
};
use crate::clopen::{Alphabet, ClopenSet, SpaceSpec, Sym, Window, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
    N,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
            Move::N => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: Sym,
    pub mv: Move,
    pub next: usize,
}

/// A deterministic Turing machine. Symbol 0 is the blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    states: Vec<String>,
    alphabet: Alphabet,
    initial: usize,
    halting: Vec<bool>,
    /// Indexed by `state * |A| + symbol`; `None` exactly on halting states.
    table: Vec<Option<Transition>>,
}

impl MachineSpec {
    /// `rules` are `(state, read, transition)`; every non-halting state needs
    /// a rule for every symbol.
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        initial: usize,
        halting: &[usize],
        rules: &[(usize, Sym, Transition)],
    ) -> Result<Self, SystemError> {
        let nq = states.len();
        let k = alphabet.len();
        if initial >= nq || halting.iter().any(|&h| h >= nq) {
            return Err(SystemError::Spec("state index out of range".into()));
        }
        let mut halt = vec![false; nq];
        for &h in halting {
            halt[h] = true;
        }
        let mut table = vec![None; nq * k];
        for &(q, a, t) in rules {
            if q >= nq || usize::from(a) >= k || t.next >= nq || usize::from(t.write) >= k {
                return Err(SystemError::Spec(format!(
                    "rule for state {q} refers outside the machine"
                )));
            }
            if halt[q] {
                continue;
            }
            let slot = &mut table[q * k + usize::from(a)];
            if slot.is_some() {
                return Err(SystemError::Spec(format!(
                    "duplicate rule for ({}, {})",
                    states[q],
                    alphabet.symbol(a)
                )));
            }
            *slot = Some(t);
        }
        for q in (0..nq).filter(|&q| !halt[q]) {
            for a in 0..k {
                if table[q * k + a].is_none() {
                    return Err(SystemError::Spec(format!(
                        "no rule for state {} reading {}",
                        states[q],
                        alphabet.symbol(a as Sym)
                    )));
                }
            }
        }
        Ok(Self {
            states,
            alphabet,
            initial,
            halting: halt,
            table,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_halting(&self, q: usize) -> bool {
        self.halting[q]
    }

    pub fn halting_states(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&q| self.halting[q])
            .collect()
    }

    pub fn transition(&self, q: usize, a: Sym) -> Option<Transition> {
        self.table[q * self.alphabet.len() + usize::from(a)]
    }

    /// All rules as `(state, read, transition)`.
    pub fn rules(&self) -> Vec<(usize, Sym, Transition)> {
        let k = self.alphabet.len();
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i / k, (i % k) as Sym, t)))
            .collect()
    }

    /// An equivalent machine whose head returns to the starting cell before
    /// halting.
    ///
    /// Every symbol gets a marked twin that flags the starting cell, and
    /// every state remembers on which side of that cell the head is. On
    /// reaching a halting state `h` the machine walks back to the mark and
    /// only then enters `h`. Inputs must mark cell 0 (see
    /// [`Self::homed_input`]).
    pub fn homing(&self) -> Result<Self, SystemError> {
        let k = self.alphabet.len();
        let nq = self.states.len();
        let mut symbols = self.alphabet.symbols().to_vec();
        // Marked twins get fresh single-character names.
        let fresh = Alphabet::indexed(4 * k + 64)?;
        let pool: Vec<String> = fresh
            .symbols()
            .iter()
            .filter(|s| !symbols.contains(s))
            .take(k)
            .cloned()
            .collect();
        symbols.extend(pool);
        let alphabet = Alphabet::new(symbols)?;
        let marked = |a: Sym| a + k as Sym;
        // States: (q, side) for q running or returning, then the original halting states.
        // side 0: left of the mark, 1: at or right of it.
        let run = |q: usize, side: usize| 2 * q + side;
        let halt_base = 2 * nq;
        let mut states = Vec::new();
        for q in 0..nq {
            let name = &self.states[q];
            let tag = if self.halting[q] { "ret" } else { "" };
            states.push(format!("{name}{tag}<"));
            states.push(format!("{name}{tag}>"));
        }
        for q in 0..nq {
            states.push(self.states[q].clone());
        }
        let mut rules = Vec::new();
        for q in 0..nq {
            for side in 0..2 {
                for a in 0..k as Sym {
                    if self.halting[q] {
                        // Walk back to the mark.
                        let mv = if side == 0 { Move::R } else { Move::L };
                        rules.push((
                            run(q, side),
                            a,
                            Transition {
                                write: a,
                                mv,
                                next: run(q, side),
                            },
                        ));
                        rules.push((
                            run(q, side),
                            marked(a),
                            Transition {
                                write: marked(a),
                                mv: Move::N,
                                next: halt_base + q,
                            },
                        ));
                        continue;
                    }
                    let t = self.transition(q, a).expect("total on running states");
                    rules.push((
                        run(q, side),
                        a,
                        Transition {
                            write: t.write,
                            mv: t.mv,
                            next: run(t.next, side),
                        },
                    ));
                    let new_side = match t.mv {
                        Move::L => 0,
                        Move::R => 1,
                        Move::N => side,
                    };
                    rules.push((
                        run(q, side),
                        marked(a),
                        Transition {
                            write: marked(t.write),
                            mv: t.mv,
                            next: run(t.next, new_side),
                        },
                    ));
                }
            }
        }
        // The tail copies of running states are unreachable; declaring them
        // halting keeps the table total.
        let halting: Vec<usize> = (0..nq).map(|q| halt_base + q).collect();
        Self::new(states, alphabet, run(self.initial, 1), &halting, &rules)
    }

    /// Tape for the homed version of this machine on `input` written from
    /// cell 0: the same input with cell 0 marked.
    pub fn homed_input(&self, input: &[Sym]) -> Word {
        let mut tape = if input.is_empty() {
            vec![0]
        } else {
            input.to_vec()
        };
        tape[0] += self.alphabet.len() as Sym;
        tape
    }
}

/// A finite configuration of a machine with blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TapeConfig {
    pub state: usize,
    pub head: i64,
    /// Position of `cells[0]`.
    pub offset: i64,
    pub cells: Vec<Sym>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Halted(u64),
    /// Still running after the given number of steps.
    Running(u64),
    /// A configuration repeated: the machine never halts.
    Loops,
}

impl TapeConfig {
    /// Initial configuration with `input` written from cell 0.
    pub fn initial(machine: &MachineSpec, input: &[Sym]) -> Self {
        Self {
            state: machine.initial(),
            head: 0,
            offset: 0,
            cells: input.to_vec(),
        }
    }

    pub fn read(&self, pos: i64) -> Sym {
        let i = pos - self.offset;
        if i < 0 || i >= self.cells.len() as i64 {
            0
        } else {
            self.cells[i as usize]
        }
    }

    pub fn write(&mut self, pos: i64, sym: Sym) {
        while pos < self.offset {
            self.cells.insert(0, 0);
            self.offset -= 1;
        }
        while pos >= self.offset + self.cells.len() as i64 {
            self.cells.push(0);
        }
        self.cells[(pos - self.offset) as usize] = sym;
    }

    /// One step; returns `false` on a halting state.
    pub fn step(&mut self, machine: &MachineSpec) -> bool {
        let Some(t) = machine.transition(self.state, self.read(self.head)) else {
            return false;
        };
        self.write(self.head, t.write);
        self.head += t.mv.delta();
        self.state = t.next;
        true
    }

    /// Same configuration with blank margins removed.
    pub fn normalized(&self) -> Self {
        let first = self.cells.iter().position(|&s| s != 0);
        let Some(first) = first else {
            return Self {
                state: self.state,
                head: self.head,
                offset: 0,
                cells: Vec::new(),
            };
        };
        let last = self
            .cells
            .iter()
            .rposition(|&s| s != 0)
            .expect("nonblank exists");
        Self {
            state: self.state,
            head: self.head,
            offset: self.offset + first as i64,
            cells: self.cells[first..=last].to_vec(),
        }
    }

    /// Runs up to `max_steps`, detecting repeated configurations.
    pub fn run(&mut self, machine: &MachineSpec, max_steps: u64) -> RunOutcome {
        let mut seen = HashSet::new();
        for t in 0..=max_steps {
            if machine.is_halting(self.state) {
                return RunOutcome::Halted(t);
            }
            if t == max_steps {
                break;
            }
            if !seen.insert(self.normalized()) {
                return RunOutcome::Loops;
            }
            self.step(machine);
        }
        RunOutcome::Running(max_steps)
    }
}

/// Machine with moving tape on `Q x A^Z`: the head sits at cell 0 and the
/// tape shifts. Halting states are fixed points.
#[derive(Debug, Clone)]
pub struct MovingTapeTm {
    space: Arc<SpaceSpec>,
    machine: MachineSpec,
}

impl MovingTapeTm {
    pub fn new(machine: MachineSpec) -> Result<Self, SystemError> {
        let space = SpaceSpec::tagged(
            machine.states.clone(),
            SpaceSpec::TwoSided(machine.alphabet.clone()),
        )?;
        Ok(Self { space, machine })
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn machine(&self) -> &MachineSpec {
        &self.machine
    }

    /// One step on a tape window `word` placed at `anchor`, which must cover
    /// cell 0. Returns the new state and the moved window.
    pub fn step_window(&self, state: usize, anchor: i64, word: &[Sym]) -> (usize, i64, Word) {
        let Some(t) = self.machine.transition(state, word[(-anchor) as usize]) else {
            return (state, anchor, word.to_vec());
        };
        let mut w = word.to_vec();
        w[(-anchor) as usize] = t.write;
        // The head moves by `d`, i.e. the tape shifts by `-d`.
        let d = t.mv.delta();
        (t.next, anchor - d, w)
    }
}

/// Words of `set` at window covering `0`, with symbol `from` at position 0
/// replaced by `to`; other words dropped.
fn relabel_origin(set: &ClopenSet, tag: usize, from: Sym, to: Sym) -> (Option<Window>, Vec<Word>) {
    let hull = Window::hull(set.window(), Some(Window::new(0, 0))).expect("nonempty hull");
    let refined = set.refined(Some(hull));
    let at = (-hull.lo) as usize;
    let words = refined[tag]
        .iter()
        .filter(|w| w[at] == from)
        .map(|w| {
            let mut v = w.clone();
            v[at] = to;
            v
        })
        .collect();
    (Some(hull), words)
}

impl EffectiveSystem for MovingTapeTm {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        !set.is_empty()
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        let nq = self.machine.states.len();
        let mut out = ClopenSet::empty(&self.space);
        for (q, a, t) in self.machine.rules() {
            if set.words(t.next).is_empty() {
                continue;
            }
            // After the step, position i of the new tape is position i + d
            // of the written tape.
            let moved = set.shifted(t.mv.delta());
            let (window, words) = relabel_origin(&moved, t.next, t.write, a);
            let mut slots = vec![Vec::new(); nq];
            slots[q] = words;
            let part = ClopenSet::from_parts(self.space.clone(), window, slots);
            out = out.try_union(&part).expect("same space");
        }
        for q in self.machine.halting_states() {
            out = out.try_union(&restrict_tag(set, q)).expect("same space");
        }
        out
    }

    fn describe(&self) -> String {
        format!(
            "moving-tape Turing machine with {} states",
            self.machine.states.len()
        )
    }
}

fn restrict_tag(set: &ClopenSet, tag: usize) -> ClopenSet {
    let mut slots = vec![Vec::new(); set.space().tag_count()];
    slots[tag] = set.words(tag).to_vec();
    ClopenSet::from_parts(set.space().clone(), set.window(), slots)
}

/// Machine with blank on `W x Q x W`, `W` the finite and infinite words.
///
/// Points are tagged by the state and carry two zipped padded tracks: the
/// tape left of the head read outward, and the tape from the head rightward.
/// Reading past the end of a finite track reads a blank.
#[derive(Debug, Clone)]
pub struct BlankTm {
    space: Arc<SpaceSpec>,
    machine: MachineSpec,
    zip: Zipper,
    pad: Sym,
}

impl BlankTm {
    pub fn new(machine: MachineSpec) -> Result<Self, SystemError> {
        let k = machine.alphabet.len();
        let zip = Zipper::new(k + 1, 2)?;
        let space = SpaceSpec::tagged(
            machine.states.clone(),
            SpaceSpec::OneSided(Alphabet::indexed(zip.size())?),
        )?;
        Ok(Self {
            space,
            machine,
            zip,
            pad: k as Sym,
        })
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn machine(&self) -> &MachineSpec {
        &self.machine
    }

    /// Name of the padding symbol inside each track.
    pub fn pad_name() -> &'static str {
        PAD
    }

    /// The isolated point of a finite configuration: `left` read outward
    /// from the head, `right` starting at the head cell.
    pub fn point(&self, state: usize, left: &[Sym], right: &[Sym]) -> ClopenSet {
        let len = left.len().max(right.len()) + 1;
        let pad = |w: &[Sym]| render_track(w, true, self.pad, len);
        let word = self.zip.join(&[pad(left), pad(right)], len);
        ClopenSet::cylinder(
            &self.space,
            &crate::clopen::Cylinder::tagged(state, 0, word),
        )
        .expect("valid point")
    }

    fn image(&self, tag: usize, prefix: &[Sym], need: usize) -> (Option<usize>, Word) {
        if self.machine.is_halting(tag) {
            return (Some(tag), prefix.to_vec());
        }
        let tracks = self.zip.split(prefix);
        let (left, lc) = padded_track(&tracks[0], self.pad);
        let (right, rc) = padded_track(&tracks[1], self.pad);
        // The head symbol is known once the right track has a symbol or ended.
        let head = match (right.first(), rc) {
            (Some(&a), _) => a,
            (None, true) => 0,
            (None, false) => return (None, Vec::new()),
        };
        let t = self
            .machine
            .transition(tag, head)
            .expect("total on running states");
        let rest = if right.is_empty() {
            &[][..]
        } else {
            &right[1..]
        };
        let (new_left, new_right): (Word, Word) = match t.mv {
            Move::N => (left.to_vec(), prepend(t.write, rest)),
            Move::R => (prepend(t.write, left), rest.to_vec()),
            Move::L => {
                let l0 = match (left.first(), lc) {
                    (Some(&a), _) => a,
                    (None, true) => 0,
                    (None, false) => return (Some(t.next), Vec::new()),
                };
                let left_rest = if left.is_empty() {
                    Vec::new()
                } else {
                    left[1..].to_vec()
                };
                let mut r = vec![l0, t.write];
                r.extend_from_slice(rest);
                (left_rest, r)
            }
        };
        let a = render_track(&new_left, lc, self.pad, need);
        let b = render_track(&new_right, rc, self.pad, need);
        let len = a.len().min(b.len());
        (Some(t.next), self.zip.join(&[a, b], len))
    }
}

fn prepend(a: Sym, rest: &[Sym]) -> Word {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(a);
    v.extend_from_slice(rest);
    v
}

impl EffectiveSystem for BlankTm {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        (0..self.space.tag_count()).any(|t| {
            set.words(t).iter().any(|w| {
                self.zip
                    .split(w)
                    .iter()
                    .all(|track| pad_closed(track, self.pad))
            })
        })
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        preimage_by_prefix_image(&self.space, set, |t, p, need| self.image(t, p, need))
    }

    fn describe(&self) -> String {
        format!(
            "Turing machine with blank, {} states",
            self.machine.states.len()
        )
    }
}
