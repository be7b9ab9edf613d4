//! Executable versions of the universality constructions, parameterized by a
//! Turing machine and an explicit simulation cutoff.
//!
//! Every construction that depends on halting times reads them from a
//! [`HaltTimeTable`]: a finite, inspectable record of direct simulations up
//! to a cutoff `T`. Systems built from a table are the `T`-approximations of
//! the ideal objects, which depend on the full halting problem.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::figures;
use crate::checker::{check_omega, check_regular, Budget, Evidence, Outcome, Strategy, Verdict};
use crate::clopen::{Alphabet, ClopenSet, Cylinder, SpaceSpec, Sym, Word};
use crate::language::{Partition, QueryError};
use crate::system::{
    CellularAutomaton, DynSystem, LocalRule, MachineSpec, Move, Presentation, ProductSystem,
    RunOutcome, ShiftSystem, SystemError, TapeConfig, Transition,
};

/// Halting status of the machine on one input, as far as simulation shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltEntry {
    /// Halts after exactly this many steps.
    Halts(u64),
    /// Still running at the cutoff.
    NoHaltWithin(u64),
    /// A configuration repeated before the cutoff: the machine never halts.
    Never,
}

impl HaltEntry {
    /// Patterns `0 1^n 0 0^t 1` are forbidden for `t < limit`; `None` means
    /// for every `t`.
    fn limit(self) -> Option<u64> {
        match self {
            HaltEntry::Halts(k) => Some(k),
            // Known not to halt within `t` steps for every `t <= T`.
            HaltEntry::NoHaltWithin(t) => Some(t + 1),
            HaltEntry::Never => None,
        }
    }

    pub fn halts(self) -> Option<u64> {
        match self {
            HaltEntry::Halts(k) => Some(k),
            _ => None,
        }
    }
}

/// Halting times of a machine on the unary inputs `1^n`, `n >= 1`, found by
/// direct simulation up to a cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltTimeTable {
    machine: MachineSpec,
    cutoff: u64,
    entries: BTreeMap<usize, HaltEntry>,
}

/// Tape `1^n` written from cell 0.
pub fn unary_input(n: usize) -> Word {
    vec![1; n]
}

fn simulate(machine: &MachineSpec, n: usize, cutoff: u64) -> HaltEntry {
    let mut config = TapeConfig::initial(machine, &unary_input(n));
    match config.run(machine, cutoff) {
        RunOutcome::Halted(t) => HaltEntry::Halts(t),
        RunOutcome::Running(t) => HaltEntry::NoHaltWithin(t),
        RunOutcome::Loops => HaltEntry::Never,
    }
}

impl HaltTimeTable {
    /// Simulates inputs `1..=max_input` for at most `cutoff` steps each.
    ///
    /// Input 0 is left out: its pattern `0 0 0^t 1` is a factor of every
    /// other input's pattern, so it would constrain all of them.
    pub fn build(machine: MachineSpec, max_input: usize, cutoff: u64) -> Result<Self, SystemError> {
        if machine.alphabet().len() < 2 {
            return Err(SystemError::Spec(
                "unary inputs need a machine with at least two symbols".into(),
            ));
        }
        let inputs: Vec<usize> = (1..=max_input).collect();
        let entries = std::thread::scope(|scope| {
            let handles: Vec<_> = inputs
                .iter()
                .map(|&n| {
                    let machine = &machine;
                    scope.spawn(move || (n, simulate(machine, n, cutoff)))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation thread"))
                .collect()
        });
        Ok(Self {
            machine,
            cutoff,
            entries,
        })
    }

    /// Checks recorded entries against a fresh simulation.
    pub fn from_parts(
        machine: MachineSpec,
        cutoff: u64,
        entries: BTreeMap<usize, HaltEntry>,
    ) -> Result<Self, SystemError> {
        if machine.alphabet().len() < 2 {
            return Err(SystemError::Spec(
                "unary inputs need a machine with at least two symbols".into(),
            ));
        }
        for (&n, &entry) in &entries {
            if n == 0 {
                return Err(SystemError::Spec("halt tables start at input 1".into()));
            }
            let actual = simulate(&machine, n, cutoff);
            if actual != entry {
                return Err(SystemError::Spec(format!(
                    "entry for input {n} is {entry:?} but simulation gives {actual:?}"
                )));
            }
        }
        Ok(Self {
            machine,
            cutoff,
            entries,
        })
    }

    pub fn machine(&self) -> &MachineSpec {
        &self.machine
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn entries(&self) -> &BTreeMap<usize, HaltEntry> {
        &self.entries
    }

    pub fn entry(&self, n: usize) -> Option<HaltEntry> {
        self.entries.get(&n).copied()
    }

    fn max_input(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Largest finite pattern limit, which bounds the zero runs worth counting.
    fn max_limit(&self) -> u64 {
        self.entries
            .values()
            .filter_map(|e| e.limit())
            .max()
            .unwrap_or(0)
    }
}

fn rule(state: usize, read: Sym, write: Sym, mv: Move, next: usize) -> (usize, Sym, Transition) {
    (state, read, Transition { write, mv, next })
}

/// The shipped 4-state binary machine. On `1^n` it halts after `n + 1`
/// steps when `n` is even and falls into a two-cell loop when `n` is odd.
pub fn parity_machine() -> MachineSpec {
    let (a, b, c, h) = (0, 1, 2, 3);
    let rules = [
        rule(a, 1, 1, Move::R, b),
        rule(a, 0, 0, Move::N, h),
        rule(b, 1, 1, Move::R, a),
        rule(b, 0, 0, Move::R, c),
        rule(c, 0, 0, Move::L, b),
        rule(c, 1, 1, Move::L, b),
    ];
    MachineSpec::new(
        ["A", "B", "C", "H"].map(String::from).to_vec(),
        Alphabet::binary(),
        a,
        &[h],
        &rules,
    )
    .expect("shipped machine is valid")
}

/// The 3-state, 2-symbol busy beaver champion (21 steps on the blank tape),
/// used as a stress machine: its runs on unary inputs vary widely.
pub fn busy_beaver3() -> MachineSpec {
    let (a, b, c, h) = (0, 1, 2, 3);
    let rules = [
        rule(a, 0, 1, Move::R, b),
        rule(a, 1, 1, Move::R, h),
        rule(b, 0, 0, Move::R, c),
        rule(b, 1, 1, Move::R, b),
        rule(c, 0, 1, Move::L, c),
        rule(c, 1, 1, Move::L, a),
    ];
    MachineSpec::new(
        ["A", "B", "C", "H"].map(String::from).to_vec(),
        Alphabet::binary(),
        a,
        &[h],
        &rules,
    )
    .expect("shipped machine is valid")
}

/// Vertices of the pattern automaton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum PatternState {
    /// No pending pattern.
    Free,
    /// Last symbols `0 1^m`, `m` capped one above the largest input.
    Ones(usize),
    /// Last symbols `0^z`, preceded by `0 1^n` for a tabulated `n` when
    /// present; `z` is capped past every finite limit.
    Zeros(Option<usize>, usize),
}

/// Deterministic presentation of the words avoiding every tabulated pattern
/// `0 1^n 0 0^t 1`, optionally over a third separator symbol that resets the
/// pattern search.
fn pattern_presentation(table: &HaltTimeTable, separator: bool) -> Presentation {
    let big = table.max_input() + 1;
    let zcap = table.max_limit() as usize + 2;
    // `None`: no constraint; `Some(None)`: every `t` is forbidden.
    let limit = |n: usize| {
        table
            .entry(n)
            .map(HaltEntry::limit)
            .filter(|l| *l != Some(0))
    };
    let mut index: BTreeMap<PatternState, usize> = BTreeMap::new();
    let mut order = vec![PatternState::Free];
    index.insert(PatternState::Free, 0);
    let mut edges: Vec<Vec<(Sym, usize)>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        let mut out = Vec::new();
        let zero = match s {
            PatternState::Free => Some(PatternState::Zeros(None, 1)),
            PatternState::Ones(m) => Some(PatternState::Zeros((m < big).then_some(m), 1)),
            PatternState::Zeros(n, z) => Some(PatternState::Zeros(n, (z + 1).min(zcap))),
        };
        let one = match s {
            PatternState::Free => Some(PatternState::Free),
            PatternState::Ones(m) => Some(PatternState::Ones((m + 1).min(big))),
            PatternState::Zeros(n, z) => {
                // The zero run closes `0 1^n 0 0^(z-1) 1`.
                let forbidden = n
                    .and_then(limit)
                    .is_some_and(|l| l.is_none_or(|k| ((z - 1) as u64) < k));
                (!forbidden).then_some(PatternState::Ones(1))
            }
        };
        let sep = separator.then_some(PatternState::Free);
        for (sym, target) in [(0, zero), (1, one), (2, sep)] {
            if let Some(t) = target {
                let id = *index.entry(t).or_insert_with(|| {
                    order.push(t);
                    order.len() - 1
                });
                out.push((sym, id));
            }
        }
        edges.push(out);
    }
    Presentation::new(edges, vec![0]).expect("pattern presentation is well formed")
}

/// The binary subshift avoiding `0 1^n 0 0^t 1` whenever the machine does
/// not halt on `1^n` in fewer than `t` steps, or its chaotic variant over
/// `{0, 1, §}`.
#[derive(Debug, Clone)]
pub struct UniversalShift {
    table: HaltTimeTable,
    separator: bool,
    shift: ShiftSystem,
}

pub const SEPARATOR: &str = "§";

/// The `T`-approximation of the universal subshift: only inputs in the table
/// and patterns with `t` up to their limit are forbidden.
pub fn universal_subshift(table: &HaltTimeTable) -> UniversalShift {
    let space = SpaceSpec::one_sided(Alphabet::binary());
    let shift =
        ShiftSystem::anchored(space, pattern_presentation(table, false)).expect("one-sided space");
    UniversalShift {
        table: table.clone(),
        separator: false,
        shift,
    }
}

/// The chaotic universal subshift over `{0, 1, §}`: the same patterns, with
/// `§` free to appear anywhere and breaking every pattern.
pub fn chaotic_universal(table: &HaltTimeTable) -> UniversalShift {
    let alphabet = Alphabet::new(["0", "1", SEPARATOR]).expect("valid alphabet");
    let space = SpaceSpec::one_sided(alphabet);
    let shift =
        ShiftSystem::anchored(space, pattern_presentation(table, true)).expect("one-sided space");
    UniversalShift {
        table: table.clone(),
        separator: true,
        shift,
    }
}

impl UniversalShift {
    pub fn system(&self) -> &ShiftSystem {
        &self.shift
    }

    pub fn table(&self) -> &HaltTimeTable {
        &self.table
    }

    pub fn space(&self) -> &Arc<SpaceSpec> {
        self.shift.space()
    }

    fn separator(&self) -> Result<Sym, QueryError> {
        if self.separator {
            Ok(2)
        } else {
            Err(QueryError::Invalid(
                "the binary universal subshift has no separator".into(),
            ))
        }
    }

    fn admissible(&self, w: &[Sym]) -> Result<(), QueryError> {
        if self.shift.in_language(w) {
            Ok(())
        } else {
            Err(QueryError::Invalid(format!(
                "{} is not in the language",
                self.space().alphabet().render(w)
            )))
        }
    }

    /// Period `w§` of the periodic point `(w§)^ω`, which lies in `[w]`.
    pub fn periodic_point(&self, w: &[Sym]) -> Result<Word, QueryError> {
        let sep = self.separator()?;
        self.admissible(w)?;
        let mut period = w.to_vec();
        period.push(sep);
        Ok(period)
    }

    /// Prefix `v§w` of a point of `[v]` whose shift by `|v| + 1` lies in `[w]`.
    pub fn transitivity_witness(&self, v: &[Sym], w: &[Sym]) -> Result<Word, QueryError> {
        let sep = self.separator()?;
        self.admissible(v)?;
        self.admissible(w)?;
        let mut out = v.to_vec();
        out.push(sep);
        out.extend_from_slice(w);
        debug_assert!(self.shift.in_language(&out));
        Ok(out)
    }

    fn cyl(&self, word: Word) -> ClopenSet {
        ClopenSet::cylinder(self.space(), &Cylinder::at_origin(word))
            .expect("word over the alphabet")
    }

    /// Cells of the halting query for input `n >= 1`: `U = [0 1^n 0]`,
    /// `V = [001]`, and for the chaotic variant `W = [§]`; the last cell is
    /// the rest.
    pub fn halting_partition(&self, n: usize) -> Result<Partition<ClopenSet>, QueryError> {
        if n == 0 {
            return Err(QueryError::Invalid("inputs start at 1".into()));
        }
        let mut u = vec![0];
        u.extend(unary_input(n));
        u.push(0);
        let mut cells = vec![
            ("U".to_string(), self.cyl(u)),
            ("V".to_string(), self.cyl(vec![0, 0, 1])),
        ];
        let rest = if self.separator {
            cells.push(("W".to_string(), self.cyl(vec![2])));
            "T"
        } else {
            "rest"
        };
        Partition::with_rest(&self.shift, cells, rest)
    }

    /// Does some point of `[0 1^n 0]` reach `[001]` (without visiting `[§]`
    /// in the chaotic variant)? Exactly when the machine halts on `1^n`.
    ///
    /// A positive answer for an input still running at the cutoff only
    /// reflects the truncation and is reported as unknown.
    pub fn halting_query(&self, n: usize, budget: &Budget) -> Result<Verdict, QueryError> {
        let partition = self.halting_partition(n)?;
        let dfa = if self.separator {
            figures::guarded_reachability()
        } else {
            figures::halting()
        };
        let verdict = check_regular(&self.shift, &partition, &dfa, budget, Strategy::Auto)?;
        Ok(downgrade_truncated(verdict, self.table.entry(n), budget))
    }
}

fn downgrade_truncated(verdict: Verdict, entry: Option<HaltEntry>, budget: &Budget) -> Verdict {
    match (verdict.outcome, entry) {
        (Outcome::Holds, Some(HaltEntry::NoHaltWithin(t))) => Verdict {
            outcome: Outcome::Unknown,
            evidence: Evidence::Budget {
                max_len: budget.max_len,
                max_iter: budget.max_iter,
                max_depth: budget.max_depth,
                note: format!("the witness exists only because simulation stopped at {t} steps"),
            },
        },
        _ => verdict,
    }
}

/// `1 0^t 1` forbidden for `t < limit`: the subshift `0*10^ω ∪ {0^ω}` when
/// the limit is infinite.
fn gap_presentation(limit: Option<u64>) -> Presentation {
    // Vertex 0: no 1 read yet; vertex 1 + z: a 1 followed by z zeros, with z
    // capped at the limit.
    let cap = limit.unwrap_or(0) as usize;
    let mut edges = vec![vec![(0, 0), (1, 1)]];
    for z in 0..=cap {
        let mut out = vec![(0, 1 + (z + 1).min(cap))];
        if limit.is_some_and(|k| z as u64 >= k) {
            out.push((1, 1));
        }
        edges.push(out);
    }
    Presentation::new(edges, vec![0]).expect("gap presentation is well formed")
}

/// `0^k` forbidden, `k >= 1`; no constraint when `k` is `None`.
fn zero_run_presentation(k: Option<u64>) -> Presentation {
    let Some(k) = k else {
        return Presentation::new(vec![vec![(0, 0), (1, 0)]], vec![0]).expect("valid");
    };
    let k = k.max(1) as usize;
    // Vertex z: the last z symbols are zeros, z < k.
    let edges = (0..k)
        .map(|z| {
            let mut out = vec![(1, 0)];
            if z + 1 < k {
                out.push((0, z + 1));
            }
            out
        })
        .collect();
    Presentation::new(edges, vec![0]).expect("valid")
}

fn table_product(
    name: &str,
    table: &HaltTimeTable,
    horizon: usize,
    component: fn(HaltEntry) -> Presentation,
) -> Result<ProductSystem, SystemError> {
    let entries: Vec<HaltEntry> = table.entries().values().copied().collect();
    if horizon > entries.len() {
        return Err(SystemError::Horizon {
            index: entries.len(),
            horizon,
        });
    }
    let space = SpaceSpec::one_sided(Alphabet::binary());
    ProductSystem::new(name, 2, horizon, move |i| {
        let entry = entries.get(i).copied().ok_or(SystemError::Horizon {
            index: i,
            horizon: entries.len(),
        })?;
        let shift = ShiftSystem::anchored(space.clone(), component(entry))?;
        Ok(Arc::new(shift) as DynSystem)
    })
}

/// Product of the subshifts `X_n` forbidding `1 0^t 1` for `t` below the
/// halting time of input `n`. Component `i` belongs to the `i`-th input of
/// the table.
pub fn sofic_product(table: &HaltTimeTable, horizon: usize) -> Result<ProductSystem, SystemError> {
    table_product("sofic halting product", table, horizon, |e| {
        gap_presentation(e.limit())
    })
}

/// Product of the subshifts `X_n` forbidding `0^k` when input `n` halts in
/// `k` steps (full shifts otherwise). A halting time of 0 forbids `0`.
pub fn shadowing_product(
    table: &HaltTimeTable,
    horizon: usize,
) -> Result<ProductSystem, SystemError> {
    table_product("shadowing halting product", table, horizon, |e| {
        zero_run_presentation(e.halts())
    })
}

/// Does some point of `π_i⁻¹[1]` reach `π_i⁻¹[01]` in the sofic product?
pub fn product_halting_query(
    product: &ProductSystem,
    table: &HaltTimeTable,
    index: usize,
    budget: &Budget,
) -> Result<Verdict, QueryError> {
    let u = product.cylinder(index, &[1])?;
    let v = product.cylinder(index, &[0, 1])?;
    let partition = Partition::with_rest(product, vec![("U".into(), u), ("V".into(), v)], "rest")?;
    let verdict = check_regular(
        product,
        &partition,
        &figures::halting(),
        budget,
        Strategy::Auto,
    )?;
    let entry = table.entries().values().nth(index).copied();
    Ok(downgrade_truncated(verdict, entry, budget))
}

/// Does some point stay in `π_i⁻¹[0]` forever in the shadowing product?
pub fn product_invariance_query(
    product: &ProductSystem,
    index: usize,
    budget: &Budget,
) -> Result<Verdict, QueryError> {
    let u = product.cylinder(index, &[0])?;
    let partition = Partition::with_rest(product, vec![("U".into(), u)], "rest")?;
    check_omega(
        product,
        &partition,
        &figures::invariance(),
        budget,
        Strategy::Auto,
    )
}

/// A symbol of the Turing-machine cellular automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaCell {
    Tape(Sym),
    Head(Sym, usize),
    L,
    R,
    Error,
}

/// A finite CA configuration on a blank background: `cells[0]` sits at
/// position `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaConfig {
    pub offset: i64,
    pub cells: Vec<Sym>,
}

/// Radius-1 cellular automaton simulating a machine between an `L` marker
/// moving left and an `R` marker moving right. Markers meeting each other or
/// the head produce an `Error` symbol that spreads at speed 1 both ways.
///
/// The simulated machine is the homing version of the given one, so a
/// halting head always sits at cell 0.
#[derive(Debug, Clone)]
pub struct TmInCa {
    machine: MachineSpec,
    homed: MachineSpec,
    ca: CellularAutomaton,
}

pub fn tm_in_ca(machine: &MachineSpec) -> Result<TmInCa, SystemError> {
    TmInCa::new(machine)
}

impl TmInCa {
    pub fn new(machine: &MachineSpec) -> Result<Self, SystemError> {
        let homed = machine.homing()?;
        let k = homed.alphabet().len();
        let nq = homed.states().len();
        let size = k + k * nq + 3;
        if size > 256 {
            return Err(SystemError::Spec(format!(
                "the simulating automaton would need {size} symbols"
            )));
        }
        let alphabet = Alphabet::indexed(size)?;
        let codec = Codec { k, nq };
        let rule = LocalRule::from_fn(1, size, |n| {
            codec.encode(local_rule(&homed, &codec, n[0], n[1], n[2]))
        })?;
        let ca = CellularAutomaton::new(SpaceSpec::two_sided(alphabet), rule)?;
        Ok(Self {
            machine: machine.clone(),
            homed,
            ca,
        })
    }

    pub fn system(&self) -> &CellularAutomaton {
        &self.ca
    }

    /// The original machine.
    pub fn machine(&self) -> &MachineSpec {
        &self.machine
    }

    /// The machine the automaton simulates.
    pub fn homed(&self) -> &MachineSpec {
        &self.homed
    }

    fn codec(&self) -> Codec {
        Codec {
            k: self.homed.alphabet().len(),
            nq: self.homed.states().len(),
        }
    }

    pub fn decode_symbol(&self, s: Sym) -> CaCell {
        self.codec().decode(s)
    }

    pub fn encode_symbol(&self, c: CaCell) -> Sym {
        self.codec().encode(c)
    }

    /// Initial configuration of the simulated machine on `input`.
    pub fn initial_config(&self, input: &[Sym]) -> TapeConfig {
        TapeConfig::initial(&self.homed, &self.machine.homed_input(input))
    }

    /// `[L, zone, R]` where the zone spans the tape contents and the head.
    pub fn encode(&self, config: &TapeConfig) -> CaConfig {
        let lo = config.offset.min(config.head);
        let hi = (config.offset + config.cells.len() as i64 - 1).max(config.head);
        let c = self.codec();
        let mut cells = vec![c.encode(CaCell::L)];
        for pos in lo..=hi {
            let a = config.read(pos);
            cells.push(c.encode(if pos == config.head {
                CaCell::Head(a, config.state)
            } else {
                CaCell::Tape(a)
            }));
        }
        cells.push(c.encode(CaCell::R));
        CaConfig {
            offset: lo - 1,
            cells,
        }
    }

    /// The cylinder `[L, zone, R]` of an encoded configuration.
    pub fn cylinder(&self, config: &CaConfig) -> ClopenSet {
        ClopenSet::cylinder(
            self.ca.space(),
            &Cylinder::new(config.offset, config.cells.clone()),
        )
        .expect("encoded symbols are in the alphabet")
    }

    /// Machine configuration between the markers, if the configuration is a
    /// well-formed simulation (one `L`, one `R` to its right, one head
    /// between them, no `Error`, blanks outside).
    pub fn decode(&self, config: &CaConfig) -> Option<TapeConfig> {
        let c = self.codec();
        let cells: Vec<CaCell> = config.cells.iter().map(|&s| c.decode(s)).collect();
        let l = cells.iter().position(|&x| x == CaCell::L)?;
        let r = cells.iter().position(|&x| x == CaCell::R)?;
        if r <= l {
            return None;
        }
        let outside_blank = cells[..l]
            .iter()
            .chain(&cells[r + 1..])
            .all(|&x| x == CaCell::Tape(0));
        if !outside_blank {
            return None;
        }
        let mut head = None;
        let mut tape = Vec::with_capacity(r - l - 1);
        for (i, &x) in cells[l + 1..r].iter().enumerate() {
            match x {
                CaCell::Tape(a) => tape.push(a),
                CaCell::Head(a, q) if head.is_none() => {
                    head = Some((i, q));
                    tape.push(a);
                }
                _ => return None,
            }
        }
        let (h, state) = head?;
        let offset = config.offset + l as i64 + 1;
        Some(
            TapeConfig {
                state,
                head: offset + h as i64,
                offset,
                cells: tape,
            }
            .normalized(),
        )
    }

    /// One step on a blank background; the result covers one more cell on
    /// each side.
    pub fn step(&self, config: &CaConfig) -> CaConfig {
        let mut cells = vec![0];
        cells.extend_from_slice(&config.cells);
        cells.push(0);
        CaConfig {
            offset: config.offset - 1,
            cells: self.ca.step_finite(&cells, 0),
        }
    }

    /// Symbol at a position of a finite configuration on a blank background.
    pub fn read(&self, config: &CaConfig, pos: i64) -> Sym {
        let i = pos - config.offset;
        if i < 0 || i >= config.cells.len() as i64 {
            0
        } else {
            config.cells[i as usize]
        }
    }

    /// The clopen set of configurations with a halting head at cell 0.
    pub fn halting_set(&self) -> ClopenSet {
        let space = self.ca.space();
        let c = self.codec();
        let mut set = ClopenSet::empty(space);
        for h in self.homed.halting_states() {
            for a in 0..c.k as Sym {
                let cyl = ClopenSet::cylinder(
                    space,
                    &Cylinder::at_origin(vec![c.encode(CaCell::Head(a, h))]),
                )
                .expect("valid symbol");
                set = set.try_union(&cyl).expect("same space");
            }
        }
        set
    }

    /// Does an orbit lead from `[L, input, R]` to the halting set? Searched
    /// forward along the orbit of the point with a blank background, which
    /// reaches the halting set whenever any point of the cylinder does.
    pub fn halting_query(&self, input: &[Sym], max_steps: usize) -> Verdict {
        let mut config = self.encode(&self.initial_config(input));
        let c = self.codec();
        let mut word = vec!["start".to_string()];
        for _ in 0..max_steps {
            config = self.step(&config);
            if let CaCell::Head(_, q) = c.decode(self.read(&config, 0)) {
                if self.homed.is_halting(q) {
                    word.push("halt".into());
                    return Verdict {
                        outcome: Outcome::Holds,
                        evidence: Evidence::Witness { word },
                    };
                }
            }
            word.push("rest".into());
        }
        Verdict {
            outcome: Outcome::Unknown,
            evidence: Evidence::Budget {
                max_len: max_steps,
                max_iter: 0,
                max_depth: 0,
                note: "no halting head at cell 0 along the blank-background orbit".into(),
            },
        }
    }
}

#[derive(Clone, Copy)]
struct Codec {
    k: usize,
    nq: usize,
}

impl Codec {
    fn encode(&self, c: CaCell) -> Sym {
        let v = match c {
            CaCell::Tape(a) => a as usize,
            CaCell::Head(a, q) => self.k + a as usize * self.nq + q,
            CaCell::L => self.k + self.k * self.nq,
            CaCell::R => self.k + self.k * self.nq + 1,
            CaCell::Error => self.k + self.k * self.nq + 2,
        };
        v as Sym
    }

    fn decode(&self, s: Sym) -> CaCell {
        let s = s as usize;
        let heads = self.k * self.nq;
        if s < self.k {
            CaCell::Tape(s as Sym)
        } else if s < self.k + heads {
            let i = s - self.k;
            CaCell::Head((i / self.nq) as Sym, i % self.nq)
        } else {
            match s - self.k - heads {
                0 => CaCell::L,
                1 => CaCell::R,
                _ => CaCell::Error,
            }
        }
    }
}

fn local_rule(m: &MachineSpec, codec: &Codec, l: Sym, c: Sym, r: Sym) -> CaCell {
    let (l, c, r) = (codec.decode(l), codec.decode(c), codec.decode(r));
    if [l, c, r].contains(&CaCell::Error) {
        return CaCell::Error;
    }
    // Markers crossing or arriving together.
    if (c == CaCell::R && r == CaCell::L)
        || (c == CaCell::L && l == CaCell::R)
        || (l == CaCell::R && r == CaCell::L)
    {
        return CaCell::Error;
    }
    let moving = |x: CaCell, dir: Move| match x {
        CaCell::Head(a, q) => m.transition(q, a).filter(|t| t.mv == dir).map(|t| t.next),
        _ => None,
    };
    let from_left = moving(l, Move::R);
    let from_right = moving(r, Move::L);
    // What the current cell holds after its own update, and whether its head stays.
    let (base, stays) = match c {
        CaCell::Tape(a) => (a, None),
        CaCell::Head(a, q) => match m.transition(q, a) {
            None => (a, Some(q)),
            Some(t) => (t.write, (t.mv == Move::N).then_some(t.next)),
        },
        CaCell::L | CaCell::R => (0, None),
        CaCell::Error => unreachable!("handled above"),
    };
    let arrivals = [from_left, from_right, stays].iter().flatten().count();
    let marker = if r == CaCell::L {
        Some(CaCell::L)
    } else if l == CaCell::R {
        Some(CaCell::R)
    } else {
        None
    };
    if let Some(mk) = marker {
        return if arrivals > 0 { CaCell::Error } else { mk };
    }
    // A head crossing a marker moving the other way.
    if (c == CaCell::L && from_left.is_some()) || (c == CaCell::R && from_right.is_some()) {
        return CaCell::Error;
    }
    match arrivals {
        0 => CaCell::Tape(base),
        1 => CaCell::Head(
            base,
            from_left.or(from_right).or(stays).expect("one arrival"),
        ),
        _ => CaCell::Error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::EffectiveSystem;

    fn parity_table() -> HaltTimeTable {
        HaltTimeTable::build(parity_machine(), 6, 200).unwrap()
    }

    #[test]
    fn parity_machine_table() {
        let t = parity_table();
        assert_eq!(t.entry(2), Some(HaltEntry::Halts(3)));
        assert_eq!(t.entry(1), Some(HaltEntry::Never));
        assert_eq!(t.entry(0), None);
        assert!(HaltTimeTable::from_parts(parity_machine(), 200, t.entries().clone()).is_ok());
        let mut bad = t.entries().clone();
        bad.insert(2, HaltEntry::Halts(4));
        assert!(HaltTimeTable::from_parts(parity_machine(), 200, bad).is_err());
    }

    #[test]
    fn universal_subshift_patterns() {
        let u = universal_subshift(&parity_table());
        let s = u.system();
        // Input 2 halts in 3 steps: 0110 0^t 1 is forbidden exactly for t < 3.
        assert!(!s.in_language(&[0, 1, 1, 0, 0, 0, 1]));
        assert!(s.in_language(&[0, 1, 1, 0, 0, 0, 0, 1]));
        // Input 1 never halts.
        assert!(!s.in_language(&[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
        assert!(s.in_language(&[1, 0, 0, 0, 1]));
    }

    #[test]
    fn chaotic_helpers() {
        let u = chaotic_universal(&parity_table());
        assert_eq!(u.periodic_point(&[0, 1]).unwrap(), vec![0, 1, 2]);
        assert_eq!(u.transitivity_witness(&[0], &[1]).unwrap(), vec![0, 2, 1]);
        assert!(u.periodic_point(&[0, 1, 0, 1]).is_err());
        assert!(universal_subshift(&parity_table())
            .periodic_point(&[0])
            .is_err());
    }

    #[test]
    fn guarded_query_follows_the_table() {
        let table = parity_table();
        let u = chaotic_universal(&table);
        for n in 1..=4 {
            let v = u.halting_query(n, &Budget::default()).unwrap();
            let expected = if table.entry(n).unwrap().halts().is_some() {
                Outcome::Holds
            } else {
                Outcome::Fails
            };
            assert_eq!(v.outcome, expected, "input {n}: {v:?}");
        }
    }

    #[test]
    fn product_components() {
        let table = parity_table();
        let p = sofic_product(&table, 3).unwrap();
        // Component 1 is input 2, halting in 3 steps.
        let c = p.component(1).unwrap();
        let space = SpaceSpec::one_sided(Alphabet::binary());
        let cyl = |w: Vec<Sym>| ClopenSet::cylinder(&space, &Cylinder::at_origin(w)).unwrap();
        assert!(!c.meets(&cyl(vec![1, 0, 0, 1])));
        assert!(c.meets(&cyl(vec![1, 0, 0, 0, 1])));
        let never = p.component(0).unwrap();
        assert!(!never.meets(&cyl(vec![1, 0, 0, 0, 0, 0, 1])));
        assert!(p.component(3).is_err());
        let s = shadowing_product(&table, 2).unwrap();
        assert!(!s.component(1).unwrap().meets(&cyl(vec![0, 0, 0])));
        assert!(s.component(0).unwrap().meets(&cyl(vec![0; 8])));
    }

    #[test]
    fn product_queries_follow_the_table() {
        let table = parity_table();
        let b = Budget::new(6, 8, 2).unwrap();
        let p = sofic_product(&table, 4).unwrap();
        assert_eq!(
            product_halting_query(&p, &table, 1, &b).unwrap().outcome,
            Outcome::Holds
        );
        assert_ne!(
            product_halting_query(&p, &table, 0, &b).unwrap().outcome,
            Outcome::Holds
        );
        let s = shadowing_product(&table, 4).unwrap();
        assert_eq!(
            product_invariance_query(&s, 1, &b).unwrap().outcome,
            Outcome::Fails
        );
        assert_ne!(
            product_invariance_query(&s, 0, &b).unwrap().outcome,
            Outcome::Fails
        );
    }

    #[test]
    fn ca_markers_move_and_leave_blanks() {
        let t = tm_in_ca(&parity_machine()).unwrap();
        let start = t.encode(&t.initial_config(&[]));
        let c = t.codec();
        assert_eq!(start.offset, -1);
        assert_eq!(start.cells.len(), 3);
        assert_eq!(c.decode(start.cells[0]), CaCell::L);
        assert!(matches!(c.decode(start.cells[1]), CaCell::Head(_, q) if q == t.homed().initial()));
        let next = t.step(&start);
        assert_eq!(c.decode(t.read(&next, -2)), CaCell::L);
        assert_eq!(c.decode(t.read(&next, -1)), CaCell::Tape(0));
    }

    #[test]
    fn ca_commutes_with_the_machine() {
        let t = tm_in_ca(&parity_machine()).unwrap();
        for n in 0..5 {
            let mut tm = t.initial_config(&unary_input(n));
            let mut ca = t.encode(&tm);
            for _ in 0..30 {
                ca = t.step(&ca);
                tm.step(t.homed());
                assert_eq!(t.decode(&ca), Some(tm.normalized()));
            }
        }
    }

    #[test]
    fn ca_halting_query() {
        let t = tm_in_ca(&parity_machine()).unwrap();
        assert_eq!(
            t.halting_query(&unary_input(2), 100).outcome,
            Outcome::Holds
        );
        assert_eq!(
            t.halting_query(&unary_input(1), 100).outcome,
            Outcome::Unknown
        );
    }

    #[test]
    fn colliding_markers_spread_error() {
        let t = tm_in_ca(&parity_machine()).unwrap();
        let c = t.codec();
        let config = CaConfig {
            offset: 0,
            cells: vec![c.encode(CaCell::R), c.encode(CaCell::L)],
        };
        let next = t.step(&config);
        assert!(next.cells.iter().any(|&s| c.decode(s) == CaCell::Error));
        let later = t.step(&t.step(&next));
        let errors = later
            .cells
            .iter()
            .filter(|&&s| c.decode(s) == CaCell::Error)
            .count();
        assert!(
            errors
                > next
                    .cells
                    .iter()
                    .filter(|&&s| c.decode(s) == CaCell::Error)
                    .count()
        );
    }
}
