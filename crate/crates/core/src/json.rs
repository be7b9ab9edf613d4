//! JSON schemas for spaces, clopen sets, systems, partitions, automata,
//! machines and halt tables, plus a small text syntax for clopen sets.
//!
//! Every loader reports schema violations with the path of the offending
//! field. Dumps produce canonical objects: loading a dump gives back an equal
//! object.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{figures, Buchi, Dfa, Muller, Nfa};
use crate::checker::{Budget, Strategy};
use crate::clopen::{Alphabet, ClopenSet, Cylinder, SetAlgebra, SpaceSpec, Sym, Word};
use crate::gallery::{self, HaltEntry, HaltTimeTable};
use crate::language::Partition;
use crate::system::{
    BlankTm, CellularAutomaton, CollatzMap, CounterInstr, CounterMachine, CounterProgram,
    DynSystem, EffectiveSystem, Identity, LocalRule, MachineSpec, Move, MovingTapeTm, PrependZero,
    Presentation, ProductSet, ProductSystem, ShiftSystem, TagSystem, Transition,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(path: impl Into<String>, e: impl std::fmt::Display) -> JsonError {
    JsonError::Invalid {
        path: path.into(),
        message: e.to_string(),
    }
}

/// Paths of errors raised below a buffered value travel inside the message,
/// framed by this marker, and are spliced back by [`parse`].
const PATH_MARK: char = '\u{1}';

fn join_path(outer: &str, inner: &str) -> String {
    match (outer, inner) {
        ("." | "", i) => {
            if i.is_empty() {
                ".".into()
            } else {
                i.to_string()
            }
        }
        (o, "") => o.to_string(),
        (o, i) if i.starts_with('[') => format!("{o}{i}"),
        (o, i) => format!("{o}.{i}"),
    }
}

/// Splits a marked message into its inner path and text.
fn split_marked(message: &str) -> Option<(&str, &str)> {
    let rest = message.strip_prefix(PATH_MARK)?;
    rest.split_once(PATH_MARK)
}

/// Converts an error from deserializing `{kind: body}` into a marked error
/// relative to the original object.
fn retag_error<E: serde::de::Error>(e: serde_path_to_error::Error<serde_json::Error>) -> E {
    let full = e.path().to_string();
    let message = e.into_inner().to_string();
    // drop the leading variant segment
    let path = match full.find(['.', '[']) {
        Some(i) if full != "." => full[i..].trim_start_matches('.').to_string(),
        _ if full == "." => "kind".to_string(),
        _ => String::new(),
    };
    let (path, message) = match split_marked(&message) {
        Some((inner, text)) => (join_path(&path, inner), text.to_string()),
        None => (path, message),
    };
    E::custom(format!("{PATH_MARK}{path}{PATH_MARK}{message}"))
}

/// An enum serialized with an inline `kind` field. Deserialization goes
/// through an externally tagged mirror so that error paths stay precise.
macro_rules! tagged_enum {
    (
        $(#[$m:meta])*
        pub enum $name:ident / $mirror:ident {
            $( $(#[$vm:meta])* $var:ident { $( $(#[$fm:meta])* $f:ident : $t:ty ),* $(,)? } ),* $(,)?
        }
    ) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Eq, Serialize)]
        #[serde(tag = "kind", rename_all = "snake_case")]
        pub enum $name {
            $( $(#[$vm])* $var { $( $(#[$fm])* $f: $t ),* } ),*
        }

        #[derive(Deserialize)]
        #[serde(rename_all = "snake_case", deny_unknown_fields)]
        enum $mirror {
            $( $var { $( $(#[$fm])* $f: $t ),* } ),*
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                use serde::de::Error as _;
                let mut body = serde_json::Map::<String, serde_json::Value>::deserialize(d)?;
                let kind = match body.remove("kind") {
                    Some(serde_json::Value::String(k)) => k,
                    Some(_) => return Err(D::Error::custom(format!("{PATH_MARK}kind{PATH_MARK}expected a string"))),
                    None => return Err(D::Error::missing_field("kind")),
                };
                let mut wrapped = serde_json::Map::new();
                wrapped.insert(kind, serde_json::Value::Object(body));
                let mirror: $mirror = serde_path_to_error::deserialize(serde_json::Value::Object(wrapped))
                    .map_err(retag_error::<D::Error>)?;
                Ok(match mirror {
                    $( $mirror::$var { $($f),* } => $name::$var { $($f),* } ),*
                })
            }
        }
    };
}

/// Deserializes `text`, reporting the path of the first offending field.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let outer = e.path().to_string();
        let message = e.into_inner().to_string();
        match split_marked(&message) {
            Some((inner, text)) => JsonError::Schema {
                path: join_path(&outer, inner),
                message: text.to_string(),
            },
            None => JsonError::Schema {
                path: if outer.is_empty() { ".".into() } else { outer },
                message,
            },
        }
    })
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("schema types serialize")
}

fn read_file(base: &Path, name: &str) -> Result<(String, PathBuf), JsonError> {
    let path = base.join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| JsonError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((text, dir))
}

/// Symbols as a list, or as a string of single-character symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetJson {
    Symbols(Vec<String>),
    Chars(String),
}

impl AlphabetJson {
    pub fn build(&self) -> Result<Alphabet, crate::clopen::ClopenError> {
        match self {
            AlphabetJson::Symbols(s) => Alphabet::new(s.clone()),
            AlphabetJson::Chars(c) => Alphabet::from_chars(c),
        }
    }

    pub fn from_alphabet(a: &Alphabet) -> Self {
        AlphabetJson::Symbols(a.symbols().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub alphabet: AlphabetJson,
    #[serde(default)]
    pub two_sided: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<String>>,
}

impl SpaceJson {
    pub fn build(&self) -> Result<Arc<SpaceSpec>, JsonError> {
        let alphabet = self
            .alphabet
            .build()
            .map_err(|e| invalid("space.alphabet", e))?;
        let base = if self.two_sided {
            SpaceSpec::TwoSided(alphabet)
        } else {
            SpaceSpec::OneSided(alphabet)
        };
        match &self.tags {
            None => Ok(Arc::new(base)),
            Some(tags) => {
                SpaceSpec::tagged(tags.clone(), base).map_err(|e| invalid("space.tags", e))
            }
        }
    }

    pub fn from_space(space: &SpaceSpec) -> Self {
        Self {
            alphabet: AlphabetJson::from_alphabet(space.alphabet()),
            two_sided: space.is_two_sided(),
            tags: space.tags().map(<[String]>::to_vec),
        }
    }

    fn untagged(&self, path: &str) -> Result<Arc<SpaceSpec>, JsonError> {
        if self.tags.is_some() {
            return Err(invalid(path, "this system needs an untagged space"));
        }
        self.build()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderJson {
    #[serde(default)]
    pub anchor: i64,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

/// A clopen set as a union of cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClopenJson {
    pub space: SpaceJson,
    pub cylinders: Vec<CylinderJson>,
}

impl ClopenJson {
    pub fn build(&self) -> Result<ClopenSet, JsonError> {
        let space = self.space.build()?;
        let mut raw = Vec::with_capacity(self.cylinders.len());
        for (i, c) in self.cylinders.iter().enumerate() {
            let path = format!("cylinders[{i}]");
            let word = space
                .alphabet()
                .parse_word(&c.word)
                .map_err(|e| invalid(format!("{path}.word"), e))?;
            let tag =
                match &c.tag {
                    None => None,
                    Some(t) => Some(space.tag_index(t).ok_or_else(|| {
                        invalid(format!("{path}.tag"), format!("unknown tag {t:?}"))
                    })?),
                };
            raw.push(Cylinder {
                anchor: c.anchor,
                word,
                tag,
            });
        }
        ClopenSet::normalize(&space, &raw).map_err(|e| invalid("cylinders", e))
    }

    /// Canonical dump.
    pub fn from_set(set: &ClopenSet) -> Self {
        let space = set.space();
        let cylinders = set
            .cylinders()
            .into_iter()
            .map(|c| CylinderJson {
                anchor: c.anchor,
                word: space.alphabet().render(&c.word),
                tag: c
                    .tag
                    .map(|t| space.tags().expect("tagged space")[t].clone()),
            })
            .collect();
        Self {
            space: SpaceJson::from_space(space),
            cylinders,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveJson {
    L,
    R,
    N,
}

/// A Turing machine. The first alphabet symbol is the blank; rules are
/// `[state, read, write, move, next]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineJson {
    pub states: Vec<String>,
    pub alphabet: AlphabetJson,
    pub initial: String,
    pub halting: Vec<String>,
    pub rules: Vec<(String, String, String, MoveJson, String)>,
}

impl MachineJson {
    pub fn build(&self) -> Result<MachineSpec, JsonError> {
        let alphabet = self.alphabet.build().map_err(|e| invalid("alphabet", e))?;
        let state = |path: String, name: &str| {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| invalid(path, format!("unknown state {name:?}")))
        };
        let symbol = |path: String, name: &str| {
            alphabet
                .index_of(name)
                .ok_or_else(|| invalid(path, format!("unknown symbol {name:?}")))
        };
        let initial = state("initial".into(), &self.initial)?;
        let halting = self
            .halting
            .iter()
            .enumerate()
            .map(|(i, h)| state(format!("halting[{i}]"), h))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rules = Vec::with_capacity(self.rules.len());
        for (i, (q, read, write, mv, next)) in self.rules.iter().enumerate() {
            let p = |f: &str| format!("rules[{i}].{f}");
            let mv = match mv {
                MoveJson::L => Move::L,
                MoveJson::R => Move::R,
                MoveJson::N => Move::N,
            };
            rules.push((
                state(p("state"), q)?,
                symbol(p("read"), read)?,
                Transition {
                    write: symbol(p("write"), write)?,
                    mv,
                    next: state(p("next"), next)?,
                },
            ));
        }
        MachineSpec::new(self.states.clone(), alphabet, initial, &halting, &rules)
            .map_err(|e| invalid("rules", e))
    }

    pub fn from_machine(m: &MachineSpec) -> Self {
        let a = m.alphabet();
        let rules = m
            .rules()
            .into_iter()
            .map(|(q, read, t)| {
                let mv = match t.mv {
                    Move::L => MoveJson::L,
                    Move::R => MoveJson::R,
                    Move::N => MoveJson::N,
                };
                (
                    m.states()[q].clone(),
                    a.symbol(read).to_string(),
                    a.symbol(t.write).to_string(),
                    mv,
                    m.states()[t.next].clone(),
                )
            })
            .collect();
        Self {
            states: m.states().to_vec(),
            alphabet: AlphabetJson::from_alphabet(a),
            initial: m.states()[m.initial()].clone(),
            halting: m
                .halting_states()
                .into_iter()
                .map(|h| m.states()[h].clone())
                .collect(),
            rules,
        }
    }
}

/// A machine given inline, by file path (ending in `.json`), or by the
/// name of a shipped machine (`parity4`, `bb3`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MachineRef {
    Inline(MachineJson),
    Named(String),
}

pub fn shipped_machine(name: &str) -> Option<MachineSpec> {
    match name {
        "parity4" => Some(gallery::parity_machine()),
        "bb3" => Some(gallery::busy_beaver3()),
        _ => None,
    }
}

impl MachineRef {
    pub fn load(&self, base: &Path) -> Result<MachineSpec, JsonError> {
        match self {
            MachineRef::Inline(m) => m.build(),
            MachineRef::Named(name) if name.ends_with(".json") => {
                let (text, _) = read_file(base, name)?;
                parse::<MachineJson>(&text)?.build()
            }
            MachineRef::Named(name) => shipped_machine(name)
                .ok_or_else(|| invalid("machine", format!("no shipped machine named {name:?}"))),
        }
    }
}

/// A halting-time table: `{machine, cutoff, entries}`. Entries are checked
/// against a fresh simulation when loaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub machine: MachineJson,
    pub cutoff: u64,
    pub entries: BTreeMap<usize, HaltEntry>,
}

impl TableJson {
    pub fn build(&self) -> Result<HaltTimeTable, JsonError> {
        let machine = self.machine.build().map_err(|e| prefix("machine", e))?;
        HaltTimeTable::from_parts(machine, self.cutoff, self.entries.clone())
            .map_err(|e| invalid("entries", e))
    }

    pub fn from_table(t: &HaltTimeTable) -> Self {
        Self {
            machine: MachineJson::from_machine(t.machine()),
            cutoff: t.cutoff(),
            entries: t.entries().clone(),
        }
    }
}

fn prefix(p: &str, e: JsonError) -> JsonError {
    match e {
        JsonError::Schema { path, message } => JsonError::Schema {
            path: format!("{p}.{path}"),
            message,
        },
        JsonError::Invalid { path, message } => JsonError::Invalid {
            path: format!("{p}.{path}"),
            message,
        },
        io => io,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableRef {
    Inline(Box<TableJson>),
    Path(String),
}

impl TableRef {
    pub fn load(&self, base: &Path) -> Result<HaltTimeTable, JsonError> {
        match self {
            TableRef::Inline(t) => t.build(),
            TableRef::Path(p) => {
                let (text, _) = read_file(base, p)?;
                parse::<TableJson>(&text)?.build()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrJson {
    Inc(usize),
    Dec(usize),
    Jz(usize, usize),
    Halt,
}

/// A local rule: a Wolfram number (binary, radius 1) or the outputs for all
/// neighborhoods in lexicographic order, as a string of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleJson {
    Wolfram(u8),
    Table(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryName {
    Universal,
    Chaotic,
    SoficProduct,
    ShadowingProduct,
    TmInCa,
}

tagged_enum! {
/// A system specification, tagged by `kind`.
pub enum SystemJson / SystemJsonByKind {
    Full {
        space: SpaceJson,
    },
    Sft {
        space: SpaceJson,
        forbidden: Vec<String>,
    },
    /// A labeled graph; with `initial`, a one-sided shift of paths from
    /// those vertices.
    Sofic {
        space: SpaceJson,
        edges: Vec<(usize, String, usize)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<usize>>,
    },
    Ca {
        alphabet: AlphabetJson,
        radius: usize,
        rule: RuleJson,
    },
    Identity {
        space: SpaceJson,
    },
    PrependZero {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<AlphabetJson>,
    },
    TmMoving {
        machine: MachineRef,
    },
    TmBlank {
        machine: MachineRef,
    },
    Tag {
        alphabet: AlphabetJson,
        deletion: usize,
        productions: Vec<String>,
    },
    Counter {
        counters: usize,
        program: Vec<InstrJson>,
    },
    Collatz {
        branches: Vec<(u64, u64, u64)>,
    },
    Product {
        components: Vec<SystemJson>,
    },
    Gallery {
        name: GalleryName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<TableRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        machine: Option<MachineRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<usize>,
    },
}
}

/// A system given inline or by file path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Inline(Box<SystemJson>),
    Path(String),
}

/// A loaded system: over plain clopen sets, or a product over product sets.
#[derive(Clone)]
pub enum BuiltSystem {
    Clopen(DynSystem),
    Product(Arc<ProductSystem>),
}

impl BuiltSystem {
    pub fn describe(&self) -> String {
        match self {
            BuiltSystem::Clopen(s) => s.describe(),
            BuiltSystem::Product(p) => p.describe(),
        }
    }
}

impl SystemRef {
    pub fn load(&self, base: &Path) -> Result<BuiltSystem, JsonError> {
        match self {
            SystemRef::Inline(s) => s.build(base),
            SystemRef::Path(p) => {
                let (text, dir) = read_file(base, p)?;
                parse::<SystemJson>(&text)?.build(&dir)
            }
        }
    }
}

fn words(alphabet: &Alphabet, list: &[String], path: &str) -> Result<Vec<Word>, JsonError> {
    list.iter()
        .enumerate()
        .map(|(i, w)| {
            alphabet
                .parse_word(w)
                .map_err(|e| invalid(format!("{path}[{i}]"), e))
        })
        .collect()
}

fn clopen(system: impl EffectiveSystem<Set = ClopenSet> + 'static) -> BuiltSystem {
    BuiltSystem::Clopen(Arc::new(system))
}

impl SystemJson {
    /// Builds the system; file references resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<BuiltSystem, JsonError> {
        let sys = |e: crate::system::SystemError| invalid("system", e);
        Ok(match self {
            SystemJson::Full { space } => {
                clopen(ShiftSystem::full(space.untagged("space")?).map_err(sys)?)
            }
            SystemJson::Sft { space, forbidden } => {
                let space = space.untagged("space")?;
                let forbidden = words(space.alphabet(), forbidden, "forbidden")?;
                clopen(ShiftSystem::sft(space, forbidden).map_err(|e| invalid("forbidden", e))?)
            }
            SystemJson::Sofic {
                space,
                edges,
                vertices,
                initial,
            } => {
                let space = space.untagged("space")?;
                let n = vertices
                    .unwrap_or_else(|| edges.iter().map(|e| e.0.max(e.2) + 1).max().unwrap_or(0));
                let mut adj = vec![Vec::new(); n];
                for (i, (from, sym, to)) in edges.iter().enumerate() {
                    let a = space.alphabet().index_of(sym).ok_or_else(|| {
                        invalid(format!("edges[{i}]"), format!("unknown symbol {sym:?}"))
                    })?;
                    if *from >= n || *to >= n {
                        return Err(invalid(format!("edges[{i}]"), "vertex out of range"));
                    }
                    adj[*from].push((a, *to));
                }
                match initial {
                    None => clopen(
                        ShiftSystem::sofic(
                            space,
                            Presentation::graph(adj).map_err(|e| invalid("edges", e))?,
                        )
                        .map_err(sys)?,
                    ),
                    Some(init) => clopen(
                        ShiftSystem::anchored(
                            space,
                            Presentation::new(adj, init.clone())
                                .map_err(|e| invalid("initial", e))?,
                        )
                        .map_err(|e| invalid("space", e))?,
                    ),
                }
            }
            SystemJson::Ca {
                alphabet,
                radius,
                rule,
            } => {
                let alphabet = alphabet.build().map_err(|e| invalid("alphabet", e))?;
                let k = alphabet.len();
                let rule = match rule {
                    RuleJson::Wolfram(n) => {
                        if k != 2 || *radius != 1 {
                            return Err(invalid(
                                "rule",
                                "Wolfram numbers need a binary radius-1 automaton",
                            ));
                        }
                        LocalRule::from_fn(1, 2, |w| (n >> (4 * w[0] + 2 * w[1] + w[2])) & 1)
                    }
                    RuleJson::Table(t) => {
                        let table = alphabet.parse_word(t).map_err(|e| invalid("rule", e))?;
                        LocalRule::new(*radius, k, table)
                    }
                }
                .map_err(|e| invalid("rule", e))?;
                clopen(CellularAutomaton::new(SpaceSpec::two_sided(alphabet), rule).map_err(sys)?)
            }
            SystemJson::Identity { space } => clopen(Identity::new(space.build()?)),
            SystemJson::PrependZero { alphabet } => match alphabet {
                None => clopen(PrependZero::new()),
                Some(a) => clopen(
                    PrependZero::over(SpaceSpec::one_sided(
                        a.build().map_err(|e| invalid("alphabet", e))?,
                    ))
                    .map_err(sys)?,
                ),
            },
            SystemJson::TmMoving { machine } => {
                let m = machine.load(base).map_err(|e| prefix("machine", e))?;
                clopen(MovingTapeTm::new(m).map_err(sys)?)
            }
            SystemJson::TmBlank { machine } => {
                let m = machine.load(base).map_err(|e| prefix("machine", e))?;
                clopen(BlankTm::new(m).map_err(sys)?)
            }
            SystemJson::Tag {
                alphabet,
                deletion,
                productions,
            } => {
                let alphabet = alphabet.build().map_err(|e| invalid("alphabet", e))?;
                let prods = words(&alphabet, productions, "productions")?;
                clopen(TagSystem::new(&alphabet, *deletion, prods).map_err(sys)?)
            }
            SystemJson::Counter { counters, program } => {
                let instrs = program
                    .iter()
                    .map(|i| match *i {
                        InstrJson::Inc(c) => CounterInstr::Inc(c),
                        InstrJson::Dec(c) => CounterInstr::Dec(c),
                        InstrJson::Jz(c, t) => CounterInstr::Jz(c, t),
                        InstrJson::Halt => CounterInstr::Halt,
                    })
                    .collect();
                let program =
                    CounterProgram::new(*counters, instrs).map_err(|e| invalid("program", e))?;
                clopen(CounterMachine::new(program).map_err(sys)?)
            }
            SystemJson::Collatz { branches } => {
                clopen(CollatzMap::new(branches.clone()).map_err(|e| invalid("branches", e))?)
            }
            SystemJson::Product { components } => {
                let mut built = Vec::with_capacity(components.len());
                for (i, c) in components.iter().enumerate() {
                    match c
                        .build(base)
                        .map_err(|e| prefix(&format!("components[{i}]"), e))?
                    {
                        BuiltSystem::Clopen(s) => built.push(s),
                        BuiltSystem::Product(_) => {
                            return Err(invalid(
                                format!("components[{i}]"),
                                "products cannot be nested",
                            ))
                        }
                    }
                }
                let Some(first) = built.first() else {
                    return Err(invalid(
                        "components",
                        "a product needs at least one component",
                    ));
                };
                let k = first.whole().space().alphabet().len();
                let horizon = built.len();
                let product =
                    ProductSystem::new("product", k, horizon, move |i| Ok(built[i].clone()))
                        .map_err(|e| invalid("components", e))?;
                for i in 0..horizon {
                    product
                        .component(i)
                        .map_err(|e| invalid(format!("components[{i}]"), e))?;
                }
                BuiltSystem::Product(Arc::new(product))
            }
            SystemJson::Gallery {
                name,
                table,
                machine,
                horizon,
            } => {
                let load_table = || -> Result<HaltTimeTable, JsonError> {
                    table
                        .as_ref()
                        .ok_or_else(|| invalid("table", "this gallery system needs a table"))?
                        .load(base)
                };
                let horizon_or = |t: &HaltTimeTable| horizon.unwrap_or(t.entries().len());
                match name {
                    GalleryName::Universal => {
                        clopen(gallery::universal_subshift(&load_table()?).system().clone())
                    }
                    GalleryName::Chaotic => {
                        clopen(gallery::chaotic_universal(&load_table()?).system().clone())
                    }
                    GalleryName::SoficProduct => {
                        let t = load_table()?;
                        BuiltSystem::Product(Arc::new(
                            gallery::sofic_product(&t, horizon_or(&t))
                                .map_err(|e| invalid("horizon", e))?,
                        ))
                    }
                    GalleryName::ShadowingProduct => {
                        let t = load_table()?;
                        BuiltSystem::Product(Arc::new(
                            gallery::shadowing_product(&t, horizon_or(&t))
                                .map_err(|e| invalid("horizon", e))?,
                        ))
                    }
                    GalleryName::TmInCa => {
                        let m = match (machine, table) {
                            (Some(m), _) => m.load(base).map_err(|e| prefix("machine", e))?,
                            (None, Some(_)) => load_table()?.machine().clone(),
                            (None, None) => {
                                return Err(invalid(
                                    "machine",
                                    "tm_in_ca needs a machine or a table",
                                ))
                            }
                        };
                        clopen(gallery::tm_in_ca(&m).map_err(sys)?.system().clone())
                    }
                }
            }
        })
    }
}

/// How the set syntax resolves cylinders.
pub trait SetContext {
    type Set: SetAlgebra;
    fn whole(&self) -> Self::Set;
    fn empty(&self) -> Self::Set;
    /// `[word]@anchor`, restricted to a tag or to a product component.
    fn cylinder(
        &self,
        component: Option<usize>,
        tag: Option<&str>,
        word: &str,
        anchor: i64,
    ) -> Result<Self::Set, String>;
}

/// Cylinders of one clopen space.
pub struct SpaceContext(pub Arc<SpaceSpec>);

impl SetContext for SpaceContext {
    type Set = ClopenSet;

    fn whole(&self) -> ClopenSet {
        ClopenSet::whole(&self.0)
    }

    fn empty(&self) -> ClopenSet {
        ClopenSet::empty(&self.0)
    }

    fn cylinder(
        &self,
        component: Option<usize>,
        tag: Option<&str>,
        word: &str,
        anchor: i64,
    ) -> Result<ClopenSet, String> {
        if component.is_some() {
            return Err("component cylinders need a product system".into());
        }
        let word = self
            .0
            .alphabet()
            .parse_word(word)
            .map_err(|e| e.to_string())?;
        let tag = match tag {
            None => None,
            Some(t) => Some(
                self.0
                    .tag_index(t)
                    .ok_or_else(|| format!("unknown tag {t:?}"))?,
            ),
        };
        ClopenSet::cylinder(&self.0, &Cylinder { anchor, word, tag }).map_err(|e| e.to_string())
    }
}

impl SetContext for ProductSystem {
    type Set = ProductSet;

    fn whole(&self) -> ProductSet {
        ProductSet::whole(self.base())
    }

    fn empty(&self) -> ProductSet {
        ProductSet::empty(self.base())
    }

    fn cylinder(
        &self,
        component: Option<usize>,
        tag: Option<&str>,
        word: &str,
        anchor: i64,
    ) -> Result<ProductSet, String> {
        let Some(i) = component else {
            return Err("product cylinders are written π<i>[word]".into());
        };
        if tag.is_some() || anchor != 0 {
            return Err("product components are untagged one-sided spaces".into());
        }
        let c = self.component(i).map_err(|e| e.to_string())?;
        let space = c.whole().space().clone();
        let set = SpaceContext(space).cylinder(None, None, word, 0)?;
        self.lift(i, &set).map_err(|e| e.to_string())
    }
}

/// Parses the set syntax:
///
/// ```text
/// expr  := term (('|' | '∪') term)*
/// term  := unary (('&' | '∩') unary)*
/// unary := ('!' | '¬') unary | '(' expr ')' | 'X' | '∅' | cyl
/// cyl   := [('π' | 'pi') index] [tag ':'] '[' symbols ']' ['@' integer]
/// ```
///
/// For example `[01] | [1]@-1`, `pc0:[110]`, `π2[01] & !π0[1]`.
pub fn parse_set<C: SetContext>(text: &str, ctx: &C) -> Result<C::Set, JsonError> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = SetParser {
        chars: &chars,
        pos: 0,
        ctx,
    };
    let set = p.expr()?;
    if p.pos != chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(set)
}

struct SetParser<'a, C> {
    chars: &'a [char],
    pos: usize,
    ctx: &'a C,
}

impl<C: SetContext> SetParser<'_, C> {
    fn error(&self, msg: &str) -> JsonError {
        JsonError::Invalid {
            path: format!("set syntax at character {}", self.pos),
            message: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, options: &[char]) -> bool {
        if self.peek().is_some_and(|c| options.contains(&c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<C::Set, JsonError> {
        let mut acc = self.term()?;
        while self.eat(&['|', '∪']) {
            acc = acc.union(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<C::Set, JsonError> {
        let mut acc = self.unary()?;
        while self.eat(&['&', '∩']) {
            acc = acc.intersection(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<C::Set, JsonError> {
        if self.eat(&['!', '¬']) {
            return Ok(self.unary()?.complement());
        }
        if self.eat(&['(']) {
            let inner = self.expr()?;
            if !self.eat(&[')']) {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        if self.eat(&['∅']) {
            return Ok(self.ctx.empty());
        }
        self.cylinder()
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<i64, JsonError> {
        let neg = self.eat(&['-']);
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let n: i64 = digits
            .parse()
            .map_err(|_| self.error("expected a number"))?;
        Ok(if neg { -n } else { n })
    }

    fn cylinder(&mut self) -> Result<C::Set, JsonError> {
        let mut component = None;
        let mut tag = None;
        if self.eat(&['π']) {
            let n = self.number()?;
            component =
                Some(usize::try_from(n).map_err(|_| self.error("negative component index"))?);
        } else if self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            let start = self.pos;
            let id = self.ident();
            if self.peek() == Some(':') {
                self.pos += 1;
                tag = Some(id);
            } else if id == "X" {
                return Ok(self.ctx.whole());
            } else if let Some(n) = id
                .strip_prefix("pi")
                .filter(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()))
            {
                component = Some(
                    n.parse()
                        .map_err(|_| self.error("component index too large"))?,
                );
            } else {
                self.pos = start;
                return Err(self.error("expected a cylinder"));
            }
        }
        if component.is_some() && self.peek().is_some_and(|c| c.is_alphanumeric()) {
            let id = self.ident();
            if !self.eat(&[':']) {
                return Err(self.error("expected ':' after tag"));
            }
            tag = Some(id);
        }
        if !self.eat(&['[']) {
            return Err(self.error("expected '['"));
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ']') {
            self.pos += 1;
        }
        let word: String = self.chars[start..self.pos].iter().collect();
        if !self.eat(&[']']) {
            return Err(self.error("expected ']'"));
        }
        let anchor = if self.eat(&['@']) { self.number()? } else { 0 };
        self.ctx
            .cylinder(component, tag.as_deref(), &word, anchor)
            .map_err(|m| self.error(&m))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellJson {
    pub name: String,
    pub set: String,
}

/// Named cells in set syntax, optionally completed by a rest cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub cells: Vec<CellJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rest: Option<String>,
}

impl PartitionJson {
    pub fn build<Sys, C>(&self, system: &Sys, ctx: &C) -> Result<Partition<Sys::Set>, JsonError>
    where
        Sys: EffectiveSystem + ?Sized,
        C: SetContext<Set = Sys::Set>,
    {
        let mut cells = Vec::with_capacity(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let set = parse_set(&c.set, ctx).map_err(|e| prefix(&format!("cells[{i}].set"), e))?;
            cells.push((c.name.clone(), set));
        }
        match &self.rest {
            None => Partition::new(system, cells),
            Some(r) => Partition::with_rest(system, cells, r),
        }
        .map_err(|e| invalid("cells", e))
    }

    /// Canonical dump of a clopen partition.
    pub fn from_partition(p: &Partition<ClopenSet>) -> Self {
        let cells = p
            .names()
            .iter()
            .zip(p.cells())
            .map(|(name, set)| CellJson {
                name: name.clone(),
                set: render_set(set),
            })
            .collect();
        Self { cells, rest: None }
    }
}

/// A clopen set in set syntax.
pub fn render_set(set: &ClopenSet) -> String {
    let space = set.space();
    let terms: Vec<String> = set
        .cylinders()
        .into_iter()
        .map(|c| {
            let tag = c
                .tag
                .map(|t| format!("{}:", space.tags().expect("tagged")[t]))
                .unwrap_or_default();
            let anchor = if c.anchor != 0 && !c.word.is_empty() {
                format!("@{}", c.anchor)
            } else {
                String::new()
            };
            format!("{tag}[{}]{anchor}", space.alphabet().render(&c.word))
        })
        .collect();
    if terms.is_empty() {
        "∅".into()
    } else {
        terms.join(" | ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureName {
    Halting,
    Guarded,
    Invariance,
}

impl FigureName {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "halting" => Some(FigureName::Halting),
            "guarded" => Some(FigureName::Guarded),
            "invariance" => Some(FigureName::Invariance),
            _ => None,
        }
    }
}

/// One initial state, or several for a nondeterministic Büchi automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    One(String),
    Many(Vec<String>),
}

impl Initial {
    fn names(&self) -> Vec<String> {
        match self {
            Initial::One(s) => vec![s.clone()],
            Initial::Many(v) => v.clone(),
        }
    }
}

/// An observer automaton; edges are `[from, symbol, to]` by name.
///
/// With `finals` it is a deterministic finite-word automaton, or a Büchi
/// automaton when `buchi` is set. With `muller_family` it is a
/// deterministic Muller automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonJson {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub initial: Initial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finals: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub muller_family: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub buchi: bool,
}

/// An automaton inline, by file path (ending in `.json`), or by figure name
/// (`halting`, `guarded`, `invariance`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonRef {
    Inline(Box<AutomatonJson>),
    Named(String),
}

impl AutomatonRef {
    pub fn load(&self, base: &Path) -> Result<BuiltAutomaton, JsonError> {
        match self {
            AutomatonRef::Inline(a) => a.build(),
            AutomatonRef::Named(n) if n.ends_with(".json") => {
                let (text, _) = read_file(base, n)?;
                parse::<AutomatonJson>(&text)?.build()
            }
            AutomatonRef::Named(n) => FigureName::parse(n)
                .map(BuiltAutomaton::figure)
                .ok_or_else(|| invalid("automaton", format!("no figure named {n:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltAutomaton {
    Dfa(Dfa),
    Muller(Muller),
}

impl BuiltAutomaton {
    pub fn figure(name: FigureName) -> Self {
        match name {
            FigureName::Halting => BuiltAutomaton::Dfa(figures::halting()),
            FigureName::Guarded => BuiltAutomaton::Dfa(figures::guarded_reachability()),
            FigureName::Invariance => BuiltAutomaton::Muller(figures::invariance()),
        }
    }

    pub fn alphabet(&self) -> &[String] {
        match self {
            BuiltAutomaton::Dfa(d) => d.alphabet(),
            BuiltAutomaton::Muller(m) => m.alphabet(),
        }
    }

    pub fn to_json(&self) -> AutomatonJson {
        match self {
            BuiltAutomaton::Dfa(d) => AutomatonJson::from_dfa(d),
            BuiltAutomaton::Muller(m) => AutomatonJson::from_muller(m),
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        match self {
            BuiltAutomaton::Dfa(d) => d.to_dot(name),
            BuiltAutomaton::Muller(m) => m.to_dot(name),
        }
    }
}

fn index_of(list: &[String], name: &str, path: String) -> Result<usize, JsonError> {
    list.iter()
        .position(|s| s == name)
        .ok_or_else(|| invalid(path, format!("unknown name {name:?}")))
}

fn names_of(list: &[String], names: &[String], path: &str) -> Result<Vec<usize>, JsonError> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| index_of(list, n, format!("{path}[{i}]")))
        .collect()
}

fn delta_table(
    states: usize,
    symbols: usize,
    edges: &[(usize, usize, usize)],
) -> Result<Vec<Vec<usize>>, JsonError> {
    let mut delta = vec![vec![None; symbols]; states];
    for (i, &(f, a, t)) in edges.iter().enumerate() {
        if delta[f][a].replace(t).is_some_and(|old| old != t) {
            return Err(invalid(
                format!("edges[{i}]"),
                "nondeterministic transition",
            ));
        }
    }
    delta
        .into_iter()
        .map(|row| {
            row.into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| invalid("edges", "transition table is not total"))
        })
        .collect()
}

fn edges_by_name(d: &[Vec<usize>], s: &[String], a: &[String]) -> Vec<(String, String, String)> {
    d.iter()
        .enumerate()
        .flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .map(move |(x, &t)| (s[q].clone(), a[x].clone(), s[t].clone()))
        })
        .collect()
}

impl AutomatonJson {
    pub fn build(&self) -> Result<BuiltAutomaton, JsonError> {
        let aut = |e| invalid("automaton", e);
        let (states, alphabet) = (&self.states, &self.alphabet);
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, (f, a, t))| {
                Ok((
                    index_of(states, f, format!("edges[{i}][0]"))?,
                    index_of(alphabet, a, format!("edges[{i}][1]"))?,
                    index_of(states, t, format!("edges[{i}][2]"))?,
                ))
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        let initial = names_of(states, &self.initial.names(), "initial")?;
        match (&self.finals, &self.muller_family, self.buchi) {
            (Some(finals), None, true) => {
                let finals = names_of(states, finals, "finals")?;
                let nfa = Nfa::new(alphabet.clone(), states.clone(), &edges, initial, &finals)
                    .map_err(aut)?;
                Ok(BuiltAutomaton::Muller(
                    Buchi::new(nfa).to_muller().map_err(aut)?,
                ))
            }
            (Some(finals), None, false) => {
                let [init] = initial[..] else {
                    return Err(invalid(
                        "initial",
                        "a finite-word automaton has one initial state",
                    ));
                };
                let finals = names_of(states, finals, "finals")?;
                Ok(BuiltAutomaton::Dfa(
                    Dfa::from_edges(alphabet.clone(), states.clone(), &edges, init, &finals)
                        .map_err(aut)?,
                ))
            }
            (None, Some(family), false) => {
                let [init] = initial[..] else {
                    return Err(invalid(
                        "initial",
                        "a Muller automaton has one initial state",
                    ));
                };
                let delta = delta_table(states.len(), alphabet.len(), &edges)?;
                let fam = family
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        Ok(names_of(states, s, &format!("muller_family[{i}]"))?
                            .into_iter()
                            .collect())
                    })
                    .collect::<Result<Vec<BTreeSet<usize>>, JsonError>>()?;
                Ok(BuiltAutomaton::Muller(
                    Muller::new(alphabet.clone(), states.clone(), delta, init, fam).map_err(aut)?,
                ))
            }
            _ => Err(invalid(
                ".",
                "give exactly one of finals or muller_family, and buchi only with finals",
            )),
        }
    }

    pub fn from_dfa(d: &Dfa) -> Self {
        let s = d.states();
        Self {
            states: s.to_vec(),
            alphabet: d.alphabet().to_vec(),
            edges: edges_by_name(d.delta(), s, d.alphabet()),
            initial: Initial::One(s[d.initial()].clone()),
            finals: Some(d.finals().into_iter().map(|q| s[q].clone()).collect()),
            muller_family: None,
            buchi: false,
        }
    }

    pub fn from_muller(m: &Muller) -> Self {
        let s = m.states();
        Self {
            states: s.to_vec(),
            alphabet: m.alphabet().to_vec(),
            edges: edges_by_name(m.delta(), s, m.alphabet()),
            initial: Initial::One(s[m.initial()].clone()),
            finals: None,
            muller_family: Some(
                m.family()
                    .iter()
                    .map(|set| set.iter().map(|&q| s[q].clone()).collect())
                    .collect(),
            ),
            buchi: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetJson {
    #[serde(default = "default_len")]
    pub max_len: usize,
    #[serde(default = "default_iter")]
    pub max_iter: usize,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
}

fn default_len() -> usize {
    Budget::default().max_len
}

fn default_iter() -> usize {
    Budget::default().max_iter
}

fn default_depth() -> usize {
    Budget::default().max_depth
}

impl BudgetJson {
    pub fn build(&self) -> Result<Budget, JsonError> {
        Budget::new(self.max_len, self.max_iter, self.max_depth).map_err(|e| invalid("budget", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyJson {
    Auto,
    Exact,
    SemiDecide,
    Basins,
}

impl From<StrategyJson> for Strategy {
    fn from(s: StrategyJson) -> Self {
        match s {
            StrategyJson::Auto => Strategy::Auto,
            StrategyJson::Exact => Strategy::Exact,
            StrategyJson::SemiDecide => Strategy::SemiDecide,
            StrategyJson::Basins => Strategy::Basins,
        }
    }
}

/// A partition given in full or as `depthN` (the balls of level `N`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionRef {
    Spec(PartitionJson),
    Named(String),
}

/// Where a partition comes from once references are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionSource {
    Depth(usize),
    Cells(PartitionJson),
}

impl PartitionRef {
    /// Resolves `depthN` or a file path (relative to `base`).
    pub fn resolve(&self, base: &Path) -> Result<PartitionSource, JsonError> {
        match self {
            PartitionRef::Spec(p) => Ok(PartitionSource::Cells(p.clone())),
            PartitionRef::Named(n) => {
                if let Some(level) = n.strip_prefix("depth").and_then(|d| d.parse().ok()) {
                    return Ok(PartitionSource::Depth(level));
                }
                let (text, _) = read_file(base, n)?;
                Ok(PartitionSource::Cells(parse::<PartitionJson>(&text)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    /// Finite-word automaton over a partition.
    Regular,
    /// Muller or Büchi automaton over a partition.
    Omega,
    /// Start in `u`, eventually reach `v`.
    Halting,
    /// Start in `u`, reach `v` before `w`.
    Guarded,
    /// Stay in `u` forever.
    Invariance,
    /// Points whose orbit meets `u`.
    Basin,
    /// Points whose orbit meets `u` infinitely often.
    Io,
    /// Orbit from `u` to `v`, for systems with shadowing.
    Reach,
    /// Pseudo-orbit from `u` to `v` at ball `level`.
    PseudoReach,
    /// Equicontinuity refinement from ball `level`.
    Equicontinuity,
}

impl QueryKind {
    pub fn parse(name: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(name.into())).ok()
    }
}

/// One query. Fields a query kind does not use must be absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryJson {
    pub query: QueryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyJson>,
}

/// A query file holds one query or a list of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryFile {
    One(Box<QueryJson>),
    Many(Vec<QueryJson>),
}

impl QueryFile {
    pub fn into_queries(self) -> Vec<QueryJson> {
        match self {
            QueryFile::One(q) => vec![*q],
            QueryFile::Many(v) => v,
        }
    }
}

/// Renders a word of symbols for messages.
pub fn render_word(space: &SpaceSpec, word: &[Sym]) -> String {
    space.alphabet().render(word)
}
