//! Acceptance gate: one PASS/FAIL line per criterion, each with a pinned
//! time limit. Runs without the test harness so the report prints in order.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use symdyn::automata::figures;
use symdyn::checker::{
    basin, check_omega, check_regular, decide_reach_shadowing, equicontinuity_modulus,
    infinitely_often, Budget, Evidence, FixpointResult, ModulusResult, Outcome, Strategy,
};
use symdyn::gallery::{
    busy_beaver3, chaotic_universal, parity_machine, unary_input, HaltEntry, HaltTimeTable, TmInCa,
};
use symdyn::json::BuiltSystem;
use symdyn::language::{enumerate_language, word_in_language, Partition};
use symdyn::system::{Identity, PrependZero, Presentation, ShiftSystem, TapeConfig};
use symdyn::{Alphabet, ClopenSet, EffectiveSystem, SetAlgebra, SpaceSpec, Sym};

use common::*;

type Outcome_ = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Boolean algebra laws with canonical equality.
fn clopen_laws() -> Outcome_ {
    const PAIRS: usize = 1000;
    let tagged = SpaceSpec::tagged(
        vec!["a".into(), "b".into()],
        SpaceSpec::OneSided(Alphabet::binary()),
    )
    .map_err(|e| e.to_string())?;
    let spaces = [
        ("one-sided", one_sided()),
        ("two-sided", SpaceSpec::two_sided(Alphabet::binary())),
        (
            "ternary",
            SpaceSpec::one_sided(Alphabet::from_chars("012").map_err(|e| e.to_string())?),
        ),
        ("tagged", tagged),
    ];
    let mut rng = rng(1);
    for (kind, space) in &spaces {
        let mut c = random_clopen(&mut rng, space);
        for i in 0..PAIRS {
            let a = random_clopen(&mut rng, space);
            let b = random_clopen(&mut rng, space);
            let laws = [
                (
                    "de morgan ∪",
                    a.union(&b).complement() == a.complement().intersection(&b.complement()),
                ),
                (
                    "de morgan ∩",
                    a.intersection(&b).complement() == a.complement().union(&b.complement()),
                ),
                ("involution", a.complement().complement() == a),
                (
                    "distributivity ∩",
                    a.intersection(&b.union(&c)) == a.intersection(&b).union(&a.intersection(&c)),
                ),
                (
                    "distributivity ∪",
                    a.union(&b.intersection(&c)) == a.union(&b).intersection(&a.union(&c)),
                ),
                ("absorption ∪", a.union(&a.intersection(&b)) == a),
                ("absorption ∩", a.intersection(&a.union(&b)) == a),
            ];
            for (law, ok) in laws {
                ensure(ok, || {
                    format!("{kind} pair {i}: {law} fails for {a} and {b}")
                })?;
            }
            c = b;
        }
    }
    Ok(format!(
        "{PAIRS} pairs x {} space kinds, 7 laws",
        spaces.len()
    ))
}

fn homomorphism<Sys: EffectiveSystem + ?Sized>(
    system: &Sys,
    count: usize,
    rng: &mut impl Rng,
) -> Result<usize, String> {
    let mut canonical = 0;
    let mut prev = random_ball_union(system, rng);
    for i in 0..count {
        let a = random_ball_union(system, rng);
        let b = std::mem::replace(&mut prev, a.clone());
        let pa = system.preimage(&a);
        let pb = system.preimage(&b);
        let pairs = [
            ("∪", system.preimage(&a.union(&b)), pa.union(&pb)),
            (
                "∩",
                system.preimage(&a.intersection(&b)),
                pa.intersection(&pb),
            ),
            (
                "complement",
                system.preimage(&a.complement()),
                pa.complement(),
            ),
        ];
        for (op, lhs, rhs) in pairs {
            if lhs == rhs {
                canonical += 1;
            } else {
                ensure(system.equal_in_space(&lhs, &rhs), || {
                    format!(
                        "{}: preimage does not commute with {op} on sample {i}: {a} / {b}",
                        system.describe()
                    )
                })?;
            }
        }
    }
    Ok(canonical)
}

// 2. Preimages commute with the Boolean operations on the space.
fn preimage_homomorphism() -> Outcome_ {
    const SAMPLES: usize = 200;
    let mut rng = rng(2);
    let (mut total, mut canonical) = (0, 0);
    for text in SYSTEMS {
        canonical += match build(text) {
            BuiltSystem::Clopen(s) => homomorphism(s.as_ref(), SAMPLES, &mut rng)?,
            BuiltSystem::Product(p) => homomorphism(p.as_ref(), SAMPLES, &mut rng)?,
        };
        total += 3 * SAMPLES;
    }
    Ok(format!("{} systems x {SAMPLES} sets; {canonical}/{total} identities hold canonically, all on the space", SYSTEMS.len()))
}

fn symbol_partition<Sys: EffectiveSystem<Set = ClopenSet>>(
    system: &Sys,
) -> Result<Partition<ClopenSet>, String> {
    let space = one_sided();
    Partition::new(
        system,
        vec![
            ("0".into(), cyl(&space, &[0])),
            ("1".into(), cyl(&space, &[1])),
        ],
    )
    .map_err(|e| e.to_string())
}

fn language_agrees<Sys: EffectiveSystem<Set = ClopenSet>>(
    system: &Sys,
    oracle: impl Fn(&[Sym]) -> bool,
    name: &str,
) -> Result<usize, String> {
    let p = symbol_partition(system)?;
    let all = words_up_to(2, 8);
    for w in &all {
        let idx: Vec<usize> = w.iter().map(|&a| a as usize).collect();
        let got = word_in_language(system, &p, &idx).0;
        ensure(got == oracle(w), || {
            format!("{name}: word {w:?}: library says {got}")
        })?;
    }
    Ok(all.len())
}

// 3. Induced languages against direct membership.
fn induced_language_oracle() -> Outcome_ {
    let space = one_sided();
    let golden = ShiftSystem::sft(space.clone(), vec![vec![1, 1]]).map_err(|e| e.to_string())?;
    let n = language_agrees(&golden, |w| !contains_factor(w, &[1, 1]), "golden mean")?;
    let edges = random_presentation(&mut rng(3), 3);
    let sofic = ShiftSystem::sofic(
        space,
        Presentation::graph(edges.clone()).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    language_agrees(&sofic, |w| sofic_accepts(&edges, w), "random sofic")?;
    let p = symbol_partition(&golden)?;
    let words = enumerate_language(&golden, &p, 10);
    for len in 0..=10 {
        let count = words.iter().filter(|w| w.len() == len).count();
        ensure(count == fib(len + 2), || {
            format!(
                "golden mean: {count} words of length {len}, expected {}",
                fib(len + 2)
            )
        })?;
    }
    Ok(format!(
        "{n} words per shift; counts Fib(n+2) for n <= 10; sofic edges {edges:?}"
    ))
}

// 4. The identity induces exactly the constant words.
fn identity_constant_words() -> Outcome_ {
    let space = one_sided();
    let id = Identity::new(space.clone());
    let balls: Vec<ClopenSet> = words(2, 2).iter().map(|w| cyl(&space, w)).collect();
    let partitions = set_partitions(4);
    for rgs in &partitions {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let cells: Vec<(String, ClopenSet)> = (0..blocks)
            .map(|b| {
                let set = rgs
                    .iter()
                    .zip(&balls)
                    .filter(|(&g, _)| g == b)
                    .fold(ClopenSet::empty(&space), |acc, (_, c)| acc.union(c));
                (format!("C{b}"), set)
            })
            .collect();
        let p = Partition::new(&id, cells).map_err(|e| e.to_string())?;
        let got: BTreeSet<Vec<usize>> = enumerate_language(&id, &p, 4).into_iter().collect();
        let mut expected: BTreeSet<Vec<usize>> = BTreeSet::from([Vec::new()]);
        for b in 0..blocks {
            for n in 1..=4 {
                expected.insert(vec![b; n]);
            }
        }
        ensure(got == expected, || {
            format!("partition {rgs:?}: induced {got:?}")
        })?;
    }
    Ok(format!(
        "{} partitions of the depth-2 balls",
        partitions.len()
    ))
}

// 5. Basins of the prepend-zero map.
fn prepend_zero_basins() -> Outcome_ {
    let z = PrependZero::new();
    let space = one_sided();
    let budget = Budget::default();
    match basin(&z, &cyl(&space, &[0]), &budget) {
        FixpointResult::Stable { set, iterations: 2 } if z.equal_in_space(&set, &z.whole()) => {}
        other => return Err(format!("basin([0]) = {other:?}")),
    }
    match basin(&z, &cyl(&space, &[1]), &budget) {
        FixpointResult::Stable { set, iterations: 1 } if set == cyl(&space, &[1]) => {}
        other => return Err(format!("basin([1]) = {other:?}")),
    }
    match infinitely_often(&z, &cyl(&space, &[0]), &budget) {
        FixpointResult::Stable { set, .. } if z.equal_in_space(&set, &z.whole()) => {}
        other => return Err(format!("infinitely_often([0]) = {other:?}")),
    }
    Ok("basin([0]) = X at m = 2, basin([1]) = [1] at m = 1, io([0]) = X".into())
}

// 6. The shadowing decider against de Bruijn reachability.
fn shadowing_totality() -> Outcome_ {
    let space = one_sided();
    let mut rng = rng(6);
    let mut shifts: Vec<Vec<Vec<Sym>>> = vec![Vec::new()];
    shifts.extend((0..5).map(|_| random_forbidden(&mut rng)));
    let cylinders: Vec<Vec<Sym>> = (1..=3).flat_map(|n| words(2, n)).collect();
    let mut pairs = 0;
    let mut reachable = 0;
    for forbidden in &shifts {
        let system = if forbidden.is_empty() {
            ShiftSystem::full(space.clone())
        } else {
            ShiftSystem::sft(space.clone(), forbidden.clone())
        }
        .map_err(|e| e.to_string())?;
        let graph = DeBruijn::new(forbidden, 3);
        for u in &cylinders {
            for v in &cylinders {
                let d = decide_reach_shadowing(&system, &cyl(&space, u), &cyl(&space, v))
                    .map_err(|e| e.to_string())?;
                let expected = graph.reaches(u, v);
                ensure(d.reachable == expected, || {
                    format!("forbidden {forbidden:?}: {u:?} -> {v:?} decided {} but the graph says {expected}", d.reachable)
                })?;
                pairs += 1;
                reachable += usize::from(expected);
            }
        }
    }
    Ok(format!(
        "{pairs} pairs over 6 shifts, {reachable} reachable; forbidden sets {:?}",
        &shifts[1..]
    ))
}

// 7. Muller checking: the invariance figure, and basins on the identity.
fn muller_checking() -> Outcome_ {
    let space = one_sided();
    let budget = Budget::default();
    let full = ShiftSystem::full(space.clone()).map_err(|e| e.to_string())?;
    let p = Partition::with_rest(&full, vec![("U".into(), cyl(&space, &[0]))], "rest")
        .map_err(|e| e.to_string())?;
    let v = check_omega(&full, &p, &figures::invariance(), &budget, Strategy::Auto)
        .map_err(|e| e.to_string())?;
    ensure(
        v.outcome == Outcome::Holds && matches!(v.evidence, Evidence::Lasso { .. }),
        || format!("invariance([0]) on the full shift: {v:?}"),
    )?;
    let z = PrependZero::new();
    let p = Partition::with_rest(&z, vec![("U".into(), cyl(&space, &[1]))], "rest")
        .map_err(|e| e.to_string())?;
    let v = check_omega(&z, &p, &figures::invariance(), &budget, Strategy::Auto)
        .map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::Fails, || {
        format!("invariance([1]) on prepend_zero: {v:?}")
    })?;

    let id = Identity::new(space.clone());
    let balls: Vec<ClopenSet> = words(2, 2).iter().map(|w| cyl(&space, w)).collect();
    let partitions = set_partitions(4);
    let mut rng = rng(7);
    let mut holds = 0;
    for i in 0..50 {
        let rgs = &partitions[rng.gen_range(0..partitions.len())];
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let cells: Vec<(String, ClopenSet)> = (0..blocks)
            .map(|b| {
                let set = rgs
                    .iter()
                    .zip(&balls)
                    .filter(|(&g, _)| g == b)
                    .fold(ClopenSet::empty(&space), |acc, (_, c)| acc.union(c));
                (format!("C{b}"), set)
            })
            .collect();
        let p = Partition::new(&id, cells).map_err(|e| e.to_string())?;
        let m = random_muller(&mut rng, p.names(), 4);
        let expected = (0..blocks).any(|a| muller_accepts_constant(&m, a));
        let v = check_omega(&id, &p, &m, &budget, Strategy::Basins).map_err(|e| e.to_string())?;
        let want = if expected {
            Outcome::Holds
        } else {
            Outcome::Fails
        };
        ensure(v.outcome == want, || {
            format!("automaton {i} on partition {rgs:?}: basins gave {v:?}, expected {want:?}")
        })?;
        holds += usize::from(expected);
    }
    Ok(format!(
        "figure verdicts as expected; 50 random Muller automata agree ({holds} accepting)"
    ))
}

/// A random one-sided binary sofic shift with a partition into unions of
/// depth-`d` balls, `d <= 2`.
fn random_sofic_setup(rng: &mut impl Rng) -> Result<(ShiftSystem, Partition<ClopenSet>), String> {
    let space = one_sided();
    let edges = random_presentation(rng, 3);
    let system = ShiftSystem::sofic(
        space.clone(),
        Presentation::graph(edges).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let depth = rng.gen_range(1..=2);
    let balls: Vec<ClopenSet> = words(2, depth).iter().map(|w| cyl(&space, w)).collect();
    let blocks = rng.gen_range(2..=balls.len());
    let mut groups: Vec<usize> = (0..balls.len()).map(|i| i % blocks).collect();
    for i in (1..groups.len()).rev() {
        groups.swap(i, rng.gen_range(0..=i));
    }
    let cells = (0..blocks)
        .map(|b| {
            let set = groups
                .iter()
                .zip(&balls)
                .filter(|(&g, _)| g == b)
                .fold(ClopenSet::empty(&space), |acc, (_, c)| acc.union(c));
            (format!("C{b}"), set)
        })
        .collect();
    let p = Partition::new(&system, cells).map_err(|e| e.to_string())?;
    Ok((system, p))
}

// 8. Semi-decision answers agree with the exact sofic decision.
fn dispatch_coherence() -> Outcome_ {
    let budget = Budget::default();
    let mut rng = rng(8);
    let mut answered = 0;
    for i in 0..50 {
        let (system, p) = random_sofic_setup(&mut rng)?;
        let dfa = random_dfa(&mut rng, p.names(), 4);
        let exact = check_regular(&system, &p, &dfa, &budget, Strategy::Exact)
            .map_err(|e| e.to_string())?;
        let semi = check_regular(&system, &p, &dfa, &budget, Strategy::SemiDecide)
            .map_err(|e| e.to_string())?;
        if let Evidence::Witness { word } = &exact.evidence {
            let idx = p.parse_word(word).map_err(|e| e.to_string())?;
            ensure(
                dfa.accepts(&idx) && word_in_language(&system, &p, &idx).0,
                || format!("dfa {i}: bad witness {word:?}"),
            )?;
        }
        if semi.outcome != Outcome::Unknown {
            answered += 1;
            ensure(semi.outcome == exact.outcome, || {
                format!("dfa {i}: exact {exact:?}, semi-decider {semi:?}")
            })?;
        }
    }
    let mut answered_omega = 0;
    for i in 0..20 {
        let (system, p) = random_sofic_setup(&mut rng)?;
        let m = random_muller(&mut rng, p.names(), 4);
        let exact =
            check_omega(&system, &p, &m, &budget, Strategy::Exact).map_err(|e| e.to_string())?;
        let semi = check_omega(&system, &p, &m, &budget, Strategy::SemiDecide)
            .map_err(|e| e.to_string())?;
        if semi.outcome != Outcome::Unknown {
            answered_omega += 1;
            ensure(semi.outcome == exact.outcome, || {
                format!("muller {i}: exact {exact:?}, semi-decider {semi:?}")
            })?;
        }
    }
    Ok(format!("semi-decider answered {answered}/50 regular and {answered_omega}/20 omega queries, all agreeing"))
}

fn random_config(rng: &mut impl Rng, sim: &TmInCa) -> TapeConfig {
    let m = sim.homed();
    let running: Vec<usize> = (0..m.states().len())
        .filter(|&q| !m.is_halting(q))
        .collect();
    let len = rng.gen_range(0..=8);
    let offset = rng.gen_range(-4..=4i64);
    let cells = (0..len)
        .map(|_| rng.gen_range(0..m.alphabet().len() as Sym))
        .collect();
    let head = rng.gen_range(offset - 1..=offset + len as i64);
    TapeConfig {
        state: running[rng.gen_range(0..running.len())],
        head,
        offset,
        cells,
    }
    .normalized()
}

// 9. The cellular automaton simulates the machine step by step.
fn tm_in_ca_commutation() -> Outcome_ {
    let mut rng = rng(9);
    let mut halting_checked = 0;
    for machine in [parity_machine(), busy_beaver3()] {
        let sim = TmInCa::new(&machine).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let mut tape = random_config(&mut rng, &sim);
            let mut ca = sim.encode(&tape);
            for t in 0..50 {
                if !tape.step(sim.homed()) {
                    break;
                }
                ca = sim.step(&ca);
                let decoded = sim.decode(&ca);
                ensure(decoded.as_ref() == Some(&tape.normalized()), || {
                    format!(
                        "config {i}, step {t}: decoded {decoded:?}, machine at {:?}",
                        tape.normalized()
                    )
                })?;
            }
        }
        let table = HaltTimeTable::build(machine.clone(), 8, 50).map_err(|e| e.to_string())?;
        for (&n, &entry) in table.entries() {
            let v = sim.halting_query(&unary_input(n), 10_000);
            match entry {
                HaltEntry::Halts(_) => ensure(v.outcome == Outcome::Holds, || {
                    format!("input {n} halts but the query says {v:?}")
                })?,
                HaltEntry::Never => ensure(v.outcome != Outcome::Holds, || {
                    format!("input {n} never halts but the query holds")
                })?,
                HaltEntry::NoHaltWithin(_) => continue,
            }
            halting_checked += 1;
        }
    }
    Ok(format!(
        "2 machines x 100 configurations x 50 steps; {halting_checked} halting queries agree"
    ))
}

// 10. The chaotic universal subshift for the parity machine.
fn chaotic_universal_shift() -> Outcome_ {
    let table = HaltTimeTable::build(parity_machine(), 8, 200).map_err(|e| e.to_string())?;
    let u = chaotic_universal(&table);
    let admissible: Vec<Vec<Sym>> = (1..=4)
        .flat_map(|n| words(3, n))
        .filter(|w| avoids_halting_patterns(&table, w))
        .collect();
    for w in &admissible {
        ensure(u.system().in_language(w), || {
            format!("{w:?} avoids every pattern but is not in the language")
        })?;
        let period = u.periodic_point(w).map_err(|e| e.to_string())?;
        let trace: Vec<Sym> = period
            .iter()
            .cycle()
            .take(3 * period.len())
            .copied()
            .collect();
        ensure(
            trace.starts_with(w) && avoids_halting_patterns(&table, &trace),
            || format!("bad period {period:?} for {w:?}"),
        )?;
    }
    for v in &admissible {
        for w in &admissible {
            let c = u.transitivity_witness(v, w).map_err(|e| e.to_string())?;
            ensure(
                c.starts_with(v)
                    && c[v.len() + 1..].starts_with(w)
                    && avoids_halting_patterns(&table, &c),
                || format!("bad connector {c:?} for {v:?} -> {w:?}"),
            )?;
        }
    }
    let budget = Budget::default();
    let mut halting = 0;
    for (&n, &entry) in table.entries() {
        let v = u.halting_query(n, &budget).map_err(|e| e.to_string())?;
        let want = match entry {
            HaltEntry::Halts(_) => Outcome::Holds,
            HaltEntry::Never => Outcome::Fails,
            HaltEntry::NoHaltWithin(_) => Outcome::Unknown,
        };
        ensure(v.outcome == want, || {
            format!("input {n} ({entry:?}): query gave {v:?}")
        })?;
        halting += usize::from(want == Outcome::Holds);
    }
    Ok(format!(
        "{} admissible words, {} connectors; guarded query matches all {} table entries ({halting} halting)",
        admissible.len(),
        admissible.len().pow(2),
        table.entries().len()
    ))
}

// 11. Equicontinuity refinement.
fn equicontinuity() -> Outcome_ {
    let space = one_sided();
    let budget = Budget::default();
    let id = Identity::new(space.clone());
    for eps in 1..=3 {
        match equicontinuity_modulus(&id, eps, &budget) {
            ModulusResult::Stable { delta_level, .. } if delta_level == eps => {}
            other => return Err(format!("identity at level {eps}: {other:?}")),
        }
    }
    let z_rounds = match equicontinuity_modulus(&PrependZero::new(), 2, &budget) {
        ModulusResult::Stable { rounds, .. } if rounds <= 3 => rounds,
        other => return Err(format!("prepend_zero at level 2: {other:?}")),
    };
    let full = ShiftSystem::full(space).map_err(|e| e.to_string())?;
    let small = Budget {
        max_iter: 10,
        ..Budget::default()
    };
    let levels = match equicontinuity_modulus(&full, 1, &small) {
        ModulusResult::Unknown { levels } => levels,
        other => return Err(format!("full shift: {other:?}")),
    };
    ensure(
        levels.len() >= 2 && levels.windows(2).all(|p| p[0] < p[1]),
        || format!("full shift levels {levels:?}"),
    )?;
    Ok(format!(
        "identity δ = ε; prepend_zero stable after {z_rounds} rounds; full shift levels {levels:?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome_); 11] = [
        ("clopen algebra laws", 5, clopen_laws),
        ("preimage homomorphism", 10, preimage_homomorphism),
        ("induced language oracle", 10, induced_language_oracle),
        ("identity constant words", 1, identity_constant_words),
        ("prepend-zero basins", 1, prepend_zero_basins),
        ("shadowing decider totality", 30, shadowing_totality),
        ("muller checking", 30, muller_checking),
        ("dispatch coherence", 60, dispatch_coherence),
        ("tm-in-ca commutation", 60, tm_in_ca_commutation),
        ("chaotic universal subshift", 60, chaotic_universal_shift),
        ("equicontinuity modulus", 5, equicontinuity),
    ];
    println!("acceptance (seed {})", seed());
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (status, detail) = match result {
            Ok(d) if elapsed < limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over the time limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        failed += usize::from(status == "FAIL");
        println!(
            "{status} {:>2} {name:<28} {:>7.2}s / {:>2}s  {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
