//! Quick seeded consistency checks of the library, one line per check.
//!
//! The seed comes from `SYMDYN_SEED` (decimal or `0x` hex) so a failing run
//! can be replayed.

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::automata::figures;
use symdyn::checker::{basin, check_regular, Budget, FixpointResult, Outcome, Strategy};
use symdyn::gallery::{parity_machine, TmInCa};
use symdyn::language::Partition;
use symdyn::system::{CellularAutomaton, LocalRule, PrependZero, ShiftSystem, TapeConfig};
use symdyn::{Alphabet, ClopenSet, Cylinder, EffectiveSystem, SetAlgebra, SpaceSpec, Sym};

const DEFAULT_SEED: u64 = 0x5eed_2024;

fn seed() -> Result<u64> {
    match std::env::var("SYMDYN_SEED") {
        Err(_) => Ok(DEFAULT_SEED),
        Ok(s) => {
            let s = s.trim();
            match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => s.parse(),
            }
            .with_context(|| format!("SYMDYN_SEED={s:?} is not a number"))
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        bail!(msg())
    }
}

/// A union of up to four random cylinders of depth at most 5.
fn random_set(rng: &mut ChaCha8Rng, space: &std::sync::Arc<SpaceSpec>) -> Result<ClopenSet> {
    let k = space.alphabet().len() as Sym;
    let two_sided = space.is_two_sided();
    let cylinders: Vec<Cylinder> = (0..rng.gen_range(0..=4))
        .map(|_| {
            let len = rng.gen_range(1..=5);
            let word = (0..len).map(|_| rng.gen_range(0..k)).collect();
            let anchor = if two_sided { rng.gen_range(-2..=0) } else { 0 };
            Cylinder::new(anchor, word)
        })
        .collect();
    Ok(ClopenSet::normalize(space, &cylinders)?)
}

fn cyl(space: &std::sync::Arc<SpaceSpec>, word: &[Sym]) -> Result<ClopenSet> {
    Ok(ClopenSet::cylinder(
        space,
        &Cylinder::at_origin(word.to_vec()),
    )?)
}

fn boolean_laws(rng: &mut ChaCha8Rng, cases: usize) -> Result<String> {
    let spaces = [
        SpaceSpec::one_sided(Alphabet::binary()),
        SpaceSpec::two_sided(Alphabet::binary()),
    ];
    for space in &spaces {
        for _ in 0..cases {
            let (a, b, c) = (
                random_set(rng, space)?,
                random_set(rng, space)?,
                random_set(rng, space)?,
            );
            check(
                a.union(&b).complement() == a.complement().intersection(&b.complement()),
                || format!("De Morgan fails for {a} and {b}"),
            )?;
            check(a.complement().complement() == a, || {
                format!("double complement of {a}")
            })?;
            check(
                a.intersection(&b.union(&c)) == a.intersection(&b).union(&a.intersection(&c)),
                || format!("distributivity fails for {a}, {b}, {c}"),
            )?;
        }
    }
    Ok(format!("{} triples", 2 * cases))
}

fn homomorphism<Sys: EffectiveSystem<Set = ClopenSet>>(
    system: &Sys,
    rng: &mut ChaCha8Rng,
    cases: usize,
) -> Result<()> {
    let space = system.whole().space().clone();
    for _ in 0..cases {
        let (a, b) = (random_set(rng, &space)?, random_set(rng, &space)?);
        let (pa, pb) = (system.preimage(&a), system.preimage(&b));
        check(
            system.equal_in_space(&system.preimage(&a.union(&b)), &pa.union(&pb)),
            || format!("preimage of {a} ∪ {b}"),
        )?;
        check(
            system.equal_in_space(&system.preimage(&a.complement()), &pa.complement()),
            || format!("preimage of the complement of {a}"),
        )?;
    }
    Ok(())
}

fn preimages(rng: &mut ChaCha8Rng, cases: usize) -> Result<String> {
    let sft = ShiftSystem::sft(SpaceSpec::one_sided(Alphabet::binary()), vec![vec![1, 1]])?;
    homomorphism(&sft, rng, cases)?;
    let rule = LocalRule::from_fn(1, 2, |n| (110u8 >> (4 * n[0] + 2 * n[1] + n[2])) & 1)?;
    let ca = CellularAutomaton::new(SpaceSpec::two_sided(Alphabet::binary()), rule)?;
    homomorphism(&ca, rng, cases)?;
    Ok(format!("{} pairs on an SFT and rule 110", 2 * cases))
}

fn basins() -> Result<String> {
    let z = PrependZero::new();
    let space = z.whole().space().clone();
    let budget = Budget::default();
    match basin(&z, &cyl(&space, &[0])?, &budget) {
        FixpointResult::Stable { set, iterations: 2 } if z.equal_in_space(&set, &z.whole()) => {}
        other => bail!("basin([0]) under prepend-zero is {other:?}"),
    }
    match basin(&z, &cyl(&space, &[1])?, &budget) {
        FixpointResult::Stable { set, iterations: 1 } if set == cyl(&space, &[1])? => {}
        other => bail!("basin([1]) under prepend-zero is {other:?}"),
    }
    Ok("prepend-zero basins of [0] and [1]".into())
}

fn halting_figure() -> Result<String> {
    let full = ShiftSystem::full(SpaceSpec::one_sided(Alphabet::binary()))?;
    let space = full.whole().space().clone();
    let cells = vec![
        ("U".to_string(), cyl(&space, &[0])?),
        ("V".to_string(), cyl(&space, &[1])?),
    ];
    let p = Partition::with_rest(&full, cells, "rest")?;
    let v = check_regular(
        &full,
        &p,
        &figures::halting(),
        &Budget::default(),
        Strategy::Auto,
    )?;
    check(v.outcome == Outcome::Holds, || {
        format!("[0] reaches [1] on the full shift, got {v:?}")
    })?;
    Ok("[0] reaches [1] on the full shift".into())
}

fn tm_in_ca(rng: &mut ChaCha8Rng, cases: usize) -> Result<String> {
    let sim = TmInCa::new(&parity_machine())?;
    let m = sim.homed();
    let running: Vec<usize> = (0..m.states().len())
        .filter(|&q| !m.is_halting(q))
        .collect();
    for i in 0..cases {
        let len = rng.gen_range(0..=6);
        let offset = rng.gen_range(-3..=3i64);
        let cells = (0..len)
            .map(|_| rng.gen_range(0..m.alphabet().len() as Sym))
            .collect();
        let head = rng.gen_range(offset - 1..=offset + len as i64);
        let state = running[rng.gen_range(0..running.len())];
        let mut tape = TapeConfig {
            state,
            head,
            offset,
            cells,
        }
        .normalized();
        let mut ca = sim.encode(&tape);
        for t in 0..20 {
            if !tape.step(m) {
                break;
            }
            ca = sim.step(&ca);
            check(sim.decode(&ca) == Some(tape.normalized()), || {
                format!("configuration {i} diverges from the machine at step {t}")
            })?;
        }
    }
    Ok(format!("{cases} configurations x 20 steps"))
}

pub fn run(cases: usize) -> Result<ExitCode> {
    let seed = seed()?;
    println!("selftest (seed {seed})");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks: Vec<(&str, Result<String>)> = vec![
        ("boolean laws", boolean_laws(&mut rng, cases)),
        ("preimage homomorphism", preimages(&mut rng, cases)),
        ("prepend-zero basins", basins()),
        ("halting figure", halting_figure()),
        ("tm in ca", tm_in_ca(&mut rng, cases)),
    ];
    let mut failed = false;
    for (name, result) in checks {
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(e) => {
                failed = true;
                println!("FAIL {name}: {e:#}");
            }
        }
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
