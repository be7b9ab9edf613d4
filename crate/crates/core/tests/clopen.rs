//! Clopen sets: Boolean laws, canonical form, balls, serialization, and
//! membership against the raw cylinder list.

mod common;

use std::sync::Arc;

use proptest::prelude::*;
use symdyn::clopen::{balls, Resolution};
use symdyn::json::{parse, parse_set, render_set, to_string, ClopenJson, SpaceContext};
use symdyn::{Alphabet, ClopenSet, Cylinder, SetAlgebra, SpaceSpec, Sym};

use common::*;

fn spaces() -> Vec<Arc<SpaceSpec>> {
    vec![
        one_sided(),
        SpaceSpec::two_sided(Alphabet::binary()),
        SpaceSpec::one_sided(Alphabet::from_chars("abc").unwrap()),
        SpaceSpec::tagged(
            vec!["p".into(), "q".into()],
            SpaceSpec::TwoSided(Alphabet::binary()),
        )
        .unwrap(),
    ]
}

fn triple(kind: usize, seed: u64) -> (ClopenSet, ClopenSet, ClopenSet) {
    let space = &spaces()[kind];
    let mut rng = rng(seed);
    (
        random_clopen(&mut rng, space),
        random_clopen(&mut rng, space),
        random_clopen(&mut rng, space),
    )
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn boolean_laws(kind in 0..4usize, seed: u64) {
        let (a, b, c) = triple(kind, seed);
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.intersection(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.intersection(&b.union(&c)), a.intersection(&b).union(&a.intersection(&c)));
        prop_assert_eq!(a.union(&b.intersection(&c)), a.union(&b).intersection(&a.union(&c)));
        prop_assert_eq!(a.union(&a.intersection(&b)), a.clone());
        prop_assert_eq!(a.intersection(&a.union(&b)), a.clone());
        prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert!(a.union(&a.complement()).is_whole());
        prop_assert!(a.intersection(&a.complement()).is_empty());
    }

    #[test]
    fn normalize_is_idempotent(kind in 0..4usize, seed: u64) {
        let (a, _, _) = triple(kind, seed);
        let again = ClopenSet::normalize(a.space(), &a.cylinders()).unwrap();
        prop_assert_eq!(&again, &a);
        prop_assert_eq!(ClopenSet::normalize(a.space(), &again.cylinders()).unwrap(), again);
    }

    #[test]
    fn json_and_text_round_trip(kind in 0..4usize, seed: u64) {
        let (a, _, _) = triple(kind, seed);
        let json = to_string(&ClopenJson::from_set(&a));
        prop_assert_eq!(parse::<ClopenJson>(&json).unwrap().build().unwrap(), a.clone());
        let ctx = SpaceContext(a.space().clone());
        prop_assert_eq!(parse_set(&render_set(&a), &ctx).unwrap(), a);
    }

    /// A depth-6 word lies in the normalized set iff some raw cylinder is a
    /// prefix of it.
    #[test]
    fn membership_matches_raw_cylinders(
        raw in prop::collection::vec(prop::collection::vec(0..2u8, 1..=6), 0..5),
        point in prop::collection::vec(0..2u8, 6),
    ) {
        let space = one_sided();
        let cylinders: Vec<Cylinder> = raw.iter().map(|w| Cylinder::at_origin(w.clone())).collect();
        let set = ClopenSet::normalize(&space, &cylinders).unwrap();
        let expected = raw.iter().any(|w| point.starts_with(w));
        prop_assert_eq!(set.contains_cylinder(0, 0, &point), expected);
        prop_assert_eq!(!set.intersection(&cyl(&space, &point)).is_empty(), expected);
    }
}

#[test]
fn balls_partition_the_space_and_nest() {
    for space in spaces() {
        let k = space.alphabet().len();
        for level in 0..=3 {
            let bs = balls(&space, Resolution::Depth(level));
            let cells = if space.is_two_sided() {
                2 * level + 1
            } else {
                level
            };
            assert_eq!(
                bs.len(),
                space.tag_count() * k.pow(cells as u32),
                "level {level}"
            );
            let mut union = ClopenSet::empty(&space);
            for (i, a) in bs.iter().enumerate() {
                assert!(!a.is_empty());
                for b in &bs[i + 1..] {
                    assert!(a.intersection(b).is_empty(), "{a} meets {b}");
                }
                union = union.union(a);
            }
            assert!(union.is_whole());
            // Ultrametric nesting: each finer ball sits inside exactly one coarser ball.
            let finer = balls(&space, Resolution::Depth(level + 1));
            for f in &finer {
                let parents = bs.iter().filter(|b| f.difference(b).is_empty()).count();
                assert_eq!(parents, 1, "{f}");
            }
        }
    }
}

#[test]
fn one_sided_anchors_are_rejected() {
    let space = one_sided();
    let word: Vec<Sym> = vec![1];
    assert!(ClopenSet::cylinder(&space, &Cylinder::new(1, word)).is_err());
}
