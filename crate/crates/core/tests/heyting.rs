mod common;

use proptest::prelude::*;
use sheaf_eu::rational::int;
use sheaf_eu::topology::{Classicality, Space};

use common::{heyting_laws, implication_matches_oracle, random_open, rng};

fn exhaustive(space: &Space) {
    let opens = space.opens().unwrap();
    for a in &opens {
        for b in &opens {
            assert!(implication_matches_poset(space, a, b));
            for c in &opens {
                heyting_laws(space, a, b, c).unwrap();
            }
        }
    }
}

/// `x ∈ a→b` iff every point above `x` in `a` is in `b`.
fn implication_matches_poset(space: &Space, a: &sheaf_eu::topology::OpenSet, b: &sheaf_eu::topology::OpenSet) -> bool {
    let poset = space.as_poset().unwrap();
    let got = space.implies(a, b).unwrap();
    let (sa, sb, sg) = (a.points().unwrap(), b.points().unwrap(), got.points().unwrap());
    (0..poset.len()).all(|x| {
        let expected = (0..poset.len()).all(|y| !poset.leq(x, y) || !sa.contains(&y) || sb.contains(&y));
        sg.contains(&x) == expected
    })
}

#[test]
fn three_stage_space_is_heyting() {
    exhaustive(&Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")]).unwrap());
}

#[test]
fn sierpinski_is_heyting_but_not_boolean() {
    let space = Space::poset(&["0", "1"], &[("0", "1")]).unwrap();
    exhaustive(&space);
    let one = space.open_named(&["1"]).unwrap();
    let lem = space.join(&one, &space.not(&one).unwrap()).unwrap();
    assert_eq!(space.show(&lem), "{1}");
    assert!(matches!(space.is_classical(), Classicality::NonClassical { .. }));
}

#[test]
fn excluded_middle_holds_on_discrete_spaces() {
    let space = Space::poset(&["a", "b", "c"], &[]).unwrap();
    assert_eq!(space.is_classical(), Classicality::Classical);
    for u in space.opens().unwrap() {
        assert_eq!(space.join(&u, &space.not(&u).unwrap()).unwrap(), space.carrier());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interval_opens_form_a_heyting_algebra(seed in any::<u64>()) {
        let space = Space::interval(int(0), int(1)).unwrap();
        let mut r = rng(seed);
        let (a, b, c) = (random_open(&mut r, &space), random_open(&mut r, &space), random_open(&mut r, &space));
        prop_assert_eq!(heyting_laws(&space, &a, &b, &c), Ok(()));
        prop_assert!(implication_matches_oracle(&space, &a, &b));
    }

    #[test]
    fn excluded_middle_fails_exactly_at_boundaries(seed in any::<u64>()) {
        let space = Space::interval(int(0), int(1)).unwrap();
        let a = random_open(&mut rng(seed), &space);
        let lem = space.join(&a, &space.not(&a).unwrap()).unwrap();
        // the gap is the boundary of a, a finite set of points
        let gap = space.difference(&space.carrier(), &lem).unwrap();
        let boundary = common::probe_points().into_iter().filter(|x| {
            let in_a = common::member(&a, x);
            let in_not = common::member(&space.not(&a).unwrap(), x);
            !in_a && !in_not
        });
        for x in boundary {
            prop_assert!(!common::member(&lem, &x));
        }
        prop_assert!(space.interior(&gap).unwrap().is_empty());
    }
}
