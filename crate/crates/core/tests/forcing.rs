mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sheaf_eu::forcing::{check_forcing_laws, eval_formula, AtomRel, Env, Formula, Term, Value, Weight};
use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::{split_cover, truth_value, LocalRanking, Ranking, Relation, Tabulated};
use sheaf_eu::rational::{int, ratio};
use sheaf_eu::topology::{OpenSet, Space};

use common::{random_open, rng, utility_world};

const RELATIONS: [Relation; 3] = [Relation::Prec, Relation::Sim, Relation::Precsim];

fn random_term(r: &mut ChaCha8Rng, names: &[String]) -> Term {
    let name = |r: &mut ChaCha8Rng| Term::Name(names[r.gen_range(0..names.len())].clone());
    if r.gen_bool(0.25) {
        let a = Weight::Literal(ratio(r.gen_range(0..=4), 4));
        Term::Mix(Box::new(a), Box::new(name(r)), Box::new(name(r)))
    } else {
        name(r)
    }
}

/// A random formula over lottery comparisons, with quantifiers over `F`.
fn random_formula(r: &mut ChaCha8Rng, names: &[String], depth: u32) -> Formula {
    let leaf = depth == 0 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => {
                let rel = RELATIONS[r.gen_range(0..3)];
                Formula::Atom(AtomRel::Pref(rel), random_term(r, names), random_term(r, names))
            }
        };
    }
    let sub = |r: &mut ChaCha8Rng| Box::new(random_formula(r, names, depth - 1));
    match r.gen_range(0..6) {
        0 => Formula::And(sub(r), sub(r)),
        1 => Formula::Or(sub(r), sub(r)),
        2 => Formula::Implies(sub(r), sub(r)),
        3 => Formula::Not(sub(r)),
        4 => {
            let v = format!("x{depth}");
            let mut inner = names.to_vec();
            inner.push(v.clone());
            Formula::Exists(v, "F".into(), Box::new(random_formula(r, &inner, depth - 1)))
        }
        _ => {
            let v = format!("x{depth}");
            let mut inner = names.to_vec();
            inner.push(v.clone());
            Formula::ForAll(v, "F".into(), Box::new(random_formula(r, &inner, depth - 1)))
        }
    }
}

fn env_for<'a>(space: &'a Space, pref: &'a dyn Ranking, family: &[(String, Lottery)]) -> Env<'a> {
    let mut env = Env::new(space).with_pref(pref);
    for (n, l) in family {
        env.insert(n, Value::Lottery(l.clone()));
    }
    env.families.insert("F".into(), family.iter().map(|(n, _)| n.clone()).collect());
    env
}

fn nonempty_open(r: &mut ChaCha8Rng, space: &Space) -> OpenSet {
    loop {
        let w = random_open(r, space);
        if !w.is_empty() {
            return w;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relations_are_consistent(seed in any::<u64>()) {
        let (space, pref, family, mut r) = utility_world(seed);
        let w = nonempty_open(&mut r, &space);
        for (_, p) in &family {
            prop_assert_eq!(truth_value(&pref, Relation::Sim, p, p, &w).unwrap(), w.clone());
            for (_, q) in &family {
                let lt = truth_value(&pref, Relation::Prec, p, q, &w).unwrap();
                let gt = truth_value(&pref, Relation::Prec, q, p, &w).unwrap();
                let le = truth_value(&pref, Relation::Precsim, p, q, &w).unwrap();
                let ge = truth_value(&pref, Relation::Precsim, q, p, &w).unwrap();
                let sim = truth_value(&pref, Relation::Sim, p, q, &w).unwrap();
                prop_assert!(space.meet(&lt, &gt).unwrap().is_empty());
                prop_assert!(space.is_subset(&lt, &le).unwrap());
                prop_assert_eq!(le, space.not_within(&gt, &w).unwrap());
                prop_assert_eq!(sim, space.meet(&space.not_within(&gt, &w).unwrap(), &ge).unwrap());
            }
        }
    }

    #[test]
    fn truth_values_restrict_naturally(seed in any::<u64>()) {
        let (space, pref, family, mut r) = utility_world(seed);
        let w = nonempty_open(&mut r, &space);
        let v = space.meet(&w, &random_open(&mut r, &space)).unwrap();
        for rel in RELATIONS {
            for (_, p) in &family {
                for (_, q) in &family {
                    let whole = truth_value(&pref, rel, p, q, &w).unwrap();
                    let part = truth_value(&pref, rel, p, q, &v).unwrap();
                    prop_assert_eq!(part, space.meet(&whole, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn random_formulas_obey_the_forcing_laws(seed in any::<u64>()) {
        let (space, pref, family, mut r) = utility_world(seed);
        let env = env_for(&space, &pref, &family);
        let names: Vec<String> = family.iter().map(|(n, _)| n.clone()).collect();
        let f = random_formula(&mut r, &names, 3);
        let w = nonempty_open(&mut r, &space);
        let cover = split_cover(&space, &w).unwrap();
        let laws = check_forcing_laws(&f, &w, &cover, &env).unwrap();
        prop_assert!(laws.holds(), "{} on {}: {:?}", f, space.show(&w), laws);
        let v = space.meet(&w, &random_open(&mut r, &space)).unwrap();
        let whole = eval_formula(&f, &w, &env).unwrap();
        prop_assert_eq!(eval_formula(&f, &v, &env).unwrap(), space.meet(&whole, &v).unwrap(), "{}", f);
    }
}

#[test]
fn formulas_restrict_naturally_on_every_open_of_the_branching_space() {
    let space = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")]).unwrap();
    let x = space.carrier();
    let family = vec![
        ("d1".to_string(), Lottery::delta(&space, &x, 0).unwrap()),
        ("d2".to_string(), Lottery::delta(&space, &x, 1).unwrap()),
    ];
    let entries = vec![
        LocalRanking::Order(vec![]),
        LocalRanking::Scores(vec![int(1), int(0)]),
        LocalRanking::Scores(vec![int(0), int(1)]),
    ];
    let pref = Tabulated::new(&space, family.clone(), entries).unwrap();
    let env = env_for(&space, &pref, &family);
    let names: Vec<String> = family.iter().map(|(n, _)| n.clone()).collect();
    let opens = space.opens().unwrap();
    let mut r = rng(7);
    for _ in 0..300 {
        let f = random_formula(&mut r, &names, 3);
        for w in &opens {
            let whole = eval_formula(&f, w, &env).unwrap();
            for v in opens.iter().filter(|v| space.is_subset(v, w).unwrap()) {
                assert_eq!(eval_formula(&f, v, &env).unwrap(), space.meet(&whole, v).unwrap(), "{f}");
            }
        }
    }
}
