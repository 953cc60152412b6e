//! Truth values of preference assertions on the three-stage space where the
//! top stages rank two prizes oppositely, and a Heyting law that fails.

use sheaf_eu::forcing::{eval_formula, parse_formula, Env, Value};
use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::{truth_value, LocalRanking, Relation, Tabulated};
use sheaf_eu::rational::int;
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")])?;
    let x = space.carrier();
    let d1 = Lottery::delta(&space, &x, 0)?;
    let d2 = Lottery::delta(&space, &x, 1)?;
    let family = vec![("d1".to_string(), d1.clone()), ("d2".to_string(), d2.clone())];
    let entries = vec![
        LocalRanking::Order(vec![]),
        LocalRanking::Scores(vec![int(1), int(0)]),
        LocalRanking::Scores(vec![int(0), int(1)]),
    ];
    let pref = Tabulated::new(&space, family, entries)?;

    for (rel, p, q, pn, qn) in [
        (Relation::Prec, &d2, &d1, "d2", "d1"),
        (Relation::Prec, &d1, &d2, "d1", "d2"),
        (Relation::Sim, &d1, &d2, "d1", "d2"),
        (Relation::Precsim, &d1, &d2, "d1", "d2"),
    ] {
        let t = truth_value(&pref, rel, p, q, &x)?;
        println!("⟦{pn} {} {qn}⟧ = {}", rel.symbol(), space.show(&t));
    }

    let mut env = Env::new(&space).with_pref(&pref);
    env.insert("d1", Value::Lottery(d1));
    env.insert("d2", Value::Lottery(d2));
    for src in [
        "(or (prec d1 d2) (prec d2 d1))",
        "(or (prec d1 d2) (not (prec d1 d2)))",
        "(not (not (or (prec d1 d2) (not (prec d1 d2)))))",
    ] {
        let t = eval_formula(&parse_formula(src)?, &x, &env)?;
        println!("⟦{src}⟧ = {}", space.show(&t));
    }
    Ok(())
}
