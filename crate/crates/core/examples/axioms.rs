//! Falsifying the ordering axioms: a preference that only ranks on proper
//! opens breaks local character, and utility weights that cross leave a
//! point with no comparable pair.

use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::{
    check_constant_rankings, check_minimal_comparability, check_weak_order, Comparability, Preference,
    ProperOpensOnly, UtilityInduced, Verdict,
};
use sheaf_eu::rational::int;
use sheaf_eu::sections::Section;
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::interval(int(0), int(1))?;
    let x = space.carrier();
    let first = UtilityInduced::new(
        &space,
        vec![Section::constant(&space, &x, int(1))?, Section::constant(&space, &x, int(0))?],
    )?;
    let pref = ProperOpensOnly::new(Preference::Utility(first));
    let family = vec![
        ("p".to_string(), Lottery::delta(&space, &x, 1)?),
        ("q".to_string(), Lottery::delta(&space, &x, 0)?),
    ];
    let report = check_weak_order(&pref, &family, &x)?;
    for c in &report.checks {
        match &c.verdict {
            Verdict::PassOnTested { tested, .. } => println!("{}: pass-on-tested ({tested})", c.condition),
            Verdict::Counterexample(v) => println!("{}: {}", c.condition, v.describe(&space, &family)),
        }
    }

    let space = Space::interval(int(0), int(2))?;
    let x = space.carrier();
    let id = Section::from_knots(&x, vec![(int(0), int(0)), (int(2), int(2))])?;
    let crossing = UtilityInduced::new(&space, vec![id, Section::constant(&space, &x, int(1))?])?;
    let family = vec![
        ("d1".to_string(), Lottery::delta(&space, &x, 0)?),
        ("d2".to_string(), Lottery::delta(&space, &x, 1)?),
    ];
    if let Comparability::Fail { point } = check_minimal_comparability(&crossing, &family)? {
        println!("no comparable pair near {}", space.show_point(&point));
    }
    for c in check_constant_rankings(&crossing, &family)? {
        println!(
            "{} vs {}: ≺ on {}, ≻ on {}, ∼ on {}",
            family[c.p].0,
            family[c.q].0,
            space.show(&c.prec),
            space.show(&c.succ),
            space.show(&c.sim)
        );
    }
    Ok(())
}
