//! On a discrete space every open is closed, so a global representation
//! exists: split off the indifferent stage and calibrate on the rest.

use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::{default_resolution, LocalRanking, Tabulated};
use sheaf_eu::rational::int;
use sheaf_eu::representation::classical_representation;
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::poset(&["a", "b"], &[])?;
    let x = space.carrier();
    let family = vec![
        ("d1".to_string(), Lottery::delta(&space, &x, 0)?),
        ("d2".to_string(), Lottery::delta(&space, &x, 1)?),
    ];
    let entries = vec![LocalRanking::Scores(vec![int(0), int(1)]), LocalRanking::Order(vec![])];
    let pref = Tabulated::new(&space, family.clone(), entries)?;
    let rep = classical_representation(&pref, &family, 2, &default_resolution())?;
    println!("indifferent on {}", space.show(&rep.indifferent));
    for p in &rep.pieces {
        println!("{}: {} ≺ {}, indicator {}", space.show(&p.open), family[p.worse].0, family[p.better].0, p.indicator.show(&space));
    }
    for (z, w) in rep.global.weights.iter().enumerate() {
        println!("u(z{}) = {}", z + 1, w.show(&space));
    }
    println!("sound: {}, necessity checks pass: {}", rep.soundness.holds(), rep.necessity.iter().all(|r| r.passed()));

    let sierpinski = Space::poset(&["0", "1"], &[("0", "1")])?;
    let y = sierpinski.carrier();
    let fam = vec![("d1".to_string(), Lottery::delta(&sierpinski, &y, 0)?)];
    let pref = Tabulated::new(&sierpinski, fam.clone(), vec![LocalRanking::Order(vec![]); 2])?;
    if let Err(e) = classical_representation(&pref, &fam, 1, &default_resolution()) {
        println!("{e}");
    }
    Ok(())
}
