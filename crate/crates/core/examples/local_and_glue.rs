//! Local representations on the top stages of the three-stage space glue
//! over their union, but nothing covers the bottom stage.

use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::{default_resolution, LocalRanking, Tabulated};
use sheaf_eu::rational::int;
use sheaf_eu::representation::{glue_representations, local_representation, Calib, Glue, LocalOutcome};
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")])?;
    let x = space.carrier();
    let family = vec![
        ("d1".to_string(), Lottery::delta(&space, &x, 0)?),
        ("d2".to_string(), Lottery::delta(&space, &x, 1)?),
    ];
    let entries = vec![
        LocalRanking::Order(vec![]),
        LocalRanking::Scores(vec![int(1), int(0)]),
        LocalRanking::Scores(vec![int(0), int(1)]),
    ];
    let pref = Tabulated::new(&space, family.clone(), entries)?;

    let mut locals = Vec::new();
    for (stage, zero, unit) in [("1", 1, 0), ("2", 0, 1)] {
        let w = space.open_named(&[stage])?;
        let calib = Calib::Pair(family[zero].1.clone(), family[unit].1.clone());
        match local_representation(&pref, &w, &calib, &family, 2, &default_resolution())? {
            LocalOutcome::Rep(rep) => {
                println!("on {}: u = ({}, {})", space.show(&w), rep.weights[0].show(&space), rep.weights[1].show(&space));
                locals.push(rep);
            }
            LocalOutcome::Obstructed { reason, .. } => println!("on {}: {reason}", space.show(&w)),
        }
    }

    for target in [space.open_named(&["1", "2"])?, x] {
        match glue_representations(&space, &target, locals.clone())? {
            Glue::Global(g) => println!("glued on {}: u(z1) = {}", space.show(&target), g.weights[0].show(&space)),
            Glue::Obstructed(o) => println!(
                "no global representation on {}: obstruction at {}: {}",
                space.show(&target),
                space.show_point(&o.point),
                o.reason
            ),
        }
    }
    Ok(())
}
