//! Dedekind-cut calibration: find the mixing weight that makes a middle
//! lottery indifferent to a mix of a better and a worse one, with certified
//! bounds.

use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::UtilityInduced;
use sheaf_eu::rational::{dyadic, fmt_rat, int, ratio};
use sheaf_eu::representation::solve_calibration;
use sheaf_eu::sections::Section;
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::interval(int(0), int(1))?;
    let x = space.carrier();
    // worst prize 0, best prize 1, the middle prize's utility rises from 1/4 to 3/4
    let middle = Section::from_knots(&x, vec![(int(0), ratio(1, 4)), (int(1), ratio(3, 4))])?;
    let pref = UtilityInduced::new(
        &space,
        vec![Section::constant(&space, &x, int(0))?, middle, Section::constant(&space, &x, int(1))?],
    )?;
    let worst = Lottery::delta(&space, &x, 0)?;
    let mid = Lottery::delta(&space, &x, 1)?;
    let best = Lottery::delta(&space, &x, 2)?;

    let c = solve_calibration(&pref, &best, &mid, &worst, &x, &dyadic(20))?;
    println!("a = {}", c.weight.show(&space));
    println!("exact: {}, certified gap {}", c.exact, fmt_rat(&c.state.gap));
    for cell in &c.state.cells {
        println!("cut at {}: [{}, {}]", cell.at, fmt_rat(&cell.lower), fmt_rat(&cell.upper));
    }
    Ok(())
}
