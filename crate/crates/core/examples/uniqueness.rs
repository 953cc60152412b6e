//! Two utility assignments inducing the same ranking on [0,2] are related by
//! a positive linear transform on each side of 1, but the two sides disagree
//! at 1 itself.

use sheaf_eu::rational::{fmt_rat, int};
use sheaf_eu::representation::{uniqueness_transform, Transform};
use sheaf_eu::sections::Section;
use sheaf_eu::topology::Space;

fn main() -> Result<(), sheaf_eu::Error> {
    let space = Space::interval(int(0), int(2))?;
    let x = space.carrier();
    let w = vec![
        Section::from_knots(&x, vec![(int(0), int(0)), (int(2), int(2))])?,
        Section::constant(&space, &x, int(1))?,
    ];
    let v = vec![
        Section::constant(&space, &x, int(0))?,
        Section::from_knots(&x, vec![(int(0), int(2)), (int(1), int(0)), (int(2), int(-1))])?,
    ];
    match uniqueness_transform(&space, &v, &w, &x)? {
        Transform::Found(plt) => println!("a = {}, b = {}", plt.a.show(&space), plt.b.show(&space)),
        Transform::Obstructed(o) => {
            println!("obstruction at {}", space.show_point(&o.point));
            println!("partial a = {}", o.partial.a.show(&space));
            for (side, lim) in [("left", &o.limits.left), ("right", &o.limits.right)] {
                if let Some((a, b)) = lim {
                    println!("{side} limit: a = {}, b = {}", fmt_rat(a), fmt_rat(b));
                }
            }
        }
    }
    Ok(())
}
