//! Harmonizing edge charts of a triangle into one chart on the 2-face, and
//! checking that the attachment maps compose.

use std::collections::BTreeMap;

use sheaf_eu::rational::int;
use sheaf_eu::representation::{harmonize_complex, Chart, Complex, Harmonized};

fn chart(values: &[(&str, i64)]) -> Chart {
    values.iter().map(|(v, u)| (v.to_string(), int(*u))).collect()
}

fn main() -> Result<(), sheaf_eu::Error> {
    let triangle = Complex::new(&["a", "b", "c"], &[vec!["a", "b", "c"]])?;
    let charts: BTreeMap<String, Chart> = [
        ("ab".to_string(), chart(&[("a", 0), ("b", 1)])),
        ("ac".to_string(), chart(&[("a", 0), ("c", 2)])),
        ("bc".to_string(), chart(&[("b", 0), ("c", 1)])),
    ]
    .into_iter()
    .collect();
    match harmonize_complex(&triangle, &charts)? {
        Harmonized::Done(h) => {
            for (face, c) in &h.charts {
                let vals: Vec<String> = c.iter().map(|(v, u)| format!("{v}:{u}")).collect();
                println!("{face}: {}", vals.join(" "));
            }
            for p in &h.paths {
                println!("{} ⇝ {} ⇝ {}: {} vs {}", p.rho, p.sigma, p.tau, p.composed.show(), p.direct.show());
            }
            println!("functorial: {}", h.functorial());
        }
        Harmonized::Obstructed { cycle, reason } => println!("obstructed around {cycle:?}: {reason}"),
    }
    Ok(())
}
