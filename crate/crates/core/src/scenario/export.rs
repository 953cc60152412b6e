//! CSV tables for plotting. Values are written as decimals.

use crate::rational::{to_f64, Rat};
use crate::sections::Section;
use crate::topology::{Point, Space};
use crate::topology::OpenSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvFile {
    /// Path relative to the output directory.
    pub name: String,
    pub body: String,
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn dec(r: &Rat) -> String {
    to_f64(r).to_string()
}

/// `x,value` at every breakpoint and on a uniform grid over the space, or
/// `component,value` on a finite space.
pub fn section_csv(space: &Space, s: &Section, grid: usize) -> String {
    match space {
        Space::Poset(_) => {
            let rows = space
                .components(s.domain())
                .unwrap_or_default()
                .into_iter()
                .map(|c| {
                    let x = space.point_list(&c)[0].clone();
                    vec![space.show(&c), dec(&s.eval(&x).expect("component inside domain"))]
                })
                .collect();
            table(&["component", "value"], rows)
        }
        Space::Interval { lo, hi } => {
            let mut xs = s.breakpoints();
            let n = grid.max(1);
            for k in 0..=n {
                xs.push(lo + (hi - lo) * Rat::new(k.into(), n.into()));
            }
            xs.sort();
            xs.dedup();
            let rows = xs
                .into_iter()
                .filter_map(|x| s.eval(&Point::Real(x.clone())).map(|v| vec![dec(&x), dec(&v)]))
                .collect();
            table(&["x", "value"], rows)
        }
    }
}

/// `interval_start,interval_end` per span, or one `point` per row.
pub fn open_csv(space: &Space, u: &OpenSet) -> String {
    match u.spans() {
        Some(spans) => {
            let rows = spans.spans().iter().map(|s| vec![dec(&s.lo), dec(&s.hi)]).collect();
            table(&["interval_start", "interval_end"], rows)
        }
        None => {
            let rows = space.point_list(u).iter().map(|x| vec![space.show_point(x)]).collect();
            table(&["point"], rows)
        }
    }
}

/// One weight section as linear pieces: `breakpoint,slope,intercept` with
/// each piece starting at its breakpoint, or `component,slope,intercept`.
pub fn weight_csv(space: &Space, s: &Section) -> String {
    match s.parts() {
        Some(parts) => {
            let rows = parts
                .iter()
                .flat_map(|p| p.pieces())
                .map(|(start, _, slope, intercept)| vec![dec(&start), dec(&slope), dec(&intercept)])
                .collect();
            table(&["breakpoint", "slope", "intercept"], rows)
        }
        None => {
            let rows = space
                .components(s.domain())
                .unwrap_or_default()
                .into_iter()
                .map(|c| {
                    let x = space.point_list(&c)[0].clone();
                    vec![space.show(&c), "0".into(), dec(&s.eval(&x).expect("component inside domain"))]
                })
                .collect();
            table(&["component", "slope", "intercept"], rows)
        }
    }
}

/// A file-system friendly form of a name.
pub fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}
