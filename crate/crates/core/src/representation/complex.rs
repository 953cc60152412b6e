//! Charts on the faces of a simplicial complex, related along every face
//! attachment by positive linear maps that compose.
//!
//! A face chart gives a utility to each of the face's vertices. Vertices
//! carry the one-point chart `{v: 0}`; a face without a chart of its own
//! adopts the chart of its first boundary face and extends it across the
//! remaining boundary faces.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::rational::{fmt_rat, Rat};
use crate::Error;

/// Vertex name to utility.
pub type Chart = BTreeMap<String, Rat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    vertices: Vec<String>,
    /// Every non-empty face as sorted vertex indices, by dimension then name.
    faces: Vec<Vec<usize>>,
}

impl Complex {
    /// The closure of the given maximal simplices.
    pub fn new<S: AsRef<str>>(vertices: &[S], maximal: &[Vec<S>]) -> Result<Complex, Error> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let unique: BTreeSet<&String> = vertices.iter().collect();
        if unique.len() != vertices.len() || vertices.is_empty() {
            return Err(Error::Invalid("complex vertices must be distinct and non-empty".into()));
        }
        let index = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Unresolved(format!("vertex `{name}`")))
        };
        let mut faces: BTreeSet<Vec<usize>> = (0..vertices.len()).map(|v| vec![v]).collect();
        for simplex in maximal {
            let mut idx = simplex.iter().map(|v| index(v.as_ref())).collect::<Result<Vec<_>, _>>()?;
            idx.sort_unstable();
            idx.dedup();
            if idx.len() != simplex.len() || idx.is_empty() {
                return Err(Error::Invalid("a simplex repeats a vertex or is empty".into()));
            }
            if idx.len() > 16 {
                return Err(Error::Unsupported("simplices above dimension 15".into()));
            }
            for mask in 1u32..(1 << idx.len()) {
                faces.insert(idx.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, v)| *v).collect());
            }
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Complex { vertices, faces })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn face_names(&self) -> Vec<String> {
        self.faces.iter().map(|f| self.name(f)).collect()
    }

    fn name(&self, face: &[usize]) -> String {
        let sep = if self.vertices.iter().all(|v| v.chars().count() == 1) { "" } else { "," };
        face.iter().map(|&v| self.vertices[v].as_str()).collect::<Vec<_>>().join(sep)
    }

    fn boundary(&self, face: &[usize]) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (0..face.len())
            .map(|skip| face.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, v)| *v).collect())
            .collect();
        out.sort();
        out
    }
}

/// `x ↦ a·x + b` with `a > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarPlt {
    pub a: Rat,
    pub b: Rat,
}

impl ScalarPlt {
    pub fn identity() -> ScalarPlt {
        ScalarPlt { a: Rat::one(), b: Rat::zero() }
    }

    pub fn apply(&self, x: &Rat) -> Rat {
        &self.a * x + &self.b
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &ScalarPlt) -> ScalarPlt {
        ScalarPlt { a: &self.a * &inner.a, b: &self.a * &inner.b + &self.b }
    }

    pub fn show(&self) -> String {
        format!("x ↦ {}·x + {}", fmt_rat(&self.a), fmt_rat(&self.b))
    }
}

/// A map along `from ⇝ to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub from: String,
    pub to: String,
    pub map: ScalarPlt,
}

/// One length-2 path `rho ⇝ sigma ⇝ tau` and its two maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCheck {
    pub rho: String,
    pub sigma: String,
    pub tau: String,
    pub composed: ScalarPlt,
    pub direct: ScalarPlt,
    /// Whether the two maps send `rho`'s chart to the same values.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Harmonization {
    pub charts: BTreeMap<String, Chart>,
    /// Faces without a chart of their own, and the boundary face whose zero
    /// and unit they adopted.
    pub adopted: BTreeMap<String, String>,
    pub attachments: Vec<Attachment>,
    pub paths: Vec<PathCheck>,
}

impl Harmonization {
    pub fn functorial(&self) -> bool {
        self.paths.iter().all(|p| p.agrees)
    }

    pub fn map(&self, from: &str, to: &str) -> Option<&ScalarPlt> {
        self.attachments.iter().find(|a| a.from == from && a.to == to).map(|a| &a.map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Harmonized {
    Done(Harmonization),
    Obstructed { cycle: Vec<String>, reason: String },
}

enum Fit {
    Map(ScalarPlt),
    Clash(String),
}

/// The positive linear map sending `from` onto `onto` on their shared
/// vertices, fitted on the first two and checked on the rest.
fn fit(from: &Chart, onto: &Chart) -> Fit {
    let shared: Vec<&String> = from.keys().filter(|v| onto.contains_key(*v)).collect();
    let map = match shared.as_slice() {
        [] => ScalarPlt::identity(),
        [v] => ScalarPlt { a: Rat::one(), b: &onto[*v] - &from[*v] },
        [v, w, ..] => {
            let (du, dt) = (&from[*w] - &from[*v], &onto[*w] - &onto[*v]);
            if du.is_zero() {
                if !dt.is_zero() {
                    return Fit::Clash(format!("{v} and {w} tie in one chart but not in the other"));
                }
                ScalarPlt { a: Rat::one(), b: &onto[*v] - &from[*v] }
            } else {
                let a = dt / du;
                if a <= Rat::zero() {
                    return Fit::Clash(format!("{v} and {w} are ordered oppositely"));
                }
                let b = &onto[*v] - &a * &from[*v];
                ScalarPlt { a, b }
            }
        }
    };
    for v in shared {
        if map.apply(&from[v]) != onto[v] {
            return Fit::Clash(format!("{v} is sent to {} instead of {}", fmt_rat(&map.apply(&from[v])), fmt_rat(&onto[v])));
        }
    }
    Fit::Map(map)
}

/// Assigns a chart to every face, a map to every attachment, and checks that
/// maps compose along every length-2 path.
pub fn harmonize_complex(complex: &Complex, face_charts: &BTreeMap<String, Chart>) -> Result<Harmonized, Error> {
    let names = complex.face_names();
    for (face, chart) in face_charts {
        let Some(k) = names.iter().position(|n| n == face) else {
            return Err(Error::Unresolved(format!("face `{face}`")));
        };
        let verts: BTreeSet<&String> = complex.faces[k].iter().map(|&v| &complex.vertices[v]).collect();
        if chart.keys().collect::<BTreeSet<_>>() != verts {
            return Err(Error::Invalid(format!("the chart of `{face}` must name exactly its vertices")));
        }
    }

    let mut charts: BTreeMap<String, Chart> = BTreeMap::new();
    let mut adopted = BTreeMap::new();
    for face in &complex.faces {
        let name = complex.name(face);
        if let Some(c) = face_charts.get(&name) {
            charts.insert(name, c.clone());
            continue;
        }
        if face.len() == 1 {
            charts.insert(name, [(complex.vertices[face[0]].clone(), Rat::zero())].into_iter().collect());
            continue;
        }
        let boundary = complex.boundary(face);
        let first = complex.name(&boundary[0]);
        let mut chart = charts[&first].clone();
        let mut cycle = vec![first.clone()];
        for sigma in &boundary[1..] {
            let sname = complex.name(sigma);
            cycle.push(sname.clone());
            let map = match fit(&charts[&sname], &chart) {
                Fit::Map(m) => m,
                Fit::Clash(reason) => return Ok(Harmonized::Obstructed { cycle, reason }),
            };
            for (v, u) in &charts[&sname] {
                chart.entry(v.clone()).or_insert_with(|| map.apply(u));
            }
        }
        adopted.insert(name.clone(), first);
        charts.insert(name, chart);
    }

    let mut attachments = Vec::new();
    for tau in &complex.faces {
        for sigma in complex.faces.iter().filter(|s| s.iter().all(|v| tau.contains(v))) {
            let (sn, tn) = (complex.name(sigma), complex.name(tau));
            match fit(&charts[&sn], &charts[&tn]) {
                Fit::Map(map) => attachments.push(Attachment { from: sn, to: tn, map }),
                Fit::Clash(reason) => return Ok(Harmonized::Obstructed { cycle: vec![sn, tn], reason }),
            }
        }
    }

    let lookup = |f: &str, t: &str| attachments.iter().find(|a| a.from == f && a.to == t).map(|a| a.map.clone());
    let mut paths = Vec::new();
    for a in &attachments {
        for b in attachments.iter().filter(|b| b.from == a.to) {
            if a.from == a.to || b.from == b.to {
                continue;
            }
            let direct = lookup(&a.from, &b.to).expect("faces of faces are faces");
            let composed = b.map.after(&a.map);
            let agrees = charts[&a.from].values().all(|u| composed.apply(u) == direct.apply(u));
            paths.push(PathCheck { rho: a.from.clone(), sigma: a.to.clone(), tau: b.to.clone(), composed, direct, agrees });
        }
    }
    Ok(Harmonized::Done(Harmonization { charts, adopted, attachments, paths }))
}
