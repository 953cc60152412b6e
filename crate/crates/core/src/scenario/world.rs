//! Resolving a parsed scenario into spaces, sections, lotteries and a
//! preference.

use std::collections::BTreeMap;

use crate::lottery::{glue_lotteries, Lottery, PrizeSet};
use crate::preference::{default_resolution, LocalRanking, Preference, ProperOpensOnly, Tabulated, UtilityInduced};
use crate::rational::Rat;
use crate::representation::{Chart, Complex};
use crate::sections::{CompatibleFamily, Section};
use crate::topology::{OpenSet, Point, PointSet, Region, Space, Span};
use crate::Error;

use super::parse::{Coef, LotteryDef, OpenSpec, PrefDef, RankEntry, Scenario, SectionDef, SpaceDef, StmtKind, TaskDef};

pub struct World {
    pub title: String,
    pub space: Space,
    pub prizes: PrizeSet,
    pub epsilon: Rat,
    pub grid: usize,
    /// Declared sections in declaration order.
    pub sections: Vec<(String, Section)>,
    pub lotteries: BTreeMap<String, Lottery>,
    pub families: BTreeMap<String, Vec<String>>,
    pub weights: BTreeMap<String, Vec<Section>>,
    pub pref: Option<Preference>,
    pub complex: Option<Complex>,
    pub charts: BTreeMap<String, Chart>,
    pub tasks: Vec<TaskDef>,
}

fn unresolved(line: usize, what: &str, name: &str) -> Error {
    Error::Unresolved(format!("line {line}: {what} `{name}`"))
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("line {line}: {m}")),
        Error::Unresolved(m) if m.starts_with("line ") => Error::Unresolved(m),
        Error::Unresolved(m) => Error::Unresolved(format!("line {line}: {m}")),
        Error::Invalid(m) => Error::Invalid(format!("line {line}: {m}")),
        Error::Mismatch(m) => Error::Mismatch(format!("line {line}: {m}")),
        other => other,
    }
}

pub fn resolve_open(space: &Space, spec: &OpenSpec) -> Result<OpenSet, Error> {
    match (spec, space) {
        (OpenSpec::Carrier, _) => Ok(space.carrier()),
        (OpenSpec::Empty, _) => Ok(space.empty()),
        (OpenSpec::Points(names), Space::Poset(_)) => space.open_named(names),
        (OpenSpec::Spans(spans), Space::Interval { .. }) => {
            let spans = spans
                .iter()
                .map(|s| {
                    Span::new(s.lo.clone(), s.lo_closed, s.hi.clone(), s.hi_closed)
                        .ok_or_else(|| Error::Invalid("a span has its ends out of order".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            space.open_spans(spans)
        }
        (OpenSpec::Points(_), _) => Err(Error::Mismatch("point sets name opens of a finite space".into())),
        (OpenSpec::Spans(_), _) => Err(Error::Mismatch("spans name opens of an interval space".into())),
    }
}

impl World {
    pub fn open(&self, spec: &OpenSpec) -> Result<OpenSet, Error> {
        resolve_open(&self.space, spec)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn prize(&self, name: &str) -> Result<usize, Error> {
        self.prizes.index_of(name)
    }

    /// Family members as `(name, lottery)` pairs.
    pub fn family(&self, name: &str) -> Result<Vec<(String, Lottery)>, Error> {
        let members = self.families.get(name).ok_or_else(|| Error::Unresolved(format!("family `{name}`")))?;
        Ok(members.iter().map(|m| (m.clone(), self.lotteries[m].clone())).collect())
    }

    pub fn lottery(&self, name: &str) -> Result<&Lottery, Error> {
        self.lotteries.get(name).ok_or_else(|| Error::Unresolved(format!("lottery `{name}`")))
    }

    fn coef(&self, line: usize, domain: &OpenSet, c: &Coef) -> Result<Section, Error> {
        match c {
            Coef::Value(v) => Section::constant(&self.space, domain, v.clone()),
            Coef::Section(n) => {
                let s = self.section(n).ok_or_else(|| unresolved(line, "section", n))?;
                if !self.space.is_subset(domain, s.domain())? {
                    return Err(Error::Invalid(format!("section `{n}` does not cover {}", self.space.show(domain))));
                }
                s.restrict(domain)
            }
        }
    }
}

fn section(space: &Space, on: &OpenSet, def: &SectionDef) -> Result<Section, Error> {
    match def {
        SectionDef::Const(v) => Section::constant(space, on, v.clone()),
        SectionDef::Knots(ks) => Section::from_knots(on, ks.clone()),
        SectionDef::Nodes(vs) => {
            let poset = space.as_poset().ok_or_else(|| Error::Mismatch("node values need a finite space".into()))?;
            let mut values = BTreeMap::new();
            for (p, v) in vs {
                let i = poset.index_of(p).ok_or_else(|| Error::Unresolved(format!("point `{p}`")))?;
                values.insert(i, v.clone());
            }
            Section::from_nodes(space, on, values)
        }
    }
}

/// Builds every declared object in order.
pub fn build(scenario: &Scenario) -> Result<World, Error> {
    let mut title = String::new();
    let mut space = None;
    let mut prizes = None;
    let mut epsilon = default_resolution();
    let mut grid = 8;
    let mut sections: Vec<(String, Section)> = Vec::new();
    let mut lotteries = BTreeMap::new();
    let mut families = BTreeMap::new();
    let mut weights = BTreeMap::new();
    let mut pref_def: Option<(usize, PrefDef)> = None;
    let mut ranks: Vec<(usize, String, RankEntry)> = Vec::new();
    let mut proper_only = false;
    let mut vertices: Option<(usize, Vec<String>)> = None;
    let mut simplices: Vec<Vec<String>> = Vec::new();
    let mut charts = BTreeMap::new();
    let mut tasks = Vec::new();

    for stmt in &scenario.statements {
        let line = stmt.line;
        let need_space = || space.clone().ok_or_else(|| Error::Parse(format!("line {line}: declare the space first")));
        let need_prizes =
            || prizes.clone().ok_or_else(|| Error::Parse(format!("line {line}: declare the prizes first")));
        match &stmt.kind {
            StmtKind::Title(t) => title = t.clone(),
            StmtKind::Space(def) => {
                if space.is_some() {
                    return Err(Error::Parse(format!("line {line}: the space is declared twice")));
                }
                let s = match def {
                    SpaceDef::Interval(lo, hi) => Space::interval(lo.clone(), hi.clone()),
                    SpaceDef::Poset { points, order } => Space::poset(points, order),
                };
                space = Some(s.map_err(|e| at(line, e))?);
            }
            StmtKind::Prizes(names) => prizes = Some(PrizeSet::new(names).map_err(|e| at(line, e))?),
            StmtKind::Epsilon(e) => {
                if *e <= Rat::from_integer(0.into()) {
                    return Err(Error::Parse(format!("line {line}: the resolution must be positive")));
                }
                epsilon = e.clone();
            }
            StmtKind::Grid(n) => grid = *n,
            StmtKind::Section { name, on, def } => {
                let sp = need_space()?;
                let on = resolve_open(&sp, on).map_err(|e| at(line, e))?;
                let s = section(&sp, &on, def).map_err(|e| at(line, e))?;
                sections.retain(|(n, _)| n != name);
                sections.push((name.clone(), s));
            }
            StmtKind::Lottery { name, def } => {
                let sp = need_space()?;
                let ps = need_prizes()?;
                let partial = World {
                    title: String::new(),
                    space: sp.clone(),
                    prizes: ps.clone(),
                    epsilon: epsilon.clone(),
                    grid,
                    sections: sections.clone(),
                    lotteries: BTreeMap::new(),
                    families: BTreeMap::new(),
                    weights: BTreeMap::new(),
                    pref: None,
                    complex: None,
                    charts: BTreeMap::new(),
                    tasks: Vec::new(),
                };
                let l = match def {
                    LotteryDef::Delta { prize, on } => {
                        let on = resolve_open(&sp, on).map_err(|e| at(line, e))?;
                        let z = ps.index_of(prize).map_err(|_| unresolved(line, "prize", prize))?;
                        Lottery::delta(&sp, &on, z)
                    }
                    LotteryDef::Coords { on, coords } => {
                        let on = resolve_open(&sp, on).map_err(|e| at(line, e))?;
                        let mut map = BTreeMap::new();
                        for (prize, c) in coords {
                            let z = ps.index_of(prize).map_err(|_| unresolved(line, "prize", prize))?;
                            map.insert(z, partial.coef(line, &on, c).map_err(|e| at(line, e))?);
                        }
                        Lottery::new(&sp, &on, map)
                    }
                    LotteryDef::Glue(parts) => {
                        let mut cover = Vec::new();
                        let mut members = Vec::new();
                        for (n, o) in parts {
                            let l: &Lottery = lotteries.get(n).ok_or_else(|| unresolved(line, "lottery", n))?;
                            let o = resolve_open(&sp, o).map_err(|e| at(line, e))?;
                            members.push(l.restrict(&o).map_err(|e| at(line, e))?);
                            cover.push(o);
                        }
                        let fam = CompatibleFamily::new(cover, members).map_err(|e| at(line, e))?;
                        glue_lotteries(&sp, &fam)?.ok().ok_or_else(|| {
                            Error::Invalid(format!("line {line}: the pieces of `{name}` disagree on an overlap"))
                        })
                    }
                }
                .map_err(|e| at(line, e))?;
                lotteries.insert(name.clone(), l);
            }
            StmtKind::Preference(def) => {
                if pref_def.is_some() {
                    return Err(Error::Parse(format!("line {line}: the preference is declared twice")));
                }
                pref_def = Some((line, def.clone()));
            }
            StmtKind::Rank { point, entry } => ranks.push((line, point.clone(), entry.clone())),
            StmtKind::ProperOpensOnly => proper_only = true,
            StmtKind::Family { name, members } => {
                for m in members {
                    if !lotteries.contains_key(m) {
                        return Err(unresolved(line, "lottery", m));
                    }
                }
                families.insert(name.clone(), members.clone());
            }
            StmtKind::Weights { name, entries } => {
                let ps = need_prizes()?;
                let mut ws: Vec<Option<Section>> = vec![None; ps.len()];
                for (p, s) in entries {
                    let z = ps.index_of(p).map_err(|_| unresolved(line, "prize", p))?;
                    let sec = sections.iter().find(|(n, _)| n == s).ok_or_else(|| unresolved(line, "section", s))?;
                    ws[z] = Some(sec.1.clone());
                }
                let ws = ws
                    .into_iter()
                    .enumerate()
                    .map(|(z, w)| w.ok_or_else(|| Error::Parse(format!("line {line}: no weight for `{}`", ps.name(z)))))
                    .collect::<Result<_, _>>()?;
                weights.insert(name.clone(), ws);
            }
            StmtKind::Complex(vs) => vertices = Some((line, vs.clone())),
            StmtKind::Simplex(vs) => simplices.push(vs.clone()),
            StmtKind::Chart { face, values } => {
                charts.insert(face.clone(), values.iter().cloned().collect::<Chart>());
            }
            StmtKind::Task(t) => tasks.push(t.clone()),
        }
    }

    let space = match space {
        Some(s) => s,
        None if vertices.is_some() => Space::poset(&["cell"], &[])?,
        None => return Err(Error::Parse("no space is declared".into())),
    };
    let prizes = match prizes {
        Some(p) => p,
        None => PrizeSet::new(&["none"])?,
    };
    let pref = match pref_def {
        None => None,
        Some((line, PrefDef::Utility(assign))) => {
            let x = space.carrier();
            let mut ws: Vec<Option<Section>> = vec![None; prizes.len()];
            let partial_sections = sections.clone();
            for (p, c) in &assign {
                let z = prizes.index_of(p).map_err(|_| unresolved(line, "prize", p))?;
                let s = match c {
                    Coef::Value(v) => Section::constant(&space, &x, v.clone())?,
                    Coef::Section(n) => partial_sections
                        .iter()
                        .find(|(m, _)| m == n)
                        .map(|(_, s)| s.clone())
                        .ok_or_else(|| unresolved(line, "section", n))?,
                };
                ws[z] = Some(s);
            }
            let ws = ws
                .into_iter()
                .enumerate()
                .map(|(z, w)| w.ok_or_else(|| Error::Parse(format!("line {line}: no utility for `{}`", prizes.name(z)))))
                .collect::<Result<_, _>>()?;
            Some(Preference::Utility(UtilityInduced::new(&space, ws).map_err(|e| at(line, e))?))
        }
        Some((line, PrefDef::Table { family })) => {
            let poset = space
                .as_poset()
                .ok_or_else(|| Error::Mismatch(format!("line {line}: a ranking table needs a finite space")))?;
            let members = families.get(&family).ok_or_else(|| unresolved(line, "family", &family))?;
            let fam: Vec<(String, Lottery)> = members.iter().map(|m| (m.clone(), lotteries[m].clone())).collect();
            let mut entries = vec![LocalRanking::Order(Vec::new()); poset.len()];
            for (rline, point, entry) in &ranks {
                let x = poset.index_of(point).ok_or_else(|| unresolved(*rline, "point", point))?;
                entries[x] = match entry {
                    RankEntry::Empty => LocalRanking::Order(Vec::new()),
                    RankEntry::Scores(s) => LocalRanking::Scores(s.clone()),
                    RankEntry::Order(pairs) => {
                        let idx = |n: &String| {
                            members.iter().position(|m| m == n).ok_or_else(|| unresolved(*rline, "family member", n))
                        };
                        LocalRanking::Order(pairs.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<_, Error>>()?)
                    }
                };
            }
            Some(Preference::Table(Tabulated::new(&space, fam, entries).map_err(|e| at(line, e))?))
        }
    };
    let pref = match (pref, proper_only) {
        (Some(p), true) => Some(Preference::ProperOpensOnly(ProperOpensOnly::new(p))),
        (p, false) => p,
        (None, true) => return Err(Error::Parse("`proper-opens-only` needs a preference".into())),
    };
    let complex = match vertices {
        Some((line, vs)) => Some(Complex::new(&vs, &simplices).map_err(|e| at(line, e))?),
        None => None,
    };
    Ok(World { title, space, prizes, epsilon, grid, sections, lotteries, families, weights, pref, complex, charts, tasks })
}

/// A one-line description of the space.
pub fn describe_space(space: &Space) -> String {
    match space {
        Space::Interval { lo, hi } => {
            format!("interval {}", Span::closed(lo.clone(), hi.clone()))
        }
        Space::Poset(p) => {
            let mut covers = Vec::new();
            for x in 0..p.len() {
                for y in 0..p.len() {
                    if x != y && p.leq(x, y) {
                        covers.push(format!("{}<{}", p.name(x), p.name(y)));
                    }
                }
            }
            let all: PointSet = p.all();
            let pts = space.show_region(&Region::Points(all));
            if covers.is_empty() {
                format!("poset {pts}, discrete")
            } else {
                format!("poset {pts} with {}", covers.join(", "))
            }
        }
    }
}

/// Points of a finite space by name, for report lines.
pub fn point_name(space: &Space, x: &Point) -> String {
    space.show_point(x)
}
