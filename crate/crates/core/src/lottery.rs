//! Variable lotteries: simplex-valued sections over an open set.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::rational::{fmt_rat, half, Rat};
use crate::sections::{glue, CompatibleFamily, Glued, Section};
use crate::topology::{OpenSet, Point, Space};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrizeSet {
    names: Vec<String>,
}

impl PrizeSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<PrizeSet, Error> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(Error::Invalid("at least one prize is required".into()));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::Invalid("prize names must be distinct".into()));
        }
        Ok(PrizeSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, Error> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Unresolved(format!("prize `{name}`")))
    }
}

/// A lottery: non-negative coordinate sections summing to one.
///
/// Prizes missing from `coords` have probability zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lottery {
    domain: OpenSet,
    coords: BTreeMap<usize, Section>,
}

/// A point of the domain where a section fails a strict test, if any.
fn violation(section: &Section, bad: impl Fn(&Rat) -> bool) -> Option<(Point, Rat)> {
    if let Some(nodes) = section.nodes() {
        return nodes.iter().find(|(_, v)| bad(v)).map(|(x, v)| (Point::Node(*x), v.clone()));
    }
    let spans = section.domain().spans()?;
    for (s, f) in spans.spans().iter().zip(section.parts()?) {
        let knots = f.knots();
        for (i, (x, y)) in knots.iter().enumerate() {
            if !bad(y) {
                continue;
            }
            if s.contains(x) {
                return Some((Point::Real(x.clone()), y.clone()));
            }
            // Excluded endpoint: the failure persists on a nearby interior point.
            let toward = if i + 1 < knots.len() { &knots[i + 1].0 } else { &knots[i - 1].0 };
            let mut t = (x + toward) * half();
            while !bad(&f.eval(&t)) {
                t = (x + &t) * half();
            }
            let v = f.eval(&t);
            return Some((Point::Real(t), v));
        }
    }
    None
}

impl Lottery {
    /// Validates coordinates on `domain`; coordinates defined on larger sets
    /// are restricted first.
    pub fn new(space: &Space, domain: &OpenSet, coords: BTreeMap<usize, Section>) -> Result<Lottery, Error> {
        let mut restricted = BTreeMap::new();
        for (i, c) in coords {
            restricted.insert(i, c.restrict(domain)?);
        }
        if domain.is_empty() {
            return Ok(Lottery { domain: domain.clone(), coords: restricted });
        }
        if restricted.is_empty() {
            return Err(Error::Invalid("a lottery needs at least one coordinate".into()));
        }
        let mut sum = Section::constant(space, domain, Rat::zero())?;
        for c in restricted.values() {
            sum = sum.add(c)?;
        }
        if let Some((x, v)) = violation(&sum, |v| !v.is_one()) {
            return Err(Error::Invalid(format!(
                "coordinates sum to {} at {}, not 1",
                fmt_rat(&v),
                space.show_point(&x)
            )));
        }
        for (i, c) in &restricted {
            if let Some((x, v)) = violation(c, |v| v < &Rat::zero()) {
                return Err(Error::Invalid(format!(
                    "coordinate {i} is negative ({}) at {}",
                    fmt_rat(&v),
                    space.show_point(&x)
                )));
            }
        }
        Ok(Lottery { domain: domain.clone(), coords: restricted })
    }

    /// The degenerate lottery on prize `i`.
    pub fn delta(space: &Space, domain: &OpenSet, i: usize) -> Result<Lottery, Error> {
        let one = Section::constant(space, domain, Rat::one())?;
        Lottery::new(space, domain, [(i, one)].into_iter().collect())
    }

    /// A lottery whose probabilities do not vary.
    pub fn constant(space: &Space, domain: &OpenSet, probs: &[(usize, Rat)]) -> Result<Lottery, Error> {
        let mut coords = BTreeMap::new();
        for (i, p) in probs {
            coords.insert(*i, Section::constant(space, domain, p.clone())?);
        }
        Lottery::new(space, domain, coords)
    }

    pub fn domain(&self) -> &OpenSet {
        &self.domain
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn coords(&self) -> &BTreeMap<usize, Section> {
        &self.coords
    }

    /// Coordinate `i`, zero if outside the support.
    pub fn coord(&self, space: &Space, i: usize) -> Result<Section, Error> {
        match self.coords.get(&i) {
            Some(c) => Ok(c.clone()),
            None => Section::constant(space, &self.domain, Rat::zero()),
        }
    }

    pub fn restrict(&self, v: &OpenSet) -> Result<Lottery, Error> {
        let mut coords = BTreeMap::new();
        for (i, c) in &self.coords {
            coords.insert(*i, c.restrict(v)?);
        }
        Ok(Lottery { domain: v.clone(), coords })
    }

    /// Equality as functions, ignoring how the support was declared.
    pub fn same_as(&self, space: &Space, other: &Lottery) -> Result<bool, Error> {
        if self.domain != other.domain {
            return Ok(false);
        }
        let idx: BTreeSet<usize> = self.support().union(&other.support()).copied().collect();
        for i in idx {
            if self.coord(space, i)? != other.coord(space, i)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when every coordinate is constant on each component.
    pub fn is_constant(&self) -> bool {
        self.coords.values().all(|c| c.constant_value().is_some())
    }

    /// `Σ weights_z · coord_z`, restricted to the lottery's domain.
    pub fn expectation(&self, weights: &[Section]) -> Result<Section, Error> {
        let mut terms = Vec::new();
        for (i, c) in &self.coords {
            let w = weights
                .get(*i)
                .ok_or_else(|| Error::Invalid(format!("no weight for prize index {i}")))?;
            terms.push((w, c));
        }
        let eu = Section::sum_of_products(&terms, None)?;
        eu.restrict(&self.domain)
    }

    pub fn show(&self, space: &Space, prizes: &PrizeSet) -> String {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(i, c)| format!("{}={}", prizes.name(*i), c.show(space)))
            .collect();
        format!("<{}>", parts.join("; "))
    }
}

/// `a·p + (1-a)·q` for a weight section `a` with values in `[0, 1]`.
pub fn mix(space: &Space, a: &Section, p: &Lottery, q: &Lottery) -> Result<Lottery, Error> {
    let dom = a.domain().clone();
    if !a.domain().is_empty() {
        let lo = a.min_value().expect("non-empty");
        let hi = a.max_value().expect("non-empty");
        if lo < Rat::zero() || hi > Rat::one() {
            return Err(Error::Invalid(format!(
                "mixing weight leaves [0,1] (range {}..{})",
                fmt_rat(&lo),
                fmt_rat(&hi)
            )));
        }
    }
    let (p, q) = (p.restrict(&dom)?, q.restrict(&dom)?);
    let mut coords = BTreeMap::new();
    for i in p.support().union(&q.support()) {
        let (pi, qi) = (p.coord(space, *i)?, q.coord(space, *i)?);
        let diff = pi.sub(&qi)?;
        coords.insert(*i, Section::sum_of_products(&[(a, &diff)], Some(&qi))?);
    }
    Lottery::new(space, &dom, coords)
}

/// Mixture with a constant rational weight on `domain`.
pub fn mix_const(space: &Space, a: &Rat, p: &Lottery, q: &Lottery, domain: &OpenSet) -> Result<Lottery, Error> {
    let w = Section::constant(space, domain, a.clone())?;
    mix(space, &w, p, q)
}

/// Glues lotteries coordinatewise and revalidates the simplex conditions.
pub fn glue_lotteries(space: &Space, family: &CompatibleFamily<Lottery>) -> Result<Glued<Lottery>, Error> {
    let mut idx = BTreeSet::new();
    for m in &family.members {
        idx.extend(m.support());
    }
    let union = family.union(space)?;
    let mut coords = BTreeMap::new();
    for i in idx {
        let members = family
            .members
            .iter()
            .map(|m| m.coord(space, i))
            .collect::<Result<Vec<_>, _>>()?;
        let fam = CompatibleFamily::new(family.cover.clone(), members)?;
        match glue(space, &fam)? {
            Glued::Glued(s) => {
                coords.insert(i, s);
            }
            Glued::Obstructed(d) => return Ok(Glued::Obstructed(d)),
        }
    }
    Ok(Glued::Glued(Lottery::new(space, &union, coords)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::topology::Span;

    fn unit() -> Space {
        Space::interval(int(0), int(1)).unwrap()
    }

    fn x_section(s: &Space) -> Section {
        Section::from_knots(&s.carrier(), vec![(int(0), int(0)), (int(1), int(1))]).unwrap()
    }

    #[test]
    fn simplex_validation() {
        let s = unit();
        let x = s.carrier();
        assert!(Lottery::constant(&s, &x, &[(0, ratio(1, 2)), (1, ratio(1, 2))]).is_ok());
        let xs = x_section(&s);
        let one_minus = xs.scale(&int(-1)).add_const(&int(1));
        assert!(Lottery::new(&s, &x, [(0, xs.clone()), (1, one_minus)].into_iter().collect()).is_ok());
        let bad = xs.scale(&int(-2)).add_const(&int(1));
        let err = Lottery::new(&s, &x, [(0, xs), (1, bad)].into_iter().collect()).unwrap_err();
        assert_eq!(err.to_string(), "invalid: coordinates sum to 0 at 1, not 1");
    }

    #[test]
    fn mixtures() {
        let s = unit();
        let x = s.carrier();
        let d1 = Lottery::delta(&s, &x, 0).unwrap();
        let d2 = Lottery::delta(&s, &x, 1).unwrap();
        let m = mix_const(&s, &ratio(1, 2), &d1, &d2, &x).unwrap();
        let expect = Lottery::constant(&s, &x, &[(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        assert!(m.same_as(&s, &expect).unwrap());
        assert!(mix_const(&s, &int(1), &d1, &d2, &x).unwrap().same_as(&s, &d1).unwrap());
        let xs = x_section(&s);
        let lin = mix(&s, &xs, &d1, &d2).unwrap();
        assert_eq!(lin.coords()[&0], xs);
        assert!(mix_const(&s, &int(2), &d1, &d2, &x).is_err());
    }

    #[test]
    fn gluing_on_a_disconnected_domain() {
        let s = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")]).unwrap();
        let one = s.open_named(&["1"]).unwrap();
        let two = s.open_named(&["2"]).unwrap();
        let fam = CompatibleFamily::new(
            vec![one.clone(), two.clone()],
            vec![Lottery::delta(&s, &one, 0).unwrap(), Lottery::delta(&s, &two, 1).unwrap()],
        )
        .unwrap();
        let g = glue_lotteries(&s, &fam).unwrap().ok().unwrap();
        assert_eq!(s.show(g.domain()), "{1,2}");
    }

    #[test]
    fn glue_recovers_restrictions() {
        let s = unit();
        let xs = x_section(&s);
        let one_minus = xs.scale(&int(-1)).add_const(&int(1));
        let l = Lottery::new(&s, &s.carrier(), [(0, xs), (1, one_minus)].into_iter().collect()).unwrap();
        let a = s.open_spans(vec![Span::new(int(0), true, ratio(2, 3), false).unwrap()]).unwrap();
        let b = s.open_spans(vec![Span::new(ratio(1, 3), false, int(1), true).unwrap()]).unwrap();
        let fam =
            CompatibleFamily::new(vec![a.clone(), b.clone()], vec![l.restrict(&a).unwrap(), l.restrict(&b).unwrap()])
                .unwrap();
        assert_eq!(glue_lotteries(&s, &fam).unwrap().ok().unwrap(), l);
    }
}
