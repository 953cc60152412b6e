//! Stage spaces and their frames of open sets.
//!
//! Two carriers are supported: a finite poset with the Alexandrov topology
//! (opens are up-sets) and a closed rational interval with the subspace
//! topology restricted to finite unions of rational intervals. Every open set
//! doubles as a truth value, so the Heyting operations here are the logic of
//! the whole crate.

mod interval;
mod poset;

use std::fmt;

pub use interval::{IntervalSet, Span};
pub use poset::{PointSet, Poset};

use crate::rational::{fmt_rat, half, Rat};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Space {
    Poset(Poset),
    Interval { lo: Rat, hi: Rat },
}

/// An arbitrary subset of a carrier, in the representation of its space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Points(PointSet),
    Spans(IntervalSet),
}

/// A validated open set of some [`Space`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenSet(Region);

/// A point of a carrier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Node(usize),
    Real(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classicality {
    Classical,
    NonClassical { witness: OpenSet },
}

/// Wraps a region already known to be open (e.g. an intersection of opens).
pub(crate) fn open_unchecked(region: Region) -> OpenSet {
    OpenSet(region)
}

impl OpenSet {
    pub fn region(&self) -> &Region {
        &self.0
    }

    pub fn points(&self) -> Option<&PointSet> {
        match &self.0 {
            Region::Points(p) => Some(p),
            Region::Spans(_) => None,
        }
    }

    pub fn spans(&self) -> Option<&IntervalSet> {
        match &self.0 {
            Region::Spans(s) => Some(s),
            Region::Points(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.0 {
            Region::Points(p) => p.is_empty(),
            Region::Spans(s) => s.is_empty(),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (&self.0, x) {
            (Region::Points(p), Point::Node(i)) => p.contains(i),
            (Region::Spans(s), Point::Real(r)) => s.contains(r),
            _ => false,
        }
    }
}

impl Space {
    pub fn poset<S: AsRef<str>>(points: &[S], pairs: &[(S, S)]) -> Result<Space, Error> {
        Ok(Space::Poset(Poset::new(points, pairs)?))
    }

    pub fn interval(lo: Rat, hi: Rat) -> Result<Space, Error> {
        if lo >= hi {
            return Err(Error::Invalid(format!(
                "interval carrier needs lo < hi, got [{}, {}]",
                fmt_rat(&lo),
                fmt_rat(&hi)
            )));
        }
        Ok(Space::Interval { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Space::Poset(_))
    }

    pub fn as_poset(&self) -> Option<&Poset> {
        match self {
            Space::Poset(p) => Some(p),
            Space::Interval { .. } => None,
        }
    }

    pub fn bounds(&self) -> Option<(&Rat, &Rat)> {
        match self {
            Space::Interval { lo, hi } => Some((lo, hi)),
            Space::Poset(_) => None,
        }
    }

    pub fn carrier(&self) -> OpenSet {
        match self {
            Space::Poset(p) => OpenSet(Region::Points(p.all())),
            Space::Interval { lo, hi } => {
                OpenSet(Region::Spans(IntervalSet::from_span(Span::closed(lo.clone(), hi.clone()))))
            }
        }
    }

    pub fn empty(&self) -> OpenSet {
        match self {
            Space::Poset(_) => OpenSet(Region::Points(PointSet::new())),
            Space::Interval { .. } => OpenSet(Region::Spans(IntervalSet::empty())),
        }
    }

    /// Validates a region as an open set of this space.
    pub fn open(&self, region: Region) -> Result<OpenSet, Error> {
        match (self, &region) {
            (Space::Poset(p), Region::Points(s)) => {
                if s.iter().any(|&x| x >= p.len()) {
                    return Err(Error::Mismatch("point index outside the carrier".into()));
                }
                if !p.is_up_closed(s) {
                    return Err(Error::Invalid(format!("{} is not up-closed", p.format(s))));
                }
            }
            (Space::Interval { lo, hi }, Region::Spans(s)) => {
                if !s.is_open_in(lo, hi) {
                    return Err(Error::Invalid(format!("{s} is not open in the carrier")));
                }
            }
            _ => return Err(Error::Mismatch("region kind does not match the space".into())),
        }
        Ok(OpenSet(region))
    }

    /// Open set from point names (finite spaces).
    pub fn open_named<S: AsRef<str>>(&self, names: &[S]) -> Result<OpenSet, Error> {
        let p = self
            .as_poset()
            .ok_or_else(|| Error::Mismatch("named points need a finite space".into()))?;
        let mut set = PointSet::new();
        for n in names {
            let n = n.as_ref();
            set.insert(p.index_of(n).ok_or_else(|| Error::Unresolved(format!("point `{n}`")))?);
        }
        self.open(Region::Points(set))
    }

    /// Open set from spans (interval spaces).
    pub fn open_spans(&self, spans: Vec<Span>) -> Result<OpenSet, Error> {
        self.open(Region::Spans(IntervalSet::from_spans(spans)))
    }

    fn check(&self, u: &OpenSet) -> Result<(), Error> {
        match (self, &u.0) {
            (Space::Poset(p), Region::Points(s)) if s.iter().all(|&x| x < p.len()) => Ok(()),
            (Space::Interval { lo, hi }, Region::Spans(s))
                if s.spans().iter().all(|sp| &sp.lo >= lo && &sp.hi <= hi) =>
            {
                Ok(())
            }
            _ => Err(Error::Mismatch("open set does not belong to this space".into())),
        }
    }

    pub fn meet(&self, u: &OpenSet, v: &OpenSet) -> Result<OpenSet, Error> {
        self.check(u)?;
        self.check(v)?;
        Ok(OpenSet(match (&u.0, &v.0) {
            (Region::Points(a), Region::Points(b)) => Region::Points(a.intersection(b).copied().collect()),
            (Region::Spans(a), Region::Spans(b)) => Region::Spans(a.intersection(b)),
            _ => unreachable!("checked above"),
        }))
    }

    pub fn join(&self, u: &OpenSet, v: &OpenSet) -> Result<OpenSet, Error> {
        self.check(u)?;
        self.check(v)?;
        Ok(OpenSet(match (&u.0, &v.0) {
            (Region::Points(a), Region::Points(b)) => Region::Points(a.union(b).copied().collect()),
            (Region::Spans(a), Region::Spans(b)) => Region::Spans(a.union(b)),
            _ => unreachable!("checked above"),
        }))
    }

    pub fn join_all<'a, I: IntoIterator<Item = &'a OpenSet>>(&self, opens: I) -> Result<OpenSet, Error> {
        opens.into_iter().try_fold(self.empty(), |acc, u| self.join(&acc, u))
    }

    pub fn meet_all<'a, I: IntoIterator<Item = &'a OpenSet>>(&self, opens: I) -> Result<OpenSet, Error> {
        opens.into_iter().try_fold(self.carrier(), |acc, u| self.meet(&acc, u))
    }

    /// Set complement; generally not open.
    pub fn complement(&self, u: &OpenSet) -> Result<Region, Error> {
        self.check(u)?;
        Ok(match (self, &u.0) {
            (Space::Poset(p), Region::Points(a)) => Region::Points(p.all().difference(a).copied().collect()),
            (Space::Interval { lo, hi }, Region::Spans(a)) => Region::Spans(a.complement_in(lo, hi)),
            _ => unreachable!("checked above"),
        })
    }

    /// Largest open set contained in `region`.
    pub fn interior(&self, region: &Region) -> Result<OpenSet, Error> {
        Ok(OpenSet(match (self, region) {
            (Space::Poset(p), Region::Points(a)) => {
                if a.iter().any(|&x| x >= p.len()) {
                    return Err(Error::Mismatch("point index outside the carrier".into()));
                }
                Region::Points(p.interior(a))
            }
            (Space::Interval { lo, hi }, Region::Spans(a)) => {
                let clipped = a.intersection(&IntervalSet::from_span(Span::closed(lo.clone(), hi.clone())));
                Region::Spans(clipped.interior_in(lo, hi))
            }
            _ => return Err(Error::Mismatch("region kind does not match the space".into())),
        }))
    }

    pub fn union_region(&self, a: &Region, b: &Region) -> Result<Region, Error> {
        match (a, b) {
            (Region::Points(x), Region::Points(y)) => Ok(Region::Points(x.union(y).copied().collect())),
            (Region::Spans(x), Region::Spans(y)) => Ok(Region::Spans(x.union(y))),
            _ => Err(Error::Mismatch("region kinds differ".into())),
        }
    }

    pub fn not(&self, u: &OpenSet) -> Result<OpenSet, Error> {
        self.interior(&self.complement(u)?)
    }

    pub fn implies(&self, u: &OpenSet, v: &OpenSet) -> Result<OpenSet, Error> {
        self.check(v)?;
        let region = self.union_region(&self.complement(u)?, &v.0)?;
        self.interior(&region)
    }

    /// Pseudo-complement relative to an ambient open `within`.
    pub fn not_within(&self, u: &OpenSet, within: &OpenSet) -> Result<OpenSet, Error> {
        self.meet(within, &self.not(u)?)
    }

    /// `within \ u` as a region (not generally open).
    pub fn difference(&self, within: &OpenSet, u: &OpenSet) -> Result<Region, Error> {
        self.check(within)?;
        self.check(u)?;
        Ok(match (self, &within.0, &u.0) {
            (Space::Poset(_), Region::Points(a), Region::Points(b)) => {
                Region::Points(a.difference(b).copied().collect())
            }
            (Space::Interval { lo, hi }, Region::Spans(a), Region::Spans(b)) => {
                Region::Spans(a.difference(b, lo, hi))
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn is_subset(&self, u: &OpenSet, v: &OpenSet) -> Result<bool, Error> {
        self.check(u)?;
        self.check(v)?;
        Ok(match (&u.0, &v.0) {
            (Region::Points(a), Region::Points(b)) => a.is_subset(b),
            (Region::Spans(a), Region::Spans(b)) => a.is_subset(b),
            _ => unreachable!("checked above"),
        })
    }

    pub fn is_carrier(&self, u: &OpenSet) -> bool {
        *u == self.carrier()
    }

    pub fn is_classical(&self) -> Classicality {
        match self {
            Space::Poset(p) => {
                for y in 0..p.len() {
                    if (0..p.len()).any(|x| x != y && p.leq(x, y)) {
                        return Classicality::NonClassical {
                            witness: OpenSet(Region::Points(p.up(y))),
                        };
                    }
                }
                Classicality::Classical
            }
            Space::Interval { lo, hi } => {
                let mid = (lo + hi) * half();
                Classicality::NonClassical {
                    witness: OpenSet(Region::Spans(IntervalSet::from_span(Span::open(lo.clone(), mid)))),
                }
            }
        }
    }

    pub fn components(&self, u: &OpenSet) -> Result<Vec<OpenSet>, Error> {
        self.check(u)?;
        Ok(match (self, &u.0) {
            (Space::Poset(p), Region::Points(a)) => {
                p.components(a).into_iter().map(|c| OpenSet(Region::Points(c))).collect()
            }
            (Space::Interval { .. }, Region::Spans(a)) => a
                .spans()
                .iter()
                .map(|s| OpenSet(Region::Spans(IntervalSet::from_span(s.clone()))))
                .collect(),
            _ => unreachable!("checked above"),
        })
    }

    pub fn minimal_open(&self, x: &Point) -> Result<OpenSet, Error> {
        match (self, x) {
            (Space::Poset(p), Point::Node(i)) if *i < p.len() => Ok(OpenSet(Region::Points(p.up(*i)))),
            (Space::Poset(_), _) => Err(Error::Mismatch("not a point of this poset".into())),
            (Space::Interval { .. }, _) => Err(Error::Unsupported(
                "interval points have no minimal open neighbourhood".into(),
            )),
        }
    }

    /// All opens of a finite space (up to 20 points).
    pub fn opens(&self) -> Result<Vec<OpenSet>, Error> {
        match self {
            Space::Poset(p) => Ok(p.up_sets().into_iter().map(|s| OpenSet(Region::Points(s))).collect()),
            Space::Interval { .. } => Err(Error::Unsupported("an interval has infinitely many opens".into())),
        }
    }

    /// Points of an open set that serve as cover anchors: every point of a
    /// finite open, or nothing for intervals.
    pub fn point_list(&self, u: &OpenSet) -> Vec<Point> {
        match &u.0 {
            Region::Points(a) => a.iter().map(|&i| Point::Node(i)).collect(),
            Region::Spans(_) => Vec::new(),
        }
    }

    pub fn show(&self, u: &OpenSet) -> String {
        self.show_region(&u.0)
    }

    pub fn show_region(&self, r: &Region) -> String {
        match (self, r) {
            (Space::Poset(p), Region::Points(a)) => p.format(a),
            (_, Region::Spans(s)) => s.to_string(),
            (Space::Interval { .. }, Region::Points(a)) => format!("{a:?}"),
        }
    }

    pub fn show_point(&self, x: &Point) -> String {
        match (self, x) {
            (Space::Poset(p), Point::Node(i)) if *i < p.len() => p.name(*i).to_string(),
            (_, Point::Real(r)) => fmt_rat(r),
            (_, Point::Node(i)) => format!("#{i}"),
        }
    }

    /// A point of a region, if it is non-empty.
    pub fn region_witness(&self, r: &Region) -> Option<Point> {
        match r {
            Region::Points(a) => a.iter().next().map(|&i| Point::Node(i)),
            Region::Spans(s) => s.witness().map(Point::Real),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Poset(p) => {
                let mut pairs = Vec::new();
                for x in 0..p.len() {
                    for y in 0..p.len() {
                        if x != y && p.leq(x, y) {
                            pairs.push(format!("{}<{}", p.name(x), p.name(y)));
                        }
                    }
                }
                write!(f, "poset {{{}}} order {{{}}}", p.names().join(","), pairs.join(","))
            }
            Space::Interval { lo, hi } => write!(f, "interval [{},{}]", fmt_rat(lo), fmt_rat(hi)),
        }
    }
}
