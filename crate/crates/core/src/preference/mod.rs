//! Strict preference over variable lotteries and the relations derived
//! from it.
//!
//! A [`Ranking`] answers one question: on which part of an open set is
//! `p ≺ q` forced. Indifference and weak preference are computed from that
//! answer with relative Heyting negation, so every ranking gets them for free.

mod axioms;

pub use axioms::*;

use std::collections::BTreeSet;

use crate::lottery::Lottery;
use crate::rational::Rat;
use crate::sections::{compare, Section};
use crate::topology::{OpenSet, Point, PointSet, Region, Space};
use crate::Error;

/// A declared, named family of lotteries.
pub type Family = Vec<(String, Lottery)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `p ≺ q`
    Prec,
    /// `p ∼ q`
    Sim,
    /// `p ≾ q`
    Precsim,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Prec => "≺",
            Relation::Sim => "∼",
            Relation::Precsim => "≾",
        }
    }
}

pub trait Ranking {
    fn space(&self) -> &Space;

    /// Union of the opens inside `within` that force `p ≺ q`. Both lotteries
    /// are already restricted to `within`.
    fn strict(&self, p: &Lottery, q: &Lottery, within: &OpenSet) -> Result<OpenSet, Error>;

    /// Whether `on` itself forces `p ≺ q`.
    fn forces_strict(&self, p: &Lottery, q: &Lottery, on: &OpenSet) -> Result<bool, Error> {
        if on.is_empty() {
            return Ok(true);
        }
        let t = self.strict(p, q, on)?;
        self.space().is_subset(on, &t)
    }

    /// Largest open inside `within` on which every pair of lotteries is
    /// indifferent.
    fn indifference_region(&self, within: &OpenSet) -> Result<OpenSet, Error>;

    /// Points where the ranking may change character (interval spaces).
    fn breakpoints(&self) -> Vec<Rat> {
        Vec::new()
    }

    /// Prize weights, when the ranking is expected utility.
    fn utility_weights(&self) -> Option<&[Section]> {
        None
    }
}

/// Restricts `l` to `u`, failing when `l` is not defined on all of `u`.
pub fn restrict_to(space: &Space, l: &Lottery, u: &OpenSet) -> Result<Lottery, Error> {
    if !space.is_subset(u, l.domain())? {
        return Err(Error::Precondition(format!(
            "lottery defined on {} is used on {}",
            space.show(l.domain()),
            space.show(u)
        )));
    }
    l.restrict(u)
}

/// `⟦p rel q⟧` inside `within`.
pub fn truth_value(
    pref: &dyn Ranking,
    rel: Relation,
    p: &Lottery,
    q: &Lottery,
    within: &OpenSet,
) -> Result<OpenSet, Error> {
    let space = pref.space();
    let (p, q) = (restrict_to(space, p, within)?, restrict_to(space, q, within)?);
    match rel {
        Relation::Prec => pref.strict(&p, &q, within),
        Relation::Sim => {
            let lt = pref.strict(&p, &q, within)?;
            let gt = pref.strict(&q, &p, within)?;
            space.meet(&space.not_within(&lt, within)?, &space.not_within(&gt, within)?)
        }
        Relation::Precsim => {
            let gt = pref.strict(&q, &p, within)?;
            space.not_within(&gt, within)
        }
    }
}

/// Expected utility with one weight section per prize.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityInduced {
    space: Space,
    weights: Vec<Section>,
}

impl UtilityInduced {
    pub fn new(space: &Space, weights: Vec<Section>) -> Result<UtilityInduced, Error> {
        if weights.is_empty() {
            return Err(Error::Invalid("a utility preference needs at least one weight".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if !space.is_carrier(w.domain()) {
                return Err(Error::Invalid(format!(
                    "weight {i} is defined on {}, not the whole carrier",
                    space.show(w.domain())
                )));
            }
        }
        Ok(UtilityInduced { space: space.clone(), weights })
    }

    pub fn weights(&self) -> &[Section] {
        &self.weights
    }
}

impl Ranking for UtilityInduced {
    fn space(&self) -> &Space {
        &self.space
    }

    fn strict(&self, p: &Lottery, q: &Lottery, within: &OpenSet) -> Result<OpenSet, Error> {
        if within.is_empty() {
            return Ok(within.clone());
        }
        let (ep, eq) = (p.expectation(&self.weights)?, q.expectation(&self.weights)?);
        Ok(compare(&self.space, &ep, &eq, within)?.lt)
    }

    fn indifference_region(&self, within: &OpenSet) -> Result<OpenSet, Error> {
        let mut acc = within.clone();
        if within.is_empty() {
            return Ok(acc);
        }
        let first = self.weights[0].restrict(within)?;
        for w in &self.weights[1..] {
            let c = compare(&self.space, &first, &w.restrict(within)?, within)?;
            acc = self.space.meet(&acc, &c.eq)?;
        }
        Ok(acc)
    }

    fn breakpoints(&self) -> Vec<Rat> {
        let mut xs: Vec<Rat> = self.weights.iter().flat_map(Section::breakpoints).collect();
        xs.sort();
        xs.dedup();
        xs
    }

    fn utility_weights(&self) -> Option<&[Section]> {
        Some(&self.weights)
    }
}

/// What is known at the minimal open of one point of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalRanking {
    /// An explicit strict order on family members, as `(worse, better)`
    /// index pairs. Transitively closed on construction.
    Order(Vec<(usize, usize)>),
    /// Constant per-prize scores: lotteries are ranked by expected score at
    /// every point of the minimal open.
    Scores(Vec<Rat>),
}

impl LocalRanking {
    fn is_trivial(&self) -> bool {
        match self {
            LocalRanking::Order(pairs) => pairs.is_empty(),
            LocalRanking::Scores(s) => s.iter().all(|v| v == &s[0]),
        }
    }
}

/// A ranking tabulated on the minimal opens of a finite poset.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    space: Space,
    family: Family,
    entries: Vec<LocalRanking>,
}

impl Tabulated {
    /// Validates asymmetry and monotonicity of the table on the family.
    pub fn new(space: &Space, family: Family, entries: Vec<LocalRanking>) -> Result<Tabulated, Error> {
        let poset = space
            .as_poset()
            .ok_or_else(|| Error::Unsupported("tabulated preferences need a finite space".into()))?;
        if entries.len() != poset.len() {
            return Err(Error::Invalid(format!(
                "table has {} entries for {} points",
                entries.len(),
                poset.len()
            )));
        }
        let mut closed = Vec::with_capacity(entries.len());
        for (x, e) in entries.into_iter().enumerate() {
            closed.push(match e {
                LocalRanking::Order(pairs) => {
                    let pairs = transitive_closure(&pairs, family.len(), poset.name(x))?;
                    let up = up_open(space, x);
                    for &(a, b) in &pairs {
                        for i in [a, b] {
                            if !space.is_subset(&up, family[i].1.domain())? {
                                return Err(Error::Invalid(format!(
                                    "`{}` is ranked at {} but is not defined on {}",
                                    family[i].0,
                                    poset.name(x),
                                    space.show(&up)
                                )));
                            }
                        }
                    }
                    LocalRanking::Order(pairs)
                }
                scores => scores,
            });
        }
        let table = Tabulated { space: space.clone(), family, entries: closed };
        table.validate()?;
        Ok(table)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn entries(&self) -> &[LocalRanking] {
        &self.entries
    }

    fn validate(&self) -> Result<(), Error> {
        let poset = self.space.as_poset().expect("finite");
        let n = self.family.len();
        for x in 0..poset.len() {
            let up = up_open(&self.space, x);
            let local: Vec<Option<Lottery>> = self
                .family
                .iter()
                .map(|(_, l)| {
                    self.space
                        .is_subset(&up, l.domain())
                        .map(|inside| inside.then(|| l.restrict(&up)).transpose())
                })
                .collect::<Result<Result<Vec<_>, _>, _>>()??;
            for a in 0..n {
                for b in 0..n {
                    let (Some(pa), Some(pb)) = (&local[a], &local[b]) else { continue };
                    if !self.ranks_at(x, pa, pb)? {
                        continue;
                    }
                    if self.ranks_at(x, pb, pa)? {
                        return Err(Error::Invalid(format!(
                            "asymmetry: `{}` and `{}` are ranked both ways at {}",
                            self.family[a].0,
                            self.family[b].0,
                            poset.name(x)
                        )));
                    }
                    for y in poset.up(x) {
                        let upy = up_open(&self.space, y);
                        if !self.ranks_at(y, &pa.restrict(&upy)?, &pb.restrict(&upy)?)? {
                            return Err(Error::Invalid(format!(
                                "monotonicity: `{}` ≺ `{}` is recorded at {} but not at {}",
                                self.family[a].0,
                                self.family[b].0,
                                poset.name(x),
                                poset.name(y)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Family indices whose restriction to `↑x` equals `l`.
    fn members_matching(&self, x: usize, l: &Lottery) -> Result<Vec<usize>, Error> {
        let up = up_open(&self.space, x);
        let mut out = Vec::new();
        for (i, (_, m)) in self.family.iter().enumerate() {
            if self.space.is_subset(&up, m.domain())? && m.restrict(&up)?.same_as(&self.space, l)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Whether the entry at `x` ranks `p ≺ q`; both are given on `↑x`.
    fn ranks_at(&self, x: usize, p: &Lottery, q: &Lottery) -> Result<bool, Error> {
        match &self.entries[x] {
            LocalRanking::Order(pairs) if pairs.is_empty() => Ok(false),
            LocalRanking::Order(pairs) => {
                let name = self.space.as_poset().expect("finite").name(x).to_string();
                let ps = self.members_matching(x, p)?;
                let qs = self.members_matching(x, q)?;
                if ps.is_empty() || qs.is_empty() {
                    return Err(Error::Invalid(format!(
                        "lottery is not in the tabulated family at {name}"
                    )));
                }
                Ok(pairs.iter().any(|(a, b)| ps.contains(a) && qs.contains(b)))
            }
            LocalRanking::Scores(scores) => {
                let weights = scores
                    .iter()
                    .map(|s| Section::constant(&self.space, p.domain(), s.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                let (ep, eq) = (p.expectation(&weights)?, q.expectation(&weights)?);
                let d = eq.sub(&ep)?;
                let [neg, zero, _] = d.sign_regions(p.domain())?;
                Ok(region_is_empty(&neg) && region_is_empty(&zero))
            }
        }
    }
}

fn region_is_empty(r: &Region) -> bool {
    match r {
        Region::Points(p) => p.is_empty(),
        Region::Spans(s) => s.is_empty(),
    }
}

fn up_open(space: &Space, x: usize) -> OpenSet {
    space.minimal_open(&Point::Node(x)).expect("finite point")
}

fn transitive_closure(pairs: &[(usize, usize)], n: usize, at: &str) -> Result<Vec<(usize, usize)>, Error> {
    let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::Invalid(format!("order at {at} names a lottery outside the family")));
        }
        set.insert((a, b));
    }
    loop {
        let extra: Vec<(usize, usize)> = set
            .iter()
            .flat_map(|&(a, b)| set.iter().filter(move |&&(c, _)| c == b).map(move |&(_, d)| (a, d)))
            .filter(|p| !set.contains(p))
            .collect();
        if extra.is_empty() {
            break;
        }
        set.extend(extra);
    }
    if set.iter().any(|(a, b)| a == b) {
        return Err(Error::Invalid(format!("order at {at} is not irreflexive")));
    }
    Ok(set.into_iter().collect())
}

impl Ranking for Tabulated {
    fn space(&self) -> &Space {
        &self.space
    }

    fn strict(&self, p: &Lottery, q: &Lottery, within: &OpenSet) -> Result<OpenSet, Error> {
        let pts = within.points().ok_or_else(|| Error::Mismatch("expected a finite open".into()))?;
        let mut out = PointSet::new();
        for &x in pts {
            let up = up_open(&self.space, x);
            if self.ranks_at(x, &p.restrict(&up)?, &q.restrict(&up)?)? {
                out.extend(up.points().expect("finite"));
            }
        }
        self.space.open(Region::Points(out))
    }

    fn indifference_region(&self, within: &OpenSet) -> Result<OpenSet, Error> {
        let poset = self.space.as_poset().expect("finite");
        let pts = within.points().ok_or_else(|| Error::Mismatch("expected a finite open".into()))?;
        let keep = pts
            .iter()
            .copied()
            .filter(|&x| poset.up(x).iter().all(|&y| self.entries[y].is_trivial()))
            .collect();
        self.space.open(Region::Points(keep))
    }
}

/// A ranking that is asserted only on proper opens: the whole carrier never
/// forces a strict preference even when every proper piece does.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperOpensOnly {
    inner: Box<Preference>,
}

impl ProperOpensOnly {
    pub fn new(inner: Preference) -> ProperOpensOnly {
        ProperOpensOnly { inner: Box::new(inner) }
    }

    pub fn inner(&self) -> &Preference {
        &self.inner
    }
}

impl Ranking for ProperOpensOnly {
    fn space(&self) -> &Space {
        self.inner.space()
    }

    fn strict(&self, p: &Lottery, q: &Lottery, within: &OpenSet) -> Result<OpenSet, Error> {
        let t = self.inner.strict(p, q, within)?;
        let space = self.space();
        if !space.is_carrier(&t) {
            return Ok(t);
        }
        match space {
            // Two overlapping proper pieces already cover the carrier.
            Space::Interval { .. } => Ok(t),
            Space::Poset(poset) => {
                let mut out = PointSet::new();
                for x in 0..poset.len() {
                    let up = poset.up(x);
                    if up.len() < poset.len() {
                        out.extend(up);
                    }
                }
                space.open(Region::Points(out))
            }
        }
    }

    fn forces_strict(&self, p: &Lottery, q: &Lottery, on: &OpenSet) -> Result<bool, Error> {
        if !on.is_empty() && self.space().is_carrier(on) {
            return Ok(false);
        }
        self.inner.forces_strict(p, q, on)
    }

    fn indifference_region(&self, within: &OpenSet) -> Result<OpenSet, Error> {
        self.inner.indifference_region(within)
    }

    fn breakpoints(&self) -> Vec<Rat> {
        self.inner.breakpoints()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Preference {
    Utility(UtilityInduced),
    Table(Tabulated),
    ProperOpensOnly(ProperOpensOnly),
}

impl Preference {
    fn as_ranking(&self) -> &dyn Ranking {
        match self {
            Preference::Utility(u) => u,
            Preference::Table(t) => t,
            Preference::ProperOpensOnly(p) => p,
        }
    }
}

impl Ranking for Preference {
    fn space(&self) -> &Space {
        self.as_ranking().space()
    }

    fn strict(&self, p: &Lottery, q: &Lottery, within: &OpenSet) -> Result<OpenSet, Error> {
        self.as_ranking().strict(p, q, within)
    }

    fn forces_strict(&self, p: &Lottery, q: &Lottery, on: &OpenSet) -> Result<bool, Error> {
        self.as_ranking().forces_strict(p, q, on)
    }

    fn indifference_region(&self, within: &OpenSet) -> Result<OpenSet, Error> {
        self.as_ranking().indifference_region(within)
    }

    fn breakpoints(&self) -> Vec<Rat> {
        self.as_ranking().breakpoints()
    }

    fn utility_weights(&self) -> Option<&[Section]> {
        self.as_ranking().utility_weights()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::rational::int;

    /// Three-point space with `0 ⊑ 1`, `0 ⊑ 2`, and the two point masses.
    pub fn example2() -> (Space, Tabulated) {
        let space = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")]).unwrap();
        let x = space.carrier();
        let family = vec![
            ("d1".to_string(), Lottery::delta(&space, &x, 0).unwrap()),
            ("d2".to_string(), Lottery::delta(&space, &x, 1).unwrap()),
        ];
        let entries = vec![
            LocalRanking::Order(vec![]),
            LocalRanking::Scores(vec![int(1), int(0)]),
            LocalRanking::Scores(vec![int(0), int(1)]),
        ];
        let t = Tabulated::new(&space, family, entries).unwrap();
        (space, t)
    }

    /// `[0,2]` with weights `(x, 1)`: the point masses cross at 1.
    pub fn example3() -> (Space, UtilityInduced) {
        let space = Space::interval(int(0), int(2)).unwrap();
        let x = space.carrier();
        let w1 = Section::from_knots(&x, vec![(int(0), int(0)), (int(2), int(2))]).unwrap();
        let w2 = Section::constant(&space, &x, int(1)).unwrap();
        let pref = UtilityInduced::new(&space, vec![w1, w2]).unwrap();
        (space, pref)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};

    fn show(space: &Space, u: &OpenSet) -> String {
        space.show(u)
    }

    #[test]
    fn example2_forcings() {
        let (space, t) = example2();
        let x = space.carrier();
        let (d1, d2) = (&t.family()[0].1, &t.family()[1].1);
        assert_eq!(show(&space, &truth_value(&t, Relation::Prec, d2, d1, &x).unwrap()), "{1}");
        assert_eq!(show(&space, &truth_value(&t, Relation::Prec, d1, d2, &x).unwrap()), "{2}");
        assert_eq!(show(&space, &truth_value(&t, Relation::Sim, d1, d2, &x).unwrap()), "∅");
        assert_eq!(show(&space, &truth_value(&t, Relation::Precsim, d1, d2, &x).unwrap()), "{2}");
        assert_eq!(show(&space, &truth_value(&t, Relation::Sim, d1, d1, &x).unwrap()), "{0,1,2}");
    }

    #[test]
    fn example3_forcings() {
        let (space, u) = example3();
        let x = space.carrier();
        let d1 = Lottery::delta(&space, &x, 0).unwrap();
        let d2 = Lottery::delta(&space, &x, 1).unwrap();
        assert_eq!(show(&space, &truth_value(&u, Relation::Prec, &d1, &d2, &x).unwrap()), "[0,1)");
        assert_eq!(show(&space, &truth_value(&u, Relation::Prec, &d2, &d1, &x).unwrap()), "(1,2]");
        assert_eq!(show(&space, &truth_value(&u, Relation::Sim, &d1, &d2, &x).unwrap()), "∅");
    }

    #[test]
    fn equal_weights_make_everything_indifferent() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let w = Section::constant(&space, &x, ratio(2, 3)).unwrap();
        let u = UtilityInduced::new(&space, vec![w.clone(), w]).unwrap();
        let p = Lottery::delta(&space, &x, 0).unwrap();
        let q = Lottery::constant(&space, &x, &[(0, ratio(1, 4)), (1, ratio(3, 4))]).unwrap();
        assert_eq!(truth_value(&u, Relation::Sim, &p, &q, &x).unwrap(), x);
        assert_eq!(u.indifference_region(&x).unwrap(), x);
    }

    #[test]
    fn table_rejects_non_monotone_rows() {
        let space = Space::poset(&["a", "b"], &[("a", "b")]).unwrap();
        let x = space.carrier();
        let family = vec![
            ("p".to_string(), Lottery::delta(&space, &x, 0).unwrap()),
            ("q".to_string(), Lottery::delta(&space, &x, 1).unwrap()),
        ];
        let entries = vec![LocalRanking::Order(vec![(0, 1)]), LocalRanking::Order(vec![])];
        let err = Tabulated::new(&space, family, entries).unwrap_err();
        assert!(err.to_string().contains("monotonicity"), "{err}");
    }

    #[test]
    fn table_rejects_unknown_lotteries() {
        let space = Space::poset(&["a"], &[]).unwrap();
        let x = space.carrier();
        let family: Family = (0..2).map(|z| (format!("d{z}"), Lottery::delta(&space, &x, z).unwrap())).collect();
        let t = Tabulated::new(&space, family, vec![LocalRanking::Order(vec![(0, 1)])]).unwrap();
        let mixed = Lottery::constant(&space, &x, &[(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        let err = truth_value(&t, Relation::Prec, &mixed, &t.family()[0].1, &x).unwrap_err();
        assert!(err.to_string().contains("not in the tabulated family"));
    }

    #[test]
    fn scores_rank_mixtures_off_the_bottom() {
        let (space, t) = example2();
        let one = space.open_named(&["1"]).unwrap();
        let mixed = Lottery::constant(&space, &one, &[(0, ratio(1, 4)), (1, ratio(3, 4))]).unwrap();
        let d1 = &t.family()[0].1;
        assert_eq!(truth_value(&t, Relation::Prec, &mixed, d1, &one).unwrap(), one);
    }

    #[test]
    fn proper_opens_only_never_forces_the_carrier() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let w = vec![
            Section::constant(&space, &x, int(1)).unwrap(),
            Section::constant(&space, &x, int(0)).unwrap(),
        ];
        let pref = ProperOpensOnly::new(Preference::Utility(UtilityInduced::new(&space, w).unwrap()));
        let d1 = Lottery::delta(&space, &x, 0).unwrap();
        let d2 = Lottery::delta(&space, &x, 1).unwrap();
        assert!(!pref.forces_strict(&d2, &d1, &x).unwrap());
        let left = space.open_spans(vec![crate::topology::Span::new(int(0), true, ratio(2, 3), false).unwrap()]).unwrap();
        assert!(pref.forces_strict(&d2.restrict(&left).unwrap(), &d1.restrict(&left).unwrap(), &left).unwrap());
    }
}
