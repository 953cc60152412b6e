//! Real-valued sections over open sets.
//!
//! On a finite poset a continuous function is constant on each connected
//! component, so a section is a per-point table validated for that. On an
//! interval a section is a continuous piecewise-linear function per maximal
//! span of its domain, stored as knots `(x, y)` covering the span's closure.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{fmt_rat, half, Rat};
use crate::topology::{IntervalSet, OpenSet, Point, Region, Space, Span};
use crate::Error;

/// A continuous piecewise-linear function on a closed interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlFn {
    knots: Vec<(Rat, Rat)>,
}

impl PlFn {
    pub fn new(mut knots: Vec<(Rat, Rat)>) -> Result<PlFn, Error> {
        knots.sort_by(|a, b| a.0.cmp(&b.0));
        if knots.len() < 2 {
            return Err(Error::Invalid("a piecewise-linear function needs two knots".into()));
        }
        for w in knots.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("repeated knot at x = {}", fmt_rat(&w[0].0))));
            }
        }
        Ok(PlFn::normalized(knots))
    }

    fn normalized(knots: Vec<(Rat, Rat)>) -> PlFn {
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(knots.len());
        for k in knots {
            if out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (y1 - y0) * (&k.0 - x1) == (&k.1 - y1) * (x1 - x0) {
                    out.pop();
                }
            }
            out.push(k);
        }
        PlFn { knots: out }
    }

    pub fn constant(lo: Rat, hi: Rat, c: Rat) -> PlFn {
        PlFn { knots: vec![(lo, c.clone()), (hi, c)] }
    }

    pub fn knots(&self) -> &[(Rat, Rat)] {
        &self.knots
    }

    pub fn lo(&self) -> &Rat {
        &self.knots[0].0
    }

    pub fn hi(&self) -> &Rat {
        &self.knots[self.knots.len() - 1].0
    }

    pub fn xs(&self) -> impl Iterator<Item = &Rat> {
        self.knots.iter().map(|k| &k.0)
    }

    pub fn is_constant(&self) -> bool {
        self.knots.len() == 2 && self.knots[0].1 == self.knots[1].1
    }

    /// Value at `x` in the closed support, by linear interpolation.
    pub fn eval(&self, x: &Rat) -> Rat {
        let i = self.knots.partition_point(|k| &k.0 <= x);
        if i == 0 {
            return self.knots[0].1.clone();
        }
        if i == self.knots.len() {
            return self.knots[i - 1].1.clone();
        }
        let (x0, y0) = &self.knots[i - 1];
        let (x1, y1) = &self.knots[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `(start, end, slope, intercept)` per affine piece.
    pub fn pieces(&self) -> Vec<(Rat, Rat, Rat, Rat)> {
        self.knots
            .windows(2)
            .map(|w| {
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let intercept = &w[0].1 - &slope * &w[0].0;
                (w[0].0.clone(), w[1].0.clone(), slope, intercept)
            })
            .collect()
    }

    pub fn restrict(&self, lo: &Rat, hi: &Rat) -> PlFn {
        let mut knots = vec![(lo.clone(), self.eval(lo))];
        knots.extend(self.knots.iter().filter(|k| &k.0 > lo && &k.0 < hi).cloned());
        knots.push((hi.clone(), self.eval(hi)));
        PlFn::normalized(knots)
    }

    fn min_value(&self) -> &Rat {
        self.knots.iter().map(|k| &k.1).min().expect("non-empty")
    }

    fn max_value(&self) -> &Rat {
        self.knots.iter().map(|k| &k.1).max().expect("non-empty")
    }
}

/// A section: a domain and its values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    domain: OpenSet,
    values: Values,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Values {
    Nodes(BTreeMap<usize, Rat>),
    Pieces(Vec<PlFn>),
}

/// Result of comparing two sections on an open set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub lt: OpenSet,
    pub gt: OpenSet,
    pub eq: OpenSet,
}

/// Members of a family that disagree at a point of their overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub point: Point,
    pub members: (usize, usize),
    pub values: (Rat, Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Glued<T> {
    Glued(T),
    Obstructed(Disagreement),
}

impl<T> Glued<T> {
    pub fn ok(self) -> Option<T> {
        match self {
            Glued::Glued(t) => Some(t),
            Glued::Obstructed(_) => None,
        }
    }
}

/// Sections (or lotteries) indexed by the open sets of a cover.
#[derive(Clone, Debug)]
pub struct CompatibleFamily<T> {
    pub cover: Vec<OpenSet>,
    pub members: Vec<T>,
}

impl<T> CompatibleFamily<T> {
    pub fn new(cover: Vec<OpenSet>, members: Vec<T>) -> Result<Self, Error> {
        if cover.len() != members.len() {
            return Err(Error::Invalid("cover and members differ in length".into()));
        }
        Ok(CompatibleFamily { cover, members })
    }

    pub fn union(&self, space: &Space) -> Result<OpenSet, Error> {
        space.join_all(&self.cover)
    }
}

fn domain_spans(u: &OpenSet) -> Result<&IntervalSet, Error> {
    u.spans().ok_or_else(|| Error::Mismatch("expected an interval open set".into()))
}

fn domain_points(u: &OpenSet) -> Result<&crate::topology::PointSet, Error> {
    u.points().ok_or_else(|| Error::Mismatch("expected a finite open set".into()))
}

/// Index of the span of `set` that contains `inner`.
fn containing_span(set: &IntervalSet, inner: &Span) -> Option<usize> {
    set.spans()
        .iter()
        .position(|s| IntervalSet::from_span(inner.clone()).is_subset(&IntervalSet::from_span(s.clone())))
}

impl Section {
    pub fn constant(space: &Space, domain: &OpenSet, c: Rat) -> Result<Section, Error> {
        let values = match space {
            Space::Poset(_) => Values::Nodes(domain_points(domain)?.iter().map(|&x| (x, c.clone())).collect()),
            Space::Interval { .. } => Values::Pieces(
                domain_spans(domain)?
                    .spans()
                    .iter()
                    .map(|s| PlFn::constant(s.lo.clone(), s.hi.clone(), c.clone()))
                    .collect(),
            ),
        };
        Ok(Section { domain: domain.clone(), values })
    }

    /// Finite space: one value per point, required constant on components.
    pub fn from_nodes(space: &Space, domain: &OpenSet, values: BTreeMap<usize, Rat>) -> Result<Section, Error> {
        let pts = domain_points(domain)?;
        if values.keys().copied().collect::<crate::topology::PointSet>() != *pts {
            return Err(Error::Invalid("section values must cover exactly the domain".into()));
        }
        for comp in space.components(domain)? {
            let mut vals = comp.points().expect("finite").iter().map(|x| &values[x]);
            let first = vals.next().expect("components are non-empty");
            if vals.any(|v| v != first) {
                return Err(Error::Invalid(format!(
                    "section is not constant on the component {}",
                    space.show(&comp)
                )));
            }
        }
        Ok(Section { domain: domain.clone(), values: Values::Nodes(values) })
    }

    /// One value per component, given as `(component, value)`.
    pub fn from_components(space: &Space, domain: &OpenSet, parts: &[(OpenSet, Rat)]) -> Result<Section, Error> {
        if let Region::Spans(spans) = domain.region() {
            let fns = spans
                .spans()
                .iter()
                .map(|s| {
                    parts
                        .iter()
                        .find(|(c, _)| c.spans().is_some_and(|cs| cs.spans() == std::slice::from_ref(s)))
                        .map(|(_, v)| PlFn::constant(s.lo.clone(), s.hi.clone(), v.clone()))
                        .ok_or_else(|| Error::Invalid(format!("no value for component {s}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Section::from_parts(domain, fns);
        }
        let mut values = BTreeMap::new();
        for (comp, v) in parts {
            for &x in domain_points(comp)? {
                values.insert(x, v.clone());
            }
        }
        Section::from_nodes(space, domain, values)
    }

    /// Interval space: a single piecewise-linear graph restricted to the domain.
    pub fn from_knots(domain: &OpenSet, knots: Vec<(Rat, Rat)>) -> Result<Section, Error> {
        let f = PlFn::new(knots)?;
        let spans = domain_spans(domain)?;
        let mut parts = Vec::new();
        for s in spans.spans() {
            if &s.lo < f.lo() || &s.hi > f.hi() {
                return Err(Error::Invalid(format!("knots do not cover the span {s}")));
            }
            parts.push(f.restrict(&s.lo, &s.hi));
        }
        Ok(Section { domain: domain.clone(), values: Values::Pieces(parts) })
    }

    /// Interval space: one function per span of the domain, in order.
    pub fn from_parts(domain: &OpenSet, parts: Vec<PlFn>) -> Result<Section, Error> {
        let spans = domain_spans(domain)?;
        if spans.spans().len() != parts.len() {
            return Err(Error::Invalid("one function per domain span is required".into()));
        }
        for (s, p) in spans.spans().iter().zip(&parts) {
            if p.lo() != &s.lo || p.hi() != &s.hi {
                return Err(Error::Invalid(format!("function support does not match span {s}")));
            }
        }
        Ok(Section { domain: domain.clone(), values: Values::Pieces(parts) })
    }

    pub fn domain(&self) -> &OpenSet {
        &self.domain
    }

    /// Per-span functions (interval sections).
    pub fn parts(&self) -> Option<&[PlFn]> {
        match &self.values {
            Values::Pieces(p) => Some(p),
            Values::Nodes(_) => None,
        }
    }

    /// Per-point values (finite sections).
    pub fn nodes(&self) -> Option<&BTreeMap<usize, Rat>> {
        match &self.values {
            Values::Nodes(n) => Some(n),
            Values::Pieces(_) => None,
        }
    }

    pub fn eval(&self, x: &Point) -> Option<Rat> {
        match (&self.values, x) {
            (Values::Nodes(n), Point::Node(i)) => n.get(i).cloned(),
            (Values::Pieces(parts), Point::Real(r)) => {
                let spans = self.domain.spans()?;
                let i = spans.spans().iter().position(|s| s.contains(r))?;
                Some(parts[i].eval(r))
            }
            _ => None,
        }
    }

    /// Value or one-sided limit at a point of the closure of one domain span.
    pub fn eval_closure(&self, x: &Rat) -> Option<Rat> {
        let spans = self.domain.spans()?;
        let parts = self.parts()?;
        let i = spans.spans().iter().position(|s| &s.lo <= x && x <= &s.hi)?;
        Some(parts[i].eval(x))
    }

    /// True when the section is constant on each component of its domain.
    pub fn is_locally_constant(&self) -> bool {
        match &self.values {
            Values::Nodes(_) => true,
            Values::Pieces(parts) => parts.iter().all(PlFn::is_constant),
        }
    }

    /// The single value taken everywhere, if any.
    pub fn constant_value(&self) -> Option<Rat> {
        let vals: Vec<&Rat> = match &self.values {
            Values::Nodes(n) => n.values().collect(),
            Values::Pieces(parts) => parts.iter().flat_map(|p| p.knots.iter().map(|k| &k.1)).collect(),
        };
        let first = vals.first()?;
        vals.iter().all(|v| v == first).then(|| (*first).clone())
    }

    /// Breakpoints of the piecewise description (interval sections).
    pub fn breakpoints(&self) -> Vec<Rat> {
        match &self.values {
            Values::Nodes(_) => Vec::new(),
            Values::Pieces(parts) => parts.iter().flat_map(|p| p.xs().cloned()).collect(),
        }
    }

    pub fn min_value(&self) -> Option<Rat> {
        match &self.values {
            Values::Nodes(n) => n.values().min().cloned(),
            Values::Pieces(parts) => parts.iter().map(|p| p.min_value()).min().cloned(),
        }
    }

    pub fn max_value(&self) -> Option<Rat> {
        match &self.values {
            Values::Nodes(n) => n.values().max().cloned(),
            Values::Pieces(parts) => parts.iter().map(|p| p.max_value()).max().cloned(),
        }
    }

    pub fn restrict(&self, v: &OpenSet) -> Result<Section, Error> {
        match &self.values {
            Values::Nodes(n) => {
                let pts = domain_points(v)?;
                if !pts.is_subset(domain_points(&self.domain)?) {
                    return Err(Error::Invalid("restriction target is not inside the domain".into()));
                }
                Ok(Section {
                    domain: v.clone(),
                    values: Values::Nodes(pts.iter().map(|x| (*x, n[x].clone())).collect()),
                })
            }
            Values::Pieces(parts) => {
                let own = domain_spans(&self.domain)?;
                let target = domain_spans(v)?;
                if !target.is_subset(own) {
                    return Err(Error::Invalid("restriction target is not inside the domain".into()));
                }
                let new_parts = target
                    .spans()
                    .iter()
                    .map(|s| {
                        let i = containing_span(own, s).expect("subset checked");
                        parts[i].restrict(&s.lo, &s.hi)
                    })
                    .collect();
                Ok(Section { domain: v.clone(), values: Values::Pieces(new_parts) })
            }
        }
    }

    fn common_domain(sections: &[&Section]) -> Result<OpenSet, Error> {
        let first = sections.first().ok_or_else(|| Error::Invalid("no operands".into()))?;
        let mut dom = first.domain.clone();
        for s in &sections[1..] {
            dom = match (dom.region(), s.domain.region()) {
                (Region::Points(a), Region::Points(b)) => points_open(a.intersection(b).copied().collect()),
                (Region::Spans(a), Region::Spans(b)) => spans_open(a.intersection(b)),
                _ => return Err(Error::Mismatch("sections live on different kinds of space".into())),
            };
        }
        Ok(dom)
    }

    /// `Σ lhs_k · rhs_k + offset`, required to stay piecewise-linear.
    pub fn sum_of_products(terms: &[(&Section, &Section)], offset: Option<&Section>) -> Result<Section, Error> {
        let mut all: Vec<&Section> = terms.iter().flat_map(|(a, b)| [*a, *b]).collect();
        all.extend(offset);
        let dom = Section::common_domain(&all)?;
        match dom.region() {
            Region::Points(pts) => {
                let values = pts
                    .iter()
                    .map(|x| {
                        let p = Point::Node(*x);
                        let mut v = offset.map(|o| o.eval(&p).expect("in domain")).unwrap_or_else(Rat::zero);
                        for (a, b) in terms {
                            v += a.eval(&p).expect("in domain") * b.eval(&p).expect("in domain");
                        }
                        (*x, v)
                    })
                    .collect();
                Ok(Section { domain: dom, values: Values::Nodes(values) })
            }
            Region::Spans(spans) => {
                let mut parts = Vec::new();
                for s in spans.spans() {
                    let fns: Vec<PlFn> = all.iter().map(|sec| sec.part_over(s)).collect();
                    let mut xs: Vec<Rat> = fns.iter().flat_map(|f| f.xs().cloned()).collect();
                    xs.sort();
                    xs.dedup();
                    let n_terms = terms.len();
                    for w in xs.windows(2) {
                        let mut quad = Rat::zero();
                        for k in 0..n_terms {
                            let sa = slope_on(&fns[2 * k], &w[0], &w[1]);
                            let sb = slope_on(&fns[2 * k + 1], &w[0], &w[1]);
                            quad += sa * sb;
                        }
                        if !quad.is_zero() {
                            return Err(Error::NonLinear(format!(
                                "product is quadratic on [{},{}]",
                                fmt_rat(&w[0]),
                                fmt_rat(&w[1])
                            )));
                        }
                    }
                    let knots = xs
                        .iter()
                        .map(|x| {
                            let mut v = offset.map(|_| fns[2 * n_terms].eval(x)).unwrap_or_else(Rat::zero);
                            for k in 0..n_terms {
                                v += fns[2 * k].eval(x) * fns[2 * k + 1].eval(x);
                            }
                            (x.clone(), v)
                        })
                        .collect();
                    parts.push(PlFn::normalized(knots));
                }
                Ok(Section { domain: dom, values: Values::Pieces(parts) })
            }
        }
    }

    /// The function of this section over a span contained in its domain.
    fn part_over(&self, s: &Span) -> PlFn {
        let own = self.domain.spans().expect("interval section");
        let i = containing_span(own, s).expect("span inside domain");
        match &self.values {
            Values::Pieces(parts) => parts[i].restrict(&s.lo, &s.hi),
            Values::Nodes(_) => unreachable!("interval section"),
        }
    }

    fn pointwise(&self, other: &Section, op: impl Fn(&Rat, &Rat) -> Rat) -> Result<Section, Error> {
        let dom = Section::common_domain(&[self, other])?;
        match dom.region() {
            Region::Points(pts) => {
                let values = pts
                    .iter()
                    .map(|x| {
                        let p = Point::Node(*x);
                        (*x, op(&self.eval(&p).expect("in domain"), &other.eval(&p).expect("in domain")))
                    })
                    .collect();
                Ok(Section { domain: dom, values: Values::Nodes(values) })
            }
            Region::Spans(spans) => {
                let parts = spans
                    .spans()
                    .iter()
                    .map(|s| {
                        let (f, g) = (self.part_over(s), other.part_over(s));
                        let mut xs: Vec<Rat> = f.xs().chain(g.xs()).cloned().collect();
                        xs.sort();
                        xs.dedup();
                        PlFn::normalized(xs.into_iter().map(|x| {
                            let v = op(&f.eval(&x), &g.eval(&x));
                            (x, v)
                        }).collect())
                    })
                    .collect();
                Ok(Section { domain: dom, values: Values::Pieces(parts) })
            }
        }
    }

    pub fn add(&self, other: &Section) -> Result<Section, Error> {
        self.pointwise(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Section) -> Result<Section, Error> {
        self.pointwise(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Section) -> Result<Section, Error> {
        Section::sum_of_products(&[(self, other)], None)
    }

    pub fn map_values(&self, op: impl Fn(&Rat) -> Rat) -> Section {
        let values = match &self.values {
            Values::Nodes(n) => Values::Nodes(n.iter().map(|(k, v)| (*k, op(v))).collect()),
            Values::Pieces(parts) => Values::Pieces(
                parts
                    .iter()
                    .map(|p| PlFn::normalized(p.knots.iter().map(|(x, y)| (x.clone(), op(y))).collect()))
                    .collect(),
            ),
        };
        Section { domain: self.domain.clone(), values }
    }

    pub fn scale(&self, c: &Rat) -> Section {
        self.map_values(|v| v * c)
    }

    pub fn add_const(&self, c: &Rat) -> Section {
        self.map_values(|v| v + c)
    }

    /// Quotient, required to be piecewise-linear and to avoid zero divisors
    /// inside the domain.
    pub fn div(&self, den: &Section) -> Result<Section, Error> {
        let dom = Section::common_domain(&[self, den])?;
        match dom.region() {
            Region::Points(pts) => {
                let mut values = BTreeMap::new();
                for x in pts {
                    let p = Point::Node(*x);
                    let d = den.eval(&p).expect("in domain");
                    if d.is_zero() {
                        return Err(Error::Invalid(format!("division by zero at point #{x}")));
                    }
                    values.insert(*x, self.eval(&p).expect("in domain") / d);
                }
                Ok(Section { domain: dom, values: Values::Nodes(values) })
            }
            Region::Spans(spans) => {
                let mut parts = Vec::new();
                for s in spans.spans() {
                    let (n, d) = (self.part_over(s), den.part_over(s));
                    let mut xs: Vec<Rat> = n.xs().chain(d.xs()).cloned().collect();
                    xs.sort();
                    xs.dedup();
                    for x in &xs {
                        if s.contains(x) && d.eval(x).is_zero() {
                            return Err(Error::Invalid(format!("division by zero at x = {}", fmt_rat(x))));
                        }
                    }
                    // Per cell: constant denominator, or numerator proportional to it.
                    let mut cell_vals: Vec<(Rat, Rat, Rat)> = Vec::new();
                    for w in xs.windows(2) {
                        let (d0, d1) = (d.eval(&w[0]), d.eval(&w[1]));
                        let (n0, n1) = (n.eval(&w[0]), n.eval(&w[1]));
                        let (q0, q1) = if d0 == d1 {
                            if d0.is_zero() {
                                return Err(Error::Invalid("denominator vanishes on a cell".into()));
                            }
                            (&n0 / &d0, &n1 / &d1)
                        } else if &n0 * &d1 == &n1 * &d0 {
                            let c = if d0.is_zero() { &n1 / &d1 } else { &n0 / &d0 };
                            (c.clone(), c)
                        } else {
                            return Err(Error::NonLinear(format!(
                                "quotient is not affine on [{},{}]",
                                fmt_rat(&w[0]),
                                fmt_rat(&w[1])
                            )));
                        };
                        cell_vals.push((w[0].clone(), q0, q1));
                    }
                    let mut knots: Vec<(Rat, Rat)> = Vec::new();
                    for (i, (x, q0, q1)) in cell_vals.iter().enumerate() {
                        if let Some(last) = knots.last() {
                            if &last.1 != q0 {
                                return Err(Error::NonLinear(format!(
                                    "quotient jumps at x = {}",
                                    fmt_rat(x)
                                )));
                            }
                        } else {
                            knots.push((x.clone(), q0.clone()));
                        }
                        knots.push((xs[i + 1].clone(), q1.clone()));
                    }
                    parts.push(PlFn::normalized(knots));
                }
                Ok(Section { domain: dom, values: Values::Pieces(parts) })
            }
        }
    }

    /// Pointwise `min(max(self, lo), hi)`, inserting crossing knots.
    pub fn clamp(&self, lo: &Rat, hi: &Rat) -> Section {
        let values = match &self.values {
            Values::Nodes(n) => {
                Values::Nodes(n.iter().map(|(k, v)| (*k, v.clone().max(lo.clone()).min(hi.clone()))).collect())
            }
            Values::Pieces(parts) => Values::Pieces(
                parts
                    .iter()
                    .map(|p| {
                        let mut xs: Vec<Rat> = p.xs().cloned().collect();
                        for w in p.knots.windows(2) {
                            for level in [lo, hi] {
                                if let Some(r) = crossing(&w[0], &w[1], level) {
                                    xs.push(r);
                                }
                            }
                        }
                        xs.sort();
                        xs.dedup();
                        PlFn::normalized(
                            xs.into_iter()
                                .map(|x| {
                                    let v = p.eval(&x).max(lo.clone()).min(hi.clone());
                                    (x, v)
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        };
        Section { domain: self.domain.clone(), values }
    }

    /// Pointwise regions of `on` where the value is negative, zero and
    /// positive (raw point sets, not interiors).
    pub fn sign_regions(&self, on: &OpenSet) -> Result<[Region; 3], Error> {
        match &self.values {
            Values::Nodes(n) => {
                let pts = domain_points(on)?;
                let mut out: [crate::topology::PointSet; 3] = Default::default();
                for x in pts {
                    let v = n.get(x).ok_or_else(|| Error::Invalid("comparison outside domain".into()))?;
                    let slot = if v.is_negative() { 0 } else if v.is_zero() { 1 } else { 2 };
                    out[slot].insert(*x);
                }
                Ok(out.map(Region::Points))
            }
            Values::Pieces(_) => {
                let target = domain_spans(on)?;
                if !target.is_subset(domain_spans(&self.domain)?) {
                    return Err(Error::Invalid("comparison region is not inside the domains".into()));
                }
                let mut neg = Vec::new();
                let mut zero = Vec::new();
                let mut pos = Vec::new();
                for s in target.spans() {
                    let f = self.part_over(s);
                    let mut n_s = Vec::new();
                    let mut z_s = Vec::new();
                    let mut p_s = Vec::new();
                    for w in f.knots.windows(2) {
                        sign_cell(&w[0], &w[1], &mut n_s, &mut z_s, &mut p_s);
                    }
                    let clip = IntervalSet::from_span(s.clone());
                    neg.push(IntervalSet::from_spans(n_s).intersection(&clip));
                    zero.push(IntervalSet::from_spans(z_s).intersection(&clip));
                    pos.push(IntervalSet::from_spans(p_s).intersection(&clip));
                }
                let join = |v: Vec<IntervalSet>| v.iter().fold(IntervalSet::empty(), |acc, s| acc.union(s));
                Ok([Region::Spans(join(neg)), Region::Spans(join(zero)), Region::Spans(join(pos))])
            }
        }
    }

    /// Points of `on` where the value is strictly negative (not interior).
    pub fn negative_region(&self, on: &OpenSet) -> Result<Region, Error> {
        let [neg, _, _] = self.sign_regions(on)?;
        Ok(neg)
    }

    /// Points of `on` where the value is non-zero.
    pub fn nonzero_region(&self, space: &Space, on: &OpenSet) -> Result<Region, Error> {
        let [neg, _, pos] = self.sign_regions(on)?;
        space.union_region(&neg, &pos)
    }

    pub fn show(&self, space: &Space) -> String {
        match &self.values {
            Values::Nodes(_) => {
                let comps = space.components(&self.domain).unwrap_or_default();
                if comps.is_empty() {
                    return "∅".into();
                }
                comps
                    .iter()
                    .map(|c| {
                        let x = c.points().and_then(|p| p.iter().next()).copied().expect("non-empty");
                        format!("{}:{}", space.show(c), fmt_rat(&self.eval(&Point::Node(x)).expect("in domain")))
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            Values::Pieces(parts) => {
                let spans = self.domain.spans().expect("interval");
                if parts.is_empty() {
                    return "∅".into();
                }
                spans
                    .spans()
                    .iter()
                    .zip(parts)
                    .map(|(s, p)| {
                        if p.is_constant() {
                            format!("{s}:{}", fmt_rat(&p.knots[0].1))
                        } else {
                            let ks: Vec<String> =
                                p.knots.iter().map(|(x, y)| format!("({},{})", fmt_rat(x), fmt_rat(y))).collect();
                            format!("{s}:{}", ks.join(""))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        }
    }
}

// Intersections of opens are open; these wrap the result without revalidation.
fn points_open(p: crate::topology::PointSet) -> OpenSet {
    crate::topology::open_unchecked(Region::Points(p))
}

fn spans_open(s: IntervalSet) -> OpenSet {
    crate::topology::open_unchecked(Region::Spans(s))
}

fn slope_on(f: &PlFn, a: &Rat, b: &Rat) -> Rat {
    (f.eval(b) - f.eval(a)) / (b - a)
}

/// Where the segment between two knots crosses `level` strictly inside.
fn crossing(a: &(Rat, Rat), b: &(Rat, Rat), level: &Rat) -> Option<Rat> {
    let (da, db) = (&a.1 - level, &b.1 - level);
    if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
        Some(&a.0 + (&b.0 - &a.0) * &da / (&da - &db))
    } else {
        None
    }
}

fn sign_cell(a: &(Rat, Rat), b: &(Rat, Rat), neg: &mut Vec<Span>, zero: &mut Vec<Span>, pos: &mut Vec<Span>) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let s0 = y0.signum();
    let s1 = y1.signum();
    let bucket = |s: &Rat| -> usize {
        if s.is_negative() {
            0
        } else if s.is_zero() {
            1
        } else {
            2
        }
    };
    let (b0, b1) = (bucket(&s0), bucket(&s1));
    let push = |k: usize, span: Span, neg: &mut Vec<Span>, zero: &mut Vec<Span>, pos: &mut Vec<Span>| match k {
        0 => neg.push(span),
        1 => zero.push(span),
        _ => pos.push(span),
    };
    if b0 == b1 {
        push(b0, Span::closed(x0.clone(), x1.clone()), neg, zero, pos);
        return;
    }
    if b0 == 1 {
        zero.push(Span::point(x0.clone()));
        push(b1, Span::new(x0.clone(), false, x1.clone(), true).expect("x0 < x1"), neg, zero, pos);
        return;
    }
    if b1 == 1 {
        push(b0, Span::new(x0.clone(), true, x1.clone(), false).expect("x0 < x1"), neg, zero, pos);
        zero.push(Span::point(x1.clone()));
        return;
    }
    let r = crossing(a, b, &Rat::zero()).expect("sign change");
    push(b0, Span::new(x0.clone(), true, r.clone(), false).expect("x0 < r"), neg, zero, pos);
    zero.push(Span::point(r.clone()));
    push(b1, Span::new(r, false, x1.clone(), true).expect("r < x1"), neg, zero, pos);
}

/// Truth values of `f < g`, `f > g` and `f = g` inside `on`.
pub fn compare(space: &Space, f: &Section, g: &Section, on: &OpenSet) -> Result<Comparison, Error> {
    let d = g.sub(f)?;
    let [neg, zero, pos] = d.sign_regions(on)?;
    Ok(Comparison {
        lt: space.interior(&pos)?,
        gt: space.interior(&neg)?,
        eq: space.interior(&zero)?,
    })
}

/// A point of `s` where two linear functions on the span's closure differ.
fn differing_point(s: &Span, f: &PlFn, g: &PlFn) -> Option<(Rat, Rat, Rat)> {
    let mut xs: Vec<Rat> = f.xs().chain(g.xs()).cloned().collect();
    xs.sort();
    xs.dedup();
    for (i, x) in xs.iter().enumerate() {
        if f.eval(x) == g.eval(x) {
            continue;
        }
        if s.contains(x) {
            return Some((x.clone(), f.eval(x), g.eval(x)));
        }
        let other = if i + 1 < xs.len() { &xs[i + 1] } else { &xs[i - 1] };
        let mut t = (x + other) * half();
        while f.eval(&t) == g.eval(&t) {
            t = (x + &t) * half();
        }
        return Some((t.clone(), f.eval(&t), g.eval(&t)));
    }
    None
}

/// Glues a compatible family; overlap disagreement is reported, not raised.
pub fn glue(space: &Space, family: &CompatibleFamily<Section>) -> Result<Glued<Section>, Error> {
    for (u, m) in family.cover.iter().zip(&family.members) {
        if m.domain() != u {
            return Err(Error::Invalid("family member domain differs from its cover element".into()));
        }
    }
    let union = family.union(space)?;
    if let Some(d) = first_disagreement(space, family)? {
        return Ok(Glued::Obstructed(d));
    }
    match union.region() {
        Region::Points(pts) => {
            let mut values = BTreeMap::new();
            for x in pts {
                let m = family
                    .members
                    .iter()
                    .find(|m| m.domain.contains(&Point::Node(*x)))
                    .expect("union of domains");
                values.insert(*x, m.eval(&Point::Node(*x)).expect("in domain"));
            }
            Ok(Glued::Glued(Section::from_nodes(space, &union, values)?))
        }
        Region::Spans(spans) => {
            let mut parts = Vec::new();
            for s in spans.spans() {
                let mut xs: Vec<Rat> = vec![s.lo.clone(), s.hi.clone()];
                let mut local: Vec<PlFn> = Vec::new();
                for m in &family.members {
                    let ms = m.domain.spans().expect("interval");
                    for (ps, pf) in ms.spans().iter().zip(m.parts().expect("interval")) {
                        if IntervalSet::from_span(ps.clone()).is_subset(&IntervalSet::from_span(s.clone())) {
                            xs.extend(pf.xs().cloned());
                            local.push(pf.clone());
                        }
                    }
                }
                xs.sort();
                xs.dedup();
                let knots = xs
                    .into_iter()
                    .map(|x| {
                        let f = local.iter().find(|f| f.lo() <= &x && &x <= f.hi()).expect("covered");
                        let v = f.eval(&x);
                        (x, v)
                    })
                    .collect();
                parts.push(PlFn::normalized(knots));
            }
            Ok(Glued::Glued(Section { domain: union, values: Values::Pieces(parts) }))
        }
    }
}

fn first_disagreement(space: &Space, family: &CompatibleFamily<Section>) -> Result<Option<Disagreement>, Error> {
    for i in 0..family.members.len() {
        for j in (i + 1)..family.members.len() {
            let overlap = space.meet(&family.cover[i], &family.cover[j])?;
            if overlap.is_empty() {
                continue;
            }
            let a = family.members[i].restrict(&overlap)?;
            let b = family.members[j].restrict(&overlap)?;
            if a == b {
                continue;
            }
            match overlap.region() {
                Region::Points(pts) => {
                    for x in pts {
                        let p = Point::Node(*x);
                        let (va, vb) = (a.eval(&p).expect("in"), b.eval(&p).expect("in"));
                        if va != vb {
                            return Ok(Some(Disagreement { point: p, members: (i, j), values: (va, vb) }));
                        }
                    }
                }
                Region::Spans(spans) => {
                    for (k, s) in spans.spans().iter().enumerate() {
                        let (fa, fb) = (&a.parts().expect("interval")[k], &b.parts().expect("interval")[k]);
                        if let Some((x, va, vb)) = differing_point(s, fa, fb) {
                            return Ok(Some(Disagreement { point: Point::Real(x), members: (i, j), values: (va, vb) }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

impl fmt::Display for PlFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, y) in &self.knots {
            write!(f, "({},{})", fmt_rat(x), fmt_rat(y))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn example2() -> Space {
        Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")]).unwrap()
    }

    fn interval(lo: i64, hi: i64) -> Space {
        Space::interval(int(lo), int(hi)).unwrap()
    }

    #[test]
    fn figure_one_surrogate() {
        let s = interval(-1, 1);
        let x = s.carrier();
        let f = Section::from_knots(&x, vec![(int(-1), int(0)), (int(0), int(0)), (int(1), int(1))]).unwrap();
        let g = Section::constant(&s, &x, ratio(1, 2)).unwrap();
        let c = compare(&s, &f, &g, &x).unwrap();
        assert_eq!(s.show(&c.lt), "[-1,1/2)");
        assert_eq!(s.show(&c.gt), "(1/2,1]");
        assert!(c.eq.is_empty());
        let same = compare(&s, &f, &f, &x).unwrap();
        assert_eq!(same.eq, x);
        assert!(same.lt.is_empty() && same.gt.is_empty());
    }

    #[test]
    fn componentwise_comparison() {
        let s = example2();
        let u = s.open_named(&["1", "2"]).unwrap();
        let f = Section::from_nodes(&s, &u, [(1, int(1)), (2, int(3))].into_iter().collect()).unwrap();
        let g = Section::constant(&s, &u, int(2)).unwrap();
        let c = compare(&s, &f, &g, &u).unwrap();
        assert_eq!(s.show(&c.lt), "{1}");
        assert_eq!(s.show(&c.gt), "{2}");
    }

    #[test]
    fn finite_sections_must_be_constant_on_components() {
        let s = example2();
        let x = s.carrier();
        let bad = Section::from_nodes(&s, &x, [(0, int(1)), (1, int(1)), (2, int(2))].into_iter().collect());
        assert!(bad.is_err());
    }

    #[test]
    fn restriction_examples() {
        let s = example2();
        let c = Section::constant(&s, &s.carrier(), int(3)).unwrap();
        let u = s.open_named(&["1", "2"]).unwrap();
        assert_eq!(c.restrict(&u).unwrap().show(&s), "{1}:3 {2}:3");
        assert_eq!(c.restrict(c.domain()).unwrap(), c);
        let i = interval(0, 2);
        let x = Section::from_knots(&i.carrier(), vec![(int(0), int(0)), (int(2), int(2))]).unwrap();
        let v = i.open_spans(vec![Span::new(int(1), false, int(2), true).unwrap()]).unwrap();
        assert_eq!(x.restrict(&v).unwrap().show(&i), "(1,2]:(1,1)(2,2)");
    }

    #[test]
    fn gluing_examples() {
        let s = example2();
        let one = s.open_named(&["1"]).unwrap();
        let two = s.open_named(&["2"]).unwrap();
        let fam = CompatibleFamily::new(
            vec![one.clone(), two.clone()],
            vec![Section::constant(&s, &one, int(3)).unwrap(), Section::constant(&s, &two, int(5)).unwrap()],
        )
        .unwrap();
        let g = glue(&s, &fam).unwrap().ok().unwrap();
        assert_eq!(g.show(&s), "{1}:3 {2}:5");

        let both = s.open_named(&["1", "2"]).unwrap();
        let fam = CompatibleFamily::new(
            vec![both.clone(), two.clone()],
            vec![Section::constant(&s, &both, int(3)).unwrap(), Section::constant(&s, &two, int(5)).unwrap()],
        )
        .unwrap();
        match glue(&s, &fam).unwrap() {
            Glued::Obstructed(d) => {
                assert_eq!(d.point, Point::Node(2));
                assert_eq!(d.values, (int(3), int(5)));
            }
            Glued::Glued(_) => panic!("expected obstruction"),
        }

        let i = interval(0, 2);
        let a = i.open_spans(vec![Span::new(int(0), true, int(1), false).unwrap()]).unwrap();
        let b = i.open_spans(vec![Span::new(ratio(1, 2), false, int(2), true).unwrap()]).unwrap();
        let id = |u: &OpenSet| Section::from_knots(u, vec![(int(0), int(0)), (int(2), int(2))]).unwrap();
        let fam = CompatibleFamily::new(vec![a.clone(), b.clone()], vec![id(&a), id(&b)]).unwrap();
        let g = glue(&i, &fam).unwrap().ok().unwrap();
        assert_eq!(g, id(&i.carrier()));
    }

    #[test]
    fn products_must_stay_linear() {
        let i = interval(0, 1);
        let x = Section::from_knots(&i.carrier(), vec![(int(0), int(0)), (int(1), int(1))]).unwrap();
        assert!(matches!(x.mul(&x), Err(Error::NonLinear(_))));
        let two = Section::constant(&i, &i.carrier(), int(2)).unwrap();
        assert_eq!(x.mul(&two).unwrap(), x.scale(&int(2)));
        // x·x - x·x cancels exactly.
        let neg = x.scale(&int(-1));
        let zero = Section::sum_of_products(&[(&x, &x), (&x, &neg)], None).unwrap();
        assert_eq!(zero.constant_value(), Some(int(0)));
    }

    #[test]
    fn quotients() {
        let i = interval(0, 1);
        let w = i.open_spans(vec![Span::new(int(0), true, int(1), false).unwrap()]).unwrap();
        let d = Section::from_knots(&w, vec![(int(0), int(1)), (int(1), int(0))]).unwrap();
        let n = d.scale(&ratio(1, 2));
        assert_eq!(n.div(&d).unwrap().constant_value(), Some(ratio(1, 2)));
        let x = Section::from_knots(&w, vec![(int(0), int(0)), (int(1), int(1))]).unwrap();
        assert!(x.div(&d).is_err());
    }

    #[test]
    fn clamp_inserts_crossings() {
        let i = interval(0, 2);
        let f = Section::from_knots(&i.carrier(), vec![(int(0), int(-1)), (int(2), int(3))]).unwrap();
        let c = f.clamp(&int(0), &int(1));
        assert_eq!(c.show(&i), "[0,2]:(0,0)(1/2,0)(1,1)(2,1)");
    }
}
