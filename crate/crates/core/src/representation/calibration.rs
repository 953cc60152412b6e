//! Solving `q ∼ a·p + (1-a)·r` for a weight section `a` by Dedekind cuts.
//!
//! At each probe (a component of a finite open, or a knot of an interval
//! open) the lower class holds the rationals `m` with `m·p+(1-m)·r ≺ q` and
//! the upper class those with `q ≺ m·p+(1-m)·r`. Bisection narrows the cut;
//! a rational that lands in neither class is the cut itself. The probes are
//! then interpolated and the interpolants are re-checked on the whole open.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lottery::{mix, mix_const, Lottery};
use crate::preference::{restrict_to, truth_value, Ranking, Relation};
use crate::rational::{fmt_rat, half, simplest_between, Rat};
use crate::sections::{compare, PlFn, Section};
use crate::topology::{OpenSet, Point, Region, Space, Span};
use crate::Error;

/// The cut at one probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutCell {
    /// Where the probe sits: a component, a point, or a one-sided limit.
    pub at: String,
    /// Largest tested member of the lower class (or the cut when exact).
    pub lower: Rat,
    /// Smallest tested member of the upper class (or the cut when exact).
    pub upper: Rat,
    pub exact: Option<Rat>,
}

/// Bounds on the cut over the whole open.
#[derive(Clone, Debug, PartialEq)]
pub struct DedekindState {
    pub cells: Vec<CutCell>,
    /// Forces `lower·p+(1-lower)·r ≺ q` wherever `lower ≥ 0`.
    pub lower: Section,
    /// Forces `q ≺ upper·p+(1-upper)·r` wherever `upper ≤ 1`.
    pub upper: Section,
    /// Largest value of `upper - lower`.
    pub gap: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub weight: Section,
    /// Whether `weight` itself was verified to make `q ∼ mix` on the open.
    pub exact: bool,
    /// `(EU(q)-EU(r))/(EU(p)-EU(r))` for expected-utility rankings, when that
    /// quotient is piecewise-linear.
    pub closed_form: Option<Section>,
    pub state: DedekindState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Below,
    Above,
    Equal,
}

#[derive(Clone, Debug)]
enum Probe {
    Component(OpenSet),
    Inside(Rat, OpenSet),
    FromLeft(Rat, OpenSet),
    FromRight(Rat, OpenSet),
}

impl Probe {
    fn neighbourhood(&self) -> &OpenSet {
        match self {
            Probe::Component(u) | Probe::Inside(_, u) | Probe::FromLeft(_, u) | Probe::FromRight(_, u) => u,
        }
    }

    fn label(&self, space: &Space) -> String {
        match self {
            Probe::Component(u) => space.show(u),
            Probe::Inside(x, _) => fmt_rat(x),
            Probe::FromLeft(x, _) => format!("{}-", fmt_rat(x)),
            Probe::FromRight(x, _) => format!("{}+", fmt_rat(x)),
        }
    }

    /// Whether the open truth value `t` holds at the probe.
    fn holds(&self, space: &Space, t: &OpenSet) -> Result<bool, Error> {
        Ok(match self {
            Probe::Component(u) => !t.is_empty() && space.is_subset(u, t)?,
            Probe::Inside(x, _) => t.contains(&Point::Real(x.clone())),
            Probe::FromLeft(x, _) => t.spans().is_some_and(|s| s.spans().iter().any(|sp| &sp.hi == x && &sp.lo < x)),
            Probe::FromRight(x, _) => t.spans().is_some_and(|s| s.spans().iter().any(|sp| &sp.lo == x && &sp.hi > x)),
        })
    }

    /// Whether `t` misses the probe entirely.
    fn misses(&self, space: &Space, t: &OpenSet) -> Result<bool, Error> {
        Ok(match self {
            Probe::Component(u) => space.meet(u, t)?.is_empty(),
            _ => !self.holds(space, t)?,
        })
    }
}

struct Problem<'a> {
    pref: &'a dyn Ranking,
    p: &'a Lottery,
    q: &'a Lottery,
    r: &'a Lottery,
}

impl Problem<'_> {
    fn classify(&self, m: &Rat, probe: &Probe) -> Result<Side, Error> {
        let space = self.pref.space();
        let n = probe.neighbourhood();
        let (p, q, r) = (self.p.restrict(n)?, self.q.restrict(n)?, self.r.restrict(n)?);
        let mixed = mix_const(space, m, &p, &r, n)?;
        let below = self.pref.strict(&mixed, &q, n)?;
        let above = self.pref.strict(&q, &mixed, n)?;
        let (is_below, is_above) = (probe.holds(space, &below)?, probe.holds(space, &above)?);
        match (is_below, is_above) {
            (true, false) => Ok(Side::Below),
            (false, true) => Ok(Side::Above),
            (false, false) if probe.misses(space, &below)? && probe.misses(space, &above)? => Ok(Side::Equal),
            _ => Err(Error::Invalid(format!(
                "the cut at mixing weight {} is not uniform on {}",
                fmt_rat(m),
                probe.label(space)
            ))),
        }
    }

    fn bisect(&self, probe: &Probe, resolution: &Rat) -> Result<CutCell, Error> {
        let at = probe.label(self.pref.space());
        let exact = |v: Rat| CutCell { at: at.clone(), lower: v.clone(), upper: v.clone(), exact: Some(v) };
        let (zero, one) = (Rat::zero(), Rat::one());
        match self.classify(&zero, probe)? {
            Side::Equal => return Ok(exact(zero)),
            Side::Above => return Err(Error::Precondition(format!("q ≺ r at {at}"))),
            Side::Below => {}
        }
        match self.classify(&one, probe)? {
            Side::Equal => return Ok(exact(one)),
            Side::Below => return Err(Error::Precondition(format!("p ≺ q at {at}"))),
            Side::Above => {}
        }
        let (mut lo, mut hi) = (zero, one);
        let target = resolution * half();
        while &hi - &lo > target {
            let m = (&lo + &hi) * half();
            match self.classify(&m, probe)? {
                Side::Below => lo = m,
                Side::Above => hi = m,
                Side::Equal => return Ok(exact(m)),
            }
        }
        let s = simplest_between(&lo, &hi);
        match self.classify(&s, probe)? {
            Side::Equal => Ok(exact(s)),
            Side::Below => Ok(CutCell { at, lower: s, upper: hi, exact: None }),
            Side::Above => Ok(CutCell { at, lower: lo, upper: s, exact: None }),
        }
    }
}

/// Checks that `mix(b,q,p)` is strictly better than `mix(a,q,p)` wherever
/// `a < b`, given `p ≺ q`.
pub fn check_monotonicity(
    pref: &dyn Ranking,
    p: &Lottery,
    q: &Lottery,
    a: &Section,
    b: &Section,
    w: &OpenSet,
) -> Result<Option<Point>, Error> {
    let space = pref.space();
    let (ar, br) = (a.restrict(w)?, b.restrict(w)?);
    let order = compare(space, &ar, &br, w)?;
    if !space.is_subset(w, &order.lt)? {
        return Err(Error::Precondition(format!(
            "a < b holds only on {}, not on {}",
            space.show(&order.lt),
            space.show(w)
        )));
    }
    let pq = truth_value(pref, Relation::Prec, p, q, w)?;
    if !space.is_subset(w, &pq)? {
        return Err(Error::Precondition(format!("⟦p ≺ q⟧ = {} does not contain {}", space.show(&pq), space.show(w))));
    }
    let (pw, qw) = (restrict_to(space, p, w)?, restrict_to(space, q, w)?);
    let lower = mix(space, &ar, &qw, &pw)?;
    let higher = mix(space, &br, &qw, &pw)?;
    let t = pref.strict(&lower, &higher, w)?;
    Ok(space.region_witness(&space.difference(w, &t)?))
}

fn require(space: &Space, what: &str, t: &OpenSet, w: &OpenSet) -> Result<(), Error> {
    if space.is_subset(w, t)? {
        Ok(())
    } else {
        Err(Error::Precondition(format!("⟦{what}⟧ = {} does not contain {}", space.show(t), space.show(w))))
    }
}

const REFINEMENT_ROUNDS: usize = 12;
const MAX_KNOTS: usize = 4096;

/// Finds `a` with `q ∼ a·p + (1-a)·r` on `w`, given `r ≾ q ≾ p` and `r ≺ p`
/// there.
pub fn solve_calibration(
    pref: &dyn Ranking,
    p: &Lottery,
    q: &Lottery,
    r: &Lottery,
    w: &OpenSet,
    resolution: &Rat,
) -> Result<Calibration, Error> {
    let space = pref.space();
    if w.is_empty() {
        return Err(Error::Precondition("calibration needs a non-empty open".into()));
    }
    let (p, q, r) = (restrict_to(space, p, w)?, restrict_to(space, q, w)?, restrict_to(space, r, w)?);
    require(space, "r ≾ q", &truth_value(pref, Relation::Precsim, &r, &q, w)?, w)?;
    require(space, "q ≾ p", &truth_value(pref, Relation::Precsim, &q, &p, w)?, w)?;
    let rp = truth_value(pref, Relation::Prec, &r, &p, w)?;
    if !space.is_subset(w, &rp)? {
        return Err(Error::Precondition(format!(
            "degenerate calibration: ⟦r ≺ p⟧ = {} does not contain {}",
            space.show(&rp),
            space.show(w)
        )));
    }
    let problem = Problem { pref, p: &p, q: &q, r: &r };
    let margin = resolution * half() * half();
    let closed_form = match pref.utility_weights() {
        Some(weights) => {
            let (ep, eq, er) = (p.expectation(weights)?, q.expectation(weights)?, r.expectation(weights)?);
            match eq.sub(&er)?.div(&ep.sub(&er)?) {
                Ok(a) => Some(a),
                Err(Error::NonLinear(_)) => None,
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let (cells, lower, upper, midpoint, all_exact) = match space {
        Space::Poset(_) => solve_components(&problem, w, resolution, &margin)?,
        Space::Interval { .. } => solve_knots(&problem, w, resolution, &margin).map_err(|e| match e {
            Error::NonLinear(m) => Error::NonLinear(format!(
                "the mixing weight on {} cannot be certified with piecewise-linear bounds ({m})",
                space.show(w)
            )),
            e => e,
        })?,
    };
    let gap = upper.sub(&lower)?.max_value().expect("non-empty");
    let state = DedekindState { cells, lower, upper, gap };

    if let Some(cf) = &closed_form {
        let below = compare(space, cf, &state.lower, w)?.lt;
        let above = compare(space, &state.upper, cf, w)?.lt;
        if !below.is_empty() || !above.is_empty() {
            return Err(Error::Invalid("bisection bounds do not sandwich the closed form".into()));
        }
        return Ok(Calibration { weight: cf.clone(), exact: true, closed_form, state });
    }
    let exact = all_exact && indifferent_everywhere(pref, &p, &q, &r, &midpoint, w)?;
    Ok(Calibration { weight: midpoint, exact, closed_form, state })
}

/// Whether `q ∼ a·p + (1-a)·r` on all of `w`.
pub fn indifferent_everywhere(
    pref: &dyn Ranking,
    p: &Lottery,
    q: &Lottery,
    r: &Lottery,
    a: &Section,
    w: &OpenSet,
) -> Result<bool, Error> {
    let space = pref.space();
    let (p, q, r) = (restrict_to(space, p, w)?, restrict_to(space, q, w)?, restrict_to(space, r, w)?);
    let m = match mix(space, &a.restrict(w)?, &p, &r) {
        Ok(m) => m,
        Err(Error::NonLinear(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    match truth_value(pref, Relation::Sim, &q, &m, w) {
        Ok(t) => Ok(t == *w),
        Err(Error::NonLinear(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

type Solved = (Vec<CutCell>, Section, Section, Section, bool);

fn solve_components(problem: &Problem, w: &OpenSet, resolution: &Rat, margin: &Rat) -> Result<Solved, Error> {
    let space = problem.pref.space();
    let mut cells = Vec::new();
    let (mut lo, mut hi, mut mid) = (Vec::new(), Vec::new(), Vec::new());
    let mut all_exact = true;
    for comp in space.components(w)? {
        let cell = problem.bisect(&Probe::Component(comp.clone()), resolution)?;
        all_exact &= cell.exact.is_some();
        let centre = cell.exact.clone().unwrap_or_else(|| (&cell.lower + &cell.upper) * half());
        lo.push((comp.clone(), &cell.lower - margin));
        hi.push((comp.clone(), &cell.upper + margin));
        mid.push((comp, centre));
        cells.push(cell);
    }
    let lower = Section::from_components(space, w, &lo)?;
    let upper = Section::from_components(space, w, &hi)?;
    let midpoint = Section::from_components(space, w, &mid)?;
    certify(problem, w, &lower, &upper)?
        .map_or(Ok(()), |x| Err(Error::Invalid(format!("calibration bounds fail at {}", space.show_point(&x)))))?;
    Ok((cells, lower, upper, midpoint, all_exact))
}

fn span_probe(space: &Space, s: &Span, xs: &[Rat], k: usize) -> Result<Probe, Error> {
    let x = xs[k].clone();
    let (lo, lo_closed) = if k == 0 { (s.lo.clone(), s.lo_closed) } else { (xs[k - 1].clone(), false) };
    let last = xs.len() - 1;
    let (hi, hi_closed) = if k == last { (s.hi.clone(), s.hi_closed) } else { (xs[k + 1].clone(), false) };
    let n = space.open_spans(vec![Span::new(lo, lo_closed, hi, hi_closed).expect("knots increase")])?;
    Ok(if s.contains(&x) {
        Probe::Inside(x, n)
    } else if k == 0 {
        Probe::FromRight(x, n)
    } else {
        Probe::FromLeft(x, n)
    })
}

fn solve_knots(problem: &Problem, w: &OpenSet, resolution: &Rat, margin: &Rat) -> Result<Solved, Error> {
    let space = problem.pref.space();
    let spans: Vec<Span> = w.spans().expect("interval").spans().to_vec();
    let mut breaks: Vec<Rat> = problem.pref.breakpoints();
    for l in [problem.p, problem.q, problem.r] {
        for c in l.coords().values() {
            breaks.extend(c.breakpoints());
        }
    }
    let mut knots: Vec<Vec<Rat>> = spans
        .iter()
        .map(|s| {
            let mut xs: Vec<Rat> = breaks.iter().filter(|x| *x > &s.lo && *x < &s.hi).cloned().collect();
            xs.push(s.lo.clone());
            xs.push(s.hi.clone());
            xs.sort();
            xs.dedup();
            xs
        })
        .collect();
    let mut cache: Vec<BTreeMap<Rat, CutCell>> = vec![BTreeMap::new(); spans.len()];
    for _round in 0..=REFINEMENT_ROUNDS {
        for (si, s) in spans.iter().enumerate() {
            let xs = &knots[si];
            for k in 0..xs.len() {
                if !cache[si].contains_key(&xs[k]) {
                    let cell = problem.bisect(&span_probe(space, s, xs, k)?, resolution)?;
                    cache[si].insert(xs[k].clone(), cell);
                }
            }
        }
        let build = |f: &dyn Fn(&CutCell) -> Rat| -> Result<Section, Error> {
            let parts = knots
                .iter()
                .enumerate()
                .map(|(si, xs)| PlFn::new(xs.iter().map(|x| (x.clone(), f(&cache[si][x]))).collect()))
                .collect::<Result<Vec<_>, _>>()?;
            Section::from_parts(w, parts)
        };
        let lower = build(&|c| &c.lower - margin)?;
        let upper = build(&|c| &c.upper + margin)?;
        let failure = certify_region(problem, w, &lower, &upper)?;
        let Some(bad) = failure else {
            let midpoint = build(&|c| c.exact.clone().unwrap_or_else(|| (&c.lower + &c.upper) * half()))?;
            let all_exact = cache.iter().all(|m| m.values().all(|c| c.exact.is_some()));
            let cells = cache.into_iter().flat_map(|m| m.into_values()).collect();
            return Ok((cells, lower, upper, midpoint, all_exact));
        };
        let Region::Spans(bad) = bad else { unreachable!("interval region") };
        let mut grew = false;
        for xs in knots.iter_mut() {
            let mut extra = Vec::new();
            for win in xs.windows(2) {
                let cell = Span::closed(win[0].clone(), win[1].clone());
                if bad.spans().iter().any(|b| b.lo <= cell.hi && cell.lo <= b.hi) {
                    extra.push((&win[0] + &win[1]) * half());
                }
            }
            grew |= !extra.is_empty();
            xs.extend(extra);
            xs.sort();
            xs.dedup();
            if xs.len() > MAX_KNOTS {
                return Err(Error::Unsupported("calibration certificate needs too many knots".into()));
            }
        }
        if !grew {
            break;
        }
    }
    Err(Error::Unsupported(format!(
        "calibration certificate not reached after {REFINEMENT_ROUNDS} refinements"
    )))
}

/// A point of `w` where the bounds fail to certify the cut, if any.
fn certify(problem: &Problem, w: &OpenSet, lower: &Section, upper: &Section) -> Result<Option<Point>, Error> {
    let space = problem.pref.space();
    Ok(certify_region(problem, w, lower, upper)?.and_then(|r| space.region_witness(&r)))
}

fn certify_region(problem: &Problem, w: &OpenSet, lower: &Section, upper: &Section) -> Result<Option<Region>, Error> {
    let space = problem.pref.space();
    let (zero, one) = (Rat::zero(), Rat::one());
    let zeros = Section::constant(space, w, zero.clone())?;
    let ones = Section::constant(space, w, one.clone())?;

    let low_mix = mix(space, &lower.clamp(&zero, &one), problem.p, problem.r)?;
    let below = space.join(
        &problem.pref.strict(&low_mix, problem.q, w)?,
        &compare(space, lower, &zeros, w)?.lt,
    )?;
    let high_mix = mix(space, &upper.clamp(&zero, &one), problem.p, problem.r)?;
    let above = space.join(
        &problem.pref.strict(problem.q, &high_mix, w)?,
        &compare(space, &ones, upper, w)?.lt,
    )?;
    let both = space.meet(&below, &above)?;
    let missing = space.difference(w, &both)?;
    Ok(space.region_witness(&missing).map(|_| missing))
}
