//! Finite unions of rational intervals with exact endpoint flags.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::{fmt_rat, half, Rat};

/// A non-empty interval; `lo == hi` only for a closed single point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: Rat,
    pub lo_closed: bool,
    pub hi: Rat,
    pub hi_closed: bool,
}

impl Span {
    pub fn new(lo: Rat, lo_closed: bool, hi: Rat, hi_closed: bool) -> Option<Span> {
        match lo.cmp(&hi) {
            Ordering::Less => Some(Span { lo, lo_closed, hi, hi_closed }),
            Ordering::Equal if lo_closed && hi_closed => Some(Span { lo, lo_closed, hi, hi_closed }),
            _ => None,
        }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Span {
        Span::new(lo, true, hi, true).expect("closed span needs lo <= hi")
    }

    pub fn open(lo: Rat, hi: Rat) -> Span {
        Span::new(lo, false, hi, false).expect("open span needs lo < hi")
    }

    pub fn point(x: Rat) -> Span {
        Span::closed(x.clone(), x)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    /// A point strictly inside the span (or the point itself).
    pub fn sample(&self) -> Rat {
        if self.is_point() {
            self.lo.clone()
        } else {
            (&self.lo + &self.hi) * half()
        }
    }

    fn intersect(&self, other: &Span) -> Option<Span> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Span::new(lo, lo_closed, hi, hi_closed)
    }

    /// True when `self` ends where `next` starts and the union has no gap.
    fn touches(&self, next: &Span) -> bool {
        match self.hi.cmp(&next.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || next.lo_closed,
            Ordering::Less => false,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", fmt_rat(&self.lo));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_rat(&self.lo),
            fmt_rat(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Sorted, pairwise disjoint, non-touching spans.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    spans: Vec<Span>,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet { spans: Vec::new() }
    }

    pub fn from_span(span: Span) -> IntervalSet {
        IntervalSet { spans: vec![span] }
    }

    /// Normalizes an arbitrary list of spans.
    pub fn from_spans(mut spans: Vec<Span>) -> IntervalSet {
        spans.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            if let Some(last) = out.last_mut() {
                if last.touches(&s) {
                    match last.hi.cmp(&s.hi) {
                        Ordering::Less => {
                            last.hi = s.hi;
                            last.hi_closed = s.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= s.hi_closed,
                        Ordering::Greater => {}
                    }
                    continue;
                }
            }
            out.push(s);
        }
        IntervalSet { spans: out }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.spans.iter().any(|s| s.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.spans.clone();
        all.extend(other.spans.iter().cloned());
        IntervalSet::from_spans(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.spans {
            for b in &other.spans {
                if let Some(s) = a.intersect(b) {
                    out.push(s);
                }
            }
        }
        IntervalSet::from_spans(out)
    }

    /// Complement relative to the closed carrier `[lo, hi]`.
    pub fn complement_in(&self, lo: &Rat, hi: &Rat) -> IntervalSet {
        let mut out = Vec::new();
        let mut cur = lo.clone();
        let mut cur_closed = true;
        for s in &self.spans {
            if let Some(gap) = Span::new(cur.clone(), cur_closed, s.lo.clone(), !s.lo_closed) {
                out.push(gap);
            }
            cur = s.hi.clone();
            cur_closed = !s.hi_closed;
        }
        if let Some(gap) = Span::new(cur, cur_closed, hi.clone(), true) {
            out.push(gap);
        }
        IntervalSet::from_spans(out)
    }

    pub fn difference(&self, other: &IntervalSet, lo: &Rat, hi: &Rat) -> IntervalSet {
        self.intersection(&other.complement_in(lo, hi))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.spans.iter().all(|s| {
            other.spans.iter().any(|o| {
                let lo_ok = match o.lo.cmp(&s.lo) {
                    Ordering::Less => true,
                    Ordering::Equal => o.lo_closed || !s.lo_closed,
                    Ordering::Greater => false,
                };
                let hi_ok = match o.hi.cmp(&s.hi) {
                    Ordering::Greater => true,
                    Ordering::Equal => o.hi_closed || !s.hi_closed,
                    Ordering::Less => false,
                };
                lo_ok && hi_ok
            })
        })
    }

    /// Interior relative to the carrier `[lo, hi]`: interior endpoints become
    /// open, isolated points vanish.
    pub fn interior_in(&self, lo: &Rat, hi: &Rat) -> IntervalSet {
        let spans = self
            .spans
            .iter()
            .filter_map(|s| {
                Span::new(
                    s.lo.clone(),
                    s.lo_closed && &s.lo == lo,
                    s.hi.clone(),
                    s.hi_closed && &s.hi == hi,
                )
                .filter(|t| !t.is_point())
            })
            .collect();
        IntervalSet { spans }
    }

    /// True when the set is open in the carrier `[lo, hi]`.
    pub fn is_open_in(&self, lo: &Rat, hi: &Rat) -> bool {
        self.spans.iter().all(|s| {
            !s.is_point()
                && s.lo >= *lo
                && s.hi <= *hi
                && (!s.lo_closed || &s.lo == lo)
                && (!s.hi_closed || &s.hi == hi)
        })
    }

    /// Some point of the set, preferring the left end of the first span.
    pub fn witness(&self) -> Option<Rat> {
        let s = self.spans.first()?;
        Some(if s.lo_closed { s.lo.clone() } else { s.sample() })
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return write!(f, "∅");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
