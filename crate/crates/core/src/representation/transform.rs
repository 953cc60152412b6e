//! Positive linear transforms between two weight vectors that represent the
//! same ranking, and the points where no continuous transform exists.

use num_traits::{One, Zero};

use crate::rational::Rat;
use crate::sections::{compare, glue, CompatibleFamily, Glued, PlFn, Section};
use crate::topology::{OpenSet, Point, Region, Space};
use crate::Error;

/// `target = a·source + b` with `a > 0` everywhere on the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Plt {
    pub a: Section,
    pub b: Section,
}

impl Plt {
    pub fn identity(space: &Space, domain: &OpenSet) -> Result<Plt, Error> {
        Ok(Plt { a: Section::constant(space, domain, Rat::one())?, b: Section::constant(space, domain, Rat::zero())? })
    }

    pub fn domain(&self) -> &OpenSet {
        self.a.domain()
    }

    pub fn apply(&self, weights: &[Section]) -> Result<Vec<Section>, Error> {
        weights.iter().map(|w| Section::sum_of_products(&[(&self.a, w)], Some(&self.b))).collect()
    }

    pub fn restrict(&self, v: &OpenSet) -> Result<Plt, Error> {
        Ok(Plt { a: self.a.restrict(v)?, b: self.b.restrict(v)? })
    }
}

/// One-sided limits `(a, b)` of the partial transform at an obstruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub left: Option<(Rat, Rat)>,
    pub right: Option<(Rat, Rat)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformObstruction {
    pub point: Point,
    /// The transform on the part of the open where it is determined.
    pub partial: Plt,
    pub limits: Limits,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Found(Plt),
    Obstructed(TransformObstruction),
}

impl Transform {
    pub fn plt(self) -> Option<Plt> {
        match self {
            Transform::Found(p) => Some(p),
            Transform::Obstructed(_) => None,
        }
    }
}

/// Finds `a > 0`, `b` with `target = a·source + b` on `w`.
///
/// Wherever two source weights differ, the pair fixes `a` and `b`; where all
/// source weights agree, `a = 1`. The pieces are glued, and each point left
/// over (a boundary of the indifferent region) is filled only when the
/// one-sided limits agree.
pub fn uniqueness_transform(
    space: &Space,
    source: &[Section],
    target: &[Section],
    w: &OpenSet,
) -> Result<Transform, Error> {
    if source.len() != target.len() || source.is_empty() {
        return Err(Error::Invalid("weight vectors differ in length or are empty".into()));
    }
    let src: Vec<Section> = source.iter().map(|s| s.restrict(w)).collect::<Result<_, _>>()?;
    let tgt: Vec<Section> = target.iter().map(|s| s.restrict(w)).collect::<Result<_, _>>()?;

    let mut cover = Vec::new();
    let mut a_parts = Vec::new();
    let mut b_parts = Vec::new();
    let mut ranked = Vec::new();
    for i in 0..src.len() {
        for j in 0..src.len() {
            let lt = compare(space, &src[i], &src[j], w)?.lt;
            if lt.is_empty() {
                continue;
            }
            let (si, sj, ti, tj) = (src[i].restrict(&lt)?, src[j].restrict(&lt)?, tgt[i].restrict(&lt)?, tgt[j].restrict(&lt)?);
            let a = tj.sub(&ti)?.div(&sj.sub(&si)?)?;
            let b = ti.sub(&a.mul(&si)?)?;
            ranked.push(lt.clone());
            cover.push(lt);
            a_parts.push(a);
            b_parts.push(b);
        }
    }
    let ranked = space.join_all(&ranked)?;
    let flat = space.interior(&space.difference(w, &ranked)?)?;
    if !flat.is_empty() {
        cover.push(flat.clone());
        a_parts.push(Section::constant(space, &flat, Rat::one())?);
        b_parts.push(tgt[0].restrict(&flat)?.sub(&src[0].restrict(&flat)?)?);
    }
    let a = glue_or_mismatch(space, cover.clone(), a_parts)?;
    let b = glue_or_mismatch(space, cover, b_parts)?;
    let mut plt = Plt { a, b };

    let covered = plt.domain().clone();
    if covered != *w {
        match fill_gaps(space, &plt, w)? {
            Ok(filled) => plt = filled,
            Err((point, limits)) => {
                return Ok(Transform::Obstructed(TransformObstruction { point, partial: plt, limits }));
            }
        }
    }

    let replay = plt.apply(&src)?;
    if replay != tgt {
        return Err(Error::Precondition("the two weight vectors do not represent the same ranking".into()));
    }
    let zero = Section::constant(space, w, Rat::zero())?;
    let positive = compare(space, &zero, &plt.a, w)?.lt;
    if positive != *w {
        return Err(Error::Precondition(format!(
            "the transform is positive only on {}, so the rankings differ",
            space.show(&positive)
        )));
    }
    Ok(Transform::Found(plt))
}

fn glue_or_mismatch(space: &Space, cover: Vec<OpenSet>, parts: Vec<Section>) -> Result<Section, Error> {
    match glue(space, &CompatibleFamily::new(cover, parts)?)? {
        Glued::Glued(s) => Ok(s),
        Glued::Obstructed(d) => Err(Error::Precondition(format!(
            "the weight vectors are not affinely related near {}",
            space.show_point(&d.point)
        ))),
    }
}

fn side_values(parts: &[(crate::topology::Span, &PlFn, &PlFn)], x: &Rat, left: bool) -> Option<(Rat, Rat)> {
    parts
        .iter()
        .find(|(s, _, _)| if left { &s.hi == x && &s.lo < x } else { &s.lo == x && &s.hi > x })
        .map(|(_, fa, fb)| (fa.eval(x), fb.eval(x)))
}

type Gap = (Point, Limits);

/// Extends `plt` over the isolated points of `w` it misses, or names the
/// first point where the one-sided limits disagree.
fn fill_gaps(space: &Space, plt: &Plt, w: &OpenSet) -> Result<Result<Plt, Gap>, Error> {
    let missing = space.difference(w, plt.domain())?;
    let Region::Spans(missing) = missing else {
        let point = space.region_witness(&missing).expect("non-empty");
        let limits = Limits { left: None, right: None };
        return Ok(Err((point, limits)));
    };
    let (Some(a_parts), Some(b_parts)) = (plt.a.parts(), plt.b.parts()) else {
        return Err(Error::Mismatch("expected interval sections".into()));
    };
    let spans = plt.domain().spans().expect("interval").spans();
    let parts: Vec<_> = spans.iter().cloned().zip(a_parts).zip(b_parts).map(|((s, a), b)| (s, a, b)).collect();
    for gap in missing.spans() {
        if !gap.is_point() {
            return Err(Error::Invalid(format!("the transform is undetermined on {gap}")));
        }
        let x = &gap.lo;
        let limits = Limits { left: side_values(&parts, x, true), right: side_values(&parts, x, false) };
        let agree = match (&limits.left, &limits.right) {
            (Some(l), Some(r)) => l == r,
            (None, None) => false,
            _ => true,
        };
        if !agree {
            return Ok(Err((Point::Real(x.clone()), limits)));
        }
    }
    let mut a_out = Vec::new();
    let mut b_out = Vec::new();
    for s in w.spans().expect("interval").spans() {
        let mut ak = Vec::new();
        let mut bk = Vec::new();
        for (ps, fa, fb) in &parts {
            if s.lo <= ps.lo && ps.hi <= s.hi {
                ak.extend(fa.knots().iter().cloned());
                bk.extend(fb.knots().iter().cloned());
            }
        }
        a_out.push(PlFn::new(merge_knots(ak))?);
        b_out.push(PlFn::new(merge_knots(bk))?);
    }
    Ok(Ok(Plt { a: Section::from_parts(w, a_out)?, b: Section::from_parts(w, b_out)? }))
}

fn merge_knots(mut knots: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    knots.sort();
    knots.dedup_by(|x, y| x.0 == y.0);
    knots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{half, int};
    use crate::topology::Span;

    fn line(space: &Space, pts: &[(i64, i64)]) -> Section {
        let x = space.carrier();
        Section::from_knots(&x, pts.iter().map(|(a, b)| (int(*a), int(*b))).collect()).unwrap()
    }

    #[test]
    fn identical_weights_give_the_identity() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let w = vec![line(&space, &[(0, 0), (1, 1)]), line(&space, &[(0, 2), (1, 2)])];
        let t = uniqueness_transform(&space, &w, &w, &space.carrier()).unwrap().plt().unwrap();
        assert_eq!(t.a.constant_value(), Some(int(1)));
        assert_eq!(t.b.constant_value(), Some(int(0)));
    }

    #[test]
    fn planted_transform_is_recovered() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let u = vec![line(&space, &[(0, 0), (1, 0)]), line(&space, &[(0, 1), (1, 1)])];
        let planted = Plt { a: Section::constant(&space, &x, int(3)).unwrap(), b: line(&space, &[(0, 0), (1, 1)]) };
        let v = planted.apply(&u).unwrap();
        let t = uniqueness_transform(&space, &u, &v, &x).unwrap().plt().unwrap();
        assert_eq!(t, planted);
    }

    #[test]
    fn kinked_surrogate_is_obstructed_at_the_crossing() {
        let space = Space::interval(int(0), int(2)).unwrap();
        let x = space.carrier();
        let w = vec![line(&space, &[(0, 0), (2, 2)]), Section::constant(&space, &x, int(1)).unwrap()];
        let v = vec![Section::constant(&space, &x, int(0)).unwrap(), line(&space, &[(0, 2), (1, 0), (2, -1)])];
        let Transform::Obstructed(o) = uniqueness_transform(&space, &v, &w, &x).unwrap() else {
            panic!("expected an obstruction")
        };
        assert_eq!(o.point, Point::Real(int(1)));
        assert_eq!(o.limits.left, Some((half(), int(1))));
        assert_eq!(o.limits.right, Some((int(1), int(1))));
        let left = space.open_spans(vec![Span::new(int(0), true, int(1), false).unwrap()]).unwrap();
        assert_eq!(o.partial.a.restrict(&left).unwrap().constant_value(), Some(half()));
    }

    #[test]
    fn a_removable_gap_is_filled() {
        let space = Space::interval(int(0), int(2)).unwrap();
        let x = space.carrier();
        let u = vec![Section::constant(&space, &x, int(0)).unwrap(), line(&space, &[(0, 1), (1, 0), (2, -1)])];
        let v = Plt { a: Section::constant(&space, &x, int(2)).unwrap(), b: Section::constant(&space, &x, int(5)).unwrap() }
            .apply(&u)
            .unwrap();
        let t = uniqueness_transform(&space, &u, &v, &x).unwrap().plt().unwrap();
        assert_eq!(t.a.constant_value(), Some(int(2)));
        assert_eq!(t.b.constant_value(), Some(int(5)));
    }

    #[test]
    fn reversed_rankings_are_rejected() {
        let space = Space::poset(&["a"], &[]).unwrap();
        let x = space.carrier();
        let u = vec![Section::constant(&space, &x, int(0)).unwrap(), Section::constant(&space, &x, int(1)).unwrap()];
        let v = vec![u[1].clone(), u[0].clone()];
        assert!(matches!(uniqueness_transform(&space, &u, &v, &x), Err(Error::Precondition(_))));
    }
}
