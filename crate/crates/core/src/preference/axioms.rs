//! Falsifiers for the ordering, independence, continuity and comparability
//! conditions. Every check quantifies over a declared finite family, so a
//! pass means "no counterexample among the tested instances".

use crate::lottery::{glue_lotteries, mix, mix_const, Lottery};
use crate::rational::{dyadic, fmt_rat, half, Rat};
use crate::sections::{CompatibleFamily, Glued, Section};
use crate::topology::{OpenSet, Point, Region, Space, Span};
use crate::Error;

use super::{restrict_to, Ranking};

/// Default search resolution for rational mixing constants.
pub fn default_resolution() -> Rat {
    dyadic(20)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    PassOnTested { tested: usize, skipped: usize },
    Counterexample(Violation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub condition: &'static str,
    pub verdict: Verdict,
}

/// Rational mixing constants found for one ordered triple.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityWitness {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// `(piece, a, b)` with `q ≺ a·p+(1-a)·r` and `b·p+(1-b)·r ≺ q` on the piece.
    pub pieces: Vec<(OpenSet, Rat, Rat)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub continuity: Vec<ContinuityWitness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| matches!(c.verdict, Verdict::PassOnTested { .. }))
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.checks.iter().filter_map(|c| match &c.verdict {
            Verdict::Counterexample(v) => Some(v),
            Verdict::PassOnTested { .. } => None,
        })
    }
}

/// A concrete failure, with enough data to be re-checked.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `⟦p≺q⟧ ∩ ⟦q≺p⟧` is inhabited (or `⟦p≺p⟧` when `p = q`).
    Asymmetry { p: usize, q: usize, within: OpenSet, overlap: OpenSet },
    /// A point of `⟦p≺q⟧` outside `⟦r≺q⟧ ∪ ⟦p≺r⟧`.
    NegativeTransitivity { p: usize, q: usize, r: usize, within: OpenSet, point: Point },
    /// Restricting to `restricted_to` changed the truth value.
    Monotonicity { p: usize, q: usize, within: OpenSet, restricted_to: OpenSet, expected: OpenSet, found: OpenSet },
    /// Every cover element forces `p ≺ q`, the union does not.
    LocalCharacter { p: usize, q: usize, cover: Vec<OpenSet>, union: OpenSet },
    /// `p ≺ q` at `point` but not after mixing both with `r`.
    Independence { p: usize, q: usize, r: usize, mixer: Section, point: Point },
    /// No tested constant works at `point`; `upper` says which of the two
    /// displayed conditions failed (`q ≺ mix` when false).
    Continuity { p: usize, q: usize, r: usize, within: OpenSet, point: Point, upper: bool, resolution: Rat },
}

fn name(family: &[(String, Lottery)], i: usize) -> &str {
    &family[i].0
}

impl Violation {
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::Asymmetry { .. } => "asymmetry",
            Violation::NegativeTransitivity { .. } => "negative transitivity",
            Violation::Monotonicity { .. } => "monotonicity",
            Violation::LocalCharacter { .. } => "local character",
            Violation::Independence { .. } => "independence",
            Violation::Continuity { .. } => "continuity",
        }
    }

    pub fn describe(&self, space: &Space, family: &[(String, Lottery)]) -> String {
        let n = |i: &usize| name(family, *i).to_string();
        match self {
            Violation::Asymmetry { p, q, overlap, .. } => format!(
                "{} ≺ {} and {} ≺ {} both hold on {}",
                n(p),
                n(q),
                n(q),
                n(p),
                space.show(overlap)
            ),
            Violation::NegativeTransitivity { p, q, r, point, .. } => format!(
                "{} ≺ {} at {} but neither {} ≺ {} nor {} ≺ {} holds near it",
                n(p),
                n(q),
                space.show_point(point),
                n(r),
                n(q),
                n(p),
                n(r)
            ),
            Violation::Monotonicity { p, q, restricted_to, expected, found, .. } => format!(
                "restricting {} ≺ {} to {} gives {}, expected {}",
                n(p),
                n(q),
                space.show(restricted_to),
                space.show(found),
                space.show(expected)
            ),
            Violation::LocalCharacter { p, q, cover, union } => {
                let pieces: Vec<String> = cover.iter().map(|c| space.show(c)).collect();
                format!(
                    "{} ≺ {} is forced on each of {} but not on their union {}",
                    n(p),
                    n(q),
                    pieces.join(", "),
                    space.show(union)
                )
            }
            Violation::Independence { p, q, r, mixer, point } => format!(
                "{} ≺ {} at {} is lost after mixing with {} at weight {}",
                n(p),
                n(q),
                space.show_point(point),
                n(r),
                mixer.show(space)
            ),
            Violation::Continuity { p, q, r, point, upper, resolution, .. } => format!(
                "no rational constant at resolution {} gives {} at {}",
                fmt_rat(resolution),
                if *upper {
                    format!("b·{}+(1-b)·{} ≺ {}", n(p), n(r), n(q))
                } else {
                    format!("{} ≺ a·{}+(1-a)·{}", n(q), n(p), n(r))
                },
                space.show_point(point)
            ),
        }
    }

    /// Recomputes the failure from scratch; true when it still holds.
    pub fn replay(&self, pref: &dyn Ranking, family: &[(String, Lottery)]) -> Result<bool, Error> {
        let space = pref.space();
        let lot = |i: &usize| &family[*i].1;
        match self {
            Violation::Asymmetry { p, q, within, .. } => {
                let a = strict_on(pref, lot(p), lot(q), within)?;
                let b = strict_on(pref, lot(q), lot(p), within)?;
                Ok(!space.meet(&a, &b)?.is_empty())
            }
            Violation::NegativeTransitivity { p, q, r, within, point } => {
                let base = strict_on(pref, lot(p), lot(q), within)?;
                let cover = space.join(
                    &strict_on(pref, lot(r), lot(q), within)?,
                    &strict_on(pref, lot(p), lot(r), within)?,
                )?;
                Ok(base.contains(point) && !cover.contains(point))
            }
            Violation::Monotonicity { p, q, within, restricted_to, .. } => {
                let whole = strict_on(pref, lot(p), lot(q), within)?;
                let part = strict_on(pref, lot(p), lot(q), restricted_to)?;
                Ok(space.meet(&whole, restricted_to)? != part)
            }
            Violation::LocalCharacter { p, q, cover, union } => {
                for c in cover {
                    let (pc, qc) = (restrict_to(space, lot(p), c)?, restrict_to(space, lot(q), c)?);
                    if !pref.forces_strict(&pc, &qc, c)? {
                        return Ok(false);
                    }
                }
                let (pu, qu) = (restrict_to(space, lot(p), union)?, restrict_to(space, lot(q), union)?);
                Ok(!pref.forces_strict(&pu, &qu, union)?)
            }
            Violation::Independence { p, q, r, mixer, point } => {
                let w = mixer.domain();
                let base = strict_on(pref, lot(p), lot(q), w)?;
                let (mp, mq) = mixed_pair(space, mixer, lot(p), lot(q), lot(r))?;
                let after = pref.strict(&mp, &mq, w)?;
                Ok(base.contains(point) && !after.contains(point))
            }
            Violation::Continuity { p, q, r, within, point, upper, resolution } => {
                let (lp, lq, lr) = (lot(p), lot(q), lot(r));
                let covered = continuity_cover(pref, lp, lq, lr, within, resolution, *upper)?;
                Ok(!covered.iter().any(|(u, _)| u.contains(point)))
            }
        }
    }
}

/// `⟦p≺q⟧` on `w`, restricting both lotteries first.
pub(crate) fn strict_on(pref: &dyn Ranking, p: &Lottery, q: &Lottery, w: &OpenSet) -> Result<OpenSet, Error> {
    let space = pref.space();
    pref.strict(&restrict_to(space, p, w)?, &restrict_to(space, q, w)?, w)
}

/// `within` intersected with every domain.
pub(crate) fn shared(space: &Space, within: &OpenSet, lots: &[&Lottery]) -> Result<OpenSet, Error> {
    let mut acc = within.clone();
    for l in lots {
        acc = space.meet(&acc, l.domain())?;
    }
    Ok(acc)
}

fn region_empty(r: &Region) -> bool {
    match r {
        Region::Points(p) => p.is_empty(),
        Region::Spans(s) => s.is_empty(),
    }
}

/// Sub-opens used to probe monotonicity: every open of a small finite
/// space, minimal opens of a large one, and overlapping thirds and the
/// middle half of each interval component.
pub fn sample_subopens(space: &Space, w: &OpenSet) -> Result<Vec<OpenSet>, Error> {
    let mut out = Vec::new();
    match space {
        Space::Poset(poset) => {
            if poset.len() <= 10 {
                for u in space.opens()? {
                    if !u.is_empty() && space.is_subset(&u, w)? {
                        out.push(u);
                    }
                }
            } else {
                for x in space.point_list(w) {
                    out.push(space.minimal_open(&x)?);
                }
            }
        }
        Space::Interval { .. } => {
            for c in space.components(w)? {
                out.push(c.clone());
                out.extend(split_component(space, &c)?);
                let s = &c.spans().expect("interval").spans()[0];
                let len = &s.hi - &s.lo;
                let quarter = &len * half() * half();
                let mid = Span::open(&s.lo + &quarter, &s.hi - &quarter);
                out.push(space.open_spans(vec![mid])?);
            }
        }
    }
    out.dedup();
    Ok(out)
}

/// Two overlapping proper pieces covering an interval component, or the
/// minimal opens of a finite open.
pub fn split_cover(space: &Space, w: &OpenSet) -> Result<Vec<OpenSet>, Error> {
    match space {
        Space::Poset(_) => space.point_list(w).iter().map(|x| space.minimal_open(x)).collect(),
        Space::Interval { .. } => {
            let mut out = Vec::new();
            for c in space.components(w)? {
                out.extend(split_component(space, &c)?);
            }
            Ok(out)
        }
    }
}

fn split_component(space: &Space, c: &OpenSet) -> Result<Vec<OpenSet>, Error> {
    let s = c.spans().expect("interval").spans()[0].clone();
    if s.is_point() {
        return Ok(vec![c.clone()]);
    }
    let third = (&s.hi - &s.lo) / Rat::from_integer(3.into());
    let left = Span::new(s.lo.clone(), s.lo_closed, &s.hi - &third, false).expect("non-empty");
    let right = Span::new(&s.lo + &third, false, s.hi.clone(), s.hi_closed).expect("non-empty");
    Ok(vec![space.open_spans(vec![left])?, space.open_spans(vec![right])?])
}

fn first_failure(slot: &mut Option<Violation>, v: Violation) {
    if slot.is_none() {
        *slot = Some(v);
    }
}

fn verdict(failure: Option<Violation>, tested: usize, skipped: usize) -> Verdict {
    match failure {
        Some(v) => Verdict::Counterexample(v),
        None => Verdict::PassOnTested { tested, skipped },
    }
}

/// Asymmetry, negative transitivity, monotonicity and local character.
pub fn check_weak_order(pref: &dyn Ranking, family: &[(String, Lottery)], within: &OpenSet) -> Result<AxiomReport, Error> {
    let space = pref.space();
    let n = family.len();
    let (mut asym, mut neg, mut mono, mut local) = (None, None, None, None);
    let mut counts = [0usize; 4];
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (&family[i].1, &family[j].1);
            let w = shared(space, within, &[p, q])?;
            if w.is_empty() {
                continue;
            }
            let pq = strict_on(pref, p, q, &w)?;
            let qp = strict_on(pref, q, p, &w)?;
            counts[0] += 1;
            let overlap = space.meet(&pq, &qp)?;
            if !overlap.is_empty() {
                first_failure(&mut asym, Violation::Asymmetry { p: i, q: j, within: w.clone(), overlap });
            }

            for k in 0..n {
                let r = &family[k].1;
                let wk = shared(space, &w, &[r])?;
                if wk.is_empty() {
                    continue;
                }
                counts[1] += 1;
                let base = strict_on(pref, p, q, &wk)?;
                let cover = space.join(&strict_on(pref, r, q, &wk)?, &strict_on(pref, p, r, &wk)?)?;
                let gap = space.difference(&base, &cover)?;
                if let Some(point) = space.region_witness(&gap) {
                    first_failure(&mut neg, Violation::NegativeTransitivity { p: i, q: j, r: k, within: wk, point });
                }
            }

            for v in sample_subopens(space, &w)? {
                counts[2] += 1;
                let expected = space.meet(&pq, &v)?;
                let found = strict_on(pref, p, q, &v)?;
                if expected != found {
                    first_failure(
                        &mut mono,
                        Violation::Monotonicity { p: i, q: j, within: w.clone(), restricted_to: v, expected, found },
                    );
                }
            }

            if !pq.is_empty() {
                counts[3] += 1;
                if let Some(v) = local_character_failure(pref, p, q, &pq)? {
                    first_failure(&mut local, Violation::LocalCharacter { p: i, q: j, cover: v, union: pq.clone() });
                }
            }
        }
    }
    Ok(AxiomReport {
        checks: vec![
            AxiomCheck { condition: "asymmetry", verdict: verdict(asym, counts[0], 0) },
            AxiomCheck { condition: "negative transitivity", verdict: verdict(neg, counts[1], 0) },
            AxiomCheck { condition: "monotonicity", verdict: verdict(mono, counts[2], 0) },
            AxiomCheck { condition: "local character", verdict: verdict(local, counts[3], 0) },
        ],
        continuity: Vec::new(),
    })
}

/// Splits `t` into a cover, glues the restricted lotteries back together and
/// asks whether the union forces what every piece forces.
fn local_character_failure(pref: &dyn Ranking, p: &Lottery, q: &Lottery, t: &OpenSet) -> Result<Option<Vec<OpenSet>>, Error> {
    let space = pref.space();
    let cover = split_cover(space, t)?;
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    for c in &cover {
        let (pc, qc) = (restrict_to(space, p, c)?, restrict_to(space, q, c)?);
        if !pref.forces_strict(&pc, &qc, c)? {
            return Ok(None);
        }
        ps.push(pc);
        qs.push(qc);
    }
    let glue = |members: Vec<Lottery>| -> Result<Lottery, Error> {
        match glue_lotteries(space, &CompatibleFamily::new(cover.clone(), members)?)? {
            Glued::Glued(l) => Ok(l),
            Glued::Obstructed(_) => Err(Error::Invalid("restrictions of one lottery failed to glue".into())),
        }
    };
    let (pg, qg) = (glue(ps)?, glue(qs)?);
    if pref.forces_strict(&pg, &qg, t)? {
        Ok(None)
    } else {
        Ok(Some(cover))
    }
}

fn mixed_pair(space: &Space, a: &Section, p: &Lottery, q: &Lottery, r: &Lottery) -> Result<(Lottery, Lottery), Error> {
    let w = a.domain();
    let (p, q, r) = (restrict_to(space, p, w)?, restrict_to(space, q, w)?, restrict_to(space, r, w)?);
    Ok((mix(space, a, &p, &r)?, mix(space, a, &q, &r)?))
}

/// `⟦p≺q⟧ ⊆ ⟦a·p+(1-a)·r ≺ a·q+(1-a)·r⟧` for every tuple and mixer.
pub fn check_independence(
    pref: &dyn Ranking,
    family: &[(String, Lottery)],
    mixers: &[(String, Section)],
    within: &OpenSet,
) -> Result<AxiomReport, Error> {
    let space = pref.space();
    for (label, a) in mixers {
        let [neg, zero, _] = a.sign_regions(a.domain())?;
        let [_, _, above] = a.add_const(&-Rat::from_integer(1.into())).sign_regions(a.domain())?;
        if !region_empty(&neg) || !region_empty(&zero) || !region_empty(&above) {
            return Err(Error::Invalid(format!("mixer `{label}` leaves (0,1]")));
        }
    }
    let n = family.len();
    let (mut failure, mut tested, mut skipped) = (None, 0, 0);
    for (_, a) in mixers {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    let (p, q, r) = (&family[i].1, &family[j].1, &family[k].1);
                    let w = shared(space, within, &[p, q, r])?;
                    let w = space.meet(&w, a.domain())?;
                    if w.is_empty() {
                        continue;
                    }
                    let base = strict_on(pref, p, q, &w)?;
                    let aw = a.restrict(&w)?;
                    let (mp, mq) = match mixed_pair(space, &aw, p, q, r) {
                        Ok(pair) => pair,
                        Err(Error::NonLinear(_)) => {
                            skipped += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    tested += 1;
                    let after = pref.strict(&mp, &mq, &w)?;
                    let lost = space.difference(&base, &after)?;
                    if let Some(point) = space.region_witness(&lost) {
                        first_failure(&mut failure, Violation::Independence { p: i, q: j, r: k, mixer: aw, point });
                    }
                }
            }
        }
    }
    Ok(AxiomReport {
        checks: vec![AxiomCheck { condition: "independence", verdict: verdict(failure, tested, skipped) }],
        continuity: Vec::new(),
    })
}

/// Candidate mixing constants: `1/2`, then `2^-k` and `1-2^-k` down to the
/// resolution.
pub fn mixing_grid(resolution: &Rat) -> Vec<Rat> {
    let mut out = vec![half()];
    let one = Rat::from_integer(1.into());
    let mut k = 2;
    loop {
        let step = dyadic(k);
        out.push(step.clone());
        out.push(&one - &step);
        if &step <= resolution || k >= 64 {
            break;
        }
        k += 1;
    }
    out
}

/// Opens inside `w` covered by some grid constant, each paired with it.
/// `upper` selects `mix ≺ q`; otherwise `q ≺ mix`.
fn continuity_cover(
    pref: &dyn Ranking,
    p: &Lottery,
    q: &Lottery,
    r: &Lottery,
    w: &OpenSet,
    resolution: &Rat,
    upper: bool,
) -> Result<Vec<(OpenSet, Rat)>, Error> {
    let space = pref.space();
    let (p, q, r) = (restrict_to(space, p, w)?, restrict_to(space, q, w)?, restrict_to(space, r, w)?);
    let mut acc = space.empty();
    let mut found = Vec::new();
    for a in mixing_grid(resolution) {
        let m = mix_const(space, &a, &p, &r, w)?;
        let t = if upper { pref.strict(&m, &q, w)? } else { pref.strict(&q, &m, w)? };
        if t.is_empty() || space.is_subset(&t, &acc)? {
            continue;
        }
        acc = space.join(&acc, &t)?;
        found.push((t, a));
        if space.is_subset(w, &acc)? {
            break;
        }
    }
    Ok(found)
}

/// Searches rational constants for every triple with `p ≺ q ≺ r`.
pub fn check_continuity(
    pref: &dyn Ranking,
    family: &[(String, Lottery)],
    within: &OpenSet,
    resolution: &Rat,
) -> Result<AxiomReport, Error> {
    let space = pref.space();
    let n = family.len();
    let (mut failure, mut tested, mut vacuous) = (None, 0, 0);
    let mut witnesses = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let (p, q, r) = (&family[i].1, &family[j].1, &family[k].1);
                let w = shared(space, within, &[p, q, r])?;
                if w.is_empty() {
                    continue;
                }
                let chain = space.meet(&strict_on(pref, p, q, &w)?, &strict_on(pref, q, r, &w)?)?;
                if chain.is_empty() {
                    vacuous += 1;
                    continue;
                }
                tested += 1;
                let mut sides = Vec::new();
                for upper in [false, true] {
                    let cover = continuity_cover(pref, p, q, r, &chain, resolution, upper)?;
                    let union = space.join_all(cover.iter().map(|(u, _)| u))?;
                    let gap = space.difference(&chain, &union)?;
                    if let Some(point) = space.region_witness(&gap) {
                        first_failure(
                            &mut failure,
                            Violation::Continuity {
                                p: i,
                                q: j,
                                r: k,
                                within: chain.clone(),
                                point,
                                upper,
                                resolution: resolution.clone(),
                            },
                        );
                    }
                    sides.push(cover);
                }
                let mut pieces = Vec::new();
                for (ua, a) in &sides[0] {
                    for (ub, b) in &sides[1] {
                        let piece = space.meet(ua, ub)?;
                        if !piece.is_empty() {
                            pieces.push((piece, a.clone(), b.clone()));
                        }
                    }
                }
                witnesses.push(ContinuityWitness { p: i, q: j, r: k, pieces });
            }
        }
    }
    Ok(AxiomReport {
        checks: vec![AxiomCheck { condition: "continuity", verdict: verdict(failure, tested, vacuous) }],
        continuity: witnesses,
    })
}

/// Why a cover element is comparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverReason {
    Strict { p: usize, q: usize },
    Indifferent,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Comparability {
    Pass { cover: Vec<(OpenSet, CoverReason)> },
    Fail { point: Point },
}

/// Every point needs a neighbourhood with a strictly ranked family pair or
/// universal indifference.
pub fn check_minimal_comparability(pref: &dyn Ranking, family: &[(String, Lottery)]) -> Result<Comparability, Error> {
    let space = pref.space();
    let x = space.carrier();
    match space {
        Space::Poset(poset) => {
            let mut cover = Vec::new();
            'points: for pt in 0..poset.len() {
                let up = space.minimal_open(&Point::Node(pt))?;
                for (i, (_, p)) in family.iter().enumerate() {
                    for (j, (_, q)) in family.iter().enumerate() {
                        if i == j || !space.is_subset(&up, p.domain())? || !space.is_subset(&up, q.domain())? {
                            continue;
                        }
                        if pref.forces_strict(&p.restrict(&up)?, &q.restrict(&up)?, &up)? {
                            cover.push((up, CoverReason::Strict { p: i, q: j }));
                            continue 'points;
                        }
                    }
                }
                if pref.indifference_region(&up)? == up {
                    cover.push((up, CoverReason::Indifferent));
                    continue;
                }
                return Ok(Comparability::Fail { point: Point::Node(pt) });
            }
            Ok(Comparability::Pass { cover })
        }
        Space::Interval { .. } => {
            let mut cover = Vec::new();
            let mut acc = space.empty();
            for (i, (_, p)) in family.iter().enumerate() {
                for (j, (_, q)) in family.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let w = shared(space, &x, &[p, q])?;
                    let t = strict_on(pref, p, q, &w)?;
                    if t.is_empty() || space.is_subset(&t, &acc)? {
                        continue;
                    }
                    if pref.forces_strict(&p.restrict(&t)?, &q.restrict(&t)?, &t)? {
                        acc = space.join(&acc, &t)?;
                        cover.push((t, CoverReason::Strict { p: i, q: j }));
                    }
                }
            }
            let ind = pref.indifference_region(&x)?;
            if !ind.is_empty() {
                acc = space.join(&acc, &ind)?;
                cover.push((ind, CoverReason::Indifferent));
            }
            match space.region_witness(&space.difference(&x, &acc)?) {
                Some(point) => Ok(Comparability::Fail { point }),
                None => Ok(Comparability::Pass { cover }),
            }
        }
    }
}

/// One element of a calibration cover.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverPiece {
    pub open: OpenSet,
    pub p: usize,
    pub q: usize,
    pub indifferent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GlobalPair {
    Found { pieces: Vec<CoverPiece>, p: Lottery, q: Lottery },
    Missing { reason: String },
}

const SEARCH_BUDGET: usize = 200_000;

/// Looks for compatible families from the declared family that collate to
/// global `p`, `q` with every cover element forcing `p_i ≺ q_i` or
/// universal indifference.
pub fn check_global_pair(pref: &dyn Ranking, family: &[(String, Lottery)]) -> Result<GlobalPair, Error> {
    let space = pref.space();
    let x = space.carrier();
    let ind = pref.indifference_region(&x)?;
    for (i, (_, p)) in family.iter().enumerate() {
        for (j, (_, q)) in family.iter().enumerate() {
            if !space.is_carrier(p.domain()) || !space.is_carrier(q.domain()) {
                continue;
            }
            let t = pref.strict(p, q, &x)?;
            if !space.is_carrier(&space.join(&t, &ind)?) {
                continue;
            }
            if !t.is_empty() && !pref.forces_strict(&p.restrict(&t)?, &q.restrict(&t)?, &t)? {
                continue;
            }
            let mut pieces = Vec::new();
            if !t.is_empty() {
                pieces.push(CoverPiece { open: t, p: i, q: j, indifferent: false });
            }
            if !ind.is_empty() {
                pieces.push(CoverPiece { open: ind.clone(), p: i, q: j, indifferent: true });
            }
            return Ok(GlobalPair::Found { pieces, p: p.clone(), q: q.clone() });
        }
    }
    if space.is_finite() {
        return pointwise_search(pref, family);
    }
    Ok(GlobalPair::Missing { reason: "no declared pair is ranked or indifferent across the carrier".into() })
}

fn pointwise_search(pref: &dyn Ranking, family: &[(String, Lottery)]) -> Result<GlobalPair, Error> {
    let space = pref.space();
    let poset = space.as_poset().expect("finite");
    let mut options: Vec<Vec<(usize, usize, bool)>> = Vec::new();
    let mut ups = Vec::new();
    for pt in 0..poset.len() {
        let up = space.minimal_open(&Point::Node(pt))?;
        let indifferent = pref.indifference_region(&up)? == up;
        let mut opts = Vec::new();
        for (i, (_, p)) in family.iter().enumerate() {
            for (j, (_, q)) in family.iter().enumerate() {
                if !space.is_subset(&up, p.domain())? || !space.is_subset(&up, q.domain())? {
                    continue;
                }
                if pref.forces_strict(&p.restrict(&up)?, &q.restrict(&up)?, &up)? {
                    opts.push((i, j, false));
                } else if indifferent {
                    opts.push((i, j, true));
                }
            }
        }
        if opts.is_empty() {
            return Ok(GlobalPair::Missing {
                reason: format!(
                    "no declared pair is ranked on {} and it is not indifferent",
                    space.show(&up)
                ),
            });
        }
        options.push(opts);
        ups.push(up);
    }
    let mut chosen: Vec<(usize, usize, bool)> = Vec::new();
    let mut budget = SEARCH_BUDGET;
    if !extend_choice(space, family, &ups, &options, &mut chosen, &mut budget)? {
        let reason = if budget == 0 {
            "search budget exhausted".to_string()
        } else {
            "locally ranked pairs cannot be chosen compatibly".to_string()
        };
        return Ok(GlobalPair::Missing { reason });
    }
    let pieces: Vec<CoverPiece> = ups
        .iter()
        .zip(&chosen)
        .map(|(u, &(p, q, indifferent))| CoverPiece { open: u.clone(), p, q, indifferent })
        .collect();
    let collate = |pick: fn(&CoverPiece) -> usize| -> Result<Lottery, Error> {
        let members = pieces
            .iter()
            .map(|c| family[pick(c)].1.restrict(&c.open))
            .collect::<Result<Vec<_>, _>>()?;
        let cover = pieces.iter().map(|c| c.open.clone()).collect();
        glue_lotteries(space, &CompatibleFamily::new(cover, members)?)?
            .ok()
            .ok_or_else(|| Error::Invalid("compatible choice failed to glue".into()))
    };
    let p = collate(|c| c.p)?;
    let q = collate(|c| c.q)?;
    Ok(GlobalPair::Found { pieces, p, q })
}

fn extend_choice(
    space: &Space,
    family: &[(String, Lottery)],
    ups: &[OpenSet],
    options: &[Vec<(usize, usize, bool)>],
    chosen: &mut Vec<(usize, usize, bool)>,
    budget: &mut usize,
) -> Result<bool, Error> {
    let k = chosen.len();
    if k == ups.len() {
        return Ok(true);
    }
    for &opt in &options[k] {
        if *budget == 0 {
            return Ok(false);
        }
        *budget -= 1;
        let mut fits = true;
        for (m, &(pi, qi, _)) in chosen.iter().enumerate() {
            let overlap = space.meet(&ups[m], &ups[k])?;
            if overlap.is_empty() {
                continue;
            }
            let agree = |a: usize, b: usize| -> Result<bool, Error> {
                family[a].1.restrict(&overlap)?.same_as(space, &family[b].1.restrict(&overlap)?)
            };
            if !agree(pi, opt.0)? || !agree(qi, opt.1)? {
                fits = false;
                break;
            }
        }
        if !fits {
            continue;
        }
        chosen.push(opt);
        if extend_choice(space, family, ups, options, chosen, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// The three truth values of one pair of constant lotteries.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantComparison {
    pub p: usize,
    pub q: usize,
    pub prec: OpenSet,
    pub succ: OpenSet,
    pub sim: OpenSet,
}

/// Pairs of constant lotteries whose ranking is not decided uniformly:
/// each truth value must be the carrier or empty, and together they must
/// cover the carrier. An empty result is a pass.
pub fn check_constant_rankings(pref: &dyn Ranking, family: &[(String, Lottery)]) -> Result<Vec<ConstantComparison>, Error> {
    let space = pref.space();
    let x = space.carrier();
    for (label, l) in family {
        if !space.is_carrier(l.domain()) || !l.is_constant() {
            return Err(Error::Precondition(format!("`{label}` is not a constant lottery on the carrier")));
        }
    }
    let mut out = Vec::new();
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            let (p, q) = (&family[i].1, &family[j].1);
            let prec = pref.strict(p, q, &x)?;
            let succ = pref.strict(q, p, &x)?;
            let sim = space.meet(&space.not(&prec)?, &space.not(&succ)?)?;
            let decided = |u: &OpenSet| u.is_empty() || space.is_carrier(u);
            let union = space.join(&space.join(&prec, &succ)?, &sim)?;
            if !(decided(&prec) && decided(&succ) && decided(&sim) && space.is_carrier(&union)) {
                out.push(ConstantComparison { p: i, q: j, prec, succ, sim });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{example2, example3};
    use super::super::{Preference, ProperOpensOnly, UtilityInduced};
    use super::*;
    use crate::rational::{int, ratio};

    fn deltas(space: &Space, n: usize) -> Vec<(String, Lottery)> {
        let x = space.carrier();
        (0..n).map(|i| (format!("d{}", i + 1), Lottery::delta(space, &x, i).unwrap())).collect()
    }

    #[test]
    fn utility_preferences_pass_the_ordering_checks() {
        let (space, u) = example3();
        let mut fam = deltas(&space, 2);
        let x = space.carrier();
        fam.push(("h".into(), Lottery::constant(&space, &x, &[(0, half()), (1, half())]).unwrap()));
        let report = check_weak_order(&u, &fam, &x).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn proper_opens_only_breaks_local_character() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let w = vec![
            Section::constant(&space, &x, int(1)).unwrap(),
            Section::constant(&space, &x, int(0)).unwrap(),
        ];
        let pref = ProperOpensOnly::new(Preference::Utility(UtilityInduced::new(&space, w).unwrap()));
        let fam = deltas(&space, 2);
        let report = check_weak_order(&pref, &fam, &x).unwrap();
        let v: Vec<&Violation> = report.violations().collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition(), "local character");
        let Violation::LocalCharacter { cover, .. } = v[0] else { panic!() };
        let shown: Vec<String> = cover.iter().map(|c| space.show(c)).collect();
        assert_eq!(shown, ["[0,2/3)", "(1/3,1]"]);
        assert!(v[0].replay(&pref, &fam).unwrap());
    }

    #[test]
    fn continuity_constants_for_the_midpoint_lottery() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let w = vec![
            Section::constant(&space, &x, int(0)).unwrap(),
            Section::constant(&space, &x, int(1)).unwrap(),
        ];
        let u = UtilityInduced::new(&space, w).unwrap();
        let fam = vec![
            ("p".to_string(), Lottery::delta(&space, &x, 0).unwrap()),
            ("q".to_string(), Lottery::constant(&space, &x, &[(0, half()), (1, half())]).unwrap()),
            ("r".to_string(), Lottery::delta(&space, &x, 1).unwrap()),
        ];
        let report = check_continuity(&u, &fam, &x, &default_resolution()).unwrap();
        assert!(report.passed());
        let wit = report.continuity.iter().find(|c| (c.p, c.q, c.r) == (0, 1, 2)).unwrap();
        assert_eq!(wit.pieces, vec![(x.clone(), ratio(1, 4), ratio(3, 4))]);
    }

    #[test]
    fn example2_comparability_fails_at_the_bottom() {
        let (_, t) = example2();
        let fam = t.family().clone();
        assert_eq!(check_minimal_comparability(&t, &fam).unwrap(), Comparability::Fail { point: Point::Node(0) });
        assert!(matches!(check_global_pair(&t, &fam).unwrap(), GlobalPair::Missing { .. }));
    }

    #[test]
    fn example3_comparability_fails_at_the_crossing() {
        let (space, u) = example3();
        let fam = deltas(&space, 2);
        assert_eq!(check_minimal_comparability(&u, &fam).unwrap(), Comparability::Fail { point: Point::Real(int(1)) });
        let bad = check_constant_rankings(&u, &fam).unwrap();
        assert_eq!(bad.len(), 1);
        assert_eq!(space.show(&bad[0].prec), "[0,1)");
    }

    #[test]
    fn indifferent_preference_has_trivial_global_pair() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let w = Section::constant(&space, &x, int(0)).unwrap();
        let u = UtilityInduced::new(&space, vec![w.clone(), w]).unwrap();
        let fam = deltas(&space, 2);
        let GlobalPair::Found { pieces, .. } = check_global_pair(&u, &fam).unwrap() else { panic!() };
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].indifferent && space.is_carrier(&pieces[0].open));
    }

    #[test]
    fn mixers_outside_the_half_open_unit_are_rejected() {
        let (space, u) = example3();
        let x = space.carrier();
        let fam = deltas(&space, 2);
        let zero = Section::constant(&space, &x, int(0)).unwrap();
        assert!(check_independence(&u, &fam, &[("z".into(), zero)], &x).is_err());
        let one = Section::constant(&space, &x, int(1)).unwrap();
        assert!(check_independence(&u, &fam, &[("one".into(), one)], &x).unwrap().passed());
    }
}
