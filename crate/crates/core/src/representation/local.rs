//! Affine representation on one open: the zero lottery gets utility 0, the
//! unit lottery utility 1, and every point mass is placed by calibration.

use num_traits::{One, Zero};

use crate::lottery::{mix_const, Lottery};
use crate::preference::{restrict_to, truth_value, Ranking, Relation};
use crate::rational::{half, Rat};
use crate::sections::{compare, glue, CompatibleFamily, Glued, Section};
use crate::topology::{OpenSet, Point, Space};
use crate::Error;

use super::calibration::solve_calibration;

/// How the zero and unit of a local chart are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Calib {
    /// `(zero, unit)` with `zero ≺ unit` forced on the whole open.
    Pair(Lottery, Lottery),
    /// Every lottery is indifferent to every other on the open.
    AllIndifferent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalRep {
    pub domain: OpenSet,
    pub calibration: Option<(Lottery, Lottery)>,
    /// One weight section per prize, all defined on `domain`.
    pub weights: Vec<Section>,
    /// Whether every calibration step landed on an exact cut.
    pub exact: bool,
    pub soundness: Soundness,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalOutcome {
    Rep(LocalRep),
    Obstructed { point: Option<Point>, reason: String },
}

impl LocalOutcome {
    pub fn rep(self) -> Option<LocalRep> {
        match self {
            LocalOutcome::Rep(r) => Some(r),
            LocalOutcome::Obstructed { .. } => None,
        }
    }
}

/// Failure of `⟦r ≺ s⟧ = ⟦EU(r) < EU(s)⟧` or of the matching `∼` identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessFailure {
    pub p: usize,
    pub q: usize,
    pub relation: Relation,
    pub truth: OpenSet,
    pub utility: OpenSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Soundness {
    pub tested: usize,
    /// Pairs whose expected utilities leave the piecewise-linear sections.
    pub skipped: usize,
    pub failures: Vec<SoundnessFailure>,
}

impl Soundness {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares truth values with expected-utility comparisons for every ordered
/// pair of family members defined on `w`.
pub fn check_soundness(
    pref: &dyn Ranking,
    weights: &[Section],
    w: &OpenSet,
    family: &[(String, Lottery)],
) -> Result<Soundness, Error> {
    let space = pref.space();
    let mut out = Soundness::default();
    let local: Vec<(usize, Lottery)> = family
        .iter()
        .enumerate()
        .filter_map(|(i, (_, l))| match space.is_subset(w, l.domain()) {
            Ok(true) => Some(l.restrict(w).map(|r| (i, r))),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;
    for (i, p) in &local {
        for (j, q) in &local {
            let (ep, eq) = match (p.expectation(weights), q.expectation(weights)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::NonLinear(_)), _) | (_, Err(Error::NonLinear(_))) => {
                    out.skipped += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            out.tested += 1;
            let cmp = compare(space, &ep, &eq, w)?;
            for (relation, utility) in [(Relation::Prec, cmp.lt), (Relation::Sim, cmp.eq)] {
                let truth = truth_value(pref, relation, p, q, w)?;
                if truth != utility {
                    out.failures.push(SoundnessFailure { p: *i, q: *j, relation, truth, utility });
                }
            }
        }
    }
    Ok(out)
}

/// Where a point mass sits relative to a bracketing pair `low ≺ high`, with
/// the utilities assigned to the bracket.
struct Bracket<'a> {
    low: &'a Lottery,
    high: &'a Lottery,
    u_low: Rat,
    u_high: Rat,
}

struct Piece {
    open: OpenSet,
    weight: Section,
    exact: bool,
}

fn place(
    pref: &dyn Ranking,
    delta: &Lottery,
    bracket: &Bracket,
    w: &OpenSet,
    resolution: &Rat,
) -> Result<Vec<Piece>, Error> {
    let space = pref.space();
    let (lo, hi, ul, uh) = (bracket.low, bracket.high, &bracket.u_low, &bracket.u_high);
    let mut pieces = Vec::new();

    let between = space.meet(
        &truth_value(pref, Relation::Precsim, lo, delta, w)?,
        &truth_value(pref, Relation::Precsim, delta, hi, w)?,
    )?;
    if !between.is_empty() {
        // delta ∼ a·high + (1-a)·low, so u = u_low + a·(u_high - u_low).
        let c = solve_calibration(pref, hi, delta, lo, &between, resolution)?;
        let u = c.weight.scale(&(uh - ul)).add_const(ul);
        pieces.push(Piece { open: between, weight: u, exact: c.exact });
    }

    let below = truth_value(pref, Relation::Prec, delta, lo, w)?;
    if !below.is_empty() {
        // low ∼ a·high + (1-a)·delta, so u = (u_low - a·u_high)/(1-a).
        let c = solve_calibration(pref, hi, lo, delta, &below, resolution)?;
        let num = c.weight.scale(&-uh).add_const(ul);
        let den = c.weight.scale(&-Rat::one()).add_const(&Rat::one());
        pieces.push(Piece { open: below, weight: num.div(&den)?, exact: c.exact });
    }

    let above = truth_value(pref, Relation::Prec, hi, delta, w)?;
    if !above.is_empty() {
        // high ∼ b·delta + (1-b)·low, so u = (u_high - (1-b)·u_low)/b.
        let c = solve_calibration(pref, delta, hi, lo, &above, resolution)?;
        let num = c.weight.scale(ul).add_const(&(uh - ul));
        pieces.push(Piece { open: above, weight: num.div(&c.weight)?, exact: c.exact });
    }
    Ok(pieces)
}

/// Builds weights on `w` calibrated to `calib`, then checks them against the
/// preference on every pair of `family` members defined on `w`.
pub fn local_representation(
    pref: &dyn Ranking,
    w: &OpenSet,
    calib: &Calib,
    family: &[(String, Lottery)],
    prizes: usize,
    resolution: &Rat,
) -> Result<LocalOutcome, Error> {
    let space = pref.space();
    let (zero, unit) = match calib {
        Calib::AllIndifferent => {
            let ind = pref.indifference_region(w)?;
            if ind != *w {
                let point = space.region_witness(&space.difference(w, &ind)?);
                return Ok(LocalOutcome::Obstructed {
                    point,
                    reason: format!("indifference holds only on {}", space.show(&ind)),
                });
            }
            let zeros = Section::constant(space, w, Rat::zero())?;
            let weights = vec![zeros; prizes];
            let soundness = check_soundness(pref, &weights, w, family)?;
            return Ok(LocalOutcome::Rep(LocalRep {
                domain: w.clone(),
                calibration: None,
                weights,
                exact: true,
                soundness,
            }));
        }
        Calib::Pair(z, u) => (restrict_to(space, z, w)?, restrict_to(space, u, w)?),
    };
    if !pref.forces_strict(&zero, &unit, w)? {
        let t = truth_value(pref, Relation::Prec, &zero, &unit, w)?;
        return Ok(LocalOutcome::Obstructed {
            point: space.region_witness(&space.difference(w, &t)?),
            reason: format!("zero ≺ unit holds only on {}", space.show(&t)),
        });
    }
    let middle = mix_const(space, &half(), &unit, &zero, w)?;
    let brackets = [
        Bracket { low: &zero, high: &unit, u_low: Rat::zero(), u_high: Rat::one() },
        Bracket { low: &middle, high: &unit, u_low: half(), u_high: Rat::one() },
        Bracket { low: &zero, high: &middle, u_low: Rat::zero(), u_high: half() },
    ];

    let mut weights = Vec::with_capacity(prizes);
    let mut exact = true;
    for z in 0..prizes {
        let delta = Lottery::delta(space, w, z)?;
        let mut pieces = place(pref, &delta, &brackets[0], w, resolution)?;
        let covered = space.join_all(pieces.iter().map(|p| &p.open))?;
        if covered != *w {
            for b in &brackets[1..] {
                pieces.extend(place(pref, &delta, b, w, resolution)?);
            }
        }
        let covered = space.join_all(pieces.iter().map(|p| &p.open))?;
        if covered != *w {
            return Ok(LocalOutcome::Obstructed {
                point: space.region_witness(&space.difference(w, &covered)?),
                reason: format!("prize {z} is not comparable with the calibration pair"),
            });
        }
        exact &= pieces.iter().all(|p| p.exact);
        let family = CompatibleFamily::new(
            pieces.iter().map(|p| p.open.clone()).collect(),
            pieces.into_iter().map(|p| p.weight).collect(),
        )?;
        match glue(space, &family)? {
            Glued::Glued(s) => weights.push(s),
            Glued::Obstructed(d) => {
                return Ok(LocalOutcome::Obstructed {
                    point: Some(d.point),
                    reason: format!("calibrations of prize {z} disagree on an overlap"),
                })
            }
        }
    }

    if exact {
        for (what, l, target) in [("zero", &zero, Rat::zero()), ("unit", &unit, Rat::one())] {
            let eu = l.expectation(&weights)?;
            if eu.constant_value() != Some(target) || !eu.is_locally_constant() {
                return Err(Error::Invalid(format!("expected utility of the {what} lottery is {}", eu.show(space))));
            }
        }
    }
    let soundness = check_soundness(pref, &weights, w, family)?;
    if exact && !soundness.holds() {
        return Err(Error::Invalid("local weights do not reproduce the preference on the family".into()));
    }
    Ok(LocalOutcome::Rep(LocalRep {
        domain: w.clone(),
        calibration: Some((zero, unit)),
        weights,
        exact,
        soundness,
    }))
}

/// Restricts every weight of a representation to a smaller open.
pub fn restrict_rep(rep: &LocalRep, v: &OpenSet) -> Result<LocalRep, Error> {
    Ok(LocalRep {
        domain: v.clone(),
        calibration: match &rep.calibration {
            Some((z, u)) => Some((z.restrict(v)?, u.restrict(v)?)),
            None => None,
        },
        weights: rep.weights.iter().map(|s| s.restrict(v)).collect::<Result<_, _>>()?,
        exact: rep.exact,
        soundness: Soundness::default(),
    })
}

/// Shows a weight vector, one prize per line.
pub fn show_weights(space: &Space, weights: &[Section], names: &[String]) -> Vec<String> {
    weights
        .iter()
        .zip(names)
        .map(|(w, n)| format!("u({n}) = {}", w.show(space)))
        .collect()
}
