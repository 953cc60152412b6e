//! Gluing local representations into one over a larger open, plus the two
//! global constructions: classical spaces and constant prize utilities.

use num_traits::{One, Zero};

use crate::lottery::{glue_lotteries, Lottery};
use crate::preference::{
    check_constant_rankings, check_continuity, check_independence, check_weak_order, truth_value, AxiomReport,
    Ranking, Relation, UtilityInduced,
};
use crate::rational::{half, Rat};
use crate::sections::{glue, CompatibleFamily, Glued, Section};
use crate::topology::{Classicality, OpenSet, Point, Space};
use crate::Error;

use super::calibration::solve_calibration;
use super::local::{check_soundness, local_representation, Calib, LocalOutcome, LocalRep, Soundness};
use super::transform::{uniqueness_transform, Plt, Transform};

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalRep {
    pub target: OpenSet,
    /// Cover elements in gluing order.
    pub cover: Vec<OpenSet>,
    pub locals: Vec<LocalRep>,
    /// Transform taking each local chart into the shared chart.
    pub alignments: Vec<Plt>,
    pub weights: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueObstruction {
    pub point: Point,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Glue {
    Global(GlobalRep),
    Obstructed(GlueObstruction),
}

impl Glue {
    pub fn global(self) -> Option<GlobalRep> {
        match self {
            Glue::Global(g) => Some(g),
            Glue::Obstructed(_) => None,
        }
    }
}

/// Folds the locals, in the order of their domains' printed form, into the
/// chart of the first one. Each later chart is aligned on its overlap with
/// what has been glued so far.
pub fn glue_representations(space: &Space, target: &OpenSet, locals: Vec<LocalRep>) -> Result<Glue, Error> {
    let obstructed = |point: Point, reason: String| Ok(Glue::Obstructed(GlueObstruction { point, reason }));
    let mut locals = locals;
    locals.sort_by_cached_key(|l| space.show(&l.domain));
    let Some(first) = locals.first() else {
        return match space.region_witness(target.region()) {
            Some(point) => obstructed(point, "no local representation was supplied".into()),
            None => Err(Error::Precondition("nothing to glue onto an empty target".into())),
        };
    };
    let prizes = first.weights.len();
    if locals.iter().any(|l| l.weights.len() != prizes) {
        return Err(Error::Invalid("local representations disagree on the number of prizes".into()));
    }
    let mut dom = first.domain.clone();
    let mut weights = first.weights.clone();
    let mut alignments = vec![Plt::identity(space, &first.domain)?];

    for local in &locals[1..] {
        let overlap = space.meet(&dom, &local.domain)?;
        let plt = if overlap.is_empty() {
            Plt::identity(space, &local.domain)?
        } else {
            let src: Vec<Section> = local.weights.iter().map(|w| w.restrict(&overlap)).collect::<Result<_, _>>()?;
            let tgt: Vec<Section> = weights.iter().map(|w| w.restrict(&overlap)).collect::<Result<_, _>>()?;
            let found = match uniqueness_transform(space, &src, &tgt, &overlap) {
                Ok(Transform::Found(p)) => p,
                Ok(Transform::Obstructed(o)) => {
                    return obstructed(o.point, "the charts have no continuous transform on the overlap".into())
                }
                Err(Error::Precondition(msg)) => {
                    let point = space.region_witness(overlap.region()).expect("non-empty");
                    return obstructed(point, msg);
                }
                Err(e) => return Err(e),
            };
            match extend_alignment(space, &found, &local.domain)? {
                Some(p) => p,
                None => {
                    let point = space.region_witness(overlap.region()).expect("non-empty");
                    return obstructed(point, "the alignment varies along the overlap and cannot be extended".into());
                }
            }
        };
        let aligned = plt.apply(&local.weights)?;
        let mut glued = Vec::with_capacity(prizes);
        for (z, (old, new)) in weights.iter().zip(aligned).enumerate() {
            let family = CompatibleFamily::new(vec![dom.clone(), local.domain.clone()], vec![old.clone(), new])?;
            match glue(space, &family)? {
                Glued::Glued(s) => glued.push(s),
                Glued::Obstructed(d) => {
                    return obstructed(d.point, format!("aligned weights of prize {z} disagree on the overlap"))
                }
            }
        }
        weights = glued;
        dom = space.join(&dom, &local.domain)?;
        alignments.push(plt);
    }

    if !space.is_subset(&dom, target)? {
        return Err(Error::Precondition(format!(
            "the cover reaches {} outside the target {}",
            space.show(&dom),
            space.show(target)
        )));
    }
    if dom != *target {
        let missing = space.difference(target, &dom)?;
        let point = space.region_witness(&missing).expect("non-empty");
        let smallest = match &point {
            Point::Node(_) => format!("; the smallest open around it is {}", space.show(&space.minimal_open(&point)?)),
            Point::Real(_) => String::new(),
        };
        return obstructed(
            point.clone(),
            format!("no local representation covers {}{smallest}", space.show_point(&point)),
        );
    }
    Ok(Glue::Global(GlobalRep {
        target: target.clone(),
        cover: locals.iter().map(|l| l.domain.clone()).collect(),
        locals,
        alignments,
        weights,
    }))
}

/// Extends an alignment found on part of `domain` to all of it, when it is
/// constant on each component it meets.
fn extend_alignment(space: &Space, plt: &Plt, domain: &OpenSet) -> Result<Option<Plt>, Error> {
    let mut a_vals = Vec::new();
    let mut b_vals = Vec::new();
    for c in space.components(domain)? {
        let seen = space.meet(&c, plt.domain())?;
        let (a, b) = if seen.is_empty() {
            (Rat::one(), Rat::zero())
        } else {
            match (plt.a.restrict(&seen)?.constant_value(), plt.b.restrict(&seen)?.constant_value()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(None),
            }
        };
        a_vals.push((c.clone(), a));
        b_vals.push((c, b));
    }
    Ok(Some(Plt {
        a: Section::from_components(space, domain, &a_vals)?,
        b: Section::from_components(space, domain, &b_vals)?,
    }))
}

/// One piece of the strict part of a classical carrier and the family pair
/// ranked on it.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictPiece {
    pub open: OpenSet,
    pub worse: usize,
    pub better: usize,
    /// 1 on `open`, 0 elsewhere on the carrier.
    pub indicator: Section,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalRep {
    pub global: GlobalRep,
    /// Where every pair is indifferent.
    pub indifferent: OpenSet,
    pub pieces: Vec<StrictPiece>,
    /// The glued worse and better lotteries on the strict part.
    pub zero: Option<Lottery>,
    pub unit: Option<Lottery>,
    pub soundness: Soundness,
    /// The weak order, independence and continuity checks rerun on the
    /// expected-utility ranking of the glued weights.
    pub necessity: Vec<AxiomReport>,
}

fn require_pass(what: &str, report: &AxiomReport) -> Result<(), Error> {
    match report.violations().next() {
        None => Ok(()),
        Some(v) => Err(Error::Precondition(format!("{what} fails: {}", v.condition()))),
    }
}

fn axiom_reports(
    pref: &dyn Ranking,
    family: &[(String, Lottery)],
    resolution: &Rat,
) -> Result<Vec<AxiomReport>, Error> {
    let space = pref.space();
    let x = space.carrier();
    let mixers = vec![("1/2".to_string(), Section::constant(space, &x, half())?)];
    Ok(vec![
        check_weak_order(pref, family, &x)?,
        check_independence(pref, family, &mixers, &x)?,
        check_continuity(pref, family, &x, resolution)?,
    ])
}

/// Expected utility on a space where every open is closed: split off the
/// indifferent part, pick a strictly ranked family pair on each remaining
/// clopen piece, glue those pairs into one zero and unit, and calibrate.
pub fn classical_representation(
    pref: &dyn Ranking,
    family: &[(String, Lottery)],
    prizes: usize,
    resolution: &Rat,
) -> Result<ClassicalRep, Error> {
    let space = pref.space();
    if let Classicality::NonClassical { witness } = space.is_classical() {
        return Err(Error::Precondition(format!(
            "the space is not classical: the complement of {} is not open",
            space.show(&witness)
        )));
    }
    for (what, r) in ["weak order", "independence", "continuity"].iter().zip(axiom_reports(pref, family, resolution)?) {
        require_pass(what, &r)?;
    }
    let x = space.carrier();
    let indifferent = pref.indifference_region(&x)?;
    let strict_part = space.not(&indifferent)?;

    let mut covered = space.empty();
    let mut pieces = Vec::new();
    let mut zeros = Vec::new();
    let mut units = Vec::new();
    'pairs: for (i, (_, p)) in family.iter().enumerate() {
        for (j, (_, q)) in family.iter().enumerate() {
            if space.is_subset(&strict_part, &covered)? {
                break 'pairs;
            }
            let within = space.meet(&space.meet(&strict_part, p.domain())?, q.domain())?;
            if within.is_empty() {
                continue;
            }
            let ranked = truth_value(pref, Relation::Prec, p, q, &within)?;
            let fresh = space.meet(&ranked, &space.not(&covered)?)?;
            if fresh.is_empty() {
                continue;
            }
            let values: Vec<(OpenSet, Rat)> = space
                .components(&x)?
                .into_iter()
                .map(|c| {
                    let inside = space.is_subset(&c, &fresh)?;
                    Ok((c, if inside { Rat::one() } else { Rat::zero() }))
                })
                .collect::<Result<_, Error>>()?;
            let indicator = Section::from_components(space, &x, &values)?;
            zeros.push(p.restrict(&fresh)?);
            units.push(q.restrict(&fresh)?);
            covered = space.join(&covered, &fresh)?;
            pieces.push(StrictPiece { open: fresh, worse: i, better: j, indicator });
        }
    }
    if !space.is_subset(&strict_part, &covered)? {
        let point = space.region_witness(&space.difference(&strict_part, &covered)?).expect("non-empty");
        return Err(Error::Precondition(format!(
            "no family pair is strictly ranked at {}",
            space.show_point(&point)
        )));
    }

    let mut locals = Vec::new();
    let (mut zero, mut unit) = (None, None);
    if !strict_part.is_empty() {
        let cover: Vec<OpenSet> = pieces.iter().map(|p| p.open.clone()).collect();
        let glued = |parts: Vec<Lottery>| -> Result<Lottery, Error> {
            glue_lotteries(space, &CompatibleFamily::new(cover.clone(), parts)?)?
                .ok()
                .ok_or_else(|| Error::Invalid("strict pieces overlap".into()))
        };
        let (z, u) = (glued(zeros)?, glued(units)?);
        match local_representation(pref, &strict_part, &Calib::Pair(z.clone(), u.clone()), family, prizes, resolution)? {
            LocalOutcome::Rep(r) => locals.push(r),
            LocalOutcome::Obstructed { reason, .. } => return Err(Error::Invalid(reason)),
        }
        (zero, unit) = (Some(z), Some(u));
    }
    if !indifferent.is_empty() {
        match local_representation(pref, &indifferent, &Calib::AllIndifferent, family, prizes, resolution)? {
            LocalOutcome::Rep(r) => locals.push(r),
            LocalOutcome::Obstructed { reason, .. } => return Err(Error::Invalid(reason)),
        }
    }
    let global = match glue_representations(space, &x, locals)? {
        Glue::Global(g) => g,
        Glue::Obstructed(o) => return Err(Error::Invalid(o.reason)),
    };
    let soundness = check_soundness(pref, &global.weights, &x, family)?;
    let induced = UtilityInduced::new(space, global.weights.clone())?;
    let necessity = axiom_reports(&induced, family, resolution)?;
    Ok(ClassicalRep { global, indifferent, pieces, zero, unit, soundness, necessity })
}

/// Constant weights from a worst and a best prize, when every pair of point
/// masses is ranked the same way everywhere.
pub fn constant_prize_representation(
    pref: &dyn Ranking,
    worst: usize,
    best: usize,
    prizes: usize,
    resolution: &Rat,
) -> Result<GlobalRep, Error> {
    let space = pref.space();
    let x = space.carrier();
    let deltas: Vec<(String, Lottery)> = (0..prizes)
        .map(|z| Lottery::delta(space, &x, z).map(|l| (format!("prize {z}"), l)))
        .collect::<Result<_, _>>()?;
    if let Some(v) = check_constant_rankings(pref, &deltas)?.first() {
        return Err(Error::Precondition(format!(
            "prizes {} and {} are not ranked uniformly: ≺ holds on {}, ≻ on {}",
            v.p,
            v.q,
            space.show(&v.prec),
            space.show(&v.succ)
        )));
    }
    let (lo, hi) = (&deltas[worst].1, &deltas[best].1);
    let mut weights = Vec::with_capacity(prizes);
    for (z, (_, d)) in deltas.iter().enumerate() {
        let value = if z == worst {
            Rat::zero()
        } else if z == best {
            Rat::one()
        } else {
            let c = solve_calibration(pref, hi, d, lo, &x, resolution)?;
            c.weight
                .constant_value()
                .filter(|_| c.exact)
                .ok_or_else(|| Error::Invalid(format!("the weight of prize {z} is not an exact constant")))?
        };
        weights.push(Section::constant(space, &x, value)?);
    }
    let local = LocalRep {
        domain: x.clone(),
        calibration: Some((lo.clone(), hi.clone())),
        weights: weights.clone(),
        exact: true,
        soundness: check_soundness(pref, &weights, &x, &deltas)?,
    };
    Ok(GlobalRep {
        target: x.clone(),
        cover: vec![x.clone()],
        locals: vec![local],
        alignments: vec![Plt::identity(space, &x)?],
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::fixtures::{example2, example3};
    use crate::preference::{default_resolution, LocalRanking, Tabulated};
    use crate::rational::{int, ratio};

    #[test]
    fn example2_glues_on_the_discrete_part_but_not_on_the_carrier() {
        let (space, t) = example2();
        let fam = t.family().clone();
        let mut locals = Vec::new();
        for (name, zero, unit) in [("1", 1, 0), ("2", 0, 1)] {
            let w = space.open_named(&[name]).unwrap();
            let calib = Calib::Pair(fam[zero].1.clone(), fam[unit].1.clone());
            locals.push(local_representation(&t, &w, &calib, &fam, 2, &default_resolution()).unwrap().rep().unwrap());
        }
        let both = space.open_named(&["1", "2"]).unwrap();
        let g = glue_representations(&space, &both, locals.clone()).unwrap().global().unwrap();
        assert_eq!(g.weights[0].show(&space), "{1}:1 {2}:0");
        let Glue::Obstructed(o) = glue_representations(&space, &space.carrier(), locals).unwrap() else {
            panic!("expected an obstruction")
        };
        assert_eq!(o.point, Point::Node(0));
        assert!(o.reason.contains("{0,1,2}"), "{}", o.reason);
    }

    #[test]
    fn a_single_cover_element_is_returned_unchanged() {
        let (space, u) = example3();
        let x = space.carrier();
        let rep = LocalRep {
            domain: x.clone(),
            calibration: None,
            weights: u.weights().to_vec(),
            exact: true,
            soundness: Soundness::default(),
        };
        let g = glue_representations(&space, &x, vec![rep]).unwrap().global().unwrap();
        assert_eq!(g.weights, u.weights());
    }

    #[test]
    fn overlapping_charts_are_aligned() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let ws = vec![Section::constant(&space, &x, int(0)).unwrap(), Section::constant(&space, &x, int(1)).unwrap()];
        let u = UtilityInduced::new(&space, ws).unwrap();
        let cover = crate::preference::split_cover(&space, &x).unwrap();
        let d: Vec<Lottery> = (0..2).map(|z| Lottery::delta(&space, &x, z).unwrap()).collect();
        let mut locals = Vec::new();
        for w in &cover {
            let rep = local_representation(&u, w, &Calib::Pair(d[0].clone(), d[1].clone()), &[], 2, &default_resolution())
                .unwrap()
                .rep()
                .unwrap();
            // "(1/3,1]" sorts first and fixes the shared chart; rescale the other.
            let rep = if space.show(w).starts_with('[') {
                let plt = Plt {
                    a: Section::constant(&space, w, int(4)).unwrap(),
                    b: Section::constant(&space, w, int(-2)).unwrap(),
                };
                LocalRep { weights: plt.apply(&rep.weights).unwrap(), ..rep }
            } else {
                rep
            };
            locals.push(rep);
        }
        let g = glue_representations(&space, &x, locals).unwrap().global().unwrap();
        assert_eq!(g.weights[0].constant_value(), Some(int(0)));
        assert_eq!(g.weights[1].constant_value(), Some(int(1)));
    }

    #[test]
    fn classical_two_points() {
        let space = Space::poset(&["a", "b"], &[]).unwrap();
        let x = space.carrier();
        let d: Vec<Lottery> = (0..2).map(|z| Lottery::delta(&space, &x, z).unwrap()).collect();
        let family = vec![("d1".to_string(), d[0].clone()), ("d2".to_string(), d[1].clone())];
        let entries = vec![LocalRanking::Scores(vec![int(0), int(1)]), LocalRanking::Order(vec![])];
        let t = Tabulated::new(&space, family.clone(), entries).unwrap();
        let c = classical_representation(&t, &family, 2, &default_resolution()).unwrap();
        assert_eq!(c.global.weights[0].show(&space), "{a}:0 {b}:0");
        assert_eq!(c.global.weights[1].show(&space), "{a}:1 {b}:0");
        assert_eq!(space.show(&c.indifferent), "{b}");
        assert_eq!(c.pieces.len(), 1);
        assert_eq!(c.pieces[0].indicator.show(&space), "{a}:1 {b}:0");
        assert!(c.soundness.holds());
        assert!(c.necessity.iter().all(|r| r.passed()));
    }

    #[test]
    fn example2_is_not_classical() {
        let (_, t) = example2();
        let err = classical_representation(&t, t.family(), 2, &default_resolution()).unwrap_err();
        assert!(err.to_string().contains("{1}"), "{err}");
    }

    #[test]
    fn constant_weights_are_recovered() {
        let space = Space::interval(int(0), int(1)).unwrap();
        let x = space.carrier();
        let ws: Vec<Section> =
            [int(0), ratio(1, 3), int(1)].into_iter().map(|v| Section::constant(&space, &x, v).unwrap()).collect();
        let u = UtilityInduced::new(&space, ws.clone()).unwrap();
        let g = constant_prize_representation(&u, 0, 2, 3, &default_resolution()).unwrap();
        assert_eq!(g.weights, ws);
    }

    #[test]
    fn example3_has_no_constant_weights() {
        let (_, u) = example3();
        let err = constant_prize_representation(&u, 0, 1, 2, &default_resolution()).unwrap_err();
        assert!(err.to_string().contains("[0,1)"), "{err}");
    }
}
