//! One pass/fail line per acceptance criterion. Exits non-zero when any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sheaf_eu::forcing::{eval_formula, parse_formula, Env, Value};
use sheaf_eu::lottery::{mix, Lottery};
use sheaf_eu::preference::{
    check_constant_rankings, check_minimal_comparability, truth_value, Comparability, Ranking, Relation,
};
use sheaf_eu::rational::{dyadic, int, ratio, Rat};
use sheaf_eu::representation::local::restrict_rep;
use sheaf_eu::representation::{
    classical_representation, glue_representations, harmonize_complex, local_representation, solve_calibration,
    uniqueness_transform, Calib, Glue, Harmonized, LocalRep, ScalarPlt, Transform,
};
use sheaf_eu::scenario::parse::{CalibSpec, TaskKind};
use sheaf_eu::scenario::{build, golden_path, parse_scenario, run_source, World};
use sheaf_eu::sections::{compare, Section};
use sheaf_eu::topology::{OpenSet, Point, Space, Span};
use sheaf_eu::Error;

use common::{
    bundled_scenarios, calibration_instance, heyting_laws, implication_matches_oracle, member, probe_points,
    random_open, rng, utility_world,
};

type Check = Result<String, Box<dyn std::error::Error>>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+).into());
        }
    };
}

fn load(file: &str) -> Result<World, Box<dyn std::error::Error>> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(file);
    Ok(build(&parse_scenario(&std::fs::read_to_string(path)?)?)?)
}

fn pref_of(world: &World) -> Result<&dyn Ranking, String> {
    world.pref.as_ref().map(|p| p as &dyn Ranking).ok_or_else(|| "no preference".to_string())
}

fn expect_open(space: &Space, got: &OpenSet, want: &str, what: &str) -> Result<(), String> {
    let shown = space.show(got);
    if shown == want {
        Ok(())
    } else {
        Err(format!("{what}: expected {want}, got {shown}"))
    }
}

/// Expected utility at one point, straight from coordinates and weights.
fn eu_at(l: &Lottery, weights: &[Section], x: &Point) -> Rat {
    l.coords()
        .iter()
        .map(|(i, c)| c.eval(x).expect("coordinate defined") * weights[*i].eval(x).expect("weight defined"))
        .sum()
}

/// Points at which the pointwise oracle is consulted, and the neighbourhood
/// whose values decide interior membership.
fn oracle_points(space: &Space, w: &OpenSet) -> Vec<(Point, Vec<Point>)> {
    match space.bounds() {
        None => space
            .point_list(w)
            .into_iter()
            .map(|x| {
                let up = space.minimal_open(&x).expect("point of the space");
                (x, space.point_list(&up))
            })
            .collect(),
        Some((lo, hi)) => {
            let h = dyadic(30);
            (0..=96)
                .map(|k| lo + (hi - lo) * ratio(k, 96))
                .filter(|x| member(w, x))
                .map(|x| {
                    let near = [&x - &h, x.clone(), &x + &h]
                        .into_iter()
                        .filter(|y| member(w, y))
                        .map(Point::Real)
                        .collect();
                    (Point::Real(x), near)
                })
                .collect()
        }
    }
}

/// Checks `⟦p ≺ q⟧ = ⟦EU p < EU q⟧` and `⟦p ∼ q⟧ = ⟦EU p = EU q⟧` on `w`
/// against a pointwise oracle. Returns the number of pairs checked.
fn identities(
    pref: &dyn Ranking,
    weights: &[Section],
    w: &OpenSet,
    family: &[(String, Lottery)],
) -> Result<usize, Box<dyn std::error::Error>> {
    let space = pref.space();
    let points = oracle_points(space, w);
    let mut pairs = 0;
    for (pn, p) in family {
        for (qn, q) in family {
            if !space.is_subset(w, p.domain())? || !space.is_subset(w, q.domain())? {
                continue;
            }
            let lt = truth_value(pref, Relation::Prec, p, q, w)?;
            let sim = truth_value(pref, Relation::Sim, p, q, w)?;
            let (pr, qr) = (p.restrict(w)?, q.restrict(w)?);
            for (x, near) in &points {
                // A strict inequality between continuous functions is open,
                // so on intervals the point itself decides.
                let strict_at = |y: &Point| eu_at(&pr, weights, y) < eu_at(&qr, weights, y);
                let want_lt = if space.is_finite() { near.iter().all(strict_at) } else { strict_at(x) };
                let want_sim = near.iter().all(|y| eu_at(&pr, weights, y) == eu_at(&qr, weights, y));
                ensure!(lt.contains(x) == want_lt, "{pn} ≺ {qn} at {}", space.show_point(x));
                ensure!(sim.contains(x) == want_sim, "{pn} ∼ {qn} at {}", space.show_point(x));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

fn criterion1() -> Check {
    let world = load("example2.scn")?;
    let (space, pref) = (&world.space, pref_of(&world)?);
    let x = space.carrier();
    let (d1, d2) = (world.lottery("d1")?, world.lottery("d2")?);
    expect_open(space, &truth_value(pref, Relation::Prec, d2, d1, &x)?, "{1}", "⟦δ2≺δ1⟧")?;
    expect_open(space, &truth_value(pref, Relation::Prec, d1, d2, &x)?, "{2}", "⟦δ1≺δ2⟧")?;
    expect_open(space, &truth_value(pref, Relation::Sim, d1, d2, &x)?, "∅", "⟦δ1∼δ2⟧")?;
    expect_open(space, &truth_value(pref, Relation::Precsim, d1, d2, &x)?, "{2}", "⟦δ1≾δ2⟧")?;
    let mut env = Env::new(space).with_pref(pref);
    env.insert("d1", Value::Lottery(d1.clone()));
    env.insert("d2", Value::Lottery(d2.clone()));
    let either = eval_formula(&parse_formula("(or (prec d1 d2) (prec d2 d1))")?, &x, &env)?;
    expect_open(space, &either, "{1,2}", "⟦δ1≺δ2 ∨ δ2≺δ1⟧")?;

    let family = world.family("F")?;
    match check_minimal_comparability(pref, &family)? {
        Comparability::Fail { point } => ensure!(space.show_point(&point) == "0", "witness {}", space.show_point(&point)),
        Comparability::Pass { .. } => return Err("minimal comparability passed".into()),
    }

    let top = space.open_named(&["1", "2"])?;
    let calib = Calib::Pair(world.lottery("lo")?.clone(), world.lottery("hi")?.clone());
    let rep = local_representation(pref, &top, &calib, &family, world.prizes.len(), &world.epsilon)?
        .rep()
        .ok_or("no local representation on {1,2}")?;
    ensure!(rep.soundness.holds() && rep.soundness.tested > 0, "local rep on {{1,2}} is not sound");
    let at = match glue_representations(space, &x, vec![rep])? {
        Glue::Obstructed(o) => space.show_point(&o.point),
        Glue::Global(_) => return Err("gluing to X succeeded".into()),
    };
    ensure!(at == "0", "obstruction at {at}");
    Ok("forcings {1}, {2}, {1,2}, ∅; witness 0; glue obstructed at 0".into())
}

fn criterion2() -> Check {
    let world = load("example3.scn")?;
    let (space, pref) = (&world.space, pref_of(&world)?);
    let x = space.carrier();
    let (d1, d2) = (world.lottery("d1")?, world.lottery("d2")?);
    expect_open(space, &truth_value(pref, Relation::Prec, d1, d2, &x)?, "[0,1)", "⟦δ1≺δ2⟧")?;
    expect_open(space, &truth_value(pref, Relation::Prec, d2, d1, &x)?, "(1,2]", "⟦δ2≺δ1⟧")?;
    expect_open(space, &truth_value(pref, Relation::Sim, d1, d2, &x)?, "∅", "⟦δ1∼δ2⟧")?;
    ensure!(!check_constant_rankings(pref, &world.family("F")?)?.is_empty(), "constant rankings passed");

    let (v, w) = (&world.weights["v"], &world.weights["w"]);
    let Transform::Obstructed(o) = uniqueness_transform(space, v, w, &x)? else {
        return Err("a single transform was found".into());
    };
    ensure!(o.point == Point::Real(int(1)), "obstruction at {}", space.show_point(&o.point));
    let left = space.open_spans(vec![Span::new(int(0), true, int(1), false).ok_or("span")?])?;
    let right = space.open_spans(vec![Span::new(int(1), false, int(2), true).ok_or("span")?])?;
    for (side, want) in [(&left, ratio(1, 2)), (&right, int(1))] {
        let a = o.partial.a.restrict(side)?.constant_value();
        ensure!(a.as_ref() == Some(&want), "a on {} is {a:?}", space.show(side));
    }
    // Per-side ratio oracle: a = Δw/Δv and b = w − a·v at sample points.
    let mut sampled = 0;
    for k in (0..=32).filter(|&k| k != 16) {
        let pt = Point::Real(ratio(k, 16));
        let ev = |s: &Section| s.eval(&pt).expect("defined on X");
        let a = (ev(&w[0]) - ev(&w[1])) / (ev(&v[0]) - ev(&v[1]));
        let b = ev(&w[0]) - &a * ev(&v[0]);
        ensure!(o.partial.a.eval(&pt) == Some(a.clone()), "a at {k}/16");
        ensure!(o.partial.b.eval(&pt) == Some(b), "b at {k}/16");
        ensure!(a == if k < 16 { ratio(1, 2) } else { int(1) }, "ratio at {k}/16 is {a}");
        sampled += 1;
    }
    let (l, r) = (o.limits.left.as_ref(), o.limits.right.as_ref());
    ensure!(l.map(|p| &p.0) == Some(&ratio(1, 2)) && r.map(|p| &p.0) == Some(&int(1)), "one-sided limits {l:?} {r:?}");
    Ok(format!("[0,1), (1,2], ∅; a = 1/2 | 1 with obstruction at 1; {sampled} ratio samples"))
}

fn criterion3() -> Check {
    let branching = Space::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")])?;
    let sierpinski = Space::poset(&["0", "1"], &[("0", "1")])?;
    let mut triples = 0;
    for space in [&branching, &sierpinski] {
        let opens = space.opens()?;
        for a in &opens {
            for b in &opens {
                for c in &opens {
                    heyting_laws(space, a, b, c)?;
                    triples += 1;
                }
            }
        }
    }
    let discrete = Space::poset(&["a", "b", "c"], &[])?;
    for u in discrete.opens()? {
        ensure!(discrete.join(&u, &discrete.not(&u)?)? == discrete.carrier(), "excluded middle fails on a discrete space");
    }
    let one = sierpinski.open_named(&["1"])?;
    expect_open(&sierpinski, &sierpinski.join(&one, &sierpinski.not(&one)?)?, "{1}", "⟦{1} ∨ ¬{1}⟧")?;

    let interval = Space::interval(int(0), int(1))?;
    let mut r = rng(3);
    for _ in 0..1000 {
        let (a, b, c) = (random_open(&mut r, &interval), random_open(&mut r, &interval), random_open(&mut r, &interval));
        heyting_laws(&interval, &a, &b, &c)?;
        ensure!(implication_matches_oracle(&interval, &a, &b), "implication oracle differs");
    }
    Ok(format!("{triples} exhaustive triples, 1000 interval triples, LEM {{1}} on Sierpiński"))
}

fn criterion4() -> Check {
    let eps = dyadic(20);
    let mut r = rng(4);
    for i in 0..200 {
        let inst = calibration_instance(&mut r);
        let (space, w) = (&inst.space, &inst.w);
        let c = solve_calibration(&inst.pref, &inst.best, &inst.middle, &inst.worst, w, &eps)?;
        let (lower, upper) = (&c.state.lower, &c.state.upper);
        ensure!(compare(space, lower, &inst.t, w)?.gt.is_empty(), "instance {i}: lower bound exceeds a*");
        ensure!(compare(space, &inst.t, upper, w)?.gt.is_empty(), "instance {i}: upper bound below a*");
        for x in probe_points().iter().filter(|x| member(w, x)) {
            let pt = Point::Real(x.clone());
            let (lo, t, hi) = (lower.eval(&pt).unwrap(), inst.t.eval(&pt).unwrap(), upper.eval(&pt).unwrap());
            ensure!(lo <= t && t <= hi, "instance {i}: {lo} ≤ {t} ≤ {hi} fails at {x}");
            ensure!(&hi - &lo <= eps, "instance {i}: gap {} at {x}", &hi - &lo);
        }
        ensure!(c.state.gap <= eps, "instance {i}: certified gap {}", c.state.gap);
        ensure!(c.closed_form.as_ref() == Some(&inst.t), "instance {i}: closed form differs");
        let (best, worst) = (inst.best.restrict(w)?, inst.worst.restrict(w)?);
        let m = mix(space, &inst.t, &best, &worst)?;
        ensure!(truth_value(&inst.pref, Relation::Sim, &inst.middle, &m, w)? == *w, "instance {i}: indifference fails");
    }
    Ok("200 instances sandwiched with gap ≤ 2^-20".into())
}

fn replay_representations(world: &World) -> Result<usize, Box<dyn std::error::Error>> {
    let Some(pref) = world.pref.as_ref() else { return Ok(0) };
    let (space, prizes, eps) = (&world.space, world.prizes.len(), &world.epsilon);
    let mut locals: BTreeMap<String, (LocalRep, Vec<(String, Lottery)>)> = BTreeMap::new();
    let mut pairs = 0;
    for task in &world.tasks {
        match &task.kind {
            TaskKind::Local { name, on, calib, family } => {
                let w = world.open(on)?;
                let fam = world.family(family)?;
                let calib = match calib {
                    CalibSpec::Pair(z, u) => Calib::Pair(world.lottery(z)?.clone(), world.lottery(u)?.clone()),
                    CalibSpec::Indifferent => Calib::AllIndifferent,
                };
                if let Some(rep) = local_representation(pref, &w, &calib, &fam, prizes, eps)?.rep() {
                    pairs += identities(pref, &rep.weights, &w, &fam)?;
                    locals.insert(name.clone(), (rep, fam));
                }
            }
            TaskKind::Glue { target, locals: names, .. } => {
                let target = world.open(target)?;
                let mut reps = Vec::new();
                let mut fam: Vec<(String, Lottery)> = Vec::new();
                for n in names {
                    let (rep, f) = locals.get(n).ok_or_else(|| format!("local `{n}` was obstructed"))?;
                    reps.push(rep.clone());
                    fam.extend(f.iter().filter(|(m, _)| fam.iter().all(|(k, _)| k != m)).cloned().collect::<Vec<_>>());
                }
                if let Glue::Global(g) = glue_representations(space, &target, reps)? {
                    pairs += identities(pref, &g.weights, &target, &fam)?;
                }
            }
            TaskKind::ClassicalRep { family } => {
                let fam = world.family(family)?;
                match classical_representation(pref, &fam, prizes, eps) {
                    Ok(c) => pairs += identities(pref, &c.global.weights, &space.carrier(), &fam)?,
                    Err(Error::Precondition(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            _ => {}
        }
    }
    Ok(pairs)
}

fn criterion5() -> Check {
    let mut pairs = 0;
    for path in bundled_scenarios() {
        let world = build(&parse_scenario(&std::fs::read_to_string(&path)?)?)?;
        pairs += replay_representations(&world).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    ensure!(pairs > 0, "no representation pairs in the bundled scenarios");
    let eps = dyadic(20);
    let mut squares = 0;
    for seed in 0u64.. {
        if squares == 100 {
            break;
        }
        let (space, pref, family, mut r) = utility_world(seed);
        let w = random_open(&mut r, &space);
        let v = space.meet(&w, &random_open(&mut r, &space))?;
        if v.is_empty() {
            continue;
        }
        let calib = Calib::Pair(family[0].1.clone(), family[2].1.clone());
        let on_w = local_representation(&pref, &w, &calib, &family, 3, &eps)?.rep().ok_or("obstructed on W")?;
        let on_v = local_representation(&pref, &v, &calib, &family, 3, &eps)?.rep().ok_or("obstructed on V")?;
        ensure!(restrict_rep(&on_w, &v)?.weights == on_v.weights, "seed {seed}: restriction square fails");
        identities(&pref, &on_v.weights, &v, &family)?;
        squares += 1;
    }
    Ok(format!("{pairs} scenario pairs, {squares} restriction squares"))
}

fn criterion6() -> Check {
    let world = load("classical_discrete.scn")?;
    let (space, pref) = (&world.space, pref_of(&world)?);
    let family = world.family("F")?;
    let x = space.carrier();
    let c = classical_representation(pref, &family, world.prizes.len(), &world.epsilon)?;
    ensure!(!c.pieces.is_empty(), "no strict pieces");
    for piece in &c.pieces {
        let rest = space.not(&piece.open)?;
        ensure!(space.join(&piece.open, &rest)? == x, "{} is not clopen", space.show(&piece.open));
        ensure!(*piece.indicator.domain() == x, "indicator is not global");
        for pt in space.point_list(&x) {
            let want = if piece.open.contains(&pt) { int(1) } else { int(0) };
            ensure!(piece.indicator.eval(&pt) == Some(want), "indicator at {}", space.show_point(&pt));
        }
    }
    ensure!(c.soundness.holds() && c.soundness.tested > 0, "soundness check failed");
    let pairs = identities(pref, &c.global.weights, &x, &family)?;

    let ex2 = load("example2.scn")?;
    match classical_representation(pref_of(&ex2)?, &ex2.family("F")?, ex2.prizes.len(), &ex2.epsilon) {
        Err(Error::Precondition(msg)) => ensure!(msg.contains("{1}"), "rejection without witness: {msg}"),
        other => return Err(format!("Example 2 was not rejected: {other:?}").into()),
    }
    Ok(format!("{} clopen pieces, {pairs} pairs sound; Example 2 rejected at {{1}}", c.pieces.len()))
}

fn criterion7() -> Check {
    let world = load("figure6_triangle.scn")?;
    let complex = world.complex.as_ref().ok_or("no complex")?;
    let Harmonized::Done(h) = harmonize_complex(complex, &world.charts)? else {
        return Err("harmonization obstructed".into());
    };
    let map = |f: &str, t: &str| h.map(f, t).cloned().ok_or_else(|| format!("no map {f} ⇝ {t}"));
    for p in &h.paths {
        let (first, second, direct) = (map(&p.rho, &p.sigma)?, map(&p.sigma, &p.tau)?, map(&p.rho, &p.tau)?);
        let composed = ScalarPlt { a: &second.a * &first.a, b: &second.a * &first.b + &second.b };
        ensure!(composed == direct && p.agrees, "{} ⇝ {} ⇝ {} does not commute", p.rho, p.sigma, p.tau);
    }
    ensure!(h.paths.len() == 6, "{} length-2 paths", h.paths.len());
    let oracle: BTreeMap<String, Rat> = [("a", int(0)), ("b", int(1)), ("c", int(2))]
        .into_iter()
        .map(|(v, x)| (v.to_string(), x))
        .collect();
    ensure!(h.charts.get("abc") == Some(&oracle), "chart on abc is {:?}", h.charts.get("abc"));
    for (v, want) in &oracle {
        let got = map(v, "abc")?.apply(&h.charts[v][v]);
        ensure!(got == *want, "vertex {v} lands at {got}");
    }
    Ok("6 paths commute; abc chart a:0 b:1 c:2".into())
}

fn criterion8() -> Check {
    let scenarios = bundled_scenarios();
    for path in &scenarios {
        let src = std::fs::read_to_string(path)?;
        let (first, second) = (run_source(&src, None)?.render(), run_source(&src, None)?.render());
        ensure!(first == second, "{}: two runs differ", path.display());
        ensure!(std::fs::read_to_string(golden_path(path))? == first, "{}: golden differs", path.display());
    }
    Ok(format!("{} scenarios byte-equal to their goldens", scenarios.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("Example 2 reproduction", Some(Duration::from_secs(1)), criterion1),
        ("Example 3 reproduction", Some(Duration::from_secs(1)), criterion2),
        ("Heyting and forcing suite", Some(Duration::from_secs(10)), criterion3),
        ("calibration certificate", Some(Duration::from_secs(30)), criterion4),
        ("representation soundness", None, criterion5),
        ("classical construction", None, criterion6),
        ("complex functoriality", None, criterion7),
        ("determinism", None, criterion8),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), l.as_secs()).into()),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({:.2} s): {detail}", k + 1, elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({:.2} s): {e}", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
