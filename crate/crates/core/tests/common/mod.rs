//! Generators and independent oracles shared by the property suites and the
//! acceptance run.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sheaf_eu::lottery::Lottery;
use sheaf_eu::preference::UtilityInduced;
use sheaf_eu::rational::{int, ratio, Rat};
use sheaf_eu::sections::Section;
use sheaf_eu::topology::{OpenSet, Point, Space, Span};

pub const DENOM: i64 = 12;

/// A random open of `[0,1]` with endpoints on the `1/DENOM` grid.
pub fn random_open(rng: &mut ChaCha8Rng, space: &Space) -> OpenSet {
    let mut cuts: Vec<i64> = (0..=DENOM).filter(|_| rng.gen_bool(0.35)).collect();
    if rng.gen_bool(0.3) {
        cuts.insert(0, 0);
    }
    if rng.gen_bool(0.3) {
        cuts.push(DENOM);
    }
    cuts.dedup();
    let mut spans = Vec::new();
    for w in cuts.chunks(2) {
        if let [a, b] = *w {
            if a < b {
                let lo_closed = a == 0 && rng.gen_bool(0.5);
                let hi_closed = b == DENOM && rng.gen_bool(0.5);
                spans.push(Span::new(ratio(a, DENOM), lo_closed, ratio(b, DENOM), hi_closed).unwrap());
            }
        }
    }
    space.open_spans(spans).unwrap()
}

/// Points where membership in any grid-aligned region can change, plus one
/// point inside every gap between them.
pub fn probe_points() -> Vec<Rat> {
    let mut out = Vec::new();
    for k in 0..=DENOM {
        out.push(ratio(k, DENOM));
        if k < DENOM {
            out.push(ratio(2 * k + 1, 2 * DENOM));
        }
    }
    out
}

pub fn member(u: &OpenSet, x: &Rat) -> bool {
    u.contains(&Point::Real(x.clone()))
}

/// Interior of a grid-aligned predicate, decided cell by cell: a grid point
/// is interior when it and its neighbouring gap cells all satisfy it.
pub fn interior_oracle(pred: impl Fn(&Rat) -> bool) -> impl Fn(&Rat) -> bool {
    move |x: &Rat| {
        if !pred(x) {
            return false;
        }
        let scaled = x * int(2 * DENOM);
        if !scaled.is_integer() || (scaled.to_integer() % 2u8) != 0.into() {
            return true;
        }
        let step = ratio(1, 2 * DENOM);
        let left = x - &step;
        let right = x + &step;
        (left < int(0) || pred(&left)) && (right > int(1) || pred(&right))
    }
}

/// Checks the Heyting identities on a triple, returning the first failure.
pub fn heyting_laws(space: &Space, a: &OpenSet, b: &OpenSet, c: &OpenSet) -> Result<(), String> {
    let meet = |u: &OpenSet, v: &OpenSet| space.meet(u, v).unwrap();
    let join = |u: &OpenSet, v: &OpenSet| space.join(u, v).unwrap();
    let imp = |u: &OpenSet, v: &OpenSet| space.implies(u, v).unwrap();
    let not = |u: &OpenSet| space.not(u).unwrap();
    let le = |u: &OpenSet, v: &OpenSet| space.is_subset(u, v).unwrap();
    let (top, bot) = (space.carrier(), space.empty());
    let checks: Vec<(&str, bool)> = vec![
        ("meet commutes", meet(a, b) == meet(b, a)),
        ("join commutes", join(a, b) == join(b, a)),
        ("meet associates", meet(&meet(a, b), c) == meet(a, &meet(b, c))),
        ("join associates", join(&join(a, b), c) == join(a, &join(b, c))),
        ("absorption", meet(a, &join(a, b)) == *a && join(a, &meet(a, b)) == *a),
        ("distributivity", meet(a, &join(b, c)) == join(&meet(a, b), &meet(a, c))),
        ("modus ponens", meet(a, &imp(a, b)) == meet(a, b)),
        ("b below a→b", le(b, &imp(a, b))),
        ("a→a is top", imp(a, a) == top),
        ("→ distributes over meet", imp(a, &meet(b, c)) == meet(&imp(a, b), &imp(a, c))),
        ("residuation", le(&meet(c, a), b) == le(c, &imp(a, b))),
        ("¬ is →⊥", not(a) == imp(a, &bot)),
        ("a below ¬¬a", le(a, &not(&not(a)))),
        ("¬¬¬a = ¬a", not(&not(&not(a))) == not(a)),
        ("De Morgan", not(&join(a, b)) == meet(&not(a), &not(b))),
        ("non-contradiction", meet(a, &not(a)) == bot),
        ("bounds", meet(a, &top) == *a && join(a, &bot) == *a),
    ];
    match checks.into_iter().find(|(_, ok)| !ok) {
        Some((law, _)) => Err(format!("{law} fails for {}, {}, {}", space.show(a), space.show(b), space.show(c))),
        None => Ok(()),
    }
}

/// Compares the implication with the pointwise interior oracle.
pub fn implication_matches_oracle(space: &Space, a: &OpenSet, b: &OpenSet) -> bool {
    let got = space.implies(a, b).unwrap();
    let oracle = interior_oracle(|x: &Rat| !member(a, x) || member(b, x));
    probe_points().iter().all(|x| member(&got, x) == oracle(x))
}

/// A random piecewise-linear section on `[0,1]` with values in `[lo, hi]`.
pub fn random_pl(rng: &mut ChaCha8Rng, x: &OpenSet, lo: i64, hi: i64) -> Section {
    let n = rng.gen_range(1..=4);
    let mut xs: Vec<i64> = (1..DENOM).filter(|_| rng.gen_bool(0.25)).take(n).collect();
    xs.insert(0, 0);
    xs.push(DENOM);
    let knots = xs
        .into_iter()
        .map(|k| (ratio(k, DENOM), ratio(rng.gen_range(lo * 8..=hi * 8), 8)))
        .collect();
    Section::from_knots(x, knots).unwrap()
}

/// A utility-induced instance on `[0,1]` with prizes worst, middle, best,
/// and the exact mixing weight of the middle prize.
pub struct CalibrationInstance {
    pub space: Space,
    pub pref: UtilityInduced,
    pub worst: Lottery,
    pub middle: Lottery,
    pub best: Lottery,
    pub w: OpenSet,
    /// `u_middle = u_worst + t·(u_best − u_worst)` by construction.
    pub t: Section,
}

pub fn calibration_instance(rng: &mut ChaCha8Rng) -> CalibrationInstance {
    let space = Space::interval(int(0), int(1)).unwrap();
    let x = space.carrier();
    let u0 = random_pl(rng, &x, -2, 2);
    // One of the spread and the position is constant so that the middle
    // weight stays piecewise-linear.
    let (spread, t) = if rng.gen_bool(0.5) {
        let d = ratio(rng.gen_range(1..=16), 4);
        (Section::constant(&space, &x, d).unwrap(), random_pl(rng, &x, 0, 1))
    } else {
        let tv = ratio(rng.gen_range(0..=16), 16);
        (random_pl(rng, &x, 1, 3), Section::constant(&space, &x, tv).unwrap())
    };
    let u2 = u0.add(&spread).unwrap();
    let u1 = u0.add(&t.mul(&spread).unwrap()).unwrap();
    let pref = UtilityInduced::new(&space, vec![u0, u1, u2]).unwrap();
    let mut w = random_open(rng, &space);
    while w.is_empty() {
        w = random_open(rng, &space);
    }
    let d = |z| Lottery::delta(&space, &x, z).unwrap();
    CalibrationInstance { worst: d(0), middle: d(1), best: d(2), t: t.restrict(&w).unwrap(), w, pref, space }
}

/// Three prizes on `[0,1]` with the first strictly worst and the last
/// strictly best everywhere, plus a few constant lotteries.
pub fn utility_world(seed: u64) -> (Space, UtilityInduced, Vec<(String, Lottery)>, ChaCha8Rng) {
    let mut r = rng(seed);
    let space = Space::interval(int(0), int(1)).unwrap();
    let x = space.carrier();
    // The middle prize sits between the outer two, so every mixing weight
    // against the outer pair is piecewise-linear.
    let spread = ratio(r.gen_range(1..=8), 2);
    let u0 = random_pl(&mut r, &x, -1, 1);
    let t = random_pl(&mut r, &x, 0, 1);
    let u1 = u0.add(&t.scale(&spread)).unwrap();
    let u2 = u0.add_const(&spread);
    let pref = UtilityInduced::new(&space, vec![u0, u1, u2]).unwrap();
    let mut family = Vec::new();
    for (k, z) in [0, 1, 2].into_iter().enumerate() {
        family.push((format!("d{k}"), Lottery::delta(&space, &x, z).unwrap()));
    }
    for k in 0..3 {
        let a = r.gen_range(0..=8);
        let b = r.gen_range(0..=8 - a);
        let probs = [(0, ratio(a, 8)), (1, ratio(b, 8)), (2, ratio(8 - a - b, 8))];
        family.push((format!("m{k}"), Lottery::constant(&space, &x, &probs).unwrap()));
    }
    (space, pref, family, r)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bundled scenario files, sorted by name.
pub fn bundled_scenarios() -> Vec<std::path::PathBuf> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    v.sort();
    v
}
