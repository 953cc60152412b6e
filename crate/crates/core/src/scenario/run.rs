//! Executing scenario tasks and rendering the report.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::forcing::{check_forcing_laws, eval_formula, parse_formula, Env, Value};
use crate::lottery::Lottery;
use crate::preference::{
    check_constant_rankings, check_continuity, check_global_pair, check_independence, check_minimal_comparability,
    check_weak_order, truth_value, AxiomReport, Comparability, CoverReason, GlobalPair, Preference, Relation,
    Verdict,
};
use crate::rational::fmt_rat;
use crate::representation::{
    check_monotonicity, classical_representation, constant_prize_representation, glue_representations,
    harmonize_complex, local_representation, solve_calibration, uniqueness_transform, Calib, Glue, GlobalRep,
    Harmonized, LocalOutcome, LocalRep, Plt, Transform,
};
use crate::sections::{compare, Section};
use crate::topology::{Classicality, OpenSet};
use crate::Error;

use super::export::{file_stem, open_csv, section_csv, weight_csv, CsvFile};
use super::parse::{self, CalibSpec, Expect, TaskDef, TaskKind};
use super::world::{describe_space, World};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// An obstruction, rejection or violation that the task asked for.
    ExpectedNegative,
    Failed(String),
}

impl Status {
    pub fn ok(&self) -> bool {
        !matches!(self, Status::Failed(_))
    }
}

#[derive(Clone, Debug)]
pub struct TaskReport {
    pub index: usize,
    pub text: String,
    pub lines: Vec<String>,
    pub status: Status,
    pub files: Vec<CsvFile>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub header: Vec<String>,
    pub tasks: Vec<TaskReport>,
    /// One table per declared section.
    pub sections: Vec<CsvFile>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.tasks.iter().filter(|t| !t.status.ok()).count()
    }

    /// The report text; it holds no timings, so reruns are byte-identical.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            out.push_str(h);
            out.push('\n');
        }
        for t in &self.tasks {
            out.push_str(&format!("\n[{}] {}\n", t.index, t.text));
            for l in &t.lines {
                out.push_str(&format!("  {l}\n"));
            }
            let status = match &t.status {
                Status::Ok => "ok".to_string(),
                Status::ExpectedNegative => "ok (negative outcome expected)".to_string(),
                Status::Failed(why) => format!("FAILED: {why}"),
            };
            out.push_str(&format!("  status: {status}\n"));
        }
        let failed = self.failures();
        out.push_str(&format!(
            "\nsummary: {} tasks, {} ok, {} failed\n",
            self.tasks.len(),
            self.tasks.len() - failed,
            failed
        ));
        out
    }

    /// Every CSV file, section tables first.
    pub fn files(&self) -> Vec<CsvFile> {
        let mut all = self.sections.clone();
        for t in &self.tasks {
            all.extend(t.files.iter().cloned());
        }
        all
    }

    pub fn timings(&self) -> Vec<(usize, Duration)> {
        self.tasks.iter().map(|t| (t.index, t.elapsed)).collect()
    }
}

struct Outcome {
    lines: Vec<String>,
    negative: bool,
    value: Option<OpenSet>,
    files: Vec<CsvFile>,
}

impl Outcome {
    fn new(lines: Vec<String>) -> Outcome {
        Outcome { lines, negative: false, value: None, files: Vec::new() }
    }

    fn negative(lines: Vec<String>) -> Outcome {
        Outcome { negative: true, ..Outcome::new(lines) }
    }
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Unresolved(m) if !m.starts_with("line ") => Error::Unresolved(format!("line {line}: {m}")),
        Error::Parse(m) if !m.starts_with("line ") => Error::Parse(format!("line {line}: {m}")),
        other => other,
    }
}

fn relation(r: &parse::Relation) -> Relation {
    match r {
        parse::Relation::Prec => Relation::Prec,
        parse::Relation::Sim => Relation::Sim,
        parse::Relation::Precsim => Relation::Precsim,
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

struct Runner<'w> {
    world: &'w World,
    locals: BTreeMap<String, LocalRep>,
    globals: BTreeMap<String, GlobalRep>,
}

impl<'w> Runner<'w> {
    fn pref(&self) -> Result<&'w Preference, Error> {
        self.world.pref.as_ref().ok_or_else(|| Error::Parse("the task needs a preference".into()))
    }

    fn lottery(&self, name: &str) -> Result<&'w Lottery, Error> {
        self.world.lottery(name)
    }

    fn family(&self, name: &str) -> Result<Vec<(String, Lottery)>, Error> {
        self.world.family(name)
    }

    fn section(&self, name: &str) -> Result<Section, Error> {
        self.world.section(name).cloned().ok_or_else(|| Error::Unresolved(format!("section `{name}`")))
    }

    fn section_on(&self, name: &str, on: &OpenSet) -> Result<Section, Error> {
        self.section(name)?.restrict(on)
    }

    /// Declared weights, or the weights of a local or glued representation.
    fn weights(&self, name: &str) -> Result<Vec<Section>, Error> {
        if let Some(w) = self.world.weights.get(name) {
            return Ok(w.clone());
        }
        if let Some(l) = self.locals.get(name) {
            return Ok(l.weights.clone());
        }
        if let Some(g) = self.globals.get(name) {
            return Ok(g.weights.clone());
        }
        Err(Error::Unresolved(format!("weights `{name}`")))
    }

    fn show(&self, u: &OpenSet) -> String {
        self.world.space.show(u)
    }

    fn weight_lines(&self, weights: &[Section]) -> Vec<String> {
        weights
            .iter()
            .enumerate()
            .map(|(z, w)| format!("u({}) = {}", self.world.prizes.name(z), w.show(&self.world.space)))
            .collect()
    }

    fn weight_files(&self, dir: &str, weights: &[Section]) -> Vec<CsvFile> {
        weights
            .iter()
            .enumerate()
            .map(|(z, w)| CsvFile {
                name: format!("{dir}/{}.csv", file_stem(self.world.prizes.name(z))),
                body: weight_csv(&self.world.space, w),
            })
            .collect()
    }

    fn env(&self) -> Result<Env<'w>, Error> {
        let world = self.world;
        let mut env = Env::new(&world.space);
        if let Some(p) = &world.pref {
            env = env.with_pref(p);
        }
        for (n, s) in &world.sections {
            env.insert(n, Value::Section(s.clone()));
        }
        for (n, l) in &world.lotteries {
            env.insert(n, Value::Lottery(l.clone()));
        }
        env.families = world.families.clone();
        Ok(env)
    }

    fn axiom_lines(&self, report: &AxiomReport, family: &[(String, Lottery)]) -> Result<Vec<String>, Error> {
        let space = &self.world.space;
        let mut lines = Vec::new();
        for c in &report.checks {
            match &c.verdict {
                Verdict::PassOnTested { tested, skipped } => {
                    lines.push(format!("{}: pass-on-tested ({tested} tested, {skipped} skipped)", c.condition))
                }
                Verdict::Counterexample(v) => {
                    lines.push(format!("{}: counterexample: {}", c.condition, v.describe(space, family)));
                    let replayed = v.replay(self.pref()?, family)?;
                    lines.push(format!("  replay confirms: {}", yes(replayed)));
                }
            }
        }
        for w in &report.continuity {
            for (piece, a, b) in &w.pieces {
                lines.push(format!(
                    "continuity constants for ({}, {}, {}) on {}: a = {}, b = {}",
                    family[w.p].0,
                    family[w.q].0,
                    family[w.r].0,
                    self.show(piece),
                    fmt_rat(a),
                    fmt_rat(b)
                ));
            }
        }
        Ok(lines)
    }

    fn axioms(&self, report: AxiomReport, family: &[(String, Lottery)]) -> Result<Outcome, Error> {
        let mut out = Outcome::new(self.axiom_lines(&report, family)?);
        out.negative = !report.passed();
        Ok(out)
    }

    fn run(&mut self, task: &TaskDef, dir: &str) -> Result<Outcome, Error> {
        let world = self.world;
        let space = &world.space;
        let eps = &world.epsilon;
        match &task.kind {
            TaskKind::Classical => Ok(match space.is_classical() {
                Classicality::Classical => Outcome::new(vec!["classical: every open is closed".into()]),
                Classicality::NonClassical { witness } => Outcome::negative(vec![format!(
                    "not classical: the complement of {} is not open",
                    self.show(&witness)
                )]),
            }),
            TaskKind::Truth { rel, p, q, on } => {
                let on = world.open(on)?;
                let r = relation(rel);
                let t = truth_value(self.pref()?, r, self.lottery(p)?, self.lottery(q)?, &on)?;
                let mut out = Outcome::new(vec![format!("⟦{p} {} {q}⟧ = {}", r.symbol(), self.show(&t))]);
                out.files.push(CsvFile { name: format!("{dir}/truth.csv"), body: open_csv(space, &t) });
                out.value = Some(t);
                Ok(out)
            }
            TaskKind::Compare { f, g, on } => {
                let on = world.open(on)?;
                let c = compare(space, &self.section(f)?, &self.section(g)?, &on)?;
                let mut out = Outcome::new(vec![
                    format!("{f} < {g} on {}", self.show(&c.lt)),
                    format!("{f} > {g} on {}", self.show(&c.gt)),
                    format!("{f} = {g} on the interior {}", self.show(&c.eq)),
                ]);
                for (n, u) in [("lt", &c.lt), ("gt", &c.gt), ("eq", &c.eq)] {
                    out.files.push(CsvFile { name: format!("{dir}/{n}.csv"), body: open_csv(space, u) });
                }
                out.value = Some(c.lt);
                Ok(out)
            }
            TaskKind::Eval { on, formula, column } => {
                let f = parse_formula(formula).map_err(|e| formula_error(task.line, *column, e))?;
                let on = world.open(on)?;
                let t = eval_formula(&f, &on, &self.env()?)?;
                let mut lines = vec![format!("⟦{formula}⟧ = {}", self.show(&t))];
                if f.quantifies() {
                    lines.push("witnesses range over declared families and their restrictions".into());
                }
                let mut out = Outcome::new(lines);
                out.files.push(CsvFile { name: format!("{dir}/truth.csv"), body: open_csv(space, &t) });
                out.value = Some(t);
                Ok(out)
            }
            TaskKind::ForcingLaws { on, cover, formula, column } => {
                let f = parse_formula(formula).map_err(|e| formula_error(task.line, *column, e))?;
                let on = world.open(on)?;
                let cover = cover.iter().map(|c| world.open(c)).collect::<Result<Vec<_>, _>>()?;
                let laws = check_forcing_laws(&f, &on, &cover, &self.env()?)?;
                let mut lines = vec![match &laws.monotonicity_failure {
                    None => "monotonicity: holds on the tested sub-opens".to_string(),
                    Some(v) => format!("monotonicity: fails on {}", self.show(v)),
                }];
                lines.push(format!("every cover element forces it: {}", yes(laws.cover_forces)));
                if laws.cover_forces {
                    lines.push(format!(
                        "local character: {}",
                        if laws.local_character { "holds" } else { "fails" }
                    ));
                }
                let mut out = Outcome::new(lines);
                out.negative = !laws.holds();
                Ok(out)
            }
            TaskKind::WeakOrder { family, on } => {
                let fam = self.family(family)?;
                let report = check_weak_order(self.pref()?, &fam, &world.open(on)?)?;
                self.axioms(report, &fam)
            }
            TaskKind::Independence { family, mixers, on } => {
                let fam = self.family(family)?;
                let on = world.open(on)?;
                let mixers = mixers
                    .iter()
                    .map(|m| Ok((m.clone(), self.section_on(m, &space.carrier())?)))
                    .collect::<Result<Vec<_>, Error>>()?;
                let report = check_independence(self.pref()?, &fam, &mixers, &on)?;
                self.axioms(report, &fam)
            }
            TaskKind::Continuity { family, on } => {
                let fam = self.family(family)?;
                let report = check_continuity(self.pref()?, &fam, &world.open(on)?, eps)?;
                self.axioms(report, &fam)
            }
            TaskKind::Comparability { family } => {
                let fam = self.family(family)?;
                Ok(match check_minimal_comparability(self.pref()?, &fam)? {
                    Comparability::Pass { cover } => Outcome::new(
                        cover
                            .iter()
                            .map(|(u, why)| match why {
                                CoverReason::Strict { p, q } => {
                                    format!("{}: {} ≺ {}", self.show(u), fam[*p].0, fam[*q].0)
                                }
                                CoverReason::Indifferent => format!("{}: everything indifferent", self.show(u)),
                            })
                            .collect(),
                    ),
                    Comparability::Fail { point } => Outcome::negative(vec![format!(
                        "minimal comparability fails at {}",
                        space.show_point(&point)
                    )]),
                })
            }
            TaskKind::GlobalPair { family } => {
                let fam = self.family(family)?;
                Ok(match check_global_pair(self.pref()?, &fam)? {
                    GlobalPair::Found { pieces, p, q } => {
                        let mut lines: Vec<String> = pieces
                            .iter()
                            .map(|c| {
                                if c.indifferent {
                                    format!("{}: everything indifferent", self.show(&c.open))
                                } else {
                                    format!("{}: {} ≺ {}", self.show(&c.open), fam[c.p].0, fam[c.q].0)
                                }
                            })
                            .collect();
                        lines.push(format!("p = {}", p.show(space, &world.prizes)));
                        lines.push(format!("q = {}", q.show(space, &world.prizes)));
                        Outcome::new(lines)
                    }
                    GlobalPair::Missing { reason } => Outcome::negative(vec![format!("no global pair: {reason}")]),
                })
            }
            TaskKind::ConstantRankings { family } => {
                let fam = self.family(family)?;
                let bad = check_constant_rankings(self.pref()?, &fam)?;
                if bad.is_empty() {
                    return Ok(Outcome::new(vec!["every constant pair is ranked uniformly".into()]));
                }
                Ok(Outcome::negative(
                    bad.iter()
                        .map(|c| {
                            let (p, q) = (&fam[c.p].0, &fam[c.q].0);
                            format!(
                                "{p}, {q} not ranked uniformly: ⟦{p} ≺ {q}⟧ = {}, ⟦{q} ≺ {p}⟧ = {}, ⟦{p} ∼ {q}⟧ = {}",
                                self.show(&c.prec),
                                self.show(&c.succ),
                                self.show(&c.sim)
                            )
                        })
                        .collect(),
                ))
            }
            TaskKind::Monotonicity { p, q, a, b, on } => {
                let on = world.open(on)?;
                let (sa, sb) = (self.section_on(a, &on)?, self.section_on(b, &on)?);
                Ok(match check_monotonicity(self.pref()?, self.lottery(p)?, self.lottery(q)?, &sa, &sb, &on)? {
                    None => Outcome::new(vec![format!("mixing with {b} beats mixing with {a} on {}", self.show(&on))]),
                    Some(x) => Outcome::negative(vec![format!("monotonicity fails at {}", space.show_point(&x))]),
                })
            }
            TaskKind::Calibrate { p, q, r, on } => {
                let on = world.open(on)?;
                let c = solve_calibration(self.pref()?, self.lottery(p)?, self.lottery(q)?, self.lottery(r)?, &on, eps)?;
                let mut lines = vec![
                    format!("a = {}", c.weight.show(space)),
                    format!("exact: {}", yes(c.exact)),
                    format!("certified gap: {}", fmt_rat(&c.state.gap)),
                ];
                if let Some(cf) = &c.closed_form {
                    lines.push(format!("closed form: {}", cf.show(space)));
                }
                for cell in &c.state.cells {
                    let exact = cell.exact.as_ref().map(|e| format!(", exact {}", fmt_rat(e))).unwrap_or_default();
                    lines.push(format!("cut at {}: [{}, {}]{exact}", cell.at, fmt_rat(&cell.lower), fmt_rat(&cell.upper)));
                }
                let mut out = Outcome::new(lines);
                for (n, s) in [("a", &c.weight), ("lower", &c.state.lower), ("upper", &c.state.upper)] {
                    out.files.push(CsvFile { name: format!("{dir}/{n}.csv"), body: section_csv(space, s, world.grid) });
                }
                Ok(out)
            }
            TaskKind::Local { name, on, calib, family } => {
                let on = world.open(on)?;
                let fam = self.family(family)?;
                let calib = match calib {
                    CalibSpec::Pair(z, u) => Calib::Pair(self.lottery(z)?.clone(), self.lottery(u)?.clone()),
                    CalibSpec::Indifferent => Calib::AllIndifferent,
                };
                match local_representation(self.pref()?, &on, &calib, &fam, world.prizes.len(), eps)? {
                    LocalOutcome::Rep(rep) => {
                        let mut lines = self.weight_lines(&rep.weights);
                        lines.push(format!("exact: {}", yes(rep.exact)));
                        lines.push(soundness_line(&rep.soundness));
                        let mut out = Outcome::new(lines);
                        out.negative = !rep.soundness.holds();
                        out.files = self.weight_files(dir, &rep.weights);
                        self.locals.insert(name.clone(), rep);
                        Ok(out)
                    }
                    LocalOutcome::Obstructed { point, reason } => {
                        let at = point.map(|x| format!(" at {}", space.show_point(&x))).unwrap_or_default();
                        Ok(Outcome::negative(vec![format!("obstruction{at}: {reason}")]))
                    }
                }
            }
            TaskKind::Glue { name, target, locals } => {
                let target = world.open(target)?;
                let reps = locals
                    .iter()
                    .map(|l| self.locals.get(l).cloned().ok_or_else(|| Error::Unresolved(format!("local representation `{l}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                match glue_representations(space, &target, reps)? {
                    Glue::Global(g) => {
                        let mut lines = Vec::new();
                        for (u, plt) in g.cover.iter().zip(&g.alignments) {
                            lines.push(format!("chart on {}: {}", self.show(u), show_plt(space, plt)));
                        }
                        lines.extend(self.weight_lines(&g.weights));
                        let mut out = Outcome::new(lines);
                        out.files = self.weight_files(dir, &g.weights);
                        self.globals.insert(name.clone(), g);
                        Ok(out)
                    }
                    Glue::Obstructed(o) => Ok(Outcome::negative(vec![format!(
                        "obstruction at {}: {}",
                        space.show_point(&o.point),
                        o.reason
                    )])),
                }
            }
            TaskKind::Transform { source, target, on } => {
                let on = world.open(on)?;
                let (src, tgt) = (self.weights(source)?, self.weights(target)?);
                match uniqueness_transform(space, &src, &tgt, &on)? {
                    Transform::Found(plt) => Ok(Outcome::new(vec![format!("{target} = {}", show_plt(space, &plt))])),
                    Transform::Obstructed(o) => {
                        let lim = |side: &str, l: &Option<(crate::rational::Rat, crate::rational::Rat)>| match l {
                            Some((a, b)) => format!("{side} limit: a = {}, b = {}", fmt_rat(a), fmt_rat(b)),
                            None => format!("{side} limit: none"),
                        };
                        Ok(Outcome::negative(vec![
                            format!("obstruction at {}", space.show_point(&o.point)),
                            format!("partial transform on {}: {}", self.show(o.partial.domain()), show_plt(space, &o.partial)),
                            lim("left", &o.limits.left),
                            lim("right", &o.limits.right),
                        ]))
                    }
                }
            }
            TaskKind::ClassicalRep { family } => {
                let fam = self.family(family)?;
                let rep = classical_representation(self.pref()?, &fam, world.prizes.len(), eps)?;
                let mut lines = vec![format!("indifferent on {}", self.show(&rep.indifferent))];
                for p in &rep.pieces {
                    lines.push(format!(
                        "piece {}: {} ≺ {}, indicator {}",
                        self.show(&p.open),
                        fam[p.worse].0,
                        fam[p.better].0,
                        p.indicator.show(space)
                    ));
                }
                lines.extend(self.weight_lines(&rep.global.weights));
                lines.push(soundness_line(&rep.soundness));
                let names = ["weak order", "independence", "continuity"];
                let mut necessary = true;
                for (n, r) in names.iter().zip(&rep.necessity) {
                    necessary &= r.passed();
                    lines.push(format!("{n} under the induced ranking: {}", if r.passed() { "pass-on-tested" } else { "fails" }));
                }
                let mut out = Outcome::new(lines);
                out.negative = !rep.soundness.holds() || !necessary;
                out.files = self.weight_files(dir, &rep.global.weights);
                Ok(out)
            }
            TaskKind::ConstantRep { worst, best } => {
                let (w, b) = (world.prize(worst)?, world.prize(best)?);
                let g = constant_prize_representation(self.pref()?, w, b, world.prizes.len(), eps)?;
                let mut out = Outcome::new(self.weight_lines(&g.weights));
                out.files = self.weight_files(dir, &g.weights);
                Ok(out)
            }
            TaskKind::Harmonize => {
                let complex = world.complex.as_ref().ok_or_else(|| Error::Parse("no complex is declared".into()))?;
                match harmonize_complex(complex, &world.charts)? {
                    Harmonized::Done(h) => {
                        let mut lines = Vec::new();
                        for (face, chart) in &h.charts {
                            let vals: Vec<String> = chart.iter().map(|(v, u)| format!("{v}:{}", fmt_rat(u))).collect();
                            let from = h.adopted.get(face).map(|f| format!(" (zero and unit from {f})")).unwrap_or_default();
                            lines.push(format!("chart {face}: {}{from}", vals.join(" ")));
                        }
                        for a in &h.attachments {
                            lines.push(format!("{} ⇝ {}: {}", a.from, a.to, a.map.show()));
                        }
                        for p in &h.paths {
                            lines.push(format!(
                                "{} ⇝ {} ⇝ {}: composed {}, direct {}, {}",
                                p.rho,
                                p.sigma,
                                p.tau,
                                p.composed.show(),
                                p.direct.show(),
                                if p.agrees { "agree" } else { "DISAGREE" }
                            ));
                        }
                        lines.push(format!("functorial: {}", yes(h.functorial())));
                        let mut out = Outcome::new(lines);
                        out.negative = !h.functorial();
                        Ok(out)
                    }
                    Harmonized::Obstructed { cycle, reason } => {
                        Ok(Outcome::negative(vec![format!("obstruction around {}: {reason}", cycle.join(" → "))]))
                    }
                }
            }
        }
    }
}

fn formula_error(line: usize, column: usize, e: Error) -> Error {
    match e {
        Error::Parse(m) => match m.strip_prefix("column ").and_then(|r| r.split_once(": ")) {
            Some((c, rest)) => match c.parse::<usize>() {
                Ok(c) => Error::Parse(format!("line {line}, column {}: {rest}", column + c - 1)),
                Err(_) => Error::Parse(format!("line {line}, column {column}: {m}")),
            },
            None => Error::Parse(format!("line {line}, column {column}: {m}")),
        },
        other => other,
    }
}

fn show_plt(space: &crate::topology::Space, plt: &Plt) -> String {
    format!("a = {}, b = {}", plt.a.show(space), plt.b.show(space))
}

fn soundness_line(s: &crate::representation::Soundness) -> String {
    let verdict = if s.holds() { "holds".to_string() } else { format!("{} failures", s.failures.len()) };
    format!("soundness: {verdict} ({} pairs tested, {} skipped)", s.tested, s.skipped)
}

fn status(task: &TaskDef, world: &World, out: &Outcome) -> Result<Status, Error> {
    Ok(match (&task.expect, out.negative) {
        (Expect::Negative, true) => Status::ExpectedNegative,
        (Expect::Negative, false) => Status::Failed("expected a negative outcome".into()),
        (_, true) => Status::Failed("negative outcome".into()),
        (Expect::Success, false) => Status::Ok,
        (Expect::Value(spec), false) => {
            let want = world.open(spec)?;
            match &out.value {
                Some(v) if *v == want => Status::Ok,
                Some(v) => Status::Failed(format!("expected {}, got {}", world.space.show(&want), world.space.show(v))),
                None => Status::Failed("the task produces no open set to compare".into()),
            }
        }
    })
}

/// Runs every task in order. Parse and name errors abort the run; any other
/// error fails only its task, and precondition failures count as rejections.
pub fn run_world(world: &World) -> Result<Report, Error> {
    let mut header = vec![
        format!("scenario: {}", world.title),
        format!("space: {}", describe_space(&world.space)),
        format!("prizes: {}", world.prizes.names().join(" ")),
        format!("epsilon: {}", fmt_rat(&world.epsilon)),
    ];
    if world.pref.is_some() {
        header.push("axiom checks are falsifiers over the declared families; passes are pass-on-tested".into());
    }
    let mut sections = Vec::new();
    for (n, s) in &world.sections {
        sections.push(CsvFile { name: format!("{}.csv", file_stem(n)), body: section_csv(&world.space, s, world.grid) });
    }
    let mut runner = Runner { world, locals: BTreeMap::new(), globals: BTreeMap::new() };
    let mut tasks = Vec::new();
    for (k, task) in world.tasks.iter().enumerate() {
        let index = k + 1;
        let dir = file_stem(task.label.as_deref().unwrap_or(&format!("task{index}")));
        let start = Instant::now();
        let result = runner.run(task, &dir);
        let elapsed = start.elapsed();
        let (lines, status, files) = match result {
            Ok(out) => {
                let status = status(task, world, &out).map_err(|e| at(task.line, e))?;
                (out.lines, status, out.files)
            }
            Err(Error::Precondition(m)) => {
                let out = Outcome::negative(vec![format!("rejected: {m}")]);
                let status = status(task, world, &out).map_err(|e| at(task.line, e))?;
                (out.lines, status, Vec::new())
            }
            Err(e @ (Error::Parse(_) | Error::Unresolved(_))) => return Err(at(task.line, e)),
            Err(e) => (vec![format!("error: {e}")], Status::Failed("error".into()), Vec::new()),
        };
        tasks.push(TaskReport { index, text: task.text.clone(), lines, status, files, elapsed });
    }
    Ok(Report { header, tasks, sections })
}
