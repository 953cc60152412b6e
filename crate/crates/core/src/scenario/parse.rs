//! Line-oriented scenario syntax.
//!
//! Each non-blank line is one statement; `#` starts a comment. Rationals are
//! written `p/q` or as decimals, opens as `X`, `∅`, `{a,b}` or unions of
//! spans such as `[0,1)u(1,2]`.

use crate::rational::{parse_rat, Rat};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanSpec {
    pub lo: Rat,
    pub lo_closed: bool,
    pub hi: Rat,
    pub hi_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpenSpec {
    Carrier,
    Empty,
    Points(Vec<String>),
    Spans(Vec<SpanSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceDef {
    Interval(Rat, Rat),
    Poset { points: Vec<String>, order: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionDef {
    Const(Rat),
    Knots(Vec<(Rat, Rat)>),
    Nodes(Vec<(String, Rat)>),
}

/// A lottery coordinate or utility weight: a rational or a named section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coef {
    Value(Rat),
    Section(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LotteryDef {
    Delta { prize: String, on: OpenSpec },
    Coords { on: OpenSpec, coords: Vec<(String, Coef)> },
    /// Restrictions of named lotteries, glued.
    Glue(Vec<(String, OpenSpec)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankEntry {
    Empty,
    Order(Vec<(String, String)>),
    Scores(Vec<Rat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefDef {
    Utility(Vec<(String, Coef)>),
    Table { family: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    Prec,
    Sim,
    Precsim,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expect {
    Success,
    /// The task must end in an obstruction, rejection or violation.
    Negative,
    Value(OpenSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CalibSpec {
    Pair(String, String),
    Indifferent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Classical,
    Truth { rel: Relation, p: String, q: String, on: OpenSpec },
    Compare { f: String, g: String, on: OpenSpec },
    Eval { on: OpenSpec, formula: String, column: usize },
    ForcingLaws { on: OpenSpec, cover: Vec<OpenSpec>, formula: String, column: usize },
    WeakOrder { family: String, on: OpenSpec },
    Independence { family: String, mixers: Vec<String>, on: OpenSpec },
    Continuity { family: String, on: OpenSpec },
    Comparability { family: String },
    GlobalPair { family: String },
    ConstantRankings { family: String },
    Monotonicity { p: String, q: String, a: String, b: String, on: OpenSpec },
    Calibrate { p: String, q: String, r: String, on: OpenSpec },
    Local { name: String, on: OpenSpec, calib: CalibSpec, family: String },
    Glue { name: String, target: OpenSpec, locals: Vec<String> },
    Transform { source: String, target: String, on: OpenSpec },
    ClassicalRep { family: String },
    ConstantRep { worst: String, best: String },
    Harmonize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDef {
    pub line: usize,
    /// The task line as written, for the report header.
    pub text: String,
    pub label: Option<String>,
    pub expect: Expect,
    pub kind: TaskKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Title(String),
    Space(SpaceDef),
    Prizes(Vec<String>),
    Epsilon(Rat),
    Grid(usize),
    Section { name: String, on: OpenSpec, def: SectionDef },
    Lottery { name: String, def: LotteryDef },
    Preference(PrefDef),
    Rank { point: String, entry: RankEntry },
    ProperOpensOnly,
    Family { name: String, members: Vec<String> },
    Weights { name: String, entries: Vec<(String, String)> },
    Complex(Vec<String>),
    Simplex(Vec<String>),
    Chart { face: String, values: Vec<(String, Rat)> },
    Task(TaskDef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub line: usize,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub statements: Vec<Stmt>,
}

impl Scenario {
    pub fn tasks(&self) -> impl Iterator<Item = &TaskDef> {
        self.statements.iter().filter_map(|s| match &s.kind {
            StmtKind::Task(t) => Some(t),
            _ => None,
        })
    }
}

#[derive(Clone, Debug)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

struct Cursor<'a> {
    line: usize,
    raw: &'a str,
    toks: Vec<Tok<'a>>,
    pos: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse(format!("line {line}, column {col}: {}", msg.into()))
}

impl<'a> Cursor<'a> {
    fn new(line: usize, raw: &'a str) -> Cursor<'a> {
        let mut toks = Vec::new();
        let mut start = None;
        for (col, (i, c)) in raw.char_indices().enumerate() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some((i, col)),
                (true, Some((s, sc))) => {
                    toks.push(Tok { text: &raw[s..i], col: sc + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some((s, sc)) = start {
            toks.push(Tok { text: &raw[s..], col: sc + 1 });
        }
        Cursor { line, raw, toks, pos: 0 }
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or_else(|| self.raw.chars().count() + 1, |t| t.col)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        Err(err(self.line, self.col(), msg))
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.text)
    }

    fn next(&mut self, what: &str) -> Result<&'a str, Error> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.text)
            }
            None => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Error> {
        match self.peek() {
            Some(t) if t == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{kw}`")),
        }
    }

    fn eat(&mut self, kw: &str) -> bool {
        if self.peek() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), Error> {
        if self.done() {
            Ok(())
        } else {
            self.fail(format!("unexpected `{}`", self.toks[self.pos].text))
        }
    }

    fn rat(&mut self, what: &str) -> Result<Rat, Error> {
        let col = self.col();
        let t = self.next(what)?;
        parse_rat(t).map_err(|e| err(self.line, col, strip(e)))
    }

    fn name(&mut self, what: &str) -> Result<String, Error> {
        let col = self.col();
        let t = self.next(what)?;
        if t.chars().all(|c| c.is_alphanumeric() || "_-'.".contains(c)) {
            Ok(t.to_string())
        } else {
            Err(err(self.line, col, format!("`{t}` is not a valid {what}")))
        }
    }

    fn open(&mut self) -> Result<OpenSpec, Error> {
        let col = self.col();
        let t = self.next("an open set")?;
        parse_open(t).map_err(|e| err(self.line, col, strip(e)))
    }

    fn rest_names(&mut self, what: &str) -> Result<Vec<String>, Error> {
        let mut out = Vec::new();
        while !self.done() && !matches!(self.peek(), Some("on" | "expect" | "as")) {
            out.push(self.name(what)?);
        }
        Ok(out)
    }

    /// `on OPEN`, defaulting to the carrier.
    fn on_or_carrier(&mut self) -> Result<OpenSpec, Error> {
        if self.eat("on") {
            self.open()
        } else {
            Ok(OpenSpec::Carrier)
        }
    }

    fn on(&mut self) -> Result<OpenSpec, Error> {
        self.keyword("on")?;
        self.open()
    }

    /// Everything after the first ` : ` token, with its column.
    fn formula(&mut self) -> Result<(String, usize), Error> {
        self.keyword(":")?;
        let Some(t) = self.toks.get(self.pos) else {
            return self.fail("expected a formula");
        };
        let byte = self.raw.char_indices().nth(t.col - 1).map(|(i, _)| i).expect("token start");
        self.pos = self.toks.len();
        Ok((self.raw[byte..].trim_end().to_string(), t.col))
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Parse(m) => m,
        other => other.to_string(),
    }
}

pub fn parse_open(t: &str) -> Result<OpenSpec, Error> {
    match t {
        "X" => return Ok(OpenSpec::Carrier),
        "∅" | "{}" => return Ok(OpenSpec::Empty),
        _ => {}
    }
    if let Some(inner) = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let pts: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        if pts.iter().any(|p| p.is_empty()) {
            return Err(Error::Parse(format!("empty point name in `{t}`")));
        }
        return Ok(OpenSpec::Points(pts));
    }
    let mut spans = Vec::new();
    for piece in t.split(['u', '∪']) {
        let bad = || Error::Parse(format!("not a span: `{piece}`"));
        let mut chars = piece.chars();
        let lo_closed = match chars.next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match chars.next_back() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let (lo, hi) = chars.as_str().split_once(',').ok_or_else(bad)?;
        spans.push(SpanSpec { lo: parse_rat(lo)?, lo_closed, hi: parse_rat(hi)?, hi_closed });
    }
    Ok(OpenSpec::Spans(spans))
}

fn pair(t: &str, sep: char, line: usize, col: usize) -> Result<(&str, &str), Error> {
    t.split_once(sep).ok_or_else(|| err(line, col, format!("expected `a{sep}b`, found `{t}`")))
}

fn coef(t: &str) -> Coef {
    match parse_rat(t) {
        Ok(r) => Coef::Value(r),
        Err(_) => Coef::Section(t.to_string()),
    }
}

fn assignments(c: &mut Cursor) -> Result<Vec<(String, Coef)>, Error> {
    let mut out = Vec::new();
    while !c.done() {
        let col = c.col();
        let t = c.next("an assignment")?;
        let (k, v) = pair(t, ':', c.line, col)?;
        out.push((k.to_string(), coef(v)));
    }
    Ok(out)
}

fn section_def(c: &mut Cursor) -> Result<SectionDef, Error> {
    let kind = c.next("`const`, `knots` or `nodes`")?;
    match kind {
        "const" => Ok(SectionDef::Const(c.rat("a value")?)),
        "knots" => {
            let mut ks = Vec::new();
            while !c.done() {
                let col = c.col();
                let t = c.next("a knot")?;
                let inner = t
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err(c.line, col, format!("expected `(x,y)`, found `{t}`")))?;
                let (x, y) = pair(inner, ',', c.line, col)?;
                let x = parse_rat(x).map_err(|e| err(c.line, col, strip(e)))?;
                let y = parse_rat(y).map_err(|e| err(c.line, col, strip(e)))?;
                ks.push((x, y));
            }
            if ks.len() < 2 {
                return c.fail("a knot list needs at least two knots");
            }
            Ok(SectionDef::Knots(ks))
        }
        "nodes" => {
            let mut vs = Vec::new();
            while !c.done() {
                let col = c.col();
                let t = c.next("`point:value`")?;
                let (p, v) = pair(t, ':', c.line, col)?;
                vs.push((p.to_string(), parse_rat(v).map_err(|e| err(c.line, col, strip(e)))?));
            }
            Ok(SectionDef::Nodes(vs))
        }
        other => Err(err(c.line, c.toks[c.pos - 1].col, format!("unknown section form `{other}`"))),
    }
}

fn lottery_stmt(c: &mut Cursor) -> Result<StmtKind, Error> {
    let name = c.name("lottery name")?;
    if c.eat("=") {
        if c.eat("delta") {
            let prize = c.name("prize")?;
            let on = c.on_or_carrier()?;
            return Ok(StmtKind::Lottery { name, def: LotteryDef::Delta { prize, on } });
        }
        c.keyword("glue")?;
        let mut parts = Vec::new();
        while !c.done() {
            let col = c.col();
            let t = c.next("`lottery@open`")?;
            let (l, o) = pair(t, '@', c.line, col)?;
            parts.push((l.to_string(), parse_open(o).map_err(|e| err(c.line, col, strip(e)))?));
        }
        if parts.is_empty() {
            return c.fail("glue needs at least one piece");
        }
        return Ok(StmtKind::Lottery { name, def: LotteryDef::Glue(parts) });
    }
    let on = c.on()?;
    c.keyword("=")?;
    let coords = assignments(c)?;
    Ok(StmtKind::Lottery { name, def: LotteryDef::Coords { on, coords } })
}

fn relation(c: &mut Cursor) -> Result<Relation, Error> {
    match c.next("a relation")? {
        "prec" => Ok(Relation::Prec),
        "sim" => Ok(Relation::Sim),
        "precsim" => Ok(Relation::Precsim),
        other => Err(err(c.line, c.toks[c.pos - 1].col, format!("unknown relation `{other}`"))),
    }
}

fn task_stmt(c: &mut Cursor, line: usize, raw: &str) -> Result<StmtKind, Error> {
    let kind_col = c.col();
    let kind = c.next("a task kind")?;
    let kind = match kind {
        "classical" => TaskKind::Classical,
        "truth" => {
            let rel = relation(c)?;
            let p = c.name("lottery")?;
            let q = c.name("lottery")?;
            TaskKind::Truth { rel, p, q, on: c.on()? }
        }
        "compare" => {
            let f = c.name("section")?;
            let g = c.name("section")?;
            TaskKind::Compare { f, g, on: c.on()? }
        }
        "eval" | "forcing-laws" => {
            let on = c.on()?;
            let mut cover = Vec::new();
            if kind == "forcing-laws" {
                c.keyword("cover")?;
                while !c.done() && c.peek() != Some(":") && c.peek() != Some("expect") {
                    cover.push(c.open()?);
                }
            }
            let expect = parse_expect(c)?;
            let (formula, column) = c.formula()?;
            let kind = if cover.is_empty() && kind == "eval" {
                TaskKind::Eval { on, formula, column }
            } else {
                TaskKind::ForcingLaws { on, cover, formula, column }
            };
            return Ok(StmtKind::Task(TaskDef { line, text: raw.trim().to_string(), label: None, expect, kind }));
        }
        "weak-order" => {
            let family = c.name("family")?;
            TaskKind::WeakOrder { family, on: c.on_or_carrier()? }
        }
        "independence" => {
            let family = c.name("family")?;
            c.keyword("mixers")?;
            let mixers = c.rest_names("section")?;
            TaskKind::Independence { family, mixers, on: c.on_or_carrier()? }
        }
        "continuity" => {
            let family = c.name("family")?;
            TaskKind::Continuity { family, on: c.on_or_carrier()? }
        }
        "comparability" => TaskKind::Comparability { family: c.name("family")? },
        "global-pair" => TaskKind::GlobalPair { family: c.name("family")? },
        "constant-rankings" => TaskKind::ConstantRankings { family: c.name("family")? },
        "monotonicity" => {
            let p = c.name("lottery")?;
            let q = c.name("lottery")?;
            let a = c.name("section")?;
            let b = c.name("section")?;
            TaskKind::Monotonicity { p, q, a, b, on: c.on()? }
        }
        "calibrate" => {
            let p = c.name("lottery")?;
            let q = c.name("lottery")?;
            let r = c.name("lottery")?;
            TaskKind::Calibrate { p, q, r, on: c.on()? }
        }
        "local" => {
            let name = c.name("representation name")?;
            let on = c.on()?;
            let calib = if c.eat("indifferent") {
                CalibSpec::Indifferent
            } else {
                c.keyword("pair")?;
                CalibSpec::Pair(c.name("lottery")?, c.name("lottery")?)
            };
            c.keyword("family")?;
            TaskKind::Local { name, on, calib, family: c.name("family")? }
        }
        "glue" => {
            let name = c.name("representation name")?;
            c.keyword("target")?;
            let target = c.open()?;
            c.keyword("from")?;
            let locals = c.rest_names("representation")?;
            if locals.is_empty() {
                return c.fail("glue needs at least one local representation");
            }
            TaskKind::Glue { name, target, locals }
        }
        "transform" => {
            let source = c.name("weights")?;
            let target = c.name("weights")?;
            TaskKind::Transform { source, target, on: c.on()? }
        }
        "classical-rep" => TaskKind::ClassicalRep { family: c.name("family")? },
        "constant-rep" => {
            c.keyword("worst")?;
            let worst = c.name("prize")?;
            c.keyword("best")?;
            TaskKind::ConstantRep { worst, best: c.name("prize")? }
        }
        "harmonize" => TaskKind::Harmonize,
        other => return Err(err(line, kind_col, format!("unknown task `{other}`"))),
    };
    let label = if c.eat("as") { Some(c.name("label")?) } else { None };
    let expect = parse_expect(c)?;
    c.finish()?;
    Ok(StmtKind::Task(TaskDef { line, text: raw.trim().to_string(), label, expect, kind }))
}

fn parse_expect(c: &mut Cursor) -> Result<Expect, Error> {
    if !c.eat("expect") {
        return Ok(Expect::Success);
    }
    match c.peek() {
        Some("obstruction" | "rejection" | "violation" | "failure") => {
            c.pos += 1;
            Ok(Expect::Negative)
        }
        _ => Ok(Expect::Value(c.open()?)),
    }
}

fn statement(c: &mut Cursor, line: usize, raw: &str) -> Result<StmtKind, Error> {
    let head_col = c.col();
    let head = c.next("a statement")?;
    let kind = match head {
        "scenario" => {
            let words: Vec<&str> = std::iter::from_fn(|| c.next("").ok()).collect();
            return Ok(StmtKind::Title(words.join(" ")));
        }
        "space" => match c.next("`interval` or `poset`")? {
            "interval" => {
                let lo = c.rat("lower end")?;
                let hi = c.rat("upper end")?;
                StmtKind::Space(SpaceDef::Interval(lo, hi))
            }
            "poset" => {
                let mut points = Vec::new();
                while !c.done() && c.peek() != Some("where") {
                    points.push(c.name("point")?);
                }
                let mut order = Vec::new();
                if c.eat("where") {
                    while !c.done() {
                        let col = c.col();
                        let t = c.next("`a<b`")?;
                        let (a, b) = pair(t, '<', line, col)?;
                        order.push((a.to_string(), b.to_string()));
                    }
                }
                StmtKind::Space(SpaceDef::Poset { points, order })
            }
            other => return Err(err(line, c.toks[c.pos - 1].col, format!("unknown space kind `{other}`"))),
        },
        "prizes" => {
            let names = c.rest_names("prize")?;
            if names.is_empty() {
                return c.fail("expected at least one prize");
            }
            StmtKind::Prizes(names)
        }
        "epsilon" => StmtKind::Epsilon(c.rat("a resolution")?),
        "grid" => {
            let col = c.col();
            let t = c.next("a grid size")?;
            StmtKind::Grid(t.parse().map_err(|_| err(line, col, format!("`{t}` is not a count")))?)
        }
        "section" => {
            let name = c.name("section name")?;
            let on = c.on()?;
            c.keyword("=")?;
            StmtKind::Section { name, on, def: section_def(c)? }
        }
        "lottery" => lottery_stmt(c)?,
        "preference" => match c.next("`utility`, `table` or `proper-opens-only`")? {
            "utility" => StmtKind::Preference(PrefDef::Utility(assignments(c)?)),
            "table" => {
                c.keyword("over")?;
                StmtKind::Preference(PrefDef::Table { family: c.name("family")? })
            }
            "proper-opens-only" => StmtKind::ProperOpensOnly,
            other => return Err(err(line, c.toks[c.pos - 1].col, format!("unknown preference form `{other}`"))),
        },
        "rank" => {
            let point = c.name("point")?;
            let entry = match c.next("`none`, `order` or `scores`")? {
                "none" => RankEntry::Empty,
                "order" => {
                    let mut pairs = Vec::new();
                    while !c.done() {
                        let col = c.col();
                        let t = c.next("`worse<better`")?;
                        let (a, b) = pair(t, '<', line, col)?;
                        pairs.push((a.to_string(), b.to_string()));
                    }
                    RankEntry::Order(pairs)
                }
                "scores" => {
                    let mut s = Vec::new();
                    while !c.done() {
                        s.push(c.rat("a score")?);
                    }
                    RankEntry::Scores(s)
                }
                other => return Err(err(line, c.toks[c.pos - 1].col, format!("unknown ranking `{other}`"))),
            };
            StmtKind::Rank { point, entry }
        }
        "family" => {
            let name = c.name("family name")?;
            c.keyword("=")?;
            StmtKind::Family { name, members: c.rest_names("lottery")? }
        }
        "weights" => {
            let name = c.name("weights name")?;
            c.keyword("=")?;
            let mut entries = Vec::new();
            while !c.done() {
                let col = c.col();
                let t = c.next("`prize:section`")?;
                let (p, s) = pair(t, ':', line, col)?;
                entries.push((p.to_string(), s.to_string()));
            }
            StmtKind::Weights { name, entries }
        }
        "complex" => StmtKind::Complex(c.rest_names("vertex")?),
        "simplex" => StmtKind::Simplex(c.rest_names("vertex")?),
        "chart" => {
            let face = c.name("face")?;
            let mut values = Vec::new();
            while !c.done() {
                let col = c.col();
                let t = c.next("`vertex:value`")?;
                let (v, u) = pair(t, ':', line, col)?;
                values.push((v.to_string(), parse_rat(u).map_err(|e| err(line, col, strip(e)))?));
            }
            StmtKind::Chart { face, values }
        }
        "task" => return task_stmt(c, line, raw),
        other => return Err(err(line, head_col, format!("unknown statement `{other}`"))),
    };
    c.finish()?;
    Ok(kind)
}

pub fn parse_scenario(src: &str) -> Result<Scenario, Error> {
    let mut statements = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        if text.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(line, text);
        statements.push(Stmt { line, kind: statement(&mut c, line, text)? });
    }
    Ok(Scenario { statements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{half, int};

    #[test]
    fn opens() {
        assert_eq!(parse_open("X").unwrap(), OpenSpec::Carrier);
        assert_eq!(parse_open("{1,2}").unwrap(), OpenSpec::Points(vec!["1".into(), "2".into()]));
        let OpenSpec::Spans(s) = parse_open("[0,1/2)u(1,2]").unwrap() else { panic!() };
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].hi.clone(), s[0].hi_closed), (half(), false));
        assert_eq!((s[1].lo.clone(), s[1].hi.clone()), (int(1), int(2)));
        assert!(parse_open("[0,1").is_err());
    }

    #[test]
    fn statements_and_tasks() {
        let src = "\
space poset 0 1 2 where 0<1 0<2   # the three stages
prizes z1 z2
lottery d1 = delta z1
family F = d1 d2
task truth prec d2 d1 on X expect {1}
task eval on X expect {1,2} : (or (prec d1 d2) (prec d2 d1))
task glue G target X from A B expect obstruction
";
        let s = parse_scenario(src).unwrap();
        assert_eq!(s.statements.len(), 7);
        let tasks: Vec<_> = s.tasks().collect();
        assert_eq!(tasks[0].expect, Expect::Value(OpenSpec::Points(vec!["1".into()])));
        let TaskKind::Eval { formula, column, .. } = &tasks[1].kind else { panic!() };
        assert_eq!(formula, "(or (prec d1 d2) (prec d2 d1))");
        assert_eq!(*column, 31);
        assert_eq!(tasks[2].expect, Expect::Negative);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_scenario("prizes a\nsection f on X = knots (0,0) (1,x)").unwrap_err();
        assert_eq!(e.to_string(), "parse error: line 2, column 30: not a rational: `x`");
        let e = parse_scenario("task dance").unwrap_err();
        assert_eq!(e.to_string(), "parse error: line 1, column 6: unknown task `dance`");
    }
}
