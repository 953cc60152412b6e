//! Truth values of formulas over section and lottery comparisons.
//!
//! Connectives are the Heyting operations relative to a domain of
//! discourse `U`. Quantifiers range over declared finite families only, so
//! an existential may come out smaller than it would over every local
//! section; [`Formula::quantifies`] lets reports say so.

use std::collections::BTreeMap;
use std::fmt;

use crate::lottery::{mix, Lottery};
use crate::preference::{sample_subopens, truth_value, Ranking, Relation};
use crate::rational::{fmt_rat, parse_rat, Rat};
use crate::sections::{compare, Section};
use crate::topology::{OpenSet, Space};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Name(String),
    /// `a·p + (1-a)·q`; the weight is a literal or a named section.
    Mix(Box<Weight>, Box<Term>, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Literal(Rat),
    Name(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomRel {
    Less,
    Equal,
    Pref(Relation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bottom,
    Atom(AtomRel, Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Exists(String, String, Box<Formula>),
    ForAll(String, String, Box<Formula>),
}

impl Formula {
    /// True when the formula contains a quantifier.
    pub fn quantifies(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.quantifies() || b.quantifies(),
            Formula::Not(a) => a.quantifies(),
            Formula::Exists(..) | Formula::ForAll(..) => true,
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn prec(p: &str, q: &str) -> Formula {
        Formula::Atom(AtomRel::Pref(Relation::Prec), Term::Name(p.into()), Term::Name(q.into()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{n}"),
            Term::Mix(a, p, q) => {
                let w = match a.as_ref() {
                    Weight::Literal(r) => fmt_rat(r),
                    Weight::Name(n) => n.clone(),
                };
                write!(f, "(mix {w} {p} {q})")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "top"),
            Formula::Bottom => write!(f, "bot"),
            Formula::Atom(rel, a, b) => {
                let head = match rel {
                    AtomRel::Less => "lt",
                    AtomRel::Equal => "eq",
                    AtomRel::Pref(Relation::Prec) => "prec",
                    AtomRel::Pref(Relation::Sim) => "sim",
                    AtomRel::Pref(Relation::Precsim) => "precsim",
                };
                write!(f, "({head} {a} {b})")
            }
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::Exists(v, fam, a) => write!(f, "(exists {v} {fam} {a})"),
            Formula::ForAll(v, fam, a) => write!(f, "(forall {v} {fam} {a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn tokenize(src: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in src.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur), start + 1));
            }
            if !c.is_whitespace() {
                out.push((c.to_string(), i + 1));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push((cur, start + 1));
    }
    out
}

fn read_sexp(tokens: &[(String, usize)], pos: &mut usize) -> Result<Sexp, Error> {
    let (tok, col) = tokens
        .get(*pos)
        .ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(Error::Parse(format!("column {col}: unclosed parenthesis"))),
                    Some((t, _)) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items, *col));
                    }
                    Some(_) => items.push(read_sexp(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse(format!("column {col}: unexpected `)`"))),
        _ => Ok(Sexp::Atom(tok.clone(), *col)),
    }
}

fn column(s: &Sexp) -> usize {
    match s {
        Sexp::Atom(_, c) | Sexp::List(_, c) => *c,
    }
}

fn ident(s: &Sexp) -> Result<String, Error> {
    match s {
        Sexp::Atom(a, _) => Ok(a.clone()),
        Sexp::List(_, c) => Err(Error::Parse(format!("column {c}: expected a name"))),
    }
}

fn to_term(s: &Sexp) -> Result<Term, Error> {
    match s {
        Sexp::Atom(a, _) => Ok(Term::Name(a.clone())),
        Sexp::List(items, c) => match items.as_slice() {
            [Sexp::Atom(h, _), w, p, q] if h == "mix" => {
                let weight = match w {
                    Sexp::Atom(a, _) => match parse_rat(a) {
                        Ok(r) => Weight::Literal(r),
                        Err(_) => Weight::Name(a.clone()),
                    },
                    Sexp::List(_, c) => return Err(Error::Parse(format!("column {c}: mixing weight must be a name or rational"))),
                };
                Ok(Term::Mix(Box::new(weight), Box::new(to_term(p)?), Box::new(to_term(q)?)))
            }
            _ => Err(Error::Parse(format!("column {c}: expected a term or (mix a p q)"))),
        },
    }
}

fn to_formula(s: &Sexp) -> Result<Formula, Error> {
    match s {
        Sexp::Atom(a, c) => match a.as_str() {
            "top" => Ok(Formula::Top),
            "bot" => Ok(Formula::Bottom),
            _ => Err(Error::Parse(format!("column {c}: `{a}` is not a formula"))),
        },
        Sexp::List(items, c) => {
            let head = items
                .first()
                .map(ident)
                .transpose()?
                .ok_or_else(|| Error::Parse(format!("column {c}: empty formula")))?;
            let args = &items[1..];
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(Error::Parse(format!("column {c}: `{head}` takes {n} arguments, got {}", args.len())))
                }
            };
            let atom = |rel: AtomRel| -> Result<Formula, Error> {
                arity(2)?;
                Ok(Formula::Atom(rel, to_term(&args[0])?, to_term(&args[1])?))
            };
            let sub = |i: usize| to_formula(&args[i]).map(Box::new);
            match head.as_str() {
                "lt" => atom(AtomRel::Less),
                "eq" => atom(AtomRel::Equal),
                "prec" => atom(AtomRel::Pref(Relation::Prec)),
                "sim" => atom(AtomRel::Pref(Relation::Sim)),
                "precsim" => atom(AtomRel::Pref(Relation::Precsim)),
                "not" => {
                    arity(1)?;
                    Ok(Formula::Not(sub(0)?))
                }
                "and" | "or" | "implies" => {
                    arity(2)?;
                    let (a, b) = (sub(0)?, sub(1)?);
                    Ok(match head.as_str() {
                        "and" => Formula::And(a, b),
                        "or" => Formula::Or(a, b),
                        _ => Formula::Implies(a, b),
                    })
                }
                "exists" | "forall" => {
                    arity(3)?;
                    let (v, fam) = (ident(&args[0])?, ident(&args[1])?);
                    let body = sub(2)?;
                    Ok(if head == "exists" { Formula::Exists(v, fam, body) } else { Formula::ForAll(v, fam, body) })
                }
                other => Err(Error::Parse(format!("column {}: unknown connective `{other}`", column(&items[0])))),
            }
        }
    }
}

/// Parses prefix notation such as `(or (prec d1 d2) (prec d2 d1))`.
pub fn parse_formula(src: &str) -> Result<Formula, Error> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let sexp = read_sexp(&tokens, &mut pos)?;
    if let Some((t, c)) = tokens.get(pos) {
        return Err(Error::Parse(format!("column {c}: trailing `{t}`")));
    }
    let f = to_formula(&sexp)?;
    check_binding(&f, &mut Vec::new())?;
    Ok(f)
}

fn check_binding(f: &Formula, bound: &mut Vec<String>) -> Result<(), Error> {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(..) => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_binding(a, bound)?;
            check_binding(b, bound)
        }
        Formula::Not(a) => check_binding(a, bound),
        Formula::Exists(v, _, a) | Formula::ForAll(v, _, a) => {
            if bound.contains(v) {
                return Err(Error::Parse(format!("variable `{v}` is bound twice")));
            }
            bound.push(v.clone());
            check_binding(a, bound)
        }
    }
}

/// A named object a term can denote.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Section(Section),
    Lottery(Lottery),
}

impl Value {
    pub fn domain(&self) -> &OpenSet {
        match self {
            Value::Section(s) => s.domain(),
            Value::Lottery(l) => l.domain(),
        }
    }

    fn restrict(&self, u: &OpenSet) -> Result<Value, Error> {
        Ok(match self {
            Value::Section(s) => Value::Section(s.restrict(u)?),
            Value::Lottery(l) => Value::Lottery(l.restrict(u)?),
        })
    }
}

/// Everything a formula may refer to.
pub struct Env<'a> {
    pub space: &'a Space,
    pub pref: Option<&'a dyn Ranking>,
    pub objects: BTreeMap<String, Value>,
    /// Witness families: family name to member object names.
    pub families: BTreeMap<String, Vec<String>>,
}

impl<'a> Env<'a> {
    pub fn new(space: &'a Space) -> Env<'a> {
        Env { space, pref: None, objects: BTreeMap::new(), families: BTreeMap::new() }
    }

    pub fn with_pref(mut self, pref: &'a dyn Ranking) -> Env<'a> {
        self.pref = Some(pref);
        self
    }

    pub fn insert(&mut self, name: &str, v: Value) {
        self.objects.insert(name.to_string(), v);
    }

    fn lookup(&self, name: &str, binds: &[(String, String)]) -> Result<&Value, Error> {
        let target = binds
            .iter()
            .rev()
            .find(|(v, _)| v == name)
            .map(|(_, o)| o.as_str())
            .unwrap_or(name);
        self.objects
            .get(target)
            .ok_or_else(|| Error::Unresolved(format!("`{target}`")))
    }

    /// Domain on which a term is defined.
    fn term_domain(&self, t: &Term, binds: &[(String, String)]) -> Result<OpenSet, Error> {
        match t {
            Term::Name(n) => Ok(self.lookup(n, binds)?.domain().clone()),
            Term::Mix(w, p, q) => {
                let mut d = self.space.meet(&self.term_domain(p, binds)?, &self.term_domain(q, binds)?)?;
                if let Weight::Name(n) = w.as_ref() {
                    d = self.space.meet(&d, self.lookup(n, binds)?.domain())?;
                }
                Ok(d)
            }
        }
    }

    fn term_value(&self, t: &Term, u: &OpenSet, binds: &[(String, String)]) -> Result<Value, Error> {
        match t {
            Term::Name(n) => self.lookup(n, binds)?.restrict(u),
            Term::Mix(w, p, q) => {
                let a = match w.as_ref() {
                    Weight::Literal(r) => Section::constant(self.space, u, r.clone())?,
                    Weight::Name(n) => match self.lookup(n, binds)?.restrict(u)? {
                        Value::Section(s) => s,
                        Value::Lottery(_) => return Err(Error::Invalid(format!("mixing weight `{n}` is a lottery"))),
                    },
                };
                match (self.term_value(p, u, binds)?, self.term_value(q, u, binds)?) {
                    (Value::Lottery(lp), Value::Lottery(lq)) => Ok(Value::Lottery(mix(self.space, &a, &lp, &lq)?)),
                    _ => Err(Error::Invalid(format!("`{t}` mixes something other than lotteries"))),
                }
            }
        }
    }
}

/// `⟦φ⟧` inside `u`.
pub fn eval_formula(f: &Formula, u: &OpenSet, env: &Env) -> Result<OpenSet, Error> {
    eval_bound(f, u, env, &mut Vec::new())
}

fn eval_bound(f: &Formula, u: &OpenSet, env: &Env, binds: &mut Vec<(String, String)>) -> Result<OpenSet, Error> {
    let space = env.space;
    match f {
        Formula::Top => Ok(u.clone()),
        Formula::Bottom => Ok(space.empty()),
        Formula::Atom(rel, a, b) => {
            let d = space.meet(u, &space.meet(&env.term_domain(a, binds)?, &env.term_domain(b, binds)?)?)?;
            let (va, vb) = (env.term_value(a, &d, binds)?, env.term_value(b, &d, binds)?);
            match (rel, va, vb) {
                (AtomRel::Less, Value::Section(x), Value::Section(y)) => Ok(compare(space, &x, &y, &d)?.lt),
                (AtomRel::Equal, Value::Section(x), Value::Section(y)) => Ok(compare(space, &x, &y, &d)?.eq),
                (AtomRel::Pref(r), Value::Lottery(p), Value::Lottery(q)) => {
                    let pref = env
                        .pref
                        .ok_or_else(|| Error::Unresolved("no preference is declared".into()))?;
                    truth_value(pref, *r, &p, &q, &d)
                }
                _ => Err(Error::Invalid(format!("`{f}` compares objects of the wrong kind"))),
            }
        }
        Formula::And(a, b) => space.meet(&eval_bound(a, u, env, binds)?, &eval_bound(b, u, env, binds)?),
        Formula::Or(a, b) => space.join(&eval_bound(a, u, env, binds)?, &eval_bound(b, u, env, binds)?),
        Formula::Implies(a, b) => {
            let (ta, tb) = (eval_bound(a, u, env, binds)?, eval_bound(b, u, env, binds)?);
            space.meet(u, &space.implies(&ta, &tb)?)
        }
        Formula::Not(a) => space.not_within(&eval_bound(a, u, env, binds)?, u),
        Formula::Exists(v, fam, body) | Formula::ForAll(v, fam, body) => {
            let members = env
                .families
                .get(fam)
                .ok_or_else(|| Error::Unresolved(format!("family `{fam}`")))?;
            let universal = matches!(f, Formula::ForAll(..));
            let mut acc = if universal { u.clone() } else { space.empty() };
            for m in members {
                let dom = space.meet(u, env.lookup(m, binds)?.domain())?;
                binds.push((v.clone(), m.clone()));
                let t = eval_bound(body, &dom, env, binds);
                binds.pop();
                let t = t?;
                acc = if universal {
                    space.meet(&acc, &space.implies(&dom, &t)?)?
                } else {
                    space.join(&acc, &t)?
                };
            }
            Ok(acc)
        }
    }
}

/// Outcome of the monotonicity and local-character checks for one formula.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingLaws {
    /// A tested `V ⊆ U` where restricting lost truth, if any.
    pub monotonicity_failure: Option<OpenSet>,
    /// Whether every cover element forces the formula.
    pub cover_forces: bool,
    /// When the cover forces it, whether `U` does too.
    pub local_character: bool,
}

impl ForcingLaws {
    pub fn holds(&self) -> bool {
        self.monotonicity_failure.is_none() && (!self.cover_forces || self.local_character)
    }
}

/// Checks `⟦φ⟧∩V ⊆ ⟦φ⟧_V` on the cover and sampled sub-opens, and that a
/// cover on which φ is forced everywhere makes `U` force it.
pub fn check_forcing_laws(f: &Formula, u: &OpenSet, cover: &[OpenSet], env: &Env) -> Result<ForcingLaws, Error> {
    let space = env.space;
    if space.join_all(cover)? != *u {
        return Err(Error::Precondition(format!("cover does not have union {}", space.show(u))));
    }
    let whole = eval_formula(f, u, env)?;
    let mut probes: Vec<OpenSet> = cover.to_vec();
    probes.extend(sample_subopens(space, u)?);
    let mut monotonicity_failure = None;
    for v in probes {
        let expected = space.meet(&whole, &v)?;
        let found = eval_formula(f, &v, env)?;
        if !space.is_subset(&expected, &found)? {
            monotonicity_failure = Some(v);
            break;
        }
    }
    let mut cover_forces = true;
    for c in cover {
        if eval_formula(f, c, env)? != *c {
            cover_forces = false;
            break;
        }
    }
    Ok(ForcingLaws { monotonicity_failure, cover_forces, local_character: whole == *u })
}
