//! Non-idempotent intersection types, typing derivations and their
//! weighted measures.

mod expand;
mod subst;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::level;
use crate::term::{Name, Term};

pub use expand::{expand_step, infer, infer_along, type_normal_form, NEUTRAL_TARGET};
pub use subst::{anti_subst_typing, partial_subst_typing, retarget, split_many};

/// A type: the answer constant, a base type, or `M → σ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IType {
    Answer,
    Base(String),
    Arrow(MultiType, Box<IType>),
}

/// A finite multiset of types, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiType(Vec<IType>);

impl IType {
    pub fn base(name: impl Into<String>) -> IType {
        IType::Base(name.into())
    }

    pub fn arrow(m: MultiType, s: IType) -> IType {
        IType::Arrow(m, Box::new(s))
    }
}

impl MultiType {
    pub fn new(mut v: Vec<IType>) -> MultiType {
        v.sort();
        MultiType(v)
    }

    pub fn empty() -> MultiType {
        MultiType(Vec::new())
    }

    pub fn single(s: IType) -> MultiType {
        MultiType(vec![s])
    }

    pub fn elements(&self) -> &[IType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiset union `⊔`.
    pub fn union(&self, other: &MultiType) -> MultiType {
        MultiType::new(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// Multiset difference, if `other ⊑ self`.
    pub fn minus(&self, other: &MultiType) -> Option<MultiType> {
        let mut rest = self.0.clone();
        for s in &other.0 {
            let i = rest.iter().position(|r| r == s)?;
            rest.remove(i);
        }
        Some(MultiType(rest))
    }
}

impl fmt::Display for IType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IType::Answer => f.write_str("a"),
            IType::Base(b) => f.write_str(b),
            IType::Arrow(m, s) => write!(f, "{m}->{s}"),
        }
    }
}

impl fmt::Display for MultiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

// ---------------------------------------------------------------------------
// Type syntax: σ ::= a | ident | M -> σ,  M ::= [σ, …]

struct TypeParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> TypeParser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Parse {
            line: 1,
            col: self.pos + 1,
            expected: vec![what.to_string()],
            found: String::from_utf8_lossy(&self.s[self.pos.min(self.s.len())..]).chars().take(8).collect(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<()> {
        if self.eat("->") || self.eat("→") {
            Ok(())
        } else {
            Err(self.err("->"))
        }
    }

    fn itype(&mut self) -> Result<IType> {
        self.ws();
        if self.s.get(self.pos) == Some(&b'[') {
            let m = self.multi()?;
            self.arrow()?;
            return Ok(IType::arrow(m, self.itype()?));
        }
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("type"));
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(if name == "a" { IType::Answer } else { IType::base(name) })
    }

    fn multi(&mut self) -> Result<MultiType> {
        if !self.eat("[") {
            return Err(self.err("["));
        }
        let mut v = Vec::new();
        if !self.eat("]") {
            loop {
                v.push(self.itype()?);
                if self.eat("]") {
                    break;
                }
                if !self.eat(",") {
                    return Err(self.err(", or ]"));
                }
            }
        }
        Ok(MultiType::new(v))
    }

    fn done(&mut self) -> Result<()> {
        self.ws();
        if self.pos == self.s.len() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }
}

impl FromStr for IType {
    type Err = Error;
    fn from_str(s: &str) -> Result<IType> {
        let mut p = TypeParser { s: s.as_bytes(), pos: 0 };
        let t = p.itype()?;
        p.done()?;
        Ok(t)
    }
}

impl FromStr for MultiType {
    type Err = Error;
    fn from_str(s: &str) -> Result<MultiType> {
        let mut p = TypeParser { s: s.as_bytes(), pos: 0 };
        let t = p.multi()?;
        p.done()?;
        Ok(t)
    }
}

macro_rules! serde_via_string {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_string!(IType);
serde_via_string!(MultiType);

// ---------------------------------------------------------------------------
// Environments

/// A typing environment; absent variables are mapped to `[]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Env(BTreeMap<Name, MultiType>);

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn single(x: impl Into<Name>, m: MultiType) -> Env {
        let mut e = Env::new();
        e.insert(x, m);
        e
    }

    pub fn get(&self, x: &str) -> MultiType {
        self.0.get(x).cloned().unwrap_or_default()
    }

    /// Adds `m` to the entry of `x`.
    pub fn insert(&mut self, x: impl Into<Name>, m: MultiType) {
        if m.is_empty() {
            return;
        }
        let x = x.into();
        let cur = self.get(&x);
        self.0.insert(x, cur.union(&m));
    }

    pub fn remove(&mut self, x: &str) -> MultiType {
        self.0.remove(x).unwrap_or_default()
    }

    pub fn without(&self, x: &str) -> Env {
        let mut e = self.clone();
        e.remove(x);
        e
    }

    /// `Γ ⊎ Δ`.
    pub fn union(&self, other: &Env) -> Env {
        let mut e = self.clone();
        for (x, m) in &other.0 {
            e.insert(x.clone(), m.clone());
        }
        e
    }

    pub fn dom(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &MultiType)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{m}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Derivations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    AX,
    ABS,
    ANS,
    APP,
    CUT,
    MANY,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// What a judgment assigns: a type, or a multi-type for MANY.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Judged {
    Multi(MultiType),
    Single(IType),
}

impl fmt::Display for Judged {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judged::Single(s) => write!(f, "{s}"),
            Judged::Multi(m) => write!(f, "{m}"),
        }
    }
}

/// A typing derivation `Γ ⊢ t : σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: Rule,
    pub env: Env,
    pub subject: Term,
    #[serde(rename = "type")]
    pub ty: Judged,
    #[serde(default)]
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// `x : [σ] ⊢ x : σ`
    pub fn ax(x: impl Into<Name>, s: IType) -> Derivation {
        let x = x.into();
        Derivation {
            rule: Rule::AX,
            env: Env::single(x.clone(), MultiType::single(s.clone())),
            subject: Term::var(x),
            ty: Judged::Single(s),
            premises: Vec::new(),
        }
    }

    /// `∅ ⊢ λx.t : a`
    pub fn ans(subject: Term) -> Derivation {
        Derivation {
            rule: Rule::ANS,
            env: Env::new(),
            subject,
            ty: Judged::Single(IType::Answer),
            premises: Vec::new(),
        }
    }

    /// ABS over the premise, binding `x`.
    pub fn abs(x: impl Into<Name>, body: Derivation) -> Derivation {
        let x = x.into();
        let m = body.env.get(&x);
        Derivation {
            rule: Rule::ABS,
            env: body.env.without(&x),
            subject: Term::lam(x, body.subject.clone()),
            ty: Judged::Single(IType::arrow(m, body.single().clone())),
            premises: vec![body],
        }
    }

    /// APP of a function derivation and a MANY argument derivation.
    pub fn app(fun: Derivation, arg: Derivation) -> Derivation {
        let ty = match fun.single() {
            IType::Arrow(_, s) => (**s).clone(),
            other => other.clone(),
        };
        Derivation {
            rule: Rule::APP,
            env: fun.env.union(&arg.env),
            subject: Term::app(fun.subject.clone(), arg.subject.clone()),
            ty: Judged::Single(ty),
            premises: vec![fun, arg],
        }
    }

    /// CUT of a body derivation and a MANY content derivation.
    pub fn cut(kind: crate::term::CutKind, x: impl Into<Name>, body: Derivation, content: Derivation) -> Derivation {
        let x = x.into();
        Derivation {
            rule: Rule::CUT,
            env: body.env.without(&x).union(&content.env),
            subject: Term::cut(kind, body.subject.clone(), x, content.subject.clone()),
            ty: body.ty.clone(),
            premises: vec![body, content],
        }
    }

    /// MANY over premises typing the same subject.
    pub fn many(subject: Term, premises: Vec<Derivation>) -> Derivation {
        let env = premises.iter().fold(Env::new(), |e, p| e.union(&p.env));
        let ty = MultiType::new(premises.iter().map(|p| p.single().clone()).collect());
        Derivation {
            rule: Rule::MANY,
            env,
            subject,
            ty: Judged::Multi(ty),
            premises,
        }
    }

    /// The type of a non-MANY judgment (the answer constant for MANY).
    pub fn single(&self) -> &IType {
        match &self.ty {
            Judged::Single(s) => s,
            Judged::Multi(_) => &IType::Answer,
        }
    }

    /// The multi-type of a MANY judgment (empty otherwise).
    pub fn multi(&self) -> MultiType {
        match &self.ty {
            Judged::Multi(m) => m.clone(),
            Judged::Single(_) => MultiType::empty(),
        }
    }

    /// Indented tree, conclusion first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        use std::fmt::Write;
        let _ = writeln!(
            out,
            "{}{} {} |- {} : {}",
            "  ".repeat(depth),
            self.rule,
            self.env,
            self.subject,
            self.ty
        );
        for p in &self.premises {
            p.write_text(depth + 1, out);
        }
    }

    /// Parses the indented text form.
    pub fn from_text(s: &str) -> Result<Derivation> {
        let mut lines: Vec<(usize, usize, &str)> = Vec::new();
        for (i, l) in s.lines().enumerate() {
            if l.trim().is_empty() {
                continue;
            }
            let indent = l.len() - l.trim_start().len();
            lines.push((i + 1, indent, l.trim()));
        }
        let mut pos = 0;
        let d = parse_node(&lines, &mut pos)?;
        if pos != lines.len() {
            return Err(bad_line(lines[pos].0, "a single root"));
        }
        Ok(d)
    }
}

fn bad_line(line: usize, what: &str) -> Error {
    Error::Parse {
        line,
        col: 1,
        expected: vec![what.to_string()],
        found: "derivation line".into(),
    }
}

fn parse_node(lines: &[(usize, usize, &str)], pos: &mut usize) -> Result<Derivation> {
    let (ln, indent, text) = lines[*pos];
    *pos += 1;
    let (rule, rest) = text.split_once(' ').ok_or_else(|| bad_line(ln, "rule name"))?;
    let rule = match rule {
        "AX" => Rule::AX,
        "ABS" => Rule::ABS,
        "ANS" => Rule::ANS,
        "APP" => Rule::APP,
        "CUT" => Rule::CUT,
        "MANY" => Rule::MANY,
        _ => return Err(bad_line(ln, "AX, ABS, ANS, APP, CUT or MANY")),
    };
    let (env_s, judg) = rest.split_once("|-").ok_or_else(|| bad_line(ln, "|-"))?;
    let (subj, ty) = judg.rsplit_once(" : ").ok_or_else(|| bad_line(ln, "subject : type"))?;
    let mut env = Env::new();
    for entry in split_top(env_s.trim()) {
        let (x, m) = entry.split_once(':').ok_or_else(|| bad_line(ln, "x:[…]"))?;
        env.insert(x.trim(), m.trim().parse::<MultiType>().map_err(|_| bad_line(ln, "multi-type"))?);
    }
    let subject = crate::term::parse(subj.trim()).map_err(|_| bad_line(ln, "term"))?;
    let ty = if rule == Rule::MANY {
        Judged::Multi(ty.trim().parse().map_err(|_| bad_line(ln, "multi-type"))?)
    } else {
        Judged::Single(ty.trim().parse().map_err(|_| bad_line(ln, "type"))?)
    };
    let mut premises = Vec::new();
    while *pos < lines.len() && lines[*pos].1 > indent {
        premises.push(parse_node(lines, pos)?);
    }
    Ok(Derivation {
        rule,
        env,
        subject,
        ty,
        premises,
    })
}

/// Splits on commas outside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(&s[start..]);
    }
    out
}

// ---------------------------------------------------------------------------
// Checking and measures

/// Checks that every node instantiates its rule.
pub fn check_derivation(d: &Derivation) -> Result<()> {
    check_at(d, &mut Vec::new())
}

fn check_at(d: &Derivation, at: &mut Vec<usize>) -> Result<()> {
    let fail = |msg: &str| {
        let loc: Vec<String> = at.iter().map(|i| i.to_string()).collect();
        Error::InvalidDerivation(format!("{} node at [{}] ({}): {msg}", d.rule, loc.join("."), d.subject))
    };
    let arity = match d.rule {
        Rule::AX | Rule::ANS => 0,
        Rule::ABS => 1,
        Rule::APP | Rule::CUT => 2,
        Rule::MANY => d.premises.len(),
    };
    if d.premises.len() != arity {
        return Err(fail("wrong number of premises"));
    }
    let is_many = |p: &Derivation| p.rule == Rule::MANY;
    match (d.rule, &d.subject, &d.ty) {
        (Rule::MANY, _, Judged::Multi(m)) => {
            if d.premises.iter().any(|p| !p.subject.syn_eq(&d.subject) || is_many(p)) {
                return Err(fail("premises must type the same subject with a type"));
            }
            if *m != MultiType::new(d.premises.iter().map(|p| p.single().clone()).collect()) {
                return Err(fail("multi-type is not the multiset of premise types"));
            }
            let env = d.premises.iter().fold(Env::new(), |e, p| e.union(&p.env));
            if env != d.env {
                return Err(fail("environment is not the union of premise environments"));
            }
        }
        (Rule::MANY, _, _) => return Err(fail("MANY must conclude a multi-type")),
        (_, _, Judged::Multi(_)) => return Err(fail("only MANY concludes a multi-type")),
        (Rule::AX, Term::Var(x), Judged::Single(s)) => {
            if d.env != Env::single(x.clone(), MultiType::single(s.clone())) {
                return Err(fail("AX requires the environment x:[σ]"));
            }
        }
        (Rule::ANS, Term::Abs(..), Judged::Single(IType::Answer)) => {
            if !d.env.is_empty() {
                return Err(fail("ANS requires the empty environment"));
            }
        }
        (Rule::ANS, Term::Abs(..), _) => return Err(fail("ANS concludes the answer type")),
        (Rule::ABS, Term::Abs(x, b), Judged::Single(IType::Arrow(m, s))) => {
            let p = &d.premises[0];
            if is_many(p) || !p.subject.syn_eq(b) || p.single() != &**s {
                return Err(fail("premise does not type the body at the result type"));
            }
            if p.env.get(x) != *m || !d.env.get(x).is_empty() || p.env.without(x) != d.env {
                return Err(fail("environment does not bind the abstracted variable"));
            }
        }
        (Rule::ABS, Term::Abs(..), _) => return Err(fail("ABS concludes an arrow type")),
        (Rule::APP, Term::App(f, a), Judged::Single(s)) => {
            let (pf, pa) = (&d.premises[0], &d.premises[1]);
            if is_many(pf) || !pf.subject.syn_eq(f) || !is_many(pa) || !pa.subject.syn_eq(a) {
                return Err(fail("premises do not match the application"));
            }
            match pf.single() {
                IType::Arrow(m, r) if **r == *s && *m == pa.multi() => {}
                _ => return Err(fail("function type does not match argument and result")),
            }
            if pf.env.union(&pa.env) != d.env {
                return Err(fail("environment is not the union of premise environments"));
            }
        }
        (Rule::CUT, t, Judged::Single(s)) if t.is_cut() => {
            let (_, b, x, u) = t.as_cut().unwrap();
            let (pb, pu) = (&d.premises[0], &d.premises[1]);
            if is_many(pb) || !pb.subject.syn_eq(b) || pb.single() != s || !is_many(pu) || !pu.subject.syn_eq(u) {
                return Err(fail("premises do not match the cut"));
            }
            if pb.env.get(x) != pu.multi() {
                return Err(fail("content multi-type differs from the binder's"));
            }
            if pb.env.without(x).union(&pu.env) != d.env {
                return Err(fail("environment is not the union of premise environments"));
            }
        }
        _ => return Err(fail("subject does not match the rule")),
    }
    for (i, p) in d.premises.iter().enumerate() {
        at.push(i);
        check_at(p, at)?;
        at.pop();
    }
    Ok(())
}

/// Number of ABS, APP and ANS rules.
pub fn sz(d: &Derivation) -> usize {
    let own = matches!(d.rule, Rule::ABS | Rule::APP | Rule::ANS) as usize;
    own + d.premises.iter().map(sz).sum::<usize>()
}

/// Triples, ordered lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple(pub usize, pub usize, pub usize);

impl Add for Triple {
    type Output = Triple;
    fn add(self, o: Triple) -> Triple {
        Triple(self.0 + o.0, self.1 + o.1, self.2 + o.2)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0, self.1, self.2)
    }
}

/// `M(Φ, m)`.
pub fn measure_m(d: &Derivation, m: usize) -> Triple {
    match d.rule {
        Rule::AX => Triple(0, 0, 1),
        Rule::ANS => Triple(1, m, 0),
        Rule::ABS => measure_m(&d.premises[0], m) + Triple(1, m, 0),
        Rule::APP => measure_m(&d.premises[0], m) + measure_m(&d.premises[1], m) + Triple(1, m, 0),
        Rule::MANY => d.premises.iter().fold(Triple::default(), |acc, p| acc + measure_m(p, m)),
        Rule::CUT => {
            let (k, b, x, _) = d.subject.as_cut().expect("CUT subject is a cut");
            let w = m + level(b, x) + k.es();
            measure_m(&d.premises[0], m) + measure_m(&d.premises[1], w)
        }
    }
}

/// `D(Φ) = M(Φ, 1)`.
pub fn measure_d(d: &Derivation) -> Triple {
    measure_m(d, 1)
}

#[cfg(test)]
mod tests;
