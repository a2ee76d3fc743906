//! Terms, positions, fresh names and capture-avoiding substitution.
//!
//! Terms use global names. Two terms are equal when they are
//! α-equivalent; [`Term::syn_eq`] gives syntactic identity.

mod grammar;
mod syntax;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grammar::{check_grammar, is_ll, is_pure, is_t, is_u, Grammar};
pub use syntax::{parse, print, print_unicode, Printer};

/// Variable names.
pub type Name = String;

/// The two kinds of explicit cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CutKind {
    /// Explicit substitution `t[x/u]`.
    Sub,
    /// Explicit distributor `t[x//λy.u]`.
    Dist,
}

impl CutKind {
    /// `ES(·)`: 1 for substitutions, 0 for distributors.
    pub fn es(self) -> usize {
        match self {
            CutKind::Sub => 1,
            CutKind::Dist => 0,
        }
    }
}

/// A term of the calculus.
#[derive(Clone, Debug)]
pub enum Term {
    Var(Name),
    Abs(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `body[x/content]`
    Sub(Box<Term>, Name, Box<Term>),
    /// `body[x//content]`, content is an abstraction
    Dist(Box<Term>, Name, Box<Term>),
}

/// One step of a [`Path`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sel {
    AbsBody,
    AppFun,
    AppArg,
    CutBody,
    CutContent,
}

/// A position inside a term, read from the root.
pub type Path = Vec<Sel>;

/// A cut peeled off a list context.
#[derive(Clone, Debug)]
pub struct Cut {
    pub kind: CutKind,
    pub var: Name,
    pub content: Term,
}

impl Cut {
    pub fn new(kind: CutKind, var: impl Into<Name>, content: Term) -> Cut {
        Cut {
            kind,
            var: var.into(),
            content,
        }
    }
}

impl Term {
    pub fn var(x: impl Into<Name>) -> Term {
        Term::Var(x.into())
    }

    pub fn lam(x: impl Into<Name>, body: Term) -> Term {
        Term::Abs(x.into(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of a head to several arguments.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn sub(body: Term, x: impl Into<Name>, content: Term) -> Term {
        Term::Sub(Box::new(body), x.into(), Box::new(content))
    }

    pub fn dist(body: Term, x: impl Into<Name>, content: Term) -> Term {
        Term::Dist(Box::new(body), x.into(), Box::new(content))
    }

    pub fn cut(kind: CutKind, body: Term, x: impl Into<Name>, content: Term) -> Term {
        match kind {
            CutKind::Sub => Term::sub(body, x, content),
            CutKind::Dist => Term::dist(body, x, content),
        }
    }

    /// The identity `λx.x`.
    pub fn id(x: impl Into<Name>) -> Term {
        let x = x.into();
        Term::lam(x.clone(), Term::Var(x))
    }

    /// Decomposes a cut node into `(kind, body, binder, content)`.
    pub fn as_cut(&self) -> Option<(CutKind, &Term, &Name, &Term)> {
        match self {
            Term::Sub(b, x, c) => Some((CutKind::Sub, b, x, c)),
            Term::Dist(b, x, c) => Some((CutKind::Dist, b, x, c)),
            _ => None,
        }
    }

    pub fn is_cut(&self) -> bool {
        matches!(self, Term::Sub(..) | Term::Dist(..))
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, Term::Abs(..))
    }

    /// Syntactic identity, names included.
    pub fn syn_eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Abs(x, b), Term::Abs(y, c)) => x == y && b.syn_eq(c),
            (Term::App(f, a), Term::App(g, b)) => f.syn_eq(g) && a.syn_eq(b),
            (Term::Sub(b, x, c), Term::Sub(d, y, e)) | (Term::Dist(b, x, c), Term::Dist(d, y, e)) => {
                x == y && b.syn_eq(d) && c.syn_eq(e)
            }
            _ => false,
        }
    }

    /// `|t|`: number of constructor nodes, cuts included.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Sub(b, _, c) | Term::Dist(b, _, c) => 1 + b.size() + c.size(),
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_names(self, &mut out);
        out
    }

    /// Subterm at a path.
    pub fn at(&self, path: &[Sel]) -> Option<&Term> {
        let mut cur = self;
        for s in path {
            cur = cur.child(*s)?;
        }
        Some(cur)
    }

    /// Immediate child selected by `s`.
    pub fn child(&self, s: Sel) -> Option<&Term> {
        match (self, s) {
            (Term::Abs(_, b), Sel::AbsBody) => Some(b),
            (Term::App(f, _), Sel::AppFun) => Some(f),
            (Term::App(_, a), Sel::AppArg) => Some(a),
            (Term::Sub(b, _, _), Sel::CutBody) | (Term::Dist(b, _, _), Sel::CutBody) => Some(b),
            (Term::Sub(_, _, c), Sel::CutContent) | (Term::Dist(_, _, c), Sel::CutContent) => Some(c),
            _ => None,
        }
    }

    fn child_mut(&mut self, s: Sel) -> Option<&mut Term> {
        match (self, s) {
            (Term::Abs(_, b), Sel::AbsBody) => Some(b),
            (Term::App(f, _), Sel::AppFun) => Some(f),
            (Term::App(_, a), Sel::AppArg) => Some(a),
            (Term::Sub(b, _, _), Sel::CutBody) | (Term::Dist(b, _, _), Sel::CutBody) => Some(b),
            (Term::Sub(_, _, c), Sel::CutContent) | (Term::Dist(_, _, c), Sel::CutContent) => Some(c),
            _ => None,
        }
    }

    /// Mutable subterm at a path.
    pub fn at_mut(&mut self, path: &[Sel]) -> Option<&mut Term> {
        let mut cur = self;
        for s in path {
            cur = cur.child_mut(*s)?;
        }
        Some(cur)
    }

    /// Copy of the term with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[Sel], filler: Term) -> Result<Term> {
        let mut out = self.clone();
        *out.at_mut(path).ok_or(Error::InvalidPath)? = filler;
        Ok(out)
    }

    /// Names bound above the position `path`, outermost first.
    pub fn binders_above(&self, path: &[Sel]) -> Result<Vec<Name>> {
        let mut out = Vec::new();
        let mut cur = self;
        for s in path {
            match (cur, s) {
                (Term::Abs(x, _), Sel::AbsBody) => out.push(x.clone()),
                (Term::Sub(_, x, _), Sel::CutBody) | (Term::Dist(_, x, _), Sel::CutBody) => out.push(x.clone()),
                _ => {}
            }
            cur = cur.child(*s).ok_or(Error::InvalidPath)?;
        }
        Ok(out)
    }

    /// Every valid path of the term in preorder, body before content.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        collect_paths(self, &mut cur, &mut out);
        out
    }
}

fn collect_names(t: &Term, out: &mut BTreeSet<Name>) {
    visit_names(t, &mut |x| {
        out.insert(x.clone());
    });
}

fn visit_names(t: &Term, f: &mut impl FnMut(&Name)) {
    match t {
        Term::Var(x) => f(x),
        Term::Abs(x, b) => {
            f(x);
            visit_names(b, f);
        }
        Term::App(l, r) => {
            visit_names(l, f);
            visit_names(r, f);
        }
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            f(x);
            visit_names(b, f);
            visit_names(c, f);
        }
    }
}

fn collect_paths(t: &Term, cur: &mut Path, out: &mut Vec<Path>) {
    out.push(cur.clone());
    let kids: &[Sel] = match t {
        Term::Var(_) => &[],
        Term::Abs(..) => &[Sel::AbsBody],
        Term::App(..) => &[Sel::AppFun, Sel::AppArg],
        Term::Sub(..) | Term::Dist(..) => &[Sel::CutBody, Sel::CutContent],
    };
    for s in kids {
        cur.push(*s);
        collect_paths(t.child(*s).unwrap(), cur, out);
        cur.pop();
    }
}

/// α-equivalence.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&print(self))
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Term, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Free variables

/// `fv(t)`.
pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    fv_into(t, &mut bound, &mut out);
    out
}

fn fv_into<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::Abs(x, b) => {
            bound.push(x);
            fv_into(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            fv_into(f, bound, out);
            fv_into(a, bound, out);
        }
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            fv_into(c, bound, out);
            bound.push(x);
            fv_into(b, bound, out);
            bound.pop();
        }
    }
}

/// Whether `x` occurs free in `t`.
pub fn is_free(x: &str, t: &Term) -> bool {
    match t {
        Term::Var(y) => x == y,
        Term::Abs(y, b) => x != y && is_free(x, b),
        Term::App(f, a) => is_free(x, f) || is_free(x, a),
        Term::Sub(b, y, c) | Term::Dist(b, y, c) => is_free(x, c) || (x != y && is_free(x, b)),
    }
}

/// `|t|_x`: number of free occurrences of `x`.
pub fn occ_count(t: &Term, x: &str) -> usize {
    match t {
        Term::Var(y) => usize::from(x == y),
        Term::Abs(y, b) => {
            if x == y {
                0
            } else {
                occ_count(b, x)
            }
        }
        Term::App(f, a) => occ_count(f, x) + occ_count(a, x),
        Term::Sub(b, y, c) | Term::Dist(b, y, c) => {
            occ_count(c, x) + if x == y { 0 } else { occ_count(b, x) }
        }
    }
}

/// Paths of the free occurrences of `x`, left to right.
pub fn occurrences(t: &Term, x: &str) -> Vec<Path> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    occ_paths(t, x, &mut cur, &mut out);
    out
}

fn occ_paths(t: &Term, x: &str, cur: &mut Path, out: &mut Vec<Path>) {
    match t {
        Term::Var(y) => {
            if x == y {
                out.push(cur.clone());
            }
        }
        Term::Abs(y, b) => {
            if x != y {
                cur.push(Sel::AbsBody);
                occ_paths(b, x, cur, out);
                cur.pop();
            }
        }
        Term::App(f, a) => {
            cur.push(Sel::AppFun);
            occ_paths(f, x, cur, out);
            cur.pop();
            cur.push(Sel::AppArg);
            occ_paths(a, x, cur, out);
            cur.pop();
        }
        Term::Sub(b, y, c) | Term::Dist(b, y, c) => {
            if x != y {
                cur.push(Sel::CutBody);
                occ_paths(b, x, cur, out);
                cur.pop();
            }
            cur.push(Sel::CutContent);
            occ_paths(c, x, cur, out);
            cur.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Fresh names

/// Deterministic supply of fresh names: a base name followed by a counter.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    counters: HashMap<String, usize>,
    avoid: HashSet<Name>,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply::default()
    }

    pub fn with_avoid<I, S>(names: I) -> FreshSupply
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        let mut s = FreshSupply::new();
        for n in names {
            s.avoid.insert(n.into());
        }
        s
    }

    /// Declares a name as taken.
    pub fn avoid(&mut self, name: impl Into<Name>) {
        self.avoid.insert(name.into());
    }

    /// Declares every name of a term as taken.
    pub fn avoid_term(&mut self, t: &Term) {
        let mut add = |x: &Name| {
            if !self.avoid.contains(x) {
                self.avoid.insert(x.clone());
            }
        };
        visit_names(t, &mut add);
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.avoid.contains(name)
    }

    /// A name never drawn before and outside the avoid-set.
    pub fn fresh(&mut self, base: &str) -> Name {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
        let stem = if stem.is_empty() { "v" } else { stem };
        loop {
            let c = self.counters.entry(stem.to_string()).or_insert(0);
            *c += 1;
            let name = format!("{stem}{c}");
            if self.avoid.insert(name.clone()) {
                return name;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Renaming and substitution

/// Replaces free occurrences of `x` by the variable `y`, assumed fresh.
pub fn rename_free(t: &Term, x: &str, y: &str) -> Term {
    match t {
        Term::Var(z) => {
            if z == x {
                Term::var(y)
            } else {
                t.clone()
            }
        }
        Term::Abs(z, b) => {
            if z == x {
                t.clone()
            } else {
                Term::lam(z.clone(), rename_free(b, x, y))
            }
        }
        Term::App(f, a) => Term::app(rename_free(f, x, y), rename_free(a, x, y)),
        Term::Sub(b, z, c) | Term::Dist(b, z, c) => {
            let kind = t.as_cut().unwrap().0;
            let c = rename_free(c, x, y);
            let b = if z == x { (**b).clone() } else { rename_free(b, x, y) };
            Term::cut(kind, b, z.clone(), c)
        }
    }
}

/// Renames the binder of the node at the root of `t` (an abstraction or a
/// cut) to `fresh`.
pub fn rename_binder(t: &Term, fresh: &str) -> Result<Term> {
    match t {
        Term::Abs(x, b) => Ok(Term::lam(fresh, rename_free(b, x, fresh))),
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            let kind = t.as_cut().unwrap().0;
            Ok(Term::cut(kind, rename_free(b, x, fresh), fresh, (**c).clone()))
        }
        _ => Err(Error::InvalidRedex("node has no binder".into())),
    }
}

/// Capture-avoiding meta-level substitution `t{x/u}`.
pub fn subst(t: &Term, x: &str, u: &Term, supply: &mut FreshSupply) -> Term {
    supply.avoid_term(t);
    supply.avoid_term(u);
    let fvu = free_vars(u);
    subst_go(t, x, u, &fvu, supply)
}

fn subst_go(t: &Term, x: &str, u: &Term, fvu: &BTreeSet<Name>, supply: &mut FreshSupply) -> Term {
    match t {
        Term::Var(y) => {
            if y == x {
                u.clone()
            } else {
                t.clone()
            }
        }
        Term::App(f, a) => Term::app(subst_go(f, x, u, fvu, supply), subst_go(a, x, u, fvu, supply)),
        Term::Abs(y, b) => {
            let (y, b) = under_binder(y, b, x, u, fvu, supply);
            Term::lam(y, b)
        }
        Term::Sub(b, y, c) | Term::Dist(b, y, c) => {
            let kind = t.as_cut().unwrap().0;
            let c = subst_go(c, x, u, fvu, supply);
            let (y, b) = under_binder(y, b, x, u, fvu, supply);
            Term::cut(kind, b, y, c)
        }
    }
}

fn under_binder(
    y: &Name,
    b: &Term,
    x: &str,
    u: &Term,
    fvu: &BTreeSet<Name>,
    supply: &mut FreshSupply,
) -> (Name, Term) {
    if y == x || !is_free(x, b) {
        return (y.clone(), b.clone());
    }
    if fvu.contains(y) {
        let y2 = supply.fresh(y);
        let b2 = rename_free(b, y, &y2);
        let b3 = subst_go(&b2, x, u, fvu, supply);
        (y2, b3)
    } else {
        (y.clone(), subst_go(b, x, u, fvu, supply))
    }
}

/// α-equivalence by simultaneous traversal with a binder correspondence.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    let mut env: Vec<(&str, &str)> = Vec::new();
    aeq(t, u, &mut env)
}

fn aeq<'a>(t: &'a Term, u: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    match (t, u) {
        (Term::Var(a), Term::Var(b)) => {
            let ia = env.iter().rposition(|(l, _)| l == a);
            let ib = env.iter().rposition(|(_, r)| r == b);
            match (ia, ib) {
                (None, None) => a == b,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Term::Abs(x, b), Term::Abs(y, c)) => {
            env.push((x, y));
            let r = aeq(b, c, env);
            env.pop();
            r
        }
        (Term::App(f, a), Term::App(g, b)) => aeq(f, g, env) && aeq(a, b, env),
        (Term::Sub(b, x, c), Term::Sub(d, y, e)) | (Term::Dist(b, x, c), Term::Dist(d, y, e)) => {
            if !aeq(c, e, env) {
                return false;
            }
            env.push((x, y));
            let r = aeq(b, d, env);
            env.pop();
            r
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Contexts

/// Replaces the subterm at `path` by `filler`. With `capture_free`, fails
/// when a binder above the hole would capture a free variable of `filler`.
pub fn plug(ctx: &Term, path: &[Sel], filler: &Term, capture_free: bool) -> Result<Term> {
    if capture_free {
        let binders = ctx.binders_above(path)?;
        let fv = free_vars(filler);
        if let Some(x) = binders.iter().find(|b| fv.contains(*b)) {
            return Err(Error::Capture(x.clone()));
        }
    }
    ctx.replace_at(path, filler.clone())
}

/// Splits `t = L⟨inner⟩` with `inner` not a cut. Cuts are listed from the
/// innermost to the outermost.
pub fn peel_list(t: &Term) -> (&Term, Vec<Cut>) {
    let mut cuts = Vec::new();
    let mut cur = t;
    while let Some((kind, b, x, c)) = cur.as_cut() {
        cuts.push(Cut::new(kind, x.clone(), c.clone()));
        cur = b;
    }
    cuts.reverse();
    (cur, cuts)
}

/// The term under the list context of `t`, and the number of cuts in it.
pub fn list_head(t: &Term) -> (&Term, usize) {
    let mut n = 0;
    let mut cur = t;
    while let Some((_, b, _, _)) = cur.as_cut() {
        n += 1;
        cur = b;
    }
    (cur, n)
}

/// Inverse of [`peel_list`].
pub fn wrap(inner: Term, cuts: &[Cut]) -> Term {
    cuts.iter().fold(inner, |acc, c| Term::cut(c.kind, acc, c.var.clone(), c.content.clone()))
}

/// `dom(L)`.
pub fn dom(cuts: &[Cut]) -> Vec<Name> {
    cuts.iter().map(|c| c.var.clone()).collect()
}

/// Free variables of a list context: contents minus the binders of the
/// cuts enclosing them.
pub fn list_free_vars(cuts: &[Cut]) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for (i, c) in cuts.iter().enumerate() {
        for v in free_vars(&c.content) {
            // a content is in the scope of the cuts further out only
            if !cuts[i + 1..].iter().any(|o| o.var == v) {
                out.insert(v);
            }
        }
    }
    out
}
