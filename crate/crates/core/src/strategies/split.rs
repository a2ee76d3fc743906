//! Skeletons, maximal free expressions and the two splitting semantics.

use std::collections::BTreeSet;
use std::fmt;

use super::StepKind;
use crate::error::{Error, Result};
use crate::rewrite::{fire_abs, Exec, Micro};
use crate::term::{free_vars, is_free, is_pure, is_t, list_free_vars, peel_list, FreshSupply, Name, Path, Sel, Term};

/// A pure context with numbered holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Skeleton {
    Hole(usize),
    Var(Name),
    Abs(Name, Box<Skeleton>),
    App(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    pub fn holes(&self) -> usize {
        match self {
            Skeleton::Hole(_) => 1,
            Skeleton::Var(_) => 0,
            Skeleton::Abs(_, b) => b.holes(),
            Skeleton::App(f, a) => f.holes() + a.holes(),
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::Hole(_) => f.write_str("[]"),
            Skeleton::Var(x) => f.write_str(x),
            Skeleton::Abs(x, b) => write!(f, "\\{x}.{b}"),
            Skeleton::App(g, a) => {
                match **g {
                    Skeleton::Abs(..) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
                match **a {
                    Skeleton::App(..) | Skeleton::Abs(..) => write!(f, " ({a})"),
                    _ => write!(f, " {a}"),
                }
            }
        }
    }
}

fn disjoint(t: &Term, theta: &BTreeSet<Name>) -> bool {
    free_vars(t).is_disjoint(theta)
}

/// The θ-skeleton of a pure term, holes numbered left to right.
pub fn skeleton(p: &Term, theta: &BTreeSet<Name>) -> Result<Skeleton> {
    fn go(p: &Term, theta: &mut BTreeSet<Name>, next: &mut usize) -> Skeleton {
        if disjoint(p, theta) {
            *next += 1;
            return Skeleton::Hole(*next - 1);
        }
        match p {
            Term::Var(x) => Skeleton::Var(x.clone()),
            Term::Abs(x, b) => {
                let added = theta.insert(x.clone());
                let s = go(b, theta, next);
                if added {
                    theta.remove(x);
                }
                Skeleton::Abs(x.clone(), Box::new(s))
            }
            Term::App(f, a) => {
                let f = go(f, theta, next);
                let a = go(a, theta, next);
                Skeleton::App(Box::new(f), Box::new(a))
            }
            _ => unreachable!(),
        }
    }
    if !is_pure(p) {
        return Err(Error::NotPure);
    }
    Ok(go(p, &mut theta.clone(), &mut 0))
}

/// The maximal free expressions of `λθ.p`, left to right.
pub fn mfe_list(p: &Term, theta: &BTreeSet<Name>) -> Result<Vec<Term>> {
    fn go(p: &Term, theta: &mut BTreeSet<Name>, out: &mut Vec<Term>) {
        if disjoint(p, theta) {
            out.push(p.clone());
            return;
        }
        match p {
            Term::Var(_) => {}
            Term::Abs(x, b) => {
                let added = theta.insert(x.clone());
                go(b, theta, out);
                if added {
                    theta.remove(x);
                }
            }
            Term::App(f, a) => {
                go(f, theta, out);
                go(a, theta, out);
            }
            _ => unreachable!(),
        }
    }
    if !is_pure(p) {
        return Err(Error::NotPure);
    }
    let mut out = Vec::new();
    go(p, &mut theta.clone(), &mut out);
    Ok(out)
}

/// Fills the holes of a skeleton in order.
pub fn plug_skeleton(s: &Skeleton, fills: &[Term]) -> Option<Term> {
    fn go(s: &Skeleton, fills: &[Term]) -> Option<Term> {
        Some(match s {
            Skeleton::Hole(i) => fills.get(*i)?.clone(),
            Skeleton::Var(x) => Term::var(x.clone()),
            Skeleton::Abs(x, b) => Term::lam(x.clone(), go(b, fills)?),
            Skeleton::App(f, a) => Term::app(go(f, fills)?, go(a, fills)?),
        })
    }
    (s.holes() == fills.len()).then(|| go(s, fills)).flatten()
}

/// Big-step splitting `p ⇓θ L⟨p'⟩`.
pub fn split_bigstep(p: &Term, theta: &BTreeSet<Name>, supply: &mut FreshSupply) -> Result<Term> {
    fn go(p: &Term, theta: &mut BTreeSet<Name>, supply: &mut FreshSupply) -> (Term, Vec<(Name, Term)>) {
        if disjoint(p, theta) {
            let x = supply.fresh("x");
            return (Term::var(x.clone()), vec![(x, p.clone())]);
        }
        match p {
            Term::Var(_) => (p.clone(), Vec::new()),
            Term::Abs(x, b) => {
                let added = theta.insert(x.clone());
                let (b2, l) = go(b, theta, supply);
                if added {
                    theta.remove(x);
                }
                (Term::lam(x.clone(), b2), l)
            }
            Term::App(f, a) => {
                let (f2, mut l1) = go(f, theta, supply);
                let (a2, l2) = go(a, theta, supply);
                l1.extend(l2);
                (Term::app(f2, a2), l1)
            }
            _ => unreachable!(),
        }
    }
    if !is_pure(p) {
        return Err(Error::NotPure);
    }
    supply.avoid_term(p);
    let (inner, cuts) = go(p, &mut theta.clone(), supply);
    Ok(cuts.into_iter().fold(inner, |acc, (x, c)| Term::sub(acc, x, c)))
}

// ---------------------------------------------------------------------------
// Small-step splitting

/// One small-step splitting step on the T term at `path`, recorded in `ex`.
pub(crate) fn st_step_in(ex: &mut Exec<'_>, path: &[Sel]) -> Result<Option<StepKind>> {
    let Term::Abs(y, body) = ex.node(path)? else {
        return Err(Error::NotInT);
    };
    let y = y.clone();
    let (_, cuts) = peel_list(body);
    // outermost first: skip cuts whose content does not mention y
    let n = cuts.len();
    let mut depth = None;
    for (k, c) in cuts.iter().rev().enumerate() {
        if is_free(&y, &c.content) {
            depth = Some((k, n - 1 - k));
            break;
        }
    }
    let Some((k, idx)) = depth else {
        return Ok(None);
    };
    let mut at = path.to_vec();
    at.push(Sel::AbsBody);
    at.extend(std::iter::repeat_n(Sel::CutBody, k));
    let cut = &cuts[idx];
    let kind = match (cut.kind, &cut.content) {
        (crate::term::CutKind::Sub, Term::Var(_)) => {
            ex.apply(Micro::Var { path: at })?;
            StepKind::ST_VAR
        }
        (crate::term::CutKind::Sub, Term::App(..)) => {
            let y1 = ex.supply.fresh(&cut.var);
            let z1 = ex.supply.fresh(&cut.var);
            ex.apply(Micro::App { path: at, y: y1, z: z1 })?;
            StepKind::ST_APP
        }
        (crate::term::CutKind::Sub, Term::Abs(..)) => {
            let z = ex.supply.fresh("w");
            ex.apply(Micro::Dist { path: at, z })?;
            StepKind::ST_DIST
        }
        (crate::term::CutKind::Dist, Term::Abs(z, inner)) => {
            let (_, ll) = peel_list(inner);
            if list_free_vars(&ll).contains(z) {
                let mut content = at.clone();
                content.push(Sel::CutContent);
                return st_step_in(ex, &content);
            }
            fire_abs(ex, &at)?;
            StepKind::ST_ABS
        }
        _ => return Err(Error::NotInT),
    };
    Ok(Some(kind))
}

/// One small-step splitting step, if any.
pub fn st_step(t: &Term, supply: &mut FreshSupply) -> Result<Option<(StepKind, Term)>> {
    if !is_t(t) {
        return Err(Error::NotInT);
    }
    let mut ex = Exec::new(t.clone(), supply);
    Ok(st_step_in(&mut ex, &[])?.map(|k| (k, ex.term)))
}

/// Guard for splitting loops.
const ST_FUEL: usize = 100_000;

pub(crate) fn st_normalize_in(ex: &mut Exec<'_>, path: &[Sel]) -> Result<Vec<StepKind>> {
    let mut kinds = Vec::new();
    for _ in 0..ST_FUEL {
        match st_step_in(ex, path)? {
            None => return Ok(kinds),
            Some(k) => kinds.push(k),
        }
    }
    Err(Error::InternalNonTermination)
}

/// The small-step splitting normal form.
pub fn st_normalize(t: &Term, supply: &mut FreshSupply) -> Result<Term> {
    if !is_t(t) {
        return Err(Error::NotInT);
    }
    let mut ex = Exec::new(t.clone(), supply);
    st_normalize_in(&mut ex, &[])?;
    Ok(ex.term)
}

/// Position of the body of the abstraction at `path`.
pub(crate) fn body_path(path: &[Sel]) -> Path {
    let mut p = path.to_vec();
    p.push(Sel::AbsBody);
    p
}

/// Reorders the trailing cuts of `λy.L⟨p⟩` (or `L⟨p⟩`) by the first
/// occurrence of their variable in `p`.
pub fn order_cuts(t: &Term) -> Term {
    if let Term::Abs(y, b) = t {
        return Term::lam(y.clone(), order_cuts(b));
    }
    let (inner, mut cuts) = peel_list(t);
    let mut seen = Vec::new();
    for path in inner.paths() {
        if let Some(Term::Var(v)) = inner.at(&path) {
            if !seen.contains(v) {
                seen.push(v.clone());
            }
        }
    }
    cuts.sort_by_key(|c| seen.iter().position(|v| *v == c.var).unwrap_or(usize::MAX));
    crate::term::wrap(inner.clone(), &cuts)
}

/// α-equality up to the order of independent trailing cuts.
pub fn split_equivalent(a: &Term, b: &Term) -> bool {
    order_cuts(a) == order_cuts(b)
}
