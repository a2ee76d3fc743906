//! Weak evaluation strategies: call-by-name, skeleton splitting and fully
//! lazy call-by-need.

mod flneed;
mod name;
mod split;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{is_pure, subst, FreshSupply, Name, Path, Sel, Term};

pub use flneed::{flneed_normalize, flneed_outcome, flneed_step};
pub use name::{name_normalize, name_outcome, name_redexes, name_step, NamePolicy};
pub use split::{
    mfe_list, order_cuts, plug_skeleton, skeleton, split_bigstep, split_equivalent, st_normalize, st_step, Skeleton,
};

/// Strategy step kinds.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    NDB,
    NSUB,
    FL_DB,
    FL_SPL,
    FL_LS,
    ST_VAR,
    ST_APP,
    ST_DIST,
    ST_ABS,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StepKind::NDB => "NDB",
            StepKind::NSUB => "NSUB",
            StepKind::FL_DB => "FL_DB",
            StepKind::FL_SPL => "FL_SPL",
            StepKind::FL_LS => "FL_LS",
            StepKind::ST_VAR => "ST_VAR",
            StepKind::ST_APP => "ST_APP",
            StepKind::ST_DIST => "ST_DIST",
            StepKind::ST_ABS => "ST_ABS",
        };
        f.write_str(s)
    }
}

/// `ndv(t)`: needed free variables.
pub fn ndv(t: &Term) -> BTreeSet<Name> {
    match t {
        Term::Var(x) => BTreeSet::from([x.clone()]),
        Term::App(f, _) => ndv(f),
        Term::Abs(..) => BTreeSet::new(),
        Term::Sub(b, y, u) => {
            let mut n = ndv(b);
            if n.remove(y) {
                n.extend(ndv(u));
            }
            n
        }
        Term::Dist(b, y, _) => {
            let mut n = ndv(b);
            n.remove(y);
            n
        }
    }
}

/// The needed occurrence: descend through application heads and cut
/// bodies, and into the content of a substitution whose binder is needed.
pub fn locate_need(t: &Term) -> Option<(Name, Path)> {
    fn go(t: &Term) -> Option<(Name, Path)> {
        match t {
            Term::Var(x) => Some((x.clone(), Vec::new())),
            Term::App(f, _) => go(f).map(|(x, mut p)| {
                p.push(Sel::AppFun);
                (x, p)
            }),
            Term::Abs(..) => None,
            Term::Sub(b, y, u) | Term::Dist(b, y, u) => {
                let (x, mut p) = go(b)?;
                if &x != y {
                    p.push(Sel::CutBody);
                    return Some((x, p));
                }
                if matches!(t, Term::Dist(..)) {
                    return None;
                }
                let (z, mut q) = go(u)?;
                q.push(Sel::CutContent);
                Some((z, q))
            }
        }
    }
    go(t).map(|(x, mut p)| {
        p.reverse();
        (x, p)
    })
}

/// One weak-head step on a pure term.
pub fn whr_step(p: &Term) -> Result<Option<Term>> {
    if !is_pure(p) {
        return Err(Error::NotPure);
    }
    let mut supply = FreshSupply::new();
    supply.avoid_term(p);
    Ok(whr(p, &mut supply))
}

fn whr(p: &Term, supply: &mut FreshSupply) -> Option<Term> {
    match p {
        Term::App(f, a) => match &**f {
            Term::Abs(x, b) => Some(subst(b, x, a, supply)),
            _ => whr(f, supply).map(|f2| Term::app(f2, (**a).clone())),
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests;
