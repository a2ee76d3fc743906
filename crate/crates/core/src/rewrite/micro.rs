//! Elementary rewriting moves. Every rule of the calculus is executed as a
//! sequence of these, and the sequence is kept as the step witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{free_vars, is_free, is_pure, rename_binder, subst, FreshSupply, Name, Path, Sel, Term};

/// The four permutation clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PiRule {
    /// `λy.t[x◁u] → (λy.t)[x◁u]`
    Pi1,
    /// `t[x◁u] s → (t s)[x◁u]`
    Pi2,
    /// `t (s[x◁u]) → (t s)[x◁u]`
    Pi3,
    /// `t[y◁s[x◁u]] → t[y◁s][x◁u]`
    Pi4,
}

/// One elementary move at a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Micro {
    /// α-renames the binder of the node at `path`.
    Rename { path: Path, fresh: Name },
    Pi { rule: PiRule, path: Path },
    /// `(λx.t)u → t[x/u]`
    DBeta { path: Path },
    /// `t[x/us] → t{x/yz}[y/u][z/s]`
    App { path: Path, y: Name, z: Name },
    /// `t[x/λy.u] → t[x//λy.z[z/u]]`
    Dist { path: Path, z: Name },
    /// `t[x//λy.p] → t{x/λy.p}`
    Abs { path: Path },
    /// `t[x/y] → t{x/y}`
    Var { path: Path },
    /// `t[x//v] → t'[x//v]` where the free occurrence of `x` at `occ`
    /// (relative to the body) is replaced by `v`.
    OneShot { path: Path, occ: Path },
}

impl Micro {
    pub fn path(&self) -> &Path {
        match self {
            Micro::Rename { path, .. }
            | Micro::Pi { path, .. }
            | Micro::DBeta { path }
            | Micro::App { path, .. }
            | Micro::Dist { path, .. }
            | Micro::Abs { path }
            | Micro::Var { path }
            | Micro::OneShot { path, .. } => path,
        }
    }
}

fn bad(msg: &str) -> Error {
    Error::InvalidRedex(msg.to_string())
}

/// Applies a single move to the node it addresses.
pub fn apply_micro(t: &Term, m: &Micro, supply: &mut FreshSupply) -> Result<Term> {
    let node = t.at(m.path()).ok_or(Error::InvalidPath)?;
    let out = rewrite_node(node, m, supply)?;
    t.replace_at(m.path(), out)
}

fn rewrite_node(node: &Term, m: &Micro, supply: &mut FreshSupply) -> Result<Term> {
    match m {
        Micro::Rename { fresh, .. } => rename_binder(node, fresh),
        Micro::Pi { rule, .. } => pi_node(node, *rule),
        Micro::DBeta { .. } => match node {
            Term::App(f, u) => match &**f {
                Term::Abs(x, b) => Ok(Term::sub((**b).clone(), x.clone(), (**u).clone())),
                _ => Err(bad("dB': function is not an abstraction")),
            },
            _ => Err(bad("dB': not an application")),
        },
        Micro::App { y, z, .. } => match node {
            Term::Sub(b, x, c) => match &**c {
                Term::App(u, s) => {
                    let yz = Term::app(Term::var(y), Term::var(z));
                    let body = subst(b, x, &yz, supply);
                    Ok(Term::sub(Term::sub(body, y.clone(), (**u).clone()), z.clone(), (**s).clone()))
                }
                _ => Err(bad("app': content is not an application")),
            },
            _ => Err(bad("app': not a substitution")),
        },
        Micro::Dist { z, .. } => match node {
            Term::Sub(b, x, c) => match &**c {
                Term::Abs(y, u) => {
                    let inner = Term::lam(y.clone(), Term::sub(Term::var(z), z.clone(), (**u).clone()));
                    Ok(Term::dist((**b).clone(), x.clone(), inner))
                }
                _ => Err(bad("dist': content is not an abstraction")),
            },
            _ => Err(bad("dist': not a substitution")),
        },
        Micro::Abs { .. } => match node {
            Term::Dist(b, x, c) => match &**c {
                Term::Abs(_, p) if is_pure(p) => Ok(subst(b, x, c, supply)),
                _ => Err(bad("abs': content is not a value")),
            },
            _ => Err(bad("abs': not a distributor")),
        },
        Micro::Var { .. } => match node {
            Term::Sub(b, x, c) => match &**c {
                Term::Var(_) => Ok(subst(b, x, c, supply)),
                _ => Err(bad("var': content is not a variable")),
            },
            _ => Err(bad("var': not a substitution")),
        },
        Micro::OneShot { occ, .. } => match node {
            Term::Dist(b, x, v) => {
                let hit = b.at(occ).ok_or(Error::InvalidPath)?;
                if !matches!(hit, Term::Var(y) if y == x) {
                    return Err(bad("1s: occurrence is not the distributed variable"));
                }
                let binders = b.binders_above(occ)?;
                if binders.iter().any(|n| n == x) {
                    return Err(bad("1s: occurrence is not free"));
                }
                let fv = free_vars(v);
                if let Some(c) = binders.iter().find(|n| fv.contains(*n)) {
                    return Err(Error::Capture(c.clone()));
                }
                let b2 = b.replace_at(occ, (**v).clone())?;
                Ok(Term::dist(b2, x.clone(), (**v).clone()))
            }
            _ => Err(bad("1s: not a distributor")),
        },
    }
}

/// Why a permutation cannot fire as is.
#[derive(Debug, PartialEq, Eq)]
pub(crate) enum PiCheck {
    Ok,
    /// A bound name clashes; renaming the cut at this relative path fixes it.
    Clash(Sel),
    /// A genuine side condition fails.
    Blocked,
    NoMatch,
}

pub(crate) fn pi_check(node: &Term, rule: PiRule) -> PiCheck {
    match rule {
        PiRule::Pi1 => match node {
            Term::Abs(y, c) => match c.as_cut() {
                Some((_, _, x, u)) => {
                    if is_free(y, u) {
                        PiCheck::Blocked
                    } else if x == y {
                        PiCheck::Clash(Sel::AbsBody)
                    } else {
                        PiCheck::Ok
                    }
                }
                None => PiCheck::NoMatch,
            },
            _ => PiCheck::NoMatch,
        },
        PiRule::Pi2 => match node {
            Term::App(f, s) => match f.as_cut() {
                Some((_, _, x, _)) if is_free(x, s) => PiCheck::Clash(Sel::AppFun),
                Some(_) => PiCheck::Ok,
                None => PiCheck::NoMatch,
            },
            _ => PiCheck::NoMatch,
        },
        PiRule::Pi3 => match node {
            Term::App(t, a) => match a.as_cut() {
                Some((_, _, x, _)) if is_free(x, t) => PiCheck::Clash(Sel::AppArg),
                Some(_) => PiCheck::Ok,
                None => PiCheck::NoMatch,
            },
            _ => PiCheck::NoMatch,
        },
        PiRule::Pi4 => match node.as_cut() {
            Some((_, t, y, c)) => match c.as_cut() {
                Some((_, _, x, _)) if x == y || is_free(x, t) => PiCheck::Clash(Sel::CutContent),
                Some(_) => PiCheck::Ok,
                None => PiCheck::NoMatch,
            },
            None => PiCheck::NoMatch,
        },
    }
}

fn pi_node(node: &Term, rule: PiRule) -> Result<Term> {
    if pi_check(node, rule) != PiCheck::Ok {
        return Err(bad("permutation side condition fails"));
    }
    Ok(match (rule, node) {
        (PiRule::Pi1, Term::Abs(y, c)) => {
            let (k, t, x, u) = c.as_cut().unwrap();
            Term::cut(k, Term::lam(y.clone(), t.clone()), x.clone(), u.clone())
        }
        (PiRule::Pi2, Term::App(f, s)) => {
            let (k, t, x, u) = f.as_cut().unwrap();
            Term::cut(k, Term::app(t.clone(), (**s).clone()), x.clone(), u.clone())
        }
        (PiRule::Pi3, Term::App(t, a)) => {
            let (k, s, x, u) = a.as_cut().unwrap();
            Term::cut(k, Term::app((**t).clone(), s.clone()), x.clone(), u.clone())
        }
        (PiRule::Pi4, _) => {
            let (k1, t, y, c) = node.as_cut().unwrap();
            let (k2, s, x, u) = c.as_cut().unwrap();
            Term::cut(k2, Term::cut(k1, t.clone(), y.clone(), s.clone()), x.clone(), u.clone())
        }
        _ => unreachable!(),
    })
}

/// Applies moves in order while recording them.
pub(crate) struct Exec<'a> {
    pub term: Term,
    pub micros: Vec<Micro>,
    pub supply: &'a mut FreshSupply,
}

impl<'a> Exec<'a> {
    pub fn new(term: Term, supply: &'a mut FreshSupply) -> Exec<'a> {
        supply.avoid_term(&term);
        Exec {
            term,
            micros: Vec::new(),
            supply,
        }
    }

    pub fn apply(&mut self, m: Micro) -> Result<()> {
        let node = self.term.at(m.path()).ok_or(Error::InvalidPath)?;
        let out = rewrite_node(node, &m, self.supply)?;
        self.supply.avoid_term(&out);
        *self.term.at_mut(m.path()).ok_or(Error::InvalidPath)? = out;
        self.micros.push(m);
        Ok(())
    }

    pub fn node(&self, path: &[Sel]) -> Result<&Term> {
        self.term.at(path).ok_or(Error::InvalidPath)
    }

    /// Renames the binder of the node at `path` to a fresh name.
    pub fn rename(&mut self, path: &[Sel]) -> Result<Name> {
        let base = match self.node(path)? {
            Term::Abs(x, _) | Term::Sub(_, x, _) | Term::Dist(_, x, _) => x.clone(),
            _ => return Err(bad("rename: node has no binder")),
        };
        let fresh = self.supply.fresh(&base);
        self.apply(Micro::Rename {
            path: path.to_vec(),
            fresh: fresh.clone(),
        })?;
        Ok(fresh)
    }

    /// Fires a permutation, renaming a clashing cut binder first.
    pub fn pi(&mut self, rule: PiRule, path: &[Sel]) -> Result<()> {
        match pi_check(self.node(path)?, rule) {
            PiCheck::Ok => {}
            PiCheck::Clash(sel) => {
                let mut p = path.to_vec();
                p.push(sel);
                self.rename(&p)?;
            }
            PiCheck::Blocked | PiCheck::NoMatch => return Err(bad("permutation does not apply")),
        }
        self.apply(Micro::Pi {
            rule,
            path: path.to_vec(),
        })
    }
}
