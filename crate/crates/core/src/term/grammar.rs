//! Membership in the restricted grammars.

use serde::{Deserialize, Serialize};

use super::{is_free, list_head, occ_count, peel_list, Term};
use crate::strategies::ndv;

/// Grammars a term can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grammar {
    /// No explicit cuts.
    Pure,
    /// Restricted terms.
    U,
    /// Linear cut values `λy.LL⟨p⟩`.
    T,
    /// Commutative lists around a pure term, `LL⟨p⟩`.
    LL,
    /// `λx.p` with `p` pure.
    Value,
    /// `L⟨λx.t⟩`.
    Answer,
    /// Name normal forms.
    Na,
    /// Fully lazy need normal forms.
    Ne,
}

/// Checks membership of `t` in `which`.
pub fn check_grammar(t: &Term, which: Grammar) -> bool {
    match which {
        Grammar::Pure => is_pure(t),
        Grammar::U => is_u(t),
        Grammar::T => is_t(t),
        Grammar::LL => is_ll(t),
        Grammar::Value => is_value(t),
        Grammar::Answer => is_answer(t),
        Grammar::Na => is_na(t),
        Grammar::Ne => is_ne(t),
    }
}

pub fn is_pure(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Abs(_, b) => is_pure(b),
        Term::App(f, a) => is_pure(f) && is_pure(a),
        Term::Sub(..) | Term::Dist(..) => false,
    }
}

fn is_value(t: &Term) -> bool {
    matches!(t, Term::Abs(_, b) if is_pure(b))
}

fn is_answer(t: &Term) -> bool {
    list_head(t).0.is_abs()
}

/// `t = LL⟨p⟩`; returns `p`.
fn ll_inner(t: &Term) -> Option<&Term> {
    let (inner, cuts) = peel_list(t);
    if !is_pure(inner) {
        return None;
    }
    for (i, c) in cuts.iter().enumerate() {
        let ok = match c.kind {
            super::CutKind::Sub => is_pure(&c.content),
            super::CutKind::Dist => is_t(&c.content),
        };
        if !ok || cuts[..i].iter().any(|d| is_free(&c.var, &d.content)) {
            return None;
        }
    }
    Some(inner)
}

pub fn is_ll(t: &Term) -> bool {
    ll_inner(t).is_some()
}

pub fn is_t(t: &Term) -> bool {
    let Term::Abs(_, body) = t else { return false };
    let Some(p) = ll_inner(body) else { return false };
    peel_list(body).1.iter().all(|c| occ_count(p, &c.var) == 1)
}

pub fn is_u(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Abs(..) => is_value(t),
        Term::App(f, a) => is_u(f) && is_u(a),
        Term::Sub(b, _, c) => is_u(b) && is_u(c),
        Term::Dist(b, _, c) => is_u(b) && is_t(c),
    }
}

fn is_na(t: &Term) -> bool {
    fn bar(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, _) => bar(f),
            _ => false,
        }
    }
    is_value(t) || bar(t)
}

fn is_ne(t: &Term) -> bool {
    is_answer(t) || is_ne_bar(t)
}

fn is_ne_bar(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, _) => is_ne_bar(f),
        Term::Abs(..) => false,
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            if !is_ne_bar(b) {
                return false;
            }
            if !ndv(b).contains(x) {
                return true;
            }
            matches!(t, Term::Sub(..)) && is_ne_bar(c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn g(s: &str, which: Grammar) -> bool {
        check_grammar(&parse(s).unwrap(), which)
    }

    #[test]
    fn restricted_grammar_examples() {
        assert!(g("\\x.(y z)[y/\\a.a][z/\\a.a]", Grammar::T));
        assert!(!g("\\x.(y y)[y/\\a.a]", Grammar::T));
        assert!(g("w[x/y z][x'/\\a.a]", Grammar::LL));
        assert!(!g("w[x/y z][y/\\a.a]", Grammar::LL));
        assert!(g("(y z)[y//\\a.a]", Grammar::U));
        assert!(!g("(y z)[y//\\x.(y y)[y/\\a.a]]", Grammar::U));
    }

    #[test]
    fn normal_form_grammars() {
        assert!(g("x[y//\\a.a] (\\a.a)", Grammar::Ne));
        assert!(g("(x y1)[x/z y2]", Grammar::Ne));
        assert!(!g("(x y1)[x/\\z.z]", Grammar::Ne));
        assert!(g("(\\z.z)[x/y]", Grammar::Ne));
        assert!(g("x (\\a.a) y", Grammar::Na));
        assert!(!g("x[x/y]", Grammar::Na));
        assert!(!g("\\x.x[x/y]", Grammar::Na));
        assert!(g("\\x.x[x/y]", Grammar::Answer));
    }

    #[test]
    fn pure_means_cut_free() {
        assert!(g("\\x.x (y z)", Grammar::Pure));
        assert!(!g("x[x/y]", Grammar::Pure));
        assert!(g("\\x.x y", Grammar::Value));
    }
}
