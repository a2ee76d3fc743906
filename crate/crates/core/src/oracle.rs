//! Reference pure λ-calculus on de Bruijn indices and random term
//! generation. Nothing here goes through the named substitution of
//! [`crate::term`], so it can serve as an independent cross-check.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{FreshSupply, Path, Sel, Term};

/// Default fuel for β searches.
pub const BETA_FUEL: usize = 1_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Db {
    Free(String),
    Bound(usize),
    Lam(String, Box<Db>),
    App(Box<Db>, Box<Db>),
}

fn to_db(t: &Term, ctx: &mut Vec<String>) -> Result<Db> {
    Ok(match t {
        Term::Var(x) => match ctx.iter().rev().position(|y| y == x) {
            Some(i) => Db::Bound(i),
            None => Db::Free(x.clone()),
        },
        Term::Abs(x, b) => {
            ctx.push(x.clone());
            let b = to_db(b, ctx);
            ctx.pop();
            Db::Lam(x.clone(), Box::new(b?))
        }
        Term::App(f, a) => Db::App(Box::new(to_db(f, ctx)?), Box::new(to_db(a, ctx)?)),
        _ => return Err(Error::NotPure),
    })
}

fn shift(d: &Db, by: isize, cutoff: usize) -> Db {
    match d {
        Db::Free(_) => d.clone(),
        Db::Bound(i) => {
            if *i >= cutoff {
                Db::Bound((*i as isize + by) as usize)
            } else {
                d.clone()
            }
        }
        Db::Lam(h, b) => Db::Lam(h.clone(), Box::new(shift(b, by, cutoff + 1))),
        Db::App(f, a) => Db::App(Box::new(shift(f, by, cutoff)), Box::new(shift(a, by, cutoff))),
    }
}

/// `body[0 := arg]` with the binder removed.
fn instantiate(body: &Db, arg: &Db) -> Db {
    fn go(d: &Db, depth: usize, arg: &Db) -> Db {
        match d {
            Db::Free(_) => d.clone(),
            Db::Bound(i) => {
                if *i == depth {
                    shift(arg, depth as isize, 0)
                } else if *i > depth {
                    Db::Bound(i - 1)
                } else {
                    d.clone()
                }
            }
            Db::Lam(h, b) => Db::Lam(h.clone(), Box::new(go(b, depth + 1, arg))),
            Db::App(f, a) => Db::App(Box::new(go(f, depth, arg)), Box::new(go(a, depth, arg))),
        }
    }
    go(body, 0, arg)
}

/// Names a de Bruijn term, keeping binder hints unless they would capture.
fn from_db(d: &Db, ctx: &mut Vec<String>, supply: &mut FreshSupply) -> Term {
    match d {
        Db::Free(x) => Term::var(x.clone()),
        Db::Bound(i) => Term::var(ctx[ctx.len() - 1 - i].clone()),
        Db::App(f, a) => Term::app(from_db(f, ctx, supply), from_db(a, ctx, supply)),
        Db::Lam(h, b) => {
            let mut used = BTreeSet::new();
            visible_names(b, 1, ctx, &mut used);
            let mut x = h.clone();
            while used.contains(&x) {
                x = supply.fresh(h);
            }
            ctx.push(x.clone());
            let body = from_db(b, ctx, supply);
            ctx.pop();
            Term::lam(x, body)
        }
    }
}

/// Names that references escaping `depth` binders of `d` will print as.
fn visible_names(d: &Db, depth: usize, ctx: &[String], out: &mut BTreeSet<String>) {
    match d {
        Db::Free(x) => {
            out.insert(x.clone());
        }
        Db::Bound(i) => {
            if *i >= depth {
                out.insert(ctx[ctx.len() - 1 - (i - depth)].clone());
            }
        }
        Db::Lam(_, b) => visible_names(b, depth + 1, ctx, out),
        Db::App(f, a) => {
            visible_names(f, depth, ctx, out);
            visible_names(a, depth, ctx, out);
        }
    }
}

fn named(d: &Db, supply: &mut FreshSupply) -> Term {
    from_db(d, &mut Vec::new(), supply)
}

fn db_at_mut<'a>(d: &'a mut Db, path: &[Sel]) -> Option<&'a mut Db> {
    let mut cur = d;
    for s in path {
        cur = match (cur, s) {
            (Db::Lam(_, b), Sel::AbsBody) => b,
            (Db::App(f, _), Sel::AppFun) => f,
            (Db::App(_, a), Sel::AppArg) => a,
            _ => return None,
        };
    }
    Some(cur)
}

fn contract(d: &Db) -> Option<Db> {
    match d {
        Db::App(f, a) => match &**f {
            Db::Lam(_, b) => Some(instantiate(b, a)),
            _ => None,
        },
        _ => None,
    }
}

/// `(λx.q)r → q{x/r}` at `path`.
pub fn beta_step_at(p: &Term, path: &[Sel], supply: &mut FreshSupply) -> Result<Term> {
    let mut d = to_db(p, &mut Vec::new())?;
    let node = db_at_mut(&mut d, path).ok_or(Error::NotABetaRedex)?;
    *node = contract(node).ok_or(Error::NotABetaRedex)?;
    supply.avoid_term(p);
    Ok(named(&d, supply))
}

/// Paths of every β-redex of a pure term, in preorder.
pub fn beta_redexes(p: &Term) -> Vec<Path> {
    p.paths()
        .into_iter()
        .filter(|q| matches!(p.at(q), Some(Term::App(f, _)) if f.is_abs()))
        .collect()
}

fn one_step_reducts(d: &Db) -> Vec<Db> {
    let mut out = Vec::new();
    if let Some(c) = contract(d) {
        out.push(c);
    }
    match d {
        Db::Lam(h, b) => {
            for r in one_step_reducts(b) {
                out.push(Db::Lam(h.clone(), Box::new(r)));
            }
        }
        Db::App(f, a) => {
            for r in one_step_reducts(f) {
                out.push(Db::App(Box::new(r), a.clone()));
            }
            for r in one_step_reducts(a) {
                out.push(Db::App(f.clone(), Box::new(r)));
            }
        }
        _ => {}
    }
    out
}

fn normal_order_step(d: &Db) -> Option<Db> {
    if let Some(c) = contract(d) {
        return Some(c);
    }
    match d {
        Db::Lam(h, b) => normal_order_step(b).map(|b| Db::Lam(h.clone(), Box::new(b))),
        Db::App(f, a) => {
            if let Some(f2) = normal_order_step(f) {
                return Some(Db::App(Box::new(f2), a.clone()));
            }
            normal_order_step(a).map(|a2| Db::App(f.clone(), Box::new(a2)))
        }
        _ => None,
    }
}

fn db_size(d: &Db) -> usize {
    match d {
        Db::Free(_) | Db::Bound(_) => 1,
        Db::Lam(_, b) => 1 + db_size(b),
        Db::App(f, a) => 1 + db_size(f) + db_size(a),
    }
}

/// Size bound on intermediate terms during normalization.
const SIZE_CAP: usize = 200_000;

/// β-normal form by normal-order reduction, within `fuel` steps.
pub fn beta_normalize(p: &Term, fuel: usize, supply: &mut FreshSupply) -> Result<Term> {
    let mut d = to_db(p, &mut Vec::new())?;
    for _ in 0..=fuel {
        match normal_order_step(&d) {
            None => {
                supply.avoid_term(p);
                return Ok(named(&d, supply));
            }
            Some(n) => {
                if db_size(&n) > SIZE_CAP {
                    break;
                }
                d = n;
            }
        }
    }
    Err(Error::FuelExhausted(fuel))
}

/// Outcome of a bounded β search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reach {
    /// Reached after this many steps.
    Reached(usize),
    NotWithinFuel,
}

/// Breadth-first search over β reducts of `p` for a term α-equal to `q`.
/// `fuel` bounds the number of visited terms.
pub fn beta_reach(p: &Term, q: &Term, fuel: usize, _supply: &mut FreshSupply) -> Result<Reach> {
    let start = to_db(p, &mut Vec::new())?;
    let goal = to_db(q, &mut Vec::new())?;
    let key = |d: &Db| canonical_db(d);
    let goal_key = key(&goal);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(key(&start));
    queue.push_back((start, 0usize));
    let mut visited = 0;
    while let Some((d, n)) = queue.pop_front() {
        if key(&d) == goal_key {
            return Ok(Reach::Reached(n));
        }
        visited += 1;
        if visited > fuel {
            break;
        }
        for r in one_step_reducts(&d) {
            if seen.insert(key(&r)) {
                queue.push_back((r, n + 1));
            }
        }
    }
    Ok(Reach::NotWithinFuel)
}

fn canonical_db(d: &Db) -> String {
    match d {
        Db::Free(x) => format!("'{x}"),
        Db::Bound(i) => i.to_string(),
        Db::Lam(_, b) => format!("L{}", canonical_db(b)),
        Db::App(f, a) => format!("({} {})", canonical_db(f), canonical_db(a)),
    }
}

/// A string that is equal for two terms exactly when they are α-equal.
pub fn canonical(t: &Term) -> String {
    fn go(t: &Term, ctx: &mut Vec<String>, out: &mut String) {
        match t {
            Term::Var(x) => match ctx.iter().rev().position(|y| y == x) {
                Some(i) => out.push_str(&i.to_string()),
                None => {
                    out.push('\'');
                    out.push_str(x);
                }
            },
            Term::Abs(x, b) => {
                out.push('L');
                ctx.push(x.clone());
                go(b, ctx, out);
                ctx.pop();
            }
            Term::App(f, a) => {
                out.push('(');
                go(f, ctx, out);
                out.push(' ');
                go(a, ctx, out);
                out.push(')');
            }
            Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
                out.push_str(if matches!(t, Term::Sub(..)) { "S[" } else { "D[" });
                go(c, ctx, out);
                out.push_str("](");
                ctx.push(x.clone());
                go(b, ctx, out);
                ctx.pop();
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Generation

/// Which terms to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenGrammar {
    /// Pure λ-terms.
    PureLambda,
    /// Restricted terms.
    U,
    /// Restricted terms whose distributors hold values, as produced by
    /// evaluating pure terms.
    Need,
    /// Arbitrary terms with cuts.
    Full,
}

/// Generator settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_size: usize,
    pub var_pool: Vec<String>,
    pub closed: bool,
    pub grammar: GenGrammar,
}

impl GenConfig {
    pub fn new(seed: u64, max_size: usize, grammar: GenGrammar) -> GenConfig {
        GenConfig {
            seed,
            max_size: max_size.max(1),
            var_pool: vec!["a".into(), "b".into(), "c".into()],
            closed: false,
            grammar,
        }
    }
}

const BINDERS: [&str; 4] = ["x", "y", "z", "w"];

struct Gen {
    rng: ChaCha8Rng,
    pool: Vec<String>,
    closed: bool,
    supply: FreshSupply,
    value_dists: bool,
}

impl Gen {
    fn binder(&mut self) -> String {
        let b = BINDERS.choose(&mut self.rng).unwrap();
        if self.rng.gen_bool(0.5) {
            b.to_string()
        } else {
            format!("{b}{}", self.rng.gen_range(1..4))
        }
    }

    fn var(&mut self, env: &[String]) -> Option<Term> {
        let use_bound = !env.is_empty() && (self.closed || self.pool.is_empty() || self.rng.gen_bool(0.7));
        if use_bound {
            Some(Term::var(env.choose(&mut self.rng).unwrap().clone()))
        } else if !self.closed && !self.pool.is_empty() {
            Some(Term::var(self.pool.choose(&mut self.rng).unwrap().clone()))
        } else {
            None
        }
    }

    fn split(&mut self, n: usize) -> (usize, usize) {
        let a = self.rng.gen_range(1..n);
        (a, n - a)
    }

    fn pure(&mut self, n: usize, env: &mut Vec<String>) -> Term {
        if n <= 1 {
            if let Some(v) = self.var(env) {
                return v;
            }
        }
        if n <= 2 || self.rng.gen_bool(0.35) || (n <= 1) {
            let x = self.binder();
            env.push(x.clone());
            let b = self.pure(n.saturating_sub(1).max(1), env);
            env.pop();
            return Term::lam(x, b);
        }
        let (a, b) = self.split(n - 1);
        let f = self.pure(a, env);
        let g = self.pure(b, env);
        Term::app(f, g)
    }

    fn u(&mut self, n: usize, env: &mut Vec<String>) -> Term {
        if n <= 1 {
            if let Some(v) = self.var(env) {
                return v;
            }
            return self.value(2, env);
        }
        match self.rng.gen_range(0..10) {
            0..=1 => self.value(n, env),
            2..=4 if n >= 3 => {
                let (a, b) = self.split(n - 1);
                let f = self.u(a, env);
                let g = self.u(b, env);
                Term::app(f, g)
            }
            5..=7 if n >= 3 => {
                let (a, b) = self.split(n - 1);
                let x = self.binder();
                let c = self.u(b, env);
                env.push(x.clone());
                let body = self.u(a, env);
                env.pop();
                Term::sub(body, x, c)
            }
            8..=9 if n >= 4 => {
                let (a, b) = self.split(n - 1);
                let x = self.binder();
                let c = if self.value_dists { self.value(b.max(2), env) } else { self.t(b.max(2), env) };
                env.push(x.clone());
                let body = self.u(a, env);
                env.pop();
                Term::dist(body, x, c)
            }
            _ => {
                let (a, b) = self.split(n.max(3) - 1);
                let f = self.u(a, env);
                let g = self.u(b, env);
                Term::app(f, g)
            }
        }
    }

    fn value(&mut self, n: usize, env: &mut Vec<String>) -> Term {
        let x = self.binder();
        env.push(x.clone());
        let b = self.pure(n.saturating_sub(1).max(1), env);
        env.pop();
        Term::lam(x, b)
    }

    /// `λy.LL⟨p⟩` with each list variable used once in `p`.
    fn t(&mut self, n: usize, env: &mut Vec<String>) -> Term {
        let y = self.binder();
        env.push(y.clone());
        let p_size = (n / 2).max(1);
        let mut p = self.pure(p_size, env);
        let leaves: Vec<Path> = p.paths().into_iter().filter(|q| matches!(p.at(q), Some(Term::Var(_)))).collect();
        let mut budget = n.saturating_sub(p_size + 1);
        let mut cuts = Vec::new();
        for q in leaves {
            if budget < 1 || !self.rng.gen_bool(0.5) {
                continue;
            }
            // only leaves whose binders above do not matter: contents go outside p
            let above = p.binders_above(&q).unwrap();
            if !above.is_empty() {
                continue;
            }
            self.supply.avoid_term(&p);
            let s = self.supply.fresh("s");
            p = p.replace_at(&q, Term::var(s.clone())).unwrap();
            let size = self.rng.gen_range(1..=budget.min(4));
            budget -= size;
            let use_dist = size >= 2 && self.rng.gen_bool(0.25);
            let content = if use_dist { self.t(size, env) } else { self.pure(size, env) };
            cuts.push((s, content, use_dist));
        }
        env.pop();
        let mut body = p;
        for (s, c, d) in cuts {
            body = if d { Term::dist(body, s, c) } else { Term::sub(body, s, c) };
        }
        Term::lam(y, body)
    }

    fn full(&mut self, n: usize, env: &mut Vec<String>) -> Term {
        if n <= 1 {
            if let Some(v) = self.var(env) {
                return v;
            }
        }
        let pick = if n <= 2 { 0 } else { self.rng.gen_range(0..10) };
        match pick {
            0..=2 => {
                let x = self.binder();
                env.push(x.clone());
                let b = self.full(n.saturating_sub(1).max(1), env);
                env.pop();
                Term::lam(x, b)
            }
            3..=5 => {
                let (a, b) = self.split(n - 1);
                let f = self.full(a, env);
                let g = self.full(b, env);
                Term::app(f, g)
            }
            6..=8 => {
                let (a, b) = self.split(n - 1);
                let x = self.binder();
                let c = self.full(b, env);
                env.push(x.clone());
                let body = self.full(a, env);
                env.pop();
                Term::sub(body, x, c)
            }
            _ => {
                let (a, b) = self.split(n - 1);
                let x = self.binder();
                let y = self.binder();
                env.push(y.clone());
                let cb = self.full(b.saturating_sub(1).max(1), env);
                env.pop();
                env.push(x.clone());
                let body = self.full(a, env);
                env.pop();
                Term::dist(body, x, Term::lam(y, cb))
            }
        }
    }
}

/// A pseudo-random term, deterministic in the configuration.
pub fn gen_term(cfg: &GenConfig) -> Term {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        pool: cfg.var_pool.clone(),
        closed: cfg.closed,
        supply: FreshSupply::with_avoid(cfg.var_pool.iter().cloned().chain(BINDERS.iter().map(|s| s.to_string()))),
        value_dists: cfg.grammar == GenGrammar::Need,
    };
    let n = g.rng.gen_range(1..=cfg.max_size.max(1));
    let mut env = Vec::new();
    match cfg.grammar {
        GenGrammar::PureLambda => g.pure(n, &mut env),
        GenGrammar::U | GenGrammar::Need => g.u(n, &mut env),
        GenGrammar::Full => g.full(n, &mut env),
    }
}

/// Strictly smaller variants of `t`: every subterm replaced by one of its
/// children or by a free variable.
pub fn shrink(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for path in t.paths() {
        let node = t.at(&path).unwrap();
        let mut cands: Vec<Term> = Vec::new();
        match node {
            Term::Var(_) => {}
            Term::Abs(_, b) => cands.push((**b).clone()),
            Term::App(f, a) => {
                cands.push((**f).clone());
                cands.push((**a).clone());
            }
            Term::Sub(b, _, c) | Term::Dist(b, _, c) => {
                cands.push((**b).clone());
                cands.push((**c).clone());
            }
        }
        if !matches!(node, Term::Var(_)) {
            cands.push(Term::var("a"));
        }
        for c in cands {
            if let Ok(s) = t.replace_at(&path, c) {
                if s.size() < t.size() && dist_contents_ok(&s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn dist_contents_ok(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Abs(_, b) => dist_contents_ok(b),
        Term::App(f, a) => dist_contents_ok(f) && dist_contents_ok(a),
        Term::Sub(b, _, c) => dist_contents_ok(b) && dist_contents_ok(c),
        Term::Dist(b, _, c) => c.is_abs() && dist_contents_ok(b) && dist_contents_ok(c),
    }
}

/// Greedily shrinks a failing term while `fails` keeps holding.
pub fn minimize(t: &Term, fails: impl Fn(&Term) -> bool) -> Term {
    let mut cur = t.clone();
    'outer: loop {
        for s in shrink(&cur) {
            if fails(&s) {
                cur = s;
                continue 'outer;
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{check_grammar, parse, Grammar};

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn beta_examples() {
        let mut s = FreshSupply::new();
        assert_eq!(beta_step_at(&p("(\\x.x x)(y z)"), &[], &mut s).unwrap(), p("(y z)(y z)"));
        assert_eq!(beta_step_at(&p("(\\x.z) u"), &[], &mut s).unwrap(), p("z"));
        let ii = "((\\a.a)(\\a.a))";
        let t = p(&format!("(\\x.x x) {ii}"));
        assert_eq!(beta_step_at(&t, &[], &mut s).unwrap(), p(&format!("{ii} {ii}")));
        assert!(matches!(beta_step_at(&p("x y"), &[], &mut s), Err(Error::NotABetaRedex)));
    }

    #[test]
    fn capture_is_avoided() {
        let mut s = FreshSupply::new();
        let r = beta_step_at(&p("(\\x.\\y.x) y"), &[], &mut s).unwrap();
        assert_eq!(r, p("\\z.y"));
    }

    #[test]
    fn reachability() {
        let mut s = FreshSupply::new();
        let a = p("(\\x.x x)(y z)");
        assert_eq!(beta_reach(&a, &a, 10, &mut s).unwrap(), Reach::Reached(0));
        assert_eq!(beta_reach(&a, &p("(y z)(y z)"), 10, &mut s).unwrap(), Reach::Reached(1));
        assert_eq!(beta_reach(&p("x"), &p("y"), 10, &mut s).unwrap(), Reach::NotWithinFuel);
    }

    #[test]
    fn omega_exhausts_fuel() {
        let mut s = FreshSupply::new();
        let o = p("(\\x.x x)(\\x.x x)");
        assert!(matches!(beta_normalize(&o, 50, &mut s), Err(Error::FuelExhausted(_))));
    }

    fn need_dists(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Abs(_, b) => need_dists(b),
            Term::App(f, a) => need_dists(f) && need_dists(a),
            Term::Sub(b, _, c) => need_dists(b) && need_dists(c),
            Term::Dist(b, _, c) => check_grammar(c, Grammar::Value) && need_dists(b),
        }
    }

    #[test]
    fn generator_is_deterministic_and_respects_grammar() {
        let cfg = GenConfig::new(7, 1, GenGrammar::PureLambda);
        assert!(matches!(gen_term(&cfg), Term::Var(_)));
        for seed in 0..1000 {
            let cfg = GenConfig::new(seed, 14, GenGrammar::U);
            let t = gen_term(&cfg);
            assert!(t.syn_eq(&gen_term(&cfg)));
            assert!(check_grammar(&t, Grammar::U), "{t}");
            let n = gen_term(&GenConfig::new(seed, 14, GenGrammar::Need));
            assert!(check_grammar(&n, Grammar::U) && need_dists(&n), "{n}");
            let f = gen_term(&GenConfig::new(seed, 14, GenGrammar::Full));
            assert!(dist_contents_ok(&f));
            let pure = gen_term(&GenConfig::new(seed, 14, GenGrammar::PureLambda));
            assert!(check_grammar(&pure, Grammar::Pure));
        }
    }

    #[test]
    fn shrinking_finds_small_counterexample() {
        let t = p("(\\x.x (y y)) (\\z.z z)");
        let m = minimize(&t, |u| crate::term::free_vars(u).contains("y"));
        assert_eq!(m, p("y"));
    }
}
