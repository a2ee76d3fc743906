//! Permutations, the rules at a distance, sub normalization, unfolding and
//! confluence probing.

mod micro;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle;
use crate::term::{is_pure, list_head, peel_list, subst, CutKind, FreshSupply, Path, Sel, Term};
use crate::trace::{Label, Status, Step, Trace};

pub use micro::{apply_micro, Micro, PiRule};
pub(crate) use micro::{pi_check, Exec, PiCheck};

/// Rule tags of the calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTag {
    Pi1,
    Pi2,
    Pi3,
    Pi4,
    DB,
    APP,
    DIST,
    ABS,
    VAR,
}

impl RuleTag {
    pub fn is_pi(self) -> bool {
        matches!(self, RuleTag::Pi1 | RuleTag::Pi2 | RuleTag::Pi3 | RuleTag::Pi4)
    }

    pub fn is_sub(self) -> bool {
        matches!(self, RuleTag::APP | RuleTag::DIST | RuleTag::ABS | RuleTag::VAR)
    }

    fn pi_rule(self) -> Option<PiRule> {
        Some(match self {
            RuleTag::Pi1 => PiRule::Pi1,
            RuleTag::Pi2 => PiRule::Pi2,
            RuleTag::Pi3 => PiRule::Pi3,
            RuleTag::Pi4 => PiRule::Pi4,
            _ => return None,
        })
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleTag::Pi1 => "Pi1",
            RuleTag::Pi2 => "Pi2",
            RuleTag::Pi3 => "Pi3",
            RuleTag::Pi4 => "Pi4",
            RuleTag::DB => "DB",
            RuleTag::APP => "APP",
            RuleTag::DIST => "DIST",
            RuleTag::ABS => "ABS",
            RuleTag::VAR => "VAR",
        };
        f.write_str(s)
    }
}

/// A rule instance at a position. `aux` is the length of the list context
/// crossed by a rule at a distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redex {
    pub path: Path,
    pub rule: RuleTag,
    pub aux: usize,
}

/// Result of firing a redex.
#[derive(Clone, Debug)]
pub struct Fired {
    pub term: Term,
    pub micros: Vec<Micro>,
}

// ---------------------------------------------------------------------------
// Enumeration

/// Whether `path` points at the abstraction held by a distributor.
fn is_dist_content(t: &Term, path: &[Sel]) -> bool {
    match path.split_last() {
        Some((Sel::CutContent, parent)) => cut_kind_at(t, parent) == Some(CutKind::Dist),
        _ => false,
    }
}

/// All permutation redexes. Name clashes on cut binders are not counted as
/// blocking: firing renames the cut. The abstraction of a distributor is
/// not a position of the calculus.
pub fn pi_redexes(t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    for path in t.paths() {
        if is_dist_content(t, &path) {
            continue;
        }
        let node = t.at(&path).unwrap();
        for (tag, rule) in [
            (RuleTag::Pi1, PiRule::Pi1),
            (RuleTag::Pi2, PiRule::Pi2),
            (RuleTag::Pi3, PiRule::Pi3),
            (RuleTag::Pi4, PiRule::Pi4),
        ] {
            if matches!(pi_check(node, rule), PiCheck::Ok | PiCheck::Clash(_)) {
                out.push(Redex {
                    path: path.clone(),
                    rule: tag,
                    aux: 0,
                });
            }
        }
    }
    out
}

/// Rule and list length of the R redex rooted at `node`, if any.
pub(crate) fn r_redex_at(node: &Term) -> Option<(RuleTag, usize)> {
    match node {
        Term::App(f, _) => {
            let (inner, n) = list_head(f);
            inner.is_abs().then_some((RuleTag::DB, n))
        }
        Term::Sub(_, _, c) => {
            let (inner, n) = list_head(c);
            let tag = match inner {
                Term::App(..) => RuleTag::APP,
                Term::Abs(..) => RuleTag::DIST,
                Term::Var(_) => RuleTag::VAR,
                _ => return None,
            };
            Some((tag, n))
        }
        Term::Dist(..) => abs_extraction(node).map(|n| (RuleTag::ABS, n)),
        _ => None,
    }
}

/// All R redexes in preorder. With `weak`, dB redexes under an abstraction
/// (hence also inside distributors) are dropped.
pub fn r_redexes(t: &Term, weak: bool) -> Vec<Redex> {
    let mut out = Vec::new();
    for path in t.paths() {
        let node = t.at(&path).unwrap();
        if let Some((rule, aux)) = r_redex_at(node) {
            if weak && rule == RuleTag::DB && path.contains(&Sel::AbsBody) {
                continue;
            }
            out.push(Redex { path, rule, aux });
        }
    }
    out
}

/// Sub redexes in leftmost-innermost order: post-order, body before
/// content.
pub fn sub_redexes_innermost(t: &Term) -> Vec<Redex> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<Redex>) {
        let kids: &[Sel] = match t {
            Term::Var(_) => &[],
            Term::Abs(..) => &[Sel::AbsBody],
            Term::App(..) => &[Sel::AppFun, Sel::AppArg],
            Term::Sub(..) | Term::Dist(..) => &[Sel::CutBody, Sel::CutContent],
        };
        for s in kids {
            path.push(*s);
            go(t.child(*s).unwrap(), path, out);
            path.pop();
        }
        if t.is_cut() {
            if let Some((rule, aux)) = r_redex_at(t) {
                out.push(Redex {
                    path: path.clone(),
                    rule,
                    aux,
                });
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Firing

/// Fires a π or R redex.
pub fn fire(t: &Term, r: &Redex, supply: &mut FreshSupply) -> Result<Fired> {
    fire_owned(t.clone(), r, supply)
}

pub(crate) fn fire_owned(t: Term, r: &Redex, supply: &mut FreshSupply) -> Result<Fired> {
    let mut ex = Exec::new(t, supply);
    fire_in(&mut ex, r)?;
    Ok(Fired {
        term: ex.term,
        micros: ex.micros,
    })
}

pub(crate) fn fire_in(ex: &mut Exec<'_>, r: &Redex) -> Result<()> {
    let node = ex.node(&r.path)?.clone();
    if let Some(rule) = r.rule.pi_rule() {
        if is_dist_content(&ex.term, &r.path) {
            return Err(Error::InvalidRedex("a distributor must keep an abstraction".into()));
        }
        return ex.pi(rule, &r.path);
    }
    match r_redex_at(&node) {
        Some((rule, _)) if rule == r.rule => {}
        _ => return Err(Error::InvalidRedex(format!("no {} redex at this position", r.rule))),
    }
    match r.rule {
        RuleTag::DB => fire_db(ex, &r.path).map(drop),
        RuleTag::APP | RuleTag::DIST | RuleTag::VAR => fire_sub(ex, &r.path).map(drop),
        RuleTag::ABS => fire_abs(ex, &r.path).map(drop),
        _ => unreachable!(),
    }
}

/// `L⟨λx.t⟩u → L⟨t[x/u]⟩` as π2* then dB'.
pub(crate) fn fire_db(ex: &mut Exec<'_>, path: &[Sel]) -> Result<Path> {
    let mut p = path.to_vec();
    while ex.node(&p)?.child(Sel::AppFun).is_some_and(Term::is_cut) {
        ex.pi(PiRule::Pi2, &p)?;
        p.push(Sel::CutBody);
    }
    ex.apply(Micro::DBeta { path: p.clone() })?;
    Ok(p)
}

/// `t[x/L⟨c⟩] → L⟨…⟩` as π4* then the distance-free rule.
pub(crate) fn fire_sub(ex: &mut Exec<'_>, path: &[Sel]) -> Result<Path> {
    let mut p = path.to_vec();
    while ex.node(&p)?.child(Sel::CutContent).is_some_and(Term::is_cut) {
        ex.pi(PiRule::Pi4, &p)?;
        p.push(Sel::CutBody);
    }
    let m = match ex.node(&p)? {
        Term::Sub(_, x, c) => match &**c {
            Term::App(..) => {
                let x = x.clone();
                let y = ex.supply.fresh(&x);
                let z = ex.supply.fresh(&x);
                Micro::App { path: p.clone(), y, z }
            }
            Term::Abs(..) => Micro::Dist {
                path: p.clone(),
                z: ex.supply.fresh("z"),
            },
            Term::Var(_) => Micro::Var { path: p.clone() },
            _ => unreachable!(),
        },
        _ => return Err(Error::InvalidRedex("not a substitution".into())),
    };
    ex.apply(m)?;
    Ok(p)
}

/// `t[x//λy.u] → L⟨t{x/λy.p}⟩`: extract the cuts of `u` to its top, pull
/// them out of the abstraction and the distributor, then abs'.
pub(crate) fn fire_abs(ex: &mut Exec<'_>, path: &[Sel]) -> Result<Path> {
    let mut body = path.to_vec();
    body.push(Sel::CutContent);
    body.push(Sel::AbsBody);
    extract_cuts(ex, &body)?;
    let u = ex.node(&body)?;
    let (inner, cuts) = peel_list(u);
    let Term::Abs(y, _) = ex.node(&body[..body.len() - 1])? else {
        unreachable!()
    };
    if !is_pure(inner) || crate::term::list_free_vars(&cuts).contains(y) {
        return Err(Error::InvalidRedex("abs: distributor body does not permute to L⟨p⟩".into()));
    }
    let n = cuts.len();
    let mut content = path.to_vec();
    content.push(Sel::CutContent);
    for _ in 0..n {
        ex.pi(PiRule::Pi1, &content)?;
        content.push(Sel::CutBody);
    }
    let mut p = path.to_vec();
    for _ in 0..n {
        ex.pi(PiRule::Pi4, &p)?;
        p.push(Sel::CutBody);
    }
    ex.apply(Micro::Abs { path: p.clone() })?;
    Ok(p)
}

/// Moves every cut on the spine of the subterm at `root` (positions not
/// inside a cut content) to the top of that subterm, deepest first.
/// Cuts blocked under an abstraction binding a variable of their content
/// stay in place.
fn extract_cuts(ex: &mut Exec<'_>, root: &[Sel]) -> Result<()> {
    loop {
        let u = ex.node(root)?;
        let mut best: Option<(usize, Path, PiRule)> = None;
        for rel in spine_paths(u) {
            if rel.is_empty() || !u.at(&rel).unwrap().is_cut() {
                continue;
            }
            let parent_rel = &rel[..rel.len() - 1];
            let rule = match rel[rel.len() - 1] {
                Sel::AbsBody => PiRule::Pi1,
                Sel::AppFun => PiRule::Pi2,
                Sel::AppArg => PiRule::Pi3,
                _ => continue,
            };
            if pi_check(u.at(parent_rel).unwrap(), rule) == PiCheck::Blocked {
                continue;
            }
            if best.as_ref().is_none_or(|(d, _, _)| rel.len() > *d) {
                best = Some((rel.len(), parent_rel.to_vec(), rule));
            }
        }
        let Some((_, parent_rel, rule)) = best else {
            return Ok(());
        };
        let mut p = root.to_vec();
        p.extend_from_slice(&parent_rel);
        ex.pi(rule, &p)?;
    }
}

fn spine_paths(t: &Term) -> Vec<Path> {
    t.paths().into_iter().filter(|p| !p.contains(&Sel::CutContent)).collect()
}

/// Number of cuts extracted by abs at this distributor, or `None` when abs
/// does not apply.
fn abs_extraction(node: &Term) -> Option<usize> {
    let Term::Dist(_, _, c) = node else { return None };
    let Term::Abs(y, _) = &**c else { return None };
    let mut supply = FreshSupply::new();
    let mut ex = Exec::new(node.clone(), &mut supply);
    let body = [Sel::CutContent, Sel::AbsBody];
    extract_cuts(&mut ex, &body).ok()?;
    let (inner, cuts) = peel_list(ex.node(&body).ok()?);
    (is_pure(inner) && !crate::term::list_free_vars(&cuts).contains(y)).then_some(cuts.len())
}

// ---------------------------------------------------------------------------
// Normalization and projection

/// Guard for sub normalization.
pub const SUB_FUEL: usize = 100_000;

/// The sub-normal form, by leftmost-innermost sub steps.
pub fn sub_normalize(t: &Term, supply: &mut FreshSupply) -> Result<Term> {
    Ok(sub_normalize_trace(t, supply)?.final_term().clone())
}

/// Sub normalization with every step recorded.
pub fn sub_normalize_trace(t: &Term, supply: &mut FreshSupply) -> Result<Trace> {
    let mut trace = Trace::new(t.clone());
    let mut cur = t.clone();
    for _ in 0..SUB_FUEL {
        let Some(r) = sub_redexes_innermost(&cur).into_iter().next() else {
            trace.status = Status::NormalForm;
            return Ok(trace);
        };
        let fired = fire(&cur, &r, supply)?;
        cur = fired.term.clone();
        trace.steps.push(Step {
            label: Label::Rule(r.rule),
            path: r.path,
            term: fired.term,
            micros: fired.micros,
        });
    }
    Err(Error::InternalNonTermination)
}

/// `t↓`: executes every cut as a meta-level substitution.
pub fn unfold(t: &Term) -> Term {
    let mut supply = FreshSupply::new();
    supply.avoid_term(t);
    unfold_with(t, &mut supply)
}

fn unfold_with(t: &Term, supply: &mut FreshSupply) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Abs(x, b) => Term::lam(x.clone(), unfold_with(b, supply)),
        Term::App(f, a) => Term::app(unfold_with(f, supply), unfold_with(a, supply)),
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            let b = unfold_with(b, supply);
            let c = unfold_with(c, supply);
            subst(&b, x, &c, supply)
        }
    }
}

/// Simulates one β step on a pure term: a dB step followed by sub steps.
pub fn beta_expand_step(p: &Term, redex: &[Sel], supply: &mut FreshSupply) -> Result<Trace> {
    if !is_pure(p) {
        return Err(Error::NotPure);
    }
    match p.at(redex) {
        Some(Term::App(f, _)) if f.is_abs() => {}
        _ => return Err(Error::NotABetaRedex),
    }
    let r = Redex {
        path: redex.to_vec(),
        rule: RuleTag::DB,
        aux: 0,
    };
    let fired = fire(p, &r, supply)?;
    let mut trace = Trace::new(p.clone());
    trace.steps.push(Step {
        label: Label::Rule(RuleTag::DB),
        path: r.path,
        term: fired.term.clone(),
        micros: fired.micros,
    });
    let rest = sub_normalize_trace(&fired.term, supply)?;
    trace.steps.extend(rest.steps);
    trace.status = Status::NormalForm;
    Ok(trace)
}

/// Outcome of a confluence probe.
#[derive(Clone, Debug, Default)]
pub struct ConfluenceReport {
    /// Distinct endpoints reached, up to α.
    pub endpoints: usize,
    /// Endpoints whose β-normal form could not be reached within fuel.
    pub inconclusive: usize,
    /// Pairs of endpoints with distinct β-normal forms.
    pub violations: Vec<(Term, Term)>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Explores every R sequence of length at most `depth`, then compares the
/// β-normal forms of the unfolded endpoints.
pub fn confluence_probe(t: &Term, depth: usize, fuel: usize, supply: &mut FreshSupply) -> Result<ConfluenceReport> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut frontier = vec![t.clone()];
    let mut endpoints = vec![t.clone()];
    seen.insert(oracle::canonical(t));
    for _ in 0..depth {
        let mut next = Vec::new();
        for u in &frontier {
            for r in r_redexes(u, false) {
                let v = fire(u, &r, supply)?.term;
                if seen.insert(oracle::canonical(&v)) {
                    next.push(v.clone());
                    endpoints.push(v);
                }
            }
        }
        frontier = next;
    }
    let mut report = ConfluenceReport {
        endpoints: endpoints.len(),
        ..Default::default()
    };
    let mut reference: Option<(Term, Term)> = None;
    for e in endpoints {
        let p = sub_normalize(&e, supply)?;
        match oracle::beta_normalize(&p, fuel, supply) {
            Ok(nf) => match &reference {
                None => reference = Some((e, nf)),
                Some((e0, nf0)) => {
                    if *nf0 != nf {
                        report.violations.push((e0.clone(), e));
                    }
                }
            },
            Err(_) => report.inconclusive += 1,
        }
    }
    Ok(report)
}

/// Kind of the cut at `path`, if any.
pub fn cut_kind_at(t: &Term, path: &[Sel]) -> Option<CutKind> {
    t.at(path).and_then(|n| n.as_cut().map(|c| c.0))
}
