//! Typing normal forms and subject expansion.

use std::collections::HashSet;

use super::subst::{anti_subst_at, premise_sels, rebuild, retarget, split_many};
use super::{check_derivation, Derivation, IType, Judged, MultiType, Rule};
use crate::error::{Error, Result};
use crate::rewrite::{apply_micro, Micro, PiRule};
use crate::strategies::{flneed_normalize, flneed_outcome, name_normalize, name_outcome, NamePolicy};
use crate::term::{check_grammar, is_u, occurrences, FreshSupply, Grammar, Path, Sel, Term};
use crate::trace::{Status, Step, Trace};

/// Types a flneed normal form: answers at `a` with the empty environment,
/// neutral terms at `target` with only the needed variable in the
/// environment.
pub fn type_normal_form(t: &Term, target: &IType) -> Result<Derivation> {
    if !check_grammar(t, Grammar::Ne) {
        return Err(Error::NotANormalForm);
    }
    if check_grammar(t, Grammar::Answer) {
        Ok(answer(t))
    } else {
        neutral(t, target)
    }
}

fn answer(t: &Term) -> Derivation {
    match t.as_cut() {
        Some((_, b, _, u)) => {
            let body = answer(b);
            rebuild(Rule::CUT, t.clone(), body.ty.clone(), vec![body, Derivation::many(u.clone(), Vec::new())])
        }
        None => Derivation::ans(t.clone()),
    }
}

fn neutral(t: &Term, target: &IType) -> Result<Derivation> {
    match t {
        Term::Var(x) => Ok(Derivation::ax(x.clone(), target.clone())),
        Term::App(f, a) => {
            let pf = neutral(f, &IType::arrow(MultiType::empty(), target.clone()))?;
            Ok(Derivation::app(pf, Derivation::many((**a).clone(), Vec::new())))
        }
        Term::Abs(..) => Err(Error::NotANormalForm),
        Term::Sub(b, x, u) | Term::Dist(b, x, u) => {
            let pb = neutral(b, target)?;
            let m = pb.env.get(x);
            let content = m.elements().iter().map(|s| neutral(u, s)).collect::<Result<Vec<_>>>()?;
            Ok(rebuild(
                Rule::CUT,
                t.clone(),
                Judged::Single(target.clone()),
                vec![pb, Derivation::many((**u).clone(), content)],
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Subject expansion

/// Given `Φ₁` typing the result of `step` fired on `t0`, builds a
/// derivation for `t0` with the same environment and type.
pub fn expand_step(phi1: &Derivation, t0: &Term, step: &Step, supply: &mut FreshSupply) -> Result<Derivation> {
    let mut terms = vec![t0.clone()];
    for m in &step.micros {
        let next = apply_micro(terms.last().unwrap(), m, supply)?;
        terms.push(next);
    }
    let mut cur = retarget(phi1, terms.last().unwrap())?;
    for (i, m) in step.micros.iter().enumerate().rev() {
        cur = map_at(&cur, m.path(), &terms[i], &terms[i + 1], &|d, before, after| {
            expand_micro(d, before, after, m)
        })?;
    }
    Ok(cur)
}

type Local<'a> = dyn Fn(&Derivation, &Term, &Term) -> Result<Derivation> + 'a;

/// Applies `f` to every derivation of the subterm at `path`.
fn map_at(d: &Derivation, path: &[Sel], before: &Term, after: &Term, f: &Local<'_>) -> Result<Derivation> {
    if d.rule == Rule::MANY {
        let premises = d
            .premises
            .iter()
            .map(|p| map_at(p, path, before, after, f))
            .collect::<Result<Vec<_>>>()?;
        return Ok(rebuild(Rule::MANY, before.clone(), d.ty.clone(), premises));
    }
    let Some((first, rest)) = path.split_first() else {
        return f(d, before, after);
    };
    match d.rule {
        Rule::ANS => Ok(Derivation::ans(before.clone())),
        Rule::AX => Err(Error::InvalidPath),
        _ => {
            let mut premises = Vec::new();
            for (p, sel) in d.premises.iter().zip(premise_sels(d.rule)) {
                if sel == first {
                    let b = before.child(*sel).ok_or(Error::InvalidPath)?;
                    let a = after.child(*sel).ok_or(Error::InvalidPath)?;
                    premises.push(map_at(p, rest, b, a, f)?);
                } else {
                    premises.push(p.clone());
                }
            }
            Ok(rebuild(d.rule, before.clone(), d.ty.clone(), premises))
        }
    }
}

fn unsupported(m: &Micro) -> Error {
    Error::UnsupportedStep(format!("{m:?}"))
}

fn kid(t: &Term, s: Sel) -> Result<&Term> {
    t.child(s).ok_or(Error::InvalidPath)
}

/// Splits the MANY derivation `pu` for a cut content following how the
/// premises of `ps` use `x`, and re-cuts each premise.
fn recut(ps: &Derivation, pu: &Derivation, x: &str, node: &Term) -> Result<Derivation> {
    let parts: Vec<MultiType> = ps.premises.iter().map(|p| p.env.get(x)).collect();
    let us = split_many(pu, &parts)?;
    let cuts = ps
        .premises
        .iter()
        .zip(us)
        .map(|(p, u)| rebuild(Rule::CUT, node.clone(), p.ty.clone(), vec![p.clone(), u]))
        .collect();
    Ok(rebuild(Rule::MANY, node.clone(), ps.ty.clone(), cuts))
}

/// Anti-substitutes the occurrences of the cut variable of `before` in its
/// body out of `d`, which types `after_body`.
fn anti_body(d: &Derivation, before: &Term, after_body: &Term, occs: &[Path]) -> Result<(Derivation, Vec<Derivation>)> {
    let (_, b, x, _) = before.as_cut().ok_or(Error::InvalidPath)?;
    let mut shaped = after_body.clone();
    for o in occs {
        shaped = shaped.replace_at(o, Term::var(x.clone()))?;
    }
    let set: HashSet<Path> = occs.iter().cloned().collect();
    let (p, inst) = anti_subst_at(d, &shaped, &set, x);
    Ok((retarget(&p, b)?, inst))
}

fn expand_micro(d1: &Derivation, before: &Term, after: &Term, m: &Micro) -> Result<Derivation> {
    let ty = d1.ty.clone();
    let prem = |i: usize| d1.premises.get(i).ok_or_else(|| unsupported(m));
    match m {
        Micro::Rename { .. } => retarget(d1, before),
        Micro::Pi { rule, .. } => match rule {
            PiRule::Pi1 => {
                let (pa, pu) = (prem(0)?, prem(1)?);
                if pa.rule == Rule::ANS {
                    return Ok(Derivation::ans(before.clone()));
                }
                let body = kid(before, Sel::AbsBody)?;
                let cut = rebuild(Rule::CUT, body.clone(), pa.premises[0].ty.clone(), vec![pa.premises[0].clone(), pu.clone()]);
                Ok(rebuild(Rule::ABS, before.clone(), pa.ty.clone(), vec![cut]))
            }
            PiRule::Pi2 => {
                let (papp, pu) = (prem(0)?, prem(1)?);
                let (pt, ps) = (&papp.premises[0], &papp.premises[1]);
                let fun = kid(before, Sel::AppFun)?;
                let cut = rebuild(Rule::CUT, fun.clone(), pt.ty.clone(), vec![pt.clone(), pu.clone()]);
                Ok(rebuild(Rule::APP, before.clone(), ty, vec![cut, ps.clone()]))
            }
            PiRule::Pi3 => {
                let (papp, pu) = (prem(0)?, prem(1)?);
                let (pt, ps) = (&papp.premises[0], &papp.premises[1]);
                let x = after.as_cut().ok_or_else(|| unsupported(m))?.2;
                let arg = recut(ps, pu, x, kid(before, Sel::AppArg)?)?;
                Ok(rebuild(Rule::APP, before.clone(), ty, vec![pt.clone(), arg]))
            }
            PiRule::Pi4 => {
                let (pin, pu) = (prem(0)?, prem(1)?);
                let (pt, ps) = (&pin.premises[0], &pin.premises[1]);
                let x = after.as_cut().ok_or_else(|| unsupported(m))?.2;
                let content = recut(ps, pu, x, kid(before, Sel::CutContent)?)?;
                Ok(rebuild(Rule::CUT, before.clone(), ty, vec![pt.clone(), content]))
            }
        },
        Micro::DBeta { .. } => {
            let (pt, pu) = (prem(0)?, prem(1)?);
            let fun = kid(before, Sel::AppFun)?;
            let abs = rebuild(
                Rule::ABS,
                fun.clone(),
                Judged::Single(IType::arrow(MultiType::empty(), pt.single().clone())),
                vec![pt.clone()],
            );
            Ok(rebuild(Rule::APP, before.clone(), ty, vec![abs, pu.clone()]))
        }
        Micro::App { .. } => {
            let (pin, ps) = (prem(0)?, prem(1)?);
            let (pt, pu) = (&pin.premises[0], &pin.premises[1]);
            let (_, b, x, c) = before.as_cut().unwrap();
            let after_body = kid(kid(after, Sel::CutBody)?, Sel::CutBody)?;
            let (p_body, inst) = anti_body(pt, before, after_body, &occurrences(b, x))?;
            let parts_u: Vec<MultiType> = inst.iter().map(|i| MultiType::single(i.premises[0].single().clone())).collect();
            let parts_s: Vec<MultiType> = inst.iter().map(|i| i.premises[1].multi()).collect();
            let us = split_many(pu, &parts_u)?;
            let ss = split_many(ps, &parts_s)?;
            let (cu, cs) = match c {
                Term::App(u, s) => (u, s),
                _ => return Err(unsupported(m)),
            };
            let mut apps = Vec::new();
            for ((i, u), s) in inst.iter().zip(us).zip(ss) {
                let fun = retarget(&u.premises[0], cu)?;
                let arg = retarget(&s, cs)?;
                apps.push(rebuild(Rule::APP, c.clone(), i.ty.clone(), vec![fun, arg]));
            }
            let content = Derivation::many(c.clone(), apps);
            Ok(rebuild(Rule::CUT, before.clone(), ty, vec![p_body, content]))
        }
        Micro::Var { .. } | Micro::Abs { .. } => {
            let (_, b, x, c) = before.as_cut().unwrap();
            let (p_body, inst) = anti_body(d1, before, after, &occurrences(b, x))?;
            let inst = inst.iter().map(|i| retarget(i, c)).collect::<Result<Vec<_>>>()?;
            Ok(rebuild(Rule::CUT, before.clone(), ty, vec![p_body, Derivation::many(c.clone(), inst)]))
        }
        Micro::Dist { .. } => {
            let (pt, pc) = (prem(0)?, prem(1)?);
            let c = kid(before, Sel::CutContent)?;
            let Term::Abs(_, u) = c else { return Err(unsupported(m)) };
            let mut out = Vec::new();
            for p in &pc.premises {
                if p.rule == Rule::ANS {
                    out.push(Derivation::ans(c.clone()));
                    continue;
                }
                let inner_cut = &p.premises[0];
                let pu = inner_cut.premises[1].premises.first().ok_or_else(|| unsupported(m))?;
                let pu = retarget(pu, u)?;
                out.push(rebuild(Rule::ABS, c.clone(), p.ty.clone(), vec![pu]));
            }
            let content = Derivation::many(c.clone(), out);
            Ok(rebuild(Rule::CUT, before.clone(), ty, vec![pt.clone(), content]))
        }
        Micro::OneShot { occ, .. } => {
            let (pb, pv) = (prem(0)?, prem(1)?);
            let (_, _, _, v) = before.as_cut().unwrap();
            let after_body = kid(after, Sel::CutBody)?;
            let (p_body, inst) = anti_body(pb, before, after_body, std::slice::from_ref(occ))?;
            let mut all = pv.premises.clone();
            for i in &inst {
                all.push(retarget(i, v)?);
            }
            Ok(rebuild(Rule::CUT, before.clone(), ty, vec![p_body, Derivation::many(v.clone(), all)]))
        }
    }
}

// ---------------------------------------------------------------------------
// Inference

/// Base type used as the target of neutral normal forms.
pub const NEUTRAL_TARGET: &str = "o";

/// Normalizes `t` along flneed, returning the trace only when it reaches a
/// normal form within `fuel`. Divergent runs are probed first without
/// keeping their terms. When flneed halts on a distributor whose content is
/// not a value, the call-by-name trace is used instead.
fn normalizing_trace(t: &Term, fuel: usize, supply: &mut FreshSupply) -> Result<Option<Trace>> {
    if !is_u(t) {
        return Err(Error::NotInU);
    }
    let probe = flneed_outcome(t, fuel, &mut supply.clone())?;
    if probe.status != Status::NormalForm {
        return Ok(None);
    }
    if check_grammar(&probe.term, Grammar::Ne) {
        return Ok(Some(flneed_normalize(t, fuel, supply)?));
    }
    let policy = NamePolicy::Leftmost;
    if name_outcome(t, fuel, policy, &mut supply.clone())?.status != Status::NormalForm {
        return Ok(None);
    }
    Ok(Some(name_normalize(t, fuel, policy, supply)?))
}

/// Derivations along the normalizing trace, one per term, or `None` when the
/// trace does not reach a normal form within `fuel`.
pub fn infer_along(t: &Term, fuel: usize, supply: &mut FreshSupply) -> Result<Option<(Trace, Vec<Derivation>)>> {
    let Some(trace) = normalizing_trace(t, fuel, supply)? else {
        return Ok(None);
    };
    let mut phi = type_normal_form(trace.final_term(), &IType::base(NEUTRAL_TARGET))?;
    let mut out = vec![phi.clone()];
    for i in (0..trace.len()).rev() {
        phi = expand_step(&phi, trace.before(i), &trace.steps[i], supply)?;
        out.push(phi.clone());
    }
    out.reverse();
    check_derivation(&out[0])?;
    Ok(Some((trace, out)))
}

/// A derivation for `t`, found by normalizing and expanding back.
pub fn infer(t: &Term, fuel: usize, supply: &mut FreshSupply) -> Result<Option<Derivation>> {
    let Some(trace) = normalizing_trace(t, fuel, supply)? else {
        return Ok(None);
    };
    let mut phi = type_normal_form(trace.final_term(), &IType::base(NEUTRAL_TARGET))?;
    for i in (0..trace.len()).rev() {
        phi = expand_step(&phi, trace.before(i), &trace.steps[i], supply)?;
    }
    check_derivation(&phi)?;
    Ok(Some(phi))
}
