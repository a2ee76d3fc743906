//! Splitting, retargeting and (anti-)substitution on derivations.

use std::collections::{HashMap, HashSet};

use super::{Derivation, Env, IType, Judged, MultiType, Rule};
use crate::error::{Error, Result};
use crate::term::{alpha_eq, plug, Name, Path, Sel, Term};

/// Builds a node, recomputing its environment from the premises.
pub(crate) fn rebuild(rule: Rule, subject: Term, ty: Judged, premises: Vec<Derivation>) -> Derivation {
    let env = match (rule, &subject) {
        (Rule::AX, Term::Var(x)) => Env::single(x.clone(), MultiType::single(single(&ty))),
        (Rule::ANS, _) => Env::new(),
        (Rule::ABS, Term::Abs(x, _)) => premises[0].env.without(x),
        (Rule::CUT, t) => {
            let (_, _, x, _) = t.as_cut().expect("CUT subject");
            premises[0].env.without(x).union(&premises[1].env)
        }
        _ => premises.iter().fold(Env::new(), |e, p| e.union(&p.env)),
    };
    let ty = match rule {
        Rule::MANY => Judged::Multi(MultiType::new(premises.iter().map(|p| p.single().clone()).collect())),
        Rule::ABS => match (&subject, &ty) {
            (Term::Abs(x, _), Judged::Single(IType::Arrow(_, s))) => {
                Judged::Single(IType::arrow(premises[0].env.get(x), (**s).clone()))
            }
            _ => ty,
        },
        _ => ty,
    };
    Derivation {
        rule,
        env,
        subject,
        ty,
        premises,
    }
}

fn single(ty: &Judged) -> IType {
    match ty {
        Judged::Single(s) => s.clone(),
        Judged::Multi(_) => IType::Answer,
    }
}

/// Child subject positions of each premise.
pub(crate) fn premise_sels(rule: Rule) -> &'static [Sel] {
    match rule {
        Rule::ABS => &[Sel::AbsBody],
        Rule::APP => &[Sel::AppFun, Sel::AppArg],
        Rule::CUT => &[Sel::CutBody, Sel::CutContent],
        _ => &[],
    }
}

/// Moves a derivation onto an α-equivalent subject.
pub fn retarget(d: &Derivation, t: &Term) -> Result<Derivation> {
    if !alpha_eq(&d.subject, t) {
        return Err(Error::InvalidDerivation(format!("{} is not α-equivalent to {}", d.subject, t)));
    }
    Ok(retarget_in(d, t, &HashMap::new()))
}

fn retarget_in(d: &Derivation, t: &Term, ren: &HashMap<Name, Name>) -> Derivation {
    let mut env = Env::new();
    for (x, m) in d.env.iter() {
        env.insert(ren.get(x).cloned().unwrap_or_else(|| x.clone()), m.clone());
    }
    let premises = match d.rule {
        Rule::MANY => d.premises.iter().map(|p| retarget_in(p, t, ren)).collect(),
        Rule::ABS | Rule::APP | Rule::CUT => {
            let binder = match (&d.subject, t) {
                (Term::Abs(a, _), Term::Abs(b, _)) => Some((a, b)),
                (s, t) if s.is_cut() => Some((s.as_cut().unwrap().2, t.as_cut().unwrap().2)),
                _ => None,
            };
            d.premises
                .iter()
                .zip(premise_sels(d.rule))
                .map(|(p, sel)| {
                    let child = t.child(*sel).unwrap();
                    match binder {
                        Some((a, b)) if *sel != Sel::CutContent => {
                            let mut inner = ren.clone();
                            inner.insert(a.clone(), b.clone());
                            retarget_in(p, child, &inner)
                        }
                        _ => retarget_in(p, child, ren),
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Derivation {
        rule: d.rule,
        env,
        subject: t.clone(),
        ty: d.ty.clone(),
        premises,
    }
}

/// Splits a MANY derivation along a partition of its multi-type.
pub fn split_many(d: &Derivation, parts: &[MultiType]) -> Result<Vec<Derivation>> {
    if d.rule != Rule::MANY {
        return Err(Error::PartitionMismatch);
    }
    let total = parts.iter().fold(MultiType::empty(), |acc, m| acc.union(m));
    if total != d.multi() {
        return Err(Error::PartitionMismatch);
    }
    let mut used = vec![false; d.premises.len()];
    let mut out = Vec::new();
    for part in parts {
        let mut chosen = Vec::new();
        for s in part.elements() {
            let i = (0..d.premises.len())
                .find(|&i| !used[i] && d.premises[i].single() == s)
                .ok_or(Error::PartitionMismatch)?;
            used[i] = true;
            chosen.push(d.premises[i].clone());
        }
        out.push(Derivation::many(d.subject.clone(), chosen));
    }
    Ok(out)
}

/// Replaces the typed instances of the subterms at `occs` by axioms for
/// `x`. Returns the new derivation (for `subject`) and the instances.
pub(crate) fn anti_subst_at(
    d: &Derivation,
    subject: &Term,
    occs: &HashSet<Path>,
    x: &str,
) -> (Derivation, Vec<Derivation>) {
    let mut out = Vec::new();
    let d2 = anti_walk(d, subject, &mut Vec::new(), occs, x, &mut out);
    (d2, out)
}

fn anti_walk(
    d: &Derivation,
    subject: &Term,
    rel: &mut Path,
    occs: &HashSet<Path>,
    x: &str,
    out: &mut Vec<Derivation>,
) -> Derivation {
    if d.rule != Rule::MANY && occs.contains(rel) {
        out.push(d.clone());
        return Derivation::ax(x, d.single().clone());
    }
    let premises = if d.rule == Rule::MANY {
        d.premises.iter().map(|p| anti_walk(p, subject, rel, occs, x, out)).collect()
    } else {
        d.premises
            .iter()
            .zip(premise_sels(d.rule))
            .map(|(p, sel)| {
                rel.push(*sel);
                let r = anti_walk(p, subject.child(*sel).unwrap(), rel, occs, x, out);
                rel.pop();
                r
            })
            .collect()
    };
    rebuild(d.rule, subject.clone(), d.ty.clone(), premises)
}

/// Splits `Φ ▷ C⟨⟨u⟩⟩` into a derivation for `C⟨⟨x⟩⟩` and a MANY
/// derivation for `u`.
pub fn anti_subst_typing(d: &Derivation, path: &[Sel], x: &str) -> Result<(Derivation, Derivation)> {
    let u = d.subject.at(path).ok_or(Error::InvalidPath)?.clone();
    let ctx = d.subject.replace_at(path, Term::var(x))?;
    let occs = HashSet::from([path.to_vec()]);
    let (d2, inst) = anti_subst_at(d, &ctx, &occs, x);
    Ok((d2, Derivation::many(u, inst)))
}

/// Replaces axioms for the variables at `occs` by instances from `pool`,
/// matched by type.
pub(crate) fn subst_at(
    d: &Derivation,
    subject: &Term,
    occs: &HashSet<Path>,
    pool: &mut Vec<Derivation>,
) -> Result<Derivation> {
    subst_walk(d, subject, &mut Vec::new(), occs, pool)
}

fn subst_walk(
    d: &Derivation,
    subject: &Term,
    rel: &mut Path,
    occs: &HashSet<Path>,
    pool: &mut Vec<Derivation>,
) -> Result<Derivation> {
    if d.rule == Rule::AX && occs.contains(rel) {
        let i = pool.iter().position(|p| p.single() == d.single()).ok_or(Error::SliceMismatch)?;
        return retarget(&pool.remove(i), subject);
    }
    let premises = if d.rule == Rule::MANY {
        d.premises
            .iter()
            .map(|p| subst_walk(p, subject, rel, occs, pool))
            .collect::<Result<_>>()?
    } else {
        d.premises
            .iter()
            .zip(premise_sels(d.rule))
            .map(|(p, sel)| {
                rel.push(*sel);
                let r = subst_walk(p, subject.child(*sel).unwrap(), rel, occs, pool);
                rel.pop();
                r
            })
            .collect::<Result<_>>()?
    };
    Ok(rebuild(d.rule, subject.clone(), d.ty.clone(), premises))
}

/// Types `C⟨⟨u⟩⟩` from a derivation of `C⟨⟨x⟩⟩` and a MANY derivation
/// `Φu` for `u` at the slice consumed by the hole.
pub fn partial_subst_typing(d: &Derivation, phi_u: &Derivation, path: &[Sel]) -> Result<Derivation> {
    let Some(Term::Var(_)) = d.subject.at(path) else {
        return Err(Error::InvalidPath);
    };
    if phi_u.rule != Rule::MANY {
        return Err(Error::SliceMismatch);
    }
    let target = plug(&d.subject, path, &phi_u.subject, true)?;
    let mut pool = phi_u.premises.clone();
    let out = subst_at(d, &target, &HashSet::from([path.to_vec()]), &mut pool)?;
    if !pool.is_empty() {
        return Err(Error::SliceMismatch);
    }
    Ok(out)
}
