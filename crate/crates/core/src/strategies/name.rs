//! Call-by-name.

use serde::{Deserialize, Serialize};

use super::StepKind;
use crate::error::{Error, Result};
use crate::rewrite::{fire_owned, r_redex_at, Redex, RuleTag};
use crate::term::{is_u, FreshSupply, Path, Sel, Term};
use crate::trace::{run, Fuel, Label, Outcome, Status, Step, Trace};

/// Which name redex to fire when several exist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamePolicy {
    #[default]
    PreferDB,
    PreferSub,
    Leftmost,
}

/// All name redexes, in preorder. dB closes under application heads and
/// every cut body; sub closes under application heads and the bodies of
/// distributed abstractions.
pub fn name_redexes(t: &Term) -> Result<Vec<(StepKind, Redex)>> {
    if !is_u(t) {
        return Err(Error::NotInU);
    }
    let mut out = Vec::new();
    collect(t, &mut Vec::new(), true, true, &mut out);
    Ok(out)
}

fn collect(t: &Term, path: &mut Path, db: bool, sub: bool, out: &mut Vec<(StepKind, Redex)>) {
    if let Some((rule, aux)) = r_redex_at(t) {
        let kind = if rule == RuleTag::DB { db.then_some(StepKind::NDB) } else { sub.then_some(StepKind::NSUB) };
        if let Some(kind) = kind {
            out.push((
                kind,
                Redex {
                    path: path.clone(),
                    rule,
                    aux,
                },
            ));
        }
    }
    let mut visit = |sels: &[Sel], child: &Term, db: bool, sub: bool, out: &mut Vec<(StepKind, Redex)>| {
        if db || sub {
            path.extend_from_slice(sels);
            collect(child, path, db, sub, out);
            path.truncate(path.len() - sels.len());
        }
    };
    match t {
        Term::Var(_) | Term::Abs(..) => {}
        Term::App(f, _) => visit(&[Sel::AppFun], f, db, sub, out),
        Term::Sub(b, _, _) => visit(&[Sel::CutBody], b, db, false, out),
        Term::Dist(b, _, c) => {
            visit(&[Sel::CutBody], b, db, false, out);
            if let Term::Abs(_, body) = &**c {
                visit(&[Sel::CutContent, Sel::AbsBody], body, false, sub, out);
            }
        }
    }
}

fn choose(rs: Vec<(StepKind, Redex)>, policy: NamePolicy) -> Option<(StepKind, Redex)> {
    let pick = |k: StepKind| rs.iter().find(|(kk, _)| *kk == k).cloned();
    match policy {
        NamePolicy::Leftmost => rs.first().cloned(),
        NamePolicy::PreferDB => pick(StepKind::NDB).or_else(|| pick(StepKind::NSUB)),
        NamePolicy::PreferSub => pick(StepKind::NSUB).or_else(|| pick(StepKind::NDB)),
    }
}

/// Fires the policy-selected name redex.
pub fn name_step(t: &Term, policy: NamePolicy, supply: &mut FreshSupply) -> Result<Option<Step>> {
    Ok(step_owned(t.clone(), policy, supply)?.ok())
}

/// Steps `t` in place, or hands it back when it is a normal form.
fn step_owned(t: Term, policy: NamePolicy, supply: &mut FreshSupply) -> Result<std::result::Result<Step, Term>> {
    let Some((kind, r)) = choose(name_redexes(&t)?, policy) else {
        return Ok(Err(t));
    };
    let fired = fire_owned(t, &r, supply)?;
    Ok(Ok(Step {
        label: Label::Kind(kind),
        path: r.path,
        term: fired.term,
        micros: fired.micros,
    }))
}

/// Runs call-by-name for at most `fuel` steps.
pub fn name_normalize(t: &Term, fuel: usize, policy: NamePolicy, supply: &mut FreshSupply) -> Result<Trace> {
    let mut trace = Trace::new(t.clone());
    let mut cur = t.clone();
    loop {
        match name_step(&cur, policy, supply)? {
            None => {
                trace.status = Status::NormalForm;
                return Ok(trace);
            }
            Some(step) => {
                if trace.steps.len() == fuel {
                    trace.status = Status::FuelExhausted;
                    return Ok(trace);
                }
                cur = step.term.clone();
                trace.steps.push(step);
            }
        }
    }
}

/// Runs call-by-name within `fuel` without recording the trace.
pub fn name_outcome(t: &Term, fuel: impl Into<Fuel>, policy: NamePolicy, supply: &mut FreshSupply) -> Result<Outcome> {
    run(t, fuel, |u| step_owned(u, policy, supply))
}
