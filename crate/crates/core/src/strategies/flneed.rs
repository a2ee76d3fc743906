//! Fully lazy call-by-need.

use super::split::{body_path, st_normalize_in};
use super::StepKind;
use crate::error::{Error, Result};
use crate::rewrite::{fire_db, Exec, Micro, PiRule};
use crate::term::{check_grammar, free_vars, is_u, list_head, FreshSupply, Grammar, Name, Path, Sel, Term};
use crate::trace::{run, Fuel, Label, Outcome, Status, Step, Trace};

enum Action {
    Db(Path),
    Spl(Path),
    OneShot(Path, Path),
}

/// What a need context leads to. Paths are built from the leaf up and are
/// stored reversed until the scan returns.
enum Scan {
    Redex(Action),
    Need(Name, Path),
    Stuck,
}

fn up(scan: Scan, sel: Sel) -> Scan {
    match scan {
        Scan::Redex(Action::Db(mut p)) => {
            p.push(sel);
            Scan::Redex(Action::Db(p))
        }
        Scan::Redex(Action::Spl(mut p)) => {
            p.push(sel);
            Scan::Redex(Action::Spl(p))
        }
        Scan::Redex(Action::OneShot(mut p, occ)) => {
            p.push(sel);
            Scan::Redex(Action::OneShot(p, occ))
        }
        Scan::Need(x, mut p) => {
            p.push(sel);
            Scan::Need(x, p)
        }
        Scan::Stuck => Scan::Stuck,
    }
}

fn scan(t: &Term) -> Scan {
    match t {
        Term::Var(x) => Scan::Need(x.clone(), Vec::new()),
        Term::Abs(..) => Scan::Stuck,
        Term::App(f, _) => {
            if list_head(f).0.is_abs() {
                Scan::Redex(Action::Db(Vec::new()))
            } else {
                up(scan(f), Sel::AppFun)
            }
        }
        Term::Sub(b, x, u) | Term::Dist(b, x, u) => match scan(b) {
            Scan::Need(z, mut occ) if &z == x => {
                occ.reverse();
                if matches!(t, Term::Dist(..)) {
                    if check_grammar(u, Grammar::Value) {
                        Scan::Redex(Action::OneShot(Vec::new(), occ))
                    } else {
                        Scan::Stuck
                    }
                } else if list_head(u).0.is_abs() {
                    Scan::Redex(Action::Spl(Vec::new()))
                } else {
                    up(scan(u), Sel::CutContent)
                }
            }
            other => up(other, Sel::CutBody),
        },
    }
}

/// The unique redex in a need context.
fn find(t: &Term) -> Option<Action> {
    match scan(t) {
        Scan::Redex(Action::Db(mut p)) => {
            p.reverse();
            Some(Action::Db(p))
        }
        Scan::Redex(Action::Spl(mut p)) => {
            p.reverse();
            Some(Action::Spl(p))
        }
        Scan::Redex(Action::OneShot(mut p, occ)) => {
            p.reverse();
            Some(Action::OneShot(p, occ))
        }
        Scan::Need(..) | Scan::Stuck => None,
    }
}

/// `N⟨⟨x⟩⟩[x/L⟨λy.p⟩] → L⟨LL⟨N⟨⟨x⟩⟩[x//λy.p′]⟩⟩`.
fn fire_spl(ex: &mut Exec<'_>, path: &[Sel]) -> Result<()> {
    let mut p = path.to_vec();
    while ex.node(&p)?.child(Sel::CutContent).is_some_and(Term::is_cut) {
        ex.pi(PiRule::Pi4, &p)?;
        p.push(Sel::CutBody);
    }
    let z = ex.supply.fresh("z");
    ex.apply(Micro::Dist { path: p.clone(), z })?;
    let mut content = p.clone();
    content.push(Sel::CutContent);
    st_normalize_in(ex, &content)?;
    let n = list_head(ex.node(&body_path(&content))?).1;
    let mut c = content.clone();
    for _ in 0..n {
        ex.pi(PiRule::Pi1, &c)?;
        c.push(Sel::CutBody);
    }
    let mut d = p;
    for _ in 0..n {
        ex.pi(PiRule::Pi4, &d)?;
        d.push(Sel::CutBody);
    }
    Ok(())
}

/// `N⟨⟨x⟩⟩[x//v] → N⟨⟨v⟩⟩[x//v]`, renaming cut binders of `N` that would
/// capture a free variable of `v`.
fn fire_one_shot(ex: &mut Exec<'_>, path: &[Sel], occ: &[Sel]) -> Result<()> {
    let Term::Dist(_, _, v) = ex.node(path)? else {
        return Err(Error::InvalidRedex("1s: not a distributor".into()));
    };
    let fv = free_vars(v);
    let body = body_of_cut(path);
    let mut clashes = Vec::new();
    let mut cur = ex.node(&body)?;
    for (i, sel) in occ.iter().enumerate() {
        let captures = match cur {
            Term::Sub(_, y, _) | Term::Dist(_, y, _) => *sel == Sel::CutBody && fv.contains(y),
            Term::Abs(y, _) => fv.contains(y),
            _ => false,
        };
        if captures {
            let mut at = body.clone();
            at.extend_from_slice(&occ[..i]);
            clashes.push(at);
        }
        cur = cur.child(*sel).ok_or(Error::InvalidPath)?;
    }
    for at in clashes {
        ex.rename(&at)?;
    }
    ex.apply(Micro::OneShot {
        path: path.to_vec(),
        occ: occ.to_vec(),
    })
}

fn body_of_cut(path: &[Sel]) -> Path {
    let mut p = path.to_vec();
    p.push(Sel::CutBody);
    p
}

/// The flneed step of `t`, if `t` is not a normal form.
pub fn flneed_step(t: &Term, supply: &mut FreshSupply) -> Result<Option<Step>> {
    Ok(step_owned(t.clone(), supply)?.ok())
}

/// Steps `t` in place, or hands it back when it is a normal form.
fn step_owned(t: Term, supply: &mut FreshSupply) -> Result<std::result::Result<Step, Term>> {
    if !is_u(&t) {
        return Err(Error::NotInU);
    }
    let Some(action) = find(&t) else {
        return Ok(Err(t));
    };
    let mut ex = Exec::new(t, supply);
    let (kind, path) = match action {
        Action::Db(p) => {
            fire_db(&mut ex, &p)?;
            (StepKind::FL_DB, p)
        }
        Action::Spl(p) => {
            fire_spl(&mut ex, &p)?;
            (StepKind::FL_SPL, p)
        }
        Action::OneShot(p, occ) => {
            fire_one_shot(&mut ex, &p, &occ)?;
            (StepKind::FL_LS, p)
        }
    };
    Ok(Ok(Step {
        label: Label::Kind(kind),
        path,
        term: ex.term,
        micros: ex.micros,
    }))
}

/// Runs flneed for at most `fuel` steps.
pub fn flneed_normalize(t: &Term, fuel: usize, supply: &mut FreshSupply) -> Result<Trace> {
    let mut trace = Trace::new(t.clone());
    let mut cur = t.clone();
    loop {
        match flneed_step(&cur, supply)? {
            None => {
                trace.status = Status::NormalForm;
                return Ok(trace);
            }
            Some(step) => {
                if trace.steps.len() == fuel {
                    return Ok(trace);
                }
                cur = step.term.clone();
                trace.steps.push(step);
            }
        }
    }
}

/// Runs flneed within `fuel` without recording the trace.
pub fn flneed_outcome(t: &Term, fuel: impl Into<Fuel>, supply: &mut FreshSupply) -> Result<Outcome> {
    run(t, fuel, |u| step_owned(u, supply))
}
