use super::*;
use crate::term::{check_grammar, is_u, parse, Grammar};
use crate::trace::{Fuel, Label, Status};

fn t(s: &str) -> Term {
    parse(s).unwrap()
}

fn theta(names: &[&str]) -> BTreeSet<Name> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn call_by_name_example() {
    let steps = [
        (StepKind::NDB, "(I (x1 I))[x1/\\y.(I I) y]"),
        (StepKind::NSUB, "(I (x1 I))[x1//\\y.z[z/(I I) y]]"),
        (StepKind::NSUB, "(I (x1 I))[x1//\\y.(z1 z2)[z1/I I][z2/y]]"),
        (StepKind::NSUB, "(I (x1 I))[x1//\\y.(z1 y)[z1/I I]]"),
        (StepKind::NSUB, "(I ((\\y.z1 y) I))[z1/I I]"),
        (StepKind::NDB, "x2[x2/(\\y.z1 y) I][z1/I I]"),
    ];
    let i = |s: &str| s.replace('I', "(\\a.a)");
    let mut cur = t(&i("(\\x1.I (x1 I))(\\y.(I I) y)"));
    let mut supply = FreshSupply::new();
    for (kind, next) in steps {
        let next = t(&i(next));
        let hit = name_redexes(&cur).unwrap().into_iter().any(|(k, r)| {
            k == kind && crate::rewrite::fire(&cur, &r, &mut supply).is_ok_and(|f| f.term == next)
        });
        assert!(hit, "{cur} does not {kind}-step to {next}");
        cur = next;
    }
    let tr = name_normalize(&cur, 100, NamePolicy::PreferDB, &mut supply).unwrap();
    assert_eq!(*tr.final_term(), t("\\a.a"));
}

#[test]
fn name_policies_agree_on_length() {
    let u = t("(\\x.x x)((\\y.y)(\\z.z))");
    let mut supply = FreshSupply::new();
    let lens: Vec<usize> = [NamePolicy::PreferDB, NamePolicy::PreferSub, NamePolicy::Leftmost]
        .into_iter()
        .map(|p| {
            let tr = name_normalize(&u, 1000, p, &mut supply).unwrap();
            assert_eq!(tr.status, crate::trace::Status::NormalForm);
            tr.len()
        })
        .collect();
    assert!(lens.windows(2).all(|w| w[0] == w[1]), "{lens:?}");
}

#[test]
fn name_rejects_terms_outside_u() {
    let bad = t("(y z)[y//\\x.(y y)[y/\\a.a]]");
    assert!(!is_u(&bad));
    let mut supply = FreshSupply::new();
    assert!(matches!(name_step(&bad, NamePolicy::PreferDB, &mut supply), Err(Error::NotInU)));
    assert!(matches!(flneed_step(&bad, &mut supply), Err(Error::NotInU)));
}

#[test]
fn skeleton_and_mfes() {
    let p = t("(I y) I (\\z.z y w)".replace('I', "(\\a.a)").as_str());
    let th = theta(&["y"]);
    let mfes = mfe_list(&p, &th).unwrap();
    assert_eq!(mfes, vec![t("\\a.a"), t("\\a.a"), t("w")]);
    let s = skeleton(&p, &th).unwrap();
    assert_eq!(s.to_string(), "[] y [] (\\z.z y [])");
    assert_eq!(plug_skeleton(&s, &mfes).unwrap(), p);
    assert!(plug_skeleton(&s, &mfes[..2]).is_none());
    assert!(matches!(mfe_list(&t("x[x/y]"), &th), Err(Error::NotPure)));
}

#[test]
fn bigstep_splitting_example() {
    let mut supply = FreshSupply::new();
    let p = t("\\z.(y (u v)) z");
    let out = split_bigstep(&p, &theta(&["y"]), &mut supply).unwrap();
    assert_eq!(out, t("(\\z.(y x) z)[x/u v]"));
    let closed = split_bigstep(&t("u v"), &theta(&["y"]), &mut supply).unwrap();
    assert_eq!(closed, t("x[x/u v]"));
}

#[test]
fn smallstep_splitting_example() {
    let mut cur = t("\\y.x[x/\\z.(y (u v)) z]");
    let mut supply = FreshSupply::new();
    let mut kinds = Vec::new();
    while let Some((k, next)) = st_step(&cur, &mut supply).unwrap() {
        kinds.push(k);
        cur = next;
    }
    use StepKind::*;
    assert_eq!(kinds, vec![ST_DIST, ST_APP, ST_VAR, ST_ABS, ST_APP, ST_VAR]);
    assert_eq!(cur, t("\\y.(\\z.(y x2) z)[x2/u v]"));
    assert!(matches!(st_step(&t("\\y.(y y)[y/w]"), &mut supply), Err(Error::NotInT)));
}

#[test]
fn splittings_agree() {
    let mut supply = FreshSupply::new();
    for s in ["(\\a.a) y (\\z.z y w)", "y (u v) (w y)", "\\z.z", "u v", "\\z.(\\b.b z) (y w)"] {
        let p = t(s);
        let big = Term::lam("y", split_bigstep(&p, &theta(&["y"]), &mut supply).unwrap());
        let small = st_normalize(&Term::lam("y", Term::sub(Term::var("q"), "q", p.clone())), &mut supply).unwrap();
        assert!(split_equivalent(&big, &small), "{s}: {big} vs {small}");
    }
}

#[test]
fn fully_lazy_example() {
    let i = |s: &str| t(&s.replace('I', "(\\a.a)"));
    use StepKind::*;
    let expected = [
        (FL_DB, "(I (I x))[x/\\y.y I]"),
        (FL_DB, "x1[x1/I x][x/\\y.y I]"),
        (FL_DB, "x1[x1/x2[x2/x]][x/\\y.y I]"),
        (FL_SPL, "x1[x1/x2[x2/x]][x//\\y.y z1][z1/I]"),
        (FL_LS, "x1[x1/x2[x2/\\y.y z1]][x//\\y.y z1][z1/I]"),
        (FL_SPL, "x1[x1/x2[x2//\\y.y z2][z2/z1]][x//\\y.y z1][z1/I]"),
        (FL_LS, "x1[x1/(\\y.y z2)[x2//\\y.y z2][z2/z1]][x//\\y.y z1][z1/I]"),
        (FL_SPL, "x1[x1//\\y.y z3][z3/z2][x2//\\y.y z2][z2/z1][x//\\y.y z1][z1/I]"),
        (FL_LS, "(\\y.y z3)[x1//\\y.y z3][z3/z2][x2//\\y.y z2][z2/z1][x//\\y.y z1][z1/I]"),
    ];
    let mut supply = FreshSupply::new();
    let tr = flneed_normalize(&i("(\\x.I (I x))(\\y.y I)"), 100, &mut supply).unwrap();
    assert_eq!(tr.len(), expected.len());
    for (s, (k, term)) in tr.steps.iter().zip(expected) {
        assert_eq!(s.label, Label::Kind(k));
        assert_eq!(s.term, i(term), "after {k}");
    }
    assert_eq!(tr.db_steps(), 3);
}

#[test]
fn name_normal_forms_are_flneed_normal_forms() {
    let mut supply = FreshSupply::new();
    for s in ["x (\\a.a)", "\\x.(\\a.a) x", "x y ((\\a.a) b)"] {
        let u = t(s);
        assert!(name_step(&u, NamePolicy::Leftmost, &mut supply).unwrap().is_none());
        assert!(flneed_step(&u, &mut supply).unwrap().is_none());
    }
}

#[test]
fn one_shot_copies_only_values() {
    let mut supply = FreshSupply::new();
    let fired = flneed_step(&t("(w (\\a.a))[w//\\y.y]"), &mut supply).unwrap().unwrap();
    assert_eq!(fired.term, t("((\\y.y) (\\a.a))[w//\\y.y]"));
    let stuck = t("(w (\\a.a))[w//\\y.s1[s1/y]]");
    assert!(is_u(&stuck));
    assert!(flneed_step(&stuck, &mut supply).unwrap().is_none());
    assert!(!check_grammar(&stuck, Grammar::Ne));
}

#[test]
fn needed_variables() {
    assert_eq!(ndv(&t("x[y//\\a.a] (\\a.a)")), theta(&["x"]));
    assert_eq!(ndv(&t("(x y1)[x/z y2]")), theta(&["z"]));
    assert_eq!(ndv(&t("\\x.x")), theta(&[]));
    let (x, p) = locate_need(&t("x1[x1/x2[x2/x]]")).unwrap();
    assert_eq!(x, "x");
    assert_eq!(p, vec![Sel::CutContent, Sel::CutContent]);
    assert!(locate_need(&t("x1[x1/x2[x2/x]][x/\\y.y]")).is_none());
}

#[test]
fn weak_head_reduction() {
    assert_eq!(whr_step(&t("(\\x.x x) y z")).unwrap(), Some(t("y y z")));
    assert_eq!(whr_step(&t("y ((\\x.x) z)")).unwrap(), None);
    assert!(whr_step(&t("x[x/y]")).is_err());
}

#[test]
fn db_budgets_leave_other_steps_uncounted() {
    let u = t("(w y)[y/w w][w//\\w3.\\x1.b ((\\x.w3 w3) c)]");
    let mut supply = FreshSupply::new();
    let all = name_outcome(&u, 1000, NamePolicy::PreferDB, &mut supply).unwrap();
    assert_eq!(all.status, Status::NormalForm);
    let db = all.db_steps;
    let within = name_outcome(&u, Fuel::DbSteps(db), NamePolicy::PreferDB, &mut supply).unwrap();
    assert_eq!(within.status, Status::NormalForm);
    assert_eq!(within.steps, all.steps);
    let short = name_outcome(&u, Fuel::DbSteps(db - 1), NamePolicy::PreferDB, &mut supply).unwrap();
    assert_eq!(short.status, Status::FuelExhausted);
    assert_eq!(short.db_steps, db - 1);
    let steps = name_outcome(&u, all.steps - 1, NamePolicy::PreferDB, &mut supply).unwrap();
    assert_eq!(steps.status, Status::FuelExhausted);
    assert_eq!(steps.steps, all.steps - 1);
}
