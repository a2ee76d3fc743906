use super::*;
use crate::term::{parse, CutKind, FreshSupply, Sel};

fn t(s: &str) -> Term {
    parse(s).unwrap()
}

fn ty(s: &str) -> IType {
    s.parse().unwrap()
}

fn i_term() -> Term {
    t("\\x.x")
}

/// `⊢ I : [σ] → σ`
fn phi_i(s: IType) -> Derivation {
    Derivation::abs("x", Derivation::ax("x", s))
}

/// `x[x/yz]` typed at τ.
fn phi_u() -> Derivation {
    let tau = ty("t");
    let yz = Derivation::app(
        Derivation::ax("y", IType::arrow(MultiType::single(tau.clone()), tau.clone())),
        Derivation::many(t("z"), vec![Derivation::ax("z", tau.clone())]),
    );
    Derivation::cut(CutKind::Sub, "x", Derivation::ax("x", tau), Derivation::many(t("y z"), vec![yz]))
}

fn phi_1() -> Derivation {
    let a = IType::Answer;
    let a_to_a = IType::arrow(MultiType::single(a.clone()), a.clone());
    let x1_i = Derivation::app(
        Derivation::ax("x1", a_to_a.clone()),
        Derivation::many(i_term(), vec![Derivation::ans(i_term())]),
    );
    let body = Derivation::app(phi_i(a.clone()), Derivation::many(x1_i.subject.clone(), vec![x1_i]));
    let iy = Derivation::app(phi_i(a.clone()), Derivation::many(t("y"), vec![Derivation::ax("y", a)]));
    let lam = Derivation::abs("y", iy);
    Derivation::cut(CutKind::Sub, "x1", body, Derivation::many(lam.subject.clone(), vec![lam]))
}

#[test]
fn the_sample_derivations_check() {
    for d in [phi_u(), phi_1()] {
        check_derivation(&d).unwrap();
    }
    assert_eq!(phi_1().subject, t("((\\x.x) (x1 (\\x.x)))[x1/\\y.(\\x.x) y]"));
    assert!(phi_1().env.is_empty());
}

#[test]
fn check_rejects_malformed_nodes() {
    let mut ax = Derivation::ax("x", ty("s"));
    ax.env = Env::single("x", "[s, t]".parse().unwrap());
    assert!(check_derivation(&ax).is_err());
    let mut ans = Derivation::ans(i_term());
    ans.env = Env::single("z", "[s]".parse().unwrap());
    assert!(check_derivation(&ans).is_err());
    let mut cut = phi_u();
    cut.premises[1] = Derivation::many(t("y z"), Vec::new());
    assert!(check_derivation(&cut).is_err());
}

#[test]
fn sizes() {
    assert_eq!(sz(&Derivation::ax("x", ty("s"))), 0);
    assert_eq!(sz(&phi_u()), 1);
    assert_eq!(sz(&phi_i(IType::Answer)), 1);
}

#[test]
fn measure_of_a_substitution_and_its_app_step() {
    assert_eq!(measure_d(&phi_u()), Triple(1, 2, 3));
    let tau = ty("t");
    let arrow = IType::arrow(MultiType::single(tau.clone()), tau.clone());
    let x1x2 = Derivation::app(
        Derivation::ax("x1", arrow.clone()),
        Derivation::many(t("x2"), vec![Derivation::ax("x2", tau.clone())]),
    );
    let inner = Derivation::cut(CutKind::Sub, "x1", x1x2, Derivation::many(t("y"), vec![Derivation::ax("y", arrow)]));
    let after = Derivation::cut(CutKind::Sub, "x2", inner, Derivation::many(t("z"), vec![Derivation::ax("z", tau)]));
    check_derivation(&after).unwrap();
    assert_eq!(measure_d(&after), Triple(1, 1, 4));
}

#[test]
fn measures_along_db_and_spl() {
    let p1 = phi_1();
    assert_eq!(measure_d(&p1), Triple(7, 10, 4));

    let mut supply = FreshSupply::new();
    let steps = crate::strategies::flneed_normalize(&p1.subject, 2, &mut supply).unwrap();
    let t2 = steps.before(1).clone();
    let t3 = steps.final_term().clone();
    assert_eq!(t2, t("x2[x2/x1 (\\x.x)][x1/\\y.(\\x.x) y]"));
    assert_eq!(t3, t("x2[x2/x1 (\\x.x)][x1//\\y.z1 y][z1/\\x.x]"));

    let a = IType::Answer;
    let a_to_a = IType::arrow(MultiType::single(a.clone()), a.clone());
    let x1_i = Derivation::app(
        Derivation::ax("x1", a_to_a.clone()),
        Derivation::many(i_term(), vec![Derivation::ans(i_term())]),
    );
    let inner = Derivation::cut(
        CutKind::Sub,
        "x2",
        Derivation::ax("x2", a.clone()),
        Derivation::many(x1_i.subject.clone(), vec![x1_i]),
    );
    let lam = p1.premises[1].clone();
    let p2 = Derivation::cut(CutKind::Sub, "x1", inner.clone(), lam);
    check_derivation(&p2).unwrap();
    assert_eq!(p2.subject, t2);
    assert_eq!(measure_d(&p2), Triple(5, 13, 4));

    let zy = Derivation::app(
        Derivation::ax("z1", a_to_a.clone()),
        Derivation::many(t("y"), vec![Derivation::ax("y", a.clone())]),
    );
    let lam3 = Derivation::abs("y", zy);
    let dist = Derivation::cut(CutKind::Dist, "x1", inner, Derivation::many(lam3.subject.clone(), vec![lam3]));
    let p3 = Derivation::cut(CutKind::Sub, "z1", dist, Derivation::many(i_term(), vec![phi_i(a)]));
    check_derivation(&p3).unwrap();
    assert_eq!(p3.subject, t3);
    assert_eq!(measure_d(&p3), Triple(5, 11, 5));
}

#[test]
fn weight_shift_is_linear_in_size() {
    for d in [phi_u(), phi_1()] {
        for (m, n) in [(2, 1), (5, 0), (9, 3)] {
            let s = sz(&d);
            assert_eq!(measure_m(&d, m), measure_m(&d, n) + Triple(0, (m - n) * s, 0));
        }
    }
}

#[test]
fn splitting_many() {
    let d = Derivation::many(t("z"), vec![Derivation::ax("z", ty("s")), Derivation::ax("z", ty("t"))]);
    let parts = split_many(&d, &["[s]".parse().unwrap(), "[t]".parse().unwrap()]).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0].premises.len(), 1);
    let whole = split_many(&d, &[d.multi()]).unwrap();
    assert_eq!(whole, vec![d.clone()]);
    assert!(matches!(split_many(&d, &["[s]".parse().unwrap()]), Err(Error::PartitionMismatch)));
}

#[test]
fn anti_and_partial_substitution_round_trip() {
    let d = phi_u();
    let path = [Sel::CutContent, Sel::AppArg];
    let (ctx, u) = anti_subst_typing(&d, &path, "w").unwrap();
    check_derivation(&ctx).unwrap();
    assert_eq!(ctx.subject, t("x[x/y w]"));
    assert_eq!(u.multi(), "[t]".parse().unwrap());
    let back = partial_subst_typing(&ctx, &u, &path).unwrap();
    check_derivation(&back).unwrap();
    assert_eq!(back, d);
    assert_eq!(measure_d(&back), measure_d(&d));

    let (hole, whole) = anti_subst_typing(&d, &[], "w").unwrap();
    assert_eq!(hole, Derivation::ax("w", ty("t")));
    assert_eq!(whole.premises, vec![d]);
}

#[test]
fn typing_normal_forms() {
    let d = type_normal_form(&t("(x y1)[x/z y2]"), &ty("t")).unwrap();
    check_derivation(&d).unwrap();
    assert_eq!(d.env, Env::single("z", "[[]->[]->t]".parse().unwrap()));
    let ans = type_normal_form(&t("\\x.y z"), &ty("t")).unwrap();
    assert_eq!(ans.rule, Rule::ANS);
    assert_eq!(measure_d(&ans), Triple(1, 1, 0));
    assert_eq!(type_normal_form(&t("x"), &ty("t")).unwrap(), Derivation::ax("x", ty("t")));
    assert!(matches!(type_normal_form(&t("(\\x.x) y"), &ty("t")), Err(Error::NotANormalForm)));
}

#[test]
fn inference() {
    let mut supply = FreshSupply::new();
    let d = infer(&phi_1().subject, 1000, &mut supply).unwrap().unwrap();
    check_derivation(&d).unwrap();
    assert_eq!(*d.single(), IType::Answer);
    assert!(d.env.is_empty());
    assert!(measure_d(&d).0 >= 1);

    let omega = t("(\\x.x x)(\\x.x x)");
    assert!(infer(&omega, 200, &mut supply).unwrap().is_none());
    let free = infer(&t("(\\x.x x) y"), 100, &mut supply).unwrap().unwrap();
    check_derivation(&free).unwrap();
    assert!(matches!(infer(&t("(y z)[y//\\x.(y y)[y/\\a.a]]"), 10, &mut supply), Err(Error::NotInU)));
    let stuck = t("(w v)[w/y][v/y][y//\\x.z[z/\\b.b]]");
    let d = infer(&stuck, 100, &mut supply).unwrap().unwrap();
    check_derivation(&d).unwrap();
    assert!(crate::term::alpha_eq(&d.subject, &stuck));
}

#[test]
fn expansion_along_a_full_trace() {
    let mut supply = FreshSupply::new();
    for s in [
        "(\\x.(\\a.a) ((\\a.a) x))(\\y.y (\\a.a))",
        "(\\x.x x)(\\y.(w w) y)",
        "(\\f.f (f z))(\\y.(\\b.b) y)",
        "x[x/y (\\a.a)] (\\z.z)",
    ] {
        let (trace, ds) = infer_along(&t(s), 1000, &mut supply).unwrap().unwrap();
        assert_eq!(ds.len(), trace.len() + 1);
        for (i, d) in ds.iter().enumerate() {
            check_derivation(d).unwrap();
            let term = if i == 0 { &trace.initial } else { &trace.steps[i - 1].term };
            assert!(crate::term::alpha_eq(&d.subject, term));
            if i > 0 {
                assert!(measure_d(d) < measure_d(&ds[i - 1]), "{s} step {i}");
            }
        }
        assert!(measure_d(&ds[0]).0 >= trace.db_steps());
    }
}

#[test]
fn text_form_round_trips() {
    let d = phi_1();
    let back = Derivation::from_text(&d.to_text()).unwrap();
    assert_eq!(back, d);
    assert!(d.to_text().starts_with("CUT  |- "));
    assert!(Derivation::from_text("FOO x:[a] |- x : a").is_err());
}

#[test]
fn permuting_a_void_cut_can_lower_the_measure() {
    let mut supply = FreshSupply::new();
    let t0 = t("x3[w/(x3 x3)[w2/x3 x3]][x3//\\y.b]");
    let t1 = t("x3[w/x3 x3][w2/x3 x3][x3//\\y.b]");
    let d0 = infer(&t0, 100, &mut supply).unwrap().unwrap();
    let d1 = infer(&t1, 100, &mut supply).unwrap().unwrap();
    assert_eq!(measure_d(&d0), Triple(1, 3, 1));
    assert_eq!(measure_d(&d1), Triple(1, 2, 1));
    assert_eq!(crate::measures::level(&t("x3[w/(x3 x3)[w2/x3 x3]]"), "x3"), 2);
    assert_eq!(crate::measures::level(&t("x3[w/x3 x3][w2/x3 x3]"), "x3"), 1);
}
