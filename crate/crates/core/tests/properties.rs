//! Property tests over generated terms.

use std::collections::BTreeSet;

use proptest::prelude::*;

use noderep::measures::level;
use noderep::oracle::{gen_term, GenConfig, GenGrammar};
use noderep::rewrite::{fire, pi_redexes, r_redexes, sub_normalize, unfold, RuleTag};
use noderep::strategies::{
    flneed_step, name_redexes, name_step, ndv, split_bigstep, split_equivalent, st_normalize, st_step, NamePolicy, StepKind,
};
use noderep::term::{alpha_eq, check_grammar, free_vars, is_t, is_u, print, rename_free, Grammar, Name, Sel};
use noderep::trace::Label;
use noderep::types::{check_derivation, infer_along, measure_d, measure_m, sz};
use noderep::{parse, FreshSupply, Term};

fn term(seed: u64, size: usize, grammar: GenGrammar) -> Term {
    gen_term(&GenConfig::new(seed, size, grammar))
}

/// Name contexts, read off a path: dB under application heads and cut
/// bodies, sub under application heads and distributed abstraction bodies.
fn in_name_context(t: &Term, path: &[Sel], db: bool) -> bool {
    if db {
        return path.iter().all(|s| matches!(s, Sel::AppFun | Sel::CutBody));
    }
    let mut cur = t;
    let mut i = 0;
    while i < path.len() {
        match (cur, path[i], path.get(i + 1)) {
            (Term::App(f, _), Sel::AppFun, _) => cur = f,
            (Term::Dist(_, _, c), Sel::CutContent, Some(Sel::AbsBody)) => {
                let Term::Abs(_, b) = &**c else { return false };
                cur = b;
                i += 1;
            }
            _ => return false,
        }
        i += 1;
    }
    true
}

fn cut_names(t: &Term) -> BTreeSet<Name> {
    let mut out = free_vars(t);
    for p in t.paths() {
        if let Some(Term::Sub(_, x, _) | Term::Dist(_, x, _)) = t.at(&p) {
            out.insert(x.clone());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>()) {
        let t = term(seed, 20, GenGrammar::Full);
        let back = parse(&print(&t)).unwrap();
        prop_assert!(back.syn_eq(&t), "{t}");
    }

    #[test]
    fn full_composition_agrees_with_unfolding(seed in any::<u64>()) {
        let t = term(seed, 16, GenGrammar::Full);
        let mut supply = FreshSupply::new();
        let nf = sub_normalize(&t, &mut supply).unwrap();
        prop_assert!(alpha_eq(&nf, &unfold(&t)), "{t}");
    }

    #[test]
    fn permutations_preserve_the_unfolding(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let t = term(seed, 16, GenGrammar::Full);
        let rs = pi_redexes(&t);
        prop_assume!(!rs.is_empty());
        let mut supply = FreshSupply::new();
        let f = fire(&t, pick.get(&rs), &mut supply).unwrap();
        prop_assert!(alpha_eq(&unfold(&f.term), &unfold(&t)));
    }

    #[test]
    fn reduction_preserves_free_variables_up_to_erasure(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let t = term(seed, 16, GenGrammar::Full);
        let mut rs = pi_redexes(&t);
        rs.extend(r_redexes(&t, false));
        prop_assume!(!rs.is_empty());
        let mut supply = FreshSupply::new();
        let f = fire(&t, pick.get(&rs), &mut supply).unwrap();
        prop_assert!(free_vars(&f.term).is_subset(&free_vars(&t)), "{t}");
    }

    #[test]
    fn name_redexes_are_the_redexes_in_name_contexts(seed in any::<u64>()) {
        let t = term(seed, 18, GenGrammar::U);
        let got: Vec<_> = name_redexes(&t).unwrap().into_iter().map(|(_, r)| (r.path, r.rule)).collect();
        let want: Vec<_> = r_redexes(&t, false)
            .into_iter()
            .filter(|r| in_name_context(&t, &r.path, r.rule == RuleTag::DB))
            .map(|r| (r.path, r.rule))
            .collect();
        prop_assert_eq!(got, want, "{}", t);
    }

    #[test]
    fn name_stays_in_u(seed in any::<u64>()) {
        let mut t = term(seed, 16, GenGrammar::U);
        let mut supply = FreshSupply::new();
        for _ in 0..30 {
            let Some(s) = name_step(&t, NamePolicy::Leftmost, &mut supply).unwrap() else { break };
            prop_assert!(is_u(&s.term), "{t} -> {}", s.term);
            t = s.term;
        }
    }

    #[test]
    fn flneed_stays_in_u_and_one_shot_lowers_levels(seed in any::<u64>()) {
        let mut t = term(seed, 16, GenGrammar::Need);
        let mut supply = FreshSupply::new();
        for _ in 0..30 {
            let Some(s) = flneed_step(&t, &mut supply).unwrap() else {
                prop_assert!(check_grammar(&t, Grammar::Ne), "{t}");
                break;
            };
            prop_assert!(is_u(&s.term), "{t} -> {}", s.term);
            if s.label == Label::Kind(StepKind::FL_LS) {
                for z in cut_names(&t).union(&cut_names(&s.term)) {
                    prop_assert!(level(&s.term, z) <= level(&t, z), "{z} in {t}");
                }
            }
            t = s.term;
        }
    }

    #[test]
    fn flneed_is_deterministic(seed in any::<u64>()) {
        let t = term(seed, 16, GenGrammar::Need);
        let mut a = FreshSupply::new();
        let mut b = FreshSupply::new();
        let sa = flneed_step(&t, &mut a).unwrap().map(|s| s.term);
        let sb = flneed_step(&t, &mut b).unwrap().map(|s| s.term);
        prop_assert_eq!(sa.map(|x| print(&x)), sb.map(|x| print(&x)));
    }

    #[test]
    fn name_normal_forms_are_flneed_normal_forms(seed in any::<u64>()) {
        let t = term(seed, 16, GenGrammar::Need);
        let mut supply = FreshSupply::new();
        if name_step(&t, NamePolicy::Leftmost, &mut supply).unwrap().is_none() {
            prop_assert!(flneed_step(&t, &mut supply).unwrap().is_none(), "{t}");
        }
    }

    #[test]
    fn needed_variables_are_free(seed in any::<u64>()) {
        let t = term(seed, 16, GenGrammar::U);
        prop_assert!(ndv(&t).is_subset(&free_vars(&t)));
    }

    #[test]
    fn small_steps_stay_in_t_and_match_big_steps(seed in any::<u64>()) {
        let p = term(seed, 14, GenGrammar::PureLambda);
        let mut fresh = FreshSupply::with_avoid(p.names());
        let (y, z) = (fresh.fresh("y"), fresh.fresh("q"));
        let open = rename_free(&p, "a", &y);
        let start = Term::lam(y.clone(), Term::sub(Term::var(z.clone()), z, open.clone()));
        prop_assert!(is_t(&start));
        let mut supply = FreshSupply::new();
        let mut cur = start.clone();
        while let Some((_, next)) = st_step(&cur, &mut supply).unwrap() {
            prop_assert!(is_t(&next), "{cur} -> {next}");
            cur = next;
        }
        prop_assert!(alpha_eq(&st_normalize(&start, &mut supply).unwrap(), &cur));
        let big = Term::lam(y.clone(), split_bigstep(&open, &BTreeSet::from([y]), &mut supply).unwrap());
        prop_assert!(split_equivalent(&big, &cur), "{big} vs {cur}");
    }

    #[test]
    fn inferred_derivations_are_valid_and_relevant(seed in any::<u64>()) {
        let t = term(seed, 12, GenGrammar::Need);
        let mut supply = FreshSupply::new();
        if let Some((_, ds)) = infer_along(&t, 500, &mut supply).unwrap() {
            for d in &ds {
                prop_assert!(check_derivation(d).is_ok());
                let fv = free_vars(&d.subject);
                prop_assert!(d.env.dom().all(|x| fv.contains(x)), "{}", d.subject);
            }
            let d = &ds[0];
            let s = sz(d);
            prop_assert_eq!(measure_m(d, 5), measure_m(d, 2) + noderep::types::Triple(0, 3 * s, 0));
            prop_assert_eq!(measure_m(d, 1), measure_d(d));
        }
    }
}
