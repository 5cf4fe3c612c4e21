//! Randomized invariants over generated terms. These complement the
//! enumerated suites: proptest shrinks any counterexample to a small
//! witness, which makes parser/substitution/engine disagreements easy to
//! read off the failure message.

use proptest::prelude::*;

use lexkit::rewrite::{bfs_path, is_nf_grammar, ReachResult};
use lexkit::term::{app, canonical_key_bounded, e_class, esub, lam, subst, var};
use lexkit::{
    alpha_eq, parse_term, print_term, reducts, Fuels, GenTerm, KeyMode, Oracle, RuleId, RuleSet,
    SnVerdict,
};

fn binder() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "z", "w"]).prop_map(str::to_string)
}

fn pure_terms() -> impl Strategy<Value = GenTerm> {
    let leaf = prop::sample::select(vec!["x", "y", "z"]).prop_map(|n| var(n));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| app(l, r)),
            (binder(), inner).prop_map(|(n, b)| lam(&n, b)),
        ]
    })
}

fn terms() -> impl Strategy<Value = GenTerm> {
    let leaf = prop::sample::select(vec!["x", "y", "z"]).prop_map(|n| var(n));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| app(l, r)),
            (binder(), inner.clone()).prop_map(|(n, b)| lam(&n, b)),
            (inner.clone(), binder(), inner).prop_map(|(b, n, a)| esub(b, &n, a)),
        ]
    })
}

fn small_fuels() -> Fuels {
    Fuels {
        node_fuel: 2000,
        class_bound: 1024,
        step_fuel: 2000,
        join_budget: 64,
    }
}

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(t in terms()) {
        let round = parse_term(&print_term(&t)).unwrap();
        prop_assert_eq!(round, t);
    }

    #[test]
    fn substitution_computes_exactly_the_expected_free_variables(
        t in terms(),
        u in terms(),
        x in binder(),
    ) {
        let r = subst(&t, &x, &u).unwrap();
        let mut want = t.free_vars();
        if want.remove(&x) {
            want.extend(u.free_vars());
        } else {
            prop_assert!(alpha_eq(&r, &t));
        }
        // equality, not inclusion: a capturing substitution would lose a
        // free variable of u, a sloppy one would leak the bound name
        prop_assert_eq!(r.free_vars(), want);
    }

    #[test]
    fn swap_class_members_share_the_key_and_nothing_else_does(
        t in terms(),
        u in terms(),
    ) {
        let kt = canonical_key_bounded(&t, KeyMode::E, 1024).unwrap();
        for m in e_class(&t, KeyMode::E, 1024).unwrap() {
            prop_assert_eq!(&canonical_key_bounded(&m, KeyMode::E, 1024).unwrap(), &kt);
        }
        let ku = canonical_key_bounded(&u, KeyMode::E, 1024).unwrap();
        let equivalent = e_class(&t, KeyMode::E, 1024)
            .unwrap()
            .iter()
            .any(|m| alpha_eq(m, &u));
        prop_assert_eq!(kt == ku, equivalent);
    }

    #[test]
    fn the_normal_form_grammar_names_exactly_the_stuck_terms(t in terms()) {
        let steps = reducts(&t, &RuleSet::lambda_ex(), &small_fuels()).unwrap();
        prop_assert_eq!(is_nf_grammar(&t), steps.is_empty());
    }

    #[test]
    fn plain_substitution_steps_stay_valid_with_composition(t in terms()) {
        let fuels = small_fuels();
        let wide: std::collections::BTreeSet<_> = reducts(&t, &RuleSet::lambda_ex(), &fuels)
            .unwrap()
            .iter()
            .map(|s| canonical_key_bounded(&s.after, KeyMode::E, 1024).unwrap())
            .collect();
        for s in reducts(&t, &RuleSet::lambda_x(), &fuels).unwrap() {
            let k = canonical_key_bounded(&s.after, KeyMode::E, 1024).unwrap();
            prop_assert!(wide.contains(&k), "missing {}", print_term(&s.after));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_step_lowers_the_longest_path(t in pure_terms()) {
        let fuels = small_fuels();
        let mut oracle = Oracle::new();
        let rs = RuleSet::lambda_ex();
        if let SnVerdict::ProvedSN { eta, .. } = oracle.sn_verdict(&t, &rs, &fuels).unwrap() {
            for s in reducts(&t, &rs, &fuels).unwrap() {
                match oracle.sn_verdict(&s.after, &rs, &fuels).unwrap() {
                    SnVerdict::ProvedSN { eta: after, .. } => prop_assert!(after < eta),
                    other => prop_assert!(false, "reduct verdict {:?}", other),
                }
            }
        }
    }

    #[test]
    fn director_composition_is_a_shortcut_for_real_steps(t in terms()) {
        let fuels = small_fuels();
        let rs = RuleSet::lambda_ex();
        for s in reducts(&t, &RuleSet::lambda_x_director(), &fuels).unwrap() {
            if s.rule != RuleId::DsComp {
                continue;
            }
            let target = canonical_key_bounded(&s.after, KeyMode::E, 1024).unwrap();
            let found = bfs_path(&s.before, &target, &rs, &fuels, 512, 1).unwrap();
            prop_assert!(
                matches!(found, ReachResult::Found(_)),
                "{} -> {}",
                print_term(&s.before),
                print_term(&s.after)
            );
        }
    }
}

#[test]
fn director_composition_fires_where_designed() {
    // non-vacuity for the shortcut property: the double substitution with
    // the variable only in the inner body steps by the fused rule
    let t = parse_term("x[y/x1 x2][x2/v]").unwrap();
    let steps = reducts(&t, &RuleSet::lambda_x_director(), &small_fuels()).unwrap();
    assert!(steps.iter().any(|s| s.rule == RuleId::DsComp));
}
