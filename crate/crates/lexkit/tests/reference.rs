//! Replays the frozen fixture file against the engine. The fixtures were
//! produced by the standalone reference implementation in tools/oracle.py
//! at node/step fuel 300, so every value here was computed twice by
//! independent code paths. Term-valued expectations are compared modulo
//! renaming; counts and rule names must match exactly.

use std::collections::BTreeSet;

use lexkit::labelled::{ar, dep, unlabel, xc};
use lexkit::strategy::{isn_check, perpetual_step, StrategyOutcome};
use lexkit::term::{alpha_key, e_class};
use lexkit::types::{infer_simple, revb, subtype, subtype_search, Environment};
use lexkit::{
    alpha_eq, normalize_leftmost, parse_term, parse_type, print_type, reducts, superdev,
    CanonicalKey, EngineError, Fuels, GenTerm, KeyMode, Oracle, RuleSet, SnVerdict,
};

fn fixture() -> serde_json::Value {
    serde_json::from_str(include_str!("fixtures/reference_cases.json")).unwrap()
}

fn gen_fuels(v: &serde_json::Value) -> Fuels {
    Fuels {
        node_fuel: v["node_fuel"].as_u64().unwrap() as usize,
        step_fuel: v["step_fuel"].as_u64().unwrap() as usize,
        class_bound: 1024,
        join_budget: 64,
    }
}

fn p(s: &str) -> GenTerm {
    parse_term(s).unwrap_or_else(|e| panic!("fixture term '{s}': {e}"))
}

fn sn_word(v: &SnVerdict) -> &'static str {
    match v {
        SnVerdict::ProvedSN { .. } => "sn",
        SnVerdict::ProvedNotSN { .. } => "not-sn",
        SnVerdict::Unknown => "unknown",
    }
}

fn key_set(arr: &serde_json::Value) -> BTreeSet<CanonicalKey> {
    arr.as_array()
        .unwrap()
        .iter()
        .map(|s| alpha_key(&p(s.as_str().unwrap())))
        .collect()
}

fn reduct_keys(t: &GenTerm, rs: &RuleSet, fuels: &Fuels) -> BTreeSet<CanonicalKey> {
    reducts(t, rs, fuels)
        .unwrap()
        .iter()
        .map(|s| alpha_key(&s.after))
        .collect()
}

fn bound_names(t: &GenTerm, out: &mut BTreeSet<String>) {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => {}
        GenTerm::Lam(x, b) => {
            out.insert(x.clone());
            bound_names(b, out);
        }
        GenTerm::App(l, r) => {
            bound_names(l, out);
            bound_names(r, out);
        }
        GenTerm::ESub(b, x, a) | GenTerm::LSub(b, x, a) => {
            out.insert(x.clone());
            bound_names(b, out);
            bound_names(a, out);
        }
    }
}

fn str_list(v: &serde_json::Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn term_cases_replay() {
    let fx = fixture();
    let fuels = gen_fuels(&fx);
    let lex = RuleSet::lambda_ex();
    let mut oracle = Oracle::new();
    for case in fx["terms"].as_array().unwrap() {
        let name = case["term"].as_str().unwrap();
        let t = p(name);

        assert_eq!(t.size() as u64, case["size"].as_u64().unwrap(), "{name}: size");
        let fv: BTreeSet<String> = t.free_vars().into_iter().collect();
        let want_fv: BTreeSet<String> = str_list(&case["fv"]).into_iter().collect();
        assert_eq!(fv, want_fv, "{name}: free variables");
        let mut bv = BTreeSet::new();
        bound_names(&t, &mut bv);
        let want_bv: BTreeSet<String> = str_list(&case["bv"]).into_iter().collect();
        assert_eq!(bv, want_bv, "{name}: bound variables");

        let class = e_class(&t, KeyMode::E, 1024).unwrap();
        assert_eq!(class.len() as u64, case["eclass"].as_u64().unwrap(), "{name}: eclass");

        assert_eq!(
            reduct_keys(&t, &lex, &fuels),
            key_set(&case["reducts_lex"]),
            "{name}: reducts"
        );

        let sv = oracle.sn_verdict(&t, &lex, &fuels).unwrap();
        assert_eq!(sn_word(&sv), case["sn_lex"].as_str().unwrap(), "{name}: sn verdict");
        if let SnVerdict::ProvedSN { eta, max_size } = &sv {
            assert_eq!(*eta, case["eta_lex"].as_u64().unwrap(), "{name}: eta");
            assert_eq!(*max_size, case["max_size_lex"].as_u64().unwrap(), "{name}: max size");
        }

        match normalize_leftmost(&t, &lex, &fuels) {
            Ok((nf, trace)) => {
                if let Some(want) = case["nf_lex"].as_str() {
                    assert!(alpha_eq(&nf, &p(want)), "{name}: normal form {want}");
                    let rules: Vec<String> =
                        trace.iter().map(|s| s.rule.name().to_string()).collect();
                    assert_eq!(rules, str_list(&case["trace_rules"]), "{name}: trace rules");
                }
            }
            Err(EngineError::FuelExhausted { .. }) => {
                assert!(case.get("nf_lex").is_none(), "{name}: expected a normal form");
            }
            Err(e) => panic!("{name}: {e}"),
        }

        if let Some(want) = case.get("sn_beta") {
            let sb = oracle.sn_verdict(&t, &RuleSet::beta(), &fuels).unwrap();
            assert_eq!(sn_word(&sb), want.as_str().unwrap(), "{name}: beta verdict");
            if let SnVerdict::ProvedSN { eta, .. } = &sb {
                assert_eq!(*eta, case["eta_beta"].as_u64().unwrap(), "{name}: beta eta");
            }
        }

        if let Some(want) = case.get("perpetual") {
            let full = Fuels::default();
            let got = match perpetual_step(&t, &mut oracle, &full).unwrap() {
                StrategyOutcome::NormalForm => "nf".to_string(),
                StrategyOutcome::Step(s) => s.rule.name().to_string(),
                StrategyOutcome::Unknown(_) => "unknown".to_string(),
            };
            assert_eq!(got, want.as_str().unwrap(), "{name}: perpetual clause");
        }

        if let Some(want) = case.get("isn") {
            if !want.is_null() {
                let got = isn_check(&t, 2000).unwrap().is_some();
                assert_eq!(got, want.as_bool().unwrap(), "{name}: inductive derivation");
            }
        }

        if let Some(want) = case.get("revb") {
            let got = revb(&t).unwrap();
            assert!(alpha_eq(&got, &p(want.as_str().unwrap())), "{name}: redex image");
        }

        if let Some(want) = case.get("superdev") {
            let got = superdev(&t).unwrap();
            assert!(alpha_eq(&got, &p(want.as_str().unwrap())), "{name}: development");
        }

        if let Some(want) = case.get("infer_simple") {
            let got = infer_simple(&Environment::new(), &t)
                .unwrap()
                .map(|ty| print_type(&ty));
            assert_eq!(
                got.as_deref(),
                want.as_str(),
                "{name}: inferred simple type"
            );
        }
    }
}

#[test]
fn labelled_cases_replay() {
    let fx = fixture();
    let full = Fuels::default();
    let mut oracle = Oracle::new();
    for case in fx["labelled"].as_array().unwrap() {
        let name = case["term"].as_str().unwrap();
        let t = p(name);

        for (v, want) in case["ar"].as_object().unwrap() {
            assert_eq!(ar(&t, v), want.as_u64().unwrap(), "{name}: ar_{v}");
        }
        assert_eq!(dep(&t), case["dep"].as_u64().unwrap(), "{name}: dep");
        assert_eq!(
            oracle.k_measure(&t, &full).unwrap(),
            case["k"].as_u64().unwrap(),
            "{name}: k"
        );

        let got_xc = xc(&t).unwrap();
        assert!(alpha_eq(&got_xc, &p(case["xc"].as_str().unwrap())), "{name}: xc");
        let got_unl = unlabel(&t);
        assert!(
            alpha_eq(&got_unl, &p(case["unlabel"].as_str().unwrap())),
            "{name}: unlabel"
        );

        assert_eq!(
            reduct_keys(&t, &RuleSet::uex(), &full),
            key_set(&case["reducts_uex"]),
            "{name}: labelled-rule reducts"
        );
        assert_eq!(
            reduct_keys(&t, &RuleSet::lambda_uex(), &full),
            key_set(&case["reducts_luex"]),
            "{name}: full labelled reducts"
        );
    }
}

#[test]
fn subtype_cases_replay() {
    let fx = fixture();
    for case in fx["subtype"].as_array().unwrap() {
        let a = parse_type(case["a"].as_str().unwrap()).unwrap();
        let b = parse_type(case["b"].as_str().unwrap()).unwrap();
        let want = case["result"].as_bool().unwrap();
        assert_eq!(subtype(&a, &b), want, "{} <= {}", case["a"], case["b"]);
        assert_eq!(
            subtype_search(&a, &b, 6),
            want,
            "{} <= {} by search",
            case["a"],
            case["b"]
        );
    }
}
