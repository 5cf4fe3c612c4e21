//! Browser bindings. Each export takes source text and hands back a JSON
//! string — the page side is then nothing but `JSON.parse` and rendering,
//! and errors travel in-band as `{"error": …}` instead of thrown values.
//!
//! Budgets are deliberately smaller than the library defaults: these run
//! on the browser's main thread, so a runaway exploration should give up
//! after a moment rather than freeze the tab.

use wasm_bindgen::prelude::*;

use lexkit::labelled::measures;
use lexkit::strategy::{perpetual_trace, TraceStatus};
use lexkit::{
    normalize_leftmost, parse_term, print_term, Fuels, Oracle, RuleSet, RuleSetName, SnVerdict,
    Step,
};
use serde_json::json;

fn fuels() -> Fuels {
    Fuels {
        node_fuel: 5000,
        class_bound: 512,
        step_fuel: 2000,
        join_budget: 64,
    }
}

fn err(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn ruleset(name: &str) -> Option<RuleSet> {
    let n = match name {
        "beta" => RuleSetName::Beta,
        "x" => RuleSetName::LambdaX,
        "lex" => RuleSetName::LambdaEx,
        "xdir" => RuleSetName::LambdaXDirector,
        "uex" => RuleSetName::Uex,
        "luex" => RuleSetName::LambdaUex,
        _ => return None,
    };
    Some(RuleSet::get(n))
}

fn trace_json(steps: &[Step]) -> serde_json::Value {
    json!(steps
        .iter()
        .map(|s| json!({ "rule": s.rule.name(), "to": print_term(&s.after) }))
        .collect::<Vec<_>>())
}

/// Reduce to normal form, returning the full trace. `policy` is
/// "perpetual" or "leftmost"; the perpetual policy works on the full
/// calculus only, the leftmost one accepts any ruleset name.
#[wasm_bindgen]
pub fn reduce_trace(term: &str, policy: &str, ruleset_name: &str) -> String {
    let t = match parse_term(term) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let fuels = fuels();
    match policy {
        "perpetual" => {
            let mut oracle = Oracle::new();
            match perpetual_trace(&t, &mut oracle, &fuels) {
                Ok(tr) => {
                    let steps: Vec<Step> = tr
                        .moves
                        .iter()
                        .flat_map(|m| m.expansion.iter().cloned())
                        .collect();
                    let status = match tr.status {
                        TraceStatus::NormalForm => "normal-form",
                        TraceStatus::Undecided => "undecided",
                        TraceStatus::FuelExhausted => "fuel-exhausted",
                    };
                    json!({
                        "status": status,
                        "result": print_term(&tr.final_term),
                        "trace": trace_json(&steps),
                    })
                    .to_string()
                }
                Err(e) => err(e),
            }
        }
        "leftmost" => {
            let rs = match ruleset(ruleset_name) {
                Some(rs) => rs,
                None => return err(format!("unknown ruleset {ruleset_name:?}")),
            };
            match normalize_leftmost(&t, &rs, &fuels) {
                Ok((nf, steps)) => json!({
                    "status": "normal-form",
                    "result": print_term(&nf),
                    "trace": trace_json(&steps),
                })
                .to_string(),
                Err(e) => err(e),
            }
        }
        other => err(format!("unknown policy {other:?}")),
    }
}

/// Decide strong normalization under the named ruleset.
#[wasm_bindgen]
pub fn sn_verdict(term: &str, ruleset_name: &str) -> String {
    let t = match parse_term(term) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let rs = match ruleset(ruleset_name) {
        Some(rs) => rs,
        None => return err(format!("unknown ruleset {ruleset_name:?}")),
    };
    match Oracle::new().sn_verdict(&t, &rs, &fuels()) {
        Ok(SnVerdict::ProvedSN { eta, max_size }) => {
            json!({ "verdict": "sn", "eta": eta, "max_size": max_size }).to_string()
        }
        Ok(SnVerdict::ProvedNotSN { witness }) => json!({
            "verdict": "not-sn",
            "witness": witness.iter().map(print_term).collect::<Vec<_>>(),
        })
        .to_string(),
        Ok(SnVerdict::Unknown) => json!({ "verdict": "unknown" }).to_string(),
        Err(e) => err(e),
    }
}

/// The decreasing measures of a labelled term: `ar` for every free
/// variable, `dep`, `k`, and `phi` of each label body.
#[wasm_bindgen]
pub fn label_measures(term: &str) -> String {
    let t = match parse_term(term) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let vars: Vec<String> = t.free_vars().into_iter().collect();
    let mut oracle = Oracle::new();
    match measures(&t, &vars, &mut oracle, &fuels()) {
        Ok(m) => m.to_json().to_string(),
        Err(e) => err(e),
    }
}
