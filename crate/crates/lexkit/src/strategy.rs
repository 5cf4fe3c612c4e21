//! The perpetual reduction strategy and the inductive characterisation of
//! strong normalization, both parameterised by the termination oracle.
//!
//! The strategy picks, for any term not in normal form, exactly one move.
//! The interesting clause is at a substitution head: when the substituted
//! term is provably terminating the substitution is executed completely in
//! one strategy move (expanded to a concrete trace); when it provably is
//! not, reduction continues inside it, keeping any infinite behaviour
//! alive. When the oracle cannot decide, the strategy honestly answers
//! Unknown instead of guessing.

use std::collections::{HashMap, HashSet};

use serde_json::json;

use crate::rewrite::{
    embed_steps, full_composition_trace, is_nf_grammar, EngineError, Fuels, Oracle, RuleId,
    RuleSet, SnVerdict, Step,
};
use crate::syntax::print_term;
use crate::term::{alpha_key, app, esub, subst, GenTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseId {
    PVar,
    PAbs,
    PB,
    PSubs1,
    PSubs2,
}

impl ClauseId {
    pub fn name(self) -> &'static str {
        match self {
            ClauseId::PVar => "p-var",
            ClauseId::PAbs => "p-abs",
            ClauseId::PB => "p-B",
            ClauseId::PSubs1 => "p-subs1",
            ClauseId::PSubs2 => "p-subs2",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleCall {
    pub term: GenTerm,
    pub verdict: SnVerdict,
}

/// One strategy move: the clause that fired at the root, its result, the
/// termination queries made along the way, and the realization of the move
/// as checked rewrite steps.
#[derive(Clone, Debug)]
pub struct StrategyStep {
    pub rule: ClauseId,
    pub result: GenTerm,
    pub oracle_calls: Vec<OracleCall>,
    pub expansion: Vec<Step>,
}

#[derive(Clone, Debug)]
pub enum StrategyOutcome {
    NormalForm,
    Unknown(Vec<OracleCall>),
    Step(Box<StrategyStep>),
}

fn spine(t: &GenTerm) -> (&GenTerm, Vec<&GenTerm>) {
    let mut head = t;
    let mut args = Vec::new();
    while let GenTerm::App(l, r) = head {
        args.push(&**r);
        head = l;
    }
    args.reverse();
    (head, args)
}

fn rebuild(head: GenTerm, args: &[GenTerm]) -> GenTerm {
    args.iter().fold(head, |t, a| app(t, a.clone()))
}

fn realize(
    t: &GenTerm,
    oracle: &mut Oracle,
    fuels: &Fuels,
    calls: &mut Vec<OracleCall>,
) -> Result<Option<(ClauseId, GenTerm, Vec<Step>)>, EngineError> {
    let (head, borrowed) = spine(t);
    let args: Vec<GenTerm> = borrowed.into_iter().cloned().collect();
    match head {
        GenTerm::Lam(x, body) => {
            if args.is_empty() {
                let Some((_, result, steps)) = realize(body, oracle, fuels, calls)? else {
                    return Ok(None);
                };
                let x = x.clone();
                let wrapped = embed_steps(steps, &[0], |s| GenTerm::Lam(x.clone(), Box::new(s)));
                Ok(Some((
                    ClauseId::PAbs,
                    GenTerm::Lam(x, Box::new(result)),
                    wrapped,
                )))
            } else {
                let redex_pos = vec![0; args.len() - 1];
                let contractum = esub((**body).clone(), x, args[0].clone());
                let next = rebuild(contractum, &args[1..]);
                let step = Step {
                    rule: RuleId::B,
                    position: redex_pos,
                    before: t.clone(),
                    after: next.clone(),
                };
                Ok(Some((ClauseId::PB, next, vec![step])))
            }
        }
        GenTerm::Var(_) => {
            let i = args
                .iter()
                .position(|a| !is_nf_grammar(a))
                .expect("a variable-headed non-normal term has a reducible argument");
            let Some((_, result, steps)) = realize(&args[i], oracle, fuels, calls)? else {
                return Ok(None);
            };
            let mut prefix = vec![0; args.len() - 1 - i];
            prefix.push(1);
            let head = head.clone();
            let ctx_args = args.clone();
            let wrap = move |s: GenTerm| {
                let mut replaced = ctx_args.clone();
                replaced[i] = s;
                rebuild(head.clone(), &replaced)
            };
            let wrapped = embed_steps(steps, &prefix, &wrap);
            Ok(Some((ClauseId::PVar, wrap(result), wrapped)))
        }
        GenTerm::ESub(body, x, u) => {
            let verdict = oracle.sn_verdict(u, &RuleSet::lambda_ex(), fuels)?;
            calls.push(OracleCall {
                term: (**u).clone(),
                verdict: verdict.clone(),
            });
            match verdict {
                SnVerdict::ProvedSN { .. } => {
                    let done = subst(body, x, u)?;
                    let trace = full_composition_trace(body, x, u, fuels)?;
                    let prefix = vec![0; args.len()];
                    let ctx_args = args.clone();
                    let wrap = move |s: GenTerm| rebuild(s, &ctx_args);
                    let wrapped = embed_steps(trace, &prefix, &wrap);
                    Ok(Some((ClauseId::PSubs1, wrap(done), wrapped)))
                }
                SnVerdict::ProvedNotSN { .. } => {
                    let Some((_, result, steps)) = realize(u, oracle, fuels, calls)? else {
                        return Ok(None);
                    };
                    let mut prefix = vec![0; args.len()];
                    prefix.push(1);
                    let body = (**body).clone();
                    let x = x.clone();
                    let ctx_args = args.clone();
                    let wrap =
                        move |s: GenTerm| rebuild(esub(body.clone(), &x, s), &ctx_args);
                    let wrapped = embed_steps(steps, &prefix, &wrap);
                    Ok(Some((ClauseId::PSubs2, wrap(result), wrapped)))
                }
                SnVerdict::Unknown => Ok(None),
            }
        }
        GenTerm::App(_, _) => unreachable!("spine heads are never applications"),
        GenTerm::LSub(_, _, _) | GenTerm::MetaVar(_, _) => Err(EngineError::IllFormedInput(
            "the strategy is defined on plain terms".to_string(),
        )),
    }
}

/// One move of the perpetual strategy.
pub fn perpetual_step(
    t: &GenTerm,
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<StrategyOutcome, EngineError> {
    if !t.is_term() {
        return Err(EngineError::IllFormedInput(
            "the strategy is defined on plain terms".to_string(),
        ));
    }
    if is_nf_grammar(t) {
        return Ok(StrategyOutcome::NormalForm);
    }
    let mut calls = Vec::new();
    match realize(t, oracle, fuels, &mut calls)? {
        None => Ok(StrategyOutcome::Unknown(calls)),
        Some((rule, result, expansion)) => Ok(StrategyOutcome::Step(Box::new(StrategyStep {
            rule,
            result,
            oracle_calls: calls,
            expansion,
        }))),
    }
}

/// Which clause guards hold at the root, checked independently of each
/// other. For any term not in normal form exactly one should, provided the
/// oracle is definite.
pub fn applicable_clauses(
    t: &GenTerm,
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<Vec<ClauseId>, EngineError> {
    let mut out = Vec::new();
    if is_nf_grammar(t) {
        return Ok(out);
    }
    let (head, args) = spine(t);
    match head {
        GenTerm::Lam(_, body) => {
            if args.is_empty() {
                if !is_nf_grammar(body) {
                    out.push(ClauseId::PAbs);
                }
            } else {
                out.push(ClauseId::PB);
            }
        }
        GenTerm::Var(_) => {
            if args.iter().any(|a| !is_nf_grammar(a)) {
                out.push(ClauseId::PVar);
            }
        }
        GenTerm::ESub(_, _, u) => match oracle.sn_verdict(u, &RuleSet::lambda_ex(), fuels)? {
            SnVerdict::ProvedSN { .. } => out.push(ClauseId::PSubs1),
            SnVerdict::ProvedNotSN { .. } => out.push(ClauseId::PSubs2),
            SnVerdict::Unknown => {}
        },
        _ => {}
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    NormalForm,
    Undecided,
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct PerpetualTrace {
    pub moves: Vec<StrategyStep>,
    pub final_term: GenTerm,
    pub status: TraceStatus,
}

/// Iterate the strategy until a normal form, an undecided oracle call, or
/// the step budget (counted in realized rewrite steps) runs out.
pub fn perpetual_trace(
    t: &GenTerm,
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<PerpetualTrace, EngineError> {
    let mut moves = Vec::new();
    let mut cur = t.clone();
    let mut spent = 0usize;
    loop {
        if spent >= fuels.step_fuel {
            return Ok(PerpetualTrace {
                moves,
                final_term: cur,
                status: TraceStatus::FuelExhausted,
            });
        }
        match perpetual_step(&cur, oracle, fuels)? {
            StrategyOutcome::NormalForm => {
                return Ok(PerpetualTrace {
                    moves,
                    final_term: cur,
                    status: TraceStatus::NormalForm,
                })
            }
            StrategyOutcome::Unknown(_) => {
                return Ok(PerpetualTrace {
                    moves,
                    final_term: cur,
                    status: TraceStatus::Undecided,
                })
            }
            StrategyOutcome::Step(s) => {
                spent += s.expansion.len().max(1);
                cur = s.result.clone();
                moves.push(*s);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsnRule {
    Var,
    App,
    Subs,
    Abs,
}

impl IsnRule {
    pub fn name(self) -> &'static str {
        match self {
            IsnRule::Var => "var",
            IsnRule::App => "app",
            IsnRule::Subs => "subs",
            IsnRule::Abs => "abs",
        }
    }
}

/// Syntax-directed derivation that a term is strongly normalizing: a
/// variable spine needs normalizing arguments, an abstraction a
/// normalizing body, a beta redex a normalizing contractum, and a
/// substitution both its argument and its complete execution.
#[derive(Clone, Debug)]
pub struct IsnDerivation {
    pub rule: IsnRule,
    pub term: GenTerm,
    pub premises: Vec<IsnDerivation>,
}

impl IsnDerivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rule": self.rule.name(),
            "term": print_term(&self.term),
            "premises": self.premises.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Build the derivation, or None when the unfolding cycles or the depth
/// budget runs out. Successful subgoals are memoised by alpha key.
pub fn isn_check(t: &GenTerm, depth_fuel: usize) -> Result<Option<IsnDerivation>, EngineError> {
    if !t.is_term() {
        return Err(EngineError::IllFormedInput(
            "the inductive characterisation is defined on plain terms".to_string(),
        ));
    }
    let mut memo: HashMap<String, IsnDerivation> = HashMap::new();
    let mut stack: HashSet<String> = HashSet::new();
    go(t, depth_fuel, &mut stack, &mut memo)
}

fn go(
    t: &GenTerm,
    fuel: usize,
    stack: &mut HashSet<String>,
    memo: &mut HashMap<String, IsnDerivation>,
) -> Result<Option<IsnDerivation>, EngineError> {
    let key = alpha_key(t);
    if let Some(d) = memo.get(&key.0) {
        return Ok(Some(d.clone()));
    }
    if stack.contains(&key.0) || fuel == 0 {
        return Ok(None);
    }
    stack.insert(key.0.clone());
    let (head, borrowed) = spine(t);
    let args: Vec<GenTerm> = borrowed.into_iter().cloned().collect();
    let result = (|| -> Result<Option<IsnDerivation>, EngineError> {
        match head {
            GenTerm::Var(_) => {
                let mut premises = Vec::new();
                for a in &args {
                    match go(a, fuel - 1, stack, memo)? {
                        Some(p) => premises.push(p),
                        None => return Ok(None),
                    }
                }
                Ok(Some(IsnDerivation {
                    rule: IsnRule::Var,
                    term: t.clone(),
                    premises,
                }))
            }
            GenTerm::Lam(x, body) => {
                if args.is_empty() {
                    Ok(go(body, fuel - 1, stack, memo)?.map(|p| IsnDerivation {
                        rule: IsnRule::Abs,
                        term: t.clone(),
                        premises: vec![p],
                    }))
                } else {
                    let prem = rebuild(esub((**body).clone(), x, args[0].clone()), &args[1..]);
                    Ok(go(&prem, fuel - 1, stack, memo)?.map(|p| IsnDerivation {
                        rule: IsnRule::App,
                        term: t.clone(),
                        premises: vec![p],
                    }))
                }
            }
            GenTerm::ESub(body, x, u) => {
                let Some(pu) = go(u, fuel - 1, stack, memo)? else {
                    return Ok(None);
                };
                let prem = rebuild(subst(body, x, u)?, &args);
                Ok(go(&prem, fuel - 1, stack, memo)?.map(|p| IsnDerivation {
                    rule: IsnRule::Subs,
                    term: t.clone(),
                    premises: vec![pu, p],
                }))
            }
            _ => unreachable!("plain terms only"),
        }
    })();
    stack.remove(&key.0);
    let result = result?;
    if let Some(d) = &result {
        memo.insert(key.0, d.clone());
    }
    Ok(result)
}

#[derive(Clone, Debug)]
pub struct PsnReport {
    pub term: GenTerm,
    pub beta: SnVerdict,
    pub lex: SnVerdict,
    pub violation: bool,
}

impl PsnReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "term": print_term(&self.term),
            "beta": self.beta.short(),
            "lex": self.lex.short(),
            "violation": self.violation,
        })
    }
}

/// Compare termination of a plain lambda term under beta alone and under
/// the full calculus. A violation would be a term terminating under beta
/// but provably not with explicit substitutions; none should exist.
pub fn psn_sample(
    t: &GenTerm,
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<PsnReport, EngineError> {
    if !t.is_pure_lambda() {
        return Err(EngineError::IllFormedInput(
            "the comparison needs a pure lambda term".to_string(),
        ));
    }
    let beta = oracle.sn_verdict(t, &RuleSet::beta(), fuels)?;
    let lex = oracle.sn_verdict(t, &RuleSet::lambda_ex(), fuels)?;
    let violation = beta.is_sn() && lex.is_not_sn();
    Ok(PsnReport {
        term: t.clone(),
        beta,
        lex,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::verify_trace;
    use crate::term::alpha_eq;

    fn t(src: &str) -> GenTerm {
        crate::syntax::parse_term(src).unwrap()
    }

    fn step_of(src: &str) -> StrategyStep {
        let mut oracle = Oracle::new();
        match perpetual_step(&t(src), &mut oracle, &Fuels::default()).unwrap() {
            StrategyOutcome::Step(s) => *s,
            other => panic!("expected a move for {src}, got {other:?}"),
        }
    }

    #[test]
    fn normal_forms_are_recognised() {
        let mut oracle = Oracle::new();
        for src in ["x", "\\x.x", "x (\\y.y) z"] {
            assert!(matches!(
                perpetual_step(&t(src), &mut oracle, &Fuels::default()).unwrap(),
                StrategyOutcome::NormalForm
            ));
        }
    }

    #[test]
    fn beta_redexes_fire_the_b_clause() {
        let s = step_of("(\\x.x) y");
        assert_eq!(s.rule, ClauseId::PB);
        assert!(alpha_eq(&s.result, &t("x[x/y]")));

        let s = step_of("(\\x.x) y z");
        assert_eq!(s.rule, ClauseId::PB);
        assert!(alpha_eq(&s.result, &t("x[x/y] z")));
    }

    #[test]
    fn terminating_substitutions_execute_completely() {
        let s = step_of("x[x/y]");
        assert_eq!(s.rule, ClauseId::PSubs1);
        assert!(alpha_eq(&s.result, &t("y")));
        assert_eq!(s.oracle_calls.len(), 1);
        assert!(s.oracle_calls[0].verdict.is_sn());
    }

    #[test]
    fn diverging_substitutions_are_kept_alive() {
        let s = step_of("s[x/(\\x.x x) (\\x.x x)]");
        assert_eq!(s.rule, ClauseId::PSubs2);
        assert!(alpha_eq(&s.result, &t("s[x/(x x)[x/\\x.x x]]")));
        assert!(s.oracle_calls[0].verdict.is_not_sn());
    }

    #[test]
    fn inner_clauses_recurse_under_heads() {
        let s = step_of("\\x.(\\y.y) z");
        assert_eq!(s.rule, ClauseId::PAbs);
        assert!(alpha_eq(&s.result, &t("\\x.y[y/z]")));

        let s = step_of("x ((\\y.y) z) w");
        assert_eq!(s.rule, ClauseId::PVar);
        assert!(alpha_eq(&s.result, &t("x (y[y/z]) w")));
    }

    #[test]
    fn moves_expand_to_checked_traces() {
        let fl = Fuels::default();
        for src in [
            "(\\x.x) y",
            "x[x/y]",
            "\\x.(\\y.y) z",
            "x ((\\y.y) z) w",
            "s[x/(\\x.x x) (\\x.x x)]",
            "(z y x)[y/x x][x/v]",
        ] {
            let s = step_of(src);
            assert!(!s.expansion.is_empty(), "{src}");
            verify_trace(&t(src), &s.result, &s.expansion, &RuleSet::lambda_ex(), &fl)
                .unwrap_or_else(|e| panic!("{src}: {e}"));
        }
    }

    #[test]
    fn the_running_example_substitutes_through_the_known_midpoint() {
        let s = step_of("(z y x)[y/x x][x/v]");
        assert_eq!(s.rule, ClauseId::PSubs1);
        assert!(alpha_eq(&s.result, &t("(z y v)[y/v v]")));
    }

    #[test]
    fn exactly_one_clause_applies() {
        let mut oracle = Oracle::new();
        let fl = Fuels::default();
        for src in [
            "(\\x.x) y",
            "x[x/y]",
            "\\x.(\\y.y) z",
            "x ((\\y.y) z) w",
            "s[x/(\\x.x x) (\\x.x x)]",
            "(\\x.x) y z",
        ] {
            let cs = applicable_clauses(&t(src), &mut oracle, &fl).unwrap();
            assert_eq!(cs.len(), 1, "{src}: {cs:?}");
        }
        assert!(applicable_clauses(&t("x"), &mut oracle, &fl).unwrap().is_empty());
    }

    #[test]
    fn traces_terminate_on_normalizing_terms() {
        let mut oracle = Oracle::new();
        let tr = perpetual_trace(&t("(\\x.x) y"), &mut oracle, &Fuels::default()).unwrap();
        assert_eq!(tr.status, TraceStatus::NormalForm);
        assert!(alpha_eq(&tr.final_term, &t("y")));
        let rules: Vec<_> = tr.moves.iter().map(|m| m.rule).collect();
        assert_eq!(rules, vec![ClauseId::PB, ClauseId::PSubs1]);
    }

    #[test]
    fn traces_run_out_of_fuel_on_divergent_terms() {
        let mut oracle = Oracle::new();
        let fl = Fuels {
            step_fuel: 25,
            ..Fuels::default()
        };
        let tr = perpetual_trace(&t("(\\x.x x) (\\x.x x)"), &mut oracle, &fl).unwrap();
        assert_eq!(tr.status, TraceStatus::FuelExhausted);
        assert!(!tr.moves.is_empty());
    }

    #[test]
    fn isn_matches_known_facts() {
        assert!(isn_check(&t("x"), 2000).unwrap().is_some());
        let d = isn_check(&t("(\\x.x x) (\\y.y)"), 2000).unwrap().unwrap();
        assert_eq!(d.rule, IsnRule::App);
        assert!(isn_check(&t("(\\x.x x) (\\x.x x)"), 2000).unwrap().is_none());
        assert!(isn_check(&t("x"), 0).unwrap().is_none());
        let d = isn_check(&t("x[x/y]"), 2000).unwrap().unwrap();
        assert_eq!(d.rule, IsnRule::Subs);
        assert_eq!(d.premises.len(), 2);
    }

    #[test]
    fn psn_reports_have_no_violations_on_known_terms() {
        let mut oracle = Oracle::new();
        let fl = Fuels::default();
        let r = psn_sample(&t("\\x.x"), &mut oracle, &fl).unwrap();
        assert!(r.beta.is_sn() && r.lex.is_sn() && !r.violation);
        let r = psn_sample(&t("(\\x.y) ((\\x.x x) (\\x.x x))"), &mut oracle, &fl).unwrap();
        assert!(r.beta.is_not_sn() && r.lex.is_not_sn() && !r.violation);
        assert!(psn_sample(&t("x[x/y]"), &mut oracle, &fl).is_err());
    }
}
