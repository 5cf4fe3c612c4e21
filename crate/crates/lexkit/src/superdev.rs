//! Full superdevelopments and bounded confluence probes.
//!
//! `superdev` maps a term to the result of firing, in one parallel pass,
//! every application whose function part develops to an abstraction, and
//! of executing every explicit substitution in full. Substitutions landing
//! on a metavariable stay suspended in front of it when the variable is
//! among its permitted names, so the map is total on metaterms (only
//! labelled substitutions are outside its domain).
//!
//! The map is the anchor of the angle ("Z") property checked by
//! [`z_check`]: for every root-class step `t -> u` the target rejoins the
//! development of the source (`u ->* superdev t`) and the development of
//! the source continues to the development of the target
//! (`superdev t ->* superdev u`). Both legs are found by bounded search
//! and returned as checkable traces.
//!
//! [`confluence_check`] is the blunt instrument version: enumerate the
//! reachable terms to a depth, then demand every pair rejoins within a
//! join depth. It reports a counterexample only when both forward
//! closures were exhausted, so a reported peak is a real one and not a
//! fuel artefact. [`lambda_x_nonconfluence_demo`] packages the classic
//! failure: without the composition rule a substitution stuck on a
//! metavariable cannot be reordered, and the two evaluation orders of
//! `((\x. ?X{x,y}) u)[y/v]` end in distinct normal forms, while the same
//! peak rejoins once composition is available, and its ground instances
//! were never in danger.

use serde_json::json;

use crate::rewrite::{bfs_path, reducts, EngineError, Fuels, ReachResult, RuleSet, Step};
use crate::syntax::{parse_term, print_term};
use crate::term::{app, canonical_key_bounded, lam, subst, CanonicalKey, GenTerm};

/// The full superdevelopment of `t`. Undefined on labelled terms.
pub fn superdev(t: &GenTerm) -> Result<GenTerm, EngineError> {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => Ok(t.clone()),
        GenTerm::Lam(x, b) => Ok(lam(x, superdev(b)?)),
        GenTerm::App(l, r) => {
            let dl = superdev(l)?;
            let dr = superdev(r)?;
            if let GenTerm::Lam(x, body) = &dl {
                Ok(subst(body, x, &dr)?)
            } else {
                Ok(app(dl, dr))
            }
        }
        GenTerm::ESub(b, x, a) => {
            let db = superdev(b)?;
            let da = superdev(a)?;
            Ok(subst(&db, x, &da)?)
        }
        GenTerm::LSub(_, _, _) => Err(EngineError::IllFormedInput(
            "superdevelopment is undefined on labelled terms".to_string(),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZStatus {
    /// Both legs were found within the budget.
    Verified,
    /// The step target provably does not reach the source development.
    FailedFirst,
    /// The source development provably does not reach the target one.
    FailedSecond,
    /// At least one search ran out of nodes before deciding.
    FuelExhausted,
}

impl ZStatus {
    pub fn name(self) -> &'static str {
        match self {
            ZStatus::Verified => "verified",
            ZStatus::FailedFirst => "failed-first-leg",
            ZStatus::FailedSecond => "failed-second-leg",
            ZStatus::FuelExhausted => "fuel-exhausted",
        }
    }
}

/// The outcome of the angle property for one step out of a term.
#[derive(Clone, Debug)]
pub struct ZReport {
    pub step: Step,
    pub dev_source: GenTerm,
    pub dev_target: GenTerm,
    /// Trace for `target ->* dev_source`, when found.
    pub leg1: Option<Vec<Step>>,
    /// Trace for `dev_source ->* dev_target`, when found.
    pub leg2: Option<Vec<Step>>,
    pub status: ZStatus,
}

impl ZReport {
    pub fn to_json(&self) -> serde_json::Value {
        let leg = |l: &Option<Vec<Step>>| match l {
            Some(steps) => json!(steps
                .iter()
                .map(|s| json!({
                    "rule": s.rule.name(),
                    "position": s.position,
                    "to": print_term(&s.after),
                }))
                .collect::<Vec<_>>()),
            None => json!(null),
        };
        json!({
            "rule": self.step.rule.name(),
            "position": self.step.position,
            "target": print_term(&self.step.after),
            "dev_source": print_term(&self.dev_source),
            "dev_target": print_term(&self.dev_target),
            "leg1": leg(&self.leg1),
            "leg2": leg(&self.leg2),
            "status": self.status.name(),
        })
    }
}

/// Check the angle property for every root-class step out of `t`. Legs
/// are searched breadth-first with `fuels.join_budget` nodes each,
/// matching targets by canonical key.
pub fn z_check(t: &GenTerm, fuels: &Fuels) -> Result<Vec<ZReport>, EngineError> {
    let rs = RuleSet::lambda_ex();
    let dev_source = superdev(t)?;
    let key_source = canonical_key_bounded(&dev_source, rs.eq_mode, fuels.class_bound)?;
    let mut out = Vec::new();
    for step in reducts(t, &rs, fuels)? {
        let dev_target = superdev(&step.after)?;
        let key_target = canonical_key_bounded(&dev_target, rs.eq_mode, fuels.class_bound)?;
        let r1 = bfs_path(&step.after, &key_source, &rs, fuels, fuels.join_budget, 0)?;
        let r2 = bfs_path(&dev_source, &key_target, &rs, fuels, fuels.join_budget, 0)?;
        let status = match (&r1, &r2) {
            (ReachResult::Found(_), ReachResult::Found(_)) => ZStatus::Verified,
            (ReachResult::NotReachable, _) => ZStatus::FailedFirst,
            (_, ReachResult::NotReachable) => ZStatus::FailedSecond,
            _ => ZStatus::FuelExhausted,
        };
        let pick = |r: ReachResult| match r {
            ReachResult::Found(steps) => Some(steps),
            _ => None,
        };
        out.push(ZReport {
            step,
            dev_source: dev_source.clone(),
            dev_target,
            leg1: pick(r1),
            leg2: pick(r2),
            status,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfluenceResult {
    Confluent,
    /// Two reachable terms whose forward closures were fully enumerated
    /// and share no key.
    Counterexample { left: GenTerm, right: GenTerm },
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub reachable: usize,
    pub pairs: usize,
    pub result: ConfluenceResult,
}

impl ConfluenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        let (status, extra) = match &self.result {
            ConfluenceResult::Confluent => ("confluent", json!(null)),
            ConfluenceResult::Counterexample { left, right } => (
                "counterexample",
                json!({ "left": print_term(left), "right": print_term(right) }),
            ),
            ConfluenceResult::FuelExhausted => ("fuel-exhausted", json!(null)),
        };
        json!({
            "reachable": self.reachable,
            "pairs": self.pairs,
            "status": status,
            "witness": extra,
        })
    }
}

/// Keys reachable from `t` in at most `depth` steps, with the term first
/// seen for each key. The boolean is true when the closure converged —
/// the frontier emptied before the depth or node budget ran out — so the
/// key set is the complete forward closure.
fn closure(
    t: &GenTerm,
    rs: &RuleSet,
    depth: usize,
    fuels: &Fuels,
) -> Result<(std::collections::BTreeMap<CanonicalKey, GenTerm>, bool), EngineError> {
    let mut seen = std::collections::BTreeMap::new();
    let k0 = canonical_key_bounded(t, rs.eq_mode, fuels.class_bound)?;
    seen.insert(k0, t.clone());
    let mut frontier = vec![t.clone()];
    for _ in 0..depth {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for m in frontier.drain(..) {
            for s in reducts(&m, rs, fuels)? {
                let k = canonical_key_bounded(&s.after, rs.eq_mode, fuels.class_bound)?;
                if !seen.contains_key(&k) {
                    if seen.len() >= fuels.node_fuel {
                        return Ok((seen, false));
                    }
                    seen.insert(k, s.after.clone());
                    next.push(s.after);
                }
            }
        }
        frontier = next;
    }
    let converged = frontier.is_empty();
    Ok((seen, converged))
}

/// Enumerate terms reachable from `t` within `depth` steps and require
/// every pair of them to rejoin within `join_depth` steps, all modulo the
/// rule set's equations. A counterexample is reported only when both
/// join closures converged.
pub fn confluence_check(
    t: &GenTerm,
    rs: &RuleSet,
    depth: usize,
    join_depth: usize,
    fuels: &Fuels,
) -> Result<ConfluenceReport, EngineError> {
    let (reach, _) = closure(t, rs, depth, fuels)?;
    let items: Vec<(&CanonicalKey, &GenTerm)> = reach.iter().collect();
    let mut sets = Vec::with_capacity(items.len());
    for (_, m) in &items {
        let (c, conv) = closure(m, rs, join_depth, fuels)?;
        let keys: std::collections::BTreeSet<CanonicalKey> = c.into_keys().collect();
        sets.push((keys, conv));
    }
    let pairs = items.len() * items.len().saturating_sub(1) / 2;
    let mut exhausted = false;
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            let (si, ci) = &sets[i];
            let (sj, cj) = &sets[j];
            if si.intersection(sj).next().is_some() {
                continue;
            }
            if *ci && *cj {
                return Ok(ConfluenceReport {
                    reachable: items.len(),
                    pairs,
                    result: ConfluenceResult::Counterexample {
                        left: items[i].1.clone(),
                        right: items[j].1.clone(),
                    },
                });
            }
            exhausted = true;
        }
    }
    Ok(ConfluenceReport {
        reachable: items.len(),
        pairs,
        result: if exhausted {
            ConfluenceResult::FuelExhausted
        } else {
            ConfluenceResult::Confluent
        },
    })
}

/// The stock demonstration that dropping the composition rule loses
/// confluence on metaterms while every ground instance stays confluent.
#[derive(Clone, Debug)]
pub struct NonconfluenceDemo {
    pub peak: GenTerm,
    pub without_composition: ConfluenceReport,
    pub with_composition: ConfluenceReport,
    pub ground_peak: GenTerm,
    pub ground_without_composition: ConfluenceReport,
}

impl NonconfluenceDemo {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "peak": print_term(&self.peak),
            "without_composition": self.without_composition.to_json(),
            "with_composition": self.with_composition.to_json(),
            "ground_peak": print_term(&self.ground_peak),
            "ground_without_composition": self.ground_without_composition.to_json(),
        })
    }
}

pub fn lambda_x_nonconfluence_demo(fuels: &Fuels) -> Result<NonconfluenceDemo, EngineError> {
    let parse = |s: &str| {
        parse_term(s).map_err(|e| EngineError::IllFormedInput(format!("demo term: {e}")))
    };
    let peak = parse("((\\x. ?X{x,y}) u)[y/v]")?;
    let ground_peak = parse("((\\x. x y) u)[y/v]")?;
    Ok(NonconfluenceDemo {
        without_composition: confluence_check(&peak, &RuleSet::lambda_x(), 6, 6, fuels)?,
        with_composition: confluence_check(&peak, &RuleSet::lambda_ex(), 6, 8, fuels)?,
        ground_without_composition: confluence_check(
            &ground_peak,
            &RuleSet::lambda_x(),
            8,
            12,
            fuels,
        )?,
        peak,
        ground_peak,
    })
}
