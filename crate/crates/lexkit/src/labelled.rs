//! Labelled substitutions and what makes them terminate.
//!
//! A labelled substitution freezes a substitution whose body is a
//! certified-terminating term over a fixed decoration set S. The
//! labelled rules let such a substitution traverse the term — including
//! through ordinary substitutions — but nothing can ever move into a
//! label. Termination of that traversal is measured by `ar` (how many
//! ordinary substitution bodies still mention the variable), `dep` (their
//! total), and `k` (a multiplicative size where a label weighs the full
//! reduction potential of its body).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde_json::json;

use crate::rewrite::{
    find_cycle, reducts, EngineError, Fuels, Oracle, RuleId, RuleSet, SnVerdict, Step,
};
use crate::syntax::print_term;
use crate::term::{
    app, canonical_key_bounded, esub, lam, lsub, subst, CanonicalKey, FreshNames, GenTerm, Name,
    TermError,
};

/// The fixed decoration set S for one labelled-term universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelContext {
    pub s: BTreeSet<Name>,
}

/// Label the substitution in t[x/u] applied to `args`: requires `u` to be
/// provably terminating, takes S = fv(u), and renames bound names of the
/// whole term off S.
pub fn make_labelled(
    t: &GenTerm,
    x: &str,
    u: &GenTerm,
    args: &[GenTerm],
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<(GenTerm, LabelContext), EngineError> {
    if u.contains_lsub() || !u.is_term() {
        return Err(EngineError::IllFormedInput(
            "label bodies must be label-free terms".to_string(),
        ));
    }
    match oracle.sn_verdict(u, &RuleSet::lambda_ex(), fuels)? {
        SnVerdict::ProvedSN { .. } => {}
        SnVerdict::ProvedNotSN { .. } => return Err(EngineError::NotSN(print_term(u))),
        SnVerdict::Unknown => return Err(EngineError::OracleUnknown(print_term(u))),
    }
    let ctx = LabelContext { s: u.free_vars() };
    let mut whole = lsub(t.clone(), x, u.clone());
    for a in args {
        whole = app(whole, a.clone());
    }
    let whole = rename_bound_off(&whole, &ctx.s);
    Ok((whole, ctx))
}

/// Alpha-rename every binder whose name lies in `avoid`.
fn rename_bound_off(t: &GenTerm, avoid: &BTreeSet<Name>) -> GenTerm {
    fn go(t: &GenTerm, avoid: &BTreeSet<Name>, fr: &mut FreshNames) -> GenTerm {
        match t {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => t.clone(),
            GenTerm::App(l, r) => app(go(l, avoid, fr), go(r, avoid, fr)),
            GenTerm::Lam(x, b) => {
                let b = go(b, avoid, fr);
                if avoid.contains(x) {
                    let nx = fr.fresh(x);
                    lam(&nx, crate::term::rename_free(&b, x, &nx))
                } else {
                    lam(x, b)
                }
            }
            GenTerm::ESub(b, x, a) | GenTerm::LSub(b, x, a) => {
                let labelled = matches!(t, GenTerm::LSub(_, _, _));
                let nb = go(b, avoid, fr);
                let na = go(a, avoid, fr);
                let (x2, nb) = if avoid.contains(x) {
                    let nx = fr.fresh(x);
                    let renamed = crate::term::rename_free(&nb, x, &nx);
                    (nx, renamed)
                } else {
                    (x.clone(), nb)
                };
                if labelled {
                    lsub(nb, &x2, na)
                } else {
                    esub(nb, &x2, na)
                }
            }
        }
    }
    let mut fr = FreshNames::for_terms(&[t]);
    for n in avoid {
        fr.reserve(n);
    }
    go(t, avoid, &mut fr)
}

/// Check the labelled-term discipline: no metavariables, every label body
/// a label-free provably-terminating term with free variables inside S,
/// and no binder drawn from S (so bodies stay out of reach of every other
/// substitution). B steps inside a body may leave ordinary substitutions
/// there; the discipline survives that.
pub fn is_labelled(
    t: &GenTerm,
    ctx: &LabelContext,
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<bool, EngineError> {
    match t {
        GenTerm::Var(_) => Ok(true),
        GenTerm::MetaVar(_, _) => Ok(false),
        GenTerm::App(l, r) => Ok(is_labelled(l, ctx, oracle, fuels)?
            && is_labelled(r, ctx, oracle, fuels)?),
        GenTerm::Lam(x, b) => Ok(!ctx.s.contains(x) && is_labelled(b, ctx, oracle, fuels)?),
        GenTerm::ESub(b, x, a) => Ok(!ctx.s.contains(x)
            && is_labelled(b, ctx, oracle, fuels)?
            && is_labelled(a, ctx, oracle, fuels)?),
        GenTerm::LSub(b, x, a) => {
            if ctx.s.contains(x) {
                return Ok(false);
            }
            if a.contains_lsub() || !a.free_vars().is_subset(&ctx.s) {
                return Ok(false);
            }
            if !oracle.sn_verdict(a, &RuleSet::lambda_ex(), fuels)?.is_sn() {
                return Ok(false);
            }
            Ok(is_labelled(a, ctx, oracle, fuels)? && is_labelled(b, ctx, oracle, fuels)?)
        }
    }
}

/// How many ordinary substitution bodies in t still have x free, counting
/// an extra one for each substitution whose argument mentions x. Labels
/// shield their bodies entirely.
pub fn ar(t: &GenTerm, x: &str) -> u64 {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => 0,
        GenTerm::App(l, r) => ar(l, x) + ar(r, x),
        GenTerm::Lam(y, b) => {
            if y == x {
                0
            } else {
                ar(b, x)
            }
        }
        GenTerm::LSub(b, y, _) => {
            if y == x {
                0
            } else {
                ar(b, x)
            }
        }
        GenTerm::ESub(b, y, a) => {
            let body = if y == x { 0 } else { ar(b, x) };
            if a.free_vars().contains(x) {
                body + 1 + ar(a, x)
            } else {
                body + ar(a, x)
            }
        }
    }
}

/// Total of `ar` over all labels: each labelled substitution contributes
/// how many ordinary substitutions its variable must still cross.
pub fn dep(t: &GenTerm) -> u64 {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => 0,
        GenTerm::App(l, r) => dep(l) + dep(r),
        GenTerm::Lam(_, b) => dep(b),
        GenTerm::ESub(b, _, a) => dep(b) + dep(a),
        GenTerm::LSub(b, x, _) => dep(b) + ar(b, x),
    }
}

/// Execute every labelled substitution, leaving ordinary ones alone.
pub fn xc(t: &GenTerm) -> Result<GenTerm, TermError> {
    Ok(match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => t.clone(),
        GenTerm::App(l, r) => app(xc(l)?, xc(r)?),
        GenTerm::Lam(x, b) => lam(x, xc(b)?),
        GenTerm::ESub(b, x, a) => esub(xc(b)?, x, xc(a)?),
        GenTerm::LSub(b, x, a) => subst(&xc(b)?, x, a)?,
    })
}

/// Demote every label to an ordinary substitution.
pub fn unlabel(t: &GenTerm) -> GenTerm {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => t.clone(),
        GenTerm::App(l, r) => app(unlabel(l), unlabel(r)),
        GenTerm::Lam(x, b) => lam(x, unlabel(b)),
        GenTerm::ESub(b, x, a) | GenTerm::LSub(b, x, a) => esub(unlabel(b), x, unlabel(a)),
    }
}

#[derive(Clone, Debug)]
pub struct Measures {
    pub ar: BTreeMap<Name, u64>,
    pub dep: u64,
    pub k: u64,
    pub phi: BTreeMap<String, u64>,
}

impl Measures {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "ar": self.ar,
            "dep": self.dep,
            "k": self.k,
            "phi": self.phi,
        })
    }
}

fn label_bodies(t: &GenTerm, out: &mut Vec<GenTerm>) {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => {}
        GenTerm::Lam(_, b) => label_bodies(b, out),
        GenTerm::App(l, r) | GenTerm::ESub(l, _, r) => {
            label_bodies(l, out);
            label_bodies(r, out);
        }
        GenTerm::LSub(b, _, a) => {
            label_bodies(b, out);
            if !out.contains(a) {
                out.push((**a).clone());
            }
        }
    }
}

/// All measures of a labelled term at once: `ar` for the requested
/// variables, `dep`, `k`, and the weight of each distinct label body.
pub fn measures(
    t: &GenTerm,
    vars: &[Name],
    oracle: &mut Oracle,
    fuels: &Fuels,
) -> Result<Measures, EngineError> {
    let mut ar_map = BTreeMap::new();
    for v in vars {
        ar_map.insert(v.clone(), ar(t, v));
    }
    let mut phi = BTreeMap::new();
    let mut bodies = Vec::new();
    label_bodies(t, &mut bodies);
    for b in bodies {
        phi.insert(print_term(&b), oracle.phi(&b, fuels)?);
    }
    Ok(Measures {
        ar: ar_map,
        dep: dep(t),
        k: oracle.k_measure(t, fuels)?,
        phi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Internal,
    External,
}

/// A step is internal when it is a labelled-substitution rule or happens
/// inside a label body; everything else is external.
pub fn split_step(s: &Step) -> StepKind {
    if matches!(
        s.rule,
        RuleId::UVar | RuleId::UGc | RuleId::UApp | RuleId::ULamb | RuleId::UComp
    ) {
        return StepKind::Internal;
    }
    let mut cur = &s.before;
    for &i in &s.position {
        if matches!(cur, GenTerm::LSub(_, _, _)) && i == 1 {
            return StepKind::Internal;
        }
        cur = match (cur, i) {
            (GenTerm::Lam(_, b), 0) => b,
            (GenTerm::App(l, _), 0)
            | (GenTerm::ESub(l, _, _), 0)
            | (GenTerm::LSub(l, _, _), 0) => l,
            (GenTerm::App(_, r), 1)
            | (GenTerm::ESub(_, _, r), 1)
            | (GenTerm::LSub(_, _, r), 1) => r,
            _ => return StepKind::External,
        };
    }
    StepKind::External
}

/// Lift a step on the unlabelled term back to the labelled one: find the
/// labelled step whose unlabelling reaches the same target modulo the
/// swap equations.
pub fn lift_step(t: &GenTerm, s: &Step, fuels: &Fuels) -> Result<Step, EngineError> {
    let rs_ex = RuleSet::lambda_ex();
    let key = |x: &GenTerm| canonical_key_bounded(x, rs_ex.eq_mode, fuels.class_bound);
    if key(&unlabel(t))? != key(&s.before)? {
        return Err(EngineError::NotLiftable(
            "the step does not start at the unlabelling of the term".to_string(),
        ));
    }
    let target = key(&s.after)?;
    let rs = RuleSet::lambda_uex();
    for cand in reducts(t, &rs, fuels)? {
        if key(&unlabel(&cand.after))? == target {
            return Ok(cand);
        }
    }
    Err(EngineError::NotLiftable(format!(
        "no labelled counterpart found for a {} step",
        s.rule.name()
    )))
}

/// All internal steps of a labelled term.
pub fn internal_reducts(t: &GenTerm, fuels: &Fuels) -> Result<Vec<Step>, EngineError> {
    Ok(reducts(t, &RuleSet::lambda_uex(), fuels)?
        .into_iter()
        .filter(|s| split_step(s) == StepKind::Internal)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InternalClosure {
    pub nodes: usize,
    pub complete: bool,
    pub acyclic: bool,
}

/// Walk the closure of a labelled term under internal steps only.
pub fn explore_internal(t: &GenTerm, fuels: &Fuels) -> Result<InternalClosure, EngineError> {
    let mode = RuleSet::lambda_uex().eq_mode;
    let root = canonical_key_bounded(t, mode, fuels.class_bound)?;
    let mut terms: HashMap<CanonicalKey, GenTerm> = HashMap::new();
    terms.insert(root.clone(), t.clone());
    let mut edges: BTreeMap<CanonicalKey, Vec<(RuleId, CanonicalKey)>> = BTreeMap::new();
    let mut queue: VecDeque<CanonicalKey> = [root].into();
    let mut complete = true;
    while let Some(key) = queue.pop_front() {
        if edges.contains_key(&key) {
            continue;
        }
        if edges.len() >= fuels.node_fuel {
            complete = false;
            break;
        }
        let mut succs = Vec::new();
        for s in internal_reducts(&terms[&key], fuels)? {
            let ak = canonical_key_bounded(&s.after, mode, fuels.class_bound)?;
            succs.push((s.rule, ak.clone()));
            if !terms.contains_key(&ak) {
                terms.insert(ak.clone(), s.after);
                queue.push_back(ak);
            }
        }
        edges.insert(key, succs);
    }
    Ok(InternalClosure {
        nodes: terms.len(),
        complete,
        acyclic: !find_cycle(&edges),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{explore, GraphStatus};
    use crate::term::{alpha_eq, var};

    fn t(src: &str) -> GenTerm {
        crate::syntax::parse_term(src).unwrap()
    }

    #[test]
    fn the_worked_occurrence_count() {
        // w[w/(xx)[y/x]]: x occurs free in both substitution bodies
        assert_eq!(ar(&t("w[w/(x x)[y/x]]"), "x"), 2);
        assert_eq!(ar(&t("z"), "x"), 0);
        assert_eq!(ar(&t("w[y/z]"), "x"), 0);
        assert_eq!(ar(&t("\\x.w[y/x x]"), "x"), 0);
    }

    #[test]
    fn the_worked_dependency_total() {
        let v = "w[w/(x x)[y/x]]";
        assert_eq!(dep(&t(&format!("{v}[y/{v}][[x/x1]]"))), 5);
        assert_eq!(dep(&t(v)), 0);
        assert_eq!(dep(&t("x")), 0);
    }

    #[test]
    fn labels_shield_their_bodies_from_ar() {
        assert_eq!(ar(&t("w[[w/(x x)[y/x]]]"), "x"), 0);
        assert_eq!(ar(&t("(w w)[[y/x]]"), "w"), 2 * 0 + ar(&t("w w"), "w"));
    }

    #[test]
    fn executing_labels_is_substitution() {
        assert_eq!(xc(&t("x[[x/v]]")).unwrap(), var("v"));
        assert_eq!(xc(&t("x[y/u]")).unwrap(), t("x[y/u]"));
        assert!(alpha_eq(
            &xc(&t("(x y)[[x/v v]][y/u]")).unwrap(),
            &t("(v v y)[y/u]")
        ));
        assert_eq!(xc(&t("\\x.x")).unwrap(), t("\\x.x"));
    }

    #[test]
    fn unlabelling_demotes_and_preserves_free_variables() {
        assert_eq!(unlabel(&t("x[[x/v]]")), t("x[x/v]"));
        assert_eq!(unlabel(&t("\\x.x")), t("\\x.x"));
        let l = t("(x y)[[x/v v]][y/u]");
        assert_eq!(l.free_vars(), unlabel(&l).free_vars());
    }

    #[test]
    fn labelling_requires_termination_and_avoids_the_decoration_set() {
        let mut oracle = Oracle::new();
        let fl = Fuels::default();
        let (l, ctx) = make_labelled(&var("x"), "x", &var("y"), &[], &mut oracle, &fl).unwrap();
        assert_eq!(l, t("x[[x/y]]"));
        assert_eq!(ctx.s, ["y".to_string()].into());
        assert!(is_labelled(&l, &ctx, &mut oracle, &fl).unwrap());

        let omega = t("(\\x.x x) (\\x.x x)");
        assert!(matches!(
            make_labelled(&var("s"), "x", &omega, &[], &mut oracle, &fl),
            Err(EngineError::NotSN(_))
        ));

        // binder clashing with S gets renamed
        let body = t("\\s1.x s1");
        let (l, ctx) = make_labelled(&body, "x", &var("s1"), &[], &mut oracle, &fl).unwrap();
        assert!(is_labelled(&l, &ctx, &mut oracle, &fl).unwrap());
        assert!(alpha_eq(&l, &t("(\\s2.x s2)[[x/s1]]")));
    }

    #[test]
    fn discipline_violations_are_detected() {
        let mut oracle = Oracle::new();
        let fl = Fuels::default();
        let ctx = LabelContext {
            s: ["v".to_string()].into(),
        };
        assert!(is_labelled(&t("x[[x/v]]"), &ctx, &mut oracle, &fl).unwrap());
        // a body may hold ordinary substitutions (a B step inside leaves one)
        assert!(is_labelled(&t("x[[x/v[y/v]]]"), &ctx, &mut oracle, &fl).unwrap());
        // label body with a free variable outside S
        assert!(!is_labelled(&t("x[[x/w]]"), &ctx, &mut oracle, &fl).unwrap());
        // a body may never hold another label
        assert!(!is_labelled(&t("x[[x/v[[y/v]]]]"), &ctx, &mut oracle, &fl).unwrap());
        // binder drawn from S
        assert!(!is_labelled(&t("(\\v.v)[[x/v]]"), &ctx, &mut oracle, &fl).unwrap());
    }

    #[test]
    fn internal_and_external_steps_are_told_apart() {
        let fl = Fuels::default();
        let steps = reducts(&t("x[[x/v]]"), &RuleSet::lambda_uex(), &fl).unwrap();
        assert!(steps
            .iter()
            .any(|s| s.rule == RuleId::UVar && split_step(s) == StepKind::Internal));

        let steps = reducts(&t("(\\x.x) y"), &RuleSet::lambda_uex(), &fl).unwrap();
        assert!(steps
            .iter()
            .all(|s| s.rule == RuleId::B && split_step(s) == StepKind::External));

        // a beta step inside a label body is internal
        let steps = reducts(&t("w[[w/(\\x.x) v]]"), &RuleSet::lambda_uex(), &fl).unwrap();
        let inside: Vec<_> = steps.iter().filter(|s| s.rule == RuleId::B).collect();
        assert!(!inside.is_empty());
        assert!(inside.iter().all(|s| split_step(s) == StepKind::Internal));
    }

    #[test]
    fn label_traversal_of_a_substitution_lifts_composition() {
        let fl = Fuels::default();
        // a[x/y][[y/w]]: the ordinary body mentions the labelled variable
        let labelled = t("a[x/y][[y/w]]");
        let plain = unlabel(&labelled);
        let steps = reducts(&plain, &RuleSet::lambda_ex(), &fl).unwrap();
        let comp = steps
            .iter()
            .find(|s| s.rule == RuleId::Comp)
            .expect("composition applies");
        let lifted = lift_step(&labelled, comp, &fl).unwrap();
        assert_eq!(lifted.rule, RuleId::UComp);
        assert!(alpha_eq(&lifted.after, &t("a[[y/w]][x/y[[y/w]]]")));
    }

    #[test]
    fn every_plain_step_lifts() {
        let fl = Fuels::default();
        for src in ["(x y)[[x/v]]", "a[x/y][[y/w]]", "((\\x.x) y)[[z/v]]"] {
            let labelled = t(src);
            let plain = unlabel(&labelled);
            for s in reducts(&plain, &RuleSet::lambda_ex(), &fl).unwrap() {
                lift_step(&labelled, &s, &fl)
                    .unwrap_or_else(|e| panic!("{src}: {} step: {e}", s.rule.name()));
            }
        }
    }

    #[test]
    fn labelled_rules_terminate_on_their_own() {
        let fl = Fuels::default();
        for src in ["(x y)[[x/v]]", "a[x/y][[y/w]]", "(\\a.a x)[[x/v v]]"] {
            let g = explore(&t(src), &RuleSet::uex(), &fl).unwrap();
            assert_eq!(g.status, GraphStatus::Complete, "{src}");
            assert!(!g.cyclic, "{src}");
        }
    }

    #[test]
    fn internal_closures_terminate() {
        let fl = Fuels::default();
        for src in ["x[[x/(\\a.a) v]]", "a[x/y][[y/w]]", "w[[w/(\\x.x) v]]"] {
            let c = explore_internal(&t(src), &fl).unwrap();
            assert!(c.complete && c.acyclic, "{src}: {c:?}");
        }
    }

    #[test]
    fn measures_bundle_everything() {
        let mut oracle = Oracle::new();
        let fl = Fuels::default();
        let m = measures(
            &t("x[[y/z]]"),
            &["x".to_string(), "y".to_string()],
            &mut oracle,
            &fl,
        )
        .unwrap();
        assert_eq!(m.k, 2);
        assert_eq!(m.dep, 0);
        assert_eq!(m.ar["x"], 0);
        assert_eq!(m.phi["z"], 2);
    }
}
