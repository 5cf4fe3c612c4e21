//! Term syntax and the equational layer everything else sits on.
//!
//! One AST covers plain lambda terms, terms with explicit substitutions,
//! metaterms (metavariables decorated with the set of variables they may
//! mention) and labelled terms. Equality is always decided through canonical
//! keys: a nameless encoding for alpha, extended with the closure under
//! adjacent swaps of independent substitutions for the coarser modes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Name = String;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenTerm {
    Var(Name),
    App(Box<GenTerm>, Box<GenTerm>),
    Lam(Name, Box<GenTerm>),
    /// `t[x/u]`: explicit substitution, binder scopes over the body only.
    ESub(Box<GenTerm>, Name, Box<GenTerm>),
    /// `t[[x/u]]`: labelled substitution awaiting execution.
    LSub(Box<GenTerm>, Name, Box<GenTerm>),
    /// `?X{x,y}`: metavariable with its decoration.
    MetaVar(Name, BTreeSet<Name>),
}

pub fn var(n: &str) -> GenTerm {
    GenTerm::Var(n.to_string())
}

pub fn app(t: GenTerm, u: GenTerm) -> GenTerm {
    GenTerm::App(Box::new(t), Box::new(u))
}

pub fn lam(x: &str, t: GenTerm) -> GenTerm {
    GenTerm::Lam(x.to_string(), Box::new(t))
}

pub fn esub(t: GenTerm, x: &str, u: GenTerm) -> GenTerm {
    GenTerm::ESub(Box::new(t), x.to_string(), Box::new(u))
}

pub fn lsub(t: GenTerm, x: &str, u: GenTerm) -> GenTerm {
    GenTerm::LSub(Box::new(t), x.to_string(), Box::new(u))
}

pub fn metavar(n: &str, deco: &[&str]) -> GenTerm {
    GenTerm::MetaVar(n.to_string(), deco.iter().map(|s| s.to_string()).collect())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("ill-formed input: {0}")]
    IllFormedInput(String),
    #[error("fuel exhausted: {0}")]
    FuelExhausted(String),
}

impl GenTerm {
    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            GenTerm::Var(x) => [x.clone()].into(),
            GenTerm::App(t, u) => {
                let mut s = t.free_vars();
                s.extend(u.free_vars());
                s
            }
            GenTerm::Lam(x, t) => {
                let mut s = t.free_vars();
                s.remove(x);
                s
            }
            GenTerm::ESub(t, x, u) | GenTerm::LSub(t, x, u) => {
                let mut s = t.free_vars();
                s.remove(x);
                s.extend(u.free_vars());
                s
            }
            GenTerm::MetaVar(_, deco) => deco.clone(),
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<Name> {
        match self {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => BTreeSet::new(),
            GenTerm::App(t, u) => {
                let mut s = t.bound_vars();
                s.extend(u.bound_vars());
                s
            }
            GenTerm::Lam(x, t) => {
                let mut s = t.bound_vars();
                s.insert(x.clone());
                s
            }
            GenTerm::ESub(t, x, u) | GenTerm::LSub(t, x, u) => {
                let mut s = t.bound_vars();
                s.insert(x.clone());
                s.extend(u.bound_vars());
                s
            }
        }
    }

    /// Node count; substitutions count as one node plus both children.
    pub fn size(&self) -> usize {
        match self {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => 1,
            GenTerm::Lam(_, t) => 1 + t.size(),
            GenTerm::App(t, u) | GenTerm::ESub(t, _, u) | GenTerm::LSub(t, _, u) => {
                1 + t.size() + u.size()
            }
        }
    }

    /// Every name appearing anywhere, free, bound or as a binder.
    pub fn all_names(&self) -> BTreeSet<Name> {
        match self {
            GenTerm::Var(x) => [x.clone()].into(),
            GenTerm::App(t, u) => {
                let mut s = t.all_names();
                s.extend(u.all_names());
                s
            }
            GenTerm::Lam(x, t) => {
                let mut s = t.all_names();
                s.insert(x.clone());
                s
            }
            GenTerm::ESub(t, x, u) | GenTerm::LSub(t, x, u) => {
                let mut s = t.all_names();
                s.insert(x.clone());
                s.extend(u.all_names());
                s
            }
            GenTerm::MetaVar(_, deco) => deco.clone(),
        }
    }

    /// Plain term with explicit substitutions: no labels, no metavariables.
    pub fn is_term(&self) -> bool {
        match self {
            GenTerm::Var(_) => true,
            GenTerm::MetaVar(_, _) => false,
            GenTerm::LSub(_, _, _) => false,
            GenTerm::Lam(_, t) => t.is_term(),
            GenTerm::App(t, u) | GenTerm::ESub(t, _, u) => t.is_term() && u.is_term(),
        }
    }

    /// Term possibly containing metavariables, but no labels.
    pub fn is_metaterm(&self) -> bool {
        match self {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => true,
            GenTerm::LSub(_, _, _) => false,
            GenTerm::Lam(_, t) => t.is_metaterm(),
            GenTerm::App(t, u) | GenTerm::ESub(t, _, u) => t.is_metaterm() && u.is_metaterm(),
        }
    }

    pub fn is_pure_lambda(&self) -> bool {
        match self {
            GenTerm::Var(_) => true,
            GenTerm::Lam(_, t) => t.is_pure_lambda(),
            GenTerm::App(t, u) => t.is_pure_lambda() && u.is_pure_lambda(),
            _ => false,
        }
    }

    pub fn contains_lsub(&self) -> bool {
        match self {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => false,
            GenTerm::Lam(_, t) => t.contains_lsub(),
            GenTerm::App(t, u) | GenTerm::ESub(t, _, u) => t.contains_lsub() || u.contains_lsub(),
            GenTerm::LSub(_, _, _) => true,
        }
    }
}

/// Equality mode: plain alpha, alpha plus swaps of independent explicit
/// substitutions, or additionally swaps involving labelled substitutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyMode {
    Alpha,
    E,
    Eu,
}

/// Total-order encoding of a term; equal keys mean equal terms in the mode
/// the key was computed under.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(pub String);

fn enc(t: &GenTerm, env: &mut Vec<Name>, out: &mut String) {
    match t {
        GenTerm::Var(x) => match env.iter().rev().position(|b| b == x) {
            Some(i) => {
                out.push_str("(b ");
                out.push_str(&i.to_string());
                out.push(')');
            }
            None => {
                out.push_str("(f ");
                out.push_str(x);
                out.push(')');
            }
        },
        GenTerm::App(t, u) => {
            out.push_str("(a ");
            enc(t, env, out);
            out.push(' ');
            enc(u, env, out);
            out.push(')');
        }
        GenTerm::Lam(x, t) => {
            out.push_str("(l ");
            env.push(x.clone());
            enc(t, env, out);
            env.pop();
            out.push(')');
        }
        GenTerm::ESub(b, x, u) | GenTerm::LSub(b, x, u) => {
            out.push_str(if matches!(t, GenTerm::ESub(_, _, _)) {
                "(s "
            } else {
                "(u "
            });
            env.push(x.clone());
            enc(b, env, out);
            env.pop();
            out.push(' ');
            enc(u, env, out);
            out.push(')');
        }
        GenTerm::MetaVar(n, deco) => {
            let mut elems: Vec<String> = deco
                .iter()
                .map(|d| {
                    let mut s = String::new();
                    enc(&GenTerm::Var(d.clone()), env, &mut s);
                    s
                })
                .collect();
            elems.sort();
            out.push_str("(m ");
            out.push_str(n);
            for e in elems {
                out.push(' ');
                out.push_str(&e);
            }
            out.push(')');
        }
    }
}

pub fn alpha_key(t: &GenTerm) -> CanonicalKey {
    let mut out = String::new();
    let mut env = Vec::new();
    enc(t, &mut env, &mut out);
    CanonicalKey(out)
}

pub fn alpha_eq(t: &GenTerm, u: &GenTerm) -> bool {
    alpha_key(t) == alpha_key(u)
}

/// Deterministic fresh-name supply that never returns a name in `used`.
pub struct FreshNames {
    used: BTreeSet<Name>,
    counter: usize,
}

impl FreshNames {
    pub fn new(used: BTreeSet<Name>) -> Self {
        FreshNames { used, counter: 0 }
    }

    pub fn for_terms(ts: &[&GenTerm]) -> Self {
        let mut used = BTreeSet::new();
        for t in ts {
            used.extend(t.all_names());
        }
        FreshNames::new(used)
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let stem: String = {
            let trimmed = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
            if trimmed.is_empty() {
                "v".to_string()
            } else {
                trimmed.to_string()
            }
        };
        loop {
            let cand = format!("{stem}{}", self.counter);
            self.counter += 1;
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
        }
    }
}

/// Rename free occurrences of `old` in `t` to `new`; metavariable
/// decorations rename along with everything else.
pub fn rename_free(t: &GenTerm, old: &str, new: &str) -> GenTerm {
    match t {
        GenTerm::Var(x) => {
            if x == old {
                var(new)
            } else {
                t.clone()
            }
        }
        GenTerm::App(a, b) => app(rename_free(a, old, new), rename_free(b, old, new)),
        GenTerm::Lam(x, b) => {
            if x == old {
                t.clone()
            } else {
                lam(x, rename_free(b, old, new))
            }
        }
        GenTerm::ESub(b, x, a) | GenTerm::LSub(b, x, a) => {
            let body = if x == old {
                (**b).clone()
            } else {
                rename_free(b, old, new)
            };
            let arg = rename_free(a, old, new);
            let mk = if matches!(t, GenTerm::ESub(_, _, _)) {
                esub
            } else {
                lsub
            };
            mk(body, x, arg)
        }
        GenTerm::MetaVar(n, deco) => {
            if deco.contains(old) {
                let mut d = deco.clone();
                d.remove(old);
                d.insert(new.to_string());
                GenTerm::MetaVar(n.clone(), d)
            } else {
                t.clone()
            }
        }
    }
}

/// Capture-avoiding meta-level substitution `t{x := v}`. Labels are data,
/// not binders that substitution knows how to cross, so any labelled
/// substitution in `t` is rejected.
pub fn subst(t: &GenTerm, x: &str, v: &GenTerm) -> Result<GenTerm, TermError> {
    match t {
        GenTerm::LSub(_, _, _) => Err(TermError::IllFormedInput(
            "substitution into a labelled term".to_string(),
        )),
        GenTerm::Var(y) => Ok(if y == x { v.clone() } else { t.clone() }),
        GenTerm::MetaVar(_, deco) => Ok(if deco.contains(x) {
            esub(t.clone(), x, v.clone())
        } else {
            t.clone()
        }),
        GenTerm::App(a, b) => Ok(app(subst(a, x, v)?, subst(b, x, v)?)),
        GenTerm::Lam(y, b) => {
            if y == x {
                return Ok(t.clone());
            }
            if v.free_vars().contains(y) && b.free_vars().contains(x) {
                let mut fr = FreshNames::for_terms(&[t, v]);
                fr.reserve(x);
                let y2 = fr.fresh(y);
                let b2 = rename_free(b, y, &y2);
                Ok(lam(&y2, subst(&b2, x, v)?))
            } else {
                Ok(lam(y, subst(b, x, v)?))
            }
        }
        GenTerm::ESub(b, y, a) => {
            let a2 = subst(a, x, v)?;
            if y == x {
                return Ok(esub((**b).clone(), y, a2));
            }
            let mut body_fv = b.free_vars();
            body_fv.remove(y);
            if v.free_vars().contains(y) && body_fv.contains(x) {
                let mut fr = FreshNames::for_terms(&[t, v]);
                fr.reserve(x);
                let y2 = fr.fresh(y);
                let b2 = rename_free(b, y, &y2);
                Ok(esub(subst(&b2, x, v)?, &y2, a2))
            } else {
                Ok(esub(subst(b, x, v)?, y, a2))
            }
        }
    }
}

struct SubNode<'a> {
    outer_lsub: bool,
    inner_lsub: bool,
    inner_body: &'a GenTerm,
    inner_binder: &'a Name,
    inner_arg: &'a GenTerm,
    outer_binder: &'a Name,
    outer_arg: &'a GenTerm,
}

fn as_sub_pair(t: &GenTerm) -> Option<SubNode<'_>> {
    let (outer_lsub, body, ob, oa) = match t {
        GenTerm::ESub(b, x, a) => (false, &**b, x, &**a),
        GenTerm::LSub(b, x, a) => (true, &**b, x, &**a),
        _ => return None,
    };
    let (inner_lsub, ib, ibind, ia) = match body {
        GenTerm::ESub(b, x, a) => (false, &**b, x, &**a),
        GenTerm::LSub(b, x, a) => (true, &**b, x, &**a),
        _ => return None,
    };
    Some(SubNode {
        outer_lsub,
        inner_lsub,
        inner_body: ib,
        inner_binder: ibind,
        inner_arg: ia,
        outer_binder: ob,
        outer_arg: oa,
    })
}

fn mk_sub(lsubbed: bool, body: GenTerm, binder: &str, arg: GenTerm) -> GenTerm {
    if lsubbed {
        lsub(body, binder, arg)
    } else {
        esub(body, binder, arg)
    }
}

/// Swap the two adjacent substitutions at the root of `t` if they are
/// independent. The outer binder must not occur free in the inner body; the
/// inner binder is renamed when it would collide with the outer argument.
fn swap_root(t: &GenTerm, eu: bool) -> Option<GenTerm> {
    let p = as_sub_pair(t)?;
    if !eu && (p.outer_lsub || p.inner_lsub) {
        return None;
    }
    if p.inner_arg.free_vars().contains(p.outer_binder) {
        return None;
    }
    let (mut s, mut b2) = (p.inner_body.clone(), p.inner_binder.clone());
    if p.outer_arg.free_vars().contains(&b2) || b2 == *p.outer_binder {
        let mut fr = FreshNames::for_terms(&[t]);
        let nb = fr.fresh(&b2);
        s = rename_free(&s, &b2, &nb);
        b2 = nb;
    }
    let inner = mk_sub(
        p.outer_lsub,
        s,
        p.outer_binder,
        p.outer_arg.clone(),
    );
    Some(mk_sub(p.inner_lsub, inner, &b2, p.inner_arg.clone()))
}

fn one_swaps(t: &GenTerm, eu: bool, out: &mut Vec<GenTerm>) {
    match t {
        GenTerm::Var(_) | GenTerm::MetaVar(_, _) => {}
        GenTerm::App(a, b) => {
            let mut l = Vec::new();
            one_swaps(a, eu, &mut l);
            out.extend(l.into_iter().map(|n| app(n, (**b).clone())));
            let mut r = Vec::new();
            one_swaps(b, eu, &mut r);
            out.extend(r.into_iter().map(|n| app((**a).clone(), n)));
        }
        GenTerm::Lam(x, b) => {
            let mut l = Vec::new();
            one_swaps(b, eu, &mut l);
            out.extend(l.into_iter().map(|n| lam(x, n)));
        }
        GenTerm::ESub(b, x, a) | GenTerm::LSub(b, x, a) => {
            let is_l = matches!(t, GenTerm::LSub(_, _, _));
            if let Some(sw) = swap_root(t, eu) {
                out.push(sw);
            }
            let mut l = Vec::new();
            one_swaps(b, eu, &mut l);
            out.extend(l.into_iter().map(|n| mk_sub(is_l, n, x, (**a).clone())));
            let mut r = Vec::new();
            one_swaps(a, eu, &mut r);
            out.extend(r.into_iter().map(|n| mk_sub(is_l, (**b).clone(), x, n)));
        }
    }
}

pub const DEFAULT_CLASS_BOUND: usize = 1024;

/// The equivalence class of `t` under the chosen mode, as representatives
/// sorted by alpha key. Alpha mode returns the singleton.
pub fn e_class(t: &GenTerm, mode: KeyMode, bound: usize) -> Result<Vec<GenTerm>, TermError> {
    if mode == KeyMode::Alpha {
        return Ok(vec![t.clone()]);
    }
    let eu = mode == KeyMode::Eu;
    let mut seen: BTreeMap<CanonicalKey, GenTerm> = BTreeMap::new();
    seen.insert(alpha_key(t), t.clone());
    let mut work = vec![t.clone()];
    while let Some(cur) = work.pop() {
        let mut swaps = Vec::new();
        one_swaps(&cur, eu, &mut swaps);
        for n in swaps {
            let k = alpha_key(&n);
            if !seen.contains_key(&k) {
                if seen.len() >= bound {
                    return Err(TermError::FuelExhausted(format!(
                        "equivalence class larger than {bound}"
                    )));
                }
                seen.insert(k, n.clone());
                work.push(n);
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Canonical key in the given mode: minimum alpha key over the class.
pub fn canonical_key(t: &GenTerm, mode: KeyMode) -> Result<CanonicalKey, TermError> {
    canonical_key_bounded(t, mode, DEFAULT_CLASS_BOUND)
}

pub fn canonical_key_bounded(
    t: &GenTerm,
    mode: KeyMode,
    bound: usize,
) -> Result<CanonicalKey, TermError> {
    if mode == KeyMode::Alpha {
        return Ok(alpha_key(t));
    }
    let class = e_class(t, mode, bound)?;
    Ok(class.iter().map(alpha_key).min().expect("nonempty class"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zyx() -> GenTerm {
        app(app(var("z"), var("y")), var("x"))
    }

    fn running_example() -> GenTerm {
        esub(esub(zyx(), "y", app(var("x"), var("x"))), "x", var("v"))
    }

    #[test]
    fn free_vars_of_substituted_application() {
        let t = esub(zyx(), "y", app(var("x"), var("x")));
        let fv: Vec<_> = t.free_vars().into_iter().collect();
        assert_eq!(fv, ["x", "z"]);
    }

    #[test]
    fn bound_vars_include_substitution_binders() {
        let t = esub(lam("x", var("x")), "y", var("z"));
        let bv: Vec<_> = t.bound_vars().into_iter().collect();
        assert_eq!(bv, ["x", "y"]);
    }

    #[test]
    fn size_counts_substitution_nodes() {
        assert_eq!(running_example().size(), 11);
        assert_eq!(var("x").size(), 1);
    }

    #[test]
    fn alpha_equality_ignores_binder_names() {
        assert!(alpha_eq(&lam("x", var("x")), &lam("y", var("y"))));
        assert!(!alpha_eq(
            &lam("x", lam("y", var("x"))),
            &lam("x", lam("y", var("y")))
        ));
        assert!(alpha_eq(
            &esub(lam("y", var("x")), "x", var("y")),
            &esub(lam("z", var("x'")), "x'", var("y"))
        ));
    }

    #[test]
    fn alpha_renames_metavariable_decorations() {
        let t = lam("x", metavar("X", &["x", "y"]));
        let u = lam("z", metavar("X", &["z", "y"]));
        assert!(alpha_eq(&t, &u));
        assert!(!alpha_eq(&t, &lam("z", metavar("X", &["x", "y"]))));
    }

    #[test]
    fn subst_avoids_capture() {
        // (\y.x){x := y} must not capture the substituted y
        let t = subst(&lam("y", var("x")), "x", &var("y")).unwrap();
        assert!(alpha_eq(&t, &lam("z", var("y"))));
    }

    #[test]
    fn subst_on_metavariable_suspends() {
        let t = subst(&metavar("X", &["x", "y"]), "x", &var("v")).unwrap();
        assert_eq!(t, esub(metavar("X", &["x", "y"]), "x", var("v")));
        let u = subst(&metavar("X", &["y"]), "x", &var("v")).unwrap();
        assert_eq!(u, metavar("X", &["y"]));
    }

    #[test]
    fn subst_rejects_labelled_terms() {
        let t = lsub(var("x"), "x", var("u"));
        assert!(matches!(
            subst(&t, "x", &var("v")),
            Err(TermError::IllFormedInput(_))
        ));
    }

    #[test]
    fn independent_substitutions_commute() {
        let t = esub(esub(var("x"), "y", var("a")), "z", var("b"));
        assert_eq!(e_class(&t, KeyMode::E, 64).unwrap().len(), 2);

        let three = esub(
            esub(esub(var("x"), "x1", var("a")), "x2", var("b")),
            "x3",
            var("c"),
        );
        assert_eq!(e_class(&three, KeyMode::E, 64).unwrap().len(), 6);
    }

    #[test]
    fn dependent_substitutions_do_not_commute() {
        // the outer substitution feeds the inner body, so order matters
        let t = esub(esub(var("x"), "y", var("z")), "z", var("w"));
        assert_eq!(e_class(&t, KeyMode::E, 64).unwrap().len(), 1);
        assert_eq!(e_class(&running_example(), KeyMode::E, 64).unwrap().len(), 1);
    }

    #[test]
    fn swap_renames_colliding_inner_binder() {
        // x[y/a][z/y]: the inner binder shares its name with a free variable
        // of the outer argument, so the swap has to rename it
        let t = esub(esub(var("x"), "y", var("a")), "z", var("y"));
        let class = e_class(&t, KeyMode::E, 64).unwrap();
        assert_eq!(class.len(), 2);
        let keys: BTreeSet<_> = class.iter().map(alpha_key).collect();
        assert!(keys.contains(&alpha_key(&esub(
            esub(var("x"), "z", var("y")),
            "y0",
            var("a")
        ))));
    }

    #[test]
    fn canonical_keys_agree_across_a_class() {
        let t = esub(esub(var("x"), "y", var("a")), "z", var("b"));
        let u = esub(esub(var("x"), "z", var("b")), "y", var("a"));
        assert_ne!(alpha_key(&t), alpha_key(&u));
        assert_eq!(
            canonical_key(&t, KeyMode::E).unwrap(),
            canonical_key(&u, KeyMode::E).unwrap()
        );
        assert_ne!(
            canonical_key(&t, KeyMode::Alpha).unwrap(),
            canonical_key(&u, KeyMode::Alpha).unwrap()
        );
    }

    #[test]
    fn labelled_swaps_need_the_eu_mode() {
        let t = lsub(lsub(app(var("x"), var("y")), "x", var("s1")), "y", var("s2"));
        assert_eq!(e_class(&t, KeyMode::E, 64).unwrap().len(), 1);
        assert_eq!(e_class(&t, KeyMode::Eu, 64).unwrap().len(), 2);

        let mixed = esub(lsub(var("x"), "x", var("s1")), "y", var("z"));
        assert_eq!(e_class(&mixed, KeyMode::Eu, 64).unwrap().len(), 2);
    }

    #[test]
    fn class_bound_is_reported() {
        let three = esub(
            esub(esub(var("x"), "x1", var("a")), "x2", var("b")),
            "x3",
            var("c"),
        );
        assert!(matches!(
            e_class(&three, KeyMode::E, 3),
            Err(TermError::FuelExhausted(_))
        ));
    }

    #[test]
    fn fresh_names_never_reuse_input_names() {
        let mut fr = FreshNames::new(["x".to_string(), "x0".to_string()].into());
        assert_eq!(fr.fresh("x"), "x1");
        assert_eq!(fr.fresh("x"), "x2");
        assert_eq!(fr.fresh("y42"), "y3");
    }

    #[test]
    fn composition_of_meta_substitutions_up_to_e() {
        // t{x:=u}{y:=v} and t{y:=v}{x:=u{y:=v}} for x not free in v agree
        // under the substitution-swap equations even on metavariables
        let t = metavar("X", &["x", "y"]);
        let u = app(var("y"), var("w"));
        let v = var("z");
        let lhs = subst(&subst(&t, "x", &u).unwrap(), "y", &v).unwrap();
        let uv = subst(&u, "y", &v).unwrap();
        let rhs = subst(&subst(&t, "y", &v).unwrap(), "x", &uv).unwrap();
        assert_ne!(alpha_key(&lhs), alpha_key(&rhs));
        assert_eq!(
            canonical_key(&lhs, KeyMode::E).unwrap(),
            canonical_key(&rhs, KeyMode::E).unwrap()
        );
    }
}
