//! Simple and intersection types for explicit-substitution terms.
//!
//! Intersection subtyping here is flat: `a <= b` holds when every
//! top-level component of `b` occurs among the top-level components of
//! `a`. Components are compared structurally, so `(a&b)->c` and `a->c`
//! are unrelated. Two independent implementations are kept: the flat
//! multiset check, and a rule-level search that only uses the
//! introduction and elimination rules for intersections.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::syntax::{parse_term, parse_type, print_term, print_type};
use crate::term::{GenTerm, Name};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Type {
    Atom(Name),
    Arrow(Box<Type>, Box<Type>),
    Inter(Box<Type>, Box<Type>),
}

pub fn atom(n: &str) -> Type {
    Type::Atom(n.to_string())
}

pub fn arrow(a: Type, b: Type) -> Type {
    Type::Arrow(Box::new(a), Box::new(b))
}

pub fn inter(a: Type, b: Type) -> Type {
    Type::Inter(Box::new(a), Box::new(b))
}

#[derive(Debug, Error)]
pub enum TypeError {
    #[error("ill-formed input: {0}")]
    IllFormedInput(String),
    #[error("invalid derivation at {path}: {message}")]
    InvalidDerivation { path: String, message: String },
}

/// Top-level intersection components, left to right.
pub fn flatten(ty: &Type) -> Vec<&Type> {
    match ty {
        Type::Inter(l, r) => {
            let mut out = flatten(l);
            out.extend(flatten(r));
            out
        }
        _ => vec![ty],
    }
}

/// `a` is usable wherever `b` is expected: every component of `b` occurs
/// in `a`.
pub fn subtype(a: &Type, b: &Type) -> bool {
    let fa = flatten(a);
    flatten(b).iter().all(|c| fa.contains(c))
}

/// The same relation decided by searching derivations in the preorder's
/// own rules — reflexivity, the two projections, transitivity and
/// greatest-lower-bound introduction — bounded by derivation depth.
pub fn subtype_search(a: &Type, b: &Type, depth: usize) -> bool {
    if depth == 0 {
        return false;
    }
    if a == b {
        return true;
    }
    if let Type::Inter(l, r) = b {
        if subtype_search(a, l, depth - 1) && subtype_search(a, r, depth - 1) {
            return true;
        }
    }
    // projection followed by anything, covering transitivity through
    // either component
    if let Type::Inter(l, r) = a {
        if subtype_search(l, b, depth - 1) || subtype_search(r, b, depth - 1) {
            return true;
        }
    }
    false
}

pub type Environment = BTreeMap<Name, Type>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TyRule {
    Ax,
    App,
    Abs,
    Subs,
    InterI,
    InterE,
}

impl TyRule {
    pub fn name(self) -> &'static str {
        match self {
            TyRule::Ax => "ax",
            TyRule::App => "app",
            TyRule::Abs => "abs",
            TyRule::Subs => "subs",
            TyRule::InterI => "interI",
            TyRule::InterE => "interE",
        }
    }

    pub fn from_name(s: &str) -> Option<TyRule> {
        Some(match s {
            "ax" => TyRule::Ax,
            "app" => TyRule::App,
            "abs" => TyRule::Abs,
            "subs" => TyRule::Subs,
            "interI" | "∩I" => TyRule::InterI,
            "interE" | "∩E" => TyRule::InterE,
            _ => return None,
        })
    }
}

/// A full derivation tree. Every node quotes its environment, subject and
/// type, so checking is local.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDerivation {
    pub rule: TyRule,
    pub env: Environment,
    pub term: GenTerm,
    pub ty: Type,
    pub premises: Vec<TypeDerivation>,
}

impl TypeDerivation {
    pub fn to_json(&self) -> serde_json::Value {
        let env: Vec<serde_json::Value> = self
            .env
            .iter()
            .map(|(k, v)| json!([k, print_type(v)]))
            .collect();
        json!({
            "rule": self.rule.name(),
            "env": env,
            "term": print_term(&self.term),
            "type": print_type(&self.ty),
            "premises": self.premises.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TypeDerivation, TypeError> {
        let bad = |m: &str| TypeError::IllFormedInput(m.to_string());
        let rule = TyRule::from_name(
            v.get("rule")
                .and_then(|r| r.as_str())
                .ok_or_else(|| bad("missing rule"))?,
        )
        .ok_or_else(|| bad("unknown rule"))?;
        let mut env = Environment::new();
        match v.get("env") {
            Some(serde_json::Value::Array(pairs)) => {
                for p in pairs {
                    let pair = p.as_array().filter(|a| a.len() == 2);
                    let (k, tv) = match pair {
                        Some(a) => (a[0].as_str(), a[1].as_str()),
                        None => (None, None),
                    };
                    let k = k.ok_or_else(|| bad("env entries must be [name, type] pairs"))?;
                    let txt = tv.ok_or_else(|| bad("env types must be strings"))?;
                    let ty = parse_type(txt).map_err(|e| bad(&format!("env type: {e}")))?;
                    env.insert(k.to_string(), ty);
                }
            }
            Some(serde_json::Value::Object(obj)) => {
                for (k, tv) in obj {
                    let txt = tv.as_str().ok_or_else(|| bad("env types must be strings"))?;
                    let ty = parse_type(txt).map_err(|e| bad(&format!("env type: {e}")))?;
                    env.insert(k.clone(), ty);
                }
            }
            None => {}
            Some(_) => return Err(bad("env must be a list of pairs")),
        }
        let term = parse_term(
            v.get("term")
                .and_then(|t| t.as_str())
                .ok_or_else(|| bad("missing term"))?,
        )
        .map_err(|e| bad(&format!("term: {e}")))?;
        let ty = parse_type(
            v.get("type")
                .and_then(|t| t.as_str())
                .ok_or_else(|| bad("missing type"))?,
        )
        .map_err(|e| bad(&format!("type: {e}")))?;
        let mut premises = Vec::new();
        if let Some(arr) = v.get("premises").and_then(|p| p.as_array()) {
            for p in arr {
                premises.push(TypeDerivation::from_json(p)?);
            }
        }
        Ok(TypeDerivation {
            rule,
            env,
            term,
            ty,
            premises,
        })
    }
}

fn fail(path: &str, message: &str) -> TypeError {
    TypeError::InvalidDerivation {
        path: if path.is_empty() { "root".to_string() } else { path.to_string() },
        message: message.to_string(),
    }
}

/// Check every node of a derivation against its rule.
pub fn check_derivation(d: &TypeDerivation) -> Result<(), TypeError> {
    fn go(d: &TypeDerivation, path: &str) -> Result<(), TypeError> {
        let want = |n: usize| -> Result<(), TypeError> {
            if d.premises.len() == n {
                Ok(())
            } else {
                Err(fail(path, &format!("expected {n} premises, got {}", d.premises.len())))
            }
        };
        match d.rule {
            TyRule::Ax => {
                want(0)?;
                let x = match &d.term {
                    GenTerm::Var(x) => x,
                    _ => return Err(fail(path, "axiom subject must be a variable")),
                };
                match d.env.get(x) {
                    Some(a) if *a == d.ty => {}
                    Some(_) => return Err(fail(path, "axiom type differs from the environment")),
                    None => return Err(fail(path, "variable not bound in the environment")),
                }
            }
            TyRule::App => {
                want(2)?;
                let (f, u) = match &d.term {
                    GenTerm::App(f, u) => (&**f, &**u),
                    _ => return Err(fail(path, "subject must be an application")),
                };
                let (p1, p2) = (&d.premises[0], &d.premises[1]);
                if p1.env != d.env || p2.env != d.env {
                    return Err(fail(path, "premise environments must match"));
                }
                if p1.term != *f || p2.term != *u {
                    return Err(fail(path, "premise subjects must be the two parts"));
                }
                match &p1.ty {
                    Type::Arrow(a, b) if **a == p2.ty && **b == d.ty => {}
                    _ => return Err(fail(path, "function premise must have a matching arrow type")),
                }
            }
            TyRule::Abs => {
                want(1)?;
                let (x, body) = match &d.term {
                    GenTerm::Lam(x, b) => (x, &**b),
                    _ => return Err(fail(path, "subject must be an abstraction")),
                };
                let (a, b) = match &d.ty {
                    Type::Arrow(a, b) => (&**a, &**b),
                    _ => return Err(fail(path, "abstraction type must be an arrow")),
                };
                let p = &d.premises[0];
                let mut env2 = d.env.clone();
                env2.insert(x.clone(), a.clone());
                if p.env != env2 {
                    return Err(fail(path, "premise environment must bind the parameter"));
                }
                if p.term != *body || p.ty != *b {
                    return Err(fail(path, "premise must type the body at the codomain"));
                }
            }
            TyRule::Subs => {
                want(2)?;
                let (body, x, u) = match &d.term {
                    GenTerm::ESub(b, x, u) => (&**b, x, &**u),
                    _ => return Err(fail(path, "subject must carry a substitution")),
                };
                let (pu, pb) = (&d.premises[0], &d.premises[1]);
                if pu.env != d.env {
                    return Err(fail(path, "argument premise environment must match"));
                }
                if pu.term != *u {
                    return Err(fail(path, "argument premise must type the substituted term"));
                }
                let mut env2 = d.env.clone();
                env2.insert(x.clone(), pu.ty.clone());
                if pb.env != env2 {
                    return Err(fail(path, "body premise environment must bind the variable"));
                }
                if pb.term != *body || pb.ty != d.ty {
                    return Err(fail(path, "body premise must type the body at the conclusion"));
                }
            }
            TyRule::InterI => {
                want(2)?;
                let (a, b) = match &d.ty {
                    Type::Inter(a, b) => (&**a, &**b),
                    _ => return Err(fail(path, "conclusion must be an intersection")),
                };
                for (i, (p, side)) in d.premises.iter().zip([a, b]).enumerate() {
                    if p.env != d.env || p.term != d.term {
                        return Err(fail(path, &format!("premise {i} must share the judgment")));
                    }
                    if p.ty != *side {
                        return Err(fail(path, &format!("premise {i} must give that component")));
                    }
                }
            }
            TyRule::InterE => {
                want(1)?;
                let p = &d.premises[0];
                if p.env != d.env || p.term != d.term {
                    return Err(fail(path, "premise must share the judgment"));
                }
                match &p.ty {
                    Type::Inter(a, b) if **a == d.ty || **b == d.ty => {}
                    _ => return Err(fail(path, "premise must be an intersection with this component")),
                }
            }
        }
        for (i, p) in d.premises.iter().enumerate() {
            go(p, &format!("{path}.{i}"))?;
        }
        Ok(())
    }
    go(d, "")
}

fn ax(env: &Environment, x: &str, ty: Type) -> TypeDerivation {
    TypeDerivation {
        rule: TyRule::Ax,
        env: env.clone(),
        term: GenTerm::Var(x.to_string()),
        ty,
        premises: vec![],
    }
}

/// Adjust a derivation of Γ ⊢ t : A into one of Γ ⊢ t : B when A is a
/// subtype of B, by eliminating down to the needed components and
/// reintroducing.
fn upcast(d: TypeDerivation, goal: &Type) -> Option<TypeDerivation> {
    if d.ty == *goal {
        return Some(d);
    }
    fn extract(d: &TypeDerivation, want: &Type) -> Option<TypeDerivation> {
        if d.ty == *want {
            return Some(d.clone());
        }
        if let Type::Inter(l, r) = &d.ty {
            for side in [l, r] {
                let step = TypeDerivation {
                    rule: TyRule::InterE,
                    env: d.env.clone(),
                    term: d.term.clone(),
                    ty: (**side).clone(),
                    premises: vec![d.clone()],
                };
                if let Some(found) = extract(&step, want) {
                    return Some(found);
                }
            }
        }
        None
    }
    fn build(d: &TypeDerivation, goal: &Type) -> Option<TypeDerivation> {
        if let Some(direct) = extract(d, goal) {
            return Some(direct);
        }
        if let Type::Inter(l, r) = goal {
            let pl = build(d, l)?;
            let pr = build(d, r)?;
            return Some(TypeDerivation {
                rule: TyRule::InterI,
                env: d.env.clone(),
                term: d.term.clone(),
                ty: goal.clone(),
                premises: vec![pl, pr],
            });
        }
        None
    }
    build(&d, goal)
}

fn candidate_types(env: &Environment, goal: &Type) -> Vec<Type> {
    fn collect(ty: &Type, out: &mut Vec<Type>) {
        if !out.contains(ty) {
            out.push(ty.clone());
        }
        match ty {
            Type::Atom(_) => {}
            Type::Arrow(a, b) | Type::Inter(a, b) => {
                collect(a, out);
                collect(b, out);
            }
        }
    }
    let mut out = Vec::new();
    for ty in env.values() {
        collect(ty, &mut out);
    }
    collect(goal, &mut out);
    out.sort();
    out
}

/// Bounded backward search for a derivation of Γ ⊢ t : A, allowing the
/// intersection rules to mediate between what the environment gives and
/// what a position needs. Returns the derivation when one is found within
/// the budget.
pub fn check_judgment_upto_subtype(
    env: &Environment,
    t: &GenTerm,
    goal: &Type,
    budget: usize,
) -> Option<TypeDerivation> {
    let cands = candidate_types(env, goal);
    let mut fuel = budget;
    search(env, t, goal, &cands, &mut fuel)
}

fn search(
    env: &Environment,
    t: &GenTerm,
    goal: &Type,
    cands: &[Type],
    fuel: &mut usize,
) -> Option<TypeDerivation> {
    if *fuel == 0 {
        return None;
    }
    *fuel -= 1;
    match t {
        GenTerm::Var(x) => {
            let a = env.get(x)?;
            if subtype(a, goal) {
                upcast(ax(env, x, a.clone()), goal)
            } else {
                None
            }
        }
        GenTerm::Lam(x, body) => match goal {
            Type::Arrow(a, b) => {
                let mut env2 = env.clone();
                env2.insert(x.clone(), (**a).clone());
                let p = search(&env2, body, b, cands, fuel)?;
                Some(TypeDerivation {
                    rule: TyRule::Abs,
                    env: env.clone(),
                    term: t.clone(),
                    ty: goal.clone(),
                    premises: vec![p],
                })
            }
            Type::Inter(l, r) => {
                let pl = search(env, t, l, cands, fuel)?;
                let pr = search(env, t, r, cands, fuel)?;
                Some(TypeDerivation {
                    rule: TyRule::InterI,
                    env: env.clone(),
                    term: t.clone(),
                    ty: goal.clone(),
                    premises: vec![pl, pr],
                })
            }
            Type::Atom(_) => None,
        },
        GenTerm::App(f, u) => {
            if let Type::Inter(l, r) = goal {
                if let Some(pl) = search(env, t, l, cands, fuel) {
                    if let Some(pr) = search(env, t, r, cands, fuel) {
                        return Some(TypeDerivation {
                            rule: TyRule::InterI,
                            env: env.clone(),
                            term: t.clone(),
                            ty: goal.clone(),
                            premises: vec![pl, pr],
                        });
                    }
                }
            }
            for b in cands {
                let fty = arrow(b.clone(), goal.clone());
                if let Some(p1) = search(env, f, &fty, cands, fuel) {
                    if let Some(p2) = search(env, u, b, cands, fuel) {
                        return Some(TypeDerivation {
                            rule: TyRule::App,
                            env: env.clone(),
                            term: t.clone(),
                            ty: goal.clone(),
                            premises: vec![p1, p2],
                        });
                    }
                }
            }
            None
        }
        GenTerm::ESub(body, x, u) => {
            for b in cands {
                if let Some(pu) = search(env, u, b, cands, fuel) {
                    let mut env2 = env.clone();
                    env2.insert(x.clone(), b.clone());
                    if let Some(pb) = search(&env2, body, goal, cands, fuel) {
                        return Some(TypeDerivation {
                            rule: TyRule::Subs,
                            env: env.clone(),
                            term: t.clone(),
                            ty: goal.clone(),
                            premises: vec![pu, pb],
                        });
                    }
                }
            }
            None
        }
        GenTerm::LSub(_, _, _) | GenTerm::MetaVar(_, _) => None,
    }
}

// ---------------------------------------------------------------------
// simple-type inference

#[derive(Clone, Debug, PartialEq, Eq)]
enum UTy {
    V(usize),
    Atom(Name),
    Arrow(Box<UTy>, Box<UTy>),
}

struct Unifier {
    bind: Vec<Option<UTy>>,
}

impl Unifier {
    fn new() -> Self {
        Unifier { bind: Vec::new() }
    }

    fn fresh(&mut self) -> UTy {
        self.bind.push(None);
        UTy::V(self.bind.len() - 1)
    }

    fn head(&self, t: &UTy) -> UTy {
        let mut cur = t.clone();
        while let UTy::V(i) = cur {
            match &self.bind[i] {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, v: usize, t: &UTy) -> bool {
        match self.head(t) {
            UTy::V(w) => w == v,
            UTy::Atom(_) => false,
            UTy::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn unify(&mut self, a: &UTy, b: &UTy) -> bool {
        let (a, b) = (self.head(a), self.head(b));
        match (a, b) {
            (UTy::V(i), UTy::V(j)) if i == j => true,
            (UTy::V(i), other) | (other, UTy::V(i)) => {
                if self.occurs(i, &other) {
                    false
                } else {
                    self.bind[i] = Some(other);
                    true
                }
            }
            (UTy::Atom(x), UTy::Atom(y)) => x == y,
            (UTy::Arrow(a1, b1), UTy::Arrow(a2, b2)) => {
                self.unify(&a1, &a2) && self.unify(&b1, &b2)
            }
            _ => false,
        }
    }

    /// Render with fresh atoms named in first-encounter order.
    fn render(&self, t: &UTy, names: &mut BTreeMap<usize, String>) -> Type {
        match self.head(t) {
            UTy::V(i) => {
                let n = names.len();
                let name = names.entry(i).or_insert_with(|| {
                    let letter = (b'a' + (n % 26) as u8) as char;
                    let round = n / 26;
                    if round == 0 {
                        letter.to_string()
                    } else {
                        format!("{letter}{round}")
                    }
                });
                Type::Atom(name.clone())
            }
            UTy::Atom(n) => Type::Atom(n),
            UTy::Arrow(a, b) => arrow(self.render(&a, names), self.render(&b, names)),
        }
    }
}

fn rigid(ty: &Type) -> Result<UTy, TypeError> {
    match ty {
        Type::Atom(n) => Ok(UTy::Atom(n.clone())),
        Type::Arrow(a, b) => Ok(UTy::Arrow(Box::new(rigid(a)?), Box::new(rigid(b)?))),
        Type::Inter(_, _) => Err(TypeError::IllFormedInput(
            "simple-type inference does not accept intersections".to_string(),
        )),
    }
}

/// Principal simple type of a term, with the environment fixing the types
/// of some free variables. Returns the type with atoms renamed to a, b,
/// c, ... in order of first appearance, or None when no simple type
/// exists.
pub fn infer_simple(env: &Environment, t: &GenTerm) -> Result<Option<Type>, TypeError> {
    let mut un = Unifier::new();
    let mut scope: BTreeMap<Name, UTy> = BTreeMap::new();
    for (x, ty) in env {
        scope.insert(x.clone(), rigid(ty)?);
    }
    fn go(
        t: &GenTerm,
        scope: &mut BTreeMap<Name, UTy>,
        un: &mut Unifier,
    ) -> Result<Option<UTy>, TypeError> {
        Ok(match t {
            GenTerm::Var(x) => {
                let ty = scope.entry(x.clone()).or_insert_with(|| un.fresh());
                Some(ty.clone())
            }
            GenTerm::App(f, u) => {
                let (Some(tf), Some(tu)) = (go(f, scope, un)?, go(u, scope, un)?) else {
                    return Ok(None);
                };
                let r = un.fresh();
                if un.unify(&tf, &UTy::Arrow(Box::new(tu), Box::new(r.clone()))) {
                    Some(r)
                } else {
                    None
                }
            }
            GenTerm::Lam(x, body) => {
                let a = un.fresh();
                let saved = scope.insert(x.clone(), a.clone());
                let tb = go(body, scope, un)?;
                match saved {
                    Some(old) => scope.insert(x.clone(), old),
                    None => scope.remove(x),
                };
                let Some(tb) = tb else { return Ok(None) };
                Some(UTy::Arrow(Box::new(a), Box::new(tb)))
            }
            GenTerm::ESub(body, x, u) => {
                let Some(tu) = go(u, scope, un)? else {
                    return Ok(None);
                };
                let saved = scope.insert(x.clone(), tu);
                let tb = go(body, scope, un)?;
                match saved {
                    Some(old) => scope.insert(x.clone(), old),
                    None => scope.remove(x),
                };
                tb
            }
            GenTerm::LSub(_, _, _) | GenTerm::MetaVar(_, _) => {
                return Err(TypeError::IllFormedInput(
                    "simple-type inference is defined on plain terms".to_string(),
                ))
            }
        })
    }
    let mut scope2 = scope;
    match go(t, &mut scope2, &mut un)? {
        None => Ok(None),
        Some(ty) => Ok(Some(un.render(&ty, &mut BTreeMap::new()))),
    }
}

/// Turn every explicit substitution back into a redex: t[x/u] becomes
/// (\x.t) u, recursively.
pub fn revb(t: &GenTerm) -> Result<GenTerm, TypeError> {
    Ok(match t {
        GenTerm::Var(_) => t.clone(),
        GenTerm::App(l, r) => GenTerm::App(Box::new(revb(l)?), Box::new(revb(r)?)),
        GenTerm::Lam(x, b) => GenTerm::Lam(x.clone(), Box::new(revb(b)?)),
        GenTerm::ESub(b, x, u) => GenTerm::App(
            Box::new(GenTerm::Lam(x.clone(), Box::new(revb(b)?))),
            Box::new(revb(u)?),
        ),
        GenTerm::LSub(_, _, _) | GenTerm::MetaVar(_, _) => {
            return Err(TypeError::IllFormedInput(
                "the redex image is defined on plain terms".to_string(),
            ))
        }
    })
}

/// A trace of `B` steps from `revb(t)` back to `t`, contracting exactly
/// the redexes the image introduced, outside in. Empty when `t` carries
/// no substitutions.
pub fn revb_unfold_trace(t: &GenTerm) -> Result<Vec<crate::rewrite::Step>, TypeError> {
    use crate::rewrite::{embed_steps, RuleId, Step};
    use crate::term::{app, esub, lam};

    fn rec(t: &GenTerm) -> Result<(GenTerm, Vec<Step>), TypeError> {
        Ok(match t {
            GenTerm::Var(_) => (t.clone(), Vec::new()),
            GenTerm::Lam(x, b) => {
                let (rb, steps) = rec(b)?;
                let x2 = x.clone();
                (
                    lam(x, rb),
                    embed_steps(steps, &[0], move |s| lam(&x2, s)),
                )
            }
            GenTerm::App(l, r) => {
                let (rl, sl) = rec(l)?;
                let (rr, sr) = rec(r)?;
                let rr2 = rr.clone();
                let l2 = (**l).clone();
                let mut steps = embed_steps(sl, &[0], move |s| app(s, rr2.clone()));
                steps.extend(embed_steps(sr, &[1], move |s| app(l2.clone(), s)));
                (app(rl, rr), steps)
            }
            GenTerm::ESub(b, x, u) => {
                let (rb, sb) = rec(b)?;
                let (ru, su) = rec(u)?;
                let before = app(lam(x, rb.clone()), ru.clone());
                let after = esub(rb.clone(), x, ru.clone());
                let mut steps = vec![Step {
                    rule: RuleId::B,
                    position: Vec::new(),
                    before: before.clone(),
                    after,
                }];
                let (x2, x3) = (x.clone(), x.clone());
                let ru2 = ru.clone();
                let b2 = (**b).clone();
                steps.extend(embed_steps(sb, &[0], move |s| esub(s, &x2, ru2.clone())));
                steps.extend(embed_steps(su, &[1], move |s| esub(b2.clone(), &x3, s)));
                (before, steps)
            }
            GenTerm::LSub(_, _, _) | GenTerm::MetaVar(_, _) => {
                return Err(TypeError::IllFormedInput(
                    "the redex image is defined on plain terms".to_string(),
                ))
            }
        })
    }
    Ok(rec(t)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn tm(s: &str) -> GenTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn flat_subtyping_facts() {
        assert!(subtype(&ty("a & b"), &ty("a")));
        assert!(!subtype(&ty("a"), &ty("a & b")));
        assert!(subtype(&ty("a & b & c"), &ty("b & a")));
        assert!(subtype(&ty("(a -> b) & c"), &ty("c")));
        assert!(subtype(&ty("a -> b"), &ty("a -> b")));
        assert!(!subtype(&ty("(a & b) -> c"), &ty("a -> c")));
    }

    #[test]
    fn the_two_subtype_routes_agree() {
        let pool = [
            "a", "b", "a & b", "b & a", "a & a", "a -> b", "(a & b) -> c",
            "a & (b & c)", "(a & b) & c", "a & b & c", "(a -> b) & c",
        ];
        for x in pool {
            for y in pool {
                assert_eq!(
                    subtype(&ty(x), &ty(y)),
                    subtype_search(&ty(x), &ty(y), 6),
                    "{x} <= {y}"
                );
            }
        }
    }

    #[test]
    fn identity_derivation_checks() {
        let env = Environment::new();
        let mut env_x = env.clone();
        env_x.insert("x".to_string(), ty("a"));
        let d = TypeDerivation {
            rule: TyRule::Abs,
            env,
            term: tm("\\x.x"),
            ty: ty("a -> a"),
            premises: vec![TypeDerivation {
                rule: TyRule::Ax,
                env: env_x,
                term: tm("x"),
                ty: ty("a"),
                premises: vec![],
            }],
        };
        check_derivation(&d).unwrap();

        let mut bad = d.clone();
        bad.ty = ty("a -> b");
        assert!(check_derivation(&bad).is_err());
    }

    #[test]
    fn substitution_derivation_checks() {
        // u : a under x:a entails x[x/u] : a with premises in the order
        // argument first, body second
        let mut env = Environment::new();
        env.insert("u".to_string(), ty("a"));
        let mut env_b = env.clone();
        env_b.insert("x".to_string(), ty("a"));
        let d = TypeDerivation {
            rule: TyRule::Subs,
            env: env.clone(),
            term: tm("x[x/u]"),
            ty: ty("a"),
            premises: vec![
                TypeDerivation {
                    rule: TyRule::Ax,
                    env,
                    term: tm("u"),
                    ty: ty("a"),
                    premises: vec![],
                },
                TypeDerivation {
                    rule: TyRule::Ax,
                    env: env_b,
                    term: tm("x"),
                    ty: ty("a"),
                    premises: vec![],
                },
            ],
        };
        check_derivation(&d).unwrap();
    }

    #[test]
    fn intersection_rules_commute_components() {
        // x : a & b proves x : b & a by two eliminations and one
        // introduction
        let mut env = Environment::new();
        env.insert("x".to_string(), ty("a & b"));
        let axd = TypeDerivation {
            rule: TyRule::Ax,
            env: env.clone(),
            term: tm("x"),
            ty: ty("a & b"),
            premises: vec![],
        };
        let pick = |side: &str| TypeDerivation {
            rule: TyRule::InterE,
            env: env.clone(),
            term: tm("x"),
            ty: ty(side),
            premises: vec![axd.clone()],
        };
        let d = TypeDerivation {
            rule: TyRule::InterI,
            env: env.clone(),
            term: tm("x"),
            ty: ty("b & a"),
            premises: vec![pick("b"), pick("a")],
        };
        check_derivation(&d).unwrap();
    }

    #[test]
    fn judgment_search_uses_subtyping() {
        let env = Environment::new();
        let d = check_judgment_upto_subtype(&env, &tm("\\x.x"), &ty("(a & b) -> a"), 10_000)
            .expect("derivable");
        check_derivation(&d).unwrap();

        let d = check_judgment_upto_subtype(&env, &tm("\\x.x x"), &ty("((a -> b) & a) -> b"), 100_000)
            .expect("self application types with an intersection");
        check_derivation(&d).unwrap();

        assert!(check_judgment_upto_subtype(&env, &tm("\\x.x"), &ty("a -> b"), 10_000).is_none());
    }

    #[test]
    fn judgment_search_types_substitution_subjects() {
        let env = Environment::new();
        let d = check_judgment_upto_subtype(&env, &tm("x[x/\\y.y]"), &ty("a -> a"), 100_000)
            .expect("derivable");
        check_derivation(&d).unwrap();
    }

    #[test]
    fn derivation_json_round_trips() {
        let env = Environment::new();
        let d = check_judgment_upto_subtype(&env, &tm("\\x.x"), &ty("(a & b) -> a"), 10_000).unwrap();
        let j = d.to_json();
        let d2 = TypeDerivation::from_json(&j).unwrap();
        assert_eq!(d, d2);
        check_derivation(&d2).unwrap();
    }

    #[test]
    fn inference_matches_known_principal_types() {
        let env = Environment::new();
        let show = |t: &str| {
            infer_simple(&env, &tm(t))
                .unwrap()
                .map(|ty| print_type(&ty))
        };
        assert_eq!(show("\\x.x"), Some("a->a".to_string()));
        assert_eq!(show("x[x/\\y.y]"), Some("a->a".to_string()));
        assert_eq!(show("\\x.\\y.x"), Some("a->b->a".to_string()));
        assert_eq!(show("\\x.x x"), None);
        assert_eq!(show("x"), Some("a".to_string()));
        assert_eq!(show("(\\x.x) (\\y.y)"), Some("a->a".to_string()));
    }

    #[test]
    fn inference_respects_a_rigid_environment() {
        let mut env = Environment::new();
        env.insert("f".to_string(), ty("a -> a"));
        let got = infer_simple(&env, &tm("f"))
            .unwrap()
            .map(|t| print_type(&t));
        assert_eq!(got, Some("a->a".to_string()));
        env.insert("x".to_string(), ty("b"));
        assert_eq!(infer_simple(&env, &tm("f x")).unwrap(), None);
    }

    #[test]
    fn redex_image_unfolds_substitutions() {
        assert_eq!(revb(&tm("x[x/y]")).unwrap(), tm("(\\x.x) y"));
        assert_eq!(
            revb(&tm("(z y x)[y/x x][x/v]")).unwrap(),
            tm("(\\x.(\\y.z y x) (x x)) v")
        );
        assert!(revb(&tm("x[[x/y]]")).is_err());
    }
}
