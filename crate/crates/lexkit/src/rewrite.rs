//! The rewrite engine: rule sets, one-step reducts modulo the substitution
//! swap equations, bounded exploration of reduction graphs, termination
//! verdicts with certificates, and deterministic normalization.
//!
//! Everything is driven by canonical keys. A reduction graph identifies
//! nodes up to the rule set's equality mode, so a cycle in the graph is a
//! genuine infinite reduction and an acyclic complete graph certifies
//! strong normalization together with the longest-path count.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::syntax::print_term;
use crate::term::{
    alpha_key, app, canonical_key_bounded, e_class, esub, lam, lsub, subst, CanonicalKey,
    FreshNames, GenTerm, KeyMode, TermError,
};

/// Rewrite rules. The declaration order is the deterministic tie-break
/// order used when several rules fire at one position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    B,
    Var,
    Gc,
    App,
    Lamb,
    Comp,
    UVar,
    UGc,
    UApp,
    ULamb,
    UComp,
    DsComp,
    Beta,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::B => "B",
            RuleId::Var => "Var",
            RuleId::Gc => "Gc",
            RuleId::App => "App",
            RuleId::Lamb => "Lamb",
            RuleId::Comp => "Comp",
            RuleId::UVar => "uVar",
            RuleId::UGc => "uGc",
            RuleId::UApp => "uApp",
            RuleId::ULamb => "uLamb",
            RuleId::UComp => "uComp",
            RuleId::DsComp => "DsComp",
            RuleId::Beta => "beta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleSetName {
    Beta,
    LambdaX,
    LambdaEx,
    LambdaXDirector,
    Uex,
    LambdaUex,
}

#[derive(Clone, Debug)]
pub struct RuleSet {
    pub name: RuleSetName,
    pub rules: Vec<RuleId>,
    pub eq_mode: KeyMode,
}

impl RuleSet {
    pub fn get(name: RuleSetName) -> RuleSet {
        use RuleId::*;
        let (rules, eq_mode) = match name {
            RuleSetName::Beta => (vec![Beta], KeyMode::Alpha),
            RuleSetName::LambdaX => (vec![B, Var, Gc, App, Lamb], KeyMode::Alpha),
            RuleSetName::LambdaEx => (vec![B, Var, Gc, App, Lamb, Comp], KeyMode::E),
            RuleSetName::LambdaXDirector => (vec![B, Var, Gc, App, Lamb, DsComp], KeyMode::Alpha),
            RuleSetName::Uex => (vec![UVar, UGc, UApp, ULamb, UComp], KeyMode::Eu),
            RuleSetName::LambdaUex => (
                vec![B, Var, Gc, App, Lamb, Comp, UVar, UGc, UApp, ULamb, UComp],
                KeyMode::Eu,
            ),
        };
        RuleSet {
            name,
            rules,
            eq_mode,
        }
    }

    pub fn beta() -> RuleSet {
        RuleSet::get(RuleSetName::Beta)
    }
    pub fn lambda_x() -> RuleSet {
        RuleSet::get(RuleSetName::LambdaX)
    }
    pub fn lambda_ex() -> RuleSet {
        RuleSet::get(RuleSetName::LambdaEx)
    }
    pub fn lambda_x_director() -> RuleSet {
        RuleSet::get(RuleSetName::LambdaXDirector)
    }
    pub fn uex() -> RuleSet {
        RuleSet::get(RuleSetName::Uex)
    }
    pub fn lambda_uex() -> RuleSet {
        RuleSet::get(RuleSetName::LambdaUex)
    }
}

/// Fuel budgets. `scale` multiplies every budget, for the environment
/// override.
#[derive(Clone, Copy, Debug)]
pub struct Fuels {
    pub node_fuel: usize,
    pub class_bound: usize,
    pub step_fuel: usize,
    pub join_budget: usize,
}

impl Default for Fuels {
    fn default() -> Self {
        Fuels {
            node_fuel: 20000,
            class_bound: 1024,
            step_fuel: 100000,
            join_budget: 64,
        }
    }
}

impl Fuels {
    pub fn scaled(self, factor: f64) -> Fuels {
        let s = |v: usize| ((v as f64 * factor).max(1.0)) as usize;
        Fuels {
            node_fuel: s(self.node_fuel),
            class_bound: s(self.class_bound),
            step_fuel: s(self.step_fuel),
            join_budget: s(self.join_budget),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("fuel exhausted: {message}")]
    FuelExhausted {
        message: String,
        partial_trace: Vec<Step>,
    },
    #[error("not a one-step reduct")]
    NotAReduct,
    #[error("termination oracle returned unknown for {0}")]
    OracleUnknown(String),
    #[error("term is not strongly normalizing: {0}")]
    NotSN(String),
    #[error("step cannot be lifted: {0}")]
    NotLiftable(String),
    #[error("ill-formed input: {0}")]
    IllFormedInput(String),
}

/// One reduction step: applying `rule` at `position` in `before` yields
/// `after`. Positions are child-index paths (bodies are child 0, arguments
/// child 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: RuleId,
    pub position: Vec<usize>,
    pub before: GenTerm,
    pub after: GenTerm,
}

fn rename_binder_if(
    cond: bool,
    whole: &GenTerm,
    binder: &str,
    body: &GenTerm,
) -> (String, GenTerm) {
    if cond {
        let mut fr = FreshNames::for_terms(&[whole]);
        let nb = fr.fresh(binder);
        let renamed = crate::term::rename_free(body, binder, &nb);
        (nb, renamed)
    } else {
        (binder.to_string(), body.clone())
    }
}

/// Apply `rule` at the root of `t`, if it matches.
pub fn apply_rule(t: &GenTerm, rule: RuleId) -> Option<GenTerm> {
    match rule {
        RuleId::Beta => {
            if let GenTerm::App(f, u) = t {
                if let GenTerm::Lam(x, b) = &**f {
                    return subst(b, x, u).ok();
                }
            }
            None
        }
        RuleId::B => {
            if let GenTerm::App(f, u) = t {
                if let GenTerm::Lam(x, b) = &**f {
                    return Some(esub((**b).clone(), x, (**u).clone()));
                }
            }
            None
        }
        _ => {
            let labelled = matches!(
                rule,
                RuleId::UVar | RuleId::UGc | RuleId::UApp | RuleId::ULamb | RuleId::UComp
            );
            let (b, x, a) = match (labelled, t) {
                (false, GenTerm::ESub(b, x, a)) => (&**b, x.as_str(), &**a),
                (true, GenTerm::LSub(b, x, a)) => (&**b, x.as_str(), &**a),
                _ => return None,
            };
            let mk = move |body: GenTerm, binder: &str, arg: GenTerm| {
                if labelled {
                    lsub(body, binder, arg)
                } else {
                    esub(body, binder, arg)
                }
            };
            match rule {
                RuleId::Var | RuleId::UVar => match b {
                    GenTerm::Var(y) if y == x => Some(a.clone()),
                    _ => None,
                },
                RuleId::Gc | RuleId::UGc => {
                    if b.free_vars().contains(x) {
                        None
                    } else {
                        Some(b.clone())
                    }
                }
                RuleId::App | RuleId::UApp => {
                    if let GenTerm::App(l, r) = b {
                        Some(app(
                            mk((**l).clone(), x, a.clone()),
                            mk((**r).clone(), x, a.clone()),
                        ))
                    } else {
                        None
                    }
                }
                RuleId::Lamb | RuleId::ULamb => {
                    if let GenTerm::Lam(y, body) = b {
                        let clash = a.free_vars().contains(y) || y == x;
                        let (y2, body2) = rename_binder_if(clash, t, y, body);
                        Some(lam(&y2, mk(body2, x, a.clone())))
                    } else {
                        None
                    }
                }
                RuleId::Comp | RuleId::UComp => {
                    // t[y/u] under an outer substitution on x with x free in
                    // u: push the outer one inside, duplicating it into u
                    if let GenTerm::ESub(s, y, u) = b {
                        if !u.free_vars().contains(x) {
                            return None;
                        }
                        let clash = a.free_vars().contains(y) || y == x;
                        let (y2, s2) = rename_binder_if(clash, t, y, s);
                        Some(esub(
                            mk(s2, x, a.clone()),
                            &y2,
                            mk((**u).clone(), x, a.clone()),
                        ))
                    } else {
                        None
                    }
                }
                RuleId::DsComp => {
                    if let GenTerm::ESub(s, y, u) = b {
                        if u.free_vars().contains(x) && !s.free_vars().contains(x) {
                            Some(esub((**s).clone(), y, esub((**u).clone(), x, a.clone())))
                        } else {
                            None
                        }
                    } else {
                        None
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Pre-order positions of all subterms.
pub fn positions(t: &GenTerm) -> Vec<(Vec<usize>, &GenTerm)> {
    fn walk<'a>(t: &'a GenTerm, here: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a GenTerm)>) {
        out.push((here.clone(), t));
        match t {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => {}
            GenTerm::Lam(_, b) => {
                here.push(0);
                walk(b, here, out);
                here.pop();
            }
            GenTerm::App(l, r) | GenTerm::ESub(l, _, r) | GenTerm::LSub(l, _, r) => {
                here.push(0);
                walk(l, here, out);
                here.pop();
                here.push(1);
                walk(r, here, out);
                here.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(t, &mut Vec::new(), &mut out);
    out
}

pub fn subterm_at<'a>(t: &'a GenTerm, pos: &[usize]) -> Option<&'a GenTerm> {
    let mut cur = t;
    for &i in pos {
        cur = match (cur, i) {
            (GenTerm::Lam(_, b), 0) => b,
            (GenTerm::App(l, _), 0)
            | (GenTerm::ESub(l, _, _), 0)
            | (GenTerm::LSub(l, _, _), 0) => l,
            (GenTerm::App(_, r), 1)
            | (GenTerm::ESub(_, _, r), 1)
            | (GenTerm::LSub(_, _, r), 1) => r,
            _ => return None,
        };
    }
    Some(cur)
}

pub fn plug(t: &GenTerm, pos: &[usize], sub: GenTerm) -> GenTerm {
    if pos.is_empty() {
        return sub;
    }
    let (i, rest) = (pos[0], &pos[1..]);
    match (t, i) {
        (GenTerm::Lam(x, b), 0) => lam(x, plug(b, rest, sub)),
        (GenTerm::App(l, r), 0) => app(plug(l, rest, sub), (**r).clone()),
        (GenTerm::App(l, r), 1) => app((**l).clone(), plug(r, rest, sub)),
        (GenTerm::ESub(l, x, r), 0) => esub(plug(l, rest, sub), x, (**r).clone()),
        (GenTerm::ESub(l, x, r), 1) => esub((**l).clone(), x, plug(r, rest, sub)),
        (GenTerm::LSub(l, x, r), 0) => lsub(plug(l, rest, sub), x, (**r).clone()),
        (GenTerm::LSub(l, x, r), 1) => lsub((**l).clone(), x, plug(r, rest, sub)),
        _ => panic!("position does not exist in term"),
    }
}

/// All one-step reducts of `t` modulo the rule set's equations,
/// deduplicated by the canonical key of the result. Deterministic: class
/// members are scanned in key order, positions pre-order, rules in
/// declaration order, so the first step is the leftmost one.
pub fn reducts(t: &GenTerm, rs: &RuleSet, fuels: &Fuels) -> Result<Vec<Step>, EngineError> {
    let members = e_class(t, rs.eq_mode, fuels.class_bound)?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for m in &members {
        for (pos, s) in positions(m) {
            for &rule in &rs.rules {
                if let Some(r) = apply_rule(s, rule) {
                    let after = plug(m, &pos, r);
                    let key = canonical_key_bounded(&after, rs.eq_mode, fuels.class_bound)?;
                    if seen.insert(key) {
                        out.push(Step {
                            rule,
                            position: pos.clone(),
                            before: m.clone(),
                            after,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphStatus {
    Complete,
    FuelExhausted,
}

/// Reachable reduction graph modulo the rule set's equations. Nodes map
/// canonical keys to a representative term; edges record the rule and the
/// target key. Exploration stops early once a cycle is certain, since that
/// already settles every question the graph is asked.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub root: CanonicalKey,
    pub nodes: BTreeMap<CanonicalKey, GenTerm>,
    pub edges: BTreeMap<CanonicalKey, Vec<(RuleId, CanonicalKey)>>,
    pub status: GraphStatus,
    pub cyclic: bool,
}

pub(crate) fn find_cycle(edges: &BTreeMap<CanonicalKey, Vec<(RuleId, CanonicalKey)>>) -> bool {
    let mut colour: HashMap<&CanonicalKey, u8> = HashMap::new();
    for start in edges.keys() {
        if colour.contains_key(start) {
            continue;
        }
        let mut stack: Vec<(&CanonicalKey, usize)> = vec![(start, 0)];
        colour.insert(start, 1);
        while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
            let succs = &edges[node];
            let mut advanced = false;
            while *idx < succs.len() {
                let nxt = &succs[*idx].1;
                *idx += 1;
                if !edges.contains_key(nxt) {
                    continue;
                }
                match colour.get(nxt) {
                    Some(1) => return true,
                    Some(_) => {}
                    None => {
                        colour.insert(nxt, 1);
                        stack.push((nxt, 0));
                        advanced = true;
                        break;
                    }
                }
            }
            if !advanced {
                colour.insert(node, 2);
                stack.pop();
            }
        }
    }
    false
}

pub fn explore(t: &GenTerm, rs: &RuleSet, fuels: &Fuels) -> Result<ReductionGraph, EngineError> {
    let root = canonical_key_bounded(t, rs.eq_mode, fuels.class_bound)?;
    let mut nodes = BTreeMap::new();
    nodes.insert(root.clone(), t.clone());
    let mut edges: BTreeMap<CanonicalKey, Vec<(RuleId, CanonicalKey)>> = BTreeMap::new();
    let mut work: BinaryHeap<Reverse<CanonicalKey>> = BinaryHeap::new();
    work.push(Reverse(root.clone()));
    let mut status = GraphStatus::Complete;
    let mut next_check = 0usize;
    while let Some(Reverse(key)) = work.pop() {
        if edges.contains_key(&key) {
            continue;
        }
        if edges.len() >= fuels.node_fuel {
            status = GraphStatus::FuelExhausted;
            break;
        }
        let steps = reducts(&nodes[&key], rs, fuels)?;
        let mut succs = Vec::with_capacity(steps.len());
        let mut revisit = false;
        for step in steps {
            let ak = canonical_key_bounded(&step.after, rs.eq_mode, fuels.class_bound)?;
            succs.push((step.rule, ak.clone()));
            if nodes.contains_key(&ak) {
                revisit = true;
            } else {
                nodes.insert(ak.clone(), step.after);
                work.push(Reverse(ak));
            }
        }
        edges.insert(key, succs);
        if revisit && edges.len() >= next_check {
            next_check = edges.len() + 32;
            if find_cycle(&edges) {
                status = GraphStatus::FuelExhausted;
                break;
            }
        }
    }
    let cyclic = find_cycle(&edges);
    Ok(ReductionGraph {
        root,
        nodes,
        edges,
        status,
        cyclic,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnVerdict {
    ProvedSN { eta: u64, max_size: u64 },
    ProvedNotSN { witness: Vec<GenTerm> },
    Unknown,
}

impl SnVerdict {
    pub fn is_sn(&self) -> bool {
        matches!(self, SnVerdict::ProvedSN { .. })
    }
    pub fn is_not_sn(&self) -> bool {
        matches!(self, SnVerdict::ProvedNotSN { .. })
    }
    pub fn short(&self) -> &'static str {
        match self {
            SnVerdict::ProvedSN { .. } => "ProvedSN",
            SnVerdict::ProvedNotSN { .. } => "ProvedNotSN",
            SnVerdict::Unknown => "Unknown",
        }
    }
}

/// Path from the root to a node that closes a cycle, ending with the first
/// repeated node.
fn cycle_witness(g: &ReductionGraph) -> Vec<GenTerm> {
    let mut on_path: BTreeSet<&CanonicalKey> = BTreeSet::new();
    let mut path: Vec<&CanonicalKey> = Vec::new();
    let mut done: BTreeSet<&CanonicalKey> = BTreeSet::new();

    fn dfs<'a>(
        g: &'a ReductionGraph,
        node: &'a CanonicalKey,
        on_path: &mut BTreeSet<&'a CanonicalKey>,
        path: &mut Vec<&'a CanonicalKey>,
        done: &mut BTreeSet<&'a CanonicalKey>,
    ) -> Option<&'a CanonicalKey> {
        path.push(node);
        on_path.insert(node);
        if let Some(succs) = g.edges.get(node) {
            for (_, nxt) in succs {
                if !g.edges.contains_key(nxt) {
                    continue;
                }
                if on_path.contains(nxt) {
                    path.push(nxt);
                    return Some(nxt);
                }
                if !done.contains(nxt) {
                    if let Some(hit) = dfs(g, nxt, on_path, path, done) {
                        return Some(hit);
                    }
                }
            }
        }
        path.pop();
        on_path.remove(node);
        done.insert(node);
        None
    }

    if dfs(g, &g.root, &mut on_path, &mut path, &mut done).is_some() {
        path.iter().map(|k| g.nodes[*k].clone()).collect()
    } else {
        Vec::new()
    }
}

fn longest_path(g: &ReductionGraph) -> u64 {
    fn depth<'a>(
        g: &'a ReductionGraph,
        node: &'a CanonicalKey,
        memo: &mut HashMap<&'a CanonicalKey, u64>,
    ) -> u64 {
        if let Some(&d) = memo.get(node) {
            return d;
        }
        let mut best = 0;
        if let Some(succs) = g.edges.get(node) {
            for (_, nxt) in succs {
                best = best.max(1 + depth(g, nxt, memo));
            }
        }
        memo.insert(node, best);
        best
    }
    depth(g, &g.root, &mut HashMap::new())
}

/// Memoising termination oracle shared across suites. Verdicts are keyed by
/// rule set, canonical key and node fuel.
#[derive(Default)]
pub struct Oracle {
    cache: HashMap<(RuleSetName, CanonicalKey, usize), SnVerdict>,
}

impl Oracle {
    pub fn new() -> Self {
        Oracle::default()
    }

    pub fn sn_verdict(
        &mut self,
        t: &GenTerm,
        rs: &RuleSet,
        fuels: &Fuels,
    ) -> Result<SnVerdict, EngineError> {
        let key = canonical_key_bounded(t, rs.eq_mode, fuels.class_bound)?;
        let ck = (rs.name, key, fuels.node_fuel);
        if let Some(v) = self.cache.get(&ck) {
            return Ok(v.clone());
        }
        let g = explore(t, rs, fuels)?;
        let v = self.verdict_of_graph(&g, fuels)?;
        self.cache.insert(ck, v.clone());
        Ok(v)
    }

    pub fn verdict_of_graph(
        &mut self,
        g: &ReductionGraph,
        fuels: &Fuels,
    ) -> Result<SnVerdict, EngineError> {
        if g.cyclic {
            return Ok(SnVerdict::ProvedNotSN {
                witness: cycle_witness(g),
            });
        }
        if g.status == GraphStatus::FuelExhausted {
            return Ok(SnVerdict::Unknown);
        }
        let eta = longest_path(g);
        let mut max_size = 0u64;
        for n in g.nodes.values() {
            max_size = max_size.max(self.k_measure(n, fuels)?);
        }
        Ok(SnVerdict::ProvedSN { eta, max_size })
    }

    /// The size measure: variables and metavariables count 1, applications
    /// and lambdas add, explicit substitutions multiply, and a labelled
    /// substitution multiplies by the weight of its body.
    pub fn k_measure(&mut self, t: &GenTerm, fuels: &Fuels) -> Result<u64, EngineError> {
        Ok(match t {
            GenTerm::Var(_) | GenTerm::MetaVar(_, _) => 1,
            GenTerm::App(l, r) => self
                .k_measure(l, fuels)?
                .saturating_add(self.k_measure(r, fuels)?)
                .saturating_add(1),
            GenTerm::Lam(_, b) => self.k_measure(b, fuels)?.saturating_add(1),
            GenTerm::ESub(b, _, a) => self
                .k_measure(b, fuels)?
                .saturating_mul(self.k_measure(a, fuels)?),
            GenTerm::LSub(b, _, a) => {
                let phi = self.phi(a, fuels)?;
                self.k_measure(b, fuels)?.saturating_mul(phi)
            }
        })
    }

    /// Weight of a labelled substitution body: one more than its longest
    /// reduction plus the largest k-measure it can reach. Defined only for
    /// terms the oracle can prove terminating.
    pub fn phi(&mut self, u: &GenTerm, fuels: &Fuels) -> Result<u64, EngineError> {
        match self.sn_verdict(u, &RuleSet::lambda_ex(), fuels)? {
            SnVerdict::ProvedSN { eta, max_size } => {
                Ok(1u64.saturating_add(eta).saturating_add(max_size))
            }
            SnVerdict::ProvedNotSN { .. } => Err(EngineError::NotSN(print_term(u))),
            SnVerdict::Unknown => Err(EngineError::OracleUnknown(print_term(u))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    Leftmost,
    PerpetualStrategy,
}

/// Reduce to normal form under the deterministic leftmost policy: the
/// first step of `reducts`, which is minimal in (member key, position,
/// rule) order.
pub fn normalize_leftmost(
    t: &GenTerm,
    rs: &RuleSet,
    fuels: &Fuels,
) -> Result<(GenTerm, Vec<Step>), EngineError> {
    let mut cur = t.clone();
    let mut trace = Vec::new();
    for _ in 0..fuels.step_fuel {
        let steps = reducts(&cur, rs, fuels)?;
        match steps.into_iter().next() {
            None => return Ok((cur, trace)),
            Some(s) => {
                cur = s.after.clone();
                trace.push(s);
            }
        }
    }
    Err(EngineError::FuelExhausted {
        message: format!("no normal form within {} steps", fuels.step_fuel),
        partial_trace: trace,
    })
}

/// All beta steps of a plain lambda term.
pub fn beta_step(t: &GenTerm, fuels: &Fuels) -> Result<Vec<Step>, EngineError> {
    reducts(t, &RuleSet::beta(), fuels)
}

/// Realise one beta step as a trace: the B rule followed by the steps that
/// execute the created substitution completely.
pub fn simulate_beta(t: &GenTerm, t2: &GenTerm, fuels: &Fuels) -> Result<Vec<Step>, EngineError> {
    let target = alpha_key(t2);
    for cand in beta_step(t, fuels)? {
        if alpha_key(&cand.after) != target {
            continue;
        }
        let pos = cand.position.clone();
        let redex = subterm_at(t, &pos).expect("position from reducts");
        let (x, body, arg) = match redex {
            GenTerm::App(f, u) => match &**f {
                GenTerm::Lam(x, b) => (x.clone(), (**b).clone(), (**u).clone()),
                _ => unreachable!("beta step at non-redex"),
            },
            _ => unreachable!("beta step at non-redex"),
        };
        let mut trace = vec![Step {
            rule: RuleId::B,
            position: pos.clone(),
            before: t.clone(),
            after: plug(t, &pos, esub(body.clone(), &x, arg.clone())),
        }];
        let inner = full_composition_trace(&body, &x, &arg, fuels)?;
        trace.extend(embed_steps(inner, &pos, |s| plug(t, &pos, s)));
        return Ok(trace);
    }
    Err(EngineError::NotAReduct)
}

/// Re-anchor a trace computed for a subterm at `prefix` inside a bigger
/// term, wrapping each endpoint with `ctx`.
pub fn embed_steps<F>(steps: Vec<Step>, prefix: &[usize], ctx: F) -> Vec<Step>
where
    F: Fn(GenTerm) -> GenTerm,
{
    steps
        .into_iter()
        .map(|s| {
            let mut position = prefix.to_vec();
            position.extend(s.position);
            Step {
                rule: s.rule,
                position,
                before: ctx(s.before),
                after: ctx(s.after),
            }
        })
        .collect()
}

/// Trace executing the substitution completely: from t[x/u] to t{x := u},
/// using only the substitution rules (never B), stepping modulo the swap
/// equations. Empty exactly for a metavariable that absorbs the
/// substitution into its decoration.
pub fn full_composition_trace(
    t: &GenTerm,
    x: &str,
    u: &GenTerm,
    fuels: &Fuels,
) -> Result<Vec<Step>, EngineError> {
    if !(t.is_metaterm() && u.is_metaterm()) {
        return Err(EngineError::IllFormedInput(
            "full composition needs terms or metaterms".to_string(),
        ));
    }
    let whole = esub(t.clone(), x, u.clone());
    if !t.free_vars().contains(x) {
        if let GenTerm::MetaVar(_, _) = t {
            // the substitution is simply garbage on a metavariable that
            // cannot mention x; still one Gc step
        }
        return Ok(vec![Step {
            rule: RuleId::Gc,
            position: vec![],
            before: whole,
            after: t.clone(),
        }]);
    }
    match t {
        GenTerm::MetaVar(_, _) => Ok(Vec::new()),
        GenTerm::Var(_) => Ok(vec![Step {
            rule: RuleId::Var,
            position: vec![],
            before: whole.clone(),
            after: u.clone(),
        }]),
        GenTerm::App(l, r) => {
            let l = (**l).clone();
            let r = (**r).clone();
            let split = app(esub(l.clone(), x, u.clone()), esub(r.clone(), x, u.clone()));
            let mut trace = vec![Step {
                rule: RuleId::App,
                position: vec![],
                before: whole,
                after: split.clone(),
            }];
            let lt = full_composition_trace(&l, x, u, fuels)?;
            let l_done = subst(&l, x, u)?;
            let rsub = esub(r.clone(), x, u.clone());
            trace.extend(embed_steps(lt, &[0], |s| app(s, rsub.clone())));
            let rt = full_composition_trace(&r, x, u, fuels)?;
            trace.extend(embed_steps(rt, &[1], |s| app(l_done.clone(), s)));
            Ok(trace)
        }
        GenTerm::Lam(y, b) => {
            let clash = u.free_vars().contains(y) || y == x;
            let (y2, b2) = rename_binder_if(clash, &whole, y, b);
            let stepped = lam(&y2, esub(b2.clone(), x, u.clone()));
            let mut trace = vec![Step {
                rule: RuleId::Lamb,
                position: vec![],
                before: whole,
                after: stepped,
            }];
            let inner = full_composition_trace(&b2, x, u, fuels)?;
            trace.extend(embed_steps(inner, &[0], |s| lam(&y2, s)));
            Ok(trace)
        }
        GenTerm::ESub(b, y, a) => {
            let b = (**b).clone();
            let a = (**a).clone();
            if a.free_vars().contains(x) {
                let clash = u.free_vars().contains(y) || y == x;
                let (y2, b2) = rename_binder_if(clash, &whole, y, &b);
                let stepped = esub(
                    esub(b2.clone(), x, u.clone()),
                    &y2,
                    esub(a.clone(), x, u.clone()),
                );
                let mut trace = vec![Step {
                    rule: RuleId::Comp,
                    position: vec![],
                    before: whole,
                    after: stepped,
                }];
                let bt = full_composition_trace(&b2, x, u, fuels)?;
                let b_done = subst(&b2, x, u)?;
                let asub = esub(a.clone(), x, u.clone());
                trace.extend(embed_steps(bt, &[0], |s| esub(s, &y2, asub.clone())));
                let at = full_composition_trace(&a, x, u, fuels)?;
                trace.extend(embed_steps(at, &[1], |s| esub(b_done.clone(), &y2, s)));
                Ok(trace)
            } else {
                // x lives only in the body; the two substitutions are
                // independent, so swap them and continue inside
                let clash = u.free_vars().contains(y) || y == x;
                let (y2, b2) = rename_binder_if(clash, &whole, y, &b);
                let bt = full_composition_trace(&b2, x, u, fuels)?;
                Ok(embed_steps(bt, &[0], |s| esub(s, &y2, a.clone())))
            }
        }
        GenTerm::LSub(_, _, _) => unreachable!("rejected by is_metaterm"),
    }
}

/// Check that a trace is well-formed: every step applies its rule at its
/// position, consecutive steps agree modulo the rule set's equations, and
/// the endpoints match the given terms (also modulo equations).
pub fn verify_trace(
    from: &GenTerm,
    to: &GenTerm,
    steps: &[Step],
    rs: &RuleSet,
    fuels: &Fuels,
) -> Result<(), String> {
    let key = |t: &GenTerm| -> Result<CanonicalKey, String> {
        canonical_key_bounded(t, rs.eq_mode, fuels.class_bound).map_err(|e| e.to_string())
    };
    let mut cur = key(from)?;
    for (i, s) in steps.iter().enumerate() {
        if key(&s.before)? != cur {
            return Err(format!("step {i}: before does not match the previous step"));
        }
        if !rs.rules.contains(&s.rule) {
            return Err(format!("step {i}: rule {} not in rule set", s.rule.name()));
        }
        let sub = subterm_at(&s.before, &s.position)
            .ok_or_else(|| format!("step {i}: bad position"))?;
        let applied = apply_rule(sub, s.rule)
            .ok_or_else(|| format!("step {i}: rule {} does not apply", s.rule.name()))?;
        let rebuilt = plug(&s.before, &s.position, applied);
        if alpha_key(&rebuilt) != alpha_key(&s.after) {
            return Err(format!("step {i}: after does not match the rule application"));
        }
        cur = key(&s.after)?;
    }
    if key(to)? != cur {
        return Err("trace does not end at the target".to_string());
    }
    Ok(())
}

/// Outcome of a bounded reachability search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReachResult {
    /// A checked path; empty only when the endpoints coincide and zero
    /// steps were allowed.
    Found(Vec<Step>),
    /// The whole closure was enumerated without meeting the target.
    NotReachable,
    /// The node budget ran out first.
    Exhausted,
}

/// Breadth-first search from `from` for any term whose canonical key is
/// `target`, taking at least `min_steps` steps, expanding at most
/// `node_budget` nodes.
pub fn bfs_path(
    from: &GenTerm,
    target: &CanonicalKey,
    rs: &RuleSet,
    fuels: &Fuels,
    node_budget: usize,
    min_steps: usize,
) -> Result<ReachResult, EngineError> {
    let root = canonical_key_bounded(from, rs.eq_mode, fuels.class_bound)?;
    if min_steps == 0 && root == *target {
        return Ok(ReachResult::Found(Vec::new()));
    }
    let mut parent: HashMap<CanonicalKey, (CanonicalKey, Step)> = HashMap::new();
    let mut terms: HashMap<CanonicalKey, GenTerm> = HashMap::new();
    terms.insert(root.clone(), from.clone());
    let mut queue: std::collections::VecDeque<CanonicalKey> = [root.clone()].into();
    let mut expanded = 0usize;
    while let Some(key) = queue.pop_front() {
        if expanded >= node_budget {
            return Ok(ReachResult::Exhausted);
        }
        expanded += 1;
        for step in reducts(&terms[&key], rs, fuels)? {
            let ak = canonical_key_bounded(&step.after, rs.eq_mode, fuels.class_bound)?;
            if ak == *target {
                // reconstruct the path ending in this step
                let mut path = vec![step];
                let mut cur = key.clone();
                while let Some((prev, s)) = parent.get(&cur) {
                    path.push(s.clone());
                    cur = prev.clone();
                }
                path.reverse();
                return Ok(ReachResult::Found(path));
            }
            if !terms.contains_key(&ak) {
                terms.insert(ak.clone(), step.after.clone());
                parent.insert(ak.clone(), (key.clone(), step));
                queue.push_back(ak);
            }
        }
    }
    Ok(ReachResult::NotReachable)
}

/// Grammar check for normal forms of plain terms: either an abstraction
/// with a normal body or a variable applied to normal arguments.
pub fn is_nf_grammar(t: &GenTerm) -> bool {
    match t {
        GenTerm::Lam(_, b) => is_nf_grammar(b),
        _ => {
            let mut head = t;
            let mut args = Vec::new();
            while let GenTerm::App(l, r) = head {
                args.push(&**r);
                head = l;
            }
            matches!(head, GenTerm::Var(_)) && args.iter().all(|a| is_nf_grammar(a))
        }
    }
}

pub fn trace_json(root: &GenTerm, steps: &[Step], complete: bool) -> serde_json::Value {
    json!({
        "root": print_term(root),
        "steps": steps.iter().map(|s| json!({
            "rule": s.rule.name(),
            "position": s.position,
            "to": print_term(&s.after),
        })).collect::<Vec<_>>(),
        "status": if complete { "ok" } else { "fuel" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{metavar, var};

    fn t(src: &str) -> GenTerm {
        crate::syntax::parse_term(src).unwrap()
    }

    fn fuels() -> Fuels {
        Fuels::default()
    }

    #[test]
    fn rules_fire_at_the_root() {
        assert_eq!(apply_rule(&t("(\\x.x) y"), RuleId::B), Some(t("x[x/y]")));
        assert_eq!(apply_rule(&t("x[x/u]"), RuleId::Var), Some(t("u")));
        assert_eq!(apply_rule(&t("y[x/u]"), RuleId::Gc), Some(t("y")));
        assert_eq!(apply_rule(&t("y[y/u]"), RuleId::Gc), None);
        assert_eq!(
            apply_rule(&t("(a b)[x/u]"), RuleId::App),
            Some(t("a[x/u] b[x/u]"))
        );
        assert_eq!(
            apply_rule(&t("(\\y.y x)[x/u]"), RuleId::Lamb),
            Some(t("\\y.(y x)[x/u]"))
        );
        assert_eq!(
            apply_rule(&t("w[y/x x][x/v]"), RuleId::Comp),
            Some(t("w[x/v][y/(x x)[x/v]]"))
        );
        assert_eq!(apply_rule(&t("w[y/z][x/v]"), RuleId::Comp), None);
        assert_eq!(
            apply_rule(&t("x[[x/u]]"), RuleId::UVar),
            Some(t("u"))
        );
        assert_eq!(
            apply_rule(&t("w[y/x x][[x/v]]"), RuleId::UComp),
            Some(t("w[[x/v]][y/(x x)[[x/v]]]"))
        );
    }

    #[test]
    fn lamb_renames_to_avoid_capture() {
        let stepped = apply_rule(&t("(\\y.x y)[x/y]"), RuleId::Lamb).unwrap();
        assert!(crate::term::alpha_eq(&stepped, &t("\\z.(x z)[x/y]")));
    }

    #[test]
    fn dscomp_requires_the_body_to_drop_the_variable() {
        assert_eq!(
            apply_rule(&t("w[y/x x][x/v]"), RuleId::DsComp),
            Some(t("w[y/(x x)[x/v]]"))
        );
        assert_eq!(apply_rule(&t("(x w)[y/x x][x/v]"), RuleId::DsComp), None);
    }

    #[test]
    fn reducts_scan_the_whole_class() {
        // x[y/a][z/b]: Gc fires on both orderings of the two independent
        // substitutions, giving two distinct reducts
        let steps = reducts(&t("x[y/a][z/b]"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        let afters: BTreeSet<String> = steps.iter().map(|s| print_term(&s.after)).collect();
        assert_eq!(
            afters,
            ["x[y/a]", "x[z/b]"].map(String::from).into()
        );
    }

    #[test]
    fn explore_counts_nodes_and_completes() {
        let g = explore(&t("x[x/u]"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.status, GraphStatus::Complete);
        assert!(!g.cyclic);
    }

    #[test]
    fn omega_is_cyclic_under_beta_and_ex() {
        let omega = t("(\\x.x x) (\\x.x x)");
        let g = explore(&omega, &RuleSet::beta(), &fuels()).unwrap();
        assert!(g.cyclic);
        let mut oracle = Oracle::new();
        let v = oracle
            .sn_verdict(&omega, &RuleSet::lambda_ex(), &fuels())
            .unwrap();
        assert!(v.is_not_sn());
        if let SnVerdict::ProvedNotSN { witness } = v {
            assert!(witness.len() >= 2);
            let first = alpha_key(&witness[0]);
            assert_eq!(first, alpha_key(&omega));
        }
    }

    #[test]
    fn sn_verdict_on_trivial_terms() {
        let mut oracle = Oracle::new();
        let v = oracle
            .sn_verdict(&var("x"), &RuleSet::lambda_ex(), &fuels())
            .unwrap();
        assert_eq!(v, SnVerdict::ProvedSN { eta: 0, max_size: 1 });
    }

    #[test]
    fn k_measure_examples() {
        let mut oracle = Oracle::new();
        assert_eq!(oracle.k_measure(&t("x y"), &fuels()).unwrap(), 3);
        assert_eq!(oracle.phi(&var("z"), &fuels()).unwrap(), 2);
        assert_eq!(oracle.k_measure(&t("x[[y/z]]"), &fuels()).unwrap(), 2);
        assert_eq!(oracle.k_measure(&t("x[y/z]"), &fuels()).unwrap(), 1);
        assert_eq!(oracle.k_measure(&metavar("X", &["x"]), &fuels()).unwrap(), 1);
    }

    #[test]
    fn leftmost_normalization_matches_expected_traces() {
        let (nf, trace) = normalize_leftmost(&t("(\\x.x) y"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        assert_eq!(nf, var("y"));
        let rules: Vec<_> = trace.iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec![RuleId::B, RuleId::Var]);

        let (nf, trace) = normalize_leftmost(&t("(\\x.z) y"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        assert_eq!(nf, var("z"));
        let rules: Vec<_> = trace.iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec![RuleId::B, RuleId::Gc]);

        let (nf, _) = normalize_leftmost(&t("x"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        assert_eq!(nf, var("x"));
    }

    #[test]
    fn the_running_example_normalizes() {
        let (nf, trace) =
            normalize_leftmost(&t("(z y x)[y/x x][x/v]"), &RuleSet::lambda_ex(), &fuels()).unwrap();
        assert!(crate::term::alpha_eq(&nf, &t("z (v v) v")));
        verify_trace(&t("(z y x)[y/x x][x/v]"), &nf, &trace, &RuleSet::lambda_ex(), &fuels())
            .unwrap();
    }

    #[test]
    fn full_composition_reaches_the_substitution() {
        let fl = fuels();
        let cases = [
            ("x", "x", "u"),
            ("y", "x", "u"),
            ("x x", "x", "\\y.y"),
            ("\\y.x y", "x", "y y"),
            ("w[y/x x]", "x", "v"),
            ("z y x", "x", "v"),
        ];
        for (tt, x, uu) in cases {
            let t0 = t(tt);
            let u0 = t(uu);
            let trace = full_composition_trace(&t0, x, &u0, &fl).unwrap();
            assert!(!trace.is_empty(), "{tt}");
            assert!(trace.iter().all(|s| s.rule != RuleId::B && s.rule != RuleId::Beta));
            let target = subst(&t0, x, &u0).unwrap();
            verify_trace(&esub(t0, x, u0), &target, &trace, &RuleSet::lambda_ex(), &fl).unwrap();
        }
    }

    #[test]
    fn full_composition_on_the_running_example_passes_the_waypoint() {
        let fl = fuels();
        let inner = t("(z y x)[y/x x]");
        let u0 = var("v");
        let trace = full_composition_trace(&inner, "x", &u0, &fl).unwrap();
        let target = subst(&inner, "x", &u0).unwrap();
        assert!(crate::term::alpha_eq(&target, &t("(z y v)[y/v v]")));
        verify_trace(&esub(inner, "x", u0), &target, &trace, &RuleSet::lambda_ex(), &fl).unwrap();
    }

    #[test]
    fn full_composition_is_empty_only_for_absorbing_metavariables() {
        let fl = fuels();
        let m = metavar("X", &["x"]);
        assert!(full_composition_trace(&m, "x", &var("u"), &fl).unwrap().is_empty());
        let m2 = metavar("X", &["y"]);
        let tr = full_composition_trace(&m2, "x", &var("u"), &fl).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr[0].rule, RuleId::Gc);
    }

    #[test]
    fn simulate_beta_produces_checked_traces() {
        let fl = fuels();
        let from = t("(\\x.x x) (\\y.y)");
        let to = t("(\\y.y) (\\y.y)");
        let trace = simulate_beta(&from, &to, &fl).unwrap();
        assert_eq!(trace[0].rule, RuleId::B);
        verify_trace(&from, &to, &trace, &RuleSet::lambda_ex(), &fl).unwrap();

        assert!(matches!(
            simulate_beta(&t("x"), &t("x"), &fl),
            Err(EngineError::NotAReduct)
        ));
    }

    #[test]
    fn nf_grammar_matches_reducibility() {
        for (src, nf) in [
            ("x", true),
            ("\\x.x", true),
            ("x (\\y.y) z", true),
            ("(\\x.x) y", false),
            ("x[y/z]", false),
            ("\\x.x (x ((\\y.y) z))", false),
        ] {
            assert_eq!(is_nf_grammar(&t(src)), nf, "{src}");
            let steps = reducts(&t(src), &RuleSet::lambda_ex(), &fuels()).unwrap();
            assert_eq!(steps.is_empty(), nf, "{src}");
        }
    }

    #[test]
    fn eta_strictly_decreases_along_steps() {
        let mut oracle = Oracle::new();
        let fl = fuels();
        let t0 = t("(\\x.x x) (\\y.y)");
        let v0 = oracle.sn_verdict(&t0, &RuleSet::lambda_ex(), &fl).unwrap();
        let eta0 = match v0 {
            SnVerdict::ProvedSN { eta, .. } => eta,
            _ => panic!("expected SN"),
        };
        for s in reducts(&t0, &RuleSet::lambda_ex(), &fl).unwrap() {
            let v = oracle.sn_verdict(&s.after, &RuleSet::lambda_ex(), &fl).unwrap();
            match v {
                SnVerdict::ProvedSN { eta, .. } => assert!(eta < eta0),
                _ => panic!("reduct of SN term must be SN"),
            }
        }
    }
}
