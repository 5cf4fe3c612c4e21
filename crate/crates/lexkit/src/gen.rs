//! Deterministic enumeration and seeded random generation of terms and
//! types, feeding the exhaustive suites.
//!
//! Enumeration is by node count, with binders named canonically by
//! nesting depth (`a0`, `a1`, …), so the output contains exactly one
//! representative per alpha class and no dedup pass is needed. Orders are
//! stable: sizes ascend, and within a size variables come before
//! abstractions before applications before closures. The random
//! generators mirror the same grammar with a seeded stream, for the
//! statistical suites where exhaustion is out of reach.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::term::{app, esub, lam, metavar, var, GenTerm, Name};
use crate::types::Type;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scope_names(free: &[&str], depth: usize) -> Vec<Name> {
    free.iter()
        .map(|s| s.to_string())
        .chain((0..depth).map(|i| format!("a{i}")))
        .collect()
}

type Memo = HashMap<(usize, usize), Vec<GenTerm>>;

fn pure_at(n: usize, depth: usize, free: &[&str], memo: &mut Memo) -> Vec<GenTerm> {
    if let Some(v) = memo.get(&(n, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        for x in scope_names(free, depth) {
            out.push(var(&x));
        }
    } else {
        let b = format!("a{depth}");
        for body in pure_at(n - 1, depth + 1, free, memo) {
            out.push(lam(&b, body));
        }
        for i in 1..=n.saturating_sub(2) {
            for l in pure_at(i, depth, free, memo) {
                for r in pure_at(n - 1 - i, depth, free, memo) {
                    out.push(app(l.clone(), r.clone()));
                }
            }
        }
    }
    memo.insert((n, depth), out.clone());
    out
}

/// Every pure term of size `1..=max_size` over the given free variables.
pub fn pure_terms(max_size: usize, free: &[&str]) -> Vec<GenTerm> {
    let mut memo = Memo::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(pure_at(n, 0, free, &mut memo));
    }
    out
}

fn full_at(n: usize, depth: usize, free: &[&str], memo: &mut Memo) -> Vec<GenTerm> {
    if let Some(v) = memo.get(&(n, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        for x in scope_names(free, depth) {
            out.push(var(&x));
        }
    } else {
        let b = format!("a{depth}");
        for body in full_at(n - 1, depth + 1, free, memo) {
            out.push(lam(&b, body));
        }
        for i in 1..=n.saturating_sub(2) {
            for l in full_at(i, depth, free, memo) {
                for r in full_at(n - 1 - i, depth, free, memo) {
                    out.push(app(l.clone(), r.clone()));
                }
            }
        }
        for i in 1..=n.saturating_sub(2) {
            for body in full_at(i, depth + 1, free, memo) {
                for arg in full_at(n - 1 - i, depth, free, memo) {
                    out.push(esub(body.clone(), &b, arg.clone()));
                }
            }
        }
    }
    memo.insert((n, depth), out.clone());
    out
}

/// Every term of size `1..=max_size` over the given free variables,
/// closures included.
pub fn terms(max_size: usize, free: &[&str]) -> Vec<GenTerm> {
    let mut memo = Memo::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(full_at(n, 0, free, &mut memo));
    }
    out
}

/// The three metavariable leaves used throughout the suites: a closed
/// one, one admitting `x`, and one admitting `x` and `y`.
pub fn meta_leaves() -> Vec<GenTerm> {
    vec![
        metavar("X", &[]),
        metavar("Y", &["x"]),
        metavar("Z", &["x", "y"]),
    ]
}

type MetaMemo = HashMap<(usize, usize), Vec<(GenTerm, usize)>>;

fn meta_at(
    n: usize,
    depth: usize,
    free: &[&str],
    max_meta: usize,
    memo: &mut MetaMemo,
) -> Vec<(GenTerm, usize)> {
    if let Some(v) = memo.get(&(n, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        for x in scope_names(free, depth) {
            out.push((var(&x), 0));
        }
        if max_meta > 0 {
            for m in meta_leaves() {
                out.push((m, 1));
            }
        }
    } else {
        let b = format!("a{depth}");
        for (body, used) in meta_at(n - 1, depth + 1, free, max_meta, memo) {
            out.push((lam(&b, body), used));
        }
        for i in 1..=n.saturating_sub(2) {
            for (l, ul) in meta_at(i, depth, free, max_meta, memo) {
                for (r, ur) in meta_at(n - 1 - i, depth, free, max_meta, memo) {
                    if ul + ur <= max_meta {
                        out.push((app(l.clone(), r.clone()), ul + ur));
                    }
                }
            }
        }
        for i in 1..=n.saturating_sub(2) {
            for (body, ub) in meta_at(i, depth + 1, free, max_meta, memo) {
                for (arg, ua) in meta_at(n - 1 - i, depth, free, max_meta, memo) {
                    if ub + ua <= max_meta {
                        out.push((esub(body.clone(), &b, arg.clone()), ub + ua));
                    }
                }
            }
        }
    }
    memo.insert((n, depth), out.clone());
    out
}

/// Every metaterm of size `1..=max_size` over free `x`, `y` with at most
/// `max_meta` metavariable occurrences drawn from [`meta_leaves`].
pub fn metaterms(max_size: usize, max_meta: usize) -> Vec<GenTerm> {
    let free = ["x", "y"];
    let mut memo = MetaMemo::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(
            meta_at(n, 0, &free, max_meta, &mut memo)
                .into_iter()
                .map(|(t, _)| t),
        );
    }
    out
}

/// Every type of syntax-tree depth `<= depth` over the given atoms.
pub fn types_to_depth(depth: usize, atoms: &[&str]) -> Vec<Type> {
    let mut cur: Vec<Type> = atoms.iter().map(|a| crate::types::atom(a)).collect();
    for _ in 1..depth {
        let mut next = cur.clone();
        for l in &cur {
            for r in &cur {
                for t in [crate::types::arrow(l.clone(), r.clone()), crate::types::inter(l.clone(), r.clone())] {
                    if !next.contains(&t) {
                        next.push(t);
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn rec_pure<R: Rng>(rng: &mut R, n: usize, scope: &mut Vec<Name>) -> GenTerm {
    if n <= 1 {
        let i = rng.gen_range(0..scope.len());
        return var(&scope[i].clone());
    }
    if n >= 3 && rng.gen_bool(0.5) {
        let i = rng.gen_range(1..=n - 2);
        let l = rec_pure(rng, i, scope);
        let r = rec_pure(rng, n - 1 - i, scope);
        return app(l, r);
    }
    let b = format!("b{}", scope.len());
    scope.push(b.clone());
    let body = rec_pure(rng, n - 1, scope);
    scope.pop();
    lam(&b, body)
}

/// One random pure term of size at most `max_size`.
pub fn random_pure<R: Rng>(rng: &mut R, max_size: usize, free: &[&str]) -> GenTerm {
    let n = rng.gen_range(1..=max_size.max(1));
    let mut scope: Vec<Name> = free.iter().map(|s| s.to_string()).collect();
    rec_pure(rng, n, &mut scope)
}

fn rec_full<R: Rng>(rng: &mut R, n: usize, scope: &mut Vec<Name>) -> GenTerm {
    if n <= 1 {
        let i = rng.gen_range(0..scope.len());
        return var(&scope[i].clone());
    }
    let kind = if n >= 3 { rng.gen_range(0..3) } else { 0 };
    match kind {
        0 => {
            let b = format!("b{}", scope.len());
            scope.push(b.clone());
            let body = rec_full(rng, n - 1, scope);
            scope.pop();
            lam(&b, body)
        }
        1 => {
            let i = rng.gen_range(1..=n - 2);
            let l = rec_full(rng, i, scope);
            let r = rec_full(rng, n - 1 - i, scope);
            app(l, r)
        }
        _ => {
            let i = rng.gen_range(1..=n - 2);
            let b = format!("b{}", scope.len());
            scope.push(b.clone());
            let body = rec_full(rng, i, scope);
            scope.pop();
            let arg = rec_full(rng, n - 1 - i, scope);
            esub(body, &b, arg)
        }
    }
}

/// One random term of size at most `max_size`, closures included.
pub fn random_term<R: Rng>(rng: &mut R, max_size: usize, free: &[&str]) -> GenTerm {
    let n = rng.gen_range(1..=max_size.max(1));
    let mut scope: Vec<Name> = free.iter().map(|s| s.to_string()).collect();
    rec_full(rng, n, &mut scope)
}
