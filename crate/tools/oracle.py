#!/usr/bin/env python3
"""Standalone reference implementation used to freeze expected values for the
Rust test suite.

This file deliberately shares no code with the Rust crates: it is a second,
independent implementation of the same rewriting relations, measures and type
machinery, kept small and direct.  Running it regenerates
crates/lexkit/tests/fixtures/reference_cases.json, which the integration test
`reference_cases` replays against the Rust API.

Terms are tuples:
    ('var', name)
    ('app', t, u)
    ('lam', x, t)
    ('esub', t, x, u)      # t[x/u]
    ('lsub', t, x, u)      # t[[x/u]]
    ('meta', name, frozenset(names))
"""

import heapq
import json
import os
import random
import sys
from functools import lru_cache
from itertools import count

sys.setrecursionlimit(100000)

# ---------------------------------------------------------------------------
# term basics


def var(n):
    return ('var', n)


def app(t, u):
    return ('app', t, u)


def lam(x, t):
    return ('lam', x, t)


def esub(t, x, u):
    return ('esub', t, x, u)


def lsub(t, x, u):
    return ('lsub', t, x, u)


def meta(n, deco):
    return ('meta', n, frozenset(deco))


@lru_cache(maxsize=None)
def fv(t):
    k = t[0]
    if k == 'var':
        return frozenset((t[1],))
    if k == 'app':
        return fv(t[1]) | fv(t[2])
    if k == 'lam':
        return fv(t[2]) - {t[1]}
    if k in ('esub', 'lsub'):
        return (fv(t[1]) - {t[2]}) | fv(t[3])
    if k == 'meta':
        return frozenset(t[2])
    raise ValueError(k)


def bv(t):
    k = t[0]
    if k == 'var':
        return set()
    if k == 'app':
        return bv(t[1]) | bv(t[2])
    if k == 'lam':
        return {t[1]} | bv(t[2])
    if k in ('esub', 'lsub'):
        return bv(t[1]) | {t[2]} | bv(t[3])
    if k == 'meta':
        return set()
    raise ValueError(k)


def size(t):
    k = t[0]
    if k in ('var', 'meta'):
        return 1
    if k == 'lam':
        return 1 + size(t[2])
    return 1 + size(t[1]) + size(t[3] if k in ('esub', 'lsub') else t[2])


@lru_cache(maxsize=None)
def all_names(t):
    k = t[0]
    if k == 'var':
        return {t[1]}
    if k == 'app':
        return all_names(t[1]) | all_names(t[2])
    if k == 'lam':
        return {t[1]} | all_names(t[2])
    if k in ('esub', 'lsub'):
        return all_names(t[1]) | {t[2]} | all_names(t[3])
    if k == 'meta':
        return set(t[2])
    raise ValueError(k)


class Fresh:
    """Deterministic fresh-name supply: never returns a name in `used`."""

    def __init__(self, used):
        self.used = set(used)
        self.n = 0

    def fresh(self, base):
        stem = base.rstrip("0123456789'") or 'v'
        while True:
            cand = f'{stem}{self.n}'
            self.n += 1
            if cand not in self.used:
                self.used.add(cand)
                return cand


def rename_bound(t, old, new):
    """Rename the free occurrences of `old` inside t to `new` (used right
    after peeling a binder named `old`); decorations rename too."""
    k = t[0]
    if k == 'var':
        return var(new) if t[1] == old else t
    if k == 'app':
        return app(rename_bound(t[1], old, new), rename_bound(t[2], old, new))
    if k == 'lam':
        if t[1] == old:
            return t
        return lam(t[1], rename_bound(t[2], old, new))
    if k in ('esub', 'lsub'):
        body = t[1] if t[2] == old else rename_bound(t[1], old, new)
        return (k, body, t[2], rename_bound(t[3], old, new))
    if k == 'meta':
        if old in t[2]:
            return meta(t[1], (t[2] - {old}) | {new})
        return t
    raise ValueError(k)


# ---------------------------------------------------------------------------
# alpha-canonical encoding (shared contract with the Rust CanonicalKey)


@lru_cache(maxsize=None)
def _enc(t, env):
    k = t[0]
    if k == 'var':
        if t[1] in env:
            return f'(b {env[::-1].index(t[1])})'
        return f'(f {t[1]})'
    if k == 'app':
        return f'(a {_enc(t[1], env)} {_enc(t[2], env)})'
    if k == 'lam':
        return f'(l {_enc(t[2], env + (t[1],))})'
    if k == 'esub':
        return f'(s {_enc(t[1], env + (t[2],))} {_enc(t[3], env)})'
    if k == 'lsub':
        return f'(u {_enc(t[1], env + (t[2],))} {_enc(t[3], env)})'
    if k == 'meta':
        elems = sorted(_enc(var(d), env) for d in t[2])
        return f'(m {t[1]} {" ".join(elems)})'
    raise ValueError(k)


def alpha_key(t):
    return _enc(t, ())


def alpha_eq(t, u):
    return alpha_key(t) == alpha_key(u)


# ---------------------------------------------------------------------------
# capture-avoiding meta-substitution


def subst(t, x, v):
    k = t[0]
    if k == 'lsub':
        raise ValueError('subst on labelled term')
    if k == 'var':
        return v if t[1] == x else t
    if k == 'meta':
        return esub(t, x, v) if x in t[2] else t
    if k == 'app':
        return app(subst(t[1], x, v), subst(t[2], x, v))
    if k == 'lam':
        y, b = t[1], t[2]
        if y == x:
            return t
        if y in fv(v) and x in fv(b):
            fr = Fresh(all_names(t) | all_names(v) | {x})
            y2 = fr.fresh(y)
            return lam(y2, subst(rename_bound(b, y, y2), x, v))
        return lam(y, subst(b, x, v))
    if k == 'esub':
        b, y, a = t[1], t[2], t[3]
        a2 = subst(a, x, v)
        if y == x:
            return esub(b, y, a2)
        if y in fv(v) and x in fv(b) - {y}:
            fr = Fresh(all_names(t) | all_names(v) | {x})
            y2 = fr.fresh(y)
            return esub(subst(rename_bound(b, y, y2), x, v), y2, a2)
        return esub(subst(b, x, v), y, a2)
    raise ValueError(k)


# ---------------------------------------------------------------------------
# e-classes: adjacent swaps of independent substitutions, alpha-aware


def swap_node(t, eu):
    """Yield the one-swap variants of the ROOT node of t (not recursive)."""
    k = t[0]
    if k not in ('esub', 'lsub'):
        return
    inner = t[1]
    ik = inner[0]
    if ik not in ('esub', 'lsub'):
        return
    if not eu and (k == 'lsub' or ik == 'lsub'):
        return
    b1, a1 = t[2], t[3]          # outer binder / arg
    s, b2, a2 = inner[1], inner[2], inner[3]  # inner body / binder / arg
    if b1 in fv(a2):
        return                    # genuine dependence, not alpha-fixable
    if b2 in fv(a1) or b2 == b1:
        fr = Fresh(all_names(t))
        nb2 = fr.fresh(b2)
        s = rename_bound(s, b2, nb2)
        b2 = nb2
    yield (ik, (k, s, b1, a1), b2, a2)


def one_swaps(t, eu):
    k = t[0]
    out = []
    if k in ('esub', 'lsub'):
        out.extend(swap_node(t, eu))
        out.extend((k, b2, t[2], t[3]) for b2 in one_swaps(t[1], eu))
        out.extend((k, t[1], t[2], a2) for a2 in one_swaps(t[3], eu))
    elif k == 'app':
        out.extend(app(x, t[2]) for x in one_swaps(t[1], eu))
        out.extend(app(t[1], x) for x in one_swaps(t[2], eu))
    elif k == 'lam':
        out.extend(lam(t[1], x) for x in one_swaps(t[2], eu))
    return out


@lru_cache(maxsize=None)
def e_class(t, eu=False, bound=1024):
    seen = {alpha_key(t): t}
    work = [t]
    while work:
        cur = work.pop()
        for n in one_swaps(cur, eu):
            kk = alpha_key(n)
            if kk not in seen:
                if len(seen) >= bound:
                    raise RuntimeError('class bound exceeded')
                seen[kk] = n
                work.append(n)
    return [seen[k] for k in sorted(seen)]


@lru_cache(maxsize=None)
def canonical_key(t, mode):
    if mode == 'alpha':
        return alpha_key(t)
    return min(alpha_key(m) for m in e_class(t, eu=(mode == 'eu')))


# ---------------------------------------------------------------------------
# rewrite rules

RULESETS = {
    'beta': (['beta'], 'alpha'),
    'lx': (['B', 'Var', 'Gc', 'App', 'Lamb'], 'alpha'),
    'lex': (['B', 'Var', 'Gc', 'App', 'Lamb', 'Comp'], 'e'),
    'lxd': (['B', 'Var', 'Gc', 'App', 'Lamb', 'DsComp'], 'alpha'),
    'uex': (['uVar', 'uGc', 'uApp', 'uLamb', 'uComp'], 'eu'),
    'luex': (['B', 'Var', 'Gc', 'App', 'Lamb', 'Comp',
              'uVar', 'uGc', 'uApp', 'uLamb', 'uComp'], 'eu'),
}

RULE_ORDER = ['B', 'Var', 'Gc', 'App', 'Lamb', 'Comp',
              'uVar', 'uGc', 'uApp', 'uLamb', 'uComp', 'DsComp', 'beta']


def apply_rule(t, rule):
    """Try rule at the root of t; return the result or None."""
    k = t[0]
    if rule == 'beta':
        if k == 'app' and t[1][0] == 'lam':
            return subst(t[1][2], t[1][1], t[2])
        return None
    if rule == 'B':
        if k == 'app' and t[1][0] == 'lam':
            return esub(t[1][2], t[1][1], t[2])
        return None
    sub = 'esub' if not rule.startswith('u') else 'lsub'
    base = rule[1:] if rule.startswith('u') else rule
    if k != sub:
        return None
    b, x, a = t[1], t[2], t[3]
    if base == 'Var':
        return a if b == ('var', x) else None
    if base == 'Gc':
        return b if x not in fv(b) else None
    if base == 'App':
        if b[0] != 'app':
            return None
        return app((sub, b[1], x, a), (sub, b[2], x, a))
    if base == 'Lamb':
        if b[0] != 'lam':
            return None
        y, body = b[1], b[2]
        if y in fv(a) or y == x:
            fr = Fresh(all_names(t))
            y2 = fr.fresh(y)
            body = rename_bound(body, y, y2)
            y = y2
        return lam(y, (sub, body, x, a))
    if base == 'Comp':
        # t[y/u]<<x/v>> -> t<<x/v>>[y/u<<x/v>>] if x in fv(u)   (lsub case)
        # t[y/u][x/v]   -> t[x/v][y/u[x/v]]     if x in fv(u)   (esub case)
        if b[0] != 'esub':
            return None
        s, y, u = b[1], b[2], b[3]
        if x not in fv(u):
            return None
        if y in fv(a) or y == x:
            fr = Fresh(all_names(t))
            y2 = fr.fresh(y)
            s = rename_bound(s, y, y2)
            y = y2
        return esub((sub, s, x, a), y, (sub, u, x, a))
    if base == 'DsComp':
        if b[0] != 'esub':
            return None
        s, y, u = b[1], b[2], b[3]
        if x in fv(u) and x not in fv(s):
            return esub(s, y, esub(u, x, a))
        return None
    return None


def subterms_with_position(t):
    yield [], t
    k = t[0]
    if k == 'app':
        for p, s in subterms_with_position(t[1]):
            yield [0] + p, s
        for p, s in subterms_with_position(t[2]):
            yield [1] + p, s
    elif k == 'lam':
        for p, s in subterms_with_position(t[2]):
            yield [0] + p, s
    elif k in ('esub', 'lsub'):
        for p, s in subterms_with_position(t[1]):
            yield [0] + p, s
        for p, s in subterms_with_position(t[3]):
            yield [1] + p, s


def plug(t, pos, s):
    if not pos:
        return s
    k = t[0]
    i, rest = pos[0], pos[1:]
    if k == 'app':
        return app(plug(t[1], rest, s), t[2]) if i == 0 else app(t[1], plug(t[2], rest, s))
    if k == 'lam':
        return lam(t[1], plug(t[2], rest, s))
    if k in ('esub', 'lsub'):
        if i == 0:
            return (k, plug(t[1], rest, s), t[2], t[3])
        return (k, t[1], t[2], plug(t[3], rest, s))
    raise ValueError('bad position')


def reducts(t, rs):
    """All one-step reducts modulo the rule set's equations.

    Returns a list of (rule, position, before_rep, after) deduplicated by the
    canonical key of `after`, in deterministic order (members sorted by alpha
    key, positions pre-order, rules in RULE_ORDER)."""
    rules, mode = RULESETS[rs]
    members = [t] if mode == 'alpha' else e_class(t, eu=(mode == 'eu'))
    members = sorted(members, key=alpha_key)
    out = []
    seen = set()
    for m in members:
        for pos, s in subterms_with_position(m):
            for rule in rules:
                r = apply_rule(s, rule)
                if r is None:
                    continue
                after = plug(m, pos, r)
                kk = canonical_key(after, mode)
                if kk not in seen:
                    seen.add(kk)
                    out.append((rule, pos, m, after))
    return out


# ---------------------------------------------------------------------------
# exploration / SN oracle

PHI_CACHE = {}
EXPLORE_CACHE = {}


@lru_cache(maxsize=None)
def k_measure(t):
    k = t[0]
    if k == 'var' or k == 'meta':
        return 1
    if k == 'app':
        return k_measure(t[1]) + k_measure(t[2]) + 1
    if k == 'lam':
        return k_measure(t[2]) + 1
    if k == 'esub':
        return k_measure(t[1]) * k_measure(t[3])
    if k == 'lsub':
        return k_measure(t[1]) * phi(t[3])
    raise ValueError(k)


def explore(t, rs, node_fuel=20000):
    rules, mode = RULESETS[rs]
    root = canonical_key(t, mode)
    ck = (rs, root, node_fuel)
    if ck in EXPLORE_CACHE:
        return EXPLORE_CACHE[ck]
    nodes = {root: t}
    edges = {}
    work = [root]
    status = 'complete'
    next_check = 0
    while work:
        key = heapq.heappop(work)
        if key in edges:
            continue
        if len(edges) >= node_fuel:
            status = 'fuel'
            break
        edges[key] = []
        revisit = False
        for rule, pos, m, after in reducts(nodes[key], rs):
            ak = canonical_key(after, mode)
            edges[key].append((rule, ak))
            if ak not in nodes:
                nodes[ak] = after
                heapq.heappush(work, ak)
            else:
                revisit = True
        # a cycle settles the SN question; don't walk the rest of the graph
        if revisit and len(edges) >= next_check:
            next_check = len(edges) + 32
            if find_cycle(edges):
                status = 'fuel'
                break
    g = (nodes, edges, status, root)
    EXPLORE_CACHE[ck] = g
    return g


def find_cycle(edges):
    colour = {}

    for start in edges:
        if colour.get(start):
            continue
        stack = [(start, iter(edges.get(start, ())))]
        colour[start] = 1
        while stack:
            node, it = stack[-1]
            adv = None
            for _, nxt in it:
                if nxt not in edges:
                    continue
                c = colour.get(nxt)
                if c == 1:
                    return True
                if c is None:
                    adv = nxt
                    break
            if adv is None:
                colour[node] = 2
                stack.pop()
            else:
                colour[adv] = 1
                stack.append((adv, iter(edges.get(adv, ()))))
    return False


def sn_verdict(t, rs, node_fuel=20000):
    nodes, edges, status, root = explore(t, rs, node_fuel)
    if find_cycle(edges):
        return {'verdict': 'not-sn'}
    if status == 'fuel':
        return {'verdict': 'unknown'}
    memo = {}

    def eta(k):
        if k in memo:
            return memo[k]
        memo[k] = 0
        best = 0
        for _, nxt in edges.get(k, ()):
            best = max(best, 1 + eta(nxt))
        memo[k] = best
        return best

    return {
        'verdict': 'sn',
        'eta': eta(root),
        'max_size': max(k_measure(n) for n in nodes.values()),
    }


def phi(u):
    kk = alpha_key(u)
    if kk not in PHI_CACHE:
        v = sn_verdict(u, 'lex')
        assert v['verdict'] == 'sn', 'phi of a non-SN body'
        PHI_CACHE[kk] = 1 + v['eta'] + v['max_size']
    return PHI_CACHE[kk]


def is_nf_grammar(t):
    k = t[0]
    if k == 'lam':
        return is_nf_grammar(t[2])
    head = t
    args = []
    while head[0] == 'app':
        args.append(head[2])
        head = head[1]
    if head[0] != 'var':
        return False
    return all(is_nf_grammar(a) for a in args)


def normalize_leftmost(t, rs, step_fuel=100000):
    """Pinned deterministic policy: repeatedly take the minimum reduct by
    (representative alpha-key, position, rule order)."""
    trace = []
    cur = t
    for _ in range(step_fuel):
        steps = reducts(cur, rs)
        if not steps:
            return cur, trace, 'ok'
        best = min(steps, key=lambda s: (alpha_key(s[2]), s[1], RULE_ORDER.index(s[0])))
        trace.append((best[0], best[1], best[3]))
        cur = best[3]
    return cur, trace, 'fuel'


# ---------------------------------------------------------------------------
# perpetual strategy / ISN


def spine(t):
    args = []
    while t[0] == 'app':
        args.append(t[2])
        t = t[1]
    return t, args[::-1]


def perpetual_rule(t):
    """Name of the strategy clause that fires at the root (or 'nf')."""
    if is_nf_grammar(t):
        return 'nf'
    head, args = spine(t)
    if head[0] == 'lam':
        if args:
            return 'p-B'
        return 'p-abs'
    if head[0] == 'var':
        return 'p-var'
    if head[0] == 'esub':
        u = head[3]
        v = sn_verdict(u, 'lex')
        if v['verdict'] == 'sn':
            return 'p-subs1'
        if v['verdict'] == 'not-sn':
            return 'p-subs2'
        return 'unknown'
    raise ValueError('not a term')


def isn_check(t, depth_fuel=2000, stack=None, memo=None):
    if stack is None:
        stack, memo = set(), {}
    key = alpha_key(t)
    if key in memo:
        return memo[key]
    if key in stack or depth_fuel == 0:
        return False
    stack.add(key)
    head, args = spine(t)
    ok = False
    if head[0] == 'var':
        ok = all(isn_check(a, depth_fuel - 1, stack, memo) for a in args)
    elif head[0] == 'lam':
        if args:
            prem = esub(head[2], head[1], args[0])
            for a in args[1:]:
                prem = app(prem, a)
            ok = isn_check(prem, depth_fuel - 1, stack, memo)
        else:
            ok = isn_check(head[2], depth_fuel - 1, stack, memo)
    elif head[0] == 'esub':
        prem = subst(head[1], head[2], head[3])
        for a in args:
            prem = app(prem, a)
        ok = isn_check(head[3], depth_fuel - 1, stack, memo) and \
            isn_check(prem, depth_fuel - 1, stack, memo)
    stack.discard(key)
    if ok:
        memo[key] = True
    return ok


# ---------------------------------------------------------------------------
# measures on labelled terms


def ar(t, x):
    k = t[0]
    if k in ('var', 'meta'):
        return 0
    if k == 'app':
        return ar(t[1], x) + ar(t[2], x)
    if k == 'lam':
        return 0 if t[1] == x else ar(t[2], x)
    if k == 'lsub':
        return 0 if t[2] == x else ar(t[1], x)
    if k == 'esub':
        b = 0 if t[2] == x else ar(t[1], x)
        if x in fv(t[3]):
            return b + 1 + ar(t[3], x)
        return b + ar(t[3], x)
    raise ValueError(k)


def dep(t):
    k = t[0]
    if k in ('var', 'meta'):
        return 0
    if k == 'app':
        return dep(t[1]) + dep(t[2])
    if k == 'lam':
        return dep(t[2])
    if k == 'esub':
        return dep(t[1]) + dep(t[3])
    if k == 'lsub':
        return dep(t[1]) + ar(t[1], t[2])
    raise ValueError(k)


def xc(t):
    k = t[0]
    if k in ('var', 'meta'):
        return t
    if k == 'app':
        return app(xc(t[1]), xc(t[2]))
    if k == 'lam':
        return lam(t[1], xc(t[2]))
    if k == 'esub':
        return esub(xc(t[1]), t[2], xc(t[3]))
    if k == 'lsub':
        return subst(xc(t[1]), t[2], t[3])
    raise ValueError(k)


def unlabel(t):
    k = t[0]
    if k in ('var', 'meta'):
        return t
    if k == 'app':
        return app(unlabel(t[1]), unlabel(t[2]))
    if k == 'lam':
        return lam(t[1], unlabel(t[2]))
    if k in ('esub', 'lsub'):
        return esub(unlabel(t[1]), t[2], unlabel(t[3]))
    raise ValueError(k)


# ---------------------------------------------------------------------------
# superdevelopment / revb


def superdev(t):
    k = t[0]
    if k in ('var', 'meta'):
        return t
    if k == 'lam':
        return lam(t[1], superdev(t[2]))
    if k == 'app':
        bt, bu = superdev(t[1]), superdev(t[2])
        if bt[0] == 'lam':
            return subst(bt[2], bt[1], bu)
        return app(bt, bu)
    if k == 'esub':
        return subst(superdev(t[1]), t[2], superdev(t[3]))
    raise ValueError(k)


def revb(t):
    k = t[0]
    if k == 'var':
        return t
    if k == 'app':
        return app(revb(t[1]), revb(t[2]))
    if k == 'lam':
        return lam(t[1], revb(t[2]))
    if k == 'esub':
        return app(lam(t[2], revb(t[1])), revb(t[3]))
    raise ValueError(k)


# ---------------------------------------------------------------------------
# simple types (unification-based inference over ax/abs/app/subs)


def infer_simple(t):
    supply = count()
    substmap = {}

    def find(a):
        while a[0] == 'tv' and a[1] in substmap:
            a = substmap[a[1]]
        return a

    def occurs(i, a):
        a = find(a)
        if a[0] == 'tv':
            return a[1] == i
        if a[0] == 'arrow':
            return occurs(i, a[1]) or occurs(i, a[2])
        return False

    def unify(a, b):
        a, b = find(a), find(b)
        if a == b:
            return True
        if a[0] == 'tv':
            if occurs(a[1], b):
                return False
            substmap[a[1]] = b
            return True
        if b[0] == 'tv':
            return unify(b, a)
        if a[0] == 'arrow' and b[0] == 'arrow':
            return unify(a[1], b[1]) and unify(a[2], b[2])
        return a == b

    def go(t, env):
        k = t[0]
        if k == 'var':
            if t[1] not in env:
                env[t[1]] = ('tv', next(supply))
            return env[t[1]]
        if k == 'app':
            f = go(t[1], env)
            if f is None:
                return None
            a = go(t[2], env)
            if a is None:
                return None
            r = ('tv', next(supply))
            return r if unify(f, ('arrow', a, r)) else None
        if k == 'lam':
            d = ('tv', next(supply))
            saved = env.get(t[1])
            env[t[1]] = d
            b = go(t[2], env)
            if saved is None:
                env.pop(t[1], None)
            else:
                env[t[1]] = saved
            return None if b is None else ('arrow', d, b)
        if k == 'esub':
            ub = go(t[3], env)
            if ub is None:
                return None
            saved = env.get(t[2])
            env[t[2]] = ub
            b = go(t[1], env)
            if saved is None:
                env.pop(t[2], None)
            else:
                env[t[2]] = saved
            return b
        return None

    ty = go(t, {})
    if ty is None:
        return None

    names = {}

    def render(a):
        a = find(a)
        if a[0] == 'tv':
            if a[1] not in names:
                names[a[1]] = chr(ord('a') + (len(names) % 26))
            return names[a[1]]
        if a[0] == 'arrow':
            lhs = render(a[1])
            if find(a[1])[0] == 'arrow':
                lhs = f'({lhs})'
            return f'{lhs}->{render(a[2])}'
        raise ValueError(a)

    return render(ty)


# ---------------------------------------------------------------------------
# intersection types: flatten-inclusion subtyping


def flatten(ty):
    if ty[0] == 'inter':
        return flatten(ty[1]) + flatten(ty[2])
    return [ty]


def subtype(a, b):
    fa = flatten(a)
    return all(any(x == y for y in fa) for x in flatten(b))


# ---------------------------------------------------------------------------
# printer (spec grammar; extra parentheses are harmless for the replayer)


def pr(t):
    k = t[0]
    if k == 'var':
        return t[1]
    if k == 'app':
        lhs = pr(t[1])
        if t[1][0] == 'lam':
            lhs = f'({lhs})'
        rhs = pr(t[2])
        if t[2][0] in ('app', 'lam'):
            rhs = f'({rhs})'
        return f'{lhs} {rhs}'
    if k == 'lam':
        return f'\\{t[1]}.{pr(t[2])}'
    if k in ('esub', 'lsub'):
        b = pr(t[1])
        if t[1][0] in ('app', 'lam'):
            b = f'({b})'
        o, c = ('[[', ']]') if k == 'lsub' else ('[', ']')
        return f'{b}{o}{t[2]}/{pr(t[3])}{c}'
    if k == 'meta':
        return f'?{t[1]}{{{",".join(sorted(t[2]))}}}'
    raise ValueError(k)


# ---------------------------------------------------------------------------
# deterministic term generators


def enum_pure(max_size, free):
    """Alpha-canonical pure terms; binder at depth d is named a<d>."""
    memo = {}

    def go(n, d):
        key = (n, d)
        if key in memo:
            return memo[key]
        scope = list(free) + [f'a{i}' for i in range(d)]
        out = []
        if n == 1:
            out = [var(v) for v in scope]
        else:
            out.extend(lam(f'a{d}', b) for b in go(n - 1, d + 1))
            for i in range(1, n - 1):
                for l in go(i, d):
                    for r in go(n - 1 - i, d):
                        out.append(app(l, r))
        memo[key] = out
        return out

    res = []
    for n in range(1, max_size + 1):
        res.extend(go(n, 0))
    return res


def random_lambda(rng, max_size, free):
    n = rng.randint(1, max_size)

    def go(n, scope):
        if n <= 1:
            return var(rng.choice(scope))
        kinds = ['lam', 'app'] if n >= 3 else ['lam']
        kind = rng.choice(kinds)
        if kind == 'lam':
            b = f'a{len(scope)}'
            return lam(b, go(n - 1, scope + [b]))
        i = rng.randint(1, n - 2)
        return app(go(i, scope), go(n - 1 - i, scope))

    return go(n, list(free))


# ---------------------------------------------------------------------------
# self-checks: hand-verified identities, asserted before any value is frozen


def self_check():
    x, y, z, w, v = var('x'), var('y'), var('z'), var('w'), var('v')
    zyx = app(app(z, y), x)
    running = esub(esub(zyx, 'y', app(x, x)), 'x', v)

    assert fv(esub(zyx, 'y', app(x, x))) == {'z', 'x'}
    assert bv(esub(lam('x', x), 'y', z)) == {'x', 'y'}
    assert size(running) == 11

    assert alpha_eq(lam('x', x), lam('y', y))
    assert not alpha_eq(lam('x', lam('y', x)), lam('x', lam('y', y)))
    assert alpha_eq(esub(lam('y', x), 'x', y), esub(lam('z', var("x'")), "x'", y))

    # (\y.x){x:=y} is alpha-equal to \z.y
    assert alpha_eq(subst(lam('y', x), 'x', y), lam('z', y))
    assert subst(y, 'x', v) == y
    assert subst(meta('X', {'x', 'y'}), 'x', v) == esub(meta('X', {'x', 'y'}), 'x', v)

    # full composition endpoint of the running example
    target = subst(esub(zyx, 'y', app(x, x)), 'x', v)
    assert alpha_eq(target, esub(app(app(z, y), v), 'y', app(v, v)))

    # e-class cardinalities
    assert len(e_class(esub(esub(x, 'y', var('a')), 'z', var('b')))) == 2
    assert len(e_class(esub(esub(esub(x, 'x1', var('a')), 'x2', var('b')), 'x3', var('c')))) == 6
    assert len(e_class(lam('x', x))) == 1
    # dependent: outer binder free in the inner body blocks the swap
    assert len(e_class(esub(esub(x, 'y', z), 'z', w))) == 1

    # rules
    omega = app(lam('x', app(x, x)), lam('x', app(x, x)))
    assert sn_verdict(omega, 'beta')['verdict'] == 'not-sn'
    assert sn_verdict(omega, 'lex')['verdict'] == 'not-sn'
    assert sn_verdict(x, 'lex') == {'verdict': 'sn', 'eta': 0, 'max_size': 1}
    v2 = sn_verdict(esub(x, 'x', var('u')), 'lex')
    assert v2['verdict'] == 'sn' and v2['eta'] == 1

    # measures, worked examples
    vterm = esub(w, 'w', esub(app(x, x), 'y', x))
    assert ar(vterm, 'x') == 2
    assert dep(lsub(esub(vterm, 'y', vterm), 'x', var('x1'))) == 5
    assert k_measure(app(x, y)) == 3
    assert phi(x) == 2
    assert k_measure(lsub(x, 'y', z)) == 2

    # the running example normalizes to z (v v) v
    nf, trace, st = normalize_leftmost(running, 'lex')
    assert st == 'ok'
    assert alpha_eq(nf, app(app(z, app(v, v)), v))

    # superdev / revb / xc / unlabel
    assert superdev(app(lam('x', x), y)) == y
    assert alpha_eq(revb(esub(x, 'x', y)), app(lam('x', x), y))
    assert xc(lsub(x, 'x', v)) == v
    assert unlabel(lsub(x, 'x', v)) == esub(x, 'x', v)

    # types
    assert infer_simple(lam('x', x)) == 'a->a'
    assert infer_simple(esub(x, 'x', lam('y', y))) == 'a->a'
    assert infer_simple(lam('x', app(x, x))) is None
    A, B, C = ('atom', 'A'), ('atom', 'B'), ('atom', 'C')
    assert subtype(('inter', A, B), A)
    assert subtype(A, A)
    assert subtype(('inter', ('inter', A, B), C), ('inter', B, C))
    assert not subtype(A, ('inter', A, B))

    assert isn_check(app(lam('x', app(x, x)), lam('y', y)))
    assert not isn_check(omega)


# ---------------------------------------------------------------------------
# fixture generation


GEN_FUEL = 300


def term_case(t):
    case = {
        'term': pr(t),
        'size': size(t),
        'fv': sorted(fv(t)),
        'bv': sorted(bv(t)),
        'eclass': len(e_class(t)),
        'reducts_lex': sorted(pr(a) for _, _, _, a in reducts(t, 'lex')),
    }
    sv = sn_verdict(t, 'lex', GEN_FUEL)
    case['sn_lex'] = sv['verdict']
    if sv['verdict'] == 'sn':
        case['eta_lex'] = sv['eta']
        case['max_size_lex'] = sv['max_size']
    if sv['verdict'] != 'not-sn':
        nf, trace, st = normalize_leftmost(t, 'lex', step_fuel=300)
        if st == 'ok':
            case['nf_lex'] = pr(nf)
            case['trace_rules'] = [r for r, _, _ in trace]
    pure = not any(s[0] in ('esub', 'lsub', 'meta') for _, s in subterms_with_position(t))
    if pure:
        sb = sn_verdict(t, 'beta', GEN_FUEL)
        case['sn_beta'] = sb['verdict']
        if sb['verdict'] == 'sn':
            case['eta_beta'] = sb['eta']
    is_term = not any(s[0] in ('lsub', 'meta') for _, s in subterms_with_position(t))
    if is_term:
        case['perpetual'] = perpetual_rule(t)
        case['isn'] = bool(isn_check(t)) if case['sn_lex'] != 'unknown' else None
        case['revb'] = pr(revb(t))
        case['infer_simple'] = infer_simple(t)
        case['superdev'] = pr(superdev(t))
    return case


def labelled_case(t, xs):
    return {
        'term': pr(t),
        'ar': {v: ar(t, v) for v in xs},
        'dep': dep(t),
        'k': k_measure(t),
        'xc': pr(xc(t)),
        'unlabel': pr(unlabel(t)),
        'reducts_uex': sorted(pr(a) for _, _, _, a in reducts(t, 'uex')),
        'reducts_luex': sorted(pr(a) for _, _, _, a in reducts(t, 'luex')),
    }


def main():
    self_check()

    rng = random.Random(20260815)
    x, y, z, w, v = var('x'), var('y'), var('z'), var('w'), var('v')
    zyx = app(app(z, y), x)
    running = esub(esub(zyx, 'y', app(x, x)), 'x', v)
    omega = app(lam('x', app(x, x)), lam('x', app(x, x)))

    terms = [
        x,
        lam('x', x),
        app(lam('x', x), y),
        app(lam('x', z), y),
        esub(x, 'x', var('u')),
        esub(y, 'x', var('u')),
        running,
        esub(esub(x, 'y', var('a')), 'z', var('b')),
        esub(esub(x, 'y', z), 'z', w),
        omega,
        app(lam('x', y), omega),
        app(app(lam('x', lam('y', x)), z), w),
        app(lam('x', app(x, x)), lam('y', y)),
        esub(app(x, x), 'x', lam('y', app(y, y))),
        lam('x', app(x, x)),
        esub(lam('y', app(x, y)), 'x', app(z, z)),
        app(lam('x', app(x, lam('y', x))), z),
        esub(meta('X', {'x', 'y'}), 'x', v),
        esub(esub(meta('X', {'x', 'y'}), 'x', y), 'y', z),
        app(lam('x', meta('X', {'x', 'y'})), y),
    ]
    seen = {alpha_key(t) for t in terms}
    for t in enum_pure(4, ['x', 'y']):
        if alpha_key(t) not in seen:
            seen.add(alpha_key(t))
            terms.append(t)
    picked = 0
    while picked < 40:
        t = random_lambda(rng, 8, ['x', 'y'])
        if alpha_key(t) in seen:
            continue
        seen.add(alpha_key(t))
        # keep the replay corpus to terms whose graphs close within the
        # generation fuel; divergence coverage comes from the fixed cases
        if explore(t, 'beta', GEN_FUEL)[2] != 'complete':
            continue
        if explore(t, 'lex', GEN_FUEL)[2] != 'complete':
            continue
        terms.append(t)
        picked += 1

    vterm = esub(w, 'w', esub(app(x, x), 'y', x))
    labelled = [
        lsub(x, 'x', var('s1')),
        lsub(esub(vterm, 'y', vterm), 'x', var('x1')),
        lsub(esub(x, 'y', app(x, var('s1'))), 'x', var('s1')),
        lsub(lsub(app(x, y), 'x', var('s1')), 'y', var('s2')),
        esub(lsub(x, 'x', var('s1')), 'y', z),
        lsub(app(lam('a0', var('a0')), x), 'x', var('s1')),
    ]

    tyA, tyB, tyC = ('atom', 'A'), ('atom', 'B'), ('atom', 'C')

    def pty(ty):
        if ty[0] == 'atom':
            return ty[1]
        if ty[0] == 'arrow':
            lhs = pty(ty[1])
            if ty[1][0] == 'arrow':
                lhs = f'({lhs})'
            return f'{lhs}->{pty(ty[2])}'
        lhs = pty(ty[1])
        if ty[1][0] == 'arrow':
            lhs = f'({lhs})'
        rhs = pty(ty[2])
        if ty[2][0] in ('arrow', 'inter'):
            rhs = f'({rhs})'
        return f'{lhs}&{rhs}'

    types = [tyA, tyB, tyC,
             ('arrow', tyA, tyB), ('inter', tyA, tyB),
             ('inter', ('inter', tyA, tyB), tyC),
             ('inter', tyA, ('inter', tyB, tyC)),
             ('arrow', ('inter', tyA, tyB), tyC),
             ('inter', ('arrow', tyA, tyB), tyC),
             ('inter', tyA, tyA)]
    subtype_cases = [
        {'a': pty(a), 'b': pty(b), 'result': subtype(a, b)}
        for a in types for b in types
    ]

    fixture = {
        'node_fuel': GEN_FUEL,
        'step_fuel': 300,
        'terms': [term_case(t) for t in terms],
        'labelled': [labelled_case(t, ['x', 'y']) for t in labelled],
        'subtype': subtype_cases,
    }

    out = os.path.join(os.path.dirname(__file__), '..',
                       'crates', 'lexkit', 'tests', 'fixtures',
                       'reference_cases.json')
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, 'w') as f:
        json.dump(fixture, f, indent=1, sort_keys=True)
        f.write('\n')
    print(f'wrote {out}: {len(fixture["terms"])} terms, '
          f'{len(fixture["labelled"])} labelled, {len(subtype_cases)} subtype cases')


if __name__ == '__main__':
    main()
