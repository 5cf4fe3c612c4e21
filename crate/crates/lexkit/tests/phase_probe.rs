//! Temporary timing probe for the projections suite phases. Delete me.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lexkit::gen;
use lexkit::labelled::{explore_internal, make_labelled, measures, split_step, unlabel, xc, StepKind};
use lexkit::rewrite::explore;
use lexkit::term::{canonical_key_bounded, CanonicalKey};
use lexkit::{parse_term, reducts, Fuels, KeyMode, Oracle, RuleId, RuleSet};

fn is_u_rule(r: RuleId) -> bool {
    matches!(
        r,
        RuleId::UVar | RuleId::UGc | RuleId::UApp | RuleId::ULamb | RuleId::UComp
    )
}

#[test]
fn phase_times() {
    let fuels = Fuels::default();
    let mut oracle = Oracle::new();

    let t0 = Instant::now();
    let seeds = gen::pure_terms(6, &["x"]);
    let bodies = ["\\w. w", "v v", "(\\w. w) v"];
    let rs = RuleSet::lambda_uex();
    let mut seen: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut pool = Vec::new();
    for t in &seeds {
        for b in bodies {
            let u = parse_term(b).unwrap();
            let (seed, _ctx) = make_labelled(t, "x", &u, &[], &mut oracle, &fuels).unwrap();
            let g = explore(&seed, &rs, &fuels).unwrap();
            for (k, term) in g.nodes {
                if seen.insert(k) {
                    pool.push(term);
                }
            }
        }
    }
    eprintln!("pool build: {:?} ({} entries)", t0.elapsed(), pool.len());

    let slice: Vec<_> = pool.iter().skip(pool.len().saturating_sub(8000)).collect();
    let labelled_count = slice.iter().filter(|n| n.contains_lsub()).count();
    eprintln!("slice 8000, labelled {labelled_count}");

    let rs_ex = RuleSet::lambda_ex();
    let key = |t: &lexkit::GenTerm| canonical_key_bounded(t, KeyMode::E, fuels.class_bound).unwrap();

    let mut d_red = Duration::ZERO;
    let mut d_xc = Duration::ZERO;
    let mut d_kb = Duration::ZERO;
    let mut d_onestep = Duration::ZERO;
    let mut d_ka = Duration::ZERO;
    let mut d_meas = Duration::ZERO;
    let mut d_exp = Duration::ZERO;
    let mut d_lift = Duration::ZERO;
    let mut n_steps = 0usize;
    let mut n_int = 0usize;

    for n in &slice {
        let t = Instant::now();
        let steps = reducts(n, &rs, &fuels).unwrap();
        d_red += t.elapsed();
        n_steps += steps.len();
        if !n.contains_lsub() {
            continue;
        }

        let t = Instant::now();
        let xb = xc(n).unwrap();
        d_xc += t.elapsed();

        let t = Instant::now();
        let _kb = key(&xb);
        d_kb += t.elapsed();

        let t = Instant::now();
        let mut one = BTreeSet::new();
        for r in reducts(&xb, &rs_ex, &fuels).unwrap() {
            one.insert(key(&r.after));
        }
        d_onestep += t.elapsed();

        let t = Instant::now();
        let _before = measures(n, &[], &mut oracle, &fuels).unwrap();
        d_meas += t.elapsed();

        for s in &steps {
            let t = Instant::now();
            let _ka = key(&xc(&s.after).unwrap());
            d_ka += t.elapsed();
            if matches!(split_step(s), StepKind::Internal) && !is_u_rule(s.rule) {
                n_int += 1;
                let t = Instant::now();
                let _a = measures(&s.after, &[], &mut oracle, &fuels).unwrap();
                d_meas += t.elapsed();
            }
        }

        let t = Instant::now();
        let _c = explore_internal(n, &fuels).unwrap();
        d_exp += t.elapsed();

        let t = Instant::now();
        let mut reach = BTreeSet::new();
        for s in &steps {
            reach.insert(key(&unlabel(&s.after)));
        }
        for s in reducts(&unlabel(n), &rs_ex, &fuels).unwrap() {
            let _ = reach.contains(&key(&s.after));
        }
        d_lift += t.elapsed();
    }

    eprintln!("steps {n_steps}, body-internal {n_int}");
    eprintln!("reducts:   {d_red:?}");
    eprintln!("xc:        {d_xc:?}");
    eprintln!("kb:        {d_kb:?}");
    eprintln!("one_step:  {d_onestep:?}");
    eprintln!("ka:        {d_ka:?}");
    eprintln!("measures:  {d_meas:?}");
    eprintln!("explore_i: {d_exp:?}");
    eprintln!("lift:      {d_lift:?}");
}
