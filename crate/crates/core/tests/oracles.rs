mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use proptest::prelude::*;
use slp_core::numtheory::{divisors, factorize, tau_bounds, FactorBudget};
use slp_core::{
    build_frontiers, digest_sorted, evaluate, reached_set, search_target, BigUint, DedupMode, Op, Program,
    SearchOptions, Step, TargetMode, TargetSpec,
};

#[test]
fn dedup_reached_sets_match_naive_enumeration() {
    let frontiers = build_frontiers(5, None, DedupMode::Digest).unwrap();
    for k in 1..=5 {
        let ours: BTreeSet<u128> = reached_set::<u128>(&frontiers[..=k]).unwrap();
        assert_eq!(ours, common::naive_reached(k), "level {k}");
    }
}

#[test]
fn search_matches_brute_force_lengths() {
    let lengths = common::naive_min_lengths(5);
    let frontiers = build_frontiers(3, None, DedupMode::Digest).unwrap();
    let opts = SearchOptions::default();
    for mode in [TargetMode::Exact, TargetMode::Multiple] {
        for n in 1..=200u64 {
            let target = TargetSpec::integer(n, mode).unwrap();
            let out = search_target(&target, 5, &frontiers, &opts).unwrap();
            assert_eq!(out.best_length, common::oracle_length(&lengths, n.into(), mode), "{n} {mode}");
            assert!(out.complete);
            if out.best_length.is_none() {
                assert_eq!(out.lower_bound, 6);
            }
        }
    }
}

#[test]
fn tau_bounds_hold_for_brute_force_lengths() {
    let lengths = common::naive_min_lengths(5);
    for (&n, &len) in &lengths {
        if n < 2 {
            continue;
        }
        let (lo, hi) = tau_bounds(&BigUint::from(n)).unwrap();
        assert!(lo as usize <= len && len <= hi as usize, "{n}: {lo} <= {len} <= {hi}");
    }
    // Everything up to 40 has length at most 5, so the bounds apply to it.
    for n in 2..=40u128 {
        assert!(lengths.contains_key(&n));
    }
}

#[test]
fn replacing_a_prefix_by_a_class_member_keeps_the_values() {
    // Two level-4 programs with the same value set, written in different orders.
    let a = Program::parse("{1,1,+},{2,2,*},{1,2,+},{3,4,*}").unwrap();
    let b = Program::parse("{1,1,+},{1,2,+},{2,2,*},{3,4,*}").unwrap();
    let va = evaluate::<u64>(&a).unwrap();
    let vb = evaluate::<u64>(&b).unwrap();
    let mut sa = va.values().to_vec();
    let mut sb = vb.values().to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    assert_eq!(sa, sb);
    assert_eq!(digest_sorted(&sa), digest_sorted(&sb));
}

fn remap<V: PartialEq>(prefix_from: &[V], prefix_to: &[V], index: u32) -> u32 {
    match prefix_from.get(index as usize - 1) {
        Some(v) => prefix_to.iter().position(|w| w == v).unwrap() as u32 + 1,
        None => index,
    }
}

fn suffix_strategy(start: usize, len: usize) -> impl Strategy<Value = Vec<(u32, u32, u8)>> {
    (0..len)
        .map(move |i| {
            let avail = (start + i + 1) as u32;
            (1..=avail, 1..=avail, 0u8..3)
        })
        .collect::<Vec<_>>()
}

fn op(code: u8) -> Op {
    Op::ALL[code as usize]
}

proptest! {
    #[test]
    fn parse_render_round_trip(steps in (1usize..12).prop_flat_map(|n| suffix_strategy(0, n))) {
        let p = Program::new(steps.iter().map(|&(a, b, c)| Step::new(a, b, op(c)))).unwrap();
        let text = p.render();
        prop_assert_eq!(Program::parse(&text).unwrap(), p.clone());
        prop_assert_eq!(Program::decode(&p.encode().unwrap()).unwrap(), p);
    }

    #[test]
    fn digest_ignores_order(mut values in proptest::collection::btree_set(1u64..1_000_000, 1..20)
        .prop_map(|s| s.into_iter().collect::<Vec<_>>()), seed in any::<u64>()) {
        let sorted = values.clone();
        let n = values.len();
        for i in (1..n).rev() {
            values.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        values.sort_unstable();
        prop_assert_eq!(digest_sorted(&values), digest_sorted(&sorted));
        let wide: Vec<BigUint> = sorted.iter().map(|&v| v.into()).collect();
        prop_assert_eq!(digest_sorted(&wide), digest_sorted(&sorted));
    }

    #[test]
    fn equal_value_sets_extend_alike(suffix in suffix_strategy(4, 4)) {
        let a = Program::parse("{1,1,+},{2,2,*},{1,2,+},{3,4,*}").unwrap();
        let b = Program::parse("{1,1,+},{1,2,+},{2,2,*},{3,4,*}").unwrap();
        let va = evaluate::<u128>(&a).unwrap().into_values();
        let vb = evaluate::<u128>(&b).unwrap().into_values();
        let mut pa = a.clone();
        let mut pb = b.clone();
        for &(x, y, c) in &suffix {
            pa.push(Step::new(x, y, op(c))).unwrap();
            pb.push(Step::new(remap(&va, &vb, x), remap(&va, &vb, y), op(c))).unwrap();
        }
        let mut ea = evaluate::<u128>(&pa).unwrap().into_values();
        let mut eb = evaluate::<u128>(&pb).unwrap().into_values();
        ea.sort_unstable();
        eb.sort_unstable();
        prop_assert_eq!(ea, eb);
    }

    #[test]
    fn factorization_multiplies_back(n in 2u64..u64::MAX) {
        let big = BigUint::from(n);
        let f = factorize(&big, &FactorBudget::default());
        prop_assert!(f.unfactored.is_empty());
        let product = f.factors.iter().fold(BigUint::from(1u8), |acc, (p, e)| acc * p.pow(*e));
        prop_assert_eq!(product, big);
    }

    #[test]
    fn divisors_match_trial_division(n in 1u64..20_000) {
        let f = factorize(&BigUint::from(n), &FactorBudget::default());
        let ours: Vec<u64> = divisors(&f).iter().map(|d| d.to_u64().unwrap()).collect();
        let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        prop_assert_eq!(f.divisor_count(), brute.len() as u64);
        prop_assert_eq!(ours, brute);
    }
}

#[test]
fn divisor_count_of_65520() {
    let f = factorize(&BigUint::from(65520u32), &FactorBudget::default());
    assert_eq!(f.divisor_count(), 120);
    let exps: BTreeMap<u64, u32> = f.factors.iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
    assert_eq!(exps, BTreeMap::from([(2, 4), (3, 2), (5, 1), (7, 1), (13, 1)]));
}
