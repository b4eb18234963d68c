use std::collections::BTreeSet;

use oa_lattice::params::{canonicalize, count_parameter_sets, divisors};
use oa_lattice::{
    degrees_of_freedom, enumerate_parameter_sets, satisfies_conditions, ParameterSet,
};
use proptest::prelude::*;

/// Condition check written out directly from the definitions.
fn conditions_hold(n: u64, factors: &[(u64, u64)]) -> bool {
    let mut dof = 0u128;
    for (i, &(s, k)) in factors.iter().enumerate() {
        if !n.is_multiple_of(s) || (k >= 2 && !n.is_multiple_of(s * s)) {
            return false;
        }
        for &(t, _) in &factors[i + 1..] {
            if !n.is_multiple_of(s * t) {
                return false;
            }
        }
        dof += k as u128 * (s as u128 - 1);
    }
    dof < n as u128
}

/// Every vector of counts over the divisors, bounded only by the per-level
/// square rule and the run budget, then filtered.
fn brute_force(n: u64) -> BTreeSet<Vec<(u64, u64)>> {
    let levels: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    let mut out = BTreeSet::new();
    let mut current = Vec::new();
    fn walk(
        n: u64,
        levels: &[u64],
        budget: u64,
        current: &mut Vec<(u64, u64)>,
        out: &mut BTreeSet<Vec<(u64, u64)>>,
    ) {
        let Some((&s, rest)) = levels.split_first() else {
            if conditions_hold(n, current) {
                out.insert(current.clone());
            }
            return;
        };
        walk(n, rest, budget, current, out);
        let max = if n.is_multiple_of(s * s) {
            budget / (s - 1)
        } else {
            (budget / (s - 1)).min(1)
        };
        for k in 1..=max {
            current.push((s, k));
            walk(n, rest, budget - k * (s - 1), current, out);
            current.pop();
        }
    }
    walk(n, &levels, n - 1, &mut current, &mut out);
    out
}

fn as_pairs(ps: &ParameterSet) -> Vec<(u64, u64)> {
    ps.factors().iter().map(|f| (f.level, f.count)).collect()
}

#[test]
fn enumeration_matches_brute_force_up_to_128() {
    for n in 1..=128u64 {
        let sets = enumerate_parameter_sets(n).unwrap();
        let listed: BTreeSet<Vec<(u64, u64)>> = sets.iter().map(as_pairs).collect();
        assert_eq!(listed.len(), sets.len(), "duplicates for N = {n}");
        assert_eq!(listed, brute_force(n), "N = {n}");
        assert_eq!(count_parameter_sets(n).unwrap(), sets.len() as u64);
        assert!(sets.windows(2).all(|w| w[0] < w[1]));
        for ps in &sets {
            assert!(satisfies_conditions(ps));
            assert!(degrees_of_freedom(ps) < n as u128);
        }
    }
}

fn bell(m: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 1..m {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    *row.last().unwrap()
}

#[test]
fn squarefree_counts_are_bell_numbers() {
    assert_eq!(
        (1..=6).map(bell).collect::<Vec<_>>(),
        vec![1, 2, 5, 15, 52, 203]
    );
    for (n, u) in [
        (2u64, 1),
        (6, 2),
        (30, 3),
        (210, 4),
        (2310, 5),
        (15, 2),
        (105, 3),
    ] {
        assert_eq!(count_parameter_sets(n).unwrap(), bell(u + 1), "N = {n}");
    }
}

#[test]
fn prime_power_closed_forms() {
    for p in [2u64, 3, 5, 7, 11] {
        assert_eq!(count_parameter_sets(p).unwrap(), 2);
        assert_eq!(count_parameter_sets(p * p).unwrap(), p + 3);
    }
    for p in [2u64, 3, 5, 7] {
        assert_eq!(count_parameter_sets(p.pow(3)).unwrap(), 2 * p * p + p + 4);
    }
    for p in [2u64, 3, 5] {
        let expected = (p.pow(5) + p.pow(4) + 5 * p.pow(3) + 5 * p * p + 2 * p + 10) / 2;
        assert_eq!(count_parameter_sets(p.pow(4)).unwrap(), expected);
    }
}

#[test]
fn stated_counts() {
    assert_eq!(enumerate_parameter_sets(12).unwrap().len(), 32);
    assert_eq!(enumerate_parameter_sets(4).unwrap().len(), 5);
    let five: Vec<String> = enumerate_parameter_sets(5)
        .unwrap()
        .iter()
        .map(ToString::to_string)
        .collect();
    assert_eq!(five, vec!["5: 1^1", "5: 5^1"]);
    assert!(enumerate_parameter_sets(0).is_err());
}

fn raw_factors() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((1u64..=12, 1u64..=6), 0..5)
}

proptest! {
    #[test]
    fn canonical_sets_pass_exactly_when_enumerated(n in 1u64..=96, raw in raw_factors()) {
        let raw: Vec<(u64, u64)> = raw.into_iter().map(|(s, k)| (if n % s == 0 { s } else { 1 }, k)).collect();
        let ps = canonicalize(n, raw.clone()).unwrap();
        let listed = enumerate_parameter_sets(n).unwrap();
        prop_assert_eq!(satisfies_conditions(&ps), listed.binary_search(&ps).is_ok());
        prop_assert_eq!(satisfies_conditions(&ps), conditions_hold(n, &as_pairs(&ps)));
    }

    #[test]
    fn canonical_form_is_order_independent(n in 1u64..=96, raw in raw_factors()) {
        let raw: Vec<(u64, u64)> = raw.into_iter().map(|(s, k)| (if n % s == 0 { s } else { 1 }, k)).collect();
        let mut reversed = raw.clone();
        reversed.reverse();
        let a = canonicalize(n, raw).unwrap();
        prop_assert_eq!(&a, &canonicalize(n, reversed).unwrap());
        prop_assert!(a.factors().windows(2).all(|w| w[0].level < w[1].level));
        prop_assert!(a.factors().iter().all(|f| f.level >= 2 && f.count >= 1));
    }

    #[test]
    fn text_and_json_round_trip(n in 1u64..=64, pick in any::<prop::sample::Index>()) {
        let sets = enumerate_parameter_sets(n).unwrap();
        let ps = &sets[pick.index(sets.len())];
        prop_assert_eq!(&ps.to_string().parse::<ParameterSet>().unwrap(), ps);
        let json = serde_json::to_string(ps).unwrap();
        prop_assert_eq!(&serde_json::from_str::<ParameterSet>(&json).unwrap(), ps);
    }
}
