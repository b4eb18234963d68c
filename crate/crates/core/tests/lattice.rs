use std::collections::{BTreeSet, HashMap};

use oa_lattice::height::{additive_height, height_bound};
use oa_lattice::lattice::{height_additivity_check, one_step_expansions};
use oa_lattice::params::{divisors, factorize};
use oa_lattice::{
    build_lattice, degrees_of_freedom, BuildMode, FixtureSet, Lattice, LatticeFamily, ParameterSet,
};

fn ideal(n: u64) -> Lattice {
    build_lattice(n, BuildMode::Idealized).unwrap()
}

fn ps(t: &str) -> ParameterSet {
    t.parse().unwrap()
}

#[test]
fn dominance_never_increases_degrees_of_freedom() {
    for n in 1..=32 {
        let l = ideal(n);
        for v in 0..l.len() {
            for &c in l.children(v) {
                let (a, b) = (l.node(v), l.node(c as usize));
                assert!(degrees_of_freedom(b) <= degrees_of_freedom(a), "{a} -> {b}");
            }
        }
    }
}

/// Minimal common upper bounds of `a` and `b`.
fn minimal_upper_bounds(l: &Lattice, a: &ParameterSet, b: &ParameterSet) -> BTreeSet<ParameterSet> {
    let (a, b) = (l.index_of(a).unwrap(), l.index_of(b).unwrap());
    let upper: Vec<usize> = (0..l.len())
        .filter(|&x| l.dominates_id(x, a) && l.dominates_id(x, b))
        .collect();
    upper
        .iter()
        .filter(|&&x| !upper.iter().any(|&y| y != x && l.dominates_id(x, y)))
        .map(|&x| l.node(x).clone())
        .collect()
}

/// Maximal common lower bounds of `a` and `b`.
fn maximal_lower_bounds(l: &Lattice, a: &ParameterSet, b: &ParameterSet) -> BTreeSet<ParameterSet> {
    let (a, b) = (l.index_of(a).unwrap(), l.index_of(b).unwrap());
    let lower: Vec<usize> = (0..l.len())
        .filter(|&x| l.dominates_id(a, x) && l.dominates_id(b, x))
        .collect();
    lower
        .iter()
        .filter(|&&x| !lower.iter().any(|&y| y != x && l.dominates_id(y, x)))
        .map(|&x| l.node(x).clone())
        .collect()
}

#[test]
fn meets_and_joins_up_to_32() {
    // 24 and 32 have pairs with two incomparable candidate bounds
    for n in 1..=32 {
        assert_eq!(ideal(n).is_lattice(), n != 24 && n != 32, "N = {n}");
    }
    let l = ideal(24);
    let joins = minimal_upper_bounds(&l, &ps("24: 2^1 3^1"), &ps("24: 2^10"));
    assert_eq!(joins, BTreeSet::from([ps("24: 2^10 3^1"), ps("24: 12^1")]));
    let l = ideal(32);
    let meets = maximal_lower_bounds(&l, &ps("32: 2^1 4^1 8^1"), &ps("32: 2^1 16^1"));
    assert_eq!(
        meets,
        BTreeSet::from([ps("32: 2^4 8^1"), ps("32: 2^5 4^2")])
    );
}

#[test]
fn atoms_are_the_prime_levels() {
    for n in 2..=64 {
        let l = ideal(n);
        let want: Vec<ParameterSet> = factorize(n)
            .iter()
            .map(|&(p, _)| ps(&format!("{n}: {p}^1")))
            .collect();
        let mut got = l.atoms();
        got.sort();
        assert_eq!(got, want, "N = {n}");
    }
}

#[test]
fn heights_follow_covers() {
    for n in [12, 16, 24, 30, 32] {
        let l = ideal(n);
        let covers = l.covers();
        assert_eq!(l.height_at(l.root()), 0);
        for v in 0..l.len() {
            if v == l.root() {
                continue;
            }
            let best = covers[v]
                .iter()
                .map(|&c| l.height_at(c as usize))
                .max()
                .unwrap();
            assert_eq!(l.height_at(v), best + 1);
        }
    }
}

#[test]
fn covers_replace_by_dual_atoms_of_the_level() {
    let mut duals: HashMap<u64, Vec<ParameterSet>> = HashMap::new();
    for d in 2..=48 {
        duals.insert(d, ideal(d).dual_atoms());
    }
    for n in [12u64, 16, 24, 36, 48] {
        let l = ideal(n);
        let covers = l.covers();
        for v in 0..l.len() {
            if v == l.top() {
                continue;
            }
            let allowed: BTreeSet<ParameterSet> = one_step_expansions(l.node(v), &duals)
                .unwrap()
                .into_iter()
                .collect();
            for &c in &covers[v] {
                assert!(
                    allowed.contains(l.node(c as usize)),
                    "{} covers {}",
                    l.node(v),
                    l.node(c as usize)
                );
            }
        }
    }
}

#[test]
fn dual_atoms_are_covered_by_top() {
    for n in [12, 16, 30, 32] {
        let l = ideal(n);
        let covers = l.covers();
        let from_top: BTreeSet<u32> = covers[l.top()].iter().copied().collect();
        let duals: BTreeSet<u32> = l.dual_atom_ids().iter().copied().collect();
        assert_eq!(from_top, duals, "N = {n}");
    }
}

#[test]
fn heights_respect_the_bound_and_match_the_recursion() {
    for n in 1..=128 {
        let l = ideal(n);
        let bound = height_bound(n).unwrap();
        assert!(l.height() <= bound, "N = {n}: {} > {bound}", l.height());
        assert_eq!(l.height(), additive_height(n).unwrap(), "N = {n}");
        if [2, 4, 16].contains(&n) {
            assert_eq!(l.height(), bound);
        }
    }
}

#[test]
fn additivity_holds_in_both_modes() {
    let mut fam = LatticeFamily::idealized();
    for n in [24, 48, 60, 64, 72] {
        assert!(height_additivity_check(&mut fam, n).unwrap(), "N = {n}");
    }
    let mut fam = LatticeFamily::with_fixtures(FixtureSet::bundled());
    for n in [12, 32, 64] {
        assert!(height_additivity_check(&mut fam, n).unwrap(), "N = {n}");
    }
}

#[test]
fn all_realized_fixtures_reproduce_the_idealized_lattice() {
    let fixtures = FixtureSet::bundled();
    for n in (1..=16).chain([25, 27]).filter(|&n| n != 12) {
        let truth = build_lattice(n, BuildMode::Fixture(&fixtures)).unwrap();
        let model = ideal(n);
        assert_eq!(truth.nodes(), model.nodes(), "N = {n}");
        assert_eq!(truth.height(), model.height());
        assert_eq!(truth.dual_atoms(), model.dual_atoms());
        assert_eq!(truth.threshold_b().unwrap(), n - 1);
        assert!(truth.unrealized().is_empty());
    }
}

#[test]
fn fixture_table_values() {
    let fixtures = FixtureSet::bundled();
    let t = [1, 2, 2, 5, 2, 5, 2, 14, 6, 5, 2, 23, 2, 5, 5, 61];
    let a = [0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 4, 1, 1, 1, 2];
    let h = [0, 1, 1, 4, 1, 3, 1, 9, 5, 3, 1, 12, 1, 3, 3, 21];
    let mut rows: Vec<(u64, usize, usize, u64)> =
        (0..16).map(|i| (i as u64 + 1, t[i], a[i], h[i])).collect();
    rows.extend([
        (25, 8, 1, 7),
        (27, 25, 1, 15),
        (32, 320, 2, 42),
        (64, 3037, 7, 86),
    ]);
    for (n, nodes, duals, height) in rows {
        let l = build_lattice(n, BuildMode::Fixture(&fixtures)).unwrap();
        assert_eq!(
            (l.len(), l.dual_atoms().len(), l.height()),
            (nodes, duals, height),
            "N = {n}"
        );
    }
}

#[test]
fn thirty_two_and_twelve() {
    let fixtures = FixtureSet::bundled();
    let l = build_lattice(32, BuildMode::Fixture(&fixtures)).unwrap();
    assert_eq!(l.dual_atoms(), vec![ps("32: 2^16 16^1"), ps("32: 4^8 8^1")]);
    assert_eq!(l.threshold_b().unwrap(), 29);
    assert_eq!(ideal(32).dual_atoms().len(), 3);

    let l = build_lattice(12, BuildMode::Fixture(&fixtures)).unwrap();
    let missing: BTreeSet<String> = l.unrealized().iter().map(|p| p.factor_text()).collect();
    let expected: BTreeSet<String> = [
        "2^5 3^1", "2^6 3^1", "2^7 3^1", "2^8 3^1", "2^9 3^1", "2^3 6^1", "2^4 6^1", "2^5 6^1",
        "2^6 6^1",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(missing, expected);
}

#[test]
fn sixty_four_fixture_is_consistent() {
    let fixtures = FixtureSet::bundled();
    let l = build_lattice(64, BuildMode::Fixture(&fixtures)).unwrap();
    let f = fixtures.get(64).unwrap();
    for g in &f.realized_generators {
        assert!(l.contains(g));
    }
    for x in &f.nonexistent {
        assert!(!l.contains(x));
    }
    let model = ideal(64);
    for gone in l.unrealized() {
        assert!(
            f.nonexistent
                .iter()
                .any(|x| model.dominates(gone, x).unwrap()),
            "{gone}"
        );
    }
    assert_eq!(l.len() + l.unrealized().len(), model.len());
}

#[test]
fn jordan_dedekind_fails_for_twelve() {
    let (shortest, longest) = ideal(12).chain_length_range();
    assert!(shortest < longest);
}

#[test]
fn dominance_examples() {
    let l = ideal(16);
    assert!(l.dominates(&ps("16: 2^3 4^4"), &ps("16: 2^6 4^3")).unwrap());
    let l = ideal(12);
    assert!(!l.dominates(&ps("12: 2^1"), &ps("12: 3^1")).unwrap());
    assert!(!l.dominates(&ps("12: 3^1"), &ps("12: 2^1")).unwrap());
}

#[test]
fn dot_output() {
    let d6 = ideal(6).to_dot();
    assert_eq!(d6.matches(" [label=").count(), 5);
    assert_eq!(d6.matches(" -> ").count(), 5);
    assert!(d6.contains("rankdir=BT"));
    let fixtures = FixtureSet::bundled();
    let overlay = build_lattice(12, BuildMode::Overlay(&fixtures))
        .unwrap()
        .to_dot();
    assert_eq!(overlay.matches(" [label=").count(), 32);
    assert_eq!(overlay.matches("style=dashed").count(), 9);
}

#[test]
fn closed_forms() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let l = ideal(p);
        assert_eq!((l.len(), l.dual_atoms().len(), l.height()), (2, 1, 1));
    }
    let cases = [
        (30u64, 15, 3, 5),
        (27, 25, 1, 15),
        (16, 61, 2, 21),
        (25, 8, 1, 7),
    ];
    for (n, nodes, duals, height) in cases {
        let l = ideal(n);
        assert_eq!(
            (l.len(), l.dual_atoms().len(), l.height()),
            (nodes, duals, height),
            "N = {n}"
        );
    }
    for d in divisors(30) {
        assert!(ideal(d).is_lattice());
    }
}
