//! Heights without building lattices.
//!
//! Heights are additive over factors, so `ht(N)` is one more than the best
//! total `sum k_i ht(s_i)` over non-maximal parameter sets. That is a knapsack
//! over each maximal family of pairwise compatible divisors (`s t | N`), with
//! capacity `N - 1` and weight `s - 1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::params::divisors;

/// Partial sums of the height constant stop once the tail cannot move the
/// floor; this many terms already fix it for every `u64` argument short of a
/// near-integer coincidence.
const MAX_TERMS: u32 = 12;

/// `floor(c (N - 1))` with `c = sum_{i >= 0} 1 / (2^(2^i) - 1)`, decided with
/// exact rationals: partial sum `S_k` and tail bound `2 / (2^(2^(k+1)) - 1)`
/// bracket `c` until both ends give the same floor.
pub fn height_bound(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroRuns);
    }
    let m = BigRational::from_integer(BigInt::from(n - 1));
    let mut sum = BigRational::zero();
    for k in 0..MAX_TERMS {
        sum += BigRational::new(BigInt::one(), fermat_minus_two(k));
        let tail = BigRational::new(BigInt::from(2), fermat_minus_two(k + 1));
        let lo = (&sum * &m).floor();
        let hi = ((&sum + &tail) * &m).floor();
        if lo == hi {
            return lo
                .to_integer()
                .to_u64()
                .ok_or(Error::Overflow("computing the height bound"));
        }
    }
    Err(Error::Precondition(format!(
        "height bound for N = {n} not resolved"
    )))
}

/// `2^(2^k) - 1`.
fn fermat_minus_two(k: u32) -> BigInt {
    (BigInt::one() << (1usize << k)) - 1
}

/// `ht(N)` of the idealized lattice through the additive recursion.
pub fn additive_height(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroRuns);
    }
    let mut memo = HashMap::new();
    Ok(additive_height_memo(n, &mut memo))
}

fn additive_height_memo(n: u64, memo: &mut HashMap<u64, u64>) -> u64 {
    if n == 1 {
        return 0;
    }
    if let Some(&h) = memo.get(&n) {
        return h;
    }
    let levels: Vec<u64> = divisors(n)
        .into_iter()
        .filter(|&d| d > 1 && d < n)
        .collect();
    let heights: Vec<u64> = levels
        .iter()
        .map(|&s| additive_height_memo(s, memo))
        .collect();
    let compatible = |a: usize, b: usize| n.is_multiple_of(levels[a] * levels[b]);
    let mut best = 0u64;
    for clique in maximal_cliques(levels.len(), &compatible) {
        best = best.max(knapsack(n, &levels, &heights, &clique));
    }
    let h = best + 1;
    memo.insert(n, h);
    h
}

/// Best value of `sum k ht(s)` with `sum k (s - 1) <= n - 1`, where `k <= 1`
/// unless `s^2 | n`.
fn knapsack(n: u64, levels: &[u64], heights: &[u64], items: &[usize]) -> u64 {
    let cap = (n - 1) as usize;
    let mut best = vec![0u64; cap + 1];
    for &i in items {
        let s = levels[i];
        let w = (s - 1) as usize;
        let v = heights[i];
        if n.is_multiple_of(s * s) {
            for c in w..=cap {
                best[c] = best[c].max(best[c - w] + v);
            }
        } else {
            for c in (w..=cap).rev() {
                best[c] = best[c].max(best[c - w] + v);
            }
        }
    }
    best[cap]
}

/// Bron-Kerbosch with pivoting over `0..count`.
fn maximal_cliques(count: usize, adjacent: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    fn expand(
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        adjacent: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = *p.iter().chain(&x).next().expect("nonempty");
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|&v| v == pivot || !adjacent(pivot, v))
            .collect();
        let mut p = p;
        let mut x = x;
        for v in candidates {
            r.push(v);
            let np = p
                .iter()
                .copied()
                .filter(|&u| u != v && adjacent(u, v))
                .collect();
            let nx = x
                .iter()
                .copied()
                .filter(|&u| u != v && adjacent(u, v))
                .collect();
            expand(r, np, nx, adjacent, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    expand(
        &mut Vec::new(),
        (0..count).collect(),
        Vec::new(),
        adjacent,
        &mut out,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(height_bound(16).unwrap(), 21);
        assert_eq!(height_bound(4).unwrap(), 4);
        assert_eq!(height_bound(64).unwrap(), 88);
        assert_eq!(height_bound(2).unwrap(), 1);
        assert_eq!(height_bound(1).unwrap(), 0);
        assert!(height_bound(0).is_err());
    }

    #[test]
    fn bound_agrees_with_float_away_from_integers() {
        let c: f64 = (0..6).map(|i| 1.0 / (2f64.powi(1 << i) - 1.0)).sum();
        for n in (1..=1u64 << 20).step_by(4099) {
            let x = c * (n - 1) as f64;
            if (x - x.round()).abs() > 1e-6 {
                assert_eq!(height_bound(n).unwrap(), x.floor() as u64, "n = {n}");
            }
        }
    }

    #[test]
    fn additive_heights_of_powers_of_two() {
        // 512 admits 2^1 16^34 (height 715 below the top), 1024 builds on it
        let expected = [1, 4, 9, 21, 42, 86, 171, 358, 716, 1433];
        for (e, &h) in expected.iter().enumerate() {
            assert_eq!(additive_height(1 << (e + 1)).unwrap(), h);
        }
    }

    #[test]
    fn additive_heights_small() {
        let table = [0, 1, 1, 4, 1, 3, 1, 9, 5, 3, 1, 12, 1, 3, 3, 21];
        for (i, &h) in table.iter().enumerate() {
            assert_eq!(additive_height(i as u64 + 1).unwrap(), h, "n = {}", i + 1);
        }
        assert_eq!(additive_height(30).unwrap(), 5);
        assert_eq!(additive_height(27).unwrap(), 15);
        assert_eq!(additive_height(25).unwrap(), 7);
    }

    #[test]
    fn cliques_of_a_path() {
        let adj = |a: usize, b: usize| a.abs_diff(b) == 1;
        let mut c = maximal_cliques(4, &adj);
        c.iter_mut().for_each(|v| v.sort());
        c.sort();
        assert_eq!(c, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }
}
