//! Parameter sets `(N, s_1^k_1 s_2^k_2 ...)` of strength-2 mixed orthogonal
//! arrays, the necessary existence conditions, and enumeration of every set
//! that satisfies them for a fixed run count.
//!
//! A parameter set is kept in canonical form: levels strictly increasing,
//! every count at least one, and no level-1 factors. The trivial set
//! `(N, 1^1)` is represented by an empty factor list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `level^count` term of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub level: u64,
    pub count: u64,
}

impl Factor {
    pub fn new(level: u64, count: u64) -> Self {
        Factor { level, count }
    }
}

/// Canonical parameter set. Ordering is by run count, then lexicographic on
/// the `(level, count)` list, so the root sorts first among sets with the same
/// run count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawParameterSet", into = "RawParameterSet")]
pub struct ParameterSet {
    runs: u64,
    factors: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct RawParameterSet {
    runs: u64,
    factors: Vec<Factor>,
}

impl TryFrom<RawParameterSet> for ParameterSet {
    type Error = Error;

    fn try_from(raw: RawParameterSet) -> Result<Self> {
        canonicalize(raw.runs, raw.factors.iter().map(|f| (f.level, f.count)))
    }
}

impl From<ParameterSet> for RawParameterSet {
    fn from(ps: ParameterSet) -> Self {
        RawParameterSet {
            runs: ps.runs,
            factors: ps.factors,
        }
    }
}

/// Merge duplicate levels, drop level-1 entries and sort.
pub fn canonicalize<I>(runs: u64, raw_factors: I) -> Result<ParameterSet>
where
    I: IntoIterator<Item = (u64, u64)>,
{
    if runs == 0 {
        return Err(Error::ZeroRuns);
    }
    let mut factors: Vec<Factor> = Vec::new();
    for (level, count) in raw_factors {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        if count == 0 {
            return Err(Error::ZeroCount);
        }
        if level == 1 {
            continue;
        }
        if !runs.is_multiple_of(level) {
            return Err(Error::LevelNotDivisor { runs, level });
        }
        factors.push(Factor { level, count });
    }
    factors.sort_unstable();
    let mut merged: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        match merged.last_mut() {
            Some(last) if last.level == f.level => {
                last.count = last
                    .count
                    .checked_add(f.count)
                    .ok_or(Error::Overflow("merging factor counts"))?;
            }
            _ => merged.push(f),
        }
    }
    Ok(ParameterSet {
        runs,
        factors: merged,
    })
}

impl ParameterSet {
    /// The trivial set `(N, 1^1)`.
    pub fn root(runs: u64) -> Result<Self> {
        canonicalize(runs, [])
    }

    /// The maximal set `(N, N^1)`. For `N = 1` this coincides with the root.
    pub fn top(runs: u64) -> Result<Self> {
        canonicalize(runs, [(runs, 1)])
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_root(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_top(&self) -> bool {
        if self.runs == 1 {
            return self.factors.is_empty();
        }
        self.factors.len() == 1 && self.factors[0] == Factor::new(self.runs, 1)
    }

    /// Total number of factors `k = sum k_i`.
    pub fn factor_count(&self) -> u128 {
        self.factors.iter().map(|f| f.count as u128).sum()
    }

    pub fn count_of(&self, level: u64) -> u64 {
        self.factors
            .iter()
            .find(|f| f.level == level)
            .map_or(0, |f| f.count)
    }

    /// The set obtained by removing one `level` factor and inserting the
    /// factors of `replacement` (a parameter set with `level` runs).
    /// Returns `None` if `level` does not occur.
    pub(crate) fn replace_one(
        &self,
        level: u64,
        replacement: &ParameterSet,
    ) -> Option<ParameterSet> {
        let pos = self.factors.iter().position(|f| f.level == level)?;
        let mut out: Vec<Factor> =
            Vec::with_capacity(self.factors.len() + replacement.factors.len());
        let mut base = self.factors.clone();
        if base[pos].count == 1 {
            base.remove(pos);
        } else {
            base[pos].count -= 1;
        }
        let (mut i, mut j) = (0, 0);
        let add = &replacement.factors;
        while i < base.len() || j < add.len() {
            if j == add.len() || (i < base.len() && base[i].level < add[j].level) {
                out.push(base[i]);
                i += 1;
            } else if i == base.len() || add[j].level < base[i].level {
                out.push(add[j]);
                j += 1;
            } else {
                out.push(Factor::new(base[i].level, base[i].count + add[j].count));
                i += 1;
                j += 1;
            }
        }
        Some(ParameterSet {
            runs: self.runs,
            factors: out,
        })
    }

    /// Text form without the run-count prefix, e.g. `2^5 4^17 8^1`.
    pub fn factor_text(&self) -> String {
        if self.factors.is_empty() {
            return "1^1".to_string();
        }
        self.factors
            .iter()
            .map(|f| format!("{}^{}", f.level, f.count))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.runs, self.factor_text())
    }
}

impl FromStr for ParameterSet {
    type Err = Error;

    /// Parses `"64: 2^5 4^17 8^1"`. A bare level (`"8"`) counts once.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |detail: String| Error::Parse {
            what: "parameter set",
            detail,
        };
        let (runs_text, rest) = s
            .split_once(':')
            .ok_or_else(|| parse_err(format!("missing ':' in {s:?}")))?;
        let runs: u64 = runs_text
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad run count {:?}", runs_text.trim())))?;
        let mut raw = Vec::new();
        for token in rest.split_whitespace() {
            let (level, count) = match token.split_once('^') {
                Some((l, c)) => (l, c),
                None => (token, "1"),
            };
            let level: u64 = level
                .parse()
                .map_err(|_| parse_err(format!("bad level in token {token:?}")))?;
            let count: u64 = count
                .parse()
                .map_err(|_| parse_err(format!("bad count in token {token:?}")))?;
            raw.push((level, count));
        }
        canonicalize(runs, raw)
    }
}

/// Conditions (C1)-(C4): every level divides `N`, a repeated level squares
/// into `N`, distinct levels multiply into `N`, and the Rao bound
/// `N - 1 >= sum k_i (s_i - 1)`.
pub fn satisfies_conditions(ps: &ParameterSet) -> bool {
    let n = ps.runs as u128;
    let fs = ps.factors();
    for (i, f) in fs.iter().enumerate() {
        let s = f.level as u128;
        if !n.is_multiple_of(s) {
            return false;
        }
        if f.count >= 2 && !n.is_multiple_of(s * s) {
            return false;
        }
        for g in &fs[i + 1..] {
            if !n.is_multiple_of(s * g.level as u128) {
                return false;
            }
        }
    }
    degrees_of_freedom(ps) < n
}

/// `sum k_i (s_i - 1)`; zero for the root.
pub fn degrees_of_freedom(ps: &ParameterSet) -> u128 {
    ps.factors
        .iter()
        .map(|f| f.count as u128 * (f.level as u128 - 1))
        .sum()
}

/// Every canonical parameter set with `n` runs satisfying (C1)-(C4), sorted.
pub fn enumerate_parameter_sets(n: u64) -> Result<Vec<ParameterSet>> {
    if n == 0 {
        return Err(Error::ZeroRuns);
    }
    let mut out = Vec::new();
    let levels: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    let mut chosen: Vec<Factor> = Vec::new();
    walk(n, &levels, 0, n - 1, &mut chosen, &mut |fs| {
        out.push(ParameterSet {
            runs: n,
            factors: fs.to_vec(),
        })
    });
    out.sort_unstable();
    Ok(out)
}

/// Number of parameter sets with `n` runs, without materializing them.
pub fn count_parameter_sets(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroRuns);
    }
    let levels: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    let mut chosen = Vec::new();
    let mut count = 0u64;
    walk(n, &levels, 0, n - 1, &mut chosen, &mut |_| count += 1);
    Ok(count)
}

// Levels are visited in ascending order; a level is compatible with the
// current choice only if its product with every chosen level divides n.
fn walk(
    n: u64,
    levels: &[u64],
    idx: usize,
    budget: u64,
    chosen: &mut Vec<Factor>,
    emit: &mut dyn FnMut(&[Factor]),
) {
    if idx == levels.len() {
        emit(chosen);
        return;
    }
    walk(n, levels, idx + 1, budget, chosen, emit);
    let s = levels[idx];
    let cost = s - 1;
    if cost > budget {
        return;
    }
    let compatible = chosen
        .iter()
        .all(|f| (n as u128).is_multiple_of(f.level as u128 * s as u128));
    if !compatible {
        return;
    }
    let max_count = if (n as u128).is_multiple_of(s as u128 * s as u128) {
        budget / cost
    } else {
        1
    };
    for count in 1..=max_count {
        chosen.push(Factor::new(s, count));
        walk(n, levels, idx + 1, budget - count * cost, chosen, emit);
        chosen.pop();
    }
}

/// Sorted divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// `Some((p, m))` when `n = p^m` with `m >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}
