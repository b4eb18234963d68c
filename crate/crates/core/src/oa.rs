//! Orthogonal arrays as explicit symbol matrices.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{dot, point_from_index, power};
use crate::params::{canonicalize, degrees_of_freedom, ParameterSet};
use crate::spread::MixedSpread;

/// Largest tuple space counted for one column subset.
pub const TUPLE_GUARD: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    levels: Vec<u64>,
    cells: Vec<Vec<u64>>,
}

impl OrthogonalArray {
    /// Checks that every row has one symbol per column, below its level.
    pub fn new(levels: Vec<u64>, cells: Vec<Vec<u64>>) -> Result<Self> {
        if levels.contains(&0) {
            return Err(Error::ZeroLevel);
        }
        for (r, row) in cells.iter().enumerate() {
            if row.len() != levels.len() {
                return Err(Error::Precondition(format!(
                    "row {} has {} entries, expected {}",
                    r + 1,
                    row.len(),
                    levels.len()
                )));
            }
            if let Some((c, &x)) = row.iter().enumerate().find(|(c, &x)| x >= levels[*c]) {
                return Err(Error::Precondition(format!(
                    "row {} column {} holds {x}, outside 0..{}",
                    r + 1,
                    c + 1,
                    levels[c]
                )));
            }
        }
        Ok(OrthogonalArray { levels, cells })
    }

    pub fn runs(&self) -> usize {
        self.cells.len()
    }

    pub fn columns(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.cells
    }

    pub fn parameter_set(&self) -> Result<ParameterSet> {
        canonicalize(self.runs() as u64, self.levels.iter().map(|&s| (s, 1)))
    }

    /// Degrees of freedom equal `N - 1`.
    pub fn is_tight(&self) -> Result<bool> {
        Ok(degrees_of_freedom(&self.parameter_set()?) == self.runs() as u128 - 1)
    }

    /// Text form: `N k`, the levels, then one row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.runs(), self.columns());
        out.push_str(&self.levels.iter().join(" "));
        out.push('\n');
        for row in &self.cells {
            out.push_str(&row.iter().join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: "array file",
            detail,
        };
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let numbers = |line: &str| -> Result<Vec<u64>> {
            line.split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| bad(format!("not a number: {t:?}")))
                })
                .collect()
        };
        let header = numbers(lines.next().ok_or_else(|| bad("missing header".into()))?)?;
        let [n, k] = header[..] else {
            return Err(bad("header must be `N k`".into()));
        };
        let levels = numbers(lines.next().ok_or_else(|| bad("missing levels".into()))?)?;
        if levels.len() as u64 != k {
            return Err(bad(format!("{} levels for {k} columns", levels.len())));
        }
        let cells = lines.map(numbers).collect::<Result<Vec<_>>>()?;
        if cells.len() as u64 != n {
            return Err(bad(format!("{} rows, header says {n}", cells.len())));
        }
        OrthogonalArray::new(levels, cells)
    }

    /// First column subset (0-based, ascending) on which some `t`-tuple is
    /// not equally frequent, or `None` when the array has strength `t`.
    pub fn strength_violation(&self, t: usize) -> Result<Option<Vec<usize>>> {
        let k = self.columns();
        if t == 0 {
            return Ok(None);
        }
        if t > k {
            return Err(Error::Precondition(format!(
                "strength {t} exceeds {k} columns"
            )));
        }
        let subsets: Vec<Vec<usize>> = (0..k).combinations(t).collect();
        let n = self.runs() as u128;
        let mut guard_hit = None;
        for s in &subsets {
            let space: u128 = s.iter().map(|&c| self.levels[c] as u128).product();
            if space > TUPLE_GUARD && n.is_multiple_of(space) {
                guard_hit = Some(space);
                break;
            }
        }
        if let Some(space) = guard_hit {
            return Err(Error::GuardExceeded(format!("tuple space of {space}")));
        }
        Ok(subsets
            .par_iter()
            .find_first(|s| !self.balanced_on(s))
            .cloned())
    }

    fn balanced_on(&self, cols: &[usize]) -> bool {
        let space: u128 = cols.iter().map(|&c| self.levels[c] as u128).product();
        let n = self.runs() as u128;
        if !n.is_multiple_of(space) {
            return false;
        }
        let want = (n / space) as u64;
        let mut counts = vec![0u64; space as usize];
        for row in &self.cells {
            let slot = cols.iter().fold(0u128, |acc, &c| {
                acc * self.levels[c] as u128 + row[c] as u128
            });
            counts[slot as usize] += 1;
        }
        counts.iter().all(|&c| c == want)
    }

    /// Every `t`-subset of columns shows each tuple `N / prod s` times.
    pub fn verify_strength(&self, t: usize) -> Result<bool> {
        Ok(self.strength_violation(t)?.is_none())
    }
}

/// Rows indexed by `w` in `GF(p)^n` in lexicographic order; the entry in the
/// column of member `V` with canonical basis `v_1 .. v_d` is
/// `sum_r (w . v_r) p^(r-1)`.
pub fn oa_from_spread(spread: &MixedSpread) -> Result<OrthogonalArray> {
    let p = spread.p();
    let n = spread.ambient();
    let runs = power(p as u64, n);
    if runs > TUPLE_GUARD {
        return Err(Error::GuardExceeded(format!("{runs} runs")));
    }
    let levels: Vec<u64> = spread
        .members()
        .iter()
        .map(|m| power(p as u64, m.dim()) as u64)
        .collect();
    let cells = (0..runs as u64)
        .map(|idx| {
            let w = point_from_index(p, n, idx);
            spread
                .members()
                .iter()
                .map(|m| {
                    m.basis()
                        .iter()
                        .rev()
                        .fold(0u64, |acc, v| acc * p as u64 + dot(p, &w, v) as u64)
                })
                .collect()
        })
        .collect();
    OrthogonalArray::new(levels, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Subspace;
    use crate::spread::{rao_hamming, rs_nine_planes, table5_planes};

    #[test]
    fn four_run_array() {
        let oa = oa_from_spread(&rao_hamming(2, 2).unwrap()).unwrap();
        assert_eq!(
            oa.rows(),
            &[vec![0, 0, 0], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]
        );
        assert!(oa.verify_strength(2).unwrap());
        assert!(!oa.verify_strength(3).unwrap());
        assert_eq!(oa.strength_violation(3).unwrap(), Some(vec![0, 1, 2]));
        assert!(oa.is_tight().unwrap());
    }

    #[test]
    fn whole_space_column() {
        let s = MixedSpread::new(3, 2, vec![Subspace::full(3, 2).unwrap()], 1).unwrap();
        let oa = oa_from_spread(&s).unwrap();
        let mut col: Vec<u64> = oa.rows().iter().map(|r| r[0]).collect();
        col.sort();
        assert_eq!(col, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn constant_column_fails_strength_one() {
        let oa = OrthogonalArray::new(vec![2, 2], vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert!(!oa.verify_strength(1).unwrap());
    }

    #[test]
    fn nine_planes_and_table5() {
        let oa = oa_from_spread(&rs_nine_planes().unwrap()).unwrap();
        assert_eq!(oa.parameter_set().unwrap(), "64: 8^9".parse().unwrap());
        assert!(oa.verify_strength(2).unwrap());
        let t5 = oa_from_spread(&table5_planes().unwrap()).unwrap();
        assert!(t5.verify_strength(2).unwrap());
        assert!(!t5.is_tight().unwrap());
        assert_eq!(degrees_of_freedom(&t5.parameter_set().unwrap()), 35);
    }

    #[test]
    fn text_roundtrip() {
        let oa = oa_from_spread(&rao_hamming(3, 2).unwrap()).unwrap();
        let back = OrthogonalArray::from_text(&oa.to_text()).unwrap();
        assert_eq!(back, oa);
        assert!(OrthogonalArray::from_text("2 1\n2\n0\n").is_err());
        assert!(OrthogonalArray::from_text("1 1\n2\n5\n").is_err());
    }
}
