//! Linear algebra over prime fields `GF(p)`, `p <= 251`.
//!
//! Subspaces are stored by their reduced row-echelon basis, which is unique,
//! so derived equality, hashing and ordering are those of the canonical form.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::is_prime;

/// Largest enumeration (points or subspaces) allowed before giving up.
pub const ENUMERATION_GUARD: u128 = 1 << 24;

pub type Vector = Vec<u8>;
pub type Matrix = Vec<Vec<u8>>;

/// Validates `p` as a supported field size.
pub fn field(p: u64) -> Result<u8> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    u8::try_from(p).map_err(|_| Error::FieldTooLarge(p))
}

fn inverses(p: u8) -> Vec<u8> {
    let p32 = p as u32;
    let mut inv = vec![0u8; p as usize];
    for a in 1..p32 {
        inv[a as usize] = (1..p32).find(|b| a * b % p32 == 1).expect("field") as u8;
    }
    inv
}

#[inline]
fn mul(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 * b as u16) % p as u16) as u8
}

#[inline]
fn add(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 + b as u16) % p as u16) as u8
}

#[inline]
fn sub(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 + p as u16 - b as u16) % p as u16) as u8
}

/// Reduced row-echelon form of the row space of `rows`; zero rows dropped.
/// The rank is the length of the result.
pub fn rref(p: u64, rows: &[Vector]) -> Result<Matrix> {
    let p = field(p)?;
    Ok(rref_unchecked(p, rows.to_vec()))
}

fn rref_unchecked(p: u8, mut m: Matrix) -> Matrix {
    let inv = inverses(p);
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let scale = inv[m[rank][c] as usize];
        for x in m[rank].iter_mut() {
            *x = mul(*x, scale, p);
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in c..cols {
                    let v = mul(f, m[rank][j], p);
                    m[r][j] = sub(m[r][j], v, p);
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

pub fn rank(p: u64, rows: &[Vector]) -> Result<usize> {
    Ok(rref(p, rows)?.len())
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(p: u8, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0u8, |acc, k| add(acc, mul(row[k], b[k][j], p), p)))
                .collect()
        })
        .collect()
}

pub fn mat_pow(p: u8, a: &Matrix, e: u32) -> Matrix {
    (0..e).fold(identity(a.len()), |acc, _| mat_mul(p, &acc, a))
}

pub fn mat_add(p: u8, a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| add(u, v, p)).collect())
        .collect()
}

pub fn scale(p: u8, a: &Matrix, c: u8) -> Matrix {
    a.iter()
        .map(|r| r.iter().map(|&x| mul(x, c, p)).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn dot(p: u8, a: &[u8], b: &[u8]) -> u8 {
    a.iter()
        .zip(b)
        .fold(0u8, |acc, (&x, &y)| add(acc, mul(x, y, p), p))
}

/// Lexicographic index of a vector, first coordinate most significant.
pub fn point_index(p: u8, v: &[u8]) -> u64 {
    v.iter().fold(0u64, |acc, &x| acc * p as u64 + x as u64)
}

pub fn point_from_index(p: u8, n: usize, mut idx: u64) -> Vector {
    let mut v = vec![0u8; n];
    for x in v.iter_mut().rev() {
        *x = (idx % p as u64) as u8;
        idx /= p as u64;
    }
    v
}

/// `p^e` as `u128`, saturating.
pub fn power(p: u64, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

/// Gaussian binomial `[n choose d]_p` by the q-Pascal rule; `None` on
/// overflow.
pub fn gaussian_binomial(p: u64, n: usize, d: usize) -> Option<u128> {
    if d > n {
        return Some(0);
    }
    let mut row: Vec<Option<u128>> = vec![Some(1)];
    for m in 1..=n {
        let mut next = vec![Some(1); m + 1];
        for k in 1..m {
            let shift = power(p, k);
            next[k] = row[k - 1]
                .zip(row[k])
                .and_then(|(a, b)| shift.checked_mul(b).and_then(|x| x.checked_add(a)));
        }
        row = next;
    }
    row[d]
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    p: u8,
    n: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn span(p: u64, n: usize, vectors: &[Vector]) -> Result<Self> {
        let p = field(p)?;
        for v in vectors {
            if v.len() != n {
                return Err(Error::Precondition(format!(
                    "vector of length {} in GF({p})^{n}",
                    v.len()
                )));
            }
            if v.iter().any(|&x| x >= p) {
                return Err(Error::Precondition(format!(
                    "coordinate out of range for GF({p})"
                )));
            }
        }
        Ok(Subspace {
            p,
            n,
            basis: rref_unchecked(p, vectors.to_vec()),
        })
    }

    pub fn zero(p: u64, n: usize) -> Result<Self> {
        Subspace::span(p, n, &[])
    }

    pub fn full(p: u64, n: usize) -> Result<Self> {
        Subspace::span(p, n, &identity(n))
    }

    /// Parses the text form: one digit string per basis row.
    pub fn from_rows(p: u64, rows: &[&str]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let vectors = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| {
                        c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse {
                            what: "subspace row",
                            detail: r.to_string(),
                        })
                    })
                    .collect::<Result<Vector>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(p, n, &vectors)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::AmbientMismatch {
                expected_p: self.p,
                expected_n: self.n,
                found_p: other.p,
                found_n: other.n,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rref_unchecked(self.p, rows).len() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let rows: Matrix = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace {
            p: self.p,
            n: self.n,
            basis: rref_unchecked(self.p, rows),
        })
    }

    /// Zassenhaus: reduce `[a | a]` over `[b | 0]`; rows with a zero left half
    /// span the intersection.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let n = self.n;
        let mut rows: Matrix = Vec::new();
        for a in &self.basis {
            rows.push(a.iter().chain(a).copied().collect());
        }
        for b in &other.basis {
            rows.push(b.iter().copied().chain(std::iter::repeat_n(0, n)).collect());
        }
        let reduced = rref_unchecked(self.p, rows);
        let meet: Matrix = reduced
            .into_iter()
            .filter(|r| r[..n].iter().all(|&x| x == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        Ok(Subspace {
            p: self.p,
            n,
            basis: rref_unchecked(self.p, meet),
        })
    }

    /// Trivial intersection, decided by rank.
    pub fn is_disjoint(&self, other: &Subspace) -> Result<bool> {
        Ok(rank_of_union(&[self.clone(), other.clone()])? == self.dim() + other.dim())
    }

    /// All `p^d` vectors of the subspace, in lexicographic order of their
    /// coefficient tuples.
    pub fn points(&self) -> Result<Vec<Vector>> {
        let count = power(self.p as u64, self.dim());
        if count > ENUMERATION_GUARD {
            return Err(Error::GuardExceeded(format!("{count} points")));
        }
        let d = self.dim();
        Ok((0..count as u64)
            .map(|c| {
                let coeffs = point_from_index(self.p, d, c);
                let mut v = vec![0u8; self.n];
                for (a, row) in coeffs.iter().zip(&self.basis) {
                    for (x, &r) in v.iter_mut().zip(row) {
                        *x = add(*x, mul(*a, r, self.p), self.p);
                    }
                }
                v
            })
            .collect())
    }

    /// Sorted indices of the nonzero vectors.
    pub fn nonzero_point_indices(&self) -> Result<Vec<u64>> {
        let mut idx: Vec<u64> = self
            .points()?
            .iter()
            .map(|v| point_index(self.p, v))
            .filter(|&i| i != 0)
            .collect();
        idx.sort_unstable();
        Ok(idx)
    }

    /// One digit string per basis row (space-separated numbers when `p > 10`).
    pub fn text_form(&self) -> String {
        self.basis
            .iter()
            .map(|r| row_text(self.p, r))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn row_text(p: u8, row: &[u8]) -> String {
    if p <= 10 {
        row.iter().map(|x| char::from(b'0' + x)).collect()
    } else {
        row.iter().map(u8::to_string).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text_form())
    }
}

/// Rank of the stacked bases.
pub fn rank_of_union(subspaces: &[Subspace]) -> Result<usize> {
    let Some(first) = subspaces.first() else {
        return Ok(0);
    };
    for s in &subspaces[1..] {
        first.same_ambient(s)?;
    }
    let rows: Matrix = subspaces
        .iter()
        .flat_map(|s| s.basis.iter().cloned())
        .collect();
    Ok(rref_unchecked(first.p, rows).len())
}

/// Every `d`-dimensional subspace of `GF(p)^n` in ascending canonical order.
pub fn enumerate_subspaces(p: u64, n: usize, d: usize) -> Result<Vec<Subspace>> {
    let q = field(p)?;
    if d > n {
        return Err(Error::Precondition(format!(
            "dimension {d} exceeds ambient {n}"
        )));
    }
    let count = gaussian_binomial(p, n, d).unwrap_or(u128::MAX);
    if count > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded(format!(
            "{count} subspaces of dimension {d} in GF({p})^{n}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut pivots = Vec::with_capacity(d);
    pivot_sets(n, d, 0, &mut pivots, &mut |piv| {
        // free positions: right of the row's pivot, not another pivot
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| {
                ((c + 1)..n)
                    .filter(|j| !piv.contains(j))
                    .map(move |j| (r, j))
            })
            .collect();
        let total = power(p, free.len()) as u64;
        for code in 0..total {
            let vals = point_from_index(q, free.len(), code);
            let mut basis = vec![vec![0u8; n]; d];
            for (r, &c) in piv.iter().enumerate() {
                basis[r][c] = 1;
            }
            for (&(r, j), &v) in free.iter().zip(&vals) {
                basis[r][j] = v;
            }
            out.push(Subspace { p: q, n, basis });
        }
    });
    out.sort_unstable();
    Ok(out)
}

fn pivot_sets(
    n: usize,
    d: usize,
    start: usize,
    cur: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if cur.len() == d {
        visit(cur);
        return;
    }
    for c in start..n {
        if n - c < d - cur.len() {
            break;
        }
        cur.push(c);
        pivot_sets(n, d, c + 1, cur, visit);
        cur.pop();
    }
}
