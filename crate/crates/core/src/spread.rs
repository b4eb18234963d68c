//! Mixed spreads: collections of subspaces of `GF(p)^n` in which any `t` of
//! them span a direct sum. A strength-2 spread with members of dimensions
//! `d_i` yields an orthogonal array with `p^n` runs and one `p^(d_i)`-level
//! column per member.

use std::fmt::Write as _;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::gf::{
    self, enumerate_subspaces, field, identity, mat_pow, point_from_index, power, rank,
    rank_of_union, row_text, transpose, Matrix, Subspace, ENUMERATION_GUARD,
};
use crate::params::{canonicalize, prime_power, satisfies_conditions, ParameterSet};

/// Placement budget of the greedy realizer.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedSpread {
    p: u8,
    n: usize,
    members: Vec<Subspace>,
    strength: usize,
}

/// Largest `t <= t_max` such that every set of at most `t` members spans a
/// direct sum. Sets larger than the collection impose nothing.
pub fn spread_strength(members: &[Subspace], t_max: usize) -> Result<usize> {
    // checks the shared ambient space
    rank_of_union(members)?;
    let mut strength = t_max.min(1);
    for tau in 2..=t_max {
        if tau <= members.len() {
            for subset in members.iter().combinations(tau) {
                let owned: Vec<Subspace> = subset.iter().map(|s| (*s).clone()).collect();
                let dims: usize = owned.iter().map(Subspace::dim).sum();
                if rank_of_union(&owned)? != dims {
                    return Ok(strength);
                }
            }
        }
        strength = tau;
    }
    Ok(strength)
}

impl MixedSpread {
    /// Certifies `declared` strength; members are reordered by nonincreasing
    /// dimension, keeping the given order among equal dimensions.
    pub fn new(p: u64, n: usize, mut members: Vec<Subspace>, declared: usize) -> Result<Self> {
        let q = field(p)?;
        for m in &members {
            if m.p() != q || m.ambient() != n {
                return Err(Error::AmbientMismatch {
                    expected_p: q,
                    expected_n: n,
                    found_p: m.p(),
                    found_n: m.ambient(),
                });
            }
            if m.dim() == 0 {
                return Err(Error::Precondition("spread member of dimension 0".into()));
            }
        }
        members.sort_by_key(|m| std::cmp::Reverse(m.dim()));
        let strength = spread_strength(&members, declared)?;
        if strength < declared {
            return Err(Error::Precondition(format!(
                "declared strength {declared}, but the members only have strength {strength}"
            )));
        }
        Ok(MixedSpread {
            p: q,
            n,
            members,
            strength,
        })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn runs(&self) -> u64 {
        power(self.p as u64, self.n) as u64
    }

    /// `(p^n, ... (p^d)^1 ...)` with one factor per member.
    pub fn parameter_set(&self) -> Result<ParameterSet> {
        canonicalize(
            self.runs(),
            self.members
                .iter()
                .map(|m| (power(self.p as u64, m.dim()) as u64, 1)),
        )
    }

    /// Total nonzero points over members, counted with multiplicity.
    pub fn nonzero_point_count(&self) -> u128 {
        self.members
            .iter()
            .map(|m| power(self.p as u64, m.dim()) - 1)
            .sum()
    }

    /// Sorted indices of nonzero points lying in some member.
    pub fn covered_points(&self) -> Result<Vec<u64>> {
        let mut all: Vec<u64> = Vec::new();
        for m in &self.members {
            all.extend(m.nonzero_point_indices()?);
        }
        all.sort_unstable();
        all.dedup();
        Ok(all)
    }

    pub fn is_tight(&self) -> bool {
        self.nonzero_point_count() == power(self.p as u64, self.n) - 1
    }

    /// Header `p n strength`, then one block of basis rows per member,
    /// blocks separated by blank lines.
    pub fn to_dump(&self) -> String {
        let mut out = format!("{} {} {}\n", self.p, self.n, self.strength);
        for m in &self.members {
            out.push('\n');
            for row in m.basis() {
                writeln!(out, "{}", row_text(self.p, row)).unwrap();
            }
        }
        out
    }

    /// Reads the dump format. Lines starting with `#` are ignored; member
    /// rows are spanned, so any basis is accepted.
    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: "spread dump",
            detail,
        };
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim_start().starts_with('#'));
        let header = lines
            .by_ref()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| bad("missing header".into()))?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [p, n, t] = nums[..] else {
            return Err(bad(format!("header needs three numbers, got {header:?}")));
        };
        let q = field(p)?;
        let mut blocks: Vec<Matrix> = Vec::new();
        let mut current: Matrix = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                if !current.is_empty() {
                    blocks.push(std::mem::take(&mut current));
                }
                continue;
            }
            current.push(parse_row(q, line.trim()).map_err(|e| bad(format!("{line:?}: {e}")))?);
        }
        if !current.is_empty() {
            blocks.push(current);
        }
        let members = blocks
            .iter()
            .map(|b| Subspace::span(p, n as usize, b))
            .collect::<Result<Vec<_>>>()?;
        MixedSpread::new(p, n as usize, members, t as usize)
    }
}

fn parse_row(p: u8, line: &str) -> std::result::Result<Vec<u8>, String> {
    let parsed: std::result::Result<Vec<u8>, _> = if line.contains(char::is_whitespace) {
        line.split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|e| e.to_string()))
            .collect()
    } else {
        line.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| format!("bad digit {c:?}"))
            })
            .collect()
    };
    let row = parsed?;
    if row.iter().any(|&x| x >= p) {
        return Err(format!("entry out of range for GF({p})"));
    }
    Ok(row)
}

/// All one-dimensional subspaces of `GF(p)^n`.
pub fn rao_hamming(p: u64, n: usize) -> Result<MixedSpread> {
    if n == 0 {
        return Err(Error::Precondition(
            "ambient dimension must be positive".into(),
        ));
    }
    MixedSpread::new(p, n, enumerate_subspaces(p, n, 1)?, 2)
}

/// `p^r` square matrices forming a field: the polynomials of degree below `r`
/// in the companion matrix of the first monic polynomial (coefficients read
/// as a base-`p` number) for which every nonzero element is invertible.
pub fn matrix_field(p: u64, r: usize) -> Result<Vec<Matrix>> {
    let q = field(p)?;
    let size = power(p, r);
    if size > 1 << 16 {
        return Err(Error::GuardExceeded(format!("field of order {p}^{r}")));
    }
    for code in 0..size as u64 {
        let coeffs = point_from_index(q, r, code);
        // companion of x^r + c_{r-1} x^{r-1} + ... + c_0, low coefficient last
        let mut c = vec![vec![0u8; r]; r];
        for i in 1..r {
            c[i][i - 1] = 1;
        }
        for i in 0..r {
            let coef = coeffs[r - 1 - i];
            c[i][r - 1] = (q - coef) % q;
        }
        let powers: Vec<Matrix> = (0..r).map(|e| mat_pow(q, &c, e as u32)).collect();
        let elements: Vec<Matrix> = (0..size as u64)
            .map(|code| {
                let a = point_from_index(q, r, code);
                let mut m = vec![vec![0u8; r]; r];
                for (coef, pw) in a.iter().zip(&powers) {
                    m = gf::mat_add(q, &m, &gf::scale(q, pw, *coef));
                }
                m
            })
            .collect();
        if elements
            .iter()
            .skip(1)
            .all(|m| rank(p, m).map(|k| k == r).unwrap_or(false))
        {
            return Ok(elements);
        }
    }
    Err(Error::Precondition(format!(
        "no irreducible polynomial of degree {r} over GF({p})"
    )))
}

/// `{(0, y)}` and `{(x, xM)}` for `M` in a matrix field: a spread of
/// `GF(p)^(2r)` by `p^r + 1` subspaces of dimension `r`.
pub fn desarguesian(p: u64, r: usize) -> Result<Vec<Subspace>> {
    let f = matrix_field(p, r)?;
    let n = 2 * r;
    let mut out = Vec::with_capacity(f.len() + 1);
    let vertical: Matrix = (0..r).map(|i| unit(n, r + i)).collect();
    out.push(Subspace::span(p, n, &vertical)?);
    for m in &f {
        let rows: Matrix = (0..r)
            .map(|i| {
                let mut v = unit(n, i);
                v[r..].copy_from_slice(&m[i]);
                v
            })
            .collect();
        out.push(Subspace::span(p, n, &rows)?);
    }
    Ok(out)
}

fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    v[i] = 1;
    v
}

/// One `a`-dimensional subspace `{(0, y)}` plus `p^a` subspaces of dimension
/// `c = b - a` given by `x -> (x, [x 0] M)` for `M` in a matrix field of order
/// `p^a`. Needs `c <= a < b`. Coordinates are `(x_1 .. x_c, y_1 .. y_a)`.
pub fn large_factor(p: u64, b: usize, a: usize) -> Result<MixedSpread> {
    if a >= b || 2 * a < b {
        return Err(Error::Precondition(format!(
            "large factor needs b/2 <= a < b, got b = {b}, a = {a}"
        )));
    }
    let c = b - a;
    let f = matrix_field(p, a)?;
    let mut members = Vec::with_capacity(f.len() + 1);
    let w: Matrix = (0..a).map(|j| unit(b, c + j)).collect();
    members.push(Subspace::span(p, b, &w)?);
    for m in &f {
        let rows: Matrix = (0..c)
            .map(|i| {
                let mut v = unit(b, i);
                v[c..].copy_from_slice(&m[i]);
                v
            })
            .collect();
        members.push(Subspace::span(p, b, &rows)?);
    }
    MixedSpread::new(p, b, members, 2)
}

/// Companion matrix of the nine-plane decomposition of `GF(2)^6`.
pub fn rs_matrix() -> Matrix {
    vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
}

/// `{(x, Mx)}` in `GF(2)^6` for a 3x3 matrix `M`: the span of the columns of
/// the stacked block `[I; M]`.
fn graph_plane(m: &Matrix) -> Result<Subspace> {
    let cols = transpose(m);
    let rows: Matrix = (0..3)
        .map(|i| [unit(3, i), cols[i].clone()].concat())
        .collect();
    Subspace::span(2, 6, &rows)
}

fn plane_vertical() -> Result<Subspace> {
    Subspace::span(2, 6, &(3..6).map(|i| unit(6, i)).collect::<Vec<_>>())
}

fn plane_horizontal() -> Result<Subspace> {
    Subspace::span(2, 6, &(0..3).map(|i| unit(6, i)).collect::<Vec<_>>())
}

/// The nine planes `[0; I]`, `[I; 0]`, `[I; A^j]` for `j = 0..6`, in that
/// order.
pub fn rs_nine_planes() -> Result<MixedSpread> {
    let a = rs_matrix();
    assert_eq!(mat_pow(2, &a, 7), identity(3), "A^7 = I");
    let mut members = vec![plane_vertical()?, plane_horizontal()?];
    for j in 0..7 {
        members.push(graph_plane(&mat_pow(2, &a, j))?);
    }
    MixedSpread::new(2, 6, members, 2)
}

/// Ten lines of `GF(2)^6`, each the span of two listed columns, that fit in
/// the complement of the planes `[I; A^j]`, `j = 2..5`.
pub fn table4_planes() -> Result<Vec<Subspace>> {
    const COLUMNS: [(&str, &str); 10] = [
        ("000011", "101001"),
        ("000101", "110110"),
        ("001011", "010010"),
        ("000001", "001000"),
        ("000111", "110000"),
        ("011000", "111111"),
        ("000100", "010000"),
        ("000110", "100010"),
        ("100000", "011110"),
        ("010101", "111000"),
    ];
    let lines = COLUMNS
        .iter()
        .map(|(a, b)| Subspace::from_rows(2, &[a, b]))
        .collect::<Result<Vec<_>>>()?;
    for l in &lines {
        if l.dim() != 2 {
            return Err(Error::Precondition(format!(
                "column pair spans dimension {}",
                l.dim()
            )));
        }
    }
    spread_strength(&lines, 2).and_then(|t| {
        if t == 2 {
            Ok(lines)
        } else {
            Err(Error::Precondition("listed lines intersect".into()))
        }
    })
}

/// Five pairwise disjoint planes of `GF(2)^6` admitting no disjoint sixth:
/// `[I; 0]`, `[0; I]`, `[I; I]`, `[I; A]`, `[I; B]`.
pub fn table5_planes() -> Result<MixedSpread> {
    let a = rs_matrix();
    let b = vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 0, 0]];
    let members = vec![
        plane_horizontal()?,
        plane_vertical()?,
        graph_plane(&identity(3))?,
        graph_plane(&a)?,
        graph_plane(&b)?,
    ];
    MixedSpread::new(2, 6, members, 2)
}

/// Replaces three pairwise disjoint `r`-dimensional members over `GF(2)`,
/// with `V_k` inside `V_i + V_j`, by the `2^r - 1` planes
/// `span(a, b)` where `a + b` runs over the nonzero points of `V_k` and
/// `a in V_i`, `b in V_j`.
pub fn split_three(spread: &MixedSpread, i: usize, j: usize, k: usize) -> Result<MixedSpread> {
    if spread.p != 2 {
        return Err(Error::Precondition("splitting needs GF(2)".into()));
    }
    let idx = [i, j, k];
    if idx.iter().any(|&x| x >= spread.len()) || i == j || j == k || i == k {
        return Err(Error::Precondition(format!(
            "bad member indices {i}, {j}, {k}"
        )));
    }
    let (vi, vj, vk) = (&spread.members[i], &spread.members[j], &spread.members[k]);
    let r = vi.dim();
    if vj.dim() != r || vk.dim() != r {
        return Err(Error::Precondition(
            "members to split must share a dimension".into(),
        ));
    }
    for (a, b) in [(vi, vj), (vi, vk), (vj, vk)] {
        if !a.is_disjoint(b)? {
            return Err(Error::Precondition(
                "members to split must meet only in zero".into(),
            ));
        }
    }
    if rank_of_union(&[vi.clone(), vj.clone(), vk.clone()])? != 2 * r {
        return Err(Error::Precondition(
            "third member is not inside the span of the first two".into(),
        ));
    }
    let points_i = vi.points()?;
    let mut planes = Vec::with_capacity((1 << r) - 1);
    for v in vk.points()?.into_iter().skip(1) {
        let a = points_i
            .iter()
            .find(|a| {
                let b: Vec<u8> = a.iter().zip(&v).map(|(x, y)| x ^ y).collect();
                vj.contains(&b)
            })
            .expect("V_k lies in V_i + V_j");
        let b: Vec<u8> = a.iter().zip(&v).map(|(x, y)| x ^ y).collect();
        planes.push(Subspace::span(2, spread.n, &[a.clone(), b])?);
    }
    let mut members: Vec<Subspace> = spread
        .members
        .iter()
        .enumerate()
        .filter(|(x, _)| !idx.contains(x))
        .map(|(_, m)| m.clone())
        .collect();
    members.extend(planes);
    MixedSpread::new(2, spread.n, members, 2)
}

/// Adds every uncovered nonzero point as a one-dimensional member, each
/// generated line once.
pub fn complete_to_tight(spread: &MixedSpread) -> Result<MixedSpread> {
    if spread.strength < 2 && spread_strength(&spread.members, 2)? < 2 {
        return Err(Error::Precondition("completion needs strength 2".into()));
    }
    let total = power(spread.p as u64, spread.n);
    if total > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded(format!("{total} points")));
    }
    let mut covered = vec![false; total as usize];
    for idx in spread.covered_points()? {
        covered[idx as usize] = true;
    }
    let mut members = spread.members.clone();
    for idx in 1..total as u64 {
        if covered[idx as usize] {
            continue;
        }
        let line = Subspace::span(
            spread.p as u64,
            spread.n,
            &[point_from_index(spread.p, spread.n, idx)],
        )?;
        for q in line.nonzero_point_indices()? {
            covered[q as usize] = true;
        }
        members.push(line);
    }
    MixedSpread::new(spread.p as u64, spread.n, members, 2)
}

struct PointSet {
    words: usize,
}

impl PointSet {
    fn new(p: u8, n: usize) -> Self {
        PointSet {
            words: (power(p as u64, n) as usize).div_ceil(64),
        }
    }

    fn of(&self, s: &Subspace) -> Result<Vec<u64>> {
        let mut bits = vec![0u64; self.words];
        for i in s.nonzero_point_indices()? {
            bits[i as usize / 64] |= 1 << (i % 64);
        }
        Ok(bits)
    }

    fn disjoint(a: &[u64], b: &[u64]) -> bool {
        a.iter().zip(b).all(|(x, y)| x & y == 0)
    }

    fn union_into(dst: &mut [u64], src: &[u64]) {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d |= *s);
    }
}

/// First `d`-dimensional subspace, in canonical order, meeting every member
/// only in zero.
pub fn find_disjoint_subspace(spread: &MixedSpread, d: usize) -> Result<Option<Subspace>> {
    let ps = PointSet::new(spread.p, spread.n);
    let mut used = vec![0u64; ps.words];
    for m in &spread.members {
        PointSet::union_into(&mut used, &ps.of(m)?);
    }
    for cand in enumerate_subspaces(spread.p as u64, spread.n, d)? {
        if PointSet::disjoint(&ps.of(&cand)?, &used) {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// Why a greedy search stopped without a spread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyFailure {
    /// Position (in nonincreasing dimension order) of the deepest member that
    /// could not be placed.
    pub member: usize,
    pub dimension: usize,
    /// Members placed on the deepest branch.
    pub placed: usize,
    pub placements: u64,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedyOutcome {
    Realized(MixedSpread),
    Failed(GreedyFailure),
}

/// Searches for a strength-2 spread realizing `ps`, which must have
/// prime-power runs `p^m`. A member of dimension above `m/2` is seeded with
/// [`large_factor`]; otherwise pairwise disjoint hosts of dimension
/// `floor(m/2)` are seeded from a Desarguesian spread. Members fitting one per
/// host are carved from hosts; the rest are placed by backtracking over
/// canonical subspaces in nonincreasing dimension order.
pub fn greedy_realize(ps: &ParameterSet, budget: u64) -> Result<GreedyOutcome> {
    let n = ps.runs();
    let (p, m) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
    field(p)?;
    let m = m as usize;
    let mut dims: Vec<usize> = Vec::new();
    for f in ps.factors() {
        let (q, e) = prime_power(f.level).ok_or(Error::LevelNotPowerOfPrime {
            level: f.level,
            prime: p,
        })?;
        if q != p {
            return Err(Error::LevelNotPowerOfPrime {
                level: f.level,
                prime: p,
            });
        }
        dims.extend(std::iter::repeat_n(e as usize, f.count as usize));
    }
    if !satisfies_conditions(ps) {
        return Err(Error::InvalidParameterSet(ps.clone()));
    }
    dims.sort_unstable_by(|a, b| b.cmp(a));
    let realized = |members: Vec<Subspace>| -> Result<GreedyOutcome> {
        let spread = MixedSpread::new(p, m, members, 2)?;
        debug_assert_eq!(&spread.parameter_set()?, ps);
        Ok(GreedyOutcome::Realized(spread))
    };
    if dims.is_empty() {
        return realized(Vec::new());
    }
    if dims[0] == m {
        return realized(vec![Subspace::full(p, m)?]);
    }

    let mut placed: Vec<Subspace> = Vec::new();
    let hosts: Vec<Subspace>;
    let mut rest = &dims[..];
    if 2 * dims[0] > m {
        let seed = large_factor(p, m, dims[0])?;
        placed.push(seed.members[0].clone());
        hosts = seed.members[1..].to_vec();
        rest = &dims[1..];
    } else {
        hosts = half_dimension_hosts(p, m)?;
    }
    let host_dim = hosts.first().map_or(0, Subspace::dim);

    if rest.len() <= hosts.len() {
        for (d, host) in rest.iter().zip(&hosts) {
            placed.push(Subspace::span(p, m, &host.basis()[..*d])?);
        }
        return realized(placed);
    }

    let on_hosts = rest
        .iter()
        .take_while(|&&d| d == host_dim)
        .count()
        .min(hosts.len());
    placed.extend(hosts[..on_hosts].iter().cloned());
    let rest = &rest[on_hosts..];
    match backtrack(p, m, &placed, rest, budget)? {
        Ok(found) => {
            placed.extend(found);
            realized(placed)
        }
        Err(mut failure) => {
            failure.member += dims.len() - rest.len();
            failure.placed += dims.len() - rest.len();
            Ok(GreedyOutcome::Failed(failure))
        }
    }
}

/// `p^(m/2) + 1` pairwise disjoint subspaces of dimension `floor(m/2)`. For
/// odd `m = 2h + 1`, the Desarguesian spread of `GF(p)^(2h+2)` is cut by
/// the hyperplane `z_last = 0`, each cut is trimmed to `h` dimensions, and
/// the last coordinate is dropped.
fn half_dimension_hosts(p: u64, m: usize) -> Result<Vec<Subspace>> {
    let h = m / 2;
    if m.is_multiple_of(2) {
        return desarguesian(p, h);
    }
    let big = desarguesian(p, h + 1)?;
    let hyper = Subspace::span(
        p,
        m + 1,
        &(0..m).map(|i| unit(m + 1, i)).collect::<Vec<_>>(),
    )?;
    big.iter()
        .map(|s| {
            let cut = s.intersection(&hyper)?;
            let rows: Matrix = cut.basis()[..h].iter().map(|r| r[..m].to_vec()).collect();
            Subspace::span(p, m, &rows)
        })
        .collect()
}

type SearchResult = std::result::Result<Vec<Subspace>, GreedyFailure>;

fn backtrack(
    p: u64,
    m: usize,
    placed: &[Subspace],
    dims: &[usize],
    budget: u64,
) -> Result<SearchResult> {
    let q = field(p)?;
    let ps = PointSet::new(q, m);
    let mut used = vec![0u64; ps.words];
    for s in placed {
        PointSet::union_into(&mut used, &ps.of(s)?);
    }
    // candidates per dimension that avoid the seeded members
    let mut candidates: Vec<Vec<(Subspace, Vec<u64>)>> = vec![Vec::new(); m + 1];
    for &d in dims.iter().dedup() {
        for s in enumerate_subspaces(p, m, d)? {
            let bits = ps.of(&s)?;
            if PointSet::disjoint(&bits, &used) {
                candidates[d].push((s, bits));
            }
        }
    }
    let free_total = |u: &[u64]| -> u128 {
        (power(p, m) - 1) - u.iter().map(|w| w.count_ones() as u128).sum::<u128>()
    };
    let mut need_after = vec![0u128; dims.len() + 1];
    for i in (0..dims.len()).rev() {
        need_after[i] = need_after[i + 1] + power(p, dims[i]) - 1;
    }

    let k = dims.len();
    let mut choice = vec![0usize; k + 1];
    let mut stack: Vec<Vec<u64>> = vec![used];
    let mut placements = 0u64;
    let mut deepest = 0usize;
    let mut depth = 0usize;
    loop {
        if depth == k {
            let found = (0..k)
                .map(|i| candidates[dims[i]][choice[i]].0.clone())
                .collect();
            return Ok(Ok(found));
        }
        let list = &candidates[dims[depth]];
        let current = stack.last().expect("stack");
        let mut hit = None;
        for (c, (_, bits)) in list.iter().enumerate().skip(choice[depth]) {
            if PointSet::disjoint(bits, current) {
                let mut next = current.clone();
                PointSet::union_into(&mut next, bits);
                if free_total(&next) >= need_after[depth + 1] {
                    hit = Some((c, next));
                    break;
                }
            }
        }
        match hit {
            Some((c, next)) => {
                placements += 1;
                choice[depth] = c;
                stack.push(next);
                depth += 1;
                deepest = deepest.max(depth);
                if depth < k {
                    choice[depth] = if dims[depth] == dims[depth - 1] {
                        c + 1
                    } else {
                        0
                    };
                }
                if placements >= budget && depth < k {
                    return Ok(Err(failure(dims, deepest, placements, true)));
                }
            }
            None => {
                if depth == 0 {
                    return Ok(Err(failure(dims, deepest, placements, false)));
                }
                stack.pop();
                depth -= 1;
                choice[depth] += 1;
            }
        }
    }
}

fn failure(dims: &[usize], deepest: usize, placements: u64, exhausted: bool) -> GreedyFailure {
    let member = deepest.min(dims.len() - 1);
    GreedyFailure {
        member,
        dimension: dims[member],
        placed: deepest,
        placements,
        budget_exhausted: exhausted,
    }
}

/// The seven tight spreads of `GF(2)^6` realizing the maximal non-trivial
/// 64-run parameter sets, each paired with its parameter set.
pub fn dual_atoms_64() -> Result<Vec<(ParameterSet, MixedSpread)>> {
    let nine = rs_nine_planes()?;
    let six = split_three(&nine, 0, 1, 2)?;
    let three = split_three(&six, 0, 1, 2)?;

    let kept: Vec<Subspace> = nine.members[4..8].to_vec();
    let mut partial = kept;
    partial.extend(table4_planes()?);
    let mixed = complete_to_tight(&MixedSpread::new(2, 6, partial, 2)?)?;
    let lines = split_three(&mixed, 0, 1, 2)?;

    let spreads = vec![
        lines,
        three,
        mixed,
        six,
        nine,
        large_factor(2, 6, 4)?,
        large_factor(2, 6, 5)?,
    ];
    spreads
        .into_iter()
        .map(|s| Ok((s.parameter_set()?, s)))
        .collect()
}
