//! Dominance lattices of parameter sets.
//!
//! The idealized lattice has every parameter set that passes (C1)-(C4) as a
//! node. Its order is generated by expansive replacement: one `S`-level
//! factor is swapped for the factors of any non-maximal parameter set with
//! `S` runs (the trivial `(S, 1^1)` deletes the factor). The true lattice
//! keeps only the nodes a fixture marks as realized, and replacement may only
//! use realized parameter sets of the divisor.
//!
//! Nodes are stored in sorted order together with their one-step expansion
//! edges. Heights and dual atoms only need those edges; the Hasse cover
//! relation is derived on first use because it needs descendant bitsets
//! (quadratic in the node count).

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixture::{FixtureSet, RealizabilityFixture};
use crate::params::{
    degrees_of_freedom, divisors, enumerate_parameter_sets, is_prime, ParameterSet,
};

/// Source of replacement arrays: the non-maximal nodes of the lattice with
/// `level` runs.
pub trait Catalog {
    fn nodes_at(&self, level: u64) -> Option<&[ParameterSet]>;
}

impl Catalog for HashMap<u64, Vec<ParameterSet>> {
    fn nodes_at(&self, level: u64) -> Option<&[ParameterSet]> {
        self.get(&level).map(Vec::as_slice)
    }
}

impl Catalog for BTreeMap<u64, Vec<ParameterSet>> {
    fn nodes_at(&self, level: u64) -> Option<&[ParameterSet]> {
        self.get(&level).map(Vec::as_slice)
    }
}

/// All sets reachable from `ps` by one expansive replacement, sorted.
/// Maximal catalog entries `(S, S^1)` are skipped since they would
/// reproduce `ps`.
pub fn one_step_expansions<C: Catalog + ?Sized>(
    ps: &ParameterSet,
    catalog: &C,
) -> Result<Vec<ParameterSet>> {
    let mut out = Vec::new();
    for f in ps.factors() {
        let entries = catalog
            .nodes_at(f.level)
            .ok_or(Error::MissingCatalog(f.level))?;
        for r in entries {
            if r.is_top() || r.runs() != f.level {
                continue;
            }
            if let Some(next) = ps.replace_one(f.level, r) {
                out.push(next);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out.retain(|x| x != ps);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Idealized,
    Fixture,
    /// Idealized nodes and order, with realizability flags from a fixture.
    Overlay,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Idealized => "idealized",
            Mode::Fixture => "fixture",
            Mode::Overlay => "overlay",
        }
    }
}

#[derive(Debug)]
pub struct Lattice {
    runs: u64,
    mode: Mode,
    nodes: Vec<ParameterSet>,
    index: HashMap<ParameterSet, u32>,
    children: Vec<Vec<u32>>,
    heights: Vec<u64>,
    topo: Vec<u32>,
    realized: Vec<bool>,
    unrealized: Vec<ParameterSet>,
    root: u32,
    top: u32,
    dual_atoms: Vec<u32>,
    covers: OnceLock<Vec<Vec<u32>>>,
}

/// Serializable summary of a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeStats {
    pub runs: u64,
    pub mode: Mode,
    pub nodes: usize,
    pub dual_atoms: usize,
    pub dual_atom_sets: Vec<String>,
    pub height: u64,
    #[serde(
        rename = "threshold_B",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub threshold_b: Option<u64>,
}

impl Lattice {
    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ParameterSet] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &ParameterSet {
        &self.nodes[id]
    }

    pub fn index_of(&self, ps: &ParameterSet) -> Option<usize> {
        self.index.get(ps).map(|&i| i as usize)
    }

    fn require(&self, ps: &ParameterSet) -> Result<usize> {
        self.index_of(ps)
            .ok_or_else(|| Error::UnknownNode(ps.clone()))
    }

    pub fn contains(&self, ps: &ParameterSet) -> bool {
        self.index.contains_key(ps)
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn top(&self) -> usize {
        self.top as usize
    }

    /// One-step expansion targets of a node.
    pub fn children(&self, id: usize) -> &[u32] {
        &self.children[id]
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn is_realized(&self, id: usize) -> bool {
        self.realized[id]
    }

    /// Nodes of the idealized lattice missing from this one (fixture mode),
    /// or flagged unrealized (overlay mode).
    pub fn unrealized(&self) -> &[ParameterSet] {
        &self.unrealized
    }

    pub fn height_of(&self, ps: &ParameterSet) -> Result<u64> {
        Ok(self.heights[self.require(ps)?])
    }

    pub fn height_at(&self, id: usize) -> u64 {
        self.heights[id]
    }

    /// `ht(N)`: the height of `(N, N^1)`.
    pub fn height(&self) -> u64 {
        self.heights[self.top as usize]
    }

    pub fn dual_atom_ids(&self) -> &[u32] {
        &self.dual_atoms
    }

    pub fn dual_atoms(&self) -> Vec<ParameterSet> {
        self.dual_atoms
            .iter()
            .map(|&i| self.nodes[i as usize].clone())
            .collect()
    }

    /// Nodes covering the root.
    pub fn atoms(&self) -> Vec<ParameterSet> {
        let covers = self.covers();
        let root = self.root;
        (0..self.nodes.len())
            .filter(|&v| v != root as usize && covers[v].contains(&root))
            .map(|v| self.nodes[v].clone())
            .collect()
    }

    /// Reflexive dominance: `b` can be reached from `a` by replacements.
    pub fn dominates(&self, a: &ParameterSet, b: &ParameterSet) -> Result<bool> {
        let a = self.require(a)?;
        let b = self.require(b)?;
        Ok(self.dominates_id(a, b))
    }

    pub fn dominates_id(&self, a: usize, b: usize) -> bool {
        if a == b || a == self.top as usize {
            return true;
        }
        let target_dof = degrees_of_freedom(&self.nodes[b]);
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(v) = queue.pop_front() {
            for &c in &self.children[v] {
                let c = c as usize;
                if c == b {
                    return true;
                }
                if !seen[c] && degrees_of_freedom(&self.nodes[c]) >= target_dof {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        false
    }

    /// `B(N)`: the largest `b` such that every idealized node with at most
    /// `b` degrees of freedom is realized, or `N - 1` if all are.
    pub fn threshold_b(&self) -> Result<u64> {
        if self.mode == Mode::Idealized {
            return Err(Error::RealizabilityUnknown);
        }
        let min_missing = self.unrealized.iter().map(degrees_of_freedom).min();
        Ok(match min_missing {
            Some(d) => (d - 1) as u64,
            None => self.runs - 1,
        })
    }

    /// Hasse cover lists (upper to lower), computed on first use.
    pub fn covers(&self) -> &[Vec<u32>] {
        self.covers.get_or_init(|| self.compute_covers())
    }

    pub fn cover_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (v, cs) in self.covers().iter().enumerate() {
            for &c in cs {
                edges.push((v, c as usize));
            }
        }
        edges
    }

    fn strict_descendants(&self) -> (usize, Vec<u64>) {
        let n = self.nodes.len();
        let words = n.div_ceil(64);
        let mut strict = vec![0u64; n * words];
        for &v in &self.topo {
            let v = v as usize;
            for &c in &self.children[v] {
                let c = c as usize;
                let (lo, hi) = if c < v {
                    let (a, b) = strict.split_at_mut(v * words);
                    (&a[c * words..(c + 1) * words], &mut b[..words])
                } else {
                    let (a, b) = strict.split_at_mut(c * words);
                    (&b[..words], &mut a[v * words..(v + 1) * words])
                };
                for (dst, src) in hi.iter_mut().zip(lo) {
                    *dst |= *src;
                }
                strict[v * words + c / 64] |= 1 << (c % 64);
            }
        }
        (words, strict)
    }

    fn compute_covers(&self) -> Vec<Vec<u32>> {
        let (words, strict) = self.strict_descendants();
        let mut below = vec![0u64; words];
        self.children
            .iter()
            .map(|cs| {
                below.iter_mut().for_each(|w| *w = 0);
                for &c in cs {
                    let row = &strict[c as usize * words..(c as usize + 1) * words];
                    for (dst, src) in below.iter_mut().zip(row) {
                        *dst |= *src;
                    }
                }
                cs.iter()
                    .copied()
                    .filter(|&c| below[c as usize / 64] & (1 << (c % 64)) == 0)
                    .collect()
            })
            .collect()
    }

    /// Reflexive down-sets as bitsets.
    fn down_sets(&self) -> (usize, Vec<u64>) {
        let (words, mut sets) = self.strict_descendants();
        for v in 0..self.nodes.len() {
            sets[v * words + v / 64] |= 1 << (v % 64);
        }
        (words, sets)
    }

    /// Whether every pair of nodes has a unique meet and join.
    pub fn is_lattice(&self) -> bool {
        let n = self.nodes.len();
        let (words, down) = self.down_sets();
        let mut up = vec![0u64; n * words];
        for x in 0..n {
            for y in 0..n {
                if down[x * words + y / 64] & (1 << (y % 64)) != 0 {
                    up[y * words + x / 64] |= 1 << (x % 64);
                }
            }
        }
        let bound_exists = |sets: &[u64], a: usize, b: usize| -> bool {
            let common: Vec<u64> = (0..words)
                .map(|w| sets[a * words + w] & sets[b * words + w])
                .collect();
            let members: Vec<usize> = (0..n)
                .filter(|&x| common[x / 64] & (1 << (x % 64)) != 0)
                .collect();
            // the bound must contain every common element in its own set
            members
                .iter()
                .any(|&m| (0..words).all(|w| sets[m * words + w] & common[w] == common[w]))
        };
        for a in 0..n {
            for b in a + 1..n {
                if !bound_exists(&down, a, b) || !bound_exists(&up, a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Lengths of the shortest and longest maximal chains from the top to the
    /// root along cover edges.
    pub fn chain_length_range(&self) -> (u64, u64) {
        let covers = self.covers();
        let mut dist = vec![u64::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([self.top as usize]);
        dist[self.top as usize] = 0;
        while let Some(v) = queue.pop_front() {
            for &c in &covers[v] {
                if dist[c as usize] == u64::MAX {
                    dist[c as usize] = dist[v] + 1;
                    queue.push_back(c as usize);
                }
            }
        }
        (dist[self.root as usize], self.height())
    }

    pub fn stats(&self) -> LatticeStats {
        let dual: Vec<String> = self.dual_atoms().iter().map(ToString::to_string).collect();
        LatticeStats {
            runs: self.runs,
            mode: self.mode,
            nodes: self.nodes.len(),
            dual_atoms: dual.len(),
            dual_atom_sets: dual,
            height: self.height(),
            threshold_b: self.threshold_b().ok(),
        }
    }

    /// Graphviz digraph of the Hasse diagram, root at the bottom. Dual atoms
    /// are drawn with a double outline; unrealized nodes (overlay mode) are
    /// dashed and labelled with a cross.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let dual: Vec<bool> = {
            let mut d = vec![false; self.nodes.len()];
            for &i in &self.dual_atoms {
                d[i as usize] = true;
            }
            d
        };
        writeln!(
            out,
            "digraph \"lattice_{}_{}\" {{",
            self.runs,
            self.mode.as_str()
        )
        .unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        writeln!(out, "  node [shape=box, fontsize=10];").unwrap();
        writeln!(out, "  edge [dir=none];").unwrap();
        for (i, ps) in self.nodes.iter().enumerate() {
            let mut attrs = vec![format!("label=\"{}\"", dot_label(ps, self.realized[i]))];
            if dual[i] {
                attrs.push("shape=ellipse".into());
                attrs.push("peripheries=2".into());
            }
            if !self.realized[i] {
                attrs.push("style=dashed".into());
                attrs.push("color=red".into());
            }
            writeln!(out, "  n{} [{}];", i, attrs.join(", ")).unwrap();
        }
        let mut by_height: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            by_height.entry(self.heights[i]).or_default().push(i);
        }
        for (h, ids) in &by_height {
            let list: Vec<String> = ids.iter().map(|i| format!("n{i};")).collect();
            writeln!(
                out,
                "  {{ rank=same; /* height {} */ {} }}",
                h,
                list.join(" ")
            )
            .unwrap();
        }
        for (upper, lower) in self.cover_edges() {
            writeln!(out, "  n{lower} -> n{upper};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn dot_label(ps: &ParameterSet, realized: bool) -> String {
    if realized {
        ps.factor_text()
    } else {
        format!("\u{00d7} {}", ps.factor_text())
    }
}

/// How to build a single lattice.
#[derive(Debug, Clone, Copy)]
pub enum BuildMode<'a> {
    Idealized,
    Fixture(&'a FixtureSet),
    Overlay(&'a FixtureSet),
}

/// Builds `Λ'_N`, `Λ_N`, or the overlay of the two.
pub fn build_lattice(n: u64, mode: BuildMode<'_>) -> Result<Lattice> {
    match mode {
        BuildMode::Idealized => {
            let mut family = LatticeFamily::idealized();
            family.build_uncached(n)
        }
        BuildMode::Fixture(f) => {
            let mut family = LatticeFamily::with_fixtures(f.clone());
            family.build_uncached(n)
        }
        BuildMode::Overlay(f) => {
            let mut family = LatticeFamily::with_fixtures(f.clone());
            let truth = family.lattice(n)?;
            let mut ideal = LatticeFamily::idealized().build_uncached(n)?;
            ideal.mode = Mode::Overlay;
            ideal.realized = ideal.nodes.iter().map(|ps| truth.contains(ps)).collect();
            ideal.unrealized = ideal
                .nodes
                .iter()
                .filter(|ps| !truth.contains(ps))
                .cloned()
                .collect();
            Ok(ideal)
        }
    }
}

/// Lattices for a run count and its divisors, built once and cached. In
/// fixture mode the replacement catalog for a level `S` is the realized part
/// of `Λ_S`, so fixtures are needed for every composite divisor.
#[derive(Debug, Default)]
pub struct LatticeFamily {
    fixtures: Option<FixtureSet>,
    cache: HashMap<u64, Arc<Lattice>>,
}

impl LatticeFamily {
    pub fn idealized() -> Self {
        LatticeFamily::default()
    }

    pub fn with_fixtures(fixtures: FixtureSet) -> Self {
        LatticeFamily {
            fixtures: Some(fixtures),
            cache: HashMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        if self.fixtures.is_some() {
            Mode::Fixture
        } else {
            Mode::Idealized
        }
    }

    pub fn lattice(&mut self, n: u64) -> Result<Arc<Lattice>> {
        if let Some(l) = self.cache.get(&n) {
            return Ok(Arc::clone(l));
        }
        let built = Arc::new(self.build_uncached(n)?);
        self.cache.insert(n, Arc::clone(&built));
        Ok(built)
    }

    fn catalog(&mut self, n: u64) -> Result<HashMap<u64, Vec<ParameterSet>>> {
        let mut catalog = HashMap::new();
        for d in divisors(n).into_iter().filter(|&d| d > 1 && d < n) {
            let entries: Vec<ParameterSet> = if self.fixtures.is_some() {
                let sub = self.lattice(d)?;
                sub.nodes
                    .iter()
                    .filter(|ps| !ps.is_top())
                    .cloned()
                    .collect()
            } else {
                enumerate_parameter_sets(d)?
                    .into_iter()
                    .filter(|ps| !ps.is_top())
                    .collect()
            };
            catalog.insert(d, entries);
        }
        Ok(catalog)
    }

    fn build_uncached(&mut self, n: u64) -> Result<Lattice> {
        let nodes = enumerate_parameter_sets(n)?;
        let catalog = self.catalog(n)?;
        let index: HashMap<ParameterSet, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, ps)| (ps.clone(), i as u32))
            .collect();
        let top = index[&ParameterSet::top(n)?];
        let mut children: Vec<Vec<u32>> = Vec::with_capacity(nodes.len());
        for (i, ps) in nodes.iter().enumerate() {
            if i as u32 == top {
                children.push((0..nodes.len() as u32).filter(|&j| j != top).collect());
                continue;
            }
            let mut cs = Vec::new();
            for f in ps.factors() {
                let entries = catalog
                    .get(&f.level)
                    .ok_or(Error::MissingCatalog(f.level))?;
                for r in entries {
                    let next = ps.replace_one(f.level, r).expect("level present");
                    let j = *index.get(&next).ok_or(Error::UnknownNode(next))?;
                    cs.push(j);
                }
            }
            cs.sort_unstable();
            cs.dedup();
            children.push(cs);
        }
        match self.fixtures.clone() {
            None => Ok(finish(n, Mode::Idealized, nodes, children, Vec::new())),
            Some(fixtures) => {
                let fixture = match fixtures.get(n) {
                    Some(f) => f.clone(),
                    None if n == 1 || is_prime(n) => RealizabilityFixture {
                        runs: n,
                        nonexistent: Vec::new(),
                        realized_generators: Vec::new(),
                        provenance: BTreeMap::new(),
                    },
                    None => return Err(Error::MissingFixture(n)),
                };
                restrict_to_realized(n, &fixture, nodes, &index, children, top)
            }
        }
    }
}

fn restrict_to_realized(
    n: u64,
    fixture: &RealizabilityFixture,
    nodes: Vec<ParameterSet>,
    index: &HashMap<ParameterSet, u32>,
    children: Vec<Vec<u32>>,
    top: u32,
) -> Result<Lattice> {
    fixture.check_shape()?;
    let inconsistent = |detail: String| Error::InconsistentFixture { runs: n, detail };
    let lookup = |ps: &ParameterSet| -> Result<usize> {
        index
            .get(ps)
            .map(|&i| i as usize)
            .ok_or_else(|| inconsistent(format!("{ps} is not a node of the idealized lattice")))
    };
    let count = nodes.len();

    // downward closure of the generators, the root and the atoms
    let mut seeds: Vec<usize> = Vec::new();
    for ps in &fixture.realized_generators {
        seeds.push(lookup(ps)?);
    }
    for (i, ps) in nodes.iter().enumerate() {
        if ps.is_root()
            || (ps.factors().len() == 1
                && ps.factors()[0].count == 1
                && is_prime(ps.factors()[0].level))
        {
            seeds.push(i);
        }
    }
    let mut down = vec![false; count];
    let mut stack = Vec::new();
    for s in seeds {
        if !down[s] {
            down[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &c in &children[v] {
            if !down[c as usize] {
                down[c as usize] = true;
                stack.push(c as usize);
            }
        }
    }

    // upward closure of the nonexistent sets
    let mut parents: Vec<Vec<u32>> = vec![Vec::new(); count];
    for (v, cs) in children.iter().enumerate() {
        for &c in cs {
            parents[c as usize].push(v as u32);
        }
    }
    let mut up = vec![false; count];
    for ps in &fixture.nonexistent {
        let s = lookup(ps)?;
        if !up[s] {
            up[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &p in &parents[v] {
            if !up[p as usize] {
                up[p as usize] = true;
                stack.push(p as usize);
            }
        }
    }

    for v in 0..count {
        if v == top as usize {
            continue;
        }
        match (down[v], up[v]) {
            (true, true) => {
                return Err(inconsistent(format!(
                    "{} is dominated by a realized generator but dominates a nonexistent set",
                    nodes[v]
                )))
            }
            (false, false) => return Err(inconsistent(format!("{} is not classified", nodes[v]))),
            _ => {}
        }
    }
    down[top as usize] = true;

    let mut remap = vec![u32::MAX; count];
    let mut kept_nodes = Vec::new();
    let mut unrealized = Vec::new();
    for (v, ps) in nodes.into_iter().enumerate() {
        if down[v] {
            remap[v] = kept_nodes.len() as u32;
            kept_nodes.push(ps);
        } else {
            unrealized.push(ps);
        }
    }
    let new_top = remap[top as usize];
    let kept_children: Vec<Vec<u32>> = children
        .into_iter()
        .enumerate()
        .filter(|(v, _)| down[*v])
        .map(|(v, cs)| {
            if v == top as usize {
                (0..kept_nodes.len() as u32)
                    .filter(|&j| j != new_top)
                    .collect()
            } else {
                cs.into_iter().map(|c| remap[c as usize]).collect()
            }
        })
        .collect();
    Ok(finish(
        n,
        Mode::Fixture,
        kept_nodes,
        kept_children,
        unrealized,
    ))
}

fn finish(
    runs: u64,
    mode: Mode,
    nodes: Vec<ParameterSet>,
    children: Vec<Vec<u32>>,
    unrealized: Vec<ParameterSet>,
) -> Lattice {
    let index: HashMap<ParameterSet, u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, ps)| (ps.clone(), i as u32))
        .collect();
    let root = index[&ParameterSet::root(runs).expect("runs > 0")];
    let top = index[&ParameterSet::top(runs).expect("runs > 0")];
    let (heights, topo) = longest_paths(&children);
    let mut has_parent = vec![false; nodes.len()];
    for (v, cs) in children.iter().enumerate() {
        if v as u32 == top {
            continue;
        }
        for &c in cs {
            has_parent[c as usize] = true;
        }
    }
    let dual_atoms = (0..nodes.len() as u32)
        .filter(|&v| v != top && !has_parent[v as usize])
        .collect();
    let realized = vec![true; nodes.len()];
    Lattice {
        runs,
        mode,
        nodes,
        index,
        children,
        heights,
        topo,
        realized,
        unrealized,
        root,
        top,
        dual_atoms,
        covers: OnceLock::new(),
    }
}

/// Longest path to a sink for every node of a DAG, plus a post-order
/// (children before parents).
fn longest_paths(children: &[Vec<u32>]) -> (Vec<u64>, Vec<u32>) {
    let n = children.len();
    let mut height = vec![0u64; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if done[start] {
            continue;
        }
        stack.push((start, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, next) = *frame;
            if next < children[v].len() {
                frame.1 += 1;
                let c = children[v][next] as usize;
                if !done[c] {
                    stack.push((c, 0));
                }
            } else {
                height[v] = children[v]
                    .iter()
                    .map(|&c| height[c as usize] + 1)
                    .max()
                    .unwrap_or(0);
                if !done[v] {
                    done[v] = true;
                    order.push(v as u32);
                }
                stack.pop();
            }
        }
    }
    (height, order)
}

/// Additivity of heights: every node's height equals the sum over its
/// factors of `count * ht(level)`, with `ht(level)` taken from the lattice of
/// that level in the same family.
pub fn height_additivity_check(family: &mut LatticeFamily, n: u64) -> Result<bool> {
    let lat = family.lattice(n)?;
    let mut level_heights: HashMap<u64, u64> = HashMap::new();
    for d in divisors(n).into_iter().filter(|&d| d > 1) {
        let h = if d == n {
            lat.height()
        } else {
            family.lattice(d)?.height()
        };
        level_heights.insert(d, h);
    }
    Ok(lat.nodes().iter().enumerate().all(|(i, ps)| {
        let additive: u64 = ps
            .factors()
            .iter()
            .map(|f| f.count * level_heights[&f.level])
            .sum();
        additive == lat.height_at(i)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(t: &str) -> ParameterSet {
        t.parse().unwrap()
    }

    fn ideal(n: u64) -> Lattice {
        build_lattice(n, BuildMode::Idealized).unwrap()
    }

    #[test]
    fn expansions_follow_replacement_examples() {
        let mut catalog = HashMap::new();
        catalog.insert(4, vec![ps("4: 2^3")]);
        catalog.insert(2, vec![ps("2: 1^1")]);
        let out = one_step_expansions(&ps("16: 2^3 4^4"), &catalog).unwrap();
        assert!(out.contains(&ps("16: 2^6 4^3")));

        let mut catalog = HashMap::new();
        catalog.insert(4, vec![ps("4: 1^1")]);
        catalog.insert(2, vec![ps("2: 1^1"), ps("2: 2^1")]);
        let out = one_step_expansions(&ps("24: 2^20 4^1"), &catalog).unwrap();
        assert!(out.contains(&ps("24: 2^20")));
        assert!(out.contains(&ps("24: 2^19 4^1")));
        assert!(!out.contains(&ps("24: 2^20 4^1")));

        let missing: HashMap<u64, Vec<ParameterSet>> = HashMap::new();
        assert!(matches!(
            one_step_expansions(&ps("24: 2^20 4^1"), &missing),
            Err(Error::MissingCatalog(_))
        ));
    }

    #[test]
    fn small_lattices() {
        let l2 = ideal(2);
        assert_eq!((l2.len(), l2.height()), (2, 1));
        let l5 = ideal(5);
        assert_eq!(l5.len(), 2);
        assert_eq!(l5.dual_atoms(), vec![ps("5: 1^1")]);
        assert_eq!(l5.cover_edges().len(), 1);
        let l1 = ideal(1);
        assert_eq!((l1.len(), l1.height(), l1.dual_atoms().len()), (1, 0, 0));
    }

    #[test]
    fn lambda6_shape() {
        let l = ideal(6);
        assert_eq!(l.len(), 5);
        assert_eq!(l.cover_edges().len(), 5);
        assert_eq!(l.height_of(&ps("6: 6^1")).unwrap(), 3);
        assert_eq!(l.atoms(), vec![ps("6: 2^1"), ps("6: 3^1")]);
    }

    #[test]
    fn lambda12_idealized() {
        let l = ideal(12);
        assert_eq!(l.len(), 32);
        assert_eq!(l.dual_atoms().len(), 4);
        assert_eq!(l.height(), 12);
        assert_eq!(l.height_of(&ps("12: 2^2 3^1")).unwrap(), 3);
        assert!(!l.dominates(&ps("12: 2^1"), &ps("12: 3^1")).unwrap());
        assert!(!l.dominates(&ps("12: 3^1"), &ps("12: 2^1")).unwrap());
        assert!(l.dominates(&ps("12: 2^2 6^1"), &ps("12: 2^3 3^1")).unwrap());
        assert!(l.dominates(&ps("12: 2^2 6^1"), &ps("12: 2^2 6^1")).unwrap());
        assert!(matches!(
            l.dominates(&ps("12: 4^1 3^1"), &ps("12: 4^2")),
            Err(Error::UnknownNode(_))
        ));
        assert!(matches!(l.threshold_b(), Err(Error::RealizabilityUnknown)));
    }

    #[test]
    fn dominance_example_in_sixteen() {
        let l = ideal(16);
        assert!(l.dominates(&ps("16: 2^3 4^4"), &ps("16: 2^6 4^3")).unwrap());
        assert!(!l.dominates(&ps("16: 2^6 4^3"), &ps("16: 2^3 4^4")).unwrap());
    }

    #[test]
    fn covers_are_transitive_reduction() {
        let l = ideal(16);
        let covers = l.covers();
        for (v, cs) in covers.iter().enumerate() {
            for &c in cs {
                // no third node strictly between v and c
                for w in 0..l.len() {
                    if w != v && w != c as usize {
                        assert!(!(l.dominates_id(v, w) && l.dominates_id(w, c as usize)));
                    }
                }
            }
            for &c in l.children(v) {
                assert!(l.dominates_id(v, c as usize));
            }
        }
    }

    #[test]
    fn jordan_dedekind_fails_in_twelve() {
        let (short, long) = ideal(12).chain_length_range();
        assert!(short < long, "{short} vs {long}");
        assert_eq!(long, 12);
    }

    #[test]
    fn fixture_lattice_twelve() {
        let fixtures = FixtureSet::bundled();
        let l = build_lattice(12, BuildMode::Fixture(&fixtures)).unwrap();
        assert_eq!(l.len(), 23);
        assert_eq!(l.dual_atoms().len(), 4);
        assert_eq!(l.height(), 12);
        assert_eq!(l.threshold_b().unwrap(), 6);
        assert_eq!(l.unrealized().len(), 9);
    }

    #[test]
    fn overlay_marks_unrealized() {
        let fixtures = FixtureSet::bundled();
        let l = build_lattice(12, BuildMode::Overlay(&fixtures)).unwrap();
        assert_eq!(l.len(), 32);
        assert_eq!((0..l.len()).filter(|&i| !l.is_realized(i)).count(), 9);
        assert_eq!(l.threshold_b().unwrap(), 6);
        let dot = l.to_dot();
        assert_eq!(dot.matches('\u{00d7}').count(), 9);
    }

    #[test]
    fn fixture_errors() {
        let empty = FixtureSet::new();
        assert!(matches!(
            build_lattice(12, BuildMode::Fixture(&empty)),
            Err(Error::MissingFixture(_))
        ));
        let mut bad = FixtureSet::bundled();
        bad.insert(RealizabilityFixture {
            runs: 12,
            nonexistent: vec![ps("12: 2^3 3^1")],
            realized_generators: vec![ps("12: 2^4 3^1"), ps("12: 2^11")],
            provenance: BTreeMap::new(),
        });
        assert!(matches!(
            build_lattice(12, BuildMode::Fixture(&bad)),
            Err(Error::InconsistentFixture { .. })
        ));
        let mut unclassified = FixtureSet::bundled();
        unclassified.insert(RealizabilityFixture {
            runs: 12,
            nonexistent: vec![],
            realized_generators: vec![ps("12: 2^11")],
            provenance: BTreeMap::new(),
        });
        assert!(matches!(
            build_lattice(12, BuildMode::Fixture(&unclassified)),
            Err(Error::InconsistentFixture { .. })
        ));
    }

    #[test]
    fn dot_export_is_stable() {
        let l = ideal(8);
        let a = l.to_dot();
        assert_eq!(a, ideal(8).to_dot());
        assert_eq!(a.matches(" [label=").count(), 14);
        assert!(a.contains("peripheries=2"));
        let l = ideal(3);
        assert_eq!(l.to_dot().matches(" -> ").count(), 1);
    }

    #[test]
    fn additivity_on_small_family() {
        let mut fam = LatticeFamily::idealized();
        for n in [12, 16, 24, 30, 36] {
            assert!(height_additivity_check(&mut fam, n).unwrap(), "n = {n}");
        }
        let mut fam = LatticeFamily::with_fixtures(FixtureSet::bundled());
        assert!(height_additivity_check(&mut fam, 12).unwrap());
    }
}
