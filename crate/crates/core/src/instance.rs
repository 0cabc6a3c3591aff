//! Instances and the four solution shapes exchanged between algorithms.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Complete graph on `n` vertices (`n` a positive multiple of 3) with
/// symmetric, non-negative rational edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    weights: Vec<Rational>,
}

impl Instance {
    /// Builds a validated instance from a full weight matrix.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n < 3 || n % 3 != 0 {
            return Err(Error::InvalidInstance(format!(
                "vertex count must be a positive multiple of 3, got {n}"
            )));
        }
        for (u, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        for u in 0..n {
            if !rows[u][u].is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "diagonal entry ({u},{u}) must be 0"
                )));
            }
            for v in (u + 1)..n {
                if rows[u][v] != rows[v][u] {
                    return Err(Error::InvalidInstance(format!(
                        "weights are not symmetric at ({u},{v}): {} vs {}",
                        rows[u][v], rows[v][u]
                    )));
                }
                if rows[u][v].is_negative() {
                    return Err(Error::InvalidInstance(format!(
                        "negative weight {} on edge ({u},{v})",
                        rows[u][v]
                    )));
                }
            }
        }
        Ok(Self {
            n,
            weights: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds an instance from a weight function over unordered pairs `u < v`.
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for u in 0..n {
            for v in (u + 1)..n {
                let w = weight(u, v);
                rows[u][v] = w.clone();
                rows[v][u] = w;
            }
        }
        Self::new(rows)
    }

    /// Builds an instance where the listed edges carry the given weight and
    /// every other edge weighs 0.
    pub fn from_edges(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (u, v, w) in edges {
            if *u >= n || *v >= n || u == v {
                return Err(Error::InvalidInstance(format!("bad edge ({u},{v})")));
            }
            rows[*u][*v] = w.clone();
            rows[*v][*u] = w.clone();
        }
        Self::new(rows)
    }

    /// The counterexample graph: K6 on a..f = 0..5 with w(ab) = w(cd) = w(ef) = 1
    /// and every other edge 0.
    pub fn counterexample() -> Self {
        let one = rational::one();
        Self::from_edges(6, &[(0, 1, one.clone()), (2, 3, one.clone()), (4, 5, one)])
            .expect("counterexample instance is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> &Rational {
        &self.weights[u * self.n + v]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.weights.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> Rational {
        let mut total = Rational::zero();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                total += self.weight(u, v);
            }
        }
        total
    }

    /// Induced sub-instance on `vertices`, relabelled `0..vertices.len()` in
    /// the given order. The vertex count may be 0 here (used by the odd-n
    /// enumeration), so this bypasses the public size check.
    pub(crate) fn induced(&self, vertices: &[usize]) -> Self {
        let k = vertices.len();
        debug_assert!(k % 3 == 0);
        let mut weights = Vec::with_capacity(k * k);
        for &u in vertices {
            for &v in vertices {
                weights.push(self.weight(u, v).clone());
            }
        }
        Self { n: k, weights }
    }

    /// Weight of the 3-path `x - y - z` (center `y`).
    pub fn path_weight(&self, path: &[usize; 3]) -> Rational {
        self.weight(path[0], path[1]) + self.weight(path[1], path[2])
    }

    /// Larger of the two edge weights of a 3-path.
    pub fn path_max_edge(&self, path: &[usize; 3]) -> Rational {
        rational::max(self.weight(path[0], path[1]), self.weight(path[1], path[2]))
    }
}

fn normalize_edge(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A set of vertex-disjoint edges, stored as sorted `(u, v)` pairs with `u < v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidSolution(format!("loop edge ({u},{v}) in matching")));
            }
            for x in [u, v] {
                if !seen.insert(x) {
                    return Err(Error::InvalidSolution(format!("vertex {x} reused in matching")));
                }
            }
            out.push(normalize_edge(u, v));
        }
        out.sort_unstable();
        Ok(Self { edges: out })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&normalize_edge(u, v)).is_ok()
    }

    /// Partner of every vertex below `n`, `None` when unmatched.
    pub fn mates(&self, n: usize) -> Vec<Option<usize>> {
        let mut mate = vec![None; n];
        for &(u, v) in &self.edges {
            if u < n && v < n {
                mate[u] = Some(v);
                mate[v] = Some(u);
            }
        }
        mate
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }
}

/// Vertex-disjoint 3-paths `(x, y, z)` with center `y`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreePathPacking {
    pub paths: Vec<[usize; 3]>,
}

impl ThreePathPacking {
    pub fn new(paths: Vec<[usize; 3]>) -> Self {
        Self { paths }
    }
}

/// A star with one or two leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

impl Star {
    pub fn edge(center: usize, leaf: usize) -> Self {
        Self {
            center,
            leaves: vec![leaf],
        }
    }

    pub fn path(center: usize, a: usize, b: usize) -> Self {
        Self {
            center,
            leaves: vec![a, b],
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.center).chain(self.leaves.iter().copied())
    }
}

/// Vertex-disjoint 1- and 2-stars.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarPacking {
    pub stars: Vec<Star>,
}

impl StarPacking {
    pub fn new(stars: Vec<Star>) -> Self {
        Self { stars }
    }

    /// Number of single-edge stars.
    pub fn single_edges(&self) -> usize {
        self.stars.iter().filter(|s| s.leaves.len() == 1).count()
    }

    /// Checks that the stars cover exactly the vertices in `host`.
    pub fn covers(&self, host: &[usize]) -> bool {
        let covered: BTreeSet<usize> = self.stars.iter().flat_map(|s| s.vertices()).collect();
        let host: BTreeSet<usize> = host.iter().copied().collect();
        let count: usize = self.stars.iter().map(|s| 1 + s.leaves.len()).sum();
        covered == host && count == host.len()
    }
}

/// Directed arcs `(u, v)`; 2-feasible when every vertex has in-degree at
/// most 1 and out-degree at most 2.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSet {
    pub arcs: Vec<(usize, usize)>,
}

impl ArcSet {
    pub fn new(arcs: Vec<(usize, usize)>) -> Self {
        Self { arcs }
    }

    /// True when in-degree <= 1 and out-degree <= `t` everywhere.
    pub fn is_feasible(&self, t: usize) -> bool {
        let mut indeg = std::collections::BTreeMap::<usize, usize>::new();
        let mut outdeg = std::collections::BTreeMap::<usize, usize>::new();
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.arcs {
            if u == v || !seen.insert((u, v)) {
                return false;
            }
            *outdeg.entry(u).or_default() += 1;
            *indeg.entry(v).or_default() += 1;
        }
        indeg.values().all(|&d| d <= 1) && outdeg.values().all(|&d| d <= t)
    }
}

/// Anything whose weight can be evaluated on an instance.
pub trait Solution {
    fn weight_in(&self, instance: &Instance) -> Result<Rational>;
}

fn check_range(instance: &Instance, v: usize) -> Result<()> {
    if v >= instance.n() {
        return Err(Error::InvalidSolution(format!(
            "vertex {v} out of range for n = {}",
            instance.n()
        )));
    }
    Ok(())
}

impl Solution for Matching {
    fn weight_in(&self, instance: &Instance) -> Result<Rational> {
        let mut total = Rational::zero();
        for &(u, v) in &self.edges {
            check_range(instance, u)?;
            check_range(instance, v)?;
            total += instance.weight(u, v);
        }
        Ok(total)
    }
}

impl Solution for ThreePathPacking {
    fn weight_in(&self, instance: &Instance) -> Result<Rational> {
        let mut seen = BTreeSet::new();
        let mut total = Rational::zero();
        for path in &self.paths {
            for &v in path {
                check_range(instance, v)?;
                if !seen.insert(v) {
                    return Err(Error::InvalidSolution(format!("vertex {v} reused")));
                }
            }
            total += instance.path_weight(path);
        }
        Ok(total)
    }
}

impl Solution for StarPacking {
    fn weight_in(&self, instance: &Instance) -> Result<Rational> {
        let mut seen = BTreeSet::new();
        let mut total = Rational::zero();
        for star in &self.stars {
            if star.leaves.is_empty() || star.leaves.len() > 2 {
                return Err(Error::InvalidSolution(format!(
                    "star at {} has {} leaves",
                    star.center,
                    star.leaves.len()
                )));
            }
            for v in star.vertices() {
                check_range(instance, v)?;
                if !seen.insert(v) {
                    return Err(Error::InvalidSolution(format!("vertex {v} reused")));
                }
            }
            for &leaf in &star.leaves {
                total += instance.weight(star.center, leaf);
            }
        }
        Ok(total)
    }
}

impl Solution for ArcSet {
    fn weight_in(&self, instance: &Instance) -> Result<Rational> {
        if !self.is_feasible(2) {
            return Err(Error::InvalidSolution("arc set is not 2-feasible".into()));
        }
        let mut total = Rational::zero();
        for &(u, v) in &self.arcs {
            check_range(instance, u)?;
            check_range(instance, v)?;
            total += instance.weight(u, v);
        }
        Ok(total)
    }
}

/// Exact total weight of a solution; errors on reused or out-of-range vertices.
pub fn weight_of<S: Solution + ?Sized>(instance: &Instance, solution: &S) -> Result<Rational> {
    solution.weight_in(instance)
}

/// One broken invariant of a 3-path packing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    OutOfRange { vertex: usize },
    RepeatedInPath { path: usize },
    VertexReused { vertex: usize },
    Uncovered { vertex: usize },
    NotPerfect { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { vertex } => write!(f, "vertex out of range: {vertex}"),
            Violation::RepeatedInPath { path } => {
                write!(f, "path {path} repeats a vertex")
            }
            Violation::VertexReused { vertex } => write!(f, "vertex reused: {vertex}"),
            Violation::Uncovered { vertex } => write!(f, "vertex uncovered: {vertex}"),
            Violation::NotPerfect { expected, found } => {
                write!(f, "not perfect: {found} paths, expected {expected}")
            }
        }
    }
}

/// Every violated packing invariant; empty means a valid perfect packing.
pub fn validate_packing(instance: &Instance, packing: &ThreePathPacking) -> Vec<Violation> {
    let n = instance.n();
    let mut violations = Vec::new();
    let mut used = vec![false; n];
    for (i, path) in packing.paths.iter().enumerate() {
        if path[0] == path[1] || path[1] == path[2] || path[0] == path[2] {
            violations.push(Violation::RepeatedInPath { path: i });
        }
        let distinct: BTreeSet<usize> = path.iter().copied().collect();
        for v in distinct {
            if v >= n {
                violations.push(Violation::OutOfRange { vertex: v });
            } else if used[v] {
                violations.push(Violation::VertexReused { vertex: v });
            } else {
                used[v] = true;
            }
        }
    }
    if packing.paths.len() != n / 3 {
        violations.push(Violation::NotPerfect {
            expected: n / 3,
            found: packing.paths.len(),
        });
    }
    for (v, covered) in used.iter().enumerate() {
        if !covered {
            violations.push(Violation::Uncovered { vertex: v });
        }
    }
    violations
}
