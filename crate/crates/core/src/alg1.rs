//! First algorithm: perfect matching, contraction of its edges into
//! super-nodes, a size-n/6 maximum-cost matching between super-nodes, and
//! expansion back into 3-paths. Instances with an odd vertex count go
//! through a wrapper that fixes one 3-path by enumeration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{weight_of, Instance, Matching, ThreePathPacking};
use crate::matching::{max_weight_matching_exact_size, WeightedGraph};
use crate::rational::{self, Rational};

/// A node of a contracted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    /// A contracted matching edge `(u, v)`, `u < v`.
    Super(usize, usize),
    /// An original vertex left outside the contracted matching.
    Single(usize),
}

impl Node {
    fn vertices(&self) -> Vec<usize> {
        match *self {
            Node::Super(u, v) => vec![u, v],
            Node::Single(v) => vec![v],
        }
    }
}

/// Graph over super-nodes (and possibly singles) with the contracted cost
/// function and, per node pair, the original edge realizing that cost.
#[derive(Debug, Clone)]
pub struct ContractedGraph {
    pub nodes: Vec<Node>,
    pub costs: WeightedGraph,
    back_map: Vec<Option<(usize, usize)>>,
}

impl ContractedGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Original edge `(a, b)` behind the contracted pair `(i, j)`, with `a`
    /// inside node `i` and `b` inside node `j`.
    pub fn back(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let m = self.nodes.len();
        self.back_map[i * m + j]
    }

    /// Index of the node holding vertex `v`, if any.
    pub fn node_of(&self, v: usize) -> Option<usize> {
        self.nodes.iter().position(|node| node.vertices().contains(&v))
    }

    pub(crate) fn build(instance: &Instance, nodes: Vec<Node>) -> Self {
        let m = nodes.len();
        let mut costs = WeightedGraph::new(m);
        let mut back_map = vec![None; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let picked = match (nodes[i], nodes[j]) {
                    (Node::Super(a, b), Node::Super(c, d)) => {
                        let discount = rational::min(instance.weight(a, b), instance.weight(c, d));
                        let mut best: Option<((usize, usize), Rational)> = None;
                        for x in [a, b] {
                            for y in [c, d] {
                                let cost = instance.weight(x, y) - &discount;
                                if best.as_ref().map_or(true, |(_, b)| cost > *b) {
                                    best = Some(((x, y), cost));
                                }
                            }
                        }
                        best
                    }
                    (Node::Super(a, b), Node::Single(s)) => {
                        let (x, w) = if instance.weight(a, s) >= instance.weight(b, s) {
                            (a, instance.weight(a, s))
                        } else {
                            (b, instance.weight(b, s))
                        };
                        Some(((x, s), w.clone()))
                    }
                    (Node::Single(s), Node::Super(a, b)) => {
                        let (x, w) = if instance.weight(a, s) >= instance.weight(b, s) {
                            (a, instance.weight(a, s))
                        } else {
                            (b, instance.weight(b, s))
                        };
                        Some(((s, x), w.clone()))
                    }
                    (Node::Single(_), Node::Single(_)) => None,
                };
                if let Some(((x, y), cost)) = picked {
                    costs.set(i, j, cost);
                    back_map[i * m + j] = Some((x, y));
                    back_map[j * m + i] = Some((y, x));
                }
            }
        }
        Self {
            nodes,
            costs,
            back_map,
        }
    }
}

/// Contracts every edge of the perfect matching `m` into a super-node.
/// Super-nodes follow the sorted edge order of `m`.
pub fn contract_full(instance: &Instance, m: &Matching) -> Result<ContractedGraph> {
    let n = instance.n();
    if n % 2 != 0 {
        return Err(Error::InvalidInstance(format!("full contraction needs even n, got {n}")));
    }
    if m.len() * 2 != n || m.vertices().len() != n || m.vertices().iter().any(|&v| v >= n) {
        return Err(Error::InvalidSolution("matching is not perfect".into()));
    }
    let nodes = m.edges().iter().map(|&(u, v)| Node::Super(u, v)).collect();
    Ok(ContractedGraph::build(instance, nodes))
}

/// 3-path through super-node `(a, b)` extended by `r` at its better end.
pub(crate) fn attach_residual(instance: &Instance, a: usize, b: usize, r: usize) -> [usize; 3] {
    if instance.weight(r, a) >= instance.weight(r, b) {
        [r, a, b]
    } else {
        [a, b, r]
    }
}

/// Expansion of a super-super contracted edge `(i, j)`: the heavier matched
/// edge (ties to the lower node index) is kept together with the original
/// cross edge; the far vertex of the other super-node is returned as residual.
pub(crate) fn expand_super_pair(
    instance: &Instance,
    g: &ContractedGraph,
    i: usize,
    j: usize,
) -> Result<([usize; 3], usize)> {
    let (i, j) = (i.min(j), i.max(j));
    let (Node::Super(a, b), Node::Super(c, d)) = (g.nodes[i], g.nodes[j]) else {
        return Err(Error::Internal("expected two super-nodes".into()));
    };
    let (x, y) = g
        .back(i, j)
        .ok_or_else(|| Error::Internal(format!("no back edge for ({i},{j})")))?;
    let other = |pair: (usize, usize), v: usize| if pair.0 == v { pair.1 } else { pair.0 };
    if instance.weight(a, b) >= instance.weight(c, d) {
        Ok(([other((a, b), x), x, y], other((c, d), y)))
    } else {
        Ok(([x, y, other((c, d), y)], other((a, b), x)))
    }
}

/// Expands a size-n/6 matching over the super-nodes of `g` into a perfect
/// packing. Residual vertices go, in ascending order, to the unmatched
/// super-nodes taken in node order.
pub fn expand_alg1(
    instance: &Instance,
    g: &ContractedGraph,
    m_contracted: &Matching,
) -> Result<ThreePathPacking> {
    let n = instance.n();
    if m_contracted.len() * 6 != n {
        return Err(Error::InvalidSolution(format!(
            "contracted matching has {} edges, expected {}",
            m_contracted.len(),
            n / 6
        )));
    }
    let mut paths = Vec::with_capacity(n / 3);
    let mut residuals = Vec::new();
    let mut matched = vec![false; g.node_count()];
    for &(i, j) in m_contracted.edges() {
        let (path, residual) = expand_super_pair(instance, g, i, j)?;
        paths.push(path);
        residuals.push(residual);
        matched[i] = true;
        matched[j] = true;
    }
    residuals.sort_unstable();
    let mut residuals = residuals.into_iter();
    for (k, node) in g.nodes.iter().enumerate() {
        if matched[k] {
            continue;
        }
        let Node::Super(a, b) = *node else {
            return Err(Error::Internal("alg1 contraction holds only super-nodes".into()));
        };
        let r = residuals
            .next()
            .ok_or_else(|| Error::Internal("ran out of residual vertices".into()))?;
        paths.push(attach_residual(instance, a, b, r));
    }
    if residuals.next().is_some() {
        return Err(Error::Internal("residual vertices left over".into()));
    }
    Ok(ThreePathPacking::new(paths))
}

/// Intermediate objects of one even-n run.
#[derive(Debug, Clone)]
pub struct Alg1Trace {
    /// Maximum-weight perfect matching.
    pub m_star: Matching,
    pub m_star_weight: Rational,
    pub contracted: ContractedGraph,
    /// Size-n/6 maximum-cost matching over the super-nodes.
    pub m_contracted: Matching,
    pub m_contracted_cost: Rational,
    pub packing: ThreePathPacking,
}

/// The four steps on an instance with even `n` (`n = 0` allowed).
pub fn run_alg1_even(instance: &Instance) -> Result<Alg1Trace> {
    let n = instance.n();
    if n % 6 != 0 {
        return Err(Error::InvalidInstance(format!("even pipeline needs n divisible by 6, got {n}")));
    }
    let full = max_weight_matching_exact_size(&WeightedGraph::from_instance(instance), n / 2)?;
    let contracted = contract_full(instance, &full.matching)?;
    let small = max_weight_matching_exact_size(&contracted.costs, n / 6)?;
    let packing = expand_alg1(instance, &contracted, &small.matching)?;
    Ok(Alg1Trace {
        m_star: full.matching,
        m_star_weight: full.total_cost,
        contracted,
        m_contracted: small.matching,
        m_contracted_cost: small.total_cost,
        packing,
    })
}

/// Center-distinguished triples `(x, y, z)` with `x < z`, ordered by center
/// `y` first and then by `(x, z)`.
pub fn candidate_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for y in 0..n {
        for x in 0..n {
            for z in (x + 1)..n {
                if x != y && z != y {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Fixes `triple`, runs the even pipeline on the rest, and returns the
/// combined packing with its weight.
pub fn run_alg1_with_fixed(instance: &Instance, triple: [usize; 3]) -> Result<(ThreePathPacking, Rational)> {
    let rest: Vec<usize> = (0..instance.n()).filter(|v| !triple.contains(v)).collect();
    let sub = instance.induced(&rest);
    let trace = run_alg1_even(&sub)?;
    let mut paths = vec![triple];
    paths.extend(trace.packing.paths.iter().map(|p| p.map(|v| rest[v])));
    let packing = ThreePathPacking::new(paths);
    let w = weight_of(instance, &packing)?;
    Ok((packing, w))
}

/// Runs the first algorithm; odd `n` enumerates the fixed 3-path and keeps
/// the best result, the earliest candidate winning ties.
pub fn run_alg1(instance: &Instance) -> Result<ThreePathPacking> {
    if instance.n() % 2 == 0 {
        return Ok(run_alg1_even(instance)?.packing);
    }
    let results: Vec<(ThreePathPacking, Rational)> = candidate_triples(instance.n())
        .into_par_iter()
        .map(|t| run_alg1_with_fixed(instance, t))
        .collect::<Result<_>>()?;
    let mut best: Option<(ThreePathPacking, Rational)> = None;
    for (p, w) in results {
        if best.as_ref().map_or(true, |(_, b)| w > *b) {
            best = Some((p, w));
        }
    }
    Ok(best.map(|(p, _)| p).unwrap_or_default())
}

/// Weight of the refuted earlier bound `(2/3) w(M) + (1/4) OPT`.
pub fn refuted_bound(m_half_weight: &Rational, opt: &Rational) -> Rational {
    rational::ratio(2, 3) * m_half_weight + rational::ratio(1, 4) * opt
}
