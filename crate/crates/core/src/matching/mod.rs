//! Maximum-weight matchings on general graphs with exact rational costs.
//!
//! A single blossom sweep yields a best matching of every cardinality, which
//! serves the exact-size queries (costs may be negative) and the free-size
//! query alike. A subset dynamic program covers small graphs independently
//! and is used as a fallback if a sweep snapshot ever fails its certificate.

mod blossom;
pub mod bmatching;
pub mod subset_dp;

use num_traits::Zero;

pub use bmatching::{max_weight_bipartite_b_matching, BMatching};

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching};
use crate::rational::Rational;

/// Largest node count the subset dynamic program accepts.
pub const SUBSET_DP_LIMIT: usize = 20;

/// Graph on nodes `0..m` where each unordered pair carries an optional cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    m: usize,
    cost: Vec<Option<Rational>>,
}

impl WeightedGraph {
    /// Graph with no edges.
    pub fn new(m: usize) -> Self {
        Self {
            m,
            cost: vec![None; m * m],
        }
    }

    /// Complete graph with costs given by `f(u, v)` for `u < v`.
    pub fn complete(m: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut g = Self::new(m);
        for u in 0..m {
            for v in (u + 1)..m {
                g.set(u, v, f(u, v));
            }
        }
        g
    }

    pub fn from_instance(instance: &Instance) -> Self {
        Self::complete(instance.n(), |u, v| instance.weight(u, v).clone())
    }

    pub fn node_count(&self) -> usize {
        self.m
    }

    pub fn set(&mut self, u: usize, v: usize, c: Rational) {
        assert!(u != v && u < self.m && v < self.m, "bad edge ({u},{v})");
        self.cost[u * self.m + v] = Some(c.clone());
        self.cost[v * self.m + u] = Some(c);
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.cost[u * self.m + v] = None;
        self.cost[v * self.m + u] = None;
    }

    pub fn cost(&self, u: usize, v: usize) -> Option<&Rational> {
        if u >= self.m || v >= self.m {
            return None;
        }
        self.cost[u * self.m + v].as_ref()
    }

    /// Defined edges `(u, v, cost)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for u in 0..self.m {
            for v in (u + 1)..self.m {
                if let Some(c) = self.cost(u, v) {
                    out.push((u, v, c.clone()));
                }
            }
        }
        out
    }

    /// Sum of member costs; errors if the matching uses an undefined pair.
    pub fn matching_cost(&self, matching: &Matching) -> Result<Rational> {
        let mut total = Rational::zero();
        for &(u, v) in matching.edges() {
            let c = self.cost(u, v).ok_or_else(|| {
                Error::InvalidSolution(format!("matching uses undefined edge ({u},{v})"))
            })?;
            total += c;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizedMatchingResult {
    pub matching: Matching,
    pub total_cost: Rational,
}

fn result_from(g: &WeightedGraph, edges: Vec<(usize, usize)>) -> Result<SizedMatchingResult> {
    let matching = Matching::new(edges)?;
    let total_cost = g.matching_cost(&matching)?;
    Ok(SizedMatchingResult {
        matching,
        total_cost,
    })
}

/// Blossom sweep only: a maximum-cost matching of every cardinality
/// `0..=ν`, where `ν` is the maximum matching size of `g`. Errors if any
/// snapshot fails its dual certificate.
pub fn blossom_matchings_by_size(g: &WeightedGraph) -> Result<Vec<SizedMatchingResult>> {
    let sweep = blossom::sweep(g.m, &g.edges(), true);
    if !sweep.certified {
        return Err(Error::Internal(format!(
            "blossom certificate failed: {}",
            sweep.failure.unwrap_or_default()
        )));
    }
    sweep
        .snapshots
        .into_iter()
        .map(|edges| result_from(g, edges))
        .collect()
}

/// As [`blossom_matchings_by_size`], falling back to the subset dynamic
/// program on small graphs should a certificate check fail.
pub fn max_weight_matchings_by_size(g: &WeightedGraph) -> Result<Vec<SizedMatchingResult>> {
    match blossom_matchings_by_size(g) {
        Ok(all) => Ok(all),
        Err(e) if g.m <= SUBSET_DP_LIMIT => {
            log::warn!("{e}; using subset dynamic program");
            subset_dp::max_weight_by_size(g)
        }
        Err(e) => Err(e),
    }
}

/// Maximum-cost matching with exactly `p` edges; costs may be negative.
pub fn max_weight_matching_exact_size(g: &WeightedGraph, p: usize) -> Result<SizedMatchingResult> {
    let mut all = max_weight_matchings_by_size(g)?;
    let max = all.len() - 1;
    if p > max {
        return Err(Error::InfeasibleSize { size: p, max });
    }
    Ok(all.swap_remove(p))
}

/// Maximum-cost matching of any size. Among equally good sizes the smallest
/// wins, so no negative-cost edge is ever included.
pub fn max_weight_matching_free(g: &WeightedGraph) -> Result<SizedMatchingResult> {
    let all = max_weight_matchings_by_size(g)?;
    let mut best = 0;
    for (k, r) in all.iter().enumerate() {
        if r.total_cost > all[best].total_cost {
            best = k;
        }
    }
    Ok(all.into_iter().nth(best).expect("size 0 always present"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn counterexample_graph() -> WeightedGraph {
        WeightedGraph::from_instance(&Instance::counterexample())
    }

    #[test]
    fn counterexample_perfect_matching() {
        let r = max_weight_matching_exact_size(&counterexample_graph(), 3).unwrap();
        assert_eq!(r.total_cost, int(3));
        assert_eq!(r.matching.edges(), &[(0, 1), (2, 3), (4, 5)]);
    }

    #[test]
    fn counterexample_size_two() {
        let r = max_weight_matching_exact_size(&counterexample_graph(), 2).unwrap();
        assert_eq!(r.total_cost, int(2));
        assert_eq!(r.matching.len(), 2);
    }

    #[test]
    fn k4_negative_costs() {
        let g = WeightedGraph::complete(4, |u, v| if (u, v) == (0, 1) { int(-1) } else { int(-2) });
        let r = max_weight_matching_exact_size(&g, 2).unwrap();
        assert_eq!(r.total_cost, int(-3));
        assert_eq!(r.matching.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(max_weight_matching_exact_size(&g, 1).unwrap().total_cost, int(-1));
    }

    #[test]
    fn infeasible_size() {
        let g = counterexample_graph();
        assert!(matches!(
            max_weight_matching_exact_size(&g, 4),
            Err(Error::InfeasibleSize { size: 4, max: 3 })
        ));
        let mut sparse = WeightedGraph::new(4);
        sparse.set(0, 1, int(1));
        sparse.set(0, 2, int(1));
        assert!(max_weight_matching_exact_size(&sparse, 2).is_err());
    }

    #[test]
    fn free_matching_cases() {
        let g = WeightedGraph::complete(4, |_, _| int(-1));
        let r = max_weight_matching_free(&g).unwrap();
        assert!(r.matching.is_empty());
        assert_eq!(r.total_cost, int(0));

        assert_eq!(max_weight_matching_free(&counterexample_graph()).unwrap().total_cost, int(3));

        let mut single = WeightedGraph::new(5);
        single.set(1, 3, int(5));
        let r = max_weight_matching_free(&single).unwrap();
        assert_eq!(r.matching.edges(), &[(1, 3)]);
        assert_eq!(r.total_cost, int(5));
    }

    #[test]
    fn zero_cost_edges_not_added_by_free() {
        let g = WeightedGraph::complete(4, |u, v| if (u, v) == (0, 1) { int(2) } else { int(0) });
        let r = max_weight_matching_free(&g).unwrap();
        assert_eq!(r.matching.edges(), &[(0, 1)]);
    }

    #[test]
    fn empty_graph() {
        let g = WeightedGraph::new(0);
        assert_eq!(max_weight_matchings_by_size(&g).unwrap().len(), 1);
    }
}
