//! Second algorithm: matching of size n/3, contraction into super-nodes
//! plus the n/3 untouched vertices, a free-size maximum-cost matching,
//! saturation of the super-nodes, and expansion.

use std::collections::BTreeSet;

use crate::alg1::{expand_super_pair, ContractedGraph, Node};
use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, ThreePathPacking};
use crate::matching::{max_weight_matching_exact_size, max_weight_matching_free, WeightedGraph};
use crate::rational::Rational;

/// Contracts the n/3 edges of `m`. Nodes `0..n/3` are super-nodes in edge
/// order, the rest are the uncovered vertices in ascending order.
/// Super-single pairs cost the original weight; single-single pairs are
/// absent.
pub fn contract_partial(instance: &Instance, m: &Matching) -> Result<ContractedGraph> {
    let n = instance.n();
    let covered = m.vertices();
    if m.len() * 3 != n || covered.iter().any(|&v| v >= n) {
        return Err(Error::InvalidSolution(format!(
            "matching has {} edges, expected {}",
            m.len(),
            n / 3
        )));
    }
    let mut nodes: Vec<Node> = m.edges().iter().map(|&(u, v)| Node::Super(u, v)).collect();
    nodes.extend((0..n).filter(|v| !covered.contains(v)).map(Node::Single));
    Ok(ContractedGraph::build(instance, nodes))
}

/// Pairs every unmatched super-node (in node order) with the unmatched
/// single of largest cost, the lowest single winning ties.
pub fn saturate(m_contracted: &Matching, g: &ContractedGraph) -> Result<Matching> {
    let mut used: BTreeSet<usize> = m_contracted.vertices();
    let mut edges: Vec<(usize, usize)> = m_contracted.edges().to_vec();
    for (i, node) in g.nodes.iter().enumerate() {
        if !matches!(node, Node::Super(..)) || used.contains(&i) {
            continue;
        }
        let mut best: Option<(usize, &Rational)> = None;
        for (j, other) in g.nodes.iter().enumerate() {
            if !matches!(other, Node::Single(_)) || used.contains(&j) {
                continue;
            }
            let c = g
                .costs
                .cost(i, j)
                .ok_or_else(|| Error::Internal(format!("missing super-single cost ({i},{j})")))?;
            if best.map_or(true, |(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let (j, _) = best.ok_or_else(|| Error::Internal("no free single for saturation".into()))?;
        used.insert(i);
        used.insert(j);
        edges.push((i, j));
    }
    Matching::new(edges)
}

/// Intermediate objects of one run.
#[derive(Debug, Clone)]
pub struct Alg2Trace {
    /// Maximum-weight matching of size n/3.
    pub m_star: Matching,
    pub m_star_weight: Rational,
    pub contracted: ContractedGraph,
    /// Free-size maximum-cost matching before saturation.
    pub m_free: Matching,
    pub m_free_cost: Rational,
    pub m_saturated: Matching,
    pub m_saturated_cost: Rational,
    pub packing: ThreePathPacking,
}

/// Expansion of a saturated matching.
pub fn expand_alg2(instance: &Instance, g: &ContractedGraph, m: &Matching) -> Result<ThreePathPacking> {
    let mut paths = Vec::new();
    let mut pool = Vec::new();
    let mut used = vec![false; g.node_count()];
    for &(i, j) in m.edges() {
        used[i] = true;
        used[j] = true;
        match (g.nodes[i], g.nodes[j]) {
            (Node::Super(..), Node::Super(..)) => {
                let (path, residual) = expand_super_pair(instance, g, i, j)?;
                paths.push(path);
                pool.push(residual);
            }
            (Node::Super(a, b), Node::Single(_)) | (Node::Single(_), Node::Super(a, b)) => {
                let (si, di) = if matches!(g.nodes[i], Node::Super(..)) { (i, j) } else { (j, i) };
                let (x, s) = g
                    .back(si, di)
                    .ok_or_else(|| Error::Internal(format!("no back edge for ({i},{j})")))?;
                let other = if x == a { b } else { a };
                paths.push([s, x, other]);
            }
            _ => return Err(Error::Internal("single-single pair in matching".into())),
        }
    }
    for (k, node) in g.nodes.iter().enumerate() {
        match *node {
            Node::Single(v) if !used[k] => pool.push(v),
            Node::Super(..) if !used[k] => {
                return Err(Error::Internal("unsaturated super-node at expansion".into()))
            }
            _ => {}
        }
    }
    if pool.len() % 3 != 0 {
        return Err(Error::Internal(format!("{} residual vertices", pool.len())));
    }
    pool.sort_unstable();
    paths.extend(pool.chunks(3).map(|c| [c[0], c[1], c[2]]));
    Ok(ThreePathPacking::new(paths))
}

pub fn run_alg2_traced(instance: &Instance) -> Result<Alg2Trace> {
    let n = instance.n();
    let third = max_weight_matching_exact_size(&WeightedGraph::from_instance(instance), n / 3)?;
    let contracted = contract_partial(instance, &third.matching)?;
    let free = max_weight_matching_free(&contracted.costs)?;
    let m_saturated = saturate(&free.matching, &contracted)?;
    let m_saturated_cost = contracted.costs.matching_cost(&m_saturated)?;
    let packing = expand_alg2(instance, &contracted, &m_saturated)?;
    Ok(Alg2Trace {
        m_star: third.matching,
        m_star_weight: third.total_cost,
        contracted,
        m_free: free.matching,
        m_free_cost: free.total_cost,
        m_saturated,
        m_saturated_cost,
        packing,
    })
}

pub fn run_alg2(instance: &Instance) -> Result<ThreePathPacking> {
    Ok(run_alg2_traced(instance)?.packing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate_packing, weight_of};
    use crate::rational::int;

    #[test]
    fn counterexample_contraction() {
        let g = Instance::counterexample();
        let c = contract_partial(&g, &Matching::new([(0, 1), (2, 3)]).unwrap()).unwrap();
        assert_eq!(c.node_count(), 4);
        assert_eq!(c.nodes[2], Node::Single(4));
        assert_eq!(c.costs.cost(0, 1), Some(&int(-1)));
        assert_eq!(c.costs.cost(0, 2), Some(&int(0)));
        assert_eq!(c.costs.cost(2, 3), None);
    }

    #[test]
    fn equal_weights() {
        let g = Instance::from_fn(6, |_, _| int(3)).unwrap();
        let c = contract_partial(&g, &Matching::new([(0, 1), (2, 3)]).unwrap()).unwrap();
        assert_eq!(c.costs.cost(0, 1), Some(&int(0)));
        assert_eq!(c.costs.cost(1, 3), Some(&int(3)));
    }

    #[test]
    fn path_contraction() {
        let g = Instance::from_edges(6, &[(0, 1, int(10)), (1, 2, int(5))]).unwrap();
        let c = contract_partial(&g, &Matching::new([(0, 1), (2, 3)]).unwrap()).unwrap();
        assert_eq!(c.costs.cost(0, 1), Some(&int(5)));
        assert_eq!(c.back(0, 1), Some((1, 2)));
    }

    #[test]
    fn wrong_size_rejected() {
        let g = Instance::counterexample();
        assert!(contract_partial(&g, &Matching::new([(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn saturation_cases() {
        let g = Instance::counterexample();
        let c = contract_partial(&g, &Matching::new([(0, 1), (2, 3)]).unwrap()).unwrap();
        let s = saturate(&Matching::empty(), &c).unwrap();
        assert_eq!(s.edges(), &[(0, 2), (1, 3)]);
        assert_eq!(c.costs.matching_cost(&s).unwrap(), int(0));
        assert_eq!(saturate(&s, &c).unwrap(), s);

        // one super with singles of cost 3 and 7
        let h = Instance::from_edges(6, &[(0, 1, int(9)), (2, 3, int(9)), (0, 4, int(3)), (1, 5, int(7))])
            .unwrap();
        let c = contract_partial(&h, &Matching::new([(0, 1), (2, 3)]).unwrap()).unwrap();
        let partial = Matching::new([(1, 2)]).unwrap();
        let s = saturate(&partial, &c).unwrap();
        assert!(s.contains(0, 3));
        assert_eq!(c.nodes[3], Node::Single(5));
    }

    #[test]
    fn runs() {
        let g = Instance::counterexample();
        let t = run_alg2_traced(&g).unwrap();
        assert_eq!(t.m_star_weight, int(2));
        assert_eq!(t.m_free_cost, int(0));
        assert_eq!(weight_of(&g, &t.packing).unwrap(), int(2));

        let g = Instance::from_edges(6, &[(0, 1, int(10)), (1, 2, int(5))]).unwrap();
        let t = run_alg2_traced(&g).unwrap();
        assert_eq!(t.m_free_cost, int(5));
        assert_eq!(weight_of(&g, &t.packing).unwrap(), int(15));

        let g = Instance::from_fn(9, |_, _| int(0)).unwrap();
        let p = run_alg2(&g).unwrap();
        assert!(validate_packing(&g, &p).is_empty());
        assert_eq!(weight_of(&g, &p).unwrap(), int(0));
    }
}
