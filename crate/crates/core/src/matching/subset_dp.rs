//! Exact maximum-cost matchings of every size by dynamic programming over
//! node subsets. Exponential; meant for graphs of at most 20 nodes.

use num_traits::Zero;

use super::{result_from, SizedMatchingResult, WeightedGraph, SUBSET_DP_LIMIT};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `table[mask][k]`: best cost of a size-`k` matching inside `mask`.
fn build(g: &WeightedGraph) -> Vec<Vec<Option<Rational>>> {
    let m = g.node_count();
    let full = 1usize << m;
    let mut table: Vec<Vec<Option<Rational>>> = Vec::with_capacity(full);
    table.push(vec![Some(Rational::zero())]);
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        let cap = (mask.count_ones() / 2) as usize;
        let mut row = vec![None; cap + 1];
        for (k, v) in table[rest].iter().enumerate() {
            row[k] = v.clone();
        }
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            if let Some(c) = g.cost(low, j) {
                let sub = rest & !(1 << j);
                for (k, v) in table[sub].iter().enumerate() {
                    if let Some(v) = v {
                        let cand = v + c;
                        if row[k + 1].as_ref().map_or(true, |b| cand > *b) {
                            row[k + 1] = Some(cand);
                        }
                    }
                }
            }
        }
        table.push(row);
    }
    table
}

fn reconstruct(
    g: &WeightedGraph,
    table: &[Vec<Option<Rational>>],
    mut mask: usize,
    mut k: usize,
) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    while k > 0 {
        let target = table[mask][k].clone().expect("reachable state");
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        if table[rest].get(k).cloned().flatten() == Some(target.clone()) {
            mask = rest;
            continue;
        }
        let mut others = rest;
        let mut found = false;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            if let Some(c) = g.cost(low, j) {
                let sub = rest & !(1 << j);
                if let Some(Some(v)) = table[sub].get(k - 1) {
                    if v + c == target {
                        edges.push((low, j));
                        mask = sub;
                        k -= 1;
                        found = true;
                        break;
                    }
                }
            }
        }
        assert!(found, "subset table is inconsistent");
    }
    edges
}

/// Same contract as the blossom sweep: one optimal matching per feasible size.
pub fn max_weight_by_size(g: &WeightedGraph) -> Result<Vec<SizedMatchingResult>> {
    let m = g.node_count();
    if m > SUBSET_DP_LIMIT {
        return Err(Error::TooLarge {
            what: "subset matching graph",
            size: m,
            limit: SUBSET_DP_LIMIT,
        });
    }
    let table = build(g);
    let full = (1usize << m) - 1;
    let mut out = Vec::new();
    for (k, v) in table[full].iter().enumerate() {
        if v.is_none() {
            break;
        }
        out.push(result_from(g, reconstruct(g, &table, full, k))?);
    }
    Ok(out)
}

/// Best cost of a size-`p` matching, or `None` if no such matching exists.
pub fn max_cost_of_size(g: &WeightedGraph, p: usize) -> Result<Option<Rational>> {
    let all = max_weight_by_size(g)?;
    Ok(all.get(p).map(|r| r.total_cost.clone()))
}
