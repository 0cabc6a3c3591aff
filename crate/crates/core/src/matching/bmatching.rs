//! Degree-capacitated bipartite matching: pick left-right pairs maximizing
//! total cost, with at most `left_caps[l]` pairs per left node and at most
//! `right_caps[r]` per right node.
//!
//! Solved as a min-cost flow with successive shortest paths (Dijkstra on
//! reduced costs). Augmentation stops as soon as the best path no longer
//! has positive gain.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BMatching {
    /// Selected `(left, right)` pairs, sorted.
    pub arcs: Vec<(usize, usize)>,
    pub total: Rational,
}

struct Arc {
    to: usize,
    cap: usize,
    cost: Rational,
    rev: usize,
}

struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    fn add(&mut self, from: usize, to: usize, cap: usize, cost: Rational) -> (usize, usize) {
        let a = self.adj[from].len();
        let b = self.adj[to].len();
        self.adj[from].push(Arc {
            to,
            cap,
            cost: cost.clone(),
            rev: b,
        });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            rev: a,
        });
        (from, a)
    }

    /// Bellman-Ford distances from `s` over arcs with spare capacity.
    fn bellman_ford(&self, s: usize) -> Vec<Option<Rational>> {
        let n = self.adj.len();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        dist[s] = Some(Rational::zero());
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u].clone() else { continue };
                for arc in &self.adj[u] {
                    if arc.cap == 0 {
                        continue;
                    }
                    let cand = &du + &arc.cost;
                    if dist[arc.to].as_ref().map_or(true, |d| cand < *d) {
                        dist[arc.to] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Dijkstra on reduced costs; returns distances and predecessor arcs.
    fn dijkstra(&self, s: usize, pot: &[Rational]) -> (Vec<Option<Rational>>, Vec<Option<(usize, usize)>>) {
        let n = self.adj.len();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut prev = vec![None; n];
        let mut done = vec![false; n];
        dist[s] = Some(Rational::zero());
        loop {
            let mut best: Option<usize> = None;
            for v in 0..n {
                if done[v] || dist[v].is_none() {
                    continue;
                }
                if best.map_or(true, |b| dist[v] < dist[b]) {
                    best = Some(v);
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            let du = dist[u].clone().expect("settled node has a distance");
            for (i, arc) in self.adj[u].iter().enumerate() {
                if arc.cap == 0 || done[arc.to] {
                    continue;
                }
                let reduced = &arc.cost + &pot[u] - &pot[arc.to];
                debug_assert!(!reduced.is_negative(), "negative reduced cost");
                let cand = &du + reduced;
                if dist[arc.to].as_ref().map_or(true, |d| cand < *d) {
                    dist[arc.to] = Some(cand);
                    prev[arc.to] = Some((u, i));
                }
            }
        }
        (dist, prev)
    }
}

/// Optimal capacitated selection. `cost[l][r] = None` forbids the pair.
pub fn max_weight_bipartite_b_matching(
    left_caps: &[usize],
    right_caps: &[usize],
    cost: &[Vec<Option<Rational>>],
) -> BMatching {
    let nl = left_caps.len();
    let nr = right_caps.len();
    let s = nl + nr;
    let t = s + 1;
    let mut net = Network {
        adj: (0..t + 1).map(|_| Vec::new()).collect(),
    };
    for (l, &cap) in left_caps.iter().enumerate() {
        net.add(s, l, cap, Rational::zero());
    }
    for (r, &cap) in right_caps.iter().enumerate() {
        net.add(nl + r, t, cap, Rational::zero());
    }
    let mut pair_arcs = Vec::new();
    for l in 0..nl {
        for r in 0..nr {
            if let Some(c) = cost.get(l).and_then(|row| row.get(r)).cloned().flatten() {
                let handle = net.add(l, nl + r, 1, -c);
                pair_arcs.push((l, r, handle));
            }
        }
    }

    let mut pot: Vec<Rational> = net
        .bellman_ford(s)
        .into_iter()
        .map(|d| d.unwrap_or_else(Rational::zero))
        .collect();
    loop {
        let (dist, prev) = net.dijkstra(s, &pot);
        let Some(dt) = dist[t].clone() else { break };
        let path_cost = &dt + &pot[t] - &pot[s];
        if !path_cost.is_negative() {
            break;
        }
        for v in 0..pot.len() {
            if let Some(d) = &dist[v] {
                pot[v] += d;
            }
        }
        let mut bottleneck = usize::MAX;
        let mut v = t;
        while let Some((u, i)) = prev[v] {
            bottleneck = bottleneck.min(net.adj[u][i].cap);
            v = u;
        }
        let mut v = t;
        while let Some((u, i)) = prev[v] {
            net.adj[u][i].cap -= bottleneck;
            let to = net.adj[u][i].to;
            let rev = net.adj[u][i].rev;
            net.adj[to][rev].cap += bottleneck;
            v = u;
        }
    }

    let mut arcs = Vec::new();
    let mut total = Rational::zero();
    for (l, r, (from, idx)) in pair_arcs {
        if net.adj[from][idx].cap == 0 {
            arcs.push((l, r));
            total -= &net.adj[from][idx].cost;
        }
    }
    arcs.sort_unstable();
    BMatching { arcs, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn some(v: &[i64]) -> Vec<Option<Rational>> {
        v.iter().map(|&x| Some(int(x))).collect()
    }

    #[test]
    fn all_zero_costs() {
        let r = max_weight_bipartite_b_matching(&[2, 2], &[1, 1], &[some(&[0, 0]), some(&[0, 0])]);
        assert_eq!(r.total, int(0));
    }

    #[test]
    fn top_two_selection() {
        let r = max_weight_bipartite_b_matching(&[2], &[1, 1, 1], &[some(&[3, 2, 1])]);
        assert_eq!(r.total, int(5));
        assert_eq!(r.arcs, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn counterexample_lg_arc_set() {
        // a, b, c, d with w(ab) = w(cd) = 1, no self pairs.
        let w = |u: usize, v: usize| if (u / 2 == v / 2) && u != v { int(1) } else { int(0) };
        let cost: Vec<Vec<Option<Rational>>> = (0..4)
            .map(|u| (0..4).map(|v| (u != v).then(|| w(u, v))).collect())
            .collect();
        let r = max_weight_bipartite_b_matching(&[2; 4], &[1; 4], &cost);
        assert_eq!(r.total, int(4));
        for arc in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert!(r.arcs.contains(&arc));
        }
    }

    #[test]
    fn requires_rerouting() {
        // Greedy would take (0,0)=5 and block; optimum reroutes.
        let cost = vec![some(&[5, 4]), vec![Some(int(4)), None]];
        let r = max_weight_bipartite_b_matching(&[1, 1], &[1, 1], &cost);
        assert_eq!(r.total, int(8));
        assert_eq!(r.arcs, vec![(0, 1), (1, 0)]);
    }
}
