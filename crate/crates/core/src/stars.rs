//! 2-star packings (vertex-disjoint single edges and 3-paths covering a
//! vertex set) and 2-feasible arc sets on a vertex subset of an instance.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{weight_of, ArcSet, Instance, Star, StarPacking};
use crate::matching::max_weight_bipartite_b_matching;
use crate::rational::{self, Rational};

pub const DEFAULT_EXACT_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarBackend {
    /// Optimal packing by subset dynamic programming.
    Exact,
    /// Packing extracted from a maximum 2-feasible arc set.
    Arcset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarBackendChoice {
    pub backend: StarBackend,
    /// Largest vertex set the exact backend accepts.
    pub exact_limit: usize,
}

impl StarBackendChoice {
    pub fn exact() -> Self {
        Self {
            backend: StarBackend::Exact,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn arcset() -> Self {
        Self {
            backend: StarBackend::Arcset,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    /// Exact when `size` fits the limit, arc-set otherwise.
    pub fn for_size(size: usize) -> Self {
        if size <= DEFAULT_EXACT_LIMIT {
            Self::exact()
        } else {
            Self::arcset()
        }
    }
}

impl Default for StarBackendChoice {
    fn default() -> Self {
        Self::exact()
    }
}

/// Maximum-weight arc set on `lg` with in-degree at most 1 and out-degree at
/// most 2, via a capacitated bipartite matching between out- and in-copies.
pub fn max_weight_2feasible_arc_set(instance: &Instance, lg: &[usize]) -> (ArcSet, Rational) {
    let k = lg.len();
    let cost: Vec<Vec<Option<Rational>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (i != j).then(|| instance.weight(lg[i], lg[j]).clone()))
                .collect()
        })
        .collect();
    let sel = max_weight_bipartite_b_matching(&vec![2; k], &vec![1; k], &cost);
    let arcs = sel.arcs.iter().map(|&(i, j)| (lg[i], lg[j])).collect();
    (ArcSet::new(arcs), sel.total)
}

fn check_host(lg: &[usize]) -> Result<()> {
    if lg.len() < 2 {
        return Err(Error::InvalidInstance(format!(
            "a covering 2-star packing needs at least 2 vertices, got {}",
            lg.len()
        )));
    }
    let distinct: BTreeSet<usize> = lg.iter().copied().collect();
    if distinct.len() != lg.len() {
        return Err(Error::InvalidInstance("host vertex set has duplicates".into()));
    }
    Ok(())
}

/// Best star on `{a, b, c}` as `(center, leaves, weight)`; centers are tried
/// in the order `a`, `b`, `c`.
fn best_two_star(instance: &Instance, a: usize, b: usize, c: usize) -> Star {
    let w = |u, v| instance.weight(u, v).clone();
    let options = [
        (Star::path(a, b, c), w(a, b) + w(a, c)),
        (Star::path(b, a, c), w(a, b) + w(b, c)),
        (Star::path(c, a, b), w(a, c) + w(b, c)),
    ];
    let mut best = options[0].clone();
    for o in options.into_iter().skip(1) {
        if o.1 > best.1 {
            best = o;
        }
    }
    best.0
}

/// Maximum-weight covering 2-star packing of `lg` by dynamic programming
/// over subsets: the lowest vertex of each subset joins a 2- or 3-block.
pub fn exact_2star_packing(instance: &Instance, lg: &[usize], limit: usize) -> Result<StarPacking> {
    check_host(lg)?;
    let k = lg.len();
    if k > limit {
        return Err(Error::TooLarge {
            what: "exact star-packing vertex set",
            size: k,
            limit,
        });
    }
    let full = 1usize << k;
    let mut best: Vec<Option<Rational>> = vec![None; full];
    let mut choice: Vec<Option<(Star, usize)>> = vec![None; full];
    best[0] = Some(Rational::zero());
    for mask in 1..full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut js = rest;
        while js != 0 {
            let j = js.trailing_zeros() as usize;
            js &= js - 1;
            let after_pair = rest & !(1 << j);
            let mut consider = |star: Star, remaining: usize| {
                if let Some(sub) = &best[remaining] {
                    let w = weight_of(instance, &StarPacking::new(vec![star.clone()])).expect("valid star");
                    let cand = sub + w;
                    if best[mask].as_ref().map_or(true, |b| cand > *b) {
                        best[mask] = Some(cand);
                        choice[mask] = Some((star, remaining));
                    }
                }
            };
            consider(Star::edge(lg[i], lg[j]), after_pair);
            let mut ks = after_pair & !((1usize << (j + 1)) - 1);
            while ks != 0 {
                let l = ks.trailing_zeros() as usize;
                ks &= ks - 1;
                consider(best_two_star(instance, lg[i], lg[j], lg[l]), after_pair & !(1 << l));
            }
        }
    }
    let mut stars = Vec::new();
    let mut mask = full - 1;
    while mask != 0 {
        let (star, rest) = choice[mask].clone().expect("every subset of size >= 2 is coverable");
        stars.push(star);
        mask = rest;
    }
    Ok(StarPacking::new(stars))
}

/// Undirected edge of an arc-set component; parallel copies are kept.
#[derive(Clone)]
struct CEdge {
    u: usize,
    v: usize,
}

/// Best sub-packing of a tree (given as adjacency over local indices).
/// Stars need not cover the tree.
struct TreeDp<'a> {
    instance: &'a Instance,
    verts: &'a [usize],
    adj: Vec<Vec<usize>>,
}

/// Value with the stars realizing it.
#[derive(Clone)]
struct Val {
    w: Rational,
    stars: Vec<Star>,
}

impl Val {
    fn empty() -> Self {
        Self {
            w: Rational::zero(),
            stars: Vec::new(),
        }
    }

    fn absorb(&mut self, other: &Val) {
        self.w += &other.w;
        self.stars.extend(other.stars.iter().cloned());
    }

    fn with_star(mut self, instance: &Instance, star: Star) -> Self {
        for &leaf in &star.leaves {
            self.w += instance.weight(star.center, leaf);
        }
        self.stars.push(star);
        self
    }
}

/// Per-vertex states: `open` leaves the vertex uncovered, `center1` makes it
/// the center of a star with exactly one child leaf (star not yet added, so
/// the parent may join as a second leaf), `closed` is the best overall with
/// the parent edge unused.
struct States {
    open: Val,
    center1: Option<(Val, usize)>,
    closed: Val,
}

impl TreeDp<'_> {
    fn w(&self, a: usize, b: usize) -> Rational {
        self.instance.weight(self.verts[a], self.verts[b]).clone()
    }

    fn solve(&self, v: usize, parent: Option<usize>) -> States {
        let sub: Vec<(usize, States)> = self.adj[v]
            .iter()
            .copied()
            .filter(|&c| Some(c) != parent)
            .map(|c| (c, self.solve(c, Some(v))))
            .collect();
        // Children closed, except those in `open_kids`, which stay uncovered.
        let combine = |open_kids: &[usize]| {
            let mut out = Val::empty();
            for (c, s) in &sub {
                out.absorb(if open_kids.contains(c) { &s.open } else { &s.closed });
            }
            out
        };
        let open = combine(&[]);

        let mut ranked: Vec<(Rational, usize)> = sub
            .iter()
            .map(|(c, s)| (self.w(v, *c) + &s.open.w - &s.closed.w, *c))
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let center1 = ranked.first().map(|&(_, c)| (combine(&[c]), c));

        let vv = self.verts[v];
        let mut closed = open.clone();
        let mut consider = |cand: Val| {
            if cand.w > closed.w {
                closed = cand;
            }
        };
        if let Some((val, c)) = &center1 {
            consider(val.clone().with_star(self.instance, Star::edge(vv, self.verts[*c])));
        }
        if ranked.len() >= 2 {
            let (c1, c2) = (ranked[0].1, ranked[1].1);
            let star = Star::path(vv, self.verts[c1], self.verts[c2]);
            consider(combine(&[c1, c2]).with_star(self.instance, star));
        }
        // v as a leaf of a star centered at a child.
        for (c, s) in &sub {
            let vc = self.verts[*c];
            let mut best_c = (s.open.clone(), Star::edge(vc, vv));
            if let Some((val, leaf)) = &s.center1 {
                if val.w.clone() + self.w(*c, *leaf) > best_c.0.w {
                    best_c = (val.clone(), Star::path(vc, self.verts[*leaf], vv));
                }
            }
            let mut cand = Val::empty();
            for (c2, s2) in &sub {
                if c2 != c {
                    cand.absorb(&s2.closed);
                }
            }
            cand.absorb(&best_c.0);
            consider(cand.with_star(self.instance, best_c.1));
        }
        States { open, center1, closed }
    }
}

/// Best (not necessarily covering) star sub-packing of one component.
fn component_packing(instance: &Instance, verts: &[usize], edges: &[CEdge]) -> Vec<Star> {
    let k = verts.len();
    let local = |x: usize| verts.iter().position(|&v| v == x).expect("vertex in component");
    let mut degree = vec![0usize; k];
    for e in edges {
        degree[local(e.u)] += 1;
        degree[local(e.v)] += 1;
    }
    // Candidate edge sets that form a tree: the component itself, or the
    // component minus one cycle edge.
    let mut variants: Vec<Vec<usize>> = Vec::new();
    if edges.len() < k {
        variants.push((0..edges.len()).collect());
    } else {
        // Peel leaves until only the cycle remains.
        let mut alive = vec![true; edges.len()];
        let mut deg = degree.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for (i, e) in edges.iter().enumerate() {
                if alive[i] && (deg[local(e.u)] == 1 || deg[local(e.v)] == 1) {
                    alive[i] = false;
                    deg[local(e.u)] -= 1;
                    deg[local(e.v)] -= 1;
                    changed = true;
                }
            }
        }
        for (drop, _) in alive.iter().enumerate().filter(|(_, a)| **a) {
            variants.push((0..edges.len()).filter(|&i| i != drop).collect());
        }
    }
    let mut best: Option<Val> = None;
    for variant in variants {
        let mut adj = vec![Vec::new(); k];
        for &i in &variant {
            let (a, b) = (local(edges[i].u), local(edges[i].v));
            adj[a].push(b);
            adj[b].push(a);
        }
        let dp = TreeDp {
            instance,
            verts,
            adj,
        };
        let val = dp.solve(0, None).closed;
        if best.as_ref().map_or(true, |b| val.w > b.w) {
            best = Some(val);
        }
    }
    best.map(|v| v.stars).unwrap_or_default()
}

/// Extends a partial packing to cover all of `lg`. Uncovered vertices are
/// paired in ascending order; an odd one out joins a single-edge star (or,
/// failing that, the last uncovered pair, or splits a 3-path).
fn extend_cover(instance: &Instance, lg: &[usize], mut stars: Vec<Star>) -> Vec<Star> {
    let covered: BTreeSet<usize> = stars.iter().flat_map(|s| s.vertices().collect::<Vec<_>>()).collect();
    let mut free: Vec<usize> = lg.iter().copied().filter(|v| !covered.contains(v)).collect();
    free.sort_unstable();
    let odd = if free.len() % 2 == 1 { free.pop() } else { None };
    for pair in free.chunks(2) {
        stars.push(Star::edge(pair[0], pair[1]));
    }
    let Some(u) = odd else { return stars };
    let w = |a: usize, b: usize| instance.weight(a, b).clone();
    // Best single-edge star to grow.
    let mut best: Option<(usize, Star, Rational)> = None;
    for (i, s) in stars.iter().enumerate() {
        if s.leaves.len() != 1 {
            continue;
        }
        let (c, l) = (s.center, s.leaves[0]);
        for (star, gain) in [(Star::path(c, l, u), w(c, u)), (Star::path(l, c, u), w(l, u))] {
            if best.as_ref().map_or(true, |(_, _, g)| gain > *g) {
                best = Some((i, star, gain));
            }
        }
    }
    if let Some((i, star, _)) = best {
        stars[i] = star;
        return stars;
    }
    // Only 3-paths exist: detach one leaf and pair it with u.
    let mut best: Option<(usize, usize, Rational)> = None;
    for (i, s) in stars.iter().enumerate() {
        for &leaf in &s.leaves {
            let delta = w(leaf, u) - w(s.center, leaf);
            if best.as_ref().map_or(true, |(_, _, d)| delta > *d) {
                best = Some((i, leaf, delta));
            }
        }
    }
    let (i, leaf, _) = best.expect("at least one star exists when |lg| >= 2");
    let keep = stars[i].leaves.iter().copied().find(|&x| x != leaf).expect("two leaves");
    stars[i] = Star::edge(stars[i].center, keep);
    stars.push(Star::edge(leaf, u));
    stars
}

/// Best vertex-disjoint star sub-packing using only edges of the maximum
/// 2-feasible arc set, found per component by tree dynamic programming (a
/// unicyclic component is solved once per dropped cycle edge). The result
/// need not cover `lg`.
pub fn arcset_subpacking(instance: &Instance, lg: &[usize]) -> Result<StarPacking> {
    check_host(lg)?;
    let (arcs, _) = max_weight_2feasible_arc_set(instance, lg);
    let mut sorted = lg.to_vec();
    sorted.sort_unstable();
    let index = |v: usize| sorted.binary_search(&v).expect("arc endpoint in lg");
    let mut parent: Vec<usize> = (0..sorted.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in &arcs.arcs {
        let (a, b) = (find(&mut parent, index(u)), find(&mut parent, index(v)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comps: std::collections::BTreeMap<usize, (Vec<usize>, Vec<CEdge>)> = Default::default();
    for (i, &v) in sorted.iter().enumerate() {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().0.push(v);
    }
    for &(u, v) in &arcs.arcs {
        let r = find(&mut parent, index(u));
        comps.get_mut(&r).expect("component").1.push(CEdge { u, v });
    }
    let mut stars = Vec::new();
    for (verts, edges) in comps.values() {
        if !edges.is_empty() {
            stars.extend(component_packing(instance, verts, edges));
        }
    }
    Ok(StarPacking::new(stars))
}

/// Covering packing from the arc-set sub-packing, extended with
/// zero-or-better edges.
pub fn arcset_2star_packing(instance: &Instance, lg: &[usize]) -> Result<StarPacking> {
    let partial = arcset_subpacking(instance, lg)?;
    Ok(StarPacking::new(extend_cover(instance, lg, partial.stars)))
}

/// Covering 2-star packing `S` of `lg`.
///
/// The arc-set backend checks `w(S) >= (4/9) w(A*)` at runtime; on
/// violation it falls back to the exact backend when `lg` fits its limit
/// and otherwise logs a warning. Covering packings do not always reach that
/// bound (on four vertices the best one is a perfect matching), so the
/// exact result is returned even when it stays below.
pub fn two_star_packing(instance: &Instance, lg: &[usize], choice: StarBackendChoice) -> Result<StarPacking> {
    match choice.backend {
        StarBackend::Exact => exact_2star_packing(instance, lg, choice.exact_limit),
        StarBackend::Arcset => {
            let s = arcset_2star_packing(instance, lg)?;
            let (_, a_star) = max_weight_2feasible_arc_set(instance, lg);
            let ws = weight_of(instance, &s)?;
            if ws * rational::int(9) >= a_star * rational::int(4) {
                return Ok(s);
            }
            if lg.len() <= choice.exact_limit {
                log::warn!("arc-set star packing below 4/9 of the arc set; using exact backend");
                exact_2star_packing(instance, lg, choice.exact_limit)
            } else {
                log::warn!("arc-set star packing below 4/9 of the arc set on {} vertices", lg.len());
                Ok(s)
            }
        }
    }
}
