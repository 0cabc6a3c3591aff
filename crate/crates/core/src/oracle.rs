//! Brute-force reference solvers. They share no code with the algorithms
//! they check and favour obviousness over speed.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Instance, ThreePathPacking};
use crate::matching::WeightedGraph;
use crate::rational::Rational;

/// Environment variable overriding the enumeration limits: either one number
/// for all three limits or three comma-separated numbers.
pub const LIMIT_ENV: &str = "TRIPACK_ORACLE_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_n_packing: usize,
    pub max_m_matching: usize,
    pub max_lg_star: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_n_packing: 12,
            max_m_matching: 12,
            max_lg_star: 10,
        }
    }
}

impl OracleLimits {
    /// Defaults, overridden by `TRIPACK_ORACLE_LIMIT` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(LIMIT_ENV) {
            Ok(text) => Self::parse(&text),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let nums: Vec<usize> = text
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad {LIMIT_ENV} value {text:?}")))?;
        match nums.as_slice() {
            [all] => Ok(Self {
                max_n_packing: *all,
                max_m_matching: *all,
                max_lg_star: *all,
            }),
            [a, b, c] => Ok(Self {
                max_n_packing: *a,
                max_m_matching: *b,
                max_lg_star: *c,
            }),
            _ => Err(Error::Parse(format!("bad {LIMIT_ENV} value {text:?}"))),
        }
    }
}

/// Best path through the triple `{a, b, c}` (`a` lowest), trying centers
/// `a`, `b`, `c` in that order and keeping the first maximum.
fn best_path(instance: &Instance, a: usize, b: usize, c: usize) -> ([usize; 3], Rational) {
    let w = |u, v| instance.weight(u, v).clone();
    let candidates = [
        ([b, a, c], w(a, b) + w(a, c)),
        ([a, b, c], w(a, b) + w(b, c)),
        ([a, c, b], w(a, c) + w(b, c)),
    ];
    let mut best = candidates[0].clone();
    for cand in candidates.into_iter().skip(1) {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

struct PackingSearch<'a> {
    instance: &'a Instance,
    used: Vec<bool>,
    current: Vec<[usize; 3]>,
    weight: Rational,
    best: Option<(Vec<[usize; 3]>, Rational)>,
}

impl PackingSearch<'_> {
    fn go(&mut self) {
        let n = self.instance.n();
        let Some(a) = (0..n).find(|&v| !self.used[v]) else {
            if self.best.as_ref().map_or(true, |(_, w)| self.weight > *w) {
                self.best = Some((self.current.clone(), self.weight.clone()));
            }
            return;
        };
        self.used[a] = true;
        for b in (a + 1)..n {
            if self.used[b] {
                continue;
            }
            self.used[b] = true;
            for c in (b + 1)..n {
                if self.used[c] {
                    continue;
                }
                self.used[c] = true;
                let (path, w) = best_path(self.instance, a, b, c);
                self.current.push(path);
                self.weight += &w;
                self.go();
                self.weight -= &w;
                self.current.pop();
                self.used[c] = false;
            }
            self.used[b] = false;
        }
        self.used[a] = false;
    }
}

/// Maximum-weight perfect 3-path packing by enumerating every partition of
/// the vertices into triples and every center choice. Partitions are
/// generated by always grouping the lowest free vertex with two larger ones
/// in lexicographic order; the first maximum found is returned.
pub fn opt_3pp(instance: &Instance, limits: &OracleLimits) -> Result<(ThreePathPacking, Rational)> {
    if instance.n() > limits.max_n_packing {
        return Err(Error::TooLarge {
            what: "oracle packing instance",
            size: instance.n(),
            limit: limits.max_n_packing,
        });
    }
    let mut search = PackingSearch {
        instance,
        used: vec![false; instance.n()],
        current: Vec::new(),
        weight: Rational::zero(),
        best: None,
    };
    search.go();
    let (paths, w) = search.best.expect("a perfect packing always exists");
    Ok((ThreePathPacking::new(paths), w))
}

fn matchings_of_size(g: &WeightedGraph, free: &mut Vec<bool>, from: usize, left: usize, acc: Rational, best: &mut Option<Rational>) {
    if left == 0 {
        if best.as_ref().map_or(true, |b| acc > *b) {
            *best = Some(acc);
        }
        return;
    }
    let m = g.node_count();
    let Some(u) = (from..m).find(|&v| free[v]) else { return };
    // Either u stays unmatched ...
    matchings_of_size(g, free, u + 1, left, acc.clone(), best);
    // ... or it is paired with a later free node.
    free[u] = false;
    for v in (u + 1)..m {
        if !free[v] {
            continue;
        }
        if let Some(c) = g.cost(u, v) {
            free[v] = false;
            matchings_of_size(g, free, u + 1, left - 1, &acc + c, best);
            free[v] = true;
        }
    }
    free[u] = true;
}

/// Exhaustive best cost over all matchings with exactly `p` edges.
pub fn opt_matching_size_p(g: &WeightedGraph, p: usize, limits: &OracleLimits) -> Result<Rational> {
    let m = g.node_count();
    if m > limits.max_m_matching {
        return Err(Error::TooLarge {
            what: "oracle matching graph",
            size: m,
            limit: limits.max_m_matching,
        });
    }
    let mut best = None;
    matchings_of_size(g, &mut vec![true; m], 0, p, Rational::zero(), &mut best);
    best.ok_or(Error::InfeasibleSize {
        size: p,
        max: (0..=m / 2)
            .rev()
            .find(|&k| {
                let mut b = None;
                matchings_of_size(g, &mut vec![true; m], 0, k, Rational::zero(), &mut b);
                b.is_some()
            })
            .unwrap_or(0),
    })
}

fn star_partitions(instance: &Instance, vs: &[usize], used: &mut Vec<bool>, acc: Rational, best: &mut Option<Rational>) {
    let Some(i) = (0..vs.len()).find(|&i| !used[i]) else {
        if best.as_ref().map_or(true, |b| acc > *b) {
            *best = Some(acc);
        }
        return;
    };
    used[i] = true;
    for j in (i + 1)..vs.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        let (a, b) = (vs[i], vs[j]);
        star_partitions(instance, vs, used, &acc + instance.weight(a, b), best);
        for k in (j + 1)..vs.len() {
            if used[k] {
                continue;
            }
            used[k] = true;
            let (_, w) = best_path(instance, a, b, vs[k]);
            star_partitions(instance, vs, used, &acc + w, best);
            used[k] = false;
        }
        used[j] = false;
    }
    used[i] = false;
}

/// Best covering 2-star packing of the vertex set `lg`, by enumerating
/// every partition of `lg` into blocks of two or three vertices.
pub fn opt_2star_packing(instance: &Instance, lg: &[usize], limits: &OracleLimits) -> Result<Rational> {
    if lg.len() > limits.max_lg_star {
        return Err(Error::TooLarge {
            what: "oracle star-packing vertex set",
            size: lg.len(),
            limit: limits.max_lg_star,
        });
    }
    let mut vs = lg.to_vec();
    vs.sort_unstable();
    let mut best = None;
    star_partitions(instance, &vs, &mut vec![false; vs.len()], Rational::zero(), &mut best);
    best.ok_or_else(|| Error::InvalidInstance(format!("no covering 2-star packing of {} vertices", lg.len())))
}

/// Best 2-feasible arc set on `lg` (in-degree at most 1, out-degree at most
/// 2) by letting every vertex pick its in-arc source or nothing.
pub fn opt_2feasible_arc_set(instance: &Instance, lg: &[usize], limit: usize) -> Result<Rational> {
    if lg.len() > limit {
        return Err(Error::TooLarge {
            what: "oracle arc-set vertex set",
            size: lg.len(),
            limit,
        });
    }
    let k = lg.len();
    // choice[v] in 0..=k: k means no in-arc, otherwise the source index.
    let mut choice = vec![0usize; k];
    let mut best = Rational::zero();
    loop {
        let mut out = vec![0usize; k];
        let mut ok = true;
        let mut total = Rational::zero();
        for v in 0..k {
            let src = choice[v];
            if src == k {
                continue;
            }
            if src == v {
                ok = false;
                break;
            }
            out[src] += 1;
            if out[src] > 2 {
                ok = false;
                break;
            }
            total += instance.weight(lg[src], lg[v]);
        }
        if ok && total > best {
            best = total;
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(best);
            }
            choice[i] += 1;
            if choice[i] <= k {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
