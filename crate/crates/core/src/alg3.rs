//! Third algorithm: a 2-star packing on the vertices of a maximum-weight
//! matching of size n/3, completed into 3-paths with the other n/3 vertices.

use crate::alg1::attach_residual;
use crate::error::{Error, Result};
use crate::instance::{weight_of, ArcSet, Instance, Matching, StarPacking, ThreePathPacking};
use crate::matching::{max_weight_matching_exact_size, WeightedGraph};
use crate::rational::Rational;
use crate::stars::{max_weight_2feasible_arc_set, two_star_packing, StarBackendChoice};

#[derive(Debug, Clone)]
pub struct Alg3Trace {
    pub m_star: Matching,
    pub m_star_weight: Rational,
    /// Vertices covered by `m_star`, ascending.
    pub lg: Vec<usize>,
    pub arc_set: ArcSet,
    pub arc_set_weight: Rational,
    pub stars: StarPacking,
    pub stars_weight: Rational,
    pub packing: ThreePathPacking,
}

/// Keeps every 3-path of `stars`, extends each single edge by the next
/// residual (ascending) at its better end, and groups leftover residuals
/// into zero-cost 3-paths.
pub fn expand_alg3(instance: &Instance, stars: &StarPacking, residuals: &[usize]) -> Result<ThreePathPacking> {
    let mut pool = residuals.to_vec();
    pool.sort_unstable();
    let mut pool = pool.into_iter();
    let mut paths = Vec::new();
    for star in &stars.stars {
        match star.leaves.as_slice() {
            [a, b] => paths.push([*a, star.center, *b]),
            [l] => {
                let r = pool
                    .next()
                    .ok_or_else(|| Error::Internal("more single-edge stars than residual vertices".into()))?;
                paths.push(attach_residual(instance, star.center, *l, r));
            }
            _ => return Err(Error::InvalidSolution("star with 0 or more than 2 leaves".into())),
        }
    }
    let rest: Vec<usize> = pool.collect();
    if rest.len() % 3 != 0 {
        return Err(Error::Internal(format!("{} leftover residual vertices", rest.len())));
    }
    paths.extend(rest.chunks(3).map(|c| [c[0], c[1], c[2]]));
    Ok(ThreePathPacking::new(paths))
}

pub fn run_alg3_traced(instance: &Instance, choice: StarBackendChoice) -> Result<Alg3Trace> {
    let n = instance.n();
    let third = max_weight_matching_exact_size(&WeightedGraph::from_instance(instance), n / 3)?;
    let lg: Vec<usize> = third.matching.vertices().into_iter().collect();
    let residuals: Vec<usize> = (0..n).filter(|v| lg.binary_search(v).is_err()).collect();
    let (arc_set, arc_set_weight) = max_weight_2feasible_arc_set(instance, &lg);
    let stars = two_star_packing(instance, &lg, choice)?;
    if !stars.covers(&lg) {
        return Err(Error::Internal("star packing does not cover its host".into()));
    }
    let stars_weight = weight_of(instance, &stars)?;
    let packing = expand_alg3(instance, &stars, &residuals)?;
    Ok(Alg3Trace {
        m_star: third.matching,
        m_star_weight: third.total_cost,
        lg,
        arc_set,
        arc_set_weight,
        stars,
        stars_weight,
        packing,
    })
}

pub fn run_alg3(instance: &Instance, choice: StarBackendChoice) -> Result<ThreePathPacking> {
    Ok(run_alg3_traced(instance, choice)?.packing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate_packing, Star};
    use crate::rational::int;

    #[test]
    fn counterexample() {
        let g = Instance::counterexample();
        for choice in [StarBackendChoice::exact(), StarBackendChoice::arcset()] {
            let t = run_alg3_traced(&g, choice).unwrap();
            assert_eq!(t.lg.len(), 4);
            assert_eq!(t.arc_set_weight, int(4));
            assert_eq!(t.stars_weight, int(2));
            assert!(validate_packing(&g, &t.packing).is_empty());
            assert_eq!(weight_of(&g, &t.packing).unwrap(), int(2));
        }
    }

    #[test]
    fn zero_instance() {
        let g = Instance::from_fn(12, |_, _| int(0)).unwrap();
        let p = run_alg3(&g, StarBackendChoice::exact()).unwrap();
        assert!(validate_packing(&g, &p).is_empty());
        assert_eq!(weight_of(&g, &p).unwrap(), int(0));
    }

    #[test]
    fn expansion_groups_leftovers() {
        let g = Instance::from_fn(9, |_, _| int(1)).unwrap();
        let stars = StarPacking::new(vec![Star::path(0, 1, 2), Star::path(3, 4, 5)]);
        let p = expand_alg3(&g, &stars, &[8, 6, 7]).unwrap();
        assert_eq!(p.paths, vec![[1, 0, 2], [4, 3, 5], [6, 7, 8]]);
        let stars = StarPacking::new(vec![Star::edge(0, 1), Star::edge(2, 3), Star::edge(4, 5)]);
        assert!(expand_alg3(&g, &stars, &[6, 7]).is_err());
    }
}
