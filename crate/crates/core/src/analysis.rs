//! Per-instance verification of the approximation analysis: the path
//! classification relative to the size-n/3 matching, the derived edge and
//! matching partitions, the fifteen checked inequalities and the LP point.
//!
//! Cost functions of both contractions are recomputed here from scratch and
//! never taken from the algorithm modules.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde_json::json;

use crate::alg2::{run_alg2_traced, Alg2Trace};
use crate::alg1::run_alg1;
use crate::alg3::{run_alg3_traced, Alg3Trace};
use crate::error::{Error, Result};
use crate::instance::{validate_packing, weight_of, Instance, Matching, ThreePathPacking};
use crate::lpcert::{check_point_feasible, PointViolation};
pub use crate::lpcert::LpPoint;
use crate::matching::{max_weight_matching_exact_size, max_weight_matching_free, WeightedGraph};
use crate::oracle::{opt_3pp, OracleLimits};
use crate::rational::{self, int, ratio, Rational};
use crate::stars::StarBackendChoice;

pub type Edge = (usize, usize);

fn edge(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

fn path_edges(p: &[usize; 3]) -> [Edge; 2] {
    [edge(p[0], p[1]), edge(p[1], p[2])]
}

fn w_sum<'a>(instance: &Instance, edges: impl IntoIterator<Item = &'a Edge>) -> Rational {
    edges.into_iter().map(|&(u, v)| instance.weight(u, v).clone()).sum()
}

/// Rewrites every path `x-y-z` whose center is unmatched while `xz` is a
/// matching edge into `x-z-y`. The total weight must not change.
pub fn normalize_pstar(instance: &Instance, pstar: &ThreePathPacking, m: &Matching) -> Result<ThreePathPacking> {
    let covered = m.vertices();
    let mut paths = Vec::with_capacity(pstar.paths.len());
    for p in &pstar.paths {
        let [x, y, z] = *p;
        if !covered.contains(&y) && covered.contains(&x) && covered.contains(&z) && m.contains(x, z) {
            let q = [x, z, y];
            if instance.path_weight(&q) != instance.path_weight(p) {
                return Err(Error::Internal(format!(
                    "rewriting {p:?} to {q:?} changes its weight; the matching or the packing is not optimal"
                )));
            }
            paths.push(q);
        } else {
            paths.push(*p);
        }
    }
    Ok(ThreePathPacking::new(paths))
}

/// The analysis objects for one `(P*, M)` pair, `M` of size n/3. Index `i`
/// of the per-class arrays holds class `i + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub paths: Vec<[usize; 3]>,
    /// Class 1..=8 of each path, aligned with `paths`.
    pub class_of_path: Vec<usize>,
    pub x: [Vec<Edge>; 8],
    pub y: [Vec<Edge>; 8],
    /// Path edges with exactly one endpoint covered by `M`.
    pub middle: Vec<Edge>,
    /// `M1..M5`.
    pub m_parts: [Vec<Edge>; 5],
    /// `M1` split by how many class-6 and class-2/3/4 middle edges it meets.
    pub m1_parts: [Vec<Edge>; 3],
    /// Paths of classes 6 and 8, as edges.
    pub e1: Vec<Edge>,
    /// `X2 ∪ X3 ∪ X4 ∪ X7`.
    pub e2: Vec<Edge>,
    /// `X5`.
    pub e3: Vec<Edge>,
}

fn classify(p: &[usize; 3], covered: &BTreeSet<usize>, m: &Matching) -> Result<usize> {
    let [x, y, z] = *p;
    let count = [x, y, z].iter().filter(|v| covered.contains(v)).count();
    let center = covered.contains(&y);
    let in_m = usize::from(m.contains(x, y)) + usize::from(m.contains(y, z));
    let class = match (count, center, in_m) {
        (0, _, _) => 1,
        (1, false, _) => 2,
        (1, true, _) => 3,
        (2, false, _) => 4,
        (2, true, 1) => 5,
        (2, true, 0) => 6,
        (3, _, 1) => 7,
        (3, _, 0) => 8,
        _ => return Err(Error::Internal(format!("path {p:?} fits no class"))),
    };
    Ok(class)
}

/// Classifies the normalized optimum and builds every derived set.
pub fn decompose(instance: &Instance, pstar: &ThreePathPacking, m: &Matching) -> Result<Decomposition> {
    let covered = m.vertices();
    let mut d = Decomposition {
        paths: pstar.paths.clone(),
        ..Default::default()
    };
    // (class, edge) for each middle edge
    let mut middle_class = Vec::new();
    for p in &pstar.paths {
        let [x, y, z] = *p;
        let class = classify(p, &covered, m)?;
        if class == 4 && m.contains(x, z) {
            return Err(Error::Internal(format!("path {p:?} is not normalized")));
        }
        let (xy, yz) = (edge(x, y), edge(y, z));
        let heavier_first = instance.weight(x, y) >= instance.weight(y, z);
        let x_first = match class {
            1 | 3 | 4 | 8 => heavier_first,
            2 => covered.contains(&x),
            5 | 7 => !m.contains(x, y),
            6 => !covered.contains(&x),
            _ => unreachable!(),
        };
        let (xe, ye) = if x_first { (xy, yz) } else { (yz, xy) };
        d.x[class - 1].push(xe);
        d.y[class - 1].push(ye);
        d.class_of_path.push(class);
        for (a, b) in [(x, y), (y, z)] {
            if covered.contains(&a) != covered.contains(&b) {
                d.middle.push(edge(a, b));
                middle_class.push((class, a, b));
            }
        }
    }

    let mut in_p5 = BTreeSet::new();
    let mut in_p7 = BTreeSet::new();
    for (p, &class) in d.paths.iter().zip(&d.class_of_path) {
        for e in path_edges(p) {
            match class {
                5 => in_p5.insert(e),
                7 => in_p7.insert(e),
                _ => false,
            };
        }
    }
    for &(u, v) in m.edges() {
        let touching = |group: &[usize]| {
            middle_class
                .iter()
                .filter(|(c, a, b)| group.contains(c) && [u, v].iter().any(|t| t == a || t == b))
                .count()
        };
        let six = touching(&[6]);
        let low = touching(&[2, 3, 4]);
        let five = touching(&[5]);
        let e = (u, v);
        if six > 0 {
            d.m_parts[0].push(e);
            let k = match (six, low) {
                (1, 0) => 0,
                (2, 0) => 1,
                (1, _) => 2,
                _ => return Err(Error::Internal(format!("matching edge {e:?} meets {six} class-6 middle edges"))),
            };
            d.m1_parts[k].push(e);
        } else if low > 0 {
            if five > 0 {
                return Err(Error::Internal(format!("matching edge {e:?} meets middle edges of classes 5 and 2-4")));
            }
            d.m_parts[1].push(e);
        } else if in_p7.contains(&e) {
            d.m_parts[2].push(e);
        } else if in_p5.contains(&e) {
            d.m_parts[3].push(e);
        } else {
            d.m_parts[4].push(e);
        }
    }

    for (p, &class) in d.paths.iter().zip(&d.class_of_path) {
        if class == 6 || class == 8 {
            d.e1.extend(path_edges(p));
        }
    }
    for i in [2, 3, 4, 7] {
        d.e2.extend(d.x[i - 1].iter().copied());
    }
    d.e3 = d.x[4].clone();
    Ok(d)
}

impl Decomposition {
    pub fn paths_of_class(&self, class: usize) -> impl Iterator<Item = &[usize; 3]> + '_ {
        self.paths
            .iter()
            .zip(&self.class_of_path)
            .filter(move |(_, &c)| c == class)
            .map(|(p, _)| p)
    }

    pub fn class_weight(&self, instance: &Instance, class: usize) -> Rational {
        self.paths_of_class(class).map(|p| instance.path_weight(p)).sum()
    }

    /// Sum of the heavier edge over the paths of `class`.
    pub fn class_max_sum(&self, instance: &Instance, class: usize) -> Rational {
        self.paths_of_class(class).map(|p| instance.path_max_edge(p)).sum()
    }

    /// Broken partition properties, empty when the decomposition is sound.
    pub fn invariant_violations(&self, m: &Matching) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..8 {
            let mut path_set: Vec<Edge> = self.paths_of_class(i + 1).flat_map(path_edges).collect();
            let mut xy: Vec<Edge> = self.x[i].iter().chain(&self.y[i]).copied().collect();
            path_set.sort_unstable();
            xy.sort_unstable();
            if path_set != xy {
                out.push(format!("X{0} and Y{0} do not split the class-{0} edges", i + 1));
            }
        }
        let mut parts: Vec<Edge> = self.m_parts.iter().flatten().copied().collect();
        parts.sort_unstable();
        if parts != m.edges() {
            out.push("M1..M5 do not partition the matching".into());
        }
        let mut m1: Vec<Edge> = self.m1_parts.iter().flatten().copied().collect();
        m1.sort_unstable();
        let mut m1_expected = self.m_parts[0].clone();
        m1_expected.sort_unstable();
        if m1 != m1_expected {
            out.push("the three parts of M1 do not partition M1".into());
        }
        let e_all: BTreeSet<Edge> = self.e1.iter().chain(&self.e2).chain(&self.e3).copied().collect();
        if e_all.len() != self.e1.len() + self.e2.len() + self.e3.len() {
            out.push("E1, E2, E3 overlap".into());
        }
        if e_all.iter().any(|&(u, v)| m.contains(u, v)) {
            out.push("E1, E2, E3 meet the matching".into());
        }
        if self.class_of_path.len() != self.paths.len() || self.class_of_path.iter().any(|c| !(1..=8).contains(c)) {
            out.push("class labels malformed".into());
        }
        out
    }
}

/// The ratio variables of one instance.
pub fn lp_point(
    instance: &Instance,
    d: &Decomposition,
    m_third: &Matching,
    m_half: &Matching,
    opt: &Rational,
) -> Result<LpPoint> {
    if opt.is_zero() {
        return Err(Error::ZeroOptimum);
    }
    let mut pt = LpPoint::default();
    for i in 0..8 {
        pt.xi[i] = d.class_weight(instance, i + 1) / opt;
        pt.alpha[i] = w_sum(instance, &d.x[i]) / opt;
        pt.beta[i] = w_sum(instance, &d.y[i]) / opt;
        pt.gamma[i] = d.class_max_sum(instance, i + 1) / opt;
    }
    pt.delta = weight_of(instance, m_half)? / opt;
    pt.pi = weight_of(instance, m_third)? / opt;
    for j in 0..5 {
        pt.tau[j] = w_sum(instance, &d.m_parts[j]) / opt;
    }
    for j in 0..3 {
        pt.phi[j] = w_sum(instance, &d.m1_parts[j]) / opt;
    }
    Ok(pt)
}

/// Edge cost after contracting a matching: `w - min` of the two matching
/// edges for two covered ends, `w` for one covered end, `None` when neither
/// end is covered or the edge joins the two ends of a matching edge.
struct ContractedCost<'a> {
    instance: &'a Instance,
    mate: Vec<Option<usize>>,
}

impl<'a> ContractedCost<'a> {
    fn new(instance: &'a Instance, m: &Matching) -> Self {
        Self {
            instance,
            mate: m.mates(instance.n()),
        }
    }

    fn cost(&self, u: usize, v: usize) -> Option<Rational> {
        let w = self.instance.weight(u, v);
        match (self.mate[u], self.mate[v]) {
            (Some(a), Some(_)) if a == v => None,
            (Some(a), Some(b)) => Some(w - rational::min(self.instance.weight(u, a), self.instance.weight(v, b))),
            (Some(_), None) | (None, Some(_)) => Some(w.clone()),
            (None, None) => None,
        }
    }

    fn total(&self, edges: &[Edge]) -> Result<Rational> {
        edges
            .iter()
            .map(|&(u, v)| {
                self.cost(u, v)
                    .ok_or_else(|| Error::Internal(format!("edge ({u}, {v}) has no contracted cost")))
            })
            .sum()
    }

    /// Maximum-cost matching value over the contracted nodes: one node per
    /// matching edge and one per uncovered vertex; uncovered pairs are absent.
    fn best(&self, m: &Matching, size: Option<usize>) -> Result<Rational> {
        let mut groups: Vec<Vec<usize>> = m.edges().iter().map(|&(u, v)| vec![u, v]).collect();
        groups.extend((0..self.instance.n()).filter(|&v| self.mate[v].is_none()).map(|v| vec![v]));
        let mut g = WeightedGraph::new(groups.len());
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let best = groups[i]
                    .iter()
                    .flat_map(|&a| groups[j].iter().filter_map(move |&b| self.cost(a, b)))
                    .max();
                if let Some(c) = best {
                    g.set(i, j, c);
                }
            }
        }
        let r = match size {
            Some(k) => max_weight_matching_exact_size(&g, k)?,
            None => max_weight_matching_free(&g)?,
        };
        Ok(r.total_cost)
    }
}

/// One inequality or equality inside a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckPart {
    pub label: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub equality: bool,
}

impl CheckPart {
    fn ge(label: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            equality: false,
        }
    }

    fn eq(label: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            equality: true,
        }
    }

    pub fn pass(&self) -> bool {
        if self.equality {
            self.lhs == self.rhs
        } else {
            self.lhs >= self.rhs
        }
    }

    /// `lhs - rhs`; for an equality, minus the absolute difference.
    pub fn slack(&self) -> Rational {
        let d = &self.lhs - &self.rhs;
        if self.equality {
            -d.abs()
        } else {
            d
        }
    }
}

/// A named check: passes iff every part holds. `lhs`/`rhs` come from the
/// part with the smallest slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub parts: Vec<CheckPart>,
}

impl Check {
    fn new(name: &str, parts: Vec<CheckPart>) -> Self {
        Self {
            name: name.into(),
            parts,
        }
    }

    pub fn pass(&self) -> bool {
        self.parts.iter().all(CheckPart::pass)
    }

    pub fn tightest(&self) -> Option<&CheckPart> {
        self.parts.iter().min_by(|a, b| a.slack().cmp(&b.slack()))
    }

    pub fn slack(&self) -> Rational {
        self.tightest().map(CheckPart::slack).unwrap_or_default()
    }
}

pub const CHECK_NAMES: [&str; 15] = [
    "a-matching-chain",
    "b-alg1-weight-vs-contraction",
    "c-alg1-edge-costs",
    "d-alg1-contracted-matching",
    "e-alg1-middle-bound",
    "f-alg2-weight-vs-contraction",
    "g-class-weight-relations",
    "h-half-matching-supersets",
    "i-alg2-edge-costs",
    "j-alg2-charging",
    "k-alg2-contracted-matching",
    "l-alg2-full-bound",
    "m-alg3-star-bound",
    "n-gamma-bounds",
    "o-best-of-three-ratio",
];

#[derive(Debug, Clone)]
pub struct LemmaReport {
    /// Set when the instance was not checked (zero optimum).
    pub skipped: Option<String>,
    pub checks: Vec<Check>,
    pub point: Option<LpPoint>,
    /// Constraints among C4..C55 that the instance's point violates.
    pub lp_violations: Vec<PointViolation>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::pass) && self.lp_violations.is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().filter(|c| !c.pass()).map(|c| c.name.clone()).collect();
        out.extend(self.lp_violations.iter().map(|v| format!("lp-point {}", v.tag)));
        out
    }

    pub fn to_json(&self, instance_id: &str) -> serde_json::Value {
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                let (lhs, rhs) = c
                    .tightest()
                    .map(|p| (rational::to_pq(&p.lhs), rational::to_pq(&p.rhs)))
                    .unwrap_or_else(|| ("0/1".into(), "0/1".into()));
                json!({"name": c.name, "lhs": lhs, "rhs": rhs, "pass": c.pass()})
            })
            .collect();
        let mut v = json!({"instance_id": instance_id, "checks": checks});
        if let Some(reason) = &self.skipped {
            v["skipped"] = json!(reason);
        }
        if !self.lp_violations.is_empty() {
            v["lp_violations"] = serde_json::to_value(&self.lp_violations).unwrap_or_default();
        }
        v
    }
}

/// Everything the suite consumes besides the instance.
#[derive(Debug, Clone)]
pub struct SuiteInputs {
    pub pstar: ThreePathPacking,
    pub opt: Rational,
    pub p1: ThreePathPacking,
    pub alg2: Alg2Trace,
    pub alg3: Alg3Trace,
}

/// Runs the oracle and the three algorithms.
pub fn gather_inputs(instance: &Instance, limits: &OracleLimits, choice: StarBackendChoice) -> Result<SuiteInputs> {
    let (pstar, opt) = opt_3pp(instance, limits)?;
    Ok(SuiteInputs {
        pstar,
        opt,
        p1: run_alg1(instance)?,
        alg2: run_alg2_traced(instance)?,
        alg3: run_alg3_traced(instance, choice)?,
    })
}

/// Quantities tied to the perfect matching of one even (sub)instance.
struct HalfSide {
    m_weight: Rational,
    contracted_best: Rational,
    cost_all: Rational,
    cost_e1: Rational,
    cost_e2: Rational,
    opt: Rational,
    max_sum: Rational,
}

fn half_side(g: &Instance, paths: &[[usize; 3]]) -> Result<HalfSide> {
    let n = g.n();
    let m = max_weight_matching_exact_size(&WeightedGraph::from_instance(g), n / 2)?.matching;
    let cc = ContractedCost::new(g, &m);
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for p in paths {
        let [a, b] = path_edges(p);
        match (m.contains(a.0, a.1), m.contains(b.0, b.1)) {
            (false, false) => e1.extend([a, b]),
            (true, false) => e2.push(b),
            (false, true) => e2.push(a),
            (true, true) => return Err(Error::Internal("both path edges in a matching".into())),
        }
    }
    let cost_e1 = cc.total(&e1)?;
    let cost_e2 = cc.total(&e2)?;
    Ok(HalfSide {
        m_weight: weight_of(g, &m)?,
        contracted_best: cc.best(&m, Some(n / 6))?,
        cost_all: &cost_e1 + &cost_e2,
        cost_e1,
        cost_e2,
        opt: paths.iter().map(|p| g.path_weight(p)).sum(),
        max_sum: paths.iter().map(|p| g.path_max_edge(p)).sum(),
    })
}

/// Evaluates checks (a)-(o) and the LP point. For odd `n`, checks (b)-(e)
/// are evaluated on `G - p` for every path `p` of the optimum, with `w(p)`
/// added to the right-hand sides that bound `w(P1)`.
pub fn check_lemma_suite(instance: &Instance, inputs: &SuiteInputs) -> Result<LemmaReport> {
    let n = instance.n();
    if inputs.opt.is_zero() {
        return Ok(LemmaReport {
            skipped: Some("optimum is zero".into()),
            checks: Vec::new(),
            point: None,
            lp_violations: Vec::new(),
        });
    }
    for (label, packing) in [
        ("optimum", &inputs.pstar),
        ("first algorithm", &inputs.p1),
        ("second algorithm", &inputs.alg2.packing),
        ("third algorithm", &inputs.alg3.packing),
    ] {
        if let Some(v) = validate_packing(instance, packing).first() {
            return Err(Error::InvalidSolution(format!("{label} packing: {v}")));
        }
    }
    if weight_of(instance, &inputs.pstar)? != inputs.opt {
        return Err(Error::InvalidSolution("optimum weight does not match its packing".into()));
    }
    let m_third = &inputs.alg2.m_star;
    if inputs.alg3.m_star != *m_third {
        return Err(Error::Internal("second and third algorithms used different matchings".into()));
    }
    let opt = &inputs.opt;
    let wp1 = weight_of(instance, &inputs.p1)?;
    let wp2 = weight_of(instance, &inputs.alg2.packing)?;
    let wp3 = weight_of(instance, &inputs.alg3.packing)?;
    let m_half = max_weight_matching_exact_size(&WeightedGraph::from_instance(instance), n / 2)?.matching;
    let w_half = weight_of(instance, &m_half)?;
    let w_third = weight_of(instance, m_third)?;
    if w_third != max_weight_matching_exact_size(&WeightedGraph::from_instance(instance), n / 3)?.total_cost {
        return Err(Error::Internal("size-n/3 matching is not maximum".into()));
    }
    let pstar = normalize_pstar(instance, &inputs.pstar, m_third)?;
    let d = decompose(instance, &pstar, m_third)?;
    let max_sum: Rational = pstar.paths.iter().map(|p| instance.path_max_edge(p)).sum();
    let q = |a: i64, b: i64| ratio(a, b);

    let mut checks = Vec::with_capacity(15);
    checks.push(Check::new(
        CHECK_NAMES[0],
        vec![
            CheckPart::ge("w(M_half) >= w(M_third)", w_half.clone(), w_third.clone()),
            CheckPart::ge("w(M_third) >= sum max", w_third.clone(), max_sum.clone()),
            CheckPart::ge("sum max >= OPT/2", max_sum.clone(), opt * q(1, 2)),
        ],
    ));

    // (b)-(e): on G itself for even n, on G - p otherwise.
    let mut parts_b = Vec::new();
    let mut parts_c = Vec::new();
    let mut parts_d = Vec::new();
    let mut parts_e = Vec::new();
    let cases: Vec<(Rational, Instance, Vec<[usize; 3]>, String)> = if n % 2 == 0 {
        vec![(Rational::zero(), instance.clone(), pstar.paths.clone(), String::new())]
    } else {
        pstar
            .paths
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let rest: Vec<usize> = (0..n).filter(|v| !p.contains(v)).collect();
                let index = |v: usize| rest.binary_search(&v).expect("vertex outside the removed path");
                let paths = pstar
                    .paths
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, r)| r.map(index))
                    .collect();
                (instance.path_weight(p), instance.induced(&rest), paths, format!(" [without {p:?}]"))
            })
            .collect()
    };
    for (fixed, g, paths, tag) in &cases {
        let h = half_side(g, paths)?;
        parts_b.push(CheckPart::ge(
            format!("w(P1) >= w(M_half) + c(M**){tag}"),
            wp1.clone(),
            fixed + &h.m_weight + &h.contracted_best,
        ));
        parts_c.push(CheckPart::ge(
            format!("c(E(P*) - M_half) >= OPT - 4/3 w(M_half){tag}"),
            h.cost_all.clone(),
            &h.opt - q(4, 3) * &h.m_weight,
        ));
        parts_d.push(CheckPart::ge(
            format!("c(M**) >= 1/4 c(E1) + 1/2 c(E2){tag}"),
            h.contracted_best.clone(),
            q(1, 4) * &h.cost_e1 + q(1, 2) * &h.cost_e2,
        ));
        parts_e.push(CheckPart::ge(
            format!("w(P1) >= 2/3 w(M_half) + OPT/2 - 1/2 sum max{tag}"),
            wp1.clone(),
            fixed + q(2, 3) * &h.m_weight + q(1, 2) * &h.opt - q(1, 2) * &h.max_sum,
        ));
    }
    checks.push(Check::new(CHECK_NAMES[1], parts_b));
    checks.push(Check::new(CHECK_NAMES[2], parts_c));
    checks.push(Check::new(CHECK_NAMES[3], parts_d));
    checks.push(Check::new(CHECK_NAMES[4], parts_e));

    let cc = ContractedCost::new(instance, m_third);
    let c_free = cc.best(m_third, None)?;
    checks.push(Check::new(
        CHECK_NAMES[5],
        vec![CheckPart::ge("w(P2) >= w(M_third) + c(M**)", wp2.clone(), &w_third + &c_free)],
    ));

    let wx = |i: usize| w_sum(instance, &d.x[i - 1]);
    let wy = |i: usize| w_sum(instance, &d.y[i - 1]);
    let wm = |j: usize| w_sum(instance, &d.m_parts[j - 1]);
    let wm1 = |j: usize| w_sum(instance, &d.m1_parts[j]);
    let wc = |i: usize| d.class_weight(instance, i);
    let gm = |i: usize| d.class_max_sum(instance, i);

    let mut g_parts: Vec<CheckPart> = [1, 3, 4, 8]
        .into_iter()
        .map(|i| CheckPart::ge(format!("w(X{i}) >= w(Y{i})"), wx(i), wy(i)))
        .collect();
    g_parts.push(CheckPart::eq("w(M3) = w(Y7)", wm(3), wy(7)));
    g_parts.push(CheckPart::eq("w(M4) = w(Y5)", wm(4), wy(5)));
    g_parts.push(CheckPart::ge("w(Y5) >= w(X5)", wy(5), wx(5)));
    checks.push(Check::new(CHECK_NAMES[6], g_parts));

    checks.push(Check::new(
        CHECK_NAMES[7],
        vec![
            CheckPart::ge("w(M_half) >= w(M_third) + w(X1) + w(Y2)", w_half.clone(), &w_third + wx(1) + wy(2)),
            CheckPart::ge(
                "w(M_half) >= w(M_third) - w(M1) - w(M2) + w(X1) + max2 + w(X3) + w(X4) + w(X6)",
                w_half.clone(),
                &w_third - wm(1) - wm(2) + wx(1) + gm(2) + wx(3) + wx(4) + wx(6),
            ),
            CheckPart::ge(
                "w(M_half) >= w(M_third) - w(M1) + w(X1) + w(Y2) + w(X6)",
                w_half.clone(),
                &w_third - wm(1) + wx(1) + wy(2) + wx(6),
            ),
            CheckPart::ge(
                "w(M_half) >= w(M_third) - w(M1''') - w(M2) + w(X1) + max2 + w(X3) + w(X4)",
                w_half.clone(),
                &w_third - wm1(2) - wm(2) + wx(1) + gm(2) + wx(3) + wx(4),
            ),
        ],
    ));

    let c_e1 = cc.total(&d.e1)?;
    let c_e2 = cc.total(&d.e2)?;
    let c_e3 = cc.total(&d.e3)?;
    checks.push(Check::new(
        CHECK_NAMES[8],
        vec![
            CheckPart::ge(
                "c(E2) >= w(X2) + w(X3) + w(X4) + w(X7) - w(Y7)",
                c_e2.clone(),
                wx(2) + wx(3) + wx(4) + wx(7) - wy(7),
            ),
            CheckPart::eq("c(E3) = w(X5)", c_e3.clone(), wx(5)),
        ],
    ));
    checks.push(Check::new(
        CHECK_NAMES[9],
        vec![CheckPart::ge(
            "c(E1) + c(E2) + c(E3) >= charging bound",
            &c_e1 + &c_e2 + &c_e3,
            wc(6) + wc(8) + wx(2) + wx(3) + wx(4) + wx(5) + wx(7) - q(4, 3) * &w_third
                + q(1, 3) * wm1(0)
                + q(2, 3) * wm1(1)
                + wm1(2)
                + q(2, 3) * wm(2)
                + wm(3)
                + q(4, 3) * wm(4),
        )],
    ));
    checks.push(Check::new(
        CHECK_NAMES[10],
        vec![CheckPart::ge(
            "c(M**) >= 1/4 c(E1) + 1/2 c(E2) + c(E3)",
            c_free.clone(),
            q(1, 4) * &c_e1 + q(1, 2) * &c_e2 + &c_e3,
        )],
    ));
    checks.push(Check::new(
        CHECK_NAMES[11],
        vec![CheckPart::ge(
            "w(P2) >= full bound",
            wp2.clone(),
            q(2, 3) * &w_third
                + q(1, 12) * wm1(0)
                + q(1, 6) * wm1(1)
                + q(1, 4) * wm1(2)
                + q(1, 6) * wm(2)
                + q(1, 4) * wm(3)
                + q(1, 3) * wm(4)
                + q(1, 2) * (wx(2) + wx(3) + wx(4))
                + wx(5)
                + q(1, 2) * wx(7)
                - q(1, 4) * wy(7)
                + q(1, 4) * (wc(6) + wc(8)),
        )],
    ));
    checks.push(Check::new(
        CHECK_NAMES[12],
        vec![CheckPart::ge(
            "w(P3) >= 4/9 (2 w(Y5) + 2 w(Y6) + w(P7) + w(P8) + max7 + max8)",
            wp3.clone(),
            q(4, 9) * (int(2) * wy(5) + int(2) * wy(6) + wc(7) + wc(8) + gm(7) + gm(8)),
        )],
    ));
    let mut n_parts = vec![CheckPart::ge(
        "w(M_third) >= sum of class max sums",
        w_third.clone(),
        (1..=8).map(gm).sum(),
    )];
    for i in 1..=8 {
        n_parts.push(CheckPart::ge(format!("max{i} >= w(X{i})"), gm(i), wx(i)));
        n_parts.push(CheckPart::ge(format!("max{i} >= w(Y{i})"), gm(i), wy(i)));
    }
    checks.push(Check::new(CHECK_NAMES[13], n_parts));
    let best = rational::max(&rational::max(&wp1, &wp2), &wp3);
    checks.push(Check::new(
        CHECK_NAMES[14],
        vec![CheckPart::ge("best of three >= 10/17 OPT", best, q(10, 17) * opt)],
    ));

    let point = lp_point(instance, &d, m_third, &m_half, opt)?;
    let lp_violations = check_point_feasible(&point);
    Ok(LemmaReport {
        skipped: None,
        checks,
        point: Some(point),
        lp_violations,
    })
}

/// Gathers the inputs and runs the suite.
pub fn analyze(instance: &Instance, limits: &OracleLimits, choice: StarBackendChoice) -> Result<LemmaReport> {
    let inputs = gather_inputs(instance, limits, choice)?;
    check_lemma_suite(instance, &inputs)
}

/// Whether any edge weight is negative (the analysis assumes none).
pub fn has_negative_weight(instance: &Instance) -> bool {
    (0..instance.n()).any(|u| (u + 1..instance.n()).any(|v| instance.weight(u, v).is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample_pstar() -> ThreePathPacking {
        ThreePathPacking::new(vec![[4, 0, 1], [5, 2, 3]])
    }

    fn ab_cd() -> Matching {
        Matching::new([(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn counterexample_decomposition() {
        let inst = Instance::counterexample();
        let m = ab_cd();
        let p = normalize_pstar(&inst, &counterexample_pstar(), &m).unwrap();
        assert_eq!(p, counterexample_pstar());
        let d = decompose(&inst, &p, &m).unwrap();
        assert_eq!(d.class_of_path, vec![5, 5]);
        assert_eq!(d.x[4], vec![(0, 4), (2, 5)]);
        assert_eq!(d.y[4], vec![(0, 1), (2, 3)]);
        assert_eq!(d.m_parts[3], vec![(0, 1), (2, 3)]);
        for j in [0, 1, 2, 4] {
            assert!(d.m_parts[j].is_empty());
        }
        assert!(d.invariant_violations(&m).is_empty());
        let half = Matching::new([(0, 1), (2, 3), (4, 5)]).unwrap();
        let pt = lp_point(&inst, &d, &m, &half, &int(2)).unwrap();
        assert_eq!(pt.xi[4], int(1));
        assert_eq!(pt.beta[4], int(1));
        assert_eq!(pt.alpha[4], int(0));
        assert_eq!(pt.gamma[4], int(1));
        assert_eq!(pt.delta, ratio(3, 2));
        assert_eq!(pt.pi, int(1));
        assert_eq!(pt.tau[3], int(1));
        assert_eq!(pt.xi.iter().filter(|v| !v.is_zero()).count(), 1);
        assert!(check_point_feasible(&pt).is_empty());
    }

    #[test]
    fn normalization_rewrites_violating_path() {
        // x=0, y=4, z=1 with 01 matched and w(01) = w(04), so both forms weigh 5.
        let inst = Instance::from_edges(
            6,
            &[(0, 1, int(3)), (0, 4, int(3)), (4, 1, int(2)), (2, 3, int(5)), (2, 5, int(1))],
        )
        .unwrap();
        let m = ab_cd();
        let pstar = ThreePathPacking::new(vec![[0, 4, 1], [5, 2, 3]]);
        let p = normalize_pstar(&inst, &pstar, &m).unwrap();
        assert_eq!(p.paths[0], [0, 1, 4]);
        assert_eq!(p.paths[1], [5, 2, 3]);
        assert_eq!(weight_of(&inst, &p).unwrap(), weight_of(&inst, &pstar).unwrap());
    }

    #[test]
    fn normalization_detects_suboptimal_input() {
        let inst = Instance::from_edges(6, &[(0, 1, int(1)), (0, 4, int(3)), (4, 1, int(2))]).unwrap();
        let m = ab_cd();
        let pstar = ThreePathPacking::new(vec![[0, 4, 1], [5, 2, 3]]);
        assert!(normalize_pstar(&inst, &pstar, &m).is_err());
    }

    #[test]
    fn disjoint_optimum_is_class_one() {
        let inst = Instance::from_fn(9, |u, v| int((u * v % 7) as i64)).unwrap();
        let m = Matching::new([(0, 1)]).unwrap();
        let pstar = ThreePathPacking::new(vec![[2, 3, 4], [5, 6, 7], [0, 8, 1]]);
        let p = normalize_pstar(&inst, &pstar, &m).unwrap();
        let d = decompose(&inst, &p, &m).unwrap();
        assert_eq!(&d.class_of_path[..2], &[1, 1]);
    }

    #[test]
    fn symmetric_class_one_point() {
        let inst = Instance::from_edges(6, &[(0, 1, int(1)), (1, 2, int(1)), (3, 4, int(1)), (4, 5, int(1))]).unwrap();
        let m = Matching::empty();
        let pstar = ThreePathPacking::new(vec![[0, 1, 2], [3, 4, 5]]);
        let d = decompose(&inst, &pstar, &m).unwrap();
        let half = Matching::new([(0, 1), (2, 3), (4, 5)]).unwrap();
        let pt = lp_point(&inst, &d, &m, &half, &int(4)).unwrap();
        assert_eq!(pt.xi[0], int(1));
        assert_eq!(pt.alpha[0], ratio(1, 2));
        assert_eq!(pt.beta[0], ratio(1, 2));
    }

    #[test]
    fn counterexample_suite() {
        let r = analyze(&Instance::counterexample(), &OracleLimits::default(), StarBackendChoice::exact()).unwrap();
        assert_eq!(r.checks.len(), 15);
        for c in &r.checks {
            assert!(c.pass(), "{} failed: {:?}", c.name, c.tightest());
        }
        assert!(r.lp_violations.is_empty());
        assert_eq!(r.checks[14].slack(), ratio(14, 17));
        let j = r.to_json("counterexample");
        assert_eq!(j["checks"].as_array().unwrap().len(), 15);
        assert_eq!(j["checks"][14]["lhs"], "2/1");
        assert_eq!(j["checks"][14]["rhs"], "20/17");
    }

    #[test]
    fn zero_instance_skipped() {
        let inst = Instance::from_fn(6, |_, _| int(0)).unwrap();
        let r = analyze(&inst, &OracleLimits::default(), StarBackendChoice::exact()).unwrap();
        assert!(r.skipped.is_some());
        assert!(r.checks.is_empty());
    }

    #[test]
    fn odd_instance_suite() {
        let inst = Instance::from_fn(9, |u, v| int(((u * 7 + v * 3) * (u + v) % 11) as i64)).unwrap();
        let r = analyze(&inst, &OracleLimits::default(), StarBackendChoice::exact()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
        // one part per removed path
        assert_eq!(r.checks[1].parts.len(), 3);
    }

    #[test]
    fn corrupted_first_packing_fails_b() {
        let inst = Instance::counterexample();
        let mut inputs = gather_inputs(&inst, &OracleLimits::default(), StarBackendChoice::exact()).unwrap();
        inputs.p1 = ThreePathPacking::new(vec![[0, 2, 4], [1, 3, 5]]);
        let r = check_lemma_suite(&inst, &inputs).unwrap();
        assert!(!r.checks[1].pass());
        assert!(!r.all_pass());
        assert!(r.failures().contains(&CHECK_NAMES[1].to_string()));
    }

    #[test]
    fn part_slack() {
        let p = CheckPart::eq("x", int(1), int(3));
        assert!(!p.pass());
        assert_eq!(p.slack(), int(-2));
        let c = Check::new("c", vec![CheckPart::ge("a", int(5), int(1)), CheckPart::ge("b", int(2), int(1))]);
        assert_eq!(c.tightest().unwrap().label, "b");
    }
}
