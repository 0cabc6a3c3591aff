//! Seeded instance generators and the batch runner behind `bench`.

use std::path::PathBuf;
use std::time::Instant;

use num_integer::Roots;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::alg1::run_alg1;
use crate::alg2::run_alg2;
use crate::alg3::run_alg3;
use crate::analysis::{check_lemma_suite, gather_inputs};
use crate::error::{Error, Result};
use crate::instance::{validate_packing, weight_of, Instance, ThreePathPacking};
use crate::io::load_instance;
use crate::oracle::{opt_3pp, OracleLimits};
use crate::rational::{self, int, ratio, Rational};
use crate::stars::StarBackendChoice;

pub const DEFAULT_WEIGHT_BOUND: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Integer weights drawn uniformly from `[0, weight_bound]`.
    UniformInt,
    ZeroOne,
    /// Rounded-up Euclidean distances between points of the grid
    /// `[0, weight_bound]^2`.
    Metric,
    Counterexample,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub weight_bound: u64,
    pub seed: u64,
}

fn ceil_sqrt(v: u64) -> u64 {
    let r = v.sqrt();
    if r * r == v {
        r
    } else {
        r + 1
    }
}

/// Whether `w(u,w) <= w(u,v) + w(v,w)` for all triples.
pub fn satisfies_triangle_inequality(instance: &Instance) -> bool {
    let n = instance.n();
    (0..n).all(|a| {
        (0..n).all(|b| (0..n).all(|c| instance.weight(a, c) <= &(instance.weight(a, b) + instance.weight(b, c))))
    })
}

impl GeneratorSpec {
    /// Instance number `index` of the batch, drawn from a generator seeded
    /// with `seed + index`.
    pub fn generate(&self, index: u64) -> Result<Instance> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index));
        let n = self.n;
        match &self.kind {
            GeneratorKind::UniformInt => {
                let mut rows = vec![vec![Rational::zero(); n]; n];
                for u in 0..n {
                    for v in (u + 1)..n {
                        let w = int(rng.gen_range(0..=self.weight_bound) as i64);
                        rows[u][v] = w.clone();
                        rows[v][u] = w;
                    }
                }
                Instance::new(rows)
            }
            GeneratorKind::ZeroOne => {
                let mut rows = vec![vec![Rational::zero(); n]; n];
                for u in 0..n {
                    for v in (u + 1)..n {
                        let w = int(i64::from(rng.gen_bool(0.5)));
                        rows[u][v] = w.clone();
                        rows[v][u] = w;
                    }
                }
                Instance::new(rows)
            }
            GeneratorKind::Metric => {
                let pts: Vec<(u64, u64)> = (0..n)
                    .map(|_| (rng.gen_range(0..=self.weight_bound), rng.gen_range(0..=self.weight_bound)))
                    .collect();
                let inst = Instance::from_fn(n, |u, v| {
                    let dx = pts[u].0.abs_diff(pts[v].0);
                    let dy = pts[u].1.abs_diff(pts[v].1);
                    int(ceil_sqrt(dx * dx + dy * dy) as i64)
                })?;
                if !satisfies_triangle_inequality(&inst) {
                    return Err(Error::Internal("metric generator broke the triangle inequality".into()));
                }
                Ok(inst)
            }
            GeneratorKind::Counterexample => Ok(Instance::counterexample()),
            GeneratorKind::File(path) => load_instance(path),
        }
    }
}

/// Outputs of the three algorithms; `best` is the first index of maximum
/// weight, so ties favour the lower-numbered algorithm.
#[derive(Debug, Clone)]
pub struct BestOfThree {
    pub packings: [ThreePathPacking; 3],
    pub weights: [Rational; 3],
    pub best: usize,
}

impl BestOfThree {
    fn from_packings(instance: &Instance, packings: [ThreePathPacking; 3]) -> Result<Self> {
        for (k, p) in packings.iter().enumerate() {
            if let Some(v) = validate_packing(instance, p).first() {
                return Err(Error::Internal(format!("algorithm {} returned an invalid packing: {v}", k + 1)));
            }
        }
        let weights = [
            weight_of(instance, &packings[0])?,
            weight_of(instance, &packings[1])?,
            weight_of(instance, &packings[2])?,
        ];
        let mut best = 0;
        for k in 1..3 {
            if weights[k] > weights[best] {
                best = k;
            }
        }
        Ok(Self { packings, weights, best })
    }

    pub fn best_packing(&self) -> &ThreePathPacking {
        &self.packings[self.best]
    }

    pub fn best_weight(&self) -> &Rational {
        &self.weights[self.best]
    }
}

pub fn best_of_three(instance: &Instance, choice: StarBackendChoice) -> Result<BestOfThree> {
    let packings = [run_alg1(instance)?, run_alg2(instance)?, run_alg3(instance, choice)?];
    BestOfThree::from_packings(instance, packings)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BenchOptions {
    pub count: u64,
    pub with_oracle: bool,
    pub with_lemmas: bool,
    /// Star backend; `None` picks by host size.
    pub star_backend: Option<StarBackendChoice>,
    /// Record wall-clock milliseconds; otherwise the column holds 0 so that
    /// reruns produce identical output.
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance_id: u64,
    pub seed: u64,
    pub n: usize,
    pub weights: [Rational; 3],
    pub best: Rational,
    pub opt: Option<Rational>,
    pub lemma_failures: Option<usize>,
    /// Names of failed checks.
    pub failed_checks: Vec<String>,
    pub millis: u128,
}

impl BenchRecord {
    /// `best / OPT`, absent without an oracle or when `OPT = 0`.
    pub fn ratio(&self) -> Option<Rational> {
        self.opt.as_ref().filter(|o| !o.is_zero()).map(|o| &self.best / o)
    }

    /// Whether the best weight reaches `10/17` of the optimum.
    pub fn meets_floor(&self) -> bool {
        self.opt.as_ref().map_or(true, |o| self.best >= ratio(10, 17) * o)
    }
}

/// Runs one generated instance.
pub fn run_one(spec: &GeneratorSpec, index: u64, opts: &BenchOptions, limits: &OracleLimits) -> Result<BenchRecord> {
    let instance = spec.generate(index)?;
    let start = Instant::now();
    let choice = opts
        .star_backend
        .unwrap_or_else(|| StarBackendChoice::for_size(2 * instance.n() / 3));
    let mut record = BenchRecord {
        instance_id: index,
        seed: spec.seed.wrapping_add(index),
        n: instance.n(),
        weights: [int(0), int(0), int(0)],
        best: int(0),
        opt: None,
        lemma_failures: None,
        failed_checks: Vec::new(),
        millis: 0,
    };
    if opts.with_lemmas {
        let inputs = gather_inputs(&instance, limits, choice)?;
        let packings = [inputs.p1.clone(), inputs.alg2.packing.clone(), inputs.alg3.packing.clone()];
        let b3 = BestOfThree::from_packings(&instance, packings)?;
        let report = check_lemma_suite(&instance, &inputs)?;
        record.failed_checks = report.failures();
        record.lemma_failures = Some(record.failed_checks.len());
        record.best = b3.best_weight().clone();
        record.weights = b3.weights;
        record.opt = Some(inputs.opt);
    } else {
        let b3 = best_of_three(&instance, choice)?;
        record.best = b3.best_weight().clone();
        record.weights = b3.weights;
        if opts.with_oracle {
            record.opt = Some(opt_3pp(&instance, limits)?.1);
        }
    }
    if opts.timing {
        record.millis = start.elapsed().as_millis();
    }
    Ok(record)
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<BenchRecord>,
}

pub const CSV_HEADER: [&str; 12] = [
    "instance_id",
    "seed",
    "n",
    "w_p1",
    "w_p2",
    "w_p3",
    "w_best",
    "opt",
    "ratio_num",
    "ratio_den",
    "lemma_failures",
    "millis",
];

/// Runs `opts.count` instances in parallel; records stay in id order.
pub fn run_bench(spec: &GeneratorSpec, opts: &BenchOptions, limits: &OracleLimits) -> Result<RunReport> {
    let records = (0..opts.count)
        .into_par_iter()
        .map(|i| run_one(spec, i, opts, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport { records })
}

impl RunReport {
    pub fn min_ratio(&self) -> Option<Rational> {
        self.records.iter().filter_map(BenchRecord::ratio).min()
    }

    pub fn mean_ratio(&self) -> Option<Rational> {
        let ratios: Vec<Rational> = self.records.iter().filter_map(BenchRecord::ratio).collect();
        if ratios.is_empty() {
            return None;
        }
        let k = int(ratios.len() as i64);
        Some(ratios.into_iter().sum::<Rational>() / k)
    }

    pub fn lemma_failures(&self) -> usize {
        self.records.iter().filter_map(|r| r.lemma_failures).sum()
    }

    pub fn floor_violations(&self) -> usize {
        self.records.iter().filter(|r| !r.meets_floor()).count()
    }

    /// No lemma failures and no ratio below the floor.
    pub fn ok(&self) -> bool {
        self.lemma_failures() == 0 && self.floor_violations() == 0
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Internal(format!("CSV output: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.records {
            let (num, den) = r
                .ratio()
                .map(|q| (q.numer().to_string(), q.denom().to_string()))
                .unwrap_or_default();
            w.write_record([
                r.instance_id.to_string(),
                r.seed.to_string(),
                r.n.to_string(),
                rational::to_compact(&r.weights[0]),
                rational::to_compact(&r.weights[1]),
                rational::to_compact(&r.weights[2]),
                rational::to_compact(&r.best),
                r.opt.as_ref().map(rational::to_compact).unwrap_or_default(),
                num,
                den,
                r.lemma_failures.map(|k| k.to_string()).unwrap_or_default(),
                r.millis.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("CSV output: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pq = |q: &Rational| rational::to_pq(q);
        let records: Vec<_> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "instance_id": r.instance_id,
                    "seed": r.seed,
                    "n": r.n,
                    "w_p1": pq(&r.weights[0]),
                    "w_p2": pq(&r.weights[1]),
                    "w_p3": pq(&r.weights[2]),
                    "w_best": pq(&r.best),
                    "opt": r.opt.as_ref().map(pq),
                    "ratio": r.ratio().as_ref().map(pq),
                    "lemma_failures": r.lemma_failures,
                    "failed_checks": r.failed_checks,
                    "millis": r.millis as u64,
                })
            })
            .collect();
        json!({
            "records": records,
            "summary": {
                "count": self.records.len(),
                "min_ratio": self.min_ratio().as_ref().map(pq),
                "mean_ratio": self.mean_ratio().as_ref().map(pq),
                "lemma_failures": self.lemma_failures(),
                "floor_violations": self.floor_violations(),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GeneratorKind, n: usize) -> GeneratorSpec {
        GeneratorSpec {
            kind,
            n,
            weight_bound: DEFAULT_WEIGHT_BOUND,
            seed: 42,
        }
    }

    #[test]
    fn seeded_generation_repeats() {
        let s = spec(GeneratorKind::UniformInt, 9);
        assert_eq!(s.generate(3).unwrap(), s.generate(3).unwrap());
        assert_ne!(s.generate(3).unwrap(), s.generate(4).unwrap());
    }

    #[test]
    fn zero_one_weights() {
        let inst = spec(GeneratorKind::ZeroOne, 12).generate(0).unwrap();
        for u in 0..12 {
            for v in 0..12 {
                let w = inst.weight(u, v);
                assert!(*w == int(0) || *w == int(1));
            }
        }
    }

    #[test]
    fn metric_weights() {
        for i in 0..5 {
            let inst = spec(GeneratorKind::Metric, 9).generate(i).unwrap();
            assert!(satisfies_triangle_inequality(&inst));
        }
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(17), 5);
        assert_eq!(ceil_sqrt(0), 0);
    }

    #[test]
    fn counterexample_best_of_three() {
        let b = best_of_three(&Instance::counterexample(), StarBackendChoice::exact()).unwrap();
        assert_eq!(b.weights, [int(2), int(2), int(2)]);
        assert_eq!(b.best, 0);
    }

    #[test]
    fn ties_prefer_lower_algorithm() {
        let inst = Instance::counterexample();
        let p = ThreePathPacking::new(vec![[4, 0, 1], [5, 2, 3]]);
        let q = ThreePathPacking::new(vec![[0, 2, 4], [1, 3, 5]]);
        let b = BestOfThree::from_packings(&inst, [q.clone(), p.clone(), p]).unwrap();
        assert_eq!(b.best, 1);
    }

    #[test]
    fn bench_is_reproducible() {
        let s = spec(GeneratorKind::UniformInt, 6);
        let opts = BenchOptions {
            count: 8,
            with_oracle: true,
            with_lemmas: true,
            ..Default::default()
        };
        let a = run_bench(&s, &opts, &OracleLimits::default()).unwrap();
        let b = run_bench(&s, &opts, &OracleLimits::default()).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert!(a.ok());
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn empty_bench() {
        let r = run_bench(
            &spec(GeneratorKind::UniformInt, 6),
            &BenchOptions::default(),
            &OracleLimits::default(),
        )
        .unwrap();
        assert!(r.records.is_empty());
        assert!(r.ok());
        assert_eq!(r.min_ratio(), None);
    }
}
