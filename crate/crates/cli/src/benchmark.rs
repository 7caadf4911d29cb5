//! Batches of seeded random instances solved and audited against the oracle.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use bloch_tsp_core::noise::mix_seed;
use bloch_tsp_core::optimizer::{solve_instance, Hyper};
use bloch_tsp_core::tsp::{exact_solve, random_instance, CostMatrix};
use bloch_tsp_core::Error as CoreError;

use crate::error::Result;
use crate::io::{instance_seed, to_csv, to_json, Artifacts};
use crate::timing::Timing;

/// Largest city count accepted by batch commands.
pub const MAX_BATCH_N: usize = 9;
/// Ratio counted as solving an instance exactly.
pub const SOLVED_RATIO: f64 = 0.99;
/// Ratio counted as a high-quality approximation.
pub const HIGH_RATIO: f64 = 0.9;
pub const HISTOGRAM_BINS: usize = 20;
/// Relative slack when comparing an obtained cost with the optimum.
const OPTIMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkConfig {
    pub sizes: Vec<usize>,
    /// Symmetry flag of each bucket family, run in this order.
    pub kinds: Vec<bool>,
    pub instances: usize,
    pub master_seed: u64,
    pub hyper: Hyper,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        validate_sizes(&self.sizes)?;
        if self.instances == 0 || self.kinds.is_empty() {
            return Err(CoreError::Precondition("empty benchmark".into()).into());
        }
        self.hyper.validate()?;
        Ok(())
    }
}

pub(crate) fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(CoreError::Precondition("no instance sizes given".into()).into());
    }
    for &n in sizes {
        if n > MAX_BATCH_N {
            return Err(CoreError::SizeLimit {
                operation: "batch experiments",
                n,
                limit: MAX_BATCH_N,
            }
            .into());
        }
        if n < 3 {
            return Err(CoreError::Precondition(format!("need at least 3 cities, got {n}")).into());
        }
    }
    Ok(())
}

/// Outcome of one solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solved {
    pub d_min: Option<f64>,
    pub d_ob: Option<f64>,
    pub r: Option<f64>,
    pub optimal: bool,
    pub tour: Option<String>,
    pub failed: bool,
    pub error: Option<String>,
}

impl Solved {
    pub(crate) fn run(m: &CostMatrix, hyper: &Hyper) -> Self {
        let d_min = exact_solve(m, hyper.oracle).ok().map(|o| o.d_min);
        match solve_instance(m, hyper) {
            Ok(out) => Self {
                d_min: Some(out.d_min),
                d_ob: Some(out.d_ob),
                r: Some(out.r),
                optimal: out.d_ob <= out.d_min * (1.0 + OPTIMAL_TOL),
                tour: Some(out.best_tour.to_string()),
                failed: false,
                error: None,
            },
            Err(e) => Self {
                d_min,
                d_ob: None,
                r: None,
                optimal: false,
                tour: None,
                failed: true,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub symmetric: bool,
    pub index: usize,
    pub seed: u64,
    pub d_min: Option<f64>,
    pub d_ob: Option<f64>,
    pub r: Option<f64>,
    /// `d_ob` equals `d_min` up to rounding.
    pub optimal: bool,
    pub tour: Option<String>,
    pub iterations: usize,
    pub failed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketSummary {
    pub n: usize,
    pub symmetric: bool,
    pub instances: usize,
    pub failed: usize,
    /// Rows with `r >= SOLVED_RATIO`.
    pub solved_exactly: usize,
    /// Rows whose cost equals the optimum.
    pub solved_strict: usize,
    pub fraction_solved: f64,
    pub fraction_high: f64,
    pub mean_error: f64,
    pub max_error: f64,
    pub min_r: f64,
    /// Indices of rows below `SOLVED_RATIO`, failures included.
    pub unsolved: Vec<usize>,
}

impl BucketSummary {
    fn from_rows(n: usize, symmetric: bool, rows: &[&BenchmarkRow]) -> Self {
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.r).collect();
        let count = rows.len();
        let solved = ratios.iter().filter(|&&r| r >= SOLVED_RATIO).count();
        let high = ratios.iter().filter(|&&r| r >= HIGH_RATIO).count();
        let errors: Vec<f64> = ratios.iter().map(|r| 1.0 - r).collect();
        Self {
            n,
            symmetric,
            instances: count,
            failed: rows.iter().filter(|r| r.failed).count(),
            solved_exactly: solved,
            solved_strict: rows.iter().filter(|r| r.optimal).count(),
            fraction_solved: solved as f64 / count as f64,
            fraction_high: high as f64 / count as f64,
            mean_error: mean(&errors),
            max_error: errors.iter().copied().fold(0.0, f64::max),
            min_r: ratios.iter().copied().fold(1.0, f64::min),
            unsolved: rows
                .iter()
                .filter(|r| r.r.is_none_or(|x| x < SOLVED_RATIO))
                .map(|r| r.index)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub n: usize,
    pub symmetric: bool,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Counts of `values` in equal bins over `[0, 1]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &v in values {
        let k = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub buckets: Vec<BucketSummary>,
    pub rows: Vec<BenchmarkRow>,
    pub histogram: Vec<HistogramBin>,
}

impl BenchmarkReport {
    pub fn bucket(&self, n: usize, symmetric: bool) -> Option<&BucketSummary> {
        self.buckets
            .iter()
            .find(|b| b.n == n && b.symmetric == symmetric)
    }

    pub fn artifacts(&self) -> Result<Artifacts> {
        let mut a = Artifacts::default();
        a.add("benchmark.json", to_json(self));
        a.add("benchmark_rows.csv", to_csv(&self.rows)?);
        a.add("benchmark_buckets.csv", to_csv(&self.bucket_rows())?);
        a.add("histogram.csv", to_csv(&self.histogram)?);
        Ok(a)
    }

    fn bucket_rows(&self) -> Vec<BucketRow> {
        self.buckets
            .iter()
            .map(|b| BucketRow {
                n: b.n,
                symmetric: b.symmetric,
                instances: b.instances,
                failed: b.failed,
                solved_exactly: b.solved_exactly,
                solved_strict: b.solved_strict,
                fraction_solved: b.fraction_solved,
                fraction_high: b.fraction_high,
                mean_error: b.mean_error,
                max_error: b.max_error,
                min_r: b.min_r,
            })
            .collect()
    }
}

/// Flat bucket summary for CSV output.
#[derive(Debug, Serialize)]
struct BucketRow {
    n: usize,
    symmetric: bool,
    instances: usize,
    failed: usize,
    solved_exactly: usize,
    solved_strict: usize,
    fraction_solved: f64,
    fraction_high: f64,
    mean_error: f64,
    max_error: f64,
    min_r: f64,
}

/// Solver settings for one instance of a batch.
pub(crate) fn row_hyper(base: &Hyper, seed: u64) -> Hyper {
    Hyper {
        seed: mix_seed(base.seed, seed),
        ..base.clone()
    }
}

pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<(BenchmarkReport, Timing)> {
    cfg.validate()?;
    let mut timing = Timing::start("benchmark");
    let mut rows = Vec::new();
    let mut buckets = Vec::new();
    let mut hist = Vec::new();
    for &symmetric in &cfg.kinds {
        for &n in &cfg.sizes {
            let t0 = Instant::now();
            let bucket: Vec<BenchmarkRow> = (0..cfg.instances)
                .into_par_iter()
                .map(|index| {
                    let seed = instance_seed(cfg.master_seed, n, symmetric, index);
                    let solved = match random_instance(n, symmetric, seed) {
                        Ok(m) => Solved::run(&m, &row_hyper(&cfg.hyper, seed)),
                        Err(e) => Solved {
                            d_min: None,
                            d_ob: None,
                            r: None,
                            optimal: false,
                            tour: None,
                            failed: true,
                            error: Some(e.to_string()),
                        },
                    };
                    BenchmarkRow {
                        n,
                        symmetric,
                        index,
                        seed,
                        d_min: solved.d_min,
                        d_ob: solved.d_ob,
                        r: solved.r,
                        optimal: solved.optimal,
                        tour: solved.tour,
                        iterations: cfg.hyper.iterations,
                        failed: solved.failed,
                        error: solved.error,
                    }
                })
                .collect();
            timing.section(&bucket_label(n, symmetric), t0.elapsed());
            let refs: Vec<&BenchmarkRow> = bucket.iter().collect();
            buckets.push(BucketSummary::from_rows(n, symmetric, &refs));
            let ratios: Vec<f64> = bucket.iter().filter_map(|r| r.r).collect();
            for (k, count) in histogram(&ratios, HISTOGRAM_BINS).into_iter().enumerate() {
                hist.push(HistogramBin {
                    n,
                    symmetric,
                    lo: k as f64 / HISTOGRAM_BINS as f64,
                    hi: (k + 1) as f64 / HISTOGRAM_BINS as f64,
                    count,
                });
            }
            rows.extend(bucket);
        }
    }
    timing.finish();
    Ok((
        BenchmarkReport {
            config: cfg.clone(),
            buckets,
            rows,
            histogram: hist,
        },
        timing,
    ))
}

pub(crate) fn bucket_label(n: usize, symmetric: bool) -> String {
    format!("n{n}_{}", if symmetric { "symmetric" } else { "asymmetric" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(instances: usize) -> BenchmarkConfig {
        BenchmarkConfig {
            sizes: vec![4],
            kinds: vec![true],
            instances,
            master_seed: 7,
            hyper: Hyper {
                iterations: 60,
                restarts: 1,
                ..Default::default()
            },
        }
    }

    #[test]
    fn repeat_is_identical() {
        let (a, _) = run_benchmark(&small(2)).unwrap();
        let (b, _) = run_benchmark(&small(2)).unwrap();
        assert_eq!(a.artifacts().unwrap(), b.artifacts().unwrap());
    }

    #[test]
    fn rows_carry_oracle() {
        let (rep, _) = run_benchmark(&small(3)).unwrap();
        for row in &rep.rows {
            let m = random_instance(4, true, row.seed).unwrap();
            let oracle = exact_solve(&m, Default::default()).unwrap();
            assert_eq!(row.d_min, Some(oracle.d_min));
            let r = row.r.unwrap();
            assert!((r - oracle.d_min / row.d_ob.unwrap()).abs() < 1e-15);
        }
        let b = &rep.buckets[0];
        assert!(b.solved_exactly <= b.instances);
        assert_eq!(rep.histogram.iter().map(|h| h.count).sum::<usize>(), 3);
    }

    #[test]
    fn size_limits() {
        let mut cfg = small(1);
        cfg.sizes = vec![10];
        assert_eq!(run_benchmark(&cfg).unwrap_err().exit_code(), 3);
        cfg.sizes = vec![2];
        assert_eq!(run_benchmark(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn histogram_edges() {
        assert_eq!(histogram(&[0.0, 0.05, 0.999, 1.0], 20)[0], 1);
        let h = histogram(&[0.0, 0.05, 0.999, 1.0], 20);
        assert_eq!((h[1], h[19]), (1, 2));
    }

    proptest! {
        #[test]
        fn summary_invariants(rs in proptest::collection::vec(0.2f64..=1.0, 1..40)) {
            let rows: Vec<BenchmarkRow> = rs.iter().enumerate().map(|(i, &r)| BenchmarkRow {
                n: 5, symmetric: true, index: i, seed: 0,
                d_min: Some(r), d_ob: Some(1.0), r: Some(r), optimal: r == 1.0,
                tour: None, iterations: 1, failed: false, error: None,
            }).collect();
            let refs: Vec<&BenchmarkRow> = rows.iter().collect();
            let s = BucketSummary::from_rows(5, true, &refs);
            prop_assert!(s.solved_exactly <= s.instances);
            prop_assert!(s.solved_strict <= s.solved_exactly);
            prop_assert!((0.0..=1.0).contains(&s.fraction_solved));
            prop_assert!(s.fraction_solved <= s.fraction_high);
            prop_assert!(s.mean_error <= s.max_error + 1e-15);
            prop_assert_eq!(s.unsolved.len(), s.instances - s.solved_exactly);
            prop_assert_eq!(histogram(&rs, HISTOGRAM_BINS).iter().sum::<usize>(), rs.len());
        }
    }
}
