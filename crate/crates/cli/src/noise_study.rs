//! Approximation error under relative angle noise, by problem size.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use bloch_tsp_core::noise::{mix_seed, NoiseConfig, NoiseMode};
use bloch_tsp_core::optimizer::Hyper;
use bloch_tsp_core::tsp::random_instance;
use bloch_tsp_core::Error as CoreError;

use crate::benchmark::{bucket_label, mean, row_hyper, validate_sizes, Solved};
use crate::error::Result;
use crate::io::{instance_seed, to_csv, to_json, Artifacts};
use crate::timing::Timing;

const NOISE_SALT: u64 = 0x0A15_E5EE_D000_0001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStudyConfig {
    pub sizes: Vec<usize>,
    pub kinds: Vec<bool>,
    pub matrices: usize,
    pub noise_seeds: usize,
    pub level: f64,
    pub mode: NoiseMode,
    pub master_seed: u64,
    pub hyper: Hyper,
}

impl NoiseStudyConfig {
    pub fn validate(&self) -> Result<()> {
        validate_sizes(&self.sizes)?;
        if self.matrices == 0 || self.noise_seeds == 0 || self.kinds.is_empty() {
            return Err(CoreError::Precondition("empty noise study".into()).into());
        }
        NoiseConfig::new(self.mode, self.level, 0)?;
        self.hyper.validate()?;
        Ok(())
    }

    /// Solver settings for noise draw `k` on the instance with `seed`.
    pub fn run_hyper(&self, seed: u64, k: usize) -> Hyper {
        Hyper {
            noise_mode: self.mode,
            noise_level: self.level,
            noise_seed: mix_seed(seed ^ NOISE_SALT, k as u64),
            ..row_hyper(&self.hyper, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRun {
    pub n: usize,
    pub symmetric: bool,
    pub matrix: usize,
    pub matrix_seed: u64,
    pub noise_index: usize,
    pub noise_seed: u64,
    pub d_min: Option<f64>,
    pub d_ob: Option<f64>,
    pub r: Option<f64>,
    pub failed: bool,
    pub error: Option<String>,
}

/// Aggregate of `1 - R` for one size and symmetry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisePoint {
    pub n: usize,
    pub symmetric: bool,
    pub runs: usize,
    pub failed: usize,
    pub mean_error: f64,
    /// Sample standard deviation.
    pub std_error: f64,
    /// Standard error of the mean.
    pub sem: f64,
    pub max_error: f64,
}

impl NoisePoint {
    fn from_runs(n: usize, symmetric: bool, runs: &[NoiseRun]) -> Self {
        let errors: Vec<f64> = runs.iter().filter_map(|r| r.r).map(|r| 1.0 - r).collect();
        let m = mean(&errors);
        let k = errors.len();
        let var = if k > 1 {
            errors.iter().map(|e| (e - m) * (e - m)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        let std = var.sqrt();
        Self {
            n,
            symmetric,
            runs: runs.len(),
            failed: runs.iter().filter(|r| r.failed).count(),
            mean_error: m,
            std_error: std,
            sem: if k > 0 { std / (k as f64).sqrt() } else { 0.0 },
            max_error: errors.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStudyReport {
    pub config: NoiseStudyConfig,
    pub points: Vec<NoisePoint>,
    pub runs: Vec<NoiseRun>,
}

impl NoiseStudyReport {
    pub fn point(&self, n: usize, symmetric: bool) -> Option<&NoisePoint> {
        self.points
            .iter()
            .find(|p| p.n == n && p.symmetric == symmetric)
    }

    pub fn artifacts(&self) -> Result<Artifacts> {
        let mut a = Artifacts::default();
        a.add("noise_study.json", to_json(self));
        a.add("noise_study.csv", to_csv(&self.points)?);
        a.add("noise_runs.csv", to_csv(&self.runs)?);
        Ok(a)
    }
}

pub fn run_noise_study(cfg: &NoiseStudyConfig) -> Result<(NoiseStudyReport, Timing)> {
    cfg.validate()?;
    let mut timing = Timing::start("noise-study");
    let mut points = Vec::new();
    let mut all = Vec::new();
    for &symmetric in &cfg.kinds {
        for &n in &cfg.sizes {
            let t0 = Instant::now();
            let jobs: Vec<(usize, usize)> = (0..cfg.matrices)
                .flat_map(|i| (0..cfg.noise_seeds).map(move |k| (i, k)))
                .collect();
            let runs: Vec<NoiseRun> = jobs
                .into_par_iter()
                .map(|(matrix, k)| {
                    let seed = instance_seed(cfg.master_seed, n, symmetric, matrix);
                    let hyper = cfg.run_hyper(seed, k);
                    let solved = random_instance(n, symmetric, seed)
                        .map(|m| Solved::run(&m, &hyper))
                        .unwrap_or_else(|e| Solved {
                            d_min: None,
                            d_ob: None,
                            r: None,
                            optimal: false,
                            tour: None,
                            failed: true,
                            error: Some(e.to_string()),
                        });
                    NoiseRun {
                        n,
                        symmetric,
                        matrix,
                        matrix_seed: seed,
                        noise_index: k,
                        noise_seed: hyper.noise_seed,
                        d_min: solved.d_min,
                        d_ob: solved.d_ob,
                        r: solved.r,
                        failed: solved.failed,
                        error: solved.error,
                    }
                })
                .collect();
            timing.section(&bucket_label(n, symmetric), t0.elapsed());
            points.push(NoisePoint::from_runs(n, symmetric, &runs));
            all.extend(runs);
        }
    }
    timing.finish();
    Ok((
        NoiseStudyReport {
            config: cfg.clone(),
            points,
            runs: all,
        },
        timing,
    ))
}
