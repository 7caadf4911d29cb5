//! Relative angle error on rotation operators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::RotationOp;

/// Largest admissible relative angle error.
pub const MAX_NOISE_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    Off,
    /// One draw per operator for a whole optimization run.
    PerRun,
    /// A fresh draw every time an operator is applied.
    PerApplication,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub max_relative_error: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            max_relative_error: 0.0,
            mode: NoiseMode::Off,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn off() -> Self {
        Self::default()
    }

    pub fn new(mode: NoiseMode, max_relative_error: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            max_relative_error,
            mode,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_NOISE_LEVEL).contains(&self.max_relative_error) {
            return Err(Error::InvalidParams(format!(
                "noise level {} outside [0, {MAX_NOISE_LEVEL}]",
                self.max_relative_error
            )));
        }
        Ok(())
    }

    pub fn is_active(&self) -> bool {
        self.mode != NoiseMode::Off && self.max_relative_error > 0.0
    }
}

/// SplitMix64 finalizer, used to derive independent stream seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of relative errors for one protocol evaluation.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    cfg: NoiseConfig,
    fixed: Vec<f64>,
    rng: Option<ChaCha8Rng>,
}

impl NoiseStream {
    /// Stream that never perturbs.
    pub fn silent() -> Self {
        Self {
            cfg: NoiseConfig::off(),
            fixed: Vec::new(),
            rng: None,
        }
    }

    /// Draws for run `run` over a catalog of `ops` operators. Per-application
    /// streams are further keyed by `evaluation`.
    pub fn new(cfg: &NoiseConfig, ops: usize, run: u64, evaluation: u64) -> Self {
        if !cfg.is_active() {
            return Self::silent();
        }
        let run_seed = mix_seed(cfg.seed, run);
        match cfg.mode {
            NoiseMode::Off => Self::silent(),
            NoiseMode::PerRun => {
                let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
                let e = cfg.max_relative_error;
                Self {
                    cfg: *cfg,
                    fixed: (0..ops).map(|_| rng.random_range(-e..=e)).collect(),
                    rng: None,
                }
            }
            NoiseMode::PerApplication => Self {
                cfg: *cfg,
                fixed: Vec::new(),
                rng: Some(ChaCha8Rng::seed_from_u64(mix_seed(run_seed, evaluation))),
            },
        }
    }

    pub fn is_silent(&self) -> bool {
        !self.cfg.is_active()
    }

    /// Relative error for catalog operator `index`.
    pub fn draw(&mut self, index: usize) -> f64 {
        let e = self.cfg.max_relative_error;
        match self.cfg.mode {
            _ if !self.cfg.is_active() => 0.0,
            NoiseMode::PerRun => self.fixed[index],
            NoiseMode::PerApplication => self
                .rng
                .as_mut()
                .map_or(0.0, |r| r.random_range(-e..=e)),
            NoiseMode::Off => 0.0,
        }
    }
}

/// Scales the rotation angle of catalog operator `index` by `1 + eta`.
pub fn perturb_operator(op: &RotationOp, index: usize, stream: &mut NoiseStream) -> RotationOp {
    if stream.is_silent() {
        return op.clone();
    }
    let eta = stream.draw(index);
    op.with_angle(op.angle() * (1.0 + eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Direction;

    fn op() -> RotationOp {
        RotationOp::new([0.3, -0.4, 0.5], 1.1, Direction::Up).unwrap()
    }

    #[test]
    fn off_is_identity() {
        let mut s = NoiseStream::new(&NoiseConfig::off(), 4, 0, 0);
        assert_eq!(perturb_operator(&op(), 2, &mut s), op());
        let zero = NoiseConfig::new(NoiseMode::PerApplication, 0.0, 3).unwrap();
        let mut s = NoiseStream::new(&zero, 4, 0, 0);
        assert_eq!(perturb_operator(&op(), 2, &mut s), op());
    }

    #[test]
    fn bounded_relative_error() {
        let cfg = NoiseConfig::new(NoiseMode::PerApplication, 0.001, 7).unwrap();
        let mut s = NoiseStream::new(&cfg, 1, 0, 0);
        for _ in 0..10_000 {
            let p = perturb_operator(&op(), 0, &mut s);
            assert!((p.angle() / op().angle() - 1.0).abs() <= 0.001 + 1e-15);
            assert_eq!(p.axis(), op().axis());
        }
    }

    #[test]
    fn empirically_uniform() {
        let cfg = NoiseConfig::new(NoiseMode::PerApplication, 0.001, 1).unwrap();
        let mut s = NoiseStream::new(&cfg, 1, 0, 0);
        let draws: Vec<f64> = (0..100_000).map(|_| s.draw(0)).collect();
        let mean_abs = draws.iter().map(|x| x.abs()).sum::<f64>() / draws.len() as f64;
        assert!((mean_abs - 0.0005).abs() < 1e-5, "{mean_abs}");
        let mut bins = [0usize; 10];
        for x in &draws {
            bins[(((x + 0.001) / 0.0002) as usize).min(9)] += 1;
        }
        // Chi-square with 9 degrees of freedom; 27.9 is the 0.999 quantile.
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - 10_000.0).powi(2) / 10_000.0)
            .sum();
        assert!(chi2 < 27.9, "{chi2}");
    }

    #[test]
    fn per_run_draws_are_fixed() {
        let cfg = NoiseConfig::new(NoiseMode::PerRun, 0.01, 2).unwrap();
        let mut a = NoiseStream::new(&cfg, 3, 5, 0);
        let mut b = NoiseStream::new(&cfg, 3, 5, 99);
        let first = a.draw(1);
        assert_eq!(first, a.draw(1));
        assert_eq!(first, b.draw(1));
        let mut other = NoiseStream::new(&cfg, 3, 6, 0);
        assert_ne!(first, other.draw(1));
    }

    #[test]
    fn level_validated() {
        assert!(NoiseConfig::new(NoiseMode::PerRun, 0.02, 0).is_err());
        assert!(NoiseConfig::new(NoiseMode::PerRun, -0.001, 0).is_err());
    }
}
