use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superposition::ParamBound;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaConfig {
    pub iterations: usize,
    pub a: f64,
    /// Perturbation size.
    pub c: f64,
    pub alpha_exp: f64,
    pub gamma_exp: f64,
    /// Gain offset; `None` uses a tenth of the iteration count.
    pub stability: Option<f64>,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            a: 0.2,
            c: 0.1,
            alpha_exp: 0.602,
            gamma_exp: 0.101,
            stability: None,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.iterations >= 1
            && self.a > 0.0
            && self.c > 0.0
            && self.alpha_exp > 0.0
            && self.gamma_exp > 0.0
            && self.stability.is_none_or(|s| s >= 0.0);
        if !ok {
            return Err(Error::InvalidParams(format!("invalid SPSA settings {self:?}")));
        }
        Ok(())
    }

    pub fn stability_offset(&self) -> f64 {
        self.stability.unwrap_or(self.iterations as f64 / 10.0)
    }

    /// Step gain at 0-based iteration `k`.
    pub fn gain(&self, k: usize) -> f64 {
        self.a / (self.stability_offset() + k as f64 + 1.0).powf(self.alpha_exp)
    }

    /// Perturbation size at 0-based iteration `k`.
    pub fn perturbation(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma_exp)
    }
}

/// Objective value with the payload that produced it; `info` is `None` for
/// a failed evaluation, whose value is a penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub value: f64,
    pub info: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaStep<T> {
    pub iteration: usize,
    /// Iterate after the update.
    pub x: Vec<f64>,
    pub eval: Evaluation<T>,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Best<T> {
    pub x: Vec<f64>,
    pub value: f64,
    pub info: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaResult<T> {
    /// Lowest successful evaluation seen, including perturbed probes.
    pub best: Option<Best<T>>,
    pub steps: Vec<SpsaStep<T>>,
    pub evaluations: usize,
}

fn clip_all(x: &mut [f64], bounds: &[ParamBound]) {
    for (v, b) in x.iter_mut().zip(bounds) {
        *v = b.clip(*v);
    }
}

/// Simultaneous-perturbation descent over a box with periodic coordinates.
pub fn spsa_minimize<T: Clone, F: FnMut(&[f64]) -> Evaluation<T>>(
    mut objective: F,
    x0: &[f64],
    bounds: &[ParamBound],
    cfg: &SpsaConfig,
) -> Result<SpsaResult<T>> {
    cfg.validate()?;
    if x0.len() != bounds.len() {
        return Err(Error::InvalidParams(format!(
            "{} starting values for {} bounds",
            x0.len(),
            bounds.len()
        )));
    }
    if let Some(k) = x0.iter().zip(bounds).position(|(v, b)| !b.contains(*v)) {
        return Err(Error::InvalidParams(format!("starting value {k} out of bounds")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = x0.to_vec();
    let mut best: Option<Best<T>> = None;
    let mut evaluations = 0;
    let consider = |x: &[f64], e: &Evaluation<T>, best: &mut Option<Best<T>>| {
        if let Some(info) = &e.info {
            if best.as_ref().is_none_or(|b| e.value < b.value) {
                *best = Some(Best {
                    x: x.to_vec(),
                    value: e.value,
                    info: info.clone(),
                });
            }
        }
    };

    let first = objective(&x);
    evaluations += 1;
    consider(&x, &first, &mut best);

    let mut steps = Vec::with_capacity(cfg.iterations);
    let dim = x.len();
    for k in 0..cfg.iterations {
        let ak = cfg.gain(k);
        let ck = cfg.perturbation(k);
        let delta: Vec<f64> = (0..dim)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let mut plus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + ck * d).collect();
        let mut minus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v - ck * d).collect();
        clip_all(&mut plus, bounds);
        clip_all(&mut minus, bounds);
        let yp = objective(&plus);
        let ym = objective(&minus);
        evaluations += 2;
        consider(&plus, &yp, &mut best);
        consider(&minus, &ym, &mut best);

        let diff = yp.value - ym.value;
        for (v, d) in x.iter_mut().zip(&delta) {
            *v -= ak * diff / (2.0 * ck * d);
        }
        clip_all(&mut x, bounds);
        let eval = objective(&x);
        evaluations += 1;
        consider(&x, &eval, &mut best);
        steps.push(SpsaStep {
            iteration: k + 1,
            x: x.clone(),
            eval,
            best_value: best.as_ref().map_or(f64::INFINITY, |b| b.value),
        });
    }
    Ok(SpsaResult {
        best,
        steps,
        evaluations,
    })
}
