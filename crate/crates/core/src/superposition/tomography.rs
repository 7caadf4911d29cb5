use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{bloch_from_state, state_from_bloch, BlochPoint, PhaseConvention, QubitState};

/// Precision setting for Pauli-expectation tomography.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TomographyConfig {
    /// `None` means exact expectation values.
    pub epsilon: Option<f64>,
}

impl TomographyConfig {
    pub fn exact() -> Self {
        Self { epsilon: None }
    }

    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "tomography precision {epsilon} outside (0, 1]"
            )));
        }
        Ok(Self {
            epsilon: Some(epsilon),
        })
    }

    /// `ceil(1 / epsilon^2)`; the offset absorbs rounding of exact squares.
    pub fn shots_per_observable(&self) -> Option<u64> {
        self.epsilon
            .map(|e| ((1.0 / (e * e)) - 1e-9).ceil().max(1.0) as u64)
    }

    pub fn total_shots(&self) -> Option<u64> {
        self.shots_per_observable().map(|s| 3 * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    /// Estimated `(<X>, <Y>, <Z>)` before renormalization.
    pub expectations: [f64; 3],
    pub state: QubitState,
    /// Zero in exact mode.
    pub shots: u64,
}

/// Estimates the Bloch vector of `g` and rebuilds a pure state from it.
pub fn measure(g: &QubitState, cfg: &TomographyConfig, seed: u64) -> Measurement {
    let truth = g.bloch_vector();
    let Some(shots) = cfg.shots_per_observable() else {
        return Measurement {
            expectations: truth,
            state: *g,
            shots: 0,
        };
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = [0.0; 3];
    for (e, &t) in est.iter_mut().zip(&truth) {
        let p = ((1.0 + t) / 2.0).clamp(0.0, 1.0);
        let ups = Binomial::new(shots, p)
            .expect("probability clamped to [0, 1]")
            .sample(&mut rng);
        *e = 2.0 * ups as f64 / shots as f64 - 1.0;
    }
    let norm = est.iter().map(|x| x * x).sum::<f64>().sqrt();
    let state = if norm > 0.0 {
        let unit = est.map(|x| x / norm);
        state_from_bloch(BlochPoint::from_cartesian(unit), PhaseConvention::Standard)
    } else {
        // All three estimates vanished; no direction is preferred.
        QubitState::zero()
    };
    Measurement {
        expectations: est,
        state,
        shots: 3 * shots,
    }
}

pub fn measure_state(g: &QubitState, cfg: &TomographyConfig, seed: u64) -> QubitState {
    measure(g, cfg, seed).state
}

/// Euclidean distance between Bloch vectors.
pub fn bloch_error(a: &QubitState, b: &QubitState) -> f64 {
    let (u, v) = (a.bloch_vector(), b.bloch_vector());
    u.iter()
        .zip(&v)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Bloch coordinates of the reconstruction, for reports.
pub fn reconstructed_point(m: &Measurement) -> BlochPoint {
    bloch_from_state(&m.state)
}
