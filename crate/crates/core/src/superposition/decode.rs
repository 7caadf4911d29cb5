//! Expansion of the penultimate state over the return states `P_{j,start}`.
//!
//! The return states are `n - 1` vectors in a two-dimensional space, so
//! their overlap matrix has rank at most two and is singular whenever
//! `n > 3`. The decoder therefore tries, in order: a direct solve of the
//! overlap system; the same solve after merging coincident states; an exact
//! match of the measured state with one return state; and finally the
//! minimum-norm expansion through the frame operator of the distinct
//! return states.

use num_complex::Complex64;
use serde::Serialize;

use crate::encoding::BlochEncoding;
use crate::error::{Error, Result};
use crate::linalg::{condition1, CMatrix, Lu};
use crate::qubit::{Matrix2, QubitState};
use crate::tsp::{approximation_ratio, tour_cost, CostMatrix, Tour};

use super::protocol::ProtocolRun;

/// Largest condition number accepted for a linear solve.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Fidelity above which two states count as the same point.
pub const COINCIDENCE_FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMethod {
    Direct,
    Reduced,
    SingleState,
    MinimumNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    /// Non-start cities in ascending order.
    pub cities: Vec<usize>,
    pub betas: Vec<Complex64>,
    /// `|beta|^2`, normalized to sum to one.
    pub weights: Vec<f64>,
    pub ranked_cycle: Tour,
    pub d_value: f64,
    /// One-norm condition number of the full overlap matrix.
    pub condition: f64,
    pub reduced: bool,
    pub method: DecodeMethod,
}

impl DecodeResult {
    pub fn weight_of(&self, city: usize) -> Option<f64> {
        self.cities
            .iter()
            .position(|&c| c == city)
            .map(|k| self.weights[k])
    }

    /// City with the largest weight, lowest index on ties.
    pub fn top(&self) -> (usize, f64) {
        let c = self.ranked_cycle.order()[1];
        (c, self.weight_of(c).expect("ranked city is decoded"))
    }
}

/// Precomputed decode systems for one encoding.
#[derive(Debug, Clone)]
pub struct Decoder {
    start: usize,
    cities: Vec<usize>,
    states: Vec<QubitState>,
    condition: f64,
    direct: Option<Lu>,
    /// Indices into `cities`; the first member represents the group.
    groups: Vec<Vec<usize>>,
    reduced: Option<Lu>,
    frame_inverse: Option<Matrix2>,
    frame_condition: f64,
}

fn overlap_matrix(states: &[QubitState]) -> CMatrix {
    states
        .iter()
        .map(|a| states.iter().map(|b| a.overlap(b)).collect())
        .collect()
}

fn solver(e: &CMatrix) -> (f64, Option<Lu>) {
    let k = condition1(e);
    if k <= CONDITION_LIMIT {
        (k, Lu::factor(e))
    } else {
        (k, None)
    }
}

/// Inverse and spectral condition number of `sum |p><p|`.
fn frame(states: &[QubitState]) -> (Option<Matrix2>, f64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut s = [[zero; 2]; 2];
    for p in states {
        let a = p.amplitudes();
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] += a[i] * a[j].conj();
            }
        }
    }
    let tr = (s[0][0] + s[1][1]).re;
    let det = (s[0][0] * s[1][1] - s[0][1] * s[1][0]).re;
    let disc = ((tr / 2.0).powi(2) - det).max(0.0).sqrt();
    let (hi, lo) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let kappa = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(kappa <= CONDITION_LIMIT) {
        return (None, kappa);
    }
    let inv = [
        [s[1][1] / det, -s[0][1] / det],
        [-s[1][0] / det, s[0][0] / det],
    ];
    (Some(inv), kappa)
}

impl Decoder {
    pub fn new(enc: &BlochEncoding) -> Result<Self> {
        let (cities, states): (Vec<usize>, Vec<QubitState>) =
            enc.return_states().into_iter().unzip();
        let e = overlap_matrix(&states);
        let (condition, direct) = solver(&e);

        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, s) in states.iter().enumerate() {
            match groups
                .iter_mut()
                .find(|g| states[g[0]].fidelity(s) > COINCIDENCE_FIDELITY)
            {
                Some(g) => g.push(k),
                None => groups.push(vec![k]),
            }
        }
        let reps: Vec<QubitState> = groups.iter().map(|g| states[g[0]]).collect();
        let reduced = if direct.is_none() && groups.len() < states.len() {
            solver(&overlap_matrix(&reps)).1
        } else {
            None
        };
        let (frame_inverse, frame_condition) = frame(&reps);
        Ok(Self {
            start: enc.start_city(),
            cities,
            states,
            condition,
            direct,
            groups,
            reduced,
            frame_inverse,
            frame_condition,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn overlap_matrix(&self) -> CMatrix {
        overlap_matrix(&self.states)
    }

    /// Spreads a coefficient of a group's representative over its members.
    fn spread(&self, group: &[usize], x: Complex64, betas: &mut [Complex64]) {
        let rep = &self.states[group[0]];
        let share = x / group.len() as f64;
        for &m in group {
            // P_m = <rep|P_m> rep for coincident states.
            betas[m] = share / rep.overlap(&self.states[m]);
        }
    }

    fn coefficients(&self, g: &QubitState) -> Result<(Vec<Complex64>, DecodeMethod)> {
        let zero = Complex64::new(0.0, 0.0);
        if let Some(lu) = &self.direct {
            let k: Vec<Complex64> = self.states.iter().map(|p| p.overlap(g)).collect();
            return Ok((lu.solve(&k), DecodeMethod::Direct));
        }
        let mut betas = vec![zero; self.states.len()];
        if let Some(lu) = &self.reduced {
            let k: Vec<Complex64> = self.groups.iter().map(|gr| self.states[gr[0]].overlap(g)).collect();
            for (gr, x) in self.groups.iter().zip(lu.solve(&k)) {
                self.spread(gr, x, &mut betas);
            }
            return Ok((betas, DecodeMethod::Reduced));
        }
        let best = self
            .groups
            .iter()
            .map(|gr| (gr, self.states[gr[0]].fidelity(g)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((gr, f)) = best {
            if f > COINCIDENCE_FIDELITY {
                let x = self.states[gr[0]].overlap(g);
                self.spread(gr, x, &mut betas);
                return Ok((betas, DecodeMethod::SingleState));
            }
        }
        let inv = self.frame_inverse.ok_or(Error::UnresolvableSingularity {
            condition: self.frame_condition,
        })?;
        let a = g.amplitudes();
        let h = [
            inv[0][0] * a[0] + inv[0][1] * a[1],
            inv[1][0] * a[0] + inv[1][1] * a[1],
        ];
        for gr in &self.groups {
            let p = self.states[gr[0]].amplitudes();
            let x = p[0].conj() * h[0] + p[1].conj() * h[1];
            self.spread(gr, x, &mut betas);
        }
        Ok((betas, DecodeMethod::MinimumNorm))
    }

    pub fn decode(&self, g: &QubitState, m: &CostMatrix) -> Result<DecodeResult> {
        let (betas, method) = self.coefficients(g)?;
        let raw: Vec<f64> = betas.iter().map(|b| b.norm_sqr()).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateOutput { norm: total.sqrt() });
        }
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut idx: Vec<usize> = (0..weights.len()).collect();
        idx.sort_by(|&a, &b| {
            weights[b]
                .total_cmp(&weights[a])
                .then(self.cities[a].cmp(&self.cities[b]))
        });
        let mut order = vec![self.start];
        order.extend(idx.iter().map(|&k| self.cities[k]));
        let ranked_cycle = Tour::new(order, self.cities.len() + 1)?;
        let d_value = tour_cost(m, &ranked_cycle)?;
        Ok(DecodeResult {
            cities: self.cities.clone(),
            betas,
            weights,
            ranked_cycle,
            d_value,
            condition: self.condition,
            reduced: method != DecodeMethod::Direct,
            method,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CityWeight {
    /// 1-based.
    pub city: usize,
    pub weight: f64,
    pub beta: [f64; 2],
}

/// Serializable decode summary with 1-based city labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeReport {
    pub weights: Vec<CityWeight>,
    pub ranked_cycle: Vec<usize>,
    pub d: f64,
    pub r: f64,
    /// `null` when the overlap matrix is singular.
    pub condition: Option<f64>,
    pub reduced: bool,
    pub method: DecodeMethod,
    pub pre_norms: Vec<f64>,
}

impl DecodeReport {
    pub fn new(decode: &DecodeResult, run: &ProtocolRun, d_min: f64) -> Result<Self> {
        Ok(Self {
            weights: decode
                .cities
                .iter()
                .zip(&decode.weights)
                .zip(&decode.betas)
                .map(|((&c, &w), b)| CityWeight {
                    city: c + 1,
                    weight: w,
                    beta: [b.re, b.im],
                })
                .collect(),
            ranked_cycle: decode.ranked_cycle.labels(),
            d: decode.d_value,
            r: approximation_ratio(d_min, decode.d_value)?,
            condition: decode.condition.is_finite().then_some(decode.condition),
            reduced: decode.reduced,
            method: decode.method,
            pre_norms: run.pre_norms(),
        })
    }
}

pub fn decode_penultimate(
    g: &QubitState,
    enc: &BlochEncoding,
    m: &CostMatrix,
) -> Result<DecodeResult> {
    Decoder::new(enc)?.decode(g, m)
}

/// `normalize(sum beta_j P_{j,start})` over the encoding's return states.
pub fn synthesize(enc: &BlochEncoding, betas: &[Complex64]) -> Result<QubitState> {
    let states = enc.return_states();
    if betas.len() != states.len() {
        return Err(Error::Precondition(format!(
            "{} coefficients for {} return states",
            betas.len(),
            states.len()
        )));
    }
    let mut a = [Complex64::new(0.0, 0.0); 2];
    for ((_, p), b) in states.iter().zip(betas) {
        let amp = p.amplitudes();
        a[0] += b * amp[0];
        a[1] += b * amp[1];
    }
    QubitState::new(a[0], a[1])
}
