use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{OpId, RoutingChart};
use crate::error::{Error, Result};
use crate::qubit::Direction;

/// Upper bound on weight magnitudes and angle multipliers.
pub const PARAM_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMode {
    /// Complex weight: magnitude and phase.
    #[default]
    Alpha,
    /// Multiplier on the rotation angle.
    Angle,
    Both,
}

impl ParamMode {
    pub fn per_op(self) -> usize {
        match self {
            ParamMode::Alpha => 2,
            ParamMode::Angle => 1,
            ParamMode::Both => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBound {
    pub lo: f64,
    pub hi: f64,
    /// Wraps into `[lo, hi)` rather than clipping.
    pub periodic: bool,
}

impl ParamBound {
    pub fn clip(&self, x: f64) -> f64 {
        if self.periodic {
            let w = self.hi - self.lo;
            let r = (x - self.lo).rem_euclid(w);
            // rem_euclid may round up to w itself.
            self.lo + if r >= w { 0.0 } else { r }
        } else {
            x.clamp(self.lo, self.hi)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.periodic {
            (self.lo..self.hi).contains(&x)
        } else {
            (self.lo..=self.hi).contains(&x)
        }
    }
}

const MAGNITUDE: ParamBound = ParamBound {
    lo: 0.0,
    hi: PARAM_MAX,
    periodic: false,
};
const PHASE: ParamBound = ParamBound {
    lo: 0.0,
    hi: TAU,
    periodic: true,
};
const MULTIPLIER: ParamBound = ParamBound {
    lo: 0.0,
    hi: PARAM_MAX,
    periodic: false,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariedValue {
    pub magnitude: f64,
    pub phase: f64,
    pub multiplier: f64,
}

impl VariedValue {
    pub fn weight(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Tunable values for a subset of up operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    varied: Vec<OpId>,
    catalog_index: Vec<usize>,
    values: Vec<VariedValue>,
    mode: ParamMode,
    start_city: usize,
}

impl ProtocolParams {
    /// Varies `ops` starting from their nominal weight and angle.
    pub fn nominal(chart: &RoutingChart, ops: &[OpId], mode: ParamMode) -> Result<Self> {
        let mut catalog_index = Vec::with_capacity(ops.len());
        let mut values = Vec::with_capacity(ops.len());
        for id in ops {
            let (k, op) = chart
                .ops()
                .enumerate()
                .find(|(_, o)| o.id == *id)
                .ok_or_else(|| Error::InvalidParams(format!("{id} is not in the routing chart")))?;
            if op.op.direction != Direction::Up {
                return Err(Error::InvalidParams(format!("{id} is not an up operator")));
            }
            if catalog_index.contains(&k) {
                return Err(Error::InvalidParams(format!("{id} listed twice")));
            }
            catalog_index.push(k);
            values.push(VariedValue {
                magnitude: op.op.weight.norm(),
                phase: 0.0,
                multiplier: 1.0,
            });
        }
        Ok(Self {
            varied: ops.to_vec(),
            catalog_index,
            values,
            mode,
            start_city: chart.start_city(),
        })
    }

    pub fn varied(&self) -> &[OpId] {
        &self.varied
    }

    /// Position of each varied operator in the chart's catalog order.
    pub fn catalog_index(&self) -> &[usize] {
        &self.catalog_index
    }

    pub fn values(&self) -> &[VariedValue] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [VariedValue] {
        &mut self.values
    }

    pub fn mode(&self) -> ParamMode {
        self.mode
    }

    pub fn start_city(&self) -> usize {
        self.start_city
    }

    pub fn dim(&self) -> usize {
        self.values.len() * self.mode.per_op()
    }

    pub fn bounds(&self) -> Vec<ParamBound> {
        let per: &[ParamBound] = match self.mode {
            ParamMode::Alpha => &[MAGNITUDE, PHASE],
            ParamMode::Angle => &[MULTIPLIER],
            ParamMode::Both => &[MAGNITUDE, PHASE, MULTIPLIER],
        };
        per.iter().copied().cycle().take(self.dim()).collect()
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.values
            .iter()
            .flat_map(|v| match self.mode {
                ParamMode::Alpha => vec![v.magnitude, v.phase],
                ParamMode::Angle => vec![v.multiplier],
                ParamMode::Both => vec![v.magnitude, v.phase, v.multiplier],
            })
            .collect()
    }

    /// Copy with the active fields replaced from `x`, clipped to bounds.
    pub fn with_vector(&self, x: &[f64]) -> Result<Self> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParams(format!(
                "parameter vector has {} entries, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        let mut out = self.clone();
        let per = self.mode.per_op();
        for (v, chunk) in out.values.iter_mut().zip(x.chunks(per)) {
            match self.mode {
                ParamMode::Alpha => {
                    v.magnitude = MAGNITUDE.clip(chunk[0]);
                    v.phase = PHASE.clip(chunk[1]);
                }
                ParamMode::Angle => v.multiplier = MULTIPLIER.clip(chunk[0]),
                ParamMode::Both => {
                    v.magnitude = MAGNITUDE.clip(chunk[0]);
                    v.phase = PHASE.clip(chunk[1]);
                    v.multiplier = MULTIPLIER.clip(chunk[2]);
                }
            }
        }
        Ok(out)
    }

    /// Override for catalog operator `index`, if varied.
    pub fn lookup(&self, index: usize) -> Option<&VariedValue> {
        self.catalog_index
            .iter()
            .position(|&k| k == index)
            .map(|p| &self.values[p])
    }

    /// Dense per-catalog view of the overrides.
    pub fn overrides(&self, catalog_len: usize) -> Vec<Option<VariedValue>> {
        let mut out = vec![None; catalog_len];
        for (&k, v) in self.catalog_index.iter().zip(&self.values) {
            out[k] = Some(*v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding, build_routing_chart, EncodingConfig};
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn chart() -> RoutingChart {
        build_routing_chart(&build_encoding(&fixtures::cm4(), &EncodingConfig::default()).unwrap())
    }

    #[test]
    fn nominal_values_and_round_trip() {
        let ch = chart();
        let ids: Vec<OpId> = ch.up_ops().take(3).map(|o| o.id).collect();
        let p = ProtocolParams::nominal(&ch, &ids, ParamMode::Both).unwrap();
        assert_eq!(p.dim(), 9);
        assert_abs_diff_eq!(p.values()[0].magnitude, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        let x = p.to_vector();
        assert_eq!(p.with_vector(&x).unwrap(), p);
        assert_eq!(p.bounds().len(), 9);
        assert!(p.bounds()[1].periodic);
    }

    #[test]
    fn clipping_and_wrapping() {
        let ch = chart();
        let ids: Vec<OpId> = ch.up_ops().take(1).map(|o| o.id).collect();
        let p = ProtocolParams::nominal(&ch, &ids, ParamMode::Alpha).unwrap();
        let q = p.with_vector(&[3.0, -0.5]).unwrap();
        assert_eq!(q.values()[0].magnitude, 2.0);
        assert_abs_diff_eq!(q.values()[0].phase, TAU - 0.5, epsilon = 1e-15);
        assert!(p.with_vector(&[1.0]).is_err());
        assert!(p.with_vector(&[f64::NAN, 0.0]).is_err());
        assert_eq!(PHASE.clip(TAU), 0.0);
        assert!(PHASE.contains(PHASE.clip(-1e-300)));
    }

    #[test]
    fn rejects_down_and_unknown_ops() {
        let ch = chart();
        let down = ch.down_ops().next().unwrap().id;
        assert!(ProtocolParams::nominal(&ch, &[down], ParamMode::Alpha).is_err());
        let up = ch.up_ops().next().unwrap().id;
        assert!(ProtocolParams::nominal(&ch, &[up, up], ParamMode::Alpha).is_err());
        let bogus = OpId {
            transition: 40,
            ..up
        };
        assert!(ProtocolParams::nominal(&ch, &[bogus], ParamMode::Alpha).is_err());
    }
}
