//! Placement of a cost matrix on the Bloch sphere and the layered routing
//! chart of rotation operators between placed states.
//!
//! City `i` sits on the equator at azimuth `start_azimuth + 2 pi i / n`. The
//! distance states `P_ij` sit on the meridian of `P_ii`, raised toward the
//! pole `P0` (`xi = 0`) by an arc of `scale * s_ij`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{
    rotation_between, state_from_bloch, BlochPoint, Direction, PhaseConvention, QubitState,
    RotationOp,
};
use crate::tsp::{CostMatrix, Tour};

/// Identifies a placed state. City indices are 0-based; display is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Pole,
    City { i: usize, j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Equator,
    Geodesic,
    Pole,
}

impl StateLabel {
    pub fn city(i: usize, j: usize) -> Self {
        StateLabel::City { i, j }
    }

    pub fn kind(&self) -> LabelKind {
        match *self {
            StateLabel::Pole => LabelKind::Pole,
            StateLabel::City { i, j } if i == j => LabelKind::Equator,
            StateLabel::City { .. } => LabelKind::Geodesic,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateLabel::Pole => write!(f, "P0"),
            StateLabel::City { i, j } if i < 9 && j < 9 => write!(f, "P{}{}", i + 1, j + 1),
            StateLabel::City { i, j } => write!(f, "P{}_{}", i + 1, j + 1),
        }
    }
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingConfig {
    /// 0-based start city.
    pub start_city: usize,
    /// Azimuth of city 1 on the equator.
    pub start_azimuth: f64,
    /// Fraction of the quarter circle used by the longest edge.
    pub headroom: f64,
    pub convention: PhaseConvention,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        Self {
            start_city: 0,
            start_azimuth: 0.0,
            headroom: 0.98,
            convention: PhaseConvention::Standard,
        }
    }
}

impl EncodingConfig {
    pub fn with_start(mut self, start_city: usize) -> Self {
        self.start_city = start_city;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedState {
    pub label: StateLabel,
    pub point: BlochPoint,
    pub state: QubitState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingWarning {
    /// Two distance states on one meridian coincide (equal `s_ij`).
    CoincidentGeodesic {
        meridian: usize,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone)]
pub struct BlochEncoding {
    n: usize,
    scale: f64,
    config: EncodingConfig,
    states: Vec<PlacedState>,
    pole: PlacedState,
    warnings: Vec<EncodingWarning>,
}

pub fn build_encoding(m: &CostMatrix, config: &EncodingConfig) -> Result<BlochEncoding> {
    let n = m.n();
    if !(config.headroom > 0.0 && config.headroom <= 1.0) {
        return Err(Error::Precondition(format!(
            "headroom {} must lie in (0, 1]",
            config.headroom
        )));
    }
    if config.start_city >= n {
        return Err(Error::Precondition(format!(
            "start city {} out of range for {n} cities",
            config.start_city + 1
        )));
    }
    if !config.start_azimuth.is_finite() {
        return Err(Error::Precondition("start azimuth must be finite".into()));
    }
    let scale = config.headroom * FRAC_PI_2 / m.max_off_diagonal();
    let place = |label: StateLabel, xi: f64, phi: f64| {
        let point = BlochPoint::new(xi, phi);
        PlacedState {
            label,
            point,
            state: state_from_bloch(point, config.convention),
        }
    };

    let mut states = Vec::with_capacity(n * n);
    for i in 0..n {
        let phi = config.start_azimuth + 2.0 * PI * i as f64 / n as f64;
        for j in 0..n {
            let xi = if i == j {
                FRAC_PI_2
            } else {
                FRAC_PI_2 - scale * m.get(i, j)
            };
            states.push(place(StateLabel::city(i, j), xi, phi));
        }
    }

    let mut warnings = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            for k in (j + 1..n).filter(|&k| k != i) {
                let a = states[i * n + j].point.xi;
                let b = states[i * n + k].point.xi;
                if (a - b).abs() < 1e-9 {
                    warnings.push(EncodingWarning::CoincidentGeodesic {
                        meridian: i,
                        first: j,
                        second: k,
                    });
                }
            }
        }
    }

    Ok(BlochEncoding {
        n,
        scale,
        config: *config,
        states,
        pole: place(StateLabel::Pole, 0.0, 0.0),
        warnings,
    })
}

impl BlochEncoding {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Radians of arc per unit of cost.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn start_city(&self) -> usize {
        self.config.start_city
    }

    pub fn config(&self) -> &EncodingConfig {
        &self.config
    }

    pub fn warnings(&self) -> &[EncodingWarning] {
        &self.warnings
    }

    pub fn placed(&self, label: StateLabel) -> &PlacedState {
        match label {
            StateLabel::Pole => &self.pole,
            StateLabel::City { i, j } => &self.states[i * self.n + j],
        }
    }

    pub fn state(&self, label: StateLabel) -> &QubitState {
        &self.placed(label).state
    }

    pub fn point(&self, label: StateLabel) -> BlochPoint {
        self.placed(label).point
    }

    /// Every placed state, cities in row-major order followed by the pole.
    pub fn all(&self) -> impl Iterator<Item = &PlacedState> {
        self.states.iter().chain(std::iter::once(&self.pole))
    }

    /// Return states `P_{j,start}` for every `j != start`, ascending in `j`.
    pub fn return_states(&self) -> Vec<(usize, QubitState)> {
        let s = self.start_city();
        (0..self.n)
            .filter(|&j| j != s)
            .map(|j| (j, *self.state(StateLabel::city(j, s))))
            .collect()
    }
}

/// One arrow of the routing chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId {
    /// Index `t` of the transition from layer `t` to layer `t + 1`.
    pub transition: usize,
    pub from: StateLabel,
    pub to: StateLabel,
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:{}->{}", self.transition, self.from, self.to)
    }
}

#[derive(Debug, Clone)]
pub struct ChartOp {
    pub id: OpId,
    /// Rotation with its nominal weight.
    pub op: RotationOp,
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub index: usize,
    pub direction: Direction,
    pub ops: Vec<ChartOp>,
}

#[derive(Debug, Clone)]
pub struct RoutingChart {
    n: usize,
    start_city: usize,
    pub layers: Vec<Vec<StateLabel>>,
    pub transitions: Vec<Transition>,
}

/// `2 (n-1) (2 + (n-2)^2)`: up plus down operators in a routing chart.
pub fn operator_count(n: usize) -> usize {
    2 * (n - 1) * (2 + (n - 2) * (n - 2))
}

fn chart_layers(n: usize, s: usize) -> Vec<Vec<StateLabel>> {
    let others: Vec<usize> = (0..n).filter(|&c| c != s).collect();
    let equator: Vec<StateLabel> = others.iter().map(|&j| StateLabel::city(j, j)).collect();
    let interior: Vec<StateLabel> = others
        .iter()
        .flat_map(|&j| {
            others
                .iter()
                .filter(move |&&k| k != j)
                .map(move |&k| StateLabel::city(j, k))
        })
        .collect();

    let mut layers = Vec::with_capacity(2 * n + 1);
    layers.push(vec![StateLabel::city(s, s)]);
    layers.push(others.iter().map(|&j| StateLabel::city(s, j)).collect());
    for _ in 0..n - 2 {
        layers.push(equator.clone());
        layers.push(interior.clone());
    }
    layers.push(equator);
    layers.push(others.iter().map(|&j| StateLabel::city(j, s)).collect());
    layers.push(vec![StateLabel::city(s, s)]);
    layers
}

pub fn build_routing_chart(enc: &BlochEncoding) -> RoutingChart {
    let n = enc.n();
    let s = enc.start_city();
    let layers = chart_layers(n, s);
    let mut transitions = Vec::with_capacity(2 * n);
    for t in 0..2 * n {
        let direction = if t % 2 == 0 { Direction::Up } else { Direction::Down };
        let mut arrows: Vec<(StateLabel, StateLabel)> = Vec::new();
        for &from in &layers[t] {
            for &to in &layers[t + 1] {
                if connects(from, to, direction) {
                    arrows.push((from, to));
                }
            }
        }
        let ops = arrows
            .iter()
            .map(|&(from, to)| {
                let fan_out = arrows.iter().filter(|(f, _)| *f == from).count();
                let op = rotation_between(enc.state(from), enc.state(to), direction)
                    .with_labels(from, to)
                    .with_weight(Complex64::new(1.0 / (fan_out as f64).sqrt(), 0.0));
                ChartOp {
                    id: OpId {
                        transition: t,
                        from,
                        to,
                    },
                    op,
                }
            })
            .collect();
        transitions.push(Transition {
            index: t,
            direction,
            ops,
        });
    }
    RoutingChart {
        n,
        start_city: s,
        layers,
        transitions,
    }
}

/// Up arrows climb the meridian of their source city; down arrows descend to
/// the equator state of the destination city.
fn connects(from: StateLabel, to: StateLabel, direction: Direction) -> bool {
    match (from, to, direction) {
        (StateLabel::City { i: a, j: b }, StateLabel::City { i: c, .. }, Direction::Up) => {
            a == b && c == a
        }
        (StateLabel::City { j: b, .. }, StateLabel::City { i: c, j: d }, Direction::Down) => {
            c == d && b == c
        }
        _ => false,
    }
}

impl RoutingChart {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start_city(&self) -> usize {
        self.start_city
    }

    pub fn ops(&self) -> impl Iterator<Item = &ChartOp> {
        self.transitions.iter().flat_map(|t| t.ops.iter())
    }

    pub fn up_ops(&self) -> impl Iterator<Item = &ChartOp> {
        self.ops().filter(|o| o.op.direction == Direction::Up)
    }

    pub fn down_ops(&self) -> impl Iterator<Item = &ChartOp> {
        self.ops().filter(|o| o.op.direction == Direction::Down)
    }

    pub fn up_transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions
            .iter()
            .filter(|t| t.direction == Direction::Up)
    }

    pub fn find(&self, id: &OpId) -> Option<&ChartOp> {
        self.transitions
            .get(id.transition)?
            .ops
            .iter()
            .find(|o| o.id == *id)
    }

    /// Chart holding only the arrows of `t`, each with unit weight.
    pub fn single_path(&self, t: &Tour) -> Result<RoutingChart> {
        if t.len() != self.n || t.start() != self.start_city {
            return Err(Error::InvalidTour(format!(
                "tour {t} does not start at city {} of a {}-city chart",
                self.start_city + 1,
                self.n
            )));
        }
        let path = classical_path_ops(t);
        let transitions = self
            .transitions
            .iter()
            .zip(&path)
            .map(|(tr, id)| {
                let op = self.find(id).expect("classical arrows belong to the chart");
                Transition {
                    index: tr.index,
                    direction: tr.direction,
                    ops: vec![ChartOp {
                        id: *id,
                        op: op.op.clone().with_weight(Complex64::new(1.0, 0.0)),
                    }],
                }
            })
            .collect();
        Ok(RoutingChart {
            n: self.n,
            start_city: self.start_city,
            layers: self.layers.clone(),
            transitions,
        })
    }
}

/// Expands a tour into its `2n + 1` state labels.
pub fn classical_path_labels(t: &Tour) -> Vec<StateLabel> {
    let order = t.order();
    let n = order.len();
    let mut labels = Vec::with_capacity(2 * n + 1);
    for k in 0..n {
        let (a, b) = (order[k], order[(k + 1) % n]);
        labels.push(StateLabel::city(a, a));
        labels.push(StateLabel::city(a, b));
    }
    labels.push(StateLabel::city(order[0], order[0]));
    labels
}

/// Labels of every arrow used by a tour, keyed by transition index.
pub fn classical_path_ops(t: &Tour) -> Vec<OpId> {
    classical_path_labels(t)
        .windows(2)
        .enumerate()
        .map(|(k, w)| OpId {
            transition: k,
            from: w[0],
            to: w[1],
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StateDump {
    pub label: StateLabel,
    pub kind: LabelKind,
    pub xi: f64,
    pub phi: f64,
    pub amplitudes: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorDump {
    pub layer: usize,
    pub direction: Direction,
    pub from: StateLabel,
    pub to: StateLabel,
    pub axis: [f64; 3],
    pub angle: f64,
    pub weight: [f64; 2],
}

/// Serializable view of an encoding and its operator catalog.
#[derive(Debug, Clone, Serialize)]
pub struct EncodingDump {
    pub n: usize,
    pub start_city: usize,
    pub scale: f64,
    pub headroom: f64,
    pub start_azimuth: f64,
    pub convention: PhaseConvention,
    pub states: Vec<StateDump>,
    pub operators: Vec<OperatorDump>,
    pub up_count: usize,
    pub down_count: usize,
    pub warnings: Vec<EncodingWarning>,
}

impl EncodingDump {
    pub fn new(enc: &BlochEncoding, chart: &RoutingChart) -> Self {
        let states = enc
            .all()
            .map(|p| StateDump {
                label: p.label,
                kind: p.label.kind(),
                xi: p.point.xi,
                phi: p.point.phi,
                amplitudes: [
                    [p.state.a0().re, p.state.a0().im],
                    [p.state.a1().re, p.state.a1().im],
                ],
            })
            .collect();
        let operators = chart
            .ops()
            .map(|o| OperatorDump {
                layer: o.id.transition,
                direction: o.op.direction,
                from: o.id.from,
                to: o.id.to,
                axis: o.op.axis(),
                angle: o.op.angle(),
                weight: [o.op.weight.re, o.op.weight.im],
            })
            .collect();
        Self {
            n: enc.n(),
            start_city: enc.start_city() + 1,
            scale: enc.scale(),
            headroom: enc.config().headroom,
            start_azimuth: enc.config().start_azimuth,
            convention: enc.config().convention,
            states,
            operators,
            up_count: chart.up_ops().count(),
            down_count: chart.down_ops().count(),
            warnings: enc.warnings().to_vec(),
        }
    }
}
