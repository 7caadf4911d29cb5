use num_complex::Complex64;
use serde::Serialize;

use crate::encoding::{BlochEncoding, ChartOp, RoutingChart, StateLabel, Transition};
use crate::error::{Error, Result};
use crate::noise::{perturb_operator, NoiseStream};
use crate::qubit::{
    apply, rotation_between, state_from_bloch, BlochPoint, Direction, QubitState, RotationOp,
    UnnormalizedState,
};

use super::params::{ParamMode, ProtocolParams, VariedValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerState {
    pub layer_index: usize,
    pub state: QubitState,
    /// Norm of the weighted sum before renormalization.
    pub pre_norm: f64,
}

impl LayerState {
    pub fn initial(enc: &BlochEncoding) -> Self {
        let s = enc.start_city();
        Self {
            layer_index: 0,
            state: *enc.state(StateLabel::city(s, s)),
            pre_norm: 1.0,
        }
    }
}

/// Rotation and weight actually applied for one arrow.
fn effective(
    op: &ChartOp,
    index: usize,
    over: Option<&VariedValue>,
    mode: ParamMode,
    noise: &mut NoiseStream,
) -> (RotationOp, Complex64) {
    let mut rot = match over {
        Some(v) if mode != ParamMode::Alpha => op.op.with_angle(op.op.angle() * v.multiplier),
        _ => op.op.clone(),
    };
    rot = perturb_operator(&rot, index, noise);
    let weight = match over {
        Some(v) if mode != ParamMode::Angle => v.weight(),
        _ => op.op.weight,
    };
    (rot, weight)
}

/// Catalog position of the first arrow of each transition.
fn offsets(chart: &RoutingChart) -> Vec<usize> {
    chart
        .transitions
        .iter()
        .scan(0, |acc, t| {
            let o = *acc;
            *acc += t.ops.len();
            Some(o)
        })
        .collect()
}

/// Applies the weighted sum of every arrow in `transition` to `g`.
/// `offset` is the catalog position of the transition's first arrow.
pub fn layer_step(
    g: &LayerState,
    transition: &Transition,
    offset: usize,
    params: &ProtocolParams,
    noise: &mut NoiseStream,
) -> Result<LayerState> {
    if g.layer_index != transition.index {
        return Err(Error::Precondition(format!(
            "state at layer {} cannot enter transition {}",
            g.layer_index, transition.index
        )));
    }
    let mut sum = UnnormalizedState::zero();
    for (k, op) in transition.ops.iter().enumerate() {
        let index = offset + k;
        let (rot, weight) = effective(op, index, params.lookup(index), params.mode(), noise);
        sum.add_scaled(weight, rot.act(&g.state));
    }
    let state = sum.normalize()?;
    Ok(LayerState {
        layer_index: g.layer_index + 1,
        state,
        pre_norm: sum.norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRun {
    /// States at layers `0..=2n-1`.
    pub layers: Vec<LayerState>,
}

impl ProtocolRun {
    pub fn penultimate(&self) -> &LayerState {
        self.layers.last().expect("run holds the initial layer")
    }

    pub fn pre_norms(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.pre_norm).collect()
    }
}

/// Evolves the start state through every transition up to layer `2n - 1`.
pub fn run_protocol(
    enc: &BlochEncoding,
    chart: &RoutingChart,
    params: &ProtocolParams,
    noise: &mut NoiseStream,
) -> Result<ProtocolRun> {
    if params.start_city() != chart.start_city() || enc.start_city() != chart.start_city() {
        return Err(Error::Precondition(
            "encoding, chart and parameters disagree on the start city".into(),
        ));
    }
    let offs = offsets(chart);
    let last = chart.transitions.len() - 1;
    let mut layers = Vec::with_capacity(last + 1);
    layers.push(LayerState::initial(enc));
    for (t, tr) in chart.transitions[..last].iter().enumerate() {
        let next = layer_step(&layers[t], tr, offs[t], params, noise)?;
        layers.push(next);
    }
    Ok(ProtocolRun { layers })
}

/// Final closure rotation onto layer `2n`; not used by the decode.
pub fn close_protocol(
    run: &ProtocolRun,
    chart: &RoutingChart,
    params: &ProtocolParams,
    noise: &mut NoiseStream,
) -> Result<LayerState> {
    let offs = offsets(chart);
    let last = chart.transitions.len() - 1;
    layer_step(run.penultimate(), &chart.transitions[last], offs[last], params, noise)
}

/// Closed-form image on meridian `target` of the component `P_{source,component}`
/// under the down rotation `P_{source,target} -> P_{target,target}`.
pub fn deviated_state(
    enc: &BlochEncoding,
    source: usize,
    target: usize,
    component: usize,
) -> QubitState {
    let xi = |i, j| enc.point(StateLabel::city(i, j)).xi;
    let kk = enc.point(StateLabel::city(target, target));
    let shifted = kk.xi + xi(source, component) - xi(source, target);
    state_from_bloch(BlochPoint::new(shifted, kk.phi), enc.config().convention)
}

/// Fidelity between the closed form and the exact rotation it describes.
pub fn deviated_state_fidelity(
    enc: &BlochEncoding,
    source: usize,
    target: usize,
    component: usize,
) -> f64 {
    let down = rotation_between(
        enc.state(StateLabel::city(source, target)),
        enc.state(StateLabel::city(target, target)),
        Direction::Down,
    );
    let exact = apply(&down, enc.state(StateLabel::city(source, component)));
    exact.fidelity(&deviated_state(enc, source, target, component))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrowIntensity {
    pub transition: usize,
    pub from: StateLabel,
    pub to: StateLabel,
    pub intensity: f64,
}

/// Share of each arrow in the population moved between adjacent layers.
/// An arrow carries amplitude `weight * <from|g>`; shares are normalized per
/// transition.
pub fn transfer_intensities(
    enc: &BlochEncoding,
    chart: &RoutingChart,
    params: &ProtocolParams,
    noise: &mut NoiseStream,
) -> Result<Vec<ArrowIntensity>> {
    let offs = offsets(chart);
    let mut g = LayerState::initial(enc);
    let mut out = Vec::new();
    for (t, tr) in chart.transitions.iter().enumerate() {
        let mut raw = Vec::with_capacity(tr.ops.len());
        let mut step = UnnormalizedState::zero();
        for (k, op) in tr.ops.iter().enumerate() {
            let index = offs[t] + k;
            let (rot, weight) = effective(op, index, params.lookup(index), params.mode(), noise);
            step.add_scaled(weight, rot.act(&g.state));
            let amp = weight * enc.state(op.id.from).overlap(&g.state);
            raw.push(amp.norm_sqr());
        }
        let total: f64 = raw.iter().sum();
        for (op, r) in tr.ops.iter().zip(raw) {
            out.push(ArrowIntensity {
                transition: t,
                from: op.id.from,
                to: op.id.to,
                intensity: if total > 0.0 { r / total } else { 0.0 },
            });
        }
        g = LayerState {
            layer_index: t + 1,
            state: step.normalize()?,
            pre_norm: step.norm(),
        };
    }
    Ok(out)
}

pub fn intensities_csv(rows: &[ArrowIntensity]) -> String {
    let mut out = String::from("layer,from,to,intensity\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.transition, r.from, r.to, r.intensity));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding, build_routing_chart, classical_path_ops, EncodingConfig, OpId};
    use crate::fixtures;
    use crate::noise::{NoiseConfig, NoiseMode};
    use crate::tsp::{random_instance, Tour};
    use approx::assert_abs_diff_eq;

    fn setup(m: &crate::tsp::CostMatrix) -> (BlochEncoding, RoutingChart) {
        let enc = build_encoding(m, &EncodingConfig::default()).unwrap();
        let chart = build_routing_chart(&enc);
        (enc, chart)
    }

    fn no_params(chart: &RoutingChart) -> ProtocolParams {
        ProtocolParams::nominal(chart, &[], ParamMode::Alpha).unwrap()
    }

    #[test]
    fn first_layer_matches_weighted_sum() {
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let p = no_params(&chart);
        let g1 = layer_step(
            &LayerState::initial(&enc),
            &chart.transitions[0],
            0,
            &p,
            &mut NoiseStream::silent(),
        )
        .unwrap();
        // Each up arrow maps P11 exactly onto P1j, so g1 is the normalized
        // sum of those states with equal weights.
        let mut a0 = Complex64::new(0.0, 0.0);
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut phases = Vec::new();
        for j in 1..4 {
            let op = &chart.transitions[0].ops[j - 1];
            let img = op.op.act(enc.state(StateLabel::city(0, 0)));
            let target = enc.state(StateLabel::city(0, j));
            let ph = img[0] / target.a0();
            phases.push(ph);
            a0 += img[0];
            a1 += img[1];
        }
        for ph in &phases {
            assert_abs_diff_eq!(ph.norm(), 1.0, epsilon = 1e-12);
        }
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        assert_abs_diff_eq!((g1.state.a0() - a0 / norm).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((g1.state.a1() - a1 / norm).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(g1.layer_index, 1);
    }

    #[test]
    fn penultimate_index() {
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let run = run_protocol(&enc, &chart, &no_params(&chart), &mut NoiseStream::silent()).unwrap();
        assert_eq!(run.penultimate().layer_index, 7);
        assert_eq!(run.layers.len(), 8);
        let again = run_protocol(&enc, &chart, &no_params(&chart), &mut NoiseStream::silent()).unwrap();
        assert_eq!(run, again);
    }

    #[test]
    fn single_path_reproduces_traversal() {
        for n in 3..=7 {
            let m = random_instance(n, false, n as u64).unwrap();
            let (enc, chart) = setup(&m);
            let mut order: Vec<usize> = (0..n).collect();
            order[1..].reverse();
            let t = Tour::new(order, n).unwrap();
            let path = chart.single_path(&t).unwrap();
            let run = run_protocol(&enc, &path, &no_params(&path), &mut NoiseStream::silent()).unwrap();
            let last = t.order()[n - 1];
            let expected = enc.state(StateLabel::city(last, 0));
            assert!(run.penultimate().state.fidelity(expected) > 1.0 - 1e-12);
            let closed = close_protocol(&run, &path, &no_params(&path), &mut NoiseStream::silent()).unwrap();
            assert!(closed.state.fidelity(enc.state(StateLabel::city(0, 0))) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn zero_weights_leave_one_arrow() {
        // Varying every arrow of the first transition and zeroing all but one
        // reduces that layer to a pure rotation.
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let ids: Vec<OpId> = chart.transitions[0].ops.iter().map(|o| o.id).collect();
        let mut p = ProtocolParams::nominal(&chart, &ids, ParamMode::Alpha).unwrap();
        p.values_mut()[0].magnitude = 1.0;
        p.values_mut()[1].magnitude = 0.0;
        p.values_mut()[2].magnitude = 0.0;
        let g1 = layer_step(&LayerState::initial(&enc), &chart.transitions[0], 0, &p, &mut NoiseStream::silent())
            .unwrap();
        assert!(g1.state.fidelity(enc.state(StateLabel::city(0, 1))) > 1.0 - 1e-12);
    }

    #[test]
    fn cancelling_weights_degenerate() {
        let m = fixtures::cm4();
        let enc = build_encoding(&m, &EncodingConfig::default()).unwrap();
        let base = build_routing_chart(&enc);
        let op = base.transitions[0].ops[0].clone();
        let mut twin = op.clone();
        twin.id.to = StateLabel::city(0, 2);
        let mut chart = base.clone();
        chart.transitions = vec![Transition {
            index: 0,
            direction: Direction::Up,
            ops: vec![
                ChartOp {
                    op: op.op.clone().with_weight(Complex64::new(0.5, 0.0)),
                    ..op.clone()
                },
                ChartOp {
                    op: op.op.clone().with_weight(Complex64::new(-0.5, 0.0)),
                    ..twin
                },
            ],
        }];
        let p = ProtocolParams::nominal(&chart, &[], ParamMode::Alpha).unwrap();
        let r = layer_step(&LayerState::initial(&enc), &chart.transitions[0], 0, &p, &mut NoiseStream::silent());
        assert!(matches!(r, Err(Error::DegenerateOutput { .. })));
    }

    #[test]
    fn angle_mode_changes_rotation() {
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let ids: Vec<OpId> = chart.transitions[0].ops.iter().map(|o| o.id).collect();
        let p = ProtocolParams::nominal(&chart, &ids, ParamMode::Angle).unwrap();
        let x = vec![1.0, 0.0, 0.0];
        let q = p.with_vector(&x).unwrap();
        let g = layer_step(&LayerState::initial(&enc), &chart.transitions[0], 0, &q, &mut NoiseStream::silent())
            .unwrap();
        let nominal = layer_step(&LayerState::initial(&enc), &chart.transitions[0], 0, &p, &mut NoiseStream::silent())
            .unwrap();
        assert!(g.state.fidelity(&nominal.state) < 1.0 - 1e-6);
    }

    #[test]
    fn noise_off_bit_identical() {
        let m = random_instance(5, true, 1).unwrap();
        let (enc, chart) = setup(&m);
        let p = no_params(&chart);
        let a = run_protocol(&enc, &chart, &p, &mut NoiseStream::silent()).unwrap();
        let mut off = NoiseStream::new(&NoiseConfig::off(), 88, 3, 4);
        let b = run_protocol(&enc, &chart, &p, &mut off).unwrap();
        assert_eq!(a, b);
        let cfg = NoiseConfig::new(NoiseMode::PerApplication, 0.001, 1).unwrap();
        let c = run_protocol(&enc, &chart, &p, &mut NoiseStream::new(&cfg, 88, 0, 0)).unwrap();
        assert_ne!(a, c);
        assert!(a.penultimate().state.fidelity(&c.penultimate().state) > 0.99);
    }

    #[test]
    fn deviated_state_closed_form() {
        let m = fixtures::cm4();
        let enc = build_encoding(&m, &EncodingConfig::default()).unwrap();
        let p22 = enc.state(StateLabel::city(1, 1));
        assert!(deviated_state(&enc, 0, 1, 1).fidelity(p22) > 1.0 - 1e-15);
        let same = CostMatrixBuilder::equal_row();
        let enc2 = build_encoding(&same, &EncodingConfig::default()).unwrap();
        let p = enc2.state(StateLabel::city(1, 1));
        assert!(deviated_state(&enc2, 0, 1, 2).fidelity(p) > 1.0 - 1e-15);
        let f = deviated_state_fidelity(&enc, 0, 1, 2);
        assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    struct CostMatrixBuilder;
    impl CostMatrixBuilder {
        fn equal_row() -> crate::tsp::CostMatrix {
            crate::tsp::CostMatrix::from_rows(&[
                vec![0.0, 0.4, 0.4, 0.6],
                vec![0.4, 0.0, 0.5, 0.7],
                vec![0.4, 0.5, 0.0, 0.8],
                vec![0.6, 0.7, 0.8, 0.0],
            ])
            .unwrap()
        }
    }

    #[test]
    fn intensities_follow_single_path() {
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let t = Tour::from_labels(&[1, 3, 2, 4], 4).unwrap();
        let path = chart.single_path(&t).unwrap();
        let rows = transfer_intensities(&enc, &path, &no_params(&path), &mut NoiseStream::silent()).unwrap();
        assert_eq!(rows.len(), 8);
        let ids = classical_path_ops(&t);
        for (r, id) in rows.iter().zip(&ids) {
            assert_eq!((r.from, r.to), (id.from, id.to));
            assert_abs_diff_eq!(r.intensity, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn intensities_sum_to_one_and_leak() {
        let m = fixtures::cm4();
        let (enc, chart) = setup(&m);
        let rows = transfer_intensities(&enc, &chart, &no_params(&chart), &mut NoiseStream::silent()).unwrap();
        assert_eq!(rows.len(), 36);
        for t in 0..8 {
            let s: f64 = rows.iter().filter(|r| r.transition == t).map(|r| r.intensity).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
        // Every arrow, including those off the optimal cycle, carries population.
        assert!(rows.iter().all(|r| r.intensity > 1e-6));
        let csv = intensities_csv(&rows);
        assert!(csv.starts_with("layer,from,to,intensity\n"));
    }
}
