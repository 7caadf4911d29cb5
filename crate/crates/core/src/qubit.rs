//! Two-level complex state algebra: pure states, Bloch coordinates and SU(2)
//! rotations.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::StateLabel;
use crate::error::{Error, Result};

/// Threshold below which a weighted sum is considered annihilated.
pub const DEGENERATE_NORM: f64 = 1e-14;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized single-qubit pure state `a0|0> + a1|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    a0: Complex64,
    a1: Complex64,
}

impl QubitState {
    /// Normalizes the given amplitudes.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        UnnormalizedState::new(a0, a1).normalize()
    }

    pub fn zero() -> Self {
        Self { a0: ONE, a1: ZERO }
    }

    pub fn one() -> Self {
        Self { a0: ZERO, a1: ONE }
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &QubitState) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &QubitState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Equality up to global phase.
    pub fn same_ray(&self, other: &QubitState, tol: f64) -> bool {
        self.fidelity(other) > 1.0 - tol
    }

    /// Expectation values of the Pauli triple.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let c = self.a0.conj() * self.a1;
        [
            2.0 * c.re,
            2.0 * c.im,
            self.a0.norm_sqr() - self.a1.norm_sqr(),
        ]
    }

    /// Multiplies by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            a0: self.a0 * p,
            a1: self.a1 * p,
        }
    }

    pub fn to_unnormalized(self) -> UnnormalizedState {
        UnnormalizedState::new(self.a0, self.a1)
    }
}

/// Result of a linear combination of states before renormalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnnormalizedState {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl UnnormalizedState {
    pub fn new(a0: Complex64, a1: Complex64) -> Self {
        Self { a0, a1 }
    }

    pub fn zero() -> Self {
        Self { a0: ZERO, a1: ZERO }
    }

    pub fn norm(&self) -> f64 {
        (self.a0.norm_sqr() + self.a1.norm_sqr()).sqrt()
    }

    pub fn add_scaled(&mut self, weight: Complex64, v: [Complex64; 2]) {
        self.a0 += weight * v[0];
        self.a1 += weight * v[1];
    }

    pub fn normalize(&self) -> Result<QubitState> {
        let norm = self.norm();
        if !norm.is_finite() || norm <= DEGENERATE_NORM {
            return Err(Error::DegenerateOutput { norm });
        }
        Ok(QubitState {
            a0: self.a0 / norm,
            a1: self.a1 / norm,
        })
    }
}

/// How the azimuth enters the `|1>` amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `cos(xi/2)|0> + e^{i phi} sin(xi/2)|1>`; the Bloch azimuth equals `phi`.
    #[default]
    Standard,
    /// `cos(xi/2)|0> + e^{i phi/2} sin(xi/2)|1>`; the Bloch azimuth is `phi/2`.
    HalfAzimuth,
}

/// Spherical coordinates of a point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    /// Polar angle in `[0, pi]`.
    pub xi: f64,
    /// Azimuth in `(-pi, pi]`, reported as 0 at the poles.
    pub phi: f64,
}

impl BlochPoint {
    pub fn new(xi: f64, phi: f64) -> Self {
        let xi = xi.clamp(0.0, PI);
        let phi = if xi.sin().abs() < 1e-12 {
            0.0
        } else {
            wrap_azimuth(phi)
        };
        Self { xi, phi }
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let s = self.xi.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.xi.cos()]
    }

    pub fn from_cartesian(v: [f64; 3]) -> Self {
        let r = norm3(v);
        let z = if r > 0.0 { v[2] / r } else { 1.0 };
        let xi = z.clamp(-1.0, 1.0).acos();
        let phi = if (v[0] * v[0] + v[1] * v[1]).sqrt() < 1e-12 * r.max(1.0) {
            0.0
        } else {
            v[1].atan2(v[0])
        };
        Self::new(xi, phi)
    }
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_azimuth(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

pub fn state_from_bloch(p: BlochPoint, convention: PhaseConvention) -> QubitState {
    let half = p.xi / 2.0;
    let phase = match convention {
        PhaseConvention::Standard => p.phi,
        PhaseConvention::HalfAzimuth => p.phi / 2.0,
    };
    QubitState {
        a0: Complex64::new(half.cos(), 0.0),
        a1: Complex64::from_polar(half.sin(), phase),
    }
}

/// Inverse of [`state_from_bloch`] under the standard convention, computed
/// from the Pauli expectation values.
pub fn bloch_from_state(s: &QubitState) -> BlochPoint {
    BlochPoint::from_cartesian(s.bloch_vector())
}

/// Rotation toward (`Up`) or away from (`Down`) the pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// A weighted SU(2) rotation `cos(d/2) I - i sin(d/2) n.sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationOp {
    axis: [f64; 3],
    angle: f64,
    pub direction: Direction,
    pub labels: Option<(StateLabel, StateLabel)>,
    pub weight: Complex64,
    matrix: Matrix2,
}

impl RotationOp {
    pub fn new(axis: [f64; 3], angle: f64, direction: Direction) -> Result<Self> {
        let r = norm3(axis);
        if !(r.is_finite() && r > 1e-12) || !angle.is_finite() {
            return Err(Error::InvalidParams(format!(
                "rotation axis {axis:?} / angle {angle} not usable"
            )));
        }
        let axis = [axis[0] / r, axis[1] / r, axis[2] / r];
        Ok(Self {
            axis,
            angle,
            direction,
            labels: None,
            weight: ONE,
            matrix: rotation_matrix(axis, angle),
        })
    }

    pub fn identity() -> Self {
        Self::new([0.0, 0.0, 1.0], 0.0, Direction::Up).expect("unit axis")
    }

    pub fn with_labels(mut self, from: StateLabel, to: StateLabel) -> Self {
        self.labels = Some((from, to));
        self
    }

    pub fn with_weight(mut self, weight: Complex64) -> Self {
        self.weight = weight;
        self
    }

    /// Same axis, new angle.
    pub fn with_angle(&self, angle: f64) -> Self {
        Self {
            angle,
            matrix: rotation_matrix(self.axis, angle),
            ..self.clone()
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn matrix(&self) -> Matrix2 {
        self.matrix
    }

    /// `U|s>` without renormalization.
    pub fn act(&self, s: &QubitState) -> [Complex64; 2] {
        mat_vec(&self.matrix, [s.a0, s.a1])
    }
}

pub fn rotation_matrix(axis: [f64; 3], angle: f64) -> Matrix2 {
    let (s, c) = (angle / 2.0).sin_cos();
    let [n1, n2, n3] = axis;
    [
        [Complex64::new(c, -s * n3), Complex64::new(-s * n2, -s * n1)],
        [Complex64::new(s * n2, -s * n1), Complex64::new(c, s * n3)],
    ]
}

pub fn mat_vec(m: &Matrix2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(m: &Matrix2) -> Matrix2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// Rotation carrying the Bloch vector of `from` onto that of `to`.
///
/// Parallel vectors give the identity about `z`; antiparallel vectors rotate by
/// the full angle about `from x z`, or about `x` when `from` lies on the z axis.
pub fn rotation_between(from: &QubitState, to: &QubitState, direction: Direction) -> RotationOp {
    let a = from.bloch_vector();
    let b = to.bloch_vector();
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
    let angle = dot.acos();
    let cross = cross3(a, b);
    let axis = if norm3(cross) > 1e-12 {
        cross
    } else if dot > 0.0 {
        return RotationOp::new([0.0, 0.0, 1.0], 0.0, direction).expect("unit axis");
    } else {
        let c = cross3(a, [0.0, 0.0, 1.0]);
        if norm3(c) > 1e-12 {
            c
        } else {
            [1.0, 0.0, 0.0]
        }
    };
    RotationOp::new(axis, angle, direction).expect("non-degenerate axis")
}

/// `U|s>`, renormalized.
pub fn apply(op: &RotationOp, s: &QubitState) -> QubitState {
    let [a0, a1] = op.act(s);
    UnnormalizedState::new(a0, a1)
        .normalize()
        .expect("unitary preserves norm")
}

/// `sum_k w_k U_k |s>` without normalization.
pub fn apply_weighted_sum(ops: &[RotationOp], s: &QubitState) -> Result<UnnormalizedState> {
    if ops.is_empty() {
        return Err(Error::InvalidParams("empty operator list".into()));
    }
    let mut acc = UnnormalizedState::zero();
    for op in ops {
        acc.add_scaled(op.weight, op.act(s));
    }
    let norm = acc.norm();
    if norm <= DEGENERATE_NORM {
        return Err(Error::DegenerateOutput { norm });
    }
    Ok(acc)
}

pub fn overlap(a: &QubitState, b: &QubitState) -> Complex64 {
    a.overlap(b)
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
