//! Spin correlation functions and the Bell statistic
//! `B_S = |E(θ1,θ2) − E(θ1,θ2′) + E(θ1′,θ2) + E(θ1′,θ2′)|`.
//!
//! Pauli conventions on a qubit `{|0⟩, |1⟩}`:
//! `σx = |0⟩⟨1| + |1⟩⟨0|`, `σy = −i|0⟩⟨1| + i|1⟩⟨0|`, `σz = |1⟩⟨1| − |0⟩⟨0|`.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use ndarray::Array2;
use serde::Serialize;

use crate::protocols::{rotation_operator, RotationSpec};
use crate::{Error, HilbertDims, OperatorMatrix, Result, StateVector, C64};

const NORM_TOL: f64 = 1e-9;
/// Slack allowed on `|E| ≤ 1` for round-off.
const RANGE_TOL: f64 = 1e-12;

fn qubit_op(m: [[C64; 2]; 2]) -> OperatorMatrix {
    let a = Array2::from_shape_fn((2, 2), |(i, j)| m[i][j]);
    OperatorMatrix::new(HilbertDims::qubit(), a).expect("2x2")
}

pub fn pauli_x() -> OperatorMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    qubit_op([[o, l], [l, o]])
}

pub fn pauli_y() -> OperatorMatrix {
    let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    qubit_op([[o, -i], [i, o]])
}

pub fn pauli_z() -> OperatorMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    qubit_op([[-l, o], [o, l]])
}

/// `cos θ σx + sin θ σy`.
pub fn sigma_theta(theta: f64) -> OperatorMatrix {
    pauli_x() * theta.cos() + pauli_y() * theta.sin()
}

/// Equally spaced analyzer angles: `θ1 = ϑ`, `θ2 = 0`, `θ1′ = −ϑ`,
/// `θ2′ = −2ϑ`, so that consecutive differences are `ϑ` and
/// `θ1 − θ2′ = 3ϑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleScheme {
    pub vartheta: f64,
}

impl AngleScheme {
    pub fn new(vartheta: f64) -> Self {
        Self { vartheta }
    }

    pub fn theta1(&self) -> f64 {
        self.vartheta
    }

    pub fn theta2(&self) -> f64 {
        0.0
    }

    pub fn theta1_prime(&self) -> f64 {
        -self.vartheta
    }

    pub fn theta2_prime(&self) -> f64 {
        -2.0 * self.vartheta
    }

    /// Angle pairs in [`bell_s`] order.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        let (a, b, ap, bp) = (
            self.theta1(),
            self.theta2(),
            self.theta1_prime(),
            self.theta2_prime(),
        );
        [(a, b), (a, bp), (ap, b), (ap, bp)]
    }
}

fn check_pair_state(state: &StateVector) -> Result<()> {
    if state.dims() != HilbertDims::qubit_pair() {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.dims().dim(),
        });
    }
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "two-qubit state not normalized (norm² = {n})"
        )));
    }
    Ok(())
}

/// `⟨σθ1 ⊗ σθ2⟩` on a normalized two-qubit state.
pub fn correlation_expectation(state: &StateVector, theta1: f64, theta2: f64) -> Result<f64> {
    check_pair_state(state)?;
    let op = sigma_theta(theta1).kron_atoms(&sigma_theta(theta2))?;
    Ok(state.inner(&op.apply(state)?)?.re)
}

/// The same correlation measured by rotating each atom with
/// `U(π/4, 3π/2 − θ)` and reading out `σz ⊗ σz`.
pub fn correlation_via_rotations(state: &StateVector, theta1: f64, theta2: f64) -> Result<f64> {
    check_pair_state(state)?;
    let rotated = measurement_rotation(theta1, theta2)?.apply(state)?;
    let zz = pauli_z().kron_atoms(&pauli_z())?;
    Ok(rotated.inner(&zz.apply(&rotated)?)?.re)
}

/// `U(π/4, 3π/2 − θ1) ⊗ U(π/4, 3π/2 − θ2)`.
pub fn measurement_rotation(theta1: f64, theta2: f64) -> Result<OperatorMatrix> {
    let u = |t: f64| rotation_operator(RotationSpec::new(FRAC_PI_4, 1.5 * PI - t));
    u(theta1).kron_atoms(&u(theta2))
}

/// `E(ϑ, 0) = −|α|² cos ϑ` for the prepared superposition.
pub fn correlation_analytic(alpha: C64, vartheta: f64) -> f64 {
    -alpha.norm_sqr() * vartheta.cos()
}

pub fn bell_s(e: [f64; 4]) -> Result<f64> {
    if let Some(bad) = e.iter().find(|x| !(x.abs() <= 1.0 + RANGE_TOL)) {
        return Err(Error::Domain(format!("correlation {bad} outside [-1, 1]")));
    }
    Ok((e[0] - e[1] + e[2] + e[3]).abs())
}

/// `|3E(ϑ) − E(3ϑ)|` with the analytic correlation.
pub fn bell_s_simplified(alpha: C64, vartheta: f64) -> f64 {
    (3.0 * correlation_analytic(alpha, vartheta) - correlation_analytic(alpha, 3.0 * vartheta))
        .abs()
}

/// Observed statistic when a fraction `1 − p0` of runs are undetected
/// failures contributing zero correlation.
pub fn observed_bell_with_failures(p0: f64, b_ideal: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain(format!(
            "success probability {p0} outside [0, 1]"
        )));
    }
    Ok(p0 * b_ideal)
}

/// Regular grid over `(|Ω⁻|T, ϑ) ∈ [0, x_max] × [0, y_max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellGrid {
    pub n_x: usize,
    pub n_y: usize,
    pub x_max: f64,
    pub y_max: f64,
}

impl Default for BellGrid {
    fn default() -> Self {
        Self {
            n_x: 201,
            n_y: 201,
            x_max: 2.0 * PI,
            y_max: PI,
        }
    }
}

impl BellGrid {
    pub fn x(&self, i: usize) -> f64 {
        self.x_max * i as f64 / (self.n_x - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_max * j as f64 / (self.n_y - 1) as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BellScanResult {
    pub grid: BellGrid,
    pub alpha_model: &'static str,
    /// `values[[i, j]] = B_S(x_i, ϑ_j)`.
    pub values: Array2<f64>,
}

impl BellScanResult {
    /// Cells within `tol` of the global maximum, in row-major order.
    pub fn maxima(&self, tol: f64) -> Vec<(usize, usize, f64)> {
        let best = self
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        self.values
            .indexed_iter()
            .filter(|(_, v)| **v >= best - tol)
            .map(|((i, j), v)| (i, j, *v))
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of cells with `B_S > 2`.
    pub fn violation_fraction(&self) -> f64 {
        self.values.iter().filter(|v| **v > 2.0).count() as f64 / self.values.len() as f64
    }
}

/// `B_S` over the grid with `α = −i sin(|Ω⁻|T/2)` (real positive `Ω⁻`).
pub fn bell_surface(grid: BellGrid) -> Result<BellScanResult> {
    if grid.n_x < 2 || grid.n_y < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs ≥ 2 points per axis, got {}×{}",
            grid.n_x, grid.n_y
        )));
    }
    let values = Array2::from_shape_fn((grid.n_x, grid.n_y), |(i, j)| {
        let alpha = crate::protocols::expected_alpha(C64::new(1.0, 0.0), grid.x(i));
        bell_s_simplified(alpha, grid.y(j))
    });
    Ok(BellScanResult {
        grid,
        alpha_model: "alpha = -i sin(x/2)",
        values,
    })
}

/// `2√2`, the largest value quantum correlations allow.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
