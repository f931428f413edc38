//! Dense matrix-exponential oracle for cross-checking [`crate::propagate`].
//!
//! Backed by nalgebra's Padé scaling-and-squaring `exp`, which shares no code
//! path with the RK4 powering engine.

use crate::{Error, OperatorMatrix, Result, StateVector, C64};

/// Largest dimension the dense oracle accepts.
pub const MAX_ORACLE_DIM: usize = 4096;

/// `exp(−iHt)|ψ⟩` by dense Padé exponentiation.
pub fn expm_oracle(h: &OperatorMatrix, t: f64, psi: &StateVector) -> Result<StateVector> {
    let dims = h.dims();
    if dims != psi.dims() {
        return Err(Error::DimensionMismatch {
            expected: dims.dim(),
            found: psi.dims().dim(),
        });
    }
    if dims.dim() > MAX_ORACLE_DIM {
        return Err(Error::InvalidArgument(format!(
            "oracle dimension {} exceeds {MAX_ORACLE_DIM}",
            dims.dim()
        )));
    }
    let u = expm_matrix(h, t)?;
    u.apply(psi)
}

/// `exp(−iHt)` as an operator.
pub fn expm_matrix(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if !h.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("oracle input"));
    }
    let a = h.to_nalgebra() * C64::new(0.0, -t);
    let u = a.exp();
    let d = h.dims().dim();
    OperatorMatrix::new(
        h.dims(),
        ndarray::Array2::from_shape_fn((d, d), |(i, j)| u[(i, j)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::HilbertDims;
    use std::f64::consts::PI;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let d = HilbertDims::cavity_pair(1, 2).unwrap();
        let psi = StateVector::from_labels(
            d,
            &[
                ((1, 0, 1), C64::new(0.6, 0.0)),
                ((0, 1, 1), C64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        let out = expm_oracle(&OperatorMatrix::zeros(d), 5.0, &psi).unwrap();
        assert!(out.max_abs_diff(&psi).unwrap() < 1e-15);
    }

    #[test]
    fn pi_sigma_x_gives_minus_identity() {
        let q = HilbertDims::qubit();
        let sx = OperatorMatrix::transition(q, 0, 0, 1).unwrap()
            + OperatorMatrix::transition(q, 0, 1, 0).unwrap();
        let psi = StateVector::basis(q, 0, 0, 0).unwrap();
        let out = expm_oracle(&(sx * PI), 1.0, &psi).unwrap();
        assert!((out.amps()[0] + C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(out.amps()[1].norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let h = OperatorMatrix::zeros(HilbertDims::qubit());
        let psi = StateVector::zeros(HilbertDims::qubit_pair());
        assert!(matches!(
            expm_oracle(&h, 1.0, &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
