//! Master-equation reference integrator, the ensemble-level oracle for the
//! trajectory code in [`crate::montecarlo`].
//!
//! `dρ/dt = −i(H ρ − ρ H†) + Σ_k r_k L_k ρ L_k†` with
//! `H = H_sys − (i/2) Σ_k r_k L_k† L_k`.
//!
//! Small spaces (`d ≤ 24`) build the `d² × d²` Liouvillian and reuse the RK4
//! powering of [`crate::propagate`]; larger ones step the matrix equation
//! directly with RK4.

use ndarray::{Array1, Array2};

use crate::propagate::{apply_power, rk4_step_increment};
use crate::{DensityMatrix, Error, OperatorMatrix, Result, C64};

const SUPEROPERATOR_MAX_DIM: usize = 24;
const STEP_SCALE: f64 = 1e-2;
const MIN_STEPS: u64 = 1000;

pub fn lindblad_reference(
    h_sys: &OperatorMatrix,
    jumps: &[(OperatorMatrix, f64)],
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let dims = h_sys.dims();
    if rho0.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims.dim(),
            found: rho0.dims().dim(),
        });
    }
    for (l, r) in jumps {
        if l.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims.dim(),
                found: l.dims().dim(),
            });
        }
        if !(*r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "jump rate must be finite and non-negative, got {r}"
            )));
        }
    }
    if !h_sys.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("master-equation input"));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "negative evolution time {t}"
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }

    let d = dims.dim();
    let mut h_eff = h_sys.entries().clone();
    for (l, r) in jumps {
        let ldl = l.dagger().entries().dot(l.entries());
        h_eff = h_eff - ldl.mapv(|z| z * C64::new(0.0, 0.5 * r));
    }
    let rate_scale = h_eff.iter().map(|z| z.norm()).fold(0.0, f64::max)
        + jumps
            .iter()
            .map(|(l, r)| r * l.max_abs().powi(2))
            .sum::<f64>();
    let steps = if rate_scale > 0.0 {
        (t * rate_scale / STEP_SCALE).ceil() as u64
    } else {
        0
    }
    .max(MIN_STEPS);
    let dt = t / steps as f64;

    let out = if d <= SUPEROPERATOR_MAX_DIM {
        let gen = liouvillian(&h_eff, jumps, d);
        // The increment is built for x' = −i G x; feed G = i·L.
        let step = rk4_step_increment(&gen.mapv(|z| z * C64::new(0.0, 1.0)), dt);
        let v: Array1<C64> = rho0.entries().iter().copied().collect();
        let v = apply_power(&step, steps, &v);
        Array2::from_shape_vec((d, d), v.to_vec()).expect("square reshape")
    } else {
        integrate_direct(&h_eff, jumps, rho0.entries(), dt, steps)
    };
    // Hermitize to remove the round-off drift of the anti-Hermitian part.
    let herm = Array2::from_shape_fn((d, d), |(i, j)| (out[[i, j]] + out[[j, i]].conj()) * 0.5);
    DensityMatrix::new(dims, herm)
}

/// Row-major `vec(ρ)` Liouvillian.
fn liouvillian(h_eff: &Array2<C64>, jumps: &[(OperatorMatrix, f64)], d: usize) -> Array2<C64> {
    let mi = C64::new(0.0, -1.0);
    let pi = C64::new(0.0, 1.0);
    let h_dag = h_eff.t().mapv(|z| z.conj());
    let mut gen = Array2::<C64>::zeros((d * d, d * d));
    let idx = |i: usize, j: usize| i * d + j;
    for i in 0..d {
        for j in 0..d {
            let row = idx(i, j);
            for k in 0..d {
                // −i H ρ
                gen[[row, idx(k, j)]] += mi * h_eff[[i, k]];
                // +i ρ H†
                gen[[row, idx(i, k)]] += pi * h_dag[[k, j]];
            }
        }
    }
    for (l, r) in jumps {
        let le = l.entries();
        for i in 0..d {
            for k in 0..d {
                let a = le[[i, k]];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    for m in 0..d {
                        gen[[idx(i, j), idx(k, m)]] += a * le[[j, m]].conj() * *r;
                    }
                }
            }
        }
    }
    gen
}

fn integrate_direct(
    h_eff: &Array2<C64>,
    jumps: &[(OperatorMatrix, f64)],
    rho0: &Array2<C64>,
    dt: f64,
    steps: u64,
) -> Array2<C64> {
    let h_dag = h_eff.t().mapv(|z| z.conj());
    let rhs = |rho: &Array2<C64>| {
        let mut out = (h_eff.dot(rho) - rho.dot(&h_dag)).mapv(|z| z * C64::new(0.0, -1.0));
        for (l, r) in jumps {
            let le = l.entries();
            out = out + le.dot(rho).dot(&le.t().mapv(|z| z.conj())).mapv(|z| z * *r);
        }
        out
    };
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &(&k1 * C64::new(dt / 2.0, 0.0))));
        let k3 = rhs(&(&rho + &(&k2 * C64::new(dt / 2.0, 0.0))));
        let k4 = rhs(&(&rho + &(&k3 * C64::new(dt, 0.0))));
        rho = rho
            + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(dt / 6.0, 0.0);
    }
    rho
}
