//! Waiting-time quantum-jump unraveling.
//!
//! Between jumps the unnormalized state follows `exp(−iHt)` and its squared
//! norm decays monotonically; a jump fires when it crosses a uniform
//! threshold. The crossing is bracketed on a coarse step grid and then
//! located by bisection with precomputed propagators for `dt / 2^k`.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::propagate::propagator;
use crate::{Error, OperatorMatrix, Result, StateVector, C64};

const COARSE_STEPS: usize = 64;
/// Bisection depth: jump times are resolved to `dt · 2^-40`.
const DESCENT_LEVELS: usize = 40;
const CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Normalized state at the end of the window.
    pub final_state: StateVector,
    /// `(time, channel index)` of every jump, in order.
    pub jump_times: Vec<(f64, usize)>,
    pub survived: bool,
}

/// Precomputed propagators for repeated trajectories of one model.
#[derive(Debug, Clone)]
pub struct TrajectorySimulator {
    h: OperatorMatrix,
    jumps: Vec<(OperatorMatrix, f64)>,
    t: f64,
    dt: f64,
    step: Array2<C64>,
    /// `descent[k] = U(dt / 2^(k+1))`.
    descent: Vec<Array2<C64>>,
}

impl TrajectorySimulator {
    /// Fails unless `H − H† = −i Σ r L†L`.
    pub fn new(h: OperatorMatrix, jumps: Vec<(OperatorMatrix, f64)>, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "trajectory window must be ≥ 0, got {t}"
            )));
        }
        let mut loss = OperatorMatrix::zeros(h.dims());
        for (l, r) in &jumps {
            if l.dims() != h.dims() {
                return Err(Error::DimensionMismatch {
                    expected: h.dims().dim(),
                    found: l.dims().dim(),
                });
            }
            if !(*r >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "jump rate must be ≥ 0, got {r}"
                )));
            }
            loss = loss + l.dagger().matmul(l)? * *r;
        }
        let anti = h.clone() - h.dagger();
        let mismatch = anti.max_abs_diff(&(loss * C64::new(0.0, -1.0)))?;
        let scale = h.max_abs().max(1.0);
        if mismatch > CONSISTENCY_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "decay part of the Hamiltonian does not match the jump operators (mismatch {mismatch:.3e})"
            )));
        }
        let dt = t / COARSE_STEPS as f64;
        let step = propagator(&h, dt)?.into_entries();
        let mut descent = Vec::with_capacity(DESCENT_LEVELS);
        let mut sub = dt;
        for _ in 0..DESCENT_LEVELS {
            sub /= 2.0;
            descent.push(propagator(&h, sub)?.into_entries());
        }
        Ok(Self {
            h,
            jumps,
            t,
            dt,
            step,
            descent,
        })
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.h
    }

    pub fn window(&self) -> f64 {
        self.t
    }

    /// Advance by `span ≤ dt`, composing the dyadic propagators.
    fn advance_partial(&self, v: &Array1<C64>, span: f64) -> Array1<C64> {
        let mut out = v.clone();
        let mut remaining = span;
        let mut sub = self.dt;
        for u in &self.descent {
            sub /= 2.0;
            if remaining >= sub {
                out = u.dot(&out);
                remaining -= sub;
            }
        }
        out
    }

    pub fn run<R: Rng + ?Sized>(
        &self,
        psi0: &StateVector,
        rng: &mut R,
    ) -> Result<TrajectoryRecord> {
        if psi0.dims() != self.h.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.h.dims().dim(),
                found: psi0.dims().dim(),
            });
        }
        let dims = psi0.dims();
        let mut phi = psi0.normalized()?.into_amps();
        let mut now = 0.0;
        let mut threshold: f64 = rng.random();
        let mut jump_times = Vec::new();
        let norm = |v: &Array1<C64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        while now < self.t {
            let span = (self.t - now).min(self.dt);
            let full = span >= self.dt;
            let next = if full {
                self.step.dot(&phi)
            } else {
                self.advance_partial(&phi, span)
            };
            if norm(&next) > threshold {
                phi = next;
                now = if full { now + span } else { self.t };
                continue;
            }
            // Bisect for the crossing inside [now, now + span].
            let mut offset = 0.0;
            let mut sub = self.dt;
            for u in &self.descent {
                sub /= 2.0;
                if offset + sub > span {
                    continue;
                }
                let trial = u.dot(&phi);
                if norm(&trial) > threshold {
                    phi = trial;
                    offset += sub;
                }
            }
            now += offset;
            match self.choose_channel(&phi, rng) {
                Some((k, v)) => {
                    jump_times.push((now, k));
                    phi = v;
                }
                None => {
                    // No channel can fire from here; renormalize and carry on.
                    let n = norm(&phi).sqrt();
                    phi.mapv_inplace(|z| z / n);
                }
            }
            threshold = rng.random();
        }
        let final_state = StateVector::new(dims, phi)?.normalized()?;
        let survived = jump_times.is_empty();
        Ok(TrajectoryRecord {
            final_state,
            jump_times,
            survived,
        })
    }

    fn choose_channel<R: Rng + ?Sized>(
        &self,
        phi: &Array1<C64>,
        rng: &mut R,
    ) -> Option<(usize, Array1<C64>)> {
        let candidates: Vec<(f64, Array1<C64>)> = self
            .jumps
            .iter()
            .map(|(l, r)| {
                let v = l.entries().dot(phi);
                (r * v.iter().map(|z| z.norm_sqr()).sum::<f64>(), v)
            })
            .collect();
        let total: f64 = candidates.iter().map(|(w, _)| w).sum();
        if !(total > 0.0) {
            return None;
        }
        let mut pick = rng.random::<f64>() * total;
        let last = candidates.iter().rposition(|(w, _)| *w > 0.0)?;
        for (k, (w, v)) in candidates.into_iter().enumerate() {
            if pick < w || k == last {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                return Some((k, v.mapv(|z| z / n)));
            }
            pick -= w;
        }
        None
    }
}

/// One trajectory with its own seeded generator.
pub fn trajectory_run(
    h: &OperatorMatrix,
    jumps: &[(OperatorMatrix, f64)],
    psi0: &StateVector,
    t: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    let sim = TrajectorySimulator::new(h.clone(), jumps.to_vec(), t)?;
    sim.run(psi0, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm_oracle;
    use crate::HilbertDims;

    #[test]
    fn lossless_trajectory_is_deterministic_evolution() {
        let q = HilbertDims::qubit();
        let h = OperatorMatrix::transition(q, 0, 0, 1).unwrap() * 0.4
            + OperatorMatrix::transition(q, 0, 1, 0).unwrap() * 0.4;
        let psi = StateVector::basis(q, 0, 0, 0).unwrap();
        let rec = trajectory_run(&h, &[], &psi, 3.3, 11).unwrap();
        assert!(rec.survived);
        let exact = expm_oracle(&h, 3.3, &psi).unwrap();
        assert!(rec.final_state.max_abs_diff(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn inconsistent_jump_set_is_rejected() {
        let d = HilbertDims::cavity_pair(1, 2).unwrap();
        let h = OperatorMatrix::number(d) * C64::new(0.0, -1.0);
        let b = OperatorMatrix::annihilation(d);
        assert!(TrajectorySimulator::new(h.clone(), vec![(b.clone(), 1.0)], 1.0).is_err());
        assert!(TrajectorySimulator::new(h, vec![(b, 2.0)], 1.0).is_ok());
    }

    #[test]
    fn jump_time_matches_threshold() {
        let d = HilbertDims::cavity_pair(1, 2).unwrap();
        let kappa = 0.5;
        let h = OperatorMatrix::number(d) * C64::new(0.0, -kappa);
        let sim = TrajectorySimulator::new(
            h,
            vec![(OperatorMatrix::annihilation(d), 2.0 * kappa)],
            10.0,
        )
        .unwrap();
        let psi = StateVector::basis(d, 1, 0, 0).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut probe = rng.clone();
            let threshold: f64 = probe.random();
            let rec = sim.run(&psi, &mut rng).unwrap();
            let expected = -threshold.ln() / (2.0 * kappa);
            if expected < 10.0 {
                let (t, k) = rec.jump_times[0];
                assert_eq!(k, 0);
                assert!((t - expected).abs() < 1e-8, "{t} vs {expected}");
                assert_eq!(rec.final_state.amplitude(0, 0, 0).unwrap().norm(), 1.0);
            } else {
                assert!(rec.survived);
            }
        }
    }
}
