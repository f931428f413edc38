use std::f64::consts::{PI, TAU};

use cavitybell::expm::expm_matrix;
use cavitybell::models::{
    dfs_projector, h_cond_two_level, h_eff_zeno, h_laser_single_atom, h_laser_two_level,
    h_rotation_four_level, validate_regime, FourLevelParams, RegimeThresholds, TwoLevelParams,
};
use cavitybell::propagate::evolve_nojump;
use cavitybell::protocols::{
    expected_alpha, prepare_two_level, rotation_operator, rotation_pulse_four_level,
    rotation_pulse_two_level, shelving_measure, PulseSpec, RotationSpec,
};
use cavitybell::{HilbertDims, OperatorMatrix, StateVector, C64};
use proptest::prelude::*;

#[test]
fn success_probability_grows_as_drive_weakens() {
    let dims = HilbertDims::cavity_pair(2, 2).unwrap();
    let p0: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&w| {
            let p = TwoLevelParams::reference(w, 0.0);
            prepare_two_level(&p, PulseSpec::full_transfer(p.omega_minus()).unwrap(), dims)
                .unwrap()
                .p0
        })
        .collect();
    assert!(p0.windows(2).all(|w| w[1] > w[0]), "{p0:?}");
    assert!(p0[3] < 1.0 && p0[3] > 0.99);
}

fn regime_params() -> impl Strategy<Value = TwoLevelParams> {
    (0.003f64..0.05, 0.0f64..0.1, 0.4f64..2.5, 0.0f64..TAU).prop_map(
        |(w, decay_frac, kappa, phase)| {
            let omega1 = C64::from_polar(w, phase);
            TwoLevelParams {
                kappa,
                gamma: decay_frac * w,
                omega1,
                omega2: -omega1,
                ..TwoLevelParams::reference(w, 0.0)
            }
        },
    )
}

fn both_excited(state: &StateVector) -> f64 {
    let psi = state.normalized().unwrap();
    (0..=psi.dims().n_max())
        .map(|n| psi.amplitude(n, 1, 1).unwrap().norm_sqr())
        .sum()
}

/// Worst |11⟩ population over a full transfer cycle.
fn peak_both_excited(w: f64, kappa: f64) -> f64 {
    let dims = HilbertDims::cavity_pair(2, 2).unwrap();
    let omega1 = C64::new(w, 0.0);
    let p = TwoLevelParams {
        kappa,
        omega1,
        omega2: -omega1,
        ..TwoLevelParams::reference(w, 0.0)
    };
    (1..20)
        .map(|k| {
            let t = k as f64 / 20.0 * 2.0 * PI / p.omega_minus().norm();
            both_excited(
                &prepare_two_level(&p, PulseSpec::Duration(t), dims)
                    .unwrap()
                    .state,
            )
        })
        .fold(0.0, f64::max)
}

#[test]
fn both_excited_population_is_second_order_in_the_drive() {
    for kappa in [0.4, 1.0, 2.0] {
        let scaled: Vec<f64> = [0.003, 0.01, 0.03]
            .iter()
            .map(|&w| peak_both_excited(w, kappa) / (w * w))
            .collect();
        let (lo, hi) = scaled
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.2, "κ {kappa}: {scaled:?}");
        assert!(hi < 5.0, "κ {kappa}: {scaled:?}");
    }
    assert!(peak_both_excited(0.003, 1.0) < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn preparation_tracks_the_pulse_law(p in regime_params(), frac in 0.05f64..1.0) {
        prop_assume!(validate_regime(&p, &RegimeThresholds::default()).all_pass());
        let dims = HilbertDims::cavity_pair(2, 2).unwrap();
        let t = frac * 2.0 * PI / p.omega_minus().norm();
        let r = prepare_two_level(&p, PulseSpec::Duration(t), dims).unwrap();
        // Realized α is quoted with a non-negative |00⟩ coefficient, which
        // is cos(|Ω⁻|T/2) up to a global sign; near its node either sign fits.
        let cos = (p.omega_minus().norm() * t / 2.0).cos();
        let alpha = expected_alpha(p.omega_minus(), t);
        let err = |sign: f64| (r.alpha_realized - alpha * sign).norm();
        let dist = if cos.abs() < 0.05 { err(1.0).min(err(-1.0)) } else { err(cos.signum()) };
        prop_assert!(dist < 5e-2, "{} vs {alpha} (cos {cos})", r.alpha_realized);
    }

    #[test]
    #[ignore = "|11⟩ leaks at order (Ω/g)²; exceeds 1e-4 for Ω1 ≳ 0.01g inside the regime"]
    fn preparation_never_fills_both_excited(p in regime_params(), frac in 0.05f64..1.0) {
        prop_assume!(validate_regime(&p, &RegimeThresholds::default()).all_pass());
        let dims = HilbertDims::cavity_pair(2, 2).unwrap();
        let t = frac * 2.0 * PI / p.omega_minus().norm();
        let r = prepare_two_level(&p, PulseSpec::Duration(t), dims).unwrap();
        prop_assert!(both_excited(&r.state) < 1e-4, "|11⟩ population {}", both_excited(&r.state));
    }

    #[test]
    fn rotations_are_unitary_and_compose(xi in -4.0f64..4.0, xi2 in -4.0f64..4.0, phi in 0.0f64..TAU) {
        let u = rotation_operator(RotationSpec::new(xi, phi));
        let id = OperatorMatrix::identity(HilbertDims::qubit());
        prop_assert!(u.dagger().matmul(&u).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        let both = u.matmul(&rotation_operator(RotationSpec::new(xi2, phi))).unwrap();
        prop_assert!(both.max_abs_diff(&rotation_operator(RotationSpec::new(xi + xi2, phi))).unwrap() < 1e-12);
        prop_assert!(rotation_operator(RotationSpec::new(0.0, phi)).max_abs_diff(&id).unwrap() == 0.0);
    }

    #[test]
    fn laser_pulse_realizes_the_rotation(xi in -3.0f64..3.0, phi in 0.0f64..TAU, omega_abs in 0.01f64..1.0) {
        let (omega, t) = rotation_pulse_two_level(xi, phi, omega_abs).unwrap();
        prop_assert!((omega.norm() - omega_abs).abs() < 1e-15);
        let u = expm_matrix(&h_laser_single_atom(omega, 0, HilbertDims::qubit()).unwrap(), t).unwrap();
        prop_assert!(u.max_abs_diff(&rotation_operator(RotationSpec::new(xi, phi))).unwrap() < 1e-10);
    }
}

/// One free four-level atom driven by both pumps and weak drive `atom 0`,
/// compared on levels {0, 1} against (a) the eliminated two-level
/// Hamiltonian with all light shifts kept and (b) `global_phase · U(ξ, φ)`.
/// Worst max-amplitude error over several pulses and both basis inputs.
fn four_level_rotation_errors(p: &FourLevelParams) -> (f64, f64) {
    let full = HilbertDims::atoms_only(4, 1).unwrap();
    let q = HilbertDims::qubit();
    let s = |j, k| OperatorMatrix::transition(q, 0, j, k).unwrap();
    let (mut vs_eff, mut vs_rot): (f64, f64) = (0.0, 0.0);
    for k in 1..=8 {
        let (xi, phi) = (0.2 * k as f64, 0.7 * k as f64);
        let r = rotation_pulse_four_level(xi, phi, 0, p).unwrap();
        let driven = FourLevelParams {
            omega_i: [r.omega_i, p.omega_i[1]],
            ..*p
        };
        let h = h_rotation_four_level(&driven, 0).unwrap();
        let om = -r.omega_i.conj() * p.omega0 / (2.0 * p.delta3);
        let h_eff = s(1, 0) * (om * 0.5) + s(0, 1) * (om.conj() * 0.5)
            - s(0, 0) * (p.omega0.norm_sqr() / (4.0 * p.delta3))
            - s(1, 1)
                * (p.omega1.norm_sqr() / (4.0 * p.delta2)
                    + r.omega_i.norm_sqr() / (4.0 * p.delta3));
        let u_eff = expm_matrix(&h_eff, r.duration).unwrap();
        let u_rot = rotation_operator(RotationSpec::new(xi, phi)) * r.global_phase;
        for level in 0..2 {
            let psi = StateVector::basis(full, 0, level, 0).unwrap();
            let out = evolve_nojump(&h, &psi, r.duration)
                .unwrap()
                .project_onto(q)
                .unwrap();
            let qubit_in = psi.project_onto(q).unwrap();
            vs_eff = vs_eff.max(out.max_abs_diff(&u_eff.apply(&qubit_in).unwrap()).unwrap());
            vs_rot = vs_rot.max(out.max_abs_diff(&u_rot.apply(&qubit_in).unwrap()).unwrap());
        }
    }
    (vs_eff, vs_rot)
}

/// Doubles both detunings with fixed pumps and doubles the weak drive, so
/// `ξ` per unit time is unchanged.
fn doubled_detuning(p: &FourLevelParams) -> FourLevelParams {
    FourLevelParams {
        delta2: 2.0 * p.delta2,
        delta3: 2.0 * p.delta3,
        omega_i: [p.omega_i[0] * 2.0, p.omega_i[1] * 2.0],
        ..*p
    }
}

#[test]
fn four_level_rotation_matches_effective_rotation() {
    let p = FourLevelParams::reference(0.01, 0.0);
    let (eff400, rot400) = four_level_rotation_errors(&p);
    let (eff800, _) = four_level_rotation_errors(&doubled_detuning(&p));
    assert!(eff400 < 5e-3, "{eff400}");
    assert!(eff800 / eff400 <= 0.6, "{eff400:.3e} → {eff800:.3e}");
    // The predicted global phase holds up to the neglected drive light shift.
    assert!(rot400 < 5e-3, "{rot400}");
}

#[test]
fn neglected_drive_shift_bounds_the_rotation_phase_error() {
    // Accumulated phase of −|Ω⁽ⁱ⁾|²/(4Δ3) on |1⟩ over the pulse is |Ω⁽ⁱ⁾|ξ/|Ω0|,
    // independent of Δ; its size is set by |Ω⁽ⁱ⁾| ≪ |Ω0|.
    for drive in [0.005, 0.01, 0.02] {
        let p = FourLevelParams::reference(drive, 0.0);
        let (_, rot) = four_level_rotation_errors(&p);
        let shift_phase = drive * 1.6 / p.omega0.norm();
        assert!(
            rot < shift_phase + 3e-3,
            "drive {drive}: {rot:.3e} vs {shift_phase:.3e}"
        );
    }
}

#[test]
fn zeno_hamiltonian_reproduces_the_pulse_law() {
    let dims = HilbertDims::cavity_pair(2, 2).unwrap();
    for (w, phase) in [(0.01, 0.0), (0.03, 1.1), (0.002, 4.0)] {
        let omega1 = C64::from_polar(w, phase);
        let p = TwoLevelParams {
            omega1,
            omega2: -omega1,
            ..TwoLevelParams::reference(w, 0.0)
        };
        let h = h_cond_two_level(&p, dims).unwrap() + h_laser_two_level(&p, dims).unwrap();
        let h_eff = h_eff_zeno(&h, &dfs_projector(dims).unwrap()).unwrap();
        for frac in [0.1, 0.3, 0.45] {
            let t = frac * 2.0 * PI / p.omega_minus().norm();
            let psi =
                evolve_nojump(&h_eff, &StateVector::basis(dims, 0, 0, 0).unwrap(), t).unwrap();
            let ground = psi.amplitude(0, 0, 0).unwrap();
            let anti = (psi.amplitude(0, 1, 0).unwrap() - psi.amplitude(0, 0, 1).unwrap())
                * std::f64::consts::FRAC_1_SQRT_2;
            let alpha = anti * ground.conj() / ground.norm();
            let expected = expected_alpha(p.omega_minus(), t);
            assert!((alpha - expected).norm() < 1e-10, "{alpha} vs {expected}");
        }
    }
}

#[test]
fn shelving_frequencies_pass_chi_square() {
    let n = 100_000u64;
    for p in [0.1f64, 0.3, 0.5, 0.9] {
        let amps = (C64::new(p.sqrt(), 0.0), C64::new(0.0, (1.0 - p).sqrt()));
        let emits = (0..n)
            .filter(|&seed| shelving_measure(amps, seed).unwrap().classified_level() == 0)
            .count() as f64;
        let expected = p * n as f64;
        let chi2 = (emits - expected).powi(2) / expected
            + (emits - expected).powi(2) / (n as f64 - expected);
        assert!(chi2 < 9.0, "|α0|²={p}: {emits} emissions, χ²={chi2}");
    }
}
