//! Cross-module behaviour: measured dynamics against closed-form
//! predictions, and integrator quality on the six-variable model.

mod common;

use dk_mhd::dynamics::{ideal_rhs, DKState, ParameterSchedule};
use dk_mhd::geometry::{r3_from, EllipsoidGeometry};
use dk_mhd::integrator::{integrate, IntegrationSettings, Method};
use dk_mhd::scenario::{run_scenario, Scenario};
use dk_mhd::stability::{aligned_spectrum, orthogonal_modes, ModeRate, StabilityClass};

fn dz_geometry() -> EllipsoidGeometry {
    EllipsoidGeometry::from_ratios(-0.5, 0.25).unwrap()
}

fn simulate_fixed(
    initial: [f64; 6],
    ratios: [f64; 3],
    t_end: f64,
    sample_dt: f64,
) -> dk_mhd::integrator::Trajectory<6> {
    let settings = IntegrationSettings {
        sample_dt,
        ..Default::default()
    };
    integrate(
        move |_t, y: &[f64; 6]| ideal_rhs(&DKState::from_array(y), &ratios).to_array(),
        initial,
        (0.0, t_end),
        &settings,
    )
    .unwrap()
}

#[test]
fn small_transverse_spin_oscillation_period() {
    // a small spin about the 3-axis riding on a strong 1-axis current
    // oscillates at sqrt(r3) K: period 2 pi / (sqrt(r3) K) = 11.7548,
    // measured through successive zero crossings. The amplitude must be
    // small: at order-one amplitude the Casimir caps the transverse current
    // response and the oscillation never crosses zero.
    let g = dz_geometry();
    let r = g.ratios;
    let k_amp = 1.0;
    let traj = simulate_fixed([0.0, 0.0, 0.01, k_amp, 0.0, 0.0], r, 40.0, 0.01);
    let crossings = traj.zero_crossings(2, 0.0);
    assert!(crossings.len() >= 2, "found {} crossings", crossings.len());
    let period = common::period_from_crossings(&crossings);
    let predicted = 2.0 * std::f64::consts::PI / (r[2].sqrt() * k_amp);
    assert!((predicted - 11.7548).abs() < 2e-4);
    let rel = (period - predicted).abs() / predicted;
    assert!(
        rel < 0.01,
        "period {period:.5} vs predicted {predicted:.5} ({:.3}%)",
        100.0 * rel
    );
}

#[test]
fn fixed_parameter_run_conserves_h0() {
    // reference fixed-ratio run over t in [0, 100]
    let sc = Scenario {
        schedule: ParameterSchedule::FixedAxes {
            geometry: dz_geometry(),
        },
        initial: DKState::new([0.01, 0.01, 0.1], [0.01, 0.01, 1.0]),
        eta2: 0.0,
        t_end: 100.0,
        settings: IntegrationSettings::default(),
    };
    let run = run_scenario(&sc).unwrap();
    let drift = run.report.drift.unwrap();
    assert!(drift.h0 <= 1e-6, "H0 drift {}", drift.h0);
}

#[test]
fn tightening_rtol_does_not_increase_drift() {
    let drift_at = |rtol: f64| {
        let sc = Scenario {
            schedule: ParameterSchedule::FixedAxes {
                geometry: dz_geometry(),
            },
            initial: DKState::new([0.01, 0.01, 0.1], [0.01, 0.01, 1.0]),
            eta2: 0.0,
            t_end: 100.0,
            settings: IntegrationSettings {
                rtol,
                atol: rtol * 0.01,
                ..Default::default()
            },
        };
        let run = run_scenario(&sc).unwrap();
        let d = run.report.drift.unwrap();
        d.h0.max(d.h1).max(d.c0)
    };
    let loose = drift_at(1e-10);
    let tight = drift_at(1e-12);
    assert!(
        tight <= loose * 1.05 + 1e-14,
        "drift grew when tightening rtol: {loose:.3e} -> {tight:.3e}"
    );
}

#[test]
fn aligned_unstable_growth_rate_matches_spectrum() {
    // parameter set with a real positive x root: seeded 1e-6 perturbations
    // grow at sqrt(x) within 5 percent
    let (w_amp, j_amp, r1, r2) = (0.1, 1.0, 0.3, 0.25);
    let rep = aligned_spectrum(w_amp, j_amp, r1, r2);
    assert_eq!(rep.classification, StabilityClass::UnstableDirect);
    let x_pos = rep
        .x_roots
        .iter()
        .map(|x| x.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let predicted = x_pos.sqrt();

    let eps = 1e-6;
    let r = [r1, r2, r3_from(r1, r2).unwrap()];
    let traj = simulate_fixed([eps, eps, w_amp, eps, eps, j_amp], r, 40.0, 0.01);
    let w2: Vec<f64> = traj.states.iter().map(|y| y[1]).collect();
    let measured = common::fit_growth_rate(&traj.times, &w2, 1e-4, 5e-3);
    let rel = (measured - predicted).abs() / predicted;
    assert!(
        rel < 0.05,
        "growth {measured:.5} vs predicted {predicted:.5} ({:.2}%)",
        100.0 * rel
    );
}

#[test]
fn orthogonal_branch_growth_rate_small_amplitude() {
    // the (w1, iota3) branch x = r2 (K^2 + r1 X^2) is a growth rate for
    // x > 0; measurable in the nonlinear system while the background
    // rotation stays slow (small X)
    let g = dz_geometry();
    let r = g.ratios;
    let (x_amp, k_amp) = (0.05, 1.0);
    let modes = orthogonal_modes(x_amp, k_amp, &r);
    let predicted = match modes.branch_mode {
        ModeRate::Growth(s) => s,
        other => panic!("expected growth, got {other:?}"),
    };

    let eps = 1e-6;
    let traj = simulate_fixed([eps, 0.0, x_amp, k_amp, 0.0, eps], r, 40.0, 0.01);
    let i3: Vec<f64> = traj.states.iter().map(|y| y[5]).collect();
    let measured = common::fit_growth_rate(&traj.times, &i3, 1e-4, 5e-3);
    let rel = (measured - predicted).abs() / predicted;
    assert!(
        rel < 0.05,
        "growth {measured:.5} vs predicted {predicted:.5} ({:.2}%)",
        100.0 * rel
    );
}

#[test]
fn stable_oscillation_frequencies_match_spectrum() {
    // linearised (1e-6 perturbed) simulation of the stable reference state;
    // the two DFT peaks of w2 match |Im s| within 2 percent
    let (w_amp, j_amp, r1, r2) = (0.1, 1.0, -0.5, 0.25);
    let rep = aligned_spectrum(w_amp, j_amp, r1, r2);
    assert_eq!(rep.classification, StabilityClass::StableOscillatory);
    let predicted = rep.frequencies();

    let eps = 1e-6;
    let r = [r1, r2, r3_from(r1, r2).unwrap()];
    let traj = simulate_fixed([eps, eps, w_amp, eps, eps, j_amp], r, 400.0, 0.05);
    let w2: Vec<f64> = traj.states.iter().map(|y| y[1]).collect();
    let mut measured = common::dominant_frequencies(&traj.times, &w2, 0.2, 1.2, 5e-4, 2, 0.1);
    assert_eq!(measured.len(), 2, "expected two spectral peaks");
    measured.sort_by(f64::total_cmp);
    for (m, p) in measured.iter().zip(predicted.iter()) {
        let rel = (m - p).abs() / p;
        assert!(
            rel < 0.02,
            "frequency {m:.5} vs predicted {p:.5} ({:.2}%)",
            100.0 * rel
        );
    }
}

#[test]
fn fixed_rk4_run_is_reproducible_end_to_end() {
    let sc = Scenario {
        schedule: ParameterSchedule::FixedAxes {
            geometry: dz_geometry(),
        },
        initial: DKState::new([0.01, 0.01, 0.1], [0.01, 0.01, 1.0]),
        eta2: 0.0,
        t_end: 5.0,
        settings: IntegrationSettings {
            method: Method::FixedRk4,
            sample_dt: 0.01,
            ..Default::default()
        },
    };
    let a = run_scenario(&sc).unwrap();
    let b = run_scenario(&sc).unwrap();
    for (sa, sb) in a.trajectory.states.iter().zip(&b.trajectory.states) {
        assert_eq!(
            sa.to_array().map(f64::to_bits),
            sb.to_array().map(f64::to_bits)
        );
    }
}
