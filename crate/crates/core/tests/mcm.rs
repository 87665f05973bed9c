use std::f64::consts::PI;

use mcm_core::device::DeviceConfig;
use mcm_core::mcm::*;
use mcm_core::sim::QubitLabel::{D1, D2};

#[test]
fn noiseless_zero_backaction_matches_ideal_measurement() {
    let mut cfg = DeviceConfig::default().noiseless();
    for q in [D1, D2] {
        let p = cfg.qubit_mut(q).unwrap();
        p.f_c = 0.0;
        p.f_vread_even = p.f_vref;
        p.f_vread_odd = Some(p.f_vref);
    }
    for basis in [Basis::Z, Basis::X] {
        let ideal = instrument_of_spec(&McmSpec::new(basis, 10e-6, ReadoutMode::PhaseEchoed), &DeviceConfig::ideal()).unwrap();
        let acc = instrument_of_spec(
            &McmSpec::new(basis, 10e-6, ReadoutMode::PhaseAccumulation).with_sensor(false),
            &cfg,
        )
        .unwrap();
        assert!(acc.max_abs_diff(&ideal) < 1e-12, "{basis:?}");
    }
}

#[test]
fn echoed_and_corrected_agree_with_perfect_classification() {
    // Decoherence kept. A misread label applies the wrong correction, which the echo never needs.
    let mut cfg = DeviceConfig::default();
    cfg.sensor.sigma0 = 0.0;
    let t = 10e-6;
    let corrected = McmSpec::new(Basis::X, t, ReadoutMode::PhaseAccumulationFpgaCorrected)
        .with_policy(FeedforwardPolicy::FpgaPhase { phi_m0: 0.0, phi_m1: 0.0 });
    let (p0, p1) = calibrate_phi0(&corrected, &cfg).unwrap();
    let corrected = corrected.with_policy(FeedforwardPolicy::FpgaPhase { phi_m0: p0, phi_m1: p1 });
    let echoed = McmSpec::new(Basis::X, t, ReadoutMode::PhaseEchoed);
    let a = instrument_of_spec(&corrected, &cfg).unwrap();
    let b = instrument_of_spec(&echoed, &cfg).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
}

#[test]
fn read_time_solutions_scale_with_target() {
    let cfg = DeviceConfig::default();
    let t_pi = solve_inlayer_read_time(D1, PI, &cfg).unwrap();
    assert!((t_pi - 42.37e-6).abs() < 0.05e-6);
    let t_half = solve_inlayer_read_time(D1, PI / 2.0, &cfg).unwrap();
    assert!((t_half - t_pi / 2.0).abs() < 1e-12);
    let period = solve_inlayer_read_time(D1, 0.0, &cfg).unwrap();
    assert!((period - 1.0 / cfg.d1.f_c.abs()).abs() < 1e-12);
    let mut flat = cfg.clone();
    flat.d1.f_c = 0.0;
    assert!(solve_inlayer_read_time(D1, PI, &flat).is_err());
}

#[test]
fn echo_cancels_phases_without_control_residual() {
    let cfg = DeviceConfig::default();
    let spec = McmSpec::new(Basis::X, 25e-6, ReadoutMode::PhaseEchoed);
    let ledger = phase_ledger(&spec, &cfg).unwrap();
    let d1 = ledger.get(D1).unwrap();
    assert!(wrap_phase(d1.theta_m(0)).abs() < 1e-12);
    assert!(wrap_phase(d1.theta_m(1)).abs() < 1e-12);
}
