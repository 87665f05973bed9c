use std::f64::consts::PI;

use mcm_core::device::*;
use mcm_core::sim::QubitLabel::{D1, D2};

#[test]
fn charge_phase_is_linear_in_read_time() {
    let cfg = DeviceConfig::default();
    assert_eq!(charge_phase(D1, 0.0, &cfg).unwrap(), 0.0);
    let f = cfg.d2.f_c;
    assert!((charge_phase(D2, 20e-6, &cfg).unwrap() - 2.0 * PI * f * 20e-6).abs() < 1e-12);
    let theta = charge_phase(D1, 42.4e-6, &cfg).unwrap().abs();
    assert!((theta - PI).abs() / PI < 0.01);
}

#[test]
fn stark_phases_at_default() {
    let cfg = DeviceConfig::default();
    let p = stark_phase(D1, VoltageLevel::RefAncilla, 20e-6, Parity::Even, &cfg).unwrap();
    assert!((p - 2.0 * PI * 5.9e3 * 20e-6).abs() < 1e-12);
    for t in [1e-6, 17e-6] {
        let p = stark_phase(D1, VoltageLevel::ReadAncilla, t, Parity::Odd, &cfg).unwrap();
        assert!((p - 2.0 * PI * -2.9e3 * t).abs() < 1e-12);
    }
    for level in [VoltageLevel::RefAncilla, VoltageLevel::ReadAncilla, VoltageLevel::Ctrl] {
        assert_eq!(stark_phase(D2, level, 0.0, Parity::Odd, &cfg).unwrap(), 0.0);
    }
}

#[test]
fn hahn_envelope_points() {
    let cfg = DeviceConfig::default();
    assert_eq!(dephasing_envelope(D1, 0.0, EnvelopeMode::Hahn, &cfg).unwrap(), 1.0);
    let e = dephasing_envelope(D1, 76.4e-6, EnvelopeMode::Hahn, &cfg).unwrap();
    assert!((e - (-1.0f64).exp()).abs() < 1e-12);
    let t2 = cfg.d2.t2_hahn;
    let e = dephasing_envelope(D2, 2.0 * t2, EnvelopeMode::Hahn, &cfg).unwrap();
    assert!((e - (-4.0f64).exp()).abs() < 1e-12);
}

#[test]
fn readout_error_scales_with_root_time() {
    let cfg = DeviceConfig::default();
    assert!(readout_error_prob(0.0, &cfg).is_err());
    for t in [2e-6, 10e-6, 30e-6] {
        let e1 = readout_error_prob(t, &cfg).unwrap();
        let e4 = readout_error_prob(4.0 * t, &cfg).unwrap();
        // Q(z) at t, Q(2z) at 4t.
        let z = cfg.sensor.delta * t.sqrt() / (2.0 * cfg.sensor.sigma0);
        assert!((e1 - gaussian_q(z)).abs() < 1e-15);
        assert!((e4 - gaussian_q(2.0 * z)).abs() < 1e-15);
    }
    assert!(readout_error_prob(1.0, &cfg).unwrap() < 1e-12);
}

#[test]
fn exchange_at_reference_voltage() {
    let cfg = DeviceConfig::default();
    let even = ChargeConfig::after_ancilla_psb(Parity::Even);
    assert!((exchange_rate(cfg.exchange.v0, even, &cfg) - cfg.exchange.j0).abs() < 1e-9);
    let mut flat = cfg.clone();
    flat.exchange.dj_charge = 1.0;
    for v in [-0.1, 0.0, 0.05] {
        let d = exchange_conditional_phase(v, 1e-6, Parity::Odd, &flat)
            - exchange_conditional_phase(v, 1e-6, Parity::Even, &flat);
        assert_eq!(d, 0.0);
    }
}

#[test]
fn shipped_files_parse() {
    assert_eq!(DeviceConfig::from_toml_str(DEFAULT_DEVICE_TOML).unwrap(), DeviceConfig::default());
    assert_eq!(DeviceConfig::from_toml_str(FIG2_PRESET_TOML).unwrap(), DeviceConfig::fig2_preset());
    assert!(DeviceConfig::from_toml_str("[d1]\nnot_a_key = 3\n").is_err());
}
