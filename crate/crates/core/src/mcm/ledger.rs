use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::spec::{McmSpec, ReadoutMode};
use crate::device::{charge_phase, control_phase, DeviceConfig};
use crate::error::Result;
use crate::sim::QubitLabel;

/// Map an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let y = x - two_pi * ((x - PI) / two_pi).ceil();
    if y <= -PI {
        y + two_pi
    } else {
        y
    }
}

/// Phase bookkeeping of one data qubit. `theta_c` is the charge-induced phase
/// that survives the window placement (zero for a decoupled echoed readout).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPhases {
    pub theta_r: f64,
    pub theta_c: f64,
    pub theta_m0: f64,
    pub theta_m1: f64,
    pub phi_m0: f64,
    pub phi_m1: f64,
    pub theta_t0: f64,
    pub theta_t1: f64,
}

impl QubitPhases {
    pub fn theta_m(&self, k: u8) -> f64 {
        if k == 0 {
            self.theta_m0
        } else {
            self.theta_m1
        }
    }

    pub fn theta_t(&self, k: u8) -> f64 {
        if k == 0 {
            self.theta_t0
        } else {
            self.theta_t1
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseLedger {
    pub qubits: BTreeMap<QubitLabel, QubitPhases>,
}

impl PhaseLedger {
    pub fn get(&self, q: QubitLabel) -> Option<&QubitPhases> {
        self.qubits.get(&q)
    }
}

/// Closed-form phases for both data qubits. All angles wrapped into (−π, π].
pub fn phase_ledger(spec: &McmSpec, cfg: &DeviceConfig) -> Result<PhaseLedger> {
    spec.validate()?;
    let t = spec.t_m;
    let mut qubits = BTreeMap::new();
    for q in [QubitLabel::D1, QubitLabel::D2] {
        let p = cfg.qubit(q)?;
        let g = control_phase(q, t, cfg)?;
        let theta_ch = charge_phase(q, t, cfg)?;
        let stark = |sign_ref: f64| 2.0 * PI * (p.f_vread_even + sign_ref * p.f_vref) * t;
        let (theta_r, theta_c) = match (spec.mode, spec.is_decoupled(q)) {
            (ReadoutMode::PhaseEchoed, true) => (g, 0.0),
            (_, true) => (stark(-1.0) + g, theta_ch),
            (_, false) => (stark(1.0) + g, theta_ch),
        };
        let (phi_m0, phi_m1) = if q == spec.target {
            (spec.policy.phase_for(0), spec.policy.phase_for(1))
        } else {
            (0.0, 0.0)
        };
        let theta_m0 = theta_r;
        let theta_m1 = theta_r + theta_c;
        qubits.insert(
            q,
            QubitPhases {
                theta_r: wrap_phase(theta_r),
                theta_c: wrap_phase(theta_c),
                theta_m0: wrap_phase(theta_m0),
                theta_m1: wrap_phase(theta_m1),
                phi_m0: wrap_phase(phi_m0),
                phi_m1: wrap_phase(phi_m1),
                theta_t0: wrap_phase(theta_m0 + phi_m0),
                theta_t1: wrap_phase(theta_m1 + phi_m1),
            },
        );
    }
    Ok(PhaseLedger { qubits })
}
