//! Simulated phase calibration: the ancilla is parked in a definite parity,
//! the target data qubit starts on the equator, and its azimuth after the MCM
//! windows is read from a cosine fit to a virtual-Z sweep.

use std::f64::consts::PI;

use super::engine::McmRun;
use super::ledger::wrap_phase;
use super::spec::{FeedforwardPolicy, McmSpec, ReadoutMode};
use crate::device::{DeviceConfig, Parity};
use crate::error::{Error, Result};
use crate::experiments::stats::fit_cosine;
use crate::sim::gates::{self, Cardinal};
use crate::sim::{DensityState, QubitLabel};

const SWEEP_POINTS: usize = 16;

/// The protocol used for calibration: no entangling gate, no feedforward, sensor off.
fn probe_spec(spec: &McmSpec) -> McmSpec {
    let mut probe = spec.clone().with_policy(FeedforwardPolicy::None).with_entangle(false).with_sensor(false);
    if probe.mode == ReadoutMode::PhaseAccumulationFpgaCorrected {
        probe.mode = ReadoutMode::PhaseAccumulation;
    }
    probe
}

/// Fitted sweep phase of the target after the windows with A1 fixed to `parity`.
fn sweep_phase(spec: &McmSpec, cfg: &DeviceConfig, parity: Parity) -> Result<f64> {
    let target = spec.target;
    let a1 = match parity {
        Parity::Even => Cardinal::One,
        Parity::Odd => Cardinal::Zero,
    };
    let equator = gates::sqrt_x() * Cardinal::One.density() * gates::sqrt_x().adjoint();
    let input = DensityState::product(&[
        (QubitLabel::A2, Cardinal::One.density()),
        (QubitLabel::A1, a1.density()),
        (target, equator),
    ])?;
    let run = McmRun::prepare(input.matrix(), input.qubits(), &probe_spec(spec), cfg)?;
    let post = DensityState::from_branch(input.qubits().to_vec(), run.average_operator())?;
    let phis: Vec<f64> = (0..SWEEP_POINTS).map(|k| 2.0 * PI * k as f64 / SWEEP_POINTS as f64).collect();
    let p0: Vec<f64> = phis
        .iter()
        .map(|&phi| {
            post.apply_unitary(&gates::rz(phi), &[target])?
                .apply_unitary(&gates::sqrt_x(), &[target])?
                .expectation(&Cardinal::Zero.density(), &[target])
        })
        .collect::<Result<_>>()?;
    Ok(fit_cosine(&phis, &p0)?.phase)
}

/// Measured MCM phase θ_Mk of the target, referenced to a backaction-free device.
pub fn measure_mcm_phase(spec: &McmSpec, cfg: &DeviceConfig, parity: Parity) -> Result<f64> {
    spec.validate()?;
    let delta = sweep_phase(spec, cfg, parity)? - sweep_phase(spec, &DeviceConfig::ideal(), parity)?;
    // The refocusing flip mirrors the azimuth.
    let psi = if spec.is_decoupled(spec.target) { -delta } else { delta };
    Ok(wrap_phase(psi))
}

/// (φ_M0, φ_M1) that cancel the measured conditional phases.
pub fn calibrate_phi0(spec: &McmSpec, cfg: &DeviceConfig) -> Result<(f64, f64)> {
    Ok((
        -measure_mcm_phase(spec, cfg, Parity::Even)?,
        -measure_mcm_phase(spec, cfg, Parity::Odd)?,
    ))
}

/// As [`calibrate_phi0`] with an extra π on the odd outcome, so both branches end in the same state.
pub fn calibrate_phi_pi(spec: &McmSpec, cfg: &DeviceConfig) -> Result<(f64, f64)> {
    let (phi0, phi1) = calibrate_phi0(spec, cfg)?;
    Ok((phi0, phi1 + PI))
}

/// Smallest t_m > 0 with |θ_c(t_m)| ≡ target mod 2π. A target ≡ 0 returns one full period.
pub fn solve_inlayer_read_time(q: QubitLabel, target_phase: f64, cfg: &DeviceConfig) -> Result<f64> {
    let fc = cfg.qubit(q)?.f_c.abs();
    if fc == 0.0 {
        return Err(Error::NoSolution(format!("{q} has no charge-induced shift")));
    }
    if !target_phase.is_finite() {
        return Err(Error::InvalidArgument(format!("target phase {target_phase}")));
    }
    let mut reduced = target_phase.rem_euclid(2.0 * PI);
    if reduced < 1e-12 || 2.0 * PI - reduced < 1e-12 {
        reduced = 2.0 * PI;
    }
    Ok(reduced / (2.0 * PI * fc))
}
