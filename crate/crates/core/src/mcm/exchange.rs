use super::cnot::{dcz_steps, sequence_unitary};
use crate::device::{exchange_conditional_phase, DeviceConfig, Parity};
use crate::error::Result;
use crate::sim::{DensityState, QubitLabel};

/// Decoupled-CZ evolution of (D1, D2) while the ancilla pair sits at the read point.
/// The conditional phase is 2πJt with J set by the ancilla charge configuration.
pub fn exchange_cds_dcz(
    state: &DensityState,
    v_j3: f64,
    total_time: f64,
    ancilla_parity: Parity,
    cfg: &DeviceConfig,
) -> Result<DensityState> {
    let phi = exchange_conditional_phase(v_j3, total_time, ancilla_parity, cfg);
    state.apply_unitary(&sequence_unitary(&dcz_steps(phi)), &[QubitLabel::D1, QubitLabel::D2])
}
