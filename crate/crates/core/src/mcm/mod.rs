//! Mid-circuit measurement protocols: CNOT construction, the PSB parity
//! readout engine, phase bookkeeping, calibration and feedforward.

mod calibrate;
mod cnot;
mod engine;
mod exchange;
mod instrument;
mod ledger;
mod spec;

pub use calibrate::{calibrate_phi0, calibrate_phi_pi, measure_mcm_phase, solve_inlayer_read_time};
pub use cnot::{build_cnot, dcz_steps, sequence_unitary, GateStep};
pub use engine::{
    execute_mcm, infer_single_qubit, mcm_branches, parity_probabilities, psb_parity_measure, McmBranch, McmRun,
    ShotRecord,
};
pub use exchange::exchange_cds_dcz;
pub use instrument::instrument_of_spec;
pub use ledger::{phase_ledger, wrap_phase, PhaseLedger, QubitPhases};
pub use spec::{Basis, FeedforwardPolicy, McmSpec, ReadoutMode};
