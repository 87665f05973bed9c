//! Exact small-register quantum mechanics: states, unitaries, channels and
//! Pauli-transfer representations for up to four qubits.

mod channel;
pub mod gates;
pub mod linalg;
pub mod ops;
mod pauli;
mod qubit;
mod state;

pub use channel::{choi_of_map, QuantumChannel};
pub use linalg::{CMatrix, RMatrix, C64};
pub use pauli::{from_pauli_vector, normalized_basis, to_pauli_vector, Pauli, PauliString, PauliTransferMap};
pub use qubit::{canonical_order, QubitLabel};
pub use state::DensityState;
