//! Entangling gates built from the decoupled-CZ primitive.

use std::f64::consts::PI;

use super::spec::Basis;
use crate::sim::gates;
use crate::sim::linalg::CMatrix;

/// One step of a two-qubit gate sequence. Local index 0 is the data qubit, 1 the ancilla.
#[derive(Clone, Debug)]
pub struct GateStep {
    pub unitary: CMatrix,
    pub targets: Vec<usize>,
}

impl GateStep {
    fn single(u: CMatrix, target: usize) -> Self {
        Self {
            unitary: u,
            targets: vec![target],
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        self.targets.len() == 1
    }
}

/// Decoupled CZ with conditional phase `theta`: half phase, X⊗X, half phase, X⊗X.
/// Net effect is diag(e^{iθ/2}, 1, 1, e^{iθ/2}); single-qubit phase errors cancel.
pub fn dcz_steps(theta: f64) -> Vec<GateStep> {
    let half = GateStep {
        unitary: gates::cphase(theta / 2.0),
        targets: vec![0, 1],
    };
    vec![
        half.clone(),
        GateStep::single(gates::pauli_x(), 0),
        GateStep::single(gates::pauli_x(), 1),
        half,
        GateStep::single(gates::pauli_x(), 0),
        GateStep::single(gates::pauli_x(), 1),
    ]
}

/// CNOT from the data qubit onto the ancilla in the given basis. `cz_error` over-rotates the CZ phase.
pub fn build_cnot(basis: Basis, cz_error: f64) -> Vec<GateStep> {
    let mut steps = Vec::new();
    if basis == Basis::X {
        steps.push(GateStep::single(gates::sqrt_y(), 0));
    }
    steps.push(GateStep::single(gates::sqrt_y().adjoint(), 1));
    steps.extend(dcz_steps(PI + cz_error));
    // Virtual S on both qubits turns the symmetric ZZ phase into a CZ.
    steps.push(GateStep::single(gates::rz(PI / 2.0), 0));
    steps.push(GateStep::single(gates::rz(PI / 2.0), 1));
    steps.push(GateStep::single(gates::sqrt_y(), 1));
    if basis == Basis::X {
        steps.push(GateStep::single(gates::sqrt_y().adjoint(), 0));
    }
    steps
}

/// Product of the steps as a 4×4 unitary on (data, ancilla).
pub fn sequence_unitary(steps: &[GateStep]) -> CMatrix {
    steps.iter().fold(gates::identity().kronecker(&gates::identity()), |acc, s| {
        let full = match s.targets.as_slice() {
            [0] => s.unitary.kronecker(&gates::identity()),
            [1] => gates::identity().kronecker(&s.unitary),
            _ => s.unitary.clone(),
        };
        full * acc
    })
}
