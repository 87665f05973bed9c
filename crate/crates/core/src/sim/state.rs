use super::channel::QuantumChannel;
use super::gates;
use super::linalg::{self, c, tol, CMatrix};
use super::ops;
use super::qubit::{canonical_order, QubitLabel};
use crate::error::{Error, Result};

/// Density matrix on an ordered subset of the register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    qubits: Vec<QubitLabel>,
    matrix: CMatrix,
}

impl DensityState {
    /// Validating constructor: `qubits` must already be in register order.
    pub fn new(qubits: Vec<QubitLabel>, matrix: CMatrix) -> Result<Self> {
        let state = Self::from_parts(qubits, matrix)?;
        state.validate()?;
        Ok(state)
    }

    fn from_parts(qubits: Vec<QubitLabel>, matrix: CMatrix) -> Result<Self> {
        if canonical_order(&qubits)? != qubits {
            return Err(Error::InvalidState("qubits must be listed in register order".into()));
        }
        if qubits.is_empty() {
            return Err(Error::InvalidState("empty register".into()));
        }
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(Self { qubits, matrix })
    }

    /// Wrap an operator known to be a state, checking the invariants in debug builds only.
    pub(crate) fn trusted(qubits: Vec<QubitLabel>, matrix: CMatrix) -> Self {
        let state = Self { qubits, matrix };
        debug_assert!(state.validate().is_ok(), "{:?}", state.validate());
        state
    }

    /// Normalize an unnormalized branch operator into a state.
    pub fn from_branch(qubits: Vec<QubitLabel>, matrix: CMatrix) -> Result<Self> {
        let p = linalg::trace(&matrix).re;
        if p <= 0.0 {
            return Err(Error::ZeroProbabilityBranch(p));
        }
        Self::new(qubits, matrix / c(p, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let tr = linalg::trace(&self.matrix);
        if (tr.re - 1.0).abs() > tol(1e-12) || tr.im.abs() > tol(1e-12) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let herm = linalg::hermitian_deviation(&self.matrix);
        if herm > tol(1e-12) {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let min = linalg::min_eigenvalue(&self.matrix);
        if min < -tol(1e-10) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Product state with each listed qubit in the given single-qubit state.
    pub fn product(parts: &[(QubitLabel, CMatrix)]) -> Result<Self> {
        let mut sorted = parts.to_vec();
        sorted.sort_by_key(|(q, _)| *q);
        let qubits: Vec<_> = sorted.iter().map(|(q, _)| *q).collect();
        let matrix = linalg::kron_all(sorted.iter().map(|(_, m)| m));
        Self::new(qubits, matrix)
    }

    /// Computational basis state; `bits[i]` belongs to `qubits[i]`.
    pub fn basis(qubits: &[QubitLabel], bits: &[u8]) -> Result<Self> {
        if qubits.len() != bits.len() {
            return Err(Error::DimensionMismatch {
                expected: qubits.len(),
                got: bits.len(),
            });
        }
        let parts: Vec<_> = qubits
            .iter()
            .zip(bits)
            .map(|(&q, &b)| {
                let card = if b == 0 {
                    gates::Cardinal::Zero
                } else {
                    gates::Cardinal::One
                };
                (q, card.density())
            })
            .collect();
        Self::product(&parts)
    }

    pub fn qubits(&self) -> &[QubitLabel] {
        &self.qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn position(&self, q: QubitLabel) -> Result<usize> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .ok_or(Error::QubitNotInRegister(q))
    }

    pub fn positions(&self, targets: &[QubitLabel]) -> Result<Vec<usize>> {
        targets.iter().map(|&q| self.position(q)).collect()
    }

    /// U ρ U† with `u` acting on `targets` (in the order given).
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[QubitLabel]) -> Result<Self> {
        let dim = 1usize << targets.len();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.nrows(),
            });
        }
        let dev = linalg::unitary_deviation(u);
        if dev > tol(1e-10) {
            return Err(Error::NonUnitary(dev));
        }
        let pos = self.positions(targets)?;
        let m = ops::conjugate(&self.matrix, u, &pos, self.n_qubits());
        Ok(Self::trusted(self.qubits.clone(), m))
    }

    pub fn apply_channel(&self, ch: &QuantumChannel, targets: &[QubitLabel]) -> Result<Self> {
        if ch.n_qubits() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: targets.len(),
                got: ch.n_qubits(),
            });
        }
        let pos = self.positions(targets)?;
        let m = ops::apply_kraus(&self.matrix, ch.kraus(), &pos, self.n_qubits());
        if ch.is_trace_preserving() {
            Ok(Self::trusted(self.qubits.clone(), m))
        } else {
            Self::from_branch(self.qubits.clone(), m)
        }
    }

    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("partial trace needs at least one kept qubit".into()));
        }
        let keep = canonical_order(keep)?;
        let pos = self.positions(&keep)?;
        let m = ops::partial_trace(&self.matrix, &pos, self.n_qubits());
        Ok(Self::trusted(keep, m))
    }

    /// Re Tr[ρ O] for an operator acting on `targets`.
    pub fn expectation(&self, op: &CMatrix, targets: &[QubitLabel]) -> Result<f64> {
        let pos = self.positions(targets)?;
        let full = ops::embed(op, &pos, self.n_qubits());
        Ok(linalg::trace(&(&self.matrix * full)).re)
    }

    /// Length of the projection of `q`'s Bloch vector onto the XY plane.
    pub fn bloch_xy_length(&self, q: QubitLabel) -> Result<f64> {
        let x = self.expectation(&gates::pauli_x(), &[q])?;
        let y = self.expectation(&gates::pauli_y(), &[q])?;
        Ok(x.hypot(y))
    }
}
