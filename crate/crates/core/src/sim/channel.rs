use super::gates;
use super::linalg::{self, c, tol, CMatrix, ZERO};
use crate::error::{Error, Result};

/// Completely positive map in Kraus form.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    n_qubits: usize,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one Kraus operator".into()))?;
        let dim = first.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: dim });
        }
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows(),
                });
            }
        }
        let gram = kraus
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        let slack = linalg::identity(dim) - &gram;
        let min = linalg::min_eigenvalue(&slack);
        if min < -tol(1e-10) {
            return Err(Error::NonPhysical(format!(
                "Kraus completeness violated (Σ K†K exceeds I by {:.3e})",
                -min
            )));
        }
        let trace_preserving = slack.camax() <= tol(1e-10);
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            kraus,
            trace_preserving,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            kraus: vec![linalg::identity(1 << n_qubits)],
            trace_preserving: true,
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        let dev = linalg::unitary_deviation(&u);
        if dev > tol(1e-10) {
            return Err(Error::NonUnitary(dev));
        }
        Self::new(vec![u])
    }

    /// Phase damping that multiplies the off-diagonal by `contrast`.
    pub fn dephasing(contrast: f64) -> Self {
        let cst = contrast.clamp(-1.0, 1.0);
        let a = ((1.0 + cst) / 2.0).sqrt();
        let b = ((1.0 - cst) / 2.0).sqrt();
        Self {
            n_qubits: 1,
            kraus: vec![gates::identity() * c(a, 0.0), gates::pauli_z() * c(b, 0.0)],
            trace_preserving: true,
        }
    }

    /// ρ ↦ (1 − p) ρ + p I/2.
    pub fn depolarizing(p: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        let a = (1.0 - 0.75 * p).sqrt();
        let b = (p / 4.0).sqrt();
        Self {
            n_qubits: 1,
            kraus: vec![
                gates::identity() * c(a, 0.0),
                gates::pauli_x() * c(b, 0.0),
                gates::pauli_y() * c(b, 0.0),
                gates::pauli_z() * c(b, 0.0),
            ],
            trace_preserving: true,
        }
    }

    /// Rebuild Kraus operators from a Choi matrix (output ⊗ input ordering).
    pub fn from_choi(choi: &CMatrix, n_qubits: usize) -> Result<Self> {
        let d = 1usize << n_qubits;
        if choi.nrows() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: choi.nrows(),
            });
        }
        let (values, vectors) = linalg::hermitian_eigen(choi);
        if values[0] < -tol(1e-8) {
            return Err(Error::NonPhysical(format!(
                "Choi matrix has negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        let mut kraus = Vec::new();
        for (k, &lam) in values.iter().enumerate() {
            if lam <= tol(1e-14) {
                continue;
            }
            let s = lam.sqrt();
            let mut op = CMatrix::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    op[(a, b)] = vectors[(a * d + b, k)] * s;
                }
            }
            kraus.push(op);
        }
        if kraus.is_empty() {
            kraus.push(CMatrix::zeros(d, d));
        }
        Self::new(kraus)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Apply to an operator on exactly this channel's qubits.
    pub fn apply(&self, op: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(op.nrows(), op.ncols()), |acc, k| acc + k * op * k.adjoint())
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &QuantumChannel) -> Result<Self> {
        if after.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: after.n_qubits,
            });
        }
        let kraus = after
            .kraus
            .iter()
            .flat_map(|a| self.kraus.iter().map(move |b| a * b))
            .collect();
        Self::new(kraus)
    }

    pub fn choi(&self) -> CMatrix {
        choi_of_map(1 << self.n_qubits, |op| self.apply(op))
    }
}

/// Choi matrix Σ_{b,b'} f(|b⟩⟨b'|) ⊗ |b⟩⟨b'| of a linear map on `d_in`-dimensional operators.
pub fn choi_of_map(d_in: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut blocks = Vec::with_capacity(d_in * d_in);
    for b in 0..d_in {
        for bp in 0..d_in {
            let mut unit = CMatrix::from_element(d_in, d_in, ZERO);
            unit[(b, bp)] = linalg::ONE;
            blocks.push(((b, bp), f(&unit)));
        }
    }
    let d_out = blocks[0].1.nrows();
    let mut choi = CMatrix::zeros(d_out * d_in, d_out * d_in);
    for ((b, bp), out) in blocks {
        for a in 0..d_out {
            for ap in 0..d_out {
                choi[(a * d_in + b, ap * d_in + bp)] = out[(a, ap)];
            }
        }
    }
    choi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::Cardinal;

    #[test]
    fn dephasing_scales_coherence() {
        let c_ = 0.6;
        let out = QuantumChannel::dephasing(c_).apply(&Cardinal::Plus.density());
        // Kraus oracle: ((1+c)/2) ρ + ((1-c)/2) Z ρ Z keeps the diagonal, scales ρ01 by c.
        assert!((out[(0, 1)].re - 0.5 * c_).abs() < 1e-15);
        assert!((out[(0, 0)].re - 0.5).abs() < 1e-15);
        let full = QuantumChannel::dephasing(0.0).apply(&Cardinal::Plus.density());
        assert!((full - linalg::identity(2) * c(0.5, 0.0)).camax() < 1e-15);
    }

    #[test]
    fn identity_kraus_is_noop() {
        let rho = Cardinal::MinusI.density();
        assert!((QuantumChannel::identity(1).apply(&rho) - &rho).camax() < 1e-15);
    }

    #[test]
    fn rejects_overcomplete_kraus() {
        let k = gates::identity() * c(1.1, 0.0);
        assert!(matches!(QuantumChannel::new(vec![k]), Err(Error::NonPhysical(_))));
    }

    #[test]
    fn choi_round_trip() {
        let ch = QuantumChannel::dephasing(0.3).then(&QuantumChannel::unitary(gates::rx(0.4)).unwrap()).unwrap();
        let back = QuantumChannel::from_choi(&ch.choi(), 1).unwrap();
        for card in Cardinal::ALL {
            let rho = card.density();
            assert!((ch.apply(&rho) - back.apply(&rho)).camax() < 1e-12);
        }
    }
}
