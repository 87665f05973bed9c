//! Two-outcome quantum instruments on the (data, ancilla) pair.

use crate::error::{Error, Result};
use crate::sim::linalg::{self, c, CMatrix};
use crate::sim::{choi_of_map, PauliTransferMap};

/// Choi eigenvalues below this count as non-CP.
pub const CP_TOLERANCE: f64 = 1e-8;
/// Allowed deviation of the outcome-summed map from trace preservation.
pub const TP_TOLERANCE: f64 = 1e-8;

/// Outcome maps Q_0, Q_1 as Pauli transfer matrices over (data, ancilla).
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumInstrument {
    maps: [PauliTransferMap; 2],
}

impl QuantumInstrument {
    /// Checked constructor: each map CP, their sum TP.
    pub fn new(q0: PauliTransferMap, q1: PauliTransferMap) -> Result<Self> {
        let inst = Self::unchecked(q0, q1)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Only the dimensions are checked. Used for raw linear-inversion estimates.
    pub fn unchecked(q0: PauliTransferMap, q1: PauliTransferMap) -> Result<Self> {
        if q0.n_qubits() != 2 || q1.n_qubits() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: if q0.n_qubits() != 2 { q0.n_qubits() } else { q1.n_qubits() },
            });
        }
        Ok(Self { maps: [q0, q1] })
    }

    pub fn validate(&self) -> Result<()> {
        for (k, m) in self.maps.iter().enumerate() {
            let lam = m.min_choi_eigenvalue();
            if lam < -CP_TOLERANCE {
                return Err(Error::NonPhysical(format!("outcome {k} map has Choi eigenvalue {lam:.3e}")));
            }
        }
        if !self.total().is_trace_preserving(TP_TOLERANCE) {
            return Err(Error::NonPhysical("outcome maps do not sum to a trace-preserving map".into()));
        }
        Ok(())
    }

    pub fn map(&self, k: usize) -> &PauliTransferMap {
        &self.maps[k]
    }

    pub fn maps(&self) -> &[PauliTransferMap; 2] {
        &self.maps
    }

    pub fn total(&self) -> PauliTransferMap {
        self.maps[0].add(&self.maps[1])
    }

    /// Probability of outcome k for a two-qubit input state.
    pub fn outcome_probability(&self, k: usize, rho: &CMatrix) -> f64 {
        linalg::trace(&self.maps[k].apply(rho)).re
    }

    /// Largest elementwise PTM difference over both outcomes.
    pub fn max_abs_diff(&self, other: &QuantumInstrument) -> f64 {
        self.maps[0].max_abs_diff(&other.maps[0]).max(self.maps[1].max_abs_diff(&other.maps[1]))
    }

    /// Each outcome map followed by the same channel (as a PTM) on the output.
    pub fn then(&self, after: &PauliTransferMap) -> Result<Self> {
        Self::unchecked(after.compose(&self.maps[0])?, after.compose(&self.maps[1])?)
    }

    /// Choi matrix (out ⊗ in) of ρ ↦ Σ_k Q_k(ρ) ⊗ |k⟩⟨k|, output ordered (data, ancilla, record).
    pub fn embedding_choi(&self) -> CMatrix {
        choi_of_map(4, |rho| {
            let mut out = CMatrix::zeros(8, 8);
            for k in 0..2 {
                let q = self.maps[k].apply(rho);
                for a in 0..4 {
                    for b in 0..4 {
                        out[(2 * a + k, 2 * b + k)] = q[(a, b)];
                    }
                }
            }
            out
        })
    }
}

/// Squared Uhlmann fidelity between the normalized Choi states of the two embeddings.
pub fn instrument_fidelity(est: &QuantumInstrument, target: &QuantumInstrument) -> Result<f64> {
    for inst in [est, target] {
        for m in inst.maps() {
            if m.min_choi_eigenvalue() < -CP_TOLERANCE {
                return Err(Error::NonPhysical("instrument fidelity needs CP outcome maps".into()));
            }
        }
    }
    let normalize = |j: CMatrix| {
        let tr = linalg::trace(&j).re;
        j / c(tr, 0.0)
    };
    let a = normalize(est.embedding_choi());
    let b = normalize(target.embedding_choi());
    Ok(linalg::state_fidelity(&a, &b).clamp(0.0, 1.0))
}

/// Nearest physical instrument in the sense used by the reconstruction: negative
/// Choi eigenvalues are clipped at zero, then both maps are rescaled on the input
/// side by S^{-1/2}, S = Σ_k Tr_out J_k, so the sum is trace-preserving.
pub fn cp_project(raw: &QuantumInstrument) -> Result<QuantumInstrument> {
    let chois: Vec<CMatrix> = raw.maps().iter().map(|m| linalg::hermitian_fn(&m.choi(), |x| x.max(0.0))).collect();
    let d = 4;
    let mut s = CMatrix::zeros(d, d);
    for j in &chois {
        for a in 0..d {
            for b in 0..d {
                for o in 0..d {
                    s[(a, b)] += j[(o * d + a, o * d + b)];
                }
            }
        }
    }
    let (values, _) = linalg::hermitian_eigen(&s);
    if values.iter().any(|&v| v <= 1e-12) {
        return Err(Error::RankDeficient {
            rank: values.iter().filter(|&&v| v > 1e-12).count(),
            needed: d,
        });
    }
    let s_inv_half = linalg::hermitian_fn(&s, |x| 1.0 / x.sqrt());
    let side = linalg::identity(d).kronecker(&s_inv_half);
    let maps: Vec<PauliTransferMap> = chois.iter().map(|j| PauliTransferMap::from_choi(2, &(&side * j * &side))).collect();
    QuantumInstrument::unchecked(maps[0].clone(), maps[1].clone())
}
