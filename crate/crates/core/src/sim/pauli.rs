//! Normalized Pauli basis and Pauli transfer matrices.

use std::fmt;

use super::channel::QuantumChannel;
use super::gates;
use super::linalg::{self, c, tol, CMatrix, RMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_symbol(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis; the first factor is the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    /// All 4^n strings in lexicographic I < X < Y < Z order.
    pub fn all(n: usize) -> Vec<PauliString> {
        (0..4usize.pow(n as u32)).map(|i| Self::from_index(i, n)).collect()
    }

    pub fn from_index(mut index: usize, n: usize) -> Self {
        let mut out = vec![Pauli::I; n];
        for slot in out.iter_mut().rev() {
            *slot = Pauli::ALL[index % 4];
            index /= 4;
        }
        PauliString(out)
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, p| acc * 4 + *p as usize)
    }

    pub fn parse(label: &str) -> Option<Self> {
        label.chars().map(Pauli::from_symbol).collect::<Option<Vec<_>>>().map(PauliString)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| *p == Pauli::I)
    }

    pub fn matrix(&self) -> CMatrix {
        let mats: Vec<_> = self.0.iter().map(|p| p.matrix()).collect();
        linalg::kron_all(mats.iter())
    }

    /// True when the two strings anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        let clashes = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 1
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

/// P/√(2^n) for every string, in index order.
pub fn normalized_basis(n: usize) -> Vec<CMatrix> {
    let norm = c(1.0 / (2f64.powi(n as i32)).sqrt(), 0.0);
    PauliString::all(n).iter().map(|p| p.matrix() * norm).collect()
}

/// Real coordinates of a Hermitian-ish operator in the normalized Pauli basis.
pub fn to_pauli_vector(op: &CMatrix, basis: &[CMatrix]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(basis.len(), basis.iter().map(|b| linalg::inner(b, op).re))
}

pub fn from_pauli_vector(v: &nalgebra::DVector<f64>, basis: &[CMatrix]) -> CMatrix {
    let dim = basis[0].nrows();
    basis
        .iter()
        .zip(v.iter())
        .fold(CMatrix::zeros(dim, dim), |acc, (b, &x)| acc + b * c(x, 0.0))
}

/// Real 4^n × 4^n superoperator in the normalized Pauli basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTransferMap {
    n_qubits: usize,
    matrix: RMatrix,
}

impl PauliTransferMap {
    pub fn new(n_qubits: usize, matrix: RMatrix) -> Result<Self> {
        let dim = 4usize.pow(n_qubits as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 4usize.pow(n_qubits as u32);
        Self {
            n_qubits,
            matrix: RMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 4usize.pow(n_qubits as u32);
        Self {
            n_qubits,
            matrix: RMatrix::zeros(dim, dim),
        }
    }

    /// Tabulate a Hermiticity-preserving linear map on operators.
    pub fn from_map(n_qubits: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let basis = normalized_basis(n_qubits);
        let dim = basis.len();
        let mut m = RMatrix::zeros(dim, dim);
        for (j, bj) in basis.iter().enumerate() {
            let out = f(bj);
            for (i, bi) in basis.iter().enumerate() {
                m[(i, j)] = linalg::inner(bi, &out).re;
            }
        }
        Self { n_qubits, matrix: m }
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self::from_map(ch.n_qubits(), |op| ch.apply(op))
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        QuantumChannel::from_choi(&self.choi(), self.n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    /// Apply to an operator on `n_qubits` qubits.
    /// Linear extension to any operator: the Hermitian and anti-Hermitian parts map separately.
    pub fn apply(&self, op: &CMatrix) -> CMatrix {
        let basis = normalized_basis(self.n_qubits);
        let herm = (op + op.adjoint()) * c(0.5, 0.0);
        let anti = (op - op.adjoint()) * c(0.0, -0.5);
        let map = |h: &CMatrix| from_pauli_vector(&(&self.matrix * to_pauli_vector(h, &basis)), &basis);
        map(&herm) + map(&anti) * c(0.0, 1.0)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &PauliTransferMap) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &PauliTransferMap) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * s,
        }
    }

    /// Choi matrix Σ R_ij σ_i ⊗ σ_jᵀ (output ⊗ input).
    pub fn choi(&self) -> CMatrix {
        let basis = normalized_basis(self.n_qubits);
        let d = 1usize << self.n_qubits;
        let mut j = CMatrix::zeros(d * d, d * d);
        for (col, bj) in basis.iter().enumerate() {
            let bt = bj.transpose();
            for (row, bi) in basis.iter().enumerate() {
                let r = self.matrix[(row, col)];
                if r != 0.0 {
                    j += bi.kronecker(&bt) * c(r, 0.0);
                }
            }
        }
        j
    }

    pub fn from_choi(n_qubits: usize, choi: &CMatrix) -> Self {
        let basis = normalized_basis(n_qubits);
        let dim = basis.len();
        let mut m = RMatrix::zeros(dim, dim);
        for (jdx, bj) in basis.iter().enumerate() {
            let bt = bj.transpose();
            for (idx, bi) in basis.iter().enumerate() {
                m[(idx, jdx)] = linalg::inner(&bi.kronecker(&bt), choi).re;
            }
        }
        Self { n_qubits, matrix: m }
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.choi())
    }

    /// First row equal to (1, 0, …, 0).
    pub fn is_trace_preserving(&self, eps: f64) -> bool {
        self.matrix
            .row(0)
            .iter()
            .enumerate()
            .all(|(j, &v)| (v - if j == 0 { 1.0 } else { 0.0 }).abs() <= eps)
    }

    pub fn is_cp(&self) -> bool {
        self.min_choi_eigenvalue() >= -tol(1e-8)
    }

    /// Reorder tensor factors: qubit `k` of the result is qubit `perm[k]` of `self`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Self {
        let n = self.n_qubits;
        let map = |idx: usize| -> usize {
            let s = PauliString::from_index(idx, n);
            PauliString(perm.iter().map(|&k| s.0[k]).collect()).index()
        };
        let dim = self.matrix.nrows();
        let mut m = RMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(map(i), map(j))] = self.matrix[(i, j)];
            }
        }
        Self { n_qubits: n, matrix: m }
    }

    pub fn max_abs_diff(&self, other: &PauliTransferMap) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basis_is_orthonormal() {
        let b = normalized_basis(2);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = linalg::inner(x, y);
                assert!((ip.re - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert_eq!(PauliString::all(2)[0].to_string(), "II");
        assert_eq!(PauliString::all(2)[15].to_string(), "ZZ");
        assert_eq!(PauliString::parse("ZX").unwrap().index(), 13);
    }

    #[test]
    fn apply_is_complex_linear() {
        let h = QuantumChannel::unitary(gates::sqrt_y()).unwrap();
        let ptm = PauliTransferMap::from_channel(&h);
        let mut op = CMatrix::zeros(2, 2);
        op[(0, 1)] = c(1.0, 0.0);
        let direct = gates::sqrt_y() * &op * gates::sqrt_y().adjoint();
        assert!((ptm.apply(&op) - direct).camax() < 1e-14);
    }

    #[test]
    fn identity_and_z_pi_ptms() {
        let id = PauliTransferMap::from_channel(&QuantumChannel::identity(1));
        assert!((id.matrix() - RMatrix::identity(4, 4)).amax() < 1e-14);
        let zpi = PauliTransferMap::from_channel(&QuantumChannel::unitary(gates::rz(std::f64::consts::PI)).unwrap());
        let expected = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
        assert!((zpi.matrix() - expected).amax() < 1e-14);
    }

    #[test]
    fn dephasing_ptm_is_diagonal() {
        let cst = 0.42;
        let p = PauliTransferMap::from_channel(&QuantumChannel::dephasing(cst));
        let expected = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, cst, cst, 1.0]));
        assert!((p.matrix() - expected).amax() < 1e-14);
    }

    #[test]
    fn non_cp_ptm_rejected() {
        // Transpose map: PTM diag(1, 1, -1, 1) is positive but not CP.
        let m = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, 1.0]));
        let p = PauliTransferMap::new(1, m).unwrap();
        assert!(matches!(p.to_channel(), Err(Error::NonPhysical(_))));
    }

    #[test]
    fn permute_swaps_two_qubit_labels() {
        let ch = QuantumChannel::unitary(gates::rz(0.3).kronecker(&gates::identity())).unwrap();
        let p = PauliTransferMap::from_channel(&ch);
        let swapped = p.permute_qubits(&[1, 0]);
        let direct = PauliTransferMap::from_channel(
            &QuantumChannel::unitary(gates::identity().kronecker(&gates::rz(0.3))).unwrap(),
        );
        assert!(swapped.max_abs_diff(&direct) < 1e-14);
    }

    fn random_unitary(params: &[f64]) -> CMatrix {
        gates::rz(params[0]) * gates::ry(params[1]) * gates::rz(params[2])
    }

    fn random_channel(p: &[f64]) -> QuantumChannel {
        QuantumChannel::unitary(random_unitary(&p[0..3]))
            .unwrap()
            .then(&QuantumChannel::dephasing(p[3]))
            .unwrap()
            .then(&QuantumChannel::depolarizing(p[4]))
            .unwrap()
            .then(&QuantumChannel::unitary(random_unitary(&p[5..8])).unwrap())
            .unwrap()
    }

    proptest! {
        #[test]
        fn ptm_composition_matches_channel_composition(
            a in proptest::collection::vec(-3.0f64..3.0, 8),
            b in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let mut a = a; let mut b = b;
            a[3] = a[3].abs() / 3.0; a[4] = a[4].abs() / 3.0;
            b[3] = b[3].abs() / 3.0; b[4] = b[4].abs() / 3.0;
            let ca = random_channel(&a);
            let cb = random_channel(&b);
            let composed = PauliTransferMap::from_channel(&cb.then(&ca).unwrap());
            let product = PauliTransferMap::from_channel(&ca)
                .compose(&PauliTransferMap::from_channel(&cb)).unwrap();
            prop_assert!(composed.max_abs_diff(&product) < 1e-10);
            prop_assert!(composed.is_trace_preserving(1e-10));
            prop_assert!(composed.matrix().amax() <= 1.0 + 1e-9);
        }

        #[test]
        fn ptm_channel_round_trip(a in proptest::collection::vec(-3.0f64..3.0, 8)) {
            let mut a = a;
            a[3] = a[3].abs() / 3.0; a[4] = a[4].abs() / 3.0;
            let p = PauliTransferMap::from_channel(&random_channel(&a));
            let back = PauliTransferMap::from_channel(&p.to_channel().unwrap());
            prop_assert!(back.max_abs_diff(&p) < 1e-10);
        }

        #[test]
        fn unital_channels_fix_maximally_mixed(a in proptest::collection::vec(-3.0f64..3.0, 8)) {
            let mut a = a;
            a[3] = a[3].abs() / 3.0; a[4] = a[4].abs() / 3.0;
            let ch = random_channel(&a);
            let mixed = linalg::identity(2) * c(0.5, 0.0);
            prop_assert!((ch.apply(&mixed) - &mixed).camax() < 1e-12);
        }
    }
}
