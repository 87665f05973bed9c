//! Standard gates and single-qubit states.
//!
//! Conventions: |0⟩ is spin-up, |1⟩ spin-down; `rz(θ) = exp(-iθZ/2)` so a
//! positive angle advances the relative phase of |1⟩.

use std::f64::consts::FRAC_1_SQRT_2;

use super::linalg::{c, cmat, CMatrix, C64, I, ONE, ZERO};

pub fn identity() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn pauli_x() -> CMatrix {
    cmat(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    cmat(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    cmat(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn rz(theta: f64) -> CMatrix {
    cmat(
        2,
        2,
        &[C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0)],
    )
}

pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    cmat(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
}

pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    cmat(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

/// Native √X.
pub fn sqrt_x() -> CMatrix {
    rx(std::f64::consts::FRAC_PI_2)
}

pub fn sqrt_y() -> CMatrix {
    ry(std::f64::consts::FRAC_PI_2)
}

/// CNOT with the control on the first operand.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// diag(1, 1, 1, e^{iθ}).
pub fn cphase(theta: f64) -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = C64::from_polar(1.0, theta);
    m
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// The six single-qubit cardinal states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Cardinal {
    pub const ALL: [Cardinal; 6] = [
        Cardinal::Zero,
        Cardinal::One,
        Cardinal::Plus,
        Cardinal::Minus,
        Cardinal::PlusI,
        Cardinal::MinusI,
    ];

    pub fn ket(self) -> [C64; 2] {
        let h = c(FRAC_1_SQRT_2, 0.0);
        match self {
            Cardinal::Zero => [ONE, ZERO],
            Cardinal::One => [ZERO, ONE],
            Cardinal::Plus => [h, h],
            Cardinal::Minus => [h, -h],
            Cardinal::PlusI => [h, h * I],
            Cardinal::MinusI => [h, -h * I],
        }
    }

    pub fn density(self) -> CMatrix {
        let k = self.ket();
        cmat(2, 2, &[k[0] * k[0].conj(), k[0] * k[1].conj(), k[1] * k[0].conj(), k[1] * k[1].conj()])
    }

    pub fn label(self) -> &'static str {
        match self {
            Cardinal::Zero => "0",
            Cardinal::One => "1",
            Cardinal::Plus => "+",
            Cardinal::Minus => "-",
            Cardinal::PlusI => "+i",
            Cardinal::MinusI => "-i",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Cardinal::ALL.into_iter().find(|c| c.label() == s)
    }
}
