use rayon::prelude::*;

use crate::error::Result;
use crate::sim::gates::{self, Cardinal};
use crate::sim::linalg::{self, CMatrix};

/// Seed and shot budget shared by every experiment. `shots = None` selects exact probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub shots: Option<u64>,
}

impl RunOptions {
    pub const DEFAULT_SHOTS: u64 = 500;

    pub fn exact() -> Self {
        Self { seed: 0, shots: None }
    }

    pub fn sampled(seed: u64, shots: u64) -> Self {
        Self {
            seed,
            shots: Some(shots),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.shots.is_none()
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self::sampled(0, Self::DEFAULT_SHOTS)
    }
}

/// Ordered parallel map over indices; results come back in index order.
pub fn par_indexed<T: Send>(n: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

/// √X|1⟩, the equator state every phase sweep starts from.
pub fn equator() -> CMatrix {
    let sx = gates::sqrt_x();
    &sx * Cardinal::One.density() * sx.adjoint()
}

/// P(|0⟩) after Z(φ) then √X on a single-qubit density matrix.
pub fn sweep_p0(rho: &CMatrix, phi: f64) -> f64 {
    let u = gates::sqrt_x() * gates::rz(phi);
    let out = &u * rho * u.adjoint();
    out[(0, 0)].re / linalg::trace(rho).re
}

/// n evenly spaced phases on [0, 2π).
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect()
}

/// Inclusive grid lo, lo + step, … up to hi (within round-off).
pub fn linear_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}
