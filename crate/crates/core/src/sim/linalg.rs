//! Dense linear-algebra helpers shared by the simulator and the estimators.
//!
//! Every matrix in this crate is at most 64×64, so everything here is plain
//! dense arithmetic on `nalgebra::DMatrix`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Scale applied to every numerical tolerance, read once from `MCM_EPS_SCALE`.
pub fn eps_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        std::env::var("MCM_EPS_SCALE")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(1.0)
    })
}

pub fn tol(base: f64) -> f64 {
    base * eps_scale()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cmat(rows: usize, cols: usize, data: &[C64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, data)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    mats.into_iter()
        .fold(identity(1), |acc, m| acc.kronecker(m))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Frobenius inner product Tr[A† B].
pub fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).camax()
}

pub fn unitary_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.nrows())).camax()
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Rebuild V diag(f(λ)) V† from a Hermitian eigen-decomposition.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        out += v * v.adjoint() * c(w, 0.0);
    }
    out
}

/// Square root of a positive semidefinite matrix (negative eigenvalues clipped to 0).
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))² between two density matrices.
pub fn state_fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let (values, _) = hermitian_eigen(&inner);
    // Round-off eigenvalues of rank-deficient products would add O(√ε) each.
    let floor = 1e-13 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let root: f64 = values.iter().filter(|&&v| v > floor).map(|v| v.sqrt()).sum();
    root * root
}

/// Moore–Penrose pseudo-inverse of a real matrix.
pub fn real_pinv(m: &RMatrix) -> RMatrix {
    let eps = 1e-12 * m.amax().max(1.0);
    m.clone()
        .pseudo_inverse(eps)
        .expect("pseudo-inverse with non-negative epsilon")
}

pub fn real_rank(m: &RMatrix, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * max.max(f64::MIN_POSITIVE)).count()
}

/// Matrix exponential of a real square matrix.
pub fn expm(m: &RMatrix) -> RMatrix {
    m.exp()
}

/// Principal matrix logarithm of a real square matrix by inverse scaling and squaring.
///
/// Fails when the spectrum touches the closed negative real axis, where no
/// real principal logarithm exists.
pub fn logm(m: &RMatrix) -> Result<RMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let n = m.nrows();
    let scale = m.camax().max(1.0);
    for ev in m.clone().complex_eigenvalues().iter() {
        if ev.im.abs() <= 1e-9 * scale && ev.re <= 1e-12 * scale {
            return Err(Error::LogBranch(format!(
                "eigenvalue {:.3e}{:+.3e}i on the negative real axis",
                ev.re, ev.im
            )));
        }
    }
    let eye = RMatrix::identity(n, n);
    let mut x = m.clone();
    let mut squarings = 0u32;
    while (&x - &eye).norm() > 0.05 {
        if squarings > 64 {
            return Err(Error::LogBranch("square-root iteration did not converge".into()));
        }
        x = sqrtm(&x)?;
        squarings += 1;
    }
    let e = &x - &eye;
    let mut term = e.clone();
    let mut sum = RMatrix::zeros(n, n);
    for k in 1..=40 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += &term * (sign / k as f64);
        term = &term * &e;
    }
    Ok(sum * 2f64.powi(squarings as i32))
}

/// Principal square root via the Denman–Beavers iteration.
fn sqrtm(a: &RMatrix) -> Result<RMatrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = RMatrix::identity(n, n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm().max(1.0) {
            break;
        }
    }
    Ok(y)
}
