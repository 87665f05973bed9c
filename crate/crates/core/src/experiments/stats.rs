//! Least-squares fits and the two-sample Kolmogorov–Smirnov test.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// y ≈ offset + amplitude · sin(φ + phase), fitted linearly as c + a cos φ + b sin φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineFit {
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub rms_residual: f64,
}

impl CosineFit {
    /// Peak-to-peak swing of a probability trace, i.e. the Bloch-vector length it implies.
    pub fn visibility(&self) -> f64 {
        2.0 * self.amplitude
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.offset + self.amplitude * (phi + self.phase).sin()
    }
}

fn least_squares(design: DMatrix<f64>, y: &[f64]) -> Result<DVector<f64>> {
    let n = design.ncols();
    if y.len() < n {
        return Err(Error::FitDegenerate(format!("{} points for {n} parameters", y.len())));
    }
    let rhs = DVector::from_column_slice(y);
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax.max(1e-300)) {
        return Err(Error::FitDegenerate("design matrix is singular".into()));
    }
    svd.solve(&rhs, 0.0).map_err(|e| Error::FitDegenerate(e.into()))
}

/// Needs at least 3 distinct phases; errors when the fitted amplitude is below 1e-6.
pub fn fit_cosine(phis: &[f64], ys: &[f64]) -> Result<CosineFit> {
    let fit = fit_cosine_unchecked(phis, ys)?;
    if fit.amplitude < 1e-6 {
        return Err(Error::FitDegenerate(format!("amplitude {:.3e} below 1e-6", fit.amplitude)));
    }
    Ok(fit)
}

/// Same fit without the amplitude floor, for traces that are legitimately flat.
pub fn fit_cosine_unchecked(phis: &[f64], ys: &[f64]) -> Result<CosineFit> {
    if phis.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: phis.len(),
            got: ys.len(),
        });
    }
    let design = DMatrix::from_fn(phis.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => phis[i].cos(),
        _ => phis[i].sin(),
    });
    let coef = least_squares(design, ys)?;
    let (c, a, b) = (coef[0], coef[1], coef[2]);
    let mut fit = CosineFit {
        amplitude: a.hypot(b),
        phase: a.atan2(b),
        offset: c,
        rms_residual: 0.0,
    };
    let ss: f64 = phis.iter().zip(ys).map(|(&p, &y)| (y - fit.eval(p)).powi(2)).sum();
    fit.rms_residual = (ss / ys.len() as f64).sqrt();
    Ok(fit)
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let design = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { xs[i] } else { 1.0 });
    let coef = least_squares(design, ys)?;
    Ok((coef[0], coef[1]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS test with the asymptotic Kolmogorov p-value
/// (effective size √(nm/(n+m)) with the Stephens small-sample correction).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return KsResult {
            statistic: 0.0,
            p_value: 1.0,
        };
    }
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    }
}

/// Q_KS(λ) = 2 Σ_{j≥1} (−1)^{j−1} exp(−2 j² λ²).
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
