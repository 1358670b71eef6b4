//! Small regression and summary helpers shared by the experiment and envelope code.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r2: f64,
    /// HC1 heteroscedasticity-consistent covariance of `coef`, row-major p×p.
    pub cov_hc1: Vec<f64>,
}

impl OlsFit {
    pub fn hc1_se(&self, j: usize) -> f64 {
        let p = self.coef.len();
        self.cov_hc1[j * p + j].max(0.0).sqrt()
    }
}

/// Least squares of `y` on the given regressor columns (include a column of ones for an intercept).
pub fn ols(columns: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let p = columns.len();
    let n = y.len();
    if p == 0 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Fit("regressors must be non-empty columns matching y".into()));
    }
    if n <= p {
        return Err(Error::Fit(format!("{n} observations cannot identify {p} coefficients")));
    }
    if y.iter().chain(columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite value in regression data".into()));
    }
    // modified Gram-Schmidt: X = QR
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![0.0; p * p];
    for j in 0..p {
        let scale = columns[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for k in 0..j {
            let d: f64 = q[k].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[k * p + j] = d;
            let qk = q[k].clone();
            for (v, a) in q[j].iter_mut().zip(&qk) {
                *v -= d * a;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * scale.max(f64::MIN_POSITIVE)) || norm == 0.0 {
            return Err(Error::Fit("regressors are collinear".into()));
        }
        r[j * p + j] = norm;
        q[j].iter_mut().for_each(|v| *v /= norm);
    }
    let qty: Vec<f64> = q.iter().map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut coef = vec![0.0; p];
    for j in (0..p).rev() {
        let s: f64 = (j + 1..p).map(|k| r[j * p + k] * coef[k]).sum();
        coef[j] = (qty[j] - s) / r[j * p + j];
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..p).map(|j| columns[j][i] * coef[j]).sum::<f64>())
        .collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    // (X'X)^{-1} = R^{-1} R^{-T}
    let mut rinv = vec![0.0; p * p];
    for j in 0..p {
        rinv[j * p + j] = 1.0 / r[j * p + j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[i * p + k] * rinv[k * p + j]).sum();
            rinv[i * p + j] = -s / r[i * p + i];
        }
    }
    let mut bread = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            bread[i * p + j] = (0..p).map(|k| rinv[i * p + k] * rinv[j * p + k]).sum();
        }
    }
    let mut meat = vec![0.0; p * p];
    for (obs, e) in residuals.iter().enumerate() {
        let e2 = e * e;
        for i in 0..p {
            for j in 0..p {
                meat[i * p + j] += e2 * columns[i][obs] * columns[j][obs];
            }
        }
    }
    let scale = n as f64 / (n - p) as f64;
    let mut tmp = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            tmp[i * p + j] = (0..p).map(|k| bread[i * p + k] * meat[k * p + j]).sum();
        }
    }
    let mut cov_hc1 = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            cov_hc1[i * p + j] = scale * (0..p).map(|k| tmp[i * p + k] * bread[k * p + j]).sum::<f64>();
        }
    }
    Ok(OlsFit { coef, residuals, r2, cov_hc1 })
}

/// Simple linear regression of `y` on `x` with an intercept; coefficient 1 is the slope.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    ols(&[vec![1.0; x.len()], x.to_vec()], y)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample standard deviation.
pub fn sample_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)).sqrt()
}

/// Hill estimate of the tail index from the `k` largest of `values` (which must be positive there).
pub fn hill_estimator(values: &[f64], k: usize) -> Result<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if k < 1 || k >= v.len() {
        return Err(Error::Fit(format!("Hill estimator needs 1 <= k < n, got k={k}, n={}", v.len())));
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let threshold = v[k];
    if !(threshold > 0.0) {
        return Err(Error::Fit("Hill estimator needs positive order statistics".into()));
    }
    let s: f64 = v[..k].iter().map(|x| (x / threshold).ln()).sum::<f64>() / k as f64;
    if !(s > 0.0) {
        return Err(Error::Fit("Hill estimator: no spread above the threshold".into()));
    }
    Ok(1.0 / s)
}
