//! Linear MMSE for jointly Gaussian vectors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Smallest eigenvalue accepted, relative to the largest diagonal entry.
const PSD_TOL: f64 = 1e-10;
/// Eigenvalues of the observed block below this fraction of the largest one
/// are treated as zero when inverting.
const PINV_RTOL: f64 = 1e-12;

fn check_cov(cov: &DMatrix<f64>) -> Result<()> {
    if !cov.is_square() {
        return Err(Error::invalid("covariance matrix must be square"));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericDomain("covariance has non-finite entries".into()));
    }
    let n = cov.nrows();
    let scale = (0..n).map(|i| cov[(i, i)].abs()).fold(1.0f64, f64::max);
    for i in 0..n {
        for j in 0..i {
            if (cov[(i, j)] - cov[(j, i)]).abs() > PSD_TOL * scale {
                return Err(Error::NumericDomain(format!(
                    "covariance is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if n > 0 {
        let min = SymmetricEigen::new(cov.clone()).eigenvalues.min();
        if min < -PSD_TOL * scale {
            return Err(Error::NumericDomain(format!(
                "covariance is not positive semidefinite (eigenvalue {min:e})"
            )));
        }
    }
    Ok(())
}

fn check_indices(n: usize, idx: &[usize]) -> Result<()> {
    for (k, &i) in idx.iter().enumerate() {
        if i >= n {
            return Err(Error::invalid(format!("index {i} out of range for dimension {n}")));
        }
        if idx[..k].contains(&i) {
            return Err(Error::invalid(format!("index {i} listed twice")));
        }
    }
    Ok(())
}

fn pseudo_inverse(m: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let inv = eig
        .eigenvalues
        .map(|l| if top > 0.0 && l > PINV_RTOL * top { 1.0 / l } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

fn sub(cov: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| cov[(rows[i], cols[j])])
}

/// Covariance of `target` given `observed`, by Schur complement. A singular
/// observed block is handled with its pseudo-inverse, which conditions on the
/// non-degenerate part of the observation.
pub fn conditional_covariance(
    cov: &DMatrix<f64>,
    target: &[usize],
    observed: &[usize],
) -> Result<DMatrix<f64>> {
    check_cov(cov)?;
    check_indices(cov.nrows(), target)?;
    check_indices(cov.nrows(), observed)?;
    let stt = sub(cov, target, target);
    if observed.is_empty() {
        return Ok(stt);
    }
    let sto = sub(cov, target, observed);
    let soo = sub(cov, observed, observed);
    let mut out = &stt - &sto * pseudo_inverse(soo) * sto.transpose();
    for i in 0..out.nrows() {
        if out[(i, i)] < 0.0 {
            out[(i, i)] = 0.0;
        }
    }
    Ok(out)
}

/// `Var(target | observed)`.
pub fn conditional_variance(cov: &DMatrix<f64>, target: usize, observed: &[usize]) -> Result<f64> {
    if observed.contains(&target) {
        check_cov(cov)?;
        check_indices(cov.nrows(), observed)?;
        return Ok(0.0);
    }
    Ok(conditional_covariance(cov, &[target], observed)?[(0, 0)])
}
