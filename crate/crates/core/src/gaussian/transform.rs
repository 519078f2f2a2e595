//! Mapping of the cascade source onto a single source observed in additive
//! noise.
//!
//! With `X' = A + B` and a scaled observation `alpha Y'` where `Y' = X' + N`,
//! matching second moments with `(A + B, B)` gives
//! `alpha = varB / (varA + varB)` and `Var(N) = (varB - alpha^2 (varA + varB)) / alpha^2`.

use nalgebra::Matrix2;

use super::source::GaussianCascadeSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentSource {
    pub alpha: f64,
    pub var_noise: f64,
}

impl EquivalentSource {
    /// Covariance of `(X', alpha Y')`.
    pub fn covariance(&self, var_x: f64) -> Matrix2<f64> {
        let a = self.alpha;
        Matrix2::new(var_x, a * var_x, a * var_x, a * a * (var_x + self.var_noise))
    }
}

pub fn noisy_observation_transform(src: &GaussianCascadeSource) -> Result<EquivalentSource> {
    let b = src.var_b;
    if b <= 0.0 {
        return Err(Error::NumericDomain(
            "the transform is degenerate when varB = 0".into(),
        ));
    }
    let s = src.var_ab();
    let alpha = b / s;
    let var_noise = ((b - alpha * alpha * s) / (alpha * alpha)).max(0.0);
    Ok(EquivalentSource { alpha, var_noise })
}

/// Covariance of `(A + B, B)`.
pub fn target_covariance(src: &GaussianCascadeSource) -> Matrix2<f64> {
    Matrix2::new(src.var_ab(), src.var_b, src.var_b, src.var_b)
}
