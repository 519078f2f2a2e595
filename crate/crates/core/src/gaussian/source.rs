//! The Gaussian source model and the scalar auxiliary.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Independent zero-mean Gaussians `A`, `B`, `Z` with `X = A + B + Z`,
/// `Y = B + Z`. Node 0 sees `X`, node 1 sees `Y`, node 2 sees `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCascadeSource {
    pub var_a: f64,
    pub var_b: f64,
    pub var_z: f64,
}

impl GaussianCascadeSource {
    pub fn new(var_a: f64, var_b: f64, var_z: f64) -> Result<Self> {
        for (name, v) in [("var_a", var_a), ("var_b", var_b), ("var_z", var_z)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if var_a + var_b + var_z <= 0.0 {
            return Err(Error::invalid("at least one variance must be positive"));
        }
        Ok(GaussianCascadeSource {
            var_a,
            var_b,
            var_z,
        })
    }

    /// `Var(A + B)`.
    pub fn var_ab(&self) -> f64 {
        self.var_a + self.var_b
    }

    pub fn var_x(&self) -> f64 {
        self.var_a + self.var_b + self.var_z
    }

    pub fn var_y(&self) -> f64 {
        self.var_b + self.var_z
    }

    /// `Var(Z | Y)`.
    pub fn var_z_given_y(&self) -> f64 {
        let d = self.var_b + self.var_z;
        if d > 0.0 {
            self.var_z * self.var_b / d
        } else {
            0.0
        }
    }

    /// Covariance of `(A, B, Z, X, Y)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let (a, b, z) = (self.var_a, self.var_b, self.var_z);
        DMatrix::from_row_slice(
            5,
            5,
            &[
                a, 0.0, 0.0, a, 0.0, //
                0.0, b, 0.0, b, b, //
                0.0, 0.0, z, z, z, //
                a, b, z, a + b + z, b + z, //
                0.0, b, z, b + z, b + z,
            ],
        )
    }
}

/// Auxiliary `U = alpha A + beta B + Z*` with `Z* ~ N(0, var_zstar)`
/// independent of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAux {
    pub alpha: f64,
    pub beta: f64,
    pub var_zstar: f64,
}

impl GaussianAux {
    pub fn new(alpha: f64, beta: f64, var_zstar: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::invalid("auxiliary gains must be finite"));
        }
        if !(var_zstar.is_finite() && var_zstar > 0.0) {
            return Err(Error::invalid("auxiliary noise variance must be positive"));
        }
        Ok(GaussianAux {
            alpha,
            beta,
            var_zstar,
        })
    }

    /// Same auxiliary up to scale: `(c alpha, c beta, c^2 var_zstar)`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.alpha, c * self.beta, c * c * self.var_zstar)
    }

    pub fn var_u(&self, src: &GaussianCascadeSource) -> f64 {
        self.alpha * self.alpha * src.var_a + self.beta * self.beta * src.var_b + self.var_zstar
    }

    /// `I(U; A, B)` in bits, the rate the auxiliary costs on the second hop.
    pub fn rate(&self, src: &GaussianCascadeSource) -> f64 {
        0.5 * (self.var_u(src) / self.var_zstar).log2()
    }

    /// `Var(A | U, B)`.
    pub fn cond_var_a_given_ub(&self, src: &GaussianCascadeSource) -> f64 {
        let a = src.var_a;
        let den = self.alpha * self.alpha * a + self.var_zstar;
        a * self.var_zstar / den
    }

    /// `Var(A + B | U)`.
    pub fn cond_var_ab_given_u(&self, src: &GaussianCascadeSource) -> f64 {
        let c = self.alpha * src.var_a + self.beta * src.var_b;
        (src.var_ab() - c * c / self.var_u(src)).max(0.0)
    }

    /// Covariance of `(A, B, Z, X, Y, U)`.
    pub fn joint_covariance(&self, src: &GaussianCascadeSource) -> DMatrix<f64> {
        let mut cov = src.covariance().resize(6, 6, 0.0);
        let ua = self.alpha * src.var_a;
        let ub = self.beta * src.var_b;
        let row = [ua, ub, 0.0, ua + ub, ub, self.var_u(src)];
        for (j, v) in row.into_iter().enumerate() {
            cov[(5, j)] = v;
            cov[(j, 5)] = v;
        }
        cov
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::mmse::conditional_variance;

    #[test]
    fn validates_source() {
        assert!(GaussianCascadeSource::new(-1.0, 1.0, 1.0).is_err());
        assert!(GaussianCascadeSource::new(0.0, 0.0, 0.0).is_err());
        assert!(GaussianCascadeSource::new(f64::NAN, 1.0, 1.0).is_err());
        let s = GaussianCascadeSource::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.var_z_given_y(), 0.5);
        let t = GaussianCascadeSource::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(t.var_z_given_y(), 0.0);
    }

    #[test]
    fn closed_forms_match_schur() {
        let src = GaussianCascadeSource::new(1.7, 0.4, 2.2).unwrap();
        let u = GaussianAux::new(0.8, -1.3, 0.6).unwrap();
        let cov = u.joint_covariance(&src);
        let a_ub = conditional_variance(&cov, 0, &[5, 1]).unwrap();
        assert!((a_ub - u.cond_var_a_given_ub(&src)).abs() < 1e-12);
        // Append A + B as a seventh coordinate.
        let mut m = cov.clone().resize(7, 7, 0.0);
        for j in 0..6 {
            let v = cov[(0, j)] + cov[(1, j)];
            m[(6, j)] = v;
            m[(j, 6)] = v;
        }
        m[(6, 6)] = src.var_ab();
        let ab_u = conditional_variance(&m, 6, &[5]).unwrap();
        assert!((ab_u - u.cond_var_ab_given_u(&src)).abs() < 1e-12);
    }
}
