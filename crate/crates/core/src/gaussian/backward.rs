//! Backward links of the extended two-way Gaussian cascade.
//!
//! Node 2 describes `Z` to node 1 (rate `R3`, private), to node 0 (rate
//! `R4`, private) and to both (rate `R5`, common). Node 1 wants `Z` within
//! `DZ1`, node 0 within `DZ2`, both with side information `Y`. With
//! `s = Var(Z | Y)` and `r(x) = 1/2 log(s / x)` the region is
//!
//! ```text
//! R3      >= r(DZ1)
//! R3 + R5 >= r(min{DZ1, DZ2})
//! R4 + R5 >= r(DZ2)
//! ```
//!
//! Achievability uses nested Gaussian descriptions `U = Z + N`, where the
//! noise variance `q_map(x, s)` makes `Var(Z | Y, U) = x`.

use nalgebra::DMatrix;

use super::mmse::conditional_variance;
use super::source::GaussianCascadeSource;
use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

/// Membership of a backward rate triple together with the slack of each
/// inequality, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardRegionCheck {
    pub member: bool,
    pub slacks: [f64; 3],
}

/// Rates and distortions realised by a construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardRates {
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
    pub dz1: f64,
    pub dz2: f64,
}

/// Nested description chain built for a backward operating point.
///
/// Each `U_i` equals `Z` plus Gaussian noise, with `Var(Z | Y, U_i)` given by
/// `level_u*`. The `w*` fields are the variances of the increments `W_i` of the
/// chain. `None` marks an unbounded increment, i.e. the auxiliary it produces
/// carries no information and can be taken constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardConstruction {
    pub case_id: u8,
    pub d_prime: f64,
    pub d_double_prime: Option<f64>,
    pub level_u1: f64,
    pub level_u2: f64,
    pub level_u3: f64,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub w3: Option<f64>,
    pub achieved: BackwardRates,
}

fn r(s: f64, x: f64) -> f64 {
    0.5 * (s / x).log2()
}

/// `Q(x) = x s / (s - x)`: the noise variance `N` for which
/// `Var(Z | Y, Z + N) = x` when `Var(Z | Y) = s`.
pub fn q_map(x: f64, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::invalid(format!("s must be positive, got {s}")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("x must be positive, got {x}")));
    }
    if x >= s {
        return Err(Error::NumericDomain(format!(
            "Q(x) is unbounded for x = {x} >= s = {s}"
        )));
    }
    Ok(x * s / (s - x))
}

fn check_targets(s: f64, dz1: f64, dz2: f64) -> Result<()> {
    for (name, d) in [("DZ1", dz1), ("DZ2", dz2)] {
        if !(d.is_finite() && d > 0.0 && d <= s * (1.0 + TOL)) {
            return Err(Error::invalid(format!(
                "{name} = {d} must lie in (0, Var(Z|Y)] = (0, {s}]"
            )));
        }
    }
    Ok(())
}

/// Evaluate the three backward inequalities at `(R3, R4, R5)`.
pub fn extended_backward_region_check(
    src: &GaussianCascadeSource,
    point: (f64, f64, f64),
    dz1: f64,
    dz2: f64,
) -> Result<BackwardRegionCheck> {
    let s = src.var_z_given_y();
    check_targets(s, dz1, dz2)?;
    let (r3, r4, r5) = point;
    for (name, v) in [("R3", r3), ("R4", r4), ("R5", r5)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let rr = |x: f64| r(s, x).max(0.0);
    let slacks = [
        r3 - rr(dz1),
        r3 + r5 - rr(dz1.min(dz2)),
        r4 + r5 - rr(dz2),
    ];
    Ok(BackwardRegionCheck {
        member: slacks.iter().all(|&v| v >= -TOL),
        slacks,
    })
}

/// Covariance of `(Z, Y, U1, U2, U3)` and the indices of the informative
/// auxiliaries.
struct Chain {
    cov: DMatrix<f64>,
    s: f64,
    informative: [bool; 3],
}

impl Chain {
    fn new(src: &GaussianCascadeSource, levels: [f64; 3]) -> Result<Self> {
        let s = src.var_z_given_y();
        let z = src.var_z;
        let mut q = [0.0; 3];
        let mut informative = [false; 3];
        for i in 0..3 {
            if levels[i] < s * (1.0 - TOL) {
                q[i] = q_map(levels[i], s)?;
                informative[i] = true;
            }
        }
        let mut cov = DMatrix::zeros(5, 5);
        cov[(0, 0)] = z;
        cov[(0, 1)] = z;
        cov[(1, 0)] = z;
        cov[(1, 1)] = src.var_y();
        for i in 0..3 {
            cov[(0, 2 + i)] = z;
            cov[(2 + i, 0)] = z;
            cov[(1, 2 + i)] = z;
            cov[(2 + i, 1)] = z;
            for j in 0..3 {
                // Uninformative members get a placeholder that keeps the
                // matrix PSD; they are never conditioned on.
                let qi = if informative[i] { q[i] } else { 1.0 };
                let qj = if informative[j] { q[j] } else { 1.0 };
                cov[(2 + i, 2 + j)] = if i == j {
                    z + qi
                } else if informative[i] && informative[j] {
                    z + qi.min(qj)
                } else {
                    z
                };
            }
        }
        Ok(Chain { cov, s, informative })
    }

    /// `Var(Z | Y, U_S)` for `S` a subset of {1, 2, 3}.
    fn mmse(&self, aux: &[usize]) -> Result<f64> {
        let mut obs = vec![1];
        for &k in aux {
            if self.informative[k - 1] {
                obs.push(1 + k);
            }
        }
        conditional_variance(&self.cov, 0, &obs)
    }

    /// `I(U_S; Z | Y)` in bits.
    fn info(&self, aux: &[usize]) -> Result<f64> {
        let m = self.mmse(aux)?;
        if m <= 0.0 {
            return Err(Error::NumericDomain("degenerate description chain".into()));
        }
        Ok(r(self.s, m).max(0.0))
    }
}

fn link(fine: f64, coarse: f64, s: f64) -> Result<Option<f64>> {
    if coarse >= s * (1.0 - TOL) {
        return Ok(None);
    }
    Ok(Some((q_map(coarse, s)? - q_map(fine, s)?).max(0.0)))
}

/// Build the nested description chain for backward targets `(DZ1, DZ2)`
/// under the rate budget `(R3, R4)` and report the rates it needs.
///
/// Case 1 (`DZ1 <= DZ2`) refines `U2 -> U3 -> U1`. Case 2 (`DZ1 > DZ2`,
/// `R3 >= R4`) refines `U2 -> U1 -> U3`. Case 3 (`DZ1 > DZ2`, `R3 < R4`) is
/// Case 2 with `U2 = U1`. Each intermediate level is set by the budget it
/// must fit and clamped so it never falls below `DZ2`.
pub fn extended_backward_achievability(
    src: &GaussianCascadeSource,
    dz1: f64,
    dz2: f64,
    budget: (f64, f64),
) -> Result<BackwardConstruction> {
    let s = src.var_z_given_y();
    check_targets(s, dz1, dz2)?;
    let dz1 = dz1.min(s);
    let dz2 = dz2.min(s);
    let (r3, r4) = budget;
    for (name, v) in [("R3", r3), ("R4", r4)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let need3 = r(s, dz1).max(0.0);
    if r3 < need3 - TOL {
        return Err(Error::infeasible(
            format!("R3 >= 1/2 log(Var(Z|Y)/DZ1) violated: R3 = {r3} < {need3}"),
            Some(need3),
        ));
    }
    let level = |rate: f64| s * (-2.0 * rate).exp2();

    if dz1 <= dz2 {
        let d_prime = level(r4).max(dz2);
        let chain = Chain::new(src, [dz1, d_prime, dz2])?;
        let r4a = chain.info(&[2])?;
        let achieved = BackwardRates {
            r3: chain.info(&[1, 2, 3])?,
            r4: r4a,
            r5: (chain.info(&[2, 3])? - r4a).max(0.0),
            dz1: chain.mmse(&[1])?,
            dz2: chain.mmse(&[3])?,
        };
        return Ok(BackwardConstruction {
            case_id: 1,
            d_prime,
            d_double_prime: None,
            level_u1: dz1,
            level_u2: d_prime,
            level_u3: dz2,
            w1: if dz1 < s * (1.0 - TOL) { Some(q_map(dz1, s)?) } else { None },
            w3: link(dz1, dz2, s)?,
            w2: link(dz2, d_prime, s)?,
            achieved,
        });
    }

    let d_prime = level(r3).max(dz2).min(dz1);
    let w3 = if dz2 < s * (1.0 - TOL) { Some(q_map(dz2, s)?) } else { None };
    let w1 = link(dz2, d_prime, s)?;
    if r3 >= r4 {
        let d2p = level(r4).max(d_prime);
        let chain = Chain::new(src, [d_prime, d2p, dz2])?;
        let r4a = chain.info(&[2])?;
        let achieved = BackwardRates {
            r3: chain.info(&[1, 2])?,
            r4: r4a,
            r5: (chain.info(&[1, 2, 3])? - r4a).max(0.0),
            dz1: chain.mmse(&[1])?,
            dz2: chain.mmse(&[3])?,
        };
        Ok(BackwardConstruction {
            case_id: 2,
            d_prime,
            d_double_prime: Some(d2p),
            level_u1: d_prime,
            level_u2: d2p,
            level_u3: dz2,
            w1,
            w2: link(d_prime, d2p, s)?,
            w3,
            achieved,
        })
    } else {
        let chain = Chain::new(src, [d_prime, d_prime, dz2])?;
        let r3a = chain.info(&[1])?;
        let achieved = BackwardRates {
            r3: r3a,
            r4: r3a,
            r5: (chain.info(&[1, 3])? - r3a).max(0.0),
            dz1: chain.mmse(&[1])?,
            dz2: chain.mmse(&[3])?,
        };
        Ok(BackwardConstruction {
            case_id: 3,
            d_prime,
            d_double_prime: None,
            level_u1: d_prime,
            level_u2: d_prime,
            level_u3: dz2,
            w1,
            w2: Some(0.0),
            w3,
            achieved,
        })
    }
}
