//! Minimum first-hop rate for the Gaussian cascade and its triangular and
//! two-way variants.
//!
//! With the auxiliary normalised to unit noise, the program is
//!
//! ```text
//! minimise   R1 = max{ 1/2 log(varA / D1), 1/2 log(1 + alpha^2 varA), 0 }
//! subject to alpha^2 varA + beta^2 varB <= 2^(2 R2) - 1
//!            Var(A + B | U) <= D2
//! ```
//!
//! `R1` grows with `alpha`, so the solver looks for the smallest `alpha` that
//! admits a feasible `beta`. For fixed `alpha` the best `beta` is available in
//! closed form, which reduces the search to a log-spaced scan over `alpha`
//! followed by bisection on the first feasible cell.

use super::source::{GaussianAux, GaussianCascadeSource};
use crate::error::{Error, Result};

/// Number of log-spaced `alpha` grid points on `[1e-4, 1e4]`.
pub const ALPHA_GRID: usize = 400;
const ALPHA_MIN_EXP: f64 = -4.0;
const ALPHA_MAX_EXP: f64 = 4.0;
/// Relative slack on the constraints, absorbing round-off at the boundary.
const FEAS_RTOL: f64 = 1e-12;
const RATE_TOL: f64 = 1e-12;

/// Distortion and rate parameters. Fields not used by a program are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaussianQuery {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub dz1: Option<f64>,
    pub dz2: Option<f64>,
    pub r2: Option<f64>,
    pub r3: Option<f64>,
    pub r4: Option<f64>,
    pub r5: Option<f64>,
}

impl GaussianQuery {
    pub fn cascade(d1: f64, d2: f64, r2: f64) -> Self {
        GaussianQuery {
            d1: Some(d1),
            d2: Some(d2),
            r2: Some(r2),
            ..Default::default()
        }
    }

    pub fn triangular(d1: f64, d2: f64, r2: f64, r3: f64) -> Self {
        GaussianQuery {
            r3: Some(r3),
            ..Self::cascade(d1, d2, r2)
        }
    }

    pub fn two_way(d1: f64, d2: f64, d3: f64, r2: f64, r3: f64, r4: f64) -> Self {
        GaussianQuery {
            d3: Some(d3),
            r4: Some(r4),
            ..Self::triangular(d1, d2, r2, r3)
        }
    }

    pub(crate) fn distortion(v: Option<f64>, name: &str) -> Result<f64> {
        match v {
            Some(d) if d.is_finite() && d > 0.0 => Ok(d),
            Some(d) => Err(Error::invalid(format!("{name} must be positive and finite, got {d}"))),
            None => Err(Error::invalid(format!("{name} is required"))),
        }
    }

    pub(crate) fn rate(v: Option<f64>, name: &str) -> Result<f64> {
        match v {
            Some(r) if r.is_finite() && r >= 0.0 => Ok(r),
            Some(r) => Err(Error::invalid(format!("{name} must be nonnegative and finite, got {r}"))),
            None => Err(Error::invalid(format!("{name} is required"))),
        }
    }
}

/// Optimal operating point of a forward program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSolution {
    pub r1: f64,
    /// Optimal auxiliary with unit noise variance.
    pub aux: GaussianAux,
    /// Smallest `R2` for which the program is feasible.
    pub r2_threshold: f64,
    /// Second-hop distortion constraint actually imposed.
    pub effective_d2: f64,
    pub cond_var_a_given_ub: f64,
    pub cond_var_ab_given_u: f64,
}

/// Solution of the two-way triangular program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWaySolution {
    pub forward: CascadeSolution,
    /// Smallest backward rate meeting the `D3` constraint.
    pub r4_threshold: f64,
}

fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// `max{1/2 log(varAB / D2), 0}`.
pub fn cascade_r2_threshold(src: &GaussianCascadeSource, d2: f64) -> f64 {
    half_log2(src.var_ab() / d2).max(0.0)
}

/// `max{1/2 log(Var(Z|Y) / D3), 0}`.
pub fn two_way_r4_threshold(src: &GaussianCascadeSource, d3: f64) -> f64 {
    let s = src.var_z_given_y();
    if s <= d3 {
        0.0
    } else {
        half_log2(s / d3)
    }
}

/// First-hop rate for a given auxiliary gain on `A`.
pub fn r1_for_alpha(src: &GaussianCascadeSource, d1: f64, alpha: f64) -> f64 {
    let a = src.var_a;
    if a == 0.0 {
        return 0.0;
    }
    half_log2(a / d1)
        .max(0.5 * (alpha * alpha * a).ln_1p() / std::f64::consts::LN_2)
        .max(0.0)
}

struct Program {
    a: f64,
    b: f64,
    s: f64,
    k: f64,
    d2: f64,
}

impl Program {
    fn cond_var(&self, alpha: f64, beta: f64) -> f64 {
        let c = alpha * self.a + beta * self.b;
        self.s - c * c / (1.0 + alpha * alpha * self.a + beta * beta * self.b)
    }

    fn best_beta(&self, alpha: f64) -> Option<f64> {
        let rem = self.k - alpha * alpha * self.a;
        if rem < -FEAS_RTOL * (1.0 + self.k) {
            return None;
        }
        if self.b == 0.0 {
            return Some(0.0);
        }
        let beta_max = (rem.max(0.0) / self.b).sqrt();
        let c = self.s - self.d2;
        if self.b < c {
            Some((alpha * self.a / (c - self.b)).min(beta_max))
        } else {
            Some(beta_max)
        }
    }

    fn feasible(&self, alpha: f64) -> Option<f64> {
        let beta = self.best_beta(alpha)?;
        (self.cond_var(alpha, beta) <= self.d2 * (1.0 + FEAS_RTOL)).then_some(beta)
    }
}

/// Smallest feasible `alpha` and its `beta`; requires `r2` at or above the
/// threshold for `d2`.
fn min_alpha(src: &GaussianCascadeSource, d2: f64, r2: f64) -> (f64, f64) {
    let s = src.var_ab();
    if d2 >= s {
        return (0.0, 0.0);
    }
    let k = (2.0 * r2 * std::f64::consts::LN_2).exp_m1();
    let p = Program {
        a: src.var_a,
        b: src.var_b,
        s,
        k,
        d2,
    };
    let tight = (k / s).sqrt();
    if let Some(beta) = p.feasible(0.0) {
        return (0.0, beta);
    }
    if p.a == 0.0 {
        return (0.0, tight);
    }
    let mut lo = 0.0;
    let mut hi = tight;
    for i in 0..ALPHA_GRID {
        let e = ALPHA_MIN_EXP + (ALPHA_MAX_EXP - ALPHA_MIN_EXP) * i as f64 / (ALPHA_GRID - 1) as f64;
        let alpha = 10f64.powf(e);
        if alpha >= tight {
            break;
        }
        if p.feasible(alpha).is_some() {
            hi = alpha;
            break;
        }
        lo = alpha;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.feasible(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta = p.feasible(hi).unwrap_or(tight);
    (hi, beta)
}

fn solve(src: &GaussianCascadeSource, d1: f64, d2: f64, r2: f64, r2_threshold: f64) -> Result<CascadeSolution> {
    let (alpha, beta) = min_alpha(src, d2, r2);
    let aux = GaussianAux::new(alpha, beta, 1.0)?;
    Ok(CascadeSolution {
        r1: r1_for_alpha(src, d1, alpha),
        aux,
        r2_threshold,
        effective_d2: d2,
        cond_var_a_given_ub: aux.cond_var_a_given_ub(src),
        cond_var_ab_given_u: aux.cond_var_ab_given_u(src),
    })
}

/// Minimum `R1` for the Gaussian cascade.
pub fn cascade_min_r1(src: &GaussianCascadeSource, q: &GaussianQuery) -> Result<CascadeSolution> {
    let d1 = GaussianQuery::distortion(q.d1, "D1")?;
    let d2 = GaussianQuery::distortion(q.d2, "D2")?;
    let r2 = GaussianQuery::rate(q.r2, "R2")?;
    let thr = cascade_r2_threshold(src, d2);
    if r2 < thr - RATE_TOL {
        return Err(Error::infeasible(
            format!("R2 = {r2} is below the threshold {thr} needed to meet D2 = {d2}"),
            Some(thr),
        ));
    }
    solve(src, d1, d2, r2, thr)
}

/// Minimum `R1` when node 0 also has a rate-`R3` link to node 2, which
/// relaxes the second-hop constraint to `Var(A + B | U) <= 2^(2 R3) D2`.
pub fn triangular_min_r1(src: &GaussianCascadeSource, q: &GaussianQuery) -> Result<CascadeSolution> {
    let d1 = GaussianQuery::distortion(q.d1, "D1")?;
    let d2 = GaussianQuery::distortion(q.d2, "D2")?;
    let r2 = GaussianQuery::rate(q.r2, "R2")?;
    let r3 = GaussianQuery::rate(q.r3, "R3")?;
    let d2_eff = d2 * (2.0 * r3).exp2();
    let thr = cascade_r2_threshold(src, d2_eff);
    if r2 < thr - RATE_TOL {
        return Err(Error::infeasible(
            format!(
                "R2 + R3 = {} is below the threshold {} needed to meet D2 = {d2}",
                r2 + r3,
                cascade_r2_threshold(src, d2)
            ),
            Some(thr),
        ));
    }
    solve(src, d1, d2_eff, r2, thr)
}

/// Two-way triangular network: the forward part is the triangular program and
/// the backward link only has to meet `D3`.
pub fn two_way_triangular_min_r1(src: &GaussianCascadeSource, q: &GaussianQuery) -> Result<TwoWaySolution> {
    let d3 = GaussianQuery::distortion(q.d3, "D3")?;
    let r4 = GaussianQuery::rate(q.r4, "R4")?;
    let thr = two_way_r4_threshold(src, d3);
    if r4 < thr - RATE_TOL {
        return Err(Error::infeasible(
            format!("R4 = {r4} is below the threshold {thr} needed to meet D3 = {d3}"),
            Some(thr),
        ));
    }
    Ok(TwoWaySolution {
        forward: triangular_min_r1(src, q)?,
        r4_threshold: thr,
    })
}
