//! Interaction lemma for two rounds of deterministic messages between two
//! terminals.
//!
//! Terminal A observes `(A1, A2)` and terminal B observes `(B1, B2)`, where the
//! pairs `(A1, B1)` and `(A2, B2)` are independent. A sends `M1 = f(A1, A2)`
//! and B replies with `M2 = g(B1, B2, M1)`. Then
//!
//! * `I(A2; B1 | M1, M2, A1, B2) = 0`
//! * `I(B1; M1 | A1, B2) = 0`
//! * `I(A2; M2 | M1, A1, B2) = 0`

use super::info::conditional_mutual_information;
use super::pmf::{DeterministicMap, JointPmf};
use crate::error::{Error, Result};

/// The three conditional mutual informations of the lemma, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaspiReport {
    /// `I(A2; B1 | M1, M2, A1, B2)`
    pub first: f64,
    /// `I(B1; M1 | A1, B2)`
    pub second: f64,
    /// `I(A2; M2 | M1, A1, B2)`
    pub third: f64,
}

impl KaspiReport {
    pub fn max(&self) -> f64 {
        self.first.max(self.second).max(self.third)
    }
}

// Variable order in the assembled joint.
const A1: usize = 0;
const B1: usize = 1;
const A2: usize = 2;
const B2: usize = 3;
const M1: usize = 4;
const M2: usize = 5;

fn first_round(p_first: &JointPmf, p_second: &JointPmf, m1: &DeterministicMap) -> Result<JointPmf> {
    if p_first.arity() != 2 || p_second.arity() != 2 {
        return Err(Error::invalid("both source pmfs must be over a pair of variables"));
    }
    p_first.product(p_second)?.extend_map(&[A1, A2], m1)
}

fn report(joint: &JointPmf) -> Result<KaspiReport> {
    Ok(KaspiReport {
        first: conditional_mutual_information(joint, &[A2], &[B1], &[M1, M2, A1, B2])?,
        second: conditional_mutual_information(joint, &[B1], &[M1], &[A1, B2])?,
        third: conditional_mutual_information(joint, &[A2], &[M2], &[M1, A1, B2])?,
    })
}

/// Evaluate the lemma for `p_first` over `(A1, B1)`, `p_second` over
/// `(A2, B2)`, `m1` on `(A1, A2)` and `m2` on `(B1, B2, M1)`.
pub fn kaspi_lemma_check(
    p_first: &JointPmf,
    p_second: &JointPmf,
    m1: &DeterministicMap,
    m2: &DeterministicMap,
) -> Result<KaspiReport> {
    let joint = first_round(p_first, p_second, m1)?.extend_map(&[B1, B2, M1], m2)?;
    report(&joint)
}

/// Same quantities when the reply also sees `A2`, i.e. `m2` is a map on
/// `(B1, B2, M1, A2)`. The identities generally fail in this setting.
pub fn kaspi_leaky_reply_check(
    p_first: &JointPmf,
    p_second: &JointPmf,
    m1: &DeterministicMap,
    m2: &DeterministicMap,
) -> Result<KaspiReport> {
    let joint = first_round(p_first, p_second, m1)?.extend_map(&[B1, B2, M1, A2], m2)?;
    report(&joint)
}
