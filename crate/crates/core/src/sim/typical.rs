//! Robust joint typicality: every tuple's empirical frequency lies within
//! `epsilon * p` of its probability `p`. Tuples of probability zero must not
//! occur at all.

use crate::error::{Error, Result};
use crate::prob::pmf::strides;
use crate::prob::JointPmf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub n: usize,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, n: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if n == 0 {
            return Err(Error::invalid("blocklength must be positive"));
        }
        Ok(TypicalityParams { epsilon, n })
    }
}

/// Typicality test against a fixed joint distribution.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TypicalSet {
    pub fn new(pmf: &JointPmf, tp: TypicalityParams) -> Self {
        let sizes = pmf.sizes().to_vec();
        let strides = strides(&sizes);
        let n = tp.n as f64;
        // the 1e-9 guards against rounding exactly at a boundary
        let lo = pmf.probs().iter().map(|p| n * p * (1.0 - tp.epsilon) - 1e-9).collect();
        let hi = pmf.probs().iter().map(|p| n * p * (1.0 + tp.epsilon) + 1e-9).collect();
        TypicalSet {
            sizes,
            strides,
            lo,
            hi,
        }
    }

    /// `seqs[j]` is the sequence of variable `j`, in the pmf's order.
    pub fn contains(&self, seqs: &[&[u8]]) -> bool {
        debug_assert_eq!(seqs.len(), self.sizes.len());
        let n = seqs.first().map_or(0, |s| s.len());
        let mut counts = vec![0u32; self.lo.len()];
        for i in 0..n {
            let mut idx = 0;
            for (s, st) in seqs.iter().zip(&self.strides) {
                idx += s[i] as usize * st;
            }
            counts[idx] += 1;
        }
        counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&lo, &hi))| {
                let c = c as f64;
                c >= lo && c <= hi
            })
    }
}
