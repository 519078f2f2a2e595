//! Entropy, mutual information and Markov-chain checks in bits.

use super::pmf::{next_tuple, strides, JointPmf};
use crate::error::{Error, Result};

/// Entropy `H(X_S)` of the variables in `subset`, in bits.
pub fn entropy(pmf: &JointPmf, subset: &[usize]) -> Result<f64> {
    let m = pmf.marginal(subset)?;
    Ok(m.probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}

/// Conditional mutual information `I(A;B|C)` in bits.
///
/// `a` and `b` must be nonempty, and the three sets pairwise disjoint. The
/// value is computed directly from the marginal on `A ∪ B ∪ C`, so swapping
/// `a` and `b` returns the identical number. Round-off below zero is clamped.
pub fn conditional_mutual_information(
    pmf: &JointPmf,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("mutual information needs two nonempty sets"));
    }
    let mut union: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    pmf.check_vars(&union)?;
    union.sort_unstable();

    let m = pmf.marginal(&union)?;
    let pos = |v: usize| union.iter().position(|&u| u == v).unwrap();
    let local = |set: &[usize]| {
        let mut out: Vec<usize> = set.iter().map(|&v| pos(v)).collect();
        out.sort_unstable();
        out
    };
    let la = local(a);
    let lb = local(b);
    let lc = local(c);
    let mut lac: Vec<usize> = la.iter().chain(&lc).copied().collect();
    lac.sort_unstable();
    let mut lbc: Vec<usize> = lb.iter().chain(&lc).copied().collect();
    lbc.sort_unstable();

    let pac = m.marginal(&lac)?;
    let pbc = m.marginal(&lbc)?;
    let pc = if lc.is_empty() { None } else { Some(m.marginal(&lc)?) };

    let ac_st = strides(pac.sizes());
    let bc_st = strides(pbc.sizes());
    let c_st = pc.as_ref().map(|p| strides(p.sizes()));

    let mut total = 0.0;
    let mut idx = vec![0; m.arity()];
    for &p in m.probs() {
        if p > 0.0 {
            let iac: usize = lac.iter().zip(&ac_st).map(|(&v, &s)| idx[v] * s).sum();
            let ibc: usize = lbc.iter().zip(&bc_st).map(|(&v, &s)| idx[v] * s).sum();
            let p_c = match (&pc, &c_st) {
                (Some(t), Some(st)) => {
                    let ic: usize = lc.iter().zip(st).map(|(&v, &s)| idx[v] * s).sum();
                    t.probs()[ic]
                }
                _ => 1.0,
            };
            let p_ac = pac.probs()[iac];
            let p_bc = pbc.probs()[ibc];
            total += p * ((p * p_c) / (p_ac * p_bc)).log2();
        }
        next_tuple(&mut idx, m.sizes());
    }
    Ok(total.max(0.0))
}

/// Mutual information `I(A;B)` in bits.
pub fn mutual_information(pmf: &JointPmf, a: &[usize], b: &[usize]) -> Result<f64> {
    conditional_mutual_information(pmf, a, b, &[])
}

/// Deviation from the Markov chain `A - B - C`, measured as `I(A;C|B)`.
/// Zero exactly when the chain holds.
pub fn check_markov_chain(pmf: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    conditional_mutual_information(pmf, a, c, b)
}
