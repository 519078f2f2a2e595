//! Shannon identities every joint distribution must satisfy. Each function
//! returns the largest violation it saw, so zero means every check held.

use cascade_core::prob::{check_markov_chain, conditional_mutual_information as cmi, entropy, mutual_information, CondPmf, JointPmf};
use rand::Rng;

/// Random pmf on `sizes`; about a quarter of the cells are zero.
pub fn random_pmf<R: Rng>(rng: &mut R, sizes: Vec<usize>) -> JointPmf {
    let len: usize = sizes.iter().product();
    let mut w: Vec<f64> = (0..len)
        .map(|_| if rng.gen_bool(0.25) { 0.0 } else { -rng.gen_range(1e-12f64..1.0).ln() })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    JointPmf::from_weights(sizes, w).unwrap()
}

pub fn random_channel<R: Rng>(rng: &mut R, inputs: Vec<usize>, out: usize) -> CondPmf {
    let rows: usize = inputs.iter().product();
    let mut t = Vec::with_capacity(rows * out);
    for _ in 0..rows {
        let w: Vec<f64> = (0..out).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            t.extend(w.iter().map(|v| v / s));
        } else {
            t.extend((0..out).map(|k| (k == 0) as u8 as f64));
        }
    }
    CondPmf::new(inputs, out, t).unwrap()
}

/// Nonnegativity and chain rules on a three-variable pmf.
pub fn chain_rule_violation(p: &JointPmf) -> f64 {
    let h = |s: &[usize]| entropy(p, s).unwrap();
    let i = |a: &[usize], b: &[usize]| mutual_information(p, a, b).unwrap();
    let ci = |a: &[usize], b: &[usize], c: &[usize]| cmi(p, a, b, c).unwrap();
    let mut worst: f64 = 0.0;
    let mut see = |v: f64| worst = worst.max(v);

    for s in [&[0][..], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]] {
        see(-h(s));
    }
    for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        see(-i(&[a], &[b]));
        see(-ci(&[a], &[b], &[c]));
        // symmetry
        see((i(&[a], &[b]) - i(&[b], &[a])).abs());
        see((ci(&[a], &[b], &[c]) - ci(&[b], &[a], &[c])).abs());
        // I(A;B) = H(A) + H(B) - H(AB)
        let mut ab = vec![a, b];
        ab.sort_unstable();
        see((i(&[a], &[b]) - (h(&[a]) + h(&[b]) - h(&ab))).abs());
        // I(A;BC) = I(A;B) + I(A;C|B)
        see((i(&[a], &[b, c]) - i(&[a], &[b]) - ci(&[a], &[c], &[b])).abs());
        // monotonicity of entropy
        see(h(&[a]) - h(&ab));
    }
    // H(XYZ) = H(X) + H(Y|X) + H(Z|XY)
    let chain = h(&[0]) + (h(&[0, 1]) - h(&[0])) + (h(&[0, 1, 2]) - h(&[0, 1]));
    see((h(&[0, 1, 2]) - chain).abs());
    // H(X) <= log |X|
    see(h(&[0]) - (p.sizes()[0] as f64).log2());
    worst
}

/// Identities of a chain `A - B - C` built as `p(a) p(b|a) p(c|b)`.
pub fn markov_violation(p: &JointPmf) -> f64 {
    let i = |a: &[usize], b: &[usize]| mutual_information(p, a, b).unwrap();
    let mut worst: f64 = 0.0;
    worst = worst.max(check_markov_chain(p, &[0], &[1], &[2]).unwrap());
    worst = worst.max(check_markov_chain(p, &[2], &[1], &[0]).unwrap());
    // I(A;BC) = I(A;B) under the chain
    worst = worst.max((i(&[0], &[1, 2]) - i(&[0], &[1])).abs());
    // data processing
    worst = worst.max(i(&[0], &[2]) - i(&[0], &[1]));
    worst = worst.max(i(&[0], &[2]) - i(&[1], &[2]));
    worst
}

/// Product distributions carry no information between the factors.
pub fn independence_violation(a: &JointPmf, b: &JointPmf) -> f64 {
    let p = a.product(b).unwrap();
    let na = a.arity();
    let left: Vec<usize> = (0..na).collect();
    let right: Vec<usize> = (na..p.arity()).collect();
    let i = mutual_information(&p, &left, &right).unwrap();
    let split = entropy(&p, &left).unwrap() + entropy(&p, &right).unwrap() - entropy(&p, &(0..p.arity()).collect::<Vec<_>>()).unwrap();
    i.max(split.abs())
}

/// All of the above on one random draw.
pub fn random_case_violation<R: Rng>(rng: &mut R) -> f64 {
    let mut sz = || rng.gen_range(1..=4usize);
    let sizes = vec![sz(), sz(), sz()];
    let p = random_pmf(rng, sizes.clone());
    let pa = random_pmf(rng, vec![sizes[0]]);
    let chain = pa
        .extend(&[0], &random_channel(rng, vec![sizes[0]], sizes[1]))
        .unwrap()
        .extend(&[1], &random_channel(rng, vec![sizes[1]], sizes[2]))
        .unwrap();
    let q = random_pmf(rng, vec![sizes[2], 2]);
    chain_rule_violation(&p)
        .max(markov_violation(&chain))
        .max(independence_violation(&p, &q))
}
