//! Random codebook with double binning for the cascade scheme.
//!
//! Codeword `l` is drawn i.i.d. from `p(u)`. Each codeword gets a bin in
//! `B1` and, independently, a bin in `B2`. When a bin count reaches the
//! codebook size the partition is the identity, i.e. the index is sent
//! as is. `X1` codebooks are generated on demand for each `(l, y^n)` from a
//! seed derived from both, which is distributionally the same as fixing
//! them all up front.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::typical::{TypicalSet, TypicalityParams};
use crate::discrete::{AuxiliarySystem, SourceSpec};
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, mutual_information, CondPmf, DeterministicMap, JointPmf};

/// Largest number of codewords in any one codebook.
pub const MAX_CODEWORDS: u64 = 1 << 20;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed derivation: SplitMix64 of `a` combined with the scrambled `b`.
pub(crate) fn mix(a: u64, b: u64) -> u64 {
    splitmix(a ^ splitmix(b))
}

pub(crate) fn mix_all(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(seed, 0x5EED), |acc, &p| mix(acc, p))
}

/// Scheme rates in bits per symbol, before rounding to whole-bit codebooks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeRates {
    pub r_l: f64,
    pub r_10: f64,
    pub r_11: f64,
    pub r_2: f64,
}

/// Base-2 logarithms of the codebook and bin counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSizes {
    pub l: u32,
    pub b10: u32,
    pub m11: u32,
    pub b2: u32,
}

/// Variable order of the scheme's joint: `X Y Z U X1`.
pub(crate) const VX: usize = 0;
pub(crate) const VY: usize = 1;
pub(crate) const VZ: usize = 2;
pub(crate) const VU: usize = 3;
pub(crate) const VX1: usize = 4;

#[derive(Debug, Clone)]
pub struct CascadeCode {
    pub(crate) tp: TypicalityParams,
    pub(crate) seed: u64,
    pub(crate) rates: SchemeRates,
    pub(crate) sizes: CodeSizes,
    /// Codeword `l` occupies `codewords[l * n..(l + 1) * n]`.
    pub(crate) codewords: Vec<u8>,
    pub(crate) bin1: Vec<u32>,
    pub(crate) bin2: Vec<u32>,
    pub(crate) members1: Vec<Vec<u32>>,
    pub(crate) members2: Vec<Vec<u32>>,
    pub(crate) joint: JointPmf,
    pub(crate) px1_given_uy: CondPmf,
    pub(crate) g2: DeterministicMap,
    pub(crate) typ_xy: TypicalSet,
    pub(crate) typ_uxy: TypicalSet,
    pub(crate) typ_uxyz: TypicalSet,
    pub(crate) typ_ux1xy: TypicalSet,
    pub(crate) typ_uy: TypicalSet,
    pub(crate) typ_uz: TypicalSet,
}

fn exponent(n: usize, rate: f64) -> u32 {
    // tolerate rounding just above an integer
    (n as f64 * rate - 1e-9).ceil().max(0.0) as u32
}

fn partition<R: Rng>(rng: &mut R, n_words: usize, bits: u32, full: bool) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n_bins = 1usize << bits;
    let bins: Vec<u32> = if full {
        (0..n_words as u32).collect()
    } else {
        (0..n_words).map(|_| rng.gen_range(0..n_bins as u32)).collect()
    };
    let mut members = vec![Vec::new(); n_bins];
    for (l, &b) in bins.iter().enumerate() {
        members[b as usize].push(l as u32);
    }
    (bins, members)
}

/// Scheme rates of a cascade auxiliary system at slack `delta`.
pub fn scheme_rates(src: &SourceSpec, aux: &AuxiliarySystem, delta: f64) -> Result<SchemeRates> {
    let joint = scheme_joint(src, aux)?;
    rates_from_joint(&joint, delta)
}

fn scheme_joint(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<JointPmf> {
    let need = |ok: bool, name: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAuxiliary(format!("the cascade scheme needs {name}")))
        }
    };
    need(aux.p_u.is_some(), "p_u")?;
    need(aux.p_xhat1.is_some(), "p_xhat1")?;
    need(aux.g2.is_some(), "g2")?;
    let too_big = [src.x_size(), src.y_size(), src.z_size(), src.d1().cols(), src.d2().cols()]
        .iter()
        .chain([aux.p_u.as_ref().unwrap().output_size()].iter())
        .any(|&k| k > 256);
    if too_big {
        return Err(Error::invalid("the simulator stores symbols as bytes; alphabets must have at most 256 letters"));
    }
    src.pmf()
        .extend(&[VX, VY], aux.p_u.as_ref().unwrap())
        .and_then(|j| j.extend(&[VX, VY, VU], aux.p_xhat1.as_ref().unwrap()))
        .map_err(|e| Error::InvalidAuxiliary(e.to_string()))
}

fn rates_from_joint(joint: &JointPmf, delta: f64) -> Result<SchemeRates> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid("delta must be finite and nonnegative"));
    }
    Ok(SchemeRates {
        r_l: mutual_information(joint, &[VU], &[VX, VY])? + delta,
        r_10: cmi(joint, &[VU], &[VX], &[VY])? + 2.0 * delta,
        r_11: cmi(joint, &[VX1], &[VX], &[VU, VY])? + delta,
        r_2: cmi(joint, &[VU], &[VX, VY], &[VZ])? + 2.0 * delta,
    })
}

/// Build the random code for a cascade auxiliary system. The rates are the
/// system's bounds plus `delta` (`2 delta` for the binned ones).
pub fn build_cascade_code(
    src: &SourceSpec,
    aux: &AuxiliarySystem,
    tp: TypicalityParams,
    delta: f64,
    seed: u64,
) -> Result<CascadeCode> {
    let joint = scheme_joint(src, aux)?;
    let rates = rates_from_joint(&joint, delta)?;
    let n = tp.n;
    let l = exponent(n, rates.r_l);
    let sizes = CodeSizes {
        l,
        b10: exponent(n, rates.r_10).min(l),
        m11: exponent(n, rates.r_11),
        b2: exponent(n, rates.r_2).min(l),
    };
    for (bits, name) in [(sizes.l, "U codebook"), (sizes.m11, "X1 codebook")] {
        if bits >= 64 || (1u64 << bits) > MAX_CODEWORDS {
            return Err(Error::Resource(format!(
                "{name} would hold 2^{bits} codewords, the cap is 2^20"
            )));
        }
    }
    let n_words = 1usize << sizes.l;

    let pu = joint.marginal(&[VU])?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_all(seed, &[1]));
    let dist = WeightedIndex::new(pu.probs()).map_err(|e| Error::NumericDomain(e.to_string()))?;
    let codewords: Vec<u8> = (0..n_words * n).map(|_| dist.sample(&mut rng) as u8).collect();
    let (bin1, members1) = partition(&mut rng, n_words, sizes.b10, sizes.b10 == sizes.l);
    let (bin2, members2) = partition(&mut rng, n_words, sizes.b2, sizes.b2 == sizes.l);

    // p(x1 | u, y)
    let uyx1 = joint.marginal(&[VU, VY, VX1])?;
    let (nu, ny, nk) = (uyx1.sizes()[0], uyx1.sizes()[1], uyx1.sizes()[2]);
    let px1_given_uy = CondPmf::from_fn(vec![nu, ny], nk, |i, k| {
        let row: f64 = (0..nk).map(|j| uyx1.prob(&[i[0], i[1], j])).sum();
        if row > 0.0 {
            uyx1.prob(&[i[0], i[1], k]) / row
        } else {
            1.0 / nk as f64
        }
    })?;

    let typ = |vars: &[usize]| -> Result<TypicalSet> { Ok(TypicalSet::new(&joint.marginal(vars)?, tp)) };
    Ok(CascadeCode {
        tp,
        seed,
        rates,
        sizes,
        codewords,
        bin1,
        bin2,
        members1,
        members2,
        typ_xy: typ(&[VX, VY])?,
        typ_uxy: typ(&[VU, VX, VY])?,
        typ_uxyz: typ(&[VU, VX, VY, VZ])?,
        typ_ux1xy: typ(&[VU, VX1, VX, VY])?,
        typ_uy: typ(&[VU, VY])?,
        typ_uz: typ(&[VU, VZ])?,
        px1_given_uy,
        g2: aux.g2.clone().unwrap(),
        joint,
    })
}

impl CascadeCode {
    pub fn n(&self) -> usize {
        self.tp.n
    }

    pub fn rates(&self) -> SchemeRates {
        self.rates
    }

    pub fn sizes(&self) -> CodeSizes {
        self.sizes
    }

    pub fn num_codewords(&self) -> usize {
        1 << self.sizes.l
    }

    pub fn codeword(&self, l: usize) -> &[u8] {
        let n = self.tp.n;
        &self.codewords[l * n..(l + 1) * n]
    }

    pub fn bin1(&self, l: usize) -> u32 {
        self.bin1[l]
    }

    pub fn bin2(&self, l: usize) -> u32 {
        self.bin2[l]
    }

    /// Joint of `(X, Y, Z, U, X1)` the code was built for.
    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// The `X1` codebook attached to codeword `l` and side information `y`,
    /// flattened as `2^m11` rows of length `n`.
    pub fn x1_codebook(&self, l: usize, y: &[u8]) -> Vec<u8> {
        let n = self.tp.n;
        let mut h = mix_all(self.seed, &[2, l as u64]);
        for &s in y {
            h = mix(h, s as u64);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let u = self.codeword(l);
        let rows = 1usize << self.sizes.m11;
        let mut out = Vec::with_capacity(rows * n);
        for _ in 0..rows {
            for i in 0..n {
                let p = self.px1_given_uy.row(&[u[i] as usize, y[i] as usize]);
                let mut r: f64 = rng.gen();
                let mut k = 0;
                while k + 1 < p.len() && r >= p[k] {
                    r -= p[k];
                    k += 1;
                }
                out.push(k as u8);
            }
        }
        out
    }
}
