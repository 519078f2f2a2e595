//! The three nodes of the cascade scheme. Indices are zero-based, so the
//! decoders' fallback index is 0.

use rand::Rng;

use super::code::CascadeCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node0Output {
    /// Chosen codeword.
    pub l: usize,
    pub m10: u32,
    pub m11: usize,
    /// No codeword was typical with `(x, y)`; `l` is uniform.
    pub e1: bool,
    /// No `X1` codeword was typical; `m11` is uniform.
    pub e3: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node1Output {
    pub l_hat: usize,
    pub m2: u32,
    pub xhat1: Vec<u8>,
    /// Exactly one codeword of the bin was typical with `y`.
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node2Output {
    pub l_tilde: usize,
    pub xhat2: Vec<u8>,
    pub unique: bool,
}

fn pick<R: Rng>(rng: &mut R, found: &[usize], range: usize) -> (usize, bool) {
    if found.is_empty() {
        (rng.gen_range(0..range), true)
    } else {
        (found[rng.gen_range(0..found.len())], false)
    }
}

/// Covering step: a uniformly chosen typical codeword, then a uniformly
/// chosen typical `X1` codeword from that codeword's codebook.
pub fn encode_node0<R: Rng>(code: &CascadeCode, x: &[u8], y: &[u8], rng: &mut R) -> Node0Output {
    let found: Vec<usize> = (0..code.num_codewords())
        .filter(|&l| code.typ_uxy.contains(&[code.codeword(l), x, y]))
        .collect();
    let (l, e1) = pick(rng, &found, code.num_codewords());
    let n = code.n();
    let book = code.x1_codebook(l, y);
    let u = code.codeword(l);
    let rows = book.len() / n;
    let found: Vec<usize> = (0..rows)
        .filter(|&m| code.typ_ux1xy.contains(&[u, &book[m * n..(m + 1) * n], x, y]))
        .collect();
    let (m11, e3) = pick(rng, &found, rows);
    Node0Output {
        l,
        m10: code.bin1[l],
        m11,
        e1,
        e3,
    }
}

/// Index of the unique typical member, or `None`.
fn unique_typical(members: &[u32], mut typical: impl FnMut(usize) -> bool) -> Option<usize> {
    let mut hit = None;
    for &l in members {
        if typical(l as usize) {
            if hit.is_some() {
                return None;
            }
            hit = Some(l as usize);
        }
    }
    hit
}

/// Decode within bin `m10` against `y`, reconstruct, and rebin for node 2.
pub fn relay_node1(code: &CascadeCode, m10: u32, m11: usize, y: &[u8]) -> Node1Output {
    let members = &code.members1[m10 as usize];
    let hit = unique_typical(members, |l| code.typ_uy.contains(&[code.codeword(l), y]));
    let l_hat = hit.unwrap_or(0);
    let n = code.n();
    let book = code.x1_codebook(l_hat, y);
    Node1Output {
        l_hat,
        m2: code.bin2[l_hat],
        xhat1: book[m11 * n..(m11 + 1) * n].to_vec(),
        unique: hit.is_some(),
    }
}

/// Decode within bin `m2` against `z` and reconstruct symbolwise with `g2`.
pub fn decode_node2(code: &CascadeCode, m2: u32, z: &[u8]) -> Node2Output {
    let members = &code.members2[m2 as usize];
    let hit = unique_typical(members, |l| code.typ_uz.contains(&[code.codeword(l), z]));
    let l_tilde = hit.unwrap_or(0);
    let u = code.codeword(l_tilde);
    let xhat2 = u
        .iter()
        .zip(z)
        .map(|(&a, &b)| code.g2.apply(&[a as usize, b as usize]) as u8)
        .collect();
    Node2Output {
        l_tilde,
        xhat2,
        unique: hit.is_some(),
    }
}
