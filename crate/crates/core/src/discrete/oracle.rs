//! Exhaustive enumeration of quantized cascade auxiliaries.
//!
//! Every row of `p(u|x,y)` and `p(x1|x,y,u)` ranges over the simplex grid with
//! probabilities `i / (r - 1)`; resolution `r = 1` allows only the constant
//! point-mass channels. For each `p(u|x,y)` all maps `g2` are tried and the
//! one with least `E d2` is kept (it dominates the others, since `R2` does not
//! depend on `g2`). All points go through [`eval_cascade_point`].

use super::eval::eval_cascade_point;
use super::model::{AuxiliarySystem, RegionPoint, SourceSpec};
use crate::error::{Error, Result};
use crate::prob::{CondPmf, DeterministicMap};

pub const MAX_RESOLUTION: usize = 9;
pub const MAX_U: usize = 3;
pub const MAX_SOURCE_ALPHABET: usize = 2;
/// Cap on the number of evaluations.
pub const MAX_EVALUATIONS: u128 = 5_000_000;

/// Tolerance to allow when comparing a continuous search with the frontier
/// at resolution `r`: one grid step of a row moves a rate by at most a few
/// hundredths of a bit on the binary instances the oracle accepts.
pub fn lipschitz_slack(r: usize) -> f64 {
    if r <= 1 {
        0.02
    } else {
        0.02 / (r - 1) as f64
    }
}

/// Points of the `k`-simplex grid at resolution `r`.
fn simplex_grid(k: usize, r: usize) -> Vec<Vec<f64>> {
    if r <= 1 {
        return Vec::new();
    }
    let n = r - 1;
    let mut out = Vec::new();
    let mut parts = vec![0usize; k];
    fn rec(i: usize, left: usize, n: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        let k = parts.len();
        if i == k - 1 {
            parts[i] = left;
            out.push(parts.iter().map(|&c| c as f64 / n as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            parts[i] = c;
            rec(i + 1, left - c, n, parts, out);
        }
    }
    rec(0, n, n, &mut parts, &mut out);
    out
}

/// All channels with `rows` rows, each drawn from the grid. For `r = 1`
/// the constant point masses.
fn channels(rows: usize, k: usize, r: usize) -> Vec<Vec<f64>> {
    if r <= 1 {
        return (0..k)
            .map(|o| (0..rows * k).map(|i| if i % k == o { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    let grid = simplex_grid(k, r);
    let mut out = vec![Vec::new()];
    for _ in 0..rows {
        let mut next = Vec::with_capacity(out.len() * grid.len());
        for prefix in &out {
            for g in &grid {
                let mut c = prefix.clone();
                c.extend_from_slice(g);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

fn count_channels(rows: usize, k: usize, r: usize) -> u128 {
    if r <= 1 {
        return k as u128;
    }
    // compositions of r - 1 into k parts
    let n = (r - 1) as u128;
    let k = k as u128;
    let mut c: u128 = 1;
    for i in 0..(k - 1) {
        c = c * (n + k - 1 - i) / (i + 1);
    }
    c.saturating_pow(rows as u32)
}

fn all_maps(inputs: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..inputs {
        let mut next = Vec::with_capacity(out.len() * k);
        for p in &out {
            for o in 0..k {
                let mut c = p.clone();
                c.push(o);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// `a` is no worse than `b` in every coordinate.
fn dominates(a: &RegionPoint, b: &RegionPoint) -> bool {
    a.r1 <= b.r1 && a.r2 <= b.r2 && a.d1 <= b.d1 && a.d2 <= b.d2
}

fn pareto(mut pts: Vec<RegionPoint>) -> Vec<RegionPoint> {
    pts.sort_by(|a, b| {
        (a.r1, a.r2, a.d1, a.d2)
            .partial_cmp(&(b.r1, b.r2, b.d1, b.d2))
            .unwrap()
    });
    let mut keep: Vec<RegionPoint> = Vec::new();
    for p in pts {
        if !keep.iter().any(|k| dominates(k, &p)) {
            keep.push(p);
        }
    }
    keep
}

/// Pareto frontier (all four coordinates minimized) of the quantized
/// cascade region with `|U| = u_size` and resolution `r`.
pub fn brute_force_region_oracle(src: &SourceSpec, u_size: usize, r: usize) -> Result<Vec<RegionPoint>> {
    let (nx, ny, nz) = (src.x_size(), src.y_size(), src.z_size());
    if nx.max(ny).max(nz) > MAX_SOURCE_ALPHABET || u_size > MAX_U || r > MAX_RESOLUTION {
        return Err(Error::Resource(format!(
            "oracle accepts |X|,|Y|,|Z| <= {MAX_SOURCE_ALPHABET}, |U| <= {MAX_U}, resolution <= {MAX_RESOLUTION}"
        )));
    }
    if u_size == 0 || r == 0 {
        return Err(Error::invalid("|U| and the resolution must be positive"));
    }
    let nk = src.d1().cols();
    let nk2 = src.d2().cols();
    let nxy = nx * ny;
    let n_u = count_channels(nxy, u_size, r);
    let n_x1 = count_channels(nxy * u_size, nk, r);
    let n_g2 = (nk2 as u128).saturating_pow((u_size * nz) as u32);
    let total = n_u.saturating_mul(n_x1.saturating_add(n_g2));
    if total > MAX_EVALUATIONS {
        return Err(Error::Resource(format!(
            "oracle would need {total} evaluations, the cap is {MAX_EVALUATIONS}"
        )));
    }

    let maps = all_maps(u_size * nz, nk2);
    let x1_channels = channels(nxy * u_size, nk, r);
    let probe_x1 = CondPmf::constant(vec![nx, ny, u_size], &unit(nk))?;
    let mut all = Vec::new();
    for pu in channels(nxy, u_size, r) {
        let p_u = CondPmf::new(vec![nx, ny], u_size, pu)?;
        let mut best: Option<(f64, DeterministicMap)> = None;
        for m in &maps {
            let g2 = DeterministicMap::new(vec![u_size, nz], nk2, m.clone())?;
            let aux = AuxiliarySystem {
                p_u: Some(p_u.clone()),
                p_xhat1: Some(probe_x1.clone()),
                g2: Some(g2.clone()),
                ..Default::default()
            };
            let d2 = eval_cascade_point(src, &aux)?.d2;
            if best.as_ref().map_or(true, |b| d2 < b.0) {
                best = Some((d2, g2));
            }
        }
        let g2 = best.map(|b| b.1);
        let mut local = Vec::with_capacity(x1_channels.len());
        for w in &x1_channels {
            let aux = AuxiliarySystem {
                p_u: Some(p_u.clone()),
                p_xhat1: Some(CondPmf::new(vec![nx, ny, u_size], nk, w.clone())?),
                g2: g2.clone(),
                ..Default::default()
            };
            local.push(eval_cascade_point(src, &aux)?);
        }
        all.extend(pareto(local));
    }
    Ok(pareto(all))
}

fn unit(k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[0] = 1.0;
    v
}

/// Least `R1` among frontier points meeting the targets.
pub fn frontier_min_r1(frontier: &[RegionPoint], d1: f64, d2: f64, r2: f64) -> Option<f64> {
    frontier
        .iter()
        .filter(|p| p.r2 <= r2 && p.d1 <= d1 && p.d2 <= d2)
        .map(|p| p.r1)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
}
