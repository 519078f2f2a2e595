//! Numerical minimization of `R1` over the cascade region.
//!
//! For a fixed channel `p(u|x,y)` the best `g2` is a per-`(u, z)` argmin and
//! the best `p(x1|x,y,u)` is a conditional rate-distortion problem solved by
//! Blahut-Arimoto with one slope shared across the `(y, u)` groups. What is
//! left is a nonconvex problem in `p(u|x,y)`, handled by gradient descent on
//! softmax logits with a penalty for the `R2` and `D2` constraints. The
//! penalty weight grows tenfold per round over five rounds. Each start ends
//! with a repair step that mixes the channel toward a known feasible one, so
//! every returned system meets the constraints. Deterministic channels are
//! evaluated directly as extra candidates, since descent on logits only
//! creeps toward them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::eval::eval_cascade_point;
use super::model::{cardinality_budget, AuxiliarySystem, Network, RegionPoint, SourceSpec};
use crate::error::{Error, Result};
use crate::prob::{CondPmf, DeterministicMap};

/// Slack allowed when the final evaluation is compared with the targets.
pub const FEAS_TOL: f64 = 1e-9;

const PENALTY_ROUNDS: i32 = 5;
const BA_EVERY: usize = 10;
const FD_STEP: f64 = 1e-6;
/// Every deterministic `U = f(x, y)` is tried when there are at most this many.
const MAX_DETERMINISTIC: u128 = 1024;

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Alphabet size of `U`.
    pub u_size: usize,
    /// Number of random starts in addition to the deterministic ones.
    pub restarts: usize,
    pub seed: u64,
    /// Gradient steps per penalty round.
    pub max_iters: usize,
    /// A round ends once a block of steps improves the objective by less
    /// than this.
    pub tol: f64,
    /// Candidate carried over from a neighbouring query, for example the
    /// previous point of a sweep. Used only if it is feasible here.
    pub warm_start: Option<AuxiliarySystem>,
}

impl SearchOptions {
    pub fn new(u_size: usize) -> Self {
        SearchOptions {
            u_size,
            restarts: 16,
            seed: 0,
            max_iters: 400,
            tol: 1e-6,
            warm_start: None,
        }
    }
}

/// Which start produced the returned system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    Warm,
    ConstantU,
    IdentityU,
    /// Another deterministic `U = f(x, y)`; the payload lists `f` in base `|U|`
    /// with `(x, y) = (0, 0)` as the least significant digit.
    Deterministic(usize),
    /// Optimized start; 0 is the near-identity start, the rest are random.
    Optimized(usize),
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub r1: f64,
    pub point: RegionPoint,
    pub aux: AuxiliarySystem,
    pub start: StartKind,
}

/// Flattened cascade instance with a fast evaluator.
struct Inst {
    nx: usize,
    ny: usize,
    nz: usize,
    nu: usize,
    nk: usize,
    nk2: usize,
    pxyz: Vec<f64>,
    pxy: Vec<f64>,
    py: Vec<f64>,
    pz: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    r1: f64,
    r2: f64,
    d1: f64,
    d2: f64,
}

fn xlog(p: f64, ratio: f64) -> f64 {
    if p > 0.0 && ratio > 0.0 {
        p * ratio.log2()
    } else {
        0.0
    }
}

impl Inst {
    fn new(src: &SourceSpec, nu: usize) -> Self {
        let s = src.pmf().sizes();
        let (nx, ny, nz) = (s[0], s[1], s[2]);
        let pxyz = src.pmf().probs().to_vec();
        let mut pxy = vec![0.0; nx * ny];
        let mut py = vec![0.0; ny];
        let mut pz = vec![0.0; nz];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let p = pxyz[(x * ny + y) * nz + z];
                    pxy[x * ny + y] += p;
                    py[y] += p;
                    pz[z] += p;
                }
            }
        }
        Inst {
            nx,
            ny,
            nz,
            nu,
            nk: src.d1().cols(),
            nk2: src.d2().cols(),
            pxyz,
            pxy,
            py,
            pz,
            d1: src.d1().values().to_vec(),
            d2: src.d2().values().to_vec(),
        }
    }

    fn nxy(&self) -> usize {
        self.nx * self.ny
    }

    /// `a[u][z][k] = sum_{x,y} p(x,y,z) p(u|x,y) d2(x,k)`.
    fn d2_table(&self, pu: &[f64]) -> Vec<f64> {
        let (ny, nz, nu, nk) = (self.ny, self.nz, self.nu, self.nk2);
        let mut a = vec![0.0; nu * nz * nk];
        for x in 0..self.nx {
            for y in 0..ny {
                for z in 0..nz {
                    let p = self.pxyz[(x * ny + y) * nz + z];
                    if p == 0.0 {
                        continue;
                    }
                    for u in 0..nu {
                        let pu_ = p * pu[(x * ny + y) * nu + u];
                        for k in 0..nk {
                            a[(u * nz + z) * nk + k] += pu_ * self.d2[x * nk + k];
                        }
                    }
                }
            }
        }
        a
    }

    /// Expected `d2` under the best `g2`, and that `g2` (lowest index on ties).
    fn best_g2(&self, pu: &[f64]) -> (f64, Vec<usize>) {
        let a = self.d2_table(pu);
        let nk = self.nk2;
        let mut total = 0.0;
        let mut g = Vec::with_capacity(self.nu * self.nz);
        for cell in a.chunks(nk) {
            let (mut best, mut arg) = (cell[0], 0);
            for (k, &v) in cell.iter().enumerate().skip(1) {
                if v < best {
                    best = v;
                    arg = k;
                }
            }
            total += best;
            g.push(arg);
        }
        (total, g)
    }

    fn r2(&self, pu: &[f64]) -> f64 {
        let (ny, nz, nu) = (self.ny, self.nz, self.nu);
        let mut r = vec![0.0; nz * nu];
        for xy in 0..self.nxy() {
            for z in 0..nz {
                let p = self.pxyz[xy * nz + z];
                for u in 0..nu {
                    r[z * nu + u] += p * pu[xy * nu + u];
                }
            }
        }
        let mut total = 0.0;
        for x in 0..self.nx {
            for y in 0..ny {
                let xy = x * ny + y;
                for z in 0..nz {
                    let p = self.pxyz[xy * nz + z];
                    for u in 0..nu {
                        let c = pu[xy * nu + u];
                        let rz = r[z * nu + u];
                        if rz > 0.0 {
                            total += xlog(p * c, c * self.pz[z] / rz);
                        }
                    }
                }
            }
        }
        total.max(0.0)
    }

    /// `q(x,y,u)` and `q(y,u)`.
    fn joint_u(&self, pu: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (ny, nu) = (self.ny, self.nu);
        let mut q = vec![0.0; self.nxy() * nu];
        let mut qyu = vec![0.0; ny * nu];
        for x in 0..self.nx {
            for y in 0..ny {
                for u in 0..nu {
                    let v = self.pxy[x * ny + y] * pu[(x * ny + y) * nu + u];
                    q[(x * ny + y) * nu + u] = v;
                    qyu[y * nu + u] += v;
                }
            }
        }
        (q, qyu)
    }

    /// `I(X; X1, U | Y)` and `E d1`.
    fn r1_d1(&self, pu: &[f64], w: &[f64]) -> (f64, f64) {
        let (ny, nu, nk) = (self.ny, self.nu, self.nk);
        let (q, qyu) = self.joint_u(pu);
        let mut m = vec![0.0; ny * nu * nk];
        for x in 0..self.nx {
            for y in 0..ny {
                for u in 0..nu {
                    let qq = q[(x * ny + y) * nu + u];
                    for k in 0..nk {
                        m[(y * nu + u) * nk + k] += qq * w[((x * ny + y) * nu + u) * nk + k];
                    }
                }
            }
        }
        let (mut i_u, mut i_k, mut d1) = (0.0, 0.0, 0.0);
        for x in 0..self.nx {
            for y in 0..ny {
                for u in 0..nu {
                    let qq = q[(x * ny + y) * nu + u];
                    if qq == 0.0 {
                        continue;
                    }
                    let g = y * nu + u;
                    i_u += xlog(qq, pu[(x * ny + y) * nu + u] * self.py[y] / qyu[g]);
                    for k in 0..nk {
                        let wk = w[((x * ny + y) * nu + u) * nk + k];
                        let mk = m[g * nk + k];
                        if mk > 0.0 {
                            i_k += xlog(qq * wk, wk * qyu[g] / mk);
                        }
                        d1 += qq * wk * self.d1[x * nk + k];
                    }
                }
            }
        }
        (i_u.max(0.0) + i_k.max(0.0), d1)
    }

    fn eval(&self, pu: &[f64], w: &[f64]) -> Eval {
        let (r1, d1) = self.r1_d1(pu, w);
        Eval {
            r1,
            r2: self.r2(pu),
            d1,
            d2: self.best_g2(pu).0,
        }
    }

    fn one_hot(&self, f: impl Fn(usize) -> usize) -> Vec<f64> {
        let mut pu = vec![0.0; self.nxy() * self.nu];
        for xy in 0..self.nxy() {
            pu[xy * self.nu + f(xy)] = 1.0;
        }
        pu
    }

    fn h_xy_given_z(&self) -> f64 {
        let mut h = 0.0;
        for xy in 0..self.nxy() {
            for z in 0..self.nz {
                let p = self.pxyz[xy * self.nz + z];
                h -= xlog(p, p / self.pz[z]);
            }
        }
        h
    }

    /// Best expected distortion of a fixed reconstruction.
    fn const_d2(&self) -> f64 {
        self.best_g2(&self.one_hot(|_| 0)).0
    }
}

/// Conditional rate-distortion for `X1` given the groups `(y, u)`.
struct Ba<'a> {
    inst: &'a Inst,
    q: Vec<f64>,
    qyu: Vec<f64>,
}

impl<'a> Ba<'a> {
    fn new(inst: &'a Inst, pu: &[f64]) -> Self {
        let (q, qyu) = inst.joint_u(pu);
        Ba { inst, q, qyu }
    }

    fn idx(&self, x: usize, g: usize) -> usize {
        let (ny, nu) = (self.inst.ny, self.inst.nu);
        let (y, u) = (g / nu, g % nu);
        (x * ny + y) * nu + u
    }

    fn groups(&self) -> usize {
        self.inst.ny * self.inst.nu
    }

    fn distortion(&self, w: &[f64]) -> f64 {
        let nk = self.inst.nk;
        let mut d = 0.0;
        for g in 0..self.groups() {
            for x in 0..self.inst.nx {
                let i = self.idx(x, g);
                for k in 0..nk {
                    d += self.q[i] * w[i * nk + k] * self.inst.d1[x * nk + k];
                }
            }
        }
        d
    }

    /// Reconstruction chosen per group, a zero-rate channel.
    fn per_group(&self) -> (f64, Vec<f64>) {
        let nk = self.inst.nk;
        let mut w = vec![0.0; self.q.len() * nk];
        let mut total = 0.0;
        for g in 0..self.groups() {
            let cost = |k: usize| -> f64 {
                (0..self.inst.nx)
                    .map(|x| self.q[self.idx(x, g)] * self.inst.d1[x * nk + k])
                    .sum()
            };
            let (mut best, mut arg) = (cost(0), 0);
            for k in 1..nk {
                let c = cost(k);
                if c < best {
                    best = c;
                    arg = k;
                }
            }
            total += best;
            for x in 0..self.inst.nx {
                w[self.idx(x, g) * nk + arg] = 1.0;
            }
        }
        (total, w)
    }

    /// Letter-wise best reconstruction, the least distortion possible.
    fn per_letter(&self) -> (f64, Vec<f64>) {
        let nk = self.inst.nk;
        let mut w = vec![0.0; self.q.len() * nk];
        for x in 0..self.inst.nx {
            let row = &self.inst.d1[x * nk..(x + 1) * nk];
            let mut arg = 0;
            for k in 1..nk {
                if row[k] < row[arg] {
                    arg = k;
                }
            }
            for g in 0..self.groups() {
                w[self.idx(x, g) * nk + arg] = 1.0;
            }
        }
        (self.distortion(&w), w)
    }

    /// Blahut-Arimoto at slope `s` (nats per unit distortion), warm-started
    /// from the output marginals `m`.
    fn at_slope(&self, s: f64, m: &mut [f64]) -> Vec<f64> {
        let (nx, nk) = (self.inst.nx, self.inst.nk);
        let mut w = vec![0.0; self.q.len() * nk];
        for g in 0..self.groups() {
            let mg = &mut m[g * nk..(g + 1) * nk];
            let qg = self.qyu[g];
            for _ in 0..2000 {
                let mut next = vec![0.0; nk];
                for x in 0..nx {
                    let i = self.idx(x, g);
                    let row = &mut w[i * nk..(i + 1) * nk];
                    let dmin = (0..nk)
                        .map(|k| self.inst.d1[x * nk + k])
                        .fold(f64::INFINITY, f64::min);
                    let mut norm = 0.0;
                    for k in 0..nk {
                        row[k] = mg[k] * (-s * (self.inst.d1[x * nk + k] - dmin)).exp();
                        norm += row[k];
                    }
                    if norm > 0.0 {
                        row.iter_mut().for_each(|v| *v /= norm);
                    } else {
                        row.iter_mut().for_each(|v| *v = 1.0 / nk as f64);
                    }
                    if qg > 0.0 {
                        for k in 0..nk {
                            next[k] += self.q[i] / qg * row[k];
                        }
                    }
                }
                if qg == 0.0 {
                    break;
                }
                let change = next
                    .iter()
                    .zip(mg.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                mg.copy_from_slice(&next);
                if change < 1e-13 {
                    break;
                }
            }
        }
        w
    }

    /// Channel meeting `E d1 <= target` with small rate. `None` if even the
    /// letter-wise best reconstruction misses the target.
    fn solve(&self, target: f64) -> Option<Vec<f64>> {
        let (d0, w0) = self.per_group();
        if d0 <= target {
            return Some(w0);
        }
        let (dmin, wmin) = self.per_letter();
        if dmin > target {
            return None;
        }
        if dmin >= target - 1e-12 {
            return Some(wmin);
        }
        let nk = self.inst.nk;
        let mut m = vec![1.0 / nk as f64; self.groups() * nk];
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut w_hi = loop {
            let w = self.at_slope(hi, &mut m);
            if self.distortion(&w) <= target {
                break w;
            }
            lo = hi;
            hi *= 2.0;
            if hi > 1e5 {
                return Some(wmin);
            }
        };
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            let w = self.at_slope(mid, &mut m);
            if self.distortion(&w) <= target {
                hi = mid;
                w_hi = w;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-9 * hi {
                break;
            }
        }
        Some(w_hi)
    }
}

fn softmax(theta: &[f64], nu: usize) -> Vec<f64> {
    let mut p = vec![0.0; theta.len()];
    for (row, out) in theta.chunks(nu).zip(p.chunks_mut(nu)) {
        let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for (o, t) in out.iter_mut().zip(row) {
            *o = (t - mx).exp();
            s += *o;
        }
        out.iter_mut().for_each(|v| *v /= s);
    }
    p
}

fn logits(pu: &[f64]) -> Vec<f64> {
    pu.iter().map(|p| p.max(1e-300).ln().max(-700.0)).collect()
}

struct Targets {
    d1: f64,
    d2: f64,
    r2: f64,
    d1_scale: f64,
    d2_scale: f64,
}

impl Targets {
    fn violation(&self, e: &Eval) -> f64 {
        (e.r2 - self.r2).max(0.0)
            + (e.d1 - self.d1).max(0.0) / self.d1_scale
            + (e.d2 - self.d2).max(0.0) / self.d2_scale
    }

    fn feasible_u(&self, inst: &Inst, pu: &[f64]) -> bool {
        inst.r2(pu) <= self.r2 && inst.best_g2(pu).0 <= self.d2
    }
}

/// One optimized start. Returns the final channel pair, or `None` if no
/// feasible channel could be reached.
fn optimize(
    inst: &Inst,
    t: &Targets,
    start: Vec<f64>,
    safe: Option<&[f64]>,
    opts: &SearchOptions,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let nu = inst.nu;
    let mut theta = logits(&start);
    let mut w = Ba::new(inst, &start).solve(t.d1)?;
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;
    for round in 0..PENALTY_ROUNDS {
        let lambda = 10f64.powi(round);
        let f = |th: &[f64], w: &[f64]| -> f64 {
            let e = inst.eval(&softmax(th, nu), w);
            e.r1 + lambda * t.violation(&e)
        };
        let mut step: f64 = 1.0;
        let mut block_start = f(&theta, &w);
        for it in 0..opts.max_iters {
            if it > 0 && it % BA_EVERY == 0 {
                let pu = softmax(&theta, nu);
                if let Some(nw) = Ba::new(inst, &pu).solve(t.d1) {
                    w = nw;
                }
                let now = f(&theta, &w);
                if (block_start - now).abs() < opts.tol {
                    break;
                }
                block_start = now;
            }
            let f0 = f(&theta, &w);
            let mut grad = vec![0.0; theta.len()];
            let mut probe = theta.clone();
            for i in 0..theta.len() {
                probe[i] = theta[i] + FD_STEP;
                let fp = f(&probe, &w);
                probe[i] = theta[i] - FD_STEP;
                let fm = f(&probe, &w);
                probe[i] = theta[i];
                grad[i] = (fp - fm) / (2.0 * FD_STEP);
            }
            let g2: f64 = grad.iter().map(|g| g * g).sum();
            if g2 < 1e-20 {
                break;
            }
            step = (step * 2.0).min(50.0);
            let mut moved = false;
            while step > 1e-12 {
                let cand: Vec<f64> = theta.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
                if f(&cand, &w) <= f0 - 1e-4 * step * g2 {
                    theta = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
            let pu = softmax(&theta, nu);
            if t.feasible_u(inst, &pu) {
                let (r1, _) = inst.r1_d1(&pu, &w);
                if best_feasible.as_ref().map_or(true, |b| r1 < b.0) {
                    best_feasible = Some((r1, pu));
                }
            }
        }
    }
    let pu = softmax(&theta, nu);
    let anchor = safe.map(|s| s.to_vec()).or(best_feasible.map(|b| b.1))?;
    let pu = repair(inst, t, pu, &anchor)?;
    let pu = polish(inst, t, pu, opts);
    let w = Ba::new(inst, &pu).solve(t.d1)?;
    Some((pu, w))
}

fn fd_grad(theta: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            probe[i] = theta[i] + FD_STEP;
            let fp = f(&probe);
            probe[i] = theta[i] - FD_STEP;
            let fm = f(&probe);
            probe[i] = theta[i];
            (fp - fm) / (2.0 * FD_STEP)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Descent on `R1` that stays feasible. The direction is the negative
/// gradient with the components along active constraint gradients removed
/// and a small inward push added; a trial point that leaves the feasible set
/// is mixed back toward the current one.
fn polish(inst: &Inst, t: &Targets, pu: Vec<f64>, opts: &SearchOptions) -> Vec<f64> {
    let nu = inst.nu;
    let mut cur = pu;
    let mut w = match Ba::new(inst, &cur).solve(t.d1) {
        Some(w) => w,
        None => return cur,
    };
    let mut step: f64 = 1.0;
    let mut block_start = inst.r1_d1(&cur, &w).0;
    for it in 0..opts.max_iters {
        if it > 0 && it % BA_EVERY == 0 {
            if let Some(nw) = Ba::new(inst, &cur).solve(t.d1) {
                w = nw;
            }
            let now = inst.r1_d1(&cur, &w).0;
            if block_start - now < opts.tol * 1e-3 {
                break;
            }
            block_start = now;
        }
        let theta = logits(&cur);
        let r1_of = |th: &[f64]| inst.r1_d1(&softmax(th, nu), &w).0;
        let mut dir: Vec<f64> = fd_grad(&theta, r1_of).iter().map(|g| -g).collect();
        let mut active: Vec<Vec<f64>> = Vec::new();
        if inst.r2(&cur) >= t.r2 - 1e-7 {
            active.push(fd_grad(&theta, |th| inst.r2(&softmax(th, nu))));
        }
        if inst.best_g2(&cur).0 >= t.d2 - 1e-7 {
            active.push(fd_grad(&theta, |th| inst.best_g2(&softmax(th, nu)).0));
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for a in &active {
            let mut v = a.clone();
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let n = dot(&v, &v).sqrt();
            if n > 1e-12 {
                v.iter_mut().for_each(|x| *x /= n);
                basis.push(v);
            }
        }
        for b in &basis {
            let c = dot(&dir, b);
            dir.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&dir, &dir).sqrt();
        if norm < 1e-12 {
            break;
        }
        for a in &active {
            let na = dot(a, a).sqrt();
            if na > 1e-12 {
                dir.iter_mut().zip(a).for_each(|(x, y)| *x -= 0.05 * norm * y / na);
            }
        }
        let f0 = inst.r1_d1(&cur, &w).0;
        step = (step * 2.0).min(50.0);
        let mut moved = false;
        while step > 1e-10 {
            let cand: Vec<f64> = theta.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let cand = softmax(&cand, nu);
            let cand = if t.feasible_u(inst, &cand) {
                cand
            } else {
                match repair(inst, t, cand, &cur) {
                    Some(c) => c,
                    None => break,
                }
            };
            if inst.r1_d1(&cand, &w).0 < f0 - 1e-13 {
                cur = cand;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    cur
}

/// Mix `pu` toward the feasible `anchor` just enough to meet `R2` and `D2`.
fn repair(inst: &Inst, t: &Targets, pu: Vec<f64>, anchor: &[f64]) -> Option<Vec<f64>> {
    if t.feasible_u(inst, &pu) {
        return Some(pu);
    }
    if !t.feasible_u(inst, anchor) {
        return None;
    }
    let mix = |s: f64| -> Vec<f64> {
        pu.iter()
            .zip(anchor)
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if t.feasible_u(inst, &mix(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(mix(hi))
}

fn to_aux(inst: &Inst, pu: &[f64], w: &[f64]) -> Result<AuxiliarySystem> {
    let (nx, ny, nz, nu) = (inst.nx, inst.ny, inst.nz, inst.nu);
    let (_, g) = inst.best_g2(pu);
    // g is indexed (u, z)
    Ok(AuxiliarySystem {
        p_u: Some(CondPmf::new(vec![nx, ny], nu, pu.to_vec())?),
        p_xhat1: Some(CondPmf::new(vec![nx, ny, nu], inst.nk, w.to_vec())?),
        g2: Some(DeterministicMap::new(vec![nu, nz], inst.nk2, g)?),
        ..Default::default()
    })
}

fn meets(p: &RegionPoint, d1: f64, d2: f64, r2: f64) -> bool {
    p.r2 <= r2 + FEAS_TOL && p.d1 <= d1 + FEAS_TOL && p.d2 <= d2 + FEAS_TOL
}

/// Smallest `R1` found for the cascade network at `(D1, D2, R2)`.
///
/// Errors with `Infeasible` when a distortion is below the letter-wise
/// minimum and with `NoFeasiblePointFound` when no start reaches the
/// constraints although they are not provably infeasible.
pub fn min_r1_cascade_search(
    src: &SourceSpec,
    d1: f64,
    d2: f64,
    r2: f64,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    for (v, name) in [(d1, "D1"), (d2, "D2"), (r2, "R2")] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!("{name} must be finite and nonnegative")));
        }
    }
    let (nx, ny, nz) = (src.x_size(), src.y_size(), src.z_size());
    let limit = cardinality_budget(Network::Cascade, nx, ny, nz, opts.u_size, 1)
        .map(|b| b.u)
        .unwrap_or(usize::MAX);
    if opts.u_size == 0 || opts.u_size > limit {
        return Err(Error::invalid(format!(
            "|U| = {} outside [1, {limit}]",
            opts.u_size
        )));
    }
    let inst = Inst::new(src, opts.u_size);
    let min_d = |tbl: &[f64], cols: usize| -> f64 {
        let mut acc = 0.0;
        for x in 0..nx {
            let px: f64 = (0..ny).map(|y| inst.pxy[x * ny + y]).sum();
            let row = &tbl[x * cols..(x + 1) * cols];
            acc += px * row.iter().copied().fold(f64::INFINITY, f64::min);
        }
        acc
    };
    let d1_min = min_d(&inst.d1, inst.nk);
    let d2_min = min_d(&inst.d2, inst.nk2);
    if d1 < d1_min {
        return Err(Error::infeasible(
            format!("D1 = {d1} is below the least achievable distortion {d1_min}"),
            Some(d1_min),
        ));
    }
    if d2 < d2_min {
        return Err(Error::infeasible(
            format!("D2 = {d2} is below the least achievable distortion {d2_min}"),
            Some(d2_min),
        ));
    }
    let targets = Targets {
        d1,
        d2,
        r2,
        d1_scale: src.d1().max().max(1e-300),
        d2_scale: src.d2().max().max(1e-300),
    };

    let nu = opts.u_size;
    let nxy = nx * ny;
    let constant = inst.one_hot(|_| 0);
    let identity = inst.one_hot(|xy| xy % nu);
    let safe: Option<Vec<f64>> = if d2 >= inst.const_d2() {
        Some(constant.clone())
    } else if nu >= nxy && r2 >= inst.h_xy_given_z() && targets.feasible_u(&inst, &identity) {
        Some(identity.clone())
    } else {
        None
    };

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(opts.restarts + 1);
    let smooth = if nu > 1 { 0.3 / (nu - 1) as f64 } else { 0.0 };
    starts.push(
        (0..nxy * nu)
            .map(|i| if i % nu == (i / nu) % nu { 0.7 } else { smooth })
            .map(|v| if nu == 1 { 1.0 } else { v })
            .collect(),
    );
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut pu = vec![0.0; nxy * nu];
        for row in pu.chunks_mut(nu) {
            for v in row.iter_mut() {
                *v = rng.sample::<f64, _>(Exp1) + 1e-12;
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        starts.push(pu);
    }

    let finish = |pu: &[f64], w: &[f64], start: StartKind| -> Result<Option<SearchOutcome>> {
        let aux = to_aux(&inst, pu, w)?;
        let point = eval_cascade_point(src, &aux)?;
        Ok(meets(&point, d1, d2, r2).then(|| SearchOutcome {
            r1: point.r1,
            point,
            aux,
            start,
        }))
    };

    let mut candidates: Vec<SearchOutcome> = Vec::new();
    if let Some(ws) = &opts.warm_start {
        if let Ok(p) = eval_cascade_point(src, ws) {
            if meets(&p, d1, d2, r2) {
                candidates.push(SearchOutcome {
                    r1: p.r1,
                    point: p,
                    aux: ws.clone(),
                    start: StartKind::Warm,
                });
            }
        }
    }
    let mut fixed = vec![(constant.clone(), StartKind::ConstantU), (identity.clone(), StartKind::IdentityU)];
    let n_maps = (nu as u128).checked_pow(nxy as u32).unwrap_or(u128::MAX);
    if n_maps <= MAX_DETERMINISTIC {
        for code in 0..n_maps as usize {
            let digit = |xy: usize| (code / nu.pow(xy as u32)) % nu;
            let pu = inst.one_hot(digit);
            if pu != constant && pu != identity {
                fixed.push((pu, StartKind::Deterministic(code)));
            }
        }
    }
    for (pu, kind) in &fixed {
        if targets.feasible_u(&inst, pu) {
            if let Some(w) = Ba::new(&inst, pu).solve(d1) {
                candidates.extend(finish(pu, &w, *kind)?);
            }
        }
    }
    if nu > 1 {
        let runs: Vec<Option<(Vec<f64>, Vec<f64>)>> = starts
            .into_par_iter()
            .map(|s| optimize(&inst, &targets, s, safe.as_deref(), opts))
            .collect();
        for (i, run) in runs.into_iter().enumerate() {
            if let Some((pu, w)) = run {
                candidates.extend(finish(&pu, &w, StartKind::Optimized(i))?);
            }
        }
    }
    let mut best: Option<SearchOutcome> = None;
    for c in candidates {
        if best.as_ref().map_or(true, |b| c.r1 < b.r1) {
            best = Some(c);
        }
    }
    best.ok_or_else(|| {
        Error::NoFeasiblePointFound(format!(
            "no start met D1 = {d1}, D2 = {d2}, R2 = {r2} with |U| = {nu}"
        ))
    })
}
