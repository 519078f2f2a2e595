//! Second evaluation path for the discrete regions: the joint is expanded as
//! an explicit list of outcomes and every conditional mutual information is
//! assembled from four entropies.

use std::collections::BTreeMap;

use cascade_core::discrete::{AuxiliarySystem, DistortionTable, RegionPoint, SourceSpec};
use cascade_core::prob::{CondPmf, DeterministicMap};
use rand::Rng;

/// Outcomes with positive probability.
pub struct Dense {
    pub rows: Vec<(Vec<usize>, f64)>,
}

impl Dense {
    pub fn source(src: &SourceSpec) -> Self {
        let s = src.pmf().sizes();
        let mut rows = Vec::new();
        for x in 0..s[0] {
            for y in 0..s[1] {
                for z in 0..s[2] {
                    let p = src.pmf().prob(&[x, y, z]);
                    if p > 0.0 {
                        rows.push((vec![x, y, z], p));
                    }
                }
            }
        }
        Dense { rows }
    }

    pub fn channel(&mut self, parents: &[usize], c: &CondPmf) {
        let mut next = Vec::new();
        for (v, p) in &self.rows {
            let input: Vec<usize> = parents.iter().map(|&i| v[i]).collect();
            for o in 0..c.output_size() {
                let q = c.prob(&input, o);
                if q > 0.0 {
                    let mut w = v.clone();
                    w.push(o);
                    next.push((w, p * q));
                }
            }
        }
        self.rows = next;
    }

    pub fn map(&mut self, parents: &[usize], m: &DeterministicMap) {
        for (v, _) in self.rows.iter_mut() {
            let input: Vec<usize> = parents.iter().map(|&i| v[i]).collect();
            let o = m.apply(&input);
            v.push(o);
        }
    }

    pub fn entropy(&self, vars: &[usize]) -> f64 {
        let mut m: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (v, p) in &self.rows {
            *m.entry(vars.iter().map(|&i| v[i]).collect()).or_insert(0.0) += p;
        }
        m.values().filter(|&&p| p > 0.0).map(|p| -p * p.log2()).sum()
    }

    pub fn cmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        self.entropy(&cat(a, c)) + self.entropy(&cat(b, c))
            - self.entropy(&cat(&cat(a, b), c))
            - self.entropy(c)
    }

    pub fn distortion(&self, s: usize, r: usize, d: &DistortionTable) -> f64 {
        self.rows.iter().map(|(v, p)| p * d.get(v[s], v[r])).sum()
    }
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

pub fn cascade(src: &SourceSpec, aux: &AuxiliarySystem) -> RegionPoint {
    let mut j = Dense::source(src);
    j.channel(&[X, Y], aux.p_u.as_ref().unwrap()); // 3
    j.channel(&[X, Y, 3], aux.p_xhat1.as_ref().unwrap()); // 4
    j.map(&[3, Z], aux.g2.as_ref().unwrap()); // 5
    RegionPoint {
        r1: j.cmi(&[X], &[4, 3], &[Y]),
        r2: j.cmi(&[3], &[X, Y], &[Z]),
        r3: None,
        r4: None,
        rh: None,
        d1: j.distortion(X, 4, src.d1()),
        d2: j.distortion(X, 5, src.d2()),
        d3: None,
    }
}

pub fn triangular(src: &SourceSpec, aux: &AuxiliarySystem) -> RegionPoint {
    let mut j = Dense::source(src);
    j.channel(&[X, Y], aux.p_u.as_ref().unwrap()); // 3
    j.channel(&[X, Y, 3], aux.p_xhat1.as_ref().unwrap()); // 4
    j.channel(&[X, Y, 3], aux.p_v.as_ref().unwrap()); // 5
    j.map(&[3, 5, Z], aux.g2.as_ref().unwrap()); // 6
    RegionPoint {
        r1: j.cmi(&[X], &[4, 3], &[Y]),
        r2: j.cmi(&[3], &[X, Y], &[Z]),
        r3: Some(j.cmi(&[X, Y], &[5], &[3, Z])),
        r4: None,
        rh: None,
        d1: j.distortion(X, 4, src.d1()),
        d2: j.distortion(X, 6, src.d2()),
        d3: None,
    }
}

pub fn two_way_cascade(src: &SourceSpec, aux: &AuxiliarySystem) -> RegionPoint {
    let mut j = Dense::source(src);
    j.channel(&[X, Y], aux.p_u.as_ref().unwrap()); // 3
    j.channel(&[X, Y, 3], aux.p_xhat1.as_ref().unwrap()); // 4
    j.channel(&[Z, 3], aux.p_u2.as_ref().unwrap()); // 5
    j.map(&[3, Z], aux.g2.as_ref().unwrap()); // 6
    j.map(&[3, 5, X, Y], aux.g3.as_ref().unwrap()); // 7
    RegionPoint {
        r1: j.cmi(&[X], &[4, 3], &[Y]),
        r2: j.cmi(&[3], &[X, Y], &[Z]),
        r3: Some(j.cmi(&[5], &[Z], &[3, X, Y])),
        r4: None,
        rh: None,
        d1: j.distortion(X, 4, src.d1()),
        d2: j.distortion(X, 6, src.d2()),
        d3: Some(j.distortion(Z, 7, src.d3().unwrap())),
    }
}

pub fn two_way_triangular(src: &SourceSpec, aux: &AuxiliarySystem) -> RegionPoint {
    let mut j = Dense::source(src);
    j.channel(&[X, Y], aux.p_u.as_ref().unwrap()); // 3
    j.channel(&[X, Y, 3], aux.p_xhat1.as_ref().unwrap()); // 4
    j.channel(&[X, Y, 3], aux.p_v.as_ref().unwrap()); // 5
    j.channel(&[Z, 3, 5], aux.p_u2.as_ref().unwrap()); // 6
    j.map(&[3, 5, Z], aux.g2.as_ref().unwrap()); // 7
    j.map(&[3, 6, 5, X, Y], aux.g3.as_ref().unwrap()); // 8
    RegionPoint {
        r1: j.cmi(&[X], &[4, 3], &[Y]),
        r2: j.cmi(&[3], &[X, Y], &[Z]),
        r3: Some(j.cmi(&[X, Y], &[5], &[3, Z])),
        r4: Some(j.cmi(&[6], &[Z], &[3, 5, X, Y])),
        rh: None,
        d1: j.distortion(X, 4, src.d1()),
        d2: j.distortion(X, 7, src.d2()),
        d3: Some(j.distortion(Z, 8, src.d3().unwrap())),
    }
}

pub fn helper(src: &SourceSpec, aux: &AuxiliarySystem) -> RegionPoint {
    let mut j = Dense::source(src);
    j.channel(&[Y], aux.p_uh.as_ref().unwrap()); // 3
    j.channel(&[X, Y, 3], aux.p_u.as_ref().unwrap()); // 4
    j.channel(&[X, Y, 4, 3], aux.p_xhat1.as_ref().unwrap()); // 5
    j.channel(&[X, Y, 4, 3], aux.p_v.as_ref().unwrap()); // 6
    j.map(&[4, 6, 3, Z], aux.g2.as_ref().unwrap()); // 7
    RegionPoint {
        r1: j.cmi(&[X], &[5, 4], &[Y, 3]),
        r2: j.cmi(&[4], &[X, Y], &[Z, 3]),
        r3: Some(j.cmi(&[X, Y], &[6], &[4, 3, Z])),
        r4: None,
        rh: Some(j.cmi(&[3], &[Y], &[Z])),
        d1: j.distortion(X, 5, src.d1()),
        d2: j.distortion(X, 7, src.d2()),
        d3: None,
    }
}

pub fn close(a: &RegionPoint, b: &RegionPoint, tol: f64) -> bool {
    let opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        (None, None) => true,
        _ => false,
    };
    (a.r1 - b.r1).abs() <= tol
        && (a.r2 - b.r2).abs() <= tol
        && (a.d1 - b.d1).abs() <= tol
        && (a.d2 - b.d2).abs() <= tol
        && opt(a.r3, b.r3)
        && opt(a.r4, b.r4)
        && opt(a.rh, b.rh)
        && opt(a.d3, b.d3)
}

pub fn random_cond<R: Rng>(rng: &mut R, inputs: Vec<usize>, out: usize) -> CondPmf {
    let rows: usize = inputs.iter().product();
    let mut t = Vec::with_capacity(rows * out);
    for _ in 0..rows {
        let w: Vec<f64> = (0..out).map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
        let s: f64 = w.iter().sum();
        t.extend(w.iter().map(|v| v / s));
    }
    CondPmf::new(inputs, out, t).unwrap()
}

pub fn random_map<R: Rng>(rng: &mut R, inputs: Vec<usize>, out: usize) -> DeterministicMap {
    let rows: usize = inputs.iter().product();
    let t = (0..rows).map(|_| rng.gen_range(0..out)).collect();
    DeterministicMap::new(inputs, out, t).unwrap()
}

/// Random Markov source `p(x) p(y|x) p(z|y)` with random distortion tables.
pub fn random_source<R: Rng>(rng: &mut R, nx: usize, ny: usize, nz: usize, k1: usize, k2: usize, k3: usize) -> SourceSpec {
    let px = random_cond(rng, vec![], nx);
    let py = random_cond(rng, vec![nx], ny);
    let pz = random_cond(rng, vec![ny], nz);
    let mut table = |r: usize, c: usize| {
        DistortionTable::new(r, c, (0..r * c).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap()
    };
    let d1 = table(nx, k1);
    let d2 = table(nx, k2);
    let d3 = table(nz, k3);
    SourceSpec::from_chain(px.table(), &py, &pz, d1, d2, Some(d3)).unwrap()
}

pub struct Sizes {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub u1: usize,
    pub v: usize,
    pub u2: usize,
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
}

pub fn sizes<R: Rng>(rng: &mut R) -> Sizes {
    let s = Sizes {
        x: rng.gen_range(2..=3),
        y: rng.gen_range(2..=3),
        z: rng.gen_range(1..=3),
        u1: rng.gen_range(1..=3),
        v: rng.gen_range(1..=3),
        u2: rng.gen_range(1..=3),
        k1: rng.gen_range(1..=3),
        k2: rng.gen_range(1..=3),
        k3: rng.gen_range(1..=3),
    };
    fit(s)
}

/// Keep `|U2|` within every budget it is later checked against.
pub fn fit(mut s: Sizes) -> Sizes {
    s.u2 = s.u2.min(s.u1 * (s.z + 1));
    s
}

/// Random two-way triangular system with the given alphabets.
pub fn random_tw_tri<R: Rng>(rng: &mut R, s: &Sizes) -> AuxiliarySystem {
    AuxiliarySystem {
        p_u: Some(random_cond(rng, vec![s.x, s.y], s.u1)),
        p_xhat1: Some(random_cond(rng, vec![s.x, s.y, s.u1], s.k1)),
        p_v: Some(random_cond(rng, vec![s.x, s.y, s.u1], s.v)),
        p_u2: Some(random_cond(rng, vec![s.z, s.u1, s.v], s.u2)),
        g2: Some(random_map(rng, vec![s.u1, s.v, s.z], s.k2)),
        g3: Some(random_map(rng, vec![s.u1, s.u2, s.v, s.x, s.y], s.k3)),
        ..Default::default()
    }
}

pub fn reshape_cond(c: &CondPmf, inputs: Vec<usize>) -> CondPmf {
    CondPmf::new(inputs, c.output_size(), c.table().to_vec()).unwrap()
}

pub fn reshape_map(m: &DeterministicMap, inputs: Vec<usize>) -> DeterministicMap {
    DeterministicMap::new(inputs, m.output_size(), m.table().to_vec()).unwrap()
}
