//! Sources, distortion measures, auxiliary systems and region points for
//! finite alphabets.

use crate::error::{Error, Result};
use crate::prob::{check_markov_chain, CondPmf, DeterministicMap, JointPmf};

/// Largest accepted deviation from `X - Y - Z`, in bits.
pub const MARKOV_TOL: f64 = 1e-10;

/// Per-letter distortion `d(source, reconstruction)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistortionTable {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("distortion table must be nonempty"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "distortion table has {} entries, expected {}",
                values.len(),
                rows * cols
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("distortions must be finite and nonnegative"));
        }
        Ok(DistortionTable { rows, cols, values })
    }

    /// Hamming distortion on a `k`-letter alphabet.
    pub fn hamming(k: usize) -> Self {
        let values = (0..k * k)
            .map(|i| if i / k == i % k { 0.0 } else { 1.0 })
            .collect();
        DistortionTable {
            rows: k,
            cols: k,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, src: usize, rec: usize) -> f64 {
        self.values[src * self.cols + rec]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Joint source `p(x, y, z)` with `X - Y - Z` and the distortion measures.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pmf: JointPmf,
    d1: DistortionTable,
    d2: DistortionTable,
    d3: Option<DistortionTable>,
}

impl SourceSpec {
    pub fn new(
        pmf: JointPmf,
        d1: DistortionTable,
        d2: DistortionTable,
        d3: Option<DistortionTable>,
    ) -> Result<Self> {
        if pmf.arity() != 3 {
            return Err(Error::invalid("source pmf must be over (X, Y, Z)"));
        }
        let dev = check_markov_chain(&pmf, &[0], &[1], &[2])?;
        if dev > MARKOV_TOL {
            return Err(Error::invalid(format!(
                "source violates X - Y - Z: I(X;Z|Y) = {dev:e} bits"
            )));
        }
        let (nx, nz) = (pmf.sizes()[0], pmf.sizes()[2]);
        if d1.rows != nx || d2.rows != nx {
            return Err(Error::invalid(format!(
                "d1 and d2 need {nx} rows, one per source letter"
            )));
        }
        if let Some(d3) = &d3 {
            if d3.rows != nz {
                return Err(Error::invalid(format!("d3 needs {nz} rows, one per letter of Z")));
            }
        }
        Ok(SourceSpec { pmf, d1, d2, d3 })
    }

    /// Build from `p(x)`, `p(y|x)` and `p(z|y)`.
    pub fn from_chain(
        px: &[f64],
        py_x: &CondPmf,
        pz_y: &CondPmf,
        d1: DistortionTable,
        d2: DistortionTable,
        d3: Option<DistortionTable>,
    ) -> Result<Self> {
        let p = JointPmf::new(vec![px.len()], px.to_vec())?
            .extend(&[0], py_x)?
            .extend(&[1], pz_y)?;
        Self::new(p, d1, d2, d3)
    }

    pub fn pmf(&self) -> &JointPmf {
        &self.pmf
    }

    pub fn d1(&self) -> &DistortionTable {
        &self.d1
    }

    pub fn d2(&self) -> &DistortionTable {
        &self.d2
    }

    pub fn d3(&self) -> Option<&DistortionTable> {
        self.d3.as_ref()
    }

    pub fn x_size(&self) -> usize {
        self.pmf.sizes()[0]
    }

    pub fn y_size(&self) -> usize {
        self.pmf.sizes()[1]
    }

    pub fn z_size(&self) -> usize {
        self.pmf.sizes()[2]
    }
}

/// Auxiliary channels and reconstruction maps. Which fields are required
/// depends on the network being evaluated:
///
/// | field     | cascade      | triangular   | two-way cascade | two-way triangular | helper            |
/// |-----------|--------------|--------------|-----------------|--------------------|-------------------|
/// | `p_u`     | `(x,y)`      | `(x,y)`      | `(x,y)`         | `(x,y)`            | `(x,y,uh)`        |
/// | `p_xhat1` | `(x,y,u)`    | `(x,y,u)`    | `(x,y,u1)`      | `(x,y,u1)`         | `(x,y,u1,uh)`     |
/// | `p_v`     |              | `(x,y,u)`    |                 | `(x,y,u1)`         | `(x,y,u1,uh)`     |
/// | `p_u2`    |              |              | `(z,u1)`        | `(z,u1,v)`         |                   |
/// | `p_uh`    |              |              |                 |                    | `(y)`             |
/// | `g2`      | `(u,z)`      | `(u,v,z)`    | `(u1,z)`        | `(u1,v,z)`         | `(u1,u2,uh,z)`    |
/// | `g3`      |              |              | `(u1,u2,x,y)`   | `(u1,u2,v,x,y)`    |                   |
///
/// For the helper network `p_v` holds the channel of its second auxiliary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuxiliarySystem {
    pub p_u: Option<CondPmf>,
    pub p_xhat1: Option<CondPmf>,
    pub p_v: Option<CondPmf>,
    pub p_u2: Option<CondPmf>,
    pub p_uh: Option<CondPmf>,
    pub g2: Option<DeterministicMap>,
    pub g3: Option<DeterministicMap>,
}

/// The five networks with single-letter regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Network {
    Cascade,
    Triangular,
    TwoWayCascade,
    TwoWayTriangular,
    Helper,
}

impl Network {
    pub fn name(self) -> &'static str {
        match self {
            Network::Cascade => "cascade",
            Network::Triangular => "triangular",
            Network::TwoWayCascade => "two-way-cascade",
            Network::TwoWayTriangular => "two-way-triangular",
            Network::Helper => "helper",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cascade" => Ok(Network::Cascade),
            "triangular" => Ok(Network::Triangular),
            "two-way-cascade" => Ok(Network::TwoWayCascade),
            "two-way-triangular" => Ok(Network::TwoWayTriangular),
            "helper" => Ok(Network::Helper),
            other => Err(Error::invalid(format!(
                "unknown network '{other}', expected cascade, triangular, two-way-cascade, two-way-triangular or helper"
            ))),
        }
    }
}

/// Rate lower bounds (bits) and expected distortions of one auxiliary system.
/// For the two-way networks `r3` is the first backward rate and `r4` the
/// second; for the triangular networks `r3` is the direct link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub r1: f64,
    pub r2: f64,
    pub r3: Option<f64>,
    pub r4: Option<f64>,
    pub rh: Option<f64>,
    pub d1: f64,
    pub d2: f64,
    pub d3: Option<f64>,
}

/// Largest auxiliary alphabets for which the regions are exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityBudget {
    pub u: usize,
    pub v: Option<usize>,
    pub u2: Option<usize>,
}

/// Budgets for the cascade-family networks. The helper network has no bound
/// and returns `None`. For the networks whose second-layer bounds depend on
/// the first-layer alphabet, `u1` and `v` give the sizes actually in use.
pub fn cardinality_budget(
    network: Network,
    x: usize,
    y: usize,
    z: usize,
    u1: usize,
    v: usize,
) -> Option<CardinalityBudget> {
    let xy = x * y;
    match network {
        Network::Cascade => Some(CardinalityBudget {
            u: xy + 3,
            v: None,
            u2: None,
        }),
        Network::Triangular => Some(CardinalityBudget {
            u: xy + 4,
            v: Some((xy + 4) * (xy + 1)),
            u2: None,
        }),
        Network::TwoWayCascade => Some(CardinalityBudget {
            u: xy + 5,
            v: None,
            u2: Some(u1 * (z + 1)),
        }),
        Network::TwoWayTriangular => Some(CardinalityBudget {
            u: xy + 6,
            v: Some(u1 * (xy + 3)),
            u2: Some(u1 * v * (z + 1)),
        }),
        Network::Helper => None,
    }
}
