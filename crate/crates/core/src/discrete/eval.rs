//! Rate bounds and distortions of a fixed auxiliary system.
//!
//! Every evaluator assembles the full joint distribution by appending the
//! auxiliaries to `p(x, y, z)` in a fixed order and reads the bounds off it.
//! Layouts (variable indices) are
//!
//! * cascade: `X Y Z U X1 X2`
//! * triangular: `X Y Z U X1 V X2`
//! * two-way cascade: `X Y Z U1 X1 U2 X2 Zh`
//! * two-way triangular: `X Y Z U1 X1 V U2 X2 Zh`
//! * helper: `X Y Z Uh U1 X1 U2 X2`
//!
//! The relative order is shared, so degenerate (single-letter) auxiliaries
//! reproduce the smaller networks bit for bit.

use super::model::{
    cardinality_budget, AuxiliarySystem, DistortionTable, Network, RegionPoint, SourceSpec,
};
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information as cmi, CondPmf, DeterministicMap, JointPmf};

/// Largest accepted deviation from the required factorization, in bits.
pub const FACTORIZATION_TOL: f64 = 1e-8;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

fn need<'a, T>(v: &'a Option<T>, name: &str, net: Network) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| {
        Error::InvalidAuxiliary(format!("{} evaluation needs {name}", net.name()))
    })
}

fn aux_err(name: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::InvalidAuxiliary(format!("{name}: {m}")),
        other => other,
    }
}

/// Builds the joint one variable at a time and remembers each step for the
/// factorization check.
struct Builder {
    joint: JointPmf,
    steps: Vec<(usize, Vec<usize>)>,
}

impl Builder {
    fn new(src: &SourceSpec) -> Self {
        Builder {
            joint: src.pmf().clone(),
            steps: Vec::new(),
        }
    }

    fn channel(&mut self, name: &str, parents: &[usize], ch: &CondPmf) -> Result<usize> {
        let var = self.joint.arity();
        self.joint = self.joint.extend(parents, ch).map_err(|e| aux_err(name, e))?;
        self.steps.push((var, parents.to_vec()));
        Ok(var)
    }

    fn map(&mut self, name: &str, parents: &[usize], m: &DeterministicMap) -> Result<usize> {
        let var = self.joint.arity();
        self.joint = self.joint.extend_map(parents, m).map_err(|e| aux_err(name, e))?;
        Ok(var)
    }

    /// Each appended channel output must be independent of everything before
    /// it given its parents.
    fn check(&self) -> Result<()> {
        for (var, parents) in &self.steps {
            let others: Vec<usize> = (0..*var).filter(|v| !parents.contains(v)).collect();
            if others.is_empty() {
                continue;
            }
            let dev = cmi(&self.joint, &[*var], &others, parents)?;
            if dev > FACTORIZATION_TOL {
                return Err(Error::InvalidAuxiliary(format!(
                    "variable {var} depends on {others:?} beyond its parents ({dev:e} bits)"
                )));
            }
        }
        Ok(())
    }
}

fn expected_distortion(joint: &JointPmf, src: usize, rec: usize, d: &DistortionTable) -> Result<f64> {
    let m = joint.marginal(&[src, rec])?;
    if m.sizes()[1] != d.cols() {
        return Err(Error::InvalidAuxiliary(format!(
            "reconstruction alphabet has {} letters but the distortion table has {} columns",
            m.sizes()[1],
            d.cols()
        )));
    }
    Ok(m.expectation(|i| d.get(i[0], i[1])))
}

fn check_size(what: &str, size: usize, limit: Option<usize>) -> Result<()> {
    match limit {
        Some(l) if size > l => Err(Error::InvalidAuxiliary(format!(
            "|{what}| = {size} exceeds the cardinality bound {l}"
        ))),
        _ => Ok(()),
    }
}

fn check_budget(net: Network, src: &SourceSpec, u: usize, v: usize, u2: Option<usize>) -> Result<()> {
    if let Some(b) = cardinality_budget(net, src.x_size(), src.y_size(), src.z_size(), u, v) {
        check_size("U", u, Some(b.u))?;
        if b.v.is_some() {
            check_size("V", v, b.v)?;
        }
        if let Some(u2) = u2 {
            check_size("U2", u2, b.u2)?;
        }
    }
    Ok(())
}

fn need_d3(src: &SourceSpec, net: Network) -> Result<&DistortionTable> {
    src.d3()
        .ok_or_else(|| Error::invalid(format!("{} evaluation needs a d3 table", net.name())))
}

/// Cascade network: `R1 >= I(X; X1, U | Y)`, `R2 >= I(U; X, Y | Z)`.
pub fn eval_cascade_point(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    let net = Network::Cascade;
    let p_u = need(&aux.p_u, "p_u", net)?;
    let p_x1 = need(&aux.p_xhat1, "p_xhat1", net)?;
    let g2 = need(&aux.g2, "g2", net)?;
    check_budget(net, src, p_u.output_size(), 1, None)?;
    let mut b = Builder::new(src);
    let u = b.channel("p_u", &[X, Y], p_u)?;
    let x1 = b.channel("p_xhat1", &[X, Y, u], p_x1)?;
    let x2 = b.map("g2", &[u, Z], g2)?;
    b.check()?;
    let j = &b.joint;
    Ok(RegionPoint {
        r1: cmi(j, &[X], &[x1, u], &[Y])?,
        r2: cmi(j, &[u], &[X, Y], &[Z])?,
        r3: None,
        r4: None,
        rh: None,
        d1: expected_distortion(j, X, x1, src.d1())?,
        d2: expected_distortion(j, X, x2, src.d2())?,
        d3: None,
    })
}

/// Triangular network: adds `R3 >= I(X, Y; V | U, Z)`.
pub fn eval_triangular_point(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    let net = Network::Triangular;
    let p_u = need(&aux.p_u, "p_u", net)?;
    let p_x1 = need(&aux.p_xhat1, "p_xhat1", net)?;
    let p_v = need(&aux.p_v, "p_v", net)?;
    let g2 = need(&aux.g2, "g2", net)?;
    check_budget(net, src, p_u.output_size(), p_v.output_size(), None)?;
    let mut b = Builder::new(src);
    let u = b.channel("p_u", &[X, Y], p_u)?;
    let x1 = b.channel("p_xhat1", &[X, Y, u], p_x1)?;
    let v = b.channel("p_v", &[X, Y, u], p_v)?;
    let x2 = b.map("g2", &[u, v, Z], g2)?;
    b.check()?;
    let j = &b.joint;
    Ok(RegionPoint {
        r1: cmi(j, &[X], &[x1, u], &[Y])?,
        r2: cmi(j, &[u], &[X, Y], &[Z])?,
        r3: Some(cmi(j, &[X, Y], &[v], &[u, Z])?),
        r4: None,
        rh: None,
        d1: expected_distortion(j, X, x1, src.d1())?,
        d2: expected_distortion(j, X, x2, src.d2())?,
        d3: None,
    })
}

/// Two-way cascade: node 2 describes `Z` back at rate `R3 >= I(U2; Z | U1, X, Y)`.
pub fn eval_two_way_cascade_point(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    let net = Network::TwoWayCascade;
    let p_u = need(&aux.p_u, "p_u", net)?;
    let p_x1 = need(&aux.p_xhat1, "p_xhat1", net)?;
    let p_u2 = need(&aux.p_u2, "p_u2", net)?;
    let g2 = need(&aux.g2, "g2", net)?;
    let g3 = need(&aux.g3, "g3", net)?;
    let d3 = need_d3(src, net)?;
    check_budget(net, src, p_u.output_size(), 1, Some(p_u2.output_size()))?;
    let mut b = Builder::new(src);
    let u1 = b.channel("p_u", &[X, Y], p_u)?;
    let x1 = b.channel("p_xhat1", &[X, Y, u1], p_x1)?;
    let u2 = b.channel("p_u2", &[Z, u1], p_u2)?;
    let x2 = b.map("g2", &[u1, Z], g2)?;
    let zh = b.map("g3", &[u1, u2, X, Y], g3)?;
    b.check()?;
    let j = &b.joint;
    Ok(RegionPoint {
        r1: cmi(j, &[X], &[x1, u1], &[Y])?,
        r2: cmi(j, &[u1], &[X, Y], &[Z])?,
        r3: Some(cmi(j, &[u2], &[Z], &[u1, X, Y])?),
        r4: None,
        rh: None,
        d1: expected_distortion(j, X, x1, src.d1())?,
        d2: expected_distortion(j, X, x2, src.d2())?,
        d3: Some(expected_distortion(j, Z, zh, d3)?),
    })
}

/// Two-way triangular: forward rates of the triangular network plus the
/// backward rate `R4 >= I(U2; Z | U1, V, X, Y)`.
pub fn eval_two_way_triangular_point(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    let net = Network::TwoWayTriangular;
    let p_u = need(&aux.p_u, "p_u", net)?;
    let p_x1 = need(&aux.p_xhat1, "p_xhat1", net)?;
    let p_v = need(&aux.p_v, "p_v", net)?;
    let p_u2 = need(&aux.p_u2, "p_u2", net)?;
    let g2 = need(&aux.g2, "g2", net)?;
    let g3 = need(&aux.g3, "g3", net)?;
    let d3 = need_d3(src, net)?;
    check_budget(
        net,
        src,
        p_u.output_size(),
        p_v.output_size(),
        Some(p_u2.output_size()),
    )?;
    let mut b = Builder::new(src);
    let u1 = b.channel("p_u", &[X, Y], p_u)?;
    let x1 = b.channel("p_xhat1", &[X, Y, u1], p_x1)?;
    let v = b.channel("p_v", &[X, Y, u1], p_v)?;
    let u2 = b.channel("p_u2", &[Z, u1, v], p_u2)?;
    let x2 = b.map("g2", &[u1, v, Z], g2)?;
    let zh = b.map("g3", &[u1, u2, v, X, Y], g3)?;
    b.check()?;
    let j = &b.joint;
    Ok(RegionPoint {
        r1: cmi(j, &[X], &[x1, u1], &[Y])?,
        r2: cmi(j, &[u1], &[X, Y], &[Z])?,
        r3: Some(cmi(j, &[X, Y], &[v], &[Z, u1])?),
        r4: Some(cmi(j, &[u2], &[Z], &[u1, v, X, Y])?),
        rh: None,
        d1: expected_distortion(j, X, x1, src.d1())?,
        d2: expected_distortion(j, X, x2, src.d2())?,
        d3: Some(expected_distortion(j, Z, zh, d3)?),
    })
}

/// Triangular network with a helper that observes `Y` and broadcasts to all
/// nodes at rate `Rh >= I(Uh; Y | Z)`. `p_v` carries the second auxiliary.
pub fn eval_helper_triangular_point(src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    let net = Network::Helper;
    let p_uh = need(&aux.p_uh, "p_uh", net)?;
    let p_u = need(&aux.p_u, "p_u", net)?;
    let p_x1 = need(&aux.p_xhat1, "p_xhat1", net)?;
    let p_v = need(&aux.p_v, "p_v", net)?;
    let g2 = need(&aux.g2, "g2", net)?;
    let mut b = Builder::new(src);
    let uh = b.channel("p_uh", &[Y], p_uh)?;
    let u1 = b.channel("p_u", &[X, Y, uh], p_u)?;
    let x1 = b.channel("p_xhat1", &[X, Y, u1, uh], p_x1)?;
    let u2 = b.channel("p_v", &[X, Y, u1, uh], p_v)?;
    let x2 = b.map("g2", &[u1, u2, uh, Z], g2)?;
    b.check()?;
    let j = &b.joint;
    Ok(RegionPoint {
        r1: cmi(j, &[X], &[x1, u1], &[Y, uh])?,
        r2: cmi(j, &[u1], &[X, Y], &[Z, uh])?,
        r3: Some(cmi(j, &[X, Y], &[u2], &[u1, uh, Z])?),
        r4: None,
        rh: Some(cmi(j, &[uh], &[Y], &[Z])?),
        d1: expected_distortion(j, X, x1, src.d1())?,
        d2: expected_distortion(j, X, x2, src.d2())?,
        d3: None,
    })
}

/// Dispatch on the network.
pub fn eval_point(net: Network, src: &SourceSpec, aux: &AuxiliarySystem) -> Result<RegionPoint> {
    match net {
        Network::Cascade => eval_cascade_point(src, aux),
        Network::Triangular => eval_triangular_point(src, aux),
        Network::TwoWayCascade => eval_two_way_cascade_point(src, aux),
        Network::TwoWayTriangular => eval_two_way_triangular_point(src, aux),
        Network::Helper => eval_helper_triangular_point(src, aux),
    }
}
