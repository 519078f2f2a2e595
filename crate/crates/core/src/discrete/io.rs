//! Text form of sources and auxiliary systems.
//!
//! A source is a `pmf` section over `(X, Y, Z)` plus `distortion d1`,
//! `distortion d2` and optionally `distortion d3`. An auxiliary system is a
//! set of `cond` sections named `p_u`, `p_xhat1`, `p_v`, `p_u2`, `p_uh` and
//! `map` sections named `g2`, `g3`. Both may share one file; each reader
//! skips the other's sections but rejects names it does not know.

use super::model::{AuxiliarySystem, DistortionTable, SourceSpec};
use crate::error::{Error, Result};
use crate::prob::{parse_sections, Section};
use crate::prob::text::{write_cond, write_distortion, write_map, write_pmf};

const COND_NAMES: [&str; 5] = ["p_u", "p_xhat1", "p_v", "p_u2", "p_uh"];
const MAP_NAMES: [&str; 2] = ["g2", "g3"];

pub fn write_source(src: &SourceSpec) -> String {
    let mut s = write_pmf(src.pmf());
    let mut dist = |name: &str, d: &DistortionTable| {
        s.push_str(&write_distortion(name, d.rows(), d.cols(), d.values()));
    };
    dist("d1", src.d1());
    dist("d2", src.d2());
    if let Some(d3) = src.d3() {
        dist("d3", d3);
    }
    s
}

pub fn read_source(text: &str) -> Result<SourceSpec> {
    let mut pmf = None;
    let (mut d1, mut d2, mut d3) = (None, None, None);
    for sec in parse_sections(text)? {
        match sec {
            Section::Pmf(p) => {
                if pmf.replace(p).is_some() {
                    return Err(Error::invalid("more than one pmf section"));
                }
            }
            Section::Distortion {
                name,
                rows,
                cols,
                values,
            } => {
                let slot = match name.as_str() {
                    "d1" => &mut d1,
                    "d2" => &mut d2,
                    "d3" => &mut d3,
                    other => {
                        return Err(Error::invalid(format!(
                            "unknown distortion '{other}', expected d1, d2 or d3"
                        )))
                    }
                };
                *slot = Some(DistortionTable::new(rows, cols, values)?);
            }
            Section::Cond { name, .. } => known(&name, &COND_NAMES, "cond")?,
            Section::Map { name, .. } => known(&name, &MAP_NAMES, "map")?,
        }
    }
    let pmf = pmf.ok_or_else(|| Error::invalid("source needs a pmf section"))?;
    let d1 = d1.ok_or_else(|| Error::invalid("source needs distortion d1"))?;
    let d2 = d2.ok_or_else(|| Error::invalid("source needs distortion d2"))?;
    SourceSpec::new(pmf, d1, d2, d3)
}

fn known(name: &str, names: &[&str], kind: &str) -> Result<()> {
    if names.contains(&name) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "unknown {kind} section '{name}', expected one of {}",
            names.join(", ")
        )))
    }
}

pub fn write_aux(aux: &AuxiliarySystem) -> String {
    let mut s = String::new();
    let conds = [
        ("p_u", &aux.p_u),
        ("p_xhat1", &aux.p_xhat1),
        ("p_v", &aux.p_v),
        ("p_u2", &aux.p_u2),
        ("p_uh", &aux.p_uh),
    ];
    for (name, c) in conds {
        if let Some(c) = c {
            s.push_str(&write_cond(name, c));
        }
    }
    for (name, m) in [("g2", &aux.g2), ("g3", &aux.g3)] {
        if let Some(m) = m {
            s.push_str(&write_map(name, m));
        }
    }
    s
}

pub fn read_aux(text: &str) -> Result<AuxiliarySystem> {
    let mut aux = AuxiliarySystem::default();
    for sec in parse_sections(text)? {
        match sec {
            Section::Cond { name, pmf } => {
                let slot = match name.as_str() {
                    "p_u" => &mut aux.p_u,
                    "p_xhat1" => &mut aux.p_xhat1,
                    "p_v" => &mut aux.p_v,
                    "p_u2" => &mut aux.p_u2,
                    "p_uh" => &mut aux.p_uh,
                    other => {
                        known(other, &COND_NAMES, "cond")?;
                        continue;
                    }
                };
                *slot = Some(pmf);
            }
            Section::Map { name, map } => {
                let slot = match name.as_str() {
                    "g2" => &mut aux.g2,
                    "g3" => &mut aux.g3,
                    other => {
                        known(other, &MAP_NAMES, "map")?;
                        continue;
                    }
                };
                *slot = Some(map);
            }
            Section::Pmf(_) | Section::Distortion { .. } => {}
        }
    }
    Ok(aux)
}
