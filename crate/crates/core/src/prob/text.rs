//! Plain-text serialization of probability tables.
//!
//! A file is a sequence of sections. Each section starts with a header line
//! and ends at `end`, at the next header, or at end of input. `#` starts a
//! comment. Headers:
//!
//! ```text
//! pmf <arity> <size>...
//! cond <name> <n_inputs> <input size>... <output size>
//! map <name> <n_inputs> <input size>... <output size>
//! distortion <name> <rows> <cols>
//! ```
//!
//! `pmf` rows are `<index>... <prob>`, `cond` rows are
//! `<input index>... <output> <prob>`, `map` rows are `<input index>... <output>`
//! and `distortion` rows list one full row of the matrix. Missing `pmf` and
//! `cond` cells are zero; every `map` input must appear exactly once.
//! Probabilities are written with 17 significant digits so that a write and
//! read round trip is exact.

use std::fmt;
use std::str::FromStr;

use super::pmf::{next_tuple, table_len, CondPmf, DeterministicMap, JointPmf};
use crate::error::{Error, Result};

/// One parsed section.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Pmf(JointPmf),
    Cond { name: String, pmf: CondPmf },
    Map { name: String, map: DeterministicMap },
    Distortion {
        name: String,
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    },
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("expected {what}, found '{tok}'")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| perr(line, format!("expected a number, found '{tok}'")))
}

/// Attach a line number to errors raised while building a table.
fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    })
}

enum Header {
    Pmf(Vec<usize>),
    Cond(String, Vec<usize>, usize),
    Map(String, Vec<usize>, usize),
    Distortion(String, usize, usize),
}

fn parse_header(toks: &[&str], line: usize) -> Result<Option<Header>> {
    let counted = |rest: &[&str], extra: usize| -> Result<Vec<usize>> {
        let n = parse_usize(
            rest.first().ok_or_else(|| perr(line, "missing variable count"))?,
            line,
            "a variable count",
        )?;
        if rest.len() != 1 + n + extra {
            return Err(perr(
                line,
                format!("header declares {n} variables but lists {} sizes", rest.len() - 1),
            ));
        }
        rest[1..]
            .iter()
            .map(|t| parse_usize(t, line, "an alphabet size"))
            .collect()
    };
    match toks[0] {
        "pmf" => Ok(Some(Header::Pmf(counted(&toks[1..], 0)?))),
        "cond" | "map" => {
            let name = toks
                .get(1)
                .ok_or_else(|| perr(line, "missing section name"))?
                .to_string();
            let mut sizes = counted(&toks[2..], 1)?;
            let out = sizes.pop().unwrap();
            if toks[0] == "cond" {
                Ok(Some(Header::Cond(name, sizes, out)))
            } else {
                Ok(Some(Header::Map(name, sizes, out)))
            }
        }
        "distortion" => {
            if toks.len() != 4 {
                return Err(perr(line, "distortion header is 'distortion <name> <rows> <cols>'"));
            }
            Ok(Some(Header::Distortion(
                toks[1].to_string(),
                parse_usize(toks[2], line, "a row count")?,
                parse_usize(toks[3], line, "a column count")?,
            )))
        }
        _ => Ok(None),
    }
}

fn index_tuple(toks: &[&str], sizes: &[usize], line: usize) -> Result<usize> {
    let mut flat = 0;
    for (t, &s) in toks.iter().zip(sizes) {
        let i = parse_usize(t, line, "an index")?;
        if i >= s {
            return Err(perr(line, format!("index {i} outside alphabet of size {s}")));
        }
        flat = flat * s + i;
    }
    Ok(flat)
}

struct Pending {
    header: Header,
    header_line: usize,
    rows: Vec<(usize, Vec<String>)>,
}

fn finish(p: Pending) -> Result<Section> {
    let line = p.header_line;
    match p.header {
        Header::Pmf(sizes) => {
            let len = at_line(line, table_len(&sizes))?;
            let mut probs = vec![0.0; len];
            let mut seen = vec![false; len];
            for (ln, row) in &p.rows {
                let toks: Vec<&str> = row.iter().map(String::as_str).collect();
                if toks.len() != sizes.len() + 1 {
                    return Err(perr(*ln, format!("expected {} fields", sizes.len() + 1)));
                }
                let k = index_tuple(&toks[..sizes.len()], &sizes, *ln)?;
                if seen[k] {
                    return Err(perr(*ln, "duplicate cell"));
                }
                seen[k] = true;
                probs[k] = parse_f64(toks[sizes.len()], *ln)?;
            }
            Ok(Section::Pmf(at_line(line, JointPmf::new(sizes, probs))?))
        }
        Header::Cond(name, sizes, out) => {
            let rows = at_line(line, table_len(&sizes))?;
            let mut table = vec![0.0; rows * out];
            let mut seen = vec![false; rows * out];
            let all: Vec<usize> = sizes.iter().copied().chain([out]).collect();
            for (ln, row) in &p.rows {
                let toks: Vec<&str> = row.iter().map(String::as_str).collect();
                if toks.len() != all.len() + 1 {
                    return Err(perr(*ln, format!("expected {} fields", all.len() + 1)));
                }
                let k = index_tuple(&toks[..all.len()], &all, *ln)?;
                if seen[k] {
                    return Err(perr(*ln, "duplicate cell"));
                }
                seen[k] = true;
                table[k] = parse_f64(toks[all.len()], *ln)?;
            }
            let pmf = at_line(line, CondPmf::new(sizes, out, table))?;
            Ok(Section::Cond { name, pmf })
        }
        Header::Map(name, sizes, out) => {
            let rows = at_line(line, table_len(&sizes))?;
            let mut table = vec![usize::MAX; rows];
            for (ln, row) in &p.rows {
                let toks: Vec<&str> = row.iter().map(String::as_str).collect();
                if toks.len() != sizes.len() + 1 {
                    return Err(perr(*ln, format!("expected {} fields", sizes.len() + 1)));
                }
                let k = index_tuple(&toks[..sizes.len()], &sizes, *ln)?;
                if table[k] != usize::MAX {
                    return Err(perr(*ln, "duplicate input"));
                }
                table[k] = parse_usize(toks[sizes.len()], *ln, "an output index")?;
            }
            if table.contains(&usize::MAX) {
                return Err(perr(line, format!("map '{name}' does not cover every input")));
            }
            let map = at_line(line, DeterministicMap::new(sizes, out, table))?;
            Ok(Section::Map { name, map })
        }
        Header::Distortion(name, rows, cols) => {
            if p.rows.len() != rows {
                return Err(perr(line, format!("distortion '{name}' needs {rows} rows")));
            }
            let mut values = Vec::with_capacity(rows * cols);
            for (ln, row) in &p.rows {
                if row.len() != cols {
                    return Err(perr(*ln, format!("expected {cols} values")));
                }
                for t in row {
                    let v = parse_f64(t, *ln)?;
                    if !v.is_finite() || v < 0.0 {
                        return Err(perr(*ln, "distortions must be finite and nonnegative"));
                    }
                    values.push(v);
                }
            }
            Ok(Section::Distortion {
                name,
                rows,
                cols,
                values,
            })
        }
    }
}

/// Parse every section in `text`.
pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut out = Vec::new();
    let mut pending: Option<Pending> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks == ["end"] {
            match pending.take() {
                Some(p) => out.push(finish(p)?),
                None => return Err(perr(line, "'end' outside a section")),
            }
            continue;
        }
        if let Some(header) = parse_header(&toks, line)? {
            if let Some(p) = pending.take() {
                out.push(finish(p)?);
            }
            pending = Some(Pending {
                header,
                header_line: line,
                rows: Vec::new(),
            });
            continue;
        }
        match pending.as_mut() {
            Some(p) => p.rows.push((line, toks.iter().map(|t| t.to_string()).collect())),
            None => return Err(perr(line, format!("unexpected '{}' before any header", toks[0]))),
        }
    }
    if let Some(p) = pending.take() {
        out.push(finish(p)?);
    }
    Ok(out)
}

fn write_tuple(out: &mut String, idx: &[usize]) {
    for i in idx {
        out.push_str(&i.to_string());
        out.push(' ');
    }
}

/// Text of a `pmf` section, including the closing `end`.
pub fn write_pmf(pmf: &JointPmf) -> String {
    let mut s = format!("pmf {}", pmf.arity());
    for n in pmf.sizes() {
        s.push_str(&format!(" {n}"));
    }
    s.push('\n');
    pmf.for_each(|idx, p| {
        write_tuple(&mut s, idx);
        s.push_str(&format!("{p:.16e}\n"));
    });
    s.push_str("end\n");
    s
}

pub fn write_cond(name: &str, pmf: &CondPmf) -> String {
    let sizes = pmf.input_sizes();
    let mut s = format!("cond {name} {}", sizes.len());
    for n in sizes {
        s.push_str(&format!(" {n}"));
    }
    s.push_str(&format!(" {}\n", pmf.output_size()));
    let mut idx = vec![0; sizes.len()];
    for r in 0..pmf.num_rows() {
        for (o, p) in pmf.row_at(r).iter().enumerate() {
            write_tuple(&mut s, &idx);
            s.push_str(&format!("{o} {p:.16e}\n"));
        }
        next_tuple(&mut idx, sizes);
    }
    s.push_str("end\n");
    s
}

pub fn write_map(name: &str, map: &DeterministicMap) -> String {
    let sizes = map.input_sizes();
    let mut s = format!("map {name} {}", sizes.len());
    for n in sizes {
        s.push_str(&format!(" {n}"));
    }
    s.push_str(&format!(" {}\n", map.output_size()));
    let mut idx = vec![0; sizes.len()];
    for &o in map.table() {
        write_tuple(&mut s, &idx);
        s.push_str(&format!("{o}\n"));
        next_tuple(&mut idx, sizes);
    }
    s.push_str("end\n");
    s
}

pub fn write_distortion(name: &str, rows: usize, cols: usize, values: &[f64]) -> String {
    let mut s = format!("distortion {name} {rows} {cols}\n");
    for r in 0..rows {
        let row: Vec<String> = values[r * cols..(r + 1) * cols]
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

impl fmt::Display for JointPmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_pmf(self))
    }
}

impl FromStr for JointPmf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sections = parse_sections(s)?;
        match (sections.len(), sections.pop()) {
            (1, Some(Section::Pmf(p))) => Ok(p),
            _ => Err(perr(1, "expected exactly one pmf section")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_round_trip_is_exact() {
        let p = JointPmf::from_weights(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 7.0]).unwrap();
        let back: JointPmf = p.to_string().parse().unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn missing_cells_default_to_zero() {
        let p: JointPmf = "pmf 2 2 2\n0 0 0.5\n1 1 0.5\n".parse().unwrap();
        assert_eq!(p.prob(&[0, 1]), 0.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = "pmf 1 2\n0 0.5\n0 0.5\n".parse::<JointPmf>().unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                message: "duplicate cell".into()
            }
        );
        let e = "pmf 1 2\n# c\n0 0.5\n1 0.25\n".parse::<JointPmf>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = "pmf 1 2\n2 1.0\n".parse::<JointPmf>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn mixed_sections() {
        let ch = CondPmf::from_rows(vec![2], 3, &[vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]]).unwrap();
        let m = DeterministicMap::from_fn(vec![3, 2], 2, |i| i[0] % 2).unwrap();
        let text = format!(
            "{}{}{}",
            write_cond("u", &ch),
            write_map("g", &m),
            write_distortion("d", 2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
        let secs = parse_sections(&text).unwrap();
        assert_eq!(secs.len(), 3);
        assert_eq!(secs[0], Section::Cond { name: "u".into(), pmf: ch });
        assert_eq!(secs[1], Section::Map { name: "g".into(), map: m });
    }

    #[test]
    fn incomplete_map_is_rejected() {
        let e = parse_sections("map g 1 2 2\n0 1\nend\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }
}
