//! Result tables and their CSV form.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    /// A number, or an empty cell when the value does not exist.
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub status: Status,
    pub message: String,
}

/// Rectangular table. The status and message columns are implicit and come
/// last.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Lines written before the header, each prefixed with `# `.
    pub provenance: Vec<String>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>, provenance: Vec<String>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
            provenance,
        }
    }

    /// Append a row. Non-finite numbers are not representable, so a row
    /// carrying one is downgraded to an error with the cell left empty.
    pub fn push(&mut self, mut cells: Vec<Cell>, mut status: Status, mut message: String) {
        assert_eq!(cells.len(), self.columns.len(), "row width must match the header");
        for (c, name) in cells.iter_mut().zip(&self.columns) {
            if let Cell::Num(v) = c {
                if !v.is_finite() {
                    *c = Cell::Empty;
                    status = Status::Error;
                    message = format!("non-finite value in column {name}");
                }
            }
        }
        self.rows.push(Row { cells, status, message });
    }

    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Error)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in &self.provenance {
            s += &format!("# {p}\n");
        }
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| quote(c))
            .chain(["status".to_string(), "message".to_string()])
            .collect();
        s += &header.join(",");
        s.push('\n');
        for r in &self.rows {
            let mut cells: Vec<String> = r.cells.iter().map(render).collect();
            cells.push(r.status.as_str().to_string());
            cells.push(quote(&r.message));
            s += &cells.join(",");
            s.push('\n');
        }
        s
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(t) => quote(t),
        Cell::Empty => String::new(),
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Twelve significant digits, trailing zeros dropped. Plain notation for
/// moderate magnitudes, scientific otherwise.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let plain = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&plain).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

/// Write `table` to `path` through a temporary file in the same directory,
/// so the target is either absent or complete.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir.display(), e))?;
    tmp.write_all(table.to_csv().as_bytes())
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::io(path.display(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path.display(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(format_number(-1234.5), "-1234.5");
        assert_eq!(format_number(1e15), "1e15");
        assert_eq!(format_number(-0.0), "0");
        for v in [std::f64::consts::PI, 1e-3 / 7.0, 12345.678901234, 9.99999999999951] {
            let back: f64 = format_number(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 5e-12, "{v} -> {back}");
        }
    }

    #[test]
    fn non_finite_becomes_error() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()], vec![]);
        t.push(vec![Cell::Num(1.0), Cell::Num(f64::INFINITY)], Status::Ok, String::new());
        assert!(t.has_errors());
        let csv = t.to_csv();
        assert!(!csv.contains("inf") && !csv.contains("NaN"));
        assert!(csv.contains("1,,error,non-finite value in column b"));
    }

    #[test]
    fn quoting_and_header_only() {
        let mut t = ResultTable::new(vec!["x".into()], vec!["seed = 3".into()]);
        assert_eq!(t.to_csv(), "# seed = 3\nx,status,message\n");
        t.push(vec![Cell::Text("a,b".into())], Status::Infeasible, "say \"no\"".into());
        assert!(t.to_csv().ends_with("\"a,b\",infeasible,\"say \"\"no\"\"\"\n"));
    }
}
