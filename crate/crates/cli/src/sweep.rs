//! Sweep axes written as `name:lin|log:min:max:steps`.

use crate::error::{CliError, Origin, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    /// Short parameter name, e.g. `r2`.
    pub param: String,
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn parse(spec: &str, origin: Origin) -> Result<Self> {
        let err = |m: String| CliError::config("sweep", origin.clone(), m);
        let parts: Vec<&str> = spec.trim().split(':').collect();
        if parts.len() != 5 {
            return Err(err(format!("'{spec}' is not of the form name:lin|log:min:max:steps")));
        }
        let spacing = match parts[1] {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            s => return Err(err(format!("spacing must be lin or log, got '{s}'"))),
        };
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("malformed number '{s}' in '{spec}'")))
        };
        let (min, max) = (num(parts[2])?, num(parts[3])?);
        let steps: usize = parts[4]
            .parse()
            .map_err(|_| err(format!("malformed step count '{}' in '{spec}'", parts[4])))?;
        if steps == 0 {
            return Err(err("a sweep needs at least one step".into()));
        }
        if spacing == Spacing::Log && (min <= 0.0 || max <= 0.0) {
            return Err(err(format!("log spacing needs positive bounds in '{spec}'")));
        }
        Ok(SweepAxis {
            param: parts[0].to_string(),
            spacing,
            min,
            max,
            steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Canonical text form, used for hashing.
    pub fn canonical(&self) -> String {
        let sp = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        format!("{}:{sp}:{}:{}:{}", self.param, self.min, self.max, self.steps)
    }
}

/// All points of the Cartesian product, first axis outermost.
pub fn grid(axes: &[SweepAxis]) -> Vec<Vec<(String, f64)>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let vals = axis.values();
        out = out
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((axis.param.clone(), v));
                    q
                })
            })
            .collect();
    }
    out
}
