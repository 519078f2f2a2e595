//! Run configuration: a flat `section.key = value` text file, overridden by
//! command-line flags. Every key has exactly one flag, named after the last
//! segment of the key with underscores turned into dashes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, Origin, Result};
use crate::sweep::SweepAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn k(key: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec { key, kind, help }
}

/// Every key the configuration understands, apart from `command` and
/// `sweep`.
pub const KEYS: &[KeySpec] = &[
    k("seed", Kind::Int, "random seed (default 0)"),
    k("out", Kind::Text, "CSV output path (default: standard output)"),
    k("source.var_a", Kind::Float, "variance of A"),
    k("source.var_b", Kind::Float, "variance of B"),
    k("source.var_z", Kind::Float, "variance of Z"),
    k("source.file", Kind::Text, "discrete source file"),
    k("source.aux", Kind::Text, "auxiliary system file"),
    k("query.d1", Kind::Float, "distortion at node 1"),
    k("query.d2", Kind::Float, "distortion at node 2"),
    k("query.d3", Kind::Float, "distortion of Z at node 1"),
    k("query.dz1", Kind::Float, "backward distortion at node 1"),
    k("query.dz2", Kind::Float, "backward distortion at node 0"),
    k("query.r2", Kind::Float, "rate of the second hop"),
    k("query.r3", Kind::Float, "rate R3"),
    k("query.r4", Kind::Float, "rate R4"),
    k("solver.network", Kind::Text, "network for discrete-eval (default cascade)"),
    k("solver.u_size", Kind::Int, "alphabet size of U (default |X||Y|)"),
    k("solver.restarts", Kind::Int, "random starts (default 16)"),
    k("solver.max_iters", Kind::Int, "steps per penalty round (default 400)"),
    k("solver.tol", Kind::Float, "stopping tolerance (default 1e-6)"),
    k("sim.n", Kind::Int, "blocklength"),
    k("sim.epsilon", Kind::Float, "typicality slack (default 0.4)"),
    k("sim.delta", Kind::Float, "rate slack in bits (default 0.15)"),
    k("sim.trials", Kind::Int, "trials per point (default 1000)"),
    k("kaspi.instances", Kind::Int, "random instances per point (default 200)"),
    k("kaspi.alphabet", Kind::Int, "largest alphabet size (default 3)"),
];

pub fn key_spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|s| s.key == key)
}

/// Flag name of a key, without the leading dashes.
pub fn flag_name(key: &str) -> String {
    key.rsplit('.').next().unwrap().replace('_', "-")
}

fn short_name(key: &str) -> &str {
    key.rsplit('.').next().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandKind {
    GaussianCascade,
    GaussianTriangular,
    GaussianTwoWay,
    GaussianExtended,
    DiscreteEval,
    DiscreteSearch,
    Simulate,
    KaspiCheck,
}

const GAUSS: [&str; 3] = ["source.var_a", "source.var_b", "source.var_z"];

impl CommandKind {
    pub const ALL: [CommandKind; 8] = [
        CommandKind::GaussianCascade,
        CommandKind::GaussianTriangular,
        CommandKind::GaussianTwoWay,
        CommandKind::GaussianExtended,
        CommandKind::DiscreteEval,
        CommandKind::DiscreteSearch,
        CommandKind::Simulate,
        CommandKind::KaspiCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::GaussianCascade => "gaussian-cascade",
            CommandKind::GaussianTriangular => "gaussian-triangular",
            CommandKind::GaussianTwoWay => "gaussian-two-way",
            CommandKind::GaussianExtended => "gaussian-extended",
            CommandKind::DiscreteEval => "discrete-eval",
            CommandKind::DiscreteSearch => "discrete-search",
            CommandKind::Simulate => "simulate",
            CommandKind::KaspiCheck => "kaspi-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Keys that must be set.
    pub fn required(self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = match self {
            CommandKind::GaussianCascade => vec!["query.d1", "query.d2", "query.r2"],
            CommandKind::GaussianTriangular => vec!["query.d1", "query.d2", "query.r2", "query.r3"],
            CommandKind::GaussianTwoWay => {
                vec!["query.d1", "query.d2", "query.d3", "query.r2", "query.r3", "query.r4"]
            }
            CommandKind::GaussianExtended => vec!["query.dz1", "query.dz2", "query.r3", "query.r4"],
            CommandKind::DiscreteEval => vec!["source.file", "source.aux"],
            CommandKind::DiscreteSearch => vec!["source.file", "query.d1", "query.d2", "query.r2"],
            CommandKind::Simulate => vec!["source.file", "source.aux", "sim.n"],
            CommandKind::KaspiCheck => vec![],
        };
        if self.is_gaussian() {
            v.splice(0..0, GAUSS);
        }
        v
    }

    /// Keys that may be set, beyond the required ones and `seed`/`out`.
    pub fn optional(self) -> Vec<&'static str> {
        match self {
            CommandKind::DiscreteEval => vec!["solver.network"],
            CommandKind::DiscreteSearch => {
                vec!["solver.u_size", "solver.restarts", "solver.max_iters", "solver.tol"]
            }
            CommandKind::Simulate => vec!["sim.epsilon", "sim.delta", "sim.trials"],
            CommandKind::KaspiCheck => vec!["kaspi.instances", "kaspi.alphabet"],
            _ => vec![],
        }
    }

    fn is_gaussian(self) -> bool {
        matches!(
            self,
            CommandKind::GaussianCascade
                | CommandKind::GaussianTriangular
                | CommandKind::GaussianTwoWay
                | CommandKind::GaussianExtended
        )
    }

    /// Numeric keys, in column order. These can be swept and are echoed in
    /// every output row.
    pub fn numeric_keys(self) -> Vec<&'static str> {
        self.required()
            .into_iter()
            .chain(self.optional())
            .filter(|k| key_spec(k).unwrap().kind != Kind::Text)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Value {
    fn parse(spec: &KeySpec, raw: &str, origin: &Origin) -> Result<Self> {
        let raw = raw.trim();
        let bad = |what: &str| CliError::config(spec.key, origin.clone(), format!("malformed {what} '{raw}'"));
        match spec.kind {
            Kind::Float => raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Value::Float)
                .ok_or_else(|| bad("number")),
            Kind::Int => raw.parse::<u64>().map(Value::Int).map_err(|_| bad("integer")),
            Kind::Text => {
                if raw.is_empty() {
                    Err(bad("value"))
                } else {
                    Ok(Value::Text(raw.to_string()))
                }
            }
        }
    }

    fn canonical(&self) -> String {
        match self {
            Value::Float(v) => format!("{v:?}"),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            Value::Text(_) => None,
        }
    }
}

/// Settings collected from a file and flags, before validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    command: Option<(String, Origin)>,
    values: BTreeMap<&'static str, (Value, Origin)>,
    sweeps: Vec<(SweepAxis, Origin)>,
}

impl RawConfig {
    /// Parse the text format. Later lines override earlier ones, except
    /// `sweep`, which may repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let origin = Origin::Line(i + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(line, origin, "expected 'key = value'"));
            };
            raw.set(key.trim(), value.trim(), origin)?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<()> {
        match key {
            "command" => self.command = Some((value.to_string(), origin)),
            "sweep" => {
                let axis = SweepAxis::parse(value, origin.clone())?;
                self.sweeps.push((axis, origin));
            }
            _ => {
                let spec = key_spec(key).ok_or_else(|| CliError::config(key, origin.clone(), "unknown key"))?;
                let v = Value::parse(spec, value, &origin)?;
                self.values.insert(spec.key, (v, origin));
            }
        }
        Ok(())
    }

    /// Apply flag overrides. Sweeps given as flags replace those of the
    /// file.
    pub fn override_with(&mut self, flags: RawConfig) {
        if flags.command.is_some() {
            self.command = flags.command;
        }
        self.values.extend(flags.values);
        if !flags.sweeps.is_empty() {
            self.sweeps = flags.sweeps;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub sweeps: Vec<SweepAxis>,
    /// Validated values of the command's keys, by full key name.
    pub values: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    /// Read an optional file, apply `flags` on top, and validate.
    pub fn load(path: Option<&Path>, flags: RawConfig) -> Result<Self> {
        let mut raw = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        raw.override_with(flags);
        Self::validate(raw)
    }

    pub fn validate(raw: RawConfig) -> Result<Self> {
        let (name, origin) = raw
            .command
            .ok_or_else(|| CliError::config("command", Origin::Config, "no command given"))?;
        let command = CommandKind::parse(&name).ok_or_else(|| {
            let all: Vec<_> = CommandKind::ALL.iter().map(|c| c.name()).collect();
            CliError::config("command", origin, format!("unknown command '{name}', expected one of {}", all.join(", ")))
        })?;
        let required = command.required();
        let optional = command.optional();
        let mut values = BTreeMap::new();
        let mut seed = 0;
        let mut out = None;
        for (key, (v, origin)) in raw.values {
            match key {
                "seed" => seed = if let Value::Int(s) = v { s } else { unreachable!() },
                "out" => out = Some(PathBuf::from(v.canonical())),
                _ if required.contains(&key) || optional.contains(&key) => {
                    values.insert(key, v);
                }
                _ => {
                    return Err(CliError::config(
                        key,
                        origin,
                        format!("not used by {}", command.name()),
                    ))
                }
            }
        }
        let numeric = command.numeric_keys();
        let mut seen = Vec::new();
        for (axis, origin) in &raw.sweeps {
            if !numeric.iter().any(|k| short_name(k) == axis.param) {
                let names: Vec<_> = numeric.iter().map(|k| short_name(k)).collect();
                return Err(CliError::config(
                    "sweep",
                    origin.clone(),
                    format!("'{}' is not a numeric parameter of {} (choose from {})", axis.param, command.name(), names.join(", ")),
                ));
            }
            if seen.contains(&axis.param) {
                return Err(CliError::config("sweep", origin.clone(), format!("'{}' is swept twice", axis.param)));
            }
            let key = numeric.iter().find(|k| short_name(k) == axis.param).unwrap();
            if key_spec(key).unwrap().kind == Kind::Int
                && axis.values().iter().any(|v| (v - v.round()).abs() > 1e-9 || *v < 0.0)
            {
                return Err(CliError::config("sweep", origin.clone(), format!("'{}' takes nonnegative integers", axis.param)));
            }
            seen.push(axis.param.clone());
        }
        for key in &required {
            if !values.contains_key(key) && !seen.iter().any(|p| p == short_name(key)) {
                return Err(CliError::config(*key, Origin::Config, format!("missing, {} needs --{}", command.name(), flag_name(key))));
            }
        }
        Ok(RunConfig {
            command,
            seed,
            out,
            sweeps: raw.sweeps.into_iter().map(|(a, _)| a).collect(),
            values,
        })
    }

    /// Canonical text of every field, one `key = value` line each.
    pub fn canonical(&self) -> String {
        let mut s = format!("command = {}\nseed = {}\n", self.command.name(), self.seed);
        if let Some(out) = &self.out {
            s += &format!("out = {}\n", out.display());
        }
        for (k, v) in &self.values {
            s += &format!("{k} = {}\n", v.canonical());
        }
        for a in &self.sweeps {
            s += &format!("sweep = {}\n", a.canonical());
        }
        s
    }

    /// SHA-256 of the canonical text, in hex.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Key for a short sweep name.
    pub fn resolve(&self, param: &str) -> &'static str {
        self.command.numeric_keys().into_iter().find(|k| short_name(k) == param).unwrap()
    }
}
