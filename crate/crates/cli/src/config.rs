//! Config files, flag overrides, state sources and CLI errors.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use steinlab::linalg::{c, C64};
use steinlab::operator_algebra::{DensityOperator, HermitianOperator, MatrixJson};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(steinlab::Error),
    Io(String),
    /// A check ran to completion and failed.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Compute(e) if e.is_input_error() => 2,
            CliError::Compute(_) => 3,
            CliError::Failed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<steinlab::Error> for CliError {
    fn from(e: steinlab::Error) -> Self {
        CliError::Compute(e)
    }
}

pub fn field_error(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("cli::config: field `{field}`: {msg}"))
}

pub fn io_error(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("cli::io: {}: {e}", path.display()))
}

pub fn require<T>(v: Option<T>, field: &str) -> Result<T, CliError> {
    v.ok_or_else(|| field_error(field, "required (flag or config key)"))
}

pub fn check_epsilon(eps: f64, field: &str) -> Result<f64, CliError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(field_error(field, format!("must lie in (0, 1), got {eps}")))
    }
}

/// `n_range` when given, else `n_min..=n_max`.
pub fn n_values(n_range: Option<Vec<usize>>, n_min: Option<usize>, n_max: Option<usize>) -> Result<Vec<usize>, CliError> {
    let ns = match n_range {
        Some(v) => v,
        None => (n_min.unwrap_or(1)..=require(n_max, "n_max")?).collect(),
    };
    if ns.is_empty() {
        return Err(field_error("n_range", "empty"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field_error("n_range", "entries must be positive and strictly ascending"));
    }
    Ok(ns)
}

/// Keys holding input file paths; relative paths in a config file resolve against its directory.
const PATH_KEYS: [&str; 3] = ["rho", "sigma", "pairs"];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub dim_cap: Option<usize>,
    pub values: Map<String, Value>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| field_error("config", format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| field_error("config", format!("{}: {e}", path.display())))?;
    let Value::Object(mut values) = value else {
        return Err(field_error("config", "top level must be a JSON object"));
    };
    let experiment = match values.remove("experiment") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(other) => return Err(field_error("experiment", format!("expected a string, got {other}"))),
    };
    let dim_cap = match values.remove("dim_cap") {
        None => None,
        Some(v) => Some(v.as_u64().filter(|&c| c > 0).ok_or_else(|| field_error("dim_cap", "expected a positive integer"))? as usize),
    };
    let base = path.parent().unwrap_or(Path::new(""));
    for key in PATH_KEYS {
        if let Some(Value::String(p)) = values.get_mut(key) {
            let joined = base.join(&*p);
            *p = joined.to_string_lossy().into_owned();
        }
    }
    Ok(ConfigFile { experiment, dim_cap, values })
}

/// Config values overlaid by the non-null flag values; returns the merged args and
/// the merged JSON (hashed into the run manifest).
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&ConfigFile>) -> Result<(T, Value), CliError> {
    let mut merged = config.map(|c| c.values.clone()).unwrap_or_default();
    if let Value::Object(fl) = serde_json::to_value(flags).map_err(|e| field_error("flags", e))? {
        for (k, v) in fl {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    let value = Value::Object(merged);
    let args = serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let path = e.path().to_string();
        field_error(if path == "." { "config" } else { &path }, e.into_inner())
    })?;
    Ok((args, value))
}

/// A state given as a file path, an inline `{dim, re, im}` object or inline real rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSource {
    Path(PathBuf),
    Matrix(MatrixJson),
    Rows(Vec<Vec<f64>>),
}

impl FromStr for StateSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(StateSource::Path(PathBuf::from(s)))
    }
}

impl StateSource {
    pub fn load(&self, field: &str) -> Result<DensityOperator, CliError> {
        let op = match self {
            StateSource::Path(p) => {
                let text = fs::read_to_string(p).map_err(|e| field_error(field, format!("cannot read {}: {e}", p.display())))?;
                let value: Value = serde_json::from_str(&text).map_err(|e| field_error(field, format!("{}: {e}", p.display())))?;
                let inline: StateSource = serde_json::from_value(value)
                    .map_err(|_| field_error(field, format!("{}: expected {{dim, re, im}} or a list of real rows", p.display())))?;
                if matches!(inline, StateSource::Path(_)) {
                    return Err(field_error(field, format!("{}: file holds a path, not a matrix", p.display())));
                }
                return inline.load(field);
            }
            StateSource::Matrix(m) => HermitianOperator::from_json(m),
            StateSource::Rows(rows) => HermitianOperator::from_real_rows(rows),
        };
        let op = op.map_err(|e| field_error(field, e))?;
        DensityOperator::new(op).map_err(|e| field_error(field, e))
    }
}

/// Complex number given as `RE,IM` (or `RE`) on the command line, or `[re, im]` in a config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "String")]
pub struct ComplexArg {
    pub re: f64,
    pub im: f64,
}

impl ComplexArg {
    pub fn value(self) -> C64 {
        c(self.re, self.im)
    }
}

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
        let bad = || format!("expected RE,IM, got '{s}'");
        let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
        let im = match parts.next() {
            Some(v) => v.map_err(|_| bad())?,
            None => 0.0,
        };
        if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
            return Err(bad());
        }
        Ok(ComplexArg { re, im })
    }
}

impl From<ComplexArg> for String {
    fn from(z: ComplexArg) -> String {
        format!("{},{}", z.re, z.im)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Text(String),
    Pair([f64; 2]),
    Real(f64),
}

impl TryFrom<ComplexRepr> for ComplexArg {
    type Error = String;

    fn try_from(r: ComplexRepr) -> Result<Self, String> {
        match r {
            ComplexRepr::Text(s) => s.parse(),
            ComplexRepr::Pair([re, im]) => Ok(ComplexArg { re, im }),
            ComplexRepr::Real(re) => Ok(ComplexArg { re, im: 0.0 }),
        }
    }
}
