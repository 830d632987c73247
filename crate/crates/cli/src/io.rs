use std::fmt;
use std::path::Path;

use jetg_core::algebroid::AlgebroidError;
use jetg_core::finite_groupoid::GroupoidError;
use jetg_core::flows::FlowError;
use jetg_core::json::{FromJson, JsonError};
use jetg_core::multijet::JetError;
use jetg_core::scalar::{parse_rational, Q};
use serde_json::Value;

/// Malformed input exits with 2, domain errors with 1.
#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Domain(_) => 1,
            Self::Malformed(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed(m) => write!(f, "malformed input: {m}"),
            Self::Domain(m) => write!(f, "{m}"),
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        Self::Malformed(e.0)
    }
}

macro_rules! domain {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Domain(e.to_string())
            }
        }
    )*};
}

domain!(JetError, GroupoidError, AlgebroidError, FlowError);

pub type CliResult<T> = Result<T, CliError>;

/// Inline JSON when the argument starts with `{` or `[`, else a file path.
pub fn load_value(arg: &str) -> CliResult<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| CliError::Malformed(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{arg}: {e}")))
}

pub fn load<T: FromJson>(arg: &str) -> CliResult<T> {
    Ok(T::from_json(&load_value(arg)?)?)
}

pub fn kind_of(v: &Value) -> CliResult<&str> {
    v.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Malformed("missing \"kind\" field".into()))
}

/// Comma-separated rationals, `p/q` or integers.
pub fn exact_point(s: &str) -> CliResult<Vec<Q>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|c| parse_rational(c).ok_or_else(|| CliError::Malformed(format!("bad rational {c:?}"))))
        .collect()
}

/// A decimal or `p/q` number.
pub fn real(s: &str) -> CliResult<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    parse_rational(s)
        .map(|q| jetg_core::scalar::Scalar::to_float(&q))
        .ok_or_else(|| CliError::Malformed(format!("bad number {s:?}")))
}

pub fn float_point(s: &str) -> CliResult<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(real).collect()
}

/// Writes `text` to `out` or stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
