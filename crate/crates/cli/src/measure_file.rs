//! Measure files:
//!
//! ```json
//! {"group": "finset" | "integer" | "cyclic", "n": 5,
//!  "atoms": [{"g": [1, 3], "w": 0.5}, {"g": [2], "w": 0.5}]}
//! ```
//!
//! `g` is a list of naturals for `finset` and an integer otherwise; `n` is
//! required for `cyclic` only. Weights must sum to 1 within 1e-9.

use std::path::Path;

use entgap::{Cyclic, FinSet, FinSetGroup, Integers, Measure};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const LOAD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    group: String,
    #[serde(default)]
    n: Option<u64>,
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    g: Value,
    w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMeasure {
    FinSet(Measure<FinSetGroup>),
    Integer(Measure<Integers>),
    Cyclic(Measure<Cyclic>),
}

impl LoadedMeasure {
    pub fn group_name(&self) -> &'static str {
        match self {
            LoadedMeasure::FinSet(_) => "finset",
            LoadedMeasure::Integer(_) => "integer",
            LoadedMeasure::Cyclic(_) => "cyclic",
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(format!("measure file: {}", msg.into()))
}

fn as_int(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(format!("expected an integer element, got {v}")))
}

pub fn parse_measure(text: &str) -> Result<LoadedMeasure> {
    let raw: RawMeasure = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let weights = raw.atoms.iter().map(|a| a.w);
    match raw.group.as_str() {
        "finset" => {
            let elems = raw
                .atoms
                .iter()
                .map(|a| {
                    let list = a
                        .g
                        .as_array()
                        .ok_or_else(|| bad(format!("expected a list of naturals, got {}", a.g)))?;
                    let nums = list
                        .iter()
                        .map(|v| {
                            v.as_u64()
                                .and_then(|n| u32::try_from(n).ok())
                                .ok_or_else(|| bad(format!("bad natural {v}")))
                        })
                        .collect::<Result<Vec<u32>>>()?;
                    FinSet::new(nums).map_err(|e| bad(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = Measure::with_tolerance(FinSetGroup, elems.into_iter().zip(weights).collect(), LOAD_TOLERANCE)
                .map_err(|e| bad(e.to_string()))?;
            Ok(LoadedMeasure::FinSet(m))
        }
        "integer" => {
            let elems = raw.atoms.iter().map(|a| as_int(&a.g)).collect::<Result<Vec<_>>>()?;
            let m = Measure::with_tolerance(Integers, elems.into_iter().zip(weights).collect(), LOAD_TOLERANCE)
                .map_err(|e| bad(e.to_string()))?;
            Ok(LoadedMeasure::Integer(m))
        }
        "cyclic" => {
            let n = raw.n.ok_or_else(|| bad("cyclic group needs \"n\""))?;
            let group = Cyclic::new(n).map_err(|e| bad(e.to_string()))?;
            let elems = raw
                .atoms
                .iter()
                .map(|a| as_int(&a.g).map(|k| group.reduce(k)))
                .collect::<Result<Vec<_>>>()?;
            let m = Measure::with_tolerance(group, elems.into_iter().zip(weights).collect(), LOAD_TOLERANCE)
                .map_err(|e| bad(e.to_string()))?;
            Ok(LoadedMeasure::Cyclic(m))
        }
        other => Err(bad(format!("unknown group {other:?}"))),
    }
}

pub fn load_measure(path: &Path) -> Result<LoadedMeasure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_measure(&text)
}
