//! Strict parsing of the JSON run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::measures::{Potential, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Extremal,
    Oracle,
    Bounds,
    Perturb,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solve" => Ok(Mode::Solve),
            "extremal" => Ok(Mode::Extremal),
            "oracle" => Ok(Mode::Oracle),
            "bounds" => Ok(Mode::Bounds),
            "perturb" => Ok(Mode::Perturb),
            other => Err(Error::Parameter(format!(
                "mode: expected one of solve, extremal, oracle, bounds, perturb; got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Solve => "solve",
            Mode::Extremal => "extremal",
            Mode::Oracle => "oracle",
            Mode::Bounds => "bounds",
            Mode::Perturb => "perturb",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub mode: Mode,
    pub weight: Weight,
    pub gamma: f64,
    pub potential: Option<Potential>,
    pub direction: Option<Potential>,
    /// Path parameter for `perturb`; defaults to just above its lower bound.
    pub alpha: Option<f64>,
    pub n_max: usize,
}

fn usage(key: &str, msg: impl fmt::Display) -> Error {
    Error::Parameter(format!("{key}: {msg}"))
}

fn number(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| usage(key, "expected a number"))
}

fn integer(key: &str, v: &Value) -> Result<u64> {
    v.as_u64().ok_or_else(|| usage(key, "expected a nonnegative integer"))
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| usage(key, "expected a string"))
}

fn potential(key: &str, v: &Value) -> Result<Potential> {
    serde_json::from_value(v.clone()).map_err(|e| usage(key, e))
}

/// Parses a configuration document. Unknown keys, wrong types and values out
/// of range are rejected with a message naming the key.
pub fn parse_config(text: &str) -> Result<(RunRequest, SolverConfig)> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parameter(format!("config is not valid JSON: {e}")))?;
    let map: &Map<String, Value> = doc
        .as_object()
        .ok_or_else(|| Error::Parameter("config must be a JSON object".into()))?;

    let mut cfg = SolverConfig::default();
    let mut mode = None;
    let mut weight = None;
    let mut gamma = None;
    let mut pot = None;
    let mut direction = None;
    let mut alpha = None;
    let mut n_max = 0usize;
    for (key, v) in map {
        let k = key.as_str();
        match k {
            "mode" => mode = Some(Mode::from_str(string(k, v)?)?),
            "weight" => {
                weight = Some(Weight::from_str(string(k, v)?).map_err(|e| usage(k, e))?)
            }
            "gamma" => {
                let g = number(k, v)?;
                if !(g >= 1.0) {
                    return Err(usage(k, format!("admissible range is γ >= 1, got {g}")));
                }
                gamma = Some(g);
            }
            "potential" => pot = Some(potential(k, v)?),
            "direction" => direction = Some(potential(k, v)?),
            "alpha" => alpha = Some(number(k, v)?),
            "n_max" => {
                n_max = integer(k, v)? as usize;
                if n_max > 32 {
                    return Err(usage(k, "must be <= 32"));
                }
            }
            "grid_n" => cfg.grid_n = integer(k, v)? as usize,
            "tol_eigen" => cfg.tol_eigen = number(k, v)?,
            "tol_outer" => cfg.tol_outer = number(k, v)?,
            "tol_res" => cfg.tol_res = number(k, v)?,
            "max_iter" => cfg.max_iter = integer(k, v)? as usize,
            "damping" => cfg.damping = number(k, v)?,
            "k_atoms" => cfg.k_atoms = integer(k, v)? as usize,
            "seed" => cfg.seed = integer(k, v)?,
            "pos_tol" => cfg.pos_tol = number(k, v)?,
            "oracle_cells" => cfg.oracle_cells = integer(k, v)? as usize,
            "grid_points" => cfg.grid_points = integer(k, v)? as usize,
            "output_dir" => cfg.output_dir = PathBuf::from(string(k, v)?),
            _ => return Err(usage(k, "unknown key")),
        }
    }
    cfg.validate()?;
    let request = RunRequest {
        mode: mode.ok_or_else(|| usage("mode", "required"))?,
        weight: weight.ok_or_else(|| usage("weight", "required"))?,
        gamma: gamma.ok_or_else(|| usage("gamma", "required"))?,
        potential: pot,
        direction,
        alpha,
        n_max,
    };
    validate_request(&request)?;
    Ok((request, cfg))
}

/// Mode-dependent checks, also applied after command-line overrides.
pub fn validate_request(req: &RunRequest) -> Result<()> {
    if req.gamma > 1.0 {
        for (key, p) in [("potential", &req.potential), ("direction", &req.direction)] {
            if req.mode == Mode::Perturb && p.as_ref().is_some_and(|p| p.has_atoms()) {
                return Err(usage(key, "atoms are only admissible for gamma = 1"));
            }
        }
    }
    if req.direction.is_some() && req.mode != Mode::Perturb {
        return Err(usage("direction", "only used by mode `perturb`"));
    }
    if req.alpha.is_some() && req.mode != Mode::Perturb {
        return Err(usage("alpha", "only used by mode `perturb`"));
    }
    if req.potential.is_some() && matches!(req.mode, Mode::Extremal | Mode::Oracle) {
        return Err(usage("potential", format!("not used by mode `{}`", req.mode)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let (req, cfg) =
            parse_config(r#"{"mode":"solve","weight":"const:1","gamma":1,"n_max":0}"#).unwrap();
        assert_eq!(req.mode, Mode::Solve);
        assert_eq!(cfg, SolverConfig::default());
    }

    #[test]
    fn rejects_small_gamma_with_range() {
        let err = parse_config(r#"{"mode":"solve","weight":"const:1","gamma":0.5}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma") && msg.contains(">= 1"), "{msg}");
    }

    #[test]
    fn rejects_unknown_keys_and_types() {
        let err = parse_config(r#"{"mode":"solve","weight":"const:1","gamma":1,"grid":8}"#).unwrap_err();
        assert!(err.to_string().contains("grid"));
        let err = parse_config(r#"{"mode":"solve","weight":"const:1","gamma":1,"grid_n":"8"}"#).unwrap_err();
        assert!(err.to_string().contains("grid_n"));
        let err = parse_config(r#"{"mode":"solve","weight":"const:1","gamma":1,"grid_n":8}"#).unwrap_err();
        assert!(err.to_string().contains("grid_n"));
    }

    #[test]
    fn power_weight_extremal_request() {
        let (req, _) = parse_config(r#"{"weight":"power:1,1","mode":"extremal","gamma":2}"#).unwrap();
        assert_eq!(req.weight, Weight::power(1.0, 1.0).unwrap());
        assert_eq!(req.gamma, 2.0);
    }
}
