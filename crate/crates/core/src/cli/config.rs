//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::entanglement::Convention;
use crate::model::{Detuning, PhysicalParams};
use crate::sweep::{AxisSpec, SweepParam};

/// Keys accepted in a configuration file or as `--key value` flags.
pub const KEYS: [&str; 18] = [
    "kappa",
    "gamma_m",
    "g",
    "lambda_hop",
    "drive_E",
    "opa_gain",
    "opa_phase",
    "delta_eff",
    "delta0",
    "n_a",
    "n_m",
    "axis1",
    "axis2",
    "out",
    "svg",
    "convention",
    "threads",
    "config",
];

const REQUIRED: [&str; 9] = [
    "kappa",
    "gamma_m",
    "g",
    "lambda_hop",
    "drive_E",
    "opa_gain",
    "opa_phase",
    "n_a",
    "n_m",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "config error: key `{k}`: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Everything a subcommand needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub axes: Vec<AxisSpec>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub convention: Convention,
    pub threads: Option<usize>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::general(format!(
                "line {}: expected `key = value`",
                n + 1
            )));
        };
        let key = key.trim();
        if !KEYS.contains(&key) || key == "config" {
            return Err(ConfigError::at(
                key,
                format!("unknown key on line {}", n + 1),
            ));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(ConfigError::at(
                key,
                format!("duplicate key on line {}", n + 1),
            ));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64, ConfigError> {
    let raw = map
        .get(key)
        .ok_or_else(|| ConfigError::at(key, "missing"))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| ConfigError::at(key, format!("not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(ConfigError::at(key, format!("not finite: {raw:?}")));
    }
    Ok(v)
}

/// Parses `param start stop count` (whitespace or comma separated).
pub fn parse_axis(key: &str, raw: &str) -> Result<AxisSpec, ConfigError> {
    let parts: Vec<&str> = raw
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(ConfigError::at(key, "expected `param start stop count`"));
    };
    let param: SweepParam = name.parse().map_err(|e: String| ConfigError::at(key, e))?;
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ConfigError::at(key, format!("not a finite number: {s:?}")))
    };
    let count: usize = count
        .parse()
        .map_err(|_| ConfigError::at(key, format!("count is not an integer: {count:?}")))?;
    AxisSpec::new(param, num(start)?, num(stop)?, count)
        .map_err(|e| ConfigError::at(key, e.to_string()))
}

impl RunConfig {
    /// Builds a configuration from file entries overlaid with flag values.
    pub fn from_entries(
        file: BTreeMap<String, String>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let mut map = file;
        for (k, v) in overrides {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::at(k, "unknown key"));
            }
            map.insert(k.clone(), v.clone());
        }
        for key in REQUIRED {
            if !map.contains_key(key) {
                return Err(ConfigError::at(key, "missing"));
            }
        }
        let detuning = match (map.contains_key("delta_eff"), map.contains_key("delta0")) {
            (true, false) => Detuning::Effective(number(&map, "delta_eff")?),
            (false, true) => Detuning::Bare(number(&map, "delta0")?),
            (true, true) => {
                return Err(ConfigError::at(
                    "delta0",
                    "delta_eff and delta0 are mutually exclusive",
                ))
            }
            (false, false) => return Err(ConfigError::at("delta_eff", "missing (or give delta0)")),
        };
        let raw = PhysicalParams {
            kappa: number(&map, "kappa")?,
            gamma_m: number(&map, "gamma_m")?,
            g: number(&map, "g")?,
            lambda_hop: number(&map, "lambda_hop")?,
            drive_e: number(&map, "drive_E")?,
            opa_gain: number(&map, "opa_gain")?,
            opa_phase: number(&map, "opa_phase")?,
            detuning,
            n_a: number(&map, "n_a")?,
            n_m: number(&map, "n_m")?,
        };
        let params = raw.validate().map_err(|e| match e {
            crate::Error::InvalidParam { name, .. } => ConfigError::at(name, e.to_string()),
            other => ConfigError::general(other.to_string()),
        })?;

        let mut axes = Vec::new();
        for key in ["axis1", "axis2"] {
            if let Some(raw) = map.get(key) {
                axes.push(parse_axis(key, raw)?);
            }
        }
        if map.contains_key("axis2") && !map.contains_key("axis1") {
            return Err(ConfigError::at("axis2", "given without axis1"));
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(ConfigError::at(
                "axis2",
                "must sweep a different parameter than axis1",
            ));
        }
        if matches!(params.detuning, Detuning::Bare(_))
            && axes.iter().any(|a| a.param == SweepParam::DeltaEff)
        {
            return Err(ConfigError::at(
                "delta0",
                "cannot sweep delta_eff with a bare detuning",
            ));
        }

        let convention = match map.get("convention") {
            Some(c) => c
                .parse()
                .map_err(|e: String| ConfigError::at("convention", e))?,
            None => Convention::default(),
        };
        let threads = match map.get("threads") {
            Some(t) => Some(t.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| {
                ConfigError::at("threads", format!("not a positive integer: {t:?}"))
            })?),
            None => None,
        };
        Ok(Self {
            params,
            axes,
            out: map.get("out").map(PathBuf::from),
            svg: map.get("svg").map(PathBuf::from),
            convention,
            threads,
        })
    }

    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        Self::from_entries(parse_entries(text)?, overrides)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
# reference point
kappa = 0.01
gamma_m = 2e-3
g = 4e-6
lambda_hop = 20
drive_E = 2e7
opa_gain = 1.3
opa_phase = 1.5707963267948966
delta_eff = 3   # effective
n_a = 0
n_m = 0
";

    #[test]
    fn parses_reference_point() {
        let cfg = RunConfig::parse(BASE, &[]).unwrap();
        assert_eq!(cfg.params, PhysicalParams::baseline());
        assert_eq!(cfg.convention, Convention::Ln2Eta);
        assert!(cfg.axes.is_empty());
    }

    #[test]
    fn missing_key_is_named() {
        let text = BASE.replace("kappa = 0.01\n", "");
        let err = RunConfig::parse(&text, &[]).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("kappa"));
    }

    #[test]
    fn both_detunings_rejected() {
        let text = format!("{BASE}delta0 = 5\n");
        let err = RunConfig::parse(&text, &[]).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("delta0"));
    }

    #[test]
    fn overrides_win() {
        let cfg = RunConfig::parse(BASE, &[("opa_gain".into(), "2.1".into())]).unwrap();
        assert_eq!(cfg.params.opa_gain, 2.1);
    }

    #[test]
    fn axes_parse() {
        let text =
            format!("{BASE}axis1 = opa_phase 0 3.141592653589793 201\naxis2 = opa_gain,0,3,11\n");
        let cfg = RunConfig::parse(&text, &[]).unwrap();
        assert_eq!(cfg.axes.len(), 2);
        assert_eq!(cfg.axes[0].param, SweepParam::OpaPhase);
        assert_eq!(cfg.axes[1].count, 11);
    }

    #[test]
    fn malformed_inputs_name_their_key() {
        let cases = [
            (format!("{BASE}axis1 = opa_phase 0 1\n"), "axis1"),
            (format!("{BASE}axis1 = bogus 0 1 5\n"), "axis1"),
            (BASE.replace("g = 4e-6", "g = four"), "g"),
            (BASE.replace("kappa = 0.01", "kappa = -1"), "kappa"),
            (format!("{BASE}threads = 0\n"), "threads"),
            (format!("{BASE}convention = log\n"), "convention"),
            (format!("{BASE}speed = 3\n"), "speed"),
            (format!("{BASE}kappa = 0.02\n"), "kappa"),
            (BASE.replace("n_m = 0", "n_m = inf"), "n_m"),
        ];
        for (text, key) in cases {
            let err = RunConfig::parse(&text, &[]).unwrap_err();
            assert_eq!(err.key.as_deref(), Some(key), "{err}");
        }
        let err = RunConfig::parse("this is not a config", &[]).unwrap_err();
        assert!(err.message.contains("line 1"));
    }
}
