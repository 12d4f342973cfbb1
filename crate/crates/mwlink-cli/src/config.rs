//! Sweep configuration: a flat TOML document with a `kind`, a `[fixed]`
//! table and any number of `[[axis]]` entries. All rates and frequencies are
//! ordinary frequencies (the 2 pi is implied); lengths in metres, times in
//! microseconds unless suffixed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Transfer,
    StirapCompare,
    PhaseProbe,
    Scatter,
    CPhase,
    GateTransfer,
    Dressed,
    Lamb,
}

impl Kind {
    pub fn parse(s: &str) -> Result<Kind, ConfigError> {
        Ok(match s {
            "transfer" => Kind::Transfer,
            "stirap-compare" => Kind::StirapCompare,
            "phase-probe" => Kind::PhaseProbe,
            "scatter" => Kind::Scatter,
            "cphase" => Kind::CPhase,
            "gate-transfer" => Kind::GateTransfer,
            "dressed" => Kind::Dressed,
            "lamb" => Kind::Lamb,
            other => return Err(ConfigError(format!("unknown experiment kind `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Transfer => "transfer",
            Kind::StirapCompare => "stirap-compare",
            Kind::PhaseProbe => "phase-probe",
            Kind::Scatter => "scatter",
            Kind::CPhase => "cphase",
            Kind::GateTransfer => "gate-transfer",
            Kind::Dressed => "dressed",
            Kind::Lamb => "lamb",
        }
    }
}

/// Resolved physical parameters for one sweep point. Internal units
/// throughout: rad/s, seconds, metres.
#[derive(Debug, Clone)]
pub struct Params {
    pub length: f64,
    pub kappa: f64,
    pub kappa_2: Option<f64>,
    pub eta: f64,
    pub detuning: f64,
    pub chi: Option<f64>,
    pub g_0: Option<f64>,
    pub duration: Option<f64>,
    pub t_1: f64,
    pub f_23: f64,
    pub g2_over_delta: f64,
    pub gp_over_delta: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            length: 30.0,
            kappa: 2.0 * PI * 1e6,
            kappa_2: None,
            eta: 1.0,
            detuning: 0.0,
            chi: None,
            g_0: None,
            duration: None,
            t_1: 100e-6,
            f_23: 1.0,
            g2_over_delta: 0.0,
            gp_over_delta: None,
        }
    }
}

const KEYS: &[&str] = &[
    "length",
    "kappa",
    "kappa2",
    "eta",
    "detuning",
    "chi",
    "g0",
    "duration",
    "t1",
    "f23",
    "g2_over_delta",
    "gp_over_delta",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Frequency,
    Time,
    Length,
    Plain,
}

fn unit_of(key: &str) -> Unit {
    match key {
        "kappa" | "kappa2" | "detuning" | "chi" | "g0" => Unit::Frequency,
        "t1" | "duration" => Unit::Time,
        "length" => Unit::Length,
        _ => Unit::Plain,
    }
}

/// Parses a value with an optional unit suffix. Frequencies accept
/// Hz/kHz/MHz/GHz and an optional leading `2pi*` (a no-op: values are
/// ordinary frequencies either way); default MHz. Times accept ns/us/ms/s,
/// default us.
pub fn parse_value(key: &str, value: &toml::Value) -> Result<f64, ConfigError> {
    let unit = unit_of(key);
    let scale_default = match unit {
        Unit::Frequency => 2.0 * PI * 1e6,
        Unit::Time => 1e-6,
        Unit::Length | Unit::Plain => 1.0,
    };
    match value {
        toml::Value::Float(x) => Ok(x * scale_default),
        toml::Value::Integer(n) => Ok(*n as f64 * scale_default),
        toml::Value::String(s) => {
            let s = s.trim();
            let s = s.strip_prefix("2pi*").or_else(|| s.strip_prefix("2pi ")).unwrap_or(s);
            let (num, scale) = match unit {
                Unit::Frequency => {
                    let table: &[(&str, f64)] = &[
                        ("GHz", 2.0 * PI * 1e9),
                        ("MHz", 2.0 * PI * 1e6),
                        ("kHz", 2.0 * PI * 1e3),
                        ("Hz", 2.0 * PI),
                    ];
                    split_suffix(s, table, scale_default)
                }
                Unit::Time => {
                    let table: &[(&str, f64)] = &[
                        ("ns", 1e-9),
                        ("us", 1e-6),
                        ("ms", 1e-3),
                        ("s", 1.0),
                    ];
                    split_suffix(s, table, scale_default)
                }
                Unit::Length => {
                    let table: &[(&str, f64)] = &[("cm", 1e-2), ("mm", 1e-3), ("m", 1.0)];
                    split_suffix(s, table, 1.0)
                }
                Unit::Plain => (s, 1.0),
            };
            let x: f64 = num
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("key `{key}`: cannot parse `{s}`")))?;
            Ok(x * scale)
        }
        other => Err(ConfigError(format!(
            "key `{key}`: expected number or unit string, got {other}"
        ))),
    }
}

fn split_suffix<'a>(s: &'a str, table: &[(&str, f64)], default: f64) -> (&'a str, f64) {
    for (suffix, scale) in table {
        if let Some(num) = s.strip_suffix(suffix) {
            return (num, *scale);
        }
    }
    (s, default)
}

fn check(value: f64, key: &str) -> Result<f64, ConfigError> {
    if !value.is_finite() {
        return Err(ConfigError(format!("key `{key}`: value not finite")));
    }
    Ok(value)
}

impl Params {
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let value = check(value, key)?;
        match key {
            "length" => self.length = value,
            "kappa" => self.kappa = value,
            "kappa2" => self.kappa_2 = Some(value),
            "eta" => self.eta = value,
            "detuning" => self.detuning = value,
            "chi" => self.chi = Some(value),
            "g0" => self.g_0 = Some(value),
            "duration" => self.duration = Some(value),
            "t1" => self.t_1 = value,
            "f23" => self.f_23 = value,
            "g2_over_delta" => self.g2_over_delta = value,
            "gp_over_delta" => self.gp_over_delta = Some(value),
            other => return Err(ConfigError(format!("unrecognized parameter key `{other}`"))),
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub kind: Kind,
    pub fixed: Params,
    pub fixed_raw: BTreeMap<String, f64>,
    pub axes: Vec<Axis>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub workers: Option<usize>,
    pub tolerance: Option<f64>,
}

impl SweepConfig {
    pub fn points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Resolves the parameters of the `i`-th point of the Cartesian product,
    /// last axis fastest.
    pub fn point(&self, i: usize) -> Params {
        let mut p = self.fixed.clone();
        let mut rem = i;
        for axis in self.axes.iter().rev() {
            let n = axis.values.len();
            let j = rem % n;
            rem /= n;
            p.set(&axis.name, axis.values[j]).expect("validated axis");
        }
        p
    }
}

pub fn load_config(path: &str) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {path}: {e}")))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let doc: toml::Value = text
        .parse()
        .map_err(|e| ConfigError(format!("TOML parse failure: {e}")))?;
    let table = doc
        .as_table()
        .ok_or_else(|| ConfigError("top level must be a table".into()))?;

    for key in table.keys() {
        if !matches!(
            key.as_str(),
            "kind" | "fixed" | "axis" | "out" | "format" | "workers" | "tolerance"
        ) {
            return Err(ConfigError(format!("unknown top-level key `{key}`")));
        }
    }

    let kind = Kind::parse(
        table
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| ConfigError("missing required key `kind`".into()))?,
    )?;

    let mut fixed = Params::default();
    let mut fixed_raw = BTreeMap::new();
    if let Some(ft) = table.get("fixed") {
        let ft = ft
            .as_table()
            .ok_or_else(|| ConfigError("`fixed` must be a table".into()))?;
        for (key, value) in ft {
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!("unrecognized parameter key `{key}` in [fixed]")));
            }
            let v = parse_value(key, value)?;
            fixed.set(key, v)?;
            fixed_raw.insert(key.clone(), v);
        }
    }

    let mut axes = Vec::new();
    if let Some(ax) = table.get("axis") {
        let list = ax
            .as_array()
            .ok_or_else(|| ConfigError("`axis` must be an array of tables".into()))?;
        for entry in list {
            let entry = entry
                .as_table()
                .ok_or_else(|| ConfigError("each [[axis]] must be a table".into()))?;
            for key in entry.keys() {
                if key != "name" && key != "values" {
                    return Err(ConfigError(format!("unknown axis key `{key}`")));
                }
            }
            let name = entry
                .get("name")
                .and_then(|v| v.as_str())
                .ok_or_else(|| ConfigError("axis missing `name`".into()))?
                .to_string();
            if !KEYS.contains(&name.as_str()) {
                return Err(ConfigError(format!("swept axis `{name}` is not a recognized key")));
            }
            let raw = entry
                .get("values")
                .and_then(|v| v.as_array())
                .ok_or_else(|| ConfigError(format!("axis `{name}` missing `values` list")))?;
            if raw.is_empty() {
                return Err(ConfigError(format!("axis `{name}` has an empty values list")));
            }
            let mut values = Vec::with_capacity(raw.len());
            for v in raw {
                values.push(check(parse_value(&name, v)?, &name)?);
            }
            axes.push(Axis { name, values });
        }
    }

    Ok(SweepConfig {
        kind,
        fixed,
        fixed_raw,
        axes,
        out: table.get("out").and_then(|v| v.as_str()).map(String::from),
        format: table.get("format").and_then(|v| v.as_str()).map(String::from),
        workers: table
            .get("workers")
            .and_then(|v| v.as_integer())
            .map(|n| n as usize),
        tolerance: table.get("tolerance").and_then(|v| v.as_float()),
    })
}

/// FNV-1a over the canonical point-generating content of a config.
pub fn config_hash(cfg: &SweepConfig) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(cfg.kind.name().as_bytes());
    for (k, v) in &cfg.fixed_raw {
        eat(k.as_bytes());
        eat(&v.to_bits().to_le_bytes());
    }
    for axis in &cfg.axes {
        eat(axis.name.as_bytes());
        for v in &axis.values {
            eat(&v.to_bits().to_le_bytes());
        }
    }
    h
}
