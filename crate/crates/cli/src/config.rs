//! Flat `key = value` configuration with dotted keys.
//!
//! Blank lines and `#` comments are ignored. Lists are comma separated.
//! Every key is optional; unknown keys and malformed values are usage errors
//! naming the offending key.

use std::collections::BTreeMap;
use std::path::PathBuf;

use inhomkg_lattice::presets::{Bump, METRIC_PRESETS, SOURCE_PRESETS};
use inhomkg_lattice::scenarios::DerivativeSetup;
use inhomkg_lattice::LatticeGeometry;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.to_string(), message: message.into() }
    }

    /// Field path of the error, if any.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Syntax { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarSetting {
    Exact,
    Floating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub nx: usize,
    pub nt: usize,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub mass: f64,
    pub p: usize,
    pub margin: usize,
    pub metric: String,
    pub source: String,
    pub source_strength: f64,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            nx: 64,
            nt: 128,
            dx: None,
            dt: None,
            mass: 1.0,
            p: 2,
            margin: 2,
            metric: "static-wave".into(),
            source: "smooth".into(),
            source_strength: 0.5,
        }
    }
}

impl LatticeSpec {
    /// Unit circle by default, `dt = dx / 2`.
    pub fn geometry(&self) -> LatticeGeometry {
        let dx = self.dx.unwrap_or(1.0 / self.nx as f64);
        let dt = self.dt.unwrap_or(0.5 * dx);
        LatticeGeometry { nt: self.nt, nx: self.nx, dt, dx, mass: self.mass, p: self.p, margin: self.margin }
    }
}

/// Sample counts of the randomized cases.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub algebra: usize,
    pub fedosov_spaces: usize,
    pub fedosov_pairs: usize,
    pub fedosov_elements: usize,
    pub composition: usize,
    pub shift_cases: usize,
    pub dynloc_cases: usize,
    pub dynloc_regions: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            algebra: 100,
            fedosov_spaces: 12,
            fedosov_pairs: 240,
            fedosov_elements: 100,
            composition: 100,
            shift_cases: 10,
            dynloc_cases: 20,
            dynloc_regions: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Option<String>,
    pub seed: u64,
    pub scalar_mode: ScalarSetting,
    pub lattice: LatticeSpec,
    /// Background and perturbation of the derivative experiment.
    pub derivative: DerivativeSetup,
    pub refinements: Vec<usize>,
    pub divergence_refinements: Vec<usize>,
    pub fd_step: f64,
    pub samples: Samples,
    /// Per-case tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Replaces the tolerance of every floating case.
    pub global_tolerance: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub svg: bool,
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: None,
            seed: 0,
            scalar_mode: ScalarSetting::Exact,
            lattice: LatticeSpec::default(),
            derivative: DerivativeSetup::default(),
            refinements: vec![32, 64, 128],
            divergence_refinements: vec![32, 64, 128],
            fd_step: 1e-3,
            samples: Samples::default(),
            tolerances: BTreeMap::new(),
            global_tolerance: None,
            output_dir: None,
            svg: false,
            timings: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::invalid(key, format!("cannot parse `{v}`")))
}

fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::invalid(key, "must be positive"))
    }
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    let n: usize = parse_num(key, v)?;
    if n == 0 {
        return Err(ConfigError::invalid(key, "must be positive"));
    }
    Ok(n)
}

fn list(key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    let out = v.split(',').map(|s| count(key, s.trim())).collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(ConfigError::invalid(key, "empty list"));
    }
    Ok(out)
}

fn boolean(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::invalid(key, format!("expected true or false, found `{v}`"))),
    }
}

fn preset(key: &str, v: &str, allowed: &[&str]) -> Result<String, ConfigError> {
    if allowed.contains(&v) {
        Ok(v.to_string())
    } else {
        Err(ConfigError::invalid(key, format!("unknown preset `{v}` (expected one of {})", allowed.join(", "))))
    }
}

const BUMP_TEMPLATE: Bump = Bump { t0: 0.5, x0: 0.5, radius_t: 0.15, radius_x: 0.15, amplitude: 0.0 };

/// Sets one bump field; `none` as the whole value removes the bump.
fn set_bump(slot: &mut Option<Bump>, key: &str, field: Option<&str>, v: &str) -> Result<(), ConfigError> {
    let Some(field) = field else {
        if v == "none" {
            *slot = None;
            return Ok(());
        }
        return Err(ConfigError::invalid(key, "expected `none` or a bump field such as `.amplitude`"));
    };
    let b = slot.get_or_insert(BUMP_TEMPLATE);
    match field {
        "t0" => b.t0 = parse_num(key, v)?,
        "x0" => b.x0 = parse_num(key, v)?,
        "radius_t" => b.radius_t = positive(key, v)?,
        "radius_x" => b.radius_x = positive(key, v)?,
        "amplitude" => b.amplitude = parse_num(key, v)?,
        _ => return Err(ConfigError::invalid(key, "unknown bump field")),
    }
    Ok(())
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SuiteConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["suite"] => self.suite = Some(v.to_string()),
            ["seed"] => self.seed = parse_num(key, v)?,
            ["scalar_mode"] => {
                self.scalar_mode = match v {
                    "exact" => ScalarSetting::Exact,
                    "floating" => ScalarSetting::Floating,
                    _ => return Err(ConfigError::invalid(key, format!("expected exact or floating, found `{v}`"))),
                }
            }
            ["lattice", f] => {
                let l = &mut self.lattice;
                match *f {
                    "nx" => l.nx = count(key, v)?,
                    "nt" => l.nt = count(key, v)?,
                    "dx" => l.dx = Some(positive(key, v)?),
                    "dt" => l.dt = Some(positive(key, v)?),
                    "mass" => {
                        l.mass = parse_num(key, v)?;
                        if l.mass < 0.0 {
                            return Err(ConfigError::invalid(key, "must be non-negative"));
                        }
                    }
                    "p" => l.p = count(key, v)?,
                    "margin" => l.margin = count(key, v)?,
                    "metric" => l.metric = preset(key, v, &METRIC_PRESETS)?,
                    "source" => l.source = preset(key, v, &SOURCE_PRESETS)?,
                    "source_strength" => l.source_strength = parse_num(key, v)?,
                    _ => return Err(ConfigError::invalid(key, "unknown key")),
                }
            }
            ["rce", f] => match *f {
                "nx" => self.refinements = list(key, v)?,
                "step" => self.fd_step = positive(key, v)?,
                "metric" => self.derivative.metric = preset(key, v, &METRIC_PRESETS)?,
                "source" => self.derivative.source = preset(key, v, &SOURCE_PRESETS)?,
                "source_strength" => self.derivative.source_strength = parse_num(key, v)?,
                "mass" => self.derivative.mass = parse_num(key, v)?,
                "p" => self.derivative.p = count(key, v)?,
                _ => return Err(ConfigError::invalid(key, "unknown key")),
            },
            ["divergence", "nx"] => self.divergence_refinements = list(key, v)?,
            ["perturbation", comp, rest @ ..] if ["h_tt", "h_tx", "h_xx"].contains(comp) => {
                if rest.len() > 1 {
                    return Err(ConfigError::invalid(key, "unknown key"));
                }
                let d = &mut self.derivative;
                let slot = match *comp {
                    "h_tt" => &mut d.h_tt,
                    "h_tx" => &mut d.h_tx,
                    _ => &mut d.h_xx,
                };
                set_bump(slot, key, rest.first().copied(), v)?;
            }
            ["perturbation", "j", c, rest @ ..] => {
                let c: usize = parse_num(key, c)?;
                if rest.len() > 1 {
                    return Err(ConfigError::invalid(key, "unknown key"));
                }
                let j = &mut self.derivative.j;
                let pos = j.iter().position(|(k, _)| *k == c);
                let mut slot = pos.map(|i| j[i].1);
                set_bump(&mut slot, key, rest.first().copied(), v)?;
                match (pos, slot) {
                    (Some(i), Some(b)) => j[i].1 = b,
                    (Some(i), None) => {
                        j.remove(i);
                    }
                    (None, Some(b)) => j.push((c, b)),
                    (None, None) => {}
                }
                j.sort_by_key(|(k, _)| *k);
            }
            ["samples", f] => {
                let n = count(key, v)?;
                let s = &mut self.samples;
                match *f {
                    "algebra" => s.algebra = n,
                    "fedosov_spaces" => s.fedosov_spaces = n,
                    "fedosov_pairs" => s.fedosov_pairs = n,
                    "fedosov_elements" => s.fedosov_elements = n,
                    "composition" => s.composition = n,
                    "shift_cases" => s.shift_cases = n,
                    "dynloc_cases" => s.dynloc_cases = n,
                    "dynloc_regions" => s.dynloc_regions = n,
                    _ => return Err(ConfigError::invalid(key, "unknown key")),
                }
            }
            ["tolerance", name] => {
                let x: f64 = parse_num(key, v)?;
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(ConfigError::invalid(key, "must be non-negative"));
                }
                self.tolerances.insert(name.to_string(), x);
            }
            ["output", "dir"] => self.output_dir = Some(PathBuf::from(v)),
            ["output", "svg"] => self.svg = boolean(key, v)?,
            ["output", "timings"] => self.timings = boolean(key, v)?,
            _ => return Err(ConfigError::invalid(key, "unknown key")),
        }
        Ok(())
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let l = &self.lattice;
        if l.nt < 2 * l.margin + 8 {
            return Err(ConfigError::invalid("lattice.nt", format!("too small for margin {}", l.margin)));
        }
        if l.nx < 4 {
            return Err(ConfigError::invalid("lattice.nx", "needs at least 4 sites"));
        }
        if self.refinements.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(ConfigError::invalid("rce.nx", "each entry must double the previous one"));
        }
        if self.divergence_refinements.len() < 2 || self.divergence_refinements.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(ConfigError::invalid("divergence.nx", "needs at least two entries, each doubling the previous one"));
        }
        if let Some((c, _)) = self.derivative.j.iter().find(|(c, _)| *c >= self.derivative.p) {
            return Err(ConfigError::invalid(&format!("perturbation.j.{c}"), "component out of range"));
        }
        Ok(())
    }

    /// Tolerance of a case: config override, then the global floating
    /// override, then the default.
    pub fn tolerance(&self, case: &str, default: f64, floating: bool) -> f64 {
        if let Some(t) = self.tolerances.get(case) {
            return *t;
        }
        match self.global_tolerance {
            Some(t) if floating => t,
            _ => default,
        }
    }
}
