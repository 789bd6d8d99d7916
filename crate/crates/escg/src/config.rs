//! Plain-text `key = value` run configuration.
//!
//! Lines starting with `#` are comments. Unknown keys are rejected so typos
//! cannot silently fall back to defaults.

use crate::basis::BasisFamily;
use crate::spatial::MassMode;
use crate::time::TimeScheme;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatMode {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scenario: String,
    pub basis: BasisFamily,
    pub degree: usize,
    /// Quadrature orders; `None` means the per-law defaults.
    pub volume_order: Option<usize>,
    pub edge_order: Option<usize>,
    /// Gauss point count for the boundary-operator integral.
    pub sat_order: usize,
    pub mass_mode: MassMode,
    pub correction: bool,
    pub sat_mode: SatMode,
    pub cfl: f64,
    pub time_scheme: TimeScheme,
    pub t_end: Option<f64>,
    pub max_steps: Option<usize>,
    pub output_every: usize,
    /// Resolution of the generated mesh (subdivisions for the square,
    /// rings for the disk); ignored when `mesh_file` is given.
    pub mesh_n: usize,
    pub mesh_file: Option<String>,
    pub out_dir: Option<String>,
}

impl SchemeConfig {
    pub fn defaults(scenario: &str) -> SchemeConfig {
        SchemeConfig {
            scenario: scenario.to_string(),
            basis: BasisFamily::Lagrange,
            degree: 2,
            volume_order: None,
            edge_order: None,
            sat_order: 5,
            mass_mode: MassMode::Exact,
            correction: true,
            sat_mode: SatMode::Quadrature,
            cfl: 0.1,
            time_scheme: TimeScheme::SspRk33,
            t_end: None,
            max_steps: None,
            output_every: 10,
            mesh_n: 8,
            mesh_file: None,
            out_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<SchemeConfig> {
        let mut cfg = SchemeConfig::defaults("");
        let mut saw_scenario = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let positive_int = |what: &str| -> Result<usize> {
                let v: usize = value
                    .parse()
                    .map_err(|_| Error::Config(format!("{what} must be an integer: '{value}'")))?;
                if v == 0 {
                    return Err(Error::Config(format!("{what} must be positive")));
                }
                Ok(v)
            };
            let positive_float = |what: &str| -> Result<f64> {
                let v: f64 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("{what} must be a number: '{value}'")))?;
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{what} must be positive")));
                }
                Ok(v)
            };
            match key {
                "scenario" => {
                    cfg.scenario = value.to_string();
                    saw_scenario = true;
                }
                "basis" => cfg.basis = BasisFamily::parse(value)?,
                "degree" => {
                    let d = positive_int("degree")?;
                    if !(1..=crate::basis::MAX_DEGREE).contains(&d) {
                        return Err(Error::Config(format!(
                            "degree {d} outside 1..={}",
                            crate::basis::MAX_DEGREE
                        )));
                    }
                    cfg.degree = d;
                }
                "volume_order" => cfg.volume_order = Some(positive_int("volume_order")?),
                "edge_order" => cfg.edge_order = Some(positive_int("edge_order")?),
                "sat_order" => cfg.sat_order = positive_int("sat_order")?,
                "mass_mode" => cfg.mass_mode = MassMode::parse(value)?,
                "correction" => cfg.correction = parse_bool(value)?,
                "sat_mode" => {
                    cfg.sat_mode = match value.to_ascii_lowercase().as_str() {
                        "closed_form" | "closed-form" => SatMode::ClosedForm,
                        "quadrature" => SatMode::Quadrature,
                        other => {
                            return Err(Error::Config(format!("unknown sat_mode '{other}'")))
                        }
                    }
                }
                "cfl" => cfg.cfl = positive_float("cfl")?,
                "time_scheme" => cfg.time_scheme = TimeScheme::parse(value)?,
                "t_end" => cfg.t_end = Some(positive_float("t_end")?),
                "max_steps" => cfg.max_steps = Some(positive_int("max_steps")?),
                "output_every" => cfg.output_every = positive_int("output_every")?,
                "mesh_n" => cfg.mesh_n = positive_int("mesh_n")?,
                "mesh_file" => cfg.mesh_file = Some(value.to_string()),
                "out_dir" => cfg.out_dir = Some(value.to_string()),
                other => {
                    return Err(Error::Config(format!("unknown configuration key '{other}'")))
                }
            }
        }
        if !saw_scenario {
            return Err(Error::Config("missing required key 'scenario'".into()));
        }
        if cfg.t_end.is_none() && cfg.max_steps.is_none() {
            return Err(Error::Config(
                "need a stopping rule: set t_end and/or max_steps".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &str) -> Result<SchemeConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_string(),
            source,
        })?;
        SchemeConfig::parse(&text)
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("expected a boolean, got '{other}'"))),
    }
}
