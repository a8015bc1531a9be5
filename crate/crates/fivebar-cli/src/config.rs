//! Run configuration and the flat `key = value` config file format.
//!
//! Recognized keys (all others are rejected with the offending line):
//!
//! ```text
//! l0 l1 l2 l3 l4                    link lengths (required)
//! nx ny                             grid resolution        default 512
//! x_min x_max y_min y_max           grid ranges            default: annuli + 5%
//! connectivity                      4 or 8                 default 4
//! eps_a eps_b residual_tol          tolerance overrides    default: geometry-scaled
//! out_dir                           output directory       default "out"
//! formats                           subset of json,csv,svg default all three
//! px_per_unit                       SVG scale              default 40
//! ```

use std::fmt;
use std::path::PathBuf;

use fivebar::atlas::{Connectivity, GridSpec};
use fivebar::kinematics::{Geometry, Tolerances};
use fivebar::Error;

/// Output formats requested for an atlas run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { json: true, csv: true, svg: true }
    }
}

/// Fully validated configuration of an atlas run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub px_per_unit: f64,
}

impl RunConfig {
    /// Defaults for a geometry: 512x512 grid over the annuli bounding
    /// box, geometry-scaled tolerances, all output formats.
    pub fn defaults(geometry: Geometry) -> RunConfig {
        RunConfig {
            grid: GridSpec::for_geometry(&geometry, 512, 512),
            tolerances: Tolerances::for_geometry(&geometry),
            geometry,
            out_dir: PathBuf::from("out"),
            formats: Formats::default(),
            px_per_unit: 40.0,
        }
    }
}

/// Config file errors: syntax with a line number, or a named invalid field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigError {
    Parse { line: usize, message: String },
    Validation { field: &'static str, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::Validation { field, message } => write!(f, "field {field}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

const KEYS: &[&str] = &[
    "l0", "l1", "l2", "l3", "l4", "nx", "ny", "x_min", "x_max", "y_min", "y_max",
    "connectivity", "eps_a", "eps_b", "residual_tol", "out_dir", "formats", "px_per_unit",
];

/// Parses the documented `key = value` format and fills defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen: Vec<(&str, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let Some(&canonical) = KEYS.iter().find(|&&k| k == key) else {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("unknown key `{key}`"),
            });
        };
        if seen.iter().any(|(k, _)| *k == canonical) {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("empty value for `{key}`"),
            });
        }
        seen.push((canonical, value.to_string()));
    }
    build(&seen)
}

fn lookup<'a>(seen: &'a [(&str, String)], key: &str) -> Option<&'a str> {
    seen.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
}

fn number(seen: &[(&str, String)], key: &'static str) -> Result<Option<f64>, ConfigError> {
    match lookup(seen, key) {
        None => Ok(None),
        Some(v) => v.parse::<f64>().map(Some).map_err(|_| ConfigError::Validation {
            field: key,
            message: format!("`{v}` is not a number"),
        }),
    }
}

fn integer(seen: &[(&str, String)], key: &'static str) -> Result<Option<usize>, ConfigError> {
    match lookup(seen, key) {
        None => Ok(None),
        Some(v) => v.parse::<usize>().map(Some).map_err(|_| ConfigError::Validation {
            field: key,
            message: format!("`{v}` is not a non-negative integer"),
        }),
    }
}

fn build(seen: &[(&str, String)]) -> Result<RunConfig, ConfigError> {
    // The five lengths are the only required keys.
    const LENGTH_KEYS: [&str; 5] = ["l0", "l1", "l2", "l3", "l4"];
    let mut lengths = [0.0f64; 5];
    for (i, key) in LENGTH_KEYS.into_iter().enumerate() {
        match number(seen, key)? {
            Some(v) => lengths[i] = v,
            None => {
                return Err(ConfigError::Validation {
                    field: key,
                    message: format!("missing required key `{key}`"),
                })
            }
        }
    }
    let geometry = Geometry::new(lengths[0], lengths[1], lengths[2], lengths[3], lengths[4])
        .map_err(|e| match e {
            Error::InvalidGeometry(field) => ConfigError::Validation {
                field,
                message: "length must be strictly positive and finite".to_string(),
            },
            other => ConfigError::Validation { field: "geometry", message: other.to_string() },
        })?;

    let nx = integer(seen, "nx")?.unwrap_or(512);
    let ny = integer(seen, "ny")?.unwrap_or(512);
    let mut grid = GridSpec::for_geometry(&geometry, nx, ny);
    if let Some(v) = number(seen, "x_min")? {
        grid.x_min = v;
    }
    if let Some(v) = number(seen, "x_max")? {
        grid.x_max = v;
    }
    if let Some(v) = number(seen, "y_min")? {
        grid.y_min = v;
    }
    if let Some(v) = number(seen, "y_max")? {
        grid.y_max = v;
    }
    match integer(seen, "connectivity")? {
        None | Some(4) => grid.connectivity = Connectivity::Four,
        Some(8) => grid.connectivity = Connectivity::Eight,
        Some(v) => {
            return Err(ConfigError::Validation {
                field: "connectivity",
                message: format!("must be 4 or 8, got {v}"),
            })
        }
    }
    grid.validate().map_err(|e| match e {
        Error::InvalidGrid(field) => ConfigError::Validation {
            field,
            message: "grid must have nx, ny >= 2 and non-degenerate ranges".to_string(),
        },
        other => ConfigError::Validation { field: "grid", message: other.to_string() },
    })?;

    let mut tolerances = Tolerances::for_geometry(&geometry);
    let tolerance_override = |key: &'static str, slot: &mut f64| -> Result<(), ConfigError> {
        if let Some(v) = number(seen, key)? {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Validation {
                    field: key,
                    message: "tolerance must be strictly positive".to_string(),
                });
            }
            *slot = v;
        }
        Ok(())
    };
    tolerance_override("eps_a", &mut tolerances.eps_a)?;
    tolerance_override("eps_b", &mut tolerances.eps_b)?;
    tolerance_override("residual_tol", &mut tolerances.residual)?;

    let out_dir = PathBuf::from(lookup(seen, "out_dir").unwrap_or("out"));

    let formats = match lookup(seen, "formats") {
        None => Formats::default(),
        Some(v) => {
            let mut formats = Formats { json: false, csv: false, svg: false };
            for item in v.split(',') {
                match item.trim() {
                    "json" => formats.json = true,
                    "csv" => formats.csv = true,
                    "svg" => formats.svg = true,
                    other => {
                        return Err(ConfigError::Validation {
                            field: "formats",
                            message: format!("unknown format `{other}`"),
                        })
                    }
                }
            }
            formats
        }
    };
    if !(formats.json || formats.csv || formats.svg) {
        return Err(ConfigError::Validation {
            field: "formats",
            message: "at least one output format is required".to_string(),
        });
    }

    let px_per_unit = number(seen, "px_per_unit")?.unwrap_or(40.0);
    if !(px_per_unit.is_finite() && px_per_unit > 0.0) {
        return Err(ConfigError::Validation {
            field: "px_per_unit",
            message: "must be strictly positive".to_string(),
        });
    }

    Ok(RunConfig { geometry, grid, tolerances, out_dir, formats, px_per_unit })
}
