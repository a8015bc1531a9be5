//! Subcommand implementations. Each returns a JSON value on success or a
//! [`CmdError`] carrying the process exit code and a machine-readable
//! error kind.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};

use fivebar::atlas::{compute_atlas, singularity_loci};
use fivebar::kinematics::{
    forward_kinematics, inverse_kinematics_with, AssemblyMode, FullConfig, Geometry, JointConfig,
    Tolerances,
};
use fivebar::singularity::{
    classify_singularity, enumerate_working_modes, matrices, working_mode_of, WorkingMode,
};
use fivebar::{Error, Point2};

use crate::config::RunConfig;
use crate::exit_codes;
use crate::report::{report_json, write_grid_csv};
use crate::svg::{render_mode_svg, PlotStyle};

/// A failed command: exit code, short machine-readable kind, message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmdError {
    pub exit_code: i32,
    pub kind: String,
    pub message: String,
}

impl CmdError {
    pub fn io(message: String) -> CmdError {
        CmdError { exit_code: exit_codes::IO, kind: "IoError".to_string(), message }
    }

    pub fn usage(message: String) -> CmdError {
        CmdError { exit_code: exit_codes::USAGE, kind: "UsageError".to_string(), message }
    }

    /// JSON payload printed on stdout for scripted consumers.
    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind, "message": self.message })
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        let kind = match e {
            Error::Unreachable => "Unreachable",
            Error::ModeBoundary => "ModeBoundary",
            Error::NoAssembly => "NoAssembly",
            Error::SingularDirectMatrix => "SingularDirectMatrix",
            Error::SingularInverseMatrix => "SingularInverseMatrix",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::UnknownAspect => "UnknownAspect",
        };
        let exit_code = match e {
            Error::Unreachable
            | Error::ModeBoundary
            | Error::NoAssembly
            | Error::SingularDirectMatrix
            | Error::SingularInverseMatrix => exit_codes::KINEMATIC,
            _ => exit_codes::USAGE,
        };
        CmdError { exit_code, kind: kind.to_string(), message: e.to_string() }
    }
}

/// Angle rendering at the CLI boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleUnit {
    Radians,
    Degrees,
}

impl AngleUnit {
    fn render(self, radians: f64) -> f64 {
        match self {
            AngleUnit::Radians => radians,
            AngleUnit::Degrees => radians.to_degrees(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            AngleUnit::Radians => "rad",
            AngleUnit::Degrees => "deg",
        }
    }
}

/// The common record printed by the single-query commands.
fn config_record(cfg: &FullConfig, tol: &Tolerances, unit: AngleUnit) -> Value {
    let m = matrices(cfg);
    let mode = working_mode_of(cfg, tol).map(|m| m.to_string()).ok();
    json!({
        "p": { "x": cfg.p.x, "y": cfg.p.y },
        "q": { "theta1": unit.render(cfg.q.theta1), "theta2": unit.render(cfg.q.theta2) },
        "passive": {
            "theta3": unit.render(cfg.passive.theta3),
            "theta4": unit.render(cfg.passive.theta4),
        },
        "angle_unit": unit.name(),
        "det_a": m.det_direct(),
        "det_b": m.det_inverse(),
        "b11": m.inverse.d11,
        "b22": m.inverse.d22,
        "working_mode": mode,
        "singularity": classify_singularity(cfg, tol).to_string(),
        "residual": cfg.closure_residual(),
    })
}

/// Forward kinematics at `q` for one assembly branch.
pub fn cmd_fk(
    g: &Geometry,
    q: JointConfig,
    am: AssemblyMode,
    unit: AngleUnit,
) -> Result<Value, CmdError> {
    let tol = Tolerances::for_geometry(g);
    let sol = forward_kinematics(g, q, am)?;
    let mut record = config_record(&sol.config, &tol, unit);
    record["assembly"] = json!(am.0.to_string());
    record["tangent"] = json!(sol.tangent);
    Ok(record)
}

/// Inverse kinematics at `p` for one working mode.
pub fn cmd_ik(
    g: &Geometry,
    p: Point2,
    mode: WorkingMode,
    unit: AngleUnit,
) -> Result<Value, CmdError> {
    let tol = Tolerances::for_geometry(g);
    let cfg = inverse_kinematics_with(g, p, mode, &tol)?;
    let mut record = config_record(&cfg, &tol, unit);
    record["mode"] = json!(mode.to_string());
    Ok(record)
}

/// Classification query, from either a pose (via a working mode) or a
/// joint vector (via an assembly branch).
pub enum ClassifyQuery {
    Pose { p: Point2, mode: WorkingMode },
    Joints { q: JointConfig, am: AssemblyMode },
}

pub fn cmd_classify(g: &Geometry, query: ClassifyQuery, unit: AngleUnit) -> Result<Value, CmdError> {
    match query {
        ClassifyQuery::Pose { p, mode } => cmd_ik(g, p, mode, unit),
        ClassifyQuery::Joints { q, am } => cmd_fk(g, q, am, unit),
    }
}

/// Working-mode combinatorics for arbitrary posture counts per leg.
pub fn cmd_modes(postures: &[usize]) -> Result<Value, CmdError> {
    if postures.is_empty() || postures.contains(&0) {
        return Err(CmdError::usage("posture counts must be positive integers".to_string()));
    }
    let e = enumerate_working_modes(postures);
    let mut record = json!({ "count": e.count, "modes": e.vectors });
    if postures.iter().all(|&k| k == 2) {
        let signs: Vec<String> = e
            .vectors
            .iter()
            .map(|v| v.iter().map(|&i| if i == 0 { '+' } else { '-' }).collect())
            .collect();
        record["signs"] = json!(signs);
    }
    Ok(record)
}

/// Full atlas run: samples and labels all working modes and writes the
/// requested artifacts into the output directory.
pub fn cmd_atlas(cfg: &RunConfig) -> Result<Value, CmdError> {
    let atlas = compute_atlas(&cfg.geometry, &cfg.grid, &cfg.tolerances)?;
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CmdError::io(format!("create {}: {e}", cfg.out_dir.display())))?;
    let mut files: Vec<PathBuf> = Vec::new();
    let write = |path: &PathBuf, bytes: &[u8]| -> Result<(), CmdError> {
        fs::write(path, bytes).map_err(|e| CmdError::io(format!("write {}: {e}", path.display())))
    };

    if cfg.formats.json {
        let path = cfg.out_dir.join("report.json");
        write(&path, report_json(&atlas.report).as_bytes())?;
        files.push(path);
    }
    if cfg.formats.csv {
        let mut buf = Vec::new();
        write_grid_csv(&atlas, &mut buf).map_err(|e| CmdError::io(e.to_string()))?;
        let path = cfg.out_dir.join("grid.csv");
        write(&path, &buf)?;
        files.push(path);
    }
    if cfg.formats.svg {
        let style = PlotStyle { px_per_unit: cfg.px_per_unit, ..PlotStyle::default() };
        for labeled in &atlas.fields {
            let mode = labeled.field.mode;
            let loci = singularity_loci(&cfg.geometry, &cfg.grid, mode, &cfg.tolerances)?;
            let svg = render_mode_svg(&cfg.geometry, labeled, &loci, &cfg.tolerances, &style);
            let name = format!(
                "mode_{}{}.svg",
                mode.signs[0].letter(),
                mode.signs[1].letter()
            );
            let path = cfg.out_dir.join(name);
            write(&path, svg.as_bytes())?;
            files.push(path);
        }
    }

    Ok(json!({
        "out_dir": cfg.out_dir.display().to_string(),
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "total": atlas.report.total,
        "warnings": atlas.report.warnings,
    }))
}
