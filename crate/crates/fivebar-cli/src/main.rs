//! `fivebar` binary: single-query kinematics, working-mode enumeration,
//! and atlas generation.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 kinematic
//! infeasibility, 3 I/O error.

use std::collections::HashMap;
use std::process::ExitCode;

use fivebar::kinematics::{AssemblyMode, Geometry, JointConfig};
use fivebar::singularity::WorkingMode;
use fivebar::{Point2, Sign};

use fivebar_cli::commands::{
    cmd_atlas, cmd_classify, cmd_fk, cmd_ik, cmd_modes, AngleUnit, ClassifyQuery, CmdError,
};
use fivebar_cli::config::{parse_config, RunConfig};
use fivebar_cli::exit_codes;

const USAGE: &str = "\
usage: fivebar <command> [options]

commands:
  fk        --theta1 R --theta2 R --assembly +|-     forward kinematics
  ik        --x F --y F --mode {++,+-,-+,--}         inverse kinematics
  classify  (--x --y --mode | --theta1 --theta2 --assembly)
  atlas     --config FILE [--out DIR]                full workspace atlas
  modes     --postures K1,K2,... | --legs N          working-mode counts

options for fk/ik/classify:
  --l0..--l4 F   link lengths (default 9 8 5 5 8)
  --config FILE  read the lengths from a config file instead
  --degrees      angles in degrees at the command line

angles are radians unless --degrees is given; output is JSON on stdout.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(value) => {
            emit(&value);
            ExitCode::SUCCESS
        }
        Err(err) if err.exit_code == exit_codes::USAGE => {
            eprintln!("error: {}", err.message);
            eprintln!("{USAGE}");
            ExitCode::from(err.exit_code as u8)
        }
        Err(err) => {
            emit(&err.to_json());
            ExitCode::from(err.exit_code as u8)
        }
    }
}

/// Prints a JSON value to stdout, tolerating a closed pipe (e.g. when
/// the output is piped into `head`).
fn emit(value: &serde_json::Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("valid json");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn run(args: &[String]) -> Result<serde_json::Value, CmdError> {
    let Some(command) = args.first() else {
        return Err(CmdError::usage("missing command".to_string()));
    };
    let flags = Flags::parse(&args[1..])?;
    match command.as_str() {
        "fk" => {
            let (g, unit) = geometry_and_unit(&flags)?;
            let q = JointConfig::new(flags.angle("theta1", unit)?, flags.angle("theta2", unit)?);
            let am = flags.assembly()?;
            flags.reject_unknown(&["theta1", "theta2", "assembly", "degrees", "config", "l0", "l1", "l2", "l3", "l4"])?;
            cmd_fk(&g, q, am, unit)
        }
        "ik" => {
            let (g, unit) = geometry_and_unit(&flags)?;
            let p = Point2::new(flags.number("x")?, flags.number("y")?);
            let mode = flags.mode()?;
            flags.reject_unknown(&["x", "y", "mode", "degrees", "config", "l0", "l1", "l2", "l3", "l4"])?;
            cmd_ik(&g, p, mode, unit)
        }
        "classify" => {
            let (g, unit) = geometry_and_unit(&flags)?;
            let query = if flags.has("x") || flags.has("y") {
                ClassifyQuery::Pose {
                    p: Point2::new(flags.number("x")?, flags.number("y")?),
                    mode: flags.mode()?,
                }
            } else {
                ClassifyQuery::Joints {
                    q: JointConfig::new(
                        flags.angle("theta1", unit)?,
                        flags.angle("theta2", unit)?,
                    ),
                    am: flags.assembly()?,
                }
            };
            cmd_classify(&g, query, unit)
        }
        "atlas" => {
            let path = flags.value("config")?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CmdError::io(format!("read {path}: {e}")))?;
            let mut run_config: RunConfig = parse_config(&text)
                .map_err(|e| CmdError::usage(format!("config: {e}")))?;
            if let Some(out) = flags.get("out") {
                run_config.out_dir = out.into();
            }
            flags.reject_unknown(&["config", "out"])?;
            cmd_atlas(&run_config)
        }
        "modes" => {
            let postures: Vec<usize> = if let Some(list) = flags.get("postures") {
                list.split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CmdError::usage(format!("bad --postures list `{list}`")))?
            } else if let Some(n) = flags.get("legs") {
                let n: usize = n
                    .parse()
                    .map_err(|_| CmdError::usage(format!("bad --legs value `{n}`")))?;
                vec![2; n]
            } else {
                return Err(CmdError::usage("modes needs --postures or --legs".to_string()));
            };
            flags.reject_unknown(&["postures", "legs"])?;
            cmd_modes(&postures)
        }
        other => Err(CmdError::usage(format!("unknown command `{other}`"))),
    }
}

fn geometry_and_unit(flags: &Flags) -> Result<(Geometry, AngleUnit), CmdError> {
    let unit = if flags.has("degrees") { AngleUnit::Degrees } else { AngleUnit::Radians };
    let geometry = if let Some(path) = flags.get("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::io(format!("read {path}: {e}")))?;
        parse_config(&text)
            .map_err(|e| CmdError::usage(format!("config: {e}")))?
            .geometry
    } else {
        let d = Geometry::default();
        let pick = |key: &str, default: f64| -> Result<f64, CmdError> {
            match flags.get(key) {
                None => Ok(default),
                Some(v) => v
                    .parse()
                    .map_err(|_| CmdError::usage(format!("bad --{key} value `{v}`"))),
            }
        };
        Geometry::new(
            pick("l0", d.l0)?,
            pick("l1", d.l1)?,
            pick("l2", d.l2)?,
            pick("l3", d.l3)?,
            pick("l4", d.l4)?,
        )
        .map_err(|e| CmdError::usage(e.to_string()))?
    };
    Ok((geometry, unit))
}

/// Minimal `--key value` / `--flag` parser.
struct Flags {
    values: HashMap<String, String>,
    switches: Vec<String>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, CmdError> {
        let mut values = HashMap::new();
        let mut switches = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            let Some(key) = arg.strip_prefix("--") else {
                return Err(CmdError::usage(format!("unexpected argument `{arg}`")));
            };
            if key == "degrees" {
                switches.push(key.to_string());
                continue;
            }
            let Some(value) = it.next() else {
                return Err(CmdError::usage(format!("--{key} needs a value")));
            };
            if values.insert(key.to_string(), value.clone()).is_some() {
                return Err(CmdError::usage(format!("--{key} given twice")));
            }
        }
        Ok(Flags { values, switches })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key) || self.switches.iter().any(|s| s == key)
    }

    fn value(&self, key: &str) -> Result<&str, CmdError> {
        self.get(key).ok_or_else(|| CmdError::usage(format!("missing --{key}")))
    }

    fn number(&self, key: &str) -> Result<f64, CmdError> {
        let v = self.value(key)?;
        v.parse().map_err(|_| CmdError::usage(format!("bad --{key} value `{v}`")))
    }

    /// Angle flag, converted from degrees at the boundary when requested.
    fn angle(&self, key: &str, unit: AngleUnit) -> Result<f64, CmdError> {
        let v = self.number(key)?;
        Ok(match unit {
            AngleUnit::Radians => v,
            AngleUnit::Degrees => v.to_radians(),
        })
    }

    fn assembly(&self) -> Result<AssemblyMode, CmdError> {
        match self.value("assembly")? {
            "+" => Ok(AssemblyMode(Sign::Positive)),
            "-" => Ok(AssemblyMode(Sign::Negative)),
            other => Err(CmdError::usage(format!("bad --assembly value `{other}`"))),
        }
    }

    fn mode(&self) -> Result<WorkingMode, CmdError> {
        let v = self.value("mode")?;
        WorkingMode::parse(v)
            .ok_or_else(|| CmdError::usage(format!("bad --mode value `{v}`")))
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CmdError> {
        for key in self.values.keys().chain(self.switches.iter()) {
            if !allowed.contains(&key.as_str()) && key != "degrees" {
                return Err(CmdError::usage(format!("unknown option --{key}")));
            }
        }
        Ok(())
    }
}
