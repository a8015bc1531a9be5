//! On-disk report schemas: `report.json` and `grid.csv`.
//!
//! `report.json` mirrors the in-memory [`AspectReport`] field for field,
//! so a re-parsed report compares equal to the freshly built one.
//! `grid.csv` has the header `x,y,mode,feasible,detA_sign,label` and one
//! row per cell per working mode (mode-major, then row-major cells).

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use fivebar::atlas::{AspectReport, Atlas, Connectivity};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub geometry: JsonGeometry,
    pub grid: JsonGrid,
    pub rows: Vec<JsonRow>,
    pub total: usize,
    pub aspects: Vec<JsonAspect>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonGeometry {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub connectivity: u8,
}

/// One row of the count table; signs spelled `P`/`N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonRow {
    #[serde(rename = "detA")]
    pub det_a: String,
    pub b11: String,
    pub b22: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonAspect {
    /// E.g. `"+-:P1"`: mode, det-sign letter, per-sign index.
    pub id: String,
    pub mode: String,
    pub sign: String,
    pub cells: usize,
    pub bbox: [f64; 4],
}

impl From<&AspectReport> for JsonReport {
    fn from(r: &AspectReport) -> Self {
        JsonReport {
            geometry: JsonGeometry {
                l0: r.geometry.l0,
                l1: r.geometry.l1,
                l2: r.geometry.l2,
                l3: r.geometry.l3,
                l4: r.geometry.l4,
            },
            grid: JsonGrid {
                x_min: r.grid.x_min,
                x_max: r.grid.x_max,
                y_min: r.grid.y_min,
                y_max: r.grid.y_max,
                nx: r.grid.nx,
                ny: r.grid.ny,
                connectivity: match r.grid.connectivity {
                    Connectivity::Four => 4,
                    Connectivity::Eight => 8,
                },
            },
            rows: r
                .rows
                .iter()
                .map(|row| JsonRow {
                    det_a: row.det_a.letter().to_string(),
                    b11: row.b11.letter().to_string(),
                    b22: row.b22.letter().to_string(),
                    count: row.count,
                })
                .collect(),
            total: r.total,
            aspects: r
                .aspects
                .iter()
                .map(|a| JsonAspect {
                    id: a.id.to_string(),
                    mode: a.id.mode.to_string(),
                    sign: a.id.det_sign.letter().to_string(),
                    cells: a.cell_count,
                    bbox: a.bbox,
                })
                .collect(),
            warnings: r.warnings.clone(),
        }
    }
}

/// Serializes the report as pretty-printed JSON.
pub fn report_json(report: &AspectReport) -> String {
    let mut s = serde_json::to_string_pretty(&JsonReport::from(report))
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Writes `grid.csv`: `nx * ny * 4` data rows under the fixed header.
/// Cell labels are spelled like `P0`/`N1`, `-` for unlabeled cells.
pub fn write_grid_csv<W: Write>(atlas: &Atlas, mut w: W) -> io::Result<()> {
    writeln!(w, "x,y,mode,feasible,detA_sign,label")?;
    for labeled in &atlas.fields {
        let grid = &labeled.field.grid;
        let mode = labeled.field.mode.to_string();
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let i = grid.cell_index(ix, iy);
                let center = grid.cell_center(ix, iy);
                let cell = &labeled.field.cells[i];
                let label = match labeled.labels[i] {
                    Some(pos) => {
                        let id = labeled.aspects[pos].id;
                        format!("{}{}", id.det_sign.letter(), id.index)
                    }
                    None => "-".to_string(),
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    center.x,
                    center.y,
                    mode,
                    u8::from(cell.feasible()),
                    cell.det_a_sign(),
                    label
                )?;
            }
        }
    }
    Ok(())
}
