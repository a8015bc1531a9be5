//! SVG rendering of one working mode: a workspace panel (aspect cells,
//! singularity curves, base frame) and a joint-space panel (aspect
//! images on the torus, parallel-curve image).
//!
//! Coordinates are y-up; one length unit maps to `px_per_unit` pixels.
//! The joint panel spans (-pi, pi]^2.

use std::fmt::Write as _;

use fivebar::atlas::{CellState, LabeledField, SingularityLoci};
use fivebar::geom::Point2;
use fivebar::kinematics::{inverse_kinematics_with, Geometry, Tolerances};
use fivebar::singularity::WorkingMode;
use fivebar::Sign;

/// Colors and scales of the plots.
#[derive(Clone, Debug)]
pub struct PlotStyle {
    /// One color per (det A, B11, B22) sign pattern, see [`pattern_index`].
    pub pattern_colors: [&'static str; 8],
    /// Excluded cells (margins, singularity bands, mode boundaries).
    pub excluded_color: &'static str,
    pub parallel_stroke: &'static str,
    pub serial_stroke: &'static str,
    pub px_per_unit: f64,
    pub margin_px: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            pattern_colors: [
                "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                "#17becf",
            ],
            excluded_color: "#d8d8d8",
            parallel_stroke: "#000000",
            serial_stroke: "#666666",
            px_per_unit: 40.0,
            margin_px: 30.0,
        }
    }
}

/// Index of a sign pattern in the 8-color table: `P` bits are 0.
pub fn pattern_index(det: Sign, mode: WorkingMode) -> usize {
    let bit = |s: Sign| usize::from(s == Sign::Negative);
    bit(det) * 4 + bit(mode.signs[0]) * 2 + bit(mode.signs[1])
}

/// Renders one mode as a two-panel SVG document.
pub fn render_mode_svg(
    g: &Geometry,
    labeled: &LabeledField,
    loci: &SingularityLoci,
    tol: &Tolerances,
    style: &PlotStyle,
) -> String {
    let grid = &labeled.field.grid;
    let mode = labeled.field.mode;
    let s = style.px_per_unit;
    let m = style.margin_px;
    let ws_w = (grid.x_max - grid.x_min) * s;
    let ws_h = (grid.y_max - grid.y_min) * s;
    let js_side = ws_h;
    let total_w = m + ws_w + m + js_side + m;
    let total_h = m + ws_h + m + 20.0;

    // Workspace transform (y-up).
    let wx = |x: f64| m + (x - grid.x_min) * s;
    let wy = |y: f64| m + (grid.y_max - y) * s;
    // Joint-space transform over (-pi, pi]^2 (y-up).
    let js_x0 = m + ws_w + m;
    let pi = std::f64::consts::PI;
    let jx = |t1: f64| js_x0 + (t1 + pi) / (2.0 * pi) * js_side;
    let jy = |t2: f64| m + (pi - t2) / (2.0 * pi) * js_side;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg version="1.1" width="{:.0}" height="{:.0}" xmlns="http://www.w3.org/2000/svg">"#,
        total_w, total_h
    );
    let _ = writeln!(
        out,
        "<!-- mode {mode}; y-up; 1 length unit = {s} px; right panel spans (-pi, pi]^2 -->"
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Workspace cells, merged into horizontal runs of equal fill.
    let fill_of = |i: usize| -> Option<&'static str> {
        match &labeled.field.cells[i] {
            CellState::Unreachable => None,
            CellState::Interior(sample) => {
                let sign = if sample.det_a > 0.0 { Sign::Positive } else { Sign::Negative };
                Some(style.pattern_colors[pattern_index(sign, mode)])
            }
            _ => Some(style.excluded_color),
        }
    };
    let (dx, dy) = (grid.dx(), grid.dy());
    for iy in 0..grid.ny {
        let mut run_start = 0usize;
        let mut run_fill: Option<&'static str> = None;
        for ix in 0..=grid.nx {
            let fill = if ix < grid.nx { fill_of(grid.cell_index(ix, iy)) } else { None };
            if fill != run_fill {
                if let Some(color) = run_fill {
                    let x0 = grid.x_min + run_start as f64 * dx;
                    let x1 = grid.x_min + ix as f64 * dx;
                    let y1 = grid.y_min + (iy + 1) as f64 * dy;
                    let _ = writeln!(
                        out,
                        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                        wx(x0),
                        wy(y1),
                        (x1 - x0) * s,
                        dy * s,
                        color
                    );
                }
                run_start = ix;
                run_fill = fill;
            }
        }
    }

    // Singularity curves.
    for line in &loci.serial {
        write_polyline(&mut out, line, &wx, &wy, style.serial_stroke, "1.2", true);
    }
    for line in &loci.parallel {
        write_polyline(&mut out, line, &wx, &wy, style.parallel_stroke, "1.5", false);
    }

    // Base frame: the segment AB and its anchors.
    let a = g.base_a();
    let b = g.base_b();
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#222" stroke-width="2"/>"##,
        wx(a.x),
        wy(a.y),
        wx(b.x),
        wy(b.y)
    );
    for anchor in [a, b] {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#222"/>"##,
            wx(anchor.x),
            wy(anchor.y)
        );
    }

    // Joint-space occupancy, binned over the torus and RLE-merged.
    let bins = 256usize;
    let bin = |t: f64| (((t + pi) / (2.0 * pi) * bins as f64).floor() as usize).min(bins - 1);
    let mut occupancy = vec![[false; 2]; bins * bins];
    for (i, cell) in labeled.field.cells.iter().enumerate() {
        if labeled.labels[i].is_none() {
            continue;
        }
        if let CellState::Interior(sample) = cell {
            let slot = usize::from(sample.det_a < 0.0);
            occupancy[bin(sample.q.theta2) * bins + bin(sample.q.theta1)][slot] = true;
        }
    }
    let bin_px = js_side / bins as f64;
    for (slot, det) in [(0usize, Sign::Positive), (1usize, Sign::Negative)] {
        let color = style.pattern_colors[pattern_index(det, mode)];
        for by in 0..bins {
            let mut run_start = 0usize;
            let mut active = false;
            for bx in 0..=bins {
                let on = bx < bins && occupancy[by * bins + bx][slot];
                if on != active {
                    if active {
                        let _ = writeln!(
                            out,
                            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.55"/>"#,
                            js_x0 + run_start as f64 * bin_px,
                            m + js_side - (by + 1) as f64 * bin_px,
                            (bx - run_start) as f64 * bin_px,
                            bin_px,
                            color
                        );
                    }
                    run_start = bx;
                    active = on;
                }
            }
        }
    }

    // Image of the parallel curves in joint space, split at wrap jumps
    // and wherever the inverse kinematics fails.
    for line in &loci.parallel {
        let mut piece: Vec<Point2> = Vec::new();
        for p in line {
            match inverse_kinematics_with(g, *p, mode, tol) {
                Ok(cfg) => {
                    let q = Point2::new(cfg.q.theta1, cfg.q.theta2);
                    if let Some(last) = piece.last() {
                        if (last.x - q.x).abs() > 1.0 || (last.y - q.y).abs() > 1.0 {
                            write_polyline(&mut out, &piece, &jx, &jy, style.parallel_stroke, "1.0", false);
                            piece.clear();
                        }
                    }
                    piece.push(q);
                }
                Err(_) => {
                    write_polyline(&mut out, &piece, &jx, &jy, style.parallel_stroke, "1.0", false);
                    piece.clear();
                }
            }
        }
        write_polyline(&mut out, &piece, &jx, &jy, style.parallel_stroke, "1.0", false);
    }

    // Panel frames and captions.
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        m, m, ws_w, ws_h
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        js_x0, m, js_side, js_side
    );
    let caption_y = m + ws_h + 16.0;
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="13">workspace, mode {}</text>"#,
        m, caption_y, mode
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="13">joint space (theta1, theta2), mode {}</text>"#,
        js_x0, caption_y, mode
    );
    out.push_str("</svg>\n");
    out
}

fn write_polyline<FX, FY>(
    out: &mut String,
    line: &[Point2],
    fx: &FX,
    fy: &FY,
    stroke: &str,
    width: &str,
    dashed: bool,
) where
    FX: Fn(f64) -> f64,
    FY: Fn(f64) -> f64,
{
    if line.len() < 2 {
        return;
    }
    let mut points = String::new();
    for p in line {
        let _ = write!(points, "{:.2},{:.2} ", fx(p.x), fy(p.y));
    }
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="{}"{} points="{}"/>"#,
        stroke,
        width,
        dash,
        points.trim_end()
    );
}
