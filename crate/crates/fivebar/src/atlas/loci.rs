//! Singularity curve extraction.
//!
//! Parallel-singularity curves are the zero isolines of the sampled
//! `det A` field of a working mode, traced with marching squares over
//! the cell-center lattice. Serial-singularity curves are exact circles
//! (stretched/folded legs) emitted analytically and clipped to the grid.

use std::collections::HashMap;

use super::{sample_workspace, GridSpec, ModeField};
use crate::geom::Point2;
use crate::kinematics::{Geometry, Tolerances};
use crate::singularity::WorkingMode;
use crate::Error;

/// Polylines of the two singularity families, in workspace coordinates.
#[derive(Clone, Debug, Default)]
pub struct SingularityLoci {
    /// Zero-level isolines of `det A` over the mode's feasible region.
    pub parallel: Vec<Vec<Point2>>,
    /// The circles `|p - a| = l1 +- l2` and `|p - b| = l3 +- l4`,
    /// clipped to the grid rectangle.
    pub serial: Vec<Vec<Point2>>,
}

/// Samples the mode and extracts both curve families.
pub fn singularity_loci(
    g: &Geometry,
    grid: &GridSpec,
    mode: WorkingMode,
    tol: &Tolerances,
) -> Result<SingularityLoci, Error> {
    let field = sample_workspace(g, grid, mode, tol)?;
    Ok(SingularityLoci {
        parallel: parallel_isolines(&field),
        serial: serial_circles(g, grid),
    })
}

/// Marching squares at level zero over the sampled `det A` values.
/// Squares touching cells without a determinant value are skipped.
pub fn parallel_isolines(field: &ModeField) -> Vec<Vec<Point2>> {
    let grid = &field.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let value = |ix: usize, iy: usize| field.cells[iy * nx + ix].det_a();
    let mut segments: Vec<(Point2, Point2)> = Vec::new();

    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let (bl, br, tl, tr) = match (
                value(ix, iy),
                value(ix + 1, iy),
                value(ix, iy + 1),
                value(ix + 1, iy + 1),
            ) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => continue,
            };
            let mut case = 0u8;
            if bl > 0.0 {
                case |= 1;
            }
            if br > 0.0 {
                case |= 2;
            }
            if tr > 0.0 {
                case |= 4;
            }
            if tl > 0.0 {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }
            let p = |jx: usize, jy: usize| grid.cell_center(jx, jy);
            // Zero crossings on the four square edges; the node order is
            // fixed so adjacent squares compute bit-identical points.
            let south = || lerp_zero(p(ix, iy), bl, p(ix + 1, iy), br);
            let north = || lerp_zero(p(ix, iy + 1), tl, p(ix + 1, iy + 1), tr);
            let west = || lerp_zero(p(ix, iy), bl, p(ix, iy + 1), tl);
            let east = || lerp_zero(p(ix + 1, iy), br, p(ix + 1, iy + 1), tr);
            let mut emit = |a: Point2, b: Point2| {
                if a != b {
                    segments.push((a, b));
                }
            };
            match case {
                1 | 14 => emit(west(), south()),
                2 | 13 => emit(south(), east()),
                3 | 12 => emit(west(), east()),
                4 | 11 => emit(east(), north()),
                6 | 9 => emit(south(), north()),
                7 | 8 => emit(west(), north()),
                5 | 10 => {
                    // Saddle: disambiguate with the center average.
                    let positive_center = bl + br + tl + tr > 0.0;
                    if (case == 5) == positive_center {
                        emit(west(), north());
                        emit(south(), east());
                    } else {
                        emit(west(), south());
                        emit(east(), north());
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    chain_segments(segments)
}

fn lerp_zero(pa: Point2, va: f64, pb: Point2, vb: f64) -> Point2 {
    let t = va / (va - vb);
    pa + (pb - pa) * t
}

fn key(p: Point2) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

/// Joins segments that share endpoints into polylines. Segments are
/// treated as undirected; closed loops come back to their start point.
fn chain_segments(segments: Vec<(Point2, Point2)>) -> Vec<Vec<Point2>> {
    let mut adjacency: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(key(*a)).or_default().push(i);
        adjacency.entry(key(*b)).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut line = vec![a, b];
        // Extend at the tail, then at the head.
        for head in [false, true] {
            loop {
                let tip = if head { line[0] } else { *line.last().unwrap() };
                let next = adjacency
                    .get(&key(tip))
                    .and_then(|ids| ids.iter().copied().find(|&i| !used[i]));
                let Some(i) = next else { break };
                used[i] = true;
                let (sa, sb) = segments[i];
                let far = if key(sa) == key(tip) { sb } else { sa };
                if head {
                    line.insert(0, far);
                } else {
                    line.push(far);
                }
                if key(*line.last().unwrap()) == key(line[0]) {
                    break; // closed loop
                }
            }
        }
        polylines.push(line);
    }
    polylines
}

/// The four serial-singularity circles, sampled and clipped to the grid
/// rectangle. Degenerate (zero-radius) circles are skipped.
pub fn serial_circles(g: &Geometry, grid: &GridSpec) -> Vec<Vec<Point2>> {
    let (inner_a, outer_a) = g.annulus_a();
    let (inner_b, outer_b) = g.annulus_b();
    let circles = [
        (g.base_a(), outer_a),
        (g.base_a(), inner_a),
        (g.base_b(), outer_b),
        (g.base_b(), inner_b),
    ];
    let steps = 4 * grid.nx.max(grid.ny).max(64);
    let inside = |p: Point2| {
        p.x >= grid.x_min && p.x <= grid.x_max && p.y >= grid.y_min && p.y <= grid.y_max
    };
    let mut out = Vec::new();
    for (center, radius) in circles {
        if radius <= 0.0 {
            continue;
        }
        let pts: Vec<Point2> = (0..=steps)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
                center + Point2::from_angle(t) * radius
            })
            .collect();
        // Split into maximal runs inside the grid rectangle.
        let mut run: Vec<Point2> = Vec::new();
        for p in pts {
            if inside(p) {
                run.push(p);
            } else if run.len() > 1 {
                out.push(std::mem::take(&mut run));
            } else {
                run.clear();
            }
        }
        if run.len() > 1 {
            out.push(run);
        }
    }
    out
}
