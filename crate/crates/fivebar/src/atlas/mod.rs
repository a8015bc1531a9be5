//! Workspace discretization and enumeration of the maximal
//! singularity-free domains per working mode.
//!
//! Within a fixed working mode the inverse kinematics is single-valued,
//! so the product of workspace and joint space restricted to the mode is
//! charted by the workspace position alone: every grid cell carries its
//! unique joint vector. A cell becomes a member of an aspect when its
//! center is strictly feasible and its `det A` sign is reliable; the
//! aspects are the connected same-sign components.
//!
//! Thin sign regions hugging the serial-singularity circles are narrower
//! than a cell over long stretches and would fragment into spurious
//! components at any finite resolution. Labeling therefore distinguishes
//! member cells from *connector* cells: cells excluded for safety (rim
//! margin, separation pass) keep their `det A` sign and may connect two
//! members of the same sign, while cells inside the epsilon windows of a
//! singularity never connect. Component counts are stable from 128x128
//! up for the default geometry under this scheme.

pub mod loci;

pub use loci::{singularity_loci, SingularityLoci};

use crate::geom::Point2;
use crate::kinematics::{inverse_kinematics_with, Geometry, JointConfig, Tolerances};
use crate::singularity::{det_direct, WorkingMode};
use crate::{Error, Sign};

/// Neighborhood used when merging cells into components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    /// Edge neighbors only (default; diagonal contact does not connect,
    /// so one-cell-thin singularity bands keep regions apart).
    Four,
    /// Edge and corner neighbors.
    Eight,
}

/// A rectangular sampling grid over the workspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub connectivity: Connectivity,
}

impl GridSpec {
    /// Default grid for a geometry: covers both leg annuli,
    /// `x in [-(l1+l2), l0+l3+l4]`, `y in [-(l1+l2), l1+l2]`, expanded by
    /// a 5% margin on every side.
    pub fn for_geometry(g: &Geometry, nx: usize, ny: usize) -> GridSpec {
        let reach_a = g.l1 + g.l2;
        let reach_b = g.l3 + g.l4;
        let (x_min, x_max) = (-reach_a, g.l0 + reach_b);
        let (y_min, y_max) = (-reach_a.max(reach_b), reach_a.max(reach_b));
        let mx = 0.05 * (x_max - x_min);
        let my = 0.05 * (y_max - y_min);
        GridSpec {
            x_min: x_min - mx,
            x_max: x_max + mx,
            y_min: y_min - my,
            y_max: y_max + my,
            nx,
            ny,
            connectivity: Connectivity::Four,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.nx < 2 {
            return Err(Error::InvalidGrid("nx"));
        }
        if self.ny < 2 {
            return Err(Error::InvalidGrid("ny"));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::InvalidGrid("x_range"));
        }
        if !(self.y_min.is_finite() && self.y_max.is_finite() && self.y_min < self.y_max) {
            return Err(Error::InvalidGrid("y_range"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    /// Center of cell `(ix, iy)`, `0 <= ix < nx`, `0 <= iy < ny`.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.x_min + (ix as f64 + 0.5) * self.dx(),
            self.y_min + (iy as f64 + 0.5) * self.dy(),
        )
    }

    /// Row-major cell index.
    pub fn cell_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Same ranges at half the resolution, for stability checks. `None`
    /// when halving would drop below 2 cells per axis.
    pub fn halved(&self) -> Option<GridSpec> {
        if self.nx / 2 < 2 || self.ny / 2 < 2 {
            return None;
        }
        Some(GridSpec { nx: self.nx / 2, ny: self.ny / 2, ..*self })
    }
}

/// Joint vector and direct-kinematics determinant sampled at a cell
/// center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSample {
    pub q: JointConfig,
    pub det_a: f64,
}

/// Per-cell classification of one working mode's field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellState {
    /// Center outside a leg annulus: nothing to evaluate.
    Unreachable,
    /// A diagonal factor of `B` vanishes at the center; the mode (and its
    /// joint vector) is ill-defined here.
    ModeBoundary,
    /// `|det A| <= eps_a`: on the parallel singularity. Separates regions
    /// and never connects them.
    SingularBand(CellSample),
    /// Excluded from aspect membership for safety (within one cell
    /// circumradius of a serial rim circle, or demoted by the separation
    /// pass) but sign-carrying: connects same-sign members.
    Margin(CellSample),
    /// Aspect member.
    Interior(CellSample),
}

impl CellState {
    /// Joint vector when the center was solvable in this mode.
    pub fn q(&self) -> Option<JointConfig> {
        match self {
            CellState::SingularBand(s) | CellState::Margin(s) | CellState::Interior(s) => {
                Some(s.q)
            }
            _ => None,
        }
    }

    pub fn det_a(&self) -> Option<f64> {
        match self {
            CellState::SingularBand(s) | CellState::Margin(s) | CellState::Interior(s) => {
                Some(s.det_a)
            }
            _ => None,
        }
    }

    /// True when a joint vector is attached (the reporting notion of
    /// feasibility).
    pub fn feasible(&self) -> bool {
        self.q().is_some()
    }

    /// Reliable sign of `det A`: +-1 for members, 0 for every kind of
    /// boundary or infeasible cell.
    pub fn det_a_sign(&self) -> i8 {
        match self {
            CellState::Interior(s) => {
                if s.det_a > 0.0 {
                    1
                } else {
                    -1
                }
            }
            _ => 0,
        }
    }

    /// Sign usable for connectivity: members and margin cells carry one.
    fn connect_sign(&self) -> Option<Sign> {
        match self {
            CellState::Interior(s) | CellState::Margin(s) => Sign::of(s.det_a),
            _ => None,
        }
    }

    fn is_member(&self) -> bool {
        matches!(self, CellState::Interior(_))
    }
}

/// The sampled field of one working mode.
#[derive(Clone, Debug)]
pub struct ModeField {
    pub grid: GridSpec,
    pub mode: WorkingMode,
    /// Row-major, `grid.cell_count()` entries.
    pub cells: Vec<CellState>,
}

/// Evaluates the inverse kinematics of `mode` at every cell center and
/// classifies the cells. Per-cell failures are data, not errors.
pub fn sample_workspace(
    g: &Geometry,
    grid: &GridSpec,
    mode: WorkingMode,
    tol: &Tolerances,
) -> Result<ModeField, Error> {
    grid.validate()?;
    let (inner_a, outer_a) = g.annulus_a();
    let (inner_b, outer_b) = g.annulus_b();
    // Whole-cell containment margin: half the cell diagonal.
    let rc = 0.5 * grid.dx().hypot(grid.dy());
    let mut cells = Vec::with_capacity(grid.cell_count());
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let center = grid.cell_center(ix, iy);
            let da = center.dist(g.base_a());
            let db = center.dist(g.base_b());
            if !(inner_a..=outer_a).contains(&da) || !(inner_b..=outer_b).contains(&db) {
                cells.push(CellState::Unreachable);
                continue;
            }
            let cfg = match inverse_kinematics_with(g, center, mode, tol) {
                Ok(cfg) => cfg,
                Err(Error::ModeBoundary) => {
                    cells.push(CellState::ModeBoundary);
                    continue;
                }
                Err(_) => {
                    cells.push(CellState::Unreachable);
                    continue;
                }
            };
            let sample = CellSample { q: cfg.q, det_a: det_direct(&cfg) };
            if sample.det_a.abs() <= tol.eps_a {
                cells.push(CellState::SingularBand(sample));
            } else if da < inner_a + rc || da > outer_a - rc || db < inner_b + rc || db > outer_b - rc
            {
                cells.push(CellState::Margin(sample));
            } else {
                cells.push(CellState::Interior(sample));
            }
        }
    }
    let mut field = ModeField { grid: *grid, mode, cells };
    separation_pass(&mut field);
    Ok(field)
}

/// Demotes both cells of every 4-adjacent opposite-sign member pair to
/// margin status, so no two labeled cells of opposite sign ever touch.
fn separation_pass(field: &mut ModeField) {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let mut demote = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let i = iy * nx + ix;
            let si = match &field.cells[i] {
                CellState::Interior(s) => s.det_a,
                _ => continue,
            };
            let mut check = |j: usize| {
                if let CellState::Interior(s) = &field.cells[j] {
                    if (si > 0.0) != (s.det_a > 0.0) {
                        demote.push(i);
                        demote.push(j);
                    }
                }
            };
            if ix + 1 < nx {
                check(i + 1);
            }
            if iy + 1 < ny {
                check(i + nx);
            }
        }
    }
    for i in demote {
        if let CellState::Interior(s) = field.cells[i] {
            field.cells[i] = CellState::Margin(s);
        }
    }
}

/// Identity of one generalized aspect: working mode, `det A` sign, and a
/// dense per-(mode, sign) component index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AspectId {
    pub mode: WorkingMode,
    pub det_sign: Sign,
    pub index: usize,
}

impl std::fmt::Display for AspectId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}{}", self.mode, self.det_sign.letter(), self.index)
    }
}

/// One labeled aspect: its member cells and bounding box.
#[derive(Clone, Debug)]
pub struct Aspect {
    pub id: AspectId,
    /// Row-major indices of the member cells.
    pub cells: Vec<usize>,
    /// `[x_min, y_min, x_max, y_max]` over the member cell rectangles.
    pub bbox: [f64; 4],
}

/// A sampled field with its aspects labeled.
#[derive(Clone, Debug)]
pub struct LabeledField {
    pub field: ModeField,
    /// Per cell: position of the aspect in `aspects`, members only.
    pub labels: Vec<Option<usize>>,
    /// Ordered by sign (positive first), then by smallest member cell.
    pub aspects: Vec<Aspect>,
}

/// Labels the connected same-sign components of a sampled field.
///
/// Flood fill runs over members and connectors of equal sign using the
/// grid's connectivity; only member cells become part of an aspect, and a
/// component without members is dropped. Numbering is deterministic:
/// components are ordered by their smallest (row-major) member cell,
/// densely per (mode, sign).
pub fn label_aspects(field: ModeField) -> LabeledField {
    let grid = field.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let mut visited = vec![false; field.cells.len()];
    let mut components: Vec<(Sign, Vec<usize>)> = Vec::new();

    let mut stack = Vec::new();
    for start in 0..field.cells.len() {
        if visited[start] {
            continue;
        }
        let sign = match field.cells[start].connect_sign() {
            Some(s) => s,
            None => continue,
        };
        visited[start] = true;
        stack.push(start);
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            if field.cells[i].is_member() {
                members.push(i);
            }
            let (ix, iy) = (i % nx, i / nx);
            let mut visit = |jx: isize, jy: isize| {
                if jx < 0 || jy < 0 || jx >= nx as isize || jy >= ny as isize {
                    return;
                }
                let j = jy as usize * nx + jx as usize;
                if !visited[j] && field.cells[j].connect_sign() == Some(sign) {
                    visited[j] = true;
                    stack.push(j);
                }
            };
            let (ix, iy) = (ix as isize, iy as isize);
            visit(ix - 1, iy);
            visit(ix + 1, iy);
            visit(ix, iy - 1);
            visit(ix, iy + 1);
            if grid.connectivity == Connectivity::Eight {
                visit(ix - 1, iy - 1);
                visit(ix + 1, iy - 1);
                visit(ix - 1, iy + 1);
                visit(ix + 1, iy + 1);
            }
        }
        if !members.is_empty() {
            members.sort_unstable();
            components.push((sign, members));
        }
    }

    // Deterministic numbering: positive sign first, then by the smallest
    // member cell in row-major order.
    components.sort_by_key(|(sign, members)| (*sign == Sign::Negative, members[0]));
    let mut labels = vec![None; field.cells.len()];
    let mut counters = [0usize; 2];
    let mut aspects = Vec::with_capacity(components.len());
    for (sign, members) in components {
        let slot = if sign == Sign::Positive { 0 } else { 1 };
        let id = AspectId { mode: field.mode, det_sign: sign, index: counters[slot] };
        counters[slot] += 1;
        let aspect_pos = aspects.len();
        let mut bbox = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let (hx, hy) = (0.5 * grid.dx(), 0.5 * grid.dy());
        for &i in &members {
            labels[i] = Some(aspect_pos);
            let c = grid.cell_center(i % nx, i / nx);
            bbox[0] = bbox[0].min(c.x - hx);
            bbox[1] = bbox[1].min(c.y - hy);
            bbox[2] = bbox[2].max(c.x + hx);
            bbox[3] = bbox[3].max(c.y + hy);
        }
        aspects.push(Aspect { id, cells: members, bbox });
    }
    LabeledField { field, labels, aspects }
}

impl LabeledField {
    fn find(&self, id: &AspectId) -> Result<&Aspect, Error> {
        self.aspects.iter().find(|a| a.id == *id).ok_or(Error::UnknownAspect)
    }

    /// Workspace projection of an aspect: the member cell centers.
    pub fn project_to_workspace(&self, id: &AspectId) -> Result<Vec<Point2>, Error> {
        let aspect = self.find(id)?;
        let grid = &self.field.grid;
        Ok(aspect
            .cells
            .iter()
            .map(|&i| grid.cell_center(i % grid.nx, i / grid.nx))
            .collect())
    }

    /// Joint-space projection of an aspect: the stored joint vectors of
    /// the member cells, wrapped to the torus (-pi, pi]^2.
    pub fn project_to_jointspace(&self, id: &AspectId) -> Result<Vec<JointConfig>, Error> {
        let aspect = self.find(id)?;
        Ok(aspect
            .cells
            .iter()
            .map(|&i| self.field.cells[i].q().expect("member cells carry q"))
            .collect())
    }
}

/// One row of the aspect count table: a sign pattern of
/// `(det A, B11, B22)` and the number of aspects carrying it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternRow {
    pub det_a: Sign,
    pub b11: Sign,
    pub b22: Sign,
    pub count: usize,
}

/// All eight sign patterns in the fixed report order: positive `det A`
/// first, then modes in `++, +-, -+, --` order.
pub fn pattern_order() -> [(Sign, WorkingMode); 8] {
    let mut out = [(Sign::Positive, WorkingMode::PP); 8];
    let mut k = 0;
    for det in [Sign::Positive, Sign::Negative] {
        for mode in WorkingMode::ALL {
            out[k] = (det, mode);
            k += 1;
        }
    }
    out
}

/// Aggregated atlas results: the count table and per-aspect summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct AspectReport {
    pub geometry: Geometry,
    pub grid: GridSpec,
    /// Eight rows in [`pattern_order`] order.
    pub rows: Vec<PatternRow>,
    pub total: usize,
    pub aspects: Vec<AspectSummary>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AspectSummary {
    pub id: AspectId,
    pub cell_count: usize,
    pub bbox: [f64; 4],
}

/// The four labeled mode fields plus the aggregated report.
#[derive(Clone, Debug)]
pub struct Atlas {
    /// One labeled field per working mode, in `WorkingMode::ALL` order.
    pub fields: Vec<LabeledField>,
    pub report: AspectReport,
}

/// Samples and labels all four working modes and aggregates the count
/// table. A `ResolutionUnstable` warning is attached when the counts
/// differ from a run at half resolution.
pub fn compute_atlas(g: &Geometry, grid: &GridSpec, tol: &Tolerances) -> Result<Atlas, Error> {
    grid.validate()?;
    let fields = label_all(g, grid, tol)?;
    let rows = count_rows(&fields);
    let total = rows.iter().map(|r| r.count).sum();
    let mut warnings = Vec::new();
    if let Some(half) = grid.halved() {
        let half_rows = count_rows(&label_all(g, &half, tol)?);
        if half_rows != rows {
            warnings.push(format!(
                "ResolutionUnstable: aspect counts at {}x{} differ from {}x{}",
                grid.nx, grid.ny, half.nx, half.ny
            ));
        }
    }
    let aspects = fields
        .iter()
        .flat_map(|f| f.aspects.iter())
        .map(|a| AspectSummary { id: a.id, cell_count: a.cells.len(), bbox: a.bbox })
        .collect();
    let report = AspectReport { geometry: *g, grid: *grid, rows, total, aspects, warnings };
    Ok(Atlas { fields, report })
}

/// The count table alone; see [`compute_atlas`].
pub fn enumerate_generalized_aspects(
    g: &Geometry,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<AspectReport, Error> {
    Ok(compute_atlas(g, grid, tol)?.report)
}

fn label_all(g: &Geometry, grid: &GridSpec, tol: &Tolerances) -> Result<Vec<LabeledField>, Error> {
    WorkingMode::ALL
        .iter()
        .map(|&mode| Ok(label_aspects(sample_workspace(g, grid, mode, tol)?)))
        .collect()
}

fn count_rows(fields: &[LabeledField]) -> Vec<PatternRow> {
    pattern_order()
        .iter()
        .map(|&(det, mode)| {
            let count = fields
                .iter()
                .filter(|f| f.field.mode == mode)
                .flat_map(|f| f.aspects.iter())
                .filter(|a| a.id.det_sign == det)
                .count();
            PatternRow { det_a: det, b11: mode.signs[0], b22: mode.signs[1], count }
        })
        .collect()
}
