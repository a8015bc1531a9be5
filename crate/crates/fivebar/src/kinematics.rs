//! Closed-form position kinematics of the five-bar.
//!
//! Leg 1 runs from base point `A = (0, 0)` through its elbow `C` to the
//! coupler point `P` with link lengths `l1` (proximal) and `l2` (distal);
//! leg 2 runs from `B = (l0, 0)` through `D` with lengths `l3`, `l4`.
//! `theta1`/`theta2` are the actuated base angles, `theta3`/`theta4` the
//! absolute angles of the distal links, all measured from the +x axis.

use crate::geom::{wrap_angle, Point2};
use crate::singularity::WorkingMode;
use crate::{Error, Sign};

/// Relative scale of the "exactly on a boundary" window for reachability,
/// sign degeneracy and tangency decisions.
const BOUNDARY_REL_EPS: f64 = 1e-9;

/// The five link lengths. Base anchors are fixed at `A = (0, 0)` and
/// `B = (l0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    /// Base spacing |AB|.
    pub l0: f64,
    /// Leg 1 proximal length |AC|.
    pub l1: f64,
    /// Leg 1 distal length |CP|.
    pub l2: f64,
    /// Leg 2 proximal length |BD|.
    pub l3: f64,
    /// Leg 2 distal length |DP|.
    pub l4: f64,
}

impl Default for Geometry {
    /// The dimensions used as the running example throughout the crate:
    /// `(l0, l1, l2, l3, l4) = (9, 8, 5, 5, 8)`.
    fn default() -> Self {
        Geometry { l0: 9.0, l1: 8.0, l2: 5.0, l3: 5.0, l4: 8.0 }
    }
}

impl Geometry {
    /// Validates that all five lengths are strictly positive and finite.
    pub fn new(l0: f64, l1: f64, l2: f64, l3: f64, l4: f64) -> Result<Self, Error> {
        let fields = [("l0", l0), ("l1", l1), ("l2", l2), ("l3", l3), ("l4", l4)];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(name));
            }
        }
        Ok(Geometry { l0, l1, l2, l3, l4 })
    }

    pub fn base_a(&self) -> Point2 {
        Point2::ORIGIN
    }

    pub fn base_b(&self) -> Point2 {
        Point2::new(self.l0, 0.0)
    }

    pub fn max_length(&self) -> f64 {
        self.l0.max(self.l1).max(self.l2).max(self.l3).max(self.l4)
    }

    /// Annulus of leg 1 about `A`: `[|l1 - l2|, l1 + l2]`.
    pub fn annulus_a(&self) -> (f64, f64) {
        ((self.l1 - self.l2).abs(), self.l1 + self.l2)
    }

    /// Annulus of leg 2 about `B`: `[|l3 - l4|, l3 + l4]`.
    pub fn annulus_b(&self) -> (f64, f64) {
        ((self.l3 - self.l4).abs(), self.l3 + self.l4)
    }

    /// True when the two leg annuli do not intersect, i.e. no point is
    /// reachable by both legs and the workspace is empty.
    pub fn workspace_is_empty(&self) -> bool {
        let (ra, oa) = self.annulus_a();
        let (rb, ob) = self.annulus_b();
        let d = self.l0;
        d > oa + ob || d + oa < rb || d + ob < ra
    }

    /// True when `p` lies inside both leg annuli (boundaries included).
    pub fn reachable(&self, p: Point2) -> bool {
        let (ra, oa) = self.annulus_a();
        let (rb, ob) = self.annulus_b();
        let da = p.dist(self.base_a());
        let db = p.dist(self.base_b());
        ra <= da && da <= oa && rb <= db && db <= ob
    }
}

/// Actuated joint angles, wrapped to (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointConfig {
    pub theta1: f64,
    pub theta2: f64,
}

impl JointConfig {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        JointConfig { theta1: wrap_angle(theta1), theta2: wrap_angle(theta2) }
    }
}

/// Absolute angles of the two distal links, wrapped to (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PassiveAngles {
    pub theta3: f64,
    pub theta4: f64,
}

impl PassiveAngles {
    pub fn new(theta3: f64, theta4: f64) -> Self {
        PassiveAngles { theta3: wrap_angle(theta3), theta4: wrap_angle(theta4) }
    }
}

/// Direct-kinematics branch: which of the two intersection points of the
/// distal circles assembles the platform. The label equals the sign of
/// `det A = (p - c) x (p - d)`, which vanishes exactly on the parallel
/// singularity, so the branch label degenerates precisely where the two
/// solutions meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssemblyMode(pub Sign);

impl AssemblyMode {
    pub const POSITIVE: AssemblyMode = AssemblyMode(Sign::Positive);
    pub const NEGATIVE: AssemblyMode = AssemblyMode(Sign::Negative);
}

/// A consistent configuration of the whole linkage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullConfig {
    pub geometry: Geometry,
    pub q: JointConfig,
    pub passive: PassiveAngles,
    pub p: Point2,
}

impl FullConfig {
    /// Elbow of leg 1: `C = A + l1 * (cos theta1, sin theta1)`.
    pub fn elbow_a(&self) -> Point2 {
        self.geometry.base_a() + Point2::from_angle(self.q.theta1) * self.geometry.l1
    }

    /// Elbow of leg 2: `D = B + l3 * (cos theta2, sin theta2)`.
    pub fn elbow_b(&self) -> Point2 {
        self.geometry.base_b() + Point2::from_angle(self.q.theta2) * self.geometry.l3
    }

    /// Loop-closure residual: the larger of `| |p - c| - l2 |` and
    /// `| |p - d| - l4 |`. Zero for consistent configurations.
    pub fn closure_residual(&self) -> f64 {
        let e1 = (self.p.dist(self.elbow_a()) - self.geometry.l2).abs();
        let e2 = (self.p.dist(self.elbow_b()) - self.geometry.l4).abs();
        e1.max(e2)
    }

    /// True when the closure residual is within `tol.residual`.
    pub fn is_consistent(&self, tol: &Tolerances) -> bool {
        self.closure_residual() <= tol.residual
    }
}

/// Numerical thresholds, scaled from the geometry so that determinant and
/// residual comparisons stay dimensionally consistent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Degeneracy window for `det A`, natural scale `l2 * l4`.
    pub eps_a: f64,
    /// Degeneracy window for the diagonal factors of `B`, natural scale
    /// `max(l1*l2, l3*l4)`.
    pub eps_b: f64,
    /// Positional closure tolerance, natural scale `max(l0..l4)`.
    pub residual: f64,
}

impl Tolerances {
    pub fn for_geometry(g: &Geometry) -> Self {
        Tolerances {
            eps_a: BOUNDARY_REL_EPS * g.l2 * g.l4,
            eps_b: BOUNDARY_REL_EPS * (g.l1 * g.l2).max(g.l3 * g.l4),
            residual: BOUNDARY_REL_EPS * g.max_length(),
        }
    }
}

/// Optional intervals for the actuated joints; `None` is the full
/// torus. The passive joints are always unlimited. An interval is given
/// as wrapped endpoints `(lo, hi)` in (-pi, pi]; `lo > hi` denotes an
/// interval crossing the branch cut at pi.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ActuatedLimits {
    pub theta1: Option<(f64, f64)>,
    pub theta2: Option<(f64, f64)>,
}

impl ActuatedLimits {
    pub const UNLIMITED: ActuatedLimits = ActuatedLimits { theta1: None, theta2: None };

    pub fn allows(&self, q: &JointConfig) -> bool {
        fn within(theta: f64, limit: Option<(f64, f64)>) -> bool {
            match limit {
                None => true,
                Some((lo, hi)) => {
                    let (t, lo, hi) = (wrap_angle(theta), wrap_angle(lo), wrap_angle(hi));
                    if lo <= hi {
                        lo <= t && t <= hi
                    } else {
                        t >= lo || t <= hi
                    }
                }
            }
        }
        within(q.theta1, self.theta1) && within(q.theta2, self.theta2)
    }
}

/// One leg solved for a target point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegSolution {
    /// Angle of the proximal link (the actuated joint).
    pub actuated: f64,
    /// Absolute angle of the distal link.
    pub passive: f64,
    /// Set when the leg is (numerically) fully stretched or folded, i.e.
    /// both elbow branches coincide.
    pub boundary: bool,
}

/// Two-link inverse kinematics of a single leg.
///
/// `branch` requests the sign of `sin(passive - actuated)`, the factor
/// that appears on the corresponding diagonal entry of the
/// inverse-kinematics matrix. The reconstruction
/// `anchor + proximal*(cos a, sin a) + distal*(cos p, sin p)` lands on
/// `target` to floating-point accuracy.
pub fn leg_ik(
    anchor: Point2,
    proximal: f64,
    distal: f64,
    target: Point2,
    branch: Sign,
) -> Result<LegSolution, Error> {
    let w = target - anchor;
    let r = w.norm();
    let outer = proximal + distal;
    let inner = (proximal - distal).abs();
    let eps_r = BOUNDARY_REL_EPS * outer;
    if r > outer + eps_r || r < inner - eps_r {
        return Err(Error::Unreachable);
    }
    // Law of cosines for the elbow opening gamma = passive - actuated.
    let cos_g = ((r * r - proximal * proximal - distal * distal) / (2.0 * proximal * distal))
        .clamp(-1.0, 1.0);
    let gamma = branch.factor() * cos_g.acos();
    let boundary = gamma.sin().abs() <= BOUNDARY_REL_EPS;
    // Angle of the target seen from the anchor, minus the offset of the
    // two-link sum relative to the proximal direction.
    let phi = w.y.atan2(w.x);
    let alpha = (distal * gamma.sin()).atan2(proximal + distal * gamma.cos());
    let actuated = wrap_angle(phi - alpha);
    let passive = wrap_angle(actuated + gamma);
    Ok(LegSolution { actuated, passive, boundary })
}

/// Inverse kinematics: the unique configuration reaching `p` in the
/// requested working mode. Uses geometry-derived default tolerances.
pub fn inverse_kinematics(g: &Geometry, p: Point2, mode: WorkingMode) -> Result<FullConfig, Error> {
    inverse_kinematics_with(g, p, mode, &Tolerances::for_geometry(g))
}

/// [`inverse_kinematics`] with explicit tolerances. Fails with
/// [`Error::ModeBoundary`] when a diagonal factor of `B` is within
/// `tol.eps_b` of zero, i.e. the mode is ill-defined at `p`.
pub fn inverse_kinematics_with(
    g: &Geometry,
    p: Point2,
    mode: WorkingMode,
    tol: &Tolerances,
) -> Result<FullConfig, Error> {
    let leg1 = leg_ik(g.base_a(), g.l1, g.l2, p, mode.signs[0])?;
    let leg2 = leg_ik(g.base_b(), g.l3, g.l4, p, mode.signs[1])?;
    let b11 = g.l1 * g.l2 * (leg1.passive - leg1.actuated).sin();
    let b22 = g.l3 * g.l4 * (leg2.passive - leg2.actuated).sin();
    if b11.abs() <= tol.eps_b || b22.abs() <= tol.eps_b {
        return Err(Error::ModeBoundary);
    }
    Ok(FullConfig {
        geometry: *g,
        q: JointConfig::new(leg1.actuated, leg2.actuated),
        passive: PassiveAngles::new(leg1.passive, leg2.passive),
        p,
    })
}

/// [`inverse_kinematics_with`] under actuated-joint limits: the mode's
/// solution is rejected as [`Error::Unreachable`] when its actuated
/// angles fall outside the allowed intervals.
pub fn inverse_kinematics_limited(
    g: &Geometry,
    p: Point2,
    mode: WorkingMode,
    limits: &ActuatedLimits,
    tol: &Tolerances,
) -> Result<FullConfig, Error> {
    let cfg = inverse_kinematics_with(g, p, mode, tol)?;
    if !limits.allows(&cfg.q) {
        return Err(Error::Unreachable);
    }
    Ok(cfg)
}

/// A forward-kinematics solution together with its tangency flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FkSolution {
    pub config: FullConfig,
    /// Set when the distal circles are (numerically) tangent and the two
    /// assembly modes coincide; `det A` vanishes there.
    pub tangent: bool,
}

/// Forward kinematics: intersects the distal circles around the two
/// elbows and picks the intersection with `sign(det A) = am`.
///
/// Coincident elbows (`|CD|` within the boundary window of zero) are
/// rejected as [`Error::NoAssembly`]: with distinct distal radii no
/// solution exists, and with equal radii the solution set is a continuum
/// that cannot be reported as isolated configurations.
pub fn forward_kinematics(
    g: &Geometry,
    q: JointConfig,
    am: AssemblyMode,
) -> Result<FkSolution, Error> {
    let inter = distal_intersections(g, q)?;
    let config = match am.0 {
        Sign::Positive => inter.positive,
        Sign::Negative => inter.negative,
    };
    Ok(FkSolution { config, tangent: inter.tangent })
}

/// All forward-kinematics solutions for `q`, positive assembly mode
/// first. Two entries in the regular case, one at a tangency, none when
/// the distal circles miss each other.
pub fn forward_all(g: &Geometry, q: JointConfig) -> Vec<FkSolution> {
    match distal_intersections(g, q) {
        Err(_) => Vec::new(),
        Ok(inter) if inter.tangent => {
            vec![FkSolution { config: inter.positive, tangent: true }]
        }
        Ok(inter) => vec![
            FkSolution { config: inter.positive, tangent: false },
            FkSolution { config: inter.negative, tangent: false },
        ],
    }
}

struct Intersections {
    positive: FullConfig,
    negative: FullConfig,
    tangent: bool,
}

/// Intersects circle (C, l2) with circle (D, l4).
///
/// With `u` the unit vector from C to D and `m` the foot of the chord,
/// the two points are `m +- h * perp(u)`; `det A` at them equals
/// `+- h * |CD|`, so the `+` point carries the positive assembly mode.
fn distal_intersections(g: &Geometry, q: JointConfig) -> Result<Intersections, Error> {
    let c = g.base_a() + Point2::from_angle(q.theta1) * g.l1;
    let d = g.base_b() + Point2::from_angle(q.theta2) * g.l3;
    let (r1, r2) = (g.l2, g.l4);
    let e = d - c;
    let dist = e.norm();
    let eps = BOUNDARY_REL_EPS * (r1 + r2);
    if dist <= eps {
        return Err(Error::NoAssembly);
    }
    let a = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    let h2 = r1 * r1 - a * a;
    // A slightly negative discriminant still counts as a tangency; beyond
    // that window the circles miss each other.
    if h2 < -(eps * eps) {
        return Err(Error::NoAssembly);
    }
    let h = h2.max(0.0).sqrt();
    let tangent = h <= eps;
    let u = e * (1.0 / dist);
    let m = c + u * a;
    let build = |p: Point2| FullConfig {
        geometry: *g,
        q,
        passive: PassiveAngles::new((p - c).angle(), (p - d).angle()),
        p,
    };
    Ok(Intersections {
        positive: build(m + u.perp() * h),
        negative: build(m - u.perp() * h),
        tangent,
    })
}
