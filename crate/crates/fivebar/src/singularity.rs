//! Velocity model and singularity classification.
//!
//! Differentiating the two loop closures and eliminating the passive
//! rates gives `A * p_dot = B * q_dot` with
//!
//! ```text
//! A = [ (p - c)^T ]        B = diag( l1*l2*sin(theta3 - theta1),
//!     [ (p - d)^T ]                  l3*l4*sin(theta4 - theta2) )
//! ```
//!
//! `det A` vanishes exactly when C, D and P are aligned (parallel
//! singularity: the platform loses stiffness and control of `p` is
//! lost). A diagonal factor of `B` vanishes exactly when the
//! corresponding leg is stretched or folded, i.e. A, C, P or B, D, P are
//! aligned (serial singularity: some Cartesian direction becomes
//! unreachable). The sign vector of the diagonal of `B` is the working
//! mode; it is constant on singularity-free paths and separates the
//! inverse-kinematic branches.

use crate::geom::{Diag2, Mat2, Point2};
use crate::kinematics::{FullConfig, Tolerances};
use crate::{Error, Sign};

/// Elbow-branch signs of the two legs: the signs of the diagonal entries
/// of the inverse-kinematics matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WorkingMode {
    pub signs: [Sign; 2],
}

impl WorkingMode {
    pub const PP: WorkingMode = WorkingMode { signs: [Sign::Positive, Sign::Positive] };
    pub const PN: WorkingMode = WorkingMode { signs: [Sign::Positive, Sign::Negative] };
    pub const NP: WorkingMode = WorkingMode { signs: [Sign::Negative, Sign::Positive] };
    pub const NN: WorkingMode = WorkingMode { signs: [Sign::Negative, Sign::Negative] };

    /// All four modes of the five-bar, in the fixed order `++`, `+-`,
    /// `-+`, `--` used by reports and file outputs.
    pub const ALL: [WorkingMode; 4] =
        [WorkingMode::PP, WorkingMode::PN, WorkingMode::NP, WorkingMode::NN];

    pub fn new(leg1: Sign, leg2: Sign) -> Self {
        WorkingMode { signs: [leg1, leg2] }
    }

    /// Parses a two-character sign string such as `++` or `-+`.
    pub fn parse(s: &str) -> Option<WorkingMode> {
        let mut signs = [Sign::Positive; 2];
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return None;
        }
        for (i, ch) in chars.iter().enumerate() {
            signs[i] = match ch {
                '+' => Sign::Positive,
                '-' => Sign::Negative,
                _ => return None,
            };
        }
        Some(WorkingMode { signs })
    }

    /// Both branch signs flipped; the image of this mode under the
    /// reflection of the workspace across the base line.
    pub fn flip(self) -> WorkingMode {
        WorkingMode { signs: [self.signs[0].flip(), self.signs[1].flip()] }
    }
}

impl std::fmt::Display for WorkingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.signs[0], self.signs[1])
    }
}

/// The two velocity-model matrices at a configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicMatrices {
    /// Direct-kinematics matrix; rows are `(p - c)^T` and `(p - d)^T`.
    pub direct: Mat2,
    /// Inverse-kinematics matrix; diagonal by construction.
    pub inverse: Diag2,
}

impl KinematicMatrices {
    pub fn det_direct(&self) -> f64 {
        self.direct.det()
    }

    pub fn det_inverse(&self) -> f64 {
        self.inverse.det()
    }
}

/// Direct-kinematics matrix from raw points, rows `(p - c)^T`, `(p - d)^T`.
/// Useful for synthetic configurations in tests and analysis.
pub fn direct_matrix(p: Point2, c: Point2, d: Point2) -> Mat2 {
    Mat2::from_rows(p - c, p - d)
}

/// Builds both velocity-model matrices at `cfg`.
pub fn matrices(cfg: &FullConfig) -> KinematicMatrices {
    let g = &cfg.geometry;
    let direct = direct_matrix(cfg.p, cfg.elbow_a(), cfg.elbow_b());
    let inverse = Diag2 {
        d11: g.l1 * g.l2 * (cfg.passive.theta3 - cfg.q.theta1).sin(),
        d22: g.l3 * g.l4 * (cfg.passive.theta4 - cfg.q.theta2).sin(),
    };
    KinematicMatrices { direct, inverse }
}

/// `det A`; equals the cross product `(p - c) x (p - d)` and vanishes iff
/// C, D, P are aligned.
pub fn det_direct(cfg: &FullConfig) -> f64 {
    matrices(cfg).det_direct()
}

/// `det B`; the exact product of the two diagonal factors.
pub fn det_inverse(cfg: &FullConfig) -> f64 {
    matrices(cfg).det_inverse()
}

/// Singularity class of a configuration at a given tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingularityClass {
    Regular,
    /// Some diagonal factor of `B` vanishes (a leg stretched or folded).
    Serial,
    /// `det A` vanishes (C, D, P aligned).
    Parallel,
    /// Both degeneracies at once.
    Both,
}

impl std::fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SingularityClass::Regular => "Regular",
            SingularityClass::Serial => "Serial",
            SingularityClass::Parallel => "Parallel",
            SingularityClass::Both => "Both",
        })
    }
}

/// Classifies `cfg`. Values exactly at the tolerance resolve toward the
/// singular class.
///
/// `B` is diagonal, so it is singular iff some diagonal factor vanishes;
/// the serial test is therefore `min(|B11|, |B22|) <= eps_b` rather than
/// a product test, keeping the threshold on the single-factor scale that
/// `eps_b` is built from.
pub fn classify_singularity(cfg: &FullConfig, tol: &Tolerances) -> SingularityClass {
    let m = matrices(cfg);
    let parallel = m.det_direct().abs() <= tol.eps_a;
    let serial = m.inverse.d11.abs() <= tol.eps_b || m.inverse.d22.abs() <= tol.eps_b;
    match (parallel, serial) {
        (false, false) => SingularityClass::Regular,
        (false, true) => SingularityClass::Serial,
        (true, false) => SingularityClass::Parallel,
        (true, true) => SingularityClass::Both,
    }
}

/// The working mode of `cfg`: the sign vector of the diagonal of `B`.
/// Fails with [`Error::ModeBoundary`] when a factor is within `eps_b` of
/// zero.
pub fn working_mode_of(cfg: &FullConfig, tol: &Tolerances) -> Result<WorkingMode, Error> {
    let m = matrices(cfg);
    let s1 = sign_above(m.inverse.d11, tol.eps_b)?;
    let s2 = sign_above(m.inverse.d22, tol.eps_b)?;
    Ok(WorkingMode::new(s1, s2))
}

fn sign_above(v: f64, eps: f64) -> Result<Sign, Error> {
    if v.abs() <= eps {
        Err(Error::ModeBoundary)
    } else {
        Sign::of(v).ok_or(Error::ModeBoundary)
    }
}

/// Actuated joint rates producing the Cartesian velocity `p_dot`:
/// `q_dot = B^-1 A p_dot`. Fails when `B` is singular (a serial
/// singularity: no rate can generate the lost Cartesian direction).
pub fn solve_rates(cfg: &FullConfig, p_dot: Point2, tol: &Tolerances) -> Result<[f64; 2], Error> {
    let m = matrices(cfg);
    let rhs = m.direct.mul_vec(p_dot);
    m.inverse
        .solve([rhs.x, rhs.y], tol.eps_b)
        .ok_or(Error::SingularInverseMatrix)
}

/// Cartesian velocity produced by the joint rates `q_dot`:
/// `p_dot = A^-1 B q_dot`. Fails when `A` is singular (a parallel
/// singularity: the platform velocity is not controlled).
pub fn solve_velocity(cfg: &FullConfig, q_dot: [f64; 2], tol: &Tolerances) -> Result<Point2, Error> {
    let m = matrices(cfg);
    let rhs = m.inverse.mul_vec(q_dot);
    m.direct
        .solve(Point2::new(rhs[0], rhs[1]), tol.eps_a)
        .ok_or(Error::SingularDirectMatrix)
}

/// Result of enumerating the working modes of a general fully parallel
/// manipulator from per-leg posture counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeEnumeration {
    /// Product of the posture counts.
    pub count: u64,
    /// Posture-index vectors in lexicographic order; entry `j` of a
    /// vector selects a posture of leg `j`.
    pub vectors: Vec<Vec<usize>>,
}

/// Enumerates all working modes for legs with the given posture counts.
/// Two postures per leg is the usual binary case (`2^n` modes); the
/// five-bar has `[2, 2] -> 4`.
///
/// # Panics
///
/// Panics when `postures_per_leg` is empty, contains a zero, or the
/// product overflows `u64`.
pub fn enumerate_working_modes(postures_per_leg: &[usize]) -> ModeEnumeration {
    assert!(!postures_per_leg.is_empty(), "need at least one leg");
    assert!(postures_per_leg.iter().all(|&k| k >= 1), "posture counts must be >= 1");
    let count = postures_per_leg
        .iter()
        .try_fold(1u64, |acc, &k| acc.checked_mul(k as u64))
        .expect("posture-count product overflows u64");
    let mut vectors = Vec::with_capacity(count as usize);
    let mut v = vec![0usize; postures_per_leg.len()];
    loop {
        vectors.push(v.clone());
        // Lexicographic increment with per-position radix.
        let mut i = v.len();
        loop {
            if i == 0 {
                return ModeEnumeration { count, vectors };
            }
            i -= 1;
            v[i] += 1;
            if v[i] < postures_per_leg[i] {
                break;
            }
            v[i] = 0;
        }
    }
}
