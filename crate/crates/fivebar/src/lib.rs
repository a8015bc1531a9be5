//! Kinematics of the planar RR-RRR five-bar linkage with explicit branch
//! control, Jacobian-based singularity classification, and grid-based
//! enumeration of maximal singularity-free workspace domains.
//!
//! The mechanism has two actuated base joints (angles `theta1`, `theta2`)
//! and three passive joints; the output is the position of the coupler
//! point `P`. Both the inverse and the direct position problems have
//! multiple solutions, selected here by explicit branch arguments:
//!
//! - a [`singularity::WorkingMode`] fixes the elbow branch of each leg and
//!   thereby makes the inverse kinematics single-valued;
//! - an [`kinematics::AssemblyMode`] selects one of the two intersection
//!   points of the distal circles in the forward kinematics.
//!
//! Differentiating the loop closure gives `A * p_dot = B * q_dot` with a
//! 2x2 direct-kinematics matrix `A` and a diagonal inverse-kinematics
//! matrix `B`; their determinants classify singular configurations
//! ([`singularity::classify_singularity`]). The [`atlas`] module samples
//! the reachable workspace per working mode, labels connected
//! singularity-free regions, and extracts singularity curves.

#![forbid(unsafe_code)]

pub mod atlas;
pub mod geom;
pub mod kinematics;
pub mod singularity;

use std::fmt;

pub use geom::{Mat2, Point2};
pub use kinematics::{FullConfig, Geometry, JointConfig, Tolerances};
pub use singularity::{SingularityClass, WorkingMode};

/// Strict sign of a nonzero quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// Sign of `x`; `None` at exact zero (and for NaN).
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Positive)
        } else if x < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    /// Single-letter form used in count tables: `P` or `N`.
    pub fn letter(self) -> char {
        match self {
            Sign::Positive => 'P',
            Sign::Negative => 'N',
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

/// Errors of the kinematic and atlas operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Error {
    /// A geometry field is non-positive or non-finite; carries the field name.
    InvalidGeometry(&'static str),
    /// A grid field is out of range; carries the field name.
    InvalidGrid(&'static str),
    /// The target lies outside a leg's reachable annulus.
    Unreachable,
    /// A diagonal factor of the inverse-kinematics matrix vanishes at the
    /// query, so the requested working mode is ill-defined there.
    ModeBoundary,
    /// The distal circles of the two legs do not intersect.
    NoAssembly,
    /// The direct-kinematics matrix is numerically singular.
    SingularDirectMatrix,
    /// The inverse-kinematics matrix is numerically singular.
    SingularInverseMatrix,
    /// The requested aspect id does not exist in the labeled field.
    UnknownAspect,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGeometry(field) => write!(f, "invalid geometry field {field}"),
            Error::InvalidGrid(field) => write!(f, "invalid grid field {field}"),
            Error::Unreachable => f.write_str("target outside the reachable annulus"),
            Error::ModeBoundary => {
                f.write_str("inverse-kinematics factor vanishes: working mode ill-defined")
            }
            Error::NoAssembly => f.write_str("distal circles do not intersect"),
            Error::SingularDirectMatrix => f.write_str("direct-kinematics matrix is singular"),
            Error::SingularInverseMatrix => f.write_str("inverse-kinematics matrix is singular"),
            Error::UnknownAspect => f.write_str("unknown aspect id"),
        }
    }
}

impl std::error::Error for Error {}
