//! Minimal 2-D vector/matrix types used throughout the crate.
//!
//! Everything is plain `f64` on the stack; the linkage only ever needs
//! points, 2x2 systems and diagonal 2x2 systems, so the algorithms are
//! written out explicitly instead of pulling in a linear-algebra crate.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at the given angle from the +x axis.
    pub fn from_angle(theta: f64) -> Self {
        Point2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product; positive when `other` lies
    /// counterclockwise of `self`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    /// Angle from the +x axis in (-pi, pi].
    pub fn angle(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Wraps an angle to (-pi, pi]. `-pi` maps to `pi`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Magnitude of the wrapped difference between two angles, in [0, pi].
pub fn angle_dist(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Row-major 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub fn from_rows(r1: Point2, r2: Point2) -> Self {
        Mat2 { m11: r1.x, m12: r1.y, m21: r2.x, m22: r2.y }
    }

    pub fn row1(&self) -> Point2 {
        Point2::new(self.m11, self.m12)
    }

    pub fn row2(&self) -> Point2 {
        Point2::new(self.m21, self.m22)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn mul_vec(&self, v: Point2) -> Point2 {
        Point2::new(self.m11 * v.x + self.m12 * v.y, self.m21 * v.x + self.m22 * v.y)
    }

    /// Solves `self * x = rhs` by Cramer's rule; `None` when `|det| <= eps`.
    pub fn solve(&self, rhs: Point2, eps: f64) -> Option<Point2> {
        let d = self.det();
        if d.abs() <= eps {
            return None;
        }
        let x = (rhs.x * self.m22 - rhs.y * self.m12) / d;
        let y = (self.m11 * rhs.y - self.m21 * rhs.x) / d;
        Some(Point2::new(x, y))
    }
}

/// Diagonal 2x2 matrix; the off-diagonal entries are zero by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diag2 {
    pub d11: f64,
    pub d22: f64,
}

impl Diag2 {
    pub fn det(&self) -> f64 {
        self.d11 * self.d22
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.d11 * v[0], self.d22 * v[1]]
    }

    /// Solves `self * x = rhs`; `None` when either diagonal entry has
    /// magnitude `<= eps`.
    pub fn solve(&self, rhs: [f64; 2], eps: f64) -> Option<[f64; 2]> {
        if self.d11.abs() <= eps || self.d22.abs() <= eps {
            return None;
        }
        Some([rhs[0] / self.d11, rhs[1] / self.d22])
    }

    pub fn as_mat2(&self) -> Mat2 {
        Mat2 { m11: self.d11, m12: 0.0, m21: 0.0, m22: self.d22 }
    }
}
