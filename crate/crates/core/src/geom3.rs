//! 3D vector and orthonormal frame primitives.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::{Error, Result, Tolerances};

/// A vector in Euclidean 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector in the same direction. Errors when the norm is below `eps`.
    pub fn normalized(self, eps: f64) -> Result<Vec3> {
        let n = self.norm();
        if n <= eps {
            return Err(Error::DegenerateFrame);
        }
        Ok(self / n)
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }
}

/// Scalar triple product det(a, b, c).
pub fn triple(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.cross(b).dot(c)
}

/// Vector product a × b.
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    a.cross(b)
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.x / k, self.y / k, self.z / k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// An ordered pair of orthogonal unit vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoPair {
    pub a: Vec3,
    pub b: Vec3,
}

impl OrthoPair {
    /// Validates unit norms and orthogonality against `tol.unit`.
    pub fn new(a: Vec3, b: Vec3, tol: &Tolerances) -> Result<Self> {
        let pair = OrthoPair { a, b };
        if pair.defect() > tol.unit {
            return Err(Error::DegenerateFrame);
        }
        Ok(pair)
    }

    /// Worst deviation from the defining relations |a|=|b|=1, a·b=0.
    pub fn defect(&self) -> f64 {
        let ua = (self.a.norm() - 1.0).abs();
        let ub = (self.b.norm() - 1.0).abs();
        let ortho = self.a.dot(self.b).abs();
        ua.max(ub).max(ortho)
    }
}

/// A right-handed orthonormal frame (e1, e2, e3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame3 {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl Frame3 {
    /// Worst deviation of the pairwise dot products from δᵢⱼ.
    pub fn orthonormality_defect(&self) -> f64 {
        let es = [self.e1, self.e2, self.e3];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((es[i].dot(es[j]) - target).abs());
            }
        }
        worst
    }

    /// det(e1, e2, e3); +1 for a right-handed orthonormal frame.
    pub fn determinant(&self) -> f64 {
        triple(self.e1, self.e2, self.e3)
    }

    pub fn is_right_handed(&self, tol: &Tolerances) -> bool {
        self.orthonormality_defect() <= tol.unit && (self.determinant() - 1.0).abs() <= tol.unit
    }
}

/// Builds a right-handed orthonormal frame from two non-parallel vectors by
/// Gram–Schmidt: e1 along the first input, e2 the orthogonalized second,
/// e3 = e1 × e2. Idempotent on frames that are already orthonormal.
pub fn orthonormalize(e1: Vec3, e2: Vec3) -> Result<Frame3> {
    if e1.cross(e2).norm() <= 1e-12 {
        return Err(Error::DegenerateFrame);
    }
    let u1 = e1.normalized(1e-300)?;
    let raw2 = e2 - u1 * u1.dot(e2);
    let u2 = raw2.normalized(1e-300)?;
    let u3 = u1.cross(u2);
    Ok(Frame3 {
        e1: u1,
        e2: u2,
        e3: u3,
    })
}
