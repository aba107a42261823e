use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::{Quaternion, TAU_UNIT};
use crate::error::{Error, Result};

/// Dual quaternion `std + dual ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualQuaternion {
    pub std: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub const ZERO: Self = Self::new(Quaternion::ZERO, Quaternion::ZERO);
    pub const ONE: Self = Self::new(Quaternion::ONE, Quaternion::ZERO);
    /// The infinitesimal unit ε.
    pub const EPSILON: Self = Self::new(Quaternion::ZERO, Quaternion::ONE);

    pub const fn new(std: Quaternion, dual: Quaternion) -> Self {
        Self { std, dual }
    }

    pub const fn from_real(s: f64) -> Self {
        Self::new(Quaternion::from_real(s), Quaternion::ZERO)
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self::new(
            Quaternion::new(a[0], a[1], a[2], a[3]),
            Quaternion::new(a[4], a[5], a[6], a[7]),
        )
    }

    pub fn to_array(self) -> [f64; 8] {
        let s = self.std.to_array();
        let d = self.dual.to_array();
        [s[0], s[1], s[2], s[3], d[0], d[1], d[2], d[3]]
    }

    /// `q_s* + q_d* ε`.
    pub fn conj(self) -> Self {
        Self::new(self.std.conj(), self.dual.conj())
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.std.scale(s), self.dual.scale(s))
    }

    /// Squared sum of all eight real components.
    pub fn norm_2r_sq(self) -> f64 {
        self.std.norm_sq() + self.dual.norm_sq()
    }

    /// Largest violation of the two unit constraints
    /// `|q_s| = 1` and `q_s* q_d + q_d* q_s = 0`.
    pub fn unit_deviation(self) -> f64 {
        let mag = (self.std.norm() - 1.0).abs();
        // q_s* q_d + q_d* q_s is real and equals 2 <q_s, q_d>.
        let orth = (2.0 * self.std.dot(self.dual)).abs();
        mag.max(orth)
    }

    pub fn is_unit(self, tol: f64) -> bool {
        self.unit_deviation() <= tol
    }
}

impl Add for DualQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.std + o.std, self.dual + o.dual)
    }
}

impl AddAssign for DualQuaternion {
    fn add_assign(&mut self, o: Self) {
        self.std += o.std;
        self.dual += o.dual;
    }
}

impl Sub for DualQuaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.std - o.std, self.dual - o.dual)
    }
}

impl Neg for DualQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.std, -self.dual)
    }
}

impl Mul for DualQuaternion {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self::new(self.std * b.std, self.std * b.dual + self.dual * b.std)
    }
}

impl Mul<f64> for DualQuaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<DualQuaternion> for f64 {
    type Output = DualQuaternion;
    fn mul(self, q: DualQuaternion) -> DualQuaternion {
        q.scale(self)
    }
}

impl fmt::Display for DualQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.std, self.dual)
    }
}

pub fn dq_mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion {
    a * b
}

/// A dual quaternion on the unit manifold, i.e. a rigid-body pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitDualQuaternion(DualQuaternion);

impl UnitDualQuaternion {
    pub const IDENTITY: Self = Self(DualQuaternion::ONE);

    /// Checks the unit constraints against [`TAU_UNIT`].
    pub fn new(q: DualQuaternion) -> Result<Self> {
        let dev = q.unit_deviation();
        if dev.is_finite() && dev <= TAU_UNIT {
            Ok(Self(q))
        } else {
            Err(Error::NonUnitInput(dev))
        }
    }

    /// Wraps `q` without checking. Callers must guarantee unitality.
    pub const fn new_unchecked(q: DualQuaternion) -> Self {
        Self(q)
    }

    pub const fn value(self) -> DualQuaternion {
        self.0
    }

    pub fn std(self) -> Quaternion {
        self.0.std
    }

    pub fn dual(self) -> Quaternion {
        self.0.dual
    }

    /// Conjugate, which is also the inverse on the unit manifold.
    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }

    pub fn inverse(self) -> Self {
        self.conj()
    }
}

impl Mul for UnitDualQuaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl Mul<DualQuaternion> for UnitDualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, o: DualQuaternion) -> DualQuaternion {
        self.0 * o
    }
}

impl Mul<UnitDualQuaternion> for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, o: UnitDualQuaternion) -> DualQuaternion {
        self * o.0
    }
}

impl From<UnitDualQuaternion> for DualQuaternion {
    fn from(q: UnitDualQuaternion) -> Self {
        q.0
    }
}

impl TryFrom<DualQuaternion> for UnitDualQuaternion {
    type Error = Error;
    fn try_from(q: DualQuaternion) -> Result<Self> {
        Self::new(q)
    }
}

impl fmt::Display for UnitDualQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
