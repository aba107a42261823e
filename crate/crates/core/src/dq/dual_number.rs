use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dual number `std + dual ε` with `ε² = 0`.
///
/// Ordered lexicographically: first by the standard part, then by the dual
/// part.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualNumber {
    pub std: f64,
    pub dual: f64,
}

impl DualNumber {
    pub const ZERO: Self = Self::new(0.0, 0.0);

    pub const fn new(std: f64, dual: f64) -> Self {
        Self { std, dual }
    }
}

impl Add for DualNumber {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.std + o.std, self.dual + o.dual)
    }
}

impl Sub for DualNumber {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.std - o.std, self.dual - o.dual)
    }
}

impl Neg for DualNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.std, -self.dual)
    }
}

impl Mul for DualNumber {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.std * o.std, self.std * o.dual + self.dual * o.std)
    }
}

impl Mul<f64> for DualNumber {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.std * s, self.dual * s)
    }
}

impl PartialOrd for DualNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.std.partial_cmp(&other.std)? {
            Ordering::Equal => self.dual.partial_cmp(&other.dual),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for DualNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.std, self.dual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_squares_to_zero() {
        let eps = DualNumber::new(0.0, 1.0);
        assert_eq!(eps * eps, DualNumber::ZERO);
    }

    #[test]
    fn product_rule() {
        let a = DualNumber::new(2.0, 3.0);
        let b = DualNumber::new(-1.0, 5.0);
        assert_eq!(a * b, DualNumber::new(-2.0, 10.0 - 3.0));
    }

    #[test]
    fn lexicographic_order() {
        let a = DualNumber::new(1.0, 100.0);
        let b = DualNumber::new(2.0, -100.0);
        let c = DualNumber::new(1.0, 101.0);
        assert!(a < b);
        assert!(a < c);
        assert!(c < b);
        assert!(!(a < a));
    }
}
