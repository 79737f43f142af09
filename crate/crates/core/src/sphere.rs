//! Points of the Riemann sphere.

use std::fmt;

use num_complex::Complex64;

/// A point of the extended complex plane. Infinity is its own variant and is
/// never produced by floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(Complex64::new(0.0, 0.0));
    pub const ONE: SpherePoint = SpherePoint::Finite(Complex64::new(1.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, 0.0))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal distance on the unit sphere; bounded by 2 and finite at infinity.
    pub fn chordal_distance(self, other: SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::real(x)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Fractional part in turns, mapped into `[0, 1)`.
pub fn wrap_turns(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed circular distance between two angles in turns, in `[-1/2, 1/2)`.
pub fn turn_difference(a: f64, b: f64) -> f64 {
    wrap_turns(a - b + 0.5) - 0.5
}

/// Argument of `z` in turns, in `[0, 1)`.
pub fn arg_turns(z: Complex64) -> f64 {
    wrap_turns(z.arg() / std::f64::consts::TAU)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_wrap() {
        assert_eq!(wrap_turns(1.25), 0.25);
        assert_eq!(wrap_turns(-0.25), 0.75);
        assert!((turn_difference(0.95, 0.05) + 0.1).abs() < 1e-15);
        assert!((turn_difference(0.05, 0.95) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn chordal_distance_to_infinity() {
        let d = SpherePoint::ZERO.chordal_distance(SpherePoint::Infinity);
        assert_eq!(d, 2.0);
        let far = SpherePoint::real(1e200);
        assert!(far.chordal_distance(SpherePoint::Infinity) < 1e-150);
    }
}
