//! Truncated Taylor polynomials ("jets") with complex coefficients.
//!
//! A jet of order `n` stores the normalized coefficients `c_k = h^{(k)}(t0) / k!`
//! for `k = 0..=n`. Arithmetic truncates at the order, so evaluating a rational
//! expression on the jet of the identity yields every derivative at once, and
//! feeding the result back in composes jets along an orbit.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest derivative order carried by a [`Jet`].
pub const MAX_ORDER: usize = 4;

const SLOTS: usize = MAX_ORDER + 1;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    coeffs: [Complex64; SLOTS],
    order: usize,
}

impl Jet {
    pub fn constant(value: Complex64, order: usize) -> Self {
        debug_assert!(order <= MAX_ORDER);
        let mut coeffs = [ZERO; SLOTS];
        coeffs[0] = value;
        Jet { coeffs, order }
    }

    /// Jet of the identity map at `t0`.
    pub fn variable(t0: Complex64, order: usize) -> Self {
        let mut j = Jet::constant(t0, order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn check_order(order: usize) -> Result<()> {
        if order > MAX_ORDER {
            Err(Error::UnsupportedOrder(order))
        } else {
            Ok(())
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        if k <= self.order {
            self.coeffs[k]
        } else {
            ZERO
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[..=self.order]
    }

    /// Derivatives `h^{(k)}(t0)` for `k = 0..=order`.
    pub fn derivatives(&self) -> Vec<Complex64> {
        let mut factorial = 1.0;
        (0..=self.order)
            .map(|k| {
                if k > 0 {
                    factorial *= k as f64;
                }
                self.coeffs[k] * factorial
            })
            .collect()
    }

    /// Largest coefficient modulus, used for tail estimates.
    pub fn max_norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut().take(self.order + 1) {
            *c *= s;
        }
        out
    }

    pub fn add_scalar(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.coeffs[0] += s;
        out
    }

    pub fn powu(&self, mut exp: u32) -> Self {
        let mut base = *self;
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0), self.order);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            exp >>= 1;
            if exp > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn recip(&self) -> Self {
        Jet::constant(Complex64::new(1.0, 0.0), self.order) / *self
    }

    /// Principal logarithm. The constant term must be nonzero.
    pub fn ln(&self) -> Self {
        let a0 = self.coeffs[0];
        let mut out = Jet::constant(a0.ln(), self.order);
        for k in 1..=self.order {
            let mut acc = self.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= out.coeffs[j] * self.coeffs[k - j] * j as f64;
            }
            out.coeffs[k] = acc / (a0 * k as f64);
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(ZERO, order);
        for k in 0..=order {
            out.coeffs[k] = self.coeffs[k] + rhs.coeffs[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(ZERO, order);
        for k in 0..=order {
            let mut acc = ZERO;
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            out.coeffs[k] = acc;
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let b0 = rhs.coeffs[0];
        let mut out = Jet::constant(ZERO, order);
        for k in 0..=order {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * out.coeffs[k - j];
            }
            out.coeffs[k] = acc / b0;
        }
        out
    }
}
