//! The renormalization map `f(t) = 4 t^b / (1 + t^b)^2` on the Riemann sphere.
//!
//! `f = K ∘ S` with `S(t) = t^b` and `K(u) = 4u / (1 + u)^2`; the Möbius map
//! `phi(t) = (1 + t) / (1 - t)` conjugates `K` to the Chebyshev polynomial
//! `T(τ) = 2τ² - 1`. The superstable fixed points are 0 and 1, and the real
//! repelling fixed point `t_c` lies on the boundary of the basin of 0.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sphere::SpherePoint;

/// Relative size of `|1 + t^b|` below which `t` is treated as a pole.
pub const POLE_RTOL: f64 = 16.0 * f64::EPSILON;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Branching number `b` of the diamond lattice, which fixes the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MapParams {
    b: u32,
}

impl MapParams {
    pub fn new(b: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!("branching number b = {b} must be >= 2")));
        }
        if b > 64 {
            return Err(Error::InvalidParameter(format!("branching number b = {b} is unreasonably large")));
        }
        Ok(MapParams { b })
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn bf(&self) -> f64 {
        self.b as f64
    }

    pub fn two_b(&self) -> f64 {
        2.0 * self.b as f64
    }

    pub fn ln_b(&self) -> f64 {
        self.bf().ln()
    }

    /// `1 - ln 2 / ln b`.
    pub fn alpha_c(&self) -> f64 {
        1.0 - LN_2 / self.ln_b()
    }

    /// `4^{1/(b-1)}`, the limit of `ψ(t)/t` at the origin.
    pub fn boettcher_coeff(&self) -> f64 {
        self.ln_boettcher_coeff().exp()
    }

    pub fn ln_boettcher_coeff(&self) -> f64 {
        2.0 * LN_2 / (self.bf() - 1.0)
    }

    /// The `b`-th roots of `e^{iπ·shift}`: roots of unity for `shift = 0`,
    /// roots of −1 for `shift = 1`.
    pub fn roots(&self, shift: f64) -> Vec<Complex64> {
        (0..self.b)
            .map(|k| Complex64::from_polar(1.0, PI * (2.0 * k as f64 + shift) / self.bf()))
            .collect()
    }
}

fn is_pole(u: Complex64) -> bool {
    (ONE + u).norm() <= POLE_RTOL * u.norm().max(1.0)
}

/// `f(z)` for finite `z`; infinity exactly at the poles `1 + z^b = 0`.
pub fn eval_finite(p: MapParams, z: Complex64) -> SpherePoint {
    if z.norm() <= 1.0 {
        let u = z.powu(p.b);
        if is_pole(u) {
            return SpherePoint::Infinity;
        }
        let den = ONE + u;
        SpherePoint::Finite(4.0 * u / (den * den))
    } else {
        // f(z) = 4 v / (1 + v)^2 with v = z^{-b}; avoids overflow for large |z|.
        let v = z.inv().powu(p.b);
        if is_pole(v) {
            return SpherePoint::Infinity;
        }
        let den = ONE + v;
        SpherePoint::Finite(4.0 * v / (den * den))
    }
}

/// `f` on the whole sphere: `f(∞) = 0`.
pub fn eval_map(p: MapParams, t: SpherePoint) -> SpherePoint {
    match t {
        SpherePoint::Infinity => SpherePoint::ZERO,
        SpherePoint::Finite(z) => eval_finite(p, z),
    }
}

/// Closed-form derivative `4b t^{b-1} (1 - t^b) / (1 + t^b)^3`.
pub fn derivative(p: MapParams, t: Complex64) -> Result<Complex64> {
    let u = t.powu(p.b);
    if is_pole(u) {
        return Err(Error::Pole(SpherePoint::Finite(t).to_string()));
    }
    let den = ONE + u;
    Ok(4.0 * p.bf() * t.powu(p.b - 1) * (ONE - u) / (den * den * den))
}

/// `f` applied to a jet: composes the jet with `f`.
pub fn f_of_jet(p: MapParams, x: &Jet) -> Result<Jet> {
    let u = x.powu(p.b);
    if is_pole(u.value()) {
        return Err(Error::Pole(SpherePoint::Finite(x.value()).to_string()));
    }
    let den = u.add_scalar(ONE);
    Ok(u.scale(Complex64::new(4.0, 0.0)) / (den * den))
}

/// `g(x) = ln(1 + x^b)` applied to a jet.
pub fn g_of_jet(p: MapParams, x: &Jet) -> Result<Jet> {
    let u = x.powu(p.b);
    if is_pole(u.value()) {
        return Err(Error::Pole(SpherePoint::Finite(x.value()).to_string()));
    }
    Ok(u.add_scalar(ONE).ln())
}

/// Derivatives `f^{(k)}(t)` for `k = 0..=order`, `order <= 4`.
pub fn map_jet(p: MapParams, t: Complex64, order: usize) -> Result<Vec<Complex64>> {
    Jet::check_order(order)?;
    Ok(f_of_jet(p, &Jet::variable(t, order))?.derivatives())
}

/// `S(t) = t^b`.
pub fn power_s(p: MapParams, t: SpherePoint) -> SpherePoint {
    match t {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => SpherePoint::Finite(z.powu(p.b)),
    }
}

/// `K(u) = 4u / (1 + u)^2`, with `K(-1) = ∞` and `K(∞) = 0`.
pub fn koebe(u: SpherePoint) -> SpherePoint {
    match u {
        SpherePoint::Infinity => SpherePoint::ZERO,
        SpherePoint::Finite(z) => {
            if is_pole(z) {
                SpherePoint::Infinity
            } else {
                let den = ONE + z;
                SpherePoint::Finite(4.0 * z / (den * den))
            }
        }
    }
}

/// `phi(t) = (1 + t) / (1 - t)`, with `phi(1) = ∞` and `phi(∞) = -1`.
pub fn mobius_phi(t: SpherePoint) -> SpherePoint {
    match t {
        SpherePoint::Infinity => SpherePoint::real(-1.0),
        SpherePoint::Finite(z) => {
            let den = ONE - z;
            if den.norm() <= POLE_RTOL * z.norm().max(1.0) {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite((ONE + z) / den)
            }
        }
    }
}

/// `T(τ) = 2τ² - 1`.
pub fn chebyshev(tau: SpherePoint) -> SpherePoint {
    match tau {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => SpherePoint::Finite(2.0 * z * z - ONE),
    }
}

/// The pieces of `f = K ∘ S` and of the conjugacy `phi ∘ K = T ∘ phi`, all
/// evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub s: SpherePoint,
    pub k_of_s: SpherePoint,
    pub f: SpherePoint,
    pub phi: SpherePoint,
    pub k: SpherePoint,
    pub phi_of_k: SpherePoint,
    pub tcheb_of_phi: SpherePoint,
}

impl Decomposition {
    /// Chordal residual of `f = K ∘ S`.
    pub fn composition_residual(&self) -> f64 {
        self.f.chordal_distance(self.k_of_s)
    }

    /// Chordal residual of `phi ∘ K = T ∘ phi`.
    pub fn conjugacy_residual(&self) -> f64 {
        self.phi_of_k.chordal_distance(self.tcheb_of_phi)
    }
}

pub fn decompose(p: MapParams, t: SpherePoint) -> Decomposition {
    let s = power_s(p, t);
    let phi = mobius_phi(t);
    let k = koebe(t);
    Decomposition {
        s,
        k_of_s: koebe(s),
        f: eval_map(p, t),
        phi,
        k,
        phi_of_k: mobius_phi(k),
        tcheb_of_phi: chebyshev(phi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Origin,
    Infinity,
    /// A `b`-th root of unity.
    Alpha,
    /// A `b`-th root of −1.
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedLimit {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalOrbit {
    pub kind: CriticalKind,
    pub point: SpherePoint,
    pub limit: FixedLimit,
    pub iterations: usize,
}

/// Follows every critical point of `f` until it lands within `eps` of 0 or 1.
pub fn critical_orbits(p: MapParams, max_iter: usize, eps: f64) -> Result<Vec<CriticalOrbit>> {
    if max_iter < 3 {
        return Err(Error::InvalidParameter(format!("max_iter = {max_iter} must be >= 3")));
    }
    let mut points = vec![
        (CriticalKind::Origin, SpherePoint::ZERO),
        (CriticalKind::Infinity, SpherePoint::Infinity),
    ];
    points.extend(p.roots(0.0).into_iter().map(|z| (CriticalKind::Alpha, z.into())));
    points.extend(p.roots(1.0).into_iter().map(|z| (CriticalKind::Beta, z.into())));

    points
        .into_iter()
        .map(|(kind, point)| {
            let mut x = point;
            for n in 0..=max_iter {
                if let SpherePoint::Finite(z) = x {
                    if z.norm() < eps {
                        return Ok(CriticalOrbit { kind, point, limit: FixedLimit::Zero, iterations: n });
                    }
                    if (z - ONE).norm() < eps {
                        return Ok(CriticalOrbit { kind, point, limit: FixedLimit::One, iterations: n });
                    }
                }
                x = eval_map(p, x);
            }
            Err(Error::NonConvergence { point: point.to_string(), max_iter })
        })
        .collect()
}

/// The real repelling fixed point and its multiplier `f'(t_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointInfo {
    pub t_c: f64,
    pub multiplier: f64,
}

fn real_f(p: MapParams, t: f64) -> f64 {
    let u = t.powi(p.b as i32);
    4.0 * u / ((1.0 + u) * (1.0 + u))
}

fn real_fprime(p: MapParams, t: f64) -> f64 {
    let u = t.powi(p.b as i32);
    4.0 * p.bf() * t.powi(p.b as i32 - 1) * (1.0 - u) / (1.0 + u).powi(3)
}

/// Locates `t_c` by a grid scan for the sign change of `f(t) - t` on
/// `(1e-6, 1 - 1e-6)`, bisection, and a Newton polish.
pub fn find_unstable_fixed_point(p: MapParams) -> FixedPointInfo {
    let h = |t: f64| real_f(p, t) - t;
    let (lo_edge, hi_edge) = (1e-6, 1.0 - 1e-6);
    let grid = 1000;
    let mut bracket = None;
    let mut prev_t = lo_edge;
    let mut prev_h = h(prev_t);
    for i in 1..=grid {
        let t = lo_edge + (hi_edge - lo_edge) * i as f64 / grid as f64;
        let ht = h(t);
        if prev_h < 0.0 && ht >= 0.0 {
            bracket = Some((prev_t, t));
            break;
        }
        prev_t = t;
        prev_h = ht;
    }
    // f(t) - t < 0 near 0 and > 0 near 1 for every b >= 2, so the scan always brackets.
    let (mut lo, mut hi) = bracket.expect("sign change of f(t) - t on (0, 1)");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let step = h(t) / (real_fprime(p, t) - 1.0);
        if !step.is_finite() {
            break;
        }
        let next = t - step;
        if !(lo - 1e-12..=hi + 1e-12).contains(&next) {
            break;
        }
        t = next;
    }
    FixedPointInfo { t_c: t, multiplier: real_fprime(p, t) }
}

/// Roots of `x u² + (2x − 4) u + x = 0`, i.e. the values `u = s^b` with
/// `K(u) = x`, ordered `(inner, outer)` by modulus. Their product is 1.
pub fn preimage_quadratic_roots(x: Complex64) -> (SpherePoint, SpherePoint) {
    if x == Complex64::new(0.0, 0.0) {
        return (SpherePoint::ZERO, SpherePoint::Infinity);
    }
    let b_coef = 2.0 * x - 4.0;
    let disc = 4.0 * (ONE - x).sqrt();
    let plus = b_coef + disc;
    let minus = b_coef - disc;
    let q = if plus.norm() >= minus.norm() { -0.5 * plus } else { -0.5 * minus };
    let outer = q / x;
    let inner = x / q;
    if inner.norm() <= outer.norm() {
        (inner.into(), outer.into())
    } else {
        (outer.into(), inner.into())
    }
}

fn is_slit(x: Complex64) -> bool {
    x.re >= 1.0 && x.im.abs() <= 4.0 * f64::EPSILON * x.re
}

fn bth_roots(p: MapParams, u: Complex64) -> Vec<Complex64> {
    let base = if u == Complex64::new(0.0, 0.0) {
        u
    } else {
        Complex64::from_polar(u.norm().powf(1.0 / p.bf()), u.arg() / p.bf())
    };
    (0..p.b)
        .map(|k| base * Complex64::from_polar(1.0, TAU * k as f64 / p.bf()))
        .collect()
}

/// The `b` preimages of `x` inside the unit disk (the branch of `f^{-1}`
/// that keeps the basin of 0 invariant). The first entry is the principal
/// `b`-th root; the rest follow counterclockwise by `e^{2πi/b}`.
pub fn basin_preimages(p: MapParams, x: Complex64) -> Result<Vec<Complex64>> {
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(Error::Domain(format!("non-finite value {x}")));
    }
    if is_slit(x) {
        return Err(Error::Domain(format!("{x} lies on [1, inf), the image of the unit circle")));
    }
    let (inner, outer) = preimage_quadratic_roots(x);
    let inner = inner.finite().expect("inner root is finite");
    if let Some(outer) = outer.finite() {
        if (inner.norm() - 1.0).abs() < 1e-12 && (outer.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::BranchAmbiguity(format!("both roots of the preimage quadratic for {x} lie on the unit circle")));
        }
    }
    Ok(bth_roots(p, inner))
}

/// All preimages of `x` under `f`, with critical values collapsed:
/// `f^{-1}(1)` is the `b` roots of unity, `f^{-1}(0) = {0, ∞}` and
/// `f^{-1}(∞)` is the `b` roots of −1. Otherwise `2b` points.
pub fn all_preimages(p: MapParams, x: SpherePoint) -> Vec<SpherePoint> {
    let z = match x {
        SpherePoint::Infinity => return p.roots(1.0).into_iter().map(Into::into).collect(),
        SpherePoint::Finite(z) => z,
    };
    if z == Complex64::new(0.0, 0.0) {
        return vec![SpherePoint::ZERO, SpherePoint::Infinity];
    }
    if z == ONE {
        return p.roots(0.0).into_iter().map(Into::into).collect();
    }
    let (inner, outer) = preimage_quadratic_roots(z);
    let mut out: Vec<SpherePoint> = Vec::with_capacity(2 * p.b as usize);
    for u in [inner, outer] {
        match u {
            SpherePoint::Finite(u) => out.extend(bth_roots(p, u).into_iter().map(SpherePoint::from)),
            SpherePoint::Infinity => out.push(SpherePoint::Infinity),
        }
    }
    out
}
