//! Böttcher coordinate of the basin of 0, its Green potential, hyperbolic
//! geodesics, boundary landing points and the b-adic coding of the boundary.
//!
//! On the immediate basin `Ω0` the map is conjugate to `z ↦ z^b` on the unit
//! disk by `ψ(t) = c·t·Π_{n≥0} (1 + f^n(t)^b)^{-2/b^{n+1}}`, `c = 4^{1/(b-1)}`.
//! `ψ(t_c) = 1`, and the rotation `t ↦ e^{2πi/b} t` commutes with `f` and
//! multiplies `ψ` by `e^{2πi/b}`. Geodesic points are built by pulling a
//! point near the origin back through the basin branch of `f^{-1}`, choosing
//! at each level the preimage whose Böttcher angle matches the target.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::{self, MapParams};
use crate::rng;
use crate::sphere::{arg_turns, turn_difference, wrap_turns, SpherePoint};

/// Potential of the seed level used by the pullback.
pub const DEEP_SEED_POTENTIAL: f64 = 18.0;

/// Modulus below which the Green potential is closed off by `ψ(x) ≈ c·x`.
const CLOSURE_RADIUS: f64 = 1e-8;

/// Potential of the anchors used to label boundary preimage trees.
const TREE_ANCHOR_POTENTIAL: f64 = 1e-3;

/// Potential of the anchors used to select periodic-point branches.
const PERIODIC_ANCHOR_POTENTIAL: f64 = 1e-8;

/// Angle (turns) and Green potential of a point of the basin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSpec {
    pub theta: f64,
    pub potential: f64,
}

impl GeodesicSpec {
    pub fn new(theta: f64, potential: f64) -> Result<Self> {
        if !(potential > 0.0) || !potential.is_finite() {
            return Err(Error::InvalidParameter(format!("potential g = {potential} must be finite and > 0")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("angle {theta} is not finite")));
        }
        Ok(GeodesicSpec { theta: wrap_turns(theta), potential })
    }

    /// Coordinates of `f(t)`: angle `bθ mod 1`, potential `b·g`.
    pub fn image(&self, p: MapParams) -> GeodesicSpec {
        GeodesicSpec { theta: wrap_turns(self.theta * p.bf()), potential: self.potential * p.bf() }
    }

    /// `1 - r` with `r = e^{-g}`, computed without cancellation.
    pub fn one_minus_r(&self) -> f64 {
        -(-self.potential).exp_m1()
    }
}

/// Finite base-`b` digit string naming a cylinder, a preimage of `t_c` or a
/// periodic boundary point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleWord {
    base: u32,
    digits: Vec<u8>,
}

impl AngleWord {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d as u32 >= base) {
            return Err(Error::InvalidParameter(format!("digit {d} is not below the base {base}")));
        }
        Ok(AngleWord { base, digits })
    }

    pub fn empty(base: u32) -> Self {
        AngleWord { base, digits: Vec::new() }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Integer index `Σ ε_k b^{n-1-k}` of the cylinder among the `b^n` of its depth.
    pub fn index(&self) -> u64 {
        self.digits.iter().fold(0u64, |acc, &d| acc * self.base as u64 + d as u64)
    }

    /// Left endpoint `Σ ε_k b^{-(k+1)}` of the cylinder.
    pub fn angle(&self) -> f64 {
        self.digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / self.base as f64)
    }

    /// Angle `0.(ε_0…ε_{q-1})` repeating.
    pub fn periodic_angle(&self) -> f64 {
        if self.digits.is_empty() {
            return 0.0;
        }
        let period = (self.base as f64).powi(self.digits.len() as i32) - 1.0;
        self.index() as f64 / period
    }

    /// Cyclic rotation by `k` places to the left.
    pub fn rotate(&self, k: usize) -> Self {
        let mut digits = self.digits.clone();
        if !digits.is_empty() {
            let k = k % digits.len();
            digits.rotate_left(k);
        }
        AngleWord { base: self.base, digits }
    }

    /// Lexicographically smallest rotation.
    pub fn canonical_rotation(&self) -> Self {
        (0..self.len().max(1)).map(|k| self.rotate(k)).min().expect("at least one rotation")
    }

    fn prepend(&self, digit: u8) -> Self {
        let mut digits = Vec::with_capacity(self.digits.len() + 1);
        digits.push(digit);
        digits.extend_from_slice(&self.digits);
        AngleWord { base: self.base, digits }
    }
}

impl std::fmt::Display for AngleWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "()");
        }
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// `ψ(t)` together with a flag raised when a product factor sits on the
/// principal branch cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boettcher {
    pub log_psi: Complex64,
    pub branch_warning: bool,
}

impl Boettcher {
    pub fn psi(&self) -> Complex64 {
        self.log_psi.exp()
    }

    /// Böttcher angle in turns.
    pub fn angle(&self) -> f64 {
        wrap_turns(self.log_psi.im / TAU)
    }

    pub fn potential(&self) -> f64 {
        -self.log_psi.re
    }
}

/// Logarithm of the Böttcher coordinate by the product formula, truncated
/// after `n_factors` factors or once the remaining factors are below
/// rounding.
pub fn log_boettcher(p: MapParams, t: Complex64, n_factors: usize) -> Result<Boettcher> {
    if t == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("the Böttcher coordinate has a zero at t = 0".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut log_psi = Complex64::new(p.ln_boettcher_coeff(), 0.0) + t.ln();
    let mut branch_warning = false;
    let mut x = t;
    let mut exponent = 2.0 / p.bf();
    for _ in 0..n_factors {
        let u = x.powu(p.b());
        let factor = one + u;
        if factor.re <= 0.0 {
            branch_warning = true;
        }
        if u.norm() * exponent < 1e-18 {
            break;
        }
        log_psi -= exponent * factor.ln();
        exponent /= p.bf();
        x = match map::eval_finite(p, x) {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => return Err(Error::Domain(format!("orbit of {t} reaches a pole"))),
        };
    }
    Ok(Boettcher { log_psi, branch_warning })
}

/// `ψ(t)` for `t` in the open basin, `t ≠ 0`.
pub fn boettcher_modulus_phase(p: MapParams, t: Complex64, n_factors: usize) -> Result<(Complex64, bool)> {
    let b = log_boettcher(p, t, n_factors)?;
    Ok((b.psi(), b.branch_warning))
}

/// Factors needed so that truncation is below rounding for points at Green
/// potential down to about `1e-16`.
pub fn default_factors(p: MapParams) -> usize {
    (40.0 / p.ln_b() * 2.0).ceil() as usize + 64
}

/// Green potential `-ln|ψ(t)|` of the basin of 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// A point of the closed basin; `0` on the boundary.
    Basin(f64),
    /// `t = 0`, where `ψ` vanishes and the potential is `+∞`.
    Center,
    /// The orbit leaves the unit disk or approaches 1: not in the basin.
    Outside,
}

impl Potential {
    /// The potential as a number; `+∞` at the center and outside the basin.
    pub fn value(&self) -> f64 {
        match self {
            Potential::Basin(g) => *g,
            Potential::Center | Potential::Outside => f64::INFINITY,
        }
    }

    pub fn in_basin(&self) -> bool {
        !matches!(self, Potential::Outside)
    }
}

/// Green potential by iterating until the orbit is within `1e-8` of 0 and
/// closing with `ψ(x) ≈ c·x`. The basin lies inside the unit disk and is
/// the only component of `f^{-1}(Ω0)` there, so leaving the disk (or
/// approaching 1) proves the point is outside. Orbits that stay bounded away
/// from 0 are boundary points; the returned potential is then at most `tol`.
pub fn green_potential(p: MapParams, t: SpherePoint, tol: f64) -> Result<Potential> {
    let z = match t {
        SpherePoint::Infinity => return Ok(Potential::Outside),
        SpherePoint::Finite(z) => z,
    };
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Potential::Center);
    }
    let tol = tol.max(1e-300);
    let max_iter = ((64.0 / tol).ln() / p.ln_b()).ceil() as usize + 8;
    let ln_c = p.ln_boettcher_coeff();
    let mut x = z;
    let mut scale = 1.0;
    for _ in 0..max_iter {
        let r = x.norm();
        if r >= 1.0 || (x - 1.0).norm() < 1e-3 {
            return Ok(Potential::Outside);
        }
        if r < CLOSURE_RADIUS {
            return Ok(Potential::Basin(-scale * (r.ln() + ln_c)));
        }
        x = match map::eval_finite(p, x) {
            SpherePoint::Finite(w) => w,
            SpherePoint::Infinity => return Ok(Potential::Outside),
        };
        scale /= p.bf();
    }
    let estimate = (-scale * (x.norm().ln() + ln_c)).max(0.0);
    if estimate <= tol {
        Ok(Potential::Basin(estimate))
    } else {
        Err(Error::Undecided(SpherePoint::Finite(z).to_string()))
    }
}

/// Inverse of `ψ` near the origin: solves `ψ(t) = w` for `|w|` tiny.
fn seed_point(p: MapParams, log_w: Complex64) -> Result<Complex64> {
    let n_factors = default_factors(p);
    let mut t = (log_w - p.ln_boettcher_coeff()).exp();
    for _ in 0..20 {
        let lp = log_boettcher(p, t, n_factors)?.log_psi;
        let mut delta = log_w - lp;
        // phase difference into (-π, π]
        delta.im -= TAU * (delta.im / TAU).round();
        t *= delta.exp();
        if delta.norm() < 1e-16 {
            break;
        }
    }
    Ok(t)
}

/// Chooses, among the basin preimages of `x`, the one with Böttcher angle
/// nearest `target` (turns). All candidates are rotations of the first by
/// `e^{2πij/b}`, so one Böttcher evaluation labels all of them.
fn select_by_angle(p: MapParams, candidates: &[Complex64], target: f64) -> Result<(usize, f64)> {
    let phase0 = log_boettcher(p, candidates[0], default_factors(p))?.angle();
    let b = p.bf();
    let (best, dist) = (0..candidates.len())
        .map(|j| (j, turn_difference(phase0 + j as f64 / b, target).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("b >= 2 candidates");
    if dist > 0.25 / b {
        return Err(Error::BranchAmbiguity(format!(
            "no preimage within 1/(4b) turns of angle {target}: nearest is {dist} away"
        )));
    }
    Ok((best, wrap_turns(phase0 + best as f64 / b)))
}

/// The point of the basin with Böttcher angle `θ` and Green potential `g`.
pub fn geodesic_point(p: MapParams, spec: GeodesicSpec) -> Result<Complex64> {
    if !(spec.potential > 0.0) {
        return Err(Error::InvalidParameter(format!("potential g = {} must be > 0", spec.potential)));
    }
    let b = p.bf();
    let levels = if spec.potential >= DEEP_SEED_POTENTIAL {
        0
    } else {
        let mut n = ((DEEP_SEED_POTENTIAL / spec.potential).ln() / p.ln_b()).ceil() as usize;
        // guard against rounding in the logarithm
        while n > 0 && spec.potential * b.powi(n as i32 - 1) >= DEEP_SEED_POTENTIAL {
            n -= 1;
        }
        n
    };
    let mut angles = Vec::with_capacity(levels + 1);
    let mut theta = spec.theta;
    angles.push(theta);
    for _ in 0..levels {
        theta = wrap_turns(theta * b);
        angles.push(theta);
    }
    let seed_potential = spec.potential * b.powi(levels as i32);
    let log_w = Complex64::new(-seed_potential, TAU * angles[levels]);
    let mut x = seed_point(p, log_w)?;
    for k in (0..levels).rev() {
        let candidates = map::basin_preimages(p, x)?;
        let (j, _) = select_by_angle(p, &candidates, angles[k])?;
        x = candidates[j];
    }
    Ok(x)
}

/// Approximate landing point of the geodesic at angle `θ`, taken at a small
/// potential `g_small ∈ (0, 1e-4]`.
pub fn boundary_point(p: MapParams, theta: f64, g_small: f64) -> Result<Complex64> {
    if !(g_small > 0.0 && g_small <= 1e-4) {
        return Err(Error::InvalidParameter(format!("g_small = {g_small} must lie in (0, 1e-4]")));
    }
    geodesic_point(p, GeodesicSpec::new(theta, g_small)?)
}

/// Maximum depth of a preimage tree.
pub const MAX_TREE_DEPTH: usize = 14;

/// All `b^n` points `y` with `f^n(y) = t_c` on the boundary, labelled by the
/// b-adic word of their Böttcher angle and sorted by that angle.
///
/// Each exact preimage is matched to the nearest preimage of an anchor that
/// travels along the geodesic of the same angle at a small potential, which
/// fixes the digit labelling.
pub fn preimage_tree_tc(p: MapParams, n: usize) -> Result<Vec<(AngleWord, Complex64)>> {
    if n > MAX_TREE_DEPTH {
        return Err(Error::SizeGuard(format!("tree depth {n} exceeds {MAX_TREE_DEPTH}")));
    }
    let t_c = Complex64::new(map::find_unstable_fixed_point(p).t_c, 0.0);
    let anchor = geodesic_point(p, GeodesicSpec::new(0.0, TREE_ANCHOR_POTENTIAL)?)?;

    #[derive(Clone)]
    struct Node {
        word: AngleWord,
        exact: Complex64,
        anchor: Complex64,
        angle: f64,
    }

    let mut level = vec![Node { word: AngleWord::empty(p.b()), exact: t_c, anchor, angle: 0.0 }];
    for _ in 0..n {
        let next: Result<Vec<Vec<Node>>> = level
            .par_iter()
            .map(|node| {
                let exact_pre = map::basin_preimages(p, node.exact)?;
                let anchor_pre = map::basin_preimages(p, node.anchor)?;
                let phase0 = log_boettcher(p, anchor_pre[0], default_factors(p))?.angle();
                (0..p.b())
                    .map(|d| {
                        let angle = (node.angle + d as f64) / p.bf();
                        let j = (0..anchor_pre.len())
                            .min_by(|&a, &b| {
                                let da = turn_difference(phase0 + a as f64 / p.bf(), angle).abs();
                                let db = turn_difference(phase0 + b as f64 / p.bf(), angle).abs();
                                da.total_cmp(&db)
                            })
                            .expect("candidates");
                        let anchor = anchor_pre[j];
                        let exact = *exact_pre
                            .iter()
                            .min_by(|a, b| (*a - anchor).norm().total_cmp(&(*b - anchor).norm()))
                            .expect("candidates");
                        Ok(Node { word: node.word.prepend(d as u8), exact, anchor, angle })
                    })
                    .collect()
            })
            .collect();
        level = next?.into_iter().flatten().collect();
    }
    let mut out: Vec<(AngleWord, Complex64)> = level.into_iter().map(|n| (n.word, n.exact)).collect();
    out.sort_by_key(|(w, _)| w.index());
    Ok(out)
}

/// A periodic boundary point and the characteristic exponent of its cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPoint {
    pub point: Complex64,
    /// The cycle `x, f(x), …, f^{q-1}(x)`.
    pub cycle: Vec<Complex64>,
    /// `(1/q) ln |(f^q)'(x)|`.
    pub chi: f64,
}

pub const MAX_PERIOD: usize = 20;

/// Fixed point of the q-fold inverse-branch composition selected by `word`,
/// i.e. the landing point of the geodesic at angle `0.(word)` repeating.
pub fn periodic_boundary_point(p: MapParams, word: &AngleWord) -> Result<PeriodicPoint> {
    let q = word.len();
    if q == 0 || q > MAX_PERIOD {
        return Err(Error::InvalidParameter(format!("word length {q} must lie in 1..={MAX_PERIOD}")));
    }
    if word.base() != p.b() {
        return Err(Error::InvalidParameter(format!("word base {} differs from b = {}", word.base(), p.b())));
    }
    let anchors: Vec<Complex64> = (0..q)
        .map(|k| boundary_point(p, word.rotate(k).periodic_angle(), PERIODIC_ANCHOR_POTENTIAL))
        .collect::<Result<_>>()?;

    let mut x = anchors[0];
    let mut cycle = vec![Complex64::new(0.0, 0.0); q];
    let mut last_step = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..1000 {
        let mut y = x;
        for k in (0..q).rev() {
            let candidates = map::basin_preimages(p, y)?;
            y = *candidates
                .iter()
                .min_by(|a, b| (*a - anchors[k]).norm().total_cmp(&(*b - anchors[k]).norm()))
                .expect("candidates");
            cycle[k] = y;
        }
        let step = (y - x).norm();
        x = y;
        if step < 1e-13 {
            let chi = cycle
                .iter()
                .map(|&z| map::derivative(p, z).map(|d| d.norm().ln()))
                .sum::<Result<f64>>()?
                / q as f64;
            return Ok(PeriodicPoint { point: x, cycle, chi });
        }
        if step >= last_step {
            stalls += 1;
            if stalls > 5 {
                break;
            }
        }
        last_step = step;
    }
    Err(Error::NonContraction(word.to_string()))
}

/// Boundary points at uniformly random angles.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSample {
    pub thetas: Vec<f64>,
    pub points: Vec<Complex64>,
    /// Samples whose landing point could not be computed.
    pub failures: usize,
}

/// Boundary points at angles `θ_i` drawn from the stream `(seed, i)`; the
/// pushforward of the uniform angle is harmonic measure from 0.
pub fn sample_harmonic_boundary(p: MapParams, m: usize, g_small: f64, seed: u64) -> Result<HarmonicSample> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let thetas: Vec<f64> = (0..m as u64).map(|i| rng::uniform(seed, i)).collect();
    boundary_points_at(p, &thetas, g_small)
}

/// Boundary points at the given angles, failures excluded and counted.
pub fn boundary_points_at(p: MapParams, thetas: &[f64], g_small: f64) -> Result<HarmonicSample> {
    let results: Vec<Option<Complex64>> =
        thetas.par_iter().map(|&th| boundary_point(p, th, g_small).ok()).collect();
    let mut sample = HarmonicSample { thetas: Vec::with_capacity(thetas.len()), points: Vec::with_capacity(thetas.len()), failures: 0 };
    for (th, r) in thetas.iter().zip(results) {
        match r {
            Some(z) => {
                sample.thetas.push(*th);
                sample.points.push(z);
            }
            None => sample.failures += 1,
        }
    }
    if sample.failures * 100 >= thetas.len().max(1) && sample.failures > 0 {
        return Err(Error::Domain(format!("{} of {} boundary samples failed", sample.failures, thetas.len())));
    }
    Ok(sample)
}

/// Argument of `t` in turns; on the θ = 0 geodesic this is 0.
pub fn euclidean_angle(t: Complex64) -> f64 {
    arg_turns(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(b: u32) -> MapParams {
        MapParams::new(b).unwrap()
    }

    fn f(p: MapParams, z: Complex64) -> Complex64 {
        map::eval_finite(p, z).finite().unwrap()
    }

    #[test]
    fn potential_examples() {
        let p = params(2);
        // ψ(t) ≈ 4t for small t
        let g = green_potential(p, SpherePoint::real(0.1), 1e-12).unwrap().value();
        assert!((g + 0.4f64.ln()).abs() < 0.02);
        let direct = {
            let mut x = 0.1f64;
            let mut n = 0;
            while x > 1e-100 {
                x = 4.0 * x * x / ((1.0 + x * x) * (1.0 + x * x));
                n += 1;
            }
            -(x.ln() + 4f64.ln()) / 2f64.powi(n)
        };
        assert!((g - direct).abs() < 1e-12);

        let p3 = params(3);
        let tc = map::find_unstable_fixed_point(p3).t_c;
        let g = green_potential(p3, SpherePoint::real(tc), 1e-6).unwrap();
        assert!(matches!(g, Potential::Basin(v) if v < 1e-6));
        assert_eq!(green_potential(p3, SpherePoint::ZERO, 1e-12).unwrap(), Potential::Center);
        assert_eq!(green_potential(p3, SpherePoint::ZERO, 1e-12).unwrap().value(), f64::INFINITY);
        assert_eq!(green_potential(p3, SpherePoint::real(0.9), 1e-12).unwrap(), Potential::Outside);
        assert_eq!(green_potential(p3, SpherePoint::Infinity, 1e-12).unwrap(), Potential::Outside);
    }

    #[test]
    fn boettcher_on_real_segment() {
        let p = params(2);
        let mut prev = 0.0;
        for i in 1..20 {
            let t = 0.29 * i as f64 / 20.0;
            let (psi, warn) = boettcher_modulus_phase(p, Complex64::new(t, 0.0), 200).unwrap();
            assert!(!warn);
            assert!(psi.im.abs() < 1e-15);
            assert!(psi.re > prev);
            prev = psi.re;
        }
        let (psi, _) = boettcher_modulus_phase(p, Complex64::new(1e-6, 0.0), 200).unwrap();
        assert!(psi.re < 1e-5);
    }

    #[test]
    fn boettcher_conjugates_to_power_map() {
        let p = params(2);
        let t = Complex64::new(0.1, 0.0);
        let a = boettcher_modulus_phase(p, t, 200).unwrap().0;
        let b = boettcher_modulus_phase(p, f(p, t), 200).unwrap().0;
        assert!((b.norm() - a.norm().powi(2)).abs() < 1e-10);

        let p3 = params(3);
        let t = Complex64::new(0.05, 0.0);
        let (psi, _) = boettcher_modulus_phase(p3, t, 200).unwrap();
        assert_relative_eq!(psi.re / t.re, 2.0, max_relative = 1e-3);
        let t = Complex64::new(1e-5, 0.0);
        let (psi, _) = boettcher_modulus_phase(p3, t, 200).unwrap();
        assert_relative_eq!(psi.re / t.re, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rotation_equivariance_of_psi() {
        let p = params(3);
        let t = Complex64::new(0.2, 0.15);
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        let a = log_boettcher(p, t, 200).unwrap();
        let b = log_boettcher(p, t * w, 200).unwrap();
        assert!(turn_difference(b.angle(), a.angle() + 1.0 / 3.0).abs() < 1e-13);
        assert_relative_eq!(a.potential(), b.potential(), epsilon = 1e-14);
    }

    #[test]
    fn zero_angle_geodesic_is_real() {
        for b in [2, 3, 4] {
            let p = params(b);
            let tc = map::find_unstable_fixed_point(p).t_c;
            for g in [1e-6, 1e-2, 0.5, 3.0] {
                let t = geodesic_point(p, GeodesicSpec::new(0.0, g).unwrap()).unwrap();
                assert!(t.im.abs() < 1e-14, "b={b} g={g} t={t}");
                assert!(t.re > 0.0 && t.re < tc);
            }
        }
    }

    #[test]
    fn geodesic_points_have_requested_potential() {
        let p = params(3);
        for (theta, g) in [(0.1, 1e-6), (0.77, 0.3), (0.5, 1e-3), (0.3333, 2.0), (0.9, 40.0)] {
            let t = geodesic_point(p, GeodesicSpec::new(theta, g).unwrap()).unwrap();
            let pot = green_potential(p, t.into(), 1e-14).unwrap().value();
            assert!((pot - g).abs() < 1e-8 * g.max(1.0), "θ={theta} g={g} pot={pot}");
            let angle = log_boettcher(p, t, default_factors(p)).unwrap().angle();
            assert!(turn_difference(angle, theta).abs() < 1e-10);
        }
    }

    #[test]
    fn geodesic_equivariance_example() {
        let p = params(3);
        let g = 0.01;
        let a = geodesic_point(p, GeodesicSpec::new(1.0 / 3.0, g).unwrap()).unwrap();
        let b = geodesic_point(p, GeodesicSpec::new(0.0, 3.0 * g).unwrap()).unwrap();
        assert!((f(p, a) - b).norm() < 1e-8);
    }

    #[test]
    fn half_turn_geodesic_lands_on_preimage_of_tc() {
        let p = params(2);
        let tree = preimage_tree_tc(p, 1).unwrap();
        let target = tree[1].1;
        let near = geodesic_point(p, GeodesicSpec::new(0.5, 1e-9).unwrap()).unwrap();
        assert!((near - target).norm() < 1e-3);
    }

    #[test]
    fn boundary_point_examples() {
        let p = params(3);
        let tc = map::find_unstable_fixed_point(p).t_c;
        let x = boundary_point(p, 0.0, 1e-8).unwrap();
        assert!((x - tc).norm() < 1e-4);
        assert!(boundary_point(p, 0.0, 1e-3).is_err());

        let theta = 0.37;
        let x = boundary_point(p, theta, 1e-8).unwrap();
        assert!(x.norm() < 1.0);
        let pot = green_potential(p, x.into(), 1e-12).unwrap().value();
        assert!(pot < 1e-6);
        let y = boundary_point(p, theta * 3.0, 1e-8).unwrap();
        assert!((f(p, x) - y).norm() < 1e-6);
    }

    #[test]
    fn preimage_tree_examples() {
        let p2 = params(2);
        let tc = map::find_unstable_fixed_point(p2).t_c;
        let root = preimage_tree_tc(p2, 0).unwrap();
        assert_eq!(root.len(), 1);
        assert!(root[0].0.is_empty());
        assert_eq!(root[0].1, Complex64::new(tc, 0.0));

        let one = preimage_tree_tc(p2, 1).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].0.digits(), &[0]);
        assert!((one[0].1 - tc).norm() < 1e-14);

        let three = preimage_tree_tc(p2, 3).unwrap();
        assert_eq!(three.len(), 8);
        for (_, y) in &three {
            let mut x = *y;
            for _ in 0..3 {
                x = f(p2, x);
            }
            assert!((x - tc).norm() < 1e-8);
        }
        assert!(matches!(preimage_tree_tc(p2, 15), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn preimage_tree_matches_boundary_points() {
        let p = params(3);
        for (w, y) in preimage_tree_tc(p, 4).unwrap() {
            let x = boundary_point(p, w.angle(), 1e-10).unwrap();
            assert!((x - y).norm() < 1e-3, "word {w}: {x} vs {y}");
        }
    }

    #[test]
    fn periodic_points() {
        let p = params(2);
        let fp = map::find_unstable_fixed_point(p);
        let zero = periodic_boundary_point(p, &AngleWord::new(2, vec![0]).unwrap()).unwrap();
        assert!((zero.point - fp.t_c).norm() < 1e-12);
        assert_relative_eq!(zero.chi, fp.multiplier.ln(), epsilon = 1e-10);

        let word = AngleWord::new(2, vec![0, 1]).unwrap();
        let two = periodic_boundary_point(p, &word).unwrap();
        let back = f(p, f(p, two.point));
        assert!((back - two.point).norm() < 1e-11);
        assert!((f(p, two.point) - two.point).norm() > 1e-3);

        let p3 = params(3);
        let w = AngleWord::new(3, vec![0, 1, 2, 2]).unwrap();
        let a = periodic_boundary_point(p3, &w).unwrap();
        let b = periodic_boundary_point(p3, &w.rotate(1)).unwrap();
        assert!((a.chi - b.chi).abs() < 1e-10);
        assert!((f(p3, a.point) - b.point).norm() < 1e-10);
    }

    #[test]
    fn angle_words() {
        assert!(AngleWord::new(2, vec![0, 2]).is_err());
        let w = AngleWord::new(3, vec![1, 2]).unwrap();
        assert_relative_eq!(w.angle(), 1.0 / 3.0 + 2.0 / 9.0, epsilon = 1e-16);
        assert_relative_eq!(w.periodic_angle(), 5.0 / 8.0, epsilon = 1e-16);
        assert_eq!(w.index(), 5);
        assert_eq!(w.rotate(1).digits(), &[2, 1]);
        assert_eq!(w.rotate(1).canonical_rotation(), w);
    }

    #[test]
    fn harmonic_sampling_is_reproducible() {
        let p = params(3);
        let a = sample_harmonic_boundary(p, 20, 1e-8, 11).unwrap();
        let b = sample_harmonic_boundary(p, 20, 1e-8, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.failures, 0);
        let forced = boundary_points_at(p, &[0.0], 1e-8).unwrap();
        let tc = map::find_unstable_fixed_point(p).t_c;
        assert!((forced.points[0] - tc).norm() < 1e-4);
    }
}
