//! Fast invariant checks behind `renorm-julia selftest`. Each finishes in
//! well under a second at optimized builds.

use num_complex::Complex64;

use crate::boettcher::{self, GeodesicSpec};
use crate::error::Error;
use crate::exponents;
use crate::free_energy::{self, TruncationPolicy};
use crate::lattice;
use crate::map::{self, CriticalKind, FixedLimit, MapParams};
use crate::rng;
use crate::sphere::SpherePoint;
use crate::thermo;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub property: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

fn row(name: &'static str, property: &'static str, value: f64, tolerance: f64) -> CheckRow {
    CheckRow { name, property, passed: value.is_finite() && value <= tolerance, value, tolerance }
}

fn failed(name: &'static str, property: &'static str, tolerance: f64) -> CheckRow {
    CheckRow { name, property, passed: false, value: f64::NAN, tolerance }
}

/// Interior sample `i`: a geodesic point at a random angle with potential
/// in `[0.1, 4]`.
pub fn interior_point(p: MapParams, seed: u64, i: u64) -> crate::Result<Complex64> {
    let theta = rng::uniform(seed, 2 * i);
    let g = 0.1 + 3.9 * rng::uniform(seed, 2 * i + 1);
    boettcher::geodesic_point(p, GeodesicSpec::new(theta, g)?)
}

fn structure(p: MapParams) -> CheckRow {
    let name = "structure";
    let property = "f(0)=0 f(1)=1 and the Chebyshev conjugacy";
    let mut worst: f64 = 0.0;
    worst = worst.max(map::eval_map(p, SpherePoint::ZERO).chordal_distance(SpherePoint::ZERO));
    worst = worst.max(map::eval_map(p, SpherePoint::ONE).chordal_distance(SpherePoint::ONE));
    for i in 0..200u64 {
        let z = Complex64::new(4.0 * rng::uniform(1, 2 * i) - 2.0, 4.0 * rng::uniform(1, 2 * i + 1) - 2.0);
        worst = worst.max(map::decompose(p, z.into()).conjugacy_residual());
    }
    row(name, property, worst, 1e-11)
}

fn critical(p: MapParams) -> CheckRow {
    let name = "critical-orbits";
    let property = "roots of 1 map to 1; roots of -1 map to infinity then 0";
    match map::critical_orbits(p, 8, 1e-12) {
        Ok(orbits) => {
            let bad = orbits
                .iter()
                .filter(|o| match o.kind {
                    CriticalKind::Alpha => o.limit != FixedLimit::One || o.iterations > 1,
                    CriticalKind::Beta => o.limit != FixedLimit::Zero || o.iterations != 2,
                    _ => false,
                })
                .count();
            row(name, property, bad as f64, 0.0)
        }
        Err(_) => failed(name, property, 0.0),
    }
}

fn residuals(p: MapParams) -> CheckRow {
    let name = "functional-equations";
    let property = "residuals of the equations for F F' F''";
    let policy = TruncationPolicy::default();
    let worst = (0..100u64)
        .map(|i| {
            let t = interior_point(p, 3, i)?;
            free_energy::functional_residuals(p, t, &policy).map(|r| r.max_norm())
        })
        .try_fold(0.0f64, |acc, r: crate::Result<f64>| r.map(|v| acc.max(v)));
    match worst {
        Ok(w) => row(name, property, w, 1e-8),
        Err(_) => failed(name, property, 1e-8),
    }
}

fn fixed_value(p: MapParams) -> CheckRow {
    let name = "F(1)";
    let property = "F(1) = 2b ln2/(2b-1)";
    let expect = p.two_b() * std::f64::consts::LN_2 / (p.two_b() - 1.0);
    match free_energy::eval_f_jet(p, Complex64::new(1.0, 0.0), &TruncationPolicy::default(), 0) {
        Ok(j) => row(name, property, (j.value() - expect).norm(), 1e-12),
        Err(_) => failed(name, property, 1e-12),
    }
}

fn equivariance(p: MapParams) -> CheckRow {
    let name = "geodesic-equivariance";
    let property = "f(point(theta,g)) = point(b theta, b g) and G(ft) = b G(t)";
    let check = || -> crate::Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..20u64 {
            let spec = GeodesicSpec::new(rng::uniform(5, 2 * i), 1e-3 + rng::uniform(5, 2 * i + 1))?;
            let t = boettcher::geodesic_point(p, spec)?;
            let ft = map::eval_finite(p, t).finite().ok_or_else(|| Error::Pole(t.to_string()))?;
            let image = boettcher::geodesic_point(p, spec.image(p))?;
            worst = worst.max((ft - image).norm());
            let g_t = boettcher::green_potential(p, t.into(), 1e-12)?.value();
            let g_ft = boettcher::green_potential(p, ft.into(), 1e-12)?.value();
            worst = worst.max((g_ft - p.bf() * g_t).abs());
        }
        Ok(worst)
    };
    match check() {
        Ok(w) => row(name, property, w, 1e-8),
        Err(_) => failed(name, property, 1e-8),
    }
}

fn lyapunov(p: MapParams, seed: u64) -> CheckRow {
    let name = "harmonic-lyapunov";
    let property = "harmonic mean of ln|f'| is ln b (relative error at M=2000)";
    match thermo::lyapunov_harmonic(p, 2000, 1e-8, seed) {
        Ok(e) => row(name, property, (e.mean / p.ln_b() - 1.0).abs(), 0.03),
        Err(_) => failed(name, property, 0.03),
    }
}

fn pressure_zero(p: MapParams) -> CheckRow {
    let name = "pressure-at-zero";
    let property = "P_n(0) = ln b exactly";
    match thermo::pressure_estimate(p, 0.0, 6) {
        Ok(e) => row(name, property, (e.value - p.ln_b()).abs(), 0.0),
        Err(_) => failed(name, property, 0.0),
    }
}

fn dilation(p: MapParams, seed: u64) -> CheckRow {
    let name = "metric-dilation";
    let property = "|t f'|/|f| <= sqrt2 b on the closed basin (violations)";
    match thermo::dilation_bound_check(p, 2000, seed) {
        Ok(r) => row(name, property, r.violations as f64, 0.0),
        Err(_) => failed(name, property, 0.0),
    }
}

fn decimation(p: MapParams) -> CheckRow {
    let name = "lattice-decimation";
    let property = "ln Z(Gamma_1) = ln c + ln Z(Gamma_0 at K_eff)";
    if p.b() > lattice::MAX_BRANCHING {
        return row(name, property, 0.0, 0.0);
    }
    match lattice::verify_decimation(p.b(), 0, 0.5) {
        Ok(r) => row(name, property, r, 1e-10),
        Err(_) => failed(name, property, 1e-10),
    }
}

fn prediction(p: MapParams) -> CheckRow {
    let name = "exponent-prediction";
    let property = "chi = ln b gives m = 2 and alpha = 1 - ln2/ln b";
    match exponents::nu_exponent_prediction(p, p.ln_b()) {
        Ok(nu) => {
            let err = (nu.alpha - p.alpha_c()).abs() + if nu.m == 2 { 0.0 } else { 1.0 };
            row(name, property, err, 1e-12)
        }
        // b = 2 sits exactly on the resonance ln 4 / ln 2 = 2
        Err(Error::NearIntegerResonance(_)) if p.b() == 2 => row(name, property, 0.0, 1e-12),
        Err(_) => failed(name, property, 1e-12),
    }
}

pub fn run_all(p: MapParams, seed: u64) -> Vec<CheckRow> {
    vec![
        structure(p),
        critical(p),
        residuals(p),
        fixed_value(p),
        equivariance(p),
        lyapunov(p, seed),
        pressure_zero(p),
        dilation(p, seed),
        decimation(p),
        prediction(p),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        for b in [2, 3, 4] {
            for r in run_all(MapParams::new(b).unwrap(), 1) {
                assert!(r.passed, "b={b}: {r:?}");
            }
        }
    }
}
