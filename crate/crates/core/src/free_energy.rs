//! The free-energy series `F = Σ (2b)^{-n} g∘f^n`, `g(t) = ln(1 + t^b)`, its
//! complex derivatives up to order four, and the functional equations tying
//! `F`, `F'` and `F''` at `t` and `f(t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::map::{self, MapParams};
use crate::sphere::SpherePoint;

/// Physical parameters of the free energy per bond `𝓕 = -J/2 - (T/2) F(G(T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub coupling: f64,
    pub temperature: Complex64,
}

impl PhysicalParams {
    pub fn new(coupling: f64, temperature: Complex64) -> Result<Self> {
        if !(coupling > 0.0) {
            return Err(Error::InvalidParameter(format!("interaction constant J = {coupling} must be > 0")));
        }
        if temperature == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("temperature T = 0".into()));
        }
        Ok(PhysicalParams { coupling, temperature })
    }
}

/// When to stop summing the series.
///
/// Summation halts once the orbit collapses below `stop_radius` (the
/// superattracting fixed point 0 makes the remaining tail doubly
/// exponentially small) or once the current term, times the geometric tail
/// factor `2b/(2b-1)`, drops below `tol`. Reaching `max_terms` first is an
/// error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_terms: usize,
    pub stop_radius: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tol: 1e-15, max_terms: 256, stop_radius: 1e-16 }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol = {} must be > 0", self.tol)));
        }
        if !(self.stop_radius > 0.0 && self.stop_radius <= 1e-6) {
            return Err(Error::InvalidParameter(format!("stop_radius = {} must lie in (0, 1e-6]", self.stop_radius)));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be positive".into()));
        }
        Ok(())
    }

    /// Term budget for a point at Green potential `g`: the orbit spends about
    /// `log_b(g0 / g)` steps near the boundary before collapsing.
    pub fn near_boundary(p: MapParams, potential: f64) -> Self {
        let g0 = std::f64::consts::LN_2;
        let depth = if potential > 0.0 && potential < g0 {
            ((g0 / potential).ln() / p.ln_b()).ceil() as usize
        } else {
            0
        };
        TruncationPolicy { max_terms: (depth + 64).max(TruncationPolicy::default().max_terms), ..Default::default() }
    }
}

/// `F` and its first `order` complex derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FJet {
    pub order: usize,
    derivatives: [Complex64; MAX_ORDER + 1],
    /// Number of series terms summed.
    pub terms: usize,
}

impl FJet {
    /// `F^{(k)}(t)`; zero above the computed order.
    pub fn derivative(&self, k: usize) -> Complex64 {
        if k <= self.order {
            self.derivatives[k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn value(&self) -> Complex64 {
        self.derivatives[0]
    }

    pub fn derivatives(&self) -> &[Complex64] {
        &self.derivatives[..=self.order]
    }
}

/// `G(T) = exp(-2J / (bT))`.
pub fn temperature_to_t(pp: PhysicalParams, b: u32) -> Result<Complex64> {
    if pp.temperature == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("temperature T = 0".into()));
    }
    Ok((-2.0 * pp.coupling / (b as f64 * pp.temperature)).exp())
}

/// Sums the series on the jet `x0` (the identity jet at `t` for plain
/// derivatives). Returns the accumulated jet and the number of terms.
fn sum_series(p: MapParams, x0: Jet, policy: &TruncationPolicy) -> Result<(Jet, usize)> {
    policy.validate()?;
    let order = x0.order();
    let tail_factor = p.two_b() / (p.two_b() - 1.0);
    let mut x = x0;
    let mut weight = 1.0;
    let mut acc = Jet::constant(Complex64::new(0.0, 0.0), order);
    for n in 0..policy.max_terms {
        if x.value().norm() < policy.stop_radius {
            return Ok((acc, n));
        }
        let term = map::g_of_jet(p, &x)?.scale(Complex64::new(weight, 0.0));
        acc = acc + term;
        if term.max_norm() * tail_factor < policy.tol {
            return Ok((acc, n + 1));
        }
        x = map::f_of_jet(p, &x)?;
        weight /= p.two_b();
    }
    Err(Error::TruncationFailure { point: SpherePoint::Finite(x0.value()).to_string(), terms: policy.max_terms })
}

/// `F` and its derivatives up to `order <= 4` at `t`, by composing jets along
/// the forward orbit.
pub fn eval_f_jet(p: MapParams, t: Complex64, policy: &TruncationPolicy, order: usize) -> Result<FJet> {
    Jet::check_order(order)?;
    let (jet, terms) = sum_series(p, Jet::variable(t, order), policy)?;
    let mut derivatives = [Complex64::new(0.0, 0.0); MAX_ORDER + 1];
    derivatives[..=order].copy_from_slice(&jet.derivatives());
    Ok(FJet { order, derivatives, terms })
}

/// `𝓕(T) = -J/2 - (T/2) F(G(T))`.
pub fn eval_physical_free_energy(pp: PhysicalParams, b: u32, policy: &TruncationPolicy) -> Result<Complex64> {
    let p = MapParams::new(b)?;
    let t = temperature_to_t(pp, b)?;
    let f = eval_f_jet(p, t, policy, 0)?.value();
    Ok(Complex64::new(-0.5 * pp.coupling, 0.0) - 0.5 * pp.temperature * f)
}

/// Residuals of the functional equations at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `(1/2b) F(ft) - F(t) + g(t)`
    pub r0: Complex64,
    /// `(f'/2b) F'(ft) - F'(t) + g'(t)`
    pub r1: Complex64,
    /// `β(t) F''(ft) - F''(t) + h(t)`, `β = f'^2/(2b)`, `h = F'(ft) f''/(2b) + g''`
    pub r2: Complex64,
}

impl Residuals {
    pub fn max_norm(&self) -> f64 {
        self.r0.norm().max(self.r1.norm()).max(self.r2.norm())
    }
}

/// Local data at `t`: derivatives of `f` and `g` up to order two.
struct LocalJets {
    f: Vec<Complex64>,
    g: Vec<Complex64>,
}

fn local_jets(p: MapParams, t: Complex64) -> Result<LocalJets> {
    let x = Jet::variable(t, 2);
    Ok(LocalJets { f: map::f_of_jet(p, &x)?.derivatives(), g: map::g_of_jet(p, &x)?.derivatives() })
}

/// `β(t) = f'(t)^2 / (2b)`.
pub fn cocycle_weight(p: MapParams, t: Complex64) -> Result<Complex64> {
    let d = map::derivative(p, t)?;
    Ok(d * d / p.two_b())
}

/// Inhomogeneous term `h(t) = F'(f t) f''(t)/(2b) + g''(t)` of the equation for `F''`.
pub fn inhomogeneity(p: MapParams, t: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    let local = local_jets(p, t)?;
    let fp_at_image = eval_f_jet(p, local.f[0], policy, 1)?.derivative(1);
    Ok(fp_at_image * local.f[2] / p.two_b() + local.g[2])
}

pub fn functional_residuals(p: MapParams, t: Complex64, policy: &TruncationPolicy) -> Result<Residuals> {
    let local = local_jets(p, t)?;
    let here = eval_f_jet(p, t, policy, 2)?;
    let there = eval_f_jet(p, local.f[0], policy, 2)?;
    let two_b = p.two_b();
    let f1 = local.f[1];
    let beta = f1 * f1 / two_b;
    let h = there.derivative(1) * local.f[2] / two_b + local.g[2];
    Ok(Residuals {
        r0: there.value() / two_b - here.value() + local.g[0],
        r1: f1 * there.derivative(1) / two_b - here.derivative(1) + local.g[1],
        r2: beta * there.derivative(2) - here.derivative(2) + h,
    })
}

/// The cocycle series `U(t) = Σ β_n(t) h(f^n t)`, the holomorphic solution
/// of `β U∘f - U = -h`; it coincides with `F''` inside the basin.
pub fn cocycle_solution_u(p: MapParams, t: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    policy.validate()?;
    let mut x = t;
    let mut cocycle = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..policy.max_terms {
        let term = cocycle * inhomogeneity(p, x, policy)?;
        acc += term;
        cocycle *= cocycle_weight(p, x)?;
        if cocycle.norm() * (1.0 + acc.norm()) < policy.tol || x.norm() < policy.stop_radius {
            return Ok(acc);
        }
        x = map::eval_finite(p, x)
            .finite()
            .ok_or_else(|| Error::Pole(SpherePoint::Finite(x).to_string()))?;
    }
    Err(Error::TruncationFailure { point: SpherePoint::Finite(t).to_string(), terms: policy.max_terms })
}
