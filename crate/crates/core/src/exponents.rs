//! Critical exponents of the free energy at the boundary of the basin of 0:
//! growth of `|F''|` along harmonic-typical geodesics, the real exponent at
//! `t_c`, and exponents at periodic boundary points.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boettcher::{self, AngleWord, GeodesicSpec};
use crate::error::{Error, Result};
use crate::free_energy::{self, TruncationPolicy};
use crate::jet::MAX_ORDER;
use crate::map::{self, MapParams};
use crate::rng;

pub const MAX_LEVELS: usize = 18;
pub const MIN_FIT_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Regression on the running maximum of `y` (a lim sup estimator).
    Envelope,
    Plain,
    /// Regression on `ln|D_k - D_{k+1}|` for consecutive levels, which
    /// cancels the part of the derivative that is analytic at the target.
    Differenced,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::Envelope => "envelope",
            FitMethod::Plain => "plain",
            FitMethod::Differenced => "differenced",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub predicted: f64,
    pub method: FitMethod,
}

/// Least-squares line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64], predicted: f64, method: FitMethod) -> Result<ExponentFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidParameter(format!("{} abscissae but {} ordinates", n, y.len())));
    }
    if n < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!("{n} points; a fit needs at least {MIN_FIT_POINTS}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / nf).sqrt();
    Ok(ExponentFit { slope, intercept, rms_residual: rms, n_points: n, predicted, method })
}

/// Running maximum.
pub fn envelope(y: &[f64]) -> Vec<f64> {
    y.iter()
        .scan(f64::NEG_INFINITY, |m, &v| {
            *m = m.max(v);
            Some(*m)
        })
        .collect()
}

/// Potentials `g_k = g0·b^{-k}`, `k = 0..=levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSchedule {
    pub g0: f64,
    pub levels: usize,
    pub b: u32,
}

impl RadiusSchedule {
    pub fn new(p: MapParams, g0: f64, levels: usize) -> Result<Self> {
        if levels > MAX_LEVELS {
            return Err(Error::SizeGuard(format!("{levels} levels exceed {MAX_LEVELS}")));
        }
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::InvalidParameter(format!("g0 = {g0} must be finite and > 0")));
        }
        Ok(RadiusSchedule { g0, levels, b: p.b() })
    }

    pub fn standard(p: MapParams, levels: usize) -> Result<Self> {
        Self::new(p, std::f64::consts::LN_2, levels)
    }

    pub fn potentials(&self) -> Vec<f64> {
        // repeated division keeps the ratio exactly 1/b for powers of two
        let mut g = self.g0;
        (0..=self.levels)
            .map(|k| {
                if k > 0 {
                    g /= self.b as f64;
                }
                g
            })
            .collect()
    }
}

/// `1 - r` for `r = e^{-g}`.
fn one_minus_r(g: f64) -> f64 {
    -(-g).exp_m1()
}

/// `|F^{(order)}|` at the geodesic point `(θ, g)`.
fn derivative_on_geodesic(p: MapParams, theta: f64, g: f64, order: usize) -> Result<(Complex64, Complex64)> {
    let t = boettcher::geodesic_point(p, GeodesicSpec::new(theta, g)?)?;
    let jet = free_energy::eval_f_jet(p, t, &TruncationPolicy::near_boundary(p, g), order)?;
    Ok((t, jet.derivative(order)))
}

/// One level of a geodesic profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSample {
    pub level: usize,
    pub g: f64,
    pub one_minus_r: f64,
    pub point: Complex64,
    pub derivative: Complex64,
    pub abs_derivative: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleResult {
    pub theta: f64,
    pub samples: Vec<LevelSample>,
    pub fit: ExponentFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexExponentReport {
    pub b: u32,
    pub seed: u64,
    pub angles: Vec<AngleResult>,
    /// Angles excluded because a level could not be evaluated.
    pub failures: usize,
    pub median_slope: f64,
    pub iqr: (f64, f64),
    pub predicted: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn profile(p: MapParams, theta: f64, schedule: &RadiusSchedule, order: usize) -> Result<Vec<LevelSample>> {
    let mut env = f64::NEG_INFINITY;
    schedule
        .potentials()
        .into_iter()
        .enumerate()
        .map(|(level, g)| {
            let (point, derivative) = derivative_on_geodesic(p, theta, g, order)?;
            let d = derivative.norm();
            env = env.max(d.ln());
            Ok(LevelSample { level, g, one_minus_r: one_minus_r(g), point, derivative, abs_derivative: d, envelope: env })
        })
        .collect()
}

/// Slope of `ln|F''|` against `-ln(1-r)` along `M` geodesics at uniform
/// random angles, fitted on the running-maximum envelope. Compared with
/// `1 - ln 2/ln b`.
pub fn complex_exponent_experiment(p: MapParams, n_angles: usize, levels: usize, seed: u64) -> Result<ComplexExponentReport> {
    if n_angles == 0 {
        return Err(Error::InvalidParameter("need at least one angle".into()));
    }
    let schedule = RadiusSchedule::standard(p, levels)?;
    if levels + 1 < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!("{levels} levels give fewer than {MIN_FIT_POINTS} points")));
    }
    let predicted = p.alpha_c();
    let results: Vec<Option<AngleResult>> = (0..n_angles as u64)
        .into_par_iter()
        .map(|i| {
            let theta = rng::uniform(seed, i);
            let samples = profile(p, theta, &schedule, 2).ok()?;
            let x: Vec<f64> = samples.iter().map(|s| -s.one_minus_r.ln()).collect();
            let y: Vec<f64> = samples.iter().map(|s| s.envelope).collect();
            let fit = fit_line(&x, &y, predicted, FitMethod::Envelope).ok()?;
            Some(AngleResult { theta, samples, fit })
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    if failures * 20 >= n_angles && failures > 0 {
        return Err(Error::Domain(format!("{failures} of {n_angles} angles failed")));
    }
    let angles: Vec<AngleResult> = results.into_iter().flatten().collect();
    let mut slopes: Vec<f64> = angles.iter().map(|a| a.fit.slope).collect();
    slopes.sort_by(f64::total_cmp);
    Ok(ComplexExponentReport {
        b: p.b(),
        seed,
        median_slope: quantile(&slopes, 0.5),
        iqr: (quantile(&slopes, 0.25), quantile(&slopes, 0.75)),
        angles,
        failures,
        predicted,
    })
}

/// Derivative order `m` and exponent `α` attached to a characteristic exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuPrediction {
    pub m: usize,
    pub alpha: f64,
    /// `ln 2b / χ`
    pub ratio: f64,
}

/// `m = ⌊ln 2b/χ⌋ + 1`, `α = 1 - {ln 2b/χ}`.
pub fn nu_exponent_prediction(p: MapParams, chi: f64) -> Result<NuPrediction> {
    if !(chi > 0.0) {
        return Err(Error::InvalidParameter(format!("chi = {chi} must be > 0")));
    }
    let ratio = p.two_b().ln() / chi;
    if (ratio - ratio.round()).abs() < 1e-6 && ratio.is_finite() {
        return Err(Error::NearIntegerResonance(ratio));
    }
    let floor = ratio.floor();
    Ok(NuPrediction { m: floor as usize + 1, alpha: 1.0 - (ratio - floor), ratio })
}

/// Profile of `|F^{(m)}|` towards a boundary point `x*`, with abscissa
/// `-ln|t - x*|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointExponentReport {
    pub prediction: NuPrediction,
    pub chi: f64,
    pub theta: f64,
    pub target: Complex64,
    pub samples: Vec<LevelSample>,
    pub fit: ExponentFit,
    /// Diagnostic fit of the level differences.
    pub differenced: ExponentFit,
}

fn point_exponent(p: MapParams, theta: f64, target: Complex64, chi: f64, levels: usize) -> Result<PointExponentReport> {
    let prediction = nu_exponent_prediction(p, chi)?;
    if prediction.m > MAX_ORDER {
        return Err(Error::UnsupportedOrder(prediction.m));
    }
    let schedule = RadiusSchedule::standard(p, levels)?;
    let samples = profile(p, theta, &schedule, prediction.m)?;
    let x: Vec<f64> = samples.iter().map(|s| -(s.point - target).norm().ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.abs_derivative.ln()).collect();
    let fit = fit_line(&x, &y, prediction.alpha, FitMethod::Plain)?;
    let dy: Vec<f64> = samples.windows(2).map(|w| (w[0].derivative - w[1].derivative).norm().ln()).collect();
    let differenced = fit_line(&x[..dy.len()], &dy, prediction.alpha, FitMethod::Differenced)?;
    Ok(PointExponentReport { prediction, chi, theta, target, samples, fit, differenced })
}

/// Slope of `ln|F^{(m)}|` against `-ln(t_c - t)` along the real geodesic,
/// with `(m, α)` from `χ = ln f'(t_c)`.
pub fn real_exponent_at_tc(p: MapParams, levels: usize) -> Result<PointExponentReport> {
    let fp = map::find_unstable_fixed_point(p);
    point_exponent(p, 0.0, Complex64::new(fp.t_c, 0.0), fp.multiplier.ln(), levels)
}

/// As [`real_exponent_at_tc`] for the periodic point coded by `word`, along
/// the geodesic at the repeating angle `0.(word)`.
pub fn periodic_exponent_experiment(p: MapParams, word: &AngleWord, levels: usize) -> Result<PointExponentReport> {
    if word.len() > 8 {
        return Err(Error::SizeGuard(format!("word length {} exceeds 8", word.len())));
    }
    let pp = boettcher::periodic_boundary_point(p, word)?;
    point_exponent(p, word.periodic_angle(), pp.point, pp.chi, levels)
}

/// `|F''|` along the real geodesic at the first level and its maximum over
/// the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityWitness {
    pub first: f64,
    pub max: f64,
    pub samples: Vec<LevelSample>,
}

impl DiscontinuityWitness {
    pub fn ratio(&self) -> f64 {
        self.max / self.first
    }
}

pub fn second_derivative_witness(p: MapParams, levels: usize) -> Result<DiscontinuityWitness> {
    let schedule = RadiusSchedule::standard(p, levels)?;
    let samples = profile(p, 0.0, &schedule, 2)?;
    let first = samples[0].abs_derivative;
    let max = samples.iter().map(|s| s.abs_derivative).fold(0.0, f64::max);
    Ok(DiscontinuityWitness { first, max, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: u32) -> MapParams {
        MapParams::new(b).unwrap()
    }

    #[test]
    fn line_fit_recovers_line() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.25 * v - 1.0).collect();
        let fit = fit_line(&x, &y, 0.25, FitMethod::Plain).unwrap();
        assert!((fit.slope - 0.25).abs() < 1e-14 && (fit.intercept + 1.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
        assert!(fit_line(&x[..5], &y[..5], 0.0, FitMethod::Plain).is_err());
    }

    #[test]
    fn envelope_is_running_max() {
        assert_eq!(envelope(&[1.0, 0.0, 2.0, 1.5, 3.0]), vec![1.0, 1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn schedule_ratio_is_one_over_b() {
        let s = RadiusSchedule::standard(params(4), 16).unwrap();
        let g = s.potentials();
        assert_eq!(g.len(), 17);
        for w in g.windows(2) {
            assert_eq!(w[1] * 4.0, w[0]);
        }
        assert!(RadiusSchedule::standard(params(3), 19).is_err());
    }

    #[test]
    fn prediction_examples() {
        for b in [3, 4, 5] {
            let p = params(b);
            let nu = nu_exponent_prediction(p, p.ln_b()).unwrap();
            assert_eq!(nu.m, 2);
            assert!((nu.alpha - p.alpha_c()).abs() < 1e-14);
        }
        assert_eq!(nu_exponent_prediction(params(4), params(4).ln_b()).unwrap().alpha, 0.5);
        let nu = nu_exponent_prediction(params(3), 1e6).unwrap();
        assert_eq!(nu.m, 1);
        assert!(nu.alpha < 1.0 && nu.alpha > 0.99);
        // ln 4 / ln 2 = 2 exactly
        assert!(matches!(nu_exponent_prediction(params(2), 2f64.ln()), Err(Error::NearIntegerResonance(_))));
        assert!(nu_exponent_prediction(params(2), 0.0).is_err());
    }

    #[test]
    fn tc_prediction_in_unit_interval() {
        for b in 2..=8 {
            let p = params(b);
            let chi = map::find_unstable_fixed_point(p).multiplier.ln();
            let nu = nu_exponent_prediction(p, chi).unwrap();
            assert!(nu.alpha > 0.0 && nu.alpha < 1.0);
        }
    }

    #[test]
    fn rotations_share_prediction() {
        let p = params(3);
        let w = AngleWord::new(3, vec![0, 1]).unwrap();
        let a = boettcher::periodic_boundary_point(p, &w).unwrap().chi;
        let b = boettcher::periodic_boundary_point(p, &w.rotate(1)).unwrap().chi;
        let na = nu_exponent_prediction(p, a).unwrap();
        let nb = nu_exponent_prediction(p, b).unwrap();
        assert_eq!(na.m, nb.m);
        assert!((na.alpha - nb.alpha).abs() < 1e-9);
    }
}
