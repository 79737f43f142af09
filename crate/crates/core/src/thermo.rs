//! Thermodynamic formalism on the boundary of the basin of 0: Birkhoff sums,
//! characteristic exponents under harmonic measure, cylinder-sum pressure of
//! the potential `-κ ln|β|`, a periodic-orbit lower bound for the spectral
//! radius of the weighted substitution operator, and backward orbits of the
//! natural extension.
//!
//! Cocycles are accumulated as logarithms throughout.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::boettcher::{self, AngleWord, GeodesicSpec};
use crate::error::{Error, Result};
use crate::free_energy::{self, TruncationPolicy};
use crate::map::{self, MapParams};
use crate::rng;
use crate::sphere::SpherePoint;

fn step(p: MapParams, x: Complex64) -> Result<Complex64> {
    map::eval_finite(p, x).finite().ok_or_else(|| Error::Pole(SpherePoint::Finite(x).to_string()))
}

/// `Σ_{k=0}^{n-1} ρ(f^k t)`. The sum is half-open: `n` terms, the last at
/// `f^{n-1} t`, so that `S_{n+m}(t) = S_n(t) + S_m(f^n t)`.
pub fn birkhoff_sum<T, F>(p: MapParams, rho: F, t: Complex64, n: usize) -> Result<T>
where
    T: Default + std::ops::Add<Output = T>,
    F: Fn(Complex64) -> Result<T>,
{
    let mut acc = T::default();
    let mut x = t;
    for k in 0..n {
        acc = acc + rho(x)?;
        if k + 1 < n {
            x = step(p, x)?;
        }
    }
    Ok(acc)
}

/// `ln|f'(t)|`, assembled from the logarithms of its factors
/// `4b |t|^{b-1} |1 - t^b| / |1 + t^b|^3` so that points deep in the
/// superattracting basin do not underflow. `-∞` at critical points is
/// reported as a pole.
pub fn ln_abs_derivative(p: MapParams, t: Complex64) -> Result<f64> {
    let critical = || Error::Pole(format!("ln|f'| at the critical point {t}"));
    let u = t.powu(p.b());
    let den = (Complex64::new(1.0, 0.0) + u).norm();
    if den == 0.0 || !u.is_finite() {
        return Err(Error::Pole(SpherePoint::Finite(t).to_string()));
    }
    let num = (Complex64::new(1.0, 0.0) - u).norm();
    if t == Complex64::new(0.0, 0.0) || num == 0.0 {
        return Err(critical());
    }
    Ok((4.0 * p.bf()).ln() + (p.bf() - 1.0) * t.norm().ln() + num.ln() - 3.0 * den.ln())
}

/// `ln|β(t)| = 2 ln|f'(t)| - ln 2b`.
pub fn ln_abs_cocycle_weight(p: MapParams, t: Complex64) -> Result<f64> {
    Ok(2.0 * ln_abs_derivative(p, t)? - p.two_b().ln())
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub failures: usize,
}

fn mean_estimate(values: &[f64], failures: usize) -> MeanEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MeanEstimate { mean, stderr: (var / n).sqrt(), samples: values.len(), failures }
}

/// Harmonic-measure average of `ln|f'|` over `m ≥ 100` boundary samples taken
/// at potential `g_small`.
pub fn lyapunov_harmonic(p: MapParams, m: usize, g_small: f64, seed: u64) -> Result<MeanEstimate> {
    if m < 100 {
        return Err(Error::InvalidParameter(format!("M = {m} must be >= 100")));
    }
    let sample = boettcher::sample_harmonic_boundary(p, m, g_small, seed)?;
    let values: Vec<f64> = sample.points.iter().map(|&z| ln_abs_derivative(p, z)).collect::<Result<_>>()?;
    Ok(mean_estimate(&values, sample.failures))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEstimate {
    pub kappa: f64,
    pub depth: usize,
    /// `P_n(κ) = (1/n) ln Σ_y |β_n(y)|^{-κ}` over the `b^n` preimages of `t_c`.
    pub value: f64,
    pub support_size: usize,
}

/// `ln|β_n(y)|` for every `y` with `f^n(y) = t_c`, in angle order, with the
/// words that label them.
pub fn tree_cocycle_logs(p: MapParams, depth: usize) -> Result<Vec<(AngleWord, f64)>> {
    if depth == 0 {
        return Err(Error::InvalidParameter("pressure depth must be >= 1".into()));
    }
    let tree = boettcher::preimage_tree_tc(p, depth)?;
    tree.into_par_iter()
        .map(|(w, y)| birkhoff_sum(p, |x| ln_abs_cocycle_weight(p, x), y, depth).map(|s| (w, s)))
        .collect()
}

/// Streaming log-sum-exp.
#[derive(Debug, Clone, Copy)]
struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    const EMPTY: LogSumExp = LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 };

    fn push(&mut self, v: f64) {
        if v <= self.max {
            self.sum += (v - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    fn merge(self, other: LogSumExp) -> LogSumExp {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if self.max == f64::NEG_INFINITY {
            return other;
        }
        let max = self.max.max(other.max);
        LogSumExp { max, sum: self.sum * (self.max - max).exp() + other.sum * (other.max - max).exp() }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// Sums over the leaves `y` of the depth-`n` tree of `ln|β_n(y)|`.
#[derive(Debug, Clone)]
struct TreeSums {
    count: u64,
    sum_log: f64,
    /// `ln Σ e^{-κ ln|β_n|}` per requested `κ`.
    lse: Vec<LogSumExp>,
}

impl TreeSums {
    fn empty(k: usize) -> Self {
        TreeSums { count: 0, sum_log: 0.0, lse: vec![LogSumExp::EMPTY; k] }
    }

    fn merge(mut self, other: TreeSums) -> TreeSums {
        self.count += other.count;
        self.sum_log += other.sum_log;
        for (a, b) in self.lse.iter_mut().zip(other.lse) {
            *a = a.merge(b);
        }
        self
    }
}

fn descend(p: MapParams, x: Complex64, acc_log: f64, remaining: usize, kappas: &[f64], out: &mut TreeSums) -> Result<()> {
    if remaining == 0 {
        out.count += 1;
        out.sum_log += acc_log;
        for (l, k) in out.lse.iter_mut().zip(kappas) {
            l.push(-k * acc_log);
        }
        return Ok(());
    }
    for y in map::basin_preimages(p, x)? {
        descend(p, y, acc_log + ln_abs_cocycle_weight(p, y)?, remaining - 1, kappas, out)?;
    }
    Ok(())
}

/// Walks the `b^n` preimages of `t_c` without labelling them; the sums are
/// independent of the order of the leaves.
fn tree_sums(p: MapParams, depth: usize, kappas: &[f64]) -> Result<TreeSums> {
    if depth == 0 {
        return Err(Error::InvalidParameter("pressure depth must be >= 1".into()));
    }
    if depth > boettcher::MAX_TREE_DEPTH {
        return Err(Error::SizeGuard(format!("tree depth {depth} exceeds {}", boettcher::MAX_TREE_DEPTH)));
    }
    let t_c = Complex64::new(map::find_unstable_fixed_point(p).t_c, 0.0);
    // expand breadth-first until there is enough work to share out
    let mut frontier = vec![(t_c, 0.0)];
    let mut level = 0;
    while level < depth && frontier.len() < 4096 {
        let mut next = Vec::with_capacity(frontier.len() * p.b() as usize);
        for (x, l) in frontier {
            for y in map::basin_preimages(p, x)? {
                next.push((y, l + ln_abs_cocycle_weight(p, y)?));
            }
        }
        frontier = next;
        level += 1;
    }
    let parts: Vec<TreeSums> = frontier
        .par_iter()
        .map(|&(x, l)| {
            let mut out = TreeSums::empty(kappas.len());
            descend(p, x, l, depth - level, kappas, &mut out).map(|_| out)
        })
        .collect::<Result<_>>()?;
    // merge in frontier order: a rayon reduction would make the rounding
    // depend on the thread count
    Ok(parts.into_iter().fold(TreeSums::empty(kappas.len()), TreeSums::merge))
}

fn check_kappas(kappas: &[f64]) -> Result<()> {
    match kappas.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        Some(k) => Err(Error::InvalidParameter(format!("kappa = {k} must be finite and >= 0"))),
        None => Ok(()),
    }
}

/// Written as `ln b + (1/n) ln mean(e^{-κ ln|β_n|})` so that `κ = 0` gives
/// `ln b` exactly.
fn pressure_from_sums(p: MapParams, sums: &TreeSums, kappas: &[f64], depth: usize) -> Vec<PressureEstimate> {
    let ln_count = (sums.count as f64).ln();
    kappas
        .iter()
        .zip(&sums.lse)
        .map(|(&kappa, l)| {
            let lme = if kappa == 0.0 { 0.0 } else { l.value() - ln_count };
            PressureEstimate { kappa, depth, value: p.ln_b() + lme / depth as f64, support_size: sums.count as usize }
        })
        .collect()
}

pub fn pressure_estimate(p: MapParams, kappa: f64, depth: usize) -> Result<PressureEstimate> {
    pressure_curve(p, &[kappa], depth).map(|mut v| v.remove(0))
}

/// `P_n(κ)` for several `κ`, sharing one walk of the tree.
pub fn pressure_curve(p: MapParams, kappas: &[f64], depth: usize) -> Result<Vec<PressureEstimate>> {
    check_kappas(kappas)?;
    let sums = tree_sums(p, depth, kappas)?;
    Ok(pressure_from_sums(p, &sums, kappas, depth))
}

/// `dP_n/dκ` at `κ = 0`: minus the mean of `(1/n) ln|β_n|` over the tree.
pub fn pressure_slope_at_zero(p: MapParams, depth: usize) -> Result<f64> {
    let sums = tree_sums(p, depth, &[])?;
    Ok(-sums.sum_log / (sums.count as f64 * depth as f64))
}

/// `n P_n(κ) - (n-1) P_{n-1}(κ) = ln(Z_n / Z_{n-1})`, the one-level
/// increment of the partition sum. Every leaf orbit ends with a step at a
/// preimage of `t_c`, which biases `P_n` by `O(1/n)`; the increment cancels
/// that common end.
pub fn pressure_increment(p: MapParams, kappas: &[f64], depth: usize) -> Result<Vec<f64>> {
    if depth < 2 {
        return Err(Error::InvalidParameter("increment needs depth >= 2".into()));
    }
    let now = pressure_curve(p, kappas, depth)?;
    let before = pressure_curve(p, kappas, depth - 1)?;
    Ok(now
        .iter()
        .zip(&before)
        .map(|(a, b)| depth as f64 * a.value - (depth - 1) as f64 * b.value)
        .collect())
}

/// `dP/dκ` at 0 from the increment: `-(mean ln|β_n| - mean ln|β_{n-1}|)`.
pub fn pressure_increment_slope_at_zero(p: MapParams, depth: usize) -> Result<f64> {
    if depth < 2 {
        return Err(Error::InvalidParameter("increment needs depth >= 2".into()));
    }
    let now = tree_sums(p, depth, &[])?;
    let before = tree_sums(p, depth - 1, &[])?;
    Ok(-(now.sum_log / now.count as f64 - before.sum_log / before.count as f64))
}

/// Largest ratio between the Gibbs weights `exp(-κ ln|β_n|)` at the two
/// endpoints of a depth-`n` cylinder, over all cylinders.
pub fn cylinder_distortion(p: MapParams, kappa: f64, depth: usize) -> Result<f64> {
    let logs = tree_cocycle_logs(p, depth)?;
    let n = logs.len();
    let worst = (0..n)
        .map(|i| (kappa * (logs[i].1 - logs[(i + 1) % n].1)).abs())
        .fold(0.0, f64::max);
    Ok(worst.exp())
}

pub const MAX_SPECTRAL_PERIOD: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    /// Lower bound for `ln r_β`: the best `2χ - ln 2b` over periodic words.
    pub value: f64,
    pub best_word: AngleWord,
    pub words: usize,
    /// Words whose periodic point could not be located.
    pub skipped: usize,
}

/// Primitive words of length `len` that are their own least rotation.
fn necklaces(b: u32, len: usize) -> Vec<AngleWord> {
    let total = (b as u64).pow(len as u32);
    (0..total)
        .filter_map(|mut i| {
            let mut digits = vec![0u8; len];
            for d in digits.iter_mut().rev() {
                *d = (i % b as u64) as u8;
                i /= b as u64;
            }
            let w = AngleWord::new(b, digits).expect("digits below base");
            let primitive = (1..len).all(|k| w.rotate(k) != w);
            (primitive && w.canonical_rotation() == w).then_some(w)
        })
        .collect()
}

/// Supremum of `χ_ν(β) = 2χ_ν - ln 2b` over the periodic measures of period
/// at most `q ≤ 12`. A lower bound for `ln r_β`.
pub fn spectral_radius_estimate(p: MapParams, q: usize) -> Result<SpectralEstimate> {
    if q == 0 || q > MAX_SPECTRAL_PERIOD {
        return Err(Error::InvalidParameter(format!("max period {q} must lie in 1..={MAX_SPECTRAL_PERIOD}")));
    }
    let words: Vec<AngleWord> = (1..=q).flat_map(|len| necklaces(p.b(), len)).collect();
    let chis: Vec<Option<f64>> = words
        .par_iter()
        .map(|w| boettcher::periodic_boundary_point(p, w).ok().map(|pp| pp.chi))
        .collect();
    let ln_2b = p.two_b().ln();
    let mut best: Option<(f64, &AngleWord)> = None;
    let mut skipped = 0;
    for (w, chi) in words.iter().zip(&chis) {
        match chi {
            Some(c) => {
                let v = 2.0 * c - ln_2b;
                if best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, w));
                }
            }
            None => skipped += 1,
        }
    }
    let (value, w) = best.ok_or_else(|| Error::NonContraction("no periodic word converged".into()))?;
    Ok(SpectralEstimate { value, best_word: w.clone(), words: words.len(), skipped })
}

pub const MAX_BACKWARD_STEPS: usize = 200;

/// Potential of the starting point of a backward orbit.
pub const BACKWARD_START_POTENTIAL: f64 = 1e-8;

/// Potential of the geodesic anchors that label backward digits.
const BACKWARD_ANCHOR_POTENTIAL: f64 = 1e-3;

/// A backward orbit `t_0, t_{-1}, …, t_{-n}` with uniformly random digits.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardSample {
    /// Digits in the order consumed; `t_{-k}` has angle `(θ_{-(k-1)} + ε_k)/b`.
    pub digits: AngleWord,
    /// `t_0, t_{-1}, …, t_{-n}`.
    pub points: Vec<Complex64>,
    /// `(1/k) ln|β_{-k}|` for `k = 1..n`, `β_{-k} = [β(t_{-1})…β(t_{-k})]^{-1}`.
    pub log_beta_means: Vec<f64>,
    /// Partial sums `G_k = -Σ_{j=1}^k β_{-j} h(t_{-j})`.
    pub g_partial: Vec<Complex64>,
}

/// Random backward orbit from the boundary point at angle `theta_start`.
pub fn backward_cocycle_sample(p: MapParams, theta_start: f64, n: usize, seed: u64) -> Result<BackwardSample> {
    if n > MAX_BACKWARD_STEPS {
        return Err(Error::SizeGuard(format!("{n} backward steps exceed {MAX_BACKWARD_STEPS}")));
    }
    let mut stream = rng::stream(seed, 0);
    let policy = TruncationPolicy::default();
    let b = p.bf();
    let mut theta = theta_start.rem_euclid(1.0);
    let mut x = boettcher::boundary_point(p, theta, BACKWARD_START_POTENTIAL)?;
    let mut points = vec![x];
    let mut digits = Vec::with_capacity(n);
    let mut log_beta = Complex64::new(0.0, 0.0);
    let mut log_beta_means = Vec::with_capacity(n);
    let mut g = Complex64::new(0.0, 0.0);
    let mut g_partial = Vec::with_capacity(n);
    for k in 1..=n {
        let d: u32 = stream.random_range(0..p.b());
        theta = (theta + d as f64) / b;
        let anchor = boettcher::geodesic_point(p, GeodesicSpec::new(theta, BACKWARD_ANCHOR_POTENTIAL)?)?;
        x = *map::basin_preimages(p, x)?
            .iter()
            .min_by(|a, c| (*a - anchor).norm().total_cmp(&(*c - anchor).norm()))
            .expect("b candidates");
        // log β_{-k} = -Σ log β(t_{-j})
        log_beta -= free_energy::cocycle_weight(p, x)?.ln();
        log_beta_means.push(log_beta.re / k as f64);
        g -= log_beta.exp() * free_energy::inhomogeneity(p, x, &policy)?;
        g_partial.push(g);
        digits.push(d as u8);
        points.push(x);
    }
    Ok(BackwardSample { digits: AngleWord::new(p.b(), digits)?, points, log_beta_means, g_partial })
}

/// Mean of `(1/n) ln|β_{-n}|` over `n_seeds` backward orbits. Orbit `i`
/// starts at a uniform angle drawn from stream `(seed, i)` and uses seed
/// `seed + i + 1` for its digits.
pub fn backward_cocycle_mean(p: MapParams, n: usize, n_seeds: usize, seed: u64) -> Result<MeanEstimate> {
    if n == 0 || n_seeds == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and at least one seed".into()));
    }
    let values: Vec<Option<f64>> = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let theta = rng::uniform(seed, i);
            backward_cocycle_sample(p, theta, n, seed.wrapping_add(i + 1))
                .ok()
                .map(|s| s.log_beta_means[n - 1])
        })
        .collect();
    let ok: Vec<f64> = values.iter().flatten().copied().collect();
    let failures = n_seeds - ok.len();
    if failures * 20 > n_seeds {
        return Err(Error::Domain(format!("{failures} of {n_seeds} backward orbits failed")));
    }
    Ok(mean_estimate(&ok, failures))
}

/// `|t f'(t)| / |f(t)| = b |1 - t^b| / |1 + t^b|`, the dilation of `f` in the
/// metric `|dt|/|t|`.
pub fn log_metric_dilation(p: MapParams, t: Complex64) -> f64 {
    let u = t.powu(p.b());
    p.bf() * (1.0 - u).norm() / (1.0 + u).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationReport {
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: usize,
    pub bound: f64,
}

/// Checks `|t f'|/|f| ≤ √2·b·(1 + 1e-9)` on `n` points of the closed basin:
/// half drawn uniformly from the disk and kept when in the basin, half
/// harmonic boundary samples.
pub fn dilation_bound_check(p: MapParams, n: usize, seed: u64) -> Result<DilationReport> {
    let bound = std::f64::consts::SQRT_2 * p.bf() * (1.0 + 1e-9);
    let n_boundary = n / 2;
    let n_interior = n - n_boundary;
    let interior: Vec<Complex64> = (0..n_interior as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = rng::stream(seed, i);
            loop {
                let r = s.random::<f64>().sqrt();
                let a = std::f64::consts::TAU * s.random::<f64>();
                let z = Complex64::from_polar(r, a);
                if let Ok(pot) = boettcher::green_potential(p, z.into(), 1e-12) {
                    if pot.in_basin() {
                        return z;
                    }
                }
            }
        })
        .collect();
    let boundary = boettcher::sample_harmonic_boundary(p, n_boundary.max(1), 1e-8, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let ratios: Vec<f64> =
        interior.iter().chain(boundary.points.iter()).map(|&z| log_metric_dilation(p, z)).collect();
    Ok(DilationReport {
        samples: ratios.len(),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        violations: ratios.iter().filter(|&&r| r > bound).count(),
        bound,
    })
}

/// Recorded bound on the endpoint distortion of depth-8 cylinder weights at
/// `κ = 1`, `b = 3`.
pub const CYLINDER_DISTORTION_BOUND: f64 = 64.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pressure_independent_of_thread_count() {
        let p = MapParams::new(3).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| pressure_curve(p, &[0.1, 0.7], 9).unwrap())
        };
        let (one, many) = (run(1), run(5));
        for (a, b) in one.iter().zip(&many) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn log_derivative_survives_underflow() {
        let p = MapParams::new(4).unwrap();
        let t = Complex64::new(1e-140, 0.0);
        assert_eq!(map::derivative(p, t).unwrap(), Complex64::new(0.0, 0.0));
        let expect = 16f64.ln() + 3.0 * 1e-140f64.ln();
        assert!((ln_abs_derivative(p, t).unwrap() - expect).abs() < 1e-12);
        let z = Complex64::new(0.3, -0.2);
        assert!((ln_abs_derivative(p, z).unwrap() - map::derivative(p, z).unwrap().norm().ln()).abs() < 1e-13);
        assert!(ln_abs_derivative(p, Complex64::new(0.0, 0.0)).is_err());
    }

    fn params(b: u32) -> MapParams {
        MapParams::new(b).unwrap()
    }

    #[test]
    fn birkhoff_examples() {
        let p = params(3);
        let s: f64 = birkhoff_sum(p, |_| Ok(2.5), Complex64::new(0.3, 0.1), 7).unwrap();
        assert_eq!(s, 17.5);
        let fp = map::find_unstable_fixed_point(p);
        let tc = Complex64::new(fp.t_c, 0.0);
        let s: f64 = birkhoff_sum(p, |x| ln_abs_derivative(p, x), tc, 5).unwrap();
        assert!((s - 5.0 * fp.multiplier.ln()).abs() < 1e-9);
    }

    #[test]
    fn birkhoff_additivity() {
        let p = params(2);
        let t = Complex64::new(0.4, 0.55);
        let rho = |x: Complex64| Ok::<_, Error>(x.norm());
        let total: f64 = birkhoff_sum(p, rho, t, 9).unwrap();
        let head: f64 = birkhoff_sum(p, rho, t, 4).unwrap();
        let mut x = t;
        for _ in 0..4 {
            x = step(p, x).unwrap();
        }
        let tail: f64 = birkhoff_sum(p, rho, x, 5).unwrap();
        assert!((total - head - tail).abs() < 1e-10);
    }

    #[test]
    fn pressure_at_zero_is_ln_b() {
        for b in [2, 3] {
            let p = params(b);
            for n in [1, 4, 7] {
                assert_eq!(pressure_estimate(p, 0.0, n).unwrap().value, p.ln_b());
            }
        }
        assert!(pressure_estimate(params(2), 0.0, 15).is_err());
        assert!(pressure_estimate(params(2), -0.1, 3).is_err());
    }

    #[test]
    fn pressure_convex_and_decreasing() {
        let p = params(3);
        let kappas: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let curve = pressure_curve(p, &kappas, 8).unwrap();
        for w in curve.windows(3) {
            assert!(w[0].value - 2.0 * w[1].value + w[2].value >= -1e-9);
        }
        // decreasing only while the tilted mean of ln|β_n| stays positive;
        // the δ-measure at t_c has negative cocycle exponent, so the curve
        // turns up near κ = 0.9 at this depth
        for w in curve[..=10].windows(2) {
            assert!(w[1].value <= w[0].value + 1e-12);
        }
        assert!(curve[20].value > curve[18].value);
    }

    #[test]
    fn cylinder_weights_have_bounded_distortion() {
        let d = cylinder_distortion(params(3), 1.0, 8).unwrap();
        assert!(d.is_finite() && d < CYLINDER_DISTORTION_BOUND, "distortion {d}");
    }

    #[test]
    fn spectral_estimate_contains_fixed_point() {
        let p = params(3);
        let fp = map::find_unstable_fixed_point(p);
        let est1 = spectral_radius_estimate(p, 1).unwrap();
        assert!(est1.value >= 2.0 * fp.multiplier.ln() - p.two_b().ln() - 1e-9);
        let est3 = spectral_radius_estimate(p, 3).unwrap();
        assert!(est3.value >= est1.value);
        assert!(est3.value > 0.0);
    }

    #[test]
    fn necklace_counts() {
        // primitive necklaces of length 4 over 2 letters: 3
        assert_eq!(necklaces(2, 4).len(), 3);
        assert_eq!(necklaces(3, 2).len(), 3);
    }

    #[test]
    fn backward_orbit_is_consistent() {
        let p = params(3);
        let s = backward_cocycle_sample(p, 0.3, 12, 4).unwrap();
        assert_eq!(s.points.len(), 13);
        for w in s.points.windows(2) {
            assert!((step(p, w[1]).unwrap() - w[0]).norm() < 1e-9);
        }
        assert_eq!(s, backward_cocycle_sample(p, 0.3, 12, 4).unwrap());
        assert!(backward_cocycle_sample(p, 0.3, 201, 4).is_err());
    }

    #[test]
    fn dilation_examples() {
        let p = params(2);
        assert!((log_metric_dilation(p, Complex64::new(0.0, 0.0)) - 2.0).abs() < 1e-15);
        let r = dilation_bound_check(p, 400, 1).unwrap();
        assert_eq!(r.samples, 400);
        assert_eq!(r.violations, 0);
    }
}
