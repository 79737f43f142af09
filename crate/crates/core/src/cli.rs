//! Command-line front end. Every subcommand writes CSV (or a PPM image) whose
//! first line records the version, `b`, the seed and the truncation policy.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::boettcher::{self, AngleWord, GeodesicSpec};
use crate::error::Error;
use crate::exponents::{self, RadiusSchedule};
use crate::free_energy::{self, TruncationPolicy};
use crate::julia::{self, RasterSpec};
use crate::map::{self, MapParams};
use crate::selftest;
use crate::sphere::SpherePoint;
use crate::{lattice, thermo};

pub const SCHEMA: u32 = 1;
pub const SEED_ENV: &str = "RENORM_JULIA_SEED";

#[derive(Debug, Parser)]
#[command(name = "renorm-julia", version, about = "Renormalization map, free energy and boundary exponents of the diamond-lattice Ising model")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Branching number of the lattice.
    #[arg(long, global = true, default_value_t = 3)]
    pub b: u32,
    /// Seed for sampled angles and digits; overrides RENORM_JULIA_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Series truncation tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Series term cap.
    #[arg(long, global = true)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forward orbit of a point.
    MapOrbit {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: Complex64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Free energy and its derivatives at a point of the basin of 0.
    FreeEnergy {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: Complex64,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// PPM image of the two basins, or a CSV cloud of Julia-set points.
    JuliaRender {
        #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
        center: Complex64,
        #[arg(long, default_value_t = 3.0)]
        width: f64,
        #[arg(long, default_value_t = 512)]
        px: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Emit this many inverse-iteration points as CSV instead of an image.
        #[arg(long)]
        cloud: Option<usize>,
    },
    /// Points and |F''| along one geodesic.
    GeodesicTrace {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 16)]
        levels: usize,
        #[arg(long, default_value_t = std::f64::consts::LN_2)]
        g0: f64,
    },
    /// Harmonic-measure average of ln|f'|.
    HarmonicLyapunov {
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        g_small: f64,
    },
    /// Cylinder-sum pressure of -κ ln|β| on a κ grid `start:stop:step`.
    PressureCurve {
        #[arg(long, value_parser = parse_grid, default_value = "0:0.5:0.05")]
        kappa: Grid,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Growth exponent of |F''| along random geodesics.
    ExponentComplex {
        #[arg(long, default_value_t = 50)]
        angles: usize,
        #[arg(long, default_value_t = 16)]
        levels: usize,
    },
    /// Exponent of the critical derivative at t_c.
    ExponentReal {
        #[arg(long, default_value_t = 16)]
        levels: usize,
    },
    /// Exponent of the critical derivative at a periodic boundary point.
    ExponentPeriodic {
        /// Base-b digits of the repeating angle, e.g. `01`.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 16)]
        levels: usize,
    },
    /// Exact decimation check on enumerated lattices.
    OracleVerify {
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_parser = parse_grid, default_value = "0.05:2:0.1")]
        k: Grid,
        /// Tabulate the coupling flow next to the temperature variable instead.
        #[arg(long)]
        flow: bool,
    },
    /// Fast invariant checks with a pass/fail table.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::MapOrbit { .. } => "map-orbit",
            Command::FreeEnergy { .. } => "free-energy",
            Command::JuliaRender { .. } => "julia-render",
            Command::GeodesicTrace { .. } => "geodesic-trace",
            Command::HarmonicLyapunov { .. } => "harmonic-lyapunov",
            Command::PressureCurve { .. } => "pressure-curve",
            Command::ExponentComplex { .. } => "exponent-complex",
            Command::ExponentReal { .. } => "exponent-real",
            Command::ExponentPeriodic { .. } => "exponent-periodic",
            Command::OracleVerify { .. } => "oracle-verify",
            Command::Selftest => "selftest",
        }
    }
}

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding; a bare number is a
/// one-point grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(format!("range `{s}` needs start <= stop and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err(format!("range `{s}` has too many points"));
            }
            Ok((0..=count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(format!("range `{s}` must be `start:stop:step`")),
    }
}

/// A parsed `start:stop:step` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    parse_range(s).map(Grid)
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Failure of a run after argument parsing.
#[derive(Debug)]
pub enum RunError {
    Compute(Error),
    Io(std::io::Error),
    /// The run completed but a check it performs did not pass.
    Check(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Compute(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o: {e}"),
            RunError::Check(s) => write!(f, "check failed: {s}"),
        }
    }
}

struct Context {
    p: MapParams,
    seed: u64,
    policy: TruncationPolicy,
    header: String,
}

fn header(cmd: &str, common: &Common, seed: u64, policy: &TruncationPolicy) -> String {
    let mut h = format!(
        "# schema={SCHEMA} program=renorm-julia version={} command={cmd} b={} seed={seed} tol={:e} max_terms={} stop_radius={:e}",
        env!("CARGO_PKG_VERSION"),
        common.b,
        policy.tol,
        policy.max_terms,
        policy.stop_radius
    );
    if !common.deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = write!(h, " timestamp={secs}");
    }
    h
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code: 0 on success, 1 when a computation or check fails, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, env_seed.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with the environment seed and output streams supplied.
pub fn run_with<I, T>(argv: I, env_seed: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let seed = match (cli.common.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(v)) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(stderr, "error: {SEED_ENV}=`{v}` is not an unsigned integer");
                return 2;
            }
        },
        (None, None) => 0,
    };
    let p = match MapParams::new(cli.common.b) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let defaults = TruncationPolicy::default();
    let policy = TruncationPolicy {
        tol: cli.common.tol.unwrap_or(defaults.tol),
        max_terms: cli.common.max_terms.unwrap_or(defaults.max_terms),
        ..defaults
    };
    if let Err(e) = policy.validate() {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    let ctx = Context { p, seed, policy, header: header(cli.command.name(), &cli.common, seed, &policy) };

    let result = match cli.common.jobs {
        Some(0) => {
            let _ = writeln!(stderr, "error: --jobs must be at least 1");
            return 2;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, &ctx)),
            Err(e) => {
                let _ = writeln!(stderr, "error: thread pool: {e}");
                return 1;
            }
        },
        None => execute(&cli, &ctx),
    };
    match result.and_then(|out| emit(&cli.common, out, stdout)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// A finished report; `failed` carries the reason when a check did not pass.
struct Output {
    bytes: Vec<u8>,
    failed: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { bytes: text.into_bytes(), failed: None }
    }
}

fn emit(common: &Common, out: Output, stdout: &mut dyn Write) -> Result<(), RunError> {
    match &common.out {
        Some(path) => std::fs::write(path, &out.bytes)?,
        None => stdout.write_all(&out.bytes)?,
    }
    match out.failed {
        Some(reason) => Err(RunError::Check(reason)),
        None => Ok(()),
    }
}

fn execute(cli: &Cli, ctx: &Context) -> Result<Output, RunError> {
    let p = ctx.p;
    let mut s = String::new();
    let _ = writeln!(s, "{}", ctx.header);
    match &cli.command {
        Command::MapOrbit { t, steps } => {
            let _ = writeln!(s, "step,re,im");
            let mut x = SpherePoint::Finite(*t);
            for k in 0..=*steps {
                match x {
                    SpherePoint::Finite(z) => {
                        let _ = writeln!(s, "{k},{},{}", num(z.re), num(z.im));
                    }
                    SpherePoint::Infinity => {
                        let _ = writeln!(s, "{k},inf,inf");
                    }
                }
                x = map::eval_map(p, x);
            }
        }
        Command::FreeEnergy { t, order } => {
            let jet = free_energy::eval_f_jet(p, *t, &ctx.policy, *order)?;
            let _ = writeln!(s, "order,re,im,terms");
            for (k, d) in jet.derivatives().iter().enumerate() {
                let _ = writeln!(s, "{k},{},{},{}", num(d.re), num(d.im), jet.terms);
            }
        }
        Command::JuliaRender { center, width, px, max_iter, eps, cloud } => {
            if let Some(n) = cloud {
                let points = julia::inverse_iteration_cloud(p, *n, ctx.seed)?;
                let _ = writeln!(s, "index,re,im");
                for (i, z) in points.iter().enumerate() {
                    let _ = writeln!(s, "{i},{},{}", num(z.re), num(z.im));
                }
            } else {
                let spec = RasterSpec { center: *center, width: *width, pixels: *px, max_iter: *max_iter, eps: *eps };
                let grid = julia::classify_grid(p, &spec)?;
                let stats = julia::raster_stats(&grid);
                let body = julia::encode_ppm(spec.pixels, &grid);
                // the PPM format allows a comment line after the magic number
                let comment = format!(
                    "{} basin0={} basin1={} undecided={}\n",
                    ctx.header, stats.basin0, stats.basin1, stats.undecided
                );
                let mut bytes = Vec::with_capacity(body.len() + comment.len());
                bytes.extend_from_slice(&body[..3]);
                bytes.extend_from_slice(comment.as_bytes());
                bytes.extend_from_slice(&body[3..]);
                return Ok(Output { bytes, failed: None });
            }
        }
        Command::GeodesicTrace { theta, levels, g0 } => {
            let schedule = RadiusSchedule::new(p, *g0, *levels)?;
            let _ = writeln!(s, "theta,level,g,one_minus_r,re,im,abs_Fpp");
            for (level, g) in schedule.potentials().into_iter().enumerate() {
                let spec = GeodesicSpec::new(*theta, g)?;
                let t = boettcher::geodesic_point(p, spec)?;
                let pol = TruncationPolicy { tol: ctx.policy.tol, ..TruncationPolicy::near_boundary(p, g) };
                let fpp = free_energy::eval_f_jet(p, t, &pol, 2)?.derivative(2).norm();
                let _ = writeln!(
                    s,
                    "{},{level},{},{},{},{},{}",
                    num(spec.theta),
                    num(g),
                    num(spec.one_minus_r()),
                    num(t.re),
                    num(t.im),
                    num(fpp)
                );
            }
        }
        Command::HarmonicLyapunov { samples, g_small } => {
            let est = thermo::lyapunov_harmonic(p, *samples, *g_small, ctx.seed)?;
            let _ = writeln!(s, "b,M,estimate,stderr,ln_b,failures");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                p.b(),
                est.samples,
                num(est.mean),
                num(est.stderr),
                num(p.ln_b()),
                est.failures
            );
        }
        Command::PressureCurve { kappa, depth } => {
            let curve = thermo::pressure_curve(p, &kappa.0, *depth)?;
            let _ = writeln!(s, "kappa,depth,value");
            for e in curve {
                let _ = writeln!(s, "{},{},{}", num(e.kappa), e.depth, num(e.value));
            }
        }
        Command::ExponentComplex { angles, levels } => {
            let r = exponents::complex_exponent_experiment(p, *angles, *levels, ctx.seed)?;
            let _ = writeln!(s, "theta,level,g,one_minus_r,abs_Fpp,envelope");
            for a in &r.angles {
                for l in &a.samples {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        num(a.theta),
                        l.level,
                        num(l.g),
                        num(l.one_minus_r),
                        num(l.abs_derivative),
                        num(l.envelope)
                    );
                }
            }
            let _ = writeln!(
                s,
                "# summary median_slope={} q1={} q3={} predicted={} angles={} failures={}",
                num(r.median_slope),
                num(r.iqr.0),
                num(r.iqr.1),
                num(r.predicted),
                r.angles.len(),
                r.failures
            );
        }
        Command::ExponentReal { levels } => {
            let r = exponents::real_exponent_at_tc(p, *levels)?;
            point_report(&mut s, &r);
        }
        Command::ExponentPeriodic { word, levels } => {
            let digits = word
                .chars()
                .map(|c| c.to_digit(p.b()).map(|d| d as u8))
                .collect::<Option<Vec<u8>>>()
                .ok_or_else(|| Error::InvalidParameter(format!("word `{word}` is not base {}", p.b())))?;
            let w = AngleWord::new(p.b(), digits)?;
            let r = exponents::periodic_exponent_experiment(p, &w, *levels)?;
            point_report(&mut s, &r);
        }
        Command::OracleVerify { n, k, flow } => {
            if *flow {
                let _ = writeln!(s, "b,K,K_eff,t_of_K,t_of_K_eff,f_of_t");
                for &kk in &k.0 {
                    let row = lattice::flow_row(p.b(), kk);
                    let ft = map::eval_finite(p, Complex64::new(row.t_of_k, 0.0)).finite().map(|z| z.re);
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        p.b(),
                        num(row.k),
                        num(row.k_eff),
                        num(row.t_of_k),
                        num(row.t_of_k_eff),
                        ft.map(num).unwrap_or_else(|| "inf".into())
                    );
                }
            } else {
                let fine = lattice::build_lattice(p.b(), n + 1)?;
                let _ = writeln!(s, "b,n,K,logZ,K_eff,log_c,residual");
                let mut worst: f64 = 0.0;
                for &kk in &k.0 {
                    let d = lattice::decimate_cell(p.b(), kk);
                    let residual = lattice::verify_decimation(p.b(), *n, kk)?;
                    worst = worst.max(residual);
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        p.b(),
                        n,
                        num(kk),
                        num(lattice::exact_log_z(&fine, kk)?),
                        num(d.k_eff),
                        num(d.log_c),
                        num(residual)
                    );
                }
                if worst >= 1e-9 {
                    return Ok(Output { bytes: s.into_bytes(), failed: Some(format!("decimation residual {worst:e}")) });
                }
            }
        }
        Command::Selftest => {
            let rows = selftest::run_all(p, ctx.seed);
            let _ = writeln!(s, "check,property,status,value,tolerance");
            let mut failed = Vec::new();
            for r in &rows {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{},{},{status},{},{}", r.name, r.property, num(r.value), num(r.tolerance));
                if !r.passed {
                    failed.push(r.name);
                }
            }
            if !failed.is_empty() {
                return Ok(Output { bytes: s.into_bytes(), failed: Some(failed.join(" ")) });
            }
        }
    }
    Ok(Output::ok(s))
}

fn point_report(s: &mut String, r: &exponents::PointExponentReport) {
    let _ = writeln!(s, "theta,level,g,distance,abs_Fm");
    for l in &r.samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            num(r.theta),
            l.level,
            num(l.g),
            num((l.point - r.target).norm()),
            num(l.abs_derivative)
        );
    }
    let _ = writeln!(
        s,
        "# summary m={} chi={} predicted={} slope={} differenced_slope={} rms={}",
        r.prediction.m,
        num(r.chi),
        num(r.prediction.alpha),
        num(r.fit.slope),
        num(r.differenced.slope),
        num(r.fit.rms_residual)
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_complex("0.5,-1").unwrap(), Complex64::new(0.5, -1.0));
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert!(parse_complex("a,b").is_err());
        let r = parse_range("0:0.5:0.05").unwrap();
        assert_eq!(r.len(), 11);
        assert!((r[10] - 0.5).abs() < 1e-15);
        assert_eq!(parse_range("0.3").unwrap(), vec![0.3]);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, std::f64::consts::PI, -1e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
