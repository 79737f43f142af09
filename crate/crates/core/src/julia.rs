//! Basin classification, PPM rasters of the Fatou basins, and Julia-set point
//! clouds by random inverse iteration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::{self, MapParams};
use crate::rng;
use crate::sphere::SpherePoint;

/// Fate of an orbit: captured by 0 or by 1 after `n` steps, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Basin0(usize),
    Basin1(usize),
    Undecided,
}

impl Classification {
    pub fn same_basin(&self, other: &Classification) -> bool {
        matches!(
            (self, other),
            (Classification::Basin0(_), Classification::Basin0(_))
                | (Classification::Basin1(_), Classification::Basin1(_))
                | (Classification::Undecided, Classification::Undecided)
        )
    }
}

/// Iterates until the orbit is within `eps` of 0 or 1. An orbit through ∞
/// continues at `f(∞) = 0`.
pub fn classify_point(p: MapParams, t: SpherePoint, max_iter: usize, eps: f64) -> Classification {
    let mut x = t;
    for n in 0..=max_iter {
        if let SpherePoint::Finite(z) = x {
            if z.norm() < eps {
                return Classification::Basin0(n);
            }
            if (z - 1.0).norm() < eps {
                return Classification::Basin1(n);
            }
        }
        x = map::eval_map(p, x);
    }
    Classification::Undecided
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterSpec {
    pub center: Complex64,
    pub width: f64,
    pub pixels: usize,
    pub max_iter: usize,
    pub eps: f64,
}

impl RasterSpec {
    pub fn validate(&self) -> Result<()> {
        if self.pixels < 16 {
            return Err(Error::InvalidParameter(format!("pixels = {} must be >= 16", self.pixels)));
        }
        if !(self.eps > 0.0 && self.eps < 0.1) {
            return Err(Error::InvalidParameter(format!("eps = {} must lie in (0, 0.1)", self.eps)));
        }
        if !(self.width > 0.0) {
            return Err(Error::InvalidParameter(format!("width = {} must be > 0", self.width)));
        }
        Ok(())
    }

    /// Complex coordinate of the center of pixel `(row, col)`; row 0 is the top.
    pub fn pixel_point(&self, row: usize, col: usize) -> Complex64 {
        let step = self.width / self.pixels as f64;
        let half = 0.5 * self.width;
        Complex64::new(
            self.center.re - half + (col as f64 + 0.5) * step,
            self.center.im + half - (row as f64 + 0.5) * step,
        )
    }

    /// Pixel containing `z`, if inside the frame.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let step = self.width / self.pixels as f64;
        let half = 0.5 * self.width;
        let col = ((z.re - (self.center.re - half)) / step).floor();
        let row = (((self.center.im + half) - z.im) / step).floor();
        let n = self.pixels as f64;
        if (0.0..n).contains(&col) && (0.0..n).contains(&row) {
            Some((row as usize, col as usize))
        } else {
            None
        }
    }
}

/// Classification of every pixel, row-major from the top-left.
pub fn classify_grid(p: MapParams, spec: &RasterSpec) -> Result<Vec<Classification>> {
    spec.validate()?;
    Ok((0..spec.pixels * spec.pixels)
        .into_par_iter()
        .map(|i| {
            let (row, col) = (i / spec.pixels, i % spec.pixels);
            classify_point(p, spec.pixel_point(row, col).into(), spec.max_iter, spec.eps)
        })
        .collect())
}

fn shade(n: usize) -> u8 {
    (255 - 8 * n.min(24)) as u8
}

/// Fixed palette: basin of 0 in blues, basin of 1 in oranges, both darker
/// with later entry; undecided pixels black.
pub fn color(c: Classification) -> [u8; 3] {
    match c {
        Classification::Basin0(n) => {
            let v = shade(n);
            [v / 4, v / 2, v]
        }
        Classification::Basin1(n) => {
            let v = shade(n);
            [v, v / 2, v / 4]
        }
        Classification::Undecided => [0, 0, 0],
    }
}

/// Binary PPM (P6) image bytes for a classified grid.
pub fn encode_ppm(pixels: usize, grid: &[Classification]) -> Vec<u8> {
    let header = format!("P6\n{pixels} {pixels}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * grid.len());
    out.extend_from_slice(header.as_bytes());
    for &c in grid {
        out.extend_from_slice(&color(c));
    }
    out
}

/// Summary of a rendered raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterStats {
    pub basin0: usize,
    pub basin1: usize,
    pub undecided: usize,
}

impl RasterStats {
    pub fn undecided_fraction(&self) -> f64 {
        self.undecided as f64 / (self.basin0 + self.basin1 + self.undecided) as f64
    }
}

pub fn raster_stats(grid: &[Classification]) -> RasterStats {
    let mut s = RasterStats { basin0: 0, basin1: 0, undecided: 0 };
    for c in grid {
        match c {
            Classification::Basin0(_) => s.basin0 += 1,
            Classification::Basin1(_) => s.basin1 += 1,
            Classification::Undecided => s.undecided += 1,
        }
    }
    s
}

/// Renders the basins to a PPM file at `out_path`.
pub fn render_raster(p: MapParams, spec: &RasterSpec, out_path: &Path) -> Result<RasterStats> {
    let grid = classify_grid(p, spec)?;
    let bytes = encode_ppm(spec.pixels, &grid);
    let io_err = |e: std::io::Error| Error::Domain(format!("writing {}: {e}", out_path.display()));
    let mut w = BufWriter::new(File::create(out_path).map_err(io_err)?);
    w.write_all(&bytes).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(raster_stats(&grid))
}

pub const MAX_CLOUD_POINTS: usize = 10_000_000;
const BURN_IN: usize = 20;

/// Random backward orbit of `t_c` through all `2b` preimages; after a
/// 20-step burn-in each visited point is emitted. Consecutive points satisfy
/// `f(x_{k+1}) = x_k`.
pub fn inverse_iteration_cloud(p: MapParams, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    if n > MAX_CLOUD_POINTS {
        return Err(Error::SizeGuard(format!("{n} cloud points exceed {MAX_CLOUD_POINTS}")));
    }
    let mut stream = rng::stream(seed, 0);
    let mut x = SpherePoint::real(map::find_unstable_fixed_point(p).t_c);
    let mut out = Vec::with_capacity(n);
    for step in 0..BURN_IN + n {
        let candidates: Vec<SpherePoint> =
            map::all_preimages(p, x).into_iter().filter(|s| !s.is_infinite()).collect();
        x = candidates[stream.random_range(0..candidates.len())];
        if step >= BURN_IN {
            out.push(x.finite().expect("finite preimage"));
        }
    }
    Ok(out)
}
