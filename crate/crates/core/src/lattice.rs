//! Diamond hierarchical lattices, exact Ising partition functions by
//! enumeration, and exact decimation of the inner sites of one cell.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_LEVEL: usize = 4;
pub const MAX_BRANCHING: u32 = 8;
pub const MAX_ENUMERATED_SITES: usize = 24;

/// `Γ_n`: sites `0` and `1` are the outer sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGraph {
    pub sites: usize,
    pub bonds: Vec<(usize, usize)>,
    pub level: usize,
    pub branching: u32,
}

impl LatticeGraph {
    pub fn degree(&self, site: usize) -> usize {
        self.bonds.iter().filter(|&&(a, c)| a == site || c == site).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.sites];
        for &(a, c) in &self.bonds {
            adj[a].push(c);
            adj[c].push(a);
        }
        let mut seen = vec![false; self.sites];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Replaces every bond of `Γ_{n-1}` by `b` two-bond branches, each through a
/// new inner site. Outer sites have degree `b^n`.
pub fn build_lattice(b: u32, n: usize) -> Result<LatticeGraph> {
    if !(1..=MAX_BRANCHING).contains(&b) {
        return Err(Error::SizeGuard(format!("branching b = {b} must lie in 1..={MAX_BRANCHING}")));
    }
    if n > MAX_LEVEL {
        return Err(Error::SizeGuard(format!("level n = {n} exceeds {MAX_LEVEL}")));
    }
    let mut g = LatticeGraph { sites: 2, bonds: vec![(0, 1)], level: 0, branching: b };
    for _ in 0..n {
        let mut bonds = Vec::with_capacity(g.bonds.len() * 2 * b as usize);
        let mut sites = g.sites;
        for &(u, v) in &g.bonds {
            for _ in 0..b {
                bonds.push((u, sites));
                bonds.push((sites, v));
                sites += 1;
            }
        }
        g = LatticeGraph { sites, bonds, level: g.level + 1, branching: b };
    }
    Ok(g)
}

/// Number of configurations with each value of `Σ_bonds σ_i σ_j`, indexed
/// by `(E + bonds) / 2`. With `pinned`, site 0 is held at `+1`.
fn energy_histogram(graph: &LatticeGraph, pinned: bool) -> Result<Vec<u64>> {
    if graph.sites > MAX_ENUMERATED_SITES {
        return Err(Error::SizeGuard(format!("{} sites exceed the enumeration limit {MAX_ENUMERATED_SITES}", graph.sites)));
    }
    let free = if pinned { graph.sites - 1 } else { graph.sites };
    let shift = graph.sites - free;
    let nb = graph.bonds.len();
    let block_bits = free.min(10);
    let inner_bits = free - block_bits;
    let bonds = &graph.bonds;
    let hist = (0u64..1 << block_bits)
        .into_par_iter()
        .map(|hi| {
            let mut h = vec![0u64; nb + 1];
            for lo in 0u64..1 << inner_bits {
                // bit i set means σ_i = -1; pinned site 0 keeps bit 0 clear
                let s = ((hi << inner_bits) | lo) << shift;
                let disagree: usize = bonds.iter().map(|&(i, j)| (((s >> i) ^ (s >> j)) & 1) as usize).sum();
                h[nb - disagree] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; nb + 1],
            |mut a, c| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

fn log_sum_from_histogram(hist: &[u64], nb: usize, k: f64) -> f64 {
    let terms: Vec<f64> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (c as f64).ln() + k * (2.0 * i as f64 - nb as f64))
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln Σ_σ exp(K Σ_bonds σ_i σ_j)` over all `2^sites` spin configurations.
pub fn exact_log_z(graph: &LatticeGraph, k: f64) -> Result<f64> {
    let hist = energy_histogram(graph, false)?;
    Ok(log_sum_from_histogram(&hist, graph.bonds.len(), k))
}

/// As [`exact_log_z`] with outer site 0 fixed to `+1`.
pub fn exact_log_z_pinned(graph: &LatticeGraph, k: f64) -> Result<f64> {
    let hist = energy_histogram(graph, true)?;
    Ok(log_sum_from_histogram(&hist, graph.bonds.len(), k))
}

/// Effective coupling and prefactor of one decimated cell: tracing out the
/// `b` inner sites gives `c·exp(K_eff σ_1 σ_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decimation {
    pub k_eff: f64,
    pub log_c: f64,
}

/// `ln(2 cosh x)` without overflow.
fn ln_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// With `W(s) = [2 cosh(K s)]^b`: `K_eff = ½ ln(W(2)/W(0))`,
/// `ln c = ½ ln(W(2) W(0))`.
pub fn decimate_cell(b: u32, k: f64) -> Decimation {
    let ln_w2 = b as f64 * ln_two_cosh(2.0 * k);
    let ln_w0 = b as f64 * std::f64::consts::LN_2;
    Decimation { k_eff: 0.5 * (ln_w2 - ln_w0), log_c: 0.5 * (ln_w2 + ln_w0) }
}

/// `|ln Z(Γ_{n+1}, K) - (2b)^n ln c(K) - ln Z(Γ_n, K_eff(K))|`.
pub fn verify_decimation(b: u32, n: usize, k: f64) -> Result<f64> {
    let fine = build_lattice(b, n + 1)?;
    let coarse = build_lattice(b, n)?;
    let d = decimate_cell(b, k);
    let cells = coarse.bonds.len() as f64;
    Ok((exact_log_z(&fine, k)? - cells * d.log_c - exact_log_z(&coarse, d.k_eff)?).abs())
}

/// Exploratory comparison of the coupling flow with the temperature-variable
/// map: `t(K) = exp(-2K/b)` is tabulated next to `t(K_eff)`. No relation
/// between the two columns is asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRow {
    pub k: f64,
    pub k_eff: f64,
    pub t_of_k: f64,
    pub t_of_k_eff: f64,
}

pub fn flow_row(b: u32, k: f64) -> FlowRow {
    let d = decimate_cell(b, k);
    let t = |k: f64| (-2.0 * k / b as f64).exp();
    FlowRow { k, k_eff: d.k_eff, t_of_k: t(k), t_of_k_eff: t(d.k_eff) }
}
