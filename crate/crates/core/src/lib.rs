//! Numerics for the Ising model on diamond hierarchical lattices: the
//! Migdal–Kadanoff map `f(t) = 4t^b/(1+t^b)^2`, the free-energy series and its
//! derivatives, Böttcher coordinates and geodesics of the low-temperature
//! basin, thermodynamic-formalism estimators on its boundary, and the
//! critical exponents of the free energy along geodesics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boettcher;
pub mod cli;
pub mod error;
pub mod exponents;
pub mod free_energy;
pub mod jet;
pub mod julia;
pub mod lattice;
pub mod map;
pub mod rng;
pub mod selftest;
pub mod sphere;
pub mod thermo;

pub use error::{Error, Result};
pub use map::MapParams;
pub use sphere::SpherePoint;
